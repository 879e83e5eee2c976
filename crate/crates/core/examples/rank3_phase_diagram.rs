//! Text rendering of the rank-3 phase diagram, with p_{n+2} across and
//! p_{n+1} up. T = triplet, U = upper pair, L = lower pair.
//!
//! cargo run --example rank3_phase_diagram -- [n]

use fockroof::ansatz::{classify_rank3, lower_pair_axis_threshold, upper_pair_axis_threshold, PhaseLabel};

fn main() -> fockroof::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0);
    let k = 40;
    println!("n = {n}");
    for i1 in (0..=k).rev() {
        let mut line = String::new();
        for i2 in 0..=k - i1 {
            let (p1, p2) = (i1 as f64 / k as f64, i2 as f64 / k as f64);
            let r = classify_rank3(n, [(1.0 - p1 - p2).max(0.0), p1, p2])?;
            line.push(match r.label {
                PhaseLabel::Triplet => 'T',
                PhaseLabel::UpperPair => 'U',
                PhaseLabel::LowerPair => 'L',
                _ => '?',
            });
        }
        println!("{:5.3} {line}", i1 as f64 / k as f64);
    }
    println!(
        "pair boundaries meet p_(n+1) = 0 at {:.6} and {:.6}; (2+n)/(3+2n) = {:.6}",
        upper_pair_axis_threshold(n),
        lower_pair_axis_threshold(n),
        (2.0 + n as f64) / (3.0 + 2.0 * n as f64)
    );
    Ok(())
}
