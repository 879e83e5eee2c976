//! Rank-2 states: the LP optimum is a single spike at x = √p, and the
//! four-prong phase expansion turns it into an explicit decomposition.
//!
//! cargo run --example rank2_four_prong

use fockroof::fock::rank2_closed_form;
use fockroof::roof::{self, expand_histogram};
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    println!("{:>3} {:>5} {:>12} {:>12} {:>8}", "n", "p", "N_LP", "closed", "support");
    for n in 0..3 {
        for p in [0.1, 0.16, 0.3, 0.5, 0.8] {
            let state = FockDiagonalState::new(n, vec![1.0 - p, p])?;
            let est = roof::estimate_ort(&state, 0.01)?;
            let xs: Vec<String> = est
                .histogram
                .entries()
                .iter()
                .map(|e| format!("{:.4}", e.free_amplitudes()[0]))
                .collect();
            println!(
                "{n:>3} {p:>5.2} {:>12.8} {:>12.8} {:>8}",
                est.n_upper,
                rank2_closed_form(n, p),
                xs.join(",")
            );
        }
    }

    let state = FockDiagonalState::new(0, vec![0.84, 0.16])?;
    let est = roof::estimate_ort(&state, 0.01)?;
    let dec = expand_histogram(&est.histogram, 4)?;
    println!("\nfour-prong decomposition of (0.84, 0.16):");
    for atom in dec.atoms() {
        let a = atom.state.amplitudes();
        println!(
            "  q = {:.3}  ({:+.4}{:+.4}i, {:+.4}{:+.4}i)",
            atom.probability, a[0].re, a[0].im, a[1].re, a[1].im
        );
    }
    println!("value of the decomposition: {:.10}", dec.value());
    Ok(())
}
