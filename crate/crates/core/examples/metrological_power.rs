//! W ≤ N ≤ simple bound for a few families of states.
//!
//! cargo run --release --example metrological_power

use fockroof::qfi::quadrature_qfi;
use fockroof::roof;
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    let states = [
        ("|3>", FockDiagonalState::fock(3)),
        ("spike near |2>", FockDiagonalState::new(1, vec![0.02, 0.96, 0.02])?),
        ("flat rank 3", FockDiagonalState::new(0, vec![1.0 / 3.0; 3])?),
        ("binomial-like", FockDiagonalState::new(0, vec![0.25, 0.5, 0.25])?),
        ("thermal M=4", FockDiagonalState::truncated_thermal(1.0, 4)?),
        ("exception", FockDiagonalState::new(0, vec![0.92, 0.06, 0.01, 0.01])?),
    ];
    println!("{:<16} {:>9} {:>9} {:>9} {:>9}", "state", "F_X", "W", "N_LP", "simple");
    for (name, s) in &states {
        let q = quadrature_qfi(s);
        let n = roof::estimate_ort(s, 0.02)?.n_upper;
        println!(
            "{name:<16} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            q.fisher,
            q.power,
            n,
            s.simple_bound()
        );
    }
    Ok(())
}
