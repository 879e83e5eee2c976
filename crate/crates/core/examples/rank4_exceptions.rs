//! Two rank-4 states where the best ansatz is not optimal: the LP finds a
//! lower value. Neither state has metrological power.
//!
//! cargo run --release --example rank4_exceptions

use fockroof::ansatz::classify_rank4;
use fockroof::qfi::quadrature_qfi;
use fockroof::roof;
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    let delta = 0.0099;
    for p in [[0.92, 0.06, 0.01, 0.01], [0.83, 0.15, 0.01, 0.01]] {
        let state = FockDiagonalState::new(0, p.to_vec())?;
        let ansatz = classify_rank4(0, p)?;
        let est = roof::estimate_ort(&state, delta)?;
        let w = quadrature_qfi(&state);
        println!("{p:?}");
        for c in &ansatz.candidates {
            println!(
                "  {:<11} {:.7}{}",
                c.label.as_str(),
                c.value,
                if c.feasible { "" } else { "  (infeasible)" }
            );
        }
        println!(
            "  best ansatz {} = {:.7}; N_LP = {:.7} over {} columns ({:.1}% lower)",
            ansatz.label,
            ansatz.value,
            est.n_upper,
            est.columns,
            100.0 * (ansatz.value - est.n_upper) / ansatz.value
        );
        println!("  F_X = {:.5}, W = {}", w.fisher, w.power);
        println!("  LP support:");
        for e in est.histogram.entries() {
            println!("    x = {:.4?}  weight {:.5}", e.free_amplitudes(), e.weight);
        }
    }
    Ok(())
}
