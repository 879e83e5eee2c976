//! Nonclassicality per photon of truncated thermal states as the
//! truncation M grows.
//!
//! cargo run --release --example thermal_truncation -- [n_th]

use fockroof::roof;
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    let n_th: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    println!("{:>2} {:>10} {:>12} {:>10} {:>9}", "M", "n_M", "N", "N/n_M", "columns");
    for m in 2..=6 {
        let state = FockDiagonalState::truncated_thermal(n_th, m)?;
        // Δ = 0.05 then two local refinements
        let r = roof::refine(&state, 0.05, 3)?;
        let mean = state.mean_photon();
        println!(
            "{m:>2} {mean:>10.6} {:>12.8} {:>10.6} {:>9}",
            r.estimate.n_upper,
            r.estimate.n_upper / mean,
            r.estimate.columns
        );
    }
    Ok(())
}
