//! Full grids versus local refinement for one rank-4 state.
//!
//! cargo run --release --example grid_refinement

use fockroof::roof::{self, count_points};
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    let state = FockDiagonalState::new(0, vec![0.55, 0.25, 0.15, 0.05])?;
    println!("full grids:");
    for delta in [0.1, 0.05, 0.025, 0.0125] {
        let est = roof::estimate_ort(&state, delta)?;
        println!(
            "  Δ = {delta:<7} points {:>7}  N = {:.8}",
            count_points(4, delta),
            est.n_upper
        );
    }
    let r = roof::refine(&state, 0.1, 6)?;
    println!("local refinement from Δ = 0.1:");
    for level in &r.levels {
        println!("  Δ = {:<9} columns {:>5}  N = {:.8}", level.delta, level.columns, level.n_upper);
    }
    println!("simple bound {:.8}", state.simple_bound());
    Ok(())
}
