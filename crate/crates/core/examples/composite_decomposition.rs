//! A compositely decomposed state: (0.6, 0.2, 0.2) sits in the upper-pair
//! phase and its optimum mixes |0> with the triplet-boundary state
//! (0.5, 0.25, 0.25). Writes the explicit decomposition as JSON.
//!
//! cargo run --release --example composite_decomposition -- [out.json]

use fockroof::ansatz::classify_rank3;
use fockroof::roof::{self, classify_simple_composite, expand_histogram};
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    let delta = 0.01;
    for p in [[0.6, 0.2, 0.2], [0.5, 0.25, 0.25]] {
        let state = FockDiagonalState::new(0, p.to_vec())?;
        let est = roof::estimate_ort(&state, delta)?;
        println!(
            "{p:?}: N = {:.6}, simple bound {:.6}, ansatz {}, {:?}",
            est.n_upper,
            state.simple_bound(),
            classify_rank3(0, p)?.label,
            classify_simple_composite(&state, delta)?
        );
        for e in est.histogram.entries() {
            println!("    x = {:.4?} weight {:.4}", e.free_amplitudes(), e.weight);
        }
    }

    let state = FockDiagonalState::new(0, vec![0.6, 0.2, 0.2])?;
    let est = roof::estimate_ort(&state, delta)?;
    let dec = expand_histogram(&est.histogram, 4)?;
    println!(
        "{} atoms, total probability {:.12}, |Σ q ᾱ²| = {:.1e}, value {:.8}",
        dec.atoms().len(),
        dec.total_probability(),
        dec.sum_alpha_squared().norm(),
        dec.value()
    );
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, dec.to_json()?)?;
        println!("wrote {path}");
    }
    Ok(())
}
