//! Using the simplex solver on its own, and round-tripping a convex-roof
//! program through the text dump.
//!
//! cargo run --example custom_lp

use fockroof::lp::{self, read_dump, write_dump, SolveOptions, StandardFormLp};
use fockroof::roof::{assemble_lp, build_grid};
use fockroof::FockDiagonalState;

fn main() -> fockroof::Result<()> {
    // max 3a + 2b + 4c  s.t.  a + b + c + s1 = 4,  a + 3b + 2c + s2 = 6
    let prog = StandardFormLp::from_rows(
        vec![3.0, 2.0, 4.0, 0.0, 0.0],
        &[vec![1.0, 1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 2.0, 0.0, 1.0]],
        vec![4.0, 6.0],
    )?;
    let sol = lp::solve(&prog, &SolveOptions::default()).into_optimal()?;
    println!("optimum {} at {:?} after {} pivots", sol.objective_value, sol.primal, sol.iterations);

    let state = FockDiagonalState::new(2, vec![0.5, 0.3, 0.2])?;
    let prog = assemble_lp(&state, &build_grid(3, 0.1)?)?;
    let mut text = Vec::new();
    write_dump(&prog, &mut text)?;
    let back = read_dump(text.as_slice())?;
    assert_eq!(back, prog);
    let header = String::from_utf8_lossy(&text[..text.iter().position(|&b| b == b'\n').unwrap()]).into_owned();
    println!("\ndump header: {header}, {} bytes, reads back identically", text.len());
    let sol = lp::solve(&back, &SolveOptions::default()).into_optimal()?;
    println!("N on the Δ = 0.1 lattice: {:.8}", state.mean_photon() - sol.objective_value);
    Ok(())
}
