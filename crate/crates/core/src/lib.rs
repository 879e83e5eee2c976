//! Nonclassicality of Fock-diagonal bosonic states.
//!
//! The operational resource-theory measure of a mixed state is a convex
//! roof: a minimization over every pure-state ensemble that reproduces the
//! density matrix. For states that are diagonal in the Fock basis the phase
//! freedom of each ensemble member can be fixed analytically, and what is
//! left is a linear program over histograms of amplitude moduli. This crate
//! builds and solves that program, expands the optimal histogram back into
//! an explicit ensemble, and cross-checks the numbers against closed-form
//! phase ansatzes (rank 3 and rank 4) and the quadrature Fisher information.
//!
//! Module map:
//!
//! - [`fock`]: state types, moments, the pure-state measure, closed forms.
//! - [`lp`]: a two-phase revised simplex for "few rows, many columns".
//! - [`roof`]: amplitude grids, LP assembly, refinement, histogram expansion.
//! - [`ansatz`]: rank-3 and rank-4 phase ansatzes and their classification.
//! - [`qfi`]: quadrature Fisher information and metrological power.
//! - [`cli`]: the command-line front end and its CSV/JSON writers.
//!
//! ```
//! use fockroof::{FockDiagonalState, roof};
//!
//! let state = FockDiagonalState::new(0, vec![0.84, 0.16]).unwrap();
//! let est = roof::estimate_ort(&state, 0.01).unwrap();
//! assert!((est.n_upper - 0.0256).abs() < 1e-9);
//! ```

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod fock;
pub mod lp;
pub mod qfi;
pub mod roof;

pub use error::{Error, Result};
pub use fock::{FockDiagonalState, MomentTriple, PureFockWindowState};

/// Formats a float with 17 significant digits, the fixed-field format used by
/// the LP dump and the histogram export.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}
