//! Roots-of-unity expansion of a histogram into an explicit ensemble.

use num_complex::Complex64;
use serde::Serialize;

use super::Histogram;
use crate::error::{Error, Result};
use crate::fock::{PureFockWindowState, ARITH_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub probability: f64,
    pub state: PureFockWindowState,
}

/// A pure-state ensemble `{q_j, |φ_j⟩}` over one Fock window.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitDecomposition {
    offset: u32,
    phase_order: usize,
    atoms: Vec<Atom>,
}

/// Smallest admissible phase order for rank `m`.
pub fn min_phase_order(m: usize) -> usize {
    m.max(3)
}

/// Default phase order for rank `m`: the four-prong set when it suffices.
pub fn default_phase_order(m: usize) -> usize {
    m.max(4)
}

/// Replaces every histogram entry `x` of weight `w` by `P` atoms of
/// probability `w/P` with amplitudes `x_k e^{i2πj(M-1-k)/P}`, `j = 0..P`.
///
/// The phases make `Σ_j q_j ᾱ_j²` and every off-diagonal element of the
/// mixture vanish, while `|ᾱ_j|` is the same for all `j`.
pub fn expand_histogram(histogram: &Histogram, phase_order: usize) -> Result<ExplicitDecomposition> {
    let m = histogram.rank();
    if phase_order < min_phase_order(m) {
        return Err(Error::InvalidArgument(format!(
            "phase order {phase_order} is below max(3, M) = {}",
            min_phase_order(m)
        )));
    }
    let p = phase_order as f64;
    let mut atoms = Vec::with_capacity(histogram.support_len() * phase_order);
    for e in histogram.entries() {
        for j in 0..phase_order {
            let amplitudes = e
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let turns = (j * (m - 1 - k)) % phase_order;
                    x * Complex64::cis(std::f64::consts::TAU * turns as f64 / p)
                })
                .collect();
            atoms.push(Atom {
                probability: e.weight / p,
                state: PureFockWindowState::with_tolerance(histogram.offset(), amplitudes, ARITH_TOL)?,
            });
        }
    }
    Ok(ExplicitDecomposition {
        offset: histogram.offset(),
        phase_order,
        atoms,
    })
}

#[derive(Serialize)]
struct JsonAmplitude {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct JsonAtom {
    probability: f64,
    amplitudes: Vec<JsonAmplitude>,
}

impl ExplicitDecomposition {
    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn phase_order(&self) -> usize {
        self.phase_order
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|a| a.probability).sum()
    }

    /// `Σ_j q_j |φ_j⟩⟨φ_j|` over the window, row-major `M × M`.
    pub fn density_matrix(&self) -> Vec<Complex64> {
        let m = self.atoms.first().map_or(0, |a| a.state.amplitudes().len());
        let mut rho = vec![Complex64::new(0.0, 0.0); m * m];
        for a in &self.atoms {
            for (r, v) in rho.iter_mut().zip(a.state.density_matrix()) {
                *r += a.probability * v;
            }
        }
        rho
    }

    /// `Σ_j q_j ᾱ_j²`.
    pub fn sum_alpha_squared(&self) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| {
                let alpha = a.state.moments().alpha_bar;
                a.probability * alpha * alpha
            })
            .sum()
    }

    /// `Σ_j q_j |ᾱ_j|²`.
    pub fn sum_abs_alpha_squared(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.probability * a.state.moments().alpha_bar.norm_sqr())
            .sum()
    }

    /// The ensemble's value of the convex-roof objective,
    /// `Σ q_j (n̄_j − |ᾱ_j|²) + |Σ q_j (ξ̄_j − ᾱ_j²)|`.
    pub fn value(&self) -> f64 {
        let mut incoherent = 0.0;
        let mut coherent = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let m = a.state.moments();
            incoherent += a.probability * (m.n_bar - m.alpha_bar.norm_sqr());
            coherent += a.probability * (m.xi_bar - m.alpha_bar * m.alpha_bar);
        }
        incoherent + coherent.norm()
    }

    /// JSON array of `{probability, amplitudes: [{re, im}, …]}`.
    pub fn to_json(&self) -> Result<String> {
        let atoms: Vec<JsonAtom> = self
            .atoms
            .iter()
            .map(|a| JsonAtom {
                probability: a.probability,
                amplitudes: a
                    .state
                    .amplitudes()
                    .iter()
                    .map(|c| JsonAmplitude { re: c.re, im: c.im })
                    .collect(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&atoms)?)
    }
}
