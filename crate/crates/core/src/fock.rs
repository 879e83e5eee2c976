//! Fock-diagonal mixed states, pure states on a Fock window, and the
//! closed-form quantities built from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance applied when a state is constructed.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for quantities that went through arithmetic.
pub const ARITH_TOL: f64 = 1e-10;

/// A density matrix `Σ_k p_{n+k} |n+k⟩⟨n+k|` stored over its trimmed
/// support window `[n, n+M-1]`.
///
/// The first and last stored populations are strictly positive; interior
/// zeros are allowed (e.g. `p|0⟩⟨0| + (1-p)|2⟩⟨2|` has rank 3 with `p_1 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDiagonalState {
    offset: u32,
    populations: Vec<f64>,
}

impl FockDiagonalState {
    /// Builds a state from populations starting at photon number `offset`.
    ///
    /// Leading and trailing zero populations are trimmed and the offset is
    /// shifted accordingly, so `new(0, [0, 0.5, 0.5, 0])` has offset 1 and
    /// rank 2.
    pub fn new(offset: u32, populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::InvalidState("no populations given".into()));
        }
        for (k, &p) in populations.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidState(format!(
                    "population {k} is {p}; populations must be finite and nonnegative"
                )));
            }
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "populations sum to {total}, not 1"
            )));
        }
        let first = populations.iter().position(|&p| p > 0.0).unwrap();
        let last = populations.iter().rposition(|&p| p > 0.0).unwrap();
        Ok(Self {
            offset: offset + first as u32,
            populations: populations[first..=last].to_vec(),
        })
    }

    /// The number state `|m⟩⟨m|`.
    pub fn fock(m: u32) -> Self {
        Self {
            offset: m,
            populations: vec![1.0],
        }
    }

    /// Thermal populations with mean `n_th`, truncated to photon numbers
    /// below `m` and renormalized.
    pub fn truncated_thermal(n_th: f64, m: usize) -> Result<Self> {
        if !(n_th > 0.0) || !n_th.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "thermal occupation must be positive, got {n_th}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("truncation rank must be ≥ 1".into()));
        }
        let ratio = n_th / (1.0 + n_th);
        let norm = 1.0 / (1.0 - ratio.powi(m as i32));
        let mut populations: Vec<f64> = (0..m)
            .map(|k| norm * ratio.powi(k as i32) / (1.0 + n_th))
            .collect();
        // absorb the last few ulps of rounding so construction never trips on it
        let total: f64 = populations.iter().sum();
        populations.iter_mut().for_each(|p| *p /= total);
        Self::new(0, populations)
    }

    /// Lowest populated photon number `n`.
    pub fn offset(&self) -> u32 {
        self.offset
    }

    /// Populations `(p_n, …, p_{n+M-1})`.
    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    /// Window length `M`.
    pub fn rank(&self) -> usize {
        self.populations.len()
    }

    /// Population of photon number `photon`, zero outside the window.
    pub fn population(&self, photon: u32) -> f64 {
        photon
            .checked_sub(self.offset)
            .and_then(|k| self.populations.get(k as usize))
            .copied()
            .unwrap_or(0.0)
    }

    /// `⟨a†a⟩`.
    pub fn mean_photon(&self) -> f64 {
        self.populations
            .iter()
            .enumerate()
            .map(|(k, p)| (self.offset as f64 + k as f64) * p)
            .sum()
    }

    /// Upper bound on the measure from the decomposition whose atoms all
    /// carry amplitudes `√p_{n+k}`.
    pub fn simple_bound(&self) -> f64 {
        let cross: f64 = self
            .populations
            .windows(2)
            .enumerate()
            .map(|(k, w)| (w[1] * w[0] * (self.offset as f64 + k as f64 + 1.0)).sqrt())
            .sum();
        self.mean_photon() - cross * cross
    }
}

/// `⟨a†a⟩`, `⟨a⟩` and `⟨a²⟩` of a pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTriple {
    pub n_bar: f64,
    pub alpha_bar: Complex64,
    pub xi_bar: Complex64,
}

/// A pure state `Σ_k c_k |n+k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureFockWindowState {
    offset: u32,
    amplitudes: Vec<Complex64>,
}

impl PureFockWindowState {
    pub fn new(offset: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(offset, amplitudes, NORM_TOL)
    }

    /// Like [`new`](Self::new) but with a caller-chosen norm tolerance, for
    /// amplitudes that are the output of arithmetic.
    pub fn with_tolerance(offset: u32, amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("no amplitudes given".into()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "squared amplitudes sum to {norm}, not 1"
            )));
        }
        Ok(Self { offset, amplitudes })
    }

    /// Real nonnegative amplitudes.
    pub fn from_real(offset: u32, amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            offset,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn moments(&self) -> MomentTriple {
        let n = self.offset as f64;
        let c = &self.amplitudes;
        let n_bar = c
            .iter()
            .enumerate()
            .map(|(k, ck)| (n + k as f64) * ck.norm_sqr())
            .sum();
        let alpha_bar = c
            .windows(2)
            .enumerate()
            .map(|(k, w)| w[0].conj() * w[1] * (n + k as f64 + 1.0).sqrt())
            .sum();
        let xi_bar = c
            .windows(3)
            .enumerate()
            .map(|(k, w)| {
                w[0].conj() * w[2] * ((n + k as f64 + 1.0) * (n + k as f64 + 2.0)).sqrt()
            })
            .sum();
        MomentTriple {
            n_bar,
            alpha_bar,
            xi_bar,
        }
    }

    /// Pure-state measure `⟨a†a⟩ − |⟨a⟩|² + |⟨a²⟩ − ⟨a⟩²|`, i.e. the largest
    /// quadrature variance minus 1/2.
    pub fn ort(&self) -> f64 {
        let m = self.moments();
        let value = m.n_bar - m.alpha_bar.norm_sqr() + (m.xi_bar - m.alpha_bar * m.alpha_bar).norm();
        value.max(0.0)
    }

    /// Expands the pure state into the full density matrix over its window,
    /// row-major, `M × M`.
    pub fn density_matrix(&self) -> Vec<Complex64> {
        let m = self.amplitudes.len();
        let mut rho = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                rho[i * m + j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        rho
    }
}

/// `Σ_k x_{k+1} x_k √(n+k+1)` for real amplitudes `x = (x_0, …, x_{M-1})`
/// starting at photon number `n`; the size of `⟨a⟩` once the relative phases
/// make every term interfere constructively.
pub fn alpha_bar_real(x: &[f64], n: u32) -> f64 {
    let n = n as f64;
    x.windows(2)
        .enumerate()
        .map(|(k, w)| w[1] * w[0] * (n + k as f64 + 1.0).sqrt())
        .sum()
}

/// Exact measure of `p|n+1⟩⟨n+1| + (1-p)|n⟩⟨n|`.
pub fn rank2_closed_form(n: u32, p: f64) -> f64 {
    let n = n as f64;
    n + p - (n + 1.0) * p * (1.0 - p)
}
