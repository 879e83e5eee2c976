//! Rank-4 phases: quartet, four triplets, and the `(n+2, n+1)` pair.
//!
//! Populations are passed bottom-up as `[p_n, p_{n+1}, p_{n+2}, p_{n+3}]`.
//! These ansatzes are upper bounds; states are known where the LP beats
//! all of them by a few percent.

use super::search::TwoPart;
use super::{check_populations, mean, Pair21Ansatz, TripletAnsatz, FEAS_SLACK};
use crate::error::{Error, Result};

/// All four amplitudes equal to `√p`; identical to the simple bound.
pub fn rank4_quartet(n: u32, p: [f64; 4]) -> Result<f64> {
    check_populations(&p)?;
    let cross: f64 = (0..3)
        .map(|k| (p[k + 1] * p[k] * (n as f64 + k as f64 + 1.0)).sqrt())
        .sum();
    Ok(mean(n, &p) - cross * cross)
}

pub(crate) fn triplet_family(n: u32, p: [f64; 4], k: usize) -> TwoPart {
    let rest = 1.0 - p[k];
    let mut e = vec![0.0; 4];
    e[k] = 1.0;
    let u = (0..4)
        .map(|j| if j == k { 0.0 } else { (p[j] / rest).sqrt() })
        .collect();
    TwoPart {
        n,
        e,
        u,
        weight: rest,
    }
}

/// The Fock state `|n+k⟩` plus `√(1−f)|n+k⟩ + √f·(the other three at
/// `√(p_j/(1−p_k))`)`. `f_k` maximizes `(1−p_k)/f·ᾱ²` over `(0, 1]`; the
/// phase exists where that maximizer respects the weight bound
/// `f_k ≥ 1 − p_k`.
pub fn rank4_triplet_k(n: u32, p: [f64; 4], k: usize) -> Result<TripletAnsatz> {
    check_populations(&p)?;
    if k > 3 {
        return Err(Error::InvalidArgument(format!("triplet index {k} is not in 0..=3")));
    }
    if p[k] >= 1.0 {
        return Err(Error::Degenerate(format!("triplet {k} needs p_{{n+{k}}} < 1")));
    }
    let fam = triplet_family(n, p, k);
    let f = fam.argmax();
    Ok(TripletAnsatz {
        value: mean(n, &p) - fam.objective(f),
        f,
        feasible: f >= 1.0 - p[k] - FEAS_SLACK,
    })
}

/// `g = (n+3)p_{n+2} / ((n+1)p_{n+1} + (n+3)p_{n+2})`.
pub fn pair21_g(n: u32, p2: f64, p1: f64) -> f64 {
    let nf = n as f64;
    (nf + 3.0) * p2 / ((nf + 1.0) * p1 + (nf + 3.0) * p2)
}

pub(crate) fn pair21_family(n: u32, p2: f64, p1: f64) -> TwoPart {
    let s = p1 + p2;
    let g = pair21_g(n, p2, p1);
    TwoPart {
        n,
        e: vec![(1.0 - g).sqrt(), 0.0, 0.0, g.sqrt()],
        u: vec![0.0, (p1 / s).sqrt(), (p2 / s).sqrt(), 0.0],
        weight: s,
    }
}

/// Splits the state into an `{|n⟩, |n+3⟩}` part and superpositions
/// `√(1−f)(√g|n+3⟩ + √(1−g)|n⟩) + √f(√(p_{n+2}/s)|n+2⟩ + √(p_{n+1}/s)|n+1⟩)`.
/// `f` and `g` depend on `n`, `p_{n+2}`, `p_{n+1}` only; feasibility needs
/// the superpositions to fit inside the total, `|n+3⟩` and `|n⟩` budgets.
pub fn rank4_pair21(n: u32, p: [f64; 4]) -> Result<Pair21Ansatz> {
    check_populations(&p)?;
    let s = p[1] + p[2];
    if s == 0.0 {
        return Err(Error::Degenerate("pair needs p_{n+1} + p_{n+2} > 0".into()));
    }
    let fam = pair21_family(n, p[2], p[1]);
    let g = pair21_g(n, p[2], p[1]);
    let f = fam.argmax();
    let spill = if f > 0.0 { (1.0 - f) / f * s } else { f64::INFINITY };
    let feasible = s <= f + FEAS_SLACK
        && spill * g <= p[3] + FEAS_SLACK
        && spill * (1.0 - g) <= p[0] + FEAS_SLACK;
    Ok(Pair21Ansatz {
        value: mean(n, &p) - fam.objective(f),
        f,
        g,
        feasible,
    })
}

/// The pair objective's value at a chosen `f` rather than the optimal one.
pub fn rank4_pair21_value_at(n: u32, p: [f64; 4], f: f64) -> Result<f64> {
    check_populations(&p)?;
    if p[1] + p[2] == 0.0 {
        return Err(Error::Degenerate("pair needs p_{n+1} + p_{n+2} > 0".into()));
    }
    Ok(mean(n, &p) - pair21_family(n, p[2], p[1]).objective(f))
}
