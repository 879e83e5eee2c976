//! Rank-3 phases: triplet, upper pair, lower pair.
//!
//! Populations are passed bottom-up as `[p_n, p_{n+1}, p_{n+2}]`.

use super::search::TwoPart;
use super::{check_populations, mean, PairAnsatz, FEAS_SLACK};
use crate::error::{Error, Result};

/// Triplet value `2p_{n+2} + p_{n+1} + n − (√(p_{n+2}(n+2)) + √(p_n(n+1)))²·p_{n+1}`,
/// algebraically the simple bound.
pub fn rank3_triplet(n: u32, p: [f64; 3]) -> Result<f64> {
    check_populations(&p)?;
    let nf = n as f64;
    let cross = (p[2] * (nf + 2.0)).sqrt() + (p[0] * (nf + 1.0)).sqrt();
    Ok(2.0 * p[2] + p[1] + nf - cross * cross * p[1])
}

/// `f = (n+2)p_{n+2} / ((n+1)p_{n+1} + (2n+3)p_{n+2})`.
pub fn upper_pair_f(n: u32, p2: f64, p1: f64) -> f64 {
    let nf = n as f64;
    (nf + 2.0) * p2 / ((nf + 1.0) * p1 + (2.0 * nf + 3.0) * p2)
}

/// `g = (n+1)(1 − p_{n+1} − p_{n+2}) / ((2n+3)(1 − p_{n+2}) − (n+1)p_{n+1})`.
pub fn lower_pair_g(n: u32, p2: f64, p1: f64) -> f64 {
    let nf = n as f64;
    (nf + 1.0) * (1.0 - p1 - p2) / ((2.0 * nf + 3.0) * (1.0 - p2) - (nf + 1.0) * p1)
}

fn upper_family(n: u32, p: [f64; 3]) -> TwoPart {
    let s = p[1] + p[2];
    TwoPart {
        n,
        e: vec![1.0, 0.0, 0.0],
        u: vec![0.0, (p[1] / s).sqrt(), (p[2] / s).sqrt()],
        weight: s,
    }
}

fn lower_family(n: u32, p: [f64; 3]) -> TwoPart {
    let t = p[0] + p[1];
    TwoPart {
        n,
        e: vec![0.0, 0.0, 1.0],
        u: vec![(p[0] / t).sqrt(), (p[1] / t).sqrt(), 0.0],
        weight: t,
    }
}

/// The Fock state `|n⟩` plus superpositions
/// `√(1−f)|n⟩ + √f(√(p_{n+2}/s)|n+2⟩ + √(p_{n+1}/s)|n+1⟩)`,
/// `s = p_{n+1} + p_{n+2}`, which carry total weight `s/f ≤ 1`.
pub fn rank3_upper_pair(n: u32, p: [f64; 3]) -> Result<PairAnsatz> {
    check_populations(&p)?;
    let s = p[1] + p[2];
    if s == 0.0 {
        return Err(Error::Degenerate("upper pair needs p_{n+1} + p_{n+2} > 0".into()));
    }
    let f = upper_pair_f(n, p[2], p[1]);
    Ok(PairAnsatz {
        value: mean(n, &p) - upper_family(n, p).objective(f),
        param: f,
        feasible: s <= f + FEAS_SLACK,
    })
}

/// The Fock state `|n+2⟩` plus superpositions
/// `√(1−g)|n+2⟩ + √g(√(p_{n+1}/t)|n+1⟩ + √(p_n/t)|n⟩)`,
/// `t = 1 − p_{n+2}`, which carry total weight `t/g ≤ 1`.
pub fn rank3_lower_pair(n: u32, p: [f64; 3]) -> Result<PairAnsatz> {
    check_populations(&p)?;
    let t = p[0] + p[1];
    if t == 0.0 {
        return Err(Error::Degenerate("lower pair needs p_{n+2} < 1".into()));
    }
    let g = lower_pair_g(n, p[2], p[1]);
    Ok(PairAnsatz {
        value: mean(n, &p) - lower_family(n, p).objective(g),
        param: g,
        feasible: t <= g + FEAS_SLACK,
    })
}

/// Solves the stationarity condition
/// `(n+2)p_{n+2}/((p_{n+2}+p_{n+1}) f) = (n+1)/(1−f)`
/// for `f` by bisection; agrees with [`upper_pair_f`].
pub fn upper_pair_f_stationary(n: u32, p2: f64, p1: f64) -> Result<f64> {
    let s = p1 + p2;
    if s <= 0.0 {
        return Err(Error::Degenerate("stationarity needs p_{n+1} + p_{n+2} > 0".into()));
    }
    let nf = n as f64;
    let a = (nf + 2.0) * p2 / s;
    // a(1−f) − (n+1)f, strictly decreasing on [0, 1]
    let r = |f: f64| a * (1.0 - f) - (nf + 1.0) * f;
    Ok(bisect(r, 0.0, 1.0))
}

/// Root of a function that goes from ≥ 0 to ≤ 0 on `[lo, hi]`.
pub(crate) fn bisect(r: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if r(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `p_{n+2}` where the upper-pair feasibility boundary meets `p_{n+1} = 0`.
pub fn upper_pair_axis_threshold(n: u32) -> f64 {
    bisect(|p2| upper_pair_f(n, p2, 0.0) - p2, f64::MIN_POSITIVE, 1.0)
}

/// `p_{n+2}` where the lower-pair feasibility boundary meets `p_{n+1} = 0`.
pub fn lower_pair_axis_threshold(n: u32) -> f64 {
    bisect(|p2| (1.0 - p2) - lower_pair_g(n, p2, 0.0), 0.0, 1.0 - f64::EPSILON)
}

/// `p_{n+1}` on the upper-pair boundary `p_{n+1} + p_{n+2} = f` at the
/// given `p_{n+2}`, or `None` when the boundary does not reach it.
pub fn upper_pair_boundary(n: u32, p2: f64) -> Option<f64> {
    let gap = |p1: f64| upper_pair_f(n, p2, p1) - (p1 + p2);
    (p2 > 0.0 && gap(0.0) >= 0.0 && gap(1.0 - p2) <= 0.0).then(|| bisect(gap, 0.0, 1.0 - p2))
}

/// `p_{n+1}` on the lower-pair boundary `1 − p_{n+2} = g` at the given
/// `p_{n+2}`, or `None` when the boundary does not reach it.
pub fn lower_pair_boundary(n: u32, p2: f64) -> Option<f64> {
    let gap = |p1: f64| lower_pair_g(n, p2, p1) - (1.0 - p2);
    (p2 < 1.0 && gap(0.0) >= 0.0 && gap(1.0 - p2) <= 0.0).then(|| bisect(gap, 0.0, 1.0 - p2))
}
