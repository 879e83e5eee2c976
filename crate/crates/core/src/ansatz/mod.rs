//! Closed-form phase ansatzes for rank-3 and rank-4 Fock-diagonal states.
//!
//! Each ansatz is an explicit decomposition family, so its value is an
//! upper bound on the measure. Classification takes the smallest value over
//! the families that are feasible for the given populations. For rank 3 the
//! three families are believed (not proven) to be exact; for rank 4 they are
//! known to be slightly loose in places, and results say so.
//!
//! Functions take the offset `n` and the raw populations bottom-up, so that
//! faces of the simplex with zero populations can be evaluated directly.

mod rank3;
mod rank4;
mod search;

use std::collections::BTreeMap;

use serde::Serialize;

pub use rank3::{
    lower_pair_axis_threshold, lower_pair_boundary, lower_pair_g, rank3_lower_pair, rank3_triplet,
    rank3_upper_pair, upper_pair_axis_threshold, upper_pair_boundary, upper_pair_f,
    upper_pair_f_stationary,
};
pub use rank4::{pair21_g, rank4_pair21, rank4_pair21_value_at, rank4_quartet, rank4_triplet_k};
pub use search::golden_max;

use crate::error::{Error, Result};
use crate::fock::{FockDiagonalState, ARITH_TOL};

/// Slack on the weight-budget inequalities, so that boundary points count
/// as feasible despite round-off.
const FEAS_SLACK: f64 = 1e-12;
/// Candidates closer than this are a tie, resolved toward the simpler label.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PhaseLabel {
    Triplet,
    UpperPair,
    LowerPair,
    Quartet,
    Triplet0,
    Triplet1,
    Triplet2,
    Triplet3,
    Pair21,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Triplet => "triplet",
            PhaseLabel::UpperPair => "upper-pair",
            PhaseLabel::LowerPair => "lower-pair",
            PhaseLabel::Quartet => "quartet",
            PhaseLabel::Triplet0 => "triplet-0",
            PhaseLabel::Triplet1 => "triplet-1",
            PhaseLabel::Triplet2 => "triplet-2",
            PhaseLabel::Triplet3 => "triplet-3",
            PhaseLabel::Pair21 => "pair-21",
        }
    }

    fn rank4_triplet(k: usize) -> Self {
        [Self::Triplet0, Self::Triplet1, Self::Triplet2, Self::Triplet3][k]
    }

    /// The rank-4 phase that a rank-3 phase becomes on a face of the
    /// rank-4 pyramid. `None` for labels that are not rank-3 phases.
    pub fn on_face(self, face: Face) -> Option<PhaseLabel> {
        use PhaseLabel::*;
        Some(match (self, face) {
            (Triplet, _) => Quartet,
            (UpperPair, Face::Upper) => Triplet0,
            (LowerPair, Face::Upper) => Triplet2,
            (UpperPair, Face::Lower) => Triplet1,
            (LowerPair, Face::Lower) => Triplet3,
            _ => return None,
        })
    }
}

/// A rank-3 face of the rank-4 pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    /// `p_{n+3} = 0`: the rank-3 window starts at `n`.
    Upper,
    /// `p_n = 0`: the rank-3 window starts at `n + 1`.
    Lower,
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rank-3 pair result: `param` is `f` for the upper pair, `g` for the lower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAnsatz {
    pub value: f64,
    pub param: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletAnsatz {
    pub value: f64,
    pub f: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair21Ansatz {
    pub value: f64,
    pub f: f64,
    pub g: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub label: PhaseLabel,
    pub value: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnsatzResult {
    pub label: PhaseLabel,
    /// Upper bound on the measure.
    pub value: f64,
    /// Decomposition parameters by name (`f`, `g`, `f0` … `f3`).
    pub params: BTreeMap<String, f64>,
    /// Every family that was evaluated, in tie-break order.
    pub candidates: Vec<Candidate>,
    /// Set for rank 4, where the families are not exhaustive.
    pub upper_bound_only: bool,
}

pub(crate) fn check_populations(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidState(format!(
            "populations {p:?} must be finite and nonnegative"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > ARITH_TOL {
        return Err(Error::InvalidState(format!("populations sum to {total}, not 1")));
    }
    Ok(())
}

pub(crate) fn mean(n: u32, p: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .map(|(k, x)| (n as f64 + k as f64) * x)
        .sum()
}

/// First candidate within [`TIE_TOL`] of the minimum feasible value.
fn pick(candidates: &[Candidate]) -> Candidate {
    let best = candidates
        .iter()
        .filter(|c| c.feasible)
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    *candidates
        .iter()
        .find(|c| c.feasible && c.value <= best + TIE_TOL)
        .expect("the simple decomposition is always feasible")
}

fn corner(n: u32, p: &[f64]) -> Option<(usize, f64)> {
    p.iter()
        .position(|&x| x >= 1.0)
        .map(|k| (k, n as f64 + k as f64))
}

/// Smallest feasible rank-3 value among triplet, upper pair and lower pair.
pub fn classify_rank3(n: u32, p: [f64; 3]) -> Result<AnsatzResult> {
    let triplet = rank3_triplet(n, p)?;
    if let Some((_, v)) = corner(n, &p) {
        return Ok(AnsatzResult {
            label: PhaseLabel::Triplet,
            value: v,
            params: BTreeMap::new(),
            candidates: vec![Candidate {
                label: PhaseLabel::Triplet,
                value: v,
                feasible: true,
            }],
            upper_bound_only: false,
        });
    }
    let mut params = BTreeMap::new();
    let mut candidates = vec![Candidate {
        label: PhaseLabel::Triplet,
        value: triplet,
        feasible: true,
    }];
    if p[1] + p[2] > 0.0 {
        let up = rank3_upper_pair(n, p)?;
        params.insert("f".to_string(), up.param);
        candidates.push(Candidate {
            label: PhaseLabel::UpperPair,
            value: up.value,
            feasible: up.feasible,
        });
    }
    let low = rank3_lower_pair(n, p)?;
    params.insert("g".to_string(), low.param);
    candidates.push(Candidate {
        label: PhaseLabel::LowerPair,
        value: low.value,
        feasible: low.feasible,
    });
    let best = pick(&candidates);
    Ok(AnsatzResult {
        label: best.label,
        value: best.value,
        params,
        candidates,
        upper_bound_only: false,
    })
}

/// Smallest feasible rank-4 value among quartet, the four triplets and the
/// `(n+2, n+1)` pair. Always flagged as an upper bound only.
pub fn classify_rank4(n: u32, p: [f64; 4]) -> Result<AnsatzResult> {
    let quartet = rank4_quartet(n, p)?;
    if let Some((_, v)) = corner(n, &p) {
        return Ok(AnsatzResult {
            label: PhaseLabel::Quartet,
            value: v,
            params: BTreeMap::new(),
            candidates: vec![Candidate {
                label: PhaseLabel::Quartet,
                value: v,
                feasible: true,
            }],
            upper_bound_only: true,
        });
    }
    let mut params = BTreeMap::new();
    let mut candidates = vec![Candidate {
        label: PhaseLabel::Quartet,
        value: quartet,
        feasible: true,
    }];
    for k in 0..4 {
        let t = rank4_triplet_k(n, p, k)?;
        params.insert(format!("f{k}"), t.f);
        candidates.push(Candidate {
            label: PhaseLabel::rank4_triplet(k),
            value: t.value,
            feasible: t.feasible,
        });
    }
    if p[1] + p[2] > 0.0 {
        let pair = rank4_pair21(n, p)?;
        params.insert("f".to_string(), pair.f);
        params.insert("g".to_string(), pair.g);
        candidates.push(Candidate {
            label: PhaseLabel::Pair21,
            value: pair.value,
            feasible: pair.feasible,
        });
    }
    let best = pick(&candidates);
    Ok(AnsatzResult {
        label: best.label,
        value: best.value,
        params,
        candidates,
        upper_bound_only: true,
    })
}

/// Dispatches on rank; `None` for ranks without ansatzes.
pub fn classify(state: &FockDiagonalState) -> Result<Option<AnsatzResult>> {
    let p = state.populations();
    let n = state.offset();
    match p.len() {
        3 => classify_rank3(n, [p[0], p[1], p[2]]).map(Some),
        4 => classify_rank4(n, [p[0], p[1], p[2], p[3]]).map(Some),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rank3_examples() {
        let r = classify_rank3(0, [0.6, 0.2, 0.2]).unwrap();
        assert_eq!(r.label, PhaseLabel::UpperPair);
        assert!(close(r.value, 0.2, 1e-12));

        let r = classify_rank3(0, [0.2, 0.4, 0.4]).unwrap();
        assert_eq!(r.label, PhaseLabel::Triplet);
        assert!(r.candidates.iter().skip(1).all(|c| !c.feasible));

        // on the boundary the tie goes to the triplet
        let r = classify_rank3(0, [0.5, 0.25, 0.25]).unwrap();
        assert_eq!(r.label, PhaseLabel::Triplet);
        assert!(r.candidates[1].feasible);

        let r = classify_rank3(0, [1.0 / 3.0, 0.0, 2.0 / 3.0]).unwrap();
        assert!(r.candidates.iter().all(|c| c.feasible));

        for (k, p) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].iter().enumerate() {
            assert_eq!(classify_rank3(0, *p).unwrap().value, k as f64);
        }
    }

    #[test]
    fn rank4_examples() {
        let r = classify_rank4(0, [0.92, 0.06, 0.01, 0.01]).unwrap();
        assert_eq!(r.label, PhaseLabel::Triplet0);
        assert!(close(r.value, 0.01625, 1e-10));
        assert!(r.upper_bound_only);

        let r = classify_rank4(0, [0.83, 0.15, 0.01, 0.01]).unwrap();
        assert_eq!(r.label, PhaseLabel::Quartet);
        assert!(close(r.value, 0.0194274, 1e-6));

        for k in 0..4 {
            let mut p = [0.0; 4];
            p[k] = 1.0;
            let r = classify_rank4(0, p).unwrap();
            assert_eq!(r.value, k as f64);
            assert!(r.upper_bound_only);
        }
    }

    #[test]
    fn classify_dispatch() {
        let s = FockDiagonalState::new(0, vec![0.6, 0.2, 0.2]).unwrap();
        assert_eq!(classify(&s).unwrap().unwrap().label, PhaseLabel::UpperPair);
        let s = FockDiagonalState::new(0, vec![0.6, 0.4]).unwrap();
        assert!(classify(&s).unwrap().is_none());
    }

    #[test]
    fn axis_thresholds_coincide() {
        for n in 0..4 {
            let expect = (n as f64 + 2.0) / (2.0 * n as f64 + 3.0);
            assert!(close(upper_pair_axis_threshold(n), expect, 1e-12));
            assert!(close(lower_pair_axis_threshold(n), expect, 1e-12));
        }
    }

    #[test]
    fn boundary_coincidence() {
        for n in 0..3 {
            let thr = upper_pair_axis_threshold(n);
            for i in 1..50 {
                let p2 = thr * i as f64 / 50.0;
                let p1 = upper_pair_boundary(n, p2).unwrap();
                let p = [1.0 - p1 - p2, p1, p2];
                let t = rank3_triplet(n, p).unwrap();
                assert!(close(rank3_upper_pair(n, p).unwrap().value, t, 1e-10));

                let q2 = thr + (1.0 - thr) * i as f64 / 50.0;
                let q1 = lower_pair_boundary(n, q2).unwrap();
                let q = [1.0 - q1 - q2, q1, q2];
                let t = rank3_triplet(n, q).unwrap();
                assert!(close(rank3_lower_pair(n, q).unwrap().value, t, 1e-10));
            }
        }
    }

    #[test]
    fn continuity_along_lines() {
        // values have √p cusps on the faces of the simplex, so stay inside
        for n in 0..2 {
            for &p1 in &[0.02, 0.05, 0.1, 0.2] {
                let mut prev: Option<f64> = None;
                let steps = ((0.96 - p1) / 1e-3) as usize;
                for i in 0..=steps {
                    let p2 = 0.02 + i as f64 * 1e-3;
                    let v = classify_rank3(n, [1.0 - p1 - p2, p1, p2]).unwrap().value;
                    if let Some(pv) = prev {
                        assert!((v - pv).abs() <= 1e-2, "n={n} p1={p1} p2={p2}: {pv} → {v}");
                    }
                    prev = Some(v);
                }
            }
        }
    }

    #[test]
    fn continuity_across_boundaries() {
        let n = 0;
        let thr = upper_pair_axis_threshold(n);
        for i in 1..40 {
            for (p2, p1) in [
                (thr * i as f64 / 40.0, upper_pair_boundary(n, thr * i as f64 / 40.0)),
                (thr + (1.0 - thr) * i as f64 / 40.0, lower_pair_boundary(n, thr + (1.0 - thr) * i as f64 / 40.0)),
            ] {
                let p1 = p1.unwrap();
                let at = |d: f64| {
                    let q1 = (p1 + d).clamp(0.0, 1.0 - p2);
                    classify_rank3(n, [1.0 - q1 - p2, q1, p2]).unwrap().value
                };
                assert!((at(1e-3) - at(0.0)).abs() <= 1e-2);
                assert!((at(-1e-3) - at(0.0)).abs() <= 1e-2);
            }
        }
    }

    #[test]
    fn face_embedding() {
        for n in 0..3 {
            for i in 0..=20 {
                for j in 0..=(20 - i) {
                    let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                    let r3 = [1.0 - a - b, b, a];
                    let Ok(want) = classify_rank3(n, r3) else { continue };
                    // p_{n+3} = 0: the window is [n, n+2]
                    let low = classify_rank4(n, [r3[0], r3[1], r3[2], 0.0]).unwrap();
                    assert!(close(low.value, want.value, 1e-10), "n={n} {r3:?}: {} vs {}", low.value, want.value);
                    assert_eq!(want.label.on_face(Face::Upper), Some(low.label), "n={n} {r3:?}");
                    // p_n = 0: the window is [n+1, n+3]
                    let high = classify_rank4(n, [0.0, r3[0], r3[1], r3[2]]).unwrap();
                    let want = classify_rank3(n + 1, r3).unwrap();
                    assert!(close(high.value, want.value, 1e-10), "n={n} {r3:?}: {} vs {}", high.value, want.value);
                    assert_eq!(want.label.on_face(Face::Lower), Some(high.label), "n={n} {r3:?}");
                }
            }
        }
    }

    #[test]
    fn triplet_faces_extend_pairs() {
        for (n, r3) in [(0, [0.6, 0.2, 0.2]), (1, [0.7, 0.2, 0.1]), (0, [0.05, 0.15, 0.8])] {
            let up = rank3_upper_pair(n, r3).unwrap();
            let t0 = rank4_triplet_k(n, [r3[0], r3[1], r3[2], 0.0], 0).unwrap();
            assert!(close(t0.value, up.value, 1e-10));
            assert!(close(t0.f, up.param, 1e-10));

            let low = rank3_lower_pair(n, r3).unwrap();
            let t3 = rank4_triplet_k(n, [0.0, r3[0], r3[1], r3[2]], 3);
            let t3 = t3.unwrap();
            let low_up = rank3_lower_pair(n + 1, r3).unwrap();
            assert!(close(t3.value, low_up.value, 1e-10));
            assert!(close(t3.f, low_up.param, 1e-10));
            let _ = low;
        }
    }

    fn rank4_state() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(0.001f64..1.0).prop_map(|w| {
            let t: f64 = w.iter().sum();
            [w[0] / t, w[1] / t, w[2] / t, 1.0 - (w[0] + w[1] + w[2]) / t]
        })
    }

    proptest! {
        #[test]
        fn rank4_values_are_bounded(n in 0u32..3, p in rank4_state()) {
            let r = classify_rank4(n, p).unwrap();
            let quartet = rank4_quartet(n, p).unwrap();
            prop_assert!(r.value <= quartet + 1e-12);
            prop_assert!(r.value >= 0.0);
            for c in r.candidates.iter().filter(|c| c.feasible) {
                prop_assert!(c.value <= quartet + 1e-12);
            }
        }

        #[test]
        fn maximizers_beat_samples(n in 0u32..3, p in rank4_state(), k in 0usize..4) {
            let fam = rank4::triplet_family(n, p, k);
            let f = fam.argmax();
            let top = fam.objective(f);
            for i in 0..1000 {
                prop_assert!(top >= fam.objective((i as f64 + 0.5) / 1000.0) - 1e-15);
            }
            let pair = rank4::pair21_family(n, p[2], p[1]);
            let f = pair.argmax();
            let top = pair.objective(f);
            for i in 0..1000 {
                prop_assert!(top >= pair.objective((i as f64 + 0.5) / 1000.0) - 1e-15);
            }
        }

        #[test]
        fn triplet_f_matches_closed_form(n in 0u32..4, p in rank4_state(), k in 0usize..4) {
            // ᾱ(f)/√f = C√(1−f) + D√f; C collects the bonds touching |n+k⟩
            let rest = 1.0 - p[k];
            let u: Vec<f64> = (0..4).map(|j| if j == k { 0.0 } else { (p[j] / rest).sqrt() }).collect();
            let s = |j: usize| (n as f64 + j as f64 + 1.0).sqrt();
            let mut c = 0.0;
            let mut d = 0.0;
            for j in 0..3 {
                if j == k {
                    c += u[j + 1] * s(j);
                } else if j + 1 == k {
                    c += u[j] * s(j);
                } else {
                    d += u[j] * u[j + 1] * s(j);
                }
            }
            let want = d * d / (c * c + d * d);
            let got = rank4_triplet_k(n, p, k).unwrap().f;
            prop_assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
        }
    }
}
