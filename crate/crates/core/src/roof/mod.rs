//! The convex-roof linear program for Fock-diagonal states.
//!
//! With relative phases fixed by the roots-of-unity construction in
//! [`expand_histogram`], the measure of `ρ = Σ_k p_{n+k} |n+k⟩⟨n+k|` is
//!
//! `N(ρ) = ⟨a†a⟩ − max_Q Σ_x Q(x) (Σ_k x_{k+1} x_k √(n+k+1))²`
//!
//! over histograms `Q ≥ 0` on amplitude vectors with `Σ Q = 1` and
//! `Σ Q x_k² = p_{n+k}`. Restricting `x` to a lattice turns this into an LP
//! whose optimum can only undershoot the continuum maximum, so the
//! resulting `N_upper` is one-sided.

mod expand;
mod grid;
mod histogram;

use std::collections::BTreeSet;

use rayon::prelude::*;

pub use expand::{default_phase_order, expand_histogram, min_phase_order, Atom, ExplicitDecomposition};
pub use grid::{build_grid, build_grid_capped, count_points, AmplitudeGrid, GridPoint, DEFAULT_MAX_POINTS};
pub use histogram::{Histogram, HistogramEntry};

use crate::error::{Error, Result};
use crate::fock::{alpha_bar_real, FockDiagonalState};
use crate::lp::{self, SolveOptions, StandardFormLp};

/// Basic weights at or below this are round-off from a degenerate vertex
/// and are left out of the histogram.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Knobs for [`estimate_ort_with`] and [`refine_with`].
#[derive(Debug, Clone, Copy)]
pub struct RoofOptions {
    /// Add the simple decomposition `x_k = √p_{n+k}` as one extra column
    /// when it is not already a lattice point. This pins
    /// `N_upper ≤ simple_bound` and makes rank-2 optima exact at any `Δ`.
    pub include_simple_column: bool,
    pub max_points: usize,
    pub solve: SolveOptions,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            include_simple_column: true,
            max_points: DEFAULT_MAX_POINTS,
            solve: SolveOptions::default(),
        }
    }
}

impl RoofOptions {
    /// Lattice columns only.
    pub fn lattice_only() -> Self {
        Self {
            include_simple_column: false,
            ..Self::default()
        }
    }
}

/// Result of one LP solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofEstimate {
    pub delta: f64,
    /// `⟨a†a⟩ − LP optimum`, an upper bound on the measure.
    pub n_upper: f64,
    pub lp_objective: f64,
    pub histogram: Histogram,
    pub columns: usize,
    pub iterations: usize,
}

/// Builds the program `max c·Q, A Q = b, Q ≥ 0` over the grid: row 0 is
/// normalization, row `k` fixes `p_{n+k}` for `k = 1..M-1`. The `k = 0`
/// population row follows from the others and is left out.
pub fn assemble_lp(state: &FockDiagonalState, grid: &AmplitudeGrid) -> Result<StandardFormLp> {
    assemble_with_extra(state, grid, &[])
}

fn assemble_with_extra(
    state: &FockDiagonalState,
    grid: &AmplitudeGrid,
    extra: &[Vec<f64>],
) -> Result<StandardFormLp> {
    let m = state.rank();
    if grid.rank() != m {
        return Err(Error::InvalidArgument(format!(
            "grid has rank {} but the state has rank {m}",
            grid.rank()
        )));
    }
    let n = state.offset();
    let n_cols = grid.len() + extra.len();
    let mut objective = vec![0.0; n_cols];
    let mut columns = vec![0.0; n_cols * m];
    let fill = |x: &[f64], obj: &mut f64, col: &mut [f64]| {
        *obj = alpha_bar_real(x, n).powi(2);
        col[0] = 1.0;
        for k in 1..m {
            col[k] = x[k] * x[k];
        }
    };
    let (grid_obj, extra_obj) = objective.split_at_mut(grid.len());
    let (grid_cols, extra_cols) = columns.split_at_mut(grid.len() * m);
    grid_obj
        .par_iter_mut()
        .zip(grid_cols.par_chunks_mut(m))
        .enumerate()
        .for_each(|(i, (obj, col))| fill(&grid.point(i).amplitudes(), obj, col));
    for ((x, obj), col) in extra.iter().zip(extra_obj).zip(extra_cols.chunks_mut(m)) {
        fill(x, obj, col);
    }
    let rhs = state.populations().to_vec();
    let mut rhs_rows = Vec::with_capacity(m);
    rhs_rows.push(1.0);
    rhs_rows.extend_from_slice(&rhs[1..]);
    StandardFormLp::new(objective, columns, rhs_rows)
}

/// Amplitudes of the simple decomposition, unless they already sit on the
/// grid.
fn simple_column(state: &FockDiagonalState, grid: &AmplitudeGrid) -> Option<Vec<f64>> {
    let x: Vec<f64> = state.populations().iter().map(|p| p.sqrt()).collect();
    let delta = grid.delta();
    let lattice: Option<Vec<u32>> = x[1..]
        .iter()
        .map(|&v| {
            let l = (v / delta).round();
            ((l * delta - v).abs() <= 1e-12).then_some(l as u32)
        })
        .collect();
    match lattice {
        Some(l) if grid.find(&l).is_some() => None,
        _ => Some(x),
    }
}

fn warn_unresolved(state: &FockDiagonalState, delta: f64) {
    for (k, &p) in state.populations().iter().enumerate() {
        if p > 0.0 && p < 4.0 * delta * delta {
            log::warn!(
                "population of |{}⟩ is {p:e}, below 4Δ² = {:e}; the grid cannot resolve its amplitude",
                state.offset() as usize + k,
                4.0 * delta * delta
            );
        }
    }
}

fn trivial_estimate(state: &FockDiagonalState, delta: f64) -> RoofEstimate {
    RoofEstimate {
        delta,
        n_upper: state.offset() as f64,
        lp_objective: 0.0,
        histogram: Histogram::new(
            state.offset(),
            delta,
            vec![HistogramEntry {
                lattice: Some(vec![]),
                amplitudes: vec![1.0],
                weight: 1.0,
            }],
        ),
        columns: 1,
        iterations: 0,
    }
}

/// Solves the LP on a given grid.
pub fn solve_on_grid(
    state: &FockDiagonalState,
    grid: &AmplitudeGrid,
    opts: &RoofOptions,
) -> Result<RoofEstimate> {
    let extra: Vec<Vec<f64>> = if opts.include_simple_column {
        simple_column(state, grid).into_iter().collect()
    } else {
        Vec::new()
    };
    let lp = assemble_with_extra(state, grid, &extra)?;
    let sol = lp::solve(&lp, &opts.solve).into_optimal()?;
    let entries = sol
        .primal
        .iter()
        .filter(|&&(_, w)| w > WEIGHT_FLOOR)
        .map(|&(j, weight)| {
            if j < grid.len() {
                let p = grid.point(j);
                HistogramEntry {
                    lattice: Some(p.lattice.clone()),
                    amplitudes: p.amplitudes(),
                    weight,
                }
            } else {
                HistogramEntry {
                    lattice: None,
                    amplitudes: extra[j - grid.len()].clone(),
                    weight,
                }
            }
        })
        .collect();
    Ok(RoofEstimate {
        delta: grid.delta(),
        n_upper: state.mean_photon() - sol.objective_value,
        lp_objective: sol.objective_value,
        histogram: Histogram::new(state.offset(), grid.delta(), entries),
        columns: lp.n_cols(),
        iterations: sol.iterations,
    })
}

/// Upper estimate of the measure on the full lattice of spacing `delta`,
/// with default options.
pub fn estimate_ort(state: &FockDiagonalState, delta: f64) -> Result<RoofEstimate> {
    estimate_ort_with(state, delta, &RoofOptions::default())
}

pub fn estimate_ort_with(
    state: &FockDiagonalState,
    delta: f64,
    opts: &RoofOptions,
) -> Result<RoofEstimate> {
    if state.rank() == 1 {
        return Ok(trivial_estimate(state, delta));
    }
    warn_unresolved(state, delta);
    let grid = build_grid_capped(state.rank(), delta, opts.max_points)?;
    solve_on_grid(state, &grid, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub delta: f64,
    pub n_upper: f64,
    pub columns: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub levels: Vec<RefinementLevel>,
    /// Estimate at the finest level.
    pub estimate: RoofEstimate,
}

/// Local refinement: the first level is [`estimate_ort`] at `delta_start`;
/// every further level halves `Δ` and re-grids only a box of radius
/// `2Δ_prev` around each support point of the previous optimum. The old
/// support stays on the new lattice, so `N_upper` cannot increase.
pub fn refine(state: &FockDiagonalState, delta_start: f64, levels: usize) -> Result<Refinement> {
    refine_with(state, delta_start, levels, &RoofOptions::default())
}

pub fn refine_with(
    state: &FockDiagonalState,
    delta_start: f64,
    levels: usize,
    opts: &RoofOptions,
) -> Result<Refinement> {
    if levels == 0 {
        return Err(Error::InvalidArgument("refinement needs at least one level".into()));
    }
    let mut estimate = estimate_ort_with(state, delta_start, opts)?;
    let mut history = vec![RefinementLevel {
        delta: estimate.delta,
        n_upper: estimate.n_upper,
        columns: estimate.columns,
    }];
    if state.rank() == 1 {
        return Ok(Refinement {
            levels: history,
            estimate,
        });
    }
    let m = state.rank();
    for _ in 1..levels {
        let delta = estimate.delta / 2.0;
        warn_unresolved(state, delta);
        // radius 2Δ_prev = 4 fine steps
        const RADIUS: u32 = 4;
        let mut points = BTreeSet::new();
        for e in estimate.histogram.entries() {
            let centre: Vec<u32> = match &e.lattice {
                Some(l) => l.iter().map(|v| 2 * v).collect(),
                None => e.free_amplitudes().iter().map(|x| (x / delta).round() as u32).collect(),
            };
            let lo: Vec<u32> = centre.iter().map(|c| c.saturating_sub(RADIUS)).collect();
            let mut l = lo.clone();
            'odometer: loop {
                if grid::in_ball(&l, delta) {
                    points.insert(l.clone());
                }
                for k in (0..m - 1).rev() {
                    l[k] += 1;
                    if l[k] <= centre[k] + RADIUS {
                        continue 'odometer;
                    }
                    l[k] = lo[k];
                }
                break;
            }
            if points.len() > opts.max_points {
                return Err(Error::Capacity {
                    requested: points.len(),
                    max: opts.max_points,
                });
            }
        }
        let grid = AmplitudeGrid::from_indices(m, delta, points.into_iter().collect())?;
        estimate = solve_on_grid(state, &grid, opts)?;
        history.push(RefinementLevel {
            delta,
            n_upper: estimate.n_upper,
            columns: estimate.columns,
        });
    }
    Ok(Refinement {
        levels: history,
        estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Decomposability {
    /// The simple decomposition is optimal.
    SimplyDecomposed,
    /// The optimum mixes several simply-decomposed states.
    CompositelyDecomposed,
}

/// Tolerance on `simple_bound − N_upper` below which a state counts as
/// simply decomposed.
pub fn classification_tolerance(delta: f64) -> f64 {
    1e-6 + 10.0 * delta * delta
}

pub fn classify_simple_composite(state: &FockDiagonalState, delta: f64) -> Result<Decomposability> {
    let est = estimate_ort(state, delta)?;
    Ok(if state.simple_bound() - est.n_upper <= classification_tolerance(delta) {
        Decomposability::SimplyDecomposed
    } else {
        Decomposability::CompositelyDecomposed
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::rank2_closed_form;
    use crate::lp::residuals;
    use crate::qfi::quadrature_qfi;
    use proptest::prelude::*;

    fn state(n: u32, p: &[f64]) -> FockDiagonalState {
        FockDiagonalState::new(n, p.to_vec()).unwrap()
    }

    #[test]
    fn assembled_structure() {
        let s = state(0, &[0.84, 0.16]);
        let g = build_grid(2, 0.01).unwrap();
        let lp = assemble_lp(&s, &g).unwrap();
        assert_eq!(lp.n_rows(), 2);
        assert_eq!(lp.n_cols(), g.len());
        assert_eq!(lp.rhs(), &[1.0, 0.16]);
        let j = g.find(&[40]).unwrap();
        assert!((lp.objective()[j] - 0.1344).abs() < 1e-15);
        assert!(assemble_lp(&state(0, &[0.5, 0.25, 0.25]), &g).is_err());
    }

    #[test]
    fn rank2_spike_on_lattice() {
        let est = estimate_ort(&state(0, &[0.84, 0.16]), 0.01).unwrap();
        assert!((est.n_upper - 0.0256).abs() < 1e-12);
        let e = est.histogram.entries();
        assert_eq!(e.len(), 1, "{e:?}");
        assert_eq!(e[0].lattice, Some(vec![40]));
        assert!((e[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank2_off_lattice() {
        for n in 0..3 {
            let s = state(n, &[0.87, 0.13]);
            let exact = rank2_closed_form(n, 0.13);
            let est = estimate_ort(&s, 0.01).unwrap();
            assert!((est.n_upper - exact).abs() < 1e-12);
            assert_eq!(est.histogram.support_len(), 1);
            assert_eq!(est.histogram.entries()[0].lattice, None);

            let lattice = estimate_ort_with(&s, 0.01, &RoofOptions::lattice_only()).unwrap();
            assert!(lattice.n_upper >= exact - 1e-12);
            assert!(lattice.n_upper - exact < 1e-3);
            let root = 0.13f64.sqrt();
            for e in lattice.histogram.entries() {
                assert!((e.free_amplitudes()[0] - root).abs() < 0.01);
            }
        }
    }

    #[test]
    fn rank1_is_trivial() {
        let est = estimate_ort(&FockDiagonalState::fock(3), 0.1).unwrap();
        assert_eq!(est.n_upper, 3.0);
        let d = expand_histogram(&est.histogram, 3).unwrap();
        assert_eq!(d.atoms().len(), 3);
        assert_eq!(d.value(), 3.0);
    }

    #[test]
    fn upper_pair_state() {
        let s = state(0, &[0.6, 0.2, 0.2]);
        let est = estimate_ort(&s, 0.01).unwrap();
        assert!((est.n_upper - 0.2).abs() < 1e-3, "{}", est.n_upper);
        assert!(est.n_upper >= 0.2 - 1e-9);
        assert_eq!(
            classify_simple_composite(&s, 0.01).unwrap(),
            Decomposability::CompositelyDecomposed
        );
        assert_eq!(
            classify_simple_composite(&state(0, &[0.5, 0.25, 0.25]), 0.01).unwrap(),
            Decomposability::SimplyDecomposed
        );
        assert_eq!(
            classify_simple_composite(&state(2, &[0.3, 0.7]), 0.05).unwrap(),
            Decomposability::SimplyDecomposed
        );
    }

    #[test]
    fn refinement() {
        let s = state(0, &[0.84, 0.16]);
        let r = refine_with(&s, 0.1, 3, &RoofOptions::lattice_only()).unwrap();
        assert_eq!(r.levels.len(), 3);
        assert!((r.levels[2].delta - 0.025).abs() < 1e-15);
        assert!((r.estimate.n_upper - 0.0256).abs() < 1e-6);
        for w in r.levels.windows(2) {
            assert!(w[1].n_upper <= w[0].n_upper + 1e-9);
        }

        let s = state(0, &[0.6, 0.2, 0.2]);
        let r = refine(&s, 0.05, 3).unwrap();
        assert!((r.estimate.n_upper - 0.2).abs() < 1e-4, "{:?}", r.levels);

        let one = refine(&s, 0.05, 1).unwrap();
        assert_eq!(one.estimate, estimate_ort(&s, 0.05).unwrap());
        assert!(refine(&s, 0.05, 0).is_err());
    }

    #[test]
    fn monotone_under_shared_lattice() {
        let s = state(1, &[0.5, 0.3, 0.2]);
        let opts = RoofOptions::lattice_only();
        let coarse = estimate_ort_with(&s, 0.1, &opts).unwrap();
        let fine = estimate_ort_with(&s, 0.05, &opts).unwrap();
        assert!(fine.n_upper <= coarse.n_upper + 1e-12);
    }

    #[test]
    fn capacity_is_reported() {
        let s = state(0, &[0.5, 0.2, 0.2, 0.1]);
        let opts = RoofOptions {
            max_points: 1000,
            ..RoofOptions::default()
        };
        assert!(matches!(
            estimate_ort_with(&s, 0.05, &opts),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn expansion_of_rank4_support() {
        let s = state(0, &[0.5, 0.2, 0.2, 0.1]);
        let est = estimate_ort(&s, 0.05).unwrap();
        let d = expand_histogram(&est.histogram, 4).unwrap();
        assert_eq!(d.atoms().len(), 4 * est.histogram.support_len());
        check_decomposition(&s, &est, &d);
    }

    fn check_decomposition(s: &FockDiagonalState, est: &RoofEstimate, d: &ExplicitDecomposition) {
        let m = s.rank();
        assert!((d.total_probability() - 1.0).abs() < 1e-10);
        let rho = d.density_matrix();
        for i in 0..m {
            for j in 0..m {
                let v = rho[i * m + j];
                if i == j {
                    assert!((v.re - s.populations()[i]).abs() < 1e-9 && v.im.abs() < 1e-10);
                } else {
                    assert!(v.norm() < 1e-10, "ρ[{i},{j}] = {v}");
                }
            }
        }
        assert!(d.sum_alpha_squared().norm() < 1e-10);
        assert!((d.sum_abs_alpha_squared() - est.lp_objective).abs() < 1e-9);
        assert!((d.value() - est.n_upper).abs() < 1e-9);
    }

    fn populations(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.02f64..1.0, min_len..=max_len).prop_map(|w| {
            let total: f64 = w.iter().sum();
            w.iter().map(|x| x / total).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sandwich_and_roundtrip(n in 0u32..3, p in populations(2, 4)) {
            let s = FockDiagonalState::new(n, p).unwrap();
            let est = estimate_ort(&s, 0.05).unwrap();
            prop_assert!(est.histogram.support_len() <= s.rank());
            prop_assert!(est.n_upper <= s.simple_bound() + 1e-9);
            prop_assert!(est.n_upper >= quadrature_qfi(&s).power - 1e-9);
            let pops = est.histogram.populations();
            for (a, b) in pops.iter().zip(s.populations()) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
            let d = expand_histogram(&est.histogram, default_phase_order(s.rank())).unwrap();
            check_decomposition(&s, &est, &d);
        }

        #[test]
        fn lp_residuals_small(p in populations(3, 3)) {
            let s = FockDiagonalState::new(0, p).unwrap();
            let g = build_grid(3, 0.05).unwrap();
            let lp = assemble_lp(&s, &g).unwrap();
            let sol = crate::lp::solve(&lp, &SolveOptions::default());
            if sol.status == crate::lp::LpStatus::Optimal {
                let (eq, neg) = residuals(&lp, &sol);
                prop_assert!(eq <= 1e-9 && neg >= -1e-9);
            }
        }
    }
}
