//! Two-phase revised simplex with a dense basis inverse.
//!
//! Pricing is Dantzig's rule over cyclic blocks of columns (partial
//! pricing). Ratio-test ties are broken lexicographically on the rows of
//! `B⁻¹`, and after a run of degenerate pivots the solver switches to
//! Bland's rule until the objective moves again.

use super::{LpSolution, LpStatus, StandardFormLp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Primal feasibility tolerance, also the phase-1 infeasibility cutoff.
    pub feas_tol: f64,
    /// A reduced cost must exceed this to enter the basis.
    pub opt_tol: f64,
    /// Entries of the entering direction below this are not pivot candidates.
    pub pivot_tol: f64,
    /// Maximum number of pivots over both phases.
    pub max_iter: usize,
    /// Columns priced per partial-pricing block.
    pub pricing_block: usize,
    /// Consecutive degenerate pivots before falling back to Bland's rule.
    pub bland_after: usize,
    /// Pivots between fresh factorizations of the basis.
    pub refactor_every: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-12,
            pivot_tol: 1e-11,
            max_iter: 1_000_000,
            pricing_block: 4096,
            bland_after: 50,
            refactor_every: 64,
        }
    }
}

impl SolveOptions {
    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_feas_tol(mut self, feas_tol: f64) -> Self {
        self.feas_tol = feas_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Step {
    Pivoted,
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    lp: &'a StandardFormLp,
    opts: SolveOptions,
    m: usize,
    n: usize,
    /// ±1 per row so that the working right-hand side is nonnegative.
    row_sign: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `m × m`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    y: Vec<f64>,
    dir: Vec<f64>,
    cursor: usize,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
}

/// Solves `maximize c·q, A q = b, q ≥ 0`.
///
/// Deterministic for a fixed input: the pivot sequence depends only on the
/// data and the options. The status field reports infeasible, unbounded and
/// iteration-limited runs; for the latter the current basic solution is
/// returned.
pub fn solve(lp: &StandardFormLp, opts: &SolveOptions) -> LpSolution {
    let mut s = Simplex::new(lp, *opts);

    let phase1 = s.run(Phase::One);
    let phase1_residual = s.artificial_sum();
    match phase1 {
        Some(LpStatus::IterationLimit) => return s.finish(LpStatus::IterationLimit, phase1_residual),
        // phase 1 is bounded above by zero, so this cannot happen
        Some(LpStatus::Unbounded) => unreachable!("phase 1 objective is bounded"),
        _ => {}
    }
    if phase1_residual > opts.feas_tol {
        return s.finish(LpStatus::Infeasible, phase1_residual);
    }
    s.drive_out_artificials();

    let status = s.run(Phase::Two).unwrap_or(LpStatus::Optimal);
    s.finish(status, phase1_residual)
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a StandardFormLp, opts: SolveOptions) -> Self {
        let m = lp.n_rows();
        let n = lp.n_cols();
        let row_sign: Vec<f64> = lp
            .rhs()
            .iter()
            .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let rhs: Vec<f64> = lp.rhs().iter().zip(&row_sign).map(|(b, s)| b * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let mut is_basic = vec![false; n + m];
        is_basic[n..].iter_mut().for_each(|b| *b = true);
        Self {
            lp,
            opts,
            m,
            n,
            row_sign,
            xb: rhs.clone(),
            rhs,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
            y: vec![0.0; m],
            dir: vec![0.0; m],
            cursor: 0,
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    fn cost(&self, j: usize, phase: Phase) -> f64 {
        match (phase, self.is_artificial(j)) {
            (Phase::One, true) => -1.0,
            (Phase::One, false) => 0.0,
            (Phase::Two, true) => 0.0,
            (Phase::Two, false) => self.lp.objective()[j],
        }
    }

    /// Writes the sign-adjusted column `j` into `out`.
    fn load_column(&self, j: usize, out: &mut [f64]) {
        if self.is_artificial(j) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j - self.n] = 1.0;
        } else {
            for ((o, a), s) in out.iter_mut().zip(self.lp.column(j)).zip(&self.row_sign) {
                *o = a * s;
            }
        }
    }

    fn artificial_sum(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| self.is_artificial(j))
            .map(|(_, &v)| v.max(0.0))
            .sum()
    }

    /// Runs pivots until optimal; returns `Some(status)` for any other stop.
    fn run(&mut self, phase: Phase) -> Option<LpStatus> {
        self.degenerate_run = 0;
        self.bland = false;
        loop {
            if self.iterations >= self.opts.max_iter {
                return Some(LpStatus::IterationLimit);
            }
            match self.step(phase) {
                Step::Pivoted => {}
                Step::Optimal => return None,
                Step::Unbounded => return Some(LpStatus::Unbounded),
            }
        }
    }

    fn compute_duals(&mut self, phase: Phase) {
        let m = self.m;
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..m {
            let c = self.cost(self.basis[r], phase);
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yi, b) in self.y.iter_mut().zip(row) {
                    *yi += c * b;
                }
            }
        }
    }

    fn reduced_cost(&self, j: usize, phase: Phase) -> f64 {
        let col = self.lp.column(j);
        let mut dot = 0.0;
        for i in 0..self.m {
            dot += self.y[i] * self.row_sign[i] * col[i];
        }
        self.cost(j, phase) - dot
    }

    fn price(&mut self, phase: Phase) -> Option<usize> {
        let n = self.n;
        let tol = self.opts.opt_tol;
        if self.bland {
            return (0..n).find(|&j| !self.is_basic[j] && self.reduced_cost(j, phase) > tol);
        }
        let block = self.opts.pricing_block.max(1);
        let mut scanned = 0;
        let mut start = self.cursor % n;
        while scanned < n {
            let len = block.min(n - scanned);
            let mut best: Option<(usize, f64)> = None;
            for off in 0..len {
                let j = (start + off) % n;
                if self.is_basic[j] {
                    continue;
                }
                let d = self.reduced_cost(j, phase);
                if d > tol && best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((j, d));
                }
            }
            scanned += len;
            start = (start + len) % n;
            if let Some((j, _)) = best {
                self.cursor = start;
                return Some(j);
            }
        }
        None
    }

    fn ratio_test(&self) -> Option<usize> {
        let m = self.m;
        let tol = self.opts.pivot_tol;
        let mut theta_min = f64::INFINITY;
        for r in 0..m {
            if self.dir[r] > tol {
                theta_min = theta_min.min(self.xb[r].max(0.0) / self.dir[r]);
            }
        }
        if !theta_min.is_finite() {
            return None;
        }
        let tie = 1e-12 * theta_min.max(1.0);
        let mut chosen: Option<usize> = None;
        for r in 0..m {
            if self.dir[r] <= tol || self.xb[r].max(0.0) / self.dir[r] > theta_min + tie {
                continue;
            }
            chosen = Some(match chosen {
                None => r,
                Some(c) if self.prefer(r, c) => r,
                Some(c) => c,
            });
        }
        chosen
    }

    /// Tie-break between two rows with the same ratio.
    fn prefer(&self, r: usize, c: usize) -> bool {
        if self.bland {
            return self.basis[r] < self.basis[c];
        }
        let m = self.m;
        for i in 0..m {
            let a = self.binv[r * m + i] / self.dir[r];
            let b = self.binv[c * m + i] / self.dir[c];
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return a < b;
            }
        }
        self.basis[r] < self.basis[c]
    }

    fn step(&mut self, phase: Phase) -> Step {
        self.compute_duals(phase);
        let Some(entering) = self.price(phase) else {
            return Step::Optimal;
        };

        let mut col = vec![0.0; self.m];
        self.load_column(entering, &mut col);
        let m = self.m;
        for r in 0..m {
            self.dir[r] = (0..m).map(|i| self.binv[r * m + i] * col[i]).sum();
        }
        let Some(leave) = self.ratio_test() else {
            return Step::Unbounded;
        };

        let theta = self.xb[leave].max(0.0) / self.dir[leave];
        if theta <= self.opts.feas_tol * 1e-3 {
            self.degenerate_run += 1;
            if self.degenerate_run >= self.opts.bland_after {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
        self.pivot(entering, leave, theta);
        Step::Pivoted
    }

    fn pivot(&mut self, entering: usize, leave: usize, theta: f64) {
        let m = self.m;
        for r in 0..m {
            if r != leave {
                self.xb[r] -= theta * self.dir[r];
                if self.xb[r] < 0.0 && self.xb[r] > -self.opts.feas_tol {
                    self.xb[r] = 0.0;
                }
            }
        }
        self.xb[leave] = theta;

        let piv = self.dir[leave];
        for i in 0..m {
            self.binv[leave * m + i] /= piv;
        }
        for r in 0..m {
            if r == leave || self.dir[r] == 0.0 {
                continue;
            }
            let factor = self.dir[r];
            for i in 0..m {
                self.binv[r * m + i] -= factor * self.binv[leave * m + i];
            }
        }

        self.is_basic[self.basis[leave]] = false;
        self.is_basic[entering] = true;
        self.basis[leave] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor();
        }
    }

    /// Recomputes `B⁻¹` by Gauss–Jordan elimination and `x_B = B⁻¹ b`.
    fn refactor(&mut self) {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (c, &j) in self.basis.iter().enumerate() {
            self.load_column(j, &mut col);
            for r in 0..m {
                a[r * m + c] = col[r];
            }
        }
        let Some(inv) = invert(&a, m) else {
            // keep the updated inverse; a singular basis here means the
            // product-form update has already drifted and will be caught
            // by the final residual check
            self.since_refactor = 0;
            return;
        };
        self.binv = inv;
        for r in 0..m {
            let v: f64 = (0..m).map(|i| self.binv[r * m + i] * self.rhs[i]).sum();
            self.xb[r] = if v < 0.0 && v > -self.opts.feas_tol { 0.0 } else { v };
        }
        self.since_refactor = 0;
    }

    /// Pivots basic artificials (all at zero after a feasible phase 1) out
    /// in favour of structural columns. An artificial whose row of `B⁻¹A`
    /// vanishes sits on a redundant row and stays.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.is_basic[j] {
                    continue;
                }
                let col = self.lp.column(j);
                let v: f64 = (0..m).map(|i| row[i] * self.row_sign[i] * col[i]).sum();
                if v.abs() > 1e-9 && best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let mut col = vec![0.0; m];
                self.load_column(j, &mut col);
                for rr in 0..m {
                    self.dir[rr] = (0..m).map(|i| self.binv[rr * m + i] * col[i]).sum();
                }
                self.xb[r] = 0.0;
                self.pivot(j, r, 0.0);
            }
        }
    }

    fn finish(mut self, status: LpStatus, phase1_residual: f64) -> LpSolution {
        self.refactor();
        let mut primal: Vec<(usize, f64)> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, &v)| j < self.n && v != 0.0)
            .map(|(&j, &v)| (j, v))
            .collect();
        primal.sort_by_key(|&(j, _)| j);
        let objective_value = primal.iter().map(|&(j, v)| self.lp.objective()[j] * v).sum();
        LpSolution {
            status,
            objective_value,
            primal,
            basis: self.basis,
            iterations: self.iterations,
            phase1_residual,
        }
    }
}

/// Dense inverse of a row-major `m × m` matrix with partial pivoting.
fn invert(a: &[f64], m: usize) -> Option<Vec<f64>> {
    let mut work = a.to_vec();
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| {
            work[x * m + c]
                .abs()
                .partial_cmp(&work[y * m + c].abs())
                .unwrap()
        })?;
        if work[p * m + c].abs() < 1e-14 {
            return None;
        }
        if p != c {
            for k in 0..m {
                work.swap(p * m + k, c * m + k);
                inv.swap(p * m + k, c * m + k);
            }
        }
        let piv = work[c * m + c];
        for k in 0..m {
            work[c * m + k] /= piv;
            inv[c * m + k] /= piv;
        }
        for r in 0..m {
            if r == c {
                continue;
            }
            let f = work[r * m + c];
            if f != 0.0 {
                for k in 0..m {
                    work[r * m + k] -= f * work[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::residuals;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(obj: &[f64], rows: &[&[f64]], rhs: &[f64]) -> StandardFormLp {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        StandardFormLp::from_rows(obj.to_vec(), &rows, rhs.to_vec()).unwrap()
    }

    /// Best objective over all basic feasible solutions, by enumeration.
    fn brute_force(lp: &StandardFormLp) -> Option<f64> {
        let (m, n) = (lp.n_rows(), lp.n_cols());
        let b = DVector::from_column_slice(lp.rhs());
        let mut best: Option<f64> = None;
        let mut subset: Vec<usize> = (0..m).collect();
        loop {
            let basis = DMatrix::from_fn(m, m, |r, c| lp.entry(r, subset[c]));
            if basis.determinant().abs() > 1e-10 {
                if let Some(x) = basis.lu().solve(&b) {
                    if x.iter().all(|&v| v >= -1e-10) {
                        let val: f64 = subset.iter().zip(x.iter()).map(|(&j, v)| lp.objective()[j] * v).sum();
                        best = Some(best.map_or(val, |b: f64| b.max(val)));
                    }
                }
            }
            // next combination
            let mut i = m;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if subset[i] < n - m + i {
                    subset[i] += 1;
                    for k in i + 1..m {
                        subset[k] = subset[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn random_lp(rng: &mut ChaCha8Rng, m: usize, n: usize) -> StandardFormLp {
        // first row Σq = 1 keeps the program bounded; b is built from a
        // nonnegative point so it is feasible
        let mut rows = vec![vec![1.0; n]];
        for _ in 1..m {
            rows.push((0..n).map(|_| rng.gen_range(0.0..1.0)).collect());
        }
        let mut x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let s: f64 = x0.iter().sum();
        x0.iter_mut().for_each(|v| *v /= s);
        let rhs = rows
            .iter()
            .map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum())
            .collect();
        let obj = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        StandardFormLp::from_rows(obj, &rows, rhs).unwrap()
    }

    #[test]
    fn single_variable() {
        let p = lp(&[1.0], &[&[1.0]], &[1.0]);
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective_value, 1.0);
        assert_eq!(sol.primal, vec![(0, 1.0)]);
    }

    #[test]
    fn infeasible() {
        let p = lp(&[0.0, 0.0], &[&[1.0, 1.0], &[1.0, -1.0]], &[1.0, 3.0]);
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.phase1_residual > 1e-9);
        assert!(sol.into_optimal().is_err());
    }

    #[test]
    fn unbounded() {
        // x1 − x2 = 1, maximize x1
        let p = lp(&[1.0, 0.0], &[&[1.0, -1.0]], &[1.0]);
        assert_eq!(solve(&p, &SolveOptions::default()).status, LpStatus::Unbounded);
    }

    #[test]
    fn iteration_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_lp(&mut rng, 4, 60);
        let sol = solve(&p, &SolveOptions::default().with_max_iter(1));
        assert_eq!(sol.status, LpStatus::IterationLimit);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // −x1 − x2 = −1, maximize 2x1 + x2
        let p = lp(&[2.0, 1.0], &[&[-1.0, -1.0]], &[-1.0]);
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_row_keeps_artificial() {
        let p = lp(
            &[1.0, 2.0, 3.0],
            &[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]],
            &[1.0, 2.0],
        );
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 3.0).abs() < 1e-12);
        assert!(sol.basis.iter().any(|&j| j >= 3));
    }

    #[test]
    fn beale_cycling_example() {
        // classic instance on which textbook Dantzig pivoting cycles
        let p = lp(
            &[0.0, 0.0, 0.0, 0.75, -20.0, 0.5, -6.0],
            &[
                &[1.0, 0.0, 0.0, 0.25, -8.0, -1.0, 9.0],
                &[0.0, 1.0, 0.0, 0.5, -12.0, -0.5, 3.0],
                &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
            ],
            &[0.0, 0.0, 1.0],
        );
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.25).abs() < 1e-12);
        assert!((brute_force(&p).unwrap() - 1.25).abs() < 1e-12);

        let bland = SolveOptions {
            bland_after: 1,
            ..SolveOptions::default()
        };
        let sol = solve(&p, &bland);
        assert!((sol.objective_value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn matches_enumeration_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let m = rng.gen_range(2..=4);
            let n = rng.gen_range(m + 1..=11);
            let p = random_lp(&mut rng, m, n);
            let sol = solve(&p, &SolveOptions::default());
            assert_eq!(sol.status, LpStatus::Optimal);
            let expect = brute_force(&p).unwrap();
            assert!((sol.objective_value - expect).abs() < 1e-8, "{} vs {expect}", sol.objective_value);
        }
    }

    #[test]
    fn small_pricing_blocks_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let p = random_lp(&mut rng, 4, 150);
            let full = solve(&p, &SolveOptions { pricing_block: usize::MAX, ..Default::default() });
            let part = solve(&p, &SolveOptions { pricing_block: 7, ..Default::default() });
            assert!((full.objective_value - part.objective_value).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vertex_support_and_feasibility(seed in any::<u64>(), m in 2usize..=6, n in 10usize..=200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_lp(&mut rng, m, n);
            let sol = solve(&p, &SolveOptions::default());
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            prop_assert!(sol.primal.len() <= m);
            let (eq, neg) = residuals(&p, &sol);
            prop_assert!(eq <= 1e-9);
            prop_assert!(neg >= -1e-9);
        }

        #[test]
        fn deterministic(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_lp(&mut rng, 5, 120);
            let a = solve(&p, &SolveOptions::default());
            let b = solve(&p, &SolveOptions::default());
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn invert_roundtrip() {
        let a = [4.0, 1.0, 2.0, 0.5, 3.0, 1.0, 1.0, 0.0, 5.0];
        let inv = invert(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
