//! One-dimensional maximization for the two-part ansatz states.
//!
//! Every non-simple ansatz uses states `a(f) = √(1−f)·e + √f·u` with `e`
//! and `u` nonnegative unit vectors of disjoint support, and scores them
//! by `h(f) = w·ᾱ(a(f))²/f`, where `w` is the population the states carry.

use crate::fock::alpha_bar_real;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GOLDEN_TOL: f64 = 1e-9;
/// Half-width of the bracket handed from golden section to the polish.
const POLISH_RADIUS: f64 = 1e-6;
/// Keeps evaluation away from the `f = 0` and `f = 1` singularities of `a'`.
const EDGE: f64 = 1e-15;

#[derive(Debug, Clone)]
pub(crate) struct TwoPart {
    pub n: u32,
    pub e: Vec<f64>,
    pub u: Vec<f64>,
    pub weight: f64,
}

impl TwoPart {
    pub fn amplitudes(&self, f: f64) -> Vec<f64> {
        let (a, b) = ((1.0 - f).max(0.0).sqrt(), f.sqrt());
        self.e.iter().zip(&self.u).map(|(e, u)| a * e + b * u).collect()
    }

    pub fn alpha(&self, f: f64) -> f64 {
        alpha_bar_real(&self.amplitudes(f), self.n)
    }

    /// `h(f)`; the `f → 0` limit is taken from the smallest positive `f`.
    pub fn objective(&self, f: f64) -> f64 {
        let f = f.max(EDGE);
        self.weight * self.alpha(f).powi(2) / f
    }

    /// Sign-carrying part of `h'(f)`: `2f·ᾱ' − ᾱ` (times `wᾱ/f²`).
    fn slope(&self, f: f64) -> f64 {
        let a = self.amplitudes(f);
        let da: Vec<f64> = self
            .e
            .iter()
            .zip(&self.u)
            .map(|(e, u)| -e / (2.0 * (1.0 - f).sqrt()) + u / (2.0 * f.sqrt()))
            .collect();
        let n = self.n as f64;
        let dalpha: f64 = (0..a.len().saturating_sub(1))
            .map(|k| (da[k + 1] * a[k] + a[k + 1] * da[k]) * (n + k as f64 + 1.0).sqrt())
            .sum();
        2.0 * f * dalpha - alpha_bar_real(&a, self.n)
    }

    /// Maximizer of `h` over `[0, 1]`: golden section down to `1e-9`, then
    /// bisection on the sign of the analytic derivative.
    pub fn argmax(&self) -> f64 {
        debug_assert!(self.is_unimodal(), "ansatz objective is not unimodal: {self:?}");
        let x = golden_max(|f| self.objective(f), 0.0, 1.0, GOLDEN_TOL);
        self.polish(x)
    }

    fn polish(&self, x: f64) -> f64 {
        let lo = (x - POLISH_RADIUS).max(EDGE);
        let hi = (x + POLISH_RADIUS).min(1.0 - EDGE);
        let (s_lo, s_hi) = (self.slope(lo), self.slope(hi));
        if s_lo > 0.0 && s_hi < 0.0 {
            let (mut lo, mut hi) = (lo, hi);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if self.slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        } else if s_hi >= 0.0 && x + POLISH_RADIUS >= 1.0 {
            1.0
        } else if s_lo <= 0.0 && x - POLISH_RADIUS <= 0.0 {
            0.0
        } else {
            x
        }
    }

    /// Rises then falls on a 1000-point sample, up to round-off.
    fn is_unimodal(&self) -> bool {
        let h: Vec<f64> = (0..1000).map(|i| self.objective((i as f64 + 0.5) / 1000.0)).collect();
        let peak = h.iter().cloned().fold(0.0, f64::max);
        let slack = 1e-12 * peak.max(1e-300);
        let top = h.iter().position(|&v| v == peak).unwrap_or(0);
        h[..=top].windows(2).all(|w| w[1] >= w[0] - slack)
            && h[top..].windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Golden-section search for the maximum of a unimodal `g` on `[lo, hi]`.
pub fn golden_max(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    while hi - lo > tol {
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - INV_PHI * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + INV_PHI * (hi - lo);
            gd = g(d);
        }
    }
    0.5 * (lo + hi)
}
