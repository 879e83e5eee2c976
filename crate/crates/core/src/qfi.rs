//! Quadrature quantum Fisher information and metrological power.
//!
//! Fisher information here is the standard QFI divided by 4, so that for a
//! pure state it equals the quadrature variance and the metrological power
//! `max(F_X − 1/2, 0)` is directly comparable with the nonclassicality.

use serde::Serialize;

use crate::fock::FockDiagonalState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiReport {
    /// `F_X`, quadrature QFI divided by 4.
    pub fisher: f64,
    /// `W = max(F_X − 1/2, 0)`.
    pub power: f64,
}

/// QFI for quadrature sensing with a Fock-diagonal probe.
///
/// The eigenbasis of the state is the Fock basis, and a quadrature only
/// couples neighbouring photon numbers with `|⟨m+1|X_μ|m⟩|² = (m+1)/2`, so
///
/// `F_X = Σ_m (p_{m+1} − p_m)² / (p_{m+1} + p_m) · (m+1)/2`
///
/// over every adjacent pair touching the window, including the two pairs
/// that leak out of it. The phase `μ` drops out.
pub fn quadrature_qfi(state: &FockDiagonalState) -> QfiReport {
    let n = state.offset();
    let m = state.rank() as u32;
    // pairs (lo, lo+1) for lo in [n-1, n+M-1]
    let first = n.saturating_sub(1);
    let fisher: f64 = (first..n + m)
        .map(|lo| {
            let a = state.population(lo);
            let b = state.population(lo + 1);
            if a + b == 0.0 {
                0.0
            } else {
                (b - a).powi(2) / (b + a) * (lo as f64 + 1.0) / 2.0
            }
        })
        .sum();
    QfiReport {
        fisher,
        power: (fisher - 0.5).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, DMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    #[test]
    fn fock_states() {
        for m in 0..8 {
            let r = quadrature_qfi(&FockDiagonalState::fock(m));
            assert_eq!(r.fisher, m as f64 + 0.5);
            assert_eq!(r.power, m as f64);
        }
    }

    #[test]
    fn exception_states_have_no_power() {
        let s = FockDiagonalState::new(0, vec![0.92, 0.06, 0.01, 0.01]).unwrap();
        let r = quadrature_qfi(&s);
        // 0.86²/0.98/2 + 0.05²/0.07 + 0 + 0.01·4/2
        let expect = 0.86f64.powi(2) / 0.98 / 2.0 + 0.05f64.powi(2) / 0.07 + 0.02;
        assert!((r.fisher - expect).abs() < 1e-15);
        assert!((r.fisher - 0.4331).abs() < 1e-4);
        assert_eq!(r.power, 0.0);

        let s = FockDiagonalState::new(0, vec![0.83, 0.15, 0.01, 0.01]).unwrap();
        assert_eq!(quadrature_qfi(&s).power, 0.0);
    }

    #[test]
    fn approaches_fock_value_near_a_spike() {
        for (n, eps) in [(0u32, 1e-3), (2, 1e-4), (5, 1e-5)] {
            let s = FockDiagonalState::new(n, vec![eps / 2.0, 1.0 - eps, eps / 2.0]).unwrap();
            let r = quadrature_qfi(&s);
            let spike = n as f64 + 1.0;
            assert!((r.power - spike).abs() <= 10.0 * (n as f64 + 2.0) * eps);
        }
    }

    /// Hermitian matrix function via eigendecomposition.
    fn herm_apply(h: &DMatrix<C>, f: impl Fn(f64) -> C) -> DMatrix<C> {
        let eig = h.clone().symmetric_eigen();
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    }

    /// `2(1 − √F(ρ, U ρ U†))/θ²` with `U = exp(−iθX_μ)`: the Bures-metric
    /// route to QFI/4, independent of the eigenbasis formula.
    fn finite_difference_qfi(pops: &[f64], offset: usize, mu: f64, theta: f64) -> f64 {
        let dim = offset + pops.len() + 3;
        let mut rho = DMatrix::<C>::zeros(dim, dim);
        for (k, p) in pops.iter().enumerate() {
            rho[(offset + k, offset + k)] = C::new(*p, 0.0);
        }
        // X = i(e^{-iμ}a† − e^{iμ}a)/√2
        let mut x = DMatrix::<C>::zeros(dim, dim);
        for m in 0..dim - 1 {
            let amp = ((m + 1) as f64).sqrt() / 2f64.sqrt();
            // ⟨m+1|a†|m⟩ = √(m+1)
            x[(m + 1, m)] = C::i() * C::from_polar(1.0, -mu) * amp;
            x[(m, m + 1)] = -C::i() * C::from_polar(1.0, mu) * amp;
        }
        let u = herm_apply(&x, |v| C::from_polar(1.0, -theta * v));
        let sigma = &u * &rho * u.adjoint();
        let sqrt_rho = herm_apply(&rho, |v| C::new(v.max(0.0).sqrt(), 0.0));
        let inner = &sqrt_rho * sigma * &sqrt_rho;
        let inner = (&inner + inner.adjoint()) * C::new(0.5, 0.0);
        let root_fid: f64 = inner
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .sum();
        2.0 * (1.0 - root_fid) / (theta * theta)
    }

    #[test]
    fn matches_dense_bures_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..12 {
            let mut pops: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = pops.iter().sum();
            pops.iter_mut().for_each(|p| *p /= s);
            let offset = trial % 3;
            let state = FockDiagonalState::new(offset as u32, pops.clone()).unwrap();
            let formula = quadrature_qfi(&state).fisher;
            for step in 0..=16 {
                let mu = step as f64 * std::f64::consts::PI / 8.0;
                let fd = finite_difference_qfi(&pops, offset, mu, 1e-3);
                assert!(
                    (fd - formula).abs() < 1e-5 * formula.max(1.0),
                    "trial {trial} μ={mu}: {fd} vs {formula}"
                );
            }
        }
    }
}
