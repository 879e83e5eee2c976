//! Lattices of amplitude moduli.

use crate::error::{Error, Result};
use crate::fock::alpha_bar_real;

/// Largest grid [`build_grid`] will enumerate unless told otherwise.
pub const DEFAULT_MAX_POINTS: usize = 5_000_000;

/// Slack on `Σ (l_k Δ)² ≤ 1`, so that points like `(0.6, 0.8)` at `Δ = 0.1`
/// survive the rounding in `6·0.1` and `8·0.1`.
const SPHERE_SLACK: f64 = 1e-12;

/// A set of lattice points `(l_1 Δ, …, l_{M-1} Δ)` inside the unit ball,
/// stored as integer indices in lexicographic order.
///
/// [`build_grid`] produces the full lattice; refinement builds sparse
/// subsets of a finer lattice through [`AmplitudeGrid::from_indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid {
    rank: usize,
    delta: f64,
    /// Flat `(M-1)`-strided lattice indices.
    indices: Vec<u32>,
}

/// One column of the convex-roof program.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub lattice: Vec<u32>,
    /// `(x_1, …, x_{M-1})`.
    pub free_amplitudes: Vec<f64>,
    /// `√(1 − Σ x_k²)`.
    pub x0: f64,
}

impl GridPoint {
    /// All `M` amplitudes `(x_0, x_1, …, x_{M-1})`.
    pub fn amplitudes(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.free_amplitudes.len() + 1);
        x.push(self.x0);
        x.extend_from_slice(&self.free_amplitudes);
        x
    }

    /// `(Σ_k x_{k+1} x_k √(n+k+1))²` for a window starting at `n`.
    pub fn objective_coeff(&self, n: u32) -> f64 {
        alpha_bar_real(&self.amplitudes(), n).powi(2)
    }
}

/// `x_0` for the given free amplitudes, clamped at zero on the sphere.
pub(crate) fn dependent_amplitude(free: &[f64]) -> f64 {
    (1.0 - free.iter().map(|x| x * x).sum::<f64>()).max(0.0).sqrt()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid spacing must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Whether the lattice vector `l` lies in the unit ball at spacing `delta`.
pub(crate) fn in_ball(l: &[u32], delta: f64) -> bool {
    l.iter().map(|&v| (v as f64 * delta).powi(2)).sum::<f64>() <= 1.0 + SPHERE_SLACK
}

/// Enumerates every lattice point of the unit ball's positive orthant in
/// `M - 1` dimensions, lexicographically in `(l_1, …, l_{M-1})`.
pub fn build_grid(rank: usize, delta: f64) -> Result<AmplitudeGrid> {
    build_grid_capped(rank, delta, DEFAULT_MAX_POINTS)
}

/// [`build_grid`] with an explicit capacity limit.
pub fn build_grid_capped(rank: usize, delta: f64, max_points: usize) -> Result<AmplitudeGrid> {
    if rank < 2 {
        return Err(Error::InvalidArgument(format!(
            "amplitude grids need rank ≥ 2, got {rank}"
        )));
    }
    check_delta(delta)?;
    let dim = rank - 1;
    let mut indices = Vec::new();
    let mut count = 0usize;
    let mut l = vec![0u32; dim];
    // odometer over the ball: bump the last coordinate, carry on overflow
    loop {
        count += 1;
        if count > max_points {
            return Err(Error::Capacity {
                requested: count_points(rank, delta),
                max: max_points,
            });
        }
        indices.extend_from_slice(&l);
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(AmplitudeGrid {
                    rank,
                    delta,
                    indices,
                });
            }
            k -= 1;
            l[k] += 1;
            if in_ball(&l, delta) {
                break;
            }
            l[k] = 0;
        }
    }
}

/// Number of points [`build_grid`] would produce, without storing them.
pub fn count_points(rank: usize, delta: f64) -> usize {
    if rank < 2 || !(delta > 0.0 && delta < 1.0) {
        return 0;
    }
    let mut sq: Vec<f64> = Vec::new();
    let mut l = 0u32;
    while (l as f64 * delta).powi(2) <= 1.0 + SPHERE_SLACK {
        sq.push((l as f64 * delta).powi(2));
        l += 1;
    }
    fn rec(sq: &[f64], dims: usize, used: f64) -> usize {
        if dims == 1 {
            return sq.partition_point(|&s| used + s <= 1.0 + SPHERE_SLACK);
        }
        sq.iter()
            .take_while(|&&s| used + s <= 1.0 + SPHERE_SLACK)
            .map(|&s| rec(sq, dims - 1, used + s))
            .sum()
    }
    rec(&sq, rank - 1, 0.0)
}

impl AmplitudeGrid {
    /// A grid from arbitrary lattice indices. Points outside the ball are
    /// rejected; the rest are sorted and deduplicated.
    pub fn from_indices(rank: usize, delta: f64, mut points: Vec<Vec<u32>>) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidArgument(format!(
                "amplitude grids need rank ≥ 2, got {rank}"
            )));
        }
        check_delta(delta)?;
        if let Some(bad) = points.iter().find(|l| l.len() != rank - 1 || !in_ball(l, delta)) {
            return Err(Error::InvalidArgument(format!(
                "lattice index {bad:?} is not a point of the rank-{rank} grid at spacing {delta}"
            )));
        }
        points.sort_unstable();
        points.dedup();
        Ok(Self {
            rank,
            delta,
            indices: points.concat(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.indices.len() / (self.rank - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Lattice indices of point `i`.
    pub fn lattice(&self, i: usize) -> &[u32] {
        let d = self.rank - 1;
        &self.indices[i * d..(i + 1) * d]
    }

    pub fn point(&self, i: usize) -> GridPoint {
        let lattice = self.lattice(i).to_vec();
        let free_amplitudes: Vec<f64> = lattice.iter().map(|&l| l as f64 * self.delta).collect();
        let x0 = dependent_amplitude(&free_amplitudes);
        GridPoint {
            lattice,
            free_amplitudes,
            x0,
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = GridPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Position of a lattice index, by binary search.
    pub fn find(&self, lattice: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.lattice(mid).cmp(lattice) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Bytes held by the dense LP built over this grid: objective plus an
    /// `M`-row column per point, all `f64`.
    pub fn lp_memory_bytes(&self) -> usize {
        self.len() * (self.rank + 1) * std::mem::size_of::<f64>()
    }
}
