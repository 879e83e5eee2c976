//! Optimal LP weights over amplitude vectors.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::fmt_sig17;
use crate::fock::alpha_bar_real;

/// A weighted amplitude vector `(x_0, …, x_{M-1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramEntry {
    /// Lattice index at the histogram's spacing, or `None` for the
    /// off-lattice column of the simple decomposition.
    pub lattice: Option<Vec<u32>>,
    pub amplitudes: Vec<f64>,
    pub weight: f64,
}

impl HistogramEntry {
    pub fn free_amplitudes(&self) -> &[f64] {
        &self.amplitudes[1..]
    }
}

/// Marginal of a phase-complete decomposition over amplitude moduli.
///
/// Entries on the lattice come first, in lattice order; the off-lattice
/// column, if it carries weight, comes last.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    offset: u32,
    delta: f64,
    entries: Vec<HistogramEntry>,
}

impl Histogram {
    pub(crate) fn new(offset: u32, delta: f64, mut entries: Vec<HistogramEntry>) -> Self {
        entries.sort_by(|a, b| match (&a.lattice, &b.lattice) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        Self {
            offset,
            delta,
            entries,
        }
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rank(&self) -> usize {
        self.entries.first().map_or(0, |e| e.amplitudes.len())
    }

    pub fn entries(&self) -> &[HistogramEntry] {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// `Σ_x Q(x) x_k²` for every `k`, i.e. the reconstructed populations.
    pub fn populations(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.rank()];
        for e in &self.entries {
            for (pk, x) in p.iter_mut().zip(&e.amplitudes) {
                *pk += e.weight * x * x;
            }
        }
        p
    }

    /// `Σ_x Q(x) (Σ_k x_{k+1} x_k √(n+k+1))²`, the LP objective.
    pub fn objective(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.weight * alpha_bar_real(&e.amplitudes, self.offset).powi(2))
            .sum()
    }

    /// CSV with header `x1,…,x{M-1},weight`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m = self.rank().max(1);
        let mut header: Vec<String> = (1..m).map(|k| format!("x{k}")).collect();
        header.push("weight".into());
        w.write_record(&header)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.free_amplitudes().iter().map(|&x| fmt_sig17(x)).collect();
            row.push(fmt_sig17(e.weight));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
