//! Probability mass functions on a truncated `(n, m)` lattice and the
//! statistics derived from them.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::TruncatedGrid;
use crate::error::{Error, Result};

/// Normalisation tolerance for every pmf produced by this crate.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A joint pmf over `0..=n_max` x `0..=m_max`, stored row-major in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    grid: TruncatedGrid,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_n: f64,
    pub mean_m: f64,
    pub var_n: f64,
    pub var_m: f64,
    pub cov_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionalSource {
    Exact,
    QuasiStationary,
}

/// Distribution of `M` given `N = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    pub n: usize,
    pub pmf: Vec<f64>,
    pub source: ConditionalSource,
}

impl ConditionalDistribution {
    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }
}

/// Mass held by the last row and last column of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMass {
    pub n_edge: f64,
    pub m_edge: f64,
}

impl BoundaryMass {
    pub fn max(&self) -> f64 {
        self.n_edge.max(self.m_edge)
    }
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    m: usize,
    probability: f64,
}

impl JointPmf {
    /// Wraps raw values; they must be non-negative and sum to one.
    pub fn new(grid: TruncatedGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::OutOfDomain(format!(
                "pmf has {} entries, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::OutOfDomain(format!(
                "pmf entry {bad} is not a finite non-negative number"
            )));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::OutOfDomain(format!("pmf sums to {total}, not 1")));
        }
        Ok(JointPmf { grid, values })
    }

    /// Normalises non-negative weights into a pmf.
    pub fn from_weights(grid: TruncatedGrid, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::OutOfDomain(format!("weights sum to {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(grid, weights)
    }

    pub fn grid(&self) -> TruncatedGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `P(N = n, M = m)`, zero outside the grid.
    pub fn prob(&self, n: usize, m: usize) -> f64 {
        if self.grid.contains(n, m) {
            self.values[self.grid.index(n, m)]
        } else {
            0.0
        }
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.grid.width();
        &self.values[n * w..(n + 1) * w]
    }

    /// `(P(N = n))_n` and `(P(M = m))_m`.
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pn = vec![0.0; self.grid.n_max + 1];
        let mut pm = vec![0.0; self.grid.m_max + 1];
        for (n, row) in self.values.chunks_exact(self.grid.width()).enumerate() {
            for (m, p) in row.iter().enumerate() {
                pn[n] += p;
                pm[m] += p;
            }
        }
        (pn, pm)
    }

    pub fn moments(&self) -> Moments {
        let mut mean_n = 0.0;
        let mut mean_m = 0.0;
        for (n, row) in self.values.chunks_exact(self.grid.width()).enumerate() {
            for (m, p) in row.iter().enumerate() {
                mean_n += n as f64 * p;
                mean_m += m as f64 * p;
            }
        }
        // centred second pass keeps the variances accurate when means are large
        let (mut var_n, mut var_m, mut cov_nm) = (0.0, 0.0, 0.0);
        for (n, row) in self.values.chunks_exact(self.grid.width()).enumerate() {
            let dn = n as f64 - mean_n;
            for (m, p) in row.iter().enumerate() {
                let dm = m as f64 - mean_m;
                var_n += dn * dn * p;
                var_m += dm * dm * p;
                cov_nm += dn * dm * p;
            }
        }
        Moments {
            mean_n,
            mean_m,
            var_n,
            var_m,
            cov_nm,
        }
    }

    pub fn conditional(&self, n: usize) -> Result<ConditionalDistribution> {
        if n > self.grid.n_max {
            return Err(Error::ZeroMass { n });
        }
        let row = self.row(n);
        let mass: f64 = row.iter().sum();
        if !(mass > 0.0) {
            return Err(Error::ZeroMass { n });
        }
        Ok(ConditionalDistribution {
            n,
            pmf: row.iter().map(|p| p / mass).collect(),
            source: ConditionalSource::Exact,
        })
    }

    /// `E(u^N v^M)` summed over the truncated lattice.
    pub fn generating_function(&self, u: Complex64, v: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut u_pow = Complex64::new(1.0, 0.0);
        for row in self.values.chunks_exact(self.grid.width()) {
            // Horner in v
            let inner = row
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &p| acc * v + p);
            total += u_pow * inner;
            u_pow *= u;
        }
        total
    }

    pub fn boundary_mass(&self) -> BoundaryMass {
        let n_edge = self.row(self.grid.n_max).iter().sum();
        let m_edge = self
            .values
            .chunks_exact(self.grid.width())
            .map(|row| row[self.grid.m_max])
            .sum();
        BoundaryMass { n_edge, m_edge }
    }

    /// Total variation distance, treating mass outside either grid as zero.
    pub fn total_variation(&self, other: &JointPmf) -> f64 {
        let n_max = self.grid.n_max.max(other.grid.n_max);
        let m_max = self.grid.m_max.max(other.grid.m_max);
        let mut sum = 0.0;
        for n in 0..=n_max {
            for m in 0..=m_max {
                sum += (self.prob(n, m) - other.prob(n, m)).abs();
            }
        }
        0.5 * sum
    }

    /// CSV with header `n,m,probability`; one row per lattice point.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (n, row) in self.values.chunks_exact(self.grid.width()).enumerate() {
            for (m, &probability) in row.iter().enumerate() {
                w.serialize(CsvRow { n, m, probability })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Total variation between two 1-D pmfs of possibly different length.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (get(a, i) - get(b, i)).abs()).sum::<f64>()
}
