use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Rectangular truncation `0..=n_max` by `0..=m_max` of the state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedGrid {
    pub n_max: usize,
    pub m_max: usize,
}

impl TruncatedGrid {
    pub fn new(n_max: usize, m_max: usize) -> Result<Self> {
        if n_max < 1 || m_max < 1 {
            return Err(Error::OutOfDomain(format!(
                "grid bounds must be >= 1, got {n_max}x{m_max}"
            )));
        }
        Ok(TruncatedGrid { n_max, m_max })
    }

    /// Sized from the Gaussian widths of the heavy-traffic limit:
    /// `m_max = ceil(A + 12 sqrt(A) + 30)` and
    /// `n_max = ceil(A x* + 12 sqrt(A rho / (1 - rho)^2) + 30)`.
    ///
    /// The `M` bound also covers the Poisson(A) tail, which dominates the
    /// `M` marginal.
    pub fn auto(params: &ModelParams) -> Result<Self> {
        params.require_stable()?;
        let d = params.derived();
        let m_max = (d.a + 12.0 * d.a.sqrt() + 30.0).ceil();
        let spread = (d.a * d.rho / (1.0 - d.rho).powi(2)).sqrt();
        let n_max = (d.a * d.x_star + 12.0 * spread + 30.0).ceil();
        Self::new(n_max as usize, m_max as usize)
    }

    pub fn doubled(&self) -> Self {
        TruncatedGrid {
            n_max: 2 * self.n_max,
            m_max: 2 * self.m_max,
        }
    }

    /// Number of `m` values per `n` level.
    #[inline]
    pub fn width(&self) -> usize {
        self.m_max + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        (self.n_max + 1) * (self.m_max + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.width() + m
    }

    pub fn contains(&self, n: usize, m: usize) -> bool {
        n <= self.n_max && m <= self.m_max
    }
}
