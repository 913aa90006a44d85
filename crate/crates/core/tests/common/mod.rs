//! Oracles shared by the integration targets.

use impatience::exact::TruncatedGrid;
use impatience::model::{ModelParams, State};
use nalgebra::{DMatrix, DVector};

/// Stationary vector of the reflecting truncation, built from
/// `transition_rates` with out-of-grid targets dropped.
pub fn dense_stationary(params: &ModelParams, grid: TruncatedGrid) -> Vec<f64> {
    let size = grid.len();
    // row i of qt is the balance equation of state i
    let mut qt = DMatrix::<f64>::zeros(size, size);
    for n in 0..=grid.n_max {
        for m in 0..=grid.m_max {
            let from = grid.index(n, m);
            for (to, rate) in params.transition_rates(State::new(n as u64, m as u64)) {
                let (tn, tm) = (to.n as usize, to.m as usize);
                if grid.contains(tn, tm) {
                    qt[(grid.index(tn, tm), from)] += rate;
                    qt[(from, from)] -= rate;
                }
            }
        }
    }
    let mut rhs = DVector::<f64>::zeros(size);
    for j in 0..size {
        qt[(size - 1, j)] = 1.0;
    }
    rhs[size - 1] = 1.0;
    qt.lu()
        .solve(&rhs)
        .expect("singular truncated generator")
        .iter()
        .copied()
        .collect()
}
