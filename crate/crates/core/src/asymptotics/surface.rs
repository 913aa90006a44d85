//! Tabulation of `H` and `g` over a rectangle of scaled coordinates.

use std::io::Write;

use serde::Serialize;

use super::rates::decay_h;
use super::sharp::prefactor_g;
use crate::error::Result;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "H")]
    pub h: f64,
    /// Undefined on the axes; left empty in CSV.
    pub g: Option<f64>,
}

/// `(steps + 1)^2` points `x_i = i x_max / steps`, `y_j = j y_max / steps`,
/// row-major in `x`.
pub fn surface_grid(
    params: &ModelParams,
    x_max: f64,
    y_max: f64,
    steps: usize,
) -> Result<Vec<SurfacePoint>> {
    let rho = params.derived().rho;
    let steps = steps.max(1);
    let mut out = Vec::with_capacity((steps + 1) * (steps + 1));
    for i in 0..=steps {
        let x = i as f64 * x_max / steps as f64;
        for j in 0..=steps {
            let y = j as f64 * y_max / steps as f64;
            let g = if x > 0.0 && y > 0.0 {
                Some(prefactor_g(x, y, params)?)
            } else {
                None
            };
            out.push(SurfacePoint {
                x,
                y,
                h: decay_h(x, y, rho)?,
                g,
            });
        }
    }
    Ok(out)
}

/// CSV with header `x,y,H,g`.
pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
