//! Closed-form heavy-traffic asymptotics.

mod genfun;
mod laplace;
mod rates;
mod sharp;
mod surface;

pub use genfun::{gen_fun_asymptotic, ln_g0};
pub use laplace::{curvature_step, laplace_expand, locate_minimum, Interval, LaplaceExpansion};
pub use rates::{decay_h, decay_k, phi, phi_prime, psi};
pub use sharp::{
    asymptotic_point, gaussian_limit, ln_marginal_asymptotics, ln_prefactor_g,
    marginal_asymptotics, prefactor_g, sharp_density, sharp_permanent, AsymptoticPoint,
    GaussianLimit, Marginal,
};
pub use surface::{surface_grid, write_surface_csv, SurfacePoint};
