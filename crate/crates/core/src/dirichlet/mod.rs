//! Dirichlet maximum-likelihood estimation by Bregman majorization-minimization.
//!
//! The negative log-likelihood of M samples z_m on the open simplex is
//!
//!   f(α) = M [ Σᵢ ln Γ(αᵢ) − ln Γ(ᾱ) − Σᵢ (αᵢ − 1) ḡᵢ ],   ᾱ = Σᵢ αᵢ,
//!
//! with ḡᵢ the column mean of ln z_{m,i}. Splitting ln Γ(αᵢ) into
//! ln Γ(αᵢ + 1) − ln αᵢ and bounding ln Γ(· + 1) by a tangent parabola with
//! curvature [`curvature`] yields a majorant whose Bregman function is
//! −M Σ ln αᵢ + M Σ c(βᵢ) αᵢ²/2. Its minimizer is available coordinatewise
//! in closed form, see [`vbmm_dirichlet_step`].

mod curvature;
mod io;
mod mm;
mod objective;
mod sampling;
mod types;

pub use curvature::{curvature, curvature_closed_form, curvature_series, CURVATURE_SERIES_THRESHOLD};
pub use io::{
    read_params_csv, read_samples_csv, samples_from_csv, samples_to_csv, write_params_csv,
    write_samples_csv,
};
pub use io::fmt_float;
pub use mm::{
    bmm_dirichlet_step, fit_mm, vbmm_dirichlet_step, vbmm_dirichlet_step_boxed,
    DirichletBregmanFamily, DirichletProblem, MajorantMetric,
};
pub use objective::{
    coercivity_lower_bound, gradient_noise_floor, nll, nll_at, nll_gradient, nll_gradient_at,
    projected_gradient_residual,
};
pub use sampling::sample;
pub use types::{BoxConstraint, DirichletParams, SampleSet};
