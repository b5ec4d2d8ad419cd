//! Maximum-likelihood estimation for the Cauchy distribution.
//!
//! The location μ and scale σ are estimated jointly as one complex
//! parameter θ = μ + iσ in the upper half-plane H. The crate offers three
//! routes to the estimate and the machinery to check them against each
//! other:
//!
//! - [`iterate`]: the map q(z) = (Σ x_j/(x_j−z)) / (Σ 1/(x_j−z)) sends H to
//!   the lower half-plane and back, so Q = q∘q maps H into itself and
//!   contracts toward its unique fixed point, the MLE. Iterating Q
//!   converges from any starting point, for every valid sample; the same
//!   scheme fits the wrapped (circular) model on the unit disc.
//! - [`closed_form`]: for n = 3 and n = 4 the estimate has exact closed
//!   forms; the quartic case factors into three quadratics with a fixed
//!   discriminant sign pattern.
//! - [`algebraic`]: clearing ζ = Q(ζ) to a polynomial and removing the
//!   trivial factors leaves R_n (degree ≤ n²−3n+2), built here in exact
//!   rational arithmetic; its unique upper-half-plane root with vanishing
//!   likelihood residual is the MLE. Handles the singular samples where
//!   iteration crawls, and exports exact coefficients.
//!
//! [`diagnostics`] explains the hard cases: the estimate always lies in the
//! half-disc over [x₁, x_n], and its relative distance to the boundary
//! predicts iteration speed. [`oracle`] carries independent verification:
//! a grid maximizer over that half-disc, finite-difference score checks, a
//! damped Newton baseline, and a seeded sampler. [`numerics`] holds the
//! exact polynomial engine (subresultant GCD, rational composition) and the
//! Aberth-Ehrlich root finder.

pub mod algebraic;
pub mod closed_form;
pub mod diagnostics;
pub mod error;
pub mod iterate;
pub mod model;
pub mod numerics;
pub mod oracle;

pub use algebraic::{build_rn, emit_coefficients, emit_poly, fit_algebraic, AlgebraicFit, EmitFormat};
pub use closed_form::{fit_n3, fit_n4, r4_factors, QuadraticFactor};
pub use diagnostics::{
    cdf_symmetry_residuals, construct_sample_with_position, relative_position, PositionReport,
};
pub use error::{Error, Result};
pub use iterate::{
    circular_step, contraction_check, fit_circular, fit_iterative, likelihood_residuals,
    pseudo_hyperbolic,
    q_map, q_squared, stability_probe, starting_point, CircularSample, IterationTrace,
    Residuals,
};
pub use model::{
    build_h, cdf, density, log_likelihood, mobius, mobius_inverse, Sample, SymmetricPolys,
    UpperHalfPoint,
};
pub use oracle::{
    fd_score_check, grid_mle, newton_raphson_baseline, sample_cauchy, GridSpec, NewtonOutcome,
};
