//! Independent verification machinery: a brute-force grid maximizer whose
//! soundness rests on the half-circle localization of the estimate, a
//! finite-difference check of the score equations, a damped Newton-Raphson
//! baseline (the method that fails on singular samples), and a seeded
//! Cauchy sampler.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{log_likelihood, Sample, UpperHalfPoint};

/// Search region and refinement schedule for the grid oracle.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub mu_range: (f64, f64),
    pub sigma_range: (f64, f64),
    /// Points per axis, at least 16.
    pub resolution: usize,
    /// Refinement levels beyond the first pass.
    pub levels: usize,
}

impl GridSpec {
    /// Region guaranteed to contain the MLE: μ ∈ [x₁, x_n],
    /// σ ∈ (0, (x_n−x₁)/2], from the half-circle bound.
    pub fn default_for(s: &Sample) -> Self {
        let spread = s.max() - s.min();
        GridSpec {
            mu_range: (s.min(), s.max()),
            sigma_range: (spread * 1e-9, spread / 2.0),
            resolution: 33,
            levels: 10,
        }
    }
}

/// Coarse-to-fine maximization of the log-likelihood over the grid.
///
/// Each level evaluates resolution² cell centers, keeps the best (ties
/// break to the lowest index, so the result is independent of evaluation
/// order), then shrinks to a ±3-cell window around it. Accuracy is the
/// final cell size; soundness needs the optimum inside the initial region,
/// which the default region guarantees.
pub fn grid_mle(s: &Sample, g: &GridSpec) -> UpperHalfPoint {
    assert!(g.resolution >= 16, "grid resolution below 16");
    assert!(g.mu_range.0 <= g.mu_range.1 && g.sigma_range.0 < g.sigma_range.1);
    assert!(g.sigma_range.0 > 0.0);

    let res = g.resolution;
    let (mut mu_lo, mut mu_hi) = g.mu_range;
    let (mut sg_lo, mut sg_hi) = g.sigma_range;
    let mut best_point = UpperHalfPoint::new(
        0.5 * (mu_lo + mu_hi),
        0.5 * (sg_lo + sg_hi),
    )
    .expect("positive sigma");

    for _ in 0..=g.levels {
        let mu_step = (mu_hi - mu_lo) / res as f64;
        let sg_step = (sg_hi - sg_lo) / res as f64;
        let mut best = f64::NEG_INFINITY;
        let mut best_cell = (0, 0);
        for i in 0..res {
            for j in 0..res {
                let mu = mu_lo + (i as f64 + 0.5) * mu_step;
                let sg = sg_lo + (j as f64 + 0.5) * sg_step;
                let point = UpperHalfPoint::new(mu, sg).expect("positive sigma");
                let ll = log_likelihood(s, &point);
                if ll > best {
                    best = ll;
                    best_cell = (i, j);
                    best_point = point;
                }
            }
        }
        // shrink to a ±3-cell window, clamped to the sound region
        let (bi, bj) = best_cell;
        let mu_c = mu_lo + (bi as f64 + 0.5) * mu_step;
        let sg_c = sg_lo + (bj as f64 + 0.5) * sg_step;
        mu_lo = (mu_c - 3.0 * mu_step).max(g.mu_range.0);
        mu_hi = (mu_c + 3.0 * mu_step).min(g.mu_range.1);
        sg_lo = (sg_c - 3.0 * sg_step).max(g.sigma_range.0);
        sg_hi = (sg_c + 3.0 * sg_step).min(g.sigma_range.1);
    }
    best_point
}

/// Analytic score components of the log-likelihood,
/// (Σ (x_j−μ)/d_j, Σ σ²/d_j − n/2) with d_j = (x_j−μ)² + σ²; both vanish
/// exactly at the MLE.
pub fn score(s: &Sample, theta: &UpperHalfPoint) -> (f64, f64) {
    let (mu, sg) = (theta.mu(), theta.sigma());
    let mut sum_mu = 0.0;
    let mut sum_sg = 0.0;
    for &x in s.values() {
        let d = (x - mu) * (x - mu) + sg * sg;
        sum_mu += (x - mu) / d;
        sum_sg += sg * sg / d;
    }
    (sum_mu, sum_sg - s.n() as f64 / 2.0)
}

/// Compares the analytic score components against central finite
/// differences of the log-likelihood. Returns the two absolute
/// discrepancies; both scale as O(step²).
pub fn fd_score_check(s: &Sample, theta: &UpperHalfPoint, step: f64) -> (f64, f64) {
    let (a_mu, a_sg) = score(s, theta);
    let (mu, sg) = (theta.mu(), theta.sigma());
    let at = |m: f64, g: f64| {
        log_likelihood(s, &UpperHalfPoint::new(m, g).expect("positive sigma"))
    };
    let fd_mu = (at(mu + step, sg) - at(mu - step, sg)) / (2.0 * step);
    let fd_sg = (at(mu, sg + step) - at(mu, sg - step)) / (2.0 * step);
    // ∂ℓ/∂μ = 2·scoreμ and scoreσ = −(σ/2)·∂ℓ/∂σ
    let d1 = (a_mu - fd_mu / 2.0).abs();
    let d2 = (a_sg + sg * fd_sg / 2.0).abs();
    (d1, d2)
}

/// What the Newton baseline did.
#[derive(Debug, Clone, PartialEq)]
pub enum NewtonOutcome {
    Converged {
        point: UpperHalfPoint,
        iterations: usize,
    },
    /// No ascent direction worked, or the iterate left the half-plane,
    /// or iterations ran out away from a stationary point.
    Diverged {
        reason: String,
        iterations: usize,
        last_mu: f64,
        last_sigma: f64,
    },
}

impl NewtonOutcome {
    pub fn converged(&self) -> bool {
        matches!(self, NewtonOutcome::Converged { .. })
    }

    pub fn point(&self) -> Option<UpperHalfPoint> {
        match self {
            NewtonOutcome::Converged { point, .. } => Some(*point),
            NewtonOutcome::Diverged { .. } => None,
        }
    }
}

/// Damped Newton-Raphson on the two score equations, with the analytic
/// Hessian of the log-likelihood. Included as the classical baseline: it
/// converges fast near well-conditioned optima and genuinely diverges on
/// the singular samples, which is reported rather than raised.
pub fn newton_raphson_baseline(
    s: &Sample,
    start: &UpperHalfPoint,
    max_iter: usize,
) -> NewtonOutcome {
    const GRAD_TOL: f64 = 1e-10;
    let n = s.n() as f64;
    let mut mu = start.mu();
    let mut sg = start.sigma();

    let scaled_grad = |point: &UpperHalfPoint| {
        let (g1, g2) = grad(s, point);
        (g1 * g1 + g2 * g2).sqrt() * point.sigma() / n
    };

    for iter in 0..max_iter {
        let here = UpperHalfPoint::new(mu, sg).expect("kept valid");
        if scaled_grad(&here) <= GRAD_TOL {
            return NewtonOutcome::Converged {
                point: here,
                iterations: iter,
            };
        }
        let (g1, g2) = grad(s, &here);
        let (h11, h12, h22) = hessian(s, &here);
        let det = h11 * h22 - h12 * h12;
        if det == 0.0 || !det.is_finite() {
            return NewtonOutcome::Diverged {
                reason: "singular Hessian".into(),
                iterations: iter,
                last_mu: mu,
                last_sigma: sg,
            };
        }
        let mut d_mu = -(h22 * g1 - h12 * g2) / det;
        let mut d_sg = -(-h12 * g1 + h11 * g2) / det;
        if !d_mu.is_finite() || !d_sg.is_finite() {
            return NewtonOutcome::Diverged {
                reason: "non-finite Newton step".into(),
                iterations: iter,
                last_mu: mu,
                last_sigma: sg,
            };
        }

        // damping: halve the step until the likelihood actually rises
        let ll_here = log_likelihood(s, &here);
        let mut accepted = false;
        for _ in 0..30 {
            let cand_mu = mu + d_mu;
            let cand_sg = sg + d_sg;
            if cand_sg > 0.0 && cand_mu.is_finite() {
                let cand = UpperHalfPoint::new(cand_mu, cand_sg).expect("checked");
                if log_likelihood(s, &cand) > ll_here {
                    mu = cand_mu;
                    sg = cand_sg;
                    accepted = true;
                    break;
                }
            }
            d_mu *= 0.5;
            d_sg *= 0.5;
        }
        if !accepted {
            // no ascent at all: either we are at the optimum or stuck
            let here = UpperHalfPoint::new(mu, sg).expect("kept valid");
            return if scaled_grad(&here) <= 1e-9 {
                NewtonOutcome::Converged {
                    point: here,
                    iterations: iter,
                }
            } else {
                NewtonOutcome::Diverged {
                    reason: "no ascent direction".into(),
                    iterations: iter,
                    last_mu: mu,
                    last_sigma: sg,
                }
            };
        }
    }
    let here = UpperHalfPoint::new(mu, sg).expect("kept valid");
    if scaled_grad(&here) <= GRAD_TOL {
        NewtonOutcome::Converged {
            point: here,
            iterations: max_iter,
        }
    } else {
        NewtonOutcome::Diverged {
            reason: "iteration limit".into(),
            iterations: max_iter,
            last_mu: mu,
            last_sigma: sg,
        }
    }
}

/// Gradient of the log-likelihood in (μ, σ).
fn grad(s: &Sample, theta: &UpperHalfPoint) -> (f64, f64) {
    let (mu, sg) = (theta.mu(), theta.sigma());
    let n = s.n() as f64;
    let mut g_mu = 0.0;
    let mut sum = 0.0;
    for &x in s.values() {
        let d = (x - mu) * (x - mu) + sg * sg;
        g_mu += 2.0 * (x - mu) / d;
        sum += 2.0 * sg / d;
    }
    (g_mu, n / sg - sum)
}

/// Hessian entries (ℓ_μμ, ℓ_μσ, ℓ_σσ) of the log-likelihood.
fn hessian(s: &Sample, theta: &UpperHalfPoint) -> (f64, f64, f64) {
    let (mu, sg) = (theta.mu(), theta.sigma());
    let n = s.n() as f64;
    let mut h11 = 0.0;
    let mut h12 = 0.0;
    for &x in s.values() {
        let dx = x - mu;
        let d = dx * dx + sg * sg;
        h11 += 2.0 * (dx * dx - sg * sg) / (d * d);
        h12 += -4.0 * sg * dx / (d * d);
    }
    let h22 = -n / (sg * sg) - h11;
    (h11, h12, h22)
}

/// Quantile (inverse CDF) μ + σ·tan(π(u − 1/2)); u = 1/2 maps to exactly μ.
pub fn cauchy_quantile(theta: &UpperHalfPoint, u: f64) -> f64 {
    theta.mu() + theta.sigma() * (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Deterministic seeded draws by inverse-CDF sampling.
pub fn sample_cauchy(theta: &UpperHalfPoint, n: usize, seed: u64) -> Result<Sample> {
    Sample::new(cauchy_draws(theta, n, seed))
}

/// The raw draw vector behind `sample_cauchy`, in generation order.
pub fn cauchy_draws(theta: &UpperHalfPoint, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| cauchy_quantile(theta, rng.random::<f64>()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{fit_n3, fit_n4};
    use crate::iterate::fit_iterative;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).expect("valid")
    }

    #[test]
    fn grid_matches_closed_forms() {
        let s3 = sample(&[-1.0, 0.0, 1.0]);
        let g = grid_mle(&s3, &GridSpec::default_for(&s3));
        let c = fit_n3(&s3).expect("fit");
        assert!((g.theta() - c.theta()).norm() < 1e-3);

        let s4 = sample(&[-2.0, -1.0, 1.0, 2.0]);
        let g4 = grid_mle(&s4, &GridSpec::default_for(&s4));
        let c4 = fit_n4(&s4).expect("fit");
        assert!((g4.theta() - c4.theta()).norm() < 1e-3);
    }

    #[test]
    fn grid_matches_iterative_on_wide_sample() {
        let s = sample(&[-8.0, -5.0, -3.0, -1.0, 2.0, 7.0, 10.0]);
        let g = grid_mle(&s, &GridSpec::default_for(&s));
        assert!((g.mu() - -1.4044).abs() < 1e-3);
        assert!((g.sigma() - 3.9092).abs() < 1e-3);
    }

    #[test]
    fn fd_check_small_and_quadratic_in_step() {
        let s = sample(&[-1.0, 0.0, 1.0]);
        let t = UpperHalfPoint::new(0.3, 0.8).expect("valid");
        let (d1, d2) = fd_score_check(&s, &t, 1e-5);
        assert!(d1 < 1e-6 && d2 < 1e-6);

        // halving the step should quarter the discrepancy (up to noise)
        let coarse = fd_score_check(&s, &t, 1e-3);
        let fine = fd_score_check(&s, &t, 5e-4);
        assert!(fine.0 < coarse.0 / 2.5);
        assert!(fine.1 < coarse.1 / 2.5);
    }

    #[test]
    fn score_vanishes_at_fit() {
        let s = sample(&[-8.0, -5.0, -3.0, -1.0, 2.0, 7.0, 10.0]);
        let (fit, _) = fit_iterative(&s, None, 1e-14, 1_000_000).expect("fit");
        let (s1, s2) = score(&s, &fit);
        assert!(s1.abs() < 1e-9 && s2.abs() < 1e-9);
        // and is clearly nonzero away from it
        let off = UpperHalfPoint::new(fit.mu() + 0.1, fit.sigma()).expect("valid");
        let (o1, _) = score(&s, &off);
        assert!(o1.abs() > 1e-3);
    }

    #[test]
    fn newton_converges_on_easy_sample() {
        let s = sample(&[-8.0, -5.0, -3.0, -1.0, 2.0, 7.0, 10.0]);
        let start = crate::iterate::starting_point(&s);
        let outcome = newton_raphson_baseline(&s, &start, 200);
        match outcome {
            NewtonOutcome::Converged { point, .. } => {
                assert!((point.mu() - -1.404).abs() < 1e-3);
                assert!((point.sigma() - 3.909).abs() < 1e-3);
            }
            NewtonOutcome::Diverged { reason, .. } => panic!("unexpected divergence: {reason}"),
        }
    }

    #[test]
    fn newton_diverges_on_singular_sample() {
        let s = sample(&[-10065.0, -8678.0, -6.0, 0.0]);
        let start = crate::iterate::starting_point(&s);
        assert!(!newton_raphson_baseline(&s, &start, 200).converged());
    }

    #[test]
    fn newton_quadratic_near_optimum() {
        let s = sample(&[-8.0, -5.0, -3.0, -1.0, 2.0, 7.0, 10.0]);
        let (fit, _) = fit_iterative(&s, None, 1e-14, 1_000_000).expect("fit");
        let start =
            UpperHalfPoint::new(fit.mu() + 1e-3, fit.sigma() - 1e-3).expect("valid");
        match newton_raphson_baseline(&s, &start, 50) {
            NewtonOutcome::Converged { point, iterations } => {
                assert!(iterations <= 6, "took {iterations} iterations");
                assert!((point.theta() - fit.theta()).norm() < 1e-9);
            }
            NewtonOutcome::Diverged { reason, .. } => panic!("unexpected divergence: {reason}"),
        }
    }

    #[test]
    fn sampler_is_deterministic_and_centered() {
        let t = UpperHalfPoint::new(2.0, 0.5).expect("valid");
        assert_eq!(cauchy_quantile(&t, 0.5), 2.0);
        let a = cauchy_draws(&t, 100, 42);
        let b = cauchy_draws(&t, 100, 42);
        assert_eq!(a, b);
        let c = cauchy_draws(&t, 100, 43);
        assert_ne!(a, c);

        let big = sample_cauchy(&t, 100_000, 7).expect("valid sample");
        let median = big.values()[big.n() / 2];
        assert!((median - t.mu()).abs() < 0.05 * t.sigma());
    }
}
