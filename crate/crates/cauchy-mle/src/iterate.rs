//! The convergent fixed-point solver.
//!
//! q maps the upper half-plane into the lower one and swaps back under
//! composition, so Q = q∘q maps H into itself and contracts the
//! pseudo-hyperbolic metric toward the unique maximum-likelihood estimate.
//! Iterating Q therefore converges from any starting point in H. The same
//! scheme runs on the unit disc for the wrapped (circular) model.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{mobius, Sample, UpperHalfPoint};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Pseudo-hyperbolic distance |(a−b)/(a−b̄)|: the metric the iteration
/// contracts. Strictly below 1 when both points are in H.
pub fn pseudo_hyperbolic(a: Complex64, b: Complex64) -> f64 {
    ((a - b) / (a - b.conj())).norm()
}

/// One application of q(z) = (Σ x_j/(x_j−z)) / (Σ 1/(x_j−z)).
///
/// The sum-quotient form never forms the product h(z), so samples with
/// magnitudes like 1e7 stay far from overflow. Maps H into the open lower
/// half-plane. Poles: z equal to a sample point, or a real z where the
/// denominator sum vanishes.
pub fn q_map(s: &Sample, z: Complex64) -> Result<Complex64> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for &x in s.values() {
        let d = Complex64::new(x, 0.0) - z;
        if d.norm() == 0.0 {
            return Err(Error::Pole { z });
        }
        let inv = d.finv();
        num += x * inv;
        den += inv;
    }
    if den.norm() == 0.0 || !den.is_finite() || !num.is_finite() {
        return Err(Error::Pole { z });
    }
    Ok(num / den)
}

/// Q(z) = q(q(z)): maps H into H; its unique fixed point is the MLE.
pub fn q_squared(s: &Sample, z: Complex64) -> Result<Complex64> {
    q_map(s, q_map(s, z)?)
}

/// Starting point: median + i·IQR, with quartiles by the linear
/// interpolation of order statistics h = (n−1)p + 1, j = ⌊h⌋,
/// Q_p = (1−g)x_(j) + g·x_(j+1).
pub fn starting_point(s: &Sample) -> UpperHalfPoint {
    starting_point_flagged(s).0
}

/// As `starting_point`; the flag reports the degenerate-IQR fallback
/// σ = (max−min)/2, taken when the central half of the sample is constant.
pub fn starting_point_flagged(s: &Sample) -> (UpperHalfPoint, bool) {
    let median = quantile_type7(s.values(), 0.5);
    let iqr = quantile_type7(s.values(), 0.75) - quantile_type7(s.values(), 0.25);
    if iqr > 0.0 {
        (
            UpperHalfPoint::new(median, iqr).expect("iqr positive"),
            false,
        )
    } else {
        let spread = (s.max() - s.min()) / 2.0;
        (
            UpperHalfPoint::new(median, spread).expect("at least 3 distinct values"),
            true,
        )
    }
}

fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let j = h.floor() as usize;
    let g = h - j as f64;
    if j + 1 >= n {
        sorted[n - 1]
    } else {
        (1.0 - g) * sorted[j] + g * sorted[j + 1]
    }
}

/// Everything the iteration did: the orbit z_0, z_1 = Q(z_0), …, both gap
/// sequences, and how it stopped.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// z_0 is the starting point; z_m = Q^m(z_0).
    pub iterates: Vec<Complex64>,
    /// d(z_m, z_{m+1}) in the pseudo-hyperbolic metric (the stopping rule).
    pub pseudo_hyperbolic_gaps: Vec<f64>,
    /// |z_{m+1} − z_m| for reporting alongside.
    pub euclidean_gaps: Vec<f64>,
    pub converged: bool,
    /// Number of Q applications performed.
    pub iterations: usize,
    /// True when the default start had to fall back to σ = (max−min)/2.
    pub start_fallback: bool,
}

/// Iterates Q from `start` (default: median + i·IQR) until the
/// pseudo-hyperbolic gap drops to tol or max_iter is reached.
///
/// Non-convergence is not an error: the trace records converged = false and
/// the last iterate is still the best available point, so callers can chain
/// to the algebraic solver. A pole hit restarts from a slightly perturbed
/// start, at most 3 times.
pub fn fit_iterative(
    s: &Sample,
    start: Option<UpperHalfPoint>,
    tol: f64,
    max_iter: usize,
) -> Result<(UpperHalfPoint, IterationTrace)> {
    let (default_start, start_fallback) = starting_point_flagged(s);
    let start_fallback = start.is_none() && start_fallback;
    let base = start.unwrap_or(default_start);
    let spread = (s.max() - s.min()).max(f64::MIN_POSITIVE);

    const MAX_RETRIES: usize = 3;
    for retry in 0..=MAX_RETRIES {
        // deterministic nudge on retry; untouched on the first attempt
        let bump = retry as f64 * 1e-3;
        let z0 = Complex64::new(base.mu() + bump * spread, base.sigma() * (1.0 + bump));
        match iterate_from(s, z0, tol, max_iter) {
            Ok((iterates, ph_gaps, eu_gaps, converged)) => {
                let last = *iterates.last().expect("nonempty orbit");
                let iterations = iterates.len() - 1;
                let trace = IterationTrace {
                    iterates,
                    pseudo_hyperbolic_gaps: ph_gaps,
                    euclidean_gaps: eu_gaps,
                    converged,
                    iterations,
                    start_fallback,
                };
                let point = UpperHalfPoint::from_complex(last)?;
                return Ok((point, trace));
            }
            Err(Error::Pole { .. }) if retry < MAX_RETRIES => continue,
            Err(Error::Pole { .. }) => {
                return Err(Error::PoleRetriesExhausted {
                    retries: MAX_RETRIES,
                })
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns on every branch")
}

type Orbit = (Vec<Complex64>, Vec<f64>, Vec<f64>, bool);

fn iterate_from(s: &Sample, z0: Complex64, tol: f64, max_iter: usize) -> Result<Orbit> {
    let mut iterates = vec![z0];
    let mut ph_gaps = Vec::new();
    let mut eu_gaps = Vec::new();
    let mut z = z0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = q_squared(s, z)?;
        let ph = pseudo_hyperbolic(z, next);
        ph_gaps.push(ph);
        eu_gaps.push((next - z).norm());
        iterates.push(next);
        z = next;
        if ph <= tol {
            converged = true;
            break;
        }
    }
    Ok((iterates, ph_gaps, eu_gaps, converged))
}

/// |q′(θ̂)| = (1/n)|Σ_j ((x_j − θ̄̂)/(x_j − θ̂))²|.
///
/// Strictly below 1 at the MLE; it is the square root of the local
/// contraction factor of Q, so values near 1 explain slow convergence.
pub fn contraction_check(s: &Sample, theta_hat: &UpperHalfPoint) -> f64 {
    let t = theta_hat.theta();
    let tb = theta_hat.theta_bar();
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in s.values() {
        let xz = Complex64::new(x, 0.0);
        let ratio = (xz - tb) / (xz - t);
        sum += ratio * ratio;
    }
    sum.norm() / s.n() as f64
}

/// How all forms of the likelihood equation fail at a point, each
/// normalized to be dimensionless and O(1e−15) at the true MLE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// |n + (θ−θ̄)·Σ 1/(x_j−θ)| / max(n, |(θ−θ̄)·Σ 1/(x_j−θ)|),
    /// the h′/h form of the equation, evaluated overflow-free.
    pub log_derivative: f64,
    /// |Σ Mob_θ(x_j)| / n: the disc-mean form.
    pub mean_image: f64,
    /// |Im Σ Mob_θ(x_j)| / n: the location component of the real system.
    pub score_mu: f64,
    /// |Re Σ Mob_θ(x_j)| / n: the scale component of the real system.
    pub score_sigma: f64,
}

/// Evaluates every equation-form residual at θ.
pub fn likelihood_residuals(s: &Sample, theta: &UpperHalfPoint) -> Residuals {
    let n = s.n() as f64;
    let mut mob_sum = Complex64::new(0.0, 0.0);
    let mut inv_sum = Complex64::new(0.0, 0.0);
    for &x in s.values() {
        let xz = Complex64::new(x, 0.0);
        mob_sum += mobius(theta, xz);
        inv_sum += (xz - theta.theta()).finv();
    }
    let spread = (theta.theta() - theta.theta_bar()) * inv_sum;
    let log_derivative_raw = Complex64::new(n, 0.0) + spread;
    Residuals {
        log_derivative: log_derivative_raw.norm() / spread.norm().max(n),
        mean_image: mob_sum.norm() / n,
        score_mu: mob_sum.im.abs() / n,
        score_sigma: mob_sum.re.abs() / n,
    }
}

/// Wrapped-model sample: angles in [0, 2π), at least 3 distinct.
#[derive(Debug, Clone)]
pub struct CircularSample {
    angles: Vec<f64>,
    has_duplicates: bool,
}

impl CircularSample {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        use std::f64::consts::TAU;
        for (index, a) in angles.iter().enumerate() {
            if !a.is_finite() || *a < 0.0 || *a >= TAU {
                return Err(Error::AngleOutOfRange { index });
            }
        }
        if angles.len() < 3 {
            return Err(Error::TooFewObservations {
                min: 3,
                got: angles.len(),
            });
        }
        let mut angles = angles;
        angles.sort_by(f64::total_cmp);
        let mut distinct = 1;
        for pair in angles.windows(2) {
            if pair[0] != pair[1] {
                distinct += 1;
            }
        }
        if distinct < 3 {
            return Err(Error::TooFewDistinct);
        }
        Ok(CircularSample {
            has_duplicates: distinct < angles.len(),
            angles,
        })
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn has_duplicates(&self) -> bool {
        self.has_duplicates
    }
}

/// Disc analogue of q: q̃(w) = (Σ e_j/(e_j−w)) / (Σ 1/(e_j−w)) with
/// e_j = exp(i·x_j). Maps the open disc to the exterior and back under
/// composition; q̃(∞) = mean(e_j) handles overflowing intermediates.
fn q_tilde(points: &[Complex64], mean: Complex64, w: Complex64) -> Complex64 {
    if !w.is_finite() {
        return mean;
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for &e in points {
        let d = e - w;
        let inv = d.finv();
        num += e * inv;
        den += inv;
    }
    let out = num / den;
    if out.is_finite() {
        out
    } else {
        mean
    }
}

/// One application of the composed disc step q̃∘q̃, the circular analogue
/// of the half-plane double step; ψ̂ is its fixed point.
pub fn circular_step(c: &CircularSample, w: Complex64) -> Complex64 {
    let points: Vec<Complex64> = c
        .angles()
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a))
        .collect();
    let mean = points.iter().sum::<Complex64>() / points.len() as f64;
    q_tilde(&points, mean, q_tilde(&points, mean, w))
}

/// Result of a wrapped-model fit.
#[derive(Debug, Clone)]
pub struct CircularFit {
    /// ψ̂, strictly inside the unit disc.
    pub psi: Complex64,
    /// Number of Q̃ applications performed.
    pub iterations: usize,
    /// Euclidean gaps |w_{m+1} − w_m|.
    pub gaps: Vec<f64>,
}

/// Fits the wrapped model by iterating Q̃ = q̃∘q̃ from w_0 = 0 until the
/// Euclidean gap is at most tol. Unlike the half-plane fit this errors on
/// non-convergence: there is no algebraic fallback on the disc.
pub fn fit_circular(c: &CircularSample, tol: f64, max_iter: usize) -> Result<Complex64> {
    fit_circular_traced(c, tol, max_iter).map(|fit| fit.psi)
}

pub fn fit_circular_traced(
    c: &CircularSample,
    tol: f64,
    max_iter: usize,
) -> Result<CircularFit> {
    let points: Vec<Complex64> = c
        .angles()
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a))
        .collect();
    let mean = points.iter().sum::<Complex64>() / points.len() as f64;
    let mut w = Complex64::new(0.0, 0.0);
    let mut gaps = Vec::new();
    for m in 1..=max_iter {
        let next = q_tilde(&points, mean, q_tilde(&points, mean, w));
        let gap = (next - w).norm();
        gaps.push(gap);
        w = next;
        if gap <= tol {
            return Ok(CircularFit {
                psi: w,
                iterations: m,
                gaps,
            });
        }
    }
    Err(Error::DidNotConverge { max_iter })
}

/// Perturbs every observation by at most epsilon (uniform, fixed internal
/// seed), refits, and returns the largest |θ̂_perturbed − θ̂| over 10 trials.
pub fn stability_probe(s: &Sample, epsilon: f64) -> Result<f64> {
    let (base, _) = fit_iterative(s, None, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f3759df);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let perturbed: Vec<f64> = s
            .values()
            .iter()
            .map(|&x| x + rng.random_range(-1.0..=1.0) * epsilon)
            .collect();
        let ps = Sample::new(perturbed)?;
        let (fit, _) = fit_iterative(&ps, None, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        worst = worst.max((fit.theta() - base.theta()).norm());
    }
    Ok(worst)
}
