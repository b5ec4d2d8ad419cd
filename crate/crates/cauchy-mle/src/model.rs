//! The statistical model: Cauchy density, log-likelihood, CDF, the Möbius
//! disc maps, and the sample polynomial h with its symmetric-function
//! expansion. Everything downstream builds on these.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{parse_rational, ComplexPoly, RationalPoly};

/// A validated sample of observations, sorted ascending.
///
/// `exact` is present when the input was given exactly (parsed text or
/// rational construction); float construction keeps only the doubles.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    has_duplicates: bool,
}

impl Sample {
    pub const MIN_N: usize = 3;

    /// Validates and sorts float observations.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteObservation { index });
            }
        }
        if values.len() < Self::MIN_N {
            return Err(Error::TooFewObservations {
                min: Self::MIN_N,
                got: values.len(),
            });
        }
        let mut values = values;
        values.sort_by(f64::total_cmp);
        let distinct = count_distinct(&values);
        if distinct < 3 {
            return Err(Error::TooFewDistinct);
        }
        Ok(Sample {
            has_duplicates: distinct < values.len(),
            values,
            exact: None,
        })
    }

    /// Validates and sorts exact observations; the float view is the
    /// round-to-nearest image.
    pub fn from_rationals(values: Vec<BigRational>) -> Result<Self> {
        if values.len() < Self::MIN_N {
            return Err(Error::TooFewObservations {
                min: Self::MIN_N,
                got: values.len(),
            });
        }
        let mut exact = values;
        exact.sort();
        let mut distinct = 1;
        for pair in exact.windows(2) {
            if pair[0] != pair[1] {
                distinct += 1;
            }
        }
        if distinct < 3 {
            return Err(Error::TooFewDistinct);
        }
        let floats: Vec<f64> = exact
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect();
        for (index, v) in floats.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteObservation { index });
            }
        }
        Ok(Sample {
            has_duplicates: distinct < exact.len(),
            values: floats,
            exact: Some(exact),
        })
    }

    /// Parses whitespace- or comma-separated decimals and p/q fractions;
    /// `#` starts a comment that runs to end of line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split(|c: char| c.is_whitespace() || c == ',') {
                if !token.is_empty() {
                    values.push(parse_rational(token)?);
                }
            }
        }
        Self::from_rationals(values)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sorted observations.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact observations when the input carried them.
    pub fn exact_values(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Exact observations, falling back to the exact dyadic value of each
    /// double. The fallback is still an exact representation of the floats,
    /// so the algebraic path stays consistent with the float path.
    pub fn exact_or_dyadic(&self) -> Vec<BigRational> {
        match &self.exact {
            Some(exact) => exact.clone(),
            None => self
                .values
                .iter()
                .map(|&v| BigRational::from_float(v).expect("finite observation"))
                .collect(),
        }
    }

    /// True when some value repeats (at least 3 are still distinct).
    pub fn has_duplicates(&self) -> bool {
        self.has_duplicates
    }

    pub fn all_distinct(&self) -> bool {
        !self.has_duplicates
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

fn count_distinct(sorted: &[f64]) -> usize {
    let mut distinct = 1;
    for pair in sorted.windows(2) {
        if pair[0] != pair[1] {
            distinct += 1;
        }
    }
    distinct
}

/// The joint parameter θ = μ + iσ, constrained to the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    mu: f64,
    sigma: f64,
}

impl UpperHalfPoint {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || !mu.is_finite() || sigma <= 0.0 {
            return Err(Error::NonPositiveSigma { sigma });
        }
        Ok(UpperHalfPoint { mu, sigma })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn theta(&self) -> Complex64 {
        Complex64::new(self.mu, self.sigma)
    }

    pub fn theta_bar(&self) -> Complex64 {
        Complex64::new(self.mu, -self.sigma)
    }
}

/// Density (σ/π) / ((x−μ)² + σ²).
pub fn density(x: f64, theta: &UpperHalfPoint) -> f64 {
    let d = x - theta.mu();
    (theta.sigma() / std::f64::consts::PI) / (d * d + theta.sigma() * theta.sigma())
}

/// Log-likelihood Σ_j log density(x_j; θ).
pub fn log_likelihood(s: &Sample, theta: &UpperHalfPoint) -> f64 {
    let n = s.n() as f64;
    let base = theta.sigma().ln() - std::f64::consts::PI.ln();
    let sum: f64 = s
        .values()
        .iter()
        .map(|&x| {
            let d = x - theta.mu();
            (d * d + theta.sigma() * theta.sigma()).ln()
        })
        .sum();
    n * base - sum
}

/// CDF 1/2 + arctan((x−μ)/σ)/π, strictly inside (0, 1).
pub fn cdf(x: f64, theta: &UpperHalfPoint) -> f64 {
    0.5 + ((x - theta.mu()) / theta.sigma()).atan() / std::f64::consts::PI
}

/// The disc coordinate (ζ − θ)/(ζ − θ̄): upper half-plane to the open unit
/// disc, real axis to the unit circle. Pole at ζ = θ̄ (outside H ∪ ℝ).
pub fn mobius(theta: &UpperHalfPoint, zeta: Complex64) -> Complex64 {
    (zeta - theta.theta()) / (zeta - theta.theta_bar())
}

/// Inverse disc coordinate (θ − θ̄ w)/(1 − w). Pole at w = 1.
pub fn mobius_inverse(theta: &UpperHalfPoint, w: Complex64) -> Complex64 {
    (theta.theta() - theta.theta_bar() * w) / (Complex64::new(1.0, 0.0) - w)
}

/// Elementary symmetric polynomial values s_0 = 1, s_1, …, s_n of a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPolys {
    s: Vec<BigRational>,
}

impl SymmetricPolys {
    /// Multiply-one-root-at-a-time recurrence: exact and O(n²).
    pub fn from_values(values: &[BigRational]) -> Self {
        let mut s = vec![BigRational::zero(); values.len() + 1];
        s[0] = BigRational::one();
        for (m, x) in values.iter().enumerate() {
            for k in (1..=m + 1).rev() {
                let bump = &s[k - 1] * x;
                s[k] += bump;
            }
        }
        SymmetricPolys { s }
    }

    pub fn from_sample(s: &Sample) -> Self {
        Self::from_values(&s.exact_or_dyadic())
    }

    /// s_k, defined for 0 ≤ k ≤ n.
    pub fn get(&self, k: usize) -> &BigRational {
        &self.s[k]
    }

    pub fn all(&self) -> &[BigRational] {
        &self.s
    }

    /// Expansion h(θ) = Σ_{j=0}^n s_{n−j} (−θ)^j as a polynomial in θ.
    pub fn expand_h(&self) -> RationalPoly {
        let n = self.s.len() - 1;
        let coeffs = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 {
                    BigRational::one()
                } else {
                    -BigRational::one()
                };
                sign * &self.s[n - j]
            })
            .collect();
        RationalPoly::new(coeffs)
    }
}

/// The sample polynomial h(θ) = ∏_j (x_j − θ), exact and float views.
pub fn build_h(s: &Sample) -> (RationalPoly, ComplexPoly) {
    let exact = build_h_exact(&s.exact_or_dyadic());
    let float = ComplexPoly::from_real(&exact.to_f64_coeffs());
    (exact, float)
}

pub fn build_h_exact(values: &[BigRational]) -> RationalPoly {
    let mut h = RationalPoly::one();
    for x in values {
        // multiply by (x_j - θ)
        h = h.mul(&RationalPoly::new(vec![x.clone(), -BigRational::one()]));
    }
    h
}
