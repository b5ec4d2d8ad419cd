//! Exact closed-form estimates for samples of size 3 and 4.
//!
//! For n = 3 the likelihood equation reduces to one quadratic; for n = 4
//! the quartic polynomial splits into three quadratic factors with a fixed
//! discriminant sign pattern, and the single factor with a negative
//! discriminant carries the estimate as its upper root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::model::{Sample, UpperHalfPoint};
use crate::numerics::RationalPoly;

fn require_n(s: &Sample, op: &'static str, n: usize, expected: &'static str) -> Result<()> {
    if s.n() != n {
        return Err(Error::WrongSampleSize {
            op,
            expected,
            got: s.n(),
        });
    }
    if s.has_duplicates() {
        return Err(Error::DuplicateValues { op });
    }
    Ok(())
}

/// Closed form for n = 3:
/// θ̂ = [(x₁+x₂)(x₂+x₃)(x₃+x₁) − 8x₁x₂x₃ + √3·|(x₂−x₁)(x₃−x₁)(x₃−x₂)|·i]
///   / [2(x₁²+x₂²+x₃²−x₁x₂−x₂x₃−x₃x₁)].
pub fn fit_n3(s: &Sample) -> Result<UpperHalfPoint> {
    let (mu, sigma_sq) = fit_n3_exact(s)?;
    let mu = mu.to_f64().expect("moderate magnitudes");
    let sigma = sigma_sq.to_f64().expect("moderate magnitudes").sqrt();
    UpperHalfPoint::new(mu, sigma)
}

/// Exact n = 3 estimate as (μ̂, σ̂²); σ̂ itself is irrational in general.
pub fn fit_n3_exact(s: &Sample) -> Result<(BigRational, BigRational)> {
    require_n(s, "fit_n3", 3, "3")?;
    let v = s.exact_or_dyadic();
    let (x1, x2, x3) = (&v[0], &v[1], &v[2]);
    let a = (x1 + x2) * (x2 + x3) * (x3 + x1)
        - BigRational::from_integer(BigInt::from(8)) * x1 * x2 * x3;
    let b = (x2 - x1) * (x3 - x1) * (x3 - x2);
    let c = BigRational::from_integer(BigInt::from(2))
        * (x1 * x1 + x2 * x2 + x3 * x3 - x1 * x2 - x2 * x3 - x3 * x1);
    let mu = &a / &c;
    // σ̂ = √3·|B|/C, so σ̂² = 3B²/C²
    let sigma_sq = BigRational::from_integer(BigInt::from(3)) * (&b * &b) / (&c * &c);
    Ok((mu, sigma_sq))
}

/// Closed form for n = 4 (sorted values):
/// μ̂ = (x₂x₄ − x₁x₃)/(x₄−x₃+x₂−x₁),
/// σ̂ = √((x₄−x₃)(x₃−x₂)(x₄−x₁)(x₂−x₁))/(x₄−x₃+x₂−x₁).
pub fn fit_n4(s: &Sample) -> Result<UpperHalfPoint> {
    let (mu, sigma_sq) = fit_n4_exact(s)?;
    let mu = mu.to_f64().expect("moderate magnitudes");
    let sigma = sigma_sq.to_f64().expect("moderate magnitudes").sqrt();
    UpperHalfPoint::new(mu, sigma)
}

/// Exact n = 4 estimate as (μ̂, σ̂²).
pub fn fit_n4_exact(s: &Sample) -> Result<(BigRational, BigRational)> {
    require_n(s, "fit_n4", 4, "4")?;
    let v = s.exact_or_dyadic();
    let (x1, x2, x3, x4) = (&v[0], &v[1], &v[2], &v[3]);
    let den = x4 - x3 + x2 - x1;
    let mu = (x2 * x4 - x1 * x3) / &den;
    let disc = (x4 - x3) * (x3 - x2) * (x4 - x1) * (x2 - x1);
    let sigma_sq = disc / (&den * &den);
    Ok((mu, sigma_sq))
}

/// One quadratic factor aζ² + bζ + c of the quartic likelihood polynomial,
/// kept both as floats and exactly.
#[derive(Debug, Clone)]
pub struct QuadraticFactor {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// b² − 4ac.
    pub discriminant: f64,
    exact: RationalPoly,
    exact_discriminant: BigRational,
}

impl QuadraticFactor {
    fn from_exact(a: BigRational, b: BigRational, c: BigRational) -> Self {
        let four = BigRational::from_integer(BigInt::from(4));
        let disc = &b * &b - four * &a * &c;
        QuadraticFactor {
            a: a.to_f64().expect("moderate"),
            b: b.to_f64().expect("moderate"),
            c: c.to_f64().expect("moderate"),
            discriminant: disc.to_f64().expect("moderate"),
            exact: RationalPoly::new(vec![c, b, a]),
            exact_discriminant: disc,
        }
    }

    /// The factor as an exact polynomial (ascending coefficients c, b, a).
    pub fn exact_poly(&self) -> &RationalPoly {
        &self.exact
    }

    pub fn exact_discriminant(&self) -> &BigRational {
        &self.exact_discriminant
    }

    /// The root with positive imaginary part; requires discriminant < 0.
    pub fn upper_root(&self) -> Complex64 {
        debug_assert!(self.discriminant < 0.0);
        // the ± branch that ends up in H depends on the sign of a
        let branch = self.a.signum();
        Complex64::new(-self.b, branch * (-self.discriminant).sqrt()) / (2.0 * self.a)
    }
}

/// The three quadratic factors of the n = 4 likelihood polynomial, in the
/// order with discriminant signs (+, −, +); the middle factor's upper root
/// is the estimate.
pub fn r4_factors(s: &Sample) -> Result<[QuadraticFactor; 3]> {
    require_n(s, "r4_factors", 4, "4")?;
    let v = s.exact_or_dyadic();
    let (x1, x2, x3, x4) = (&v[0], &v[1], &v[2], &v[3]);
    let two = BigRational::from_integer(BigInt::from(2));

    let f1 = QuadraticFactor::from_exact(
        x1 - x2 - x3 + x4,
        -(&two * (x1 * x4 - x2 * x3)),
        -(x1 * x2 * x3) + x1 * x2 * x4 + x1 * x3 * x4 - x2 * x3 * x4,
    );
    let f2 = QuadraticFactor::from_exact(
        x1 - x2 + x3 - x4,
        -(&two * (x1 * x3 - x2 * x4)),
        x1 * x2 * x3 - x1 * x2 * x4 + x1 * x3 * x4 - x2 * x3 * x4,
    );
    let f3 = QuadraticFactor::from_exact(
        x1 + x2 - x3 - x4,
        -(&two * (x1 * x2 - x3 * x4)),
        x1 * x2 * x3 + x1 * x2 * x4 - x1 * x3 * x4 - x2 * x3 * x4,
    );
    Ok([f1, f2, f3])
}

/// The quadratic that carries the n = 3 estimate:
/// (3s₂−s₁²)ζ² + (s₁s₂−9s₃)ζ + 3s₁s₃−s₂², built from the elementary
/// symmetric values of the sample.
pub fn r3_poly(s: &Sample) -> Result<RationalPoly> {
    require_n(s, "r3_poly", 3, "3")?;
    let sp = crate::model::SymmetricPolys::from_sample(s);
    let (s1, s2, s3) = (sp.get(1), sp.get(2), sp.get(3));
    let three = BigRational::from_integer(BigInt::from(3));
    let nine = BigRational::from_integer(BigInt::from(9));
    Ok(RationalPoly::new(vec![
        &three * s1 * s3 - s2 * s2,
        s1 * s2 - &nine * s3,
        &three * s2 - s1 * s1,
    ]))
}
