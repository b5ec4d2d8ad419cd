//! Exact construction of the likelihood polynomial R_n and root extraction.
//!
//! The fixed-point equation ζ = Q(ζ) clears to a single polynomial: with
//! q = U/V composed with itself to A/B, the numerator of ζ − Q(ζ) is
//! N = ζB − A. Removing gcd(N, B) and the factor h (every sample point is a
//! trivial solution) leaves R_n of degree at most n²−3n+2, whose unique
//! upper-half-plane root with vanishing likelihood residual is the MLE.
//! This is the route of last resort for samples where iteration crawls, and
//! the source of exportable exact coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::iterate::likelihood_residuals;
use crate::model::{build_h_exact, Sample, UpperHalfPoint};
use crate::numerics::{aberth_roots, poly_gcd, ComplexPoly, RationalPoly};

/// Residual bound for accepting a candidate root as the MLE.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

/// Builds R_n exactly from the sample values.
///
/// Pipeline: (1) U(ζ) = Σ_j x_j Π_{k≠j}(x_k−ζ) and V(ζ) = Σ_j Π_{k≠j}(x_k−ζ)
/// = −h′(ζ), so q = U/V; (2) compose q with itself, cancelling the common
/// V^(n−1) factor the generic composition would carry; (3) N = ζ·B − A;
/// (4) divide out gcd(N, B); (5) divide exactly by h; (6) normalize to
/// primitive, positive leading coefficient. The exact divisions must leave
/// zero remainder; anything else is a construction bug surfaced as an error.
pub fn build_rn(s: &Sample) -> Result<RationalPoly> {
    if s.has_duplicates() {
        return Err(Error::DuplicateValues { op: "build_rn" });
    }
    let values = s.exact_or_dyadic();
    let n = values.len();

    let h = build_h_exact(&values);
    let v_poly = h.derivative().neg();
    let mut u_poly = RationalPoly::zero();
    for (j, x) in values.iter().enumerate() {
        let rest: Vec<BigRational> = values
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, v)| v.clone())
            .collect();
        u_poly = u_poly.add(&build_h_exact(&rest).scale(x));
    }
    let (u_poly, v_poly) = normalize_pair(&u_poly, &v_poly);

    // lift f(U/V) with the fixed exponent M = n−1 for both numerator and
    // denominator, so their common V^(n−1) factor never materializes
    let m = n - 1;
    let u_pows = power_table(&u_poly, m);
    let v_pows = power_table(&v_poly, m);
    let lift = |f: &RationalPoly| {
        let mut acc = RationalPoly::zero();
        for k in 0..=m {
            let c = f.coeff(k);
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&u_pows[k].mul(&v_pows[m - k]).scale(&c));
        }
        acc
    };
    let a_hat = lift(&u_poly);
    let b_hat = lift(&v_poly);
    let (a_hat, b_hat) = normalize_pair(&a_hat, &b_hat);

    let numerator = b_hat.shift_up(1).sub(&a_hat);
    let bound = n * n - 2 * n + 2;
    debug_assert!(
        numerator.degree().unwrap_or(0) <= bound,
        "numerator degree exceeds n^2-2n+2"
    );

    let g = poly_gcd(&numerator, &b_hat);
    let p_n = numerator.div_exact(&g)?;
    let r_n = p_n.div_exact(&h)?;
    let r_n = r_n.primitive_normalized();
    debug_assert!(
        r_n.degree().unwrap_or(0) <= n * n - 3 * n + 2,
        "R_n degree exceeds n^2-3n+2"
    );
    Ok(r_n)
}

fn power_table(p: &RationalPoly, top: usize) -> Vec<RationalPoly> {
    let mut pows = Vec::with_capacity(top + 1);
    pows.push(RationalPoly::one());
    for _ in 0..top {
        let next = pows.last().expect("nonempty").mul(p);
        pows.push(next);
    }
    pows
}

/// Rescales two polynomials by one common rational so both become integer
/// with joint content 1. The quotient a/b is untouched; coefficient growth
/// between composition stages is not.
fn normalize_pair(a: &RationalPoly, b: &RationalPoly) -> (RationalPoly, RationalPoly) {
    let mut lcm = BigInt::one();
    for c in a.coeffs().iter().chain(b.coeffs()) {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    let mut content = BigInt::zero();
    let scaled = |p: &RationalPoly| -> Vec<BigInt> {
        p.coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect()
    };
    let ia = scaled(a);
    let ib = scaled(b);
    for c in ia.iter().chain(ib.iter()) {
        content = num_integer::Integer::gcd(&content, c);
    }
    if content.is_zero() {
        content = BigInt::one();
    }
    let rebuild = |ints: Vec<BigInt>| {
        RationalPoly::new(
            ints.into_iter()
                .map(|c| BigRational::from_integer(c / &content))
                .collect(),
        )
    };
    (rebuild(ia), rebuild(ib))
}

/// Result of the algebraic route.
#[derive(Debug, Clone)]
pub struct AlgebraicFit {
    /// R_n, primitive with positive leading coefficient.
    pub rn: RationalPoly,
    pub degree: usize,
    /// All roots found in the float image.
    pub roots: Vec<Complex64>,
    /// The accepted root, polished against the exact polynomial.
    pub chosen: UpperHalfPoint,
    /// Likelihood residual |Σ Mob(x_j)|/n at the accepted root.
    pub residual: f64,
}

/// Builds R_n, finds its roots, and selects the one root in H whose
/// likelihood residual is small. Selection is by residual, not by largest
/// imaginary part: R_n can carry spurious complex roots.
pub fn fit_algebraic(s: &Sample, tol: f64) -> Result<AlgebraicFit> {
    let rn = build_rn(s)?;
    let degree = rn.degree().unwrap_or(0);
    let coeffs = float_image(&rn);

    // rescale the variable by s = max_k (|a_k|/|a_deg|)^(1/(deg-k)): every
    // scaled coefficient is then bounded by the scaled leading one, so the
    // root finder's initial circle has radius at most 2 instead of blowing
    // up with the raw coefficient spread of huge samples
    let lead = coeffs.last().copied().unwrap_or(1.0).abs();
    let mut scale: f64 = 0.0;
    for (k, &c) in coeffs.iter().enumerate().take(degree) {
        if c != 0.0 {
            scale = scale.max((c.abs() / lead).powf(1.0 / (degree - k) as f64));
        }
    }
    let scale = if scale.is_finite() && scale > 0.0 {
        scale
    } else {
        1.0
    };
    // form a_k * s^k; direct products carry the least rounding, so use
    // them whenever they stay finite and switch to a log-space image
    // normalized by the largest term only when they would overflow
    let direct: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c * scale.powi(k as i32))
        .collect();
    let scaled: Vec<f64> = if direct.iter().all(|c| c.is_finite()) {
        direct
    } else {
        let log2s = scale.log2();
        let exponents: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if c == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    c.abs().log2() + k as f64 * log2s
                }
            })
            .collect();
        let emax = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        coeffs
            .iter()
            .zip(&exponents)
            .map(|(&c, &e)| {
                if c == 0.0 {
                    0.0
                } else {
                    c.signum() * (e - emax).exp2()
                }
            })
            .collect()
    };

    let poly = ComplexPoly::from_real(&scaled);
    let roots: Vec<Complex64> = aberth_roots(
        &poly,
        crate::numerics::DEFAULT_TOL,
        crate::numerics::DEFAULT_MAX_ITER,
    )?
    .into_iter()
    .map(|r| r * scale)
    .collect();

    let mut best: Option<(f64, Complex64)> = None;
    for &root in roots.iter().filter(|r| r.im > 0.0) {
        let point = UpperHalfPoint::from_complex(root)?;
        let residual = likelihood_residuals(s, &point).mean_image;
        if best.is_none_or(|(b, _)| residual < b) {
            best = Some((residual, root));
        }
    }
    let (mut residual, mut chosen) = best.ok_or(Error::NoAcceptableRoot {
        best_residual: f64::INFINITY,
    })?;

    // exact-arithmetic Newton polish against R_n itself
    let polished = newton_polish_exact(&rn, chosen);
    if polished.im > 0.0 {
        let point = UpperHalfPoint::from_complex(polished)?;
        let r = likelihood_residuals(s, &point).mean_image;
        if r <= residual {
            residual = r;
            chosen = polished;
        }
    }

    // the chosen root is also the attracting fixed point of the double
    // step, so composing it recovers digits that a nearly multiple root
    // of R_n blurs away; keep the best point seen
    let mut orbit = chosen;
    for _ in 0..64 {
        match crate::iterate::q_squared(s, orbit) {
            Ok(next) if next.is_finite() && next.im > 0.0 => {
                orbit = next;
                let r = likelihood_residuals(s, &UpperHalfPoint::from_complex(next)?).mean_image;
                if r < residual {
                    residual = r;
                    chosen = next;
                }
            }
            _ => break,
        }
        if residual <= f64::EPSILON {
            break;
        }
    }

    if residual > tol {
        return Err(Error::NoAcceptableRoot {
            best_residual: residual,
        });
    }
    Ok(AlgebraicFit {
        rn,
        degree,
        roots,
        chosen: UpperHalfPoint::from_complex(chosen)?,
        residual,
    })
}

/// Float image of an exact polynomial, pre-scaled by a power of two when
/// the integer coefficients would overflow doubles. Scalar multiples share
/// roots, so the shift is free.
fn float_image(p: &RationalPoly) -> Vec<f64> {
    let max_bits = p
        .coeffs()
        .iter()
        .map(|c| c.numer().bits().saturating_sub(c.denom().bits()))
        .max()
        .unwrap_or(0);
    if max_bits <= 960 {
        return p.to_f64_coeffs();
    }
    let shift = (max_bits - 960) as u32;
    let denom = BigInt::from(2).pow(shift);
    p.coeffs()
        .iter()
        .map(|c| {
            (c / BigRational::from_integer(denom.clone()))
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect()
}

/// A few Newton steps with f and f′ evaluated exactly at the dyadic point;
/// the correction quotient is formed exactly and only then rounded.
fn newton_polish_exact(p: &RationalPoly, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..8 {
        let (re, im) = match (BigRational::from_float(z.re), BigRational::from_float(z.im)) {
            (Some(re), Some(im)) => (re, im),
            _ => return z,
        };
        let (fr, fi) = p.eval_complex(&re, &im);
        let (gr, gi) = dp.eval_complex(&re, &im);
        let gnorm = &gr * &gr + &gi * &gi;
        if gnorm.is_zero() {
            return z;
        }
        let dr = (&fr * &gr + &fi * &gi) / &gnorm;
        let di = (&fi * &gr - &fr * &gi) / &gnorm;
        let step = Complex64::new(
            dr.to_f64().unwrap_or(0.0),
            di.to_f64().unwrap_or(0.0),
        );
        if !step.is_finite() {
            return z;
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Output format for exact coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    /// Space-separated integers, degree-descending.
    Integers,
    /// {"degree": d, "coefficients": ["…", …]} with degree-descending
    /// decimal strings (always exact; JSON numbers would not be).
    Json,
}

/// Prints the primitive integer coefficients of a fit's R_n.
pub fn emit_coefficients(fit: &AlgebraicFit, format: EmitFormat) -> String {
    emit_poly(&fit.rn, format)
}

/// Same emission for a bare polynomial (normalized first).
pub fn emit_poly(p: &RationalPoly, format: EmitFormat) -> String {
    let prim = p.primitive_normalized();
    let degree = prim.degree().unwrap_or(0);
    let descending: Vec<String> = (0..=degree)
        .rev()
        .map(|k| prim.coeff(k).numer().to_string())
        .collect();
    match format {
        EmitFormat::Integers => descending.join(" "),
        EmitFormat::Json => {
            let quoted: Vec<String> = descending.iter().map(|c| format!("\"{c}\"")).collect();
            format!(
                "{{\"degree\": {}, \"coefficients\": [{}]}}",
                degree,
                quoted.join(", ")
            )
        }
    }
}
