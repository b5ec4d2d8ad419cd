//! Aberth-Ehrlich simultaneous root refinement for complex polynomials.
//!
//! Deterministic by construction: initial guesses sit on the Cauchy-bound
//! circle with a fixed angular offset, no randomness anywhere, so repeated
//! runs return bit-identical roots.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::cpoly::ComplexPoly;

pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Finds all deg p roots of p.
///
/// A root is accepted once its Aberth update is below tol relative to the
/// root's magnitude, or once |p(root)| is within a few ulps of the noise
/// floor Σ|a_k||root|^k · ε (backward error: the root is exact for a
/// polynomial within rounding distance of p). Each accepted root gets a few
/// plain Newton steps at the end. Errors if any root is still moving after
/// max_iter full sweeps.
pub fn aberth_roots(p: &ComplexPoly, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let deg = p.degree().expect("aberth_roots needs a nonzero polynomial");
    assert!(deg >= 1, "aberth_roots needs degree >= 1");
    let p = p.normalized();
    let dp = p.derivative();
    let coeffs = p.coeffs();
    let lead = coeffs[deg].norm();

    // Cauchy bound: every root lies inside |z| <= 1 + max|a_k/a_n|.
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    let mut frozen = vec![false; deg];
    let eps = f64::EPSILON;

    let mut converged = false;
    for _ in 0..max_iter {
        let mut moved = false;
        for i in 0..deg {
            if frozen[i] {
                continue;
            }
            let z = roots[i];
            let (pv, scale) = p.eval_with_scale(z);
            if !pv.is_finite() || !scale.is_finite() {
                // far outside the representable range: walk inward
                roots[i] = z * 0.5;
                moved = true;
                continue;
            }
            if pv.norm() <= 4.0 * eps * scale {
                frozen[i] = true;
                continue;
            }
            let dv = dp.eval(z);
            let newton = pv / dv;
            let mut repel = Complex64::new(0.0, 0.0);
            for (j, &other) in roots.iter().enumerate() {
                if j != i {
                    repel += (z - other).finv();
                }
            }
            let w = newton / (Complex64::new(1.0, 0.0) - newton * repel);
            if !w.re.is_finite() || !w.im.is_finite() {
                // collision or overflow: contract toward the origin and retry
                roots[i] = z * 0.5;
                moved = true;
                continue;
            }
            roots[i] = z - w;
            if w.norm() <= tol * roots[i].norm().max(1.0) {
                frozen[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            converged = true;
            break;
        }
    }
    if !converged && !frozen.iter().all(|&f| f) {
        return Err(Error::RootFinderStalled { max_iter });
    }

    for root in roots.iter_mut() {
        polish(&p, &dp, root);
    }
    Ok(roots)
}

/// A few Newton steps, kept only while they reduce |p|.
fn polish(p: &ComplexPoly, dp: &ComplexPoly, z: &mut Complex64) {
    let mut best = p.eval(*z).norm();
    for _ in 0..3 {
        let dv = dp.eval(*z);
        if dv.norm() == 0.0 {
            return;
        }
        let candidate = *z - p.eval(*z) / dv;
        if !candidate.re.is_finite() || !candidate.im.is_finite() {
            return;
        }
        let val = p.eval(candidate).norm();
        if val < best {
            *z = candidate;
            best = val;
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_by_arg(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).expect("finite"));
        v
    }

    #[test]
    fn quadratic_pm_i() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0]);
        let roots = sort_by_arg(aberth_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).expect("roots"));
        assert!((roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = ComplexPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let roots = aberth_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).expect("roots");
        for root in roots {
            assert!((root.powu(3) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn clustered_real_roots() {
        // (x-1)(x-1.0001)(x+2): close pair still separates
        let a = 1.0;
        let b = 1.0001;
        let c = -2.0;
        let p = ComplexPoly::from_real(&[
            -a * b * c,
            a * b + a * c + b * c,
            -(a + b + c),
            1.0,
        ]);
        let mut roots = aberth_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).expect("roots");
        roots.sort_by(|x, y| x.re.partial_cmp(&y.re).expect("finite"));
        assert!((roots[0].re - c).abs() < 1e-9);
        assert!((roots[1].re - a).abs() < 1e-7);
        assert!((roots[2].re - b).abs() < 1e-7);
    }
}
