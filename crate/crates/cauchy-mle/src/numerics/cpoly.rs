//! Dense univariate polynomials over complex doubles.
//!
//! Float mirror of the exact side: the root finder and residual checks run
//! here after the exact construction is done. Coefficients ascending,
//! leading coefficient nonzero after construction.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            v = v * z + c;
        }
        v
    }

    /// Horner value together with the evaluation magnitude sum
    /// Σ |a_k| |z|^k, the natural backward-error scale at z.
    pub fn eval_with_scale(&self, z: Complex64) -> (Complex64, f64) {
        let az = z.norm();
        let mut v = Complex64::new(0.0, 0.0);
        let mut s = 0.0;
        for c in self.coeffs.iter().rev() {
            v = v * z + c;
            s = s * az + c.norm();
        }
        (v, s)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(Vec::new());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Rescales every coefficient by 1/max|a_k| so magnitudes are O(1).
    pub fn normalized(&self) -> Self {
        let m = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / m).collect())
    }
}
