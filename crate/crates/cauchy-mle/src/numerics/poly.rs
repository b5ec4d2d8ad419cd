//! Dense univariate polynomials with exact big-rational coefficients.
//!
//! Coefficients are stored ascending (index = degree of the term) and the
//! leading entry is always nonzero; the zero polynomial has an empty vector.
//! These polynomials carry the sample polynomial h, its derivative, and the
//! exactly constructed numerators and denominators of the fixed-point map.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    /// Builds a polynomial from ascending coefficients, trimming leading zeros.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial c * x^k.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// x - r, the linear factor with root r.
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Ascending coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut v = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            v = v * x + c;
        }
        v
    }

    /// Exact Horner evaluation at the complex point re + i*im.
    pub fn eval_complex(&self, re: &BigRational, im: &BigRational) -> (BigRational, BigRational) {
        let mut vr = BigRational::zero();
        let mut vi = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            let nr = &vr * re - &vi * im + c;
            let ni = vr * im + vi * re;
            vr = nr;
            vi = ni;
        }
        (vr, vi)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
            .collect();
        Self::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by x^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division: self = q * divisor + r with deg r < deg divisor.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolyDivision)?;
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![
            BigRational::zero();
            self.coeffs.len().saturating_sub(dd).max(1)
        ];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = &rem[k] / &lead;
            if !c.is_zero() {
                quo[k - dd] = c.clone();
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    let idx = k - dd + j;
                    let t = &c * b;
                    rem[idx] -= t;
                }
            }
            rem.pop();
        }
        Ok((Self::new(quo), Self::new(rem)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divrem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// Clears denominators and removes the integer content: the primitive
    /// integer image, a positive-content scalar multiple of self.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        ints.iter().map(|c| c / &content).collect()
    }

    /// Primitive integer coefficients normalized to a positive leading
    /// coefficient: the canonical representative up to positive scalars.
    pub fn primitive_normalized(&self) -> Self {
        let mut ints = self.primitive_integer();
        if ints.last().is_some_and(|c| c.is_negative()) {
            for c in &mut ints {
                *c = -c.clone();
            }
        }
        Self::new(ints.into_iter().map(BigRational::from_integer).collect())
    }

    /// True when self and other differ only by a nonzero rational scalar,
    /// checked exactly by cross-multiplication of coefficients.
    pub fn proportional_to(&self, other: &Self) -> bool {
        if self.degree() != other.degree() {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        let a_lead = self.leading().expect("nonzero");
        let b_lead = other.leading().expect("nonzero");
        for k in 0..self.coeffs.len() {
            if &self.coeff(k) * b_lead != &other.coeff(k) * a_lead {
                return false;
            }
        }
        true
    }

    /// Round-to-nearest float image of the coefficients, ascending.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

/// Greatest common divisor over Q[x], returned primitive with a positive
/// leading coefficient. A degree-0 result is normalized to 1.
///
/// The heavy lifting runs over the integers with the subresultant PRS, which
/// bounds coefficient growth without per-step content extraction. Because the
/// dominant caller (the R_n pipeline) almost always hands in coprime pairs, a
/// sound modular filter runs first: if the inputs are already coprime mod a
/// fixed 61-bit prime, the rational gcd is constant and the PRS is skipped
/// (a nonconstant gcd always survives reduction at a prime that keeps the
/// leading coefficients alive).
pub fn poly_gcd(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
    if a.is_zero() {
        return b.primitive_normalized();
    }
    if b.is_zero() {
        return a.primitive_normalized();
    }
    let pa = a.primitive_integer();
    let pb = b.primitive_integer();
    if modular_coprime(&pa, &pb) {
        return RationalPoly::one();
    }
    subresultant_gcd(pa, pb)
}

fn subresultant_gcd(pa: Vec<BigInt>, pb: Vec<BigInt>) -> RationalPoly {
    let (mut p, mut q) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (p.len() - 1) - (q.len() - 1);
        let r = pseudo_rem(&p, &q);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return RationalPoly::one();
        }
        p = q;
        let divisor = &g * pow_bigint(&h, delta as u32);
        q = r.iter().map(|c| c / &divisor).collect();
        g = p.last().expect("nonzero").clone();
        h = if delta == 0 {
            h
        } else {
            pow_bigint(&g, delta as u32) / pow_bigint(&h, (delta - 1) as u32)
        };
    }
    let poly = RationalPoly::new(q.into_iter().map(BigRational::from_integer).collect());
    poly.primitive_normalized()
}

/// Pseudo-remainder: lc(q)^(deg p - deg q + 1) * p  mod  q, all integer.
fn pseudo_rem(p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let dq = q.len() - 1;
    let lq = q.last().expect("nonzero divisor");
    let mut r: Vec<BigInt> = p.to_vec();
    let mut e = (p.len() - 1) as i64 - dq as i64 + 1;
    while r.len() > dq {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - 1 - dq;
        for c in r.iter_mut() {
            *c *= lq;
        }
        for (j, b) in q.iter().enumerate() {
            r[shift + j] -= &lr * b;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        e -= 1;
        if r.is_empty() {
            break;
        }
    }
    if e > 0 && !r.is_empty() {
        let f = pow_bigint(lq, e as u32);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

fn pow_bigint(b: &BigInt, e: u32) -> BigInt {
    b.pow(e)
}

/// Sound coprimality certificate: gcd(p mod m, q mod m) constant over F_m
/// implies gcd(p, q) constant over Q, provided neither leading coefficient
/// vanishes mod m. Returns false (inconclusive) in every doubtful case.
fn modular_coprime(p: &[BigInt], q: &[BigInt]) -> bool {
    const PRIMES: [u64; 2] = [(1 << 61) - 1, (1 << 31) - 1];
    for &m in &PRIMES {
        let pm = reduce_mod(p, m);
        let qm = reduce_mod(q, m);
        if pm.len() != p.len() || qm.len() != q.len() {
            continue; // a leading coefficient died mod m
        }
        return gcd_mod(pm, qm, m).len() == 1;
    }
    false
}

fn reduce_mod(p: &[BigInt], m: u64) -> Vec<u64> {
    let bm = BigInt::from(m);
    let mut out: Vec<u64> = p
        .iter()
        .map(|c| {
            let r = ((c % &bm) + &bm) % &bm;
            r.to_u64().expect("residue fits u64")
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> Vec<u64> {
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % m as u128) as u64;
    let powm = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        acc
    };
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lb = *b.last().expect("nonempty");
        let inv = powm(lb, m - 2);
        let db = b.len() - 1;
        while a.len() > db {
            let la = *a.last().expect("nonempty");
            if la != 0 {
                let c = mulm(la, inv);
                let shift = a.len() - 1 - db;
                for (j, &bc) in b.iter().enumerate() {
                    let t = mulm(c, bc);
                    let idx = shift + j;
                    a[idx] = (a[idx] + m - t) % m;
                }
            }
            a.pop();
            while a.last() == Some(&0) {
                a.pop();
            }
            if a.len() <= db {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

/// Composes two rational functions: (numer/denom) evaluated at
/// (arg_numer/arg_denom). Returns the unreduced pair (A, B) with the
/// composition equal to A/B:
///   A = (sum_k numer_k * N^k * D^(df-k)) * D^dd,
///   B = (sum_k denom_k * N^k * D^(dd-k)) * D^df,
/// where df = deg numer, dd = deg denom, N/D the argument.
pub fn compose_rational(
    numer: &RationalPoly,
    denom: &RationalPoly,
    arg_numer: &RationalPoly,
    arg_denom: &RationalPoly,
) -> Result<(RationalPoly, RationalPoly)> {
    if arg_denom.is_zero() {
        return Err(Error::ZeroPolyDivision);
    }
    let df = numer.degree().unwrap_or(0);
    let dd = denom.degree().unwrap_or(0);
    let top = df.max(dd);
    let n_pows = powers(arg_numer, top);
    let d_pows = powers(arg_denom, top);
    let lift = |p: &RationalPoly, d: usize| {
        let mut acc = RationalPoly::zero();
        for k in 0..=d {
            let c = p.coeff(k);
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&n_pows[k].mul(&d_pows[d - k]).scale(&c));
        }
        acc
    };
    let a = lift(numer, df).mul(&d_pows[dd]);
    let b = lift(denom, dd).mul(&d_pows[df]);
    Ok((a, b))
}

fn powers(p: &RationalPoly, top: usize) -> Vec<RationalPoly> {
    let mut pows = Vec::with_capacity(top + 1);
    pows.push(RationalPoly::one());
    for _ in 0..top {
        let next = pows.last().expect("nonempty").mul(p);
        pows.push(next);
    }
    pows
}

/// Parses an exact rational from a decimal string ("-1.4", "0.06", "2e3")
/// or a fraction "p/q". Decimals convert exactly (0.06 -> 3/50).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let err = || Error::ParseValue { text: t.to_string() };
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| err())?;
        let den: BigInt = q.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(err());
    }
    let num: BigInt = digits.parse().map_err(|_| err())?;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::new(num, ten.pow(scale as u32))
    } else {
        BigRational::from_integer(num * ten.pow((-scale) as u32))
    })
}
