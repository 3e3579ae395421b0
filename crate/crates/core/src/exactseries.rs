//! Exact truncated q-series.
//!
//! A [`QSeries`] stores `sum_{n <= nmax} c_n q^n` with exact rational
//! coefficients, kept as integer numerators over one common positive
//! denominator. Nothing in this module rounds.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Below this length products use schoolbook convolution; above it the
/// operands are packed into single integers (Kronecker substitution).
const KRONECKER_THRESHOLD: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    num: Vec<Integer>,
    den: Integer,
    weight: Option<Rational>,
}

impl QSeries {
    pub fn from_integers(coeffs: Vec<Integer>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series holds at least the constant term");
        QSeries { num: coeffs, den: Integer::from(1), weight: None }
    }

    pub fn from_rationals(coeffs: &[Rational]) -> Self {
        assert!(!coeffs.is_empty(), "a q-series holds at least the constant term");
        let mut den = Integer::from(1);
        for c in coeffs {
            den.lcm_mut(c.denom());
        }
        let num = coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
            .collect();
        QSeries { num, den, weight: None }
    }

    pub fn zero(nmax: usize) -> Self {
        Self::from_integers(vec![Integer::new(); nmax + 1])
    }

    pub fn one(nmax: usize) -> Self {
        let mut v = vec![Integer::new(); nmax + 1];
        v[0] = Integer::from(1);
        Self::from_integers(v)
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn weight(&self) -> Option<&Rational> {
        self.weight.as_ref()
    }

    pub fn nmax(&self) -> usize {
        self.num.len() - 1
    }

    /// Exact coefficient of `q^n`. Reading past the truncation order is an error.
    pub fn coeff(&self, n: usize) -> Result<Rational> {
        let c = self
            .num
            .get(n)
            .ok_or(Error::BeyondTruncation { index: n, nmax: self.nmax() })?;
        Ok(Rational::from((c.clone(), self.den.clone())))
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// Integer coefficients, available when the common denominator is one.
    pub fn integer_coeffs(&self) -> Option<&[Integer]> {
        self.is_integral().then_some(&self.num[..])
    }

    pub fn numerators(&self) -> &[Integer] {
        &self.num
    }

    pub fn denominator(&self) -> &Integer {
        &self.den
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::from((c.clone(), self.den.clone())))
            .collect()
    }

    pub fn truncate(&self, nmax: usize) -> QSeries {
        let nmax = nmax.min(self.nmax());
        let mut out = QSeries {
            num: self.num[..=nmax].to_vec(),
            den: self.den.clone(),
            weight: self.weight.clone(),
        };
        out.normalize();
        out
    }

    /// Order of vanishing at infinity within the truncation, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.num.iter().position(|c| *c != 0)
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, negate: bool) -> QSeries {
        let n = self.nmax().min(other.nmax());
        let den = Integer::from(self.den.lcm_ref(&other.den));
        let fa = Integer::from(&den / &self.den);
        let fb = Integer::from(&den / &other.den);
        let num = (0..=n)
            .map(|i| {
                let a = Integer::from(&self.num[i] * &fa);
                let b = Integer::from(&other.num[i] * &fb);
                if negate {
                    a - b
                } else {
                    a + b
                }
            })
            .collect();
        let weight = if self.weight == other.weight { self.weight.clone() } else { None };
        let mut out = QSeries { num, den, weight };
        out.normalize();
        out
    }

    pub fn scale(&self, factor: &Rational) -> QSeries {
        let num = self.num.iter().map(|c| Integer::from(c * factor.numer())).collect();
        let den = Integer::from(&self.den * factor.denom());
        let mut out = QSeries { num, den, weight: self.weight.clone() };
        out.normalize();
        out
    }

    pub fn scale_int(&self, factor: &Integer) -> QSeries {
        self.scale(&Rational::from(factor.clone()))
    }

    /// Product truncated at `min(self.nmax, other.nmax)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.nmax().min(other.nmax());
        let num = poly_mul_trunc(&self.num[..=n], &other.num[..=n], n + 1);
        let den = Integer::from(&self.den * &other.den);
        let weight = match (&self.weight, &other.weight) {
            (Some(a), Some(b)) => Some(Rational::from(a + b)),
            _ => None,
        };
        let mut out = QSeries { num, den, weight };
        out.normalize();
        out
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut result = QSeries::one(self.nmax());
        if let Some(w) = &self.weight {
            result.weight = Some(Rational::from(w * e));
        }
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplies by `q^shift`, dropping terms beyond the current truncation.
    pub fn shift(&self, shift: usize) -> QSeries {
        let n = self.nmax();
        let mut num = vec![Integer::new(); n + 1];
        for i in shift..=n {
            num[i] = self.num[i - shift].clone();
        }
        let mut out = QSeries { num, den: self.den.clone(), weight: self.weight.clone() };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den == 1 {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g == 1 {
                return;
            }
            g.gcd_mut(c);
        }
        if g != 1 {
            for c in &mut self.num {
                c.div_exact_mut(&g);
            }
            self.den.div_exact_mut(&g);
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in 0..=self.nmax() {
            let c = Rational::from((self.num[n].clone(), self.den.clone()));
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.nmax() + 1)
    }
}

/// Truncated product of two integer polynomials (low degree first).
pub fn poly_mul_trunc(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let la = a.len().min(len);
    let lb = b.len().min(len);
    if la == 0 || lb == 0 {
        return vec![Integer::new(); len];
    }
    if la.min(lb) < KRONECKER_THRESHOLD {
        return schoolbook(&a[..la], &b[..lb], len);
    }
    kronecker(&a[..la], &b[..lb], len)
}

fn schoolbook(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn max_bits(v: &[Integer]) -> u32 {
    v.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
}

fn kronecker(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let terms = a.len().min(b.len()) as u64;
    let log_terms = 64 - terms.leading_zeros();
    let slot = max_bits(a) + max_bits(b) + log_terms + 2;
    let pa = pack(a, slot);
    let pb = pack(b, slot);
    let prod = pa * pb;
    let count = len.min(a.len() + b.len() - 1);
    let mut out = unpack(prod, slot, count);
    out.resize(len, Integer::new());
    out
}

fn pack(v: &[Integer], slot: u32) -> Integer {
    if v.len() <= 8 {
        let mut acc = Integer::new();
        for c in v.iter().rev() {
            acc <<= slot;
            acc += c;
        }
        return acc;
    }
    let mid = v.len() / 2;
    let lo = pack(&v[..mid], slot);
    let hi = pack(&v[mid..], slot);
    (hi << (slot * mid as u32)) + lo
}

/// Inverse of [`pack`] for signed slots: every slot value lies in
/// `[-2^(slot-1), 2^(slot-1))`.
fn unpack(value: Integer, slot: u32, count: usize) -> Vec<Integer> {
    if count <= 8 {
        let mut out = Vec::with_capacity(count);
        let mut v = value;
        for _ in 0..count {
            let lo = centered_low_bits(&v, slot);
            v -= &lo;
            v >>= slot;
            out.push(lo);
        }
        return out;
    }
    let mid = count / 2;
    let bits = slot * mid as u32;
    let lo = centered_low_bits(&value, bits);
    let hi = (value - &lo) >> bits;
    let mut out = unpack(lo, slot, mid);
    out.extend(unpack(hi, slot, count - mid));
    out
}

fn centered_low_bits(v: &Integer, bits: u32) -> Integer {
    let mut r = Integer::from(v.keep_bits_ref(bits));
    if r.get_bit(bits - 1) {
        r -= Integer::from(1) << bits;
    }
    r
}

/// `sigma_r(n)` for `n = 0..=nmax` (entry 0 is zero).
pub fn divisor_sums(r: u32, nmax: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); nmax + 1];
    for d in 1..=nmax {
        let dr = Integer::from(d).pow(r);
        let mut m = d;
        while m <= nmax {
            out[m] += &dr;
            m += d;
        }
    }
    out
}

/// Level-one Eisenstein series `E_4` or `E_6`, normalized with constant term 1.
pub fn eisenstein(weight: u32, nmax: usize) -> Result<QSeries> {
    let (r, factor): (u32, i64) = match weight {
        4 => (3, 240),
        6 => (5, -504),
        other => return Err(Error::UnsupportedWeight(other as i64)),
    };
    let sigma = divisor_sums(r, nmax);
    let mut coeffs: Vec<Integer> = sigma.into_iter().map(|s| s * factor).collect();
    coeffs[0] = Integer::from(1);
    Ok(QSeries::from_integers(coeffs).with_weight(Rational::from(weight)))
}

/// Euler's product `prod_{n>=1} (1 - q^n)` from the pentagonal number theorem.
pub fn euler_product(nmax: usize) -> QSeries {
    let mut coeffs = vec![Integer::new(); nmax + 1];
    coeffs[0] = Integer::from(1);
    let mut j: i64 = 1;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let p1 = (j * (3 * j - 1) / 2) as usize;
        let p2 = (j * (3 * j + 1) / 2) as usize;
        if p1 > nmax {
            break;
        }
        coeffs[p1] += sign;
        if p2 <= nmax {
            coeffs[p2] += sign;
        }
        j += 1;
    }
    QSeries::from_integers(coeffs)
}

/// The discriminant form `Delta = q prod (1 - q^n)^24`.
pub fn delta(nmax: usize) -> Result<QSeries> {
    if nmax < 1 {
        return Err(Error::InsufficientPrecision { nmax, needed: 1 });
    }
    let eta = euler_product(nmax - 1);
    let p8 = eta.pow(8);
    let p24 = p8.mul(&p8).mul(&p8);
    let mut coeffs = vec![Integer::new(); nmax + 1];
    for (i, c) in p24.numerators().iter().enumerate() {
        coeffs[i + 1] = c.clone();
    }
    Ok(QSeries::from_integers(coeffs).with_weight(Rational::from(12)))
}

/// `dim S_k(SL_2(Z))` for even `k >= 0`; zero for odd `k`.
pub fn dim_cusp_forms(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

/// Exponents `(a, b, c)` with `E4^a E6^b Delta^c` spanning `S_k`, one per
/// `c = d, d-1, .., 1` in that order (`c` descending, then `a` descending).
pub fn basis_monomials(k: u32) -> Vec<(u32, u32, u32)> {
    let d = dim_cusp_forms(k) as u32;
    let mut out = Vec::with_capacity(d as usize);
    for c in (1..=d).rev() {
        let rest = k - 12 * c;
        let b = if rest % 4 == 0 { 0 } else { 1 };
        let a = (rest - 6 * b) / 4;
        out.push((a, b, c));
    }
    out
}

/// Victor Miller basis of `S_k(1)`: `f_j = q^j + O(q^{d+1})` for `j = 1..=d`.
pub fn victor_miller_basis(k: u32, nmax: usize) -> Result<Vec<QSeries>> {
    if k % 2 == 1 || k < 12 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if nmax < d {
        return Err(Error::InsufficientPrecision { nmax, needed: d });
    }
    let monomials = basis_monomials(k);
    let max_a = monomials.iter().map(|m| m.0).max().unwrap_or(0);
    let e4 = eisenstein(4, nmax)?;
    let e6 = eisenstein(6, nmax)?;
    let dl = delta(nmax)?;

    let mut e4_pows = vec![QSeries::one(nmax)];
    for a in 1..=max_a as usize {
        let next = e4_pows[a - 1].mul(&e4);
        e4_pows.push(next);
    }
    let mut delta_pows = vec![QSeries::one(nmax), dl.clone()];
    for c in 2..=d {
        let next = delta_pows[c - 1].mul(&dl);
        delta_pows.push(next);
    }

    // monomials are ordered c = d..1
    let mut basis: Vec<QSeries> = Vec::with_capacity(d);
    for &(a, b, c) in &monomials {
        let mut m = delta_pows[c as usize].mul(&e4_pows[a as usize]);
        if b == 1 {
            m = m.mul(&e6);
        }
        // clear coefficients of q^j, j > c, against the already reduced f_j
        for (idx, fj) in basis.iter().enumerate() {
            let j = d - idx;
            let cj = m.numerators()[j].clone();
            if cj != 0 {
                m = m.sub(&fj.scale_int(&cj));
            }
        }
        basis.push(m.with_weight(Rational::from(k)));
    }
    basis.reverse();
    Ok(basis)
}
