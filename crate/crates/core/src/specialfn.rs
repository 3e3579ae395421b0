//! Error-bounded special functions.
//!
//! Every kernel returns an [`ErrBoundedReal`]: a high-precision value together
//! with an absolute error bound kept in double precision and rounded upward.
//! `log_gamma`, `zeta` and `bessel_j` delegate to MPFR, which rounds correctly,
//! so their bound is one ulp. The smoothing kernel `V` is evaluated here.

use std::fmt;

use num_complex::Complex64;
use rug::float::{Constant, Round};
use rug::Float;

use crate::error::{Error, Result};

/// Multiplies by `1 + 2^-50` so that bounds computed in `f64` stay upper bounds.
fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + f64::EPSILON * 4.0) + f64::MIN_POSITIVE
    }
}

fn abs_f64_up(x: &Float) -> f64 {
    let a = Float::with_val(x.prec(), x.abs_ref());
    a.to_f64_round(Round::Up)
}

/// Rounding error committed when storing `x` at its own precision.
fn half_ulp(x: &Float) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let mut m = Float::with_val(64, x.abs_ref());
    m >>= x.prec();
    m.to_f64_round(Round::Up)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrBoundedReal {
    pub value: Float,
    pub err: f64,
}

impl ErrBoundedReal {
    pub fn new(value: Float, err: f64) -> Self {
        assert!(err >= 0.0 && !err.is_nan(), "error bounds are nonnegative");
        ErrBoundedReal { value, err }
    }

    pub fn exact(value: Float) -> Self {
        ErrBoundedReal { value, err: 0.0 }
    }

    pub fn from_f64(prec: u32, x: f64, err: f64) -> Self {
        Self::new(Float::with_val(prec, x), err)
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Float::with_val(prec, 1))
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn lower(&self) -> f64 {
        self.value.to_f64_round(Round::Down) - up(self.err)
    }

    pub fn upper(&self) -> f64 {
        self.value.to_f64_round(Round::Up) + up(self.err)
    }

    /// Whether `x` lies within the error bound of the value.
    pub fn contains(&self, x: &Float) -> bool {
        let d = Float::with_val(self.prec().max(x.prec()), &self.value - x);
        abs_f64_up(&d) <= up(self.err)
    }

    fn finish(value: Float, err: f64) -> Self {
        let e = up(err + half_ulp(&value));
        ErrBoundedReal { value, err: e }
    }

    pub fn add(&self, other: &Self) -> Self {
        let v = Float::with_val(self.prec(), &self.value + &other.value);
        Self::finish(v, self.err + other.err)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let v = Float::with_val(self.prec(), &self.value - &other.value);
        Self::finish(v, self.err + other.err)
    }

    pub fn neg(&self) -> Self {
        ErrBoundedReal { value: Float::with_val(self.prec(), -&self.value), err: self.err }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let v = Float::with_val(self.prec(), &self.value * &other.value);
        let e = abs_f64_up(&self.value) * other.err
            + abs_f64_up(&other.value) * self.err
            + self.err * other.err;
        Self::finish(v, e)
    }

    /// Multiplication by an exactly known factor.
    pub fn scale(&self, factor: &Float) -> Self {
        let v = Float::with_val(self.prec(), &self.value * factor);
        Self::finish(v, self.err * abs_f64_up(factor))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let lo = abs_f64_up(&other.value) - up(other.err);
        if lo <= 0.0 || other.value.is_zero() {
            return Err(Error::Domain("division by an interval containing zero".into()));
        }
        let v = Float::with_val(self.prec(), &self.value / &other.value);
        // |a/b - (a+da)/(b+db)| <= (da + |a/b| db) / (|b| - db)
        let e = (self.err + abs_f64_up(&v) * other.err) / (lo * (1.0 - 4.0 * f64::EPSILON));
        Ok(Self::finish(v, e))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.prec());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn abs(&self) -> Self {
        ErrBoundedReal { value: Float::with_val(self.prec(), self.value.abs_ref()), err: self.err }
    }

    /// Adds an extra amount to the error bound (truncation tails and the like).
    pub fn widen(mut self, extra: f64) -> Self {
        self.err = up(self.err + extra);
        self
    }
}

impl fmt::Display for ErrBoundedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {:.3e}", self.value.to_string_radix(10, Some(30)), self.err)
    }
}

fn one_ulp(v: &Float) -> f64 {
    2.0 * half_ulp(v) + f64::MIN_POSITIVE
}

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: &Float, prec: u32) -> Result<ErrBoundedReal> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    let v = Float::with_val(prec, x.ln_gamma_ref());
    let e = one_ulp(&v);
    Ok(ErrBoundedReal::new(v, e))
}

/// Riemann zeta at real `s > 1`.
pub fn zeta(s: &Float, prec: u32) -> Result<ErrBoundedReal> {
    if !(s.is_finite() && *s > 1) {
        return Err(Error::Domain(format!("zeta needs s > 1, got {s}")));
    }
    let v = Float::with_val(prec, s.zeta_ref());
    let e = one_ulp(&v);
    Ok(ErrBoundedReal::new(v, e))
}

/// Bessel function `J_nu(x)` of integer order `nu >= 1` and `x > 0`.
pub fn bessel_j(nu: u32, x: &Float, prec: u32) -> Result<ErrBoundedReal> {
    if nu < 1 || !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("bessel_j needs nu >= 1 and x > 0, got nu={nu}, x={x}")));
    }
    let v = Float::with_val(prec, x.jn_ref(nu as i32));
    let e = one_ulp(&v);
    Ok(ErrBoundedReal::new(v, e))
}

/// The leading-term bound `(x/2)^nu / nu!` on `|J_nu(x)|`.
pub fn bessel_leading_bound(nu: u32, x: f64) -> f64 {
    let mut lg = nu as f64 * (x / 2.0).ln();
    for j in 2..=nu {
        lg -= (j as f64).ln();
    }
    lg.exp()
}

/// `e^{-y} y^a / Gamma(a)` at working precision.
fn gamma_prefactor(a: &Float, y: &Float, wp: u32) -> Float {
    let lg = Float::with_val(wp, a.ln_gamma_ref());
    let mut t = Float::with_val(wp, y.ln_ref());
    t *= a;
    t -= y;
    t -= lg;
    t.exp()
}

/// Regularized upper incomplete gamma `Q(a, y) = Gamma(a, y) / Gamma(a)`.
///
/// The power series for `P = 1 - Q` is used below `y = a + 1` and the
/// Legendre continued fraction above it. Both run at `prec + 32` bits; the
/// series tail is bounded by a geometric majorant and the fraction is iterated
/// to relative convergence `2^{-(prec+32)}`.
pub fn gamma_q(a: &Float, y: &Float, prec: u32) -> Result<ErrBoundedReal> {
    if !(a.is_finite() && *a > 0) {
        return Err(Error::Domain(format!("gamma_q needs a > 0, got {a}")));
    }
    if !(y.is_finite() && *y >= 0) {
        return Err(Error::Domain(format!("gamma_q needs y >= 0, got {y}")));
    }
    let wp = prec + 32;
    if y.is_zero() {
        return Ok(ErrBoundedReal::one(prec));
    }
    let a1 = Float::with_val(wp, a + 1u32);
    let eps = Float::with_val(64, 1) >> wp;
    if *y < a1 {
        // P(a, y) = e^{-y} y^a / Gamma(a + 1) * sum_n y^n / ((a+1)..(a+n))
        let pre = gamma_prefactor(&a1, y, wp) / y;
        let mut term = Float::with_val(wp, 1);
        let mut sum = Float::with_val(wp, 1);
        let mut n = 1u32;
        loop {
            let denom = Float::with_val(wp, a + n);
            term *= y;
            term /= &denom;
            sum += &term;
            let ratio = Float::with_val(64, y / Float::with_val(64, &denom + 1u32));
            if ratio < 0.5 {
                // remaining terms are below term * r / (1 - r) <= term
                let t = Float::with_val(64, term.abs_ref());
                if t <= Float::with_val(64, &sum * &eps) {
                    let tail = t.to_f64_round(Round::Up);
                    let p = Float::with_val(wp, &pre * &sum);
                    let tail_p = tail * pre.to_f64_round(Round::Up);
                    let q = Float::with_val(prec, 1 - p);
                    let err = tail_p + 64.0 * half_ulp(&Float::with_val(wp, 1));
                    return Ok(ErrBoundedReal::new(q, up(err + half_ulp_at(prec))));
                }
            }
            n += 1;
            if n > 1_000_000 {
                return Err(Error::Convergence("incomplete gamma series".into()));
            }
        }
    }
    // modified Lentz on 1/(y+1-a- 1(1-a)/(y+3-a- 2(2-a)/(y+5-a- ...)))
    let tiny = Float::with_val(wp, 1) >> (4 * wp);
    let mut b = Float::with_val(wp, y + 1u32);
    b -= a;
    let mut c = Float::with_val(wp, 1) / &tiny;
    let mut d = Float::with_val(wp, 1) / &b;
    let mut h = d.clone();
    let mut i = 1u32;
    loop {
        let an = Float::with_val(wp, a - i) * i;
        b += 2u32;
        d = Float::with_val(wp, &an * &d) + &b;
        if d.is_zero() {
            d = tiny.clone();
        }
        c = Float::with_val(wp, &an / &c) + &b;
        if c.is_zero() {
            c = tiny.clone();
        }
        d = d.recip();
        let del = Float::with_val(wp, &d * &c);
        h *= &del;
        let dev = Float::with_val(64, &del - 1u32).abs();
        if dev <= eps {
            break;
        }
        i += 1;
        if i > 1_000_000 {
            return Err(Error::Convergence("incomplete gamma continued fraction".into()));
        }
    }
    let pre = gamma_prefactor(a, y, wp);
    let q = Float::with_val(prec, &pre * &h);
    let rel = 64.0 * i as f64 * eps.to_f64();
    let err = abs_f64_up(&q) * rel;
    Ok(ErrBoundedReal::new(q.clone(), up(err + half_ulp(&q))))
}

fn half_ulp_at(prec: u32) -> f64 {
    (Float::with_val(64, 1) >> prec).to_f64_round(Round::Up)
}

/// The smoothing function of the approximate functional equation at the
/// centre: `V(x) = Q(k/2, 2 pi x)`.
pub fn v_kernel(x: &Float, k: u32, prec: u32) -> Result<ErrBoundedReal> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::Domain(format!("V needs x > 0, got {x}")));
    }
    if k < 2 || k % 2 == 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    let wp = prec + 32;
    let a = Float::with_val(wp, k / 2);
    let mut y = Float::with_val(wp, Constant::Pi) * x;
    y *= 2u32;
    gamma_q(&a, &y, prec)
}

const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `log Gamma(z)` in double precision for `Re z > 0`, on the branch that is
/// continuous along vertical lines. Used for contour integrals.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pw = inv;
    for c in STIRLING {
        series += pw * c;
        pw *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}
