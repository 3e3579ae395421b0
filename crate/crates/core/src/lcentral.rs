//! Central values of twisted L-functions, harmonic weights and moment sums.
//!
//! Central values use the approximate functional equation
//! `L(1/2, f x chi_D) = 2 sum_n lambda(n) chi_D(n) n^{-1/2} V(n/|D|)` with
//! `V(x) = Q(k/2, 2 pi x)`.
//!
//! The harmonic weight `omega(f)* = sum lambda(n^2)/n` is read as its analytic
//! value `L(1, sym^2 f) / zeta(2)`. The symmetric square of a level-one form
//! has conductor one, gamma factor `Gamma_R(s+1) Gamma_C(s+k-1)` and root
//! number one, so `L(1, sym^2 f)` has a rapidly convergent expansion whose
//! weights are contour integrals evaluated in double precision. Two different
//! test functions in the contour give two independent evaluations; their
//! difference is reported as the error.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::Float;

use crate::characters::KroneckerChar;
use crate::eigenforms::{eigenforms, lambda_squares_f64, HeckeEigenform};
use crate::error::{Error, Result};
use crate::exactseries::dim_cusp_forms;
use crate::petersson;
use crate::specialfn::{ln_gamma_complex, v_kernel, ErrBoundedReal};

#[derive(Clone, Debug, PartialEq)]
pub struct CentralValue {
    pub k: u32,
    pub eigen_index: usize,
    pub d: i64,
    pub value: ErrBoundedReal,
    pub cutoff: usize,
    pub cutoff_mult: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMethod {
    Series,
    TraceInverted,
}

impl WeightMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            WeightMethod::Series => "series",
            WeightMethod::TraceInverted => "trace-inverted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicWeight {
    pub k: u32,
    pub eigen_index: usize,
    pub omega_star: ErrBoundedReal,
    pub method: WeightMethod,
}

/// `ceil(cutoff_mult * k * |D|)`.
pub fn cutoff_for(k: u32, d: i64, cutoff_mult: f64) -> usize {
    (cutoff_mult * k as f64 * d.unsigned_abs() as f64).ceil() as usize
}

/// Values `V(n/|D|)` for `n = 1..=cutoff`, shared by every form of weight `k`.
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub k: u32,
    pub d: i64,
    pub cutoff: usize,
    pub cutoff_mult: f64,
    values: Vec<ErrBoundedReal>,
    tail: f64,
}

impl KernelTable {
    pub fn new(k: u32, d: i64, cutoff_mult: f64, prec: u32) -> Result<Self> {
        let chi = KroneckerChar::new(d)?;
        if !chi.parity_matches(k)? {
            return Err(Error::ParityMismatch { d, k });
        }
        let cutoff = cutoff_for(k, d, cutoff_mult);
        let q = chi.conductor();
        let values = (1..=cutoff)
            .map(|n| {
                let x = Float::with_val(prec + 32, n) / q;
                v_kernel(&x, k, prec)
            })
            .collect::<Result<Vec<_>>>()?;
        let tail = tail_bound(k, q, cutoff)?;
        Ok(KernelTable { k, d, cutoff, cutoff_mult, values, tail })
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

/// Bound on `2 sum_{n > cutoff} |lambda(n)| n^{-1/2} V(n/q)`.
///
/// Uses `|lambda(n)| <= d(n) <= 2 sqrt(n)` and `Gamma(a, y) <= 2 y^{a-1} e^{-y}`
/// for `y >= 2(a - 1)`; consecutive terms then shrink by at least `e^{-h/2}`,
/// `h = 2 pi / q`.
fn tail_bound(k: u32, q: u64, cutoff: usize) -> Result<f64> {
    let a = k as f64 / 2.0;
    let h = 2.0 * PI / q as f64;
    let y = h * (cutoff + 1) as f64;
    if y < 2.0 * (a - 1.0) {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} too small for a certified tail at weight {k}, |D| = {q}"
        )));
    }
    let lg = Float::with_val(64, a).ln_gamma().to_f64();
    let first = 2.0 * (a - 1.0) * y.ln() - y - lg;
    let first = 8.0 * first.exp();
    Ok(first / (1.0 - (-h / 2.0).exp()))
}

pub fn central_value_with(f: &HeckeEigenform, table: &KernelTable) -> Result<CentralValue> {
    if f.k != table.k {
        return Err(Error::UnsupportedWeight(f.k as i64));
    }
    if f.nmax() < table.cutoff {
        return Err(Error::InsufficientPrecision { nmax: f.nmax(), needed: table.cutoff });
    }
    let chi = KroneckerChar::new(table.d)?;
    let prec = f.prec_bits;
    let mut acc = ErrBoundedReal::zero(prec);
    for n in 1..=table.cutoff {
        let c = chi.eval(n as i64);
        if c == 0 {
            continue;
        }
        let inv_sqrt = Float::with_val(prec, n).sqrt().recip();
        let term = f.lambda[n - 1].mul(&table.values[n - 1]).scale(&inv_sqrt);
        acc = if c > 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    let value = acc.scale(&Float::with_val(prec, 2)).widen(table.tail);
    Ok(CentralValue {
        k: f.k,
        eigen_index: f.eigen_index,
        d: table.d,
        value,
        cutoff: table.cutoff,
        cutoff_mult: table.cutoff_mult,
    })
}

/// `L(1/2, f x chi_D)`; needs `f.nmax() >= ceil(cutoff_mult k |D|)`.
pub fn central_value(f: &HeckeEigenform, d: i64, cutoff_mult: f64) -> Result<CentralValue> {
    let table = KernelTable::new(f.k, d, cutoff_mult, f.prec_bits)?;
    central_value_with(f, &table)
}

/// Test functions `G(u)` for the symmetric-square expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
enum TestFn {
    One,
    Gauss,
}

impl TestFn {
    fn eval(self, u: Complex64) -> Complex64 {
        match self {
            TestFn::One => Complex64::new(1.0, 0.0),
            TestFn::Gauss => (u * u / 64.0).exp(),
        }
    }
}

const SYM2_ABSCISSA: f64 = 1.5;
const SYM2_STEP: f64 = 0.1;
const SYM2_HEIGHT: f64 = 80.0;
const SYM2_NEGLIGIBLE: f64 = 1e-15;

/// The two expansion weights `W_1(y)` and `W_0(y)` on a fixed set of nodes.
///
/// `L(1) = sum a(n)/n W_1(n) + sum a(n) W_0(n)` where
/// `W_1(y) = (1/2 pi i) int gamma(1+u)/gamma(1) y^{-u} G(u) du/u` and
/// `W_0(y) = (1/2 pi i) int gamma(u)/gamma(1) y^{-u} G(u) du/u`, with
/// `gamma(s) = pi^{-(s+1)/2} Gamma((s+1)/2) (2 pi)^{-s} Gamma(s+k-1)`.
struct Sym2Weights {
    nodes: Vec<(f64, Complex64, Complex64)>,
}

impl Sym2Weights {
    fn new(k: u32, g: TestFn) -> Self {
        let kf = k as f64;
        let lpi = PI.ln();
        let l2pi = (2.0 * PI).ln();
        let lg_k = ln_gamma_complex(Complex64::new(kf, 0.0));
        let steps = (SYM2_HEIGHT / SYM2_STEP) as usize;
        let nodes = (0..=steps)
            .map(|j| {
                let t = j as f64 * SYM2_STEP;
                let u = Complex64::new(SYM2_ABSCISSA, t);
                let l1 = -u / 2.0 * lpi + ln_gamma_complex(1.0 + u / 2.0) - u * l2pi
                    + ln_gamma_complex(kf + u)
                    - lg_k;
                let l0 = -(u - 1.0) / 2.0 * lpi + ln_gamma_complex((u + 1.0) / 2.0) - (u - 1.0) * l2pi
                    + ln_gamma_complex(kf - 1.0 + u)
                    - lg_k;
                let w = if j == 0 { 0.5 } else { 1.0 } * SYM2_STEP / PI;
                let gu = g.eval(u) / u * w;
                (t, l1.exp() * gu, l0.exp() * gu)
            })
            .collect();
        Sym2Weights { nodes }
    }

    fn at(&self, y: f64) -> (f64, f64) {
        let ly = y.ln();
        let scale = (-SYM2_ABSCISSA * ly).exp();
        let (mut w1, mut w0) = (0.0, 0.0);
        for &(t, a, b) in &self.nodes {
            let phase = Complex64::from_polar(scale, -t * ly);
            w1 += (a * phase).re;
            w0 += (b * phase).re;
        }
        (w1, w0)
    }
}

/// Number of terms needed in the symmetric-square expansion at weight `k`;
/// eigenforms must carry `lambda(p)` for all primes up to this bound.
///
/// Both weight functions decay like a Gaussian in `y/k` until they reach the
/// double-precision noise floor; the expansion stops once every weight has
/// dropped below `SYM2_NEGLIGIBLE`.
pub fn sym2_terms(k: u32) -> usize {
    let one = Sym2Weights::new(k, TestFn::One);
    let gauss = Sym2Weights::new(k, TestFn::Gauss);
    let mut n = (k as usize / 4).max(1);
    loop {
        let (a, b) = one.at(n as f64);
        let (c, d) = gauss.at(n as f64);
        if [a, b, c, d].iter().all(|w| w.abs() < SYM2_NEGLIGIBLE) {
            return n;
        }
        n += 1;
    }
}

fn sym2_l1(lambda: &[f64], k: u32, g: TestFn, terms: usize) -> Result<f64> {
    let b = lambda_squares_f64(lambda, terms)?;
    // coefficients of zeta(2s) sum lambda(n^2) n^{-s}
    let mut a = vec![0.0f64; terms + 1];
    let mut m = 1usize;
    while m * m <= terms {
        let mut j = 1usize;
        while j * m * m <= terms {
            a[j * m * m] += b[j];
            j += 1;
        }
        m += 1;
    }
    let w = Sym2Weights::new(k, g);
    let mut s = 0.0f64;
    for (n, an) in a.iter().enumerate().skip(1) {
        if *an == 0.0 {
            continue;
        }
        let (w1, w0) = w.at(n as f64);
        s += an * (w1 / n as f64 + w0);
    }
    Ok(s)
}

/// `omega(f)*` from the symmetric-square expansion.
pub fn omega_star_series(f: &HeckeEigenform) -> Result<HarmonicWeight> {
    let terms = sym2_terms(f.k);
    let lam = f.lambda_f64();
    let first = sym2_l1(&lam, f.k, TestFn::One, terms)?;
    let second = sym2_l1(&lam, f.k, TestFn::Gauss, terms)?;
    let zeta2 = PI * PI / 6.0;
    let value = second / zeta2;
    let diff = (first - second).abs() / zeta2;
    let tol = 1e-8 * value.abs().max(1.0);
    if diff > tol {
        return Err(Error::Convergence(format!(
            "symmetric-square evaluations disagree by {diff:e} at weight {}",
            f.k
        )));
    }
    // double-precision rounding of the weights and of the eigenvalue recursion,
    // plus the discarded terms below the noise floor
    let rounding = 1e-12 * value.abs() + 10.0 * SYM2_NEGLIGIBLE * terms as f64;
    let omega = ErrBoundedReal::from_f64(f.prec_bits, value, 0.0).widen(diff + rounding);
    if omega.lower() <= 0.0 {
        return Err(Error::Assertion(format!("nonpositive harmonic weight at weight {}", f.k)));
    }
    Ok(HarmonicWeight { k: f.k, eigen_index: f.eigen_index, omega_star: omega, method: WeightMethod::Series })
}

/// The defining sum `sum_{n <= x} b(n)/n` for given `b(n) = lambda(n^2)`,
/// `b[0]` unused. It converges too slowly to serve as `omega(f)*` itself but
/// is exact for finitely supported synthetic input.
pub fn omega_star_truncated(b: &[f64]) -> f64 {
    b.iter().enumerate().skip(1).map(|(n, x)| x / n as f64).sum()
}

/// `omega(f)*` by solving the Petersson formula at `m = n = 1`; only valid
/// when the space is one-dimensional.
pub fn omega_star_trace_inverted(f: &HeckeEigenform, cmax: u64) -> Result<HarmonicWeight> {
    if dim_cusp_forms(f.k) != 1 {
        return Err(Error::Method(format!(
            "trace inversion needs dim S_k = 1, weight {} has {}",
            f.k,
            dim_cusp_forms(f.k)
        )));
    }
    let prec = f.prec_bits;
    let rhs = petersson::trace_rhs(f.k, 1, 1, 1, cmax, prec)?;
    let total = ErrBoundedReal::one(prec).add(&rhs.bessel_sum).widen(rhs.tail_bound);
    let num = ErrBoundedReal::exact(Float::with_val(prec, 12) / (f.k - 1));
    let omega = num.div(&total)?;
    Ok(HarmonicWeight {
        k: f.k,
        eigen_index: f.eigen_index,
        omega_star: omega,
        method: WeightMethod::TraceInverted,
    })
}

pub fn omega_star(f: &HeckeEigenform, method: WeightMethod) -> Result<HarmonicWeight> {
    match method {
        WeightMethod::Series => omega_star_series(f),
        WeightMethod::TraceInverted => omega_star_trace_inverted(f, 200),
    }
}

/// Coefficient range an eigenform needs for central values with these
/// parameters and for its harmonic weight.
pub fn required_nmax(k: u32, d: i64, cutoff_mult: f64) -> usize {
    cutoff_for(k, d, cutoff_mult).max(sym2_terms(k)).max(2)
}

/// `sum_f L(1/2, f x chi_D)^r`, each term divided by `omega(f)*` when weighted.
pub fn moment_sum_from(values: &[CentralValue], weights: Option<&[HarmonicWeight]>, r: u32) -> Result<ErrBoundedReal> {
    let prec = values.first().map(|v| v.value.prec()).unwrap_or(crate::DEFAULT_PREC_BITS);
    let mut acc = ErrBoundedReal::zero(prec);
    for (i, v) in values.iter().enumerate() {
        let mut term = v.value.powi(r);
        if let Some(w) = weights {
            term = term.div(&w[i].omega_star)?;
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Moment sum over all of `H_k`, computing eigen-data from scratch.
pub fn moment_sum(k: u32, r: u32, weighted: bool, d: i64, prec: u32) -> Result<ErrBoundedReal> {
    if !(1..=3).contains(&r) {
        return Err(Error::Domain(format!("moment order {r} not in 1..=3")));
    }
    let chi = KroneckerChar::new(d)?;
    // the empty sum needs no parity condition
    if dim_cusp_forms(k) == 0 {
        return Ok(ErrBoundedReal::zero(prec));
    }
    if !chi.parity_matches(k)? {
        return Err(Error::ParityMismatch { d, k });
    }
    let forms = eigenforms(k, required_nmax(k, d, 2.0), prec)?;
    let table = KernelTable::new(k, d, 2.0, prec)?;
    let values = forms.iter().map(|f| central_value_with(f, &table)).collect::<Result<Vec<_>>>()?;
    let weights = if weighted {
        Some(forms.iter().map(omega_star_series).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    moment_sum_from(&values, weights.as_deref(), r)
}

/// `(log k)^{-2}` and `(log k)^2`, the corridor in which harmonic weights lie.
pub fn omega_corridor(k: u32) -> (f64, f64) {
    let l = (k as f64).ln();
    (l.powi(-2), l.powi(2))
}
