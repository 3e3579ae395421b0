//! The resonator `R(f x chi_D) = sum_{m <= N} r_D(m) lambda_f(m)`, its Euler
//! products, and the exact combinatorial identities behind its moments.
//!
//! `r_D` is multiplicative, supported on squarefree integers whose prime
//! factors lie in a window `[p_lo, p_hi]`, with
//! `r_D(p) = chi_D(p) L / (sqrt(p) log p)` by default.

use std::collections::BTreeMap;

use rug::Float;

use crate::characters::KroneckerChar;
use crate::eigenforms::{sieve, HeckeEigenform};
use crate::error::{Error, Result};
use crate::lcentral::{CentralValue, HarmonicWeight};
use crate::specialfn::ErrBoundedReal;

#[derive(Clone, Debug, PartialEq)]
pub struct ResonatorSpec {
    pub n: u64,
    pub l: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub d: i64,
    /// Set when `L` or the window were supplied by the caller.
    pub overridden: bool,
    /// Explicit `r(p)` values replacing the default rule.
    pub custom: Option<BTreeMap<u64, f64>>,
}

impl ResonatorSpec {
    /// `L = sqrt(log N log log N)` and the window `[L^2, exp(log^2 L)]`.
    pub fn standard(n: u64, d: i64) -> Result<Self> {
        KroneckerChar::new(d)?;
        if n < 2 {
            return Err(Error::InvalidSpec(format!("N = {n} must be at least 2")));
        }
        let ln = (n as f64).ln();
        let lln = ln.ln();
        if lln <= 0.0 {
            return Err(Error::InvalidSpec(format!("log log N <= 0 for N = {n}")));
        }
        let l = (ln * lln).sqrt();
        Ok(ResonatorSpec {
            n,
            l,
            p_lo: l * l,
            p_hi: (l.ln() * l.ln()).exp(),
            d,
            overridden: false,
            custom: None,
        })
    }

    pub fn with_window(n: u64, l: f64, p_lo: f64, p_hi: f64, d: i64) -> Result<Self> {
        KroneckerChar::new(d)?;
        if n < 1 || !(l.is_finite() && l > 0.0) || p_lo > p_hi {
            return Err(Error::InvalidSpec(format!("N={n}, L={l}, window [{p_lo}, {p_hi}]")));
        }
        Ok(ResonatorSpec { n, l, p_lo, p_hi, d, overridden: true, custom: None })
    }

    /// Arbitrary values `r(p)` on the given primes.
    pub fn with_prime_values(n: u64, values: BTreeMap<u64, f64>, d: i64) -> Result<Self> {
        KroneckerChar::new(d)?;
        let (lo, hi) = match (values.keys().next(), values.keys().last()) {
            (Some(&a), Some(&b)) => (a as f64, b as f64),
            _ => (2.0, 1.0),
        };
        Ok(ResonatorSpec { n, l: 1.0, p_lo: lo, p_hi: hi, d, overridden: true, custom: Some(values) })
    }

    pub fn window_primes(&self) -> Vec<u64> {
        if let Some(c) = &self.custom {
            return c.keys().copied().collect();
        }
        if self.p_hi < 2.0 {
            return Vec::new();
        }
        sieve(self.p_hi.floor() as usize)
            .into_iter()
            .map(|p| p as u64)
            .filter(|&p| p as f64 >= self.p_lo)
            .collect()
    }

    fn chi(&self) -> KroneckerChar {
        KroneckerChar::new(self.d).expect("validated at construction")
    }

    /// `r_D(p)` at `prec` bits.
    pub fn prime_value(&self, p: u64, prec: u32) -> Float {
        let c = self.chi().eval(p as i64);
        if let Some(map) = &self.custom {
            let v = map.get(&p).copied().unwrap_or(0.0);
            return Float::with_val(prec, v * c.abs() as f64);
        }
        if c == 0 || (p as f64) < self.p_lo || (p as f64) > self.p_hi {
            return Float::with_val(prec, 0);
        }
        let pf = Float::with_val(prec, p);
        let denom = Float::with_val(prec, pf.sqrt_ref()) * Float::with_val(prec, pf.ln_ref());
        Float::with_val(prec, self.l) * c / denom
    }

    pub fn prime_values_f64(&self) -> Vec<(u64, f64)> {
        self.window_primes().into_iter().map(|p| (p, self.prime_value(p, 64).to_f64())).collect()
    }
}

/// Every nonzero `r_D(m)`, `m <= N`.
pub fn resonator_coeffs(spec: &ResonatorSpec, prec: u32) -> BTreeMap<u64, Float> {
    let primes: Vec<(u64, Float)> = spec
        .window_primes()
        .into_iter()
        .map(|p| (p, spec.prime_value(p, prec)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let mut out = BTreeMap::new();
    fn walk(i: usize, m: u64, r: Float, primes: &[(u64, Float)], n: u64, out: &mut BTreeMap<u64, Float>) {
        for j in i..primes.len() {
            let (p, ref rp) = primes[j];
            let Some(next) = m.checked_mul(p) else { break };
            if next > n {
                break;
            }
            let v = Float::with_val(r.prec(), &r * rp);
            walk(j + 1, next, v.clone(), primes, n, out);
            out.insert(next, v);
        }
    }
    if spec.n >= 1 {
        out.insert(1, Float::with_val(prec, 1));
        walk(0, 1, Float::with_val(prec, 1), &primes, spec.n, &mut out);
    }
    out
}

/// `R(f x chi_D) = sum_m r_D(m) lambda_f(m)`.
pub fn resonate(f: &HeckeEigenform, spec: &ResonatorSpec) -> Result<ErrBoundedReal> {
    resonate_with(&f.lambda, &resonator_coeffs(spec, f.prec_bits), f.prec_bits)
}

/// Resonated sum for explicit `lambda[n - 1]` and coefficients.
pub fn resonate_with(lambda: &[ErrBoundedReal], coeffs: &BTreeMap<u64, Float>, prec: u32) -> Result<ErrBoundedReal> {
    let mut acc = ErrBoundedReal::zero(prec);
    for (&m, r) in coeffs {
        let l = lambda
            .get(m as usize - 1)
            .ok_or(Error::InsufficientPrecision { nmax: lambda.len(), needed: m as usize })?;
        acc = acc.add(&l.scale(r));
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EulerProducts {
    pub small: f64,
    pub big: f64,
    pub ratio: f64,
}

/// `prod (1 + r(p)^2)`, `2 prod (1 + r(p)^2 (1 + 1/p) + 2 r(p) chi(p)/sqrt p)` and their ratio.
pub fn euler_products(spec: &ResonatorSpec) -> EulerProducts {
    let chi = spec.chi();
    let mut small = 1.0f64;
    let mut big = 2.0f64;
    for (p, r) in spec.prime_values_f64() {
        let pf = p as f64;
        small *= 1.0 + r * r;
        big *= 1.0 + r * r * (1.0 + 1.0 / pf) + 2.0 * r * chi.eval(p as i64) as f64 / pf.sqrt();
    }
    EulerProducts { small, big, ratio: big / small }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendRow {
    pub n: u64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub primes: Vec<u64>,
    pub prime_sum: f64,
    pub target: f64,
    pub deviation: f64,
    /// `log` of the Euler-product ratio for the same window.
    pub log_ratio: f64,
    pub empty_window: bool,
}

/// `sum_p [2L/(p log p) - L^2/(p^2 log^2 p)]` against `sqrt(4 log N / log log N)`.
pub fn ratio_exponent_trend(ns: &[u64], d: i64) -> Result<Vec<TrendRow>> {
    let chi = KroneckerChar::new(d)?;
    ns.iter()
        .map(|&n| {
            let spec = ResonatorSpec::standard(n, d)?;
            let primes: Vec<u64> = spec.window_primes().into_iter().filter(|&p| chi.eval(p as i64) != 0).collect();
            let l = spec.l;
            let prime_sum: f64 = primes
                .iter()
                .map(|&p| {
                    let x = l / (p as f64 * (p as f64).ln());
                    2.0 * x - x * x
                })
                .sum();
            let ln = (n as f64).ln();
            let target = (4.0 * ln / ln.ln()).sqrt();
            let e = euler_products(&spec);
            Ok(TrendRow {
                n,
                p_lo: spec.p_lo,
                p_hi: spec.p_hi,
                empty_window: primes.is_empty(),
                primes,
                prime_sum,
                target,
                deviation: (prime_sum - target).abs() / target,
                log_ratio: e.ratio.ln(),
            })
        })
        .collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Multiplicative extension of prime values to squarefree `m <= n`.
fn extend_multiplicatively(n: u64, prime_vals: &BTreeMap<u64, f64>) -> Vec<f64> {
    let mut r = vec![0.0f64; n as usize + 1];
    r[1] = 1.0;
    for m in 2..=n {
        if !is_squarefree(m) {
            continue;
        }
        let mut rest = m;
        let mut v = 1.0;
        let mut p = 2;
        while rest > 1 {
            if rest % p == 0 {
                v *= prime_vals.get(&p).copied().unwrap_or(0.0);
                rest /= p;
            }
            p += 1;
        }
        r[m as usize] = v;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|` divided by the sum of absolute values of the lhs terms.
    pub residual: f64,
    pub pass: bool,
}

/// Both sides of
/// `sum_{m1,m2<=N} r(m1) r(m2) chi(m1 m2) sigma((m1,m2)) / sqrt(m1 m2)
///   = sum_{d<=N} r(d)^2 (sum_{t<=N/d, (t,d)=1} r(t) chi(t) / sqrt t)^2`
/// by direct enumeration.
pub fn sigma_identity_check(n: u64, prime_vals: &BTreeMap<u64, f64>, d: i64) -> Result<IdentityReport> {
    let chi = KroneckerChar::new(d)?;
    for (&p, &v) in prime_vals {
        if v != 0.0 && chi.eval(p as i64) == 0 {
            return Err(Error::InvalidSpec(format!("r({p}) must vanish because {p} divides {d}")));
        }
    }
    let r = extend_multiplicatively(n, prime_vals);
    let c: Vec<f64> = (0..=n).map(|m| chi.eval(m as i64) as f64).collect();
    let support: Vec<u64> = (1..=n).filter(|&m| r[m as usize] != 0.0).collect();
    let sigma = |g: u64| divisors(g).iter().sum::<u64>() as f64;

    let mut lhs = 0.0;
    let mut scale = 0.0;
    for &m1 in &support {
        for &m2 in &support {
            let t = r[m1 as usize] * r[m2 as usize] * c[m1 as usize] * c[m2 as usize] * sigma(gcd(m1, m2))
                / ((m1 * m2) as f64).sqrt();
            lhs += t;
            scale += t.abs();
        }
    }
    let mut rhs = 0.0;
    for &dd in &support {
        let inner: f64 = support
            .iter()
            .filter(|&&t| t <= n / dd && gcd(t, dd) == 1)
            .map(|&t| r[t as usize] * c[t as usize] / (t as f64).sqrt())
            .sum();
        rhs += r[dd as usize] * r[dd as usize] * inner * inner;
    }
    let residual = (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE);
    Ok(IdentityReport { lhs, rhs, residual, pass: residual <= 1e-10 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalReport {
    pub n: u64,
    pub quadruples: u64,
    pub diagonal: u64,
    pub counterexamples: Vec<[u64; 4]>,
    pub pass: bool,
}

/// Smallest-`t` decomposition is irrelevant: the parametrization holds if any
/// `g = s t^2` with `(s,t) = 1` makes `u = m1m2/g`, `v = m3m4/g` squares prime to `t`.
fn parametrization(p1: u64, p2: u64) -> Option<(u64, u64, u64, u64)> {
    let g = gcd(p1, p2);
    let mut t = 1u64;
    while t * t <= g {
        if g % (t * t) == 0 {
            let s = g / (t * t);
            let (u, v) = (p1 / g, p2 / g);
            if gcd(s, t) == 1 && gcd(u, t) == 1 && gcd(v, t) == 1 && gcd(u, v) == 1 {
                let u1 = (u as f64).sqrt().round() as u64;
                let v1 = (v as f64).sqrt().round() as u64;
                if u1 * u1 == u && v1 * v1 == v {
                    return Some((s, t, u1, v1));
                }
            }
        }
        t += 1;
    }
    None
}

/// Exhaustive comparison, over squarefree quadruples `m_i <= N`, of
/// "some `d1 | (m1,m2)`, `d2 | (m3,m4)` give `m1m2/d1^2 = m3m4/d2^2`" with the
/// `(s, t, u1, v1)` parametrization. For diagonal quadruples the number of
/// pairs `(d1, d2)` must also equal `sigma_0(t)` for the coprime part
/// `t = ((m1,m2), (m3,m4))`.
pub fn diagonal_classification_check(n: u64, budget: u64) -> Result<DiagonalReport> {
    if n > budget {
        return Err(Error::Budget(format!("N = {n} exceeds the brute-force budget {budget}")));
    }
    let sf: Vec<u64> = (1..=n).filter(|&m| is_squarefree(m)).collect();
    struct Pair {
        m: (u64, u64),
        prod: u64,
        divs: Vec<u64>,
        e: u64,
    }
    let pairs: Vec<Pair> = sf
        .iter()
        .flat_map(|&a| sf.iter().map(move |&b| (a, b)))
        .map(|(a, b)| {
            let e = gcd(a, b);
            Pair { m: (a, b), prod: a * b, divs: divisors(e), e }
        })
        .collect();
    let mut counterexamples = Vec::new();
    let mut diagonal = 0u64;
    let mut quadruples = 0u64;
    for x in &pairs {
        for y in &pairs {
            quadruples += 1;
            let mut count = 0u64;
            for &d1 in &x.divs {
                for &d2 in &y.divs {
                    if x.prod * d2 * d2 == y.prod * d1 * d1 {
                        count += 1;
                    }
                }
            }
            let param = parametrization(x.prod, y.prod);
            let consistent = match (count > 0, param) {
                (true, Some(_)) => count == divisors(gcd(x.e, y.e)).len() as u64,
                (false, None) => true,
                _ => false,
            };
            if count > 0 {
                diagonal += 1;
            }
            if !consistent && counterexamples.len() < 100 {
                counterexamples.push([x.m.0, x.m.1, y.m.0, y.m.1]);
            }
        }
    }
    Ok(DiagonalReport { n, quadruples, diagonal, pass: counterexamples.is_empty(), counterexamples })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankinReport {
    /// `sum_{n <= N} r(n)^2`
    pub partial: f64,
    /// `prod (1 + r(p)^2)`
    pub full: f64,
    /// `N^{-alpha} prod (1 + r(p)^2 p^alpha)`
    pub tail_bound: f64,
    pub alpha: f64,
    pub holds: bool,
}

/// Rankin's trick: `0 <= prod (1 + r(p)^2) - sum_{n<=N} r(n)^2 <= N^{-alpha} prod (1 + r(p)^2 p^alpha)`.
/// `alpha` defaults to `(log L)^{-3}`.
pub fn rankin_tail_check(spec: &ResonatorSpec, alpha: Option<f64>) -> Result<RankinReport> {
    let alpha = alpha.unwrap_or_else(|| spec.l.ln().powi(-3));
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidSpec(format!("Rankin exponent {alpha} must be positive; L = {}", spec.l)));
    }
    let coeffs = resonator_coeffs(spec, 128);
    let mut partial = Float::with_val(128, 0);
    for v in coeffs.values() {
        partial += Float::with_val(128, v.square_ref());
    }
    let partial = partial.to_f64();
    let mut full = 1.0f64;
    let mut weighted = 1.0f64;
    for (p, r) in spec.prime_values_f64() {
        full *= 1.0 + r * r;
        weighted *= 1.0 + r * r * (p as f64).powf(alpha);
    }
    let tail_bound = (spec.n as f64).powf(-alpha) * weighted;
    let gap = full - partial;
    let slack = 1e-12 * full;
    Ok(RankinReport {
        partial,
        full,
        tail_bound,
        alpha,
        holds: partial <= full + slack && gap <= tail_bound + slack,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourthMoment {
    pub lhs: ErrBoundedReal,
    pub bound: f64,
    pub ratio: f64,
}

/// `(12/(k-1)) sum_f R(f)^4 / omega(f)*` against `prod (1 + r(p)^2)(1 + 2 r(p)^2)`.
pub fn fourth_moment_check(forms: &[HeckeEigenform], weights: &[HarmonicWeight], spec: &ResonatorSpec) -> Result<FourthMoment> {
    let prec = forms.first().map(|f| f.prec_bits).unwrap_or(crate::DEFAULT_PREC_BITS);
    let mut acc = ErrBoundedReal::zero(prec);
    let coeffs = resonator_coeffs(spec, prec);
    for (f, w) in forms.iter().zip(weights) {
        let r = resonate_with(&f.lambda, &coeffs, prec)?;
        acc = acc.add(&r.powi(4).div(&w.omega_star)?);
    }
    let lhs = match forms.first() {
        Some(f) => acc.scale(&(Float::with_val(prec, 12) / (f.k - 1))),
        None => acc,
    };
    let mut bound = 1.0f64;
    for (_, r) in spec.prime_values_f64() {
        bound *= (1.0 + r * r) * (1.0 + 2.0 * r * r);
    }
    let ratio = lhs.to_f64() / bound;
    Ok(FourthMoment { lhs, bound, ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCountReport {
    pub k: u32,
    pub d: i64,
    pub constant: f64,
    pub threshold: f64,
    pub members: Vec<(usize, f64)>,
    pub count: usize,
}

/// `exp(c sqrt(log x / log log x))` with `x = k` for `D = 1` and `x = k|D|` otherwise.
pub fn extreme_threshold(k: u32, d: i64, constant: f64) -> f64 {
    let x = if d == 1 { k as f64 } else { k as f64 * d.unsigned_abs() as f64 };
    let lx = x.ln();
    (constant * (lx / lx.ln()).sqrt()).exp()
}

/// Forms whose central value reaches the threshold (within its error bound).
pub fn count_extreme_from(values: &[CentralValue], k: u32, d: i64, constant: f64) -> ExtremeCountReport {
    let threshold = extreme_threshold(k, d, constant);
    let members: Vec<(usize, f64)> = values
        .iter()
        .filter(|v| v.value.upper() >= threshold)
        .map(|v| (v.eigen_index, v.value.to_f64()))
        .collect();
    ExtremeCountReport { k, d, constant, threshold, count: members.len(), members }
}

/// [`count_extreme_from`] over all of `H_k`.
pub fn count_extreme(k: u32, d: i64, constant: f64, prec: u32) -> Result<ExtremeCountReport> {
    let chi = KroneckerChar::new(d)?;
    if crate::exactseries::dim_cusp_forms(k) == 0 {
        return Ok(count_extreme_from(&[], k, d, constant));
    }
    if !chi.parity_matches(k)? {
        return Err(Error::ParityMismatch { d, k });
    }
    let table = crate::lcentral::KernelTable::new(k, d, 2.0, prec)?;
    let forms = crate::eigenforms::eigenforms(k, crate::lcentral::required_nmax(k, d, 2.0), prec)?;
    let values = forms
        .iter()
        .map(|f| crate::lcentral::central_value_with(f, &table))
        .collect::<Result<Vec<_>>>()?;
    Ok(count_extreme_from(&values, k, d, constant))
}
