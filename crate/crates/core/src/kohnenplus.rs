//! The Kohnen plus space `S+_{(k+1)/2}(4)`, its Hecke operators `T(p^2)`,
//! the Shimura partner of each eigenform and the Waldspurger checks.
//!
//! Forms are built inside the span of `theta^a F^b` (`a` odd, `a + 4b = k + 1`),
//! which is all of `M_{(k+1)/2}(Gamma_0(4))`. Throughout, the adopted sign
//! convention for discriminants is `(-1)^{k/2} D > 0`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::characters::{kronecker, KroneckerChar};
use crate::eigenforms::{eigenforms, HeckeEigenform};
use crate::error::{Error, Result};
use crate::exactseries::{dim_cusp_forms, divisor_sums, QSeries};
use crate::lcentral::{central_value, omega_star_series, required_nmax};
use crate::resonance::extreme_threshold;
use crate::linalg::{eigenvector, real_roots, QMatrix};
use crate::specialfn::{log_gamma, ErrBoundedReal};

/// Convention printed by front ends: the sign a discriminant must carry.
pub const DISCRIMINANT_CONVENTION: &str = "(-1)^(k/2) D > 0";

/// `theta = sum_{n in Z} q^{n^2}`, weight 1/2.
pub fn theta(nmax: usize) -> QSeries {
    let mut c = vec![Integer::new(); nmax + 1];
    c[0] = Integer::from(1);
    let mut n = 1usize;
    while n * n <= nmax {
        c[n * n] = Integer::from(2);
        n += 1;
    }
    QSeries::from_integers(c).with_weight(Rational::from((1, 2)))
}

/// `F = sum_{n odd} sigma(n) q^n`, weight 2.
pub fn eis_f(nmax: usize) -> QSeries {
    let sigma = divisor_sums(1, nmax);
    let c = (0..=nmax)
        .map(|n| if n % 2 == 1 { sigma[n].clone() } else { Integer::new() })
        .collect();
    QSeries::from_integers(c).with_weight(Rational::from(2))
}

/// `(-1)^{k/2}`.
pub fn plus_sign(k: u32) -> i64 {
    if (k / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Whether index `n` may carry a nonzero plus-space coefficient.
pub fn plus_allowed(k: u32, n: usize) -> bool {
    matches!((plus_sign(k) * n as i64).rem_euclid(4), 0 | 1)
}

/// `(a, b)` with `a` odd, `a + 4b = k + 1`.
pub fn monomials(k: u32) -> Vec<(u32, u32)> {
    (0..=k / 4).map(|b| (k + 1 - 4 * b, b)).collect()
}

#[derive(Clone, Debug)]
pub struct HalfIntegralForm {
    pub k: u32,
    /// `c_g(n)` for `0 <= n <= nmax`.
    pub coeffs: Vec<ErrBoundedReal>,
    /// Present when every coefficient is rational.
    pub exact: Option<Vec<Rational>>,
    /// `g = sum_j monomial_coeffs[j] theta^a F^b` over [`monomials`].
    pub monomial_coeffs: Vec<Float>,
    pub plus_flag: bool,
    pub eigenform: bool,
    pub shimura_partner: Option<usize>,
    /// `(p, eigenvalue of T(p^2))` for eigenforms.
    pub hecke: Option<(u64, Float)>,
    /// The stored form is not Petersson normalized; this records its scaling.
    pub scale_tag: String,
}

impl HalfIntegralForm {
    pub fn nmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&ErrBoundedReal> {
        self.coeffs.get(n).ok_or(Error::BeyondTruncation { index: n, nmax: self.nmax() })
    }

    pub fn rescaled(&self, t: &Rational) -> HalfIntegralForm {
        let prec = self.coeffs[0].prec();
        let tf = Float::with_val(prec, t);
        HalfIntegralForm {
            coeffs: self.coeffs.iter().map(|c| c.scale(&tf)).collect(),
            exact: self.exact.as_ref().map(|e| e.iter().map(|c| Rational::from(c * t)).collect()),
            monomial_coeffs: self.monomial_coeffs.iter().map(|c| Float::with_val(c.prec(), c * &tf)).collect(),
            scale_tag: format!("{} * {}", self.scale_tag, t),
            ..self.clone()
        }
    }

    /// `g(z)` in double precision through Jacobi theta functions.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let th = jacobi_theta(3, 2.0 * z);
        let f = jacobi_theta(2, 2.0 * z).powi(4) / 16.0;
        monomials(self.k)
            .iter()
            .zip(&self.monomial_coeffs)
            .map(|(&(a, b), c)| th.powi(a as i32) * f.powi(b as i32) * c.to_f64())
            .sum()
    }
}

struct ExactPlusBasis {
    /// Echelonized coefficient vectors, pivot coefficient one.
    series: Vec<Vec<Rational>>,
    coords: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

fn plus_space_exact(k: u32, nmax: usize) -> Result<ExactPlusBasis> {
    if k % 2 == 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    let dim = dim_cusp_forms(k);
    let nmax = nmax.max(4 * dim + 8);
    let th = theta(nmax);
    let f = eis_f(nmax);
    let mons: Vec<Vec<Rational>> = monomials(k).iter().map(|&(a, b)| th.pow(a).mul(&f.pow(b)).coeffs()).collect();
    let cols = mons.len();
    let rows: Vec<Vec<Rational>> = (0..=nmax)
        .filter(|&n| n == 0 || !plus_allowed(k, n))
        .map(|n| mons.iter().map(|m| m[n].clone()).collect())
        .collect();
    let mut coords = crate::linalg::nullspace(&rows, cols);
    if coords.len() != dim {
        return Err(Error::Assertion(format!(
            "plus space of weight {}/2 has dimension {} but dim S_{k} = {dim}",
            k + 1,
            coords.len()
        )));
    }
    let mut series: Vec<Vec<Rational>> = coords
        .iter()
        .map(|x| {
            (0..=nmax)
                .map(|n| x.iter().zip(&mons).fold(Rational::new(), |acc, (xj, m)| acc + Rational::from(xj * &m[n])))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for n in 1..=nmax {
        if r == series.len() {
            break;
        }
        let Some(p) = (r..series.len()).find(|&i| series[i][n] != 0) else { continue };
        series.swap(r, p);
        coords.swap(r, p);
        let inv = Rational::from(series[r][n].recip_ref());
        for x in series[r].iter_mut().chain(coords[r].iter_mut()) {
            *x *= &inv;
        }
        for i in 0..series.len() {
            if i != r && series[i][n] != 0 {
                let fct = series[i][n].clone();
                for m in 0..=nmax {
                    let t = Rational::from(&fct * &series[r][m]);
                    series[i][m] -= t;
                }
                for j in 0..cols {
                    let t = Rational::from(&fct * &coords[r][j]);
                    coords[i][j] -= t;
                }
            }
        }
        pivots.push(n);
        r += 1;
    }
    for s in &series {
        if s[0] != 0 || (1..=nmax).any(|n| !plus_allowed(k, n) && s[n] != 0) {
            return Err(Error::Assertion("plus-space basis element violates its constraints".into()));
        }
    }
    Ok(ExactPlusBasis { series, coords, pivots })
}

fn exact_form(k: u32, series: &[Rational], coords: &[Rational], prec: u32, tag: &str) -> HalfIntegralForm {
    HalfIntegralForm {
        k,
        coeffs: series.iter().map(|c| rational_to_real(c, prec)).collect(),
        exact: Some(series.to_vec()),
        monomial_coeffs: coords.iter().map(|c| Float::with_val(prec, c)).collect(),
        plus_flag: true,
        eigenform: false,
        shimura_partner: None,
        hecke: None,
        scale_tag: tag.to_string(),
    }
}

fn rational_to_real(c: &Rational, prec: u32) -> ErrBoundedReal {
    let v = Float::with_val(prec, c);
    let err = v.to_f64().abs() * 2f64.powi(-(prec as i32));
    ErrBoundedReal::new(v, err)
}

/// Echelonized basis of `S+_{(k+1)/2}(4)`; asserts its dimension is `dim S_k(1)`.
pub fn plus_space_basis(k: u32, nmax: usize) -> Result<Vec<HalfIntegralForm>> {
    let b = plus_space_exact(k, nmax)?;
    Ok(b.series
        .iter()
        .zip(&b.coords)
        .zip(&b.pivots)
        .map(|((s, c), p)| exact_form(k, s, c, crate::DEFAULT_PREC_BITS, &format!("echelon pivot q^{p}")))
        .collect())
}

/// `(T(p^2) c)(n) = c(p^2 n) + ((-1)^{k/2} n / p) p^{k/2-1} c(n) + p^{k-1} c(n/p^2)`
/// for `n <= (len - 1) / p^2`.
pub fn hecke_p2(k: u32, p: u64, c: &[Rational]) -> Vec<Rational> {
    let p2 = (p * p) as usize;
    let top = (c.len() - 1) / p2;
    let mid = Integer::from(Integer::from(p).pow(k / 2 - 1));
    let last = Integer::from(Integer::from(p).pow(k - 1));
    (0..=top)
        .map(|n| {
            let mut v = c[p2 * n].clone();
            let chi = kronecker(plus_sign(k) * n as i64, p as i64);
            if chi != 0 {
                v += Rational::from(&c[n] * &mid) * chi;
            }
            if n % p2 == 0 {
                v += Rational::from(&c[n / p2] * &last);
            }
            v
        })
        .collect()
}

/// Matrix of `T(p^2)` on the echelon basis, after checking on the whole available
/// range that the image stays in the plus space.
fn hecke_matrix_plus(k: u32, p: u64, b: &ExactPlusBasis) -> Result<QMatrix> {
    let d = b.series.len();
    let images: Vec<Vec<Rational>> = b.series.iter().map(|s| hecke_p2(k, p, s)).collect();
    let m = QMatrix::from_fn(d, |i, j| images[j][b.pivots[i]].clone());
    for (j, img) in images.iter().enumerate() {
        for (n, v) in img.iter().enumerate() {
            let expect = (0..d).fold(Rational::new(), |acc, i| acc + Rational::from(m.get(i, j) * &b.series[i][n]));
            if *v != expect {
                return Err(Error::Assertion(format!("T({p}^2) leaves the plus space at q^{n}")));
            }
        }
    }
    Ok(m)
}

/// Plus-space eigenforms with their Shimura partners in `H_k` (indices as in
/// [`eigenforms`]). The matching prime is 3, with 5 as fallback.
pub fn shimura_match(k: u32, nmax: usize, prec: u32) -> Result<Vec<HalfIntegralForm>> {
    let dim = dim_cusp_forms(k);
    let forms = eigenforms(k, (4 * dim + 8).max(6), prec)?;
    match shimura_match_with(k, nmax, prec, 3, &forms) {
        Err(e) if !matches!(e, Error::UnsupportedWeight(_)) => shimura_match_with(k, nmax, prec, 5, &forms).map_err(|_| e),
        r => r,
    }
}

pub fn shimura_match_with(k: u32, nmax: usize, prec: u32, p: u64, forms: &[HeckeEigenform]) -> Result<Vec<HalfIntegralForm>> {
    if p == 2 {
        return Err(Error::Domain("the matching prime must be odd".into()));
    }
    let dim = dim_cusp_forms(k);
    let need = (p * p) as usize * (4 * dim + 8);
    let b = plus_space_exact(k, nmax.max(need))?;
    if forms.len() != dim {
        return Err(Error::Assertion(format!("{} eigenforms for dim S_{k} = {dim}", forms.len())));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let t = hecke_matrix_plus(k, p, &b)?;
    let scale = Float::with_val(prec, p).pow(Float::with_val(prec, k - 1) / 2u32);
    let targets: Vec<Float> = forms
        .iter()
        .map(|f| f.lambda(p as usize).map(|l| Float::with_val(prec, &l.value * &scale)))
        .collect::<Result<_>>()?;
    let roots = real_roots(&t.charpoly(), prec)?;
    if roots.len() != dim {
        return Err(Error::Assertion(format!("T({p}^2) has repeated or complex eigenvalues at k = {k}")));
    }
    let mut used = vec![false; dim];
    let mut out = Vec::with_capacity(dim);
    for (fi, mu) in targets.iter().enumerate() {
        let tol = mu.to_f64().abs().max(1.0) * 2f64.powi(-(prec as i32) / 2);
        let hits: Vec<usize> = (0..dim).filter(|&r| (roots[r].value.to_f64() - mu.to_f64()).abs() <= tol.max(1e-9 * mu.to_f64().abs())).collect();
        let [r] = hits[..] else {
            return Err(Error::Assertion(format!(
                "T({p}^2) eigenvalue for form {fi} at k = {k} not matched uniquely (target {})",
                mu.to_f64()
            )));
        };
        if used[r] {
            return Err(Error::Assertion("Shimura matching is not a bijection".into()));
        }
        used[r] = true;
        let mut g = if dim == 1 {
            exact_form(k, &b.series[0], &b.coords[0], prec, "echelon pivot one")
        } else {
            eigen_combination(k, &b, &t, &roots[r].value, prec)?
        };
        g.eigenform = true;
        g.shimura_partner = Some(forms[fi].eigen_index);
        g.hecke = Some((p, roots[r].value.clone()));
        if dim == 1 && roots[r].value != *mu && (roots[r].value.to_f64() - mu.to_f64()).abs() > 0.5 {
            return Err(Error::Assertion(format!("T({p}^2) eigenvalue differs from a_f({p})")));
        }
        out.push(g);
    }
    Ok(out)
}

fn eigen_combination(k: u32, b: &ExactPlusBasis, t: &QMatrix, mu: &Float, prec: u32) -> Result<HalfIntegralForm> {
    let at = |wp: u32| -> Result<Vec<Float>> {
        let mu = Float::with_val(wp, mu);
        (0..b.series.len())
            .find_map(|i| eigenvector(t, &mu, i, wp).ok())
            .ok_or_else(|| Error::Assertion("no eigenvector for a simple eigenvalue".into()))
    };
    let v = at(prec + 64)?;
    let v2 = at(prec + 128)?;
    let combine = |v: &[Float], rows: &[Vec<Rational>], n: usize, wp: u32| -> Float {
        v.iter().zip(rows).fold(Float::with_val(wp, 0), |acc, (vi, s)| acc + Float::with_val(wp, vi * &s[n]))
    };
    let len = b.series[0].len();
    let coeffs = (0..len)
        .map(|n| {
            let a = combine(&v, &b.series, n, prec + 64);
            let c = combine(&v2, &b.series, n, prec + 128);
            let diff = Float::with_val(prec, &a - &c).to_f64().abs();
            ErrBoundedReal::new(Float::with_val(prec, &a), 2.0 * diff + a.to_f64().abs() * 2f64.powi(-(prec as i32)))
        })
        .collect();
    let cols = b.coords[0].len();
    let monomial_coeffs = (0..cols).map(|j| Float::with_val(prec, combine(&v, &b.coords, j, prec + 64))).collect();
    Ok(HalfIntegralForm {
        k,
        coeffs,
        exact: None,
        monomial_coeffs,
        plus_flag: true,
        eigenform: false,
        shimura_partner: None,
        hecke: None,
        scale_tag: "eigenvector normalized at first available echelon coordinate".into(),
    })
}

fn check_discriminant(k: u32, d: i64) -> Result<()> {
    KroneckerChar::new(d)?;
    if d % 2 == 0 {
        return Err(Error::Domain(format!("{d} is not an odd discriminant")));
    }
    if plus_sign(k) * d < 0 {
        return Err(Error::ParityMismatch { d, k });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioEntry {
    pub eigen_index: usize,
    /// `c(|D1|)^2 |D2|^{(k-1)/2} L(1/2, f x chi_D2)`
    pub lhs: f64,
    /// `c(|D2|)^2 |D1|^{(k-1)/2} L(1/2, f x chi_D1)`
    pub rhs: f64,
    pub residual: f64,
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub k: u32,
    pub d1: i64,
    pub d2: i64,
    pub entries: Vec<RatioEntry>,
    /// Largest residual over the eigenforms.
    pub residual: f64,
    pub scale_tag: String,
}

/// Scale-free consequence of the explicit Waldspurger formula for one pair `(g, f)`.
pub fn waldspurger_ratio_with(g: &HalfIntegralForm, f: &HeckeEigenform, d1: i64, d2: i64, cutoff_mult: f64) -> Result<RatioEntry> {
    let k = g.k;
    check_discriminant(k, d1)?;
    check_discriminant(k, d2)?;
    let prec = f.prec_bits;
    let half = Float::with_val(prec, k - 1) / 2u32;
    let side = |da: i64, db: i64| -> Result<ErrBoundedReal> {
        let c = g.coeff(da.unsigned_abs() as usize)?.square();
        let l = central_value(f, db, cutoff_mult)?.value;
        let pw = Float::with_val(prec, db.unsigned_abs()).pow(&half);
        Ok(c.mul(&l).scale(&pw))
    };
    let lhs = side(d1, d2)?;
    let rhs = side(d2, d1)?;
    let c1 = g.coeff(d1.unsigned_abs() as usize)?;
    let c2 = g.coeff(d2.unsigned_abs() as usize)?;
    let tiny = |x: &ErrBoundedReal| x.lower() <= 0.0 && x.upper() >= 0.0;
    if tiny(c1) && tiny(c2) {
        return Ok(RatioEntry { eigen_index: f.eigen_index, lhs: 0.0, rhs: 0.0, residual: 0.0, vacuous: true });
    }
    let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
    if tiny(c2) != tiny(c1) && scale > 0.0 {
        let l1 = central_value(f, d1, cutoff_mult)?.value;
        let l2 = central_value(f, d2, cutoff_mult)?.value;
        if !tiny(&l1) && !tiny(&l2) {
            return Err(Error::Assertion(format!(
                "c(|{d1}|) and c(|{d2}|) disagree on vanishing while both L-values are nonzero"
            )));
        }
    }
    let residual = if scale == 0.0 { 0.0 } else { lhs.sub(&rhs).to_f64().abs() / scale };
    Ok(RatioEntry { eigen_index: f.eigen_index, lhs: lhs.to_f64(), rhs: rhs.to_f64(), residual, vacuous: false })
}

pub fn waldspurger_ratio_check(k: u32, d1: i64, d2: i64, prec: u32) -> Result<RatioReport> {
    check_discriminant(k, d1)?;
    check_discriminant(k, d2)?;
    let top = d1.unsigned_abs().max(d2.unsigned_abs()) as usize;
    let gs = shimura_match(k, top, prec)?;
    let nmax = required_nmax(k, d1, 2.0).max(required_nmax(k, d2, 2.0));
    let fs = eigenforms(k, nmax, prec)?;
    let mut entries = Vec::new();
    for g in &gs {
        let f = &fs[g.shimura_partner.expect("matched")];
        entries.push(waldspurger_ratio_with(g, f, d1, d2, 2.0)?);
    }
    let residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    let scale_tag = gs.first().map(|g| g.scale_tag.clone()).unwrap_or_default();
    Ok(RatioReport { k, d1, d2, entries, residual, scale_tag })
}

/// `Gamma(k/2) / pi^{k/2}`.
pub fn gamma_ratio_constant(k: u32, prec: u32) -> Result<ErrBoundedReal> {
    let wp = prec + 16;
    let lg = log_gamma(&Float::with_val(wp, k / 2), wp)?;
    let lpi = Float::with_val(wp, rug::float::Constant::Pi).ln() * (k / 2);
    let v = Float::with_val(wp, &lg.value - &lpi).exp();
    let err = v.to_f64() * (lg.err + 2f64.powi(-(prec as i32))) * 2.0;
    Ok(ErrBoundedReal::new(Float::with_val(prec, v), err))
}

/// `vartheta_kind(tau)`, `kind` in `{2, 3, 4}`, in the `exp(i pi tau)` convention.
pub fn jacobi_theta(kind: u8, tau: Complex64) -> Complex64 {
    let mut kind = kind;
    let mut tau = tau;
    let mut mult = Complex64::new(1.0, 0.0);
    let eighth = Complex64::from_polar(1.0, PI / 4.0);
    for _ in 0..200 {
        let n = tau.re.round();
        tau.re -= n;
        let n = n as i64;
        if kind == 2 {
            mult *= eighth.powi(n.rem_euclid(8) as i32);
        } else if n % 2 != 0 {
            kind = 7 - kind;
        }
        if tau.norm_sqr() >= 1.0 {
            break;
        }
        mult /= (Complex64::new(0.0, -1.0) * tau).sqrt();
        tau = -1.0 / tau;
        kind = match kind {
            3 => 3,
            4 => 2,
            _ => 4,
        };
    }
    let q = (Complex64::new(0.0, PI) * tau).exp();
    let series = match kind {
        2 => {
            let mut s = Complex64::new(0.0, 0.0);
            for n in 0..12 {
                s += q.powi(n * (n + 1));
            }
            2.0 * (Complex64::new(0.0, PI / 4.0) * tau).exp() * s
        }
        _ => {
            let sign: f64 = if kind == 3 { 1.0 } else { -1.0 };
            let mut s = Complex64::new(1.0, 0.0);
            for n in 1..12 {
                s += 2.0 * sign.powi(n) * q.powi(n * n);
            }
            s
        }
    };
    mult * series
}

/// `int_F h(z) dx dy / y^2` over the standard fundamental domain of `SL_2(Z)`,
/// truncated at height 24.
pub fn fundamental_domain_integral(depth: usize, h: &dyn Fn(Complex64) -> f64) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(depth.max(2)).unwrap());
    let breaks = [1.5, 3.0, 6.0, 12.0, 24.0];
    gl.integrate(-0.5, 0.5, |x| {
        let y0 = (1.0 - x * x).sqrt();
        let mut lo = y0;
        let mut acc = 0.0;
        for &hi in &breaks {
            acc += gl.integrate(lo, hi, |y| h(Complex64::new(x, y)) / (y * y));
            lo = hi;
        }
        acc
    })
}

/// Right coset representatives of `Gamma_0(4)` in `SL_2(Z)`, one per point of `P^1(Z/4)`.
pub const GAMMA0_4_COSETS: [[i64; 4]; 6] = [
    [1, 0, 0, 1],
    [0, -1, 1, 0],
    [0, -1, 1, 1],
    [0, -1, 1, 2],
    [0, -1, 1, 3],
    [1, 0, 2, 1],
];

fn mobius(m: &[i64; 4], z: Complex64) -> Complex64 {
    (m[0] as f64 * z + m[1] as f64) / (m[2] as f64 * z + m[3] as f64)
}

/// `int_{Gamma_0(4) \ H} |g|^2 y^{(k+1)/2} dx dy / y^2`, with no index normalization.
pub fn petersson_norm_sq(g: &HalfIntegralForm, depth: usize) -> f64 {
    let w = (g.k as f64 + 1.0) / 2.0;
    let h = |z: Complex64| -> f64 {
        GAMMA0_4_COSETS
            .iter()
            .map(|m| {
                let u = mobius(m, z);
                g.eval(u).norm_sqr() * u.im.powf(w)
            })
            .sum()
    };
    fundamental_domain_integral(depth, &h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub k: u32,
    pub d: i64,
    pub eigen_index: usize,
    /// Quadrature value of `||g||^2` for the stored scaling.
    pub norm_sq: f64,
    /// Relative change of `norm_sq` when the mesh depth is doubled.
    pub quadrature_change: f64,
    /// `c_g(|D|)^2 / ||g||^2`.
    pub c_sq_normalized: f64,
    pub central_value: f64,
    /// `Gamma(k/2)/pi^{k/2} |D|^{(k-1)/2} L(1/2, f x chi_D)`
    pub rhs: f64,
    pub rel_err: f64,
    /// `<f, f>` over `SL_2(Z) \ H`, from the harmonic weight.
    pub petersson_f: f64,
    /// Kohnen-Zagier normalization: `6 c^2 / ||g||^2` against `rhs / <f, f>`.
    pub rel_err_index_normalized: f64,
    /// `rhs` with `L` replaced by the extreme-value threshold.
    pub corollary_threshold: f64,
    pub exceeds_threshold: bool,
}

/// Absolute form of the Waldspurger formula with `||g||^2` from quadrature.
pub fn waldspurger_norm_check(k: u32, d: i64, depth: usize, prec: u32) -> Result<Vec<NormReport>> {
    check_discriminant(k, d)?;
    let gs = shimura_match(k, d.unsigned_abs() as usize, prec)?;
    let fs = eigenforms(k, required_nmax(k, d, 2.0), prec)?;
    gs.iter().map(|g| waldspurger_norm_with(g, &fs[g.shimura_partner.expect("matched")], d, depth)).collect()
}

pub fn waldspurger_norm_with(g: &HalfIntegralForm, f: &HeckeEigenform, d: i64, depth: usize) -> Result<NormReport> {
    let k = g.k;
    check_discriminant(k, d)?;
    let coarse = petersson_norm_sq(g, depth);
    let norm_sq = petersson_norm_sq(g, 2 * depth);
    let quadrature_change = ((norm_sq - coarse) / norm_sq).abs();
    if !(norm_sq.is_finite() && norm_sq > 0.0) || quadrature_change > 1e-6 {
        return Err(Error::Convergence(format!(
            "Petersson norm quadrature at depth {depth}: {coarse} vs {norm_sq}"
        )));
    }
    let prec = f.prec_bits;
    let c_sq = g.coeff(d.unsigned_abs() as usize)?.square().to_f64();
    let c_sq_normalized = c_sq / norm_sq;
    let l = central_value(f, d, 2.0)?.value.to_f64();
    let gam = gamma_ratio_constant(k, prec)?.to_f64();
    let pw = (d.unsigned_abs() as f64).powf((k as f64 - 1.0) / 2.0);
    let rhs = gam * pw * l;
    let omega = omega_star_series(f)?.omega_star.to_f64();
    let petersson_f = (crate::specialfn::log_gamma(&Float::with_val(prec, k), prec)?.to_f64()
        - (k as f64 - 1.0) * (4.0 * PI).ln())
    .exp()
        * omega
        / 12.0;
    let kz_lhs = 6.0 * c_sq_normalized;
    let kz_rhs = rhs / petersson_f;
    let corollary_threshold = gam * pw * extreme_threshold(k, d, 1.41);
    Ok(NormReport {
        k,
        d,
        eigen_index: f.eigen_index,
        norm_sq,
        quadrature_change,
        c_sq_normalized,
        central_value: l,
        rhs,
        rel_err: (c_sq_normalized - rhs).abs() / rhs.abs(),
        petersson_f,
        rel_err_index_normalized: (kz_lhs - kz_rhs).abs() / kz_rhs.abs(),
        corollary_threshold,
        exceeds_threshold: c_sq_normalized >= corollary_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactseries::delta;

    fn ints(s: &QSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_f64() as i64).collect()
    }

    #[test]
    fn generators() {
        assert_eq!(ints(&theta(9)), vec![1, 2, 0, 0, 2, 0, 0, 0, 0, 2]);
        assert_eq!(ints(&theta(0)), vec![1]);
        assert_eq!(ints(&eis_f(5)), vec![0, 1, 0, 4, 0, 6]);
    }

    #[test]
    fn plus_space_dimensions() {
        for k in (2..=40).step_by(2) {
            let b = plus_space_basis(k, 0).unwrap();
            assert_eq!(b.len(), dim_cusp_forms(k), "k = {k}");
            for g in &b {
                let e = g.exact.as_ref().unwrap();
                assert_eq!(e[0], 0);
                for (n, c) in e.iter().enumerate() {
                    assert!(plus_allowed(k, n) || *c == 0, "k = {k}, n = {n}");
                }
            }
        }
    }

    /// `60 (2 E theta' - E' theta / 4)` with `E = 1/240 + sum sigma_3(n) q^{4n}` and
    /// `'` meaning `q d/dq`.
    fn bracket_oracle(nmax: usize) -> Vec<Rational> {
        let th: Vec<Rational> = theta(nmax).coeffs();
        let s3 = divisor_sums(3, nmax);
        let mut e = vec![Rational::new(); nmax + 1];
        e[0] = Rational::from((1, 240));
        for n in 1..=nmax / 4 {
            e[4 * n] = Rational::from(&s3[n]);
        }
        let d = |v: &[Rational]| -> Vec<Rational> { v.iter().enumerate().map(|(n, c)| Rational::from(c * n as u32)).collect() };
        let (dth, de) = (d(&th), d(&e));
        (0..=nmax)
            .map(|n| {
                let mut acc = Rational::new();
                for i in 0..=n {
                    acc += Rational::from(&e[i] * &dth[n - i]) * 2u32 - Rational::from(&de[i] * &th[n - i]) / 4u32;
                }
                acc * 60u32
            })
            .collect()
    }

    #[test]
    fn weight_thirteen_halves_matches_bracket() {
        let g = &plus_space_basis(12, 60).unwrap()[0];
        let oracle = bracket_oracle(60);
        assert_eq!(g.exact.as_ref().unwrap()[..=60], oracle[..]);
        let head: Vec<i64> = oracle[..14].iter().map(|c| c.to_f64() as i64).collect();
        assert_eq!(head, vec![0, 1, 0, 0, -56, 120, 0, 0, -240, 9, 0, 0, 1440, -1320]);
    }

    #[test]
    fn t9_eigenvalue_is_tau3() {
        let gs = shimura_match(12, 20, 128).unwrap();
        assert_eq!(gs.len(), 1);
        let (p, mu) = gs[0].hecke.clone().unwrap();
        assert_eq!((p, mu.to_f64()), (3, 252.0));
        assert_eq!(gs[0].shimura_partner, Some(0));
        let gs = shimura_match(16, 20, 128).unwrap();
        assert_eq!(gs.len(), 1);
        assert!(shimura_match(14, 20, 128).unwrap().is_empty());
    }

    #[test]
    fn matching_prime_independence() {
        let forms = eigenforms(24, 40, 128).unwrap();
        let a = shimura_match_with(24, 0, 128, 3, &forms).unwrap();
        let b = shimura_match_with(24, 0, 128, 5, &forms).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.shimura_partner, y.shimura_partner);
            let s = x.coeffs[1].to_f64() / y.coeffs[1].to_f64();
            for n in [4usize, 5, 8, 9, 12, 13, 16, 17] {
                let (u, v) = (x.coeffs[n].to_f64(), y.coeffs[n].to_f64() * s);
                assert!((u - v).abs() <= 1e-20 * u.abs().max(1.0), "n = {n}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn jacobi_identity_and_f_expansion() {
        for tau in [Complex64::new(0.1, 0.05), Complex64::new(-0.37, 0.6), Complex64::new(0.5, 1.3)] {
            let (t2, t3, t4) = (jacobi_theta(2, tau), jacobi_theta(3, tau), jacobi_theta(4, tau));
            let r = t3.powi(4) - t2.powi(4) - t4.powi(4);
            assert!(r.norm() <= 1e-10 * t3.norm().powi(4), "{tau}: {r}");
        }
        let z = Complex64::new(0.21, 0.9);
        let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        let fz: Complex64 = eis_f(40).coeffs().iter().enumerate().map(|(n, c)| c.to_f64() * q.powi(n as i32)).sum();
        let via_theta = jacobi_theta(2, 2.0 * z).powi(4) / 16.0;
        assert!((fz - via_theta).norm() < 1e-13);
    }

    #[test]
    fn quadrature_reproduces_delta_norm_from_omega() {
        let dcoef: Vec<f64> = delta(40).unwrap().coeffs().iter().map(|c| c.to_f64()).collect();
        let h = |z: Complex64| {
            let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
            let v: Complex64 = dcoef.iter().enumerate().map(|(n, c)| c * q.powi(n as i32)).sum();
            v.norm_sqr() * z.im.powi(12)
        };
        let quad = fundamental_domain_integral(40, &h);
        let f = &eigenforms(12, 60, 128).unwrap()[0];
        let omega = omega_star_series(f).unwrap().omega_star.to_f64();
        let from_omega = (39916800f64.ln() - 11.0 * (4.0 * PI).ln()).exp() * omega / 12.0;
        assert!(((quad - from_omega) / from_omega).abs() < 1e-8, "{quad} vs {from_omega}");
    }

    #[test]
    fn ratio_examples_and_rescaling() {
        let r = waldspurger_ratio_check(12, 5, 5, 128).unwrap();
        assert_eq!(r.residual, 0.0);
        let r = waldspurger_ratio_check(12, 5, 13, 128).unwrap();
        assert!(r.residual <= 1e-6, "{r:?}");
        let gs = shimura_match(12, 20, 128).unwrap();
        let f = &eigenforms(12, required_nmax(12, 17, 2.0), 128).unwrap()[0];
        let a = waldspurger_ratio_with(&gs[0], f, 5, 17, 2.0).unwrap();
        let b = waldspurger_ratio_with(&gs[0].rescaled(&Rational::from((7, 3))), f, 5, 17, 2.0).unwrap();
        assert!(a.residual <= 1e-6);
        assert!((a.residual - b.residual).abs() <= 1e-15);
        assert!(waldspurger_ratio_check(12, -3, 5, 128).is_err());
    }

    #[test]
    fn norm_homogeneity() {
        let g = &shimura_match(12, 20, 128).unwrap()[0];
        let a = petersson_norm_sq(g, 24);
        let b = petersson_norm_sq(&g.rescaled(&Rational::from((7, 3))), 24);
        assert!((b / a - 49.0 / 9.0).abs() < 1e-12);
    }
}
