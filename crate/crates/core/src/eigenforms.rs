//! Hecke eigenforms of level one.
//!
//! The matrix of `T_p` on the Victor Miller basis has integer entries. Its
//! eigenvalues are isolated exactly (characteristic polynomial plus certified
//! root brackets), eigenvectors come from inverse iteration, and the Fourier
//! coefficients follow by applying the basis. Every coefficient is computed at
//! two working precisions; their difference bounds the error.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exactseries::{dim_cusp_forms, victor_miller_basis, QSeries};
use crate::linalg::{eigenvector, real_roots, QMatrix};
use crate::specialfn::ErrBoundedReal;

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeEigenform {
    pub k: u32,
    /// Position in the list ordered by ascending `lambda(2)`.
    pub eigen_index: usize,
    /// `lambda[n - 1]` holds `lambda_f(n)` for `n = 1..=nmax`.
    pub lambda: Vec<ErrBoundedReal>,
    /// Always `+1` at level one.
    pub fricke_sign: i32,
    pub prec_bits: u32,
}

impl HeckeEigenform {
    pub fn nmax(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self, n: usize) -> Result<&ErrBoundedReal> {
        if n == 0 || n > self.lambda.len() {
            return Err(Error::BeyondTruncation { index: n, nmax: self.lambda.len() });
        }
        Ok(&self.lambda[n - 1])
    }

    pub fn lambda_f64(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l.to_f64()).collect()
    }

    /// Largest error bound among the stored eigenvalues.
    pub fn max_err(&self) -> f64 {
        self.lambda.iter().map(|l| l.err).fold(0.0, f64::max)
    }

    pub fn hecke_residual(&self) -> f64 {
        let vals: Vec<Float> = self.lambda.iter().map(|l| l.value.clone()).collect();
        hecke_residual(&vals)
    }
}

/// Matrix of `a(n) -> a(pn) + p^{k-1} a(n/p)` on the echelon basis.
pub fn hecke_matrix(k: u32, p: u32, nmax: usize) -> Result<QMatrix> {
    let d = dim_cusp_forms(k);
    let needed = p as usize * d;
    if nmax < needed {
        return Err(Error::InsufficientPrecision { nmax, needed });
    }
    let basis = victor_miller_basis(k, nmax)?;
    Ok(hecke_matrix_on(&basis, k, p))
}

fn hecke_matrix_on(basis: &[QSeries], k: u32, p: u32) -> QMatrix {
    let d = basis.len();
    let pk1 = Integer::from(p).pow(k - 1);
    let p = p as usize;
    // column j holds the first d coefficients of T_p b_j
    QMatrix::from_fn(d, |i, j| {
        let n = i + 1;
        let b = &basis[j];
        let mut v = b.coeff(p * n).expect("truncation checked by caller");
        if n % p == 0 {
            v += Rational::from(b.coeff(n / p).expect("within range")) * &pk1;
        }
        v
    })
}

/// Maximum of `|lambda(m) lambda(n) - sum_{d | (m,n)} lambda(mn/d^2)|`
/// over `mn <= len`, with `lambda[n - 1] = lambda(n)`.
pub fn hecke_residual(lambda: &[Float]) -> f64 {
    let nmax = lambda.len();
    let prec = lambda.first().map(|x| x.prec()).unwrap_or(64);
    let mut worst = 0.0f64;
    for m in 1..=nmax {
        for n in m..=nmax / m {
            let g = gcd(m, n);
            let mut rhs = Float::with_val(prec, 0);
            for d in 1..=g {
                if g % d == 0 {
                    rhs += &lambda[m * n / (d * d) - 1];
                }
            }
            let lhs = Float::with_val(prec, &lambda[m - 1] * &lambda[n - 1]);
            let r = Float::with_val(prec, lhs - rhs).abs().to_f64();
            worst = worst.max(r);
        }
    }
    worst
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn bits_of(basis: &[QSeries]) -> u32 {
    basis
        .iter()
        .flat_map(|b| b.numerators().iter())
        .map(|c| c.significant_bits())
        .max()
        .unwrap_or(1)
}

/// Eigenvalues of `m` as floats at `wp` bits, ascending, after an exact
/// distinctness check on the lambda scale.
fn eigenvalues(m: &QMatrix, wp: u32) -> Result<Vec<Float>> {
    let roots = real_roots(&m.charpoly(), wp)?;
    Ok(roots.into_iter().map(|r| Float::with_val(wp, &r.value)).collect())
}

fn min_gap(vals: &[Float], scale: &Float) -> Option<Float> {
    vals.windows(2)
        .map(|w| Float::with_val(64, &w[1] - &w[0]) / scale)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}

/// Coefficients `a_f(n)`, `n = 1..=nmax`, of the eigenform for each eigenvalue.
fn coefficients_at(basis: &[QSeries], m: &QMatrix, mus: &[Float], nmax: usize, wp: u32) -> Result<Vec<Vec<Float>>> {
    mus.par_iter()
        .map(|mu| {
            let mu = Float::with_val(wp, mu);
            let v = eigenvector(m, &mu, 0, wp)?;
            let mut out = Vec::with_capacity(nmax);
            for n in 1..=nmax {
                let mut acc = Float::with_val(wp, 0);
                for (vj, b) in v.iter().zip(basis) {
                    let c = &b.numerators()[n];
                    if *c != 0 {
                        acc += Float::with_val(wp, vj * c);
                    }
                }
                out.push(acc);
            }
            Ok(out)
        })
        .collect()
}

/// All normalized Hecke eigenforms of weight `k`, ordered by ascending `lambda(2)`.
///
/// `T_2` is diagonalized unless two of its eigenvalues come closer than
/// `2^{-prec/4}` on the lambda scale, in which case `T_2 + T_3` is used; if that
/// fails as well the call reports an assertion failure.
pub fn eigenforms(k: u32, nmax: usize, prec_bits: u32) -> Result<Vec<HeckeEigenform>> {
    if k % 2 == 1 {
        return Err(Error::UnsupportedWeight(k as i64));
    }
    if k < 12 {
        return Ok(Vec::new());
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    let nmax = nmax.max(2);
    let len = nmax.max(3 * d);
    let basis = victor_miller_basis(k, len)?;
    let b_bits = bits_of(&basis);

    // lambda scale: a(2) / 2^{(k-1)/2}
    let gap_scale = Float::with_val(64, 2u32).pow(Float::with_val(64, k - 1) / 2u32);
    let gap_floor = Float::with_val(64, 1) >> (prec_bits / 4);

    let t2 = hecke_matrix_on(&basis, k, 2);
    let probe_wp = prec_bits + 64;
    let mut mat = t2;
    let mut mus = eigenvalues(&mat, probe_wp)?;
    if d > 1 && min_gap(&mus, &gap_scale).is_some_and(|g| g < gap_floor) {
        let t3 = hecke_matrix_on(&basis, k, 3);
        mat = mat.add(&t3);
        mus = eigenvalues(&mat, probe_wp)?;
        if min_gap(&mus, &gap_scale).is_some_and(|g| g < gap_floor) {
            return Err(Error::Assertion(format!(
                "Hecke eigenvalues at weight {k} are not separated by 2^-{}",
                prec_bits / 4
            )));
        }
    }

    let mut wp = prec_bits + b_bits + 64;
    let (coeffs, errs) = loop {
        let lo_mus = eigenvalues(&mat, wp)?;
        let hi_mus = eigenvalues(&mat, wp + 64)?;
        let lo = coefficients_at(&basis, &mat, &lo_mus, nmax, wp)?;
        let hi = coefficients_at(&basis, &mat, &hi_mus, nmax, wp + 64)?;
        let mut ok = true;
        let mut errs = vec![vec![0.0f64; nmax]; d];
        for f in 0..d {
            for n in 0..nmax {
                let diff = Float::with_val(64, &hi[f][n] - &lo[f][n]).abs();
                // relative to the lambda scale n^{(k-1)/2}
                let scale = Float::with_val(64, (n + 1) as u32).pow(Float::with_val(64, k - 1) / 2u32);
                let rel = Float::with_val(64, &diff / &scale);
                let e = rel.to_f64() * 2.0;
                if e > (Float::with_val(64, 1) >> (prec_bits - 2)).to_f64() {
                    ok = false;
                }
                errs[f][n] = e;
            }
        }
        if ok {
            break (hi, errs);
        }
        if wp > 64 * (prec_bits + b_bits + 64) {
            return Err(Error::Convergence(format!("eigenvector precision at weight {k}")));
        }
        wp *= 2;
    };

    let rounding = (Float::with_val(64, 1) >> prec_bits).to_f64();
    let mut forms: Vec<HeckeEigenform> = coeffs
        .into_par_iter()
        .zip(errs)
        .map(|(a, e)| {
            let lambda = a
                .iter()
                .zip(e)
                .enumerate()
                .map(|(i, (an, err))| {
                    let n = (i + 1) as u32;
                    let wpp = an.prec();
                    let scale = Float::with_val(wpp, n).pow(Float::with_val(wpp, k - 1) / 2u32);
                    let v = Float::with_val(prec_bits, an / scale);
                    if i == 0 {
                        ErrBoundedReal::exact(Float::with_val(prec_bits, 1))
                    } else {
                        ErrBoundedReal::new(v, 0.0).widen(err + rounding)
                    }
                })
                .collect();
            HeckeEigenform { k, eigen_index: 0, lambda, fricke_sign: 1, prec_bits }
        })
        .collect();
    forms.sort_by(|a, b| a.lambda[1].value.partial_cmp(&b.lambda[1].value).unwrap());
    for (i, f) in forms.iter_mut().enumerate() {
        f.eigen_index = i;
    }
    Ok(forms)
}

/// `lambda_f(n^2)` for `n = 1..=x` from the prime eigenvalues, using
/// `lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1})` and multiplicativity.
/// Needs `lambda(p)` for primes `p <= x`.
pub fn lambda_squares_f64(lambda: &[f64], x: usize) -> Result<Vec<f64>> {
    let primes = sieve(x);
    if let Some(&p) = primes.last() {
        if p > lambda.len() {
            return Err(Error::InsufficientPrecision { nmax: lambda.len(), needed: p });
        }
    }
    let mut out = vec![0.0f64; x + 1];
    out[1] = 1.0;
    // smallest prime factor
    let mut spf = vec![0usize; x + 1];
    for &p in &primes {
        let mut m = p;
        while m <= x {
            if spf[m] == 0 {
                spf[m] = p;
            }
            m += p;
        }
    }
    for n in 2..=x {
        let p = spf[n];
        let mut e = 0u32;
        let mut rest = n;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        let lp = lambda[p - 1];
        let (mut prev, mut cur) = (1.0f64, lp);
        for _ in 1..2 * e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        out[n] = cur * out[rest];
    }
    Ok(out)
}

pub fn sieve(x: usize) -> Vec<usize> {
    if x < 2 {
        return Vec::new();
    }
    let mut is = vec![true; x + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2;
    while i * i <= x {
        if is[i] {
            let mut j = i * i;
            while j <= x {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=x).filter(|&i| is[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactseries::delta;

    #[test]
    fn hecke_matrix_examples() {
        let m = hecke_matrix(12, 2, 4).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(*m.get(0, 0), -24);
        let m = hecke_matrix(12, 3, 6).unwrap();
        assert_eq!(*m.get(0, 0), 252);
        assert!(hecke_matrix(24, 2, 3).is_err());
    }

    #[test]
    fn weight_12_and_16() {
        let f = eigenforms(12, 10, 128).unwrap();
        assert_eq!(f.len(), 1);
        let l2 = f[0].lambda(2).unwrap().to_f64();
        assert!((l2 + 24.0 / 2f64.powf(5.5)).abs() < 1e-14);
        assert!((l2 + 0.5303300859).abs() < 1e-10);
        let g = eigenforms(16, 10, 128).unwrap();
        let l2 = g[0].lambda(2).unwrap().to_f64();
        assert!((l2 - 1.1932426933).abs() < 1e-10);
        assert_eq!(f[0].lambda(1).unwrap().value, 1);
        assert!(eigenforms(14, 10, 128).unwrap().is_empty());
        assert!(eigenforms(10, 10, 128).unwrap().is_empty());
    }

    #[test]
    fn delta_coefficients_match_tau() {
        let f = &eigenforms(12, 100, 128).unwrap()[0];
        let tau = delta(100).unwrap();
        for n in 1..=100usize {
            let want = Float::with_val(200, tau.numerators()[n].clone())
                / Float::with_val(200, n as u32).pow(Float::with_val(200, 11) / 2u32);
            assert!(f.lambda(n).unwrap().contains(&want), "n={n}");
        }
        assert!(f.hecke_residual() <= 2f64.powi(-64));
    }

    #[test]
    fn residual_detects_defects() {
        let f = &eigenforms(12, 100, 128).unwrap()[0];
        let mut vals: Vec<Float> = f.lambda.iter().map(|l| l.value.clone()).collect();
        vals[3] += 0.1;
        assert!(hecke_residual(&vals) >= 0.09);
        // a completely multiplicative sequence that also satisfies the relation
        let ones: Vec<Float> = (1..=50)
            .map(|n: u32| {
                let dn = (1..=n).filter(|d| n % d == 0).count();
                Float::with_val(64, dn as u32)
            })
            .collect();
        assert_eq!(hecke_residual(&ones), 0.0);
    }

    #[test]
    fn weight_24_trace_and_order() {
        let forms = eigenforms(24, 20, 128).unwrap();
        assert_eq!(forms.len(), 2);
        let tr = hecke_matrix(24, 2, 8).unwrap().trace();
        let scale = Float::with_val(128, 2u32).pow(Float::with_val(128, 23) / 2u32);
        let mut s = Float::with_val(128, 0);
        for f in &forms {
            s += Float::with_val(128, &f.lambda(2).unwrap().value * &scale);
        }
        let diff = Float::with_val(128, s - Float::with_val(128, &tr)).abs().to_f64();
        assert!(diff < 1e-20, "{diff}");
        assert!(forms[0].lambda(2).unwrap().value < forms[1].lambda(2).unwrap().value);
        for f in &forms {
            assert!(f.hecke_residual() < 1e-30);
        }
    }

    #[test]
    fn squares_from_primes() {
        let f = &eigenforms(12, 100, 128).unwrap()[0];
        let lam = f.lambda_f64();
        let sq = lambda_squares_f64(&lam, 10).unwrap();
        for n in 1..=10usize {
            assert!((sq[n] - lam[n * n - 1]).abs() < 1e-12, "n={n}");
        }
    }
}
