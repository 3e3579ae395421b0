//! Exact rational matrices, characteristic polynomials and certified real roots.
//!
//! The Hecke matrices we diagonalize are small (dimension at most a few dozen)
//! and have huge integer entries, so everything here favours robustness over
//! asymptotic speed. Roots are located by Newton iteration with implicit
//! deflation and then certified by exact sign changes of the integer
//! polynomial at dyadic bracket endpoints.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::{AddAssignRound, MulAssignRound, Pow};
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(n: usize) -> Self {
        QMatrix { n, entries: vec![Rational::new(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, Rational::from(1));
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        QMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Rational {
        let mut t = Rational::new();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n);
        QMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| Rational::from(a + b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        QMatrix::from_fn(n, |i, j| {
            let mut acc = Rational::new();
            for l in 0..n {
                acc += Rational::from(self.get(i, l) * other.get(l, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                let mut acc = Rational::new();
                for (j, x) in v.iter().enumerate() {
                    acc += Rational::from(self.get(i, j) * x);
                }
                acc
            })
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| *e.denom() == 1)
    }

    fn common_denominator(&self) -> Integer {
        let mut den = Integer::from(1);
        for e in &self.entries {
            den.lcm_mut(e.denom());
        }
        den
    }

    /// Monic characteristic polynomial `det(xI - A)`, constant term first.
    pub fn charpoly(&self) -> Vec<Rational> {
        let n = self.n;
        let den = self.common_denominator();
        let b: Vec<Integer> = self
            .entries
            .iter()
            .map(|e| Integer::from(e.numer() * Integer::from(&den / e.denom())))
            .collect();
        let cb = faddeev_leverrier(n, &b);
        // det(xI - B) with B = den*A gives det(yI - A) = den^{-n} chi_B(den*y)
        let mut out = Vec::with_capacity(n + 1);
        for (i, c) in cb.into_iter().enumerate() {
            let scale = den.clone().pow((n - i) as u32);
            out.push(Rational::from((c, scale)));
        }
        out
    }

    /// Entries rounded to `prec` bits.
    pub fn to_float(&self, prec: u32) -> Vec<Vec<Float>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| Float::with_val(prec, self.get(i, j))).collect())
            .collect()
    }
}

/// Integer characteristic polynomial of an `n x n` integer matrix (row-major).
fn faddeev_leverrier(n: usize, a: &[Integer]) -> Vec<Integer> {
    let mut coeffs = vec![Integer::new(); n + 1];
    coeffs[n] = Integer::from(1);
    if n == 0 {
        return coeffs;
    }
    let matmul = |x: &[Integer], y: &[Integer]| -> Vec<Integer> {
        let mut out = vec![Integer::new(); n * n];
        for i in 0..n {
            for l in 0..n {
                let xil = &x[i * n + l];
                if *xil == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += xil * &y[l * n + j];
                }
            }
        }
        out
    };
    // M_1 = I; c_{n-k} = -tr(A M_k)/k; M_{k+1} = A M_k + c_{n-k} I
    let mut m = vec![Integer::new(); n * n];
    for i in 0..n {
        m[i * n + i] = Integer::from(1);
    }
    for k in 1..=n {
        let am = matmul(a, &m);
        let mut tr = Integer::new();
        for i in 0..n {
            tr += &am[i * n + i];
        }
        let c = -(tr.div_exact(&Integer::from(k)));
        if k < n {
            m = am;
            for i in 0..n {
                m[i * n + i] += &c;
            }
        }
        coeffs[n - k] = c;
    }
    coeffs
}

/// Primitive integer polynomial with the same roots as `p`.
pub fn primitive_integer_poly(p: &[Rational]) -> Vec<Integer> {
    let mut den = Integer::from(1);
    for c in p {
        den.lcm_mut(c.denom());
    }
    let mut out: Vec<Integer> = p
        .iter()
        .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
        .collect();
    let mut g = Integer::new();
    for c in &out {
        g.gcd_mut(c);
    }
    if g > 1 {
        for c in &mut out {
            c.div_exact_mut(&g);
        }
    }
    out
}

/// Exact sign of the integer polynomial `p` at a finite dyadic `x`.
pub fn sign_at(p: &[Integer], x: &Float) -> Ordering {
    let Some((m, e)) = x.to_integer_exp() else {
        return Ordering::Equal;
    };
    let deg = p.len() - 1;
    if e >= 0 {
        let xv = m << (e as u32);
        let mut acc = Integer::new();
        for c in p.iter().rev() {
            acc *= &xv;
            acc += c;
        }
        return acc.cmp0();
    }
    // p(m/s) s^deg = sum c_i m^i s^(deg-i), s = 2^-e
    let s_bits = (-e) as u32;
    let mut acc = p[deg].clone();
    for i in (0..deg).rev() {
        acc *= &m;
        acc += Integer::from(&p[i] << (s_bits * (deg - i) as u32));
    }
    acc.cmp0()
}

fn eval_with_derivative(p: &[Integer], x: &Float, prec: u32) -> (Float, Float) {
    let mut v = Float::with_val(prec, &p[p.len() - 1]);
    let mut d = Float::with_val(prec, 0);
    for c in p.iter().rev().skip(1) {
        d *= x;
        d += &v;
        v *= x;
        v += c;
    }
    (v, d)
}

/// A real root with an exact dyadic bracket `[lo, hi]` across which the
/// defining polynomial changes sign.
#[derive(Clone, Debug)]
pub struct CertifiedRoot {
    pub value: Float,
    pub lo: Float,
    pub hi: Float,
}

impl CertifiedRoot {
    pub fn radius(&self) -> Float {
        let a = Float::with_val(64, &self.value - &self.lo);
        let b = Float::with_val(64, &self.hi - &self.value);
        a.max(&b)
    }

    /// Bisection inside the certified bracket until it is narrower than
    /// `2^-prec` relative to the root.
    pub fn refine(&self, p: &[Integer], prec: u32) -> CertifiedRoot {
        let wp = prec + 32;
        let mut lo = Float::with_val(wp, &self.lo);
        let mut hi = Float::with_val(wp, &self.hi);
        let s_lo = sign_at(p, &lo);
        // Newton from the midpoint first; fall back to bisection when it leaves the bracket.
        let mut x = Float::with_val(wp, &self.value);
        for _ in 0..64 {
            let (v, d) = eval_with_derivative(p, &x, wp);
            if d.is_zero() {
                break;
            }
            let step = Float::with_val(wp, &v / &d);
            let next = Float::with_val(wp, &x - &step);
            if next <= lo || next >= hi {
                break;
            }
            let done = step.is_zero()
                || Float::with_val(64, step.abs_ref()) <= Float::with_val(64, x.abs_ref()) >> (wp - 8);
            x = next;
            if done {
                break;
            }
        }
        let target = |x: &Float| {
            let mag = Float::with_val(64, x.abs_ref());
            if mag.is_zero() {
                Float::with_val(64, 1) >> prec
            } else {
                mag >> prec
            }
        };
        let width = |lo: &Float, hi: &Float| Float::with_val(64, hi - lo);
        // tight bracket around the Newton iterate, verified exactly
        let mut delta = target(&x) >> 2u32;
        for _ in 0..8 {
            let a = Float::with_val(wp, &x - &delta);
            let b = Float::with_val(wp, &x + &delta);
            if a >= lo && b <= hi && sign_at(p, &a) == s_lo && sign_at(p, &b) == s_lo.reverse() {
                lo = a;
                hi = b;
                break;
            }
            delta <<= 4u32;
        }
        while width(&lo, &hi) > target(&x) {
            let mid = Float::with_val(wp, &lo + &hi) >> 1u32;
            match sign_at(p, &mid) {
                Ordering::Equal => {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        let value = Float::with_val(wp, &lo + &hi) >> 1u32;
        CertifiedRoot { value, lo, hi }
    }
}

/// All roots of a polynomial whose roots are real and simple, in ascending order.
///
/// Fails when certification does not succeed, which means the roots are not
/// all real and simple or the precision budget is exhausted.
pub fn real_roots(poly: &[Rational], prec: u32) -> Result<Vec<CertifiedRoot>> {
    let p = primitive_integer_poly(poly);
    let deg = p.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // isolate at modest precision, then refine each bracket to `prec`
    let mut wp = prec.clamp(64, 192) + 32;
    for _ in 0..6 {
        if let Some(roots) = try_real_roots(&p, wp) {
            return Ok(roots.into_iter().map(|r| r.refine(&p, prec)).collect());
        }
        wp *= 2;
    }
    Err(Error::Assertion(format!(
        "could not certify {deg} real simple roots (precision {wp})"
    )))
}

fn try_real_roots(p: &[Integer], wp: u32) -> Option<Vec<CertifiedRoot>> {
    let deg = p.len() - 1;
    // Fujiwara's bound 2 max |c_{n-i} / c_n|^{1/i}
    let lead = Float::with_val(wp, &p[deg]).abs();
    let mut bound = Float::with_val(wp, 0);
    for (i, c) in p[..deg].iter().rev().enumerate() {
        if *c == 0 {
            continue;
        }
        let mut r = Float::with_val(wp, Float::with_val(wp, c).abs() / &lead);
        if i + 1 == deg {
            r /= 2u32;
        }
        let r = r.root((i + 1) as u32);
        if r > bound {
            bound = r;
        }
    }
    bound *= 2u32;
    bound += 1u32;

    let mut roots: Vec<Float> = Vec::with_capacity(deg);
    for _ in 0..deg {
        let mut x = Float::with_val(wp, &bound);
        let mut converged = false;
        for _ in 0..20_000 {
            let (v, d) = eval_with_derivative(p, &x, wp);
            if v.is_zero() {
                converged = true;
                break;
            }
            let mut s = Float::with_val(wp, 0);
            for r in &roots {
                let diff = Float::with_val(wp, &x - r);
                s.add_assign_round(diff.recip(), Round::Nearest);
            }
            let mut denom = Float::with_val(wp, &v * &s);
            denom = Float::with_val(wp, &d - &denom);
            if denom.is_zero() {
                break;
            }
            let step = Float::with_val(wp, &v / &denom);
            x -= &step;
            let mut tol = Float::with_val(64, x.abs_ref());
            tol.mul_assign_round(Float::with_val(64, 1) >> (wp - 12), Round::Up);
            if Float::with_val(64, step.abs_ref()) <= tol {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return None;
        }
        roots.push(x);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));

    let mut out: Vec<CertifiedRoot> = Vec::with_capacity(deg);
    for r in roots {
        let mag = Float::with_val(64, r.abs_ref()).max(&Float::with_val(64, 1));
        // widen the bracket until the exact signs differ; a cluster of close
        // roots loses accuracy in proportion to the inverse gap
        let mut shift = wp - 24;
        let found = loop {
            let delta = Float::with_val(64, &mag >> shift);
            let lo = Float::with_val(wp, &r - &delta);
            let hi = Float::with_val(wp, &r + &delta);
            let sl = sign_at(p, &lo);
            let sh = sign_at(p, &hi);
            if sl != Ordering::Equal && sh != Ordering::Equal && sl != sh {
                break Some((lo, hi));
            }
            if shift < wp / 4 + 8 {
                break None;
            }
            shift -= 8;
        };
        let (lo, hi) = found?;
        if let Some(prev) = out.last() {
            if lo <= prev.hi {
                return None;
            }
        }
        out.push(CertifiedRoot { value: r, lo, hi });
    }
    Some(out)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_float(a: &[Vec<Float>], b: &[Float], prec: u32) -> Option<Vec<Float>> {
    let n = a.len();
    let mut m: Vec<Vec<Float>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<Float> = row.iter().map(|x| Float::with_val(prec, x)).collect();
            r.push(Float::with_val(prec, bi));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            let a = Float::with_val(64, m[i][col].abs_ref());
            let b = Float::with_val(64, m[j][col].abs_ref());
            a.partial_cmp(&b).unwrap_or(Ordering::Equal)
        })?;
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..n {
            let factor = Float::with_val(prec, &m[row][col] / &m[col][col]);
            if factor.is_zero() {
                continue;
            }
            for j in col..=n {
                let t = Float::with_val(prec, &factor * &m[col][j]);
                m[row][j] -= t;
            }
        }
    }
    let mut x = vec![Float::with_val(prec, 0); n];
    for i in (0..n).rev() {
        let mut acc = Float::with_val(prec, &m[i][n]);
        for j in i + 1..n {
            acc -= Float::with_val(prec, &m[i][j] * &x[j]);
        }
        x[i] = acc / &m[i][i];
    }
    Some(x)
}

/// Eigenvector of `a` for the (simple) eigenvalue closest to `mu`, scaled so
/// that the component at `normalize_at` equals one.
pub fn eigenvector(a: &QMatrix, mu: &Float, normalize_at: usize, prec: u32) -> Result<Vec<Float>> {
    let n = a.dim();
    let mut shifted = a.to_float(prec);
    // nudge the shift off the exact eigenvalue so the system stays solvable
    let mut nudge = Float::with_val(prec, mu.abs_ref()).max(&Float::with_val(prec, 1));
    nudge >>= prec / 2;
    let shift = Float::with_val(prec, mu + &nudge);
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= &shift;
    }
    let mut v = vec![Float::with_val(prec, 1); n];
    for _ in 0..3 {
        let w = solve_float(&shifted, &v, prec)
            .ok_or_else(|| Error::Assertion("singular shifted Hecke matrix".into()))?;
        let mut norm = Float::with_val(prec, 0);
        for x in &w {
            if Float::with_val(prec, x.abs_ref()) > norm {
                norm = Float::with_val(prec, x.abs_ref());
            }
        }
        if norm.is_zero() {
            return Err(Error::Assertion("inverse iteration collapsed".into()));
        }
        v = w.into_iter().map(|x| x / &norm).collect();
    }
    let pivot = v[normalize_at].clone();
    if pivot.is_zero() {
        return Err(Error::Assertion(
            "eigenvector vanishes at the normalization index".into(),
        ));
    }
    Ok(v.into_iter().map(|x| x / &pivot).collect())
}

/// Null space of a rational matrix given as rows (each of length `cols`),
/// returned as basis vectors in reduced form.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = Rational::from(m[r][c].recip_ref());
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = Rational::from(&f * &m[r][j]);
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::new(); cols];
            v[f] = Rational::from(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = Rational::from(-&m[row][f]);
            }
            v
        })
        .collect()
}
