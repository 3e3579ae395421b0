//! Reference computations that share no code with the library.

use num_complex::Complex64;
use rug::{Integer, Rational};

/// `log Gamma(z)` for `Re z > 0`: recurrence up to `|z| >= 20`, then Stirling.
pub fn lgamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 20.0 {
        shift += z.ln();
        z += 1.0;
    }
    // B_{2j} / (2j (2j - 1))
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in C {
        series += c * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// `V(x) = (1/2 pi i) int_(c) (2 pi)^{-s} Gamma(s + k/2)/Gamma(k/2) x^{-s} ds/s`
/// by the trapezoidal rule on `Re s = c`.
pub fn v_contour(k: u32, x: f64, c: f64) -> f64 {
    let a = k as f64 / 2.0;
    let g0 = lgamma(Complex64::new(a, 0.0));
    let log2pix = (2.0 * std::f64::consts::PI * x).ln();
    let h = 0.01;
    let integrand = |t: f64| -> f64 {
        let s = Complex64::new(c, t);
        ((lgamma(s + a) - g0 - s * log2pix).exp() / s).re
    };
    let mut acc = 0.5 * integrand(0.0);
    let mut t = h;
    loop {
        let v = integrand(t);
        acc += v;
        if t > 20.0 && v.abs() < 1e-22 {
            break;
        }
        t += h;
    }
    acc * h / std::f64::consts::PI
}

/// `J_nu(x) = sum_m (-1)^m (x/2)^{2m+nu} / (m! (m+nu)!)` in exact rationals.
pub fn bessel_series(nu: u32, x: &Rational, terms: u32) -> Rational {
    let half = Rational::from(x / 2u32);
    let sq = Rational::from(&half * &half);
    let mut term = Rational::from(1);
    for _ in 0..nu {
        term *= &half;
    }
    let mut fact = Integer::from(1);
    for i in 1..=nu {
        fact *= i;
    }
    term /= fact;
    let mut acc = Rational::new();
    for m in 0..terms {
        acc += &term;
        term *= &sq;
        term /= Integer::from(m + 1) * Integer::from(m + 1 + nu);
        term = -term;
    }
    acc
}

/// `q prod (1 - q^n)^24`.
pub fn naive_delta(nmax: usize) -> Vec<Integer> {
    let mut p = vec![Integer::new(); nmax + 1];
    p[0] = Integer::from(1);
    for n in 1..=nmax {
        for _ in 0..24 {
            for i in (n..=nmax).rev() {
                let t = p[i - n].clone();
                p[i] -= t;
            }
        }
    }
    let mut out = vec![Integer::new(); nmax + 1];
    out[1..].clone_from_slice(&p[..nmax]);
    out
}
