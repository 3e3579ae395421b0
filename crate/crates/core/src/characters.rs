//! Fundamental discriminants and the real primitive characters attached to them.

use crate::error::{Error, Result};

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
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

/// Whether `d` is the discriminant of a quadratic field, or `d = 1`.
pub fn is_fundamental(d: i64) -> Result<bool> {
    if d == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    if d == 1 {
        return Ok(true);
    }
    let m = d.rem_euclid(4);
    if m == 1 {
        return Ok(is_squarefree(d.unsigned_abs()));
    }
    if m == 0 {
        let q = d / 4;
        let r = q.rem_euclid(4);
        return Ok((r == 2 || r == 3) && is_squarefree(q.unsigned_abs()));
    }
    Ok(false)
}

/// Kronecker symbol `(d | n)` for arbitrary integers.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        // (d|2) = +1 for d = +-1 mod 8, -1 for d = +-3 mod 8
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (d mod n | n) for odd positive n
    let mut a = d.rem_euclid(n);
    let mut b = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(b % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

/// The character `chi_D` of a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KroneckerChar {
    d: i64,
}

impl KroneckerChar {
    pub fn new(d: i64) -> Result<Self> {
        if !is_fundamental(d)? {
            return Err(Error::NotFundamental(d));
        }
        Ok(KroneckerChar { d })
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn conductor(&self) -> u64 {
        self.d.unsigned_abs()
    }

    /// `chi_D(-1)`, equal to the sign of `D`.
    pub fn parity(&self) -> i32 {
        if self.d > 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_odd(&self) -> bool {
        self.d % 2 != 0
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.d, n)
    }

    /// `chi_D(-1) = i^k`, i.e. `sign(D) = (-1)^{k/2}`.
    pub fn parity_matches(&self, k: u32) -> Result<bool> {
        if k % 2 == 1 {
            return Err(Error::UnsupportedWeight(k as i64));
        }
        let want = if k % 4 == 0 { 1 } else { -1 };
        Ok(self.parity() == want)
    }
}

/// `chi_D(n)`; `d` must be fundamental.
pub fn chi(d: i64, n: i64) -> Result<i32> {
    Ok(KroneckerChar::new(d)?.eval(n))
}

pub fn parity_matches(d: i64, k: u32) -> Result<bool> {
    KroneckerChar::new(d)?.parity_matches(k)
}

/// Odd fundamental discriminants `D` with `|D| <= bound` and `sign(D) = sign`.
pub fn odd_fundamentals(bound: u64, sign: i32) -> Vec<i64> {
    (1..=bound as i64)
        .map(|a| if sign > 0 { a } else { -a })
        .filter(|&d| d % 2 != 0 && is_fundamental(d).unwrap_or(false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(5).unwrap());
        assert!(!is_fundamental(9).unwrap());
        assert!(is_fundamental(1).unwrap());
        assert!(is_fundamental(-3).unwrap());
        assert!(is_fundamental(-4).unwrap());
        assert!(is_fundamental(8).unwrap());
        assert!(is_fundamental(12).unwrap());
        assert!(!is_fundamental(-1).unwrap());
        assert!(!is_fundamental(16).unwrap());
        assert!(!is_fundamental(3).unwrap());
        assert_eq!(is_fundamental(0), Err(Error::ZeroDiscriminant));
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(5, 2).unwrap(), -1);
        assert_eq!(chi(-3, -1).unwrap(), -1);
        assert_eq!(chi(5, 10).unwrap(), 0);
        assert_eq!(chi(1, 7).unwrap(), 1);
        assert_eq!(chi(-4, 3).unwrap(), -1);
        assert_eq!(chi(8, 3).unwrap(), -1);
        assert_eq!(chi(8, 7).unwrap(), 1);
    }

    #[test]
    fn parity_examples() {
        assert!(parity_matches(5, 12).unwrap());
        assert!(!parity_matches(5, 14).unwrap());
        assert!(parity_matches(-3, 14).unwrap());
        assert!(parity_matches(5, 13).is_err());
    }

    // Euler's criterion for odd prime conductors
    #[test]
    fn agrees_with_euler_criterion() {
        for &d in &[5i64, -3, 13, -7, 17, -11, 29, -19] {
            let p = d.unsigned_abs();
            for n in 1..200u64 {
                let a = n % p;
                let want = if a == 0 {
                    0
                } else {
                    let mut acc = 1u64;
                    for _ in 0..(p - 1) / 2 {
                        acc = acc * a % p;
                    }
                    if acc == 1 {
                        1
                    } else {
                        -1
                    }
                };
                assert_eq!(chi(d, n as i64).unwrap(), want, "d={d} n={n}");
            }
        }
    }
}
