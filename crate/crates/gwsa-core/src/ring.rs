//! Coefficient rings: the prime field GF(p) and the truncations GF(p)[X]/(X^N).
//!
//! `CoeffRing { p, n }` with `n == 0` denotes the plain field; `n >= 1` the
//! truncated polynomial ring. All arithmetic is exact; X^N = 0 is enforced by
//! dropping coefficients beyond the truncation.

use alloc::vec;
use alloc::vec::Vec;

/// Ring descriptor. `p` must be prime; `n == 0` means GF(p) itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoeffRing {
    pub p: u64,
    pub n: usize,
}

/// An element of a `CoeffRing`: coefficients of 1, X, X², ... (length
/// `max(n, 1)`), each reduced mod p.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff(pub Vec<u64>);

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl CoeffRing {
    pub fn field(p: u64) -> Self {
        CoeffRing { p, n: 0 }
    }

    pub fn truncated(p: u64, n: usize) -> Self {
        CoeffRing { p, n }
    }

    /// Number of stored coefficients per element.
    pub fn width(&self) -> usize {
        self.n.max(1)
    }

    pub fn zero(&self) -> Coeff {
        Coeff(vec![0; self.width()])
    }

    pub fn one(&self) -> Coeff {
        self.scalar(1)
    }

    /// The constant `s` (an integer reduced mod p).
    pub fn scalar(&self, s: u64) -> Coeff {
        let mut v = vec![0; self.width()];
        v[0] = s % self.p;
        Coeff(v)
    }

    /// The monomial X (zero in the plain field; panics if n == 1 would make
    /// X = 0 — that is still representable, just zero).
    pub fn x(&self) -> Coeff {
        let mut v = vec![0; self.width()];
        if self.n >= 2 {
            v[1] = 1;
        }
        Coeff(v)
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        Coeff(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        Coeff(a.0.iter().map(|x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        let w = self.width();
        let mut v = vec![0u64; w];
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if i + j >= w {
                    break;
                }
                if *y != 0 {
                    v[i + j] = (v[i + j] + x * y) % self.p;
                }
            }
        }
        Coeff(v)
    }

    pub fn scale(&self, a: &Coeff, s: u64) -> Coeff {
        let s = s % self.p;
        Coeff(a.0.iter().map(|x| x * s % self.p).collect())
    }

    pub fn is_zero(&self, a: &Coeff) -> bool {
        a.0.iter().all(|x| *x == 0)
    }

    /// Units are exactly the elements with nonzero constant term.
    pub fn is_unit(&self, a: &Coeff) -> bool {
        a.0[0] % self.p != 0
    }

    /// Multiplicative inverse of a unit (power-series inversion, truncated).
    pub fn inv(&self, a: &Coeff) -> Coeff {
        debug_assert!(self.is_unit(a));
        let w = self.width();
        let c0 = inv_mod(a.0[0], self.p);
        let mut v = vec![0u64; w];
        v[0] = c0;
        for k in 1..w {
            // sum_{j<k} v[j] * a[k-j] must cancel.
            let mut s = 0u64;
            for j in 0..k {
                s = (s + v[j] * (a.0[k - j] % self.p)) % self.p;
            }
            v[k] = (self.p - s) % self.p * c0 % self.p;
        }
        Coeff(v)
    }
}
