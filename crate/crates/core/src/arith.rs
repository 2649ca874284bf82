//! Modular arithmetic and exact-phase helpers.

use std::f64::consts::TAU;

use num_complex::Complex64;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Least non-negative residue of a signed integer.
#[inline]
pub fn reduce_signed(k: i64, m: u64) -> u64 {
    (k as i128).rem_euclid(m as i128) as u64
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `exp(2πi·r/q)` for an exact residue `r` modulo `q`.
#[inline]
pub fn unit_root(r: u64, q: u64) -> Complex64 {
    // map to (-q/2, q/2] so the float angle stays small
    let signed = if 2 * (r as u128) > q as u128 {
        -((q - r) as f64)
    } else {
        r as f64
    };
    let (s, c) = (TAU * (signed / q as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Lookup table of `exp(2πi·r/q)` for `r = 0..q`, used when `q` is small.
#[derive(Clone, Debug)]
pub struct RootTable {
    q: u64,
    table: Option<Vec<Complex64>>,
}

impl RootTable {
    /// Largest modulus that gets a materialized table.
    pub const MAX_TABLE: u64 = 1 << 20;

    pub fn new(q: u64) -> Self {
        let table = (q <= Self::MAX_TABLE).then(|| (0..q).map(|r| unit_root(r, q)).collect());
        Self { q, table }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn get(&self, r: u64) -> Complex64 {
        match &self.table {
            Some(t) => t[r as usize],
            None => unit_root(r, self.q),
        }
    }
}
