//! Slow reference implementations used to cross-check the main paths.
//!
//! These take a different arithmetic route on purpose: float coordinates and
//! float dot products instead of exact residues, repeated addition instead
//! of modular exponentiation, trial division instead of sieving.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::fourier::Frequency;
use crate::korobov::KorobovSet;

/// Running comparison between a main path and its oracle.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub subject: String,
    pub max_abs_diff: f64,
    pub cases_run: usize,
    pub worst_case: String,
}

impl OracleReport {
    pub fn new(subject: impl Into<String>) -> Self {
        OracleReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn record(&mut self, diff: f64, case: impl FnOnce() -> String) {
        self.cases_run += 1;
        if diff > self.max_abs_diff || self.cases_run == 1 || diff.is_nan() {
            self.max_abs_diff = if diff.is_nan() {
                f64::INFINITY
            } else {
                diff.max(self.max_abs_diff)
            };
            self.worst_case = case();
        }
    }
}

/// Direct `(1/p²)·Σ exp(2πi k·x)` with float coordinates.
pub fn oracle_expsum(k: &Frequency, set: &KorobovSet) -> Complex64 {
    let dense = k.to_dense();
    let mut total = Complex64::new(0.0, 0.0);
    for x in set.points() {
        let t: f64 = x.to_f64().iter().zip(&dense).map(|(xj, &kj)| xj * kj as f64).sum();
        total += Complex64::new((TAU * t).cos(), (TAU * t).sin());
    }
    total / set.len() as f64
}

/// `Σ_j k_j·j·h₀^(j−1) ≡ 0 (mod p)` root count by repeated addition.
pub fn oracle_roots(k: &Frequency, p: u64) -> usize {
    let dense = k.to_dense();
    let addmul = |a: u64, times: u64| -> u64 {
        let mut acc = 0u64;
        for _ in 0..times {
            acc = (acc + a) % p;
        }
        acc
    };
    let mut count = 0;
    for h0 in 0..p {
        let mut power = 1 % p; // h0^(j-1), starting at j = 1
        let mut total = 0u64;
        for (idx, &kj) in dense.iter().enumerate() {
            let j = idx as u64 + 1;
            let kj_mod = kj.rem_euclid(p as i64) as u64;
            let coef = addmul(kj_mod, j % p);
            total = (total + addmul(power, coef)) % p;
            power = addmul(power, h0);
        }
        if total == 0 {
            count += 1;
        }
    }
    count
}

fn trial_division_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Primes in `(⌈m/2⌉, m]` by trial division.
pub fn oracle_recount_primes(m: u64) -> usize {
    ((m.div_ceil(2) + 1)..=m).filter(|&v| trial_division_prime(v)).count()
}

/// Window sizes for every `m ≤ m_max`, each integer tested once by trial division.
pub fn oracle_window_counts(m_max: u64) -> Vec<usize> {
    let flags: Vec<bool> = (0..=m_max).map(trial_division_prime).collect();
    (0..=m_max)
        .map(|m| {
            if m < 2 {
                0
            } else {
                ((m.div_ceil(2) + 1)..=m).filter(|&v| flags[v as usize]).count()
            }
        })
        .collect()
}

pub fn oracle_window(m: u64) -> Vec<u64> {
    ((m.div_ceil(2) + 1)..=m).filter(|&v| trial_division_prime(v)).collect()
}

/// `max_h |Σ_i c_i·exp(2πi k_i·x_h)|` on float nodes with dense dot products.
pub fn oracle_residual(nodes: &[Vec<f64>], freqs: &[Frequency], c: &[Complex64]) -> f64 {
    nodes
        .iter()
        .map(|x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, ci) in freqs.iter().zip(c) {
                let t: f64 = k.to_dense().iter().zip(x).map(|(&kj, xj)| kj as f64 * xj).sum();
                s += ci * Complex64::new((TAU * t).cos(), (TAU * t).sin());
            }
            s.norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korobov::{s_set, t_set};

    #[test]
    fn expsum_oracle_examples() {
        let k = Frequency::from_dense(&[1]);
        let v = oracle_expsum(&k, &t_set(3, 1).unwrap());
        assert!((v - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let v = oracle_expsum(&Frequency::zero(2), &s_set(5, 2).unwrap());
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = oracle_expsum(&k, &s_set(3, 1).unwrap());
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn roots_oracle_examples() {
        assert_eq!(oracle_roots(&Frequency::from_dense(&[0, 1]), 5), 1);
        assert_eq!(oracle_roots(&Frequency::from_dense(&[1, 1]), 7), 1);
        assert_eq!(oracle_roots(&Frequency::from_dense(&[1]), 11), 0);
    }

    #[test]
    fn recount_examples() {
        assert_eq!(oracle_recount_primes(10), 1);
        assert_eq!(oracle_recount_primes(2), 1);
        assert_eq!(oracle_recount_primes(20), 4);
    }

    #[test]
    fn report_tracks_worst_case() {
        let mut r = OracleReport::new("x");
        r.record(1e-15, || "a".into());
        r.record(1e-12, || "b".into());
        r.record(1e-14, || "c".into());
        assert_eq!(r.cases_run, 3);
        assert_eq!(r.max_abs_diff, 1e-12);
        assert_eq!(r.worst_case, "b");
    }
}
