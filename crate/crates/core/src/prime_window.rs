//! The prime window `(⌈m/2⌉, m]` and the density constants bounding its size.
//!
//! The union point sets take one Korobov p-set per prime of the window. The
//! error analysis needs `c·m/log m ≤ |window(m)| ≤ C·m/log m`; the constants
//! are calibrated empirically by [`calibrate_constants`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Above this bound windows are sieved segment-wise instead of from zero.
pub const SEGMENTED_ABOVE: u64 = 10_000_000;

/// Sieve of Eratosthenes over `0..=limit`.
pub fn sieve(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_prime[i] {
            let mut j = i * i;
            while j <= n {
                is_prime[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_prime
}

/// Primes in the closed interval `[lo, hi]` via a segmented sieve.
fn segmented_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < lo {
        return Vec::new();
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    let base: Vec<u64> = sieve(root)
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect();
    let mut mark = vec![true; (hi - lo + 1) as usize];
    for &q in &base {
        let start = (q * q).max(lo.div_ceil(q) * q);
        let mut j = start;
        while j <= hi {
            mark[(j - lo) as usize] = false;
            j += q;
        }
    }
    mark.iter()
        .enumerate()
        .filter_map(|(i, &b)| {
            let v = lo + i as u64;
            (b && v >= 2).then_some(v)
        })
        .collect()
}

/// Primes `p` with `⌈m/2⌉ < p ≤ m`, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeWindow {
    m: u64,
    primes: Vec<u64>,
}

impl PrimeWindow {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Smallest window prime. Windows are never empty for `m ≥ 2`.
    pub fn min_prime(&self) -> u64 {
        self.primes[0]
    }

    /// `Σ p²` over the window, i.e. the size of either union point set.
    pub fn total_points(&self) -> u64 {
        self.primes.iter().map(|p| p * p).sum()
    }
}

/// Lower end (exclusive) of the window for `m`.
pub fn window_floor(m: u64) -> u64 {
    m.div_ceil(2)
}

pub fn enumerate_window(m: u64) -> Result<PrimeWindow> {
    if m < 2 {
        return domain(format!("prime window needs m >= 2, got {m}"));
    }
    let lo = window_floor(m) + 1;
    let primes = if m <= SEGMENTED_ABOVE {
        let flags = sieve(m);
        (lo..=m).filter(|&v| flags[v as usize]).collect()
    } else {
        segmented_primes(lo, m)
    };
    Ok(PrimeWindow { m, primes })
}

/// `|window(m)|·log(m)/m`, the quantity bracketed by the density constants.
pub fn density_ratio(m: u64) -> Result<f64> {
    let w = enumerate_window(m)?;
    Ok(ratio(w.len(), m))
}

fn ratio(count: usize, m: u64) -> f64 {
    count as f64 * (m as f64).ln() / m as f64
}

/// Window sizes `|window(m)|` for every `m` in `0..=m_max` (zero below 2),
/// from one sieve and a prefix count.
pub fn window_counts(m_max: u64) -> Vec<usize> {
    let flags = sieve(m_max);
    let mut pi = Vec::with_capacity(flags.len());
    let mut c = 0usize;
    for &f in &flags {
        c += f as usize;
        pi.push(c);
    }
    (0..=m_max)
        .map(|m| {
            if m < 2 {
                0
            } else {
                pi[m as usize] - pi[window_floor(m) as usize]
            }
        })
        .collect()
}

/// Constants `c_P`, `C_P` bracketing the window density up to `m_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConstants {
    #[serde(rename = "c_p")]
    pub lower: f64,
    #[serde(rename = "C_p")]
    pub upper: f64,
    pub m_max: u64,
}

impl DensityConstants {
    /// Output of `calibrate_constants(100_000)`.
    pub const DEFAULT: DensityConstants = DensityConstants {
        lower: 0.230,
        upper: 0.620,
        m_max: 100_000,
    };

    pub fn new(lower: f64, upper: f64, m_max: u64) -> Result<Self> {
        let c = DensityConstants { lower, upper, m_max };
        c.validate()?;
        Ok(c)
    }

    /// Checks `0 < c_P < min(1, C_P)`.
    pub fn validate(&self) -> Result<()> {
        if !(self.lower > 0.0 && self.lower < 1.0 && self.lower < self.upper) {
            return Err(Error::Domain(format!(
                "density constants need 0 < c_P < min(1, C_P), got c_P={} C_P={}",
                self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// Whether both density inequalities hold at `m` for a window of `count` primes.
    pub fn brackets(&self, m: u64, count: usize) -> bool {
        let scale = m as f64 / (m as f64).ln();
        self.lower * scale <= count as f64 && count as f64 <= self.upper * scale
    }
}

impl Default for DensityConstants {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Sweeps `2 ≤ m ≤ m_max`; `c_P` is the minimum ratio rounded down to three
/// decimals and `C_P` the maximum rounded up.
pub fn calibrate_constants(m_max: u64) -> Result<DensityConstants> {
    if m_max < 2 {
        return domain(format!("calibration needs m_max >= 2, got {m_max}"));
    }
    let counts = window_counts(m_max);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in 2..=m_max {
        let r = ratio(counts[m as usize], m);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(DensityConstants {
        lower: (lo * 1000.0).floor() / 1000.0,
        upper: (hi * 1000.0).ceil() / 1000.0,
        m_max,
    })
}

/// Smallest `m ≥ 2` whose window contains only primes greater than `d`.
///
/// The least window prime is the first prime after `⌈m/2⌉`, so the window
/// clears `d` exactly when `⌈m/2⌉` reaches the largest prime `q ≤ d`.
pub fn smallest_admissible_m(d: u64) -> u64 {
    if d < 2 {
        return 2;
    }
    let q = (2..=d).rev().find(|&v| crate::arith::is_prime(v)).unwrap_or(2);
    (2 * q - 1).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_examples() {
        assert_eq!(enumerate_window(2).unwrap().primes(), &[2]);
        assert_eq!(enumerate_window(10).unwrap().primes(), &[7]);
        assert_eq!(enumerate_window(20).unwrap().primes(), &[11, 13, 17, 19]);
        assert_eq!(enumerate_window(4).unwrap().primes(), &[3]);
        assert_eq!(enumerate_window(14).unwrap().primes(), &[11, 13]);
    }

    #[test]
    fn m_below_two_is_rejected() {
        assert!(matches!(enumerate_window(1), Err(Error::Domain(_))));
        assert!(matches!(enumerate_window(0), Err(Error::Domain(_))));
        assert!(density_ratio(1).is_err());
        assert!(calibrate_constants(1).is_err());
    }

    #[test]
    fn density_ratio_examples() {
        assert!((density_ratio(2).unwrap() - 0.3466).abs() < 5e-5);
        assert!((density_ratio(10).unwrap() - 0.2303).abs() < 5e-5);
        assert!((density_ratio(20).unwrap() - 0.5991).abs() < 5e-5);
    }

    #[test]
    fn calibration_examples() {
        let c = calibrate_constants(2).unwrap();
        assert_eq!((c.lower, c.upper), (0.346, 0.347));
        // the maximum up to 20 sits at m = 19: 4·log(19)/19 = 0.61988
        let c = calibrate_constants(20).unwrap();
        assert_eq!((c.lower, c.upper), (0.230, 0.620));
    }

    #[test]
    fn segmented_matches_plain_sieve() {
        let flags = sieve(5000);
        let plain: Vec<u64> = (1000..=5000).filter(|&v| flags[v as usize]).collect();
        assert_eq!(segmented_primes(1000, 5000), plain);
        assert_eq!(segmented_primes(0, 10), vec![2, 3, 5, 7]);
    }

    #[test]
    fn large_window_uses_segmented_path() {
        let m = SEGMENTED_ABOVE + 100;
        let w = enumerate_window(m).unwrap();
        assert!(w.min_prime() > window_floor(m));
        let tail: Vec<u64> = w.primes().iter().copied().filter(|&p| p + 2000 > m).collect();
        let expect: Vec<u64> = (m - 1999..=m).filter(|&v| crate::arith::is_prime(v)).collect();
        assert_eq!(tail, expect);
    }

    #[test]
    fn window_counts_match_enumeration() {
        let counts = window_counts(500);
        for m in 2..=500 {
            assert_eq!(counts[m as usize], enumerate_window(m).unwrap().len(), "m={m}");
        }
    }

    #[test]
    fn admissible_m_matches_scan() {
        for d in 1..=200u64 {
            let scan = (2..).find(|&m| enumerate_window(m).unwrap().min_prime() > d).unwrap();
            assert_eq!(smallest_admissible_m(d), scan, "d={d}");
        }
        assert_eq!(smallest_admissible_m(60), 117);
    }

    #[test]
    fn constants_validation() {
        assert!(DensityConstants::new(0.23, 0.62, 10).is_ok());
        assert!(DensityConstants::new(0.0, 0.62, 10).is_err());
        assert!(DensityConstants::new(0.7, 0.62, 10).is_err());
        assert!(DensityConstants::new(1.0, 2.0, 10).is_err());
    }
}
