//! Quasi-Monte Carlo integration with multiset unions of Korobov p-sets.
//!
//! Points are generated with exact rational coordinates, so every phase
//! `k·x mod 1` entering an exponential sum or a Fourier evaluation is an
//! exact integer residue before the single conversion to floating point.
//!
//! Modules:
//!
//! * [`prime_window`]: primes in `(⌈m/2⌉, m]` and their density constants;
//! * [`korobov`]: S- and T-type p-sets and their unions;
//! * [`fourier`]: sparse Fourier series and the F1/F2/F3 norms;
//! * [`expsum`]: exponential sums and the bounds they obey;
//! * [`integrator`]: the equal-weight rule, error certificates and budgets;
//! * [`adversary`]: fooling functions for arbitrary linear algorithms;
//! * [`oracles`]: slow independent reference implementations;
//! * [`checks`]: verification sweeps built on the above.
//!
//! Data-parallel loops run on rayon when the `parallel` feature (default) is
//! enabled. Reductions are chunked deterministically, so results do not
//! depend on the thread count.

pub mod adversary;
pub mod arith;
pub mod checks;
pub mod error;
pub mod exec;
pub mod expsum;
pub mod fourier;
pub mod integrator;
pub mod io;
pub mod korobov;
pub mod oracles;
pub mod prime_window;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fourier::{Frequency, SpectralFunction, WeightScheme};
pub use korobov::{KorobovSet, RationalPoint, SetKind, UnionPointSet};
pub use prime_window::{DensityConstants, PrimeWindow};
