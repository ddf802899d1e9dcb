//! Gibbs–Poisson occupancy models for species sampling.
//!
//! `n` boxes (species) receive `k` balls (sampled individuals); box abundances are iid
//! compound-Poisson variables conditioned on their total. Everything is driven by a
//! generator weight family `φ•` ([`weights`]) through the partition polynomials
//! `σ_k(θ)` and Bell coefficient triangles ([`bellpoly`]). On top of those the crate
//! provides
//!
//! * exact finite-`n` laws: joint occupancy, marginals, the number of distinct species
//!   `P_{n,k}`, frequencies of frequencies and factorial moments ([`occupancy`]);
//! * the infinitely-many-species limit `n → ∞, nθ → γ` ([`starlimit`]);
//! * estimators of `n` and of the diversity `γ` ([`estimate`]);
//! * seeded samplers that cross-validate the analytic laws ([`sample`]);
//! * identity and Monte Carlo verification suites ([`verify`]).
//!
//! All algorithms are generic over a [`Scalar`]: `f64`, the overflow-free log-space
//! [`LogF64`], or the exact [`Exact`] rationals.

pub mod bellpoly;
pub mod combinat;
pub mod error;
pub mod estimate;
pub mod occupancy;
pub mod sample;
pub mod scalar;
pub mod special;
pub mod starlimit;
pub mod stats;
pub mod verify;
pub mod weights;

pub use num_rational::BigRational;

pub use bellpoly::{BellKind, BellTriangle, SigmaTable, StirlingTable};
pub use error::{Error, Result};
pub use estimate::{Estimate, Method, SampleSummary};
pub use occupancy::{Occupancy, OccupancySample};
pub use sample::{RngStream, SubordinatorJumps};
pub use scalar::{Field, LogReal, Param, Scalar};
pub use starlimit::StarModel;
pub use weights::{Family, Membership, WeightSequence};

/// Exact rational scalar.
pub type Exact = BigRational;
/// Log-space double-precision scalar.
pub type LogF64 = LogReal<f64>;

pub type ExactSigmaTable = SigmaTable<Exact>;
pub type LogSigmaTable = SigmaTable<LogF64>;
pub type ExactBellTriangle = BellTriangle<Exact>;
pub type LogBellTriangle = BellTriangle<LogF64>;
pub type ExactOccupancy = Occupancy<Exact>;
pub type LogOccupancy = Occupancy<LogF64>;
pub type ExactStarModel = StarModel<Exact>;
pub type LogStarModel = StarModel<LogF64>;
