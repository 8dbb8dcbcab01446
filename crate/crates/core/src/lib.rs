//! Constructive H-infinity interpolation on finite subsets of the unit disc.
//!
//! The crate builds the linear interpolant `Phi(f)` on the model space of a
//! finite Blaschke product, certifies upper and lower bounds on the
//! interpolation constants `c(sigma, l_a^p(alpha), H^inf)` and checks them
//! against an exact minimal-norm oracle built on the compressed shift.

pub mod acceptance;
pub mod bernstein;
pub mod blaschke;
pub mod bounds;
pub mod error;
pub mod interpolator;
pub mod oracle;
pub mod sampling;
pub mod spaces;
pub mod sweep;
pub mod tail;

pub use blaschke::{MalmquistBasis, MalmquistRep, Sigma, SigmaPoint};
pub use bounds::BoundReport;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spaces::{SpaceSpec, TaylorSeries};

/// Deterministic generator used by every randomized routine.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Generator for trial `index` derived from a master seed.
pub fn derived_rng(master: u64, index: u64) -> Rng {
    use rand::SeedableRng;
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&index.to_le_bytes());
    seed[16..24].copy_from_slice(b"malmqst!");
    Rng::from_seed(seed)
}
