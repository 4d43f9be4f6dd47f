//! Random walks on ℤᵈ observed through polyhedral norms.

pub mod census;
pub mod error;
pub mod functions;
pub mod green;
pub mod jeulin;
pub mod measure;
pub mod norms;
pub mod quadrature;
pub mod rng;
pub mod stable;
pub mod stats;
pub mod summability;
pub mod walk;

pub use census::{census, CensusMethod, SphereCensus};
pub use error::{Error, Result};
pub use norms::{LatticePoint, NormFamily, NormSpec, UnimodularMatrix};
pub use walk::{McBudget, StepDistribution};
