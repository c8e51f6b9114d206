//! Root systems, Dunkl operators, Calogero-Moser Hamiltonians and Dunkl
//! process simulation.
//!
//! Exact computations use [`Rational`] coefficients and [`MultiPoly`]
//! polynomials; pointwise numerics use `f64`. Most types are generic over
//! [`Scalar`] so the same code serves both.

pub mod cm;
pub mod dunkl;
pub mod error;
pub mod func;
pub mod polyx;
pub mod report;
pub mod rootsys;
pub mod scalar;
pub mod sde;
pub mod transform;

pub use cm::{pf_matrix, CmParams, SpinChainMatrix};
pub use dunkl::DunklContext;
pub use error::{Error, Result};
pub use func::{PointFunction, PolyFunction};
pub use polyx::{parse_poly, MultiPoly};
pub use report::{Comparison, IdentityReport};
pub use rootsys::{reflect, Family, Root, RootScale, RootSystem};
pub use scalar::{Rational, Scalar};
pub use sde::{EnsembleStats, SimConfig, Trajectory};
pub use transform::{TestFunction, TransformParams};
