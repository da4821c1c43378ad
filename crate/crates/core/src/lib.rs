//! Spectral toolkit for weighted hypergraphs.
//!
//! The central object is the nonlinear Markov operator `M` of a hypergraph and
//! its Laplacian `L = I - M`. On top of it the crate provides the continuous
//! time dispersion process, eigenvalue computation (exhaustive enumeration,
//! projected iteration and an SDP relaxation), sweep rounding, small-set
//! expansion, multi-partitioning, sparsest cut with demands and the vertex
//! expansion reduction for graphs.
//!
//! Vectors on vertices come in three linearly related coordinate systems:
//!
//! * measures `mu` (the dispersion process moves mass, `sum mu` is conserved),
//! * densities `x = D^-1 mu` (argmax/argmin structure, Rayleigh quotients, sweeps),
//! * normalized vectors `f = D^-1/2 mu` (eigenvectors, projectors, the SDP).
//!
//! On regular hypergraphs all three agree up to scaling.
//!
//! Structural code is generic over the [`Scalar`] type (`f32` or `f64`);
//! dense linear algebra, randomized rounding and the SDP are `f64` only.

extern crate openblas_src;

pub mod corpus;
pub mod cut;
pub mod dispersion;
mod error;
pub mod hypergraph;
mod linalg;
mod maxform;
pub mod operator;
pub mod partition;
pub mod rng;
mod sdp;
pub mod spectral;
pub mod verify;
pub mod vertexexp;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

pub use cut::{CutResult, PartitionResult, RatioType};
pub use error::{HgError, Result};
pub use hypergraph::Hypergraph;

/// Floating point type usable for hypergraph weights and vertex values.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static
{
    /// Converts an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Widens to `f64`.
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type Hypergraph32 = Hypergraph<f32>;
pub type Hypergraph64 = Hypergraph<f64>;
pub type CutResult32 = CutResult<f32>;
pub type CutResult64 = CutResult<f64>;
pub type PartitionResult64 = PartitionResult<f64>;
pub type SupportGraph32 = operator::SupportGraph<f32>;
pub type SupportGraph64 = operator::SupportGraph<f64>;
pub type DispersionTrace32 = dispersion::DispersionTrace<f32>;
pub type DispersionTrace64 = dispersion::DispersionTrace<f64>;
