//! Pluriclosed steady solitons on diagonal Hopf surfaces.
//!
//! The crate constructs the invariant steady soliton of the pluriclosed flow
//! on `C^2 \ {0} / (z1, z2) ~ (α z1, β z2)`, evolves the reduced flow
//! `k_t = (k_x / (k (1 - k)))_x` to watch it attract nearby data, and checks
//! the two generalized Kähler structures carried by the soliton.
//!
//! Everything numerical is generic over a [`Real`] scalar (`f32` or `f64`);
//! the `*64` aliases below fix `f64`.

// `!(x > 0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod gkforms;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod scalar;
pub mod soliton;

pub use error::{Error, Result};
pub use geometry::{
    ConstantProfile, Diagonal, FdProfile, FnLogit, FnProfile, LogitProfile, MetricProfile, ProfileJets, SurfaceParams,
};
pub use jet::Jet;
pub use linalg::Mat2;
pub use scalar::Real;
pub use soliton::SolitonProfile;

pub type SurfaceParams64 = SurfaceParams<f64>;
pub type SurfaceParams32 = SurfaceParams<f32>;
pub type SolitonProfile64 = SolitonProfile<f64>;
pub type SolitonProfile32 = SolitonProfile<f32>;
pub type Jet64 = Jet<f64>;
pub type Mat2x64 = Mat2<f64>;
pub type FlowState64 = flow::FlowState<f64>;
pub type FlowDiagnostics64 = flow::FlowDiagnostics<f64>;
pub type InvariantForm64 = gkforms::InvariantForm<f64>;
