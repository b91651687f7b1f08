//! Two-step quantum walks of SU(2)_k anyons on a ladder.
//!
//! The walker's spatial density matrix evolves under a completely positive
//! map whose coefficients are Markov-trace expectation values of short braid
//! words. Those moments come either from closed forms ([`moments::TableProvider`])
//! or from a Kauffman-bracket state sum ([`braid`]). Besides the exact banded
//! evolution the crate provides the circulant Fourier-space approximation,
//! reference walks and variance fitting.

pub mod analysis;
pub mod braid;
pub mod circulant;
pub mod error;
pub mod exact;
pub mod model;
pub mod moments;
pub mod reference;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result};
pub use model::{AnyonModel, Level};
pub use moments::{KappaPair, MomentFamily, MomentMode, MomentProvider, OffsetMoments};
pub use scalar::Real;
pub use trace::{Distribution, TracePoint, WalkTrace};

pub type Model = AnyonModel<f64>;
pub type Table = moments::TableProvider<f64>;
pub type Oracle = moments::OracleProvider<f64>;
pub type DensityMatrix = exact::SpatialDensityMatrix<f64>;
pub type Trace = WalkTrace<f64>;

pub type Model32 = AnyonModel<f32>;
pub type Table32 = moments::TableProvider<f32>;
pub type Trace32 = WalkTrace<f32>;
