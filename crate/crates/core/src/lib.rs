//! Translation-invariant matrix product states through their transfer
//! channels, the renormalization flow to zero-correlation-length fixed points,
//! discrete higher Berry classes of parametrized families, and topological
//! T-duality of circle bundles with H-flux.
//!
//! Numerical modules are generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`, which is what the CLI and file formats use.
//! Integral cohomology is exact (arbitrary-precision integers).

pub mod berry;
pub mod channel;
pub mod cohomology;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rg;
pub mod scalar;
pub mod tduality;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type MpsTensor = channel::MpsTensor<f64>;
pub type QuantumChannel = channel::QuantumChannel<f64>;
pub type DensityOp = channel::DensityOp<f64>;
pub type Sfcs = channel::Sfcs<f64>;
pub type Isometry = channel::Isometry<f64>;
pub type FixedPointData = rg::FixedPointData<f64>;
pub type TensorFamily = berry::TensorFamily<f64>;
pub type GaugeData = berry::GaugeData<f64>;
pub type PhaseData = berry::PhaseData<f64>;
pub type BerryOutput = berry::BerryOutput<f64>;
pub type RealCochain = cohomology::RealCochain<f64>;

pub type MpsTensor32 = channel::MpsTensor<f32>;
pub type QuantumChannel32 = channel::QuantumChannel<f32>;
pub type PhaseData32 = berry::PhaseData<f32>;

/// Default tolerance for algebraic identities.
pub const TOL_ALG: f64 = 1e-10;
/// Default tolerance for spectral quantities.
pub const TOL_SPEC: f64 = 1e-8;
/// Default singular-value cutoff when compressing Kraus families.
pub const TOL_COMPRESS: f64 = 1e-12;
/// Default maximal triangle deviation from a scalar.
pub const DEV_MAX: f64 = 0.3;
/// Default minimal overlap between adjacent tensors.
pub const ETA_MIN: f64 = 0.5;
