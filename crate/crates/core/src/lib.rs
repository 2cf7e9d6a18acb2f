//! Numerical analysis of quantum two-party protocols.
//!
//! * [`linalg`]: dense Hermitian linear algebra, density operators, POVMs,
//!   trace distance and fidelity.
//! * [`ot`]: the partially secure oblivious transfer and its cheating
//!   strategies.
//! * [`bc`]: bit commitment composed from that OT and the purification
//!   attacks that defeat the composition.
//! * [`consistency`]: the defining constraints of quantum OT as residuals,
//!   with a numerical feasibility search.
//! * [`qkd`]: Monte-Carlo simulation of entanglement-based QKD under the
//!   coincidence ("demonic photon") attack.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common double-precision instantiations.

pub mod bc;
pub mod consistency;
pub mod error;
pub mod linalg;
pub mod ot;
pub mod qkd;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type DensityOperator64 = linalg::DensityOperator<f64>;
pub type DensityOperator32 = linalg::DensityOperator<f32>;
pub type PureState64 = linalg::PureState<f64>;
pub type PureState32 = linalg::PureState<f32>;
pub type Povm64 = linalg::Povm<f64>;
pub type Povm32 = linalg::Povm<f32>;
pub type OtParams64 = ot::OtParams<f64>;
pub type OtParams32 = ot::OtParams<f32>;
pub type BcParams64 = bc::BcParams<f64>;
pub type BcParams32 = bc::BcParams<f32>;
pub type BcCheatReport64 = bc::BcCheatReport<f64>;
