//! Simulation and analysis of two-qubit quantum key distribution at the
//! Holevo limit: exact state algebra, information-theoretic functionals,
//! letter-basis classification, a linear-optics analyzer, eavesdropping
//! strategies under sequential access, and the end-to-end protocol engine.
//!
//! All numerics are generic over the real scalar type ([`Scalar`], `f32` or
//! `f64`); the `*64` aliases below are the usual entry points.

// index loops mirror the matrix algebra they implement
#![allow(clippy::needless_range_loop)]

pub mod attacks;
pub mod basisclass;
pub mod error;
pub mod infotheory;
pub mod optics;
pub mod protocol;
pub mod qstate;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

// Concrete aliases for the common double-precision instantiation.
pub type PureState64 = qstate::PureState<f64>;
pub type DensityMatrix64 = qstate::DensityMatrix<f64>;
pub type UnitaryMap64 = qstate::UnitaryMap<f64>;
pub type LetterBasis64 = basisclass::LetterBasis<f64>;
pub type TwoPhotonState64 = optics::TwoPhotonState<f64>;
pub type AttackStrategy64 = attacks::AttackStrategy<f64>;
pub type EveStats64 = attacks::EveStats<f64>;
pub type ProtocolConfig64 = protocol::ProtocolConfig<f64>;
pub type RunSummary64 = protocol::RunSummary<f64>;

// Single-precision counterparts.
pub type PureState32 = qstate::PureState<f32>;
pub type DensityMatrix32 = qstate::DensityMatrix<f32>;
pub type LetterBasis32 = basisclass::LetterBasis<f32>;
