//! Exact construction of the Frobenius manifolds of A_n simple singularities,
//! the open Toda chain prepotential in closed form, and a battery of
//! tolerance-controlled geometric property checks.
//!
//! The crate is organized as a pipeline:
//!
//! * [`poly`] — exact multivariate polynomials over rationals and complex
//!   univariate root finding;
//! * [`catalog`] — the ADE unfolding table with gradings and Lie degrees;
//! * [`jacobi`] — the A_n Jacobi ring and the Grothendieck residue pairing;
//! * [`saito`] — flat coordinates, metric, c-tensor, prepotential, Euler
//!   field and intersection form;
//! * [`toda`] — the open Toda chain prepotential, its derivative tensors,
//!   the spectral-curve residue tensor, and the duality bridge;
//! * [`esk`] — generic special-geometry checks over any prepotential
//!   provider (associativity, flatness, positivity, rescaling, the
//!   F-manifold identity);
//! * [`report`] — structured, reproducible check reports.

pub mod catalog;
pub mod error;
pub mod esk;
pub mod jacobi;
pub mod poly;
pub mod report;
pub mod saito;
pub mod toda;

pub mod ratmat;

pub use catalog::{LieType, UnfoldingSpec};
pub use error::{Error, Result};
pub use esk::PrepotentialProvider;
pub use poly::{ComplexVector, MultiPoly};
pub use report::{CheckReport, Verdict};
pub use saito::FrobeniusData;
pub use toda::TodaModel;
