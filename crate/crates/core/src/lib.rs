//! Symmetric periodic orbits of the n-body problem with homogeneous potentials.
//!
//! Finite groups act on time, space and body indices; loops equivariant under
//! such an action are searched for as minimizers of the Lagrangian action.
//! Modules cover building and analysing the group actions ([`group`],
//! [`symmetry`]), the averaging estimates behind collision exclusion
//! ([`averaging`]), sampled loops and the action functional ([`loops`]), the
//! minimizer ([`minimize`]) and the built-in examples ([`catalog`]).

pub mod averaging;
pub mod catalog;
pub mod error;
pub mod group;
pub mod linalg;
pub mod loops;
pub mod minimize;
pub mod perm;
pub mod quadrature;
pub mod scalar;
pub mod symmetry;
pub mod time;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GroupActionF64 = group::GroupAction<f64>;
pub type GroupActionF32 = group::GroupAction<f32>;
pub type LoopF64 = loops::EquivariantLoop<f64>;
pub type LoopF32 = loops::EquivariantLoop<f32>;
pub type ActionFunctionalF64 = loops::ActionFunctional<f64>;
pub type ActionFunctionalF32 = loops::ActionFunctional<f32>;
pub type MinimizeResultF64 = minimize::MinimizeResult<f64>;
