//! Simulation and analysis toolkit for a contact process with asymptomatic
//! and symptomatic infected states.
//!
//! Sites of `Z^d` are healthy (0), asymptomatic (1) or symptomatic (2).
//! A healthy site becomes asymptomatic at rate `λ₁f₁ + λ₂f₂`, where `fᵢ` is
//! the fraction of its `2d` neighbours in state `i`; asymptomatic sites turn
//! symptomatic at rate `γ`; infected sites recover at rate 1.

pub mod branching;
pub mod error;
pub mod lattice;
pub mod meanfield;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
