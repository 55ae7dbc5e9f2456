//! Two spins `S` and `R` that never interact, evolved under ordinary linear
//! quantum dynamics or under the state-dependent Hamiltonian `ε⟨Σ₃⟩Σ₃` on `S`.
//!
//! Under linear dynamics nothing done to `R` can change a probability for
//! `S`. Under the state-dependent dynamics, the evolution of `S` depends on
//! how its mixed state was prepared, and so on correlations with `R` and on
//! which measurement is made on `R`. The [`scenarios`] module reproduces
//! each case and reports how far the contrasted arms diverge.

pub mod cli;
pub mod error;
pub mod linear;
pub mod measurement;
pub mod nonlinear;
pub mod qmath;
pub mod sampling;
pub mod scenarios;
pub mod states;

pub use error::{Error, Result};
