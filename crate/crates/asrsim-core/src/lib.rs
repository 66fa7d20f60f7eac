//! Core engine for a two-strategy (mate-guarding vs multiple-mating)
//! population model.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation, so
//! the same code can be driven from the CLI crate, from tests, or embedded
//! elsewhere. The pieces are:
//!
//! - [`model`] — parameters, compartment state and the 7-ODE right-hand side;
//! - [`life_history`] — survivorship curves and numerical recovery of the
//!   base death rates from (longevity, juvenile survival);
//! - [`integrator`] — adaptive embedded-pair time stepping with
//!   non-negativity enforcement and terminal classification;
//! - [`metrics`] — adult sex ratio, multiple-mater fraction, equilibrium
//!   classification;
//! - [`grid`] — (L, t1) landscape cells and bistability disagreement masks;
//! - [`contour`] — marching-squares level sets over masked scalar fields;
//! - [`lhs`] — seeded Latin hypercube sampling;
//! - [`prcc`] — Spearman partial rank correlation with t-based p-values;
//! - [`sensitivity`] — the sampled-ensemble record pipeline and report.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod contour;
pub mod grid;
pub mod integrator;
pub mod lhs;
pub mod life_history;
pub mod metrics;
pub mod model;
pub mod prcc;
pub mod sensitivity;

mod root;
mod special;

pub use grid::{AxisRange, Cell, CellOutcome, GridSpec, LandscapeGrid};
pub use integrator::{integrate, IntegrateError, IntegrationConfig, Terminal, Trajectory};
pub use metrics::{Classification, EquilibriumReport};
pub use model::{
    build_initial_state, derive_rates, rhs, DerivedRates, InitialCondition, ModelParams,
    ParamError, State,
};
