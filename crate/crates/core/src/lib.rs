//! Entanglement dynamics of two giant atoms coupled to a one-dimensional
//! waveguide through phase-engineered coupling points.
//!
//! The crate goes from a coupling-point [`geometry::Layout`] to the delay
//! differential equations for the two excitation amplitudes
//! ([`dde_model`]), integrates them ([`integrator`]), and maps amplitudes to
//! concurrence ([`observables`]). Closed-form reference curves live in
//! [`oracles`]; [`verify`] runs the simulator against all of them.
//!
//! Units: the single-point emission rate Γ sets the unit system. Times are
//! Γt, delays are Γτ, and coefficients are in units of Γ.

pub mod dde_model;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod observables;
pub mod oracles;
pub mod verify;

pub use dde_model::{build_equations, canonicalize, path_report, DelayTerm, EquationSet, PathReport};
pub use error::{Error, Result};
pub use geometry::{Atom, CouplingPhases, CouplingPoint, Layout, PairMetrics, PointId, Topology};
pub use integrator::{integrate, solve_markovian, steady_state, InitialState, SteadyState, Trajectory};
pub use observables::{concurrence, concurrence_series};

pub use num_complex::Complex64;
