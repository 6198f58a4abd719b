//! Spin dynamics of a two-level weak-field seeker in a time-orbiting-potential
//! (TOP) trap.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`]: the reduced drive model, its Hamiltonian, eigenbasis and
//!   adiabaticity measures.
//! * [`closed_form`]: exact amplitudes, survival/transition probabilities and
//!   the resurrection time.
//! * [`integrator`]: ODE and propagator oracles for the closed forms.
//! * [`geometry`]: the trap field, its length and frequency scales, and the
//!   confinement advisor.
//! * [`sweep`]: grid sweeps and the canned figure datasets.

pub mod closed_form;
pub mod error;
pub mod geometry;
pub mod integrator;
mod ode;
pub mod spin;
pub mod sweep;

pub use closed_form::{
    amplitudes_at, oscillation_amplitude, resurrection_period, resurrection_time, survival_minimum,
    survival_probability, tau_at, tau_extremum, transition_probability, ResurrectionPoint, SpinAmplitudes,
};
pub use error::{Error, Result};
pub use geometry::{
    circle_of_death_radius, confinement_advisor, field_angle_at, field_at, hierarchy_check, larmor_at,
    oscillation_frequency, spring_constant, zero_locus, ConfinementVerdict, FieldVector, HierarchyReport, Position,
    TrapConfig,
};
pub use integrator::{
    evolve_instantaneous_basis, evolve_lab_frame, propagator_probabilities, rotating_frame_propagator,
    survival_from_propagator, IntegratorSettings, Method, TimeSeries,
};
pub use spin::{
    adiabaticity_matrix_element, adiabaticity_parameter, eigensystem_at, hamiltonian_at, ComplexMatrix2, DriveParams,
    EigenPair,
};
pub use sweep::{figure_dataset, run_sweep, Axis, AxisName, Figure, Quantity, SweepResult, SweepSpec};

pub use num_complex::Complex64;
