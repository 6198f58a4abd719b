//! Numerical oracles for the closed-form dynamics.
//!
//! Three routes are provided, each independent of the analytic formulas:
//!
//! * [`evolve_instantaneous_basis`] integrates the coupled amplitude
//!   equations for `(alpha, beta)` in the co-rotating instantaneous basis.
//! * [`evolve_lab_frame`] integrates `i dpsi/dt = H(t) psi` in the fixed spin
//!   basis and projects onto the numerically diagonalized eigenstates.
//! * [`rotating_frame_propagator`] builds the exact propagator from the
//!   static rotating-frame Hamiltonian.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::ode::{self, AdaptiveOptions, State};
use crate::spin::{eigensystem_at, hamiltonian_at, inner, ComplexMatrix2, DriveParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Dormand-Prince 5(4) with local error control and dense output.
    AdaptiveEmbeddedPair,
    /// Classical RK4 with steps of at most `step` time units.
    FixedStepRk4 { step: f64 },
}

/// Tolerances and step policy.
///
/// The defaults (`rel_tol = 1e-11`, `abs_tol = 1e-13`) keep the accumulated
/// norm drift below `1e-9` over a hundred Larmor periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step as a fraction of `min(2 pi / omega, 2 pi / omega0)`.
    pub max_step: f64,
    pub method: Method,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_step: 0.1,
            method: Method::AdaptiveEmbeddedPair,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 || self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(domain("integrator tolerances must be > 0"));
        }
        if !(self.max_step > 0.0 && self.max_step <= 1.0) {
            return Err(domain(format!("max_step must be in (0, 1], got {}", self.max_step)));
        }
        if let Method::FixedStepRk4 { step } = self.method {
            if !step.is_finite() || step <= 0.0 {
                return Err(domain(format!("fixed step must be > 0, got {step}")));
            }
        }
        Ok(())
    }
}

/// Sampled survival and transition probabilities from one method.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub transition: Vec<f64>,
    pub method: String,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|survival + transition - 1|` over the samples.
    pub fn max_norm_drift(&self) -> f64 {
        self.survival
            .iter()
            .zip(&self.transition)
            .map(|(s, t)| (s + t - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest pointwise survival difference against `other`.
    pub fn max_survival_delta(&self, other: &TimeSeries) -> f64 {
        self.survival
            .iter()
            .zip(&other.survival)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    match grid.first() {
        None => return Err(domain("time grid is empty")),
        Some(&t0) if t0 != 0.0 => return Err(domain(format!("time grid must start at 0, starts at {t0}"))),
        _ => {}
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(domain("time grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("time grid must be ascending"));
    }
    Ok(())
}

fn max_step_time(p: &DriveParams, s: &IntegratorSettings) -> f64 {
    let larmor = 2.0 * PI / p.omega0();
    let shortest = p.drive_period().map_or(larmor, |d| d.min(larmor));
    s.max_step * shortest
}

fn integrate<F>(p: &DriveParams, rhs: F, y0: State, grid: &[f64], s: &IntegratorSettings) -> Result<Vec<State>>
where
    F: Fn(f64, &State) -> State,
{
    s.validate()?;
    check_grid(grid)?;
    match s.method {
        Method::AdaptiveEmbeddedPair => ode::integrate_adaptive(
            rhs,
            y0,
            grid,
            AdaptiveOptions {
                rel_tol: s.rel_tol,
                abs_tol: s.abs_tol,
                max_step: max_step_time(p, s),
                max_steps: 50_000_000,
            },
        ),
        Method::FixedStepRk4 { step } => Ok(ode::integrate_rk4(rhs, y0, grid, step)),
    }
}

fn method_label(s: &IntegratorSettings, frame: &str) -> String {
    match s.method {
        Method::AdaptiveEmbeddedPair => format!("{frame}/dopri5"),
        Method::FixedStepRk4 { .. } => format!("{frame}/rk4"),
    }
}

/// Right-hand side of the amplitude equations in the co-rotating
/// instantaneous basis, for a drive phase advancing at `phase_rate`.
///
/// With detuning `d = omega0 - phase_rate cos theta` and coupling
/// `g = phase_rate sin theta`:
///
/// ```text
/// alpha' =  (i/2) d alpha + (i/2) g beta
/// beta'  =  (i/2) g alpha - (i/2) d beta
/// ```
#[derive(Debug, Clone, Copy)]
struct AmplitudeEquations {
    omega0: f64,
    phase_rate: f64,
    theta: f64,
}

impl AmplitudeEquations {
    fn rhs(&self, _t: f64, y: &State) -> State {
        let (s, c) = self.theta.sin_cos();
        let half_d = Complex64::new(0.0, 0.5 * (self.omega0 - self.phase_rate * c));
        let half_g = Complex64::new(0.0, 0.5 * self.phase_rate * s);
        [half_d * y[0] + half_g * y[1], half_g * y[0] - half_d * y[1]]
    }
}

/// Integrates the instantaneous-basis amplitude equations from
/// `alpha(0) = 1`, `beta(0) = 0`.
pub fn evolve_instantaneous_basis(p: &DriveParams, t_grid: &[f64], s: &IntegratorSettings) -> Result<TimeSeries> {
    let eqs = AmplitudeEquations {
        omega0: p.omega0(),
        phase_rate: p.omega(),
        theta: p.theta(),
    };
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let states = integrate(p, |t, y| eqs.rhs(t, y), y0, t_grid, s)?;
    Ok(TimeSeries {
        times: t_grid.to_vec(),
        survival: states.iter().map(|y| y[0].norm_sqr()).collect(),
        transition: states.iter().map(|y| y[1].norm_sqr()).collect(),
        method: method_label(s, "instantaneous"),
    })
}

/// Integrates the Schrodinger equation in the fixed spin basis starting from
/// the weak-field seeker `|-(0)>`, then projects onto `|-(t)>` and `|+(t)>`.
pub fn evolve_lab_frame(p: &DriveParams, t_grid: &[f64], s: &IntegratorSettings) -> Result<TimeSeries> {
    // hamiltonian_at only fails on non-finite t, which check_grid rejects first.
    let rhs = |t: f64, y: &State| -> State {
        let h = hamiltonian_at(p, t).expect("finite time");
        let hy = h.apply(y);
        [hy[0] * Complex64::new(0.0, -1.0), hy[1] * Complex64::new(0.0, -1.0)]
    };
    check_grid(t_grid)?;
    let y0 = eigensystem_at(p, 0.0)?.vec_minus;
    let states = integrate(p, rhs, y0, t_grid, s)?;
    let mut survival = Vec::with_capacity(states.len());
    let mut transition = Vec::with_capacity(states.len());
    for (&t, psi) in t_grid.iter().zip(&states) {
        let eig = eigensystem_at(p, t)?;
        survival.push(inner(&eig.vec_minus, psi).norm_sqr());
        transition.push(inner(&eig.vec_plus, psi).norm_sqr());
    }
    Ok(TimeSeries {
        times: t_grid.to_vec(),
        survival,
        transition,
        method: method_label(s, "lab"),
    })
}

/// `sin(x) / x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Lab-frame propagator `U(t)` with `psi(t) = U(t) psi(0)`.
///
/// In the frame rotating about z at `omega` the Hamiltonian is the static
/// `(1/2)(omega0 sin theta sigma_x + (omega0 cos theta - omega) sigma_z)`,
/// whose exponential is `cos(w t/2) I - i sin(w t/2) (n . sigma)`.
/// Rotating back multiplies by `diag(e^{-i omega t/2}, e^{i omega t/2})`.
pub fn rotating_frame_propagator(p: &DriveParams, t: f64) -> Result<ComplexMatrix2> {
    if !t.is_finite() {
        return Err(domain(format!("time must be finite, got {t}")));
    }
    let (s, c) = p.theta().sin_cos();
    let bx = p.omega0() * s;
    let bz = p.omega0() * c - p.omega();
    let w = bx.hypot(bz);
    let half = 0.5 * w * t;
    let cos = half.cos();
    // sin(w t/2) / w
    let sin_over = 0.5 * t * sinc(half);
    let i = Complex64::new(0.0, 1.0);
    let static_part = ComplexMatrix2([
        [cos - i * (sin_over * bz), -i * (sin_over * bx)],
        [-i * (sin_over * bx), cos + i * (sin_over * bz)],
    ]);
    let back = Complex64::from_polar(1.0, -0.5 * p.omega() * t);
    let zero = Complex64::new(0.0, 0.0);
    let frame = ComplexMatrix2([[back, zero], [zero, back.conj()]]);
    Ok(frame * static_part)
}

/// `(survival, transition)` obtained by propagating `|-(0)>` with
/// [`rotating_frame_propagator`] and projecting onto `|-(t)>`, `|+(t)>`.
pub fn propagator_probabilities(p: &DriveParams, t: f64) -> Result<(f64, f64)> {
    let u = rotating_frame_propagator(p, t)?;
    let psi = u.apply(&eigensystem_at(p, 0.0)?.vec_minus);
    let now = eigensystem_at(p, t)?;
    Ok((
        inner(&now.vec_minus, &psi).norm_sqr(),
        inner(&now.vec_plus, &psi).norm_sqr(),
    ))
}

pub fn survival_from_propagator(p: &DriveParams, t: f64) -> Result<f64> {
    Ok(propagator_probabilities(p, t)?.0)
}
