//! Exact solution of the driven two-level problem for an atom that starts as
//! a weak-field seeker.
//!
//! In the basis co-rotating with the drive the Hamiltonian is static, so the
//! amplitudes are a plain Rabi oscillation at `omega_bar` with detuning
//! `omega0 - omega cos theta` and coupling `omega sin theta`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::spin::DriveParams;

/// Amplitudes in the instantaneous eigenbasis: `alpha` on the weak-field
/// seeker, `beta` on the strong-field seeker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinAmplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl SpinAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }
}

/// A point on the resurrection-time curve; `tau` is in units of `2 pi / omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResurrectionPoint {
    /// `omega0 / omega`.
    pub x: f64,
    pub tau: f64,
    pub theta: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `(omega_bar, cos(omega_bar t/2), sin(omega_bar t/2))`, or `None` when degenerate.
fn rabi_phase(p: &DriveParams, t: f64) -> Option<(f64, f64, f64)> {
    if p.is_degenerate() {
        return None;
    }
    let wb = p.omega_bar();
    let (s, c) = (0.5 * wb * t).sin_cos();
    Some((wb, c, s))
}

/// `alpha(t)`, `beta(t)` from `alpha(0) = 1`, `beta(0) = 0`.
pub fn amplitudes_at(p: &DriveParams, t: f64) -> Result<SpinAmplitudes> {
    check_time(t)?;
    let Some((wb, c, s)) = rabi_phase(p, t) else {
        return Ok(SpinAmplitudes {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        });
    };
    Ok(SpinAmplitudes {
        alpha: Complex64::new(c, p.detuning() / wb * s),
        beta: Complex64::new(0.0, p.coupling() / wb * s),
    })
}

/// `|alpha(t)|^2`: probability of still being a weak-field seeker.
///
/// Evaluated as `1 - |beta|^2`, so it is exactly 1 whenever the coupling
/// vanishes.
pub fn survival_probability(p: &DriveParams, t: f64) -> Result<f64> {
    Ok(1.0 - transition_probability(p, t)?)
}

/// `|beta(t)|^2`: probability of having flipped to the strong-field seeker.
pub fn transition_probability(p: &DriveParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let Some((wb, _, s)) = rabi_phase(p, t) else {
        return Ok(0.0);
    };
    let ratio = p.coupling() / wb;
    Ok(ratio * ratio * s * s)
}

/// Minimum over `t` of the survival probability, `(detuning / omega_bar)^2`.
pub fn survival_minimum(p: &DriveParams) -> f64 {
    if p.is_degenerate() {
        return 1.0;
    }
    let ratio = p.detuning() / p.omega_bar();
    ratio * ratio
}

/// Peak-to-peak swing of the survival probability, `omega^2 sin^2 theta / omega_bar^2`.
pub fn oscillation_amplitude(p: &DriveParams) -> f64 {
    if p.is_degenerate() {
        return 0.0;
    }
    let ratio = p.coupling() / p.omega_bar();
    ratio * ratio
}

/// Time for a flipped atom to return fully to the weak-field-seeking state,
/// `2 pi / omega_bar`, in the units of the drive frequencies.
pub fn resurrection_period(p: &DriveParams) -> Result<f64> {
    if p.is_degenerate() {
        return Err(domain("resurrection undefined: no flip occurs (omega_bar = 0)"));
    }
    Ok(2.0 * PI / p.omega_bar())
}

/// `tau = 1 / sqrt(1 + x^2 - 2 x cos theta)` with `x = omega0 / omega`.
///
/// Valid for `x >= 0`; `tau(0) = 1` for every `theta`.
pub fn tau_at(x: f64, theta: f64) -> f64 {
    1.0 / (1.0 + x * x - 2.0 * x * theta.cos()).sqrt()
}

/// Resurrection time in units of the drive period `2 pi / omega`.
pub fn resurrection_time(p: &DriveParams) -> Result<ResurrectionPoint> {
    if p.omega() <= 0.0 {
        return Err(domain("resurrection time needs omega > 0 for the 2 pi / omega unit"));
    }
    if p.is_degenerate() {
        return Err(domain("resurrection undefined: no flip occurs (omega_bar = 0)"));
    }
    let x = p.omega0() / p.omega();
    Ok(ResurrectionPoint {
        x,
        tau: tau_at(x, p.theta()),
        theta: p.theta(),
    })
}

/// Interior maximum of `tau(x)` at fixed `theta`.
///
/// For `theta` in `(0, pi/2]` the maximum is `1 / sin theta` at
/// `x = cos theta` (on the boundary `x = 0` when `theta = pi/2`). For
/// `theta` in `(pi/2, pi)` `tau` decreases monotonically and there is none.
pub fn tau_extremum(theta: f64) -> Result<Option<(f64, f64)>> {
    if !theta.is_finite() || theta <= 0.0 || theta >= PI {
        return Err(Error::Domain(format!(
            "tau extremum needs theta in (0, pi), got {theta}"
        )));
    }
    if theta > FRAC_PI_2 {
        return Ok(None);
    }
    Ok(Some((theta.cos().max(0.0), 1.0 / theta.sin())))
}
