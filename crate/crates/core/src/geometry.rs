//! TOP-trap field model and the physical scales built from it. SI units.
//!
//! The field is a quadrupole of gradient `A0` plus a uniform field of
//! magnitude `B0` rotating in the x-y plane at `omega`:
//!
//! ```text
//! B = (A0 x + B0 cos(omega t), A0 y + B0 sin(omega t), -2 A0 z)
//! ```

use crate::closed_form::resurrection_period;
use crate::error::{domain, Result};
use crate::spin::DriveParams;

/// Physical trap parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// Quadrupole gradient, T/m.
    pub a0: f64,
    /// Rotating bias field, T.
    pub b0: f64,
    /// Rotation angular frequency, rad/s.
    pub omega: f64,
    /// Gyromagnetic ratio, rad/(s T).
    pub gamma: f64,
    /// Magnetic moment magnitude, J/T.
    pub mu: f64,
    /// Atomic mass, kg.
    pub mass: f64,
}

impl TrapConfig {
    pub fn new(a0: f64, b0: f64, omega: f64, gamma: f64, mu: f64, mass: f64) -> Result<Self> {
        let c = Self {
            a0,
            b0,
            omega,
            gamma,
            mu,
            mass,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a0", self.a0),
            ("b0", self.b0),
            ("omega", self.omega),
            ("mu", self.mu),
            ("mass", self.mass),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !self.gamma.is_finite() || self.gamma == 0.0 {
            return Err(domain(format!("gamma must be finite and non-zero, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl FieldVector {
    pub fn magnitude(&self) -> f64 {
        self.bx.hypot(self.by).hypot(self.bz)
    }
}

/// A point in space, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// A point in the `z = 0` plane where the atom cloud orbits.
    pub fn in_plane(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }
}

pub fn field_at(c: &TrapConfig, pos: Position, t: f64) -> FieldVector {
    let (s, co) = (c.omega * t).sin_cos();
    FieldVector {
        bx: c.a0 * pos.x + c.b0 * co,
        by: c.a0 * pos.y + c.b0 * s,
        bz: -2.0 * c.a0 * pos.z,
    }
}

/// Radius `R0 = B0 / A0` of the circle traced by the field zero.
pub fn circle_of_death_radius(c: &TrapConfig) -> f64 {
    c.b0 / c.a0
}

/// Instantaneous position of the field zero, `(-R0 cos wt, -R0 sin wt, 0)`.
pub fn zero_locus(c: &TrapConfig, t: f64) -> Position {
    let (s, co) = (c.omega * t).sin_cos();
    // -(B0 cos)/A0 so that A0 x reproduces B0 cos within one rounding.
    Position::in_plane(-(c.b0 * co) / c.a0, -(c.b0 * s) / c.a0)
}

/// Spring constant `|mu| A0^2 / (2 B0)`, N/m.
pub fn spring_constant(c: &TrapConfig) -> f64 {
    c.mu.abs() * c.a0 * c.a0 / (2.0 * c.b0)
}

/// Cloud oscillation frequency `sqrt(k / m)`, rad/s.
pub fn oscillation_frequency(c: &TrapConfig) -> f64 {
    (spring_constant(c) / c.mass).sqrt()
}

fn nonzero_field(c: &TrapConfig, pos: Position, t: f64) -> Result<FieldVector> {
    let b = field_at(c, pos, t);
    if b.magnitude() <= 1e-12 * c.b0 {
        return Err(domain("Larmor frequency undefined at field zero"));
    }
    Ok(b)
}

/// Local Larmor frequency `|gamma| |B|`, rad/s.
pub fn larmor_at(c: &TrapConfig, pos: Position, t: f64) -> Result<f64> {
    Ok(c.gamma.abs() * nonzero_field(c, pos, t)?.magnitude())
}

/// Angle between the local field and the z axis, `arccos(Bz / |B|)`.
pub fn field_angle_at(c: &TrapConfig, pos: Position, t: f64) -> Result<f64> {
    let b = nonzero_field(c, pos, t)?;
    Ok((b.bz / b.magnitude()).clamp(-1.0, 1.0).acos())
}

/// Reduced drive parameters for an atom held at `pos`, with the spatial
/// dependence of `omega0` and `theta` frozen at time `t`.
pub fn drive_params_at(c: &TrapConfig, pos: Position, t: f64) -> Result<DriveParams> {
    DriveParams::new(larmor_at(c, pos, t)?, c.omega, field_angle_at(c, pos, t)?)
}

/// Default margin standing in for "much less than".
pub const DEFAULT_MARGIN: f64 = 10.0;

/// The three trap frequencies and whether `omega_osc << omega << omega0` holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyReport {
    pub omega_osc: f64,
    pub omega: f64,
    /// Larmor frequency at the bias field `B0`.
    pub omega0_ref: f64,
    /// `omega / omega_osc`.
    pub ratio_low: f64,
    /// `omega0_ref / omega`.
    pub ratio_high: f64,
    pub margin: f64,
    pub satisfied: bool,
}

/// Checks the ordering of three frequencies against `margin`.
pub fn hierarchy_from_scales(omega_osc: f64, omega: f64, omega0_ref: f64, margin: f64) -> Result<HierarchyReport> {
    if !margin.is_finite() || margin < 1.0 {
        return Err(domain(format!("margin must be >= 1, got {margin}")));
    }
    for (name, v) in [("omega_osc", omega_osc), ("omega", omega), ("omega0", omega0_ref)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(domain(format!("{name} must be finite and > 0, got {v}")));
        }
    }
    Ok(HierarchyReport {
        omega_osc,
        omega,
        omega0_ref,
        ratio_low: omega / omega_osc,
        ratio_high: omega0_ref / omega,
        margin,
        satisfied: omega >= margin * omega_osc && omega0_ref >= margin * omega,
    })
}

pub fn hierarchy_check(c: &TrapConfig, margin: f64) -> Result<HierarchyReport> {
    c.validate()?;
    hierarchy_from_scales(oscillation_frequency(c), c.omega, c.gamma.abs() * c.b0, margin)
}

/// Outcome of comparing a user-supplied escape time with the resurrection time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinementVerdict {
    pub confined: bool,
    pub escape_time: f64,
    /// `2 pi / omega_bar`; `None` when the state never flips.
    pub resurrection_time: Option<f64>,
    /// `escape_time / resurrection_time`.
    pub ratio: Option<f64>,
}

/// An atom that needs longer than one resurrection period to leave the trap
/// is back in the weak-field-seeking state before it can escape.
pub fn confinement_advisor(p: &DriveParams, escape_time: f64) -> Result<ConfinementVerdict> {
    if !escape_time.is_finite() || escape_time <= 0.0 {
        return Err(domain(format!("escape_time must be finite and > 0, got {escape_time}")));
    }
    if p.is_degenerate() || p.coupling() == 0.0 {
        return Ok(ConfinementVerdict {
            confined: true,
            escape_time,
            resurrection_time: None,
            ratio: None,
        });
    }
    let period = resurrection_period(p)?;
    Ok(ConfinementVerdict {
        confined: escape_time > period,
        escape_time,
        resurrection_time: Some(period),
        ratio: Some(escape_time / period),
    })
}
