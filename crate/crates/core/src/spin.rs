//! The reduced two-level drive model.
//!
//! A spin with Larmor frequency `omega0` sits in a field that is tilted by
//! `theta` from the z axis and precesses about z at `omega`. With hbar = 1 the
//! Hamiltonian is
//!
//! ```text
//! H(t) = (omega0 / 2) [[cos theta,            e^{-i omega t} sin theta],
//!                      [e^{i omega t} sin theta,         -cos theta   ]]
//! ```
//!
//! so the instantaneous splitting `E+ - E-` is exactly `omega0`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Spin-drive parameters in angular-frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    omega0: f64,
    omega: f64,
    theta: f64,
}

impl DriveParams {
    /// Validates `omega0 > 0`, `omega >= 0`, `theta` in `[0, pi]`.
    pub fn new(omega0: f64, omega: f64, theta: f64) -> Result<Self> {
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(domain(format!("omega0 must be finite and > 0, got {omega0}")));
        }
        if !omega.is_finite() || omega < 0.0 {
            return Err(domain(format!("omega must be finite and >= 0, got {omega}")));
        }
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(domain(format!("theta out of [0, pi]: {theta}")));
        }
        Ok(Self { omega0, omega, theta })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Longitudinal detuning `omega0 - omega cos theta` seen in the co-rotating basis.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega * self.theta.cos()
    }

    /// Transverse coupling `omega sin theta` between the instantaneous eigenstates.
    pub fn coupling(&self) -> f64 {
        self.omega * self.theta.sin()
    }

    /// Effective Rabi frequency `sqrt(omega0^2 + omega^2 - 2 omega0 omega cos theta)`.
    ///
    /// Evaluated as `hypot(detuning, coupling)`, which is the same quantity
    /// without the cancellation near `omega0 = omega, theta = 0`.
    pub fn omega_bar(&self) -> f64 {
        self.detuning().hypot(self.coupling())
    }

    /// True when `omega_bar` is below `1e-12 * max(omega0, omega)`; the
    /// dynamics are then frozen and the closed forms use their analytic limit.
    pub fn is_degenerate(&self) -> bool {
        self.omega_bar() < 1e-12 * self.omega0.max(self.omega)
    }

    /// Period of the drive phase, `2 pi / omega`, or `None` for a static field.
    pub fn drive_period(&self) -> Option<f64> {
        (self.omega > 0.0).then(|| 2.0 * PI / self.omega)
    }
}

/// Dense 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn zeros() -> Self {
        Self([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Self([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn apply(&self, v: &[Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for (row, rrow) in out.0.iter_mut().zip(rhs.0.iter()) {
            for (a, b) in row.iter_mut().zip(rrow.iter()) {
                *a += b;
            }
        }
        out
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let entry = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Self([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }
}

/// `<u|v>` with the bra conjugated.
pub fn inner(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn vec_norm(v: &[Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Instantaneous eigen-decomposition of a drive Hamiltonian.
///
/// `vec_minus` is the weak-field seeker, `vec_plus` the strong-field seeker.
/// Each vector is normalized and rotated so that its component of largest
/// modulus is real and non-negative (the first component wins ties).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value_plus: f64,
    pub value_minus: f64,
    pub vec_plus: [Complex64; 2],
    pub vec_minus: [Complex64; 2],
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be finite, got {t}")))
    }
}

/// `H(t)` for the given drive.
pub fn hamiltonian_at(p: &DriveParams, t: f64) -> Result<ComplexMatrix2> {
    check_time(t)?;
    let half = 0.5 * p.omega0;
    let (s, c) = p.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, -p.omega * t);
    let diag = Complex64::new(half * c, 0.0);
    Ok(ComplexMatrix2([
        [diag, phase * (half * s)],
        [phase.conj() * (half * s), -diag],
    ]))
}

/// Fixes the global phase: largest-modulus component real and >= 0.
fn canonical_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = vec_norm(&v);
    let v = [v[0] / n, v[1] / n];
    let (a0, a1) = (v[0].norm(), v[1].norm());
    let pivot = if a1 > a0 * (1.0 + 1e-12) { v[1] } else { v[0] };
    let rot = pivot.conj() / pivot.norm();
    [v[0] * rot, v[1] * rot]
}

/// Eigenvector of the traceless Hermitian `[[a, b], [b*, -a]]` for eigenvalue `lambda`.
fn eigenvector(a: f64, b: Complex64, lambda: f64) -> [Complex64; 2] {
    // Two algebraically equivalent candidates; keep the better-conditioned one.
    let first = [Complex64::new(lambda + a, 0.0), b.conj()];
    let second = [b, Complex64::new(lambda - a, 0.0)];
    if vec_norm(&first) >= vec_norm(&second) {
        canonical_phase(first)
    } else {
        canonical_phase(second)
    }
}

/// Numerically diagonalizes `H(t)`.
pub fn eigensystem_at(p: &DriveParams, t: f64) -> Result<EigenPair> {
    let h = hamiltonian_at(p, t)?;
    let a = h.get(0, 0).re;
    let b = h.get(0, 1);
    let lambda = a.hypot(b.norm());
    Ok(EigenPair {
        value_plus: lambda,
        value_minus: -lambda,
        vec_plus: eigenvector(a, b, lambda),
        vec_minus: eigenvector(a, b, -lambda),
    })
}

/// Adiabaticity parameter `(omega / (2 omega0)) sin theta`; evolution is
/// adiabatic when this is much less than one.
pub fn adiabaticity_parameter(p: &DriveParams) -> f64 {
    p.omega / (2.0 * p.omega0) * p.theta.sin()
}

/// Default central-difference step, `1e-6 * 2 pi / max(omega, omega0)`.
pub fn default_fd_step(p: &DriveParams) -> f64 {
    1e-6 * 2.0 * PI / p.omega.max(p.omega0)
}

/// Evaluates `|<-(t)| dH/dt |+(t)>| / (E+ - E-)^2` with a central finite
/// difference for `dH/dt`.
///
/// The squared gap makes the ratio dimensionless; with the splitting fixed at
/// `omega0` it converges to [`adiabaticity_parameter`] as `O(dt^2)`.
pub fn adiabaticity_matrix_element(p: &DriveParams, t: f64, dt: f64) -> Result<f64> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(domain(format!("finite-difference step must be > 0, got {dt}")));
    }
    check_time(t)?;
    let forward = hamiltonian_at(p, t + dt)?;
    let backward = hamiltonian_at(p, t - dt)?;
    let h_dot = (forward - backward).scale(Complex64::new(0.5 / dt, 0.0));
    let eig = eigensystem_at(p, t)?;
    let element = inner(&eig.vec_minus, &h_dot.apply(&eig.vec_plus)).norm();
    let gap = eig.value_plus - eig.value_minus;
    Ok(element / (gap * gap))
}
