//! Parameter sweeps over drive ratio, tilt angle and time.
//!
//! A sweep evaluates one or more quantities on the outer product of up to
//! three axes. Tables are row-major with the last axis varying fastest.
//! Point evaluation runs on the current rayon pool and results keep grid
//! order, so output is identical for any thread count.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::closed_form::{survival_probability, tau_at, transition_probability};
use crate::error::{domain, Error, Result};
use crate::integrator::{evolve_instantaneous_basis, evolve_lab_frame, IntegratorSettings, TimeSeries};
use crate::spin::{adiabaticity_parameter, DriveParams};

/// Largest number of grid points a single sweep may have.
pub const MAX_POINTS: u128 = 10_000_000;

/// Agreement required between oracle columns and the closed form.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    /// `omega / omega0`, scaling `omega` at fixed `omega0`.
    OmegaRatio,
    /// `omega0 / omega`, scaling `omega0` at fixed `omega`.
    LarmorRatio,
    Theta,
    Time,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::OmegaRatio => "omega_ratio",
            AxisName::LarmorRatio => "x",
            AxisName::Theta => "theta",
            AxisName::Time => "t",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega_ratio" => Ok(AxisName::OmegaRatio),
            "x" => Ok(AxisName::LarmorRatio),
            "theta" => Ok(AxisName::Theta),
            "t" => Ok(AxisName::Time),
            other => Err(domain(format!("unknown axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Linear { min: f64, max: f64, steps: usize },
    Log { min: f64, max: f64, steps: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: AxisValues,
}

impl Axis {
    pub fn linear(name: AxisName, min: f64, max: f64, steps: usize) -> Self {
        Self {
            name,
            values: AxisValues::Linear { min, max, steps },
        }
    }

    pub fn log(name: AxisName, min: f64, max: f64, steps: usize) -> Self {
        Self {
            name,
            values: AxisValues::Log { min, max, steps },
        }
    }

    pub fn list(name: AxisName, values: Vec<f64>) -> Self {
        Self {
            name,
            values: AxisValues::List(values),
        }
    }

    fn validate(&self) -> Result<()> {
        let name = self.name;
        match &self.values {
            AxisValues::Linear { min, max, steps } | AxisValues::Log { min, max, steps } => {
                if *steps < 2 {
                    return Err(domain(format!("axis {name}: steps must be >= 2, got {steps}")));
                }
                if !min.is_finite() || !max.is_finite() || min >= max {
                    return Err(domain(format!(
                        "axis {name}: need finite min < max, got [{min}, {max}]"
                    )));
                }
                if matches!(self.values, AxisValues::Log { .. }) && *min <= 0.0 {
                    return Err(domain(format!("axis {name}: log spacing needs min > 0")));
                }
            }
            AxisValues::List(v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(domain(format!("axis {name}: value list must be non-empty and finite")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.values {
            AxisValues::Linear { steps, .. } | AxisValues::Log { steps, .. } => *steps,
            AxisValues::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materialized grid values; range endpoints are reproduced exactly.
    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::Linear { min, max, steps } => {
                let n = (*steps - 1) as f64;
                (0..*steps)
                    .map(|i| {
                        if i + 1 == *steps {
                            *max
                        } else {
                            min + (max - min) * (i as f64 / n)
                        }
                    })
                    .collect()
            }
            AxisValues::Log { min, max, steps } => {
                let n = (*steps - 1) as f64;
                let (lo, hi) = (min.ln(), max.ln());
                (0..*steps)
                    .map(|i| match i {
                        0 => *min,
                        i if i + 1 == *steps => *max,
                        i => (lo + (hi - lo) * (i as f64 / n)).exp(),
                    })
                    .collect()
            }
            AxisValues::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Survival,
    Transition,
    /// Resurrection time in units of `2 pi / omega`.
    Tau,
    Adiabaticity,
    OmegaBar,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Survival => "survival",
            Quantity::Transition => "transition",
            Quantity::Tau => "tau",
            Quantity::Adiabaticity => "adiabaticity",
            Quantity::OmegaBar => "omega_bar",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "survival" => Ok(Quantity::Survival),
            "transition" => Ok(Quantity::Transition),
            "tau" => Ok(Quantity::Tau),
            "adiabaticity" => Ok(Quantity::Adiabaticity),
            "omega_bar" => Ok(Quantity::OmegaBar),
            other => Err(domain(format!("unknown quantity '{other}'"))),
        }
    }
}

/// Values used for any parameter without an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub omega0: f64,
    pub omega: f64,
    pub theta: f64,
    pub t: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            omega: 1.0,
            theta: FRAC_PI_2,
            t: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Zero to three axes; with none the sweep is the single fixed point.
    pub axes: Vec<Axis>,
    pub quantities: Vec<Quantity>,
    pub fixed: FixedParams,
    /// Add ODE columns for survival/transition and check them against the closed form.
    pub oracle: bool,
    pub integrator: IntegratorSettings,
    /// Extra key/value pairs copied into the result header.
    pub notes: Vec<(String, String)>,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>, quantities: Vec<Quantity>) -> Self {
        Self {
            axes,
            quantities,
            fixed: FixedParams::default(),
            oracle: false,
            integrator: IntegratorSettings::default(),
            notes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 3 {
            return Err(domain(format!("at most 3 axes, got {}", self.axes.len())));
        }
        if self.quantities.is_empty() {
            return Err(domain("sweep needs at least one quantity"));
        }
        for (i, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(domain(format!("axis {} given twice", a.name)));
            }
        }
        let has = |n| self.axes.iter().any(|a| a.name == n);
        if has(AxisName::OmegaRatio) && has(AxisName::LarmorRatio) {
            return Err(domain("omega_ratio and x axes are mutually exclusive"));
        }
        let points = self.point_count();
        if points > MAX_POINTS {
            return Err(Error::SweepTooLarge {
                points,
                limit: MAX_POINTS,
            });
        }
        self.integrator.validate()
    }

    pub fn point_count(&self) -> u128 {
        self.axes.iter().map(|a| a.len() as u128).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisData {
    pub name: AxisName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<AxisData>,
    pub tables: Vec<Table>,
    /// Parameter echo and provenance, in insertion order.
    pub header: Vec<(String, String)>,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn table(&self, name: &str) -> Option<&[f64]> {
        self.tables.iter().find(|t| t.name == name).map(|t| t.values.as_slice())
    }

    pub fn axis(&self, name: AxisName) -> Option<&[f64]> {
        self.axes.iter().find(|a| a.name == name).map(|a| a.values.as_slice())
    }

    /// Axis values at flat index `i`.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        let mut rem = i;
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.values.len();
            out[k] = a.values[rem % n];
            rem /= n;
        }
        out
    }

    /// Long-format column names: axes followed by tables.
    pub fn column_names(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name.to_string())
            .chain(self.tables.iter().map(|t| t.name.clone()))
            .collect()
    }

    /// Long-format rows matching [`SweepResult::column_names`].
    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| {
            let mut row = self.coords(i);
            row.extend(self.tables.iter().map(|t| t.values[i]));
            row
        })
    }

    /// Values of `table` along the last axis for each combination of the
    /// leading axes, e.g. one curve per theta.
    pub fn curves(&self, table: &str) -> Option<Vec<(Vec<f64>, Vec<f64>)>> {
        let values = self.table(table)?;
        let last = self.axes.last()?.values.len();
        Some(
            values
                .chunks(last)
                .enumerate()
                .map(|(k, chunk)| {
                    let mut lead = self.coords(k * last);
                    lead.pop();
                    (lead, chunk.to_vec())
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    omega0: f64,
    omega: f64,
    theta: f64,
    t: f64,
    x: Option<f64>,
}

impl Point {
    fn drive(&self) -> Result<DriveParams> {
        DriveParams::new(self.omega0, self.omega, self.theta)
    }

    fn describe(&self) -> String {
        format!(
            "omega0={}, omega={}, theta={}, t={}",
            self.omega0, self.omega, self.theta, self.t
        )
    }
}

fn resolve(spec: &SweepSpec, axes: &[Vec<f64>], index: usize) -> Point {
    let mut coords = vec![0.0; axes.len()];
    let mut rem = index;
    for k in (0..axes.len()).rev() {
        coords[k] = axes[k][rem % axes[k].len()];
        rem /= axes[k].len();
    }
    let f = spec.fixed;
    let mut p = Point {
        omega0: f.omega0,
        omega: f.omega,
        theta: f.theta,
        t: f.t,
        x: None,
    };
    for (axis, &v) in spec.axes.iter().zip(&coords) {
        match axis.name {
            AxisName::Theta => p.theta = v,
            AxisName::Time => p.t = v,
            AxisName::OmegaRatio => p.omega = v * f.omega0,
            AxisName::LarmorRatio => {
                p.omega0 = v * f.omega;
                p.x = Some(v);
            }
        }
    }
    p
}

fn evaluate(q: Quantity, p: &Point) -> Result<f64> {
    let value = match q {
        Quantity::Survival => survival_probability(&p.drive()?, p.t)?,
        Quantity::Transition => transition_probability(&p.drive()?, p.t)?,
        Quantity::Tau => {
            if !(0.0..=PI).contains(&p.theta) {
                return Err(domain(format!("theta out of [0, pi]: {}", p.theta)));
            }
            let x = match p.x {
                Some(x) => x,
                None if p.omega > 0.0 => p.omega0 / p.omega,
                None => return Err(domain("tau needs omega > 0")),
            };
            if x < 0.0 {
                return Err(domain(format!("x = omega0/omega must be >= 0, got {x}")));
            }
            tau_at(x, p.theta)
        }
        Quantity::Adiabaticity => adiabaticity_parameter(&p.drive()?),
        Quantity::OmegaBar => p.drive()?.omega_bar(),
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(domain(format!("{} is not finite at {}", q.as_str(), p.describe())))
    }
}

struct OracleGroup {
    params: DriveParams,
    times: Vec<f64>,
    members: Vec<usize>,
}

/// Runs the ODE oracles once per distinct drive, over that drive's times.
fn oracle_columns(spec: &SweepSpec, points: &[Point]) -> Result<Vec<[f64; 4]>> {
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut groups: Vec<OracleGroup> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let key = [p.omega0.to_bits(), p.omega.to_bits(), p.theta.to_bits()];
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(OracleGroup {
                params: p.drive().expect("validated"),
                times: vec![0.0],
                members: vec![],
            });
            groups.len() - 1
        });
        groups[g].times.push(p.t);
        groups[g].members.push(i);
    }

    let solved: Vec<(TimeSeries, TimeSeries)> = groups
        .par_iter_mut()
        .map(|g| {
            g.times.sort_by(f64::total_cmp);
            g.times.dedup();
            let ode = evolve_instantaneous_basis(&g.params, &g.times, &spec.integrator)?;
            let lab = evolve_lab_frame(&g.params, &g.times, &spec.integrator)?;
            Ok((ode, lab))
        })
        .collect::<Result<_>>()?;

    let mut out = vec![[0.0; 4]; points.len()];
    for (g, (ode, lab)) in groups.iter().zip(&solved) {
        for &i in &g.members {
            let k = g
                .times
                .binary_search_by(|t| t.total_cmp(&points[i].t))
                .expect("time present");
            out[i] = [ode.survival[k], ode.transition[k], lab.survival[k], lab.transition[k]];
        }
    }
    Ok(out)
}

/// Evaluates every requested quantity on the sweep grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let axes: Vec<Vec<f64>> = spec.axes.iter().map(Axis::points).collect();
    let n = spec.point_count() as usize;
    let points: Vec<Point> = (0..n).into_par_iter().map(|i| resolve(spec, &axes, i)).collect();

    let mut tables = Vec::with_capacity(spec.quantities.len());
    for &q in &spec.quantities {
        let values = points
            .par_iter()
            .map(|p| evaluate(q, p).map_err(|e| domain(format!("{e} (at {})", p.describe()))))
            .collect::<Result<Vec<f64>>>()?;
        tables.push(Table {
            name: q.as_str().to_string(),
            values,
        });
    }

    let mut methods = vec!["closed-form".to_string()];
    let wants_oracle = spec.oracle
        && spec
            .quantities
            .iter()
            .any(|q| matches!(q, Quantity::Survival | Quantity::Transition));
    if wants_oracle {
        if points.iter().any(|p| p.t < 0.0) {
            return Err(domain("oracle columns need t >= 0"));
        }
        let oracle = oracle_columns(spec, &points)?;
        let pairs = [
            (Quantity::Survival, 0, "survival_ode"),
            (Quantity::Transition, 1, "transition_ode"),
            (Quantity::Survival, 2, "survival_lab"),
            (Quantity::Transition, 3, "transition_lab"),
        ];
        for (q, col, name) in pairs {
            let Some(closed) = tables.iter().find(|t| t.name == q.as_str()).map(|t| t.values.clone()) else {
                continue;
            };
            let values: Vec<f64> = oracle.iter().map(|o| o[col]).collect();
            let (worst, delta) = closed
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .enumerate()
                .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
            if delta > ORACLE_TOLERANCE {
                return Err(Error::OracleMismatch {
                    quantity: name.to_string(),
                    delta,
                    tolerance: ORACLE_TOLERANCE,
                    location: points[worst].describe(),
                });
            }
            tables.push(Table {
                name: name.to_string(),
                values,
            });
        }
        methods.push("instantaneous/dopri5".into());
        methods.push("lab/dopri5".into());
    }

    let f = spec.fixed;
    let mut header = vec![
        ("tool".to_string(), format!("toptrap {}", env!("CARGO_PKG_VERSION"))),
        ("methods".to_string(), methods.join(",")),
    ];
    for (key, value, axis) in [
        ("omega0", f.omega0, AxisName::LarmorRatio),
        ("omega", f.omega, AxisName::OmegaRatio),
        ("theta", f.theta, AxisName::Theta),
        ("t", f.t, AxisName::Time),
    ] {
        if !spec.axes.iter().any(|a| a.name == axis) {
            header.push((key.to_string(), value.to_string()));
        }
    }
    for (a, vals) in spec.axes.iter().zip(&axes) {
        let desc = match &a.values {
            AxisValues::Linear { min, max, steps } => format!("linear {min}..{max} ({steps} steps)"),
            AxisValues::Log { min, max, steps } => format!("log {min}..{max} ({steps} steps)"),
            AxisValues::List(_) => format!("list [{}]", join(vals)),
        };
        header.push((format!("axis.{}", a.name), desc));
    }
    if spec.oracle {
        header.push(("oracle_tolerance".into(), ORACLE_TOLERANCE.to_string()));
    }
    header.extend(spec.notes.iter().cloned());

    Ok(SweepResult {
        axes: spec
            .axes
            .iter()
            .zip(axes)
            .map(|(a, values)| AxisData { name: a.name, values })
            .collect(),
        tables,
        header,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Survival vs time at `omega = 1.5 omega0`.
    Fig1,
    /// Survival vs time at `omega = 0.5 omega0`.
    Fig2,
    /// Resurrection time vs `omega0 / omega`.
    Fig3,
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(domain(format!(
                "unknown figure '{other}' (expected fig1, fig2 or fig3)"
            ))),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

/// Tilt angles used for the survival-oscillation datasets.
pub const SURVIVAL_THETAS: [f64; 4] = [0.3, 0.7, 1.2, FRAC_PI_2];
/// Samples on `t omega0` in `[0, 15]`.
pub const SURVIVAL_SAMPLES: usize = 1501;
pub const SURVIVAL_T_MAX: f64 = 15.0;
/// One tilt on each side of `pi/2` for the resurrection-time dataset.
pub const TAU_THETAS: [f64; 2] = [PI / 6.0, 3.0 * PI / 4.0];
pub const TAU_X_MAX: f64 = 4.0;
pub const TAU_SAMPLES: usize = 401;

/// Sweep definition behind each canned figure dataset (with `omega0 = 1`).
pub fn figure_spec(which: Figure) -> SweepSpec {
    let survival = |ratio: f64| {
        let mut spec = SweepSpec::new(
            vec![
                Axis::list(AxisName::Theta, SURVIVAL_THETAS.to_vec()),
                Axis::linear(AxisName::Time, 0.0, SURVIVAL_T_MAX, SURVIVAL_SAMPLES),
            ],
            vec![Quantity::Survival, Quantity::Transition],
        );
        spec.fixed = FixedParams {
            omega0: 1.0,
            omega: ratio,
            theta: FRAC_PI_2,
            t: 0.0,
        };
        spec.notes = vec![
            ("figure".into(), which.to_string()),
            ("omega_over_omega0".into(), ratio.to_string()),
            ("time_unit".into(), "1/omega0".into()),
        ];
        spec
    };
    match which {
        Figure::Fig1 => survival(1.5),
        Figure::Fig2 => survival(0.5),
        Figure::Fig3 => {
            let mut spec = SweepSpec::new(
                vec![
                    Axis::list(AxisName::Theta, TAU_THETAS.to_vec()),
                    Axis::linear(AxisName::LarmorRatio, 0.0, TAU_X_MAX, TAU_SAMPLES),
                ],
                vec![Quantity::Tau],
            );
            spec.notes = vec![
                ("figure".into(), which.to_string()),
                ("tau_unit".into(), "2pi/omega".into()),
            ];
            spec
        }
    }
}

/// Canned dataset for one of the figures.
pub fn figure_dataset(which: Figure) -> SweepResult {
    run_sweep(&figure_spec(which)).expect("canned figure sweeps are valid")
}

/// Locates the maximum of `tau(x)` on `xs` for fixed `theta`: grid argmax,
/// then golden-section refinement between the neighbouring grid points.
///
/// Returns `(grid_x, refined_x, refined_tau)`.
pub fn locate_tau_maximum(theta: f64, xs: &[f64]) -> Option<(f64, f64, f64)> {
    let (k, _) = xs
        .iter()
        .map(|&x| tau_at(x, theta))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let lo = xs[k.saturating_sub(1)];
    let hi = xs[(k + 1).min(xs.len() - 1)];
    let (x, tau) = golden_max(|x| tau_at(x, theta), lo, hi, 1e-12);
    Some((xs[k], x, tau))
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    // The bracket can sit on the boundary; keep whichever endpoint is larger.
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (a, f(a)), (b, f(b))]
        .into_iter()
        .fold((mid, f64::MIN), |acc, p| if p.1 > acc.1 { p } else { acc })
}
