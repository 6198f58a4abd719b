use std::f64::consts::{FRAC_PI_2, PI};

use serde_json::Value;
use toptrap_core::spin::default_fd_step;
use toptrap_core::sweep::{figure_spec, TAU_THETAS};
use toptrap_core::*;

use std::result::Result;

use crate::args::{
    AdiabaticArgs, Command, ConfineArgs, DriveArgs, EvolveArgs, EvolveMethod, FigArgs, FigName, GeometryArgs, TauArgs,
};
use crate::output::{Dataset, Report};
use crate::svg::{Chart, Series};
use crate::{CliError, Output, CROSS_METHOD_TOLERANCE};

/// Runs a command. The second element is an integrity failure to report once
/// the output has been written.
pub(crate) fn dispatch(cmd: &Command) -> Result<(Output, Option<CliError>), CliError> {
    match cmd {
        Command::Evolve(a) => evolve(a),
        Command::Tau(a) => tau(a),
        Command::Fig(a) => fig(a).map(|o| (o, None)),
        Command::Adiabatic(a) => adiabatic(a).map(|o| (o, None)),
        Command::Geometry(a) => geometry(a).map(|o| (o, None)),
        Command::Confine(a) => confine(a).map(|o| (o, None)),
    }
}

fn tool() -> String {
    format!("toptrap {}", env!("CARGO_PKG_VERSION"))
}

fn drive(a: &DriveArgs) -> Result<DriveParams, CliError> {
    Ok(DriveParams::new(a.omega0, a.omega, a.theta)?)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn params(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn theta_label(theta: f64) -> String {
    let named = [
        (PI / 6.0, "π/6"),
        (PI / 4.0, "π/4"),
        (PI / 3.0, "π/3"),
        (FRAC_PI_2, "π/2"),
        (3.0 * PI / 4.0, "3π/4"),
    ];
    match named.iter().find(|(v, _)| (v - theta).abs() < 1e-12) {
        Some((_, name)) => format!("θ = {name}"),
        None => format!("θ = {theta}"),
    }
}

fn time_grid(t_max: f64, samples: usize) -> Result<Vec<f64>, CliError> {
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(usage(format!("--t-max: must be finite and >= 0, got {t_max}")));
    }
    if samples == 0 || (samples == 1 && t_max > 0.0) {
        return Err(usage(format!(
            "--samples: need at least 2 samples for t-max > 0, got {samples}"
        )));
    }
    if samples == 1 {
        return Ok(vec![0.0]);
    }
    let step = t_max / (samples - 1) as f64;
    let mut grid: Vec<f64> = (0..samples).map(|k| k as f64 * step).collect();
    grid[samples - 1] = t_max;
    Ok(grid)
}

fn evolve(a: &EvolveArgs) -> Result<(Output, Option<CliError>), CliError> {
    let p = drive(&a.drive)?;
    let grid = time_grid(a.t_max, a.samples)?;
    let settings = IntegratorSettings {
        rel_tol: a.rel_tol,
        abs_tol: a.abs_tol,
        ..Default::default()
    };
    settings.validate()?;

    let survival = grid
        .iter()
        .map(|&t| survival_probability(&p, t))
        .collect::<toptrap_core::Result<Vec<_>>>()?;
    let transition = grid
        .iter()
        .map(|&t| transition_probability(&p, t))
        .collect::<toptrap_core::Result<Vec<_>>>()?;

    let mut extras: Vec<(&str, String, Vec<f64>, Vec<f64>)> = Vec::new();
    if matches!(a.method, EvolveMethod::Ode | EvolveMethod::All) {
        let ts = evolve_instantaneous_basis(&p, &grid, &settings)?;
        extras.push(("ode", ts.method, ts.survival, ts.transition));
    }
    if matches!(a.method, EvolveMethod::Lab | EvolveMethod::All) {
        let ts = evolve_lab_frame(&p, &grid, &settings)?;
        extras.push(("lab", ts.method, ts.survival, ts.transition));
    }
    if a.method == EvolveMethod::All {
        let (s, tr): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .map(|&t| propagator_probabilities(&p, t))
            .collect::<toptrap_core::Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        extras.push(("propagator", "rotating-frame propagator".into(), s, tr));
    }

    let mut columns = vec!["t".to_string(), "survival".into(), "transition".into()];
    let mut methods = vec!["closed form".to_string()];
    let mut delta: f64 = 0.0;
    for (name, label, s, tr) in &extras {
        columns.push(format!("survival_{name}"));
        columns.push(format!("transition_{name}"));
        methods.push(label.clone());
        for k in 0..grid.len() {
            delta = delta.max((s[k] - survival[k]).abs()).max((tr[k] - transition[k]).abs());
        }
    }
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|k| {
            let mut row = vec![grid[k], survival[k], transition[k]];
            for (_, _, s, tr) in &extras {
                row.push(s[k]);
                row.push(tr[k]);
            }
            row
        })
        .collect();

    let mut echo = vec![
        ("tool", tool()),
        ("command", "evolve".into()),
        ("omega0", p.omega0().to_string()),
        ("omega", p.omega().to_string()),
        ("theta", p.theta().to_string()),
        ("t_max", a.t_max.to_string()),
        ("samples", a.samples.to_string()),
        ("omega_bar", p.omega_bar().to_string()),
        ("methods", methods.join("; ")),
    ];
    let mut deferred = None;
    if !extras.is_empty() {
        echo.push(("rel_tol", format!("{:e}", a.rel_tol)));
        echo.push(("abs_tol", format!("{:e}", a.abs_tol)));
        echo.push(("max_cross_method_delta", format!("{delta:e}")));
        eprintln!("max cross-method delta: {delta:e}");
        if delta.is_nan() || delta > CROSS_METHOD_TOLERANCE {
            deferred = Some(CliError::Integrity(format!(
                "methods disagree by {delta:e}, tolerance {CROSS_METHOD_TOLERANCE:e}"
            )));
        }
    }

    let mut series = vec![Series {
        label: "closed form".into(),
        xs: grid.clone(),
        ys: survival.clone(),
        dashed: false,
    }];
    for (name, _, s, _) in &extras {
        series.push(Series {
            label: (*name).into(),
            xs: grid.clone(),
            ys: s.clone(),
            dashed: true,
        });
    }
    let chart = Chart {
        title: "Survival probability".into(),
        x_label: "t".into(),
        y_label: "survival probability".into(),
        annotation: vec![format!("ω₀ = {}, ω = {}, θ = {}", p.omega0(), p.omega(), p.theta())],
        series,
    };
    let data = Dataset {
        params: params(&echo),
        axes: vec![("t".into(), grid)],
        columns,
        rows,
    };
    Ok((
        Output::Table {
            data,
            chart: Some(chart),
        },
        deferred,
    ))
}

fn check_theta(theta: f64) -> Result<(), CliError> {
    if theta.is_finite() && (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(usage(format!("--theta: theta out of [0, pi]: {theta}")))
    }
}

fn tau(a: &TauArgs) -> Result<(Output, Option<CliError>), CliError> {
    let thetas = if a.theta.is_empty() {
        TAU_THETAS.to_vec()
    } else {
        a.theta.clone()
    };
    for &th in &thetas {
        check_theta(th)?;
    }
    if !a.x_min.is_finite() || a.x_min < 0.0 {
        return Err(usage(format!("--x-min: must be finite and >= 0, got {}", a.x_min)));
    }
    if !a.x_max.is_finite() || a.x_max <= a.x_min {
        return Err(usage(format!("--x-max: must be finite and > x-min, got {}", a.x_max)));
    }
    if a.steps < 2 {
        return Err(usage(format!("--steps: need at least 2, got {}", a.steps)));
    }
    let xs = Axis::linear(AxisName::LarmorRatio, a.x_min, a.x_max, a.steps).points();
    let step = (a.x_max - a.x_min) / (a.steps - 1) as f64;

    let mut echo = params(&[
        ("tool", tool()),
        ("command", "tau".into()),
        ("x_min", a.x_min.to_string()),
        ("x_max", a.x_max.to_string()),
        ("steps", a.steps.to_string()),
        ("tau_unit", "2pi/omega".into()),
    ]);
    let mut deferred = None;
    let mut rows = Vec::with_capacity(thetas.len() * xs.len());
    let mut series = Vec::new();
    for (i, &th) in thetas.iter().enumerate() {
        let taus: Vec<f64> = xs.iter().map(|&x| tau_at(x, th)).collect();
        rows.extend(xs.iter().zip(&taus).map(|(&x, &t)| vec![x, th, t]));
        series.push(Series {
            label: theta_label(th),
            xs: xs.clone(),
            ys: taus.clone(),
            dashed: th > FRAC_PI_2,
        });

        let line = if th == 0.0 {
            "tau = 1/|1 - x| diverges at x = 1, no finite maximum".to_string()
        } else {
            match tau_extremum(th).ok().flatten() {
                None => "monotone decreasing, no interior maximum".to_string(),
                Some((xe, te)) => {
                    let k = taus
                        .iter()
                        .enumerate()
                        .max_by(|p, q| p.1.total_cmp(q.1))
                        .map(|(k, _)| k)
                        .expect("at least two steps");
                    let inside = (a.x_min..=a.x_max).contains(&xe);
                    if inside && (xs[k] - xe).abs() > step * (1.0 + 1e-9) {
                        deferred = Some(CliError::Integrity(format!(
                            "theta={th}: grid argmax x={} is more than one step from x={xe}",
                            xs[k]
                        )));
                    }
                    format!(
                        "extremum (x, tau) = ({xe}, {te}); grid argmax x = {} (tau = {}){}",
                        xs[k],
                        taus[k],
                        if inside { "" } else { "; extremum lies outside the grid" }
                    )
                }
            }
        };
        eprintln!("theta = {th}: {line}");
        echo.push((format!("theta_{i}"), format!("{th}; {line}")));
    }

    let chart = Chart {
        title: "Resurrection time".into(),
        x_label: "ω₀/ω".into(),
        y_label: "τ (units of 2π/ω)".into(),
        annotation: vec![format!("{} samples on ω₀/ω ∈ [{}, {}]", a.steps, a.x_min, a.x_max)],
        series,
    };
    let data = Dataset {
        params: echo,
        axes: vec![("theta".into(), thetas), ("x".into(), xs)],
        columns: vec!["x".into(), "theta".into(), "tau".into()],
        rows,
    };
    Ok((
        Output::Table {
            data,
            chart: Some(chart),
        },
        deferred,
    ))
}

fn fig(a: &FigArgs) -> Result<Output, CliError> {
    let which = match a.which {
        FigName::Fig1 => Figure::Fig1,
        FigName::Fig2 => Figure::Fig2,
        FigName::Fig3 => Figure::Fig3,
    };
    let mut spec = figure_spec(which);
    spec.oracle = a.oracle;
    let result = run_sweep(&spec)?;

    let (table, title, x_label, y_label, annotation) = match which {
        Figure::Fig1 | Figure::Fig2 => {
            let ratio = spec.fixed.omega / spec.fixed.omega0;
            let t_axis = result.axis(AxisName::Time).expect("survival figures sweep time");
            (
                "survival",
                format!("Survival probability, ω = {ratio} ω₀"),
                "t·ω₀",
                "survival probability",
                format!(
                    "ω = {ratio} ω₀, ω₀ = 1, {} samples on t·ω₀ ∈ [0, {}]",
                    t_axis.len(),
                    t_axis[t_axis.len() - 1]
                ),
            )
        }
        Figure::Fig3 => {
            let x_axis = result.axis(AxisName::LarmorRatio).expect("tau figure sweeps x");
            (
                "tau",
                "Resurrection time".to_string(),
                "ω₀/ω",
                "τ (units of 2π/ω)",
                format!(
                    "{} samples on ω₀/ω ∈ [0, {}]; dashed: θ > π/2",
                    x_axis.len(),
                    x_axis[x_axis.len() - 1]
                ),
            )
        }
    };
    let xs = result.axes.last().expect("figures have axes").values.clone();
    let series = result
        .curves(table)
        .expect("figure table exists")
        .into_iter()
        .map(|(lead, ys)| Series {
            label: theta_label(lead[0]),
            xs: xs.clone(),
            ys,
            dashed: lead[0] > FRAC_PI_2,
        })
        .collect();
    let chart = Chart {
        title,
        x_label: x_label.into(),
        y_label: y_label.into(),
        annotation: vec![annotation],
        series,
    };

    let mut echo = vec![
        ("tool".to_string(), tool()),
        ("command".to_string(), format!("fig {which}")),
    ];
    echo.extend(result.header.iter().filter(|(k, _)| k != "tool").cloned());
    let data = Dataset {
        params: echo,
        axes: result
            .axes
            .iter()
            .map(|ax| (ax.name.to_string(), ax.values.clone()))
            .collect(),
        columns: result.column_names(),
        rows: result.rows().collect(),
    };
    Ok(Output::Table {
        data,
        chart: Some(chart),
    })
}

fn adiabatic(a: &AdiabaticArgs) -> Result<Output, CliError> {
    let p = drive(&a.drive)?;
    if !a.threshold.is_finite() || a.threshold <= 0.0 {
        return Err(usage(format!(
            "--threshold: must be finite and > 0, got {}",
            a.threshold
        )));
    }
    let dt = a.dt.unwrap_or_else(|| default_fd_step(&p));
    let parameter = adiabaticity_parameter(&p);
    let element = adiabaticity_matrix_element(&p, a.t, dt).map_err(|e| usage(format!("--dt/--t: {e}")))?;
    let adiabatic = parameter < a.threshold;

    let mut r = Report::default();
    r.push("omega0", p.omega0());
    r.push("omega", p.omega());
    r.push("theta", p.theta());
    r.push("parameter", parameter);
    r.push("matrix_element", element);
    r.push("t", a.t);
    r.push("fd_step", dt);
    r.push("threshold", a.threshold);
    r.push("adiabatic", adiabatic);
    r.push("verdict", if adiabatic { "adiabatic" } else { "NOT adiabatic" });
    Ok(Output::Report(r))
}

fn geometry(a: &GeometryArgs) -> Result<Output, CliError> {
    let c = TrapConfig::new(a.a0, a.b0, a.omega, a.gamma, a.mu, a.mass)?;
    let h = hierarchy_check(&c, a.margin)?;

    let mut r = Report::default();
    r.push("r0", circle_of_death_radius(&c));
    r.push("spring_constant", spring_constant(&c));
    r.push("omega_osc", h.omega_osc);
    r.push("omega", h.omega);
    r.push("omega0_b0", h.omega0_ref);
    r.push("ratio_omega_over_omega_osc", h.ratio_low);
    r.push("ratio_omega0_over_omega", h.ratio_high);
    r.push("margin", h.margin);
    r.push("hierarchy_satisfied", h.satisfied);
    r.push(
        "verdict",
        if h.satisfied {
            "omega_osc << omega << omega0 holds"
        } else {
            "omega_osc << omega << omega0 violated"
        },
    );
    Ok(Output::Report(r))
}

fn confine(a: &ConfineArgs) -> Result<Output, CliError> {
    let p = drive(&a.drive)?;
    let v = confinement_advisor(&p, a.escape_time)?;
    let mut r = Report::default();
    r.push("escape_time", v.escape_time);
    r.push(
        "resurrection_time",
        v.resurrection_time.map_or(Value::Null, Value::from),
    );
    r.push("ratio", v.ratio.map_or(Value::Null, Value::from));
    r.push("confined", v.confined);
    Ok(Output::Report(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_hits_endpoint() {
        let g = time_grid(20.0, 2001).unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2000], 20.0);
        assert_eq!(time_grid(0.0, 1).unwrap(), vec![0.0]);
        assert!(time_grid(1.0, 1).is_err());
        assert!(time_grid(-1.0, 5).is_err());
    }

    #[test]
    fn theta_labels() {
        assert_eq!(theta_label(PI / 6.0), "θ = π/6");
        assert_eq!(theta_label(0.3), "θ = 0.3");
    }

    fn report(out: Output) -> Report {
        match out {
            Output::Report(r) => r,
            Output::Table { .. } => panic!("expected a report"),
        }
    }

    fn value(r: &Report, key: &str) -> Value {
        r.entries.iter().find(|(k, _)| k == key).unwrap().1.clone()
    }

    fn adiabatic_report(omega0: f64, omega: f64, theta: f64) -> Report {
        let a = AdiabaticArgs {
            drive: DriveArgs { omega0, omega, theta },
            threshold: 0.1,
            t: 0.0,
            dt: None,
        };
        report(adiabatic(&a).unwrap())
    }

    #[test]
    fn adiabatic_verdicts() {
        let r = adiabatic_report(1.0, 1.0, 0.0);
        assert_eq!(value(&r, "parameter"), 0.0);
        assert_eq!(value(&r, "verdict"), "adiabatic");

        let r = adiabatic_report(100.0, 1.0, FRAC_PI_2);
        assert!((value(&r, "parameter").as_f64().unwrap() - 0.005).abs() < 1e-15);
        assert_eq!(value(&r, "verdict"), "adiabatic");

        let r = adiabatic_report(1.0, 1.5, FRAC_PI_2);
        assert!((value(&r, "parameter").as_f64().unwrap() - 0.75).abs() < 1e-15);
        assert!((value(&r, "matrix_element").as_f64().unwrap() - 0.75).abs() < 1e-8);
        assert_eq!(value(&r, "verdict"), "NOT adiabatic");
    }

    #[test]
    fn geometry_report_values() {
        let a = GeometryArgs {
            a0: 1.0,
            b0: 1e-3,
            omega: 2.0 * PI * 5e3,
            gamma: 8.794e10,
            mu: 9.274e-24,
            mass: 1.443e-25,
            margin: 10.0,
        };
        let r = report(geometry(&a).unwrap());
        assert!((value(&r, "r0").as_f64().unwrap() - 1e-3).abs() < 1e-18);
        assert!((value(&r, "spring_constant").as_f64().unwrap() - 4.637e-21).abs() < 1e-24);
        assert!((value(&r, "omega_osc").as_f64().unwrap() - 179.260_821_526_741).abs() < 1e-9);
        assert_eq!(value(&r, "hierarchy_satisfied"), true);
    }

    #[test]
    fn confine_example() {
        let a = ConfineArgs {
            drive: DriveArgs {
                omega0: 1.0,
                omega: 1.5,
                theta: FRAC_PI_2,
            },
            escape_time: 3.0,
        };
        let r = report(confine(&a).unwrap());
        assert_eq!(value(&r, "confined"), false);
        let tau = value(&r, "resurrection_time").as_f64().unwrap();
        assert!((tau - 2.0 * PI / 3.25f64.sqrt()).abs() < 1e-12);
    }
}
