mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toptrap_cli::output::{parse_csv, to_csv, Dataset};
use toptrap_core::{survival_probability, transition_probability, DriveParams};

#[test]
fn evolve_without_drive_never_flips() {
    let out = toptrap(&[
        "evolve",
        "--omega0",
        "1",
        "--omega",
        "0",
        "--theta",
        "1.0",
        "--t-max",
        "10",
        "--samples",
        "11",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let d = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(d.rows.len(), 11);
    assert!(d.column("survival").unwrap().iter().all(|&s| s == 1.0));
    assert!(d.column("transition").unwrap().iter().all(|&s| s == 0.0));
}

#[test]
fn evolve_all_methods_agree() {
    let out = toptrap(&[
        "evolve",
        "--omega0",
        "1",
        "--omega",
        "1.5",
        "--theta",
        "1.5708",
        "--t-max",
        "20",
        "--samples",
        "2001",
        "--method",
        "all",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let delta = reported_delta(&stderr(&out)).expect("delta on stderr");
    assert!(delta <= 1e-8, "delta {delta}");
    let d = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(
        d.columns,
        [
            "t",
            "survival",
            "transition",
            "survival_ode",
            "transition_ode",
            "survival_lab",
            "transition_lab",
            "survival_propagator",
            "transition_propagator"
        ]
    );
    assert_eq!(d.rows.len(), 2001);
    assert_eq!(d.param("theta"), Some("1.5708"));
}

#[test]
fn evolve_rejects_theta_out_of_range() {
    let out = toptrap(&[
        "evolve",
        "--omega0",
        "1",
        "--omega",
        "1",
        "--theta",
        "4.0",
        "--t-max",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("theta out of [0, pi]"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&toptrap(&["--help"])), 0);
    assert_eq!(code(&toptrap(&["evolve", "--help"])), 0);
    assert_eq!(code(&toptrap(&[])), 2);
    assert_eq!(code(&toptrap(&["evolve", "--omega0", "1"])), 2);
    assert_eq!(
        code(&toptrap(&[
            "evolve", "--omega0", "x", "--omega", "1", "--theta", "1", "--t-max", "1"
        ])),
        2
    );
    let neg = toptrap(&[
        "evolve", "--omega0", "-1", "--omega", "1", "--theta", "1", "--t-max", "1",
    ]);
    assert_eq!(code(&neg), 2);
    assert!(stderr(&neg).contains("--omega0"));
    assert_eq!(
        code(&toptrap(&[
            "adiabatic",
            "--omega0",
            "1",
            "--omega",
            "1",
            "--theta",
            "1",
            "--format",
            "svg"
        ])),
        2
    );
    let threads = toptrap_env(&["fig", "fig3"], &[("TOPTRAP_THREADS", "zero")]);
    assert_eq!(code(&threads), 2);

    // Loose tolerances make the ODE columns disagree with the closed form.
    let loose = toptrap(&[
        "evolve",
        "--omega0",
        "1",
        "--omega",
        "1.5",
        "--theta",
        "1",
        "--t-max",
        "50",
        "--samples",
        "51",
        "--method",
        "ode",
        "--rel-tol",
        "1e-2",
        "--abs-tol",
        "1e-2",
    ]);
    assert_eq!(code(&loose), 3, "{}", stderr(&loose));
    assert!(reported_delta(&stderr(&loose)).unwrap() > 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    let io = toptrap(&["fig", "fig3", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&io), 4);
}

#[test]
fn csv_round_trip_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("evolve.csv");
    let out = toptrap(&[
        "evolve",
        "--omega0",
        "2",
        "--omega",
        "0.7",
        "--theta",
        "0.9",
        "--t-max",
        "13",
        "--samples",
        "257",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let d = parse_csv(&text).unwrap();
    let p = DriveParams::new(2.0, 0.7, 0.9).unwrap();
    for row in &d.rows {
        assert_eq!(row[1], survival_probability(&p, row[0]).unwrap());
        assert_eq!(row[2], transition_probability(&p, row[0]).unwrap());
    }
    assert_eq!(to_csv(&d), text);
}

#[test]
fn csv_round_trip_random_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rows: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let mag = 10f64.powi(rng.gen_range(-300..300));
            vec![
                rng.gen::<f64>() * mag,
                -rng.gen::<f64>(),
                f64::from_bits(rng.gen::<u64>() >> 2),
            ]
        })
        .collect();
    let d = Dataset {
        params: vec![("seed".into(), "7".into())],
        axes: vec![],
        columns: vec!["a".into(), "b".into(), "c".into()],
        rows,
    };
    assert_eq!(parse_csv(&to_csv(&d)).unwrap().rows, d.rows);
}

#[test]
fn json_matches_csv() {
    let args = [
        "evolve",
        "--omega0",
        "1",
        "--omega",
        "1.5",
        "--theta",
        "1",
        "--t-max",
        "5",
        "--samples",
        "21",
    ];
    let csv = parse_csv(&stdout(&toptrap(&args))).unwrap();
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&toptrap(&json_args))).unwrap();
    assert_eq!(json["params"]["omega"], "1.5");
    assert_eq!(json["axes"]["t"].as_array().unwrap().len(), 21);
    let data: Vec<Vec<f64>> = serde_json::from_value(json["data"].clone()).unwrap();
    assert_eq!(data, csv.rows);
    let columns: Vec<String> = serde_json::from_value(json["columns"].clone()).unwrap();
    assert_eq!(columns, csv.columns);
}

#[test]
fn tau_reports_extremum() {
    let third = (PI / 3.0).to_string();
    let three_quarters = (3.0 * PI / 4.0).to_string();
    let out = toptrap(&["tau", "--theta", &third, "--theta", &three_quarters, "--steps", "401"]);
    assert_eq!(code(&out), 0);
    let err = stderr(&out);
    let line = err
        .lines()
        .find(|l| l.starts_with(&format!("theta = {third}")))
        .unwrap();
    assert!(line.contains("extremum (x, tau) = (0.5"), "{line}");
    assert!(line.contains(", 1.1547"), "{line}");
    assert!(err.contains("monotone decreasing, no interior maximum"));

    let d = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(d.columns, ["x", "theta", "tau"]);
    assert_eq!(d.rows.len(), 802);
    for row in d.rows.iter().filter(|r| r[0] == 0.0) {
        assert_eq!(row[2], 1.0);
    }
}

#[test]
fn fig_datasets() {
    let d = parse_csv(&stdout(&toptrap(&["fig", "fig1"]))).unwrap();
    assert_eq!(d.rows.len(), 1501 * 4);
    assert_eq!(d.param("figure"), Some("fig1"));

    let d = parse_csv(&stdout(&toptrap(&["fig", "fig2"]))).unwrap();
    let min = d
        .rows
        .iter()
        .filter(|r| r[0] == FRAC_PI_2)
        .map(|r| r[2])
        .fold(f64::INFINITY, f64::min);
    // The sampled minimum sits within O(dt^2) of the exact 0.8.
    assert!((min - 0.8).abs() < 1e-4, "{min}");

    let oracle = toptrap(&["fig", "fig2", "--oracle"]);
    assert_eq!(code(&oracle), 0, "{}", stderr(&oracle));
    let d = parse_csv(&stdout(&oracle)).unwrap();
    assert!(d.columns.contains(&"survival_lab".to_string()));
}

#[test]
fn fig3_svg_is_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.svg");
    let out = toptrap(&["fig", "fig3", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(check_svg(&text), Ok(2));
    assert!(text.contains("θ = π/6") && text.contains("θ = 3π/4"));
    assert!(text.contains("ω₀/ω"));
}

#[test]
fn fig3_data_peaks_at_cos_theta() {
    let d = parse_csv(&stdout(&toptrap(&["fig", "fig3", "--format", "csv"]))).unwrap();
    let solid: Vec<&Vec<f64>> = d.rows.iter().filter(|r| r[0] == PI / 6.0).collect();
    let best = solid.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[1] - (PI / 6.0).cos()).abs() <= 0.01);
    assert!((best[2] - 2.0).abs() < 1e-3);
}

#[test]
fn reports_in_every_format() {
    let base = [
        "adiabatic",
        "--omega0",
        "100",
        "--omega",
        "1",
        "--theta",
        "1.5707963267948966",
    ];
    let text = stdout(&toptrap(&base));
    assert!(text.contains("verdict") && text.contains("adiabatic"));
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&toptrap(&json_args))).unwrap();
    assert!((json["parameter"].as_f64().unwrap() - 0.005).abs() < 1e-15);
    assert_eq!(json["adiabatic"], true);
    let mut csv_args = base.to_vec();
    csv_args.extend(["--format", "csv"]);
    assert!(stdout(&toptrap(&csv_args)).starts_with("quantity,value\n"));

    let geo = toptrap(&[
        "geometry",
        "--a0",
        "1",
        "--b0",
        "1e-3",
        "--omega",
        "31415.9",
        "--gamma",
        "8.794e10",
        "--mu",
        "9.274e-24",
        "--mass",
        "1.443e-25",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&geo)).unwrap();
    for key in [
        "r0",
        "spring_constant",
        "omega_osc",
        "omega0_b0",
        "hierarchy_satisfied",
        "margin",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    let bad = toptrap(&[
        "geometry", "--a0", "1", "--b0", "0", "--omega", "1", "--gamma", "1", "--mu", "1", "--mass", "1",
    ]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("--b0"));

    let confine = toptrap(&[
        "confine",
        "--omega0",
        "1",
        "--omega",
        "1.5",
        "--theta",
        "1.5707963267948966",
        "--escape-time",
        "3",
    ]);
    assert!(stdout(&confine).contains("confined"));
}

#[test]
fn thread_cap_does_not_change_results() {
    let one = toptrap_env(&["fig", "fig1"], &[("TOPTRAP_THREADS", "1")]);
    let many = toptrap_env(&["fig", "fig1"], &[("TOPTRAP_THREADS", "4")]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}
