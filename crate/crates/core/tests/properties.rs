use std::f64::consts::PI;

use proptest::prelude::*;
use toptrap_core::geometry::Position;
use toptrap_core::*;

fn drive() -> impl Strategy<Value = DriveParams> {
    (0.05f64..20.0, 0.0f64..20.0, 0.0f64..=PI).prop_map(|(w0, w, th)| DriveParams::new(w0, w, th).unwrap())
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(p in drive(), t in 0.0f64..200.0) {
        let s = survival_probability(&p, t).unwrap();
        let tr = transition_probability(&p, t).unwrap();
        prop_assert!((s + tr - 1.0).abs() <= 1e-14);
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&s));
    }

    #[test]
    fn amplitudes_stay_normalized(p in drive(), t in 0.0f64..200.0) {
        prop_assert!((amplitudes_at(&p, t).unwrap().norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn omega_bar_symmetric_under_swap(w0 in 0.05f64..20.0, w in 0.05f64..20.0, th in 0.0f64..=PI) {
        let a = DriveParams::new(w0, w, th).unwrap().omega_bar();
        let b = DriveParams::new(w, w0, th).unwrap().omega_bar();
        prop_assert!((a - b).abs() <= 1e-13 * (w0 + w));
    }

    #[test]
    fn dynamics_depend_only_on_ratios(p in drive(), t in 0.0f64..50.0, c in 0.01f64..100.0) {
        let scaled = DriveParams::new(c * p.omega0(), c * p.omega(), p.theta()).unwrap();
        let a = survival_probability(&p, t).unwrap();
        let b = survival_probability(&scaled, t / c).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
        if let (Ok(r1), Ok(r2)) = (resurrection_time(&p), resurrection_time(&scaled)) {
            prop_assert!((r1.tau - r2.tau).abs() <= 1e-12 * r1.tau);
        }
    }

    #[test]
    fn survival_periodic_in_rabi_period(p in drive(), t in 0.0f64..20.0) {
        prop_assume!(!p.is_degenerate());
        let period = resurrection_period(&p).unwrap();
        prop_assume!(period < 1e4);
        let a = survival_probability(&p, t).unwrap();
        let b = survival_probability(&p, t + period).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn propagator_is_unitary_and_matches(p in drive(), t in 0.0f64..50.0) {
        let u = rotating_frame_propagator(&p, t).unwrap();
        prop_assert!((u.adjoint() * u).max_abs_diff(&ComplexMatrix2::identity()) <= 1e-13);
        let a = survival_from_propagator(&p, t).unwrap();
        let b = survival_probability(&p, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-11, "{} vs {}", a, b);
    }

    #[test]
    fn hamiltonian_periodic_in_drive(p in drive(), t in -50.0f64..50.0) {
        prop_assume!(p.omega() > 0.0);
        let a = hamiltonian_at(&p, t).unwrap();
        let b = hamiltonian_at(&p, t + p.drive_period().unwrap()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * p.omega0());
    }

    #[test]
    fn zero_locus_lies_on_circle(t in -1.0f64..1.0, a0 in 0.1f64..10.0, b0 in 1e-4f64..1e-2) {
        let c = TrapConfig::new(a0, b0, 2.0 * PI * 5e3, 8.8e10, 9.274e-24, 1.443e-25).unwrap();
        let pos = zero_locus(&c, t);
        prop_assert!((pos.norm() - circle_of_death_radius(&c)).abs() <= 1e-15 * circle_of_death_radius(&c) * 4.0);
        prop_assert!(field_at(&c, pos, t).magnitude() <= 1e-15 * b0);
    }
}

#[test]
fn trap_field_is_divergence_free() {
    let c = TrapConfig::new(1.7, 2e-3, 2.0 * PI * 7e3, 8.8e10, 9.274e-24, 1.443e-25).unwrap();
    let h = 1e-6;
    for (x, y, z, t) in [
        (1e-3, -2e-3, 5e-4, 0.0),
        (0.0, 0.0, 0.0, 3e-5),
        (-4e-3, 1e-3, -2e-3, 1e-4),
    ] {
        let d = |dx: f64, dy: f64, dz: f64| field_at(&c, Position::new(x + dx, y + dy, z + dz), t);
        let div = (d(h, 0.0, 0.0).bx - d(-h, 0.0, 0.0).bx) / (2.0 * h)
            + (d(0.0, h, 0.0).by - d(0.0, -h, 0.0).by) / (2.0 * h)
            + (d(0.0, 0.0, h).bz - d(0.0, 0.0, -h).bz) / (2.0 * h);
        assert!(div.abs() <= 1e-9 * c.a0, "div = {div}");
    }
}

#[test]
fn in_plane_field_angle_is_perpendicular() {
    let c = TrapConfig::new(1.0, 1e-3, 2.0 * PI * 5e3, 8.8e10, 9.274e-24, 1.443e-25).unwrap();
    for (x, y, t) in [(3e-4, 1e-4, 0.0), (-2e-3, 5e-3, 1e-4), (0.0, 0.0, 7e-5)] {
        let th = field_angle_at(&c, Position::in_plane(x, y), t).unwrap();
        assert_eq!(th, std::f64::consts::FRAC_PI_2);
    }
}

#[test]
fn geometry_scaling_laws() {
    let c = TrapConfig::new(1.0, 1e-3, 1e4, 8.8e10, 9.274e-24, 1.443e-25).unwrap();
    let k = spring_constant(&c);
    let w = oscillation_frequency(&c);
    let twice_a = TrapConfig { a0: 2.0 * c.a0, ..c };
    assert_eq!(spring_constant(&twice_a), 4.0 * k);
    assert!((oscillation_frequency(&twice_a) - 2.0 * w).abs() <= 1e-14 * w);
    let twice_b = TrapConfig { b0: 2.0 * c.b0, ..c };
    assert_eq!(circle_of_death_radius(&twice_b), 2.0 * circle_of_death_radius(&c));
    assert_eq!(spring_constant(&twice_b), k / 2.0);
    let heavy = TrapConfig {
        mass: 4.0 * c.mass,
        ..c
    };
    assert!((oscillation_frequency(&heavy) - w / 2.0).abs() <= 1e-14 * w);
}
