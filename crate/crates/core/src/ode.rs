//! Runge-Kutta steppers for a two-component complex state.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type State = [Complex64; 2];

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for &(c, k) in terms {
        if c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

// Dormand-Prince 5(4) coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous extension of order 4.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

/// Dense-output polynomial for one accepted step.
struct Dense {
    t0: f64,
    h: f64,
    r: [State; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> State {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i] + (r[1][i] + (r[2][i] + (r[3][i] + r[4][i] * s1) * s) * s1) * s;
        }
        out
    }
}

/// Integrates from `grid[0]` and returns the state at every grid time.
///
/// `grid` must be non-decreasing. Values between accepted steps come from
/// the method's 4th-order continuous extension.
pub(crate) fn integrate_adaptive<F>(rhs: F, y0: State, grid: &[f64], opts: AdaptiveOptions) -> Result<Vec<State>>
where
    F: Fn(f64, &State) -> State,
{
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t_start) = grid.first() else {
        return Ok(out);
    };
    let t_end = *grid.last().unwrap();
    let mut t = t_start;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = (0.01 * opts.max_step).min(t_end - t_start).max(f64::MIN_POSITIVE);
    let mut next = 0;
    while next < grid.len() && grid[next] <= t {
        out.push(y);
        next += 1;
    }

    let mut steps = 0usize;
    while next < grid.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration {
                t,
                reason: format!("exceeded {} steps", opts.max_steps),
            });
        }
        h = h.min(opts.max_step).min(t_end - t);
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let mut sq = 0.0;
        for i in 0..2 {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            sq += (e.norm() / scale).powi(2);
        }
        let err = (sq / 2.0).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            let t_new = if t_end - (t + h) <= 1e-15 * t_end.abs() {
                t_end
            } else {
                t + h
            };
            let mut dense = None;
            while next < grid.len() && grid[next] <= t_new {
                let dense = dense.get_or_insert_with(|| {
                    let diff = [y_new[0] - y[0], y_new[1] - y[1]];
                    let bspl = [k1[0] * h - diff[0], k1[1] * h - diff[1]];
                    let r3 = [diff[0] - k7[0] * h - bspl[0], diff[1] - k7[1] * h - bspl[1]];
                    let r4 = [0, 1]
                        .map(|i| (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h);
                    Dense {
                        t0: t,
                        h,
                        r: [y, diff, bspl, r3, r4],
                    }
                });
                out.push(if grid[next] == t_new {
                    y_new
                } else {
                    dense.eval(grid[next])
                });
                next += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            h *= factor;
        } else {
            h *= factor.min(1.0);
        }
    }
    Ok(out)
}

fn rk4_step<F>(rhs: &F, t: f64, y: &State, h: f64) -> State
where
    F: Fn(f64, &State) -> State,
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]));
    let k3 = rhs(t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]));
    let k4 = rhs(t + h, &axpy(y, h, &[(1.0, &k3)]));
    axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    )
}

/// Classical 4th-order Runge-Kutta with steps no longer than `step`; each
/// grid interval is split into equal substeps so grid times are hit exactly.
pub(crate) fn integrate_rk4<F>(rhs: F, y0: State, grid: &[f64], step: f64) -> Vec<State>
where
    F: Fn(f64, &State) -> State,
{
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t0) = grid.first() else {
        return out;
    };
    let mut y = y0;
    let mut t = t0;
    out.push(y);
    for &target in &grid[1..] {
        let span = target - t;
        if span > 0.0 {
            let n = (span / step - 1e-9).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for i in 0..n {
                y = rk4_step(&rhs, t + i as f64 * h, &y, h);
            }
        }
        t = target;
        out.push(y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // y' = i w y, exact y = e^{i w t}
    fn rotation(w: f64) -> impl Fn(f64, &State) -> State {
        move |_, y| [y[0] * Complex64::new(0.0, w), y[1] * Complex64::new(0.0, -w)]
    }

    fn opts() -> AdaptiveOptions {
        AdaptiveOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            max_steps: 1_000_000,
        }
    }

    #[test]
    fn adaptive_hits_exact_solution_on_dense_grid() {
        let grid: Vec<f64> = (0..=997).map(|i| i as f64 * 0.0313).collect();
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let ys = integrate_adaptive(rotation(1.7), y0, &grid, opts()).unwrap();
        assert_eq!(ys.len(), grid.len());
        for (t, y) in grid.iter().zip(&ys) {
            let exact = Complex64::from_polar(1.0, 1.7 * t);
            assert!((y[0] - exact).norm() < 1e-8, "t = {t}");
            assert!((y[1] - exact.conj()).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn adaptive_handles_sparse_grid_and_repeated_start() {
        let grid = [0.0, 0.0, 25.0];
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let ys = integrate_adaptive(rotation(1.0), y0, &grid, opts()).unwrap();
        assert_eq!(ys.len(), 3);
        assert_eq!(ys[1], y0);
        assert!((ys[2][0] - Complex64::from_polar(1.0, 25.0)).norm() < 1e-8);
    }

    #[test]
    fn adaptive_reports_step_budget() {
        let mut o = opts();
        o.max_steps = 3;
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let err = integrate_adaptive(rotation(1.0), y0, &[0.0, 100.0], o).unwrap_err();
        assert!(matches!(err, Error::Integration { .. }));
    }

    #[test]
    fn rk4_is_fourth_order() {
        let grid = [0.0, 3.0];
        let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let exact = Complex64::from_polar(1.0, 2.0 * 3.0);
        let err = |h: f64| (integrate_rk4(rotation(2.0), y0, &grid, h)[1][0] - exact).norm();
        let ratio = err(0.05) / err(0.025);
        assert!((8.0..32.0).contains(&ratio), "ratio {ratio}");
    }
}
