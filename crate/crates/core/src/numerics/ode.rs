//! Dormand-Prince 5(4) integration of second-order linear ODEs and a
//! shooting solver for two-point Dirichlet problems.

use super::ToleranceConfig;
use crate::error::{Error, Result};

const MAX_STEPS: usize = 5_000_000;

/// `u'' = p(t) u' + q(t) u`.
pub trait LinearOde2 {
    /// Returns `(p(t), q(t))`.
    fn coefficients(&self, t: f64) -> (f64, f64);
}

impl<F: Fn(f64) -> (f64, f64)> LinearOde2 for F {
    fn coefficients(&self, t: f64) -> (f64, f64) {
        self(t)
    }
}

fn rhs<O: LinearOde2 + ?Sized>(ode: &O, t: f64, y: [f64; 2]) -> [f64; 2] {
    let (p, q) = ode.coefficients(t);
    [y[1], p * y[1] + q * y[0]]
}

// Dormand-Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step<O: LinearOde2 + ?Sized>(ode: &O, t: f64, y: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = rhs(ode, t + C[s] * h, ys);
    }
    let mut y5 = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        for i in 0..2 {
            y5[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (y5, err)
}

/// Integrates from `(t0, y0)` through each time in `outputs` (monotone, all
/// on the same side of `t0`), returning `[u, u']` at each output.
///
/// Local error per step is held below `abs_tol + rel_tol * |y_i|` per component.
pub fn integrate<O: LinearOde2 + ?Sized>(
    ode: &O,
    t0: f64,
    y0: [f64; 2],
    outputs: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(outputs.len());
    let Some(&last) = outputs.last() else {
        return Ok(out);
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    let span = (last - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut h = (0.01 * span).clamp(1e-6, 0.05).min(span.max(1e-300));
    let mut steps = 0usize;
    for &target in outputs {
        if (target - t) * dir < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "output times must be monotone away from t0 = {t0}"
            )));
        }
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integration {
                    t,
                    reason: format!("exceeded {MAX_STEPS} steps"),
                });
            }
            let remaining = (target - t).abs();
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let (y_new, err) = dp_step(ode, t, y, dir * step);
            let mut norm = 0.0f64;
            for i in 0..2 {
                let scale = tol.abs_tol + tol.rel_tol * y[i].abs().max(y_new[i].abs());
                norm = norm.max(err[i].abs() / scale);
            }
            if !norm.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if norm <= 1.0 {
                t = if clipped { target } else { t + dir * step };
                y = y_new;
                if !clipped {
                    let factor = if norm == 0.0 {
                        5.0
                    } else {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h = step * factor;
                }
            } else {
                h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Integration {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    /// `(t, u, u')` at each requested sample point, in the order given.
    pub samples: Vec<(f64, f64, f64)>,
    /// `u'(0)` at the left end of the interval.
    pub left_derivative: f64,
    /// `u(0)` as reconstructed; equals `left_value` to tolerance.
    pub left_value: f64,
}

/// Solves `u'' = p u' + q u` on `(t_left, t_right)` with Dirichlet data by
/// shooting on the terminal slope `s = u'(t_right)`.
///
/// The two fundamental solutions with terminal data `(0, 1)` and `(1, 0)`
/// are integrated backwards from `t_right`, so a mode growing towards
/// `t_left` is the dominant one and is integrated stably. `u(t_left)` is
/// affine in `s`; a secant iteration on `s` converges once the left
/// boundary residual is below `abs_tol + rel_tol * max(|left|, |right|)`.
pub fn solve_bvp_shooting<O: LinearOde2 + ?Sized>(
    ode: &O,
    interval: (f64, f64),
    left_value: f64,
    right_value: f64,
    samples: &[f64],
    tol: &ToleranceConfig,
) -> Result<BvpSolution> {
    tol.validate()?;
    let (t_left, t_right) = interval;
    if !(t_right > t_left) {
        return Err(Error::InvalidArgument(format!(
            "interval ({t_left}, {t_right}) must have positive length"
        )));
    }
    if samples.iter().any(|&t| t < t_left || t > t_right) {
        return Err(Error::InvalidArgument("sample outside interval".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| samples[j].total_cmp(&samples[i]));
    let mut outputs: Vec<f64> = order.iter().map(|&i| samples[i]).collect();
    outputs.push(t_left);

    let slope_basis = integrate(ode, t_right, [0.0, 1.0], &outputs, tol)?;
    let value_basis = if right_value != 0.0 {
        integrate(ode, t_right, [1.0, 0.0], &outputs, tol)?
    } else {
        vec![[0.0; 2]; outputs.len()]
    };
    // Near-resonance: the slope mode barely reaches the left end.
    let reach = slope_basis
        .iter()
        .fold((t_right - t_left).min(1.0), |acc, y| acc.max(y[0].abs()));
    if slope_basis[outputs.len() - 1][0].abs() <= 1e-10 * reach {
        return Err(Error::NoConvergence {
            iterations: 0,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    let left_of = |s: f64| {
        let n = outputs.len() - 1;
        right_value * value_basis[n][0] + s * slope_basis[n][0]
    };

    let target = tol.abs_tol + tol.rel_tol * left_value.abs().max(right_value.abs());
    let (mut s_prev, mut s) = (0.0, 1.0);
    let mut f_prev = left_of(s_prev) - left_value;
    let mut f = left_of(s) - left_value;
    let mut converged = f_prev.abs() <= target;
    if converged {
        s = s_prev;
    }
    let mut iter = 0;
    while !converged {
        if iter >= tol.max_iter || f == f_prev {
            return Err(Error::NoConvergence {
                iterations: iter,
                lo: s_prev.min(s),
                hi: s_prev.max(s),
            });
        }
        let s_next = s - f * (s - s_prev) / (f - f_prev);
        s_prev = s;
        f_prev = f;
        s = s_next;
        f = left_of(s) - left_value;
        converged = f.abs() <= target;
        iter += 1;
    }

    let combine = |k: usize| {
        [
            right_value * value_basis[k][0] + s * slope_basis[k][0],
            right_value * value_basis[k][1] + s * slope_basis[k][1],
        ]
    };
    let mut result = vec![(0.0, 0.0, 0.0); samples.len()];
    for (k, &i) in order.iter().enumerate() {
        let y = combine(k);
        result[i] = (samples[i], y[0], y[1]);
    }
    let left = combine(outputs.len() - 1);
    Ok(BvpSolution {
        samples: result,
        left_derivative: left[1],
        left_value: left[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helmholtz(_: f64) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::new(1e-13, 1e-13, 50).unwrap()
    }

    #[test]
    fn coth_two() {
        let sol = solve_bvp_shooting(&helmholtz, (0.0, 2.0), 1.0, 0.0, &[], &tol()).unwrap();
        let want = -1.0 / 2f64.tanh();
        assert!((sol.left_derivative - want).abs() < 1e-11);
        assert!((sol.left_derivative + 1.037314).abs() < 1e-6);
    }

    #[test]
    fn coth_ten() {
        let sol = solve_bvp_shooting(&helmholtz, (0.0, 10.0), 1.0, 0.0, &[], &tol()).unwrap();
        assert!((sol.left_derivative + 1.0 / 10f64.tanh()).abs() < 1e-11);
        // coth(10) - 1 = 2 e^{-20} / (1 - e^{-20}) ≈ 4.12e-9
        assert!((sol.left_derivative + 1.0 + 4.122307e-9).abs() < 1e-14);
    }

    #[test]
    fn zero_data_gives_zero() {
        let samples = [0.3, 1.0, 4.5];
        let sol = solve_bvp_shooting(&helmholtz, (0.0, 5.0), 0.0, 0.0, &samples, &tol()).unwrap();
        assert!(sol.samples.iter().all(|&(_, u, du)| u == 0.0 && du == 0.0));
    }

    #[test]
    fn reproduces_closed_form_profiles() {
        for t_end in [1.0f64, 2.0, 5.0, 10.0] {
            // u = (2 sinh(T - t) + 3 sinh(t)) / sinh T: left 2, right 3.
            // Nonzero right data cancels two modes of size e^T, so allow e^T * tol.
            let allowed = 1e-13 * t_end.exp() * 10.0;
            let samples: Vec<f64> = (0..=20).map(|i| t_end * i as f64 / 20.0).collect();
            let sol =
                solve_bvp_shooting(&helmholtz, (0.0, t_end), 2.0, 3.0, &samples, &tol()).unwrap();
            for &(t, u, du) in &sol.samples {
                let want = (2.0 * (t_end - t).sinh() + 3.0 * t.sinh()) / t_end.sinh();
                let dwant = (-2.0 * (t_end - t).cosh() + 3.0 * t.cosh()) / t_end.sinh();
                assert!(
                    (u - want).abs() < allowed * want.abs().max(1.0),
                    "T={t_end} t={t}"
                );
                assert!(
                    (du - dwant).abs() < allowed * dwant.abs().max(1.0),
                    "T={t_end} t={t}"
                );
            }
        }
    }

    #[test]
    fn resonant_problem_fails() {
        // u'' = -u on (0, pi): the homogeneous problem has a nontrivial solution.
        let ode = |_t: f64| (0.0, -1.0);
        let err = solve_bvp_shooting(&ode, (0.0, std::f64::consts::PI), 1.0, 0.0, &[], &tol());
        assert!(err.is_err());
    }
}
