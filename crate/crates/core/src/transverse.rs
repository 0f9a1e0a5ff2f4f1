//! The rescaled one-dimensional transverse problem.
//!
//! For a boundary point with curvatures `(kappa, K)` and mass `m`,
//!
//! ```text
//! Lambda_{m,kappa,K} = inf { Q(u) : u(0) = 1, u(sqrt m) = 0 },
//! Q(u) = int_0^{sqrt m} (|u'|^2 + |u|^2) a(tau) dtau,
//! a(tau) = 1 + tau kappa/m + tau^2 K/m^2.
//! ```
//!
//! The minimizer solves `-u'' - (a'/a) u' + u = 0` and `Lambda = -u'(0)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_validity_floor, rescaled_weight, CurvatureData};
use crate::numerics::{loglog_slope, solve_bvp_shooting, GaussLegendre, ToleranceConfig};

/// Largest panel width of the composite Gauss-Legendre rule on `[0, sqrt m]`.
pub const MAX_PANEL: f64 = 0.25;
const GL_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseProblem {
    pub m: f64,
    pub curv: CurvatureData,
}

impl TransverseProblem {
    /// Rejects masses below the floor where the weight may drop under 1/2.
    pub fn new(m: f64, curv: CurvatureData) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass must be positive, got {m}"
            )));
        }
        let floor = point_validity_floor(&curv);
        if m < floor {
            return Err(Error::InvalidArgument(format!(
                "m = {m} is below the weight validity floor {floor} for kappa = {}, K = {}",
                curv.kappa, curv.gauss
            )));
        }
        Ok(Self { m, curv })
    }

    pub fn length(&self) -> f64 {
        self.m.sqrt()
    }

    pub fn weight(&self, tau: f64) -> f64 {
        rescaled_weight(&self.curv, self.m, tau)
    }

    /// `a'(tau) / a(tau)`.
    pub fn log_weight_derivative(&self, tau: f64) -> f64 {
        let m = self.m;
        (self.curv.kappa / m + 2.0 * self.curv.gauss * tau / (m * m)) / self.weight(tau)
    }

    /// Quadrature nodes and weights on `[0, sqrt m]`.
    pub fn quadrature(&self) -> (Vec<f64>, Vec<f64>) {
        let len = self.length();
        let panels = (len / MAX_PANEL).ceil().max(1.0) as usize;
        GaussLegendre::new(GL_POINTS).panels(0.0, len, panels)
    }

    /// `Q(w)` for `w` given as `tau -> (w, w')`.
    pub fn quadratic_form(&self, w: impl Fn(f64) -> (f64, f64)) -> f64 {
        let (xs, ws) = self.quadrature();
        xs.iter()
            .zip(&ws)
            .map(|(&t, &q)| {
                let (v, dv) = w(t);
                q * (dv * dv + v * v) * self.weight(t)
            })
            .sum()
    }

    /// `(-d^2 - (a'/a) d + 1) v` from `(v, v', v'')`.
    pub fn apply_operator(&self, tau: f64, v: f64, dv: f64, d2v: f64) -> f64 {
        -d2v - self.log_weight_derivative(tau) * dv + v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseSolution {
    pub problem: TransverseProblem,
    /// `Lambda_{m,kappa,K}`.
    pub lambda: f64,
    /// `u'(0)`.
    pub deriv0: f64,
    /// `int_0^{sqrt m} |u|^2 a dtau`.
    pub mass: f64,
    /// `(tau, u, u')`: the left end, the quadrature nodes, the right end.
    pub profile: Vec<(f64, f64, f64)>,
    /// Quadrature weight of each profile sample (zero at the two ends).
    pub weights: Vec<f64>,
}

impl TransverseSolution {
    /// `Q(w - u)` for a competitor `w` with the same boundary data.
    pub fn distance_form(&self, w: impl Fn(f64) -> (f64, f64)) -> f64 {
        let p = &self.problem;
        self.profile
            .iter()
            .zip(&self.weights)
            .map(|(&(t, u, du), &q)| {
                let (v, dv) = w(t);
                let (e, de) = (v - u, dv - du);
                q * (de * de + e * e) * p.weight(t)
            })
            .sum()
    }

    /// `Q(w) - Lambda - Q(w - u)`, zero for every admissible `w`.
    pub fn pythagoras_defect(&self, w: impl Fn(f64) -> (f64, f64) + Copy) -> f64 {
        self.problem.quadratic_form(w) - self.lambda - self.distance_form(w)
    }
}

/// Solves the Euler-Lagrange equation by backward shooting from `sqrt m`.
pub fn solve_transverse(
    p: &TransverseProblem,
    tol: &ToleranceConfig,
) -> Result<TransverseSolution> {
    let len = p.length();
    let (xs, ws) = p.quadrature();
    let ode = |t: f64| (-p.log_weight_derivative(t), 1.0);
    let mut samples = Vec::with_capacity(xs.len() + 1);
    samples.extend_from_slice(&xs);
    samples.push(len);
    let bvp = solve_bvp_shooting(&ode, (0.0, len), 1.0, 0.0, &samples, tol)?;

    let mut profile = Vec::with_capacity(samples.len() + 1);
    profile.push((0.0, bvp.left_value, bvp.left_derivative));
    profile.extend_from_slice(&bvp.samples);
    let mut weights = Vec::with_capacity(profile.len());
    weights.push(0.0);
    weights.extend_from_slice(&ws);
    weights.push(0.0);

    let mass = profile
        .iter()
        .zip(&weights)
        .map(|(&(t, u, _), &q)| q * u * u * p.weight(t))
        .sum();
    Ok(TransverseSolution {
        problem: *p,
        lambda: -bvp.left_derivative,
        deriv0: bvp.left_derivative,
        mass,
        profile,
        weights,
    })
}

/// Solves many problems in parallel; output order follows input order.
pub fn sweep_transverse(
    problems: &[TransverseProblem],
    tol: &ToleranceConfig,
) -> Vec<Result<TransverseSolution>> {
    problems
        .par_iter()
        .map(|p| solve_transverse(p, tol))
        .collect()
}

/// `1 + kappa/(2m) + (K/2 - kappa^2/8)/m^2`.
pub fn expansion_lambda(p: &TransverseProblem) -> f64 {
    let m = p.m;
    1.0 + p.curv.kappa / (2.0 * m) + p.curv.second_order_coefficient() / (m * m)
}

/// The formal series terms `u0, u1, u2`, each returned with its first and
/// second derivatives as `(u, u', u'')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormalProfiles {
    pub curv: CurvatureData,
}

impl FormalProfiles {
    /// `e^{-tau}`.
    pub fn u0(&self, tau: f64) -> (f64, f64, f64) {
        let e = (-tau).exp();
        (e, -e, e)
    }

    /// `-(kappa/2) tau e^{-tau}`.
    pub fn u1(&self, tau: f64) -> (f64, f64, f64) {
        let c = -0.5 * self.curv.kappa;
        let (v, dv, d2v) = tau_power_exp(1, tau);
        (c * v, c * dv, c * d2v)
    }

    /// `(kappa^2/8 - K/2) tau e^{-tau} + (3 kappa^2/8 - K/2) tau^2 e^{-tau}`.
    pub fn u2(&self, tau: f64) -> (f64, f64, f64) {
        let (k, g) = (self.curv.kappa, self.curv.gauss);
        let c1 = k * k / 8.0 - g / 2.0;
        let c2 = 3.0 * k * k / 8.0 - g / 2.0;
        let a = tau_power_exp(1, tau);
        let b = tau_power_exp(2, tau);
        (
            c1 * a.0 + c2 * b.0,
            c1 * a.1 + c2 * b.1,
            c1 * a.2 + c2 * b.2,
        )
    }

    /// `u0 + u1/m + u2/m^2`.
    pub fn truncated(&self, m: f64, tau: f64) -> (f64, f64, f64) {
        let (a, b, c) = (self.u0(tau), self.u1(tau), self.u2(tau));
        let (h1, h2) = (1.0 / m, 1.0 / (m * m));
        (
            a.0 + h1 * b.0 + h2 * c.0,
            a.1 + h1 * b.1 + h2 * c.1,
            a.2 + h1 * b.2 + h2 * c.2,
        )
    }
}

pub fn formal_profiles(curv: CurvatureData) -> FormalProfiles {
    FormalProfiles { curv }
}

/// `tau^n e^{-tau}` and two derivatives, `n` in {1, 2}.
fn tau_power_exp(n: u32, tau: f64) -> (f64, f64, f64) {
    let e = (-tau).exp();
    match n {
        1 => (tau * e, (1.0 - tau) * e, (tau - 2.0) * e),
        _ => (
            tau * tau * e,
            (2.0 * tau - tau * tau) * e,
            (2.0 - 4.0 * tau + tau * tau) * e,
        ),
    }
}

/// Plateau cutoff: 1 on `[0, 1/2]`, 0 on `[1, inf)`, quintic smoothstep in
/// between. Returns `(chi, chi', chi'')`.
pub fn cutoff(s: f64) -> (f64, f64, f64) {
    if s <= 0.5 {
        return (1.0, 0.0, 0.0);
    }
    if s >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let t = 2.0 * s - 1.0;
    let t2 = t * t;
    let v = 1.0 - t2 * t * (10.0 - 15.0 * t + 6.0 * t2);
    let dv = -30.0 * t2 * (1.0 - t) * (1.0 - t);
    let d2v = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    (v, 2.0 * dv, 4.0 * d2v)
}

/// `L2(a dtau)` norm of the operator applied to
/// `chi(tau / (scale sqrt m)) (u0 + u1/m + u2/m^2)`.
pub fn residual_of_ansatz(p: &TransverseProblem, cutoff_scale: f64) -> Result<f64> {
    if !(cutoff_scale > 0.0 && cutoff_scale <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff scale must lie in (0, 1], got {cutoff_scale}"
        )));
    }
    let prof = formal_profiles(p.curv);
    let width = cutoff_scale * p.length();
    let (xs, ws) = p.quadrature();
    let sum: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(&t, &q)| {
            let (c, dc, d2c) = cutoff(t / width);
            let (dc, d2c) = (dc / width, d2c / (width * width));
            let (f, df, d2f) = prof.truncated(p.m, t);
            let v = c * f;
            let dv = dc * f + c * df;
            let d2v = d2c * f + 2.0 * dc * df + c * d2f;
            let r = p.apply_operator(t, v, dv, d2v);
            q * r * r * p.weight(t)
        })
        .sum();
    Ok(sum.sqrt())
}

/// `|mass - 1/2|`.
pub fn transverse_mass_check(sol: &TransverseSolution) -> f64 {
    (sol.mass - 0.5).abs()
}

/// Errors `|Lambda - expansion|` along an m-grid with the observed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionOrder {
    pub curv: CurvatureData,
    /// `(m, Lambda, |Lambda - expansion|)` for every grid mass above the floor.
    pub errors: Vec<(f64, f64, f64)>,
    /// Log-log slope over the points above the roundoff floor; `None` when
    /// fewer than two remain.
    pub slope: Option<f64>,
    /// `error * m^3` at the smallest admissible m.
    pub constant: f64,
    /// Whether `error * m^3 <= constant` at every finer m.
    pub bounded: bool,
}

/// Errors at or below this multiple of the solver tolerance are roundoff
/// and are left out of the slope fit.
pub const ROUNDOFF_FACTOR: f64 = 100.0;

pub fn expansion_order(
    curv: CurvatureData,
    m_grid: &[f64],
    tol: &ToleranceConfig,
) -> Result<ExpansionOrder> {
    let floor = point_validity_floor(&curv);
    let problems: Vec<_> = m_grid
        .iter()
        .filter(|&&m| m >= floor)
        .map(|&m| TransverseProblem::new(m, curv))
        .collect::<Result<_>>()?;
    if problems.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "fewer than two grid masses above the validity floor {floor}"
        )));
    }
    let errors = sweep_transverse(&problems, tol)
        .into_iter()
        .zip(&problems)
        .map(|(sol, p)| sol.map(|s| (p.m, s.lambda, (s.lambda - expansion_lambda(p)).abs())))
        .collect::<Result<Vec<_>>>()?;
    let noise = ROUNDOFF_FACTOR * (tol.abs_tol + tol.rel_tol);
    let resolved: Vec<(f64, f64)> = errors
        .iter()
        .filter(|e| e.2 > noise)
        .map(|e| (e.0, e.2))
        .collect();
    let slope = if resolved.len() >= 2 {
        Some(loglog_slope(&resolved)?)
    } else {
        None
    };
    let scaled: Vec<f64> = errors.iter().map(|e| e.2 * e.0.powi(3)).collect();
    let constant = scaled[0];
    let bounded = scaled[1..]
        .iter()
        .zip(&errors[1..])
        .all(|(s, e)| *s <= constant || e.2 <= noise);
    Ok(ExpansionOrder {
        curv,
        errors,
        slope,
        constant,
        bounded,
    })
}
