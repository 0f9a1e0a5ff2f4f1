//! Exterior energies for `-Laplace + m^2` with Dirichlet data on the
//! boundary of the two model geometries.
//!
//! Boundary data are finite expansions in `L2(Gamma)`-orthonormal modes:
//! Fourier modes `e^{i xi.s}/period` on the flat torus, spherical harmonics
//! `Y_lm / R` on the sphere of radius `R`. Each mode decouples, so the
//! minimizer and its energy are known mode by mode.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CurvatureData, ModelGeometry};
use crate::numerics::bessel::{modified_spherical_bessel_k_scaled, MAX_ORDER};
use crate::numerics::quadrature::GaussLegendre;

/// Decay lengths integrated in the radial quadratures (`e^{-2 s}` at the
/// cut is below `1e-34`).
const DECAY_LENGTHS: f64 = 40.0;
const PANEL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeLabel {
    /// Torus frequency `xi = 2 pi (n1, n2) / period`.
    Fourier { n1: i32, n2: i32 },
    /// Spherical harmonic of degree `ell` and order `order`.
    Spherical { ell: u32, order: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDatum {
    pub geometry: ModelGeometry,
    pub modes: Vec<(ModeLabel, Complex64)>,
}

impl BoundaryDatum {
    pub fn new(geometry: ModelGeometry, modes: Vec<(ModeLabel, Complex64)>) -> Result<Self> {
        let v = Self { geometry, modes };
        v.validate()?;
        Ok(v)
    }

    pub fn zero(geometry: ModelGeometry) -> Self {
        Self {
            geometry,
            modes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if let ModelGeometry::BallInterior { .. } = self.geometry {
            return Err(Error::InvalidArgument(
                "exterior data live on the flat model or the ball exterior".into(),
            ));
        }
        let mut labels: Vec<_> = self.modes.iter().map(|(l, _)| *l).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated mode label".into()));
        }
        for (label, c) in &self.modes {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
            match (label, self.geometry) {
                (ModeLabel::Fourier { .. }, ModelGeometry::FlatTorusHalfSpace { .. }) => {}
                (ModeLabel::Spherical { ell, order }, ModelGeometry::BallExterior { .. }) => {
                    if *ell > MAX_ORDER || order.unsigned_abs() > *ell {
                        return Err(Error::InvalidArgument(format!(
                            "spherical mode (ell {ell}, order {order}) out of range"
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "mode {label:?} does not belong to {:?}",
                        self.geometry
                    )))
                }
            }
        }
        Ok(())
    }

    /// `||v||^2_{L2(Gamma)}` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.modes.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Mode-wise `H^{3/2}(Gamma)` norm squared:
    /// `sum (1 + t)^{3/2} |c|^2` with `t = |xi|^2` or `ell(ell+1)`.
    pub fn h32_norm_sq(&self) -> f64 {
        self.modes
            .iter()
            .map(|(label, c)| {
                let t = match *label {
                    ModeLabel::Fourier { .. } => self.tangential_eigenvalue(label),
                    ModeLabel::Spherical { ell, .. } => f64::from(ell * (ell + 1)),
                };
                (1.0 + t).powf(1.5) * c.norm_sqr()
            })
            .sum()
    }

    /// `int |grad_s Y|^2` for the unit mode `Y`: `|xi|^2` or `ell(ell+1)/R^2`.
    pub fn tangential_eigenvalue(&self, label: &ModeLabel) -> f64 {
        match (*label, self.geometry) {
            (ModeLabel::Fourier { n1, n2 }, ModelGeometry::FlatTorusHalfSpace { period }) => {
                let w = 2.0 * PI / period;
                w * w * f64::from(n1 * n1 + n2 * n2)
            }
            (ModeLabel::Spherical { ell, .. }, ModelGeometry::BallExterior { radius }) => {
                f64::from(ell * (ell + 1)) / (radius * radius)
            }
            _ => f64::NAN,
        }
    }
}

/// `sqrt(m^2 + |xi|^2)`: energy of the decaying half-line solution of
/// `-u'' + (m^2 + |xi|^2) u = 0` with `u(0) = 1`.
pub fn halfspace_mode_energy(m: f64, xi_norm: f64) -> f64 {
    m.hypot(xi_norm)
}

/// Exterior Dirichlet-to-Neumann eigenvalue `-m k_l'(mR) / k_l(mR)`.
///
/// Uses `-k_l'/k_l = k_{l-1}/k_l + (l+1)/x`, evaluated on scaled
/// functions, so no exponential ever appears.
pub fn ball_exterior_dtn(m: f64, radius: f64, ell: u32) -> Result<f64> {
    if !(m > 0.0 && radius > 0.0 && m.is_finite() && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need m > 0 and R > 0, got m = {m}, R = {radius}"
        )));
    }
    let x = m * radius;
    let k = modified_spherical_bessel_k_scaled(ell, x)?;
    let ratio = if ell == 0 {
        1.0
    } else {
        modified_spherical_bessel_k_scaled(ell - 1, x)? / k + f64::from(ell + 1) / x
    };
    // ell = 0: k_{-1} = k_0, giving 1 + 1/x.
    let q = if ell == 0 { ratio + 1.0 / x } else { ratio };
    Ok(m * q)
}

/// Per-unit-mode effective energy `m + kappa/2 + (t/2 + K/2 - kappa^2/8)/m`.
fn effective_mode_energy(curv: &CurvatureData, m: f64, tangential: f64) -> f64 {
    m + 0.5 * curv.kappa + (0.5 * tangential + curv.second_order_coefficient()) / m
}

/// The effective boundary functional evaluated mode by mode.
pub fn effective_energy(v: &BoundaryDatum, m: f64) -> f64 {
    let curv = v.geometry.curvature();
    v.modes
        .iter()
        .map(|(label, c)| {
            c.norm_sqr() * effective_mode_energy(&curv, m, v.tangential_eigenvalue(label))
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub label: ModeLabel,
    pub coefficient: Complex64,
    /// Exact energy of the unit mode.
    pub unit_energy: f64,
    /// `L2` mass of the minimizer for the unit mode.
    pub unit_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorSolution {
    pub m: f64,
    pub modes: Vec<ModeSolution>,
    pub energy: f64,
    pub exterior_mass: f64,
}

/// `int_R^inf (k_l(mr)/k_l(mR))^2 (r/R)^2 dr` in the variable `s = m(r - R)`.
fn ball_unit_mass(m: f64, radius: f64, ell: u32) -> Result<f64> {
    if ell == 0 {
        return Ok(0.5 / m);
    }
    let x = m * radius;
    let k_r = modified_spherical_bessel_k_scaled(ell, x)?;
    let rule = GaussLegendre::new(10);
    let panels = (DECAY_LENGTHS / PANEL) as usize;
    let (ss, ws) = rule.panels(0.0, DECAY_LENGTHS, panels);
    let mut sum = 0.0;
    for (s, w) in ss.iter().zip(&ws) {
        let ratio = (-s).exp() * modified_spherical_bessel_k_scaled(ell, x + s)? / k_r;
        let r = 1.0 + s / x;
        sum += w * ratio * ratio * r * r;
    }
    Ok(sum / m)
}

fn unit_mode(v: &BoundaryDatum, label: &ModeLabel, m: f64) -> Result<(f64, f64)> {
    match (*label, v.geometry) {
        (ModeLabel::Fourier { .. }, ModelGeometry::FlatTorusHalfSpace { .. }) => {
            let q = halfspace_mode_energy(m, v.tangential_eigenvalue(label).sqrt());
            Ok((q, 0.5 / q))
        }
        (ModeLabel::Spherical { ell, .. }, ModelGeometry::BallExterior { radius }) => Ok((
            ball_exterior_dtn(m, radius, ell)?,
            ball_unit_mass(m, radius, ell)?,
        )),
        _ => Err(Error::InvalidArgument(format!(
            "mode {label:?} does not belong to {:?}",
            v.geometry
        ))),
    }
}

/// Exact exterior minimizer, mode by mode.
pub fn exterior_energy(v: &BoundaryDatum, m: f64) -> Result<ExteriorSolution> {
    v.validate()?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "mass must be positive, got {m}"
        )));
    }
    let modes = v
        .modes
        .iter()
        .map(|(label, c)| {
            let (unit_energy, unit_mass) = unit_mode(v, label, m)?;
            Ok(ModeSolution {
                label: *label,
                coefficient: *c,
                unit_energy,
                unit_mass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let energy = modes
        .iter()
        .map(|s| s.coefficient.norm_sqr() * s.unit_energy)
        .sum();
    let exterior_mass = modes
        .iter()
        .map(|s| s.coefficient.norm_sqr() * s.unit_mass)
        .sum();
    Ok(ExteriorSolution {
        m,
        modes,
        energy,
        exterior_mass,
    })
}

/// `m^2 |mass - ||v||^2/(2m)| / ||v||^2_{H^{3/2}}`; zero for `v = 0`.
pub fn mass_estimate_check(sol: &ExteriorSolution, v: &BoundaryDatum, m: f64) -> f64 {
    let h = v.h32_norm_sq();
    if h == 0.0 {
        return 0.0;
    }
    m * m * (sol.exterior_mass - v.norm_sq() / (2.0 * m)).abs() / h
}

/// `||e^{m gamma (r - R)} u||^2 / ||u||^2` for the exterior minimizer of a
/// single spherical mode of degree `ell`.
pub fn agmon_decay_check(m: f64, radius: f64, ell: u32, gamma: f64) -> Result<f64> {
    if !(m > 0.0 && radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need m > 0 and R > 0, got m = {m}, R = {radius}"
        )));
    }
    if !(gamma < 1.0) {
        return Err(Error::Divergent(format!(
            "weight e^(2 m gamma d) with gamma = {gamma} is not integrable against e^(-2 m d)"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must be in [0, 1), got {gamma}"
        )));
    }
    let x = m * radius;
    let k_r = modified_spherical_bessel_k_scaled(ell, x)?;
    let length = DECAY_LENGTHS / (1.0 - gamma);
    let panels = (length / PANEL).ceil() as usize;
    let (ss, ws) = GaussLegendre::new(10).panels(0.0, length, panels);
    let (mut weighted, mut plain) = (0.0, 0.0);
    for (s, w) in ss.iter().zip(&ws) {
        let ratio = modified_spherical_bessel_k_scaled(ell, x + s)? / k_r;
        let r = 1.0 + s / x;
        let density = ratio * ratio * r * r;
        weighted += w * density * (-2.0 * (1.0 - gamma) * s).exp();
        plain += w * density * (-2.0 * s).exp();
    }
    Ok(weighted / plain)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sphere(r: f64) -> ModelGeometry {
        ModelGeometry::BallExterior { radius: r }
    }

    fn torus() -> ModelGeometry {
        ModelGeometry::FlatTorusHalfSpace { period: 2.0 * PI }
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn halfspace_examples() {
        assert_eq!(halfspace_mode_energy(7.0, 0.0), 7.0);
        assert_eq!(halfspace_mode_energy(4.0, 3.0), 5.0);
        let (m, xi) = (100.0, 2.0);
        let diff = (halfspace_mode_energy(m, xi) - (m + xi * xi / (2.0 * m))).abs();
        assert!(diff <= xi.powi(4) / (8.0 * m.powi(3)));
    }

    #[test]
    fn dtn_closed_forms() {
        for m in [0.5, 3.0, 100.0, 1e4, 1e6] {
            for r in [0.5, 1.0, 2.0] {
                assert!(rel(ball_exterior_dtn(m, r, 0).unwrap(), m + 1.0 / r) < 1e-15);
            }
            let want = m + 1.0 + 1.0 / (m + 1.0);
            assert!(rel(ball_exterior_dtn(m, 1.0, 1).unwrap(), want) < 1e-14);
        }
    }

    #[test]
    fn dtn_against_direct_bessel_quotient() {
        // Independent route: finite-difference derivative of e^{-x} k_scaled.
        let (m, r, ell) = (3.0, 1.0, 4);
        let k = |y: f64| (-y).exp() * modified_spherical_bessel_k_scaled(ell, y).unwrap();
        let h = 1e-5;
        let x = m * r;
        let fd = -m * (k(x + h) - k(x - h)) / (2.0 * h) / k(x);
        assert!(rel(ball_exterior_dtn(m, r, ell).unwrap(), fd) < 1e-8);
    }

    #[test]
    fn effective_examples() {
        let m = 37.0;
        let unit = |l: ModeLabel, g| BoundaryDatum::new(g, vec![(l, c(1.0))]).unwrap();
        let s0 = unit(ModeLabel::Spherical { ell: 0, order: 0 }, sphere(1.0));
        assert!(rel(effective_energy(&s0, m), m + 1.0) < 1e-15);
        let s1 = unit(ModeLabel::Spherical { ell: 1, order: -1 }, sphere(1.0));
        assert!(rel(effective_energy(&s1, m), m + 1.0 + 1.0 / m) < 1e-15);
        let f = unit(ModeLabel::Fourier { n1: 1, n2: 2 }, torus());
        assert!(rel(effective_energy(&f, m), m + 5.0 / (2.0 * m)) < 1e-15);
    }

    #[test]
    fn dtn_vs_effective_at_m_100() {
        let (m, ell) = (100.0, 1);
        let diff = ball_exterior_dtn(m, 1.0, ell).unwrap() - (m + 1.0 + 1.0 / m);
        assert!((diff - (1.0 / (m + 1.0) - 1.0 / m)).abs() < 1e-12);
    }

    #[test]
    fn constant_datum_on_unit_sphere() {
        let m = 12.5;
        let norm = (4.0 * PI).sqrt();
        let v = BoundaryDatum::new(
            sphere(1.0),
            vec![(ModeLabel::Spherical { ell: 0, order: 0 }, c(norm))],
        )
        .unwrap();
        let sol = exterior_energy(&v, m).unwrap();
        assert!(rel(sol.energy, 4.0 * PI * (m + 1.0)) < 1e-14);
        assert!(rel(sol.exterior_mass, 4.0 * PI / (2.0 * m)) < 1e-14);
        assert_eq!(mass_estimate_check(&sol, &v, m), 0.0);
    }

    #[test]
    fn flat_single_mode() {
        let m = 9.0;
        let v = BoundaryDatum::new(
            torus(),
            vec![(
                ModeLabel::Fourier { n1: 3, n2: 4 },
                Complex64::new(0.6, -0.8),
            )],
        )
        .unwrap();
        let sol = exterior_energy(&v, m).unwrap();
        assert!(rel(sol.energy, m.hypot(5.0)) < 1e-15);
        assert!(rel(sol.exterior_mass, 1.0 / (2.0 * m.hypot(5.0))) < 1e-15);
        let checks: Vec<f64> = [10.0, 100.0, 1e3, 1e4]
            .iter()
            .map(|&m| mass_estimate_check(&exterior_energy(&v, m).unwrap(), &v, m))
            .collect();
        assert!(checks.iter().all(|&x| x <= checks[0] + 1e-12), "{checks:?}");
    }

    #[test]
    fn zero_datum() {
        for g in [sphere(1.0), torus()] {
            let v = BoundaryDatum::zero(g);
            let sol = exterior_energy(&v, 5.0).unwrap();
            assert_eq!((sol.energy, sol.exterior_mass), (0.0, 0.0));
            assert_eq!(mass_estimate_check(&sol, &v, 5.0), 0.0);
            assert_eq!(effective_energy(&v, 5.0), 0.0);
        }
    }

    #[test]
    fn ball_mass_quadrature_against_closed_form() {
        // ell = 1, R = 1: the exponential-integral terms cancel and the mass
        // is (x/2 + 1) x / ((x + 1)^2 m) with x = m.
        for m in [2.0, 10.0, 100.0] {
            let exact = (m / 2.0 + 1.0) * m / ((m + 1.0) * (m + 1.0) * m);
            assert!(
                rel(ball_unit_mass(m, 1.0, 1).unwrap(), exact) < 1e-13,
                "m = {m}"
            );
        }
        // ell = 3 from 30-digit adaptive quadrature of the Bessel-K profile.
        for (m, want) in [
            (2.0, 0.14791701804688817676),
            (10.0, 0.047651453747321622034),
            (100.0, 0.0049970612444954029617),
        ] {
            assert!(
                rel(ball_unit_mass(m, 1.0, 3).unwrap(), want) < 1e-13,
                "m = {m}"
            );
        }
    }

    #[test]
    fn invalid_data() {
        assert!(BoundaryDatum::new(
            torus(),
            vec![(ModeLabel::Spherical { ell: 0, order: 0 }, c(1.0))]
        )
        .is_err());
        assert!(BoundaryDatum::new(
            sphere(1.0),
            vec![(ModeLabel::Spherical { ell: 1, order: 2 }, c(1.0))]
        )
        .is_err());
        let dup = vec![(ModeLabel::Fourier { n1: 0, n2: 1 }, c(1.0)); 2];
        assert!(BoundaryDatum::new(torus(), dup).is_err());
    }

    #[test]
    fn agmon_examples() {
        for m in [10.0, 100.0, 1e3] {
            assert!(rel(agmon_decay_check(m, 1.0, 0, 0.5).unwrap(), 2.0) < 1e-12);
            assert!(rel(agmon_decay_check(m, 1.0, 0, 0.0).unwrap(), 1.0) < 1e-14);
            let r = agmon_decay_check(m, 1.0, 1, 0.9).unwrap();
            assert!(r <= 10.0 * 1.1 && r > 1.0, "m = {m}: {r}");
        }
        assert!((agmon_decay_check(100.0, 1.0, 2, 1e-6).unwrap() - 1.0).abs() < 1e-5);
        assert!(matches!(
            agmon_decay_check(10.0, 1.0, 0, 1.0),
            Err(Error::Divergent(_))
        ));
        assert!(matches!(
            agmon_decay_check(10.0, 1.0, 0, 1.5),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn sandwich_per_mode() {
        for ell in 0..6u32 {
            let l = f64::from(ell * (ell + 1));
            let grid = [10.0, 100.0, 1e3, 1e4];
            let gaps: Vec<f64> = grid
                .iter()
                .map(|&m| ball_exterior_dtn(m, 1.0, ell).unwrap() - (m + 1.0) - l / (2.0 * m))
                .collect();
            // m^2 times the gap increases to a finite limit, so the
            // constant is the largest scaled value and the tail settles.
            let scaled: Vec<f64> = gaps.iter().zip(grid).map(|(g, m)| -g * m * m).collect();
            for (g, m) in gaps.iter().zip(grid) {
                assert!(*g <= 1e-12 * m, "ell {ell}, m {m}: {g}");
            }
            let c = scaled.iter().cloned().fold(0.0, f64::max);
            assert!(c < 1.0 + l * l, "ell {ell}: {scaled:?}");
            if ell > 0 {
                assert!(
                    (scaled[3] / scaled[2] - 1.0).abs() < 0.01,
                    "ell {ell}: {scaled:?}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn additivity(a in -2.0..2.0f64, b in -2.0..2.0f64, bi in -2.0..2.0f64, m in 1.0..1e3f64) {
            let la = ModeLabel::Spherical { ell: 2, order: 1 };
            let lb = ModeLabel::Spherical { ell: 5, order: -3 };
            let cb = Complex64::new(b, bi);
            let both = BoundaryDatum::new(sphere(1.5), vec![(la, c(a)), (lb, cb)]).unwrap();
            let e = exterior_energy(&both, m).unwrap().energy;
            let ea = ball_exterior_dtn(m, 1.5, 2).unwrap();
            let eb = ball_exterior_dtn(m, 1.5, 5).unwrap();
            let want = a * a * ea + cb.norm_sqr() * eb;
            prop_assert!((e - want).abs() <= 1e-13 * want.abs().max(1.0));
        }

        #[test]
        fn monotone_in_mass(ell in 0u32..10, m in 0.5..1e4f64, xi in 0.0..50.0f64, r in 0.5..3.0f64) {
            let m2 = m * 1.01;
            prop_assert!(ball_exterior_dtn(m2, r, ell).unwrap() > ball_exterior_dtn(m, r, ell).unwrap());
            prop_assert!(halfspace_mode_energy(m2, xi) > halfspace_mode_energy(m, xi));
        }

        #[test]
        fn energy_and_mass_positive(ell in 0u32..8, m in 1.0..1e4f64) {
            let v = BoundaryDatum::new(sphere(1.0), vec![(ModeLabel::Spherical { ell, order: 0 }, c(1.0))]).unwrap();
            let sol = exterior_energy(&v, m).unwrap();
            prop_assert!(sol.energy > 0.0 && sol.exterior_mass > 0.0);
        }
    }
}
