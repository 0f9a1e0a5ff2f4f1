//! Check lists for each suite. Every suite returns its records in a fixed
//! order regardless of how the grid points were scheduled.

use std::f64::consts::PI;
use std::time::Instant;

use mitbag_core::dirac_ball::{
    boundary_identity_check, charge_conjugation_check, eta_functional, largemass_eigenvalues,
    merge_spectra, mit_eigenpairs, mit_eigenvalues, mit_spectrum, mu_functional, nu_minmax,
    robin_eigenpairs, robin_laplacian_eigenvalues, AngularSector, DiracParams, RadialEigenpair,
};
use mitbag_core::exterior::{
    agmon_decay_check, ball_exterior_dtn, effective_energy, exterior_energy, BoundaryDatum,
    ModeLabel,
};
use mitbag_core::geometry::{point_validity_floor, CurvatureData, ModelGeometry};
use mitbag_core::numerics::{fit_inverse_m, loglog_slope};
use mitbag_core::transverse::{
    expansion_lambda, expansion_order, solve_transverse, transverse_mass_check, TransverseProblem,
    ROUNDOFF_FACTOR,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Suite, SuiteConfig};
use crate::error::VerifyError;
use crate::report::{CheckRecord, Comparison::*, Provenance::*};

type Records = Result<Vec<CheckRecord>, VerifyError>;

pub const EXPANSION_SLOPE_MAX: f64 = -2.9;
pub const MASS_SCALED_MAX: f64 = 0.05;
pub const FLAT_MASS_TOL: f64 = 1e-6;
pub const RANDOM_TEST_FUNCTIONS: usize = 8;
pub const PYTHAGORAS_TOL: f64 = 1e-9;
pub const DTN_REL_TOL: f64 = 1e-10;
pub const AGMON_FACTOR: f64 = 1.1;
pub const AGMON_GAMMAS: [f64; 3] = [0.3, 0.5, 0.9];
pub const MIT_GROUND: f64 = 2.042788;
pub const MIT_GROUND_TOL: f64 = 1e-5;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const LIMIT_M: f64 = 1e6;
pub const LIMIT_GRID: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];
pub const LIMIT_GAP_TOL: f64 = 1e-4;
pub const SLOPE_REL_TOL: f64 = 0.05;
pub const DRIFT_MAX: f64 = 0.02;
pub const ROBIN_SLACK: f64 = 1e-12;
pub const ROBIN_LIMIT_REL_TOL: f64 = 1e-3;
pub const IDENTITY_TOL: f64 = 1e-6;
/// Levels checked against the Robin bound and reported for the Dirac slopes.
pub const LEVELS: usize = 3;

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Records {
    match suite {
        Suite::Transverse => transverse(cfg),
        Suite::Exterior => exterior(cfg),
        Suite::Dirac => dirac(cfg),
        Suite::Robin => robin(cfg),
        Suite::All => unreachable!("expanded by Suite::members"),
    }
}

/// Runs `f`, stamping its records with the elapsed time when requested.
fn timed(cfg: &SuiteConfig, f: impl FnOnce() -> Records) -> Records {
    let start = Instant::now();
    let mut out = f()?;
    if cfg.record_runtime {
        let secs = start.elapsed().as_secs_f64();
        for r in &mut out {
            r.runtime_s = Some(secs);
        }
    }
    Ok(out)
}

fn flatten(parts: Vec<Vec<CheckRecord>>) -> Vec<CheckRecord> {
    parts.into_iter().flatten().collect()
}

// ---------------------------------------------------------------- transverse

fn transverse(cfg: &SuiteConfig) -> Records {
    let grid = cfg.m_grid_for(Suite::Transverse);
    let pairs = cfg.curvatures();
    let parts = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(k, g))| timed(cfg, || transverse_pair(cfg, i as u64, k, g, &grid)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = flatten(parts);

    let constants: Vec<&CheckRecord> = out
        .iter()
        .filter(|r| r.check_id == "transverse.expansion_constant")
        .collect();
    let coarse = constants.iter().map(|r| r.expected).fold(0.0, f64::max);
    let finer = constants.iter().map(|r| r.observed).fold(0.0, f64::max);
    out.push(CheckRecord::new(
        "transverse.uniform_constant",
        Upper,
        coarse,
        finer,
        0.0,
        Fit,
    ));

    out.extend(timed(cfg, || {
        let p = TransverseProblem::new(4.0, CurvatureData::flat())
            .map_err(VerifyError::numeric("transverse.flat_mass"))?;
        let sol = solve_transverse(&p, &cfg.tolerances)
            .map_err(VerifyError::numeric("transverse.flat_mass"))?;
        let s2 = 2f64.sinh();
        let closed = (4f64.sinh() / 4.0 - 1.0) / (s2 * s2);
        Ok(vec![CheckRecord::new(
            "transverse.flat_mass",
            Absolute,
            closed,
            sol.mass,
            FLAT_MASS_TOL,
            ClosedForm,
        )
        .at_m(4.0)
        .at_curvature(0.0, 0.0)])
    })?);
    Ok(out)
}

/// `w(s) = (1 - s) (1 + sum c_j s^(j+1))` with `s = tau / L`.
fn test_function(coeffs: Vec<f64>, len: f64) -> impl Fn(f64) -> (f64, f64) + Copy {
    let mut c = [0.0; 4];
    c[..coeffs.len()].copy_from_slice(&coeffs);
    move |tau: f64| {
        let s = tau / len;
        let (mut p, mut dp, mut pow) = (1.0, 0.0, 1.0);
        for (j, cj) in c.iter().enumerate() {
            dp += cj * (j as f64 + 1.0) * pow;
            pow *= s;
            p += cj * pow;
        }
        ((1.0 - s) * p, (-p + (1.0 - s) * dp) / len)
    }
}

fn transverse_pair(cfg: &SuiteConfig, index: u64, k: f64, g: f64, grid: &[f64]) -> Records {
    let tol = cfg.tolerances;
    let id = "transverse";
    let c = CurvatureData::new(k, g).map_err(VerifyError::numeric(id))?;
    let tag = |r: CheckRecord| r.at_curvature(k, g);
    let mut out = Vec::new();

    let o = expansion_order(c, grid, &tol)
        .map_err(VerifyError::numeric("transverse.expansion_order"))?;
    let noise = ROUNDOFF_FACTOR * (tol.abs_tol + tol.rel_tol);
    for &(m, lambda, _) in &o.errors {
        let p = TransverseProblem::new(m, c).map_err(VerifyError::numeric(id))?;
        let bound = (o.constant / (m * m * m) * (1.0 + 1e-12)).max(noise);
        out.push(tag(CheckRecord::new(
            "transverse.lambda",
            Absolute,
            expansion_lambda(&p),
            lambda,
            bound,
            Expansion,
        )
        .at_m(m)
        .reported_only()));
    }
    if let Some(slope) = o.slope {
        out.push(tag(CheckRecord::new(
            "transverse.expansion_slope",
            Upper,
            EXPANSION_SLOPE_MAX,
            slope,
            0.0,
            Fit,
        )));
    }
    let finer = o.errors[1..]
        .iter()
        .filter(|e| e.2 > noise)
        .map(|e| e.2 * e.0.powi(3))
        .fold(0.0, f64::max);
    out.push(tag(CheckRecord::new(
        "transverse.expansion_constant",
        Upper,
        o.constant,
        finer,
        0.0,
        Fit,
    )
    .at_m(o.errors[0].0)));

    let floor = point_validity_floor(&c);
    let admissible: Vec<f64> = grid.iter().copied().filter(|&m| m >= floor).collect();
    for &m in &admissible {
        let p = TransverseProblem::new(m, c).map_err(VerifyError::numeric(id))?;
        let sol = solve_transverse(&p, &tol).map_err(VerifyError::numeric("transverse.mass"))?;
        out.push(tag(CheckRecord::new(
            "transverse.mass",
            Upper,
            MASS_SCALED_MAX,
            transverse_mass_check(&sol) * m,
            0.0,
            Expansion,
        )
        .at_m(m)));
    }

    // Variational checks with seeded random polynomial competitors.
    let m = admissible[0];
    let p = TransverseProblem::new(m, c).map_err(VerifyError::numeric(id))?;
    let sol = solve_transverse(&p, &tol).map_err(VerifyError::numeric("transverse.minimality"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let (mut gap, mut defect) = (f64::INFINITY, 0.0f64);
    for _ in 0..RANDOM_TEST_FUNCTIONS {
        let n = rng.random_range(0..=4);
        let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w = test_function(coeffs, p.length());
        let q = p.quadratic_form(w);
        gap = gap.min(q - sol.lambda);
        defect = defect.max(sol.pythagoras_defect(w).abs() / q.max(1.0));
    }
    out.push(tag(CheckRecord::new(
        "transverse.minimality",
        Lower,
        0.0,
        gap,
        PYTHAGORAS_TOL,
        ClosedForm,
    )
    .at_m(m)));
    out.push(tag(CheckRecord::new(
        "transverse.pythagoras",
        Absolute,
        0.0,
        defect,
        PYTHAGORAS_TOL,
        ClosedForm,
    )
    .at_m(m)));
    Ok(out)
}

// ------------------------------------------------------------------ exterior

fn mixed_data(radius: f64, period: f64) -> Vec<(&'static str, BoundaryDatum, f64)> {
    let c = Complex64::new;
    let sphere = BoundaryDatum {
        geometry: ModelGeometry::BallExterior { radius },
        modes: vec![
            (ModeLabel::Spherical { ell: 0, order: 0 }, c(1.0, 0.0)),
            (ModeLabel::Spherical { ell: 1, order: -1 }, c(0.5, 0.5)),
            (ModeLabel::Spherical { ell: 2, order: 1 }, c(-0.3, 0.2)),
            (ModeLabel::Spherical { ell: 5, order: 3 }, c(0.1, -0.1)),
        ],
    };
    let flat = BoundaryDatum {
        geometry: ModelGeometry::FlatTorusHalfSpace { period },
        modes: vec![
            (ModeLabel::Fourier { n1: 0, n2: 0 }, c(0.8, 0.0)),
            (ModeLabel::Fourier { n1: 1, n2: 0 }, c(0.0, 0.6)),
            (ModeLabel::Fourier { n1: 2, n2: -3 }, c(0.2, 0.1)),
        ],
    };
    // Expected observed orders of the gap on exact models.
    vec![("sphere", sphere, -2.0), ("flat", flat, -3.0)]
}

fn exterior(cfg: &SuiteConfig) -> Records {
    let grid = cfg.m_grid_for(Suite::Exterior);
    let radius = cfg.radius().unwrap_or(1.0);
    let period = match cfg.geometry {
        ModelGeometry::FlatTorusHalfSpace { period } => period,
        _ => 2.0 * PI,
    };
    let id = "exterior";
    let parts = grid
        .par_iter()
        .map(|&m| {
            timed(cfg, || {
                let mut out = Vec::new();
                let x = m * radius;
                let dtn0 = ball_exterior_dtn(m, radius, 0).map_err(VerifyError::numeric(id))?;
                out.push(
                    CheckRecord::new(
                        "exterior.dtn_l0",
                        Relative,
                        m + 1.0 / radius,
                        dtn0,
                        DTN_REL_TOL,
                        ClosedForm,
                    )
                    .at_m(m),
                );
                let dtn1 = ball_exterior_dtn(m, radius, 1).map_err(VerifyError::numeric(id))?;
                let closed1 = m * x / (x + 1.0) + 2.0 / radius;
                out.push(
                    CheckRecord::new(
                        "exterior.dtn_l1",
                        Relative,
                        closed1,
                        dtn1,
                        DTN_REL_TOL,
                        ClosedForm,
                    )
                    .at_m(m),
                );
                let v = BoundaryDatum::new(
                    ModelGeometry::BallExterior { radius },
                    vec![(
                        ModeLabel::Spherical { ell: 0, order: 0 },
                        Complex64::new(0.7, -1.3),
                    )],
                )
                .map_err(VerifyError::numeric(id))?;
                let sol = exterior_energy(&v, m).map_err(VerifyError::numeric(id))?;
                out.push(
                    CheckRecord::new(
                        "exterior.mass_l0",
                        Relative,
                        v.norm_sq() / (2.0 * m),
                        sol.exterior_mass,
                        DTN_REL_TOL,
                        ClosedForm,
                    )
                    .at_m(m),
                );
                for gamma in AGMON_GAMMAS {
                    let mut worst: f64 = 0.0;
                    for ell in [0, 1, 2, 5] {
                        worst = worst.max(
                            agmon_decay_check(m, radius, ell, gamma)
                                .map_err(VerifyError::numeric("exterior.agmon"))?,
                        );
                    }
                    let check = format!("exterior.agmon_gamma_{gamma}");
                    out.push(
                        CheckRecord::new(
                            &check,
                            Upper,
                            AGMON_FACTOR / (1.0 - gamma),
                            worst,
                            0.0,
                            ClosedForm,
                        )
                        .at_m(m),
                    );
                }
                Ok(out)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = flatten(parts);

    for (name, v, order) in mixed_data(radius, period) {
        out.extend(timed(cfg, || {
            let gaps = grid
                .iter()
                .map(|&m| {
                    let exact = exterior_energy(&v, m)
                        .map_err(VerifyError::numeric("exterior.effective"))?;
                    Ok((m, (exact.energy - effective_energy(&v, m)).abs()))
                })
                .collect::<Result<Vec<_>, VerifyError>>()?;
            let h = v.h32_norm_sq();
            let scaled: Vec<f64> = gaps.iter().map(|(m, g)| m.powf(1.5) * g / h).collect();
            let check = format!("exterior.effective_rate.{name}");
            let mut out: Vec<CheckRecord> = gaps
                .iter()
                .zip(&scaled)
                .map(|((m, _), s)| {
                    CheckRecord::new(&check, Upper, scaled[0], *s, 0.0, Fit).at_m(*m)
                })
                .collect();
            if gaps.iter().all(|g| g.1 > 0.0) {
                let observed =
                    loglog_slope(&gaps).map_err(VerifyError::numeric("exterior.effective"))?;
                let check = format!("exterior.effective_order.{name}");
                out.push(
                    CheckRecord::new(&check, Absolute, order, observed, 0.15, Fit).reported_only(),
                );
            }
            Ok(out)
        })?);
    }
    Ok(out)
}

// --------------------------------------------------------------------- dirac

fn sector(k: i32) -> AngularSector {
    AngularSector::new(k).expect("fixed sector")
}

fn params(radius: f64, m: f64) -> Result<DiracParams, VerifyError> {
    DiracParams::new(radius, 0.0, m).map_err(|e| VerifyError::Config(e.to_string()))
}

/// Level-averaged `lambda^2` of the merged `kappa = -1, +1` spectrum.
fn level_squares(
    radius: f64,
    m: f64,
    tol: &mitbag_core::numerics::ToleranceConfig,
) -> Result<Vec<f64>, VerifyError> {
    let p = params(radius, m)?;
    let parts = [-1, 1]
        .iter()
        .map(|&k| largemass_eigenvalues(&p, sector(k), LEVELS, tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(VerifyError::numeric("dirac.largemass"))?;
    let e = merge_spectra(parts).energies();
    Ok((0..LEVELS)
        .map(|l| 0.5 * (e[2 * l].powi(2) + e[2 * l + 1].powi(2)))
        .collect())
}

fn mit_pairs(
    radius: f64,
    k: i32,
    count: usize,
    tol: &mitbag_core::numerics::ToleranceConfig,
) -> Result<Vec<RadialEigenpair>, VerifyError> {
    mit_eigenpairs(&params(radius, 0.0)?, sector(k), count, tol)
        .map_err(VerifyError::numeric("dirac.mit"))
}

fn dirac(cfg: &SuiteConfig) -> Records {
    let grid = cfg.m_grid_for(Suite::Dirac);
    let radius = cfg.radius().expect("validated");
    let tol = cfg.tolerances;
    let p0 = params(radius, 0.0)?;
    let mut out = Vec::new();

    out.extend(timed(cfg, || {
        let sectors: Vec<_> = [-3, -2, -1, 1, 2, 3].iter().map(|&k| sector(k)).collect();
        let spec =
            mit_spectrum(&p0, &sectors, 6, &tol).map_err(VerifyError::numeric("dirac.mit"))?;
        Ok(vec![
            CheckRecord::new(
                "dirac.mit_ground",
                Absolute,
                MIT_GROUND / radius,
                spec.eigenvalues[0].0.abs(),
                MIT_GROUND_TOL / radius,
                ClosedForm,
            ),
            CheckRecord::new(
                "dirac.symmetry",
                Absolute,
                0.0,
                charge_conjugation_check(&spec),
                SYMMETRY_TOL,
                ClosedForm,
            ),
        ])
    })?);

    let up = mit_pairs(radius, -1, LEVELS, &tol)?;
    let down = mit_pairs(radius, 1, 1, &tol)?;
    let lambda = up[0].energy;

    out.extend(timed(cfg, || {
        let energies = LIMIT_GRID
            .par_iter()
            .map(|&m| {
                let r = largemass_eigenvalues(&params(radius, m)?, sector(-1), 1, &tol)
                    .map_err(VerifyError::numeric("dirac.limit"))?;
                Ok(r.eigenvalues[0].0)
            })
            .collect::<Result<Vec<_>, VerifyError>>()?;
        let gaps: Vec<f64> = energies.iter().map(|e| (e - lambda).abs()).collect();
        let ratio = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        Ok(vec![
            CheckRecord::new(
                "dirac.limit",
                Absolute,
                lambda,
                *energies.last().unwrap(),
                LIMIT_GAP_TOL,
                ClosedForm,
            )
            .at_m(LIMIT_M)
            .in_sector(-1),
            CheckRecord::new("dirac.limit_monotone", Upper, 1.0, ratio, 0.0, ClosedForm)
                .in_sector(-1),
        ])
    })?);

    out.extend(timed(cfg, || {
        let space = [
            up[0].with_mj(1),
            up[0].with_mj(-1),
            down[0].with_mj(1),
            down[0].with_mj(-1),
        ]
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(VerifyError::numeric("dirac.nu"))?;
        let nu1 = nu_minmax(&space, lambda, &p0).map_err(VerifyError::numeric("dirac.nu"))?[0];
        let squares = grid
            .par_iter()
            .map(|&m| level_squares(radius, m, &tol))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        for (&m, sq) in grid.iter().zip(&squares) {
            let predicted = lambda * lambda + nu1 / m;
            out.push(
                CheckRecord::new(
                    "dirac.lambda_sq",
                    Absolute,
                    predicted,
                    sq[0],
                    SLOPE_REL_TOL * nu1.abs() / m,
                    Expansion,
                )
                .at_m(m)
                .reported_only(),
            );
        }
        for level in 0..LEVELS {
            let points: Vec<(f64, f64)> = grid
                .iter()
                .zip(&squares)
                .map(|(&m, sq)| (m, sq[level]))
                .collect();
            let fit = fit_inverse_m(&points).map_err(VerifyError::numeric("dirac.slope"))?;
            let u = &up[level];
            if level == 0 {
                out.push(CheckRecord::new(
                    "dirac.slope",
                    Relative,
                    nu1,
                    fit.slope,
                    SLOPE_REL_TOL,
                    Fit,
                ));
                out.push(CheckRecord::new(
                    "dirac.drift",
                    Upper,
                    0.0,
                    fit.drift.unwrap_or(f64::INFINITY),
                    DRIFT_MAX,
                    Fit,
                ));
            } else {
                // Higher levels: the first-order law is not established there.
                let eta = eta_functional(u, u.energy, &p0);
                let check = format!("dirac.slope_level{}", level + 1);
                out.push(
                    CheckRecord::new(&check, Relative, eta, fit.slope, SLOPE_REL_TOL, Fit)
                        .reported_only(),
                );
            }
        }
        Ok(out)
    })?);
    Ok(out)
}

// --------------------------------------------------------------------- robin

fn robin(cfg: &SuiteConfig) -> Records {
    let grid = cfg.m_grid_for(Suite::Robin);
    let radius = cfg.radius().expect("validated");
    let tol = cfg.tolerances;
    let p0 = params(radius, 0.0)?;
    let sectors = [-2, -1, 1, 2];
    let mut out = Vec::new();

    let mut bound_grid = grid.clone();
    if !bound_grid.contains(&LIMIT_M) {
        bound_grid.push(LIMIT_M);
    }
    let jobs: Vec<(i32, f64)> = sectors
        .iter()
        .flat_map(|&k| bound_grid.iter().map(move |&m| (k, m)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(k, m)| {
            timed(cfg, || {
                let lam = mit_eigenvalues(&p0, sector(k), LEVELS, &tol)
                    .map_err(VerifyError::numeric("robin.upper_bound"))?;
                let rob = robin_laplacian_eigenvalues(&params(radius, m)?, sector(k), LEVELS, &tol)
                    .map_err(VerifyError::numeric("robin.upper_bound"))?;
                Ok(lam
                    .energies()
                    .iter()
                    .zip(rob.energies())
                    .enumerate()
                    .map(|(i, (l, r))| {
                        let bound = l * l;
                        CheckRecord::new(
                            &format!("robin.upper_bound.k{}", i + 1),
                            Upper,
                            bound,
                            r,
                            ROBIN_SLACK * bound,
                            ClosedForm,
                        )
                        .at_m(m)
                        .in_sector(k)
                    })
                    .collect())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.extend(flatten(parts));

    let u = mit_pairs(radius, -1, 1, &tol)?.remove(0);
    out.extend(timed(cfg, || {
        let mu = mu_functional(&u, &p0);
        let points = grid
            .par_iter()
            .map(|&m| {
                let r = robin_laplacian_eigenvalues(&params(radius, m)?, sector(-1), 1, &tol)
                    .map_err(VerifyError::numeric("robin.slope"))?;
                Ok((m, r.eigenvalues[0].0))
            })
            .collect::<Result<Vec<_>, VerifyError>>()?;
        let fit = fit_inverse_m(&points).map_err(VerifyError::numeric("robin.slope"))?;
        let far = robin_laplacian_eigenvalues(&params(radius, LIMIT_M)?, sector(-1), 1, &tol)
            .map_err(VerifyError::numeric("robin.limit"))?;
        Ok(vec![
            CheckRecord::new("robin.slope", Relative, mu, fit.slope, SLOPE_REL_TOL, Fit)
                .in_sector(-1),
            CheckRecord::new(
                "robin.drift",
                Upper,
                0.0,
                fit.drift.unwrap_or(f64::INFINITY),
                DRIFT_MAX,
                Fit,
            )
            .in_sector(-1)
            .reported_only(),
            CheckRecord::new(
                "robin.limit",
                Relative,
                u.energy * u.energy,
                far.eigenvalues[0].0,
                ROBIN_LIMIT_REL_TOL,
                ClosedForm,
            )
            .at_m(LIMIT_M)
            .in_sector(-1),
        ])
    })?);

    let jobs: Vec<(i32, f64)> = [-1, -2]
        .iter()
        .flat_map(|&k| grid.iter().map(move |&m| (k, m)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(k, m)| {
            timed(cfg, || {
                let id = "robin.identity";
                let um = mit_pairs(radius, k, 1, &tol)?.remove(0);
                let p = params(radius, m)?;
                let ui = robin_eigenpairs(&p, sector(k), 1, &tol)
                    .map_err(VerifyError::numeric(id))?
                    .remove(0);
                let c =
                    boundary_identity_check(&ui, &um, m, &p).map_err(VerifyError::numeric(id))?;
                Ok(vec![CheckRecord::new(
                    id,
                    Upper,
                    0.0,
                    c.residual,
                    IDENTITY_TOL,
                    ClosedForm,
                )
                .at_m(m)
                .in_sector(k)])
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.extend(flatten(parts));
    Ok(out)
}
