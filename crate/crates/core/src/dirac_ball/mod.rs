//! Radial eigensolvers on the ball of radius `R` for the MIT bag operator,
//! the Dirac operator with a large exterior mass, and the Robin-type
//! vectorial Laplacian, together with the boundary functionals that give
//! their `1/m` corrections.
//!
//! Spinors are separated as `psi = (g(r) Omega_kappa, i f(r) Omega_{-kappa})`
//! with spinor spherical harmonics `Omega` normalized on the unit sphere, so
//! `||psi||^2 = int (g^2 + f^2) r^2 dr` and `||psi||^2_Gamma = R^2 (g^2 + f^2)(R)`.
//! The upper component carries orbital index `ell_A`, the lower `ell_B`.
//! In this basis the boundary matrix `B = -i beta (alpha . n)` acts on
//! `(g, f)` as `[[0, -1], [-1, 0]]`, so the MIT condition reads
//! `g(R) + f(R) = 0`.

mod functionals;
mod solvers;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use functionals::{
    boundary_identity_check, boundary_pairing, eta_form, eta_functional, mu_functional,
    nu_from_form_matrix, nu_minmax, volume_pairing, IdentityCheck,
};
pub use solvers::{
    largemass_eigenpairs, largemass_eigenvalues, mit_eigenpairs, mit_eigenvalues, robin_eigenpairs,
    robin_laplacian_eigenvalues, MAX_COUNT,
};

/// Spin-orbit sector with quantum number `kappa_j != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AngularSector {
    pub kappa_j: i32,
    pub degeneracy: u32,
}

impl AngularSector {
    pub fn new(kappa_j: i32) -> Result<Self> {
        if kappa_j == 0 || kappa_j.unsigned_abs() > 50 {
            return Err(Error::InvalidArgument(format!(
                "kappa_j must be a nonzero integer with |kappa_j| <= 50, got {kappa_j}"
            )));
        }
        Ok(Self {
            kappa_j,
            degeneracy: 2 * kappa_j.unsigned_abs(),
        })
    }

    /// Orbital index of the upper component.
    pub fn ell_a(&self) -> u32 {
        if self.kappa_j > 0 {
            self.kappa_j as u32
        } else {
            (-self.kappa_j - 1) as u32
        }
    }

    /// Orbital index of the lower component (`ell_A` of `-kappa_j`).
    pub fn ell_b(&self) -> u32 {
        if self.kappa_j < 0 {
            (-self.kappa_j) as u32
        } else {
            (self.kappa_j - 1) as u32
        }
    }

    /// The charge-conjugate sector `-kappa_j`.
    pub fn conjugate(&self) -> Self {
        Self {
            kappa_j: -self.kappa_j,
            degeneracy: self.degeneracy,
        }
    }

    /// Sign linking the regular lower component to the upper one:
    /// `f = sign k/(E + m0) j_B` when `g = j_A`.
    fn lower_sign(&self) -> f64 {
        if self.kappa_j < 0 {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracParams {
    pub radius: f64,
    pub m0: f64,
    /// Exterior mass jump; only the large-mass and Robin solvers use it.
    pub m: f64,
}

impl DiracParams {
    pub fn new(radius: f64, m0: f64, m: f64) -> Result<Self> {
        let p = Self { radius, m0, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.m0.is_finite() && self.m0 >= 0.0 && self.m.is_finite() && self.m >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "masses must be finite and non-negative (m0 {}, m {})",
                self.m0, self.m
            )));
        }
        Ok(())
    }

    fn require_mass(&self) -> Result<()> {
        self.validate()?;
        if self.m > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument("this solver needs m > 0".into()))
        }
    }

    /// `kappa/2 + m0` on the sphere: `1/R + m0`.
    pub fn robin_shift(&self) -> f64 {
        1.0 / self.radius + self.m0
    }
}

/// Radial components `g, f` sampled with quadrature weights `w` (for the
/// measure `dr`; the `r^2` is applied by the pairings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSamples {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub g: Vec<f64>,
    pub f: Vec<f64>,
}

impl RadialSamples {
    pub fn norm_sq(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.w)
            .zip(self.g.iter().zip(&self.f))
            .map(|((r, w), (g, f))| w * (g * g + f * f) * r * r)
            .sum()
    }
}

/// `(g, f, g', f')` at `r = R`, taken from the interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub g: f64,
    pub f: f64,
    pub dg: f64,
    pub df: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialEigenpair {
    /// Dirac energy (signed) for the MIT and large-mass problems, `lambda^int`
    /// for the Robin Laplacian.
    pub energy: f64,
    pub sector: AngularSector,
    /// Twice the magnetic quantum number, in `-2j..=2j` step 2.
    pub two_mj: i32,
    pub interior: RadialSamples,
    /// Tail on `[R, R + 40/q]` for the large-mass problem.
    pub exterior: Option<RadialSamples>,
    pub boundary_values: BoundaryValues,
    /// Boundary or matching condition residual after normalization.
    pub residual: f64,
}

impl RadialEigenpair {
    pub fn norm_sq(&self) -> f64 {
        self.interior.norm_sq() + self.exterior.as_ref().map_or(0.0, |e| e.norm_sq())
    }

    /// The same radial pair in another magnetic substate.
    pub fn with_mj(&self, two_mj: i32) -> Result<Self> {
        let two_j = 2 * self.sector.kappa_j.abs() - 1;
        if two_mj.abs() > two_j || (two_mj - two_j) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "2 m_j = {two_mj} not in sector with 2j = {two_j}"
            )));
        }
        Ok(Self {
            two_mj,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Sorted by `|energy|`, then energy, then sector.
    pub eigenvalues: Vec<(f64, AngularSector)>,
    /// Normalized determinant residual at each root.
    pub solver_residuals: Vec<f64>,
    /// Final bracketing interval of each root, in the scan variable `k`.
    pub brackets: Vec<(f64, f64)>,
}

impl SpectralResult {
    pub fn empty() -> Self {
        Self {
            eigenvalues: Vec::new(),
            solver_residuals: Vec::new(),
            brackets: Vec::new(),
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.0).collect()
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&i, &j| {
            let (a, sa) = self.eigenvalues[i];
            let (b, sb) = self.eigenvalues[j];
            a.abs()
                .total_cmp(&b.abs())
                .then(a.total_cmp(&b))
                .then(sa.kappa_j.cmp(&sb.kappa_j))
        });
        self.eigenvalues = idx.iter().map(|&i| self.eigenvalues[i]).collect();
        self.solver_residuals = idx.iter().map(|&i| self.solver_residuals[i]).collect();
        self.brackets = idx.iter().map(|&i| self.brackets[i]).collect();
    }
}

/// Concatenates per-sector results into one list ordered by `|energy|`.
/// The order does not depend on the order of `parts`.
pub fn merge_spectra(parts: Vec<SpectralResult>) -> SpectralResult {
    let mut out = SpectralResult::empty();
    for p in parts {
        out.eigenvalues.extend(p.eigenvalues);
        out.solver_residuals.extend(p.solver_residuals);
        out.brackets.extend(p.brackets);
    }
    out.sort();
    out
}

type SectorSolver = fn(
    &DiracParams,
    AngularSector,
    usize,
    &crate::numerics::ToleranceConfig,
) -> Result<SpectralResult>;

fn solve_sectors(
    solver: SectorSolver,
    p: &DiracParams,
    sectors: &[AngularSector],
    count: usize,
    tol: &crate::numerics::ToleranceConfig,
) -> Result<SpectralResult> {
    let parts = sectors
        .par_iter()
        .map(|s| solver(p, *s, count, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_spectra(parts))
}

/// MIT spectra of several sectors, solved concurrently and merged.
pub fn mit_spectrum(
    p: &DiracParams,
    sectors: &[AngularSector],
    count: usize,
    tol: &crate::numerics::ToleranceConfig,
) -> Result<SpectralResult> {
    solve_sectors(mit_eigenvalues, p, sectors, count, tol)
}

/// Large-mass spectra of several sectors, solved concurrently and merged.
pub fn largemass_spectrum(
    p: &DiracParams,
    sectors: &[AngularSector],
    count: usize,
    tol: &crate::numerics::ToleranceConfig,
) -> Result<SpectralResult> {
    solve_sectors(largemass_eigenvalues, p, sectors, count, tol)
}

/// Largest distance from `-lambda` to the spectrum, over all `lambda`.
pub fn charge_conjugation_check(result: &SpectralResult) -> f64 {
    let e = result.energies();
    e.iter()
        .map(|&a| {
            e.iter()
                .map(|&b| (a + b).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
