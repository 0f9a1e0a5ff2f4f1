//! Boundary functionals built from radial traces.
//!
//! With `h = d/dr + kappa/2 + m0` (`kappa/2 = 1/R` on the sphere) and
//! `dGamma = R^2 domega`, every boundary integral of a sector function
//! reduces to products of `g(R), f(R), hg(R), hf(R)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{DiracParams, RadialEigenpair, RadialSamples};
use crate::error::{Error, Result};
use crate::geometry::CurvatureData;

/// Largest Gram-matrix defect accepted as orthonormal.
const ORTHONORMAL_TOL: f64 = 1e-8;

fn same_state(u: &RadialEigenpair, v: &RadialEigenpair) -> bool {
    u.sector.kappa_j == v.sector.kappa_j && u.two_mj == v.two_mj
}

fn robin_trace(u: &RadialEigenpair, p: &DiracParams) -> (f64, f64) {
    let c = p.robin_shift();
    let b = u.boundary_values;
    (b.dg + c * b.g, b.df + c * b.f)
}

fn sample_pairing(a: &RadialSamples, b: &RadialSamples) -> Result<f64> {
    if a.r != b.r {
        return Err(Error::InvalidArgument(
            "radial samples live on different grids".into(),
        ));
    }
    Ok(a.r
        .iter()
        .zip(&a.w)
        .enumerate()
        .map(|(i, (r, w))| w * r * r * (a.g[i] * b.g[i] + a.f[i] * b.f[i]))
        .sum())
}

/// `<u, v>` over the ball, plus the exterior when both carry a tail.
pub fn volume_pairing(u: &RadialEigenpair, v: &RadialEigenpair) -> Result<f64> {
    if !same_state(u, v) {
        return Ok(0.0);
    }
    let mut s = sample_pairing(&u.interior, &v.interior)?;
    if let (Some(a), Some(b)) = (&u.exterior, &v.exterior) {
        s += sample_pairing(a, b)?;
    }
    Ok(s)
}

/// `<h u, h v>` on the sphere.
pub fn boundary_pairing(u: &RadialEigenpair, v: &RadialEigenpair, p: &DiracParams) -> f64 {
    if !same_state(u, v) {
        return 0.0;
    }
    let (hgu, hfu) = robin_trace(u, p);
    let (hgv, hfv) = robin_trace(v, p);
    p.radius * p.radius * (hgu * hgv + hfu * hfv)
}

/// `-||(d_n + kappa/2 + m0) u||^2_Gamma / 2`.
pub fn mu_functional(u: &RadialEigenpair, p: &DiracParams) -> f64 {
    -0.5 * boundary_pairing(u, u, p)
}

/// Polarized boundary form
/// `int |grad_s u|^2/2 - |h u|^2/2 + (K/2 - kappa^2/8 - lambda^2/2)|u|^2`.
pub fn eta_form(u: &RadialEigenpair, v: &RadialEigenpair, lambda: f64, p: &DiracParams) -> f64 {
    if !same_state(u, v) {
        return 0.0;
    }
    let sec = u.sector;
    let (la, lb) = (f64::from(sec.ell_a()), f64::from(sec.ell_b()));
    let (bu, bv) = (u.boundary_values, v.boundary_values);
    // The surface Laplacian on Omega has eigenvalue ell(ell+1)/R^2; the R^2
    // of the area element cancels it.
    let grad = la * (la + 1.0) * bu.g * bv.g + lb * (lb + 1.0) * bu.f * bv.f;
    let r2 = p.radius * p.radius;
    let mass = r2 * (bu.g * bv.g + bu.f * bv.f);
    let zeroth = CurvatureData::sphere(p.radius).second_order_coefficient() - 0.5 * lambda * lambda;
    0.5 * grad - 0.5 * boundary_pairing(u, v, p) + zeroth * mass
}

/// `eta(u)` for a normalized MIT eigenfunction with eigenvalue `lambda`.
pub fn eta_functional(u: &RadialEigenpair, lambda: f64, p: &DiracParams) -> f64 {
    eta_form(u, u, lambda, p)
}

/// Sorted eigenvalues of a symmetric form matrix (row-major, `n x n`).
pub fn nu_from_form_matrix(n: usize, entries: &[f64]) -> Result<Vec<f64>> {
    if entries.len() != n * n {
        return Err(Error::InvalidArgument(format!(
            "expected {} entries, got {}",
            n * n,
            entries.len()
        )));
    }
    let mat = DMatrix::from_row_slice(n, n, entries);
    let asym = (&mat - mat.transpose()).amax();
    if asym > 1e-12 * mat.amax().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "form matrix is not symmetric (defect {asym:e})"
        )));
    }
    let mut values: Vec<f64> = SymmetricEigen::new(mat)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Min-max values `nu_1 <= ... <= nu_k` of `eta` on an orthonormal basis
/// of the eigenspace.
pub fn nu_minmax(eigenspace: &[RadialEigenpair], lambda: f64, p: &DiracParams) -> Result<Vec<f64>> {
    let n = eigenspace.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut defect: f64 = 0.0;
    let mut form = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let gram = volume_pairing(&eigenspace[i], &eigenspace[j])?;
            let want = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((gram - want).abs());
            form[i * n + j] = eta_form(&eigenspace[i], &eigenspace[j], lambda, p);
        }
    }
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { defect });
    }
    nu_from_form_matrix(n, &form)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// `m (lambda^int - lambda^2) <u_int, u>`.
    pub lhs: f64,
    /// `-<h u_int, h u>_Gamma / 2`.
    pub rhs: f64,
    /// `|lhs - rhs| / (|lhs| + |rhs|)`, zero when both vanish.
    pub residual: f64,
}

/// Checks `m (lambda^int - lambda^2) <u_int, u> = -<h u_int, h u>_Gamma / 2`.
pub fn boundary_identity_check(
    u_int: &RadialEigenpair,
    u_mit: &RadialEigenpair,
    m: f64,
    p: &DiracParams,
) -> Result<IdentityCheck> {
    let lambda = u_mit.energy;
    let lhs = m * (u_int.energy - lambda * lambda) * volume_pairing(u_int, u_mit)?;
    let rhs = -0.5 * boundary_pairing(u_int, u_mit, p);
    let denom = lhs.abs() + rhs.abs();
    let residual = if denom == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / denom
    };
    Ok(IdentityCheck { lhs, rhs, residual })
}
