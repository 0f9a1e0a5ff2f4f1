//! Determinants, scan-and-bracket root search and eigenfunction assembly.
//!
//! With `k = sqrt(E^2 - m0^2)` the regular interior solution is
//! `g = j_A(kr)`, `f = s k/(E + m0) j_B(kr)`, `s = -1` for `kappa < 0` and
//! `+1` otherwise. Outside, with `M = m0 + m` and `q = sqrt(M^2 - E^2)`, the
//! decaying solution is `g = k_A(qr)`, `f = -q/(E + M) k_B(qr)`.

use std::f64::consts::PI;

use super::{
    AngularSector, BoundaryValues, DiracParams, RadialEigenpair, RadialSamples, SpectralResult,
};
use crate::error::{Error, Result};
use crate::numerics::bessel::{
    modified_spherical_bessel_k_scaled, spherical_bessel_j, spherical_bessel_j_with_derivative,
};
use crate::numerics::{find_root_bracketed, GaussLegendre, ToleranceConfig};

pub const MAX_COUNT: usize = 20;

const INTERIOR_PANELS: usize = 32;
const INTERIOR_POINTS: usize = 16;
const TAIL_LENGTHS: f64 = 40.0;
const TAIL_PANELS: usize = 80;
const TAIL_POINTS: usize = 10;

#[derive(Debug, Clone, Copy)]
struct Root {
    k: f64,
    sign: f64,
    bracket: (f64, f64),
    residual: f64,
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 || count > MAX_COUNT {
        return Err(Error::InvalidArgument(format!(
            "count must be in 1..={MAX_COUNT}, got {count}"
        )));
    }
    Ok(())
}

fn root_tol(tol: &ToleranceConfig) -> Result<ToleranceConfig> {
    // Determinant magnitudes vary by orders of magnitude across sectors, so
    // only the bracket width decides convergence.
    ToleranceConfig::new(0.0, tol.rel_tol.max(f64::EPSILON), tol.max_iter.max(100))
}

fn energy(p: &DiracParams, k: f64, sign: f64) -> f64 {
    sign * (k * k + p.m0 * p.m0).sqrt()
}

/// MIT determinant `(E + m0) j_A(kR) + s k j_B(kR)` and its scale.
fn mit_det(p: &DiracParams, sec: AngularSector, k: f64, sign: f64) -> Result<(f64, f64)> {
    let e = energy(p, k, sign);
    let x = k * p.radius;
    let ja = spherical_bessel_j(sec.ell_a(), x)?;
    let jb = spherical_bessel_j(sec.ell_b(), x)?;
    let (t1, t2) = ((e + p.m0) * ja, sec.lower_sign() * k * jb);
    Ok((t1 + t2, t1.abs() + t2.abs()))
}

/// `k_B(qR) / k_A(qR)`.
fn exterior_ratio(sec: AngularSector, x: f64) -> Result<f64> {
    Ok(modified_spherical_bessel_k_scaled(sec.ell_b(), x)?
        / modified_spherical_bessel_k_scaled(sec.ell_a(), x)?)
}

/// Matching determinant `(E + m0) q rho j_A + s k (E + M) j_B`.
fn largemass_det(p: &DiracParams, sec: AngularSector, k: f64, sign: f64) -> Result<(f64, f64)> {
    let e = energy(p, k, sign);
    let big = p.m0 + p.m;
    let q = ((big - e) * (big + e)).sqrt();
    let x = k * p.radius;
    let ja = spherical_bessel_j(sec.ell_a(), x)?;
    let jb = spherical_bessel_j(sec.ell_b(), x)?;
    let rho = exterior_ratio(sec, q * p.radius)?;
    let t1 = (e + p.m0) * q * rho * ja;
    let t2 = sec.lower_sign() * k * (e + big) * jb;
    Ok((t1 + t2, t1.abs() + t2.abs()))
}

/// `(h j_A, h j_B)` at `R`, with `h = d/dr + 1/R + m0`, together with `(J_A, J_B)`.
fn robin_traces(p: &DiracParams, sec: AngularSector, k: f64) -> Result<[f64; 4]> {
    let x = k * p.radius;
    let c = p.robin_shift();
    let (ja, dja) = spherical_bessel_j_with_derivative(sec.ell_a(), x)?;
    let (jb, djb) = spherical_bessel_j_with_derivative(sec.ell_b(), x)?;
    Ok([k * dja + c * ja, k * djb + c * jb, ja, jb])
}

/// `h_A J_B + h_B J_A + h_A h_B / m`.
fn robin_det(p: &DiracParams, sec: AngularSector, k: f64) -> Result<(f64, f64)> {
    let [ha, hb, ja, jb] = robin_traces(p, sec, k)?;
    let terms = [ha * jb, hb * ja, ha * hb / p.m];
    Ok((terms.iter().sum(), terms.iter().map(|t| t.abs()).sum()))
}

/// Scans `k` on a grid of step `pi/(4R)` for sign changes of each signed
/// branch and refines every bracket; stops once `count` roots with the
/// smallest `k` are certain. `k_cap` bounds the scan.
fn scan_roots<F>(
    p: &DiracParams,
    signs: &[f64],
    count: usize,
    k_cap: f64,
    tol: &ToleranceConfig,
    det: F,
) -> Result<Vec<Root>>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    let step = PI / (4.0 * p.radius);
    let rtol = root_tol(tol)?;
    let mut roots: Vec<Root> = Vec::new();
    let mut k_lo = 1e-3 * step;
    let mut prev: Vec<f64> = signs
        .iter()
        .map(|&s| det(k_lo, s).map(|d| d.0))
        .collect::<Result<_>>()?;
    loop {
        if roots.len() >= count {
            break;
        }
        if k_lo >= k_cap {
            return Err(Error::BracketExhausted {
                requested: count,
                found: roots.len(),
                lo: 0.0,
                hi: k_cap,
            });
        }
        let k_hi = (k_lo + step).min(k_cap);
        for (i, &s) in signs.iter().enumerate() {
            let d_hi = det(k_hi, s)?.0;
            let d_lo = prev[i];
            if d_lo == 0.0 || d_lo.signum() != d_hi.signum() {
                let root_k = if d_lo == 0.0 {
                    k_lo
                } else if d_hi == 0.0 {
                    // Picked up as the left end of the next cell.
                    prev[i] = d_hi;
                    continue;
                } else {
                    find_root_bracketed(
                        |k| det(k, s).map_or(f64::NAN, |d| d.0),
                        (k_lo, k_hi),
                        &rtol,
                    )?
                };
                let (d, scale) = det(root_k, s)?;
                roots.push(Root {
                    k: root_k,
                    sign: s,
                    bracket: (k_lo, k_hi),
                    residual: if scale > 0.0 { d.abs() / scale } else { 0.0 },
                });
            }
            prev[i] = d_hi;
        }
        k_lo = k_hi;
    }
    // Both branches are complete up to the current k, so the smallest
    // `count` by k are exact.
    roots.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.sign.total_cmp(&b.sign)));
    roots.truncate(count);
    Ok(roots)
}

fn spectral_result(
    p: &DiracParams,
    sec: AngularSector,
    roots: &[Root],
    as_energy: bool,
) -> SpectralResult {
    let mut out = SpectralResult::empty();
    for r in roots {
        let value = if as_energy {
            energy(p, r.k, r.sign)
        } else {
            r.k * r.k + p.m0 * p.m0
        };
        out.eigenvalues.push((value, sec));
        out.solver_residuals.push(r.residual);
        out.brackets.push(r.bracket);
    }
    out.sort();
    out
}

fn mit_cap(p: &DiracParams, count: usize) -> f64 {
    // Regular Bessel zeros are spaced by about pi/R; both signs give roots.
    (count as f64 + 4.0) * 2.0 * PI / p.radius + 60.0 / p.radius
}

fn mit_roots(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Root>> {
    p.validate()?;
    check_count(count)?;
    scan_roots(p, &[1.0, -1.0], count, mit_cap(p, count), tol, |k, s| {
        mit_det(p, sector, k, s)
    })
}

/// The `count` eigenvalues of the MIT bag operator in `sector` that are
/// smallest in absolute value, with their signs.
pub fn mit_eigenvalues(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<SpectralResult> {
    Ok(spectral_result(
        p,
        sector,
        &mit_roots(p, sector, count, tol)?,
        true,
    ))
}

fn largemass_roots(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Root>> {
    p.require_mass()?;
    check_count(count)?;
    let big = p.m0 + p.m;
    let wanted = mit_cap(p, count);
    // Stay strictly below the threshold: the exterior solution must decay.
    let k_threshold = ((big * big) - p.m0 * p.m0).sqrt();
    let k_cap = wanted.min(k_threshold * (1.0 - 1e-9));
    match scan_roots(p, &[1.0, -1.0], count, k_cap, tol, |k, s| {
        largemass_det(p, sector, k, s)
    }) {
        Err(Error::BracketExhausted { .. }) if k_cap < wanted => Err(Error::EssentialSpectrum {
            lo: 0.0,
            hi: (k_cap * k_cap + p.m0 * p.m0).sqrt(),
            threshold: big,
        }),
        other => other,
    }
}

/// Eigenvalues of the Dirac operator with mass `m0 + m` outside the ball,
/// smallest in absolute value first.
pub fn largemass_eigenvalues(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<SpectralResult> {
    Ok(spectral_result(
        p,
        sector,
        &largemass_roots(p, sector, count, tol)?,
        true,
    ))
}

fn robin_roots(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Root>> {
    p.require_mass()?;
    check_count(count)?;
    scan_roots(p, &[1.0], count, mit_cap(p, count), tol, |k, _| {
        robin_det(p, sector, k)
    })
}

/// Eigenvalues `lambda^int = k^2 + m0^2` of the Robin-type Laplacian.
pub fn robin_laplacian_eigenvalues(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<SpectralResult> {
    Ok(spectral_result(
        p,
        sector,
        &robin_roots(p, sector, count, tol)?,
        false,
    ))
}

fn interior_grid(radius: f64) -> (Vec<f64>, Vec<f64>) {
    GaussLegendre::new(INTERIOR_POINTS).panels(0.0, radius, INTERIOR_PANELS)
}

/// Samples `(a j_A(kr), b j_B(kr))` on the interior grid.
fn regular_samples(
    p: &DiracParams,
    sec: AngularSector,
    k: f64,
    a: f64,
    b: f64,
) -> Result<RadialSamples> {
    let (r, w) = interior_grid(p.radius);
    let mut g = Vec::with_capacity(r.len());
    let mut f = Vec::with_capacity(r.len());
    for &ri in &r {
        g.push(a * spherical_bessel_j(sec.ell_a(), k * ri)?);
        f.push(b * spherical_bessel_j(sec.ell_b(), k * ri)?);
    }
    Ok(RadialSamples { r, w, g, f })
}

fn regular_boundary(
    p: &DiracParams,
    sec: AngularSector,
    k: f64,
    a: f64,
    b: f64,
) -> Result<BoundaryValues> {
    let x = k * p.radius;
    let (ja, dja) = spherical_bessel_j_with_derivative(sec.ell_a(), x)?;
    let (jb, djb) = spherical_bessel_j_with_derivative(sec.ell_b(), x)?;
    Ok(BoundaryValues {
        g: a * ja,
        f: b * jb,
        dg: a * k * dja,
        df: b * k * djb,
    })
}

fn scale_pair(pair: &mut RadialEigenpair, factor: f64) {
    let scale = |s: &mut RadialSamples| {
        s.g.iter_mut()
            .chain(s.f.iter_mut())
            .for_each(|v| *v *= factor);
    };
    scale(&mut pair.interior);
    if let Some(e) = pair.exterior.as_mut() {
        scale(e);
    }
    let b = &mut pair.boundary_values;
    b.g *= factor;
    b.f *= factor;
    b.dg *= factor;
    b.df *= factor;
}

fn normalize(mut pair: RadialEigenpair) -> Result<RadialEigenpair> {
    let n = pair.norm_sq();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eigenfunction has norm {n}"
        )));
    }
    scale_pair(&mut pair, n.sqrt().recip());
    // Fix the sign so that g is positive near the origin.
    if pair.interior.g[0] < 0.0 || (pair.interior.g[0] == 0.0 && pair.interior.f[0] < 0.0) {
        scale_pair(&mut pair, -1.0);
    }
    Ok(pair)
}

fn top_mj(sec: AngularSector) -> i32 {
    2 * sec.kappa_j.abs() - 1
}

/// Normalized MIT eigenfunctions for the roots of [`mit_eigenvalues`].
pub fn mit_eigenpairs(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<RadialEigenpair>> {
    let mut roots = mit_roots(p, sector, count, tol)?;
    roots.sort_by(|a, b| {
        energy(p, a.k, a.sign)
            .abs()
            .total_cmp(&energy(p, b.k, b.sign).abs())
            .then(a.sign.total_cmp(&b.sign))
    });
    roots
        .iter()
        .map(|r| {
            let e = energy(p, r.k, r.sign);
            let b = sector.lower_sign() * r.k / (e + p.m0);
            let bv = regular_boundary(p, sector, r.k, 1.0, b)?;
            let pair = RadialEigenpair {
                energy: e,
                sector,
                two_mj: top_mj(sector),
                interior: regular_samples(p, sector, r.k, 1.0, b)?,
                exterior: None,
                boundary_values: bv,
                residual: 0.0,
            };
            let mut pair = normalize(pair)?;
            let v = pair.boundary_values;
            pair.residual = (v.g + v.f).abs() / (v.g.abs() + v.f.abs()).max(f64::MIN_POSITIVE);
            Ok(pair)
        })
        .collect()
}

/// Normalized eigenfunctions of the large-mass problem, including the
/// exterior tail.
pub fn largemass_eigenpairs(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<RadialEigenpair>> {
    let mut roots = largemass_roots(p, sector, count, tol)?;
    roots.sort_by(|a, b| {
        energy(p, a.k, a.sign)
            .abs()
            .total_cmp(&energy(p, b.k, b.sign).abs())
            .then(a.sign.total_cmp(&b.sign))
    });
    let big = p.m0 + p.m;
    roots
        .iter()
        .map(|r| {
            let e = energy(p, r.k, r.sign);
            let q = ((big - e) * (big + e)).sqrt();
            let b = sector.lower_sign() * r.k / (e + p.m0);
            let bv = regular_boundary(p, sector, r.k, 1.0, b)?;
            let xr = q * p.radius;
            let ka_r = modified_spherical_bessel_k_scaled(sector.ell_a(), xr)?;
            let rho = exterior_ratio(sector, xr)?;
            // Exterior amplitude c k_A(qR), matched through the better-sized component.
            let amp = if bv.g.abs() >= bv.f.abs() {
                bv.g
            } else {
                -bv.f * (e + big) / (q * rho)
            };
            let (ss, ws) = GaussLegendre::new(TAIL_POINTS).panels(0.0, TAIL_LENGTHS, TAIL_PANELS);
            let mut tail = RadialSamples {
                r: Vec::with_capacity(ss.len()),
                w: Vec::with_capacity(ss.len()),
                g: Vec::with_capacity(ss.len()),
                f: Vec::with_capacity(ss.len()),
            };
            for (s, w) in ss.iter().zip(&ws) {
                let decay = (-s).exp();
                let ka = modified_spherical_bessel_k_scaled(sector.ell_a(), xr + s)?;
                let kb = modified_spherical_bessel_k_scaled(sector.ell_b(), xr + s)?;
                tail.r.push(p.radius + s / q);
                tail.w.push(w / q);
                tail.g.push(amp * decay * ka / ka_r);
                tail.f.push(-amp * q / (e + big) * decay * kb / ka_r);
            }
            let f_out = -amp * q / (e + big) * rho;
            let mismatch = (bv.g - amp).abs() + (bv.f - f_out).abs();
            let pair = RadialEigenpair {
                energy: e,
                sector,
                two_mj: top_mj(sector),
                interior: regular_samples(p, sector, r.k, 1.0, b)?,
                exterior: Some(tail),
                boundary_values: bv,
                residual: mismatch / (bv.g.abs() + bv.f.abs()),
            };
            normalize(pair)
        })
        .collect()
}

/// Normalized Robin eigenfunctions `(a j_A(kr), b j_B(kr))`.
pub fn robin_eigenpairs(
    p: &DiracParams,
    sector: AngularSector,
    count: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<RadialEigenpair>> {
    let roots = robin_roots(p, sector, count, tol)?;
    roots
        .iter()
        .map(|r| {
            let [ha, hb, ja, jb] = robin_traces(p, sector, r.k)?;
            // Null vector of [[h_A, -h_B], [h_A + m J_A, m J_B]] from its larger row.
            let row1 = (ha, -hb);
            let row2 = ((ha + p.m * ja) / p.m, jb);
            let (u, v) = if row1.0.hypot(row1.1) >= row2.0.hypot(row2.1) {
                row1
            } else {
                row2
            };
            let (a, b) = (v, -u);
            let bv = regular_boundary(p, sector, r.k, a, b)?;
            let pair = RadialEigenpair {
                energy: r.k * r.k + p.m0 * p.m0,
                sector,
                two_mj: top_mj(sector),
                interior: regular_samples(p, sector, r.k, a, b)?,
                exterior: None,
                boundary_values: bv,
                residual: 0.0,
            };
            let mut pair = normalize(pair)?;
            let c = p.robin_shift();
            let v = pair.boundary_values;
            let (hg, hf) = (v.dg + c * v.g, v.df + c * v.f);
            let scale = hg.abs() + hf.abs() + p.m * (v.g.abs() + v.f.abs());
            pair.residual = ((hg - hf).abs() + (hg + p.m * (v.g + v.f)).abs()) / scale;
            Ok(pair)
        })
        .collect()
}
