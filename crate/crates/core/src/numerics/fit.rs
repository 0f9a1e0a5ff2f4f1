//! Least-squares extraction of `limit + slope / m` laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Extrapolated `m -> infinity` value.
    pub limit: f64,
    /// Coefficient of `1/m`.
    pub slope: f64,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
    pub m_grid: Vec<f64>,
    /// Relative slope change `|slope' - slope| / |slope|` after dropping the
    /// smallest `m`; `None` with fewer than four points.
    pub drift: Option<f64>,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let scale = xs.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if !(sxx > 1e-28 * scale * scale * n) {
        return Err(Error::DegenerateDesign(format!(
            "abscissae have no spread (sxx = {sxx:e})"
        )));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((intercept, slope, residual))
}

fn sorted_points(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let mut pts = points.to_vec();
    if pts
        .iter()
        .any(|(m, v)| !(m.is_finite() && *m > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "m values must be positive and all data finite".into(),
        ));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateDesign("repeated m value".into()));
    }
    Ok(pts)
}

/// Fits `value ≈ limit + slope / m` by least squares in the variable `1/m`.
pub fn fit_inverse_m(points: &[(f64, f64)]) -> Result<AsymptoticFit> {
    let pts = sorted_points(points)?;
    let xs: Vec<f64> = pts.iter().map(|(m, _)| 1.0 / m).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| *v).collect();
    let (limit, slope, residual_norm) = line_fit(&xs, &ys)?;
    let drift = if pts.len() >= 4 {
        let (_, tail_slope, _) = line_fit(&xs[1..], &ys[1..])?;
        Some(if slope != 0.0 {
            (tail_slope - slope).abs() / slope.abs()
        } else {
            (tail_slope - slope).abs()
        })
    } else {
        None
    };
    Ok(AsymptoticFit {
        limit,
        slope,
        residual_norm,
        m_grid: pts.iter().map(|(m, _)| *m).collect(),
        drift,
    })
}

/// Least-squares slope of `ln|value|` against `ln m` (observed order).
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    if points
        .iter()
        .any(|(m, v)| !(*m > 0.0) || *v == 0.0 || !v.is_finite())
    {
        return Err(Error::InvalidArgument(
            "log-log fit needs positive m and nonzero finite values".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|(m, _)| m.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.abs().ln()).collect();
    line_fit(&xs, &ys).map(|(_, slope, _)| slope)
}
