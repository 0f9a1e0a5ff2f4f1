//! Curvature data, the tubular-coordinate volume weight and its validity
//! floor.
//!
//! A point of the boundary surface is described only by its mean curvature
//! `kappa = Tr L` and Gauss curvature `gauss = det L`; in tubular
//! coordinates `x = s + t n(s)` the volume element carries the weight
//! `1 + t kappa + t^2 gauss`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    /// Mean curvature (trace of the shape operator), 1/length.
    pub kappa: f64,
    /// Gauss curvature (determinant of the shape operator), 1/length^2.
    pub gauss: f64,
}

impl CurvatureData {
    pub fn new(kappa: f64, gauss: f64) -> Result<Self> {
        if !(kappa.is_finite() && gauss.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "curvatures must be finite (kappa {kappa}, gauss {gauss})"
            )));
        }
        Ok(Self { kappa, gauss })
    }

    pub fn flat() -> Self {
        Self {
            kappa: 0.0,
            gauss: 0.0,
        }
    }

    /// Round sphere of radius `r`, normal pointing away from the centre.
    pub fn sphere(r: f64) -> Self {
        Self {
            kappa: 2.0 / r,
            gauss: 1.0 / (r * r),
        }
    }

    /// `K/2 - kappa^2/8`, the zeroth-order coefficient of the `1/m^2`
    /// corrections. Vanishes on every sphere.
    pub fn second_order_coefficient(&self) -> f64 {
        0.5 * self.gauss - 0.125 * self.kappa * self.kappa
    }

    /// Bounds `(|kappa|, |gauss|)` for this single point.
    pub fn bounds(&self) -> CurvatureBounds {
        CurvatureBounds {
            mean: self.kappa.abs(),
            gauss: self.gauss.abs(),
        }
    }
}

/// Uniform bounds `A >= |kappa|`, `B >= |K|` over the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    pub mean: f64,
    pub gauss: f64,
}

impl CurvatureBounds {
    pub fn new(mean: f64, gauss: f64) -> Result<Self> {
        if !(mean.is_finite() && gauss.is_finite() && mean >= 0.0 && gauss >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "curvature bounds must be finite and non-negative (A {mean}, B {gauss})"
            )));
        }
        Ok(Self { mean, gauss })
    }

    pub fn contains(&self, c: &CurvatureData) -> bool {
        c.kappa.abs() <= self.mean && c.gauss.abs() <= self.gauss
    }

    fn corners(&self) -> [CurvatureData; 4] {
        let (a, b) = (self.mean, self.gauss);
        [(a, b), (a, -b), (-a, b), (-a, -b)].map(|(kappa, gauss)| CurvatureData { kappa, gauss })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelGeometry {
    /// Flat 2-torus of side `period` times a half-line.
    FlatTorusHalfSpace { period: f64 },
    /// Complement of the closed ball of radius `radius`.
    BallExterior { radius: f64 },
    /// Open ball of radius `radius`.
    BallInterior { radius: f64 },
}

impl ModelGeometry {
    pub fn validate(&self) -> Result<()> {
        let (name, value) = match *self {
            Self::FlatTorusHalfSpace { period } => ("period", period),
            Self::BallExterior { radius } | Self::BallInterior { radius } => ("radius", radius),
        };
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{name} must be positive, got {value}"
            )))
        }
    }

    /// Boundary curvature with the normal pointing out of the ball.
    pub fn curvature(&self) -> CurvatureData {
        match *self {
            Self::FlatTorusHalfSpace { .. } => CurvatureData::flat(),
            Self::BallExterior { radius } | Self::BallInterior { radius } => {
                CurvatureData::sphere(radius)
            }
        }
    }

    /// Area of the boundary surface.
    pub fn boundary_area(&self) -> f64 {
        match *self {
            Self::FlatTorusHalfSpace { period } => period * period,
            Self::BallExterior { radius } | Self::BallInterior { radius } => {
                4.0 * std::f64::consts::PI * radius * radius
            }
        }
    }
}

/// `1 + t kappa + t^2 K`.
pub fn tubular_weight(c: &CurvatureData, t: f64) -> f64 {
    1.0 + t * c.kappa + t * t * c.gauss
}

/// Weight in the rescaled variable `tau = m t`: `1 + tau kappa/m + tau^2 K/m^2`.
pub fn rescaled_weight(c: &CurvatureData, m: f64, tau: f64) -> f64 {
    let s = tau / m;
    1.0 + s * c.kappa + s * s * c.gauss
}

/// Collar width `delta = m^{-1/2}`; in the rescaled variable the collar is
/// `(0, sqrt(m))`.
pub fn collar_width(m: f64) -> f64 {
    m.sqrt().recip()
}

/// Minimum of the rescaled weight over `tau` in `[0, sqrt(m)]`, from the
/// endpoints and the vertex of the quadratic.
pub fn min_rescaled_weight(c: &CurvatureData, m: f64) -> f64 {
    let end = m.sqrt();
    let mut lo = rescaled_weight(c, m, 0.0).min(rescaled_weight(c, m, end));
    if c.gauss > 0.0 {
        let vertex = -c.kappa * m / (2.0 * c.gauss);
        if vertex > 0.0 && vertex < end {
            lo = lo.min(rescaled_weight(c, m, vertex));
        }
    }
    lo
}

fn smallest_integer_mass(ok: impl Fn(f64) -> bool) -> f64 {
    // The weight tends to 1 uniformly, so `ok` holds from some m on; the
    // condition is monotone because the collar shrinks in t = tau/m.
    let mut hi = 1u64;
    while !ok(hi as f64) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    if hi == 1 {
        return 1.0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid as f64) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as f64
}

/// Smallest integer `m >= 1` with `a_{m,kappa,K} >= 1/2` on `[0, sqrt(m)]`
/// for every `|kappa| <= A`, `|K| <= B`.
pub fn weight_validity_floor(bounds: &CurvatureBounds) -> f64 {
    let corners = bounds.corners();
    smallest_integer_mass(|m| corners.iter().all(|c| min_rescaled_weight(c, m) >= 0.5))
}

/// Smallest integer `m >= 1` with `a_{m,kappa,K} >= 1/2` on `[0, sqrt(m)]`
/// for this single curvature pair.
pub fn point_validity_floor(c: &CurvatureData) -> f64 {
    smallest_integer_mass(|m| min_rescaled_weight(c, m) >= 0.5)
}
