//! Numerical substrate: special functions, ODE integration, bracketing root
//! finding, Gauss-Legendre quadrature and `1/m` asymptotic fits.
//!
//! Everything here is a pure function of its inputs.

pub mod bessel;
pub mod fit;
pub mod ode;
pub mod quadrature;
pub mod roots;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bessel::{
    modified_spherical_bessel_i, modified_spherical_bessel_k, modified_spherical_bessel_k_scaled,
    spherical_bessel_j, spherical_bessel_j_with_derivative, BesselK,
};
pub use fit::{fit_inverse_m, loglog_slope, AsymptoticFit};
pub use ode::{solve_bvp_shooting, BvpSolution, LinearOde2};
pub use quadrature::{composite_gauss_legendre, GaussLegendre};
pub use roots::find_root_bracketed;

/// Stopping rule shared by the iterative solvers.
///
/// `abs_tol` bounds a residual (|f| for root finding, local error for ODE
/// steps); `rel_tol` bounds a width or error relative to the current scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let tol = Self {
            abs_tol,
            rel_tol,
            max_iter,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0)
            || !self.abs_tol.is_finite()
            || !self.rel_tol.is_finite()
        {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be finite and non-negative (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.abs_tol + self.rel_tol <= 0.0 {
            return Err(Error::InvalidArgument(
                "abs_tol + rel_tol must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_iter: 200,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_invariants() {
        assert!(ToleranceConfig::new(0.0, 0.0, 10).is_err());
        assert!(ToleranceConfig::new(1e-8, 0.0, 0).is_err());
        assert!(ToleranceConfig::new(-1.0, 1.0, 1).is_err());
        assert!(ToleranceConfig::new(f64::NAN, 1.0, 1).is_err());
        assert!(ToleranceConfig::new(0.0, 1e-10, 1).is_ok());
        ToleranceConfig::default().validate().unwrap();
    }
}
