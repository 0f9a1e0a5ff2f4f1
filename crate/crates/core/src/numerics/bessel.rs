//! Spherical Bessel functions for orders `0..=50`.
//!
//! Normalizations: `j_0(x) = sin x / x`, `i_0(x) = sinh x / x`,
//! `k_0(x) = e^{-x} / x`. With these, `i_l k_l' - i_l' k_l = -1 / x^2`.

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 50;

/// Arguments above this value return `k_l` in scaled form only.
pub const K_SCALED_THRESHOLD: f64 = 700.0;

fn check_args(function: &'static str, ell: u32, x: f64) -> Result<()> {
    if ell > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "{function}: order {ell} exceeds {MAX_ORDER}"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{function}: argument must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

/// Power series `j_l(x) = x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)...(2l+2k+1))`.
fn j_series(ell: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for n in 1..=ell {
        lead *= x / f64::from(2 * n + 1);
    }
    let y = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let k = f64::from(k);
        term *= y / (k * (2.0 * f64::from(ell) + 2.0 * k + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Miller backward recurrence, normalized against `j_0` or `j_1`.
fn j_miller(ell: u32, x: f64) -> f64 {
    let start = ell + 20 + (x as u32) + ((40.0 * f64::from(ell.max(1))).sqrt() as u32);
    let mut next = 0.0; // j_{n+1}
    let mut cur = 1e-300; // j_n
    let mut at_ell = 0.0;
    let mut j1_est = 0.0;
    let mut j0_est = 0.0;
    let mut n = start;
    while n > 0 {
        // j_{n-1} = (2n+1)/x j_n - j_{n+1}
        let prev = f64::from(2 * n + 1) / x * cur - next;
        next = cur;
        cur = prev;
        n -= 1;
        if n == ell {
            at_ell = cur;
        }
        if n == 1 {
            j1_est = cur;
        }
        if n == 0 {
            j0_est = cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            at_ell *= s;
            j1_est *= s;
        }
    }
    if ell == 0 {
        at_ell = j0_est;
    }
    let j0 = x.sin() / x;
    let j1 = j0 / x - x.cos() / x;
    if j0.abs() >= j1.abs() {
        at_ell * (j0 / j0_est)
    } else {
        at_ell * (j1 / j1_est)
    }
}

/// Regular spherical Bessel function `j_l(x)`.
///
/// Upward recurrence from the closed forms when `x > l`, where it is stable;
/// otherwise a power series for small `x` or Miller's backward recurrence.
pub fn spherical_bessel_j(ell: u32, x: f64) -> Result<f64> {
    check_args("spherical_bessel_j", ell, x)?;
    if x == 0.0 {
        return Ok(if ell == 0 { 1.0 } else { 0.0 });
    }
    let value = if x < 1.0 {
        j_series(ell, x)
    } else if x > f64::from(ell) {
        let j0 = x.sin() / x;
        if ell == 0 {
            j0
        } else {
            let mut prev = j0;
            let mut cur = j0 / x - x.cos() / x;
            for n in 1..ell {
                let next = f64::from(2 * n + 1) / x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    } else {
        j_miller(ell, x)
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            function: "spherical_bessel_j",
            order: ell,
            x,
        });
    }
    Ok(value)
}

/// `(j_l(x), j_l'(x))` using `j_0' = -j_1` and `j_l' = j_{l-1} - (l+1)/x j_l`.
pub fn spherical_bessel_j_with_derivative(ell: u32, x: f64) -> Result<(f64, f64)> {
    let j = spherical_bessel_j(ell, x)?;
    if x == 0.0 {
        let d = if ell == 1 { 1.0 / 3.0 } else { 0.0 };
        return Ok((j, d));
    }
    let d = if ell == 0 {
        -spherical_bessel_j(1, x)?
    } else {
        spherical_bessel_j(ell - 1, x)? - f64::from(ell + 1) / x * j
    };
    Ok((j, d))
}

/// Scaled modified spherical Bessel function `e^x k_l(x)`.
///
/// The scaled functions are rational in `1/x` and obey the same upward
/// recurrence `k_{l+1} = k_{l-1} + (2l+1)/x k_l`, which is stable for `k`.
pub fn modified_spherical_bessel_k_scaled(ell: u32, x: f64) -> Result<f64> {
    check_args("modified_spherical_bessel_k", ell, x)?;
    if x == 0.0 {
        return Err(Error::InvalidArgument(
            "modified_spherical_bessel_k is singular at x = 0".into(),
        ));
    }
    let mut prev = 1.0 / x; // k_{-1}
    let mut cur = 1.0 / x; // k_0
    for n in 0..ell {
        let next = prev + f64::from(2 * n + 1) / x * cur;
        prev = cur;
        cur = next;
    }
    if !cur.is_finite() {
        return Err(Error::Overflow {
            function: "modified_spherical_bessel_k",
            order: ell,
            x,
        });
    }
    Ok(cur)
}

/// `(e^x k_l(x), e^x k_l'(x))`.
pub fn modified_spherical_bessel_k_scaled_with_derivative(ell: u32, x: f64) -> Result<(f64, f64)> {
    let k = modified_spherical_bessel_k_scaled(ell, x)?;
    let d = if ell == 0 {
        -modified_spherical_bessel_k_scaled(1, x)?
    } else {
        -modified_spherical_bessel_k_scaled(ell - 1, x)? - f64::from(ell + 1) / x * k
    };
    Ok((k, d))
}

/// Value of `k_l(x)`, or its scaled form `e^x k_l(x)` when the plain value
/// would underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesselK {
    Value(f64),
    Scaled(f64),
}

impl BesselK {
    pub fn is_scaled(&self) -> bool {
        matches!(self, BesselK::Scaled(_))
    }
}

/// Modified spherical Bessel function of the third kind, `k_0(x) = e^{-x}/x`.
pub fn modified_spherical_bessel_k(ell: u32, x: f64) -> Result<BesselK> {
    let scaled = modified_spherical_bessel_k_scaled(ell, x)?;
    if x > K_SCALED_THRESHOLD {
        return Ok(BesselK::Scaled(scaled));
    }
    let value = scaled * (-x).exp();
    if !value.is_finite() {
        return Err(Error::Overflow {
            function: "modified_spherical_bessel_k",
            order: ell,
            x,
        });
    }
    Ok(BesselK::Value(value))
}

fn i_series(ell: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for n in 1..=ell {
        lead *= x / f64::from(2 * n + 1);
    }
    let y = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        let k = f64::from(k);
        term *= y / (k * (2.0 * f64::from(ell) + 2.0 * k + 1.0));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    lead * sum
}

/// Regular modified spherical Bessel function `i_l(x)`, `x <= 700`.
pub fn modified_spherical_bessel_i(ell: u32, x: f64) -> Result<f64> {
    check_args("modified_spherical_bessel_i", ell, x)?;
    if x > K_SCALED_THRESHOLD {
        return Err(Error::Overflow {
            function: "modified_spherical_bessel_i",
            order: ell,
            x,
        });
    }
    if x == 0.0 {
        return Ok(if ell == 0 { 1.0 } else { 0.0 });
    }
    // The series has positive terms, so no cancellation; cost grows with x.
    let value = if x <= 2.0 * f64::from(ell) + 10.0 {
        i_series(ell, x)
    } else {
        // i_{l+1} = i_{l-1} - (2l+1)/x i_l loses digits only when l > x.
        let i0 = x.sinh() / x;
        let i1 = x.cosh() / x - x.sinh() / (x * x);
        if ell == 0 {
            i0
        } else {
            let mut prev = i0;
            let mut cur = i1;
            for n in 1..ell {
                let next = prev - f64::from(2 * n + 1) / x * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    };
    if !value.is_finite() {
        return Err(Error::Overflow {
            function: "modified_spherical_bessel_i",
            order: ell,
            x,
        });
    }
    Ok(value)
}

/// `i_l'(x)` from `i_0' = i_1` and `i_l' = i_{l-1} - (l+1)/x i_l`.
pub fn modified_spherical_bessel_i_derivative(ell: u32, x: f64) -> Result<f64> {
    if ell == 0 {
        modified_spherical_bessel_i(1, x)
    } else {
        Ok(modified_spherical_bessel_i(ell - 1, x)?
            - f64::from(ell + 1) / x * modified_spherical_bessel_i(ell, x)?)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Reference values from 40-digit mpmath evaluations of the cylinder
    // functions J_{l+1/2}, K_{l+1/2}, I_{l+1/2}.
    const J_REF: &[(u32, f64, f64)] = &[
        (0, 0.3, 0.98506735553779858478),
        (1, 0.01, 0.003333300000119047468),
        (2, 1.5, 0.12734928368840821565),
        (3, 7.25, -0.033506096738741847388),
        (5, 2.0, 0.002635169770244117349),
        (10, 3.0, 3.5260038931752563332e-6),
        (10, 25.0, -0.036253285601128565996),
        (20, 5.0, 5.4277267607932083501e-12),
        (25, 24.0, 0.021997385151902465315),
        (50, 10.0, 2.2306960232186468578e-31),
        (50, 60.0, -0.021230978268738994477),
        (50, 0.5, 3.2227215374275172541e-96),
        (7, 100.0, 0.0097006298438983563051),
        (1, 1e-05, 3.3333333333000002727e-6),
    ];

    const K_SCALED_REF: &[(u32, f64, f64)] = &[
        (0, 1.0, 1.0),
        (1, 2.0, 0.75),
        (2, 0.5, 38.0),
        (5, 3.0, 16.259259259259259259),
        (10, 10.0, 13.89294802325),
        (20, 1.5, 2.7920798909963789994e+20),
        (50, 40.0, 68289178114.3982203),
        (3, 650.0, 0.0015527174258604390603),
    ];

    const I_REF: &[(u32, f64, f64)] = &[
        (0, 1.0, 1.1752011936438014569),
        (1, 0.5, 0.17087070843777212396),
        (3, 2.0, 0.094742522196516470269),
        (10, 5.0, 0.0012094137020295749704),
        (20, 30.0, 187264896.7922043845),
        (50, 10.0, 5.8899161540502469852e-31),
    ];

    #[test]
    fn j_closed_forms() {
        assert!(spherical_bessel_j(0, PI).unwrap().abs() < 1e-12);
        let j0 = spherical_bessel_j(0, 1.0).unwrap();
        assert!(rel(j0, 1f64.sin()) < 1e-15);
        assert!((j0 - 0.841470984).abs() < 1e-9);
        let j1 = spherical_bessel_j(1, 1.0).unwrap();
        assert!(rel(j1, 1f64.sin() - 1f64.cos()) < 1e-13);
        assert!((j1 - 0.301168678).abs() < 1e-9);
    }

    #[test]
    fn j_matches_reference_table() {
        for &(l, x, want) in J_REF {
            let got = spherical_bessel_j(l, x).unwrap();
            assert!(rel(got, want) < 1e-12, "j_{l}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn k_matches_reference_table() {
        for &(l, x, want) in K_SCALED_REF {
            let got = modified_spherical_bessel_k_scaled(l, x).unwrap();
            assert!(
                rel(got, want) < 1e-12,
                "k_{l}({x}) e^x = {got}, want {want}"
            );
        }
        match modified_spherical_bessel_k(0, 1.0).unwrap() {
            BesselK::Value(v) => assert!((v - 0.367879441).abs() < 1e-9),
            BesselK::Scaled(_) => panic!("unexpected scaled value"),
        }
        match modified_spherical_bessel_k(1, 2.0).unwrap() {
            BesselK::Value(v) => assert!(rel(v, (-2f64).exp() * 0.75) < 1e-14),
            BesselK::Scaled(_) => panic!("unexpected scaled value"),
        }
    }

    #[test]
    fn k0_normalization() {
        for x in [0.1, 1.0, 7.0, 300.0, 699.0, 5000.0, 1e6] {
            let s = modified_spherical_bessel_k_scaled(0, x).unwrap();
            assert!((s * x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn k_large_argument_is_scaled_not_zero() {
        let k = modified_spherical_bessel_k(2, 1e5).unwrap();
        assert!(k.is_scaled());
        if let BesselK::Scaled(v) = k {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn extreme_arguments_are_errors() {
        assert!(matches!(
            modified_spherical_bessel_k_scaled(50, 1e-6),
            Err(Error::Overflow { .. })
        ));
        assert!(spherical_bessel_j(51, 1.0).is_err());
        assert!(spherical_bessel_j(0, f64::NAN).is_err());
        assert!(modified_spherical_bessel_k(0, 0.0).is_err());
        assert!(modified_spherical_bessel_i(3, 800.0).is_err());
    }

    #[test]
    fn i_matches_reference_table() {
        for &(l, x, want) in I_REF {
            let got = modified_spherical_bessel_i(l, x).unwrap();
            assert!(rel(got, want) < 1e-12, "i_{l}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn wronskian_identity() {
        for l in [0u32, 1, 2, 5, 10, 20] {
            for x in [0.5, 1.0, 2.5, 7.0, 15.0, 40.0] {
                let i = modified_spherical_bessel_i(l, x).unwrap();
                let di = modified_spherical_bessel_i_derivative(l, x).unwrap();
                let (ks, dks) = modified_spherical_bessel_k_scaled_with_derivative(l, x).unwrap();
                // Work with e^{-x} i_l so the product stays O(1).
                let e = (-x).exp();
                let w = (i * e) * dks - (di * e) * ks;
                let want = -1.0 / (x * x);
                assert!(rel(w, want) < 1e-10, "l={l} x={x}: {w} vs {want}");
            }
        }
    }

    #[test]
    fn j_derivative_matches_finite_difference() {
        for (l, x) in [(0u32, 1.3), (1, 2.0), (4, 3.5), (12, 9.0)] {
            let (_, d) = spherical_bessel_j_with_derivative(l, x).unwrap();
            let h = 1e-5;
            let fd = (spherical_bessel_j(l, x + h).unwrap()
                - spherical_bessel_j(l, x - h).unwrap())
                / (2.0 * h);
            assert!((d - fd).abs() < 1e-9, "l={l}: {d} vs {fd}");
        }
    }
}
