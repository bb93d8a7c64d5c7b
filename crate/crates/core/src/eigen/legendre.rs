//! Legendre polynomials of dimension `d`, normalized so that `P(1) = 1`,
//! and their associated functions `E(t) = (1 - t²)^{j/2} P^{(j)}(t)`.
//!
//! `P^d_k` is the Gegenbauer polynomial `C_k^{(d-2)/2}` divided by its value
//! at 1, evaluated with the normalized three-term recurrence
//!
//! ```text
//! (k + d - 3) P_k = (2k + d - 4) t P_{k-1} - (k - 1) P_{k-2}
//! ```
//!
//! Derivatives never go through finite differences: each derivative lowers
//! the degree by one and raises the dimension by two,
//! `(P^d_k)' = k (k + d - 2) / (d - 1) · P^{d+2}_{k-1}`.

use crate::error::{Error, Result};

const DOMAIN_SLACK: f64 = 1e-12;

fn check_args(dim: u32, t: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Unsupported(format!(
            "Legendre dimension must be >= 2, got {dim}"
        )));
    }
    if !t.is_finite() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain(format!("t = {t} outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `P^dim_degree(t)` with `P(1) = 1`.
pub fn legendre_p(dim: u32, degree: u32, t: f64) -> Result<f64> {
    let t = check_args(dim, t)?;
    Ok(normalized_gegenbauer(dim, degree, t))
}

/// `E^dim_{degree, order}(t) = (1 - t²)^{order/2} · (d/dt)^order P^dim_degree(t)`.
pub fn assoc_legendre_e(dim: u32, degree: u32, order: u32, t: f64) -> Result<f64> {
    let t = check_args(dim, t)?;
    if order > degree {
        return Err(Error::Range(format!("order {order} > degree {degree}")));
    }
    let s = ((1.0 - t) * (1.0 + t)).max(0.0).sqrt();
    Ok(assoc_with_sine(dim, degree, order, t, s))
}

/// The j-th derivative of `P^dim_degree` at `t`.
pub fn legendre_derivative(dim: u32, degree: u32, order: u32, t: f64) -> Result<f64> {
    let t = check_args(dim, t)?;
    if order > degree {
        return Err(Error::Range(format!("order {order} > degree {degree}")));
    }
    Ok(derivative_factor(dim, degree, order) * normalized_gegenbauer(dim + 2 * order, degree - order, t))
}

/// Associated function with `sqrt(1 - t²)` supplied by the caller, who usually
/// knows it more accurately (e.g. as `sin θ`) than `t` alone allows near the poles.
/// Arguments are not validated.
pub(crate) fn assoc_with_sine(dim: u32, degree: u32, order: u32, t: f64, sine: f64) -> f64 {
    let poly = normalized_gegenbauer(dim + 2 * order, degree - order, t);
    derivative_factor(dim, degree, order) * poly * sine.powi(order as i32)
}

/// Product of the derivative-lowering factors:
/// `(d/dt)^j P^d_k = factor · P^{d+2j}_{k-j}`.
pub(crate) fn derivative_factor(dim: u32, degree: u32, order: u32) -> f64 {
    let (d, k) = (dim as f64, degree as f64);
    (0..order).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (k - i) * (k + i + d - 2.0) / (d + 2.0 * i - 1.0)
    })
}

fn normalized_gegenbauer(dim: u32, degree: u32, t: f64) -> f64 {
    match degree {
        0 => 1.0,
        1 => t,
        _ => {
            let d = dim as f64;
            let (mut prev, mut cur) = (1.0, t);
            for k in 2..=degree {
                let k = k as f64;
                let next = ((2.0 * k + d - 4.0) * t * cur - (k - 1.0) * prev) / (k + d - 3.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Number of strict sign changes of `f` on an `samples`-point midpoint grid of (-1, 1).
pub fn count_sign_changes(samples: usize, f: impl Fn(f64) -> f64) -> usize {
    let mut changes = 0;
    let mut last = 0.0f64;
    for i in 0..samples {
        let t = -1.0 + (2 * i + 1) as f64 / samples as f64;
        let v = f(t);
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_one() {
        assert_eq!(legendre_p(3, 0, 0.37).unwrap(), 1.0);
    }

    #[test]
    fn unit_at_pole() {
        for dim in 2..8 {
            for k in 0..40 {
                let v = legendre_p(dim, k, 1.0).unwrap();
                assert!((v - 1.0).abs() < 1e-12, "dim {dim} k {k}: {v}");
            }
        }
    }

    #[test]
    fn classical_cases() {
        // dim 3 is the classical Legendre family, dim 2 the Chebyshev family
        assert!((legendre_p(3, 2, 0.0).unwrap() + 0.5).abs() < 1e-15);
        let t: f64 = 0.3;
        let cheb = (5.0 * t.acos()).cos();
        assert!((legendre_p(2, 5, t).unwrap() - cheb).abs() < 1e-14);
    }

    #[test]
    fn associated_examples() {
        assert!((assoc_legendre_e(3, 1, 1, 0.6).unwrap() - 0.8).abs() < 1e-15);
        for k in 0..6 {
            assert_eq!(
                assoc_legendre_e(4, k, 0, 0.21).unwrap(),
                legendre_p(4, k, 0.21).unwrap()
            );
        }
        // d/dt of (3t² - 1)/2 is 3t
        assert!((legendre_derivative(3, 2, 1, 0.4).unwrap() - 1.2).abs() < 1e-14);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(legendre_p(1, 2, 0.0), Err(Error::Unsupported(_))));
        assert!(matches!(legendre_p(3, 2, 1.1), Err(Error::Domain(_))));
        assert!(legendre_p(3, 2, 1.0 + 1e-13).is_ok());
        assert!(matches!(assoc_legendre_e(3, 2, 3, 0.0), Err(Error::Range(_))));
        assert!(matches!(legendre_p(3, 2, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn high_degree_stays_bounded() {
        // |P^d_k| <= 1 on [-1, 1] for d >= 2
        for i in 0..=200 {
            let t = -1.0 + i as f64 / 100.0;
            let v = legendre_p(5, 100, t).unwrap();
            assert!(v.abs() <= 1.0 + 1e-12);
        }
    }
}
