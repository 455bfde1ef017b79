use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_BESSEL_ORDER: i32 = 64;
pub const MAX_BESSEL_ARG: f64 = 1e4;

const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, `J_order(x)`, for integer order.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    if order.abs() > MAX_BESSEL_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {order} outside ±{MAX_BESSEL_ORDER}"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_BESSEL_ARG {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside ±{MAX_BESSEL_ARG}"
        )));
    }
    let n = order.unsigned_abs();
    let mut v = if x.abs() <= SERIES_LIMIT {
        bessel_j_series(n, x.abs())
    } else {
        bessel_j_quadrature(n, x.abs())
    };
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x).
    if n % 2 == 1 && ((order < 0) != (x < 0.0)) {
        v = -v;
    }
    Ok(v)
}

/// Ascending power series. Accurate for moderate `|x|`; no domain checks.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term *= -q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && m as f64 > half {
            break;
        }
        if term == 0.0 || m > 500 {
            break;
        }
    }
    sum
}

/// Trapezoid rule on `(1/2π) ∫_{-π}^{π} cos(nτ − x sin τ) dτ`; no domain checks.
pub fn bessel_j_quadrature(n: u32, x: f64) -> f64 {
    let nodes = 2048usize.max((2.0 * (x.abs() + n as f64)) as usize + 64);
    let h = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|i| {
            let t = -PI + i as f64 * h;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}
