//! Even-in-κ basis functions for the under-barrier region.
//!
//! Everything is written in terms of z = κ² = κ0² − k², which is real for every
//! energy. For z > 0 the functions are hyperbolic, for z < 0 trigonometric, and
//! near z = 0 they are evaluated from their Taylor series so that E = V0 needs
//! no special casing anywhere else.

/// Series are used when |z|x² is below this.
const SERIES_CUTOFF: f64 = 1.0;
const SERIES_TERMS: usize = 30;

/// cosh(κx).
pub fn c(z: f64, x: f64) -> f64 {
    let u = z * x * x;
    if u.abs() < SERIES_CUTOFF {
        series(u, 0)
    } else if z > 0.0 {
        (z.sqrt() * x).cosh()
    } else {
        ((-z).sqrt() * x).cos()
    }
}

/// sinh(κx)/κ, equal to x at z = 0.
pub fn s(z: f64, x: f64) -> f64 {
    let u = z * x * x;
    if u.abs() < SERIES_CUTOFF {
        x * series(u, 1)
    } else if z > 0.0 {
        let kap = z.sqrt();
        (kap * x).sinh() / kap
    } else {
        let beta = (-z).sqrt();
        (beta * x).sin() / beta
    }
}

/// (s(z, y) − y)/z, finite at z = 0.
pub fn sm(z: f64, y: f64) -> f64 {
    let u = z * y * y;
    if u.abs() < SERIES_CUTOFF {
        y * y * y * series(u, 3)
    } else {
        (s(z, y) - y) / z
    }
}

/// (s(z, x) − x·c(z, x))/z, finite at z = 0.
pub fn g(z: f64, x: f64) -> f64 {
    let u = z * x * x;
    if u.abs() < SERIES_CUTOFF {
        // Σ u^m (2m+2)/(2m+3)!
        let mut term = 1.0 / 6.0;
        let mut sum = 2.0 * term;
        for m in 1..SERIES_TERMS {
            let n = (2 * m + 3) as f64;
            term *= u / ((n - 1.0) * n);
            sum += term * (2 * m + 2) as f64;
        }
        -x * x * x * sum
    } else {
        (s(z, x) - x * c(z, x)) / z
    }
}

/// Σ_n u^n/(2n+offset)!
fn series(u: f64, offset: usize) -> f64 {
    let mut term = 1.0 / factorial(offset);
    let mut sum = term;
    for n in 1..SERIES_TERMS {
        let m = (2 * n + offset) as f64;
        term *= u / ((m - 1.0) * m);
        sum += term;
    }
    sum
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}
