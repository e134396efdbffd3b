//! Independent reference solution: the eight continuity conditions at a1, b1,
//! a2 and b2 solved as a dense linear system with complex κ.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scatter::{check_k, StationaryField};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Solves for (B_out, A1, B1, Agap, Bgap, A2, B2, A_out) directly.
///
/// Q and P are reconstructed from the gap amplitudes, so every field of the
/// returned value comes from the linear solve.
pub fn oracle_amplitudes(sys: &BarrierSystem, k: f64) -> Result<StationaryField> {
    check_k(k)?;
    let z = sys.kappa_sq(k);
    if z == 0.0 {
        return Err(Error::Domain("the linear-solve oracle needs E ≠ V0".into()));
    }
    let kap = Complex64::new(z, 0.0).sqrt();
    let (a1, b1, a2, b2, xc, dd) = (sys.a1, sys.b1(), sys.a2(), sys.b2(), sys.x_c(), sys.width());
    let e = |x: f64| Complex64::from_polar(1.0, k * x);
    let sh = |u: f64| (kap * u).sinh();
    let ch = |u: f64| (kap * u).cosh();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut m = SMatrix::<Complex64, 8, 8>::from_element(zero);
    let mut rhs = SVector::<Complex64, 8>::from_element(zero);

    // x = a1
    m[(0, 0)] = -e(a1);
    m[(0, 2)] = one;
    rhs[0] = e(a1);
    m[(1, 0)] = I * k * e(a1);
    m[(1, 1)] = kap;
    rhs[1] = I * k * e(a1);

    // x = b1
    let (sn, cs) = (k * (b1 - xc)).sin_cos();
    m[(2, 1)] = sh(sys.d);
    m[(2, 2)] = ch(sys.d);
    m[(2, 3)] = -Complex64::new(sn, 0.0);
    m[(2, 4)] = -Complex64::new(cs, 0.0);
    m[(3, 1)] = kap * ch(sys.d);
    m[(3, 2)] = kap * sh(sys.d);
    m[(3, 3)] = Complex64::new(-k * cs, 0.0);
    m[(3, 4)] = Complex64::new(k * sn, 0.0);

    // x = a2
    let (sn, cs) = (k * (a2 - xc)).sin_cos();
    m[(4, 3)] = Complex64::new(sn, 0.0);
    m[(4, 4)] = Complex64::new(cs, 0.0);
    m[(4, 5)] = -sh(-sys.d);
    m[(4, 6)] = -ch(-sys.d);
    m[(5, 3)] = Complex64::new(k * cs, 0.0);
    m[(5, 4)] = Complex64::new(-k * sn, 0.0);
    m[(5, 5)] = -kap * ch(-sys.d);
    m[(5, 6)] = -kap * sh(-sys.d);

    // x = b2
    m[(6, 6)] = one;
    m[(6, 7)] = -e(b2 - dd);
    m[(7, 5)] = kap;
    m[(7, 7)] = -I * k * e(b2 - dd);

    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical(format!("continuity system is singular at k = {k}")))?;
    if sol.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Numerical(format!("continuity system is ill-conditioned at k = {k}")));
    }

    let a_out = sol[7];
    let e1 = e(a1);
    let big_p = -(sol[3] / (a_out * e1)).conj();
    let big_q = (sol[4] / (a_out * e1)).conj();
    Ok(StationaryField {
        sys: *sys,
        k,
        z,
        b_out: sol[0],
        a_out,
        a1: kap * sol[1],
        b1: sol[2],
        a_gap: sol[3],
        b_gap: sol[4],
        a2: kap * sol[5],
        b2: sol[6],
        big_q,
        big_p,
    })
}
