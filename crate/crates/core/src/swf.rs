//! Transmission and reflection subprocess wave functions.
//!
//! ψ_ref vanishes identically for x ≥ x_c and carries no current; ψ_tr is the
//! remainder Ψ_tot − ψ_ref. Both are continuous at x_c while their slopes
//! generally jump there.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis;
use crate::error::Result;
use crate::scatter::{
    compose_two_barrier, current_density, under_barrier, Region, StationaryField, TwoBarrierParams,
};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this R_two the reflection subprocess is treated as empty.
pub const RESONANCE_R_TWO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Tot,
    Tr,
    Ref,
}

/// Coefficients of ψ_ref at fixed k.
///
/// ```text
/// x ≤ a1       A_in_ref e^{ikx} + b_out e^{ik(2a1−x)}
/// [a1, b1]     a_ref1 sinh(κ(x−b1))/κ + b_ref1 cosh(κ(x−b1))
/// [b1, x_c]    a_ref_gap sin(k(x−x_c))
/// x ≥ x_c      0
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwfField {
    pub a_in_ref: Complex64,
    pub a_in_tr: Complex64,
    pub lambda: f64,
    pub a_ref_gap: Complex64,
    pub a_ref1: Complex64,
    pub b_ref1: Complex64,
    pub b_out: Complex64,
    /// True when R_two is below [`RESONANCE_R_TWO`] and ψ_ref ≡ 0.
    pub resonant: bool,
}

/// Builds ψ_ref from the total field.
pub fn ref_field(two: &TwoBarrierParams, total: &StationaryField) -> SwfField {
    let k = total.k;
    let gap = total.sys.gap;
    let rho = two.rho;
    let sqrt_t2 = two.t_two.sqrt();
    if two.r_two < RESONANCE_R_TWO {
        let zero = Complex64::new(0.0, 0.0);
        return SwfField {
            a_in_ref: zero,
            a_in_tr: Complex64::new(1.0, 0.0),
            lambda: two.eta_two * FRAC_PI_2,
            a_ref_gap: zero,
            a_ref1: zero,
            b_ref1: zero,
            b_out: zero,
            resonant: true,
        };
    }
    let a_in_ref = rho * Complex64::new(rho, sqrt_t2);
    let e1 = Complex64::from_polar(1.0, k * total.sys.a1);
    let a_ref_gap = -2.0 * total.big_p * total.b_out * total.a_out.conj() * e1;
    let (sn, cs) = (0.5 * k * gap).sin_cos();
    SwfField {
        a_in_ref,
        a_in_tr: 1.0 - a_in_ref,
        lambda: (sqrt_t2 / rho).atan(),
        a_ref_gap,
        a_ref1: k * a_ref_gap * cs,
        b_ref1: -a_ref_gap * sn,
        b_out: total.b_out,
        resonant: false,
    }
}

impl SwfField {
    /// A_in_ref from Q: −b_out Q*/Q.
    pub fn a_in_ref_from_q(total: &StationaryField) -> Complex64 {
        -total.b_out * total.big_q.conj() / total.big_q
    }

    /// ψ_ref coefficients in barrier 1 re-expanded about a1, in the same basis
    /// as the total field.
    pub fn ref_coeffs_about_a1(&self, z: f64, d: f64) -> (Complex64, Complex64) {
        let s = basis::s(z, d);
        let c = basis::c(z, d);
        (self.a_ref1 * c - self.b_ref1 * (z * s), self.b_ref1 * c - self.a_ref1 * s)
    }
}

/// Stationary total field together with its subprocess decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwfState {
    pub two: TwoBarrierParams,
    pub total: StationaryField,
    pub swf: SwfField,
}

impl SwfState {
    pub fn new(sys: &BarrierSystem, k: f64) -> Result<Self> {
        let two = compose_two_barrier(sys, k)?;
        let total = StationaryField::new(sys, &two);
        let swf = ref_field(&two, &total);
        Ok(Self { two, total, swf })
    }

    pub fn k(&self) -> f64 {
        self.total.k
    }

    /// ψ_ref and its slope. At x_c the right-hand limit (zero) is returned.
    pub fn ref_value_and_slope(&self, x: f64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let sys = &self.total.sys;
        let k = self.total.k;
        let f = &self.swf;
        if x >= sys.x_c() {
            return (zero, zero);
        }
        match sys.region(x) {
            Region::Left => {
                let inc = f.a_in_ref * Complex64::from_polar(1.0, k * x);
                let refl = f.b_out * Complex64::from_polar(1.0, k * (2.0 * sys.a1 - x));
                (inc + refl, I * k * (inc - refl))
            }
            Region::Barrier1 => under_barrier(f.a_ref1, f.b_ref1, self.total.z, x - sys.b1()),
            _ => {
                let (sn, cs) = (k * (x - sys.x_c())).sin_cos();
                (f.a_ref_gap * sn, k * f.a_ref_gap * cs)
            }
        }
    }

    /// ψ_tr and its slope, built from coefficient differences.
    pub fn tr_value_and_slope(&self, x: f64) -> (Complex64, Complex64) {
        let sys = &self.total.sys;
        let k = self.total.k;
        let t = &self.total;
        let f = &self.swf;
        if x >= sys.x_c() {
            return t.value_and_slope(x);
        }
        match sys.region(x) {
            Region::Left => {
                let v = f.a_in_tr * Complex64::from_polar(1.0, k * x);
                (v, I * k * v)
            }
            Region::Barrier1 => {
                let (ra, rb) = f.ref_coeffs_about_a1(t.z, sys.d);
                under_barrier(t.a1 - ra, t.b1 - rb, t.z, x - sys.a1)
            }
            _ => {
                let a = t.a_gap - f.a_ref_gap;
                let (sn, cs) = (k * (x - sys.x_c())).sin_cos();
                (a * sn + t.b_gap * cs, k * (a * cs - t.b_gap * sn))
            }
        }
    }

    pub fn value_and_slope(&self, which: Which, x: f64) -> (Complex64, Complex64) {
        match which {
            Which::Tot => self.total.value_and_slope(x),
            Which::Tr => self.tr_value_and_slope(x),
            Which::Ref => self.ref_value_and_slope(x),
        }
    }

    /// Left-hand limits at x_c of value and slope.
    pub fn left_limit_at_xc(&self, which: Which) -> (Complex64, Complex64) {
        let xc = self.total.sys.x_c();
        let k = self.total.k;
        let t = &self.total;
        let zero = Complex64::new(0.0, 0.0);
        if xc <= t.sys.b1() {
            // L = 0: x_c sits on the shared barrier edge.
            let x = xc.next_down();
            return self.value_and_slope(which, x);
        }
        let a_ref = self.swf.a_ref_gap;
        match which {
            Which::Tot => (t.b_gap, k * t.a_gap),
            Which::Ref => (zero, k * a_ref),
            Which::Tr => (t.b_gap, k * (t.a_gap - a_ref)),
        }
    }

    pub fn eval(&self, which: Which, x: f64) -> Complex64 {
        self.value_and_slope(which, x).0
    }

    pub fn current(&self, which: Which, x: f64) -> f64 {
        let (v, dv) = self.value_and_slope(which, x);
        current_density(&self.total.sys, v, dv)
    }
}

/// Evaluates one of Ψ_tot, ψ_tr, ψ_ref at x.
pub fn eval_swf(state: &SwfState, which: Which, x: f64) -> Complex64 {
    state.eval(which, x)
}

/// Probability current (ħ/m) Im(ψ*ψ') from the analytic slope.
pub fn current(state: &SwfState, which: Which, x: f64) -> f64 {
    state.current(which, x)
}
