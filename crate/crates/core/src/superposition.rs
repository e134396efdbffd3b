//! Splitting the standard one-source, two-sink stationary state into two
//! solutions with one outgoing wave each, and auditing their channel currents.
//!
//! Each solution is written as A_l e^{ikx} + B_l e^{−ikx} left of the barrier
//! and A_r e^{ikx} + B_r e^{−ikx} right of it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scatter::{two_barrier_matrix, TransferMatrix};
use crate::units::BarrierSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWaves {
    pub a_l: Complex64,
    pub b_l: Complex64,
    pub a_r: Complex64,
    pub b_r: Complex64,
}

impl PlaneWaves {
    /// Net current on the left, in units of ħk/m.
    pub fn left_current(&self) -> f64 {
        self.a_l.norm_sqr() - self.b_l.norm_sqr()
    }

    pub fn right_current(&self) -> f64 {
        self.a_r.norm_sqr() - self.b_r.norm_sqr()
    }

    pub fn add(&self, o: &PlaneWaves) -> PlaneWaves {
        PlaneWaves { a_l: self.a_l + o.a_l, b_l: self.b_l + o.b_l, a_r: self.a_r + o.a_r, b_r: self.b_r + o.b_r }
    }

    /// Amplitudes on the left implied by the right ones through `y`.
    pub fn left_from_right(y: &TransferMatrix, a_r: Complex64, b_r: Complex64) -> (Complex64, Complex64) {
        (y.q * a_r + y.p * b_r, y.p.conj() * a_r + y.q.conj() * b_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaiveSplit {
    pub y: TransferMatrix,
    /// ħk/m, the current carried by a unit-amplitude plane wave.
    pub velocity: f64,
    pub psi: PlaneWaves,
    pub psi1: PlaneWaves,
    pub psi2: PlaneWaves,
    pub j_in_1: f64,
    pub j_out_1: f64,
    pub j_in_2: f64,
    pub j_out_2: f64,
}

/// Builds ψ, ψ₁ (transmitted wave only) and ψ₂ (reflected wave only).
pub fn naive_split(q: Complex64, p: Complex64, velocity: f64) -> Result<NaiveSplit> {
    let y = TransferMatrix { q, p };
    let defect = y.flux_defect();
    if !(defect.abs() <= 1e-10 * q.norm_sqr()) {
        return Err(Error::Domain(format!("transfer matrix is not flux-conserving: |q|²−|p|²−1 = {defect:e}")));
    }
    if !(velocity > 0.0) {
        return Err(Error::Domain(format!("velocity must be positive, got {velocity}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let q2 = q.norm_sqr();
    let psi = PlaneWaves { a_l: Complex64::new(1.0, 0.0), b_l: p.conj() / q, a_r: q.inv(), b_r: zero };
    let psi1 = PlaneWaves { a_l: Complex64::new(1.0 / q2, 0.0), b_l: zero, a_r: q.inv(), b_r: -p.conj() / q2 };
    let psi2 = PlaneWaves {
        a_l: Complex64::new(p.norm_sqr() / q2, 0.0),
        b_l: p.conj() / q,
        a_r: zero,
        b_r: p.conj() / q2,
    };
    Ok(NaiveSplit {
        y,
        velocity,
        psi,
        psi1,
        psi2,
        j_in_1: velocity * psi1.a_l.norm_sqr(),
        j_out_1: velocity * psi1.a_r.norm_sqr(),
        j_in_2: velocity * psi2.a_l.norm_sqr(),
        j_out_2: velocity * psi2.b_l.norm_sqr(),
    })
}

/// The split applied to the two-barrier system at one k.
pub fn naive_split_two_barrier(sys: &BarrierSystem, k: f64) -> Result<NaiveSplit> {
    let y = two_barrier_matrix(sys, k)?;
    naive_split(y.q, y.p, sys.velocity(k))
}

/// Below this mismatch (relative to ħk/m) a channel counts as balanced.
const ONE_CHANNEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentAudit {
    pub transmission: f64,
    /// Incident current of ψ₁.
    pub j_in_1: f64,
    /// Transmitted current of ψ.
    pub j_transmitted: f64,
    /// Incident current of ψ₂.
    pub j_in_2: f64,
    /// Reflected current of ψ.
    pub j_reflected: f64,
    pub mismatch_tr: f64,
    pub mismatch_ref: f64,
    /// T(1−T)·ħk/m.
    pub predicted_mismatch: f64,
    /// Left minus right net current of ψ₁ and ψ₂.
    pub flux_defect_1: f64,
    pub flux_defect_2: f64,
    /// True when both mismatches vanish, i.e. T is 0 or 1.
    pub one_channel: bool,
}

pub fn current_audit(split: &NaiveSplit) -> CurrentAudit {
    let v = split.velocity;
    let t = 1.0 / split.y.q.norm_sqr();
    let j_transmitted = v * split.psi.a_r.norm_sqr();
    let j_reflected = v * split.psi.b_l.norm_sqr();
    let mismatch_tr = j_transmitted - split.j_in_1;
    let mismatch_ref = j_reflected - split.j_in_2;
    CurrentAudit {
        transmission: t,
        j_in_1: split.j_in_1,
        j_transmitted,
        j_in_2: split.j_in_2,
        j_reflected,
        mismatch_tr,
        mismatch_ref,
        predicted_mismatch: v * t * (1.0 - t),
        flux_defect_1: v * (split.psi1.left_current() - split.psi1.right_current()),
        flux_defect_2: v * (split.psi2.left_current() - split.psi2.right_current()),
        one_channel: mismatch_tr.abs() <= ONE_CHANNEL_TOL * v && mismatch_ref.abs() <= ONE_CHANNEL_TOL * v,
    }
}

impl CurrentAudit {
    pub fn summary(&self) -> String {
        if self.one_channel {
            "one-channel; superposition principle unaffected".to_string()
        } else {
            format!(
                "two-channel; incident current of psi1 differs from transmitted current of psi by {:.6e}",
                self.mismatch_tr
            )
        }
    }
}
