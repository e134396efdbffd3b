//! Phase, group and dwell times, and the k-derivatives they need.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis;
use crate::error::{Error, Result};
use crate::scatter::{compose_two_barrier, OneBarrierParams, StationaryField, TwoBarrierParams};
use crate::swf::RESONANCE_R_TWO;
use crate::units::BarrierSystem;

/// |cos χ| below which λ′ is flagged as near-resonant.
pub const NEAR_RESONANCE_COS_CHI: f64 = 1e-6;

/// Analytic k-derivatives of the scattering phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivBundle {
    pub jp: f64,
    pub tp: f64,
    /// ds/dk with s = θ₊ sinh(κd).
    pub sp: f64,
    pub j_two_p: f64,
    pub lambda_p: f64,
    /// Set when |cos χ| < [`NEAR_RESONANCE_COS_CHI`].
    pub near_resonance: bool,
}

/// Single-barrier derivatives (J′, T′, s′) for a barrier of the given width.
pub fn one_barrier_derivatives(one: &OneBarrierParams) -> (f64, f64, f64) {
    let k = one.k;
    let z = one.z;
    let w = one.width;
    let k2 = k * k;
    let (s, c) = (one.sinh_k, one.cosh_k);
    let sp = 0.5 * (k2 + z) * (basis::g(z, w) - s / k2);
    let tp = -2.0 * one.t * one.t * one.s_plus * sp;
    let jp = 0.5 * one.t * (0.5 * k2 * basis::sm(z, 2.0 * w) + 2.0 * s * c + z * s * c / k2 + w);
    (jp, tp, sp)
}

pub fn derivatives_from(two: &TwoBarrierParams) -> DerivBundle {
    let one = &two.one;
    let (jp, tp, sp) = one_barrier_derivatives(one);
    let (t, r, s) = (one.t, one.r, one.s_plus);
    let gap = two.gap;
    let (sin_chi, cos_chi) = two.chi.sin_cos();
    let chi_p = jp + gap;
    let j_two_p = jp + two.t_two / (t * t) * (t * (1.0 + r) * chi_p + tp * (2.0 * two.chi).sin());
    let lambda_p =
        2.0 * two.t_two / t.sqrt() * (-sp * (1.0 + r) * cos_chi + s * chi_p * sin_chi);
    DerivBundle {
        jp,
        tp,
        sp,
        j_two_p,
        lambda_p,
        near_resonance: cos_chi.abs() < NEAR_RESONANCE_COS_CHI,
    }
}

pub fn derivatives(sys: &BarrierSystem, k: f64) -> Result<DerivBundle> {
    Ok(derivatives_from(&compose_two_barrier(sys, k)?))
}

/// Phase-time family at one k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupTimes {
    pub tau_ph: f64,
    pub tau_as: f64,
    pub t_dep: f64,
    pub x_start: f64,
    pub near_resonance: bool,
}

pub fn phase_and_group_times(sys: &BarrierSystem, k: f64) -> Result<GroupTimes> {
    let der = derivatives(sys, k)?;
    Ok(group_times_from(sys, k, &der))
}

fn group_times_from(sys: &BarrierSystem, k: f64, der: &DerivBundle) -> GroupTimes {
    let f = sys.mass / (sys.hbar * k);
    GroupTimes {
        tau_ph: f * der.j_two_p,
        tau_as: f * (der.j_two_p - der.lambda_p),
        t_dep: f * der.lambda_p,
        x_start: -der.lambda_p,
        near_resonance: der.near_resonance,
    }
}

fn require_no_gap(sys: &BarrierSystem) -> Result<()> {
    if sys.gap != 0.0 {
        Err(Error::Domain(format!("closed form needs a zero gap, got L = {}", sys.gap)))
    } else {
        Ok(())
    }
}

/// Start position of a gap-free system from its single-barrier closed form.
pub fn x_start_closed(sys: &BarrierSystem, k: f64) -> Result<f64> {
    require_no_gap(sys)?;
    crate::scatter::WaveNumberPoint::new(sys, k)?;
    let (z, k0sq, dd) = (sys.kappa_sq(k), sys.kappa0_sq(), sys.width());
    let sd = basis::s(z, dd);
    let k2 = k * k;
    Ok(-2.0 * k0sq * (sd - k2 * basis::g(z, dd)) / (4.0 * k2 + k0sq * k0sq * sd * sd))
}

/// Asymptotic group time of a gap-free system from its single-barrier closed form.
pub fn tau_as_closed(sys: &BarrierSystem, k: f64) -> Result<f64> {
    require_no_gap(sys)?;
    crate::scatter::WaveNumberPoint::new(sys, k)?;
    let (z, k0sq, dd) = (sys.kappa_sq(k), sys.kappa0_sq(), sys.width());
    let sd = basis::s(z, dd);
    let sh = basis::s(z, 0.5 * dd);
    let k2 = k * k;
    let num = (k2 + k0sq * z * sh * sh) * (k2 * basis::sm(z, dd) + sd);
    Ok(4.0 * sys.mass / (sys.hbar * k) * num / (4.0 * k2 + k0sq * k0sq * sd * sd))
}

/// Transmission dwell time split by region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionDwell {
    pub tau1: f64,
    pub tau_gap: f64,
    pub tau2: f64,
    pub total: f64,
    /// Dwell time over [a1, x_c].
    pub left: f64,
    /// Dwell time over [x_c, b2].
    pub right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionDwell {
    pub tau1: f64,
    pub tau_gap: f64,
    pub total: f64,
}

/// Dwell time of the full stationary state, split by region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalDwell {
    pub tau1: f64,
    pub tau_gap: f64,
    pub tau2: f64,
    pub total: f64,
}

/// Transmission and reflection dwell times. The reflection part is `None`
/// when the reflection subensemble is empty (resonance).
pub fn dwell_times(sys: &BarrierSystem, k: f64) -> Result<(TransmissionDwell, Option<ReflectionDwell>)> {
    let two = compose_two_barrier(sys, k)?;
    Ok((transmission_dwell(sys, &two), reflection_dwell(sys, &two)))
}

fn dwell_pieces(sys: &BarrierSystem, two: &TwoBarrierParams) -> (f64, f64, f64, f64) {
    let one = &two.one;
    let k = one.k;
    let z = one.z;
    let d = sys.d;
    (k, z, basis::sm(z, 2.0 * d), d)
}

pub fn transmission_dwell(sys: &BarrierSystem, two: &TwoBarrierParams) -> TransmissionDwell {
    let (k, _z, sm2, d) = dwell_pieces(sys, two);
    let one = &two.one;
    let f = sys.mass / sys.hbar;
    let kl = k * sys.gap;
    let tau1 = f / (4.0 * k) * (4.0 * d + sys.kappa0_sq() * sm2);
    let tau_gap = f / (k * k)
        * (kl * (1.0 + one.r) / one.t
            + 4.0 * one.s_plus * (0.5 * kl).sin() * (one.j + 0.5 * kl).sin() / one.t.sqrt());
    let total = 2.0 * tau1 + tau_gap;
    let half = tau1 + 0.5 * tau_gap;
    TransmissionDwell { tau1, tau_gap, tau2: tau1, total, left: half, right: half }
}

/// |P|² in closed form.
fn big_p_sq(two: &TwoBarrierParams) -> f64 {
    let one = &two.one;
    (1.0 + one.r) / one.t - 2.0 * one.s_plus * two.chi.sin() / one.t.sqrt()
}

pub fn reflection_dwell(sys: &BarrierSystem, two: &TwoBarrierParams) -> Option<ReflectionDwell> {
    if two.r_two < RESONANCE_R_TWO {
        return None;
    }
    let (k, z, sm2, d) = dwell_pieces(sys, two);
    let f = sys.mass / sys.hbar;
    let kl = k * sys.gap;
    let (skl, ckl) = kl.sin_cos();
    let s = two.one.sinh_k;
    let pref = two.t_two * big_p_sq(two);
    let tau1 = f * pref / (2.0 * k)
        * (4.0 * d * (1.0 - ckl) + (sys.kappa0_sq() - (z - k * k) * ckl) * sm2 + 4.0 * k * skl * s * s);
    let tau_gap = f * pref / (k * k) * (kl - skl);
    Some(ReflectionDwell { tau1, tau_gap, total: tau1 + tau_gap })
}

/// Above this κd the closed form for τ_tot^(1) loses digits to cancelling e^{2κd} terms.
const OPAQUE_SWITCH: f64 = 1.0;

/// ∫|ψ|² over [x0, x0 + d] for ψ = A e^{κξ} + B e^{-κξ} matched to the field at x0.
fn decaying_barrier_norm(field: &StationaryField, kap: f64, x0: f64, d: f64) -> f64 {
    let (v, s) = field.value_and_slope(x0);
    let a = 0.5 * (v + s / kap);
    let b = 0.5 * (v - s / kap);
    let two_kd = 2.0 * kap * d;
    a.norm_sqr() * two_kd.exp_m1() / (2.0 * kap)
        - b.norm_sqr() * (-two_kd).exp_m1() / (2.0 * kap)
        + 2.0 * (a * b.conj()).re * d
}

/// Dwell time of Ψ_tot over [a1, b2], split by region.
pub fn buttiker_dwell(sys: &BarrierSystem, k: f64) -> Result<TotalDwell> {
    let two = compose_two_barrier(sys, k)?;
    Ok(total_dwell(sys, &two))
}

pub fn total_dwell(sys: &BarrierSystem, two: &TwoBarrierParams) -> TotalDwell {
    let (k, z, sm2, d) = dwell_pieces(sys, two);
    let one = &two.one;
    let f = sys.mass / sys.hbar;
    let field = StationaryField::new(sys, two);
    let b: Complex64 = field.b_out;
    let s = one.sinh_k;
    let tau1 = if z > 0.0 && z.sqrt() * d > OPAQUE_SWITCH {
        f / k * decaying_barrier_norm(&field, z.sqrt(), sys.a1, d)
    } else {
        f / (4.0 * k)
            * ((1.0 + two.r_two) * (4.0 * d + sys.kappa0_sq() * sm2)
                + 2.0 * b.re * (4.0 * d + (z - k * k) * sm2)
                + 8.0 * k * b.im * s * s)
    };
    let kl = k * sys.gap;
    let tau_gap = f * two.t_two / (k * k)
        * (kl * (1.0 + one.r) / one.t + 2.0 * one.s_plus * two.chi.sin() * kl.sin() / one.t.sqrt());
    let tau2 = transmission_dwell(sys, two).tau1 * two.t_two;
    TotalDwell { tau1, tau_gap, tau2, total: tau1 + tau_gap + tau2 }
}

/// Every stationary time at one k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeReport {
    pub k: f64,
    pub t_two: f64,
    pub tau_ph: f64,
    pub tau_as: f64,
    pub t_dep: f64,
    pub x_start: f64,
    pub dwell_tr: TransmissionDwell,
    pub dwell_ref: Option<ReflectionDwell>,
    pub dwell_tot: TotalDwell,
    pub tau_free: f64,
    pub tau0: f64,
    pub near_resonance: bool,
}

impl TimeReport {
    pub fn new(sys: &BarrierSystem, k: f64) -> Result<Self> {
        let two = compose_two_barrier(sys, k)?;
        let der = derivatives_from(&two);
        let g = group_times_from(sys, k, &der);
        Ok(Self {
            k,
            t_two: two.t_two,
            tau_ph: g.tau_ph,
            tau_as: g.tau_as,
            t_dep: g.t_dep,
            x_start: g.x_start,
            dwell_tr: transmission_dwell(sys, &two),
            dwell_ref: reflection_dwell(sys, &two),
            dwell_tot: total_dwell(sys, &two),
            tau_free: sys.tau_free(k),
            tau0: sys.tau0(),
            near_resonance: g.near_resonance,
        })
    }
}

/// Opaque-barrier asymptotes next to the exact values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpaqueLimit {
    pub tau1_tr: f64,
    pub tau1_tr_exact: f64,
    pub tau_gap_tr: f64,
    pub tau_gap_tr_exact: f64,
    pub tau_ref: f64,
    pub tau_ref_exact: Option<f64>,
}

impl OpaqueLimit {
    pub fn tau1_tr_ratio(&self) -> f64 {
        self.tau1_tr_exact / self.tau1_tr
    }

    pub fn tau_gap_tr_ratio(&self) -> f64 {
        self.tau_gap_tr_exact / self.tau_gap_tr
    }

    pub fn tau_ref_ratio(&self) -> Option<f64> {
        self.tau_ref_exact.map(|e| e / self.tau_ref)
    }
}

/// Leading large-κd behaviour of the dwell times (E < V0 only).
pub fn opaque_limit_report(sys: &BarrierSystem, k: f64) -> Result<OpaqueLimit> {
    let two = compose_two_barrier(sys, k)?;
    let z = two.one.z;
    if z <= 0.0 {
        return Err(Error::Domain("opaque-barrier asymptotes need E < V0".into()));
    }
    let kap = z.sqrt();
    let k0sq = sys.kappa0_sq();
    let f = sys.mass / sys.hbar;
    let kl = k * sys.gap;
    let grow = (2.0 * kap * sys.d).exp();
    let theta_p = 0.5 * (k / kap + kap / k);
    let theta_m = 0.5 * (k / kap - kap / k);
    let j_inf = theta_m.atan();
    let chi_inf = j_inf + kl;

    let tau1_tr = f * k0sq * grow / (8.0 * k * kap.powi(3));
    let tau_gap_tr = f * theta_p * theta_p / (2.0 * k * k)
        * (kl + 2.0 * (0.5 * kl).sin() * (j_inf + 0.5 * kl).sin())
        * grow;
    let tau_ref = f / (2.0 * k * kap.powi(3) * theta_p * theta_p * (1.0 + chi_inf.sin()))
        * (k0sq - (z - k * k) * kl.cos() + 2.0 * k * kap * kl.sin());

    let tr = transmission_dwell(sys, &two);
    Ok(OpaqueLimit {
        tau1_tr,
        tau1_tr_exact: tr.tau1,
        tau_gap_tr,
        tau_gap_tr_exact: tr.tau_gap,
        tau_ref,
        tau_ref_exact: reflection_dwell(sys, &two).map(|r| r.total),
    })
}
