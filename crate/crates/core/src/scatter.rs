//! Stationary scattering on the symmetric double rectangular barrier.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::basis;
use crate::error::{Error, Result};
use crate::units::BarrierSystem;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A wavenumber together with the derived energy and decay constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveNumberPoint {
    pub k: f64,
    pub energy: f64,
    /// √(κ0² − k²): real below the barrier top, imaginary above it.
    pub kappa: Complex64,
    /// √(2m|V0|)/ħ.
    pub kappa0: f64,
}

impl WaveNumberPoint {
    pub fn new(sys: &BarrierSystem, k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            k,
            energy: sys.energy(k),
            kappa: Complex64::new(sys.kappa_sq(k), 0.0).sqrt(),
            kappa0: sys.kappa0_abs(),
        })
    }
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("wavenumber must be positive and finite, got {k}")))
    }
}

/// Wraps `phase` by a multiple of 2π so that it lies within π of `near`.
fn unwrap_near(phase: f64, near: f64) -> f64 {
    phase + TAU * ((near - phase) / TAU).round()
}

/// Scattering parameters of one rectangular barrier at fixed k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneBarrierParams {
    pub k: f64,
    /// Barrier width.
    pub width: f64,
    /// κ² = κ0² − k².
    pub z: f64,
    pub t: f64,
    pub r: f64,
    /// Transmission phase, continuous in k.
    pub j: f64,
    /// Branch representative: π when cosh(κd) < 0, else 0.
    pub j0: f64,
    /// 0 when η = +1, π when η = −1.
    pub f: f64,
    pub eta: f64,
    /// (k/κ + κ/k)/2; infinite at κ = 0.
    pub theta_plus: Complex64,
    /// (k/κ − κ/k)/2; infinite at κ = 0.
    pub theta_minus: Complex64,
    /// θ₊ sinh(κd), always real. Equals η√(R/T).
    pub s_plus: f64,
    /// θ₋ sinh(κd), always real.
    pub s_minus: f64,
    /// sinh(κd)/κ.
    pub sinh_k: f64,
    /// cosh(κd).
    pub cosh_k: f64,
}

impl OneBarrierParams {
    /// Parameters of a rectangular barrier of the system's height and the given width.
    pub fn rectangular(sys: &BarrierSystem, width: f64, k: f64) -> Result<Self> {
        check_k(k)?;
        if !(width >= 0.0) {
            return Err(Error::Domain(format!("barrier width must be non-negative, got {width}")));
        }
        let z = sys.kappa_sq(k);
        let sk = basis::s(z, width);
        let ck = basis::c(z, width);
        let s_plus = (k * k + z) * sk / (2.0 * k);
        let s_minus = (k * k - z) * sk / (2.0 * k);
        let t = 1.0 / (1.0 + s_plus * s_plus);
        let r = s_plus * s_plus * t;

        let turns = if z < 0.0 { (-z).sqrt() * width } else { 0.0 };
        let j = unwrap_near(s_minus.atan2(ck), turns);
        let j0 = if ck < 0.0 { PI } else { 0.0 };
        let eta = if s_plus > 0.0 { 1.0 } else { -1.0 };
        let f = if eta > 0.0 { 0.0 } else { PI };

        let kappa = Complex64::new(z, 0.0).sqrt();
        let (theta_plus, theta_minus) = if z == 0.0 {
            let inf = Complex64::new(f64::INFINITY, 0.0);
            (inf, -inf)
        } else {
            (0.5 * (k / kappa + kappa / k), 0.5 * (k / kappa - kappa / k))
        };

        Ok(Self {
            k,
            width,
            z,
            t,
            r,
            j,
            j0,
            f,
            eta,
            theta_plus,
            theta_minus,
            s_plus,
            s_minus,
            sinh_k: sk,
            cosh_k: ck,
        })
    }

    /// The transfer matrix in the barrier's own frame.
    pub fn reduced_matrix(&self) -> TransferMatrix {
        TransferMatrix {
            q: Complex64::from_polar(1.0 / self.t.sqrt(), -self.j),
            p: Complex64::new(self.s_plus, 0.0),
        }
    }
}

/// One-barrier parameters for a single barrier of the system.
pub fn one_barrier_params(sys: &BarrierSystem, k: f64) -> Result<OneBarrierParams> {
    OneBarrierParams::rectangular(sys, sys.d, k)
}

/// Maps right-side plane-wave amplitudes to left-side ones:
/// (A_l, B_l) = Y (A_r, B_r) with Y = [[q, p], [p*, q*]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub q: Complex64,
    pub p: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        Self { q: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 0.0) }
    }

    /// Matrix of a symmetric barrier occupying [a, b].
    pub fn positioned(params: &OneBarrierParams, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::Domain(format!("barrier interval [{a}, {b}] is empty")));
        }
        let k = params.k;
        Ok(Self {
            q: Complex64::from_polar(1.0 / params.t.sqrt(), k * (b - a) - params.j),
            p: I * params.s_plus * Complex64::from_polar(1.0, -k * (b + a)),
        })
    }

    /// Matrix of `self` followed on the right by `right`.
    pub fn chain(&self, right: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            q: self.q * right.q + self.p * right.p.conj(),
            p: self.q * right.p + self.p * right.q.conj(),
        }
    }

    /// |q|² − |p|² − 1, zero for a flux-conserving matrix.
    pub fn flux_defect(&self) -> f64 {
        self.q.norm_sqr() - self.p.norm_sqr() - 1.0
    }

    pub fn transmission(&self) -> f64 {
        1.0 / self.q.norm_sqr()
    }

    /// Transmitted amplitude for unit incidence from the left.
    pub fn t_amplitude(&self) -> Complex64 {
        self.q.inv()
    }

    /// Reflected amplitude for unit incidence from the left.
    pub fn r_amplitude(&self) -> Complex64 {
        self.p.conj() / self.q
    }
}

/// Transfer matrix of a barrier on [a, b].
pub fn transfer_matrix(params: &OneBarrierParams, a: f64, b: f64) -> Result<TransferMatrix> {
    TransferMatrix::positioned(params, a, b)
}

/// Scattering parameters of the two-barrier system at fixed k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBarrierParams {
    pub one: OneBarrierParams,
    pub gap: f64,
    /// χ = J + kL.
    pub chi: f64,
    pub t_two: f64,
    pub r_two: f64,
    /// Continuous in k.
    pub j_two: f64,
    pub f_two: f64,
    /// 0 when cos χ ≥ 0, else π.
    pub f_two0: f64,
    pub eta_two: f64,
    /// η_two √R_two, signed square root of the reflection coefficient.
    pub rho: f64,
}

impl TwoBarrierParams {
    pub fn k(&self) -> f64 {
        self.one.k
    }

    /// cos χ, zero at a resonance.
    pub fn cos_chi(&self) -> f64 {
        self.chi.cos()
    }
}

pub fn compose_two_barrier(sys: &BarrierSystem, k: f64) -> Result<TwoBarrierParams> {
    let one = one_barrier_params(sys, k)?;
    Ok(compose_from(&one, sys.gap))
}

pub(crate) fn compose_from(one: &OneBarrierParams, gap: f64) -> TwoBarrierParams {
    let (t, r, s) = (one.t, one.r, one.s_plus);
    let chi = one.j + one.k * gap;
    let (sin_chi, cos_chi) = chi.sin_cos();
    let t_two = t / (t + 4.0 * s * s * cos_chi * cos_chi);
    let r_two = 4.0 * s * s * cos_chi * cos_chi / (t + 4.0 * s * s * cos_chi * cos_chi);
    let a = t / (1.0 + r);
    let j_two = one.j + unwrap_near((a * sin_chi).atan2(cos_chi), chi);
    let f_two0 = if cos_chi >= 0.0 { 0.0 } else { PI };
    let f_two = (one.f + f_two0) % TAU;
    let eta_two = if cos_chi >= 0.0 { one.eta } else { -one.eta };
    let rho = 2.0 * s * cos_chi * (t_two / t).sqrt();
    TwoBarrierParams { one: *one, gap, chi, t_two, r_two, j_two, f_two, f_two0, eta_two, rho }
}

/// Coefficients of the stationary state with unit incidence from the left.
///
/// Regions, with D = b2 − a1 and x_c the midpoint:
///
/// ```text
/// x ≤ a1       e^{ikx} + B_out e^{ik(2a1−x)}
/// [a1, b1]     A1 sinh(κ(x−a1))/κ + B1 cosh(κ(x−a1))
/// [b1, a2]     Agap sin(k(x−x_c)) + Bgap cos(k(x−x_c))
/// [a2, b2]     A2 sinh(κ(x−b2))/κ + B2 cosh(κ(x−b2))
/// x ≥ b2       A_out e^{ik(x−D)}
/// ```
///
/// The under-barrier sine coefficients multiply sinh(κu)/κ rather than
/// sinh(κu), which keeps them finite and real-analytic through E = V0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryField {
    pub sys: BarrierSystem,
    pub k: f64,
    pub z: f64,
    pub b_out: Complex64,
    pub a_out: Complex64,
    pub a1: Complex64,
    pub b1: Complex64,
    pub a_gap: Complex64,
    pub b_gap: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
    pub big_q: Complex64,
    pub big_p: Complex64,
}

/// Which of the five regions a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Left,
    Barrier1,
    Gap,
    Barrier2,
    Right,
}

impl BarrierSystem {
    pub fn region(&self, x: f64) -> Region {
        if x <= self.a1 {
            Region::Left
        } else if x <= self.b1() {
            Region::Barrier1
        } else if x <= self.a2() {
            Region::Gap
        } else if x <= self.b2() {
            Region::Barrier2
        } else {
            Region::Right
        }
    }
}

/// Q and P from the reduced one-barrier matrix and the gap.
pub(crate) fn big_q_p(one: &OneBarrierParams, gap: f64) -> (Complex64, Complex64) {
    let m = one.reduced_matrix();
    let half = Complex64::from_polar(1.0, one.k * gap / 2.0);
    let qs = m.q.conj() * half;
    let p = m.p * half.conj();
    (qs + I * p, I * qs + p)
}

impl StationaryField {
    pub fn new(sys: &BarrierSystem, two: &TwoBarrierParams) -> Self {
        let k = two.k();
        let z = two.one.z;
        let phase = Complex64::from_polar(1.0, two.j_two);
        let a_out = two.t_two.sqrt() * phase;
        let b_out = -I * two.rho * phase;
        let (big_q, big_p) = big_q_p(&two.one, sys.gap);
        let e1 = Complex64::from_polar(1.0, k * sys.a1);
        Self {
            sys: *sys,
            k,
            z,
            b_out,
            a_out,
            a1: I * k * (1.0 - b_out) * e1,
            b1: (1.0 + b_out) * e1,
            a_gap: -a_out * big_p.conj() * e1,
            b_gap: a_out * big_q.conj() * e1,
            a2: I * k * a_out * e1,
            b2: a_out * e1,
            big_q,
            big_p,
        }
    }

    /// A_out and B_out recomputed from Q and P alone.
    pub fn outgoing_from_q_p(&self) -> (Complex64, Complex64) {
        let q = self.big_q / self.big_q.conj();
        let p = self.big_p / self.big_p.conj();
        (0.5 * (q - p), -0.5 * (q + p))
    }

    /// Ψ_tot(x) and ∂Ψ_tot/∂x.
    pub fn value_and_slope(&self, x: f64) -> (Complex64, Complex64) {
        let sys = &self.sys;
        let k = self.k;
        let z = self.z;
        match sys.region(x) {
            Region::Left => {
                let inc = Complex64::from_polar(1.0, k * x);
                let refl = self.b_out * Complex64::from_polar(1.0, k * (2.0 * sys.a1 - x));
                (inc + refl, I * k * (inc - refl))
            }
            Region::Barrier1 => under_barrier(self.a1, self.b1, z, x - sys.a1),
            Region::Gap => {
                let (sn, cs) = (k * (x - sys.x_c())).sin_cos();
                (self.a_gap * sn + self.b_gap * cs, k * (self.a_gap * cs - self.b_gap * sn))
            }
            Region::Barrier2 => under_barrier(self.a2, self.b2, z, x - sys.b2()),
            Region::Right => {
                let v = self.a_out * Complex64::from_polar(1.0, k * (x - sys.width()));
                (v, I * k * v)
            }
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.value_and_slope(x).0
    }

    /// Probability current (ħ/m) Im(ψ*ψ').
    pub fn current(&self, x: f64) -> f64 {
        let (v, dv) = self.value_and_slope(x);
        current_density(&self.sys, v, dv)
    }
}

/// ψ = a·sinh(κu)/κ + b·cosh(κu) and its slope.
pub(crate) fn under_barrier(a: Complex64, b: Complex64, z: f64, u: f64) -> (Complex64, Complex64) {
    let s = basis::s(z, u);
    let c = basis::c(z, u);
    (a * s + b * c, a * c + b * (z * s))
}

pub(crate) fn current_density(sys: &BarrierSystem, v: Complex64, dv: Complex64) -> f64 {
    sys.hbar / sys.mass * (v.conj() * dv).im
}

pub fn total_field(sys: &BarrierSystem, k: f64) -> Result<StationaryField> {
    let two = compose_two_barrier(sys, k)?;
    Ok(StationaryField::new(sys, &two))
}

/// Ψ_tot at `x`.
pub fn eval_total(field: &StationaryField, x: f64) -> Complex64 {
    field.eval(x)
}

/// The two-barrier transfer matrix Y1·Y2 in absolute coordinates.
pub fn two_barrier_matrix(sys: &BarrierSystem, k: f64) -> Result<TransferMatrix> {
    let one = one_barrier_params(sys, k)?;
    let y1 = TransferMatrix::positioned(&one, sys.a1, sys.b1())?;
    let y2 = TransferMatrix::positioned(&one, sys.a2(), sys.b2())?;
    Ok(y1.chain(&y2))
}

/// All k in [k_lo, k_hi] where T_two = 1: the roots of cos(J + kL), plus the
/// points above the barrier where each barrier alone is transparent
/// (κ² = −(mπ/d)²), sorted ascending.
pub fn find_resonances(sys: &BarrierSystem, k_lo: f64, k_hi: f64) -> Result<Vec<f64>> {
    check_k(k_lo)?;
    if !(k_hi > k_lo) || !k_hi.is_finite() {
        return Err(Error::Domain(format!("empty k range [{k_lo}, {k_hi}]")));
    }
    let scale = sys.kappa0_abs().max(1.0 / sys.d);
    let n = ((2000.0 * (k_hi - k_lo) / scale).ceil() as usize).max(2000);
    let g = |k: f64| -> Result<f64> { Ok(compose_two_barrier(sys, k)?.cos_chi()) };

    let mut roots = Vec::new();
    let mut k_prev = k_lo;
    let mut g_prev = g(k_prev)?;
    for i in 1..=n {
        let k = k_lo + (k_hi - k_lo) * i as f64 / n as f64;
        let gk = g(k)?;
        if g_prev == 0.0 {
            roots.push(k_prev);
        } else if g_prev * gk < 0.0 {
            roots.push(bisect(&g, k_prev, k, g_prev)?);
        }
        k_prev = k;
        g_prev = gk;
    }
    if g_prev == 0.0 {
        roots.push(k_prev);
    }
    let step = PI / sys.d;
    for m in 1.. {
        let k_sq = sys.kappa0_sq() + (m as f64 * step).powi(2);
        let k = k_sq.max(0.0).sqrt();
        if k > k_hi {
            break;
        }
        if k >= k_lo && k > 0.0 {
            roots.push(k);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    for &k in &roots {
        let t2 = compose_two_barrier(sys, k)?.t_two;
        if t2 < 1.0 - 1e-10 {
            return Err(Error::Numerical(format!("resonance at k = {k} has T_two = {t2}")));
        }
    }
    Ok(roots)
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid {
            return Ok(mid);
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm * g_lo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = gm;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> BarrierSystem {
        BarrierSystem::reduced(1.0, 1.3, 0.7, 2.0).unwrap()
    }

    #[test]
    fn transparent_for_zero_width() {
        let p = OneBarrierParams::rectangular(&sys(), 0.0, 0.4).unwrap();
        assert_eq!(p.t, 1.0);
        assert_eq!(p.r, 0.0);
        assert_eq!(p.j, 0.0);
    }

    #[test]
    fn theta_plus_one_case() {
        // k = κ0/√2 gives θ₊ = 1, θ₋ = 0.
        let s = sys();
        let k = 1.0 / 2f64.sqrt();
        let p = one_barrier_params(&s, k).unwrap();
        let kd = k * s.d;
        assert!((p.t - 1.0 / (1.0 + kd.sinh().powi(2))).abs() < 1e-14);
        assert!(p.j.abs() < 1e-15);
        assert!((p.theta_plus.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn flux_form_and_product() {
        let s = sys();
        for &k in &[0.2, 0.7, 0.99, 1.0, 1.01, 1.8, 3.0] {
            let m = two_barrier_matrix(&s, k).unwrap();
            assert!(m.flux_defect().abs() < 1e-12);
            let two = compose_two_barrier(&s, k).unwrap();
            assert!((m.transmission() - two.t_two).abs() < 1e-12);
            let f = total_field(&s, k).unwrap();
            // t = A_out e^{−ikD}, r = B_out e^{2ika1}
            let t = f.a_out * Complex64::from_polar(1.0, -k * s.width());
            let r = f.b_out * Complex64::from_polar(1.0, 2.0 * k * s.a1);
            assert!((m.t_amplitude() - t).norm() < 1e-12, "k={k}");
            assert!((m.r_amplitude() - r).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn continuity_at_edges() {
        let s = sys();
        let f = total_field(&s, 0.6).unwrap();
        for x in [s.a1, s.b1(), s.a2(), s.b2()] {
            let eps = 1e-9;
            let (l, dl) = f.value_and_slope(x);
            let (r, dr) = f.value_and_slope(x + eps);
            assert!((l - r).norm() < 1e-8);
            assert!((dl - dr).norm() < 1e-8);
        }
        assert!((f.eval(s.a1) - f.b1).norm() < 1e-15);
        assert!((f.eval(s.b2()) - f.b2).norm() < 1e-15);
    }

    #[test]
    fn high_energy_transparency() {
        let s = sys();
        let k = 200.0;
        let p = one_barrier_params(&s, k).unwrap();
        assert!(p.r < 1e-9);
        let dj = unwrap_near(p.j - k * s.d, 0.0);
        assert!(dj.abs() < s.d * s.kappa0_sq() / k);
    }

    #[test]
    fn rejects_nonpositive_k() {
        assert!(one_barrier_params(&sys(), 0.0).is_err());
        assert!(one_barrier_params(&sys(), -1.0).is_err());
    }
}
