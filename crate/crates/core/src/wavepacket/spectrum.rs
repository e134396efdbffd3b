use std::f64::consts::PI;

use serde::Serialize;

use crate::chartimes::derivatives_from;
use crate::error::{Error, Result};
use crate::scatter::compose_two_barrier;
use crate::units::BarrierSystem;

/// Lowest admissible wavenumber on a clipped grid.
pub const K_EPSILON: f64 = 1e-9;

/// Default lower bound on l0·k̄.
pub const DEFAULT_MIN_L0_KBAR: f64 = 5.0;

/// Spectral half-width of the grid in units of 1/l0.
pub const HALF_WIDTH: f64 = 8.0;

/// Gaussian momentum amplitude 𝒜(k) = (2l0²/π)^{1/4} exp[−l0²(k−k̄)²]
/// sampled on a uniform grid with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSpectrum {
    pub l0: f64,
    pub kbar: f64,
    pub dk: f64,
    pub k: Vec<f64>,
    /// 𝒜(k_j), renormalised so that Σ w_j 𝒜_j² = 1.
    pub amp: Vec<f64>,
    /// Trapezoid weights.
    pub weight: Vec<f64>,
    /// Probability mass of the unclipped Gaussian lying below the grid.
    pub clipped_mass: f64,
}

impl GaussianSpectrum {
    /// Grid over [max(ε, k̄ − 8/l0), ≥ k̄ + 8/l0] with spacing `dk`.
    pub fn with_spacing(l0: f64, kbar: f64, dk: f64, min_l0_kbar: f64) -> Result<Self> {
        if !(l0 > 0.0 && kbar > 0.0 && l0.is_finite() && kbar.is_finite()) {
            return Err(Error::Domain(format!("need l0 > 0 and kbar > 0, got l0 = {l0}, kbar = {kbar}")));
        }
        if l0 * kbar < min_l0_kbar {
            return Err(Error::Domain(format!(
                "l0·kbar = {:.4} is below {min_l0_kbar}; the spectrum would reach k ≤ 0",
                l0 * kbar
            )));
        }
        if !(dk > 0.0) {
            return Err(Error::Domain(format!("k spacing must be positive, got {dk}")));
        }
        let k_lo = (kbar - HALF_WIDTH / l0).max(K_EPSILON);
        let k_hi = kbar + HALF_WIDTH / l0;
        let n = ((k_hi - k_lo) / dk).ceil() as usize + 1;
        let norm = (2.0 * l0 * l0 / PI).powf(0.25);
        let k: Vec<f64> = (0..n).map(|j| k_lo + j as f64 * dk).collect();
        let mut amp: Vec<f64> = k.iter().map(|&kk| norm * (-(l0 * (kk - kbar)).powi(2)).exp()).collect();
        let mut weight = vec![dk; n];
        weight[0] *= 0.5;
        weight[n - 1] *= 0.5;
        let mass: f64 = amp.iter().zip(&weight).map(|(a, w)| a * a * w).sum();
        let scale = 1.0 / mass.sqrt();
        amp.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { l0, kbar, dk, k, amp, weight, clipped_mass: (1.0 - mass).max(0.0) })
    }

    /// Grid with `n` points.
    pub fn with_points(l0: f64, kbar: f64, n: usize, min_l0_kbar: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("spectrum needs at least two points".into()));
        }
        let k_lo = (kbar - HALF_WIDTH / l0).max(K_EPSILON);
        let k_hi = kbar + HALF_WIDTH / l0;
        Self::with_spacing(l0, kbar, (k_hi - k_lo) / (n - 1) as f64 * (1.0 - 1e-12), min_l0_kbar)
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k_lo(&self) -> f64 {
        self.k[0]
    }

    pub fn k_hi(&self) -> f64 {
        self.k[self.k.len() - 1]
    }

    /// Σ w 𝒜² f(k).
    pub fn average(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        self.k.iter().enumerate().map(|(j, &k)| self.weight[j] * self.amp[j] * self.amp[j] * f(j, k)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.average(|_, _| 1.0)
    }

    pub fn mean_k(&self) -> f64 {
        self.average(|_, k| k)
    }
}

/// 2048-point spectrum with the default l0·k̄ bound.
pub fn build_spectrum(l0: f64, kbar: f64) -> Result<GaussianSpectrum> {
    GaussianSpectrum::with_points(l0, kbar, 2048, DEFAULT_MIN_L0_KBAR)
}

/// Spectral (stationary-phase) group times of the subprocess packets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralTimes {
    /// Asymptotic transmission norm Σ T_two|𝒜|².
    pub norm_t: f64,
    /// Asymptotic reflection norm Σ R_two|𝒜|².
    pub norm_r: f64,
    pub kbar_tr: f64,
    pub kbar_ref: f64,
    /// T_two-weighted λ′.
    pub lambda_p_tr: f64,
    pub lambda_p_ref: f64,
    /// T_two-weighted J_two′.
    pub j_two_p_tr: f64,
    pub j_two_p_ref: f64,
    pub x_start_tr: f64,
    pub x_start_ref: f64,
    pub tau_as_tr: f64,
    pub tau_as_ref: f64,
    pub t_dep_tr: f64,
    pub t_dep_ref: f64,
    /// Distance beyond b2 used for the arrival time.
    pub delta_x: f64,
    pub t_arr_tr: f64,
}

/// Weighted spectral averages of λ′ and J_two′.
pub fn asymptotic_group_times_packet(
    spec: &GaussianSpectrum,
    sys: &BarrierSystem,
    delta_x: f64,
) -> Result<SpectralTimes> {
    let n = spec.len();
    let mut tw = Vec::with_capacity(n);
    let mut lp = Vec::with_capacity(n);
    let mut jp = Vec::with_capacity(n);
    for &k in &spec.k {
        let two = compose_two_barrier(sys, k)?;
        let der = derivatives_from(&two);
        tw.push(two.t_two);
        lp.push(der.lambda_p);
        jp.push(der.j_two_p);
    }
    let norm_t = spec.average(|j, _| tw[j]);
    let norm_r = spec.average(|j, _| 1.0 - tw[j]);
    if norm_t < 1e-12 || norm_r < 1e-12 {
        return Err(Error::Domain(format!(
            "subensemble is empty: transmission norm {norm_t:e}, reflection norm {norm_r:e}"
        )));
    }
    let avg_t = |f: &dyn Fn(usize, f64) -> f64| spec.average(|j, k| tw[j] * f(j, k)) / norm_t;
    let avg_r = |f: &dyn Fn(usize, f64) -> f64| spec.average(|j, k| (1.0 - tw[j]) * f(j, k)) / norm_r;
    let kbar_tr = avg_t(&|_, k| k);
    let kbar_ref = avg_r(&|_, k| k);
    let lambda_p_tr = avg_t(&|j, _| lp[j]);
    let lambda_p_ref = avg_r(&|j, _| lp[j]);
    let j_two_p_tr = avg_t(&|j, _| jp[j]);
    let j_two_p_ref = avg_r(&|j, _| jp[j]);
    let v_tr = sys.velocity(kbar_tr);
    let v_ref = sys.velocity(kbar_ref);
    Ok(SpectralTimes {
        norm_t,
        norm_r,
        kbar_tr,
        kbar_ref,
        lambda_p_tr,
        lambda_p_ref,
        j_two_p_tr,
        j_two_p_ref,
        x_start_tr: -lambda_p_tr,
        x_start_ref: -lambda_p_ref,
        tau_as_tr: (j_two_p_tr - lambda_p_tr) / v_tr,
        tau_as_ref: (j_two_p_ref - lambda_p_ref) / v_ref,
        t_dep_tr: lambda_p_tr / v_tr,
        t_dep_ref: lambda_p_ref / v_ref,
        delta_x,
        t_arr_tr: (sys.a1 + delta_x + j_two_p_tr) / v_tr,
    })
}
