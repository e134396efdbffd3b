//! Packet synthesis from exact stationary states.
//!
//! Outside [a1, b2] every stationary state is a combination of e^{±ikx}, so on
//! a uniform x grid with dk·dx = 2π/N the k-sums are discrete Fourier
//! transforms. Inside [a1, b2] the sums are taken directly at Gauss–Legendre
//! nodes. x grid nodes fall exactly on a1 and b2.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::swf::{SwfState, Which};
use crate::units::BarrierSystem;

use super::spectrum::{GaussianSpectrum, HALF_WIDTH};

/// Largest k·dx on the outer grid.
const OUTER_K_DX: f64 = 0.1;
/// Largest k·h (and κ·h) on an inner Gauss–Legendre panel.
const INNER_K_H: f64 = 2.0;
const GL_ORDER: usize = 16;
/// Relative norm drift that marks a run as under-resolved.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

/// Settings for a packet run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketConfig {
    pub l0: f64,
    pub kbar: f64,
    /// Earliest and latest time the window must accommodate.
    pub t_min: f64,
    pub t_max: f64,
    /// Lower bound on l0·k̄ accepted by the spectrum.
    pub min_l0_kbar: f64,
    /// Target number of k points; the actual count follows from the FFT size.
    pub k_points: usize,
}

impl PacketConfig {
    pub fn new(l0: f64, kbar: f64, t_min: f64, t_max: f64) -> Self {
        Self { l0, kbar, t_min, t_max, min_l0_kbar: super::spectrum::DEFAULT_MIN_L0_KBAR, k_points: 2048 }
    }
}

/// Integrals over the whole window at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub norm_tot: f64,
    pub norm_t: f64,
    pub norm_r: f64,
    pub xbar_tot: f64,
    pub xbar_tr: f64,
    pub xbar_ref: f64,
    /// Second moments ⟨x²⟩.
    pub x2_tot: f64,
    pub x2_tr: f64,
    pub x2_ref: f64,
    /// Current of ψ_tr just left and just right of x_c.
    pub j_tr_left: f64,
    pub j_tr_right: f64,
}

impl Snapshot {
    /// d𝐓/dt implied by the currents at x_c.
    pub fn flow_imbalance(&self) -> f64 {
        self.j_tr_right - self.j_tr_left
    }

    pub fn width_tr(&self) -> f64 {
        (self.x2_tr - self.xbar_tr * self.xbar_tr).max(0.0).sqrt()
    }

    pub fn width_tot(&self) -> f64 {
        (self.x2_tot - self.xbar_tot * self.xbar_tot).max(0.0).sqrt()
    }
}

/// Sampled packets at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketState {
    pub t: f64,
    pub x_grid: Vec<f64>,
    pub psi_tot: Vec<Complex64>,
    pub psi_tr: Vec<Complex64>,
    pub psi_ref: Vec<Complex64>,
    pub norm_t: f64,
    pub norm_r: f64,
}

impl PacketState {
    pub fn field(&self, which: Which) -> &[Complex64] {
        match which {
            Which::Tot => &self.psi_tot,
            Which::Tr => &self.psi_tr,
            Which::Ref => &self.psi_ref,
        }
    }
}

pub struct PacketEngine {
    pub sys: BarrierSystem,
    pub spec: GaussianSpectrum,
    pub states: Vec<SwfState>,
    dx: f64,
    x0: f64,
    n_fft: usize,
    /// Last left-region node (x = a1) and first right-region node (x = b2).
    n_a: usize,
    n_b: usize,
    n_end: usize,
    simpson_left: Vec<f64>,
    simpson_right: Vec<f64>,
    inner_x: Vec<f64>,
    inner_w: Vec<f64>,
    /// Row-major [node][k].
    inner_tot: Vec<Complex64>,
    inner_ref: Vec<Complex64>,
    c0: Vec<Complex64>,
    omega: Vec<f64>,
    a_in_ref: Vec<Complex64>,
    reflect: Vec<Complex64>,
    transmit: Vec<Complex64>,
    xc_value: Vec<Complex64>,
    xc_slope_left: Vec<Complex64>,
    xc_slope_right: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

/// Smallest 2^a·3^b·5^c ≥ n.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Composite Simpson weights on n+1 equispaced nodes; Simpson's 3/8 closes an
/// odd interval count.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if n == 0 {
        return w;
    }
    if n == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let simpson_end = if n % 2 == 0 { n } else { n - 3 };
    let mut i = 0;
    while i < simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end < n {
        let s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

impl PacketEngine {
    pub fn new(sys: &BarrierSystem, cfg: &PacketConfig) -> Result<Self> {
        if !(cfg.t_max >= cfg.t_min) {
            return Err(Error::Domain(format!("time range [{}, {}] is empty", cfg.t_min, cfg.t_max)));
        }
        let l0 = cfg.l0;
        let dd = sys.width();
        let k_top = cfg.kbar + HALF_WIDTH / l0;
        let kap_top = sys.kappa0_abs();

        // Outer grid spacing, commensurate with D so that a1 and b2 are nodes.
        let m_d = ((dd * k_top / OUTER_K_DX).ceil() as usize).max(2);
        let dx = dd / m_d as f64;

        // Window: every k component with non-negligible weight stays inside.
        let v_top = sys.velocity(cfg.kbar + 4.5 / l0);
        let reach = v_top * cfg.t_max.abs().max(cfg.t_min.abs());
        let margin = 12.0 * l0;
        let x_min = (2.0 * sys.a1 - v_top * cfg.t_max).min(v_top * cfg.t_min).min(0.0) - margin;
        let x_max = (v_top * cfg.t_max + dd).max(sys.b2()) + margin;
        let n_a = ((sys.a1 - x_min) / dx).ceil() as usize;
        let n_b = n_a + m_d;
        let n_end = n_b + ((x_max - sys.b2()) / dx).ceil() as usize;
        let x0 = sys.a1 - n_a as f64 * dx;

        // Period 2π/dk must exceed the window plus the spread of the free sums.
        let period = (x_max - x_min) + 2.0 * reach + 2.0 * margin;
        let target_n = ((period / dx).ceil() as usize).max(n_end + 1);
        let span = k_top - (cfg.kbar - HALF_WIDTH / l0).max(super::spectrum::K_EPSILON);
        let for_k_points = (cfg.k_points as f64 * 2.0 * PI / (span * dx)).ceil() as usize;
        let n_fft = smooth_size(target_n.max(for_k_points));
        let dk = 2.0 * PI / (n_fft as f64 * dx);
        let spec = GaussianSpectrum::with_spacing(l0, cfg.kbar, dk, cfg.min_l0_kbar)?;
        if spec.len() > n_fft {
            return Err(Error::Numerical("k grid longer than the FFT size".into()));
        }

        let states = spec.k.iter().map(|&k| SwfState::new(sys, k)).collect::<Result<Vec<_>>>()?;

        let norm = 1.0 / (2.0 * PI).sqrt();
        let c0 = (0..spec.len()).map(|j| Complex64::new(spec.weight[j] * spec.amp[j] * norm, 0.0)).collect();
        let omega = spec.k.iter().map(|&k| sys.energy(k) / sys.hbar).collect();
        let a_in_ref = states.iter().map(|s| s.swf.a_in_ref).collect();
        let reflect = states
            .iter()
            .map(|s| s.total.b_out * Complex64::from_polar(1.0, 2.0 * s.k() * sys.a1))
            .collect();
        let transmit =
            states.iter().map(|s| s.total.a_out * Complex64::from_polar(1.0, -s.k() * dd)).collect();
        let xc_value = states.iter().map(|s| s.value_and_slope(Which::Tr, sys.x_c()).0).collect();
        let xc_slope_right = states.iter().map(|s| s.value_and_slope(Which::Tr, sys.x_c()).1).collect();
        let xc_slope_left = states.iter().map(|s| s.left_limit_at_xc(Which::Tr).1).collect();

        // Inner Gauss–Legendre panels, split at every edge and at x_c.
        let gl = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("nonzero order"));
        let h_max = INNER_K_H / k_top.max(kap_top).max(1e-300);
        let mut edges = vec![sys.a1, sys.b1(), sys.x_c(), sys.a2(), sys.b2()];
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
        let mut inner_x = Vec::new();
        let mut inner_w = Vec::new();
        for e in edges.windows(2) {
            let (lo, hi) = (e[0], e[1]);
            let panels = ((hi - lo) / h_max).ceil().max(1.0) as usize;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let a = lo + p as f64 * h;
                for &(node, weight) in gl.as_node_weight_pairs() {
                    inner_x.push(a + 0.5 * h * (node + 1.0));
                    inner_w.push(0.5 * h * weight);
                }
            }
        }
        let nk = spec.len();
        let mut inner_tot = Vec::with_capacity(inner_x.len() * nk);
        let mut inner_ref = Vec::with_capacity(inner_x.len() * nk);
        for &x in &inner_x {
            for s in &states {
                inner_tot.push(s.eval(Which::Tot, x));
                inner_ref.push(s.eval(Which::Ref, x));
            }
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n_fft);
        let inv = planner.plan_fft_inverse(n_fft);

        Ok(Self {
            sys: *sys,
            spec,
            states,
            dx,
            x0,
            n_fft,
            n_a,
            n_b,
            n_end,
            simpson_left: simpson_weights(n_a, dx),
            simpson_right: simpson_weights(n_end - n_b, dx),
            inner_x,
            inner_w,
            inner_tot,
            inner_ref,
            c0,
            omega,
            a_in_ref,
            reflect,
            transmit,
            xc_value,
            xc_slope_left,
            xc_slope_right,
            fwd,
            inv,
        })
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn fft_size(&self) -> usize {
        self.n_fft
    }

    pub fn window(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.n_end as f64 * self.dx)
    }

    fn coefficients(&self, t: f64) -> Vec<Complex64> {
        self.c0.iter().zip(&self.omega).map(|(c, &w)| c * Complex64::from_polar(1.0, -w * t)).collect()
    }

    /// Σ_j a_j e^{±i k_j x_n} for every grid node n.
    fn plane_wave_sum(&self, a: impl Iterator<Item = Complex64>, sign: f64) -> Vec<Complex64> {
        let dk = self.spec.dk;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n_fft];
        for (j, v) in a.enumerate() {
            buf[j] = v * Complex64::from_polar(1.0, sign * j as f64 * dk * self.x0);
        }
        if sign > 0.0 {
            self.inv.process(&mut buf);
        } else {
            self.fwd.process(&mut buf);
        }
        let k_lo = self.spec.k_lo();
        for (n, v) in buf.iter_mut().enumerate().take(self.n_end + 1) {
            *v *= Complex64::from_polar(1.0, sign * k_lo * (self.x0 + n as f64 * self.dx));
        }
        buf.truncate(self.n_end + 1);
        buf
    }

    fn outer_fields(&self, c: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let inc = self.plane_wave_sum(c.iter().copied(), 1.0);
        let inc_ref = self.plane_wave_sum(c.iter().zip(&self.a_in_ref).map(|(a, b)| a * b), 1.0);
        let refl = self.plane_wave_sum(c.iter().zip(&self.reflect).map(|(a, b)| a * b), -1.0);
        let trans = self.plane_wave_sum(c.iter().zip(&self.transmit).map(|(a, b)| a * b), 1.0);
        (inc, inc_ref, refl, trans)
    }

    fn inner_fields(&self, c: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let nk = c.len();
        let dot = |row: &[Complex64]| row.iter().zip(c).fold(Complex64::new(0.0, 0.0), |s, (a, b)| s + a * b);
        let tot = self.inner_tot.chunks_exact(nk).map(dot).collect();
        let refl = self.inner_ref.chunks_exact(nk).map(dot).collect();
        (tot, refl)
    }

    fn grid_x(&self, n: usize) -> f64 {
        self.x0 + n as f64 * self.dx
    }

    /// Norms, centres of mass and x_c currents at time t.
    pub fn snapshot(&self, t: f64) -> Snapshot {
        let c = self.coefficients(t);
        let (inc, inc_ref, refl, trans) = self.outer_fields(&c);
        let (in_tot, in_ref) = self.inner_fields(&c);

        let mut acc = [[0.0f64; 3]; 3];
        let mut add = |which: usize, x: f64, w: f64, v: Complex64| {
            let p = v.norm_sqr() * w;
            acc[which][0] += p;
            acc[which][1] += p * x;
            acc[which][2] += p * x * x;
        };
        for (n, &w) in self.simpson_left.iter().enumerate() {
            let x = self.grid_x(n);
            let tot = inc[n] + refl[n];
            let r = inc_ref[n] + refl[n];
            add(0, x, w, tot);
            add(1, x, w, tot - r);
            add(2, x, w, r);
        }
        for (i, (&x, &w)) in self.inner_x.iter().zip(&self.inner_w).enumerate() {
            add(0, x, w, in_tot[i]);
            add(1, x, w, in_tot[i] - in_ref[i]);
            add(2, x, w, in_ref[i]);
        }
        for (i, &w) in self.simpson_right.iter().enumerate() {
            let n = self.n_b + i;
            let x = self.grid_x(n);
            add(0, x, w, trans[n]);
            add(1, x, w, trans[n]);
        }

        let sum = |v: &[Complex64]| v.iter().zip(&c).fold(Complex64::new(0.0, 0.0), |s, (a, b)| s + a * b);
        let psi_c = sum(&self.xc_value);
        let jl = self.sys.hbar / self.sys.mass * (psi_c.conj() * sum(&self.xc_slope_left)).im;
        let jr = self.sys.hbar / self.sys.mass * (psi_c.conj() * sum(&self.xc_slope_right)).im;

        let moments = |a: [f64; 3]| {
            if a[0] > 0.0 {
                (a[0], a[1] / a[0], a[2] / a[0])
            } else {
                (0.0, f64::NAN, f64::NAN)
            }
        };
        let (nt, xt, x2t) = moments(acc[0]);
        let (ntr, xtr, x2tr) = moments(acc[1]);
        let (nr, xr, x2r) = moments(acc[2]);
        Snapshot {
            t,
            norm_tot: nt,
            norm_t: ntr,
            norm_r: nr,
            xbar_tot: xt,
            xbar_tr: xtr,
            xbar_ref: xr,
            x2_tot: x2t,
            x2_tr: x2tr,
            x2_ref: x2r,
            j_tr_left: jl,
            j_tr_right: jr,
        }
    }

    /// Like [`snapshot`](Self::snapshot) but refuses under-resolved runs.
    pub fn checked_snapshot(&self, t: f64) -> Result<Snapshot> {
        let s = self.snapshot(t);
        let drift = (s.norm_tot - 1.0).abs();
        if !(drift <= NORM_DRIFT_TOL) {
            return Err(Error::UnderResolved { t, drift });
        }
        Ok(s)
    }

    /// Sampled Ψ_tot, ψ_tr, ψ_ref on the outer grid and the inner nodes, sorted in x.
    pub fn evolve(&self, t: f64) -> Result<PacketState> {
        let snap = self.checked_snapshot(t)?;
        let c = self.coefficients(t);
        let (inc, inc_ref, refl, trans) = self.outer_fields(&c);
        let (in_tot, in_ref) = self.inner_fields(&c);
        let total = self.n_a + 1 + self.inner_x.len() + (self.n_end - self.n_b + 1);
        let mut x_grid = Vec::with_capacity(total);
        let mut psi_tot = Vec::with_capacity(total);
        let mut psi_ref = Vec::with_capacity(total);
        for n in 0..=self.n_a {
            x_grid.push(self.grid_x(n));
            psi_tot.push(inc[n] + refl[n]);
            psi_ref.push(inc_ref[n] + refl[n]);
        }
        for (i, &x) in self.inner_x.iter().enumerate() {
            x_grid.push(x);
            psi_tot.push(in_tot[i]);
            psi_ref.push(in_ref[i]);
        }
        for n in self.n_b..=self.n_end {
            x_grid.push(self.grid_x(n));
            psi_tot.push(trans[n]);
            psi_ref.push(Complex64::new(0.0, 0.0));
        }
        let psi_tr = psi_tot.iter().zip(&psi_ref).map(|(a, b)| a - b).collect();
        Ok(PacketState { t, x_grid, psi_tot, psi_tr, psi_ref, norm_t: snap.norm_t, norm_r: snap.norm_r })
    }
}

/// Builds an engine for the given packet and evaluates one instant.
pub fn evolve(sys: &BarrierSystem, cfg: &PacketConfig, t: f64) -> Result<PacketState> {
    PacketEngine::new(sys, cfg)?.evolve(t)
}
