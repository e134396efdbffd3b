//! Centre-of-mass tracks, norm traces and the times read off them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::swf::Which;

use super::engine::{PacketEngine, Snapshot};

/// Uniform grid lo:hi:n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 || !(hi >= lo) || (n > 1 && hi == lo) {
            return Err(Error::Domain(format!("bad time grid {lo}:{hi}:{n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64).collect()
    }
}

/// Event times extracted from a track. `None` means the CM never got there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackEvents {
    pub t_entry_tr: Option<f64>,
    pub t_exit_tr: Option<f64>,
    pub tau_loc_tr: Option<f64>,
    /// First and second crossing of x̄_ref = a1.
    pub t_entry_ref: Option<f64>,
    pub t_exit_ref: Option<f64>,
    /// Zero when x̄_ref = a1 has at most one root.
    pub tau_loc_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmTrajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Free-particle reference ħk̄t/m.
    pub xbar_free: Vec<f64>,
    pub events: TrackEvents,
}

impl CmTrajectory {
    pub fn xbar(&self, which: Which) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|s| match which {
                Which::Tot => s.xbar_tot,
                Which::Tr => s.xbar_tr,
                Which::Ref => s.xbar_ref,
            })
            .collect()
    }

    pub fn norm_t(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.norm_t).collect()
    }

    pub fn norm_r(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.norm_r).collect()
    }
}

/// Bisection on t for x̄(t) = target, re-evaluating the packet at each step.
fn refine_crossing(
    engine: &PacketEngine,
    which: Which,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let f = |t: f64| -> Result<f64> {
        let s = engine.checked_snapshot(t)?;
        Ok(match which {
            Which::Tot => s.xbar_tot,
            Which::Tr => s.xbar_tr,
            Which::Ref => s.xbar_ref,
        } - target)
    };
    let mut f_lo = f(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grid intervals on which x̄ − target changes sign.
fn brackets(times: &[f64], xs: &[f64], target: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..times.len() {
        let (a, b) = (xs[i - 1] - target, xs[i] - target);
        if a.is_finite() && b.is_finite() && (a < 0.0) != (b < 0.0) {
            out.push((times[i - 1], times[i]));
        }
    }
    out
}

/// Samples the packet on `grid`, then locates barrier entry and exit.
pub fn cm_track(engine: &PacketEngine, grid: &TimeGrid) -> Result<CmTrajectory> {
    let times = grid.points();
    let snapshots = times.iter().map(|&t| engine.checked_snapshot(t)).collect::<Result<Vec<_>>>()?;
    let sys = &engine.sys;
    let v = sys.velocity(engine.spec.kbar);
    let xbar_free = times.iter().map(|&t| v * t).collect();
    let mut traj = CmTrajectory {
        times,
        snapshots,
        xbar_free,
        events: TrackEvents {
            t_entry_tr: None,
            t_exit_tr: None,
            tau_loc_tr: None,
            t_entry_ref: None,
            t_exit_ref: None,
            tau_loc_ref: 0.0,
        },
    };
    let tau0 = sys.tau0();
    let tol = if tau0.is_finite() { 1e-6 * tau0 } else { 1e-6 * sys.tau_free(engine.spec.kbar) };
    let min_norm = 1e-12;

    let has_tr = traj.snapshots.iter().any(|s| s.norm_t > min_norm);
    if has_tr {
        let xtr = traj.xbar(Which::Tr);
        let first = |target: f64| brackets(&traj.times, &xtr, target).into_iter().next();
        if let Some((lo, hi)) = first(sys.a1) {
            traj.events.t_entry_tr = Some(refine_crossing(engine, Which::Tr, sys.a1, lo, hi, tol)?);
        }
        if let Some((lo, hi)) = first(sys.b2()) {
            traj.events.t_exit_tr = Some(refine_crossing(engine, Which::Tr, sys.b2(), lo, hi, tol)?);
        }
        if let (Some(a), Some(b)) = (traj.events.t_entry_tr, traj.events.t_exit_tr) {
            traj.events.tau_loc_tr = Some(b - a);
        }
    }
    let has_ref = traj.snapshots.iter().all(|s| s.norm_r > min_norm);
    if has_ref {
        let xr = traj.xbar(Which::Ref);
        let b = brackets(&traj.times, &xr, sys.a1);
        if b.len() >= 2 {
            let t1 = refine_crossing(engine, Which::Ref, sys.a1, b[0].0, b[0].1, tol)?;
            let t2 = refine_crossing(engine, Which::Ref, sys.a1, b[1].0, b[1].1, tol)?;
            traj.events.t_entry_ref = Some(t1);
            traj.events.t_exit_ref = Some(t2);
            traj.events.tau_loc_ref = t2 - t1;
        } else if let Some((lo, hi)) = b.first() {
            traj.events.t_entry_ref = Some(refine_crossing(engine, Which::Ref, sys.a1, *lo, *hi, tol)?);
        }
    }
    Ok(traj)
}

/// Local group times (transmission, reflection) of a track.
pub fn local_group_times(traj: &CmTrajectory) -> Result<(f64, f64)> {
    let tr = traj
        .events
        .tau_loc_tr
        .ok_or_else(|| Error::Domain("the transmitted CM never crosses both edges; no entry".into()))?;
    Ok((tr, traj.events.tau_loc_ref))
}

/// 𝐓(t), 𝐑(t) and the x_c current imbalance compared with d𝐓/dt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormTrace {
    pub times: Vec<f64>,
    pub norm_t: Vec<f64>,
    pub norm_r: Vec<f64>,
    pub imbalance: Vec<f64>,
    /// Five-point central difference of 𝐓 with step `h`.
    pub dt_norm_t: Vec<f64>,
    pub h: f64,
}

impl NormTrace {
    pub fn r_spread(&self) -> f64 {
        spread(&self.norm_r)
    }

    pub fn net_delta_t(&self) -> f64 {
        self.norm_t[self.norm_t.len() - 1] - self.norm_t[0]
    }

    /// Largest |d𝐓/dt − imbalance| relative to the largest |imbalance|.
    pub fn worst_flow_mismatch(&self) -> f64 {
        let scale = self.imbalance.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = self
            .dt_norm_t
            .iter()
            .zip(&self.imbalance)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Evaluates 𝐓, 𝐑 and the imbalance on `grid`, with d𝐓/dt from a five-point
/// stencil of width `h` around each sample.
pub fn norm_trace(engine: &PacketEngine, grid: &TimeGrid, h: f64) -> Result<NormTrace> {
    let times = grid.points();
    let mut out = NormTrace {
        times: times.clone(),
        norm_t: Vec::new(),
        norm_r: Vec::new(),
        imbalance: Vec::new(),
        dt_norm_t: Vec::new(),
        h,
    };
    for &t in &times {
        let s = engine.checked_snapshot(t)?;
        let nt = |dt: f64| engine.snapshot(t + dt).norm_t;
        let d = (nt(-2.0 * h) - 8.0 * nt(-h) + 8.0 * nt(h) - nt(2.0 * h)) / (12.0 * h);
        out.norm_t.push(s.norm_t);
        out.norm_r.push(s.norm_r);
        out.imbalance.push(s.flow_imbalance());
        out.dt_norm_t.push(d);
    }
    Ok(out)
}

/// Straight-line fit y = a + b t.
fn line_fit(t: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = t.len() as f64;
    if t.len() < 2 {
        return None;
    }
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - mt) * (v - mt)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    if stt == 0.0 {
        return None;
    }
    let b = sty / stt;
    Some((my - b * mt, b))
}

/// Group times read off straight-line fits to the asymptotic stages of x̄_tr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedTimes {
    pub v_in: f64,
    pub v_out: f64,
    /// Time the in-stage line passes x = 0.
    pub t_dep: f64,
    /// Time the out-stage line passes b2 + ΔX.
    pub t_arr: f64,
    pub tau_as: f64,
    pub in_samples: usize,
    pub out_samples: usize,
}

/// Fits lines to samples where the whole ψ_tr packet (CM ± `widths` standard
/// deviations) lies left of a1, and right of b2.
pub fn fit_asymptotic_times(traj: &CmTrajectory, engine: &PacketEngine, delta_x: f64, widths: f64) -> Result<FittedTimes> {
    let sys = &engine.sys;
    let (mut ti, mut yi, mut to, mut yo) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (t, s) in traj.times.iter().zip(&traj.snapshots) {
        let w = widths * s.width_tr();
        if s.xbar_tr + w < sys.a1 && s.xbar_tot + widths * s.width_tot() < sys.a1 {
            ti.push(*t);
            yi.push(s.xbar_tr);
        } else if s.xbar_tr - w > sys.b2() {
            to.push(*t);
            yo.push(s.xbar_tr);
        }
    }
    let (a_in, v_in) = line_fit(&ti, &yi)
        .ok_or_else(|| Error::Domain("too few in-stage samples to fit a departure line".into()))?;
    let (a_out, v_out) = line_fit(&to, &yo)
        .ok_or_else(|| Error::Domain("too few out-stage samples to fit an arrival line".into()))?;
    let t_dep = -a_in / v_in;
    let t_arr = (sys.b2() + delta_x - a_out) / v_out;
    let tau_as = t_arr - t_dep - (sys.a1 + delta_x) / v_in;
    Ok(FittedTimes { v_in, v_out, t_dep, t_arr, tau_as, in_samples: ti.len(), out_samples: to.len() })
}

/// Peak CM speed of ψ_tr before entry and after exit, over the asymptotic speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Acceleration {
    pub v_asymptotic: f64,
    pub peak_before_entry: f64,
    pub peak_after_exit: f64,
}

impl Acceleration {
    pub fn factor_before(&self) -> f64 {
        self.peak_before_entry / self.v_asymptotic
    }

    pub fn factor_after(&self) -> f64 {
        self.peak_after_exit / self.v_asymptotic
    }
}

pub fn acceleration(traj: &CmTrajectory, engine: &PacketEngine, v_asymptotic: f64) -> Acceleration {
    let sys = &engine.sys;
    let x = traj.xbar(Which::Tr);
    let t = &traj.times;
    let mut before = 0.0f64;
    let mut after = 0.0f64;
    for i in 1..t.len().saturating_sub(1) {
        let v = (x[i + 1] - x[i - 1]) / (t[i + 1] - t[i - 1]);
        if x[i] < sys.a1 {
            before = before.max(v);
        } else if x[i] > sys.b2() {
            after = after.max(v);
        }
    }
    Acceleration { v_asymptotic, peak_before_entry: before, peak_after_exit: after }
}
