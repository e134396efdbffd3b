use num_complex::Complex64;
use rayon::prelude::*;
use twobarrier_core::chartimes::TimeReport;
use twobarrier_core::superposition::naive_split_two_barrier;
use twobarrier_core::wavepacket::{
    acceleration, asymptotic_group_times_packet, cm_track, fit_asymptotic_times, PacketConfig, PacketEngine, TimeGrid,
};
use twobarrier_core::{compose_two_barrier, current_audit, find_resonances, naive_split, BarrierSystem};

use crate::config::{Range, RunConfig, Sweep};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// T_two above this counts as full transmission.
const TRANSPARENT: f64 = 1.0 - 1e-10;

pub fn preamble(cfg: &RunConfig) -> Vec<String> {
    let json = serde_json::to_string(cfg).expect("config serializes");
    vec![
        format!("twobarrier {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", cfg.command),
        format!("units: {}", cfg.units_line()),
        format!("config: {json}"),
    ]
}

pub fn times_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let sweep = cfg.require("sweep", cfg.sweep)?;
    let range: Range = cfg.require("range", cfg.range)?;
    let base = cfg.system()?;
    if !base.tau0().is_finite() {
        return Err(CliError::Config("v0: times are reported in units of tau0, which needs v0 != 0".into()));
    }
    let fixed_k = match sweep {
        Sweep::K => None,
        Sweep::L => Some(cfg.require("kbar", cfg.kbar)?),
    };
    let rows: Vec<Vec<Cell>> = range
        .points()
        .par_iter()
        .map(|&x| {
            let (sys, k) = match fixed_k {
                None => (base, x),
                Some(k) => (base.with_gap(x).map_err(|e| CliError::Config(format!("range: {e}")))?, k),
            };
            let r = TimeReport::new(&sys, k).map_err(|e| CliError::from_core(&format!("at {x}"), e))?;
            let t0 = r.tau0;
            Ok(vec![
                x.into(),
                (r.dwell_tr.total / t0).into(),
                (r.dwell_tot.total / t0).into(),
                (r.tau_ph / t0).into(),
                (r.tau_as / t0).into(),
                (r.t_dep / t0).into(),
                r.dwell_ref.map(|d| d.total / t0).into(),
                (r.tau_free / t0).into(),
                r.t_two.into(),
                r.near_resonance.into(),
                (r.t_two >= TRANSPARENT).into(),
                t0.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let first = match sweep {
        Sweep::K => "k",
        Sweep::L => "L",
    };
    let mut table = Table::new(&[
        first,
        "tau_dwell_tr/tau0",
        "tau_dwell/tau0",
        "tau_ph/tau0",
        "tau_as/tau0",
        "t_dep/tau0",
        "tau_dwell_ref/tau0",
        "tau_free/tau0",
        "T_two",
        "near_resonance",
        "full_transmission",
        "tau0",
    ]);
    table.meta = preamble(cfg);
    table.rows = rows;
    Ok(table)
}

/// Trajectory table and the table of extracted times.
pub fn packet_run(cfg: &RunConfig) -> Result<(Table, Table), CliError> {
    let sys = cfg.system()?;
    let l0 = cfg.require("l0", cfg.l0)?;
    let kbar = cfg.require("kbar", cfg.kbar)?;
    if sys.a1 < 3.0 * l0 {
        return Err(CliError::Config(format!(
            "a1: the packet starts centred at x = 0, so a1 must be at least 3*l0 = {}",
            3.0 * l0
        )));
    }
    let v = sys.velocity(kbar);
    let range = cfg.t_range.unwrap_or(Range { lo: 0.0, hi: (2.0 * sys.a1 + sys.width()) / v, n: 200 });
    let mut pc = PacketConfig::new(l0, kbar, range.lo, range.hi);
    if let Some(m) = cfg.min_l0_kbar {
        pc.min_l0_kbar = m;
    }
    let engine = PacketEngine::new(&sys, &pc).map_err(|e| CliError::from_core("packet setup", e))?;
    let grid = TimeGrid::new(range.lo, range.hi, range.n).map_err(|e| CliError::from_core("t-range", e))?;
    let traj = cm_track(&engine, &grid).map_err(|e| CliError::from_core("packet run", e))?;

    let mut table =
        Table::new(&["t", "xbar_tr", "xbar_tot", "xbar_ref", "xbar_free", "norm_T", "norm_R"]);
    table.meta = preamble(cfg);
    let defined = |x: f64| if x.is_finite() { Cell::Num(x) } else { Cell::Missing };
    for (i, s) in traj.snapshots.iter().enumerate() {
        table.push(vec![
            s.t.into(),
            defined(s.xbar_tr),
            defined(s.xbar_tot),
            defined(s.xbar_ref),
            traj.xbar_free[i].into(),
            s.norm_t.into(),
            s.norm_r.into(),
        ]);
    }

    let delta_x = 10.0 * l0;
    let spectral = asymptotic_group_times_packet(&engine.spec, &sys, delta_x).ok();
    let fit = fit_asymptotic_times(&traj, &engine, delta_x, 3.0).ok();
    let v_as = sys.velocity(spectral.map_or(engine.spec.mean_k(), |s| s.kbar_tr));
    let acc = acceleration(&traj, &engine, v_as);
    let last = traj.snapshots.last().expect("time grid is non-empty");
    let ev = &traj.events;

    let mut times = Table::new(&["quantity", "value"]);
    times.meta = preamble(cfg);
    times.meta.push(format!("delta_x: {delta_x}"));
    let rows: [(&str, Cell); 15] = [
        ("tau_loc_tr", ev.tau_loc_tr.into()),
        ("tau_loc_ref", ev.tau_loc_ref.into()),
        ("t_entry_tr", ev.t_entry_tr.into()),
        ("t_exit_tr", ev.t_exit_tr.into()),
        ("tau_as_tr", spectral.map(|s| s.tau_as_tr).into()),
        ("t_dep_tr", spectral.map(|s| s.t_dep_tr).into()),
        ("t_arr_tr", spectral.map(|s| s.t_arr_tr).into()),
        ("tau_as_tr_fit", fit.map(|f| f.tau_as).into()),
        ("t_dep_tr_fit", fit.map(|f| f.t_dep).into()),
        ("t_arr_tr_fit", fit.map(|f| f.t_arr).into()),
        ("tau_free", sys.tau_free(kbar).into()),
        ("norm_T_final", last.norm_t.into()),
        ("norm_R_final", last.norm_r.into()),
        ("speed_factor_before_entry", acc.factor_before().into()),
        ("speed_factor_after_exit", acc.factor_after().into()),
    ];
    for (name, value) in rows {
        times.push(vec![name.into(), value]);
    }
    Ok((table, times))
}

pub fn demo_superposition(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let split = match (cfg.q, cfg.p) {
        (Some(q), Some(p)) => {
            let velocity = match cfg.kbar {
                Some(k) => cfg.system()?.velocity(k),
                None => 1.0,
            };
            naive_split(Complex64::new(q[0], q[1]), Complex64::new(p[0], p[1]), velocity)
        }
        (None, None) => naive_split_two_barrier(&cfg.system()?, cfg.require("kbar", cfg.kbar)?),
        _ => return Err(CliError::Config("q, p: give both transfer-matrix entries or neither".into())),
    }
    .map_err(|e| CliError::from_core("demo", e))?;
    let a = current_audit(&split);
    let summary = a.summary();
    let mut table = Table::new(&[
        "transmission",
        "j_in_1",
        "j_transmitted",
        "j_in_2",
        "j_reflected",
        "mismatch_tr",
        "mismatch_ref",
        "predicted_mismatch",
        "flux_defect_1",
        "flux_defect_2",
        "one_channel",
        "report",
    ]);
    table.meta = preamble(cfg);
    table.meta.push(format!("report: {summary}"));
    table.push(vec![
        a.transmission.into(),
        a.j_in_1.into(),
        a.j_transmitted.into(),
        a.j_in_2.into(),
        a.j_reflected.into(),
        a.mismatch_tr.into(),
        a.mismatch_ref.into(),
        a.predicted_mismatch.into(),
        a.flux_defect_1.into(),
        a.flux_defect_2.into(),
        a.one_channel.into(),
        summary.as_str().into(),
    ]);
    Ok((table, summary))
}

pub fn resonances(cfg: &RunConfig) -> Result<Table, CliError> {
    let range = cfg.require("range", cfg.range)?;
    let sys: BarrierSystem = cfg.system()?;
    let ks = find_resonances(&sys, range.lo, range.hi).map_err(|e| CliError::from_core("resonance search", e))?;
    let mut table = Table::new(&["k", "energy", "T_two", "tau_dwell_tr", "tau_ph", "kind"]);
    table.meta = preamble(cfg);
    for k in ks {
        let r = TimeReport::new(&sys, k).map_err(|e| CliError::from_core(&format!("at k = {k}"), e))?;
        let two = compose_two_barrier(&sys, k).map_err(|e| CliError::from_core(&format!("at k = {k}"), e))?;
        let kind = if two.one.r < 1e-12 { "single-barrier transparency" } else { "gap resonance" };
        table.push(vec![
            k.into(),
            sys.energy(k).into(),
            r.t_two.into(),
            r.dwell_tr.total.into(),
            r.tau_ph.into(),
            kind.into(),
        ]);
    }
    Ok(table)
}

