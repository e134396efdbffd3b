use twobarrier_core::units::ELECTRON_MASS;
use twobarrier_core::wavepacket::{
    acceleration, asymptotic_group_times_packet, cm_track, fit_asymptotic_times, norm_trace, PacketConfig,
    PacketEngine, TimeGrid,
};
use twobarrier_core::BarrierSystem;

use crate::{rel, Outcome};

pub fn packet_example() -> Outcome {
    let (energy, tau_free, width, l0) = (0.05, 0.025, 15.0, 10.0);
    // τ_free = mD/ħk̄ with E = ħ²k̄²/2m gives m = 2Eτ_free²/D².
    let mass = 2.0 * energy * tau_free * tau_free / (width * width);
    let sys = BarrierSystem::si(0.2, 0.5 * width, 0.0, 200.0, mass / ELECTRON_MASS).unwrap();
    let kbar = sys.wavenumber(energy);
    let mut cfg = PacketConfig::new(l0, kbar, -0.05, 0.8);
    cfg.min_l0_kbar = 1.0;
    let engine = match PacketEngine::new(&sys, &cfg) {
        Ok(e) => e,
        Err(e) => return Outcome::new(false, format!("engine: {e}")),
    };
    let traj = match cm_track(&engine, &TimeGrid::new(-0.05, 0.8, 1200).unwrap()) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("track: {e}")),
    };
    let spectral = asymptotic_group_times_packet(&engine.spec, &sys, 10.0 * l0).unwrap();
    let fit = fit_asymptotic_times(&traj, &engine, 10.0 * l0, 3.0).map(|f| f.tau_as).unwrap_or(f64::NAN);
    let tau_loc = traj.events.tau_loc_tr.unwrap_or(f64::NAN);
    let tau_as = spectral.tau_as_tr;
    let tf = sys.tau_free(kbar);
    let acc = acceleration(&traj, &engine, sys.velocity(spectral.kbar_tr));
    let (fb, fa) = (acc.factor_before(), acc.factor_after());

    let e_loc = rel(tau_loc, 0.155);
    let e_as = rel(tau_as, 0.01);
    let e_delay = rel(tau_as - tf, -0.015);
    let pass = e_loc <= 0.15 && e_as <= 0.15 && e_delay <= 0.20 && fb > 1.5 && fa > 1.5;
    Outcome::new(
        pass,
        format!(
            "m = {:.4} mₑ, l0·k̄ = {:.2}, τ_free = {tf:.4} ps; τ^loc_tr = {tau_loc:.4} ps (target 0.155, off {:.0}%), \
             τ^as_tr = {tau_as:.4} ps (target 0.01, off {:.0}%; line fit {fit:.4}), τ^as_tr − τ_free = {:.4} ps \
             (target −0.015, off {:.0}%), CM speed factor before entry {fb:.2}, after exit {fa:.2}",
            mass / ELECTRON_MASS,
            l0 * kbar,
            100.0 * e_loc,
            100.0 * e_as,
            tau_as - tf,
            100.0 * e_delay
        ),
    )
}

pub fn packet_norms() -> Outcome {
    let (l0, kbar) = (8.0, 0.8);
    let sys = BarrierSystem::reduced(1.0, 1.5, 1.0, 60.0).unwrap();
    let t_hit = sys.a1 / sys.velocity(kbar);
    let (t0, t1) = (-0.2 * t_hit, 2.5 * t_hit);
    let engine = match PacketEngine::new(&sys, &PacketConfig::new(l0, kbar, t0, t1)) {
        Ok(e) => e,
        Err(e) => return Outcome::new(false, format!("engine: {e}")),
    };
    let (first, last) = match (engine.checked_snapshot(t0), engine.checked_snapshot(t1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Outcome::new(false, "norm drift above tolerance at the ends of the run"),
    };
    let as_sum = (last.norm_t + last.norm_r - 1.0).abs();
    let cross_in = (first.norm_tot - first.norm_t - first.norm_r).abs();
    let spectral = asymptotic_group_times_packet(&engine.spec, &sys, 10.0 * l0).unwrap();
    let spectral_t = (spectral.norm_t - last.norm_t).abs();

    let trace = match norm_trace(&engine, &TimeGrid::new(t0, t1, 160).unwrap(), 1e-3 * t_hit) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("trace: {e}")),
    };
    let r_spread = trace.r_spread();
    let delta_t = trace.net_delta_t().abs();
    let i_max = trace.imbalance.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut flow = 0.0f64;
    let mut crossing = 0;
    for (d, i) in trace.dt_norm_t.iter().zip(&trace.imbalance) {
        if i.abs() > 0.1 * i_max {
            flow = flow.max(rel(*d, *i));
            crossing += 1;
        }
    }
    let pass = as_sum <= 1e-8 && cross_in <= 1e-8 && spectral_t <= 1e-8 && r_spread <= 1e-6 && delta_t <= 1e-6
        && crossing > 0
        && flow <= 1e-4;
    Outcome::new(
        pass,
        format!(
            "|𝐓_as+𝐑_as−1| = {as_sum:.1e}, in-stage cross term {cross_in:.1e}, packet vs spectral 𝐓_as {spectral_t:.1e}, \
             𝐑 spread {r_spread:.1e}, net Δ𝐓 {delta_t:.1e}, d𝐓/dt vs x_c imbalance {flow:.1e} over {crossing} samples"
        ),
    )
}
