use std::cell::RefCell;
use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use twobarrier_core::chartimes::{self, TimeReport};
use twobarrier_core::oracle::oracle_amplitudes;
use twobarrier_core::quadrature::integrate;
use twobarrier_core::scatter::two_barrier_matrix;
use twobarrier_core::swf::{SwfState, Which};
use twobarrier_core::{compose_two_barrier, eval_total, one_barrier_params, total_field, BarrierSystem};

use crate::{rel, Outcome};

fn energy_grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

pub fn oracle_equivalence() -> Outcome {
    let d = 1.2;
    let mut worst = 0.0f64;
    let mut points = 0;
    for gap in [0.0, d, 5.0 * d] {
        let sys = BarrierSystem::reduced(1.0, d, gap, 2.0).unwrap();
        for e in energy_grid(100, 0.05, 3.0) {
            let k = e.sqrt();
            let (f, o) = match (total_field(&sys, k), oracle_amplitudes(&sys, k)) {
                (Ok(f), Ok(o)) => (f, o),
                _ => return Outcome::new(false, format!("evaluation failed at L = {gap}, E = {e}")),
            };
            let pairs = [
                (f.b_out, o.b_out),
                (f.a_out, o.a_out),
                (f.a1, o.a1),
                (f.b1, o.b1),
                (f.a_gap, o.a_gap),
                (f.b_gap, o.b_gap),
                (f.a2, o.a2),
                (f.b2, o.b2),
            ];
            for (a, b) in pairs {
                worst = worst.max((a - b).norm() / b.norm().max(1e-300));
            }
            points += 1;
        }
    }
    Outcome::new(worst < 1e-10, format!("{points} points, worst componentwise relative error {worst:.2e}"))
}

#[derive(Default, Clone, Copy)]
struct InvariantWorst {
    flux: f64,
    matrix_t: f64,
    unitarity: f64,
    incident: f64,
    split: f64,
    node: f64,
    mirror: f64,
    ref_current: f64,
}

fn check_invariants(
    v0: f64,
    d: f64,
    gap: f64,
    e_ratio: f64,
    a1: f64,
    well: bool,
    w: &mut InvariantWorst,
) -> Result<(), String> {
    let v0 = if well { -v0 } else { v0 };
    let sys = BarrierSystem::reduced(v0, d, gap, a1).map_err(|e| e.to_string())?;
    let k = (e_ratio * v0.abs()).sqrt();
    let err = |e: twobarrier_core::Error| e.to_string();

    let y = two_barrier_matrix(&sys, k).map_err(err)?;
    let flux = y.flux_defect().abs() / y.q.norm_sqr();
    let st = SwfState::new(&sys, k).map_err(err)?;
    let two = &st.two;
    let matrix_t = rel(two.t_two, 1.0 / y.q.norm_sqr());
    let f = &st.total;
    let unitarity = (two.t_two + two.r_two - 1.0)
        .abs()
        .max((f.a_out.norm_sqr() - two.t_two).abs())
        .max((f.b_out.norm_sqr() - two.r_two).abs());
    let s = &st.swf;
    let incident = (s.a_in_tr + s.a_in_ref - 1.0)
        .norm()
        .max((s.a_in_tr.norm_sqr() + s.a_in_ref.norm_sqr() - 1.0).abs());

    let (lo, hi) = (sys.a1 - 3.0, sys.b2() + 3.0);
    let xs: Vec<f64> = (0..60).map(|i| lo + (hi - lo) * i as f64 / 59.0).collect();
    let scale = xs.iter().map(|&x| eval_total(f, x).norm()).fold(1e-300, f64::max);
    let split = xs
        .iter()
        .map(|&x| (st.eval(Which::Tr, x) + st.eval(Which::Ref, x) - eval_total(f, x)).norm())
        .fold(0.0, f64::max)
        / scale;

    let ref_scale = xs.iter().map(|&x| st.eval(Which::Ref, x).norm()).fold(1e-300, f64::max);
    let node = st.left_limit_at_xc(Which::Ref).0.norm() / ref_scale;

    let half = 0.5 * sys.width();
    let deltas: Vec<f64> = (0..50).map(|i| half * i as f64 / 49.0).collect();
    let tr_scale = deltas.iter().map(|&dl| st.eval(Which::Tr, sys.x_c() - dl).norm()).fold(1e-300, f64::max);
    let mirror = deltas
        .iter()
        .map(|&dl| (st.eval(Which::Tr, sys.x_c() - dl).norm() - st.eval(Which::Tr, sys.x_c() + dl).norm()).abs())
        .fold(0.0, f64::max)
        / tr_scale;

    let v = sys.velocity(k);
    let ref_current = xs
        .iter()
        .filter(|&&x| x < sys.x_c())
        .map(|&x| st.current(Which::Ref, x).abs() / (v * st.eval(Which::Ref, x).norm_sqr().max(1.0)))
        .fold(0.0, f64::max);

    w.flux = w.flux.max(flux);
    w.matrix_t = w.matrix_t.max(matrix_t);
    w.unitarity = w.unitarity.max(unitarity);
    w.incident = w.incident.max(incident);
    w.split = w.split.max(split);
    w.node = w.node.max(node);
    w.mirror = w.mirror.max(mirror);
    w.ref_current = w.ref_current.max(ref_current);

    let checks = [
        ("|q|²−|p|²=1", flux, 1e-12),
        ("T_two vs |1/q|²", matrix_t, 1e-10),
        ("T_two+R_two=1", unitarity, 1e-12),
        ("incident amplitudes", incident, 1e-12),
        ("ψ_tr+ψ_ref=Ψ_tot", split, 1e-10),
        ("ψ_ref(x_c)=0", node, 1e-10),
        ("mirror symmetry", mirror, 1e-10),
        ("ψ_ref currentless", ref_current, 1e-12),
    ];
    for (name, value, tol) in checks {
        if !(value <= tol) {
            return Err(format!("{name}: {value:e} > {tol:e} at V0={v0}, d={d}, L={gap}, k={k}"));
        }
    }
    Ok(())
}

pub fn invariant_suite() -> Outcome {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let worst = RefCell::new(InvariantWorst::default());
    let cases = RefCell::new(0usize);
    let strategy = (0.5f64..2.0, 0.2f64..3.0, 0.0f64..5.0, 0.05f64..3.0, 0.5f64..5.0, any::<bool>());
    let result = runner.run(&strategy, |(v0, d, gap_ratio, e_ratio, a1, well)| {
        *cases.borrow_mut() += 1;
        check_invariants(v0, d, gap_ratio * d, e_ratio, a1, well, &mut worst.borrow_mut())
            .map_err(TestCaseError::fail)
    });
    let w = worst.into_inner();
    let summary = format!(
        "{} cases; worst flux {:.1e}, T_two/matrix {:.1e}, unitarity {:.1e}, incident {:.1e}, split {:.1e}, node {:.1e}, mirror {:.1e}, ref current {:.1e}",
        cases.into_inner(),
        w.flux,
        w.matrix_t,
        w.unitarity,
        w.incident,
        w.split,
        w.node,
        w.mirror,
        w.ref_current
    );
    match result {
        Ok(()) => Outcome::new(true, summary),
        Err(e) => Outcome::new(false, format!("{e}; {summary}")),
    }
}

pub fn dwell_closed_forms() -> Outcome {
    let tol = 1e-8;
    let quad = 1e-11;
    let mut worst = 0.0f64;
    let mut worst_split = 0.0f64;
    let mut n = 0;
    for gap in [0.0, 0.8] {
        let sys = BarrierSystem::reduced(1.0, 1.2, gap, 2.0).unwrap();
        let (a1, b1, a2, b2, xc) = (sys.a1, sys.b1(), sys.a2(), sys.b2(), sys.x_c());
        for e in energy_grid(50, 0.05, 3.0) {
            let k = e.sqrt();
            let st = SwfState::new(&sys, k).unwrap();
            let two = &st.two;
            let f = sys.mass / (sys.hbar * k);
            let dens = |which: Which| move |x: f64| st.eval(which, x).norm_sqr();
            let q = |which: Which, lo: f64, hi: f64| -> f64 {
                if hi > lo {
                    integrate(dens(which), lo, hi, quad).unwrap()
                } else {
                    0.0
                }
            };
            let cmp = |closed: f64, quad: f64| if closed == 0.0 && quad == 0.0 { 0.0 } else { rel(closed, quad) };

            let tr = chartimes::transmission_dwell(&sys, two);
            let ft = f / two.t_two;
            let q1 = ft * q(Which::Tr, a1, b1);
            let qg = ft * q(Which::Tr, b1, a2);
            let q2 = ft * q(Which::Tr, a2, b2);
            let ql = ft * q(Which::Tr, a1, xc);
            let qr = ft * q(Which::Tr, xc, b2);
            for (c, qq) in [(tr.tau1, q1), (tr.tau_gap, qg), (tr.tau2, q2), (tr.total, q1 + qg + q2)] {
                worst = worst.max(cmp(c, qq));
            }
            for (c, qq) in [(tr.left, ql), (tr.right, qr), (0.5 * tr.total, ql), (0.5 * tr.total, qr)] {
                worst_split = worst_split.max(cmp(c, qq));
            }

            if let Some(rf) = chartimes::reflection_dwell(&sys, two) {
                let fr = f / two.r_two;
                let r1 = fr * q(Which::Ref, a1, b1);
                let rg = fr * q(Which::Ref, b1, xc);
                for (c, qq) in [(rf.tau1, r1), (rf.tau_gap, rg), (rf.total, r1 + rg)] {
                    worst = worst.max(cmp(c, qq));
                }
            }

            let tot = chartimes::total_dwell(&sys, two);
            let t1 = f * q(Which::Tot, a1, b1);
            let tg = f * q(Which::Tot, b1, a2);
            let t2 = f * q(Which::Tot, a2, b2);
            for (c, qq) in [(tot.tau1, t1), (tot.tau_gap, tg), (tot.tau2, t2), (tot.total, t1 + tg + t2)] {
                worst = worst.max(cmp(c, qq));
            }
            worst = worst.max(rel(tot.tau2, tr.tau2 * two.t_two));
            n += 1;
        }
    }
    Outcome::new(
        worst < tol && worst_split < tol,
        format!("{n} k-points; worst component error {worst:.2e}, worst midpoint split error {worst_split:.2e}"),
    )
}

pub fn derivative_checks() -> Outcome {
    let sys = BarrierSystem::reduced(1.0, 1.5, 1.0, 2.0).unwrap();
    let h = 1e-6 * sys.kappa0_abs();
    let j = |k: f64| one_barrier_params(&sys, k).unwrap().j;
    let t = |k: f64| one_barrier_params(&sys, k).unwrap().t;
    let j2 = |k: f64| compose_two_barrier(&sys, k).unwrap().j_two;
    let lam = |k: f64| SwfState::new(&sys, k).unwrap().swf.lambda;
    let fd = |f: &dyn Fn(f64) -> f64, k: f64| (f(k + h) - f(k - h)) / (2.0 * h);
    let mut worst = [0.0f64; 4];
    let mut n = 0;
    for e in energy_grid(400, 0.05, 3.0) {
        let k = e.sqrt();
        let two = compose_two_barrier(&sys, k).unwrap();
        if two.cos_chi().abs() <= 0.05 {
            continue;
        }
        let d = chartimes::derivatives(&sys, k).unwrap();
        let pairs = [(d.jp, fd(&j, k)), (d.tp, fd(&t, k)), (d.j_two_p, fd(&j2, k)), (d.lambda_p, fd(&lam, k))];
        for (i, (a, b)) in pairs.iter().enumerate() {
            worst[i] = worst[i].max(rel(*a, *b));
        }
        n += 1;
        if n == 200 {
            break;
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    Outcome::new(
        n == 200 && max < 1e-6,
        format!(
            "{n} points with |cos χ| > 0.05; worst relative error J′ {:.1e}, T′ {:.1e}, J_two′ {:.1e}, λ′ {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

pub fn hartman_effects() -> Outcome {
    let (k, kap) = (0.6, 0.8);
    let mut notes = Vec::new();
    let mut pass = true;

    // (a) single barrier at κD = 20
    let sys = BarrierSystem::reduced(1.0, 10.0 / kap, 0.0, 2.0).unwrap();
    let g = chartimes::phase_and_group_times(&sys, k).unwrap();
    let limit = 2.0 * sys.mass / (sys.hbar * k * kap);
    let (ea, eb) = (rel(g.tau_ph, limit), rel(g.tau_as, limit));
    pass &= ea < 0.01 && eb < 0.01;
    notes.push(format!("(a) τ_ph, τ_as vs 2m/ħkκ off by {ea:.1e}, {eb:.1e}"));

    // (b) τ_as across L ∈ [0, 10d], opaque barriers, resonances excluded
    let d = 10.0 / kap;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut used = 0;
    for i in 0..=400 {
        let gap = 10.0 * d * i as f64 / 400.0;
        let s = BarrierSystem::reduced(1.0, d, gap, 2.0).unwrap();
        if compose_two_barrier(&s, k).unwrap().cos_chi().abs() <= 0.05 {
            continue;
        }
        let t = chartimes::phase_and_group_times(&s, k).unwrap().tau_as;
        lo = lo.min(t);
        hi = hi.max(t);
        used += 1;
    }
    let var = (hi - lo) / lo;
    pass &= var < 1e-3;
    notes.push(format!("(b) τ_as variation {var:.1e} over {used} gaps"));

    // (c) log τ^dwell_tr affine in d with slope 2κ; τ^gap_tr depends on L
    let gap = 1.0;
    let pts: Vec<(f64, f64)> = (0..=10)
        .map(|i| {
            let d = (10.0 + 0.5 * i as f64) / kap;
            let s = BarrierSystem::reduced(1.0, d, gap, 2.0).unwrap();
            (d, chartimes::dwell_times(&s, k).unwrap().0.total.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let es = rel(slope, 2.0 * kap);
    let dd = 12.0 / kap;
    let gap_time = |l: f64| {
        let s = BarrierSystem::reduced(1.0, dd, l, 2.0).unwrap();
        chartimes::dwell_times(&s, k).unwrap().0.tau_gap
    };
    let hl = 1e-3;
    let dgap = (gap_time(2.0 + hl) - gap_time(2.0 - hl)) / (2.0 * hl);
    let rel_dgap = dgap.abs() * 2.0 / gap_time(2.0);
    pass &= es < 0.01 && rel_dgap > 1e-3 && dgap.is_finite();
    notes.push(format!("(c) dwell slope/2κ off by {es:.1e}, L·∂τ^gap_tr/∂L / τ^gap_tr = {rel_dgap:.2}"));

    Outcome::new(pass, notes.join("; "))
}

pub fn limiting_regimes() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let d = 1.5 * PI;
    let wide = BarrierSystem::reduced(1.0, d, 0.0, 2.0).unwrap();
    let report = |s: &BarrierSystem, k: f64| TimeReport::new(s, k).unwrap();

    // low-energy divergence of τ_ph and vanishing τ_dwell
    let (r4, r3) = (report(&wide, 1e-4), report(&wide, 1e-3));
    let ok = r4.tau_ph > 5.0 * r3.tau_ph && r4.dwell_tot.total < r3.dwell_tot.total && r4.dwell_tot.total < 1e-3 * r4.tau0;
    pass &= ok;
    notes.push(format!(
        "k→0: τ_ph/τ0 {:.3e}→{:.3e}, τ_dwell/τ0 {:.2e}→{:.2e}",
        r3.tau_ph / r3.tau0,
        r4.tau_ph / r4.tau0,
        r3.dwell_tot.total / r3.tau0,
        r4.dwell_tot.total / r4.tau0
    ));

    // high-energy approach to τ_free
    let r = report(&wide, 3.0);
    let mut hi_worst = 0.0f64;
    for v in [r.dwell_tr.total, r.dwell_tot.total, r.tau_ph, r.tau_as, r.dwell_ref.map_or(f64::NAN, |x| x.total)] {
        hi_worst = hi_worst.max(rel(v, r.tau_free));
    }
    pass &= hi_worst < 0.02;
    notes.push(format!("k=3κ0: worst |τ/τ_free − 1| = {hi_worst:.3}"));

    // low-energy chain at k = 0.05κ0
    let r = report(&wide, 0.05);
    let kd = wide.kappa0_abs() * wide.width();
    let th = (0.5 * kd).tanh();
    let r_ph = rel(r.tau_as, th * th * r.tau_ph);
    let r_free = rel(r.tau_as, 2.0 / kd * th * r.tau_free);
    let ref_dwell = r.dwell_ref.map_or(f64::NAN, |x| x.total);
    let r_ref = rel(ref_dwell, r.dwell_tot.total);
    let order = r.dwell_tr.total > 10.0 * r.tau_as && r.tau_as > 10.0 * ref_dwell;
    pass &= r_ph < 0.05 && r_free < 0.05 && r_ref < 0.05 && order;
    notes.push(format!("chain at 0.05κ0 off by {r_ph:.1e}, {r_free:.1e}, {r_ref:.1e}"));

    // above the barrier every time grows with L
    let sweep = |k: f64, n: usize| -> Vec<(f64, TimeReport)> {
        (0..=n)
            .map(|i| {
                let gap = 10.0 * d * i as f64 / n as f64;
                let s = wide.with_gap(gap).unwrap();
                (gap, report(&s, k))
            })
            .collect()
    };
    let slope = |pts: &[(f64, f64)]| {
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    };
    let f2 = sweep(1.5, 200);
    let cols: [fn(&TimeReport) -> f64; 4] =
        [|r| r.dwell_tr.total, |r| r.dwell_tot.total, |r| r.tau_ph, |r| r.tau_as];
    let grows = cols.iter().all(|c| slope(&f2.iter().map(|(l, r)| (*l, c(r))).collect::<Vec<_>>()) > 0.0);
    pass &= grows;
    notes.push(format!("above-barrier gap sweep, all times grow with L: {grows}"));

    // below the barrier only τ^dwell_tr is monotone in L
    let f3 = sweep(0.97, 400);
    let monotone = |c: fn(&TimeReport) -> f64| f3.windows(2).all(|w| c(&w[1].1) > c(&w[0].1));
    let tr_mono = monotone(cols[0]);
    let others = cols[1..].iter().all(|&c| !monotone(c));
    pass &= tr_mono && others;
    notes.push(format!("sub-barrier gap sweep, τ^dwell_tr monotone: {tr_mono}, others not monotone: {others}"));

    Outcome::new(pass, notes.join("; "))
}
