use num_complex::Complex64;
use twobarrier_core::superposition::{current_audit, naive_split};

use crate::Outcome;

pub fn superposition_demo() -> Outcome {
    let mut worst_flux = 0.0f64;
    let mut worst_mismatch = 0.0f64;
    let mut n = 0;
    for t in [0.1, 0.5, 0.9] {
        for (phase_q, phase_p, velocity) in [(0.0, 0.0, 1.0), (0.7, -1.3, 0.37), (2.9, 1.1, 2.5)] {
            let q = Complex64::from_polar(1.0 / f64::sqrt(t), phase_q);
            let p = Complex64::from_polar(((1.0 - t) / t).sqrt(), phase_p);
            let split = match naive_split(q, p, velocity) {
                Ok(s) => s,
                Err(e) => return Outcome::new(false, e.to_string()),
            };
            let a = current_audit(&split);
            worst_flux = worst_flux.max(a.flux_defect_1.abs()).max(a.flux_defect_2.abs());
            let expected = t * (1.0 - t) * velocity;
            worst_mismatch = worst_mismatch
                .max((a.mismatch_tr - expected).abs())
                .max((a.predicted_mismatch - expected).abs());
            n += 1;
        }
    }
    Outcome::new(
        worst_flux <= 1e-12 && worst_mismatch <= 1e-12,
        format!("{n} cases; worst flux defect {worst_flux:.1e}, worst |mismatch − T(1−T)ħk/m| {worst_mismatch:.1e}"),
    )
}
