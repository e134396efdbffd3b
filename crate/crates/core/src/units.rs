//! Barrier geometry, particle constants and unit systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ħ in eV·ps.
pub const HBAR_EV_PS: f64 = 6.582_119_569e-4;

/// Speed of light in nm/ps.
const C_NM_PER_PS: f64 = 299_792.458;

/// Electron rest energy in eV.
const ELECTRON_REST_ENERGY_EV: f64 = 510_998.950_00;

/// Electron mass in eV·ps²/nm², the mass unit that goes with nm, eV and ps.
pub const ELECTRON_MASS: f64 = ELECTRON_REST_ENERGY_EV / (C_NM_PER_PS * C_NM_PER_PS);

/// Unit system of the numbers handed to [`BarrierSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// ħ = 1, m = 1/2, so that E = k² and κ0 = √V0.
    Reduced,
    /// Lengths in nm, energies in eV, times in ps, masses in electron masses.
    Si,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Si => HBAR_EV_PS,
        }
    }

    /// Converts a user-facing mass value into the internal mass unit.
    ///
    /// In reduced units the mass is fixed to 1/2 and the argument is ignored.
    pub fn mass(self, mass: f64) -> f64 {
        match self {
            UnitSystem::Reduced => 0.5,
            UnitSystem::Si => mass * ELECTRON_MASS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitSystem::Reduced => "reduced",
            UnitSystem::Si => "si",
        }
    }
}

/// Two identical rectangular barriers of height `v0` and width `d`, separated
/// by a gap `gap`, starting at `a1`.
///
/// ```text
///        a1     b1        a2     b2
///  ───────┌──────┐────────┌──────┐───────
///         │  V0  │  gap   │  V0  │
/// ```
///
/// A zero height is accepted so that free-particle reference runs can reuse
/// the same machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSystem {
    pub v0: f64,
    pub d: f64,
    pub gap: f64,
    pub a1: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl BarrierSystem {
    pub fn new(v0: f64, d: f64, gap: f64, a1: f64, mass: f64, hbar: f64) -> Result<Self> {
        let all_finite = [v0, d, gap, a1, mass, hbar].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidSystem("parameters must be finite".into()));
        }
        if d <= 0.0 {
            return Err(Error::InvalidSystem(format!("barrier width must be positive, got {d}")));
        }
        if gap < 0.0 {
            return Err(Error::InvalidSystem(format!("gap must be non-negative, got {gap}")));
        }
        if a1 <= 0.0 {
            return Err(Error::InvalidSystem(format!("left edge a1 must be positive, got {a1}")));
        }
        if mass <= 0.0 || hbar <= 0.0 {
            return Err(Error::InvalidSystem("mass and hbar must be positive".into()));
        }
        Ok(Self { v0, d, gap, a1, mass, hbar })
    }

    /// Reduced units: ħ = 1, m = 1/2.
    pub fn reduced(v0: f64, d: f64, gap: f64, a1: f64) -> Result<Self> {
        Self::new(v0, d, gap, a1, 0.5, 1.0)
    }

    /// SI-style units: `v0` in eV, lengths in nm, `mass` in electron masses.
    pub fn si(v0_ev: f64, d_nm: f64, gap_nm: f64, a1_nm: f64, mass_me: f64) -> Result<Self> {
        Self::new(v0_ev, d_nm, gap_nm, a1_nm, mass_me * ELECTRON_MASS, HBAR_EV_PS)
    }

    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Self::new(self.v0, self.d, gap, self.a1, self.mass, self.hbar)
    }

    pub fn with_width(&self, d: f64) -> Result<Self> {
        Self::new(self.v0, d, self.gap, self.a1, self.mass, self.hbar)
    }

    pub fn with_height(&self, v0: f64) -> Result<Self> {
        Self::new(v0, self.d, self.gap, self.a1, self.mass, self.hbar)
    }

    pub fn b1(&self) -> f64 {
        self.a1 + self.d
    }

    pub fn a2(&self) -> f64 {
        self.b1() + self.gap
    }

    pub fn b2(&self) -> f64 {
        self.a2() + self.d
    }

    /// Total width D = 2d + L.
    pub fn width(&self) -> f64 {
        2.0 * self.d + self.gap
    }

    /// Midpoint of the system.
    pub fn x_c(&self) -> f64 {
        0.5 * (self.a1 + self.b2())
    }

    /// ħ²/2m: converts k² into an energy.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    pub fn energy(&self, k: f64) -> f64 {
        self.energy_scale() * k * k
    }

    /// Wavenumber of a particle with kinetic energy `e` (e > 0).
    pub fn wavenumber(&self, e: f64) -> f64 {
        (e / self.energy_scale()).sqrt()
    }

    /// κ0² = 2mV0/ħ²; negative for a well.
    pub fn kappa0_sq(&self) -> f64 {
        self.v0 / self.energy_scale()
    }

    /// |κ0|, the natural wavenumber scale of the barrier.
    pub fn kappa0_abs(&self) -> f64 {
        self.kappa0_sq().abs().sqrt()
    }

    /// κ² = κ0² − k², real for every k.
    pub fn kappa_sq(&self, k: f64) -> f64 {
        self.kappa0_sq() - k * k
    }

    /// Group velocity ħk/m.
    pub fn velocity(&self, k: f64) -> f64 {
        self.hbar * k / self.mass
    }

    /// m/ħ, the prefactor that turns a length·(1/k) into a time.
    pub fn time_per_length_wavenumber(&self) -> f64 {
        self.mass / self.hbar
    }

    /// Free traversal time mD/ħk.
    pub fn tau_free(&self, k: f64) -> f64 {
        self.width() / self.velocity(k)
    }

    /// Time scale mD/ħκ0; infinite for a zero-height barrier.
    pub fn tau0(&self) -> f64 {
        let k0 = self.kappa0_abs();
        if k0 == 0.0 {
            f64::INFINITY
        } else {
            self.width() / self.velocity(k0)
        }
    }
}
