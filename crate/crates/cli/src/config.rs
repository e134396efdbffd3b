//! Run configuration: JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use twobarrier_core::BarrierSystem;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Reduced,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Sweep {
    #[serde(rename = "k")]
    #[value(name = "k")]
    K,
    #[serde(rename = "L")]
    #[value(name = "L")]
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. The config file uses the same names.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Barrier height (eV in SI units).
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Width of each barrier (nm in SI units).
    #[arg(long)]
    pub d: Option<f64>,
    /// Distance between the barriers.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Left edge of the first barrier.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    /// Particle mass in electron masses (SI units only).
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Swept variable of `times-sweep`.
    #[arg(long, value_enum)]
    pub sweep: Option<Sweep>,
    /// Sweep range lo:hi:n (`resonances` takes lo:hi).
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Packet half-width in x.
    #[arg(long)]
    pub l0: Option<f64>,
    /// Mean wavenumber of the packet; the fixed k of an L sweep and of the demo.
    #[arg(long)]
    pub kbar: Option<f64>,
    /// Packet time grid lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    pub t_range: Option<String>,
    /// Lower bound on l0·kbar accepted for packets.
    #[arg(long)]
    pub min_l0_kbar: Option<f64>,
    /// Transfer-matrix entry q as re,im for the demo.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub q: Option<[f64; 2]>,
    /// Transfer-matrix entry p as re,im for the demo.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub p: Option<[f64; 2]>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Significant digits of CSV numbers.
    #[arg(long)]
    pub precision: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected re,im, got {s:?}"));
    }
    let re = parts[0].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    let im = parts[1].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
    Ok([re, im])
}

impl Settings {
    /// Fills every unset flag from the config file, if one was given.
    pub fn merged(self) -> Result<Settings, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_file(&path)?;
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: self.$f.or(file.$f),)* config: Some(path) } };
        }
        Ok(pick!(v0, d, gap, a1, mass, units, sweep, range, l0, kbar, t_range, min_l0_kbar, q, p, format, precision, out))
    }
}

fn read_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Evenly spaced points lo..=hi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn parse(key: &str, s: &str, need_n: bool) -> Result<Range, CliError> {
        let bad = |why: &str| CliError::Config(format!("{key}: {why} in {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let expected = if need_n { "expected lo:hi:n" } else { "expected lo:hi" };
        if parts.len() != 2 + usize::from(need_n) {
            return Err(bad(expected));
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| bad("lo is not a number"))?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| bad("hi is not a number"))?;
        let n = if need_n { parts[2].trim().parse::<usize>().map_err(|_| bad("n is not a count"))? } else { 2 };
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(bad("bounds must be finite"));
        }
        if n == 0 {
            return Err(bad("n must be at least 1"));
        }
        if hi < lo {
            return Err(bad("hi is below lo"));
        }
        Ok(Range { lo, hi, n })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.hi } else { self.lo + i as f64 * step }).collect()
    }
}

/// Settings after merging, defaulting and validation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub units: Units,
    pub v0: f64,
    pub d: f64,
    pub gap: f64,
    pub a1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<Range>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_range: Option<Range>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_l0_kbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 2]>,
    pub format: Format,
    pub precision: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: &'static str, s: Settings) -> Result<RunConfig, CliError> {
        let units = s.units.unwrap_or(Units::Reduced);
        let mass = match (units, s.mass) {
            (Units::Reduced, Some(_)) => {
                return Err(CliError::Config("mass: reduced units fix m = 1/2; use --units si to set a mass".into()))
            }
            (Units::Reduced, None) => None,
            (Units::Si, m) => Some(m.unwrap_or(1.0)),
        };
        let precision = s.precision.unwrap_or(17);
        if !(1..=17).contains(&precision) {
            return Err(CliError::Config(format!("precision: expected 1..=17 digits, got {precision}")));
        }
        let cfg = RunConfig {
            command,
            units,
            v0: s.v0.unwrap_or(1.0),
            d: s.d.unwrap_or(1.0),
            gap: s.gap.unwrap_or(0.0),
            a1: s.a1.unwrap_or(1.0),
            mass,
            sweep: s.sweep,
            range: s.range.as_deref().map(|r| Range::parse("range", r, command != "resonances")).transpose()?,
            l0: s.l0,
            kbar: s.kbar,
            t_range: s.t_range.as_deref().map(|r| Range::parse("t-range", r, true)).transpose()?,
            min_l0_kbar: s.min_l0_kbar,
            q: s.q,
            p: s.p,
            format: s.format.unwrap_or(Format::Csv),
            precision,
            out: s.out,
        };
        cfg.system()?;
        Ok(cfg)
    }

    pub fn system(&self) -> Result<BarrierSystem, CliError> {
        let sys = match self.units {
            Units::Reduced => BarrierSystem::reduced(self.v0, self.d, self.gap, self.a1),
            Units::Si => BarrierSystem::si(self.v0, self.d, self.gap, self.a1, self.mass.unwrap_or(1.0)),
        };
        sys.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn require<T: Copy>(&self, key: &str, v: Option<T>) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Config(format!("{} needs --{key}", self.command)))
    }

    pub fn units_line(&self) -> &'static str {
        match self.units {
            Units::Reduced => "reduced (hbar = 1, m = 1/2, E = k^2)",
            Units::Si => "si (lengths nm, energies eV, times ps, mass in electron masses)",
        }
    }
}
