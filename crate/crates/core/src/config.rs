//! Run configuration: flat `key = value` text with dotted sections.
//!
//! ```text
//! # comment
//! model.I = 18
//! model.d = 2
//! grid.times_in_T = 0.125, 0.25, 0.375
//! ```
//!
//! Unknown or repeated keys are rejected. Every key has a default, so an
//! empty file is a valid configuration. [`RunConfig::to_text`] writes the
//! fully resolved configuration back in the same format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::rotation_period;
use crate::error::{Error, Result};
use crate::spectra::{KernelParams, Provider, SpectrumKind};
use crate::wavepacket::{ModelParams, TravelingMode};

/// Times of a run, either absolute or in units of the rotation period.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Femtoseconds(Vec<f64>),
    RotationPeriods(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spin_mean: f64,
    pub spin_window: f64,
    pub deflection_deg: f64,
    pub hbar_omega: f64,
    pub beta: f64,
    pub lifetime_width: f64,
    pub window_cutoff: f64,

    pub mean_spacing: f64,
    pub m_max: u32,

    pub theta_points: usize,
    pub times: TimeSpec,

    pub provider: Provider,
    pub spectrum_kind: SpectrumKind,
    pub level_count: usize,
    pub traveling_mode: TravelingMode,

    pub window_deg: (f64, f64),
    pub qct_prefactor: f64,

    pub check_delta_j: Vec<u32>,
    pub check_t_max_fraction: f64,
    pub check_validity_fraction: f64,
    pub check_time_points: usize,
    pub check_realizations: usize,

    pub mc_realizations: usize,
    pub mc_times_fs: Vec<f64>,
    pub mc_thetas_deg: Vec<f64>,

    pub report_d_values: Vec<f64>,

    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spin_mean: 18.0,
            spin_window: 2.0,
            deflection_deg: 135.0,
            hbar_omega: 0.045,
            beta: 0.003,
            lifetime_width: 0.0,
            window_cutoff: 1e-8,
            mean_spacing: 1e-4,
            m_max: 20,
            theta_points: 721,
            times: TimeSpec::RotationPeriods(vec![0.125, 0.25, 0.375]),
            provider: Provider::Continuum,
            spectrum_kind: SpectrumKind::Goe,
            level_count: 300,
            traveling_mode: TravelingMode::Exact,
            window_deg: (2.0, 60.0),
            qct_prefactor: 2.0,
            check_delta_j: vec![1, 2, 3],
            check_t_max_fraction: 0.3,
            check_validity_fraction: 0.2,
            check_time_points: 61,
            check_realizations: 1,
            mc_realizations: 500,
            mc_times_fs: vec![0.0, 11.5, 34.5],
            mc_thetas_deg: vec![30.0, 90.0],
            report_d_values: vec![2.0, 5.0, 10.0],
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn cfg_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| cfg_err(key, format!("cannot parse '{v}'")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(',')
        .map(|s| scalar(key, s.trim()))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(cfg_err(key, "empty list"));
    }
    Ok(items)
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn mode_name(m: TravelingMode) -> &'static str {
    match m {
        TravelingMode::Exact => "exact",
        TravelingMode::Asymptotic => "asymptotic",
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        let mut time_keys = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(cfg_err(key, format!("repeated on line {}", lineno + 1)));
            }
            if key == "grid.times_fs" || key == "grid.times_in_T" {
                time_keys += 1;
            }
            cfg.set(key, value)?;
        }
        if time_keys > 1 {
            return Err(Error::Config("give either grid.times_fs or grid.times_in_T, not both".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "model.I" => self.spin_mean = scalar(key, v)?,
            "model.d" => self.spin_window = scalar(key, v)?,
            "model.phi_deg" => self.deflection_deg = scalar(key, v)?,
            "model.hbar_omega_eV" => self.hbar_omega = scalar(key, v)?,
            "model.beta_eV" => self.beta = scalar(key, v)?,
            "model.gamma_eV" => self.lifetime_width = scalar(key, v)?,
            "model.w_min" => self.window_cutoff = scalar(key, v)?,
            "kernel.D_eV" => self.mean_spacing = scalar(key, v)?,
            "kernel.m_max" => self.m_max = scalar(key, v)?,
            "grid.theta_points" => self.theta_points = scalar(key, v)?,
            "grid.times_fs" => self.times = TimeSpec::Femtoseconds(list(key, v)?),
            "grid.times_in_T" => self.times = TimeSpec::RotationPeriods(list(key, v)?),
            "provider" => self.provider = v.parse()?,
            "spectra.kind" => self.spectrum_kind = v.parse()?,
            "spectra.N" => self.level_count = scalar(key, v)?,
            "nearfar.mode" => {
                self.traveling_mode = match v {
                    "exact" => TravelingMode::Exact,
                    "asymptotic" => TravelingMode::Asymptotic,
                    _ => return Err(cfg_err(key, format!("unknown mode '{v}'"))),
                }
            }
            "analysis.window_deg" => {
                let w: Vec<f64> = list(key, v)?;
                if w.len() != 2 {
                    return Err(cfg_err(key, "expected 'lo, hi'"));
                }
                self.window_deg = (w[0], w[1]);
            }
            "analysis.qct_prefactor" => self.qct_prefactor = scalar(key, v)?,
            "kernel_check.delta_j" => self.check_delta_j = list(key, v)?,
            "kernel_check.t_max_fraction" => self.check_t_max_fraction = scalar(key, v)?,
            "kernel_check.validity_fraction" => self.check_validity_fraction = scalar(key, v)?,
            "kernel_check.time_points" => self.check_time_points = scalar(key, v)?,
            "kernel_check.realizations" => self.check_realizations = scalar(key, v)?,
            "mc.realizations" => self.mc_realizations = scalar(key, v)?,
            "mc.times_fs" => self.mc_times_fs = list(key, v)?,
            "mc.thetas_deg" => self.mc_thetas_deg = list(key, v)?,
            "report.d_values" => self.report_d_values = list(key, v)?,
            "output.directory" => self.output_dir = PathBuf::from(v),
            "output.format" => {
                if v != "csv" {
                    return Err(cfg_err(key, format!("unsupported format '{v}'")));
                }
            }
            "seed" => self.seed = scalar(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Re-checks every physical invariant and the run settings.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.model().map_err(wrap)?;
        self.kernel().map_err(wrap)?;
        for &d in &self.report_d_values {
            self.model_with_window(d).map_err(wrap)?;
        }
        if self.theta_points < 3 {
            return Err(cfg_err("grid.theta_points", "need at least 3"));
        }
        let times = match &self.times {
            TimeSpec::Femtoseconds(t) | TimeSpec::RotationPeriods(t) => t,
        };
        if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(cfg_err("grid.times", "times must be finite and >= 0"));
        }
        if matches!(self.times, TimeSpec::RotationPeriods(_)) && self.hbar_omega == 0.0 {
            return Err(cfg_err("grid.times_in_T", "needs ħω > 0"));
        }
        let (lo, hi) = self.window_deg;
        if !(0.0 < lo && lo < hi && hi < 180.0) {
            return Err(cfg_err("analysis.window_deg", "need 0 < lo < hi < 180"));
        }
        if !(self.qct_prefactor > 0.0) {
            return Err(cfg_err("analysis.qct_prefactor", "must be positive"));
        }
        if self.level_count < 10 {
            return Err(cfg_err("spectra.N", "need at least 10 levels"));
        }
        if self.check_delta_j.iter().any(|&d| d == 0) {
            return Err(cfg_err("kernel_check.delta_j", "ΔJ must be >= 1"));
        }
        if !(self.check_t_max_fraction > 0.0) || !(self.check_validity_fraction > 0.0) {
            return Err(cfg_err("kernel_check", "fractions must be positive"));
        }
        if self.check_time_points < 2 || self.check_realizations == 0 {
            return Err(cfg_err("kernel_check", "need >= 2 time points and >= 1 realization"));
        }
        if self.mc_realizations < 2 {
            return Err(cfg_err("mc.realizations", "need at least 2"));
        }
        if self.mc_times_fs.iter().any(|t| !(*t >= 0.0))
            || self.mc_thetas_deg.iter().any(|t| !(*t > 0.0 && *t < 180.0))
        {
            return Err(cfg_err("mc", "probe times must be >= 0 and angles inside (0, 180)"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParams> {
        self.model_with_window(self.spin_window)
    }

    /// The configured model with a different spin window `d`.
    pub fn model_with_window(&self, d: f64) -> Result<ModelParams> {
        ModelParams::new(
            self.spin_mean,
            d,
            self.deflection_deg.to_radians(),
            self.hbar_omega,
            self.beta,
        )?
        .with_lifetime_width(self.lifetime_width)?
        .with_window_cutoff(self.window_cutoff)
    }

    pub fn kernel(&self) -> Result<KernelParams> {
        KernelParams::new(self.mean_spacing, self.beta, self.hbar_omega)
    }

    /// Run times in fs.
    pub fn times_fs(&self) -> Result<Vec<f64>> {
        Ok(match &self.times {
            TimeSpec::Femtoseconds(t) => t.clone(),
            TimeSpec::RotationPeriods(f) => {
                let period = rotation_period(self.hbar_omega)?;
                f.iter().map(|x| x * period).collect()
            }
        })
    }

    /// The resolved configuration in the input format; parsing it gives back
    /// an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("model.I", self.spin_mean.to_string());
        kv("model.d", self.spin_window.to_string());
        kv("model.phi_deg", self.deflection_deg.to_string());
        kv("model.hbar_omega_eV", self.hbar_omega.to_string());
        kv("model.beta_eV", self.beta.to_string());
        kv("model.gamma_eV", self.lifetime_width.to_string());
        kv("model.w_min", self.window_cutoff.to_string());
        kv("kernel.D_eV", self.mean_spacing.to_string());
        kv("kernel.m_max", self.m_max.to_string());
        kv("grid.theta_points", self.theta_points.to_string());
        match &self.times {
            TimeSpec::Femtoseconds(t) => kv("grid.times_fs", join(t)),
            TimeSpec::RotationPeriods(t) => kv("grid.times_in_T", join(t)),
        }
        kv("provider", self.provider.to_string());
        kv("spectra.kind", self.spectrum_kind.to_string());
        kv("spectra.N", self.level_count.to_string());
        kv("nearfar.mode", mode_name(self.traveling_mode).to_string());
        kv("analysis.window_deg", join(&[self.window_deg.0, self.window_deg.1]));
        kv("analysis.qct_prefactor", self.qct_prefactor.to_string());
        kv("kernel_check.delta_j", join(&self.check_delta_j));
        kv("kernel_check.t_max_fraction", self.check_t_max_fraction.to_string());
        kv("kernel_check.validity_fraction", self.check_validity_fraction.to_string());
        kv("kernel_check.time_points", self.check_time_points.to_string());
        kv("kernel_check.realizations", self.check_realizations.to_string());
        kv("mc.realizations", self.mc_realizations.to_string());
        kv("mc.times_fs", join(&self.mc_times_fs));
        kv("mc.thetas_deg", join(&self.mc_thetas_deg));
        kv("report.d_values", join(&self.report_d_values));
        kv("output.directory", self.output_dir.display().to_string());
        kv("output.format", "csv".to_string());
        kv("seed", self.seed.to_string());
        s
    }
}
