//! Command-line front end. Every number written here comes from a library
//! call; this module only orchestrates and formats.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::analysis::{fringe_visibility, packet_fit, qct_time, rotation_period};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::specfun::AngleSample;
use crate::spectra::{
    derive_seed, spin_pair_factor_continuum, spin_pair_factor_poisson, spin_pair_series, Provider,
    SpectrumSet, SpinPairFactor,
};
use crate::units::HBAR_EV_FS;
use crate::wavepacket::{
    angle_grid, monte_carlo_power, nearfar_field, scaled_distribution, ModelParams, TravelingMode,
};

#[derive(Debug, Parser)]
#[command(name = "rotwave", version, about = "Rotational wave packets of decaying intermediate complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Run configuration (flat key = value file). Defaults apply without it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, overrides `output.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed, overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    pub plot_script: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Scaled power spectrum R = P/P_diag on the time × angle grid.
    Simulate,
    /// Near-side, far-side and classical-sum intensities.
    Nearfar,
    /// Numeric spin-pair sums against the continuum and Poisson-sum forms.
    KernelCheck,
    /// Monte-Carlo check of the uncorrelated-amplitude limit.
    McCheck,
    /// Visibility, packet fit and timescales over a sweep of d.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Nearfar => "nearfar",
            Command::KernelCheck => "kernel-check",
            Command::McCheck => "mc-check",
            Command::Report => "report",
        }
    }
}

/// An error together with the stage it came from.
#[derive(Debug)]
pub enum Failure {
    Config(Error),
    Run(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) | Failure::Run(e) => e.fmt(f),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("rotwave: {f}");
            f.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    let cfg = resolve_config(cli).map_err(Failure::Config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(Error::Config(format!("thread pool: {e}"))))?;
    pool.install(|| execute(cli.command, &cfg, cli.plot_script)).map_err(|e| match e {
        Error::Config(_) => Failure::Config(e),
        other => Failure::Run(other),
    })
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    Ok(cfg)
}

fn execute(cmd: Command, cfg: &RunConfig, plot: bool) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    write_meta(cfg, cmd)?;
    match cmd {
        Command::Simulate => simulate(cfg, plot),
        Command::Nearfar => nearfar(cfg, plot),
        Command::KernelCheck => kernel_check(cfg).map(|_| ()),
        Command::McCheck => mc_check(cfg).map(|_| ()),
        Command::Report => report(cfg),
    }
}

/// C-style `%.{precision}g`.
pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g(x: f64) -> String {
    format_g(x, 9)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

fn write_meta(cfg: &RunConfig, cmd: Command) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# rotwave {} {}", env!("CARGO_PKG_VERSION"), cmd.name());
    let _ = writeln!(s, "# hbar_eV_fs = {HBAR_EV_FS}");
    if let Ok(mp) = cfg.model() {
        let (lo, hi) = mp.spin_range();
        let _ = writeln!(s, "# spin_range = {lo}..{hi}");
    }
    s.push_str(&cfg.to_text());
    fs::write(cfg.output_dir.join("meta.txt"), s)?;
    Ok(())
}

/// The configured spin-pair factor for `mp`. The numeric provider draws one
/// spectrum per spin from the run seed and saves it as `spectra.txt`.
pub fn build_factor(cfg: &RunConfig, mp: &ModelParams) -> Result<SpinPairFactor> {
    let kernel = cfg.kernel()?;
    Ok(match cfg.provider {
        Provider::Universal => SpinPairFactor::Universal,
        Provider::Continuum => SpinPairFactor::Continuum(kernel),
        Provider::PoissonSum => SpinPairFactor::PoissonSum { kernel, m_max: cfg.m_max },
        Provider::Numeric => {
            kernel.check_window(cfg.level_count, mp.spin_count() as u32 - 1);
            let spectra = SpectrumSet::generate(
                cfg.spectrum_kind,
                mp.spins(),
                cfg.level_count,
                cfg.mean_spacing,
                cfg.seed,
            )?;
            fs::create_dir_all(&cfg.output_dir)?;
            spectra.write_table(create(&cfg.output_dir, "spectra.txt")?)?;
            SpinPairFactor::Numeric { kernel, spectra: Arc::new(spectra) }
        }
    })
}

fn grid_deg(grid: &[AngleSample]) -> Vec<f64> {
    grid.iter().map(|a| a.theta().to_degrees()).collect()
}

fn simulate(cfg: &RunConfig, plot: bool) -> Result<()> {
    let mp = cfg.model()?;
    let factor = build_factor(cfg, &mp)?;
    let times = cfg.times_fs()?;
    let grid = angle_grid(cfg.theta_points)?;
    let field = scaled_distribution(&mp, &factor, &times, &grid)?;
    let deg = grid_deg(&grid);
    let mut w = create(&cfg.output_dir, "distribution.csv")?;
    writeln!(w, "time_fs,theta_deg,R")?;
    for (i, &t) in times.iter().enumerate() {
        for (k, &th) in deg.iter().enumerate() {
            writeln!(w, "{},{},{}", g(t), g(th), g(field.get(i, k)))?;
        }
    }
    w.flush()?;
    if plot {
        write_plot(cfg, "distribution.csv", &times, &[(3, "R")])?;
    }
    println!("simulate: {} rows -> {}", times.len() * deg.len(), cfg.output_dir.join("distribution.csv").display());
    Ok(())
}

fn nearfar(cfg: &RunConfig, plot: bool) -> Result<()> {
    let mp = cfg.model()?;
    let factor = build_factor(cfg, &mp)?;
    let times = cfg.times_fs()?;
    let grid = angle_grid(cfg.theta_points)?;
    let field = nearfar_field(&mp, &factor, &times, &grid, cfg.traveling_mode)?;
    let deg = grid_deg(&grid);
    let mut w = create(&cfg.output_dir, "nearfar.csv")?;
    writeln!(w, "time_fs,theta_deg,Rplus,Rminus,Rclassical,Rcross,diag_ratio")?;
    for (i, &t) in times.iter().enumerate() {
        for (k, &th) in deg.iter().enumerate() {
            let p = field.get(i, k);
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                g(t),
                g(th),
                g(p.r_plus()),
                g(p.r_minus()),
                g(p.r_classical()),
                g(p.r_cross()),
                g(p.diag_ratio())
            )?;
        }
    }
    w.flush()?;
    if plot {
        write_plot(cfg, "nearfar.csv", &times, &[(5, "Rclassical"), (3, "Rplus"), (4, "Rminus")])?;
    }
    println!("nearfar: {} rows -> {}", times.len() * deg.len(), cfg.output_dir.join("nearfar.csv").display());
    Ok(())
}

fn write_plot(cfg: &RunConfig, csv: &str, times: &[f64], columns: &[(usize, &str)]) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel 'theta (deg)'");
    let _ = writeln!(s, "set xrange [0:180]");
    let _ = writeln!(s, "set multiplot layout {},1", times.len());
    for &t in times {
        let _ = writeln!(s, "set title 't = {} fs'", g(t));
        let parts: Vec<String> = columns
            .iter()
            .map(|(c, name)| {
                format!("'{csv}' using 2:(abs($1-{t})<1e-6*(1+{t}) ? ${c} : 1/0) with lines title '{name}'", t = g(t))
            })
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    fs::write(cfg.output_dir.join(csv.replace(".csv", ".gp")), s)?;
    Ok(())
}

/// Deviation statistics of the numeric spin-pair sums inside the validity
/// window `t <= validity_fraction · 2πħ/D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheckSummary {
    pub max_dev_continuum: f64,
    pub mean_dev_continuum: f64,
    pub max_dev_poisson: f64,
    pub mean_dev_poisson: f64,
    pub samples: usize,
}

/// Runs the kernel comparison and writes `kernel_check.csv`.
pub fn kernel_check(cfg: &RunConfig) -> Result<KernelCheckSummary> {
    let kp = cfg.kernel()?;
    let period = kp.recurrence_time();
    let max_dj = *cfg.check_delta_j.iter().max().expect("non-empty");
    kp.check_window(cfg.level_count, max_dj);
    let n_t = cfg.check_time_points;
    let times: Vec<f64> = (0..n_t)
        .map(|k| k as f64 / (n_t - 1) as f64 * cfg.check_t_max_fraction * period)
        .collect();
    let t_valid = cfg.check_validity_fraction * period;

    struct Row {
        realization: usize,
        dj: u32,
        t: f64,
        numeric: num_complex::Complex64,
        continuum: num_complex::Complex64,
        poisson: num_complex::Complex64,
    }
    let rows: Vec<Vec<Row>> = (0..cfg.check_realizations)
        .into_par_iter()
        .map(|r| {
            let spectra = SpectrumSet::generate(
                cfg.spectrum_kind,
                0..=max_dj,
                cfg.level_count,
                cfg.mean_spacing,
                derive_seed(cfg.seed, r as u64),
            )?;
            let mut out = Vec::new();
            for &dj in &cfg.check_delta_j {
                let num = spin_pair_series(&times, spectra.levels(dj)?, spectra.levels(0)?, dj as i32, &kp)?;
                for (&t, numeric) in times.iter().zip(num) {
                    out.push(Row {
                        realization: r,
                        dj,
                        t,
                        numeric,
                        continuum: spin_pair_factor_continuum(t, dj, 0, &kp)?,
                        poisson: spin_pair_factor_poisson(t, dj, 0, &kp, cfg.m_max)?,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut w = create(&cfg.output_dir, "kernel_check.csv")?;
    writeln!(
        w,
        "realization,delta_j,time_fs,numeric_re,numeric_im,continuum_re,continuum_im,poisson_re,poisson_im,dev_continuum,dev_poisson"
    )?;
    let (mut max_c, mut sum_c, mut max_p, mut sum_p, mut count) = (0.0f64, 0.0, 0.0f64, 0.0, 0usize);
    for row in rows.iter().flatten() {
        let dc = (row.numeric - row.continuum).norm();
        let dp = (row.numeric - row.poisson).norm();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.realization,
            row.dj,
            g(row.t),
            g(row.numeric.re),
            g(row.numeric.im),
            g(row.continuum.re),
            g(row.continuum.im),
            g(row.poisson.re),
            g(row.poisson.im),
            g(dc),
            g(dp)
        )?;
        if row.t <= t_valid {
            max_c = max_c.max(dc);
            max_p = max_p.max(dp);
            sum_c += dc;
            sum_p += dp;
            count += 1;
        }
    }
    w.flush()?;
    let summary = KernelCheckSummary {
        max_dev_continuum: max_c,
        mean_dev_continuum: sum_c / count.max(1) as f64,
        max_dev_poisson: max_p,
        mean_dev_poisson: sum_p / count.max(1) as f64,
        samples: count,
    };
    println!(
        "kernel-check: {} spectra, t <= {} fs: |numeric-continuum| max {} mean {}; |numeric-poisson_sum| max {} mean {}",
        cfg.spectrum_kind,
        g(t_valid),
        g(summary.max_dev_continuum),
        g(summary.mean_dev_continuum),
        g(summary.max_dev_poisson),
        g(summary.mean_dev_poisson)
    );
    Ok(summary)
}

/// One Monte-Carlo probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McProbe {
    pub time_fs: f64,
    pub theta_deg: f64,
    pub mean_ratio: f64,
    pub std_error: f64,
    pub pass: bool,
}

/// Fewer realizations than this are flagged as low statistical power.
pub const MC_LOW_POWER: usize = 30;

/// Runs the Monte-Carlo probes and writes `mc_check.csv`.
pub fn mc_check(cfg: &RunConfig) -> Result<Vec<McProbe>> {
    let mp = cfg.model()?;
    let spectra = SpectrumSet::generate(
        cfg.spectrum_kind,
        mp.spins(),
        cfg.level_count,
        cfg.mean_spacing,
        cfg.seed,
    )?;
    let mut probes = Vec::new();
    for &t in &cfg.mc_times_fs {
        for &th in &cfg.mc_thetas_deg {
            let sub = derive_seed(cfg.seed, 1 + probes.len() as u64);
            let est = monte_carlo_power(&mp, &spectra, sub, cfg.mc_realizations, t, AngleSample::from_degrees(th)?)?;
            let (m, se) = (est.ratio(), est.ratio_std_error());
            probes.push(McProbe { time_fs: t, theta_deg: th, mean_ratio: m, std_error: se, pass: (m - 1.0).abs() < 3.0 * se });
        }
    }
    let mut w = create(&cfg.output_dir, "mc_check.csv")?;
    writeln!(w, "time_fs,theta_deg,mean_R,std_error,pass")?;
    for p in &probes {
        writeln!(w, "{},{},{},{},{}", g(p.time_fs), g(p.theta_deg), g(p.mean_ratio), g(p.std_error), p.pass)?;
    }
    w.flush()?;
    let low = cfg.mc_realizations < MC_LOW_POWER;
    for p in &probes {
        println!(
            "mc-check: t={} fs theta={} deg <R>={} se={} {}{}",
            g(p.time_fs),
            g(p.theta_deg),
            g(p.mean_ratio),
            g(p.std_error),
            if p.pass { "PASS" } else { "FAIL" },
            if low { " (low power)" } else { "" }
        );
    }
    Ok(probes)
}

fn report(cfg: &RunConfig) -> Result<()> {
    let times = cfg.times_fs()?;
    let grid = angle_grid(cfg.theta_points)?;
    let thetas: Vec<f64> = grid.iter().map(AngleSample::theta).collect();
    let window = (cfg.window_deg.0.to_radians(), cfg.window_deg.1.to_radians());
    let period = rotation_period(cfg.hbar_omega)?;
    let mut w = create(&cfg.output_dir, "report.csv")?;
    writeln!(
        w,
        "d,time_fs,t_over_T,visibility,n_extrema,packet_center_deg,packet_sigma_deg,packet_dispersion_deg,packet_goodness,t_qct_fs,T_fs,t_over_tqct"
    )?;
    for &d in &cfg.report_d_values {
        let mp = cfg.model_with_window(d)?;
        let factor = build_factor(cfg, &mp)?;
        let mode = if mp.spin_range().0 == 0 { TravelingMode::Exact } else { cfg.traveling_mode };
        let field = nearfar_field(&mp, &factor, &times, &grid, mode)?;
        let t_qct = qct_time(cfg.beta, d, cfg.qct_prefactor)?;
        for (i, &t) in times.iter().enumerate() {
            let r: Vec<f64> = field.row(i).iter().map(|p| p.r()).collect();
            let near: Vec<f64> = field.row(i).iter().map(|p| p.r_minus()).collect();
            let vis = fringe_visibility(&r, &thetas, window)?;
            let fit = packet_fit(&near, &thetas)?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                g(d),
                g(t),
                g(t / period),
                g(vis.visibility),
                vis.n_extrema(),
                g(fit.center.to_degrees()),
                g(fit.width_sigma.to_degrees()),
                g(fit.dispersion().to_degrees()),
                g(fit.goodness),
                g(t_qct),
                g(period),
                g(t / t_qct)
            )?;
        }
    }
    w.flush()?;
    println!("report: -> {}", cfg.output_dir.join("report.csv").display());
    Ok(())
}
