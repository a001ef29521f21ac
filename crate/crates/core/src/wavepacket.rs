//! Angular power spectrum of the decaying rotating complex.
//!
//! With amplitudes `a_J = (2J+1) W(J)^½` the power spectrum is the Hermitian
//! double sum
//!
//! ```text
//! P(t,θ) = Σ_{JJ'} a_J a_J' C(t,J,J') e^{iΦ(J−J')} f_J(θ) conj f_J'(θ)
//! ```
//!
//! with `f_J = P_J` for the full spectrum and `f_J = Q_J^(±)` for the near-
//! and far-side intensities. No normalization constant is applied; every
//! observable downstream is a ratio.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::specfun::{
    legendre_p_ladder, traveling_q_asymptotic_range, traveling_q_ladder, AngleSample, Branch,
};
use crate::spectra::{derive_seed, KernelParams, SpectrumSet, SpinPairFactor};
use crate::units::HBAR_EV_FS;

/// Relative size of the imaginary residue tolerated in an assembled sum.
const REALNESS_TOL: f64 = 1e-10;
/// Below this the diagonal baseline is treated as underflowed.
const DIAG_FLOOR: f64 = 1e-300;

/// Physical parameters of the rotating complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    spin_mean: f64,
    spin_window: f64,
    deflection: f64,
    hbar_omega: f64,
    beta: f64,
    lifetime_width: f64,
    window_cutoff: f64,
    j_lo: u32,
    j_hi: u32,
}

impl ModelParams {
    /// `deflection` in radians, energies in eV. Lifetime envelope disabled,
    /// window cutoff `1e-8`.
    pub fn new(
        spin_mean: f64,
        spin_window: f64,
        deflection: f64,
        hbar_omega: f64,
        beta: f64,
    ) -> Result<Self> {
        Self::build(spin_mean, spin_window, deflection, hbar_omega, beta, 0.0, 1e-8)
    }

    /// The `d → 0` limit: only `J = j` contributes.
    pub fn single_spin(j: u32, deflection: f64, hbar_omega: f64, beta: f64) -> Result<Self> {
        Self::new(j as f64, 1e-3, deflection, hbar_omega, beta)
    }

    pub fn with_lifetime_width(self, gamma: f64) -> Result<Self> {
        Self::build(
            self.spin_mean,
            self.spin_window,
            self.deflection,
            self.hbar_omega,
            self.beta,
            gamma,
            self.window_cutoff,
        )
    }

    pub fn with_window_cutoff(self, w_min: f64) -> Result<Self> {
        Self::build(
            self.spin_mean,
            self.spin_window,
            self.deflection,
            self.hbar_omega,
            self.beta,
            self.lifetime_width,
            w_min,
        )
    }

    fn build(
        spin_mean: f64,
        spin_window: f64,
        deflection: f64,
        hbar_omega: f64,
        beta: f64,
        lifetime_width: f64,
        window_cutoff: f64,
    ) -> Result<Self> {
        if !(spin_mean >= 0.0 && spin_mean.is_finite()) {
            return domain(format!("spin mean I must be finite and >= 0, got {spin_mean}"));
        }
        if !(spin_window > 0.0 && spin_window.is_finite()) {
            return domain(format!("spin window d must be positive, got {spin_window}"));
        }
        if !deflection.is_finite() {
            return domain("deflection angle must be finite");
        }
        if !(hbar_omega >= 0.0 && hbar_omega.is_finite()) {
            return domain(format!("ħω must be >= 0, got {hbar_omega}"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("β must be positive, got {beta}"));
        }
        if !(lifetime_width >= 0.0 && lifetime_width.is_finite()) {
            return domain(format!("Γ must be >= 0, got {lifetime_width}"));
        }
        if !(window_cutoff > 0.0 && window_cutoff < 1.0) {
            return domain(format!("window cutoff must lie in (0, 1), got {window_cutoff}"));
        }
        let reach = spin_window * (1.0 / window_cutoff).ln().sqrt();
        let lo = (spin_mean - reach).ceil().max(0.0);
        let hi = (spin_mean + reach).floor();
        if hi < lo {
            return domain(format!(
                "no integer spin within the window I={spin_mean}, d={spin_window}"
            ));
        }
        if hi > 10_000.0 {
            return domain(format!("spin range up to {hi} is too large"));
        }
        Ok(Self {
            spin_mean,
            spin_window,
            deflection,
            hbar_omega,
            beta,
            lifetime_width,
            window_cutoff,
            j_lo: lo as u32,
            j_hi: hi as u32,
        })
    }

    pub fn spin_mean(&self) -> f64 {
        self.spin_mean
    }

    pub fn spin_window(&self) -> f64 {
        self.spin_window
    }

    /// Radians.
    pub fn deflection(&self) -> f64 {
        self.deflection
    }

    pub fn hbar_omega(&self) -> f64 {
        self.hbar_omega
    }

    /// Angular velocity `ω` in rad/fs.
    pub fn omega(&self) -> f64 {
        self.hbar_omega / HBAR_EV_FS
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lifetime_width(&self) -> f64 {
        self.lifetime_width
    }

    pub fn window_cutoff(&self) -> f64 {
        self.window_cutoff
    }

    /// Truncated spin range `[J_lo, J_hi]`: every spin outside it has
    /// `W(J) < w_min`.
    pub fn spin_range(&self) -> (u32, u32) {
        (self.j_lo, self.j_hi)
    }

    pub fn spins(&self) -> RangeInclusive<u32> {
        self.j_lo..=self.j_hi
    }

    pub fn spin_count(&self) -> usize {
        (self.j_hi - self.j_lo + 1) as usize
    }

    /// Kernel parameters sharing this model's `β` and `ħω`.
    pub fn kernel(&self, mean_spacing: f64) -> Result<KernelParams> {
        KernelParams::new(mean_spacing, self.beta, self.hbar_omega)
    }
}

/// `W(J) = exp[−(J−I)²/d²]`.
pub fn gaussian_window(j: u32, mp: &ModelParams) -> f64 {
    let x = (j as f64 - mp.spin_mean) / mp.spin_window;
    (-x * x).exp()
}

/// `H(t) exp(−tΓ/ħ)`; identically 1 for `t >= 0` when `Γ = 0`.
pub fn lifetime_envelope(t: f64, mp: &ModelParams) -> f64 {
    if t < 0.0 {
        0.0
    } else if mp.lifetime_width == 0.0 {
        1.0
    } else {
        (-t * mp.lifetime_width / HBAR_EV_FS).exp()
    }
}

/// Which traveling functions to use for the near/far split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TravelingMode {
    /// `½[P_J ∓ (2i/π) Q_J]` from the recurrences.
    Exact,
    /// The semiclassical form; needs `J_lo >= 1`.
    Asymptotic,
}

/// Values on a `times × thetas` grid, row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularField<T = f64> {
    times: Vec<f64>,
    thetas: Vec<f64>,
    values: Vec<T>,
}

impl<T: Copy> AngularField<T> {
    pub fn new(times: Vec<f64>, thetas: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if values.len() != times.len() * thetas.len() {
            return Err(Error::Grid(format!(
                "{} values for a {}×{} grid",
                values.len(),
                times.len(),
                thetas.len()
            )));
        }
        Ok(Self { times, thetas, values })
    }

    /// Times in fs.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Angles in radians.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, time_index: usize) -> &[T] {
        let n = self.thetas.len();
        &self.values[time_index * n..(time_index + 1) * n]
    }

    pub fn get(&self, time_index: usize, theta_index: usize) -> T {
        self.values[time_index * self.thetas.len() + theta_index]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> AngularField<U> {
        AngularField {
            times: self.times.clone(),
            thetas: self.thetas.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// `points` angles at the midpoints of equal steps across `(0°, 180°)`, so
/// neither endpoint is sampled.
pub fn angle_grid(points: usize) -> Result<Vec<AngleSample>> {
    if points == 0 {
        return Err(Error::Grid("angle grid needs at least one point".into()));
    }
    let step = PI / points as f64;
    (0..points).map(|k| AngleSample::new((k as f64 + 0.5) * step)).collect()
}

fn amplitudes(mp: &ModelParams) -> Vec<Complex64> {
    mp.spins()
        .map(|j| {
            let a = (2.0 * j as f64 + 1.0) * gaussian_window(j, mp).sqrt();
            Complex64::from_polar(a, mp.deflection * j as f64)
        })
        .collect()
}

fn legendre_vector(mp: &ModelParams, amps: &[Complex64], theta: AngleSample) -> Result<Vec<Complex64>> {
    let p = legendre_p_ladder(mp.j_hi, theta.x())?;
    Ok(amps.iter().zip(&p[mp.j_lo as usize..]).map(|(a, &p)| a * p).collect())
}

fn traveling_vector(
    mp: &ModelParams,
    amps: &[Complex64],
    theta: AngleSample,
    branch: Branch,
    mode: TravelingMode,
) -> Result<Vec<Complex64>> {
    let q = match mode {
        TravelingMode::Exact => {
            let mut q = traveling_q_ladder(mp.j_hi, theta, branch)?;
            q.drain(..mp.j_lo as usize);
            q
        }
        TravelingMode::Asymptotic => {
            if mp.j_lo == 0 {
                return domain("asymptotic traveling functions need J >= 1; spin range starts at 0");
            }
            traveling_q_asymptotic_range(mp.j_lo, mp.j_hi, theta, branch)?
        }
    };
    Ok(amps.iter().zip(&q).map(|(a, q)| a * q).collect())
}

/// `Σ_{rs} u_r C_rs conj(w_s)` for row-major `C`.
fn bilinear(u: &[Complex64], c: &[Complex64], w: &[Complex64]) -> Complex64 {
    let n = u.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, ur) in u.iter().enumerate() {
        let row = &c[r * n..(r + 1) * n];
        let inner: Complex64 = row.iter().zip(w).map(|(c, w)| c * w.conj()).sum();
        acc += ur * inner;
    }
    acc
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Real part of a Hermitian sum, after checking the residue against
/// `max(|Re|, scale)`.
fn hermitian_real(z: Complex64, scale: f64, what: &str) -> Result<f64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Numerical(format!("{what} is not finite")));
    }
    if z.im.abs() > REALNESS_TOL * z.re.abs().max(scale) {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {:e} against real part {:e}",
            z.im, z.re
        )));
    }
    Ok(z.re)
}

/// Clamps round-off negatives of a quadratic form to zero; a genuinely
/// negative value is reported.
fn nonnegative(re: f64, diag: f64, what: &str) -> Result<f64> {
    if re < -1e-12 * diag {
        return Err(Error::Numerical(format!("{what} = {re:e} is negative (diagonal {diag:e})")));
    }
    Ok(re.max(0.0))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be finite and non-negative, got {t} fs"));
    }
    Ok(())
}

fn factor_matrix(mp: &ModelParams, factor: &SpinPairFactor, t: f64) -> Result<Vec<Complex64>> {
    check_time(t)?;
    factor.matrix(t, mp.j_lo, mp.j_hi)
}

fn quadratic(v: &[Complex64], c: &[Complex64], what: &str) -> Result<f64> {
    let diag = norm_sqr(v);
    let re = hermitian_real(bilinear(v, c, v), diag, what)?;
    nonnegative(re, diag, what)
}

/// Full power spectrum `P(t,θ)`.
pub fn power_spectrum(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    t: f64,
    theta: AngleSample,
) -> Result<f64> {
    let c = factor_matrix(mp, factor, t)?;
    let v = legendre_vector(mp, &amplitudes(mp), theta)?;
    quadratic(&v, &c, "P(t,θ)")
}

/// `H(t) e^{−t/t_lt} P(t,θ)`: the decay probability including the finite
/// lifetime of the complex.
pub fn time_power(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    t: f64,
    theta: AngleSample,
) -> Result<f64> {
    Ok(lifetime_envelope(t, mp) * power_spectrum(mp, factor, t, theta)?)
}

/// Time-independent diagonal part `Σ_J (2J+1)² W(J) P_J(θ)²`.
pub fn diag_power(mp: &ModelParams, theta: AngleSample) -> Result<f64> {
    Ok(norm_sqr(&legendre_vector(mp, &amplitudes(mp), theta)?))
}

/// `|𝒫^(b)(t,θ)|²` built from traveling functions of one branch.
pub fn nearfar_power(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    t: f64,
    theta: AngleSample,
    branch: Branch,
    mode: TravelingMode,
) -> Result<f64> {
    let c = factor_matrix(mp, factor, t)?;
    let v = traveling_vector(mp, &amplitudes(mp), theta, branch, mode)?;
    quadratic(&v, &c, "P^(±)(t,θ)")
}

/// Diagonal part of [`nearfar_power`], `Σ_J (2J+1)² W(J) |Q_J^(b)(θ)|²`.
pub fn nearfar_diag(
    mp: &ModelParams,
    theta: AngleSample,
    branch: Branch,
    mode: TravelingMode,
) -> Result<f64> {
    Ok(norm_sqr(&traveling_vector(mp, &amplitudes(mp), theta, branch, mode)?))
}

/// `𝒫^(+)(t,θ) conj 𝒫^(−)(t,θ)` averaged over the spectrum. Swapping the
/// branches conjugates it.
pub fn cross_term(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    t: f64,
    theta: AngleSample,
    mode: TravelingMode,
) -> Result<Complex64> {
    let c = factor_matrix(mp, factor, t)?;
    let amps = amplitudes(mp);
    let plus = traveling_vector(mp, &amps, theta, Branch::Plus, mode)?;
    let minus = traveling_vector(mp, &amps, theta, Branch::Minus, mode)?;
    Ok(bilinear(&plus, &c, &minus))
}

fn factor_matrices(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    times.par_iter().map(|&t| factor_matrix(mp, factor, t)).collect()
}

fn theta_values(thetas: &[AngleSample]) -> Vec<f64> {
    thetas.iter().map(AngleSample::theta).collect()
}

/// Raw full power spectrum on a grid.
pub fn power_field(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    times: &[f64],
    thetas: &[AngleSample],
) -> Result<AngularField> {
    let amps = amplitudes(mp);
    let vecs: Vec<Vec<Complex64>> = thetas
        .par_iter()
        .map(|&th| legendre_vector(mp, &amps, th))
        .collect::<Result<_>>()?;
    let mats = factor_matrices(mp, factor, times)?;
    let n = thetas.len();
    let values = (0..times.len() * n)
        .into_par_iter()
        .map(|idx| quadratic(&vecs[idx % n], &mats[idx / n], "P(t,θ)"))
        .collect::<Result<Vec<f64>>>()?;
    AngularField::new(times.to_vec(), theta_values(thetas), values)
}

/// `R(t,θ) = P(t,θ) / P_diag(θ)`.
pub fn scaled_distribution(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    times: &[f64],
    thetas: &[AngleSample],
) -> Result<AngularField> {
    let diag: Vec<f64> = thetas.iter().map(|&th| diag_power(mp, th)).collect::<Result<_>>()?;
    if let Some(k) = diag.iter().position(|&d| !(d > DIAG_FLOOR)) {
        return Err(Error::Grid(format!(
            "diagonal power underflows at θ = {:.6}°",
            thetas[k].theta().to_degrees()
        )));
    }
    let p = power_field(mp, factor, times, thetas)?;
    let n = thetas.len();
    let values = p.values.iter().enumerate().map(|(idx, v)| v / diag[idx % n]).collect();
    AngularField::new(p.times, p.thetas, values)
}

/// All near/far quantities at one grid point, unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFarPoint {
    pub full: f64,
    pub plus: f64,
    pub minus: f64,
    /// `𝒫^(+) conj 𝒫^(−)`.
    pub cross: Complex64,
    pub full_diag: f64,
    pub plus_diag: f64,
    pub minus_diag: f64,
}

impl NearFarPoint {
    /// `P / P_diag`.
    pub fn r(&self) -> f64 {
        self.full / self.full_diag
    }

    pub fn r_plus(&self) -> f64 {
        self.plus / self.plus_diag
    }

    pub fn r_minus(&self) -> f64 {
        self.minus / self.minus_diag
    }

    /// `(P⁺ + P⁻) / (P⁺_diag + P⁻_diag)`: the fringe-free classical sum.
    pub fn r_classical(&self) -> f64 {
        (self.plus + self.minus) / (self.plus_diag + self.minus_diag)
    }

    /// `2 Re X / P_diag`.
    pub fn r_cross(&self) -> f64 {
        2.0 * self.cross.re / self.full_diag
    }

    /// `(P⁺_diag + P⁻_diag) / P_diag`, so that
    /// `R = r_classical · diag_ratio + r_cross`.
    pub fn diag_ratio(&self) -> f64 {
        (self.plus_diag + self.minus_diag) / self.full_diag
    }

    /// `|P⁺ + P⁻ + 2 Re X − P| / P_diag`.
    pub fn sum_rule_residual(&self) -> f64 {
        (self.plus + self.minus + 2.0 * self.cross.re - self.full).abs() / self.full_diag
    }
}

/// Full, near-side and far-side power with their diagonal baselines on a grid.
/// Every angle must lie strictly inside `(0, π)`.
pub fn nearfar_field(
    mp: &ModelParams,
    factor: &SpinPairFactor,
    times: &[f64],
    thetas: &[AngleSample],
    mode: TravelingMode,
) -> Result<AngularField<NearFarPoint>> {
    struct Basis {
        p: Vec<Complex64>,
        plus: Vec<Complex64>,
        minus: Vec<Complex64>,
        diag: [f64; 3],
    }
    let amps = amplitudes(mp);
    let bases: Vec<Basis> = thetas
        .par_iter()
        .map(|&th| {
            let p = legendre_vector(mp, &amps, th)?;
            let plus = traveling_vector(mp, &amps, th, Branch::Plus, mode)?;
            let minus = traveling_vector(mp, &amps, th, Branch::Minus, mode)?;
            let diag = [norm_sqr(&p), norm_sqr(&plus), norm_sqr(&minus)];
            if diag.iter().any(|&d| !(d > DIAG_FLOOR)) {
                return Err(Error::Grid(format!(
                    "diagonal power underflows at θ = {:.6}°",
                    th.theta().to_degrees()
                )));
            }
            Ok(Basis { p, plus, minus, diag })
        })
        .collect::<Result<_>>()?;
    let mats = factor_matrices(mp, factor, times)?;
    let n = thetas.len();
    let values = (0..times.len() * n)
        .into_par_iter()
        .map(|idx| {
            let (b, c) = (&bases[idx % n], &mats[idx / n]);
            Ok(NearFarPoint {
                full: quadratic(&b.p, c, "P(t,θ)")?,
                plus: quadratic(&b.plus, c, "P^(+)(t,θ)")?,
                minus: quadratic(&b.minus, c, "P^(−)(t,θ)")?,
                cross: bilinear(&b.plus, c, &b.minus),
                full_diag: b.diag[0],
                plus_diag: b.diag[1],
                minus_diag: b.diag[2],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AngularField::new(times.to_vec(), theta_values(thetas), values)
}

/// Ensemble estimate of `|𝒫(t,θ)|²` over random decay coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub realizations: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `P_diag(θ)`, the expected value of the mean.
    pub diag: f64,
}

impl McEstimate {
    /// Mean of `R = P / P_diag`.
    pub fn ratio(&self) -> f64 {
        self.mean / self.diag
    }

    pub fn ratio_std_error(&self) -> f64 {
        self.std_error / self.diag
    }
}

struct McSetup {
    /// `a_J e^{iΦJ} P_J(θ) / √N` per spin.
    weights: Vec<Complex64>,
    /// `exp(−iE_μ^J t/ħ)` per spin.
    phases: Vec<Vec<Complex64>>,
    diag: f64,
}

fn mc_setup(mp: &ModelParams, spectra: &SpectrumSet, t: f64, theta: AngleSample) -> Result<McSetup> {
    check_time(t)?;
    let v = legendre_vector(mp, &amplitudes(mp), theta)?;
    let mut phases = Vec::with_capacity(v.len());
    let mut n_levels = None;
    for j in mp.spins() {
        let levels = spectra.levels(j)?;
        if *n_levels.get_or_insert(levels.len()) != levels.len() {
            return Err(Error::Domain("spectra have unequal level counts".into()));
        }
        phases.push(
            levels
                .iter()
                .map(|e| Complex64::from_polar(1.0, -e * t / HBAR_EV_FS))
                .collect(),
        );
    }
    let n = n_levels.unwrap_or(0);
    if n == 0 {
        return Err(Error::Domain("empty spectra".into()));
    }
    let scale = (n as f64).sqrt().recip();
    Ok(McSetup { weights: v.iter().map(|z| z * scale).collect(), phases, diag: norm_sqr(&v) })
}

fn mc_realization(setup: &McSetup, seed: u64, realization: u64) -> f64 {
    let mut rng = crate::spectra::rng_for(derive_seed(seed, realization));
    let mut amp = Complex64::new(0.0, 0.0);
    for (w, phases) in setup.weights.iter().zip(&setup.phases) {
        let s: Complex64 = phases
            .iter()
            .map(|ph| {
                let c: f64 = StandardNormal.sample(&mut rng);
                ph * c
            })
            .sum();
        amp += w * s;
    }
    amp.norm_sqr()
}

/// One realization of `|𝒫(t,θ)|²` with i.i.d. standard-normal coefficients
/// `c̃_μ^J`. Deterministic in `(seed, realization)`.
pub fn monte_carlo_sample(
    mp: &ModelParams,
    spectra: &SpectrumSet,
    seed: u64,
    realization: u64,
    t: f64,
    theta: AngleSample,
) -> Result<f64> {
    Ok(mc_realization(&mc_setup(mp, spectra, t, theta)?, seed, realization))
}

/// Mean and standard error of `|𝒫(t,θ)|²` over `n_realizations >= 2`
/// independent coefficient draws. Without correlations between the
/// coefficients the mean tends to `P_diag(θ)`.
pub fn monte_carlo_power(
    mp: &ModelParams,
    spectra: &SpectrumSet,
    seed: u64,
    n_realizations: usize,
    t: f64,
    theta: AngleSample,
) -> Result<McEstimate> {
    if n_realizations < 2 {
        return domain(format!("need at least 2 realizations, got {n_realizations}"));
    }
    let setup = mc_setup(mp, spectra, t, theta)?;
    let samples: Vec<f64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| mc_realization(&setup, seed, r))
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { realizations: n_realizations, mean, std_error: (var / n).sqrt(), diag: setup.diag })
}
