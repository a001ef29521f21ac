//! Resonance-averaged correlation kernel and the spin-pair factor
//! `C(t, J, J')`.
//!
//! The kernel between levels of different spin is a Lorentzian in the energy
//! difference centred on the rotational shift `ħω ΔJ`, with width `β |ΔJ|`:
//!
//! ```text
//! K(ΔE, ΔJ) = (1/π) D β |ΔJ| / [(ΔE − ħω ΔJ)² + β² ΔJ²]
//! ```
//!
//! Summing it against `exp(−iΔE t/ħ)` over a spectrum gives `C`. Three
//! realizations are provided and must agree in their common domain:
//!
//! * [`spin_pair_sum_numeric`]: the normalized double sum over two given level
//!   lists.
//! * [`spin_pair_factor_continuum`]: the continuous-spectrum limit
//!   `exp(−iωtΔJ) exp(−βt|ΔJ|/ħ)`.
//! * [`spin_pair_factor_poisson`]: the equidistant-spectrum sum after Poisson
//!   resummation, periodic in `t` with period `2πħ/D`.
//!
//! [`lattice_sum_equidistant`] sums the equidistant series directly (no
//! resummation) and is the independent cross-check of the Poisson form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::units::HBAR_EV_FS;

/// Energy scales of the kernel, all in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    mean_spacing: f64,
    beta: f64,
    hbar_omega: f64,
}

impl KernelParams {
    pub fn new(mean_spacing: f64, beta: f64, hbar_omega: f64) -> Result<Self> {
        if !(mean_spacing > 0.0 && mean_spacing.is_finite()) {
            return domain(format!("mean spacing D must be positive, got {mean_spacing}"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("phase relaxation width β must be positive, got {beta}"));
        }
        if !hbar_omega.is_finite() {
            return domain("ħω must be finite");
        }
        if beta / mean_spacing < 5.0 {
            log::warn!(
                "β/D = {:.3} is small; the resonance-averaged kernel assumes β ≫ D",
                beta / mean_spacing
            );
        }
        Ok(Self { mean_spacing, beta, hbar_omega })
    }

    pub fn mean_spacing(&self) -> f64 {
        self.mean_spacing
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hbar_omega(&self) -> f64 {
        self.hbar_omega
    }

    /// Recurrence time `2πħ/D` of an equidistant spectrum, in fs.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI * HBAR_EV_FS / self.mean_spacing
    }

    /// Warns when an energy window of `level_count` levels is too short to hold
    /// the kernel for spin differences up to `max_dj`. Returns whether the
    /// window is wide enough.
    pub fn check_window(&self, level_count: usize, max_dj: u32) -> bool {
        let window = level_count as f64 * self.mean_spacing;
        let need = 40.0 * self.beta.max(self.hbar_omega.abs() * max_dj as f64);
        if window < need {
            log::warn!(
                "energy window N·D = {window:.4e} eV is below 40·max(β, ħω·ΔJ) = {need:.4e} eV; \
                 edge truncation will bias the numeric spin-pair sums"
            );
            false
        } else {
            true
        }
    }
}

/// `K(ΔE, ΔJ)` for `ΔJ ≠ 0`.
pub fn correlation_kernel(delta_e: f64, delta_j: i32, kp: &KernelParams) -> Result<f64> {
    if delta_j == 0 {
        return domain("kernel is undefined for ΔJ = 0; the diagonal rule applies");
    }
    Ok(kernel_unchecked(delta_e, delta_j as f64, kp))
}

#[inline]
fn kernel_unchecked(delta_e: f64, dj: f64, kp: &KernelParams) -> f64 {
    let width = kp.beta * dj.abs();
    let detuning = delta_e - kp.hbar_omega * dj;
    kp.mean_spacing * width / (PI * (detuning * detuning + width * width))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be finite and non-negative, got {t} fs"));
    }
    Ok(())
}

/// `(1/N) Σ_{μν} K(E_μ − E'_ν, ΔJ) exp[i(E'_ν − E_μ) t/ħ]` on a batch of
/// times, with `levels` the spin-`J` list and `levels_prime` the spin-`J'`
/// list. Returns exactly 1 for every time when `delta_j == 0`.
pub fn spin_pair_series(
    times: &[f64],
    levels: &[f64],
    levels_prime: &[f64],
    delta_j: i32,
    kp: &KernelParams,
) -> Result<Vec<Complex64>> {
    for &t in times {
        check_time(t)?;
    }
    if delta_j == 0 {
        return Ok(vec![Complex64::new(1.0, 0.0); times.len()]);
    }
    if levels.is_empty() || levels_prime.is_empty() {
        return domain("empty level list");
    }
    let dj = delta_j as f64;
    let rates: Vec<f64> = times.iter().map(|t| t / HBAR_EV_FS).collect();
    let mut re = vec![0.0; times.len()];
    let mut im = vec![0.0; times.len()];
    for &e in levels {
        for &ep in levels_prime {
            let de = e - ep;
            let w = kernel_unchecked(de, dj, kp);
            for (k, &r) in rates.iter().enumerate() {
                let (s, c) = (de * r).sin_cos();
                re[k] += w * c;
                im[k] -= w * s;
            }
        }
    }
    let norm = levels.len() as f64;
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r / norm, i / norm))
        .collect())
}

/// Numeric spin-pair sum for spins `J`, `J'` drawn from `spectra`.
pub fn spin_pair_sum_numeric(
    t: f64,
    j: u32,
    j_prime: u32,
    spectra: &super::SpectrumSet,
    kp: &KernelParams,
) -> Result<Complex64> {
    let a = spectra.levels(j)?;
    let b = spectra.levels(j_prime)?;
    let dj = j as i32 - j_prime as i32;
    Ok(spin_pair_series(&[t], a, b, dj, kp)?[0])
}

/// Continuous-spectrum limit `exp(−iωtΔJ) exp(−βt|ΔJ|/ħ)`.
pub fn spin_pair_factor_continuum(t: f64, j: u32, j_prime: u32, kp: &KernelParams) -> Result<Complex64> {
    check_time(t)?;
    Ok(continuum(t, j as i32 - j_prime as i32, kp))
}

#[inline]
pub(crate) fn continuum(t: f64, delta_j: i32, kp: &KernelParams) -> Complex64 {
    if delta_j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let dj = delta_j as f64;
    let decay = (-kp.beta * t * dj.abs() / HBAR_EV_FS).exp();
    Complex64::from_polar(decay, -kp.hbar_omega * t * dj / HBAR_EV_FS)
}

/// Poisson-resummed equidistant sum truncated to `|M| <= m_max`:
///
/// ```text
/// Σ_M exp[−2π(β/D)|ΔJ| |M − τ|] exp[i2π(ħω/D)ΔJ (M − τ)],   τ = Dt/(2πħ)
/// ```
pub fn spin_pair_factor_poisson(
    t: f64,
    j: u32,
    j_prime: u32,
    kp: &KernelParams,
    m_max: u32,
) -> Result<Complex64> {
    check_time(t)?;
    Ok(poisson(t, j as i32 - j_prime as i32, kp, m_max))
}

pub(crate) fn poisson(t: f64, delta_j: i32, kp: &KernelParams, m_max: u32) -> Complex64 {
    if delta_j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let dj = delta_j as f64;
    let tau = kp.mean_spacing * t / (2.0 * PI * HBAR_EV_FS);
    let damp = 2.0 * PI * kp.beta / kp.mean_spacing * dj.abs();
    let freq = 2.0 * PI * kp.hbar_omega / kp.mean_spacing * dj;
    let m = m_max as i64;
    (-m..=m)
        .map(|mm| {
            let x = mm as f64 - tau;
            Complex64::from_polar((-damp * x.abs()).exp(), freq * x)
        })
        .sum()
}

/// Direct summation of the equidistant series over all integers `k`,
///
/// ```text
/// (b/π) Σ_k exp(−ikφ) / [(k − a)² + b²],   a = ħωΔJ/D, b = β|ΔJ|/D, φ = Dt/ħ
/// ```
///
/// Terms with `|k| <= cutoff` are summed explicitly. The remainder is handled
/// by subtracting the large-`k` expansion of the Lorentzian through `k^-6`
/// and adding back its exact sum, `Σ_{k≠0} e^{−ikφ} k^{−p}`, from the Fourier
/// series of the Bernoulli polynomials. An order is only subtracted while its
/// remainder, of size `cutoff^(1−p)`, is still above double rounding of the
/// full sum; past that the subtraction would add more error than it removes.
pub fn lattice_sum_equidistant(t: f64, delta_j: i32, kp: &KernelParams, cutoff: u32) -> Result<Complex64> {
    check_time(t)?;
    if delta_j == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let dj = delta_j as f64;
    let a = kp.hbar_omega * dj / kp.mean_spacing;
    let b = kp.beta * dj.abs() / kp.mean_spacing;
    let c = a * a + b * b;
    let k_max = cutoff as i64;
    if (k_max as f64) < 4.0 * c.sqrt() {
        return domain(format!(
            "lattice cutoff {cutoff} too small for |a|+b ≈ {:.1}; tail expansion diverges",
            c.sqrt()
        ));
    }
    let phi = (kp.mean_spacing * t / HBAR_EV_FS).rem_euclid(2.0 * PI);

    let mut direct = Complex64::new(0.0, 0.0);
    for k in -k_max..=k_max {
        let kf = k as f64;
        let w = 1.0 / ((kf - a) * (kf - a) + b * b);
        direct += Complex64::from_polar(w, -kf * phi);
    }

    // 1/((k−a)²+b²) = Σ_n coef[n] k^{−(n+2)}, coef[n] = 2a coef[n−1] − c coef[n−2]
    const ORDERS: usize = 5;
    let mut coef = [0.0; ORDERS];
    coef[0] = 1.0;
    coef[1] = 2.0 * a;
    for n in 2..ORDERS {
        coef[n] = 2.0 * a * coef[n - 1] - c * coef[n - 2];
    }
    let mut tail = Complex64::new(0.0, 0.0);
    let kf_max = k_max as f64;
    for (n, &cn) in coef.iter().enumerate() {
        let p = n as i32 + 2;
        if kf_max.powi(p - 1) * f64::EPSILON > 1.0 {
            break;
        }
        // Σ_{|k|>K} e^{−ikφ} k^{−p} = full − partial, both over k ≠ 0.
        // Smallest terms first, compensated: the difference to the full sum is
        // tiny and gets multiplied by a possibly large coefficient.
        let partial = compensated_sum((1..=k_max).rev().map(|k| {
            let kf = k as f64;
            paired_power(kf * phi, p) * kf.powi(-p)
        }));
        tail += (full_power_sum(phi, p) - partial) * cn;
    }
    Ok((direct + tail) * (b / PI))
}

/// Neumaier summation, componentwise.
fn compensated_sum(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    fn step(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
        *sum = t;
    }
    let (mut re, mut re_c, mut im, mut im_c) = (0.0, 0.0, 0.0, 0.0);
    for z in terms {
        step(&mut re, &mut re_c, z.re);
        step(&mut im, &mut im_c, z.im);
    }
    Complex64::new(re + re_c, im + im_c)
}

/// `e^{−ix} + (−1)^p e^{ix}`: the `±k` pair of `e^{−ikφ} k^{−p}` without the power.
#[inline]
fn paired_power(x: f64, p: i32) -> Complex64 {
    if p % 2 == 0 {
        Complex64::new(2.0 * x.cos(), 0.0)
    } else {
        Complex64::new(0.0, -2.0 * x.sin())
    }
}

/// `Σ_{k≠0} e^{−ikφ} k^{−p}` for `φ ∈ [0, 2π)` and `p` in `2..=6`.
fn full_power_sum(phi: f64, p: i32) -> Complex64 {
    let y = phi / (2.0 * PI);
    let two_pi = 2.0 * PI;
    match p {
        // Σ_{k>=1} cos(kφ)/k^{2m} = (−1)^{m−1} (2π)^{2m} B_{2m}(y) / (2 (2m)!)
        // Σ_{k>=1} sin(kφ)/k^{2m+1} = (−1)^{m−1} (2π)^{2m+1} B_{2m+1}(y) / (2 (2m+1)!)
        2 => Complex64::new(2.0 * two_pi.powi(2) * bernoulli(2, y) / 4.0, 0.0),
        3 => Complex64::new(0.0, -2.0 * two_pi.powi(3) * bernoulli(3, y) / 12.0),
        4 => Complex64::new(-2.0 * two_pi.powi(4) * bernoulli(4, y) / 48.0, 0.0),
        5 => Complex64::new(0.0, 2.0 * two_pi.powi(5) * bernoulli(5, y) / 240.0),
        6 => Complex64::new(2.0 * two_pi.powi(6) * bernoulli(6, y) / 1440.0, 0.0),
        _ => unreachable!("power {p} outside 2..=6"),
    }
}

fn bernoulli(n: u32, y: f64) -> f64 {
    match n {
        2 => y * y - y + 1.0 / 6.0,
        3 => y * y * y - 1.5 * y * y + 0.5 * y,
        4 => y.powi(4) - 2.0 * y.powi(3) + y * y - 1.0 / 30.0,
        5 => y.powi(5) - 2.5 * y.powi(4) + 5.0 / 3.0 * y.powi(3) - y / 6.0,
        6 => y.powi(6) - 3.0 * y.powi(5) + 2.5 * y.powi(4) - 0.5 * y * y + 1.0 / 42.0,
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn kp(d: f64, beta: f64, hw: f64) -> KernelParams {
        KernelParams::new(d, beta, hw).unwrap()
    }

    #[test]
    fn kernel_values() {
        let p = kp(0.0005, 0.003, 0.045);
        let peak = correlation_kernel(0.045, 1, &p).unwrap();
        assert_relative_eq!(peak, 0.0005 / (PI * 0.003), max_relative = 1e-14);
        // mpmath: 0.05305164769729844
        assert_relative_eq!(peak, 0.053_051_647_697_298_45, max_relative = 1e-13);
        assert!(correlation_kernel(0.01, 1, &p).unwrap() < peak);
        assert!(correlation_kernel(0.0, 0, &p).is_err());
        let p3 = correlation_kernel(0.135, 3, &p).unwrap();
        assert!(p3 > correlation_kernel(0.134, 3, &p).unwrap());
        assert!(p3 > correlation_kernel(0.136, 3, &p).unwrap());
    }

    #[test]
    fn kernel_integrates_to_spacing() {
        // Trapezoid over ±2000 widths plus the analytic Lorentzian tail.
        let p = kp(0.0005, 0.003, 0.045);
        let width = 0.003;
        let half = 2000.0 * width;
        let n = 400_000;
        let h = 2.0 * half / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = 0.045 - half + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w * correlation_kernel(x, 1, &p).unwrap();
        }
        s *= h;
        let tail = 0.0005 * (1.0 - 2.0 / PI * (half / width).atan());
        assert_relative_eq!(s + tail, 0.0005, max_relative = 1e-6);
    }

    #[test]
    fn continuum_examples() {
        let p = kp(0.0001, 0.003, 0.045);
        assert_eq!(spin_pair_factor_continuum(0.0, 3, 5, &p).unwrap(), Complex64::new(1.0, 0.0));
        let t = HBAR_EV_FS / 0.003;
        assert_relative_eq!(t, 219.403_985_633_333_3, max_relative = 1e-12);
        let c = spin_pair_factor_continuum(t, 4, 3, &p).unwrap();
        assert_relative_eq!(c.norm(), (-1.0f64).exp(), max_relative = 1e-14);
        assert_eq!(spin_pair_factor_continuum(77.0, 4, 4, &p).unwrap(), Complex64::new(1.0, 0.0));
        assert!(spin_pair_factor_continuum(-1.0, 4, 3, &p).is_err());
    }

    #[test]
    fn poisson_m0_dominance_and_limit() {
        // β/D = 6: the M ≠ 0 terms are below exp(−2π·6/2) for t < πħ/D.
        let p = kp(0.0005, 0.003, 0.045);
        let half_period = p.recurrence_time() / 2.0;
        for &frac in &[0.0, 0.1, 0.3, 0.49] {
            let t = frac * 2.0 * half_period;
            for dj in 1..=3u32 {
                let full = spin_pair_factor_poisson(t, 10 + dj, 10, &p, 20).unwrap();
                let m0 = spin_pair_factor_poisson(t, 10 + dj, 10, &p, 0).unwrap();
                let cont = spin_pair_factor_continuum(t, 10 + dj, 10, &p).unwrap();
                assert!((m0 - cont).norm() < 1e-13 * (1.0 + cont.norm()));
                let bound = (-2.0 * PI * 6.0 / 2.0).exp();
                assert!((full - m0).norm() < bound, "t={t} dj={dj}");
            }
        }
    }

    #[test]
    fn poisson_is_periodic() {
        let p = kp(0.0005, 0.003, 0.045);
        let period = p.recurrence_time();
        for &t in &[0.0, 37.0, 600.0, 2000.0] {
            let a = spin_pair_factor_poisson(t, 7, 5, &p, 40).unwrap();
            let b = spin_pair_factor_poisson(t + period, 7, 5, &p, 40).unwrap();
            assert!((a - b).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn lattice_matches_poisson() {
        for &(d, beta, hw) in &[(0.00015, 0.003, 0.0015), (0.0001, 0.003, 0.045), (0.001, 0.002, 0.0)] {
            let p = kp(d, beta, hw);
            let period = p.recurrence_time();
            for dj in 1..=3 {
                for k in 0..12 {
                    let t = k as f64 / 11.0 * 0.6 * period;
                    let lat = lattice_sum_equidistant(t, dj, &p, 20_000).unwrap();
                    let poi = poisson(t, dj, &p, 40);
                    assert!((lat - poi).norm() < 1e-6, "d={d} dj={dj} t={t}: {lat} vs {poi}");
                }
            }
        }
    }

    #[test]
    fn bernoulli_sums_against_direct() {
        for &phi in &[0.0, 0.7, 3.0, 6.0] {
            for p in 2..=6 {
                let direct: Complex64 = (1..=200_000)
                    .map(|k| {
                        let kf = k as f64;
                        paired_power(kf * phi, p) * kf.powi(-p)
                    })
                    .sum();
                let tol = if p == 2 { 1e-5 } else { 1e-9 };
                assert!((direct - full_power_sum(phi, p)).norm() < tol, "phi={phi} p={p}");
            }
        }
    }

    /// Fejér-weighted single sum: the equidistant double sum collapses onto
    /// level-index differences k with multiplicity N − |k|.
    fn fejer_oracle(n: usize, b: f64, a: f64, phi: f64) -> Complex64 {
        let nn = n as i64;
        (-(nn - 1)..nn)
            .map(|k| {
                let kf = k as f64;
                let w = (1.0 - kf.abs() / n as f64) * b / PI / ((kf - a).powi(2) + b * b);
                Complex64::from_polar(w, -kf * phi)
            })
            .sum()
    }

    #[test]
    fn numeric_equidistant_against_fejer_oracle() {
        let d = 0.0001;
        let levels = super::super::gen_equidistant(300, d, 0.0).unwrap();
        for &(ratio, hw_over_d) in &[(1.0, 0.0), (5.0, 0.0), (20.0, 10.0)] {
            let p = kp(d, ratio * d, hw_over_d * d);
            let times = [0.0, 35.0, 180.0];
            let got = spin_pair_series(&times, &levels, &levels, 1, &p).unwrap();
            for (g, &t) in got.iter().zip(&times) {
                let want = fejer_oracle(300, ratio, hw_over_d, d * t / HBAR_EV_FS);
                assert!((g - want).norm() < 1e-12, "ratio={ratio} t={t}");
            }
        }
        // β/D = 1: the truncated kernel mass is within 2% of unity
        // (brute force: 0.98972); larger β/D loses more to the edges.
        let p = kp(d, d, 0.0);
        let v = spin_pair_series(&[0.0], &levels, &levels, 1, &p).unwrap()[0];
        assert!((v.re - 1.0).abs() < 0.02 && v.im.abs() < 1e-15);
        assert_relative_eq!(v.re, 0.989_716_853_277_907_9, max_relative = 1e-10);
    }

    #[test]
    fn numeric_equidistant_periodic() {
        let d = 0.0001;
        let levels = super::super::gen_equidistant(300, d, 0.0).unwrap();
        let p = kp(d, 0.003, 0.045);
        let period = p.recurrence_time();
        for &t in &[0.0, 100.0, 4321.0] {
            let v = spin_pair_series(&[t, t + period], &levels, &levels, 2, &p).unwrap();
            assert!((v[0] - v[1]).norm() < 1e-10, "t={t}: {:?}", v);
        }
    }

    #[test]
    fn diagonal_rule() {
        let p = kp(0.0001, 0.003, 0.045);
        let levels = super::super::gen_equidistant(10, 0.0001, 0.0).unwrap();
        for &t in &[0.0, 1.0, 1e4] {
            assert_eq!(spin_pair_series(&[t], &levels, &levels, 0, &p).unwrap()[0], Complex64::new(1.0, 0.0));
            assert_eq!(spin_pair_factor_poisson(t, 2, 2, &p, 5).unwrap(), Complex64::new(1.0, 0.0));
            assert_eq!(lattice_sum_equidistant(t, 0, &p, 10).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn window_check() {
        let p = kp(0.0001, 0.003, 0.045);
        assert!(!p.check_window(300, 3));
        assert!(p.check_window(60_000, 3));
    }

    proptest! {
        #[test]
        fn analytic_providers_hermitian(t in 0.0f64..2000.0, j in 0u32..40, jp in 0u32..40) {
            let p = kp(0.0001, 0.003, 0.045);
            let a = spin_pair_factor_continuum(t, j, jp, &p).unwrap();
            let b = spin_pair_factor_continuum(t, jp, j, &p).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-15);
            prop_assert!(a.norm() <= 1.0 + 1e-15);
            let a = spin_pair_factor_poisson(t, j, jp, &p, 8).unwrap();
            let b = spin_pair_factor_poisson(t, jp, j, &p, 8).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-12);
            prop_assert!(a.norm() <= 1.0 + 1e-9);
        }

        #[test]
        fn numeric_hermitian(t in 0.0f64..5000.0, seed in 0u64..1000) {
            let p = kp(0.0001, 0.003, 0.002);
            let a = super::super::gen_poisson(40, 0.0001, seed).unwrap();
            let b = super::super::gen_poisson(40, 0.0001, seed + 1).unwrap();
            let x = spin_pair_series(&[t], &a, &b, 2, &p).unwrap()[0];
            let y = spin_pair_series(&[t], &b, &a, -2, &p).unwrap()[0];
            prop_assert!((x - y.conj()).norm() < 1e-12);
        }
    }
}
