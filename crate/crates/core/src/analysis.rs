//! Diagnostics on computed angular distributions.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::specfun::Branch;
use crate::units::HBAR_EV_FS;
use crate::wavepacket::ModelParams;

/// Standard deviation of a Gaussian restricted to its half-maximum lobe, in
/// units of the full standard deviation.
const HALF_MAX_SIGMA_RATIO: f64 = 0.618_656_162_200_546_8;

/// `prefactor · ħ/(βd)` in fs.
pub fn qct_time(beta: f64, d: f64, prefactor: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return domain(format!("β must be positive, got {beta}"));
    }
    if !(d > 0.0 && d.is_finite()) {
        return domain(format!("d must be positive, got {d}"));
    }
    if !(prefactor > 0.0 && prefactor.is_finite()) {
        return domain(format!("prefactor must be positive, got {prefactor}"));
    }
    Ok(prefactor * HBAR_EV_FS / (beta * d))
}

/// `2πħ/ħω` in fs.
pub fn rotation_period(hbar_omega: f64) -> Result<f64> {
    if !(hbar_omega > 0.0 && hbar_omega.is_finite()) {
        return domain(format!("ħω must be positive, got {hbar_omega}"));
    }
    Ok(2.0 * PI * HBAR_EV_FS / hbar_omega)
}

/// `π/(I+½)`: angular distance between fringes of two counter-rotating waves
/// with mean spin `I`.
pub fn fringe_spacing_estimate(spin_mean: f64) -> Result<f64> {
    if !(spin_mean >= 1.0 && spin_mean.is_finite()) {
        return domain(format!("spin mean must be >= 1, got {spin_mean}"));
    }
    if spin_mean.fract() != 0.0 {
        return domain(format!("spin mean {spin_mean} is not on the integer ladder"));
    }
    Ok(PI / (spin_mean + 0.5))
}

/// Long-time shape of the branch intensity,
/// `exp[2 cos(Φ ± θ − ωt) / exp(βt/ħ)]`, unnormalized. `Plus` pairs with
/// `Φ + θ`.
pub fn long_time_profile(t: f64, theta: f64, branch: Branch, mp: &ModelParams) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be finite and non-negative, got {t} fs"));
    }
    let phase = mp.deflection() + branch.sign() * theta - mp.omega() * t;
    let damp = (mp.beta() * t / HBAR_EV_FS).exp();
    Ok((2.0 * phase.cos() / damp).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub kind: ExtremumKind,
    /// Radians.
    pub theta: f64,
    pub value: f64,
}

/// Fringe contrast inside an angular window.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeReport {
    /// `[θ_lo, θ_hi]` in radians.
    pub window: (f64, f64),
    /// Mean of `(max − min)/(max + min)` over adjacent max/min pairs; 0 when
    /// the window holds no such pair.
    pub visibility: f64,
    pub extrema: Vec<Extremum>,
    /// Mean of the row over the window.
    pub mean_level: f64,
}

impl FringeReport {
    pub fn n_extrema(&self) -> usize {
        self.extrema.len()
    }

    pub fn extrema_positions(&self) -> Vec<f64> {
        self.extrema.iter().map(|e| e.theta).collect()
    }

    /// Fewer than three extrema make the visibility a single-pair estimate
    /// at best.
    pub fn is_meaningful(&self) -> bool {
        self.extrema.len() >= 3
    }

    /// Mean distance between neighbouring maxima, if there are at least two.
    pub fn mean_max_spacing(&self) -> Option<f64> {
        let maxima: Vec<f64> = self
            .extrema
            .iter()
            .filter(|e| e.kind == ExtremumKind::Max)
            .map(|e| e.theta)
            .collect();
        (maxima.len() >= 2)
            .then(|| (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64)
    }
}

fn check_row(row: &[f64], thetas: &[f64]) -> Result<()> {
    if row.len() != thetas.len() {
        return Err(Error::Grid(format!(
            "row has {} values for {} angles",
            row.len(),
            thetas.len()
        )));
    }
    if row.is_empty() {
        return Err(Error::Grid("empty row".into()));
    }
    if row.iter().chain(thetas).any(|v| !v.is_finite()) {
        return Err(Error::Grid("row contains non-finite values".into()));
    }
    if thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("angles must be strictly ascending".into()));
    }
    Ok(())
}

/// Locates fringes in `window` (radians) and measures their contrast.
///
/// Extrema are strict local extrema of the 3-point moving average; their
/// values are read from the unsmoothed row. The window must lie inside the
/// sampled range.
pub fn fringe_visibility(row: &[f64], thetas: &[f64], window: (f64, f64)) -> Result<FringeReport> {
    check_row(row, thetas)?;
    let (lo, hi) = window;
    let n = row.len();
    if !(lo < hi) || lo < thetas[0] || hi > thetas[n - 1] {
        return Err(Error::Grid(format!(
            "window [{:.4}°, {:.4}°] outside grid [{:.4}°, {:.4}°]",
            lo.to_degrees(),
            hi.to_degrees(),
            thetas[0].to_degrees(),
            thetas[n - 1].to_degrees()
        )));
    }
    let inside: Vec<usize> = (0..n).filter(|&k| thetas[k] >= lo && thetas[k] <= hi).collect();
    if inside.is_empty() {
        return Err(Error::Grid("window contains no grid points".into()));
    }
    let mean_level = inside.iter().map(|&k| row[k]).sum::<f64>() / inside.len() as f64;

    let smooth: Vec<f64> = (0..n)
        .map(|k| {
            let a = row[k.saturating_sub(1)];
            let b = row[(k + 1).min(n - 1)];
            (a + row[k] + b) / 3.0
        })
        .collect();
    let mut extrema = Vec::new();
    for &k in &inside {
        if k == 0 || k + 1 == n {
            continue;
        }
        let (l, c, r) = (smooth[k - 1], smooth[k], smooth[k + 1]);
        let kind = if c > l && c > r {
            ExtremumKind::Max
        } else if c < l && c < r {
            ExtremumKind::Min
        } else {
            continue;
        };
        extrema.push(Extremum { kind, theta: thetas[k], value: row[k] });
    }

    let contrasts: Vec<f64> = extrema
        .windows(2)
        .filter(|p| p[0].kind != p[1].kind)
        .map(|p| {
            let (mx, mn) = if p[0].kind == ExtremumKind::Max {
                (p[0].value, p[1].value)
            } else {
                (p[1].value, p[0].value)
            };
            if mx + mn > 0.0 {
                ((mx - mn) / (mx + mn)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let visibility = if contrasts.is_empty() {
        0.0
    } else {
        contrasts.iter().sum::<f64>() / contrasts.len() as f64
    };
    Ok(FringeReport { window, visibility, extrema, mean_level })
}

/// Gaussian summary of the dominant peak of a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketFit {
    /// Radians.
    pub center: f64,
    /// Gaussian standard deviation in radians.
    pub width_sigma: f64,
    /// `1 −` relative rms misfit of the Gaussian within ±3σ of the center,
    /// clamped to `[0, 1]`.
    pub goodness: f64,
}

impl PacketFit {
    /// Half-width at `1/e` of the peak, `√2 σ`: the convention in which
    /// `exp[−(J−I)²/d²]` has width `d`.
    pub fn dispersion(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.width_sigma
    }
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Center and width of the main lobe (contiguous region above half maximum
/// around the global maximum).
///
/// The center is the circular intensity-weighted mean over the lobe. The
/// second central moment over the lobe is corrected for the half-maximum
/// truncation, so a Gaussian row returns its own `σ`.
pub fn packet_fit(row: &[f64], thetas: &[f64]) -> Result<PacketFit> {
    check_row(row, thetas)?;
    let n = row.len();
    let (k_max, &peak) = row
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty row");
    let floor = row.iter().copied().fold(f64::INFINITY, f64::min);
    if !(peak > 0.0) || peak - floor <= 1e-12 * peak.abs() {
        return Err(Error::Grid("row is flat or non-positive; no packet to fit".into()));
    }
    let half = 0.5 * peak;
    let mut a = k_max;
    while a > 0 && row[a - 1] >= half {
        a -= 1;
    }
    let mut b = k_max;
    while b + 1 < n && row[b + 1] >= half {
        b += 1;
    }
    if b == a {
        return Err(Error::Grid("main lobe is a single grid point".into()));
    }

    let (mut sw, mut ss, mut sc) = (0.0, 0.0, 0.0);
    for k in a..=b {
        sw += row[k];
        ss += row[k] * thetas[k].sin();
        sc += row[k] * thetas[k].cos();
    }
    let center = ss.atan2(sc);
    let m2 = (a..=b).map(|k| row[k] * wrap(thetas[k] - center).powi(2)).sum::<f64>() / sw;
    let width_sigma = m2.sqrt() / HALF_MAX_SIGMA_RATIO;

    let (mut res, mut norm) = (0.0, 0.0);
    for k in 0..n {
        let x = wrap(thetas[k] - center);
        if x.abs() <= 3.0 * width_sigma {
            let fit = peak * (-x * x / (2.0 * width_sigma * width_sigma)).exp();
            res += (row[k] - fit).powi(2);
            norm += row[k] * row[k];
        }
    }
    let goodness = (1.0 - (res / norm).sqrt()).clamp(0.0, 1.0);
    Ok(PacketFit { center, width_sigma, goodness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| (k as f64 + 0.5) * PI / n as f64).collect()
    }

    #[test]
    fn timescales() {
        assert_relative_eq!(qct_time(0.003, 2.0, 2.0).unwrap(), 219.4040, epsilon = 1e-3);
        assert_relative_eq!(qct_time(0.003, 5.0, 2.0).unwrap(), 87.7616, epsilon = 1e-3);
        assert_relative_eq!(qct_time(0.003, 10.0, 2.0).unwrap(), 43.8808, epsilon = 1e-3);
        assert!(qct_time(0.0, 2.0, 2.0).is_err());
        assert!(qct_time(0.003, -1.0, 2.0).is_err());

        assert_relative_eq!(rotation_period(0.045).unwrap(), 91.90370, epsilon = 1e-4);
        assert_relative_eq!(rotation_period(HBAR_EV_FS).unwrap(), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(
            rotation_period(0.09).unwrap(),
            rotation_period(0.045).unwrap() / 2.0,
            epsilon = 1e-12
        );
        assert!(rotation_period(0.0).is_err());
    }

    #[test]
    fn spacing_estimate() {
        assert_relative_eq!(fringe_spacing_estimate(18.0).unwrap(), 0.169_815_819_112_961_8, epsilon = 1e-15);
        assert!(fringe_spacing_estimate(35.5).is_err());
        assert!(fringe_spacing_estimate(0.0).is_err());
        assert_relative_eq!(
            fringe_spacing_estimate(39.0).unwrap(),
            fringe_spacing_estimate(19.0).unwrap() * 19.5 / 39.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn long_time_profile_limits() {
        let mp = ModelParams::new(18.0, 2.0, 135f64.to_radians(), 0.045, 0.003).unwrap();
        let late = long_time_profile(1e6, 1.0, Branch::Minus, &mp).unwrap();
        assert_relative_eq!(late, 1.0, epsilon = 1e-12);
        let t = 3.0 * HBAR_EV_FS / 0.003;
        let peak = mp.deflection() - mp.omega() * t;
        let at_peak = long_time_profile(t, peak.rem_euclid(2.0 * PI), Branch::Minus, &mp).unwrap();
        assert_relative_eq!(at_peak, (2.0 / 3f64.exp()).exp(), epsilon = 1e-12);
        assert!(long_time_profile(-1.0, 1.0, Branch::Plus, &mp).is_err());
    }

    #[test]
    fn constant_row_has_no_fringes() {
        let th = grid(200);
        let r = fringe_visibility(&vec![2.0; 200], &th, (0.1, 1.0)).unwrap();
        assert_eq!(r.visibility, 0.0);
        assert_eq!(r.n_extrema(), 0);
        assert!(!r.is_meaningful());
        assert_relative_eq!(r.mean_level, 2.0);
    }

    #[test]
    fn cosine_row_visibility() {
        let th = grid(2000);
        let row: Vec<f64> = th.iter().map(|t| 1.0 + 0.5 * (37.0 * t).cos()).collect();
        let r = fringe_visibility(&row, &th, (2f64.to_radians(), 60f64.to_radians())).unwrap();
        assert!((r.visibility - 0.5).abs() < 0.01, "{}", r.visibility);
        assert!(r.is_meaningful());
        assert_relative_eq!(r.mean_max_spacing().unwrap(), 2.0 * PI / 37.0, epsilon = 2.0 * PI / 2000.0);
    }

    #[test]
    fn window_outside_grid() {
        let th = grid(100);
        let row = vec![1.0; 100];
        assert!(fringe_visibility(&row, &th, (-0.1, 1.0)).is_err());
        assert!(fringe_visibility(&row, &th, (1.0, 4.0)).is_err());
        assert!(fringe_visibility(&row, &th, (1.0, 0.5)).is_err());
        assert!(fringe_visibility(&row[..50], &th, (0.5, 1.0)).is_err());
    }

    #[test]
    fn single_pair_is_not_meaningful() {
        let th = grid(400);
        let row: Vec<f64> = th.iter().map(|t| 2.0 + (3.0 * t).sin()).collect();
        let r = fringe_visibility(&row, &th, (0.2, 1.5)).unwrap();
        assert_eq!(r.n_extrema(), 1);
        assert_eq!(r.visibility, 0.0);
    }

    #[test]
    fn gaussian_fit() {
        let th = grid(721);
        let row: Vec<f64> = th.iter().map(|t| (-(t - 1.0).powi(2) / (2.0 * 0.25f64.powi(2))).exp()).collect();
        let f = packet_fit(&row, &th).unwrap();
        assert!((f.center - 1.0).abs() < PI / 721.0);
        assert!((f.width_sigma - 0.25).abs() < 0.05 * 0.25, "{}", f.width_sigma);
        assert!(f.goodness > 0.97);
        assert_relative_eq!(f.dispersion(), 0.25 * 2f64.sqrt(), max_relative = 0.05);
    }

    #[test]
    fn bimodal_fit_degrades() {
        let th = grid(721);
        let g = |t: f64, c: f64| (-(t - c).powi(2) / (2.0 * 0.1f64.powi(2))).exp();
        let single: Vec<f64> = th.iter().map(|&t| g(t, 1.0)).collect();
        let double: Vec<f64> = th.iter().map(|&t| g(t, 1.0) + 0.9 * g(t, 1.35)).collect();
        assert!(packet_fit(&double, &th).unwrap().goodness < packet_fit(&single, &th).unwrap().goodness);
    }

    #[test]
    fn flat_or_empty_row_rejected() {
        let th = grid(50);
        assert!(packet_fit(&vec![1.0; 50], &th).is_err());
        assert!(packet_fit(&[], &[]).is_err());
        assert!(packet_fit(&vec![0.0; 50], &th).is_err());
    }

    proptest! {
        #[test]
        fn visibility_in_unit_interval(amp in 0.0f64..1.0, k in 5.0f64..60.0, off in 0.0f64..3.0) {
            let th = grid(721);
            let row: Vec<f64> = th.iter().map(|t| 1.0 + amp * (k * t + off).cos()).collect();
            let r = fringe_visibility(&row, &th, (0.05, 3.0)).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.visibility));
        }

        #[test]
        fn fit_recovers_synthetic_packets(c in 0.8f64..2.3, s in 0.08f64..0.3) {
            let th = grid(1441);
            let row: Vec<f64> = th.iter().map(|t| (-(t - c).powi(2) / (2.0 * s * s)).exp()).collect();
            let f = packet_fit(&row, &th).unwrap();
            prop_assert!((f.center - c).abs() < 2.0 * PI / 1441.0);
            prop_assert!((f.width_sigma / s - 1.0).abs() < 0.05);
        }
    }
}
