//! Resonance-level generators.
//!
//! Every generator is a pure function of its arguments and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::eigen::SymMatrix;
use crate::error::{domain, Error, Result};

/// SplitMix64 finalizer; derives independent sub-seeds from `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_spacing(d: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return domain(format!("mean spacing must be positive, got {d}"));
    }
    Ok(())
}

/// `center + (k - (n-1)/2) D`, `k = 0..n`.
pub fn gen_equidistant(n: usize, spacing: f64, center: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return domain(format!("equidistant spectrum needs at least 2 levels, got {n}"));
    }
    check_spacing(spacing)?;
    let mid = (n as f64 - 1.0) / 2.0;
    Ok((0..n).map(|k| center + (k as f64 - mid) * spacing).collect())
}

/// Shifts and scales ascending levels so that the span is `(n-1) D` and the
/// midpoint sits at zero.
fn unfold_linear(levels: &mut [f64], spacing: f64) -> Result<()> {
    let n = levels.len();
    let (lo, hi) = (levels[0], levels[n - 1]);
    let span = hi - lo;
    if !(span > 0.0) {
        return Err(Error::Numerical("degenerate spectrum, zero span".into()));
    }
    let scale = spacing * (n as f64 - 1.0) / span;
    let mid = 0.5 * (lo + hi);
    for e in levels.iter_mut() {
        *e = (*e - mid) * scale;
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Numerical("spectrum is not strictly ascending".into()));
    }
    Ok(())
}

/// Central `n` eigenvalues of a GOE matrix of order `3n`, unfolded to mean
/// spacing `D`.
///
/// Diagonal entries are N(0, 1), off-diagonal entries N(0, 1/2). The middle
/// third of the semicircle has close to constant density, so a linear
/// unfolding is enough there.
pub fn gen_goe(n: usize, spacing: f64, seed: u64) -> Result<Vec<f64>> {
    if n < 10 {
        return domain(format!("GOE spectrum needs at least 10 levels, got {n}"));
    }
    check_spacing(spacing)?;
    let order = 3 * n;
    let mut rng = rng(seed);
    let diag = Normal::new(0.0, 1.0).expect("unit normal");
    let off = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("half-variance normal");
    let m = SymMatrix::from_lower(order, |i, j| {
        if i == j {
            diag.sample(&mut rng)
        } else {
            off.sample(&mut rng)
        }
    });
    let ev = m.eigenvalues()?;
    let start = (order - n) / 2;
    let mut levels = ev[start..start + n].to_vec();
    unfold_linear(&mut levels, spacing)?;
    Ok(levels)
}

/// Uncorrelated levels: i.i.d. exponential spacings with mean `D`.
pub fn gen_poisson(n: usize, spacing: f64, seed: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return domain(format!("Poisson spectrum needs at least 2 levels, got {n}"));
    }
    check_spacing(spacing)?;
    let exp = Exp::new(1.0 / spacing).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = rng(seed);
    let mut levels = Vec::with_capacity(n);
    let mut e = 0.0;
    levels.push(e);
    for _ in 1..n {
        e += exp.sample(&mut rng);
        levels.push(e);
    }
    let mid = 0.5 * (levels[0] + levels[n - 1]);
    levels.iter_mut().for_each(|v| *v -= mid);
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Numerical("spectrum is not strictly ascending".into()));
    }
    Ok(levels)
}

/// Test double only: a renewal chain of Wigner-surmise spacings.
///
/// Reproduces the GOE nearest-neighbour distribution but none of the
/// long-range rigidity of real GOE spectra. Not used by any production path.
pub mod testing {
    use super::*;

    pub fn wigner_surmise_chain(n: usize, spacing: f64, seed: u64) -> Result<Vec<f64>> {
        if n < 2 {
            return domain("surmise chain needs at least 2 levels");
        }
        check_spacing(spacing)?;
        let mut rng = rng(seed);
        let mut levels = vec![0.0];
        for _ in 1..n {
            let u: f64 = rng.random();
            // inverse CDF of p(s) = (π/2) s exp(-π s²/4)
            let s = (-4.0 * (1.0 - u).ln() / std::f64::consts::PI).sqrt();
            let last = *levels.last().unwrap();
            levels.push(last + s.max(1e-12));
        }
        unfold_linear(&mut levels, spacing)?;
        Ok(levels)
    }
}

/// Mean ratio `⟨min(s_i, s_{i+1}) / max(s_i, s_{i+1})⟩` of consecutive spacings.
///
/// `None` for fewer than three levels.
pub fn spacing_ratio(levels: &[f64]) -> Option<f64> {
    if levels.len() < 3 {
        return None;
    }
    let s: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let (sum, count) = s
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .fold((0.0, 0usize), |(acc, c), w| (acc + w[0].min(w[1]) / w[0].max(w[1]), c + 1));
    (count > 0).then(|| sum / count as f64)
}
