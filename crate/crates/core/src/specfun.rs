//! Legendre functions of integer degree on the cut `-1 <= x <= 1`.
//!
//! `P_J` and the Ferrers function of the second kind `Q_J` are generated by
//! the forward three-term recurrence
//!
//! ```text
//! (J+1) f_{J+1}(x) = (2J+1) x f_J(x) - J f_{J-1}(x)
//! ```
//!
//! which is stable inside the cut for the degrees used here (J up to a few
//! hundred). The traveling functions split a standing Legendre wave into the
//! two counter-rotating components
//!
//! ```text
//! Q_J^(±)(θ) = ½ [P_J(cos θ) ∓ (2i/π) Q_J(cos θ)]
//!            ~ [2π J sin θ]^(-1/2) exp{±i[(J+½)θ − π/4]}
//! ```
//!
//! so that `Q^(+) + Q^(-) = P`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{domain, Result};

/// A scattering angle together with its cosine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSample {
    theta: f64,
    x: f64,
}

impl AngleSample {
    /// Angle in radians, must lie in `[0, π]`.
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return domain(format!("angle {theta} rad outside [0, π]"));
        }
        // cos(π) is not exactly -1 in floating point; pin the endpoints.
        let x = if theta == 0.0 {
            1.0
        } else if theta == PI {
            -1.0
        } else {
            theta.cos()
        };
        Ok(Self { theta, x })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    /// True if the angle lies strictly inside `(0, π)`.
    pub fn is_interior(&self) -> bool {
        self.theta > 0.0 && self.theta < PI
    }

    fn require_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            domain(format!(
                "traveling Legendre functions diverge at θ = {} rad",
                self.theta
            ))
        }
    }
}

/// Rotation sense of a traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `Q^(+)`, phase `+(J+½)θ`.
    Plus,
    /// `Q^(-)`, phase `-(J+½)θ`.
    Minus,
}

impl Branch {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// Runs the three-term recurrence from `f0`, `f1` up to degree `j_max`.
fn recur(j_max: u32, x: f64, f0: f64, f1: f64) -> Vec<f64> {
    let n = j_max as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(f0);
    if n == 0 {
        return out;
    }
    out.push(f1);
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * out[j] - jf * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

fn check_closed(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 {
        return domain(format!("Legendre argument {x} outside [-1, 1]"));
    }
    Ok(())
}

fn check_open(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() >= 1.0 {
        return domain(format!(
            "second-kind Legendre argument {x} outside (-1, 1)"
        ));
    }
    Ok(())
}

/// `P_0(x) ..= P_{j_max}(x)`.
pub fn legendre_p_ladder(j_max: u32, x: f64) -> Result<Vec<f64>> {
    check_closed(x)?;
    Ok(recur(j_max, x, 1.0, x))
}

/// Legendre polynomial `P_J(x)`.
pub fn legendre_p(j: u32, x: f64) -> Result<f64> {
    Ok(legendre_p_ladder(j, x)?[j as usize])
}

/// `Q_0(x) ..= Q_{j_max}(x)` for `|x| < 1`.
pub fn legendre_q_ladder(j_max: u32, x: f64) -> Result<Vec<f64>> {
    check_open(x)?;
    let q0 = 0.5 * ((1.0 + x) / (1.0 - x)).ln();
    Ok(recur(j_max, x, q0, x * q0 - 1.0))
}

/// Legendre function of the second kind `Q_J(x)` for `|x| < 1`.
pub fn legendre_q(j: u32, x: f64) -> Result<f64> {
    Ok(legendre_q_ladder(j, x)?[j as usize])
}

/// `Q_J^(b)(θ)` for `J = 0 ..= j_max`, built from the exact `P` and `Q` ladders.
pub fn traveling_q_ladder(
    j_max: u32,
    theta: AngleSample,
    branch: Branch,
) -> Result<Vec<Complex64>> {
    theta.require_interior()?;
    let p = legendre_p_ladder(j_max, theta.x())?;
    let q = legendre_q_ladder(j_max, theta.x())?;
    let s = branch.sign() * 2.0 / PI;
    Ok(p.iter()
        .zip(&q)
        .map(|(&p, &q)| Complex64::new(0.5 * p, -0.5 * s * q))
        .collect())
}

/// Exact traveling Legendre function `Q_J^(b)(θ)`.
pub fn traveling_q(j: u32, theta: AngleSample, branch: Branch) -> Result<Complex64> {
    Ok(traveling_q_ladder(j, theta, branch)?[j as usize])
}

/// Semiclassical form `[2πJ sin θ]^(-1/2) exp{±i[(J+½)θ − π/4]}`.
pub fn traveling_q_asymptotic(j: u32, theta: AngleSample, branch: Branch) -> Result<Complex64> {
    if j == 0 {
        return domain("asymptotic traveling function needs J >= 1");
    }
    theta.require_interior()?;
    let jf = j as f64;
    let th = theta.theta();
    let amp = (2.0 * PI * jf * th.sin()).recip().sqrt();
    let phase = branch.sign() * ((jf + 0.5) * th - FRAC_PI_4);
    Ok(Complex64::from_polar(amp, phase))
}

/// Asymptotic ladder over `J = j_lo ..= j_hi` (`j_lo >= 1`).
pub fn traveling_q_asymptotic_range(
    j_lo: u32,
    j_hi: u32,
    theta: AngleSample,
    branch: Branch,
) -> Result<Vec<Complex64>> {
    (j_lo..=j_hi)
        .map(|j| traveling_q_asymptotic(j, theta, branch))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Frozen from 40-digit mpmath evaluations.
    const P25_AT_0_3: f64 = 0.161_203_378_518_137_784_39;
    const Q20_AT_0_7: f64 = -0.063_017_066_510_894_438_48;
    const Q15_AT_0: f64 = 0.318_259_518_259_518_259_52;

    #[test]
    fn p_closed_forms_and_endpoints() {
        assert_eq!(legendre_p(2, 1.0).unwrap(), 1.0);
        assert_relative_eq!(legendre_p(3, 0.5).unwrap(), -0.4375, epsilon = 1e-15);
        for j in 0..80 {
            assert_eq!(legendre_p(j, 1.0).unwrap(), 1.0);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_p(j, -1.0).unwrap(), sign);
        }
    }

    #[test]
    fn p_high_degree_matches_extended_precision() {
        assert_relative_eq!(legendre_p(25, 0.3).unwrap(), P25_AT_0_3, max_relative = 1e-12);
    }

    #[test]
    fn p_rejects_outside_cut() {
        assert!(matches!(legendre_p(3, 1.0 + 1e-12), Err(crate::Error::Domain(_))));
        assert!(legendre_p(3, f64::NAN).is_err());
    }

    #[test]
    fn q_values() {
        assert_relative_eq!(
            legendre_q(0, 0.5).unwrap(),
            0.5 * 3f64.ln(),
            max_relative = 1e-15
        );
        assert_eq!(legendre_q(1, 0.0).unwrap(), -1.0);
        assert_relative_eq!(legendre_q(20, 0.7).unwrap(), Q20_AT_0_7, max_relative = 1e-10);
        assert_relative_eq!(legendre_q(15, 0.0).unwrap(), Q15_AT_0, max_relative = 1e-12);
    }

    #[test]
    fn q_rejects_endpoints() {
        assert!(legendre_q(0, 1.0).is_err());
        assert!(legendre_q(4, -1.0).is_err());
    }

    #[test]
    fn traveling_examples() {
        let th = AngleSample::from_degrees(60.0).unwrap();
        let s = traveling_q(5, th, Branch::Plus).unwrap() + traveling_q(5, th, Branch::Minus).unwrap();
        assert_relative_eq!(s.re, 0.089_843_75, epsilon = 1e-15);
        assert!(s.im.abs() < 1e-15);

        let right = AngleSample::new(PI / 2.0).unwrap();
        let q0 = traveling_q(0, right, Branch::Plus).unwrap();
        assert!((q0 - Complex64::new(0.5, 0.0)).norm() < 1e-16);

        // ½[P_15(0) + (2i/π) Q_15(0)], P_15(0) = 0
        let q15 = traveling_q(15, right, Branch::Minus).unwrap();
        assert!(q15.re.abs() < 1e-15);
        assert_relative_eq!(q15.im, Q15_AT_0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn traveling_rejects_endpoints() {
        let zero = AngleSample::new(0.0).unwrap();
        let pi = AngleSample::new(PI).unwrap();
        assert!(traveling_q(3, zero, Branch::Plus).is_err());
        assert!(traveling_q(3, pi, Branch::Minus).is_err());
        assert!(traveling_q_asymptotic(3, zero, Branch::Plus).is_err());
        assert!(traveling_q_asymptotic(0, AngleSample::new(1.0).unwrap(), Branch::Plus).is_err());
        assert!(AngleSample::new(-0.1).is_err());
        assert!(AngleSample::new(3.2).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let right = AngleSample::new(PI / 2.0).unwrap();
        let a = traveling_q_asymptotic(18, right, Branch::Plus).unwrap();
        assert_relative_eq!(a.norm_sqr(), 1.0 / (2.0 * PI * 18.0), max_relative = 1e-14);
        let want = (18.5 * PI / 2.0 - FRAC_PI_4).rem_euclid(2.0 * PI);
        assert_relative_eq!(a.arg().rem_euclid(2.0 * PI), want, max_relative = 1e-12);

        let th = AngleSample::from_degrees(60.0).unwrap();
        let exact = traveling_q(20, th, Branch::Plus).unwrap();
        let asym = traveling_q_asymptotic(20, th, Branch::Plus).unwrap();
        // mpmath: 0.013109...
        let rel = (exact - asym).norm() / exact.norm();
        assert!(rel < 0.03, "rel = {rel}");
        assert_relative_eq!(rel, 0.013_109_079_351_325_6, max_relative = 1e-6);
    }

    fn max_asymptotic_error(j: u32) -> f64 {
        (0..=120)
            .map(|k| {
                let th = AngleSample::from_degrees(30.0 + k as f64).unwrap();
                let e = traveling_q(j, th, Branch::Plus).unwrap();
                let a = traveling_q_asymptotic(j, th, Branch::Plus).unwrap();
                (e - a).norm() / e.norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn asymptotic_error_shrinks_with_degree() {
        let errs: Vec<f64> = [5, 10, 20, 40].iter().map(|&j| max_asymptotic_error(j)).collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] * 1.1, "{errs:?}");
        }
        assert!(errs[2] < 0.03);
    }

    /// Gauss–Legendre nodes by Newton iteration on a local recurrence.
    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    }

    #[test]
    fn orthogonality_by_quadrature() {
        let rule = gauss_legendre(64);
        let ladders: Vec<Vec<f64>> = rule
            .iter()
            .map(|&(x, _)| legendre_p_ladder(20, x).unwrap())
            .collect();
        for m in 0..=20 {
            for n in 0..=20 {
                let integral: f64 = rule
                    .iter()
                    .zip(&ladders)
                    .map(|(&(_, w), l)| w * l[m] * l[n])
                    .sum();
                let want = if m == n { 2.0 / (2.0 * n as f64 + 1.0) } else { 0.0 };
                assert!((integral - want).abs() < 1e-6, "m={m} n={n} got {integral}");
            }
        }
    }

    proptest! {
        #[test]
        fn derivative_recurrence_consistent(x in -0.999f64..0.999, j in 1u32..=60) {
            // P'_{n+1} = P'_{n-1} + (2n+1) P_n, built independently of the
            // closed relation (1-x²) P'_n = n (P_{n-1} - x P_n).
            let p = legendre_p_ladder(j, x).unwrap();
            let mut dp = vec![0.0, 1.0];
            for n in 1..j as usize {
                dp.push(dp[n - 1] + (2.0 * n as f64 + 1.0) * p[n]);
            }
            let n = j as usize;
            let lhs = (1.0 - x * x) * dp[n];
            let rhs = n as f64 * (p[n - 1] - x * p[n]);
            let scale = 1.0 + dp[n].abs();
            prop_assert!((lhs - rhs).abs() / scale < 1e-10);
        }

        #[test]
        fn branches_sum_to_p(theta in 0.001f64..3.14, j in 0u32..=60) {
            let th = AngleSample::new(theta).unwrap();
            let p = legendre_p(j, th.x()).unwrap();
            let s = traveling_q(j, th, Branch::Plus).unwrap()
                + traveling_q(j, th, Branch::Minus).unwrap();
            prop_assert!((s.re - p).abs() < 1e-14);
            prop_assert!(s.im.abs() < 1e-14);
        }

        #[test]
        fn branches_are_conjugate(theta in 0.01f64..3.13, j in 0u32..=40) {
            let th = AngleSample::new(theta).unwrap();
            let a = traveling_q(j, th, Branch::Plus).unwrap();
            let b = traveling_q(j, th, Branch::Minus).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-15 * (1.0 + a.norm()));
        }
    }
}
