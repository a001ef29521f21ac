use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use super::kernel::{continuum, poisson, spin_pair_series, KernelParams};
use super::SpectrumSet;
use crate::error::{Error, Result};

/// Which realization of the spin-pair factor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provider {
    /// Kronecker delta in spin: the fringe-free universal limit.
    Universal,
    Continuum,
    PoissonSum,
    Numeric,
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provider::Universal => "universal",
            Provider::Continuum => "continuum",
            Provider::PoissonSum => "poisson_sum",
            Provider::Numeric => "numeric",
        })
    }
}

impl FromStr for Provider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "universal" => Ok(Provider::Universal),
            "continuum" => Ok(Provider::Continuum),
            "poisson_sum" => Ok(Provider::PoissonSum),
            "numeric" => Ok(Provider::Numeric),
            other => Err(Error::Config(format!("unknown provider '{other}'"))),
        }
    }
}

/// `C(t, J, J')`: resonance-averaged spectral sum for a pair of spins.
///
/// Every provider returns exactly 1 on the diagonal and is Hermitian,
/// `C(t, J', J) = conj C(t, J, J')`. Cheap to clone and safe to share across
/// threads.
#[derive(Debug, Clone)]
pub enum SpinPairFactor {
    Universal,
    Continuum(KernelParams),
    PoissonSum { kernel: KernelParams, m_max: u32 },
    Numeric { kernel: KernelParams, spectra: Arc<SpectrumSet> },
}

impl SpinPairFactor {
    pub fn provider(&self) -> Provider {
        match self {
            SpinPairFactor::Universal => Provider::Universal,
            SpinPairFactor::Continuum(_) => Provider::Continuum,
            SpinPairFactor::PoissonSum { .. } => Provider::PoissonSum,
            SpinPairFactor::Numeric { .. } => Provider::Numeric,
        }
    }

    pub fn value(&self, t: f64, j: u32, j_prime: u32) -> Result<Complex64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("time must be non-negative, got {t} fs")));
        }
        let dj = j as i32 - j_prime as i32;
        if dj == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(match self {
            SpinPairFactor::Universal => Complex64::new(0.0, 0.0),
            SpinPairFactor::Continuum(kp) => continuum(t, dj, kp),
            SpinPairFactor::PoissonSum { kernel, m_max } => poisson(t, dj, kernel, *m_max),
            SpinPairFactor::Numeric { kernel, spectra } => {
                spin_pair_series(&[t], spectra.levels(j)?, spectra.levels(j_prime)?, dj, kernel)?[0]
            }
        })
    }

    /// Row-major `n × n` matrix of `C(t, J_lo + r, J_lo + c)` for
    /// `n = j_hi − j_lo + 1`.
    pub fn matrix(&self, t: f64, j_lo: u32, j_hi: u32) -> Result<Vec<Complex64>> {
        let n = (j_hi - j_lo + 1) as usize;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        match self {
            SpinPairFactor::Numeric { .. } => {
                for r in 0..n {
                    m[r * n + r] = Complex64::new(1.0, 0.0);
                    for c in r + 1..n {
                        let v = self.value(t, j_lo + r as u32, j_lo + c as u32)?;
                        m[r * n + c] = v;
                        m[c * n + r] = v.conj();
                    }
                }
            }
            _ => {
                // Analytic providers depend on ΔJ only.
                let by_dj: Vec<Complex64> = (0..n)
                    .map(|k| self.value(t, j_lo + k as u32, j_lo))
                    .collect::<Result<_>>()?;
                for r in 0..n {
                    for c in 0..n {
                        m[r * n + c] = if r >= c { by_dj[r - c] } else { by_dj[c - r].conj() };
                    }
                }
            }
        }
        Ok(m)
    }
}
