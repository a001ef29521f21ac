//! Resonance spectra of the intermediate complex and the spin-pair factor
//! built from them.

mod eigen;
mod factor;
mod generate;
mod kernel;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

pub use eigen::SymMatrix;
pub use factor::{Provider, SpinPairFactor};
pub(crate) use generate::rng as rng_for;
pub use generate::{derive_seed, gen_equidistant, gen_goe, gen_poisson, spacing_ratio, testing};
pub use kernel::{
    correlation_kernel, lattice_sum_equidistant, spin_pair_factor_continuum,
    spin_pair_factor_poisson, spin_pair_series, spin_pair_sum_numeric, KernelParams,
};

use crate::error::{Error, Result};

/// Level statistics used to generate a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    Equidistant,
    Goe,
    Poisson,
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumKind::Equidistant => "equidistant",
            SpectrumKind::Goe => "goe",
            SpectrumKind::Poisson => "poisson",
        })
    }
}

impl FromStr for SpectrumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equidistant" => Ok(SpectrumKind::Equidistant),
            "goe" => Ok(SpectrumKind::Goe),
            "poisson" => Ok(SpectrumKind::Poisson),
            other => Err(Error::Config(format!("unknown spectrum kind '{other}'"))),
        }
    }
}

/// Per-spin ascending resonance energies (eV) sharing one mean spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    kind: SpectrumKind,
    mean_spacing: f64,
    level_count: usize,
    seed: u64,
    by_spin: BTreeMap<u32, Vec<f64>>,
}

impl SpectrumSet {
    /// One independent spectrum per spin. Each spin draws from its own
    /// sub-seed `derive_seed(seed, J)`, so the set for a given spin does not
    /// depend on which other spins are requested.
    pub fn generate(
        kind: SpectrumKind,
        spins: impl IntoIterator<Item = u32>,
        level_count: usize,
        mean_spacing: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut by_spin = BTreeMap::new();
        for j in spins {
            let sub = derive_seed(seed, j as u64);
            let levels = match kind {
                SpectrumKind::Equidistant => gen_equidistant(level_count, mean_spacing, 0.0)?,
                SpectrumKind::Goe => gen_goe(level_count, mean_spacing, sub)?,
                SpectrumKind::Poisson => gen_poisson(level_count, mean_spacing, sub)?,
            };
            by_spin.insert(j, levels);
        }
        Ok(Self { kind, mean_spacing, level_count, seed, by_spin })
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn mean_spacing(&self) -> f64 {
        self.mean_spacing
    }

    pub fn level_count(&self) -> usize {
        self.level_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spins(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_spin.keys().copied()
    }

    pub fn levels(&self, j: u32) -> Result<&[f64]> {
        self.by_spin.get(&j).map(Vec::as_slice).ok_or(Error::MissingSpin(j))
    }

    /// Plain-text table: a `# D=.. N=.. seed=.. kind=..` header, then one
    /// `J E_eV` line per level, sorted by spin then energy.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# D={} N={} seed={} kind={}",
            self.mean_spacing, self.level_count, self.seed, self.kind
        )?;
        for (j, levels) in &self.by_spin {
            for e in levels {
                writeln!(w, "{j} {e:e}")?;
            }
        }
        Ok(())
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("spectrum table: {msg}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| bad("missing '#' header".into()))?;
        let (mut d, mut n, mut seed, mut kind) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| bad(format!("malformed header field '{field}'")))?;
            let parse_err = |_| bad(format!("bad value for {k}: '{v}'"));
            match k {
                "D" => d = Some(v.parse::<f64>().map_err(|_| bad(format!("bad D '{v}'")))?),
                "N" => n = Some(v.parse::<usize>().map_err(parse_err)?),
                "seed" => seed = Some(v.parse::<u64>().map_err(parse_err)?),
                "kind" => kind = Some(v.parse::<SpectrumKind>()?),
                _ => return Err(bad(format!("unknown header key '{k}'"))),
            }
        }
        let (Some(mean_spacing), Some(level_count), Some(seed), Some(kind)) = (d, n, seed, kind)
        else {
            return Err(bad("header needs D, N, seed and kind".into()));
        };
        let mut by_spin: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(j), Some(e), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(format!("line {}: expected 'J E_eV'", lineno + 2)));
            };
            let j: u32 = j.parse().map_err(|_| bad(format!("line {}: bad spin", lineno + 2)))?;
            let e: f64 = e.parse().map_err(|_| bad(format!("line {}: bad energy", lineno + 2)))?;
            by_spin.entry(j).or_default().push(e);
        }
        for (j, levels) in &by_spin {
            if levels.len() != level_count {
                return Err(bad(format!("spin {j} has {} levels, header says {level_count}", levels.len())));
            }
            if levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(bad(format!("spin {j} levels not strictly ascending")));
            }
        }
        Ok(Self { kind, mean_spacing, level_count, seed, by_spin })
    }
}
