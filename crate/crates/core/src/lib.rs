//! Coherent rotation of a decaying intermediate complex with overlapping
//! resonances: angular power spectra, near-side/far-side decomposition and
//! the washout of interference fringes.
//!
//! * [`specfun`]: Legendre functions and traveling Legendre functions.
//! * [`spectra`]: resonance spectra and the spin-pair factor `C(t, J, J')`.
//! * [`wavepacket`]: power spectra, near/far intensities, Monte-Carlo mode.
//! * [`analysis`]: timescales, fringe visibility, packet fits.
//! * [`config`] and [`cli`]: the `rotwave` command-line tool.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod specfun;
pub mod spectra;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/traveling-functions.md")]
    mod traveling_functions {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/power-spectrum.md")]
    mod power_spectrum {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
