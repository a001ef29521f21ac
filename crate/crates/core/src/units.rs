//! Units: energies in eV, times in fs, angles in radians.

/// Reduced Planck constant in eV·fs.
pub const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// Degrees to radians.
#[inline]
pub fn deg(x: f64) -> f64 {
    x.to_radians()
}
