//! Physical constants in the crate's working units (eV, nm).

/// hbar * c in eV nm (CODATA). Converts photon energy to vacuum wavevector:
/// q = xi / HBAR_C_EV_NM.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// Pressure conversion: 1 eV/nm^3 expressed in pascals (exact, via the 2019
/// SI definition of the electronvolt).
pub const PASCALS_PER_EV_NM3: f64 = 1.602_176_634e8;
