//! Zero-temperature Casimir pressure between planar layered stacks.
//!
//! The pressure is obtained from the Lifshitz formula evaluated along the
//! imaginary frequency axis, where every permittivity is real and every
//! integrand is smooth and exponentially damped. The crate is organised as a
//! pipeline:
//!
//! * [`materials`] supplies dielectric functions at imaginary frequency:
//!   Drude metals, Lorentz oscillator sums, Kramers-Kronig transforms of
//!   tabulated absorption data, and effective-medium mixtures for porous
//!   solids such as aerogels.
//! * [`optics`] turns a layered stack into s and p reflection amplitudes at a
//!   given imaginary frequency and transverse wavevector.
//! * [`lifshitz`] integrates the reflection amplitudes into a pressure and a
//!   reduction factor relative to the ideal-mirror result.
//! * [`scenarios`] wires standard two-body geometries (aerogel films on gold,
//!   freestanding membranes) into parameter sweeps and inverse solves.
//!
//! Unit conventions, used everywhere without exception: photon energies in
//! eV, lengths in nm, wavevectors in 1/nm. Pressures convert to pascals only
//! at the output boundary. Attractive pressures are negative; reduction
//! factors are ratios of two attractive pressures and therefore positive.

// Validation throughout is written as `!(x > 0.0)` on purpose: the negated
// form rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod lifshitz;
pub mod materials;
pub mod optics;
pub mod scenarios;

mod quadrature;

pub use lifshitz::{
    casimir_ideal, casimir_pressure, reduction_factor, ForceResult, GapConfig, LifshitzError,
    QuadratureSpec,
};
pub use materials::{
    DielectricModel, DrudeParams, LorentzOscillator, MaterialError, MixingRule, MixingSpec,
};
pub use optics::{Layer, ReflectionPair, SpectralPoint, Stack};
pub use scenarios::{
    build_scenario, compare_scenarios, run_sweep, silica_surrogate, solve_for_target,
    ScenarioError, ScenarioKind, ScenarioSpec, SweepAxis, SweepResult, SweepSpec,
};
