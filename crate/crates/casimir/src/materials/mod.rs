//! Dielectric functions evaluated at imaginary frequency.
//!
//! Everything here works with the permittivity on the imaginary axis,
//! eps(i xi), which for passive media is real, greater than or equal to 1,
//! and monotonically non-increasing in xi. Frequencies are photon energies
//! in eV. Four model families are provided:
//!
//! * [`DrudeParams`]: free-electron metals.
//! * [`LorentzOscillator`] sums: bound-charge insulators.
//! * [`TabulatedEps2`] plus a Kramers-Kronig transform: measured absorption
//!   spectra.
//! * [`MixingSpec`]: effective-medium mixtures of a solid host with air,
//!   for porous media. Porosity is the air volume fraction, so porosity 1
//!   is empty space and porosity 0 is the dense solid.

mod kk;
mod table;

pub use kk::kk_to_imaginary_axis;
pub use table::{load_optical_table, TableFormat};

use thiserror::Error;

/// Errors from material evaluation and optical-table ingestion.
#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("imaginary frequency must be positive, got xi = {xi} eV")]
    NonPositiveFrequency { xi: f64 },
    #[error("porosity must lie in [0, 1], got {value}")]
    PorosityOutOfRange { value: f64 },
    #[error("host permittivity on the imaginary axis must be >= 1, got {value}")]
    HostEpsilonBelowOne { value: f64 },
    #[error("optical table holds no entries")]
    EmptyTable,
    #[error("optical table line {line}: {message}")]
    TableFormat { line: usize, message: String },
    #[error("optical table line {line}: eps2 = {value} is negative, violating passivity")]
    NegativeAbsorption { line: usize, value: f64 },
}

/// Drude model of a metal: eps(i xi) = 1 + wp^2 / (xi (xi + gamma)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    /// Plasma energy hbar*omega_p in eV.
    pub plasma_energy_ev: f64,
    /// Relaxation energy hbar*gamma in eV; zero gives the lossless plasma
    /// model.
    pub damping_energy_ev: f64,
}

impl DrudeParams {
    /// Standard gold parameters: 9 eV plasma energy, 0.035 eV relaxation.
    pub fn gold() -> Self {
        DrudeParams {
            plasma_energy_ev: 9.0,
            damping_energy_ev: 0.035,
        }
    }
}

/// One Lorentz oscillator in the sum
/// eps(i xi) = 1 + sum_j f_j / (w0_j^2 + xi^2 + gamma_j xi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzOscillator {
    /// Oscillator strength f in eV^2; its static contribution is f / w0^2.
    pub strength_ev2: f64,
    /// Resonance energy w0 in eV.
    pub resonance_ev: f64,
    /// Damping gamma in eV.
    pub width_ev: f64,
}

/// Measured absorption spectrum eps''(omega) on a strictly increasing
/// positive energy grid. Constructed through [`TabulatedEps2::new`] or
/// [`load_optical_table`], both of which enforce the grid and passivity
/// invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedEps2 {
    energies_ev: Vec<f64>,
    eps2: Vec<f64>,
    provenance: Option<String>,
}

impl TabulatedEps2 {
    /// Builds a table from (energy_eV, eps2) pairs.
    pub fn new(
        points: Vec<(f64, f64)>,
        provenance: Option<String>,
    ) -> Result<Self, MaterialError> {
        let mut energies_ev = Vec::with_capacity(points.len());
        let mut eps2 = Vec::with_capacity(points.len());
        for (index, &(energy, value)) in points.iter().enumerate() {
            let line = index + 1;
            if !energy.is_finite() || energy <= 0.0 {
                return Err(MaterialError::TableFormat {
                    line,
                    message: format!("energy must be positive and finite, got {energy}"),
                });
            }
            if let Some(&previous) = energies_ev.last() {
                if energy <= previous {
                    return Err(MaterialError::TableFormat {
                        line,
                        message: format!(
                            "energies must increase strictly, got {energy} after {previous}"
                        ),
                    });
                }
            }
            if !value.is_finite() {
                return Err(MaterialError::TableFormat {
                    line,
                    message: format!("eps2 must be finite, got {value}"),
                });
            }
            if value < 0.0 {
                return Err(MaterialError::NegativeAbsorption { line, value });
            }
            energies_ev.push(energy);
            eps2.push(value);
        }
        Ok(TabulatedEps2 {
            energies_ev,
            eps2,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.energies_ev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies_ev.is_empty()
    }

    /// Tabulated energies in eV, strictly increasing.
    pub fn energies_ev(&self) -> &[f64] {
        &self.energies_ev
    }

    /// Tabulated eps'' values, all nonnegative.
    pub fn eps2(&self) -> &[f64] {
        &self.eps2
    }

    /// Free-form note about where the data came from.
    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }
}

/// Effective-medium rule used to mix a solid host with air.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingRule {
    ClausiusMossotti,
    Looyenga,
}

/// A porous mixture of air (volume fraction `porosity`) in a solid host.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingSpec {
    /// Air volume fraction in [0, 1].
    pub porosity: f64,
    pub rule: MixingRule,
    pub host: Box<DielectricModel>,
}

/// Settings for the Kramers-Kronig transform of a tabulated spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KkSettings {
    pub low_end: LowEndExtrapolation,
    pub high_end: HighEndTail,
}

/// How eps'' is continued below the first tabulated energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LowEndExtrapolation {
    /// Linear ramp from (0, 0) up to the first tabulated point, integrated in
    /// closed form. Correct for any absorption that vanishes at zero
    /// frequency, which passivity requires.
    #[default]
    LinearToZero,
    /// Ignore everything below the first point.
    Truncate,
}

/// How eps'' is continued above the last tabulated energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HighEndTail {
    /// Power-law tail eps'' ~ omega^-3 anchored at the last point, integrated
    /// in closed form. This is the asymptotic decay of any oscillator model,
    /// so it is the right default when the table ends above the last
    /// resonance.
    #[default]
    InverseCube,
    /// Ignore everything above the last point.
    Truncate,
}

/// A dielectric function on the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    /// eps = 1 at every frequency.
    Vacuum,
    Drude(DrudeParams),
    LorentzSum(Vec<LorentzOscillator>),
    Tabulated {
        table: TabulatedEps2,
        settings: KkSettings,
    },
    Mixed(MixingSpec),
}

impl DielectricModel {
    /// Evaluates eps(i xi) at photon energy `xi_ev`.
    ///
    /// Drude and tabulated models require xi > 0; the other families accept
    /// xi = 0 and return their static value.
    pub fn eval(&self, xi_ev: f64) -> Result<f64, MaterialError> {
        match self {
            DielectricModel::Vacuum => Ok(1.0),
            DielectricModel::Drude(params) => eps_drude(params, xi_ev),
            DielectricModel::LorentzSum(oscillators) => Ok(eps_lorentz(oscillators, xi_ev)),
            DielectricModel::Tabulated { table, settings } => {
                kk_to_imaginary_axis(table, xi_ev, settings)
            }
            DielectricModel::Mixed(spec) => {
                let host_eps = spec.host.eval(xi_ev)?;
                match spec.rule {
                    MixingRule::ClausiusMossotti => mix_clausius_mossotti(host_eps, spec.porosity),
                    MixingRule::Looyenga => mix_looyenga(host_eps, spec.porosity),
                }
            }
        }
    }
}

/// Drude permittivity at imaginary frequency.
///
/// Diverges as xi -> 0, which is the correct static screening behaviour of a
/// metal, so xi must be positive.
pub fn eps_drude(params: &DrudeParams, xi_ev: f64) -> Result<f64, MaterialError> {
    if !(xi_ev > 0.0) {
        return Err(MaterialError::NonPositiveFrequency { xi: xi_ev });
    }
    let wp2 = params.plasma_energy_ev * params.plasma_energy_ev;
    Ok(1.0 + wp2 / (xi_ev * (xi_ev + params.damping_energy_ev)))
}

/// Lorentz oscillator sum at imaginary frequency; finite for all xi >= 0.
/// An empty oscillator list is vacuum.
pub fn eps_lorentz(oscillators: &[LorentzOscillator], xi_ev: f64) -> f64 {
    let mut eps = 1.0;
    for osc in oscillators {
        let denom = osc.resonance_ev * osc.resonance_ev + xi_ev * xi_ev + osc.width_ev * xi_ev;
        eps += osc.strength_ev2 / denom;
    }
    eps
}

fn check_mixing_inputs(host_eps: f64, porosity: f64) -> Result<(), MaterialError> {
    if !(0.0..=1.0).contains(&porosity) || porosity.is_nan() {
        return Err(MaterialError::PorosityOutOfRange { value: porosity });
    }
    if !(host_eps >= 1.0) {
        return Err(MaterialError::HostEpsilonBelowOne { value: host_eps });
    }
    Ok(())
}

/// Clausius-Mossotti (Maxwell Garnett) mixture of air spheres in a host.
///
/// Solves (eps - eps_host) / (eps + 2 eps_host) =
/// porosity * (1 - eps_host) / (1 + 2 eps_host) for eps in closed form. The
/// endpoints porosity = 0 and porosity = 1 return the host value and 1
/// exactly, bypassing the rational arithmetic.
pub fn mix_clausius_mossotti(host_eps: f64, porosity: f64) -> Result<f64, MaterialError> {
    check_mixing_inputs(host_eps, porosity)?;
    if porosity == 0.0 {
        return Ok(host_eps);
    }
    if porosity == 1.0 {
        return Ok(1.0);
    }
    let t = porosity * (1.0 - host_eps) / (1.0 + 2.0 * host_eps);
    Ok(host_eps * (1.0 + 2.0 * t) / (1.0 - t))
}

/// Looyenga cube-root mixture:
/// eps = (porosity + (1 - porosity) * eps_host^(1/3))^3, with exact
/// endpoints as in [`mix_clausius_mossotti`].
pub fn mix_looyenga(host_eps: f64, porosity: f64) -> Result<f64, MaterialError> {
    check_mixing_inputs(host_eps, porosity)?;
    if porosity == 0.0 {
        return Ok(host_eps);
    }
    if porosity == 1.0 {
        return Ok(1.0);
    }
    let root = porosity + (1.0 - porosity) * host_eps.cbrt();
    Ok(root * root * root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn drude_lossless_at_plasma_energy() {
        let params = DrudeParams {
            plasma_energy_ev: 9.0,
            damping_energy_ev: 0.0,
        };
        assert_eq!(eps_drude(&params, 9.0).unwrap(), 2.0);
    }

    #[test]
    fn drude_gold_at_plasma_energy() {
        // 1 + 81 / (9 * 9.035)
        let eps = eps_drude(&DrudeParams::gold(), 9.0).unwrap();
        assert_relative_eq!(eps, 1.0 + 81.0 / (9.0 * 9.035), max_relative = 1e-15);
        assert_relative_eq!(eps, 1.99612, max_relative = 1e-5);
    }

    #[test]
    fn drude_rejects_nonpositive_frequency() {
        let err = eps_drude(&DrudeParams::gold(), 0.0).unwrap_err();
        assert!(matches!(err, MaterialError::NonPositiveFrequency { .. }));
        assert!(eps_drude(&DrudeParams::gold(), -1.0).is_err());
    }

    #[test]
    fn drude_decays_toward_vacuum() {
        let params = DrudeParams::gold();
        let mut previous = f64::INFINITY;
        for exponent in -3..=4 {
            let xi = 10f64.powi(exponent);
            let eps = eps_drude(&params, xi).unwrap();
            assert!(eps > 1.0);
            assert!(eps < previous);
            previous = eps;
        }
        assert_relative_eq!(eps_drude(&params, 1e6).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn lorentz_single_oscillator_value() {
        let osc = [LorentzOscillator {
            strength_ev2: 1.0,
            resonance_ev: 1.0,
            width_ev: 0.1,
        }];
        assert_relative_eq!(eps_lorentz(&osc, 1.0), 1.0 + 1.0 / 2.1, max_relative = 1e-15);
    }

    #[test]
    fn lorentz_empty_sum_is_vacuum() {
        assert_eq!(eps_lorentz(&[], 5.0), 1.0);
    }

    #[test]
    fn lorentz_static_value_from_strength_over_resonance_squared() {
        let osc = [LorentzOscillator {
            strength_ev2: 4.0,
            resonance_ev: 2.0,
            width_ev: 0.0,
        }];
        assert_eq!(eps_lorentz(&osc, 0.0), 2.0);
    }

    #[test]
    fn clausius_mossotti_reference_value() {
        let eps = mix_clausius_mossotti(3.8, 0.9).unwrap();
        assert_relative_eq!(eps, 1.2165, max_relative = 1e-4);
        // The mixed value must satisfy the defining relation, not merely the
        // closed-form rearrangement of it.
        let lhs = (eps - 3.8) / (eps + 2.0 * 3.8);
        let rhs = 0.9 * (1.0 - 3.8) / (1.0 + 2.0 * 3.8);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn mixing_endpoints_are_exact() {
        assert_eq!(mix_clausius_mossotti(3.8, 1.0).unwrap(), 1.0);
        assert_eq!(mix_clausius_mossotti(3.8, 0.0).unwrap(), 3.8);
        assert_eq!(mix_looyenga(3.8, 1.0).unwrap(), 1.0);
        assert_eq!(mix_looyenga(3.8, 0.0).unwrap(), 3.8);
    }

    #[test]
    fn looyenga_reference_value() {
        let eps = mix_looyenga(3.8, 0.9).unwrap();
        let root = 0.9 + 0.1 * 3.8f64.cbrt();
        assert_relative_eq!(eps, root.powi(3), max_relative = 1e-15);
        assert_relative_eq!(eps, 1.17775, max_relative = 1e-5);
    }

    #[test]
    fn mixing_rejects_bad_inputs() {
        assert!(matches!(
            mix_clausius_mossotti(3.8, 1.2).unwrap_err(),
            MaterialError::PorosityOutOfRange { .. }
        ));
        assert!(matches!(
            mix_clausius_mossotti(3.8, -0.1).unwrap_err(),
            MaterialError::PorosityOutOfRange { .. }
        ));
        assert!(matches!(
            mix_clausius_mossotti(0.5, 0.5).unwrap_err(),
            MaterialError::HostEpsilonBelowOne { .. }
        ));
        assert!(mix_looyenga(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn mixture_lies_between_air_and_host() {
        for rule in [MixingRule::ClausiusMossotti, MixingRule::Looyenga] {
            for porosity in [0.05, 0.3, 0.5, 0.8, 0.95] {
                let mixed = match rule {
                    MixingRule::ClausiusMossotti => mix_clausius_mossotti(3.8, porosity),
                    MixingRule::Looyenga => mix_looyenga(3.8, porosity),
                }
                .unwrap();
                assert!(mixed > 1.0 && mixed < 3.8, "rule {rule:?} phi {porosity}");
            }
        }
    }

    #[test]
    fn table_constructor_enforces_invariants() {
        assert!(TabulatedEps2::new(vec![(1.0, 0.1), (2.0, 0.2)], None).is_ok());
        let err = TabulatedEps2::new(vec![(1.0, 0.1), (0.5, 0.2)], None).unwrap_err();
        assert!(matches!(err, MaterialError::TableFormat { line: 2, .. }));
        let err = TabulatedEps2::new(vec![(1.0, -0.1)], None).unwrap_err();
        assert!(matches!(err, MaterialError::NegativeAbsorption { line: 1, .. }));
        let err = TabulatedEps2::new(vec![(0.0, 0.1)], None).unwrap_err();
        assert!(matches!(err, MaterialError::TableFormat { line: 1, .. }));
    }

    #[test]
    fn model_eval_dispatches_and_nests() {
        let aerogel = DielectricModel::Mixed(MixingSpec {
            porosity: 0.9,
            rule: MixingRule::ClausiusMossotti,
            host: Box::new(DielectricModel::LorentzSum(vec![LorentzOscillator {
                strength_ev2: 2.8 * 4.0,
                resonance_ev: 2.0,
                width_ev: 0.0,
            }])),
        });
        // Host is 3.8 at xi = 0, so the mixture matches the reference value.
        let eps = aerogel.eval(0.0).unwrap();
        assert_relative_eq!(eps, mix_clausius_mossotti(3.8, 0.9).unwrap(), max_relative = 1e-14);
        assert_eq!(DielectricModel::Vacuum.eval(3.0).unwrap(), 1.0);
    }
}
