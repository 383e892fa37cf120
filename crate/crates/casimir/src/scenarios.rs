//! Ready-made stack geometries for porous-film force studies, parameter
//! sweeps over separation, film thickness, or porosity, and a bisection
//! solver that inverts a sweep axis for a target reduction factor.
//!
//! The porous film is always an effective medium: air mixed into a solid
//! skeleton at the given porosity. Physically, backing the film with metal
//! raises the reduction factor (the metal only adds reflectivity), thicker
//! freestanding films reflect more, and thicker films on metal push the
//! metal farther from the gap and so weaken the force.

use thiserror::Error;

use crate::lifshitz::{
    casimir_pressure, GapConfig, LifshitzError, QuadDiagnostics, QuadratureSpec,
};
use crate::materials::{DielectricModel, DrudeParams, LorentzOscillator, MixingRule, MixingSpec};
use crate::optics::Stack;

/// Film thickness used by the porosity-study preset, in nm.
pub const POROSITY_PRESET_THICKNESS_NM: f64 = 500.0;

/// Which two half-spaces face each other across the gap.
// The Custom variant is much bigger than the named ones, but scenario kinds
// are built once per run, not stored in bulk, so boxing would only add
// friction.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    /// Both sides: porous film of the configured thickness on a metal
    /// substrate.
    AerogelOnGoldSymmetric,
    /// Left: bare metal half-space. Right: porous film on metal.
    GoldVsSupportedAerogel,
    /// Both sides: porous film backed by vacuum.
    FreestandingSlabs,
    /// Freestanding geometry with the film thickness pinned to
    /// [`POROSITY_PRESET_THICKNESS_NM`]; meant to be swept in porosity.
    PorositySweep,
    /// Explicit template; the gap is replaced at evaluation time.
    Custom(GapConfig),
}

/// A scenario with all material parameters bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Porous film thickness D in nm; 0 omits the film entirely.
    pub aerogel_thickness_nm: f64,
    /// Air volume fraction of the film.
    pub porosity: f64,
    pub mixing_rule: MixingRule,
    /// Dielectric of the solid skeleton.
    pub silica_model: DielectricModel,
    /// Metal used for substrates and bare half-spaces.
    pub gold_model: DrudeParams,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            kind: ScenarioKind::AerogelOnGoldSymmetric,
            aerogel_thickness_nm: 500.0,
            porosity: 0.90,
            mixing_rule: MixingRule::ClausiusMossotti,
            silica_model: silica_surrogate(),
            gold_model: DrudeParams::gold(),
        }
    }
}

/// Single-pole stand-in for the aerogel's solid skeleton: one far-UV
/// electronic resonance giving a static permittivity of 2.5 that stays
/// nearly flat across the optical window before rolling off. Deliberately
/// simpler and weaker than measured silica (no infrared lattice response),
/// which keeps the skeleton's effective-medium index near unity at every
/// frequency the force integral samples. Not fitted to any dataset; studies
/// that need laboratory accuracy should load tabulated data instead.
pub fn silica_surrogate() -> DielectricModel {
    DielectricModel::LorentzSum(vec![LorentzOscillator {
        strength_ev2: 600.0,
        resonance_ev: 20.0,
        width_ev: 0.5,
    }])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Gap L in nm.
    Separation,
    /// Film thickness D in nm.
    Thickness,
    /// Air fraction of the film.
    Porosity,
}

/// A grid of evaluations along one axis, everything else held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Strictly increasing, non-empty, within the axis's valid range.
    pub grid: Vec<f64>,
    pub fixed: ScenarioSpec,
    pub quad: QuadratureSpec,
    /// Separation applied when `axis` is not [`SweepAxis::Separation`].
    pub gap_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub pressure_pa: f64,
    pub ideal_pressure_pa: f64,
    pub reduction_factor: f64,
    pub diagnostics: QuadDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

/// One grid point of a paired sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub axis_value: f64,
    pub reduction_a: f64,
    pub reduction_b: f64,
    /// reduction_a / reduction_b; exactly 1 when the inputs agree bitwise.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub axis: SweepAxis,
    pub rows: Vec<ComparisonRow>,
}

/// Control variable of the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveVariable {
    Porosity,
    Thickness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveResult {
    /// Control value found by bisection.
    pub value: f64,
    /// Reduction factor at `value`.
    pub reduction_factor: f64,
    /// Force evaluations spent.
    pub evaluations: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("film thickness must be finite and nonnegative, got {value} nm")]
    BadThickness { value: f64 },
    #[error("porosity must lie in [0, 1], got {value}")]
    BadPorosity { value: f64 },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep grid must be strictly increasing, violated at index {index}")]
    GridNotIncreasing { index: usize },
    #[error("grid value {value} outside the valid range of the {axis:?} axis")]
    BadGridValue { axis: SweepAxis, value: f64 },
    #[error("compared sweeps must share the same axis and grid")]
    GridMismatch,
    #[error("evaluation failed at grid point {axis_value}: {source}")]
    AtGridPoint {
        axis_value: f64,
        #[source]
        source: LifshitzError,
    },
    #[error("target reduction factor must lie in (0, 1), got {target}")]
    BadTarget { target: f64 },
    #[error("bracket ({lo}, {hi}) invalid for {variable:?}")]
    BadBracket {
        variable: SolveVariable,
        lo: f64,
        hi: f64,
    },
    #[error(
        "target {target:.6e} not bracketed: F_r({lo}) = {f_lo:.6e}, F_r({hi}) = {f_hi:.6e}"
    )]
    Infeasible {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
}

fn check_thickness(value: f64) -> Result<(), ScenarioError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ScenarioError::BadThickness { value });
    }
    Ok(())
}

fn check_porosity(value: f64) -> Result<(), ScenarioError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ScenarioError::BadPorosity { value });
    }
    Ok(())
}

fn porous_film(spec: &ScenarioSpec) -> DielectricModel {
    DielectricModel::Mixed(MixingSpec {
        porosity: spec.porosity,
        rule: spec.mixing_rule,
        host: Box::new(spec.silica_model.clone()),
    })
}

fn film_on(substrate: DielectricModel, film: DielectricModel, thickness_nm: f64) -> Stack {
    if thickness_nm == 0.0 {
        Stack::half_space(substrate)
    } else {
        Stack::coated(film, thickness_nm, substrate)
    }
}

/// Materializes a scenario at separation `gap_nm`.
pub fn build_scenario(spec: &ScenarioSpec, gap_nm: f64) -> Result<GapConfig, ScenarioError> {
    check_porosity(spec.porosity)?;
    check_thickness(spec.aerogel_thickness_nm)?;
    let metal = DielectricModel::Drude(spec.gold_model);
    let (left, right) = match &spec.kind {
        ScenarioKind::AerogelOnGoldSymmetric => {
            let side = film_on(
                metal.clone(),
                porous_film(spec),
                spec.aerogel_thickness_nm,
            );
            (side.clone(), side)
        }
        ScenarioKind::GoldVsSupportedAerogel => (
            Stack::half_space(metal.clone()),
            film_on(metal, porous_film(spec), spec.aerogel_thickness_nm),
        ),
        ScenarioKind::FreestandingSlabs => {
            let side = film_on(
                DielectricModel::Vacuum,
                porous_film(spec),
                spec.aerogel_thickness_nm,
            );
            (side.clone(), side)
        }
        ScenarioKind::PorositySweep => {
            let side = film_on(
                DielectricModel::Vacuum,
                porous_film(spec),
                POROSITY_PRESET_THICKNESS_NM,
            );
            (side.clone(), side)
        }
        ScenarioKind::Custom(template) => (template.left.clone(), template.right.clone()),
    };
    Ok(GapConfig {
        left,
        right,
        gap_nm,
    })
}

/// Default separation grid: 40 log-spaced gaps from 100 nm to 2 um.
pub fn default_separation_grid() -> Vec<f64> {
    let n = 40;
    let (lo, hi) = (100.0_f64, 2000.0_f64);
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Default film-thickness grid in nm.
pub fn default_thickness_grid() -> Vec<f64> {
    vec![250.0, 500.0, 700.0, 1000.0]
}

/// Default porosity grid.
pub fn default_porosity_grid() -> Vec<f64> {
    vec![0.80, 0.85, 0.90, 0.95]
}

fn validate_grid(axis: SweepAxis, grid: &[f64]) -> Result<(), ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    for (index, pair) in grid.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(ScenarioError::GridNotIncreasing { index: index + 1 });
        }
    }
    for &value in grid {
        let ok = value.is_finite()
            && match axis {
                SweepAxis::Separation => value > 0.0,
                SweepAxis::Thickness => value >= 0.0,
                SweepAxis::Porosity => (0.0..=1.0).contains(&value),
            };
        if !ok {
            return Err(ScenarioError::BadGridValue { axis, value });
        }
    }
    Ok(())
}

fn point_config(sweep: &SweepSpec, value: f64) -> Result<GapConfig, ScenarioError> {
    let mut spec = sweep.fixed.clone();
    let gap_nm = match sweep.axis {
        SweepAxis::Separation => value,
        SweepAxis::Thickness => {
            spec.aerogel_thickness_nm = value;
            sweep.gap_nm
        }
        SweepAxis::Porosity => {
            spec.porosity = value;
            sweep.gap_nm
        }
    };
    build_scenario(&spec, gap_nm)
}

/// Evaluates the force at every grid point, in grid order.
pub fn run_sweep(sweep: &SweepSpec) -> Result<SweepResult, ScenarioError> {
    validate_grid(sweep.axis, &sweep.grid)?;
    let mut rows = Vec::with_capacity(sweep.grid.len());
    for &value in &sweep.grid {
        let config = point_config(sweep, value)?;
        let result = casimir_pressure(&config, &sweep.quad).map_err(|source| {
            ScenarioError::AtGridPoint {
                axis_value: value,
                source,
            }
        })?;
        rows.push(SweepRow {
            axis_value: value,
            pressure_pa: result.pressure_pa,
            ideal_pressure_pa: result.ideal_pressure_pa,
            reduction_factor: result.reduction_factor,
            diagnostics: result.diagnostics,
        });
    }
    Ok(SweepResult {
        axis: sweep.axis,
        rows,
    })
}

/// Runs two sweeps over one shared grid and tabulates the ratio of their
/// reduction factors row by row.
pub fn compare_scenarios(a: &SweepSpec, b: &SweepSpec) -> Result<ComparisonTable, ScenarioError> {
    if a.axis != b.axis || a.grid != b.grid {
        return Err(ScenarioError::GridMismatch);
    }
    let result_a = run_sweep(a)?;
    let result_b = run_sweep(b)?;
    let rows = result_a
        .rows
        .iter()
        .zip(&result_b.rows)
        .map(|(ra, rb)| ComparisonRow {
            axis_value: ra.axis_value,
            reduction_a: ra.reduction_factor,
            reduction_b: rb.reduction_factor,
            // Bit-equal inputs must give exactly 1, even when both are 0.
            ratio: if ra.reduction_factor == rb.reduction_factor {
                1.0
            } else {
                ra.reduction_factor / rb.reduction_factor
            },
        })
        .collect();
    Ok(ComparisonTable {
        axis: a.axis,
        rows,
    })
}

/// Finds the control value whose reduction factor hits `target` by
/// bisection over `bracket`. Requires the endpoint values to straddle the
/// target; stops once |F_r - target| < tol or the bracket collapses to
/// floating-point resolution.
pub fn solve_for_target(
    variable: SolveVariable,
    target: f64,
    bracket: (f64, f64),
    fixed: &ScenarioSpec,
    gap_nm: f64,
    quad: &QuadratureSpec,
    tol: f64,
) -> Result<SolveResult, ScenarioError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(ScenarioError::BadTarget { target });
    }
    let (lo, hi) = bracket;
    let range_ok = match variable {
        SolveVariable::Porosity => (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi),
        SolveVariable::Thickness => lo >= 0.0 && hi.is_finite(),
    };
    if !(lo < hi) || !range_ok || !(tol > 0.0) {
        return Err(ScenarioError::BadBracket { variable, lo, hi });
    }

    let mut evaluations = 0;
    let mut eval = |value: f64| -> Result<f64, ScenarioError> {
        let mut spec = fixed.clone();
        match variable {
            SolveVariable::Porosity => spec.porosity = value,
            SolveVariable::Thickness => spec.aerogel_thickness_nm = value,
        }
        let config = build_scenario(&spec, gap_nm)?;
        evaluations += 1;
        Ok(casimir_pressure(&config, quad)?.reduction_factor)
    };

    let f_lo = eval(lo)?;
    if f_lo == target {
        return Ok(SolveResult {
            value: lo,
            reduction_factor: f_lo,
            evaluations,
        });
    }
    let f_hi = eval(hi)?;
    if f_hi == target {
        return Ok(SolveResult {
            value: hi,
            reduction_factor: f_hi,
            evaluations,
        });
    }
    if (f_lo - target) * (f_hi - target) > 0.0 {
        return Err(ScenarioError::Infeasible {
            lo,
            hi,
            f_lo,
            f_hi,
            target,
        });
    }

    let (mut lo, mut hi) = (lo, hi);
    // f(lo) stays on its side of the target throughout, so its sign is fixed.
    let sign_lo = (f_lo - target).signum();
    loop {
        let mid = 0.5 * (lo + hi);
        // The bracket has collapsed when the midpoint stops moving.
        if mid <= lo || mid >= hi {
            let f_mid = eval(mid)?;
            return Ok(SolveResult {
                value: mid,
                reduction_factor: f_mid,
                evaluations,
            });
        }
        let f_mid = eval(mid)?;
        if (f_mid - target).abs() < tol {
            return Ok(SolveResult {
                value: mid,
                reduction_factor: f_mid,
                evaluations,
            });
        }
        if (f_mid - target).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
