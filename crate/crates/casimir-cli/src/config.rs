//! Sectioned key-value run configuration.
//!
//! The format is INI-like and diff-friendly: `[section]` headers, one
//! `key = value` per line, `#` comments. Material sections are named
//! (`[material silica]`) and referenced elsewhere by that name. The names
//! `silica`, `gold`, and `vacuum` are built in (a bundled skeleton
//! surrogate, a Drude metal, and empty space) and can be shadowed by an
//! explicit definition.
//!
//! Parsing is strict: unknown sections, unknown keys, duplicate keys, and
//! malformed values are all rejected with their line number. `serialize`
//! writes the canonical full form, and parse -> serialize -> parse is an
//! identity on the parsed representation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use casimir::lifshitz::GapConfig;
use casimir::materials::{
    load_optical_table, HighEndTail, KkSettings, LowEndExtrapolation, TableFormat,
};
use casimir::scenarios::{ScenarioKind, ScenarioSpec, SweepSpec};
use casimir::{
    DielectricModel, DrudeParams, Layer, LorentzOscillator, MixingRule, MixingSpec,
    QuadratureSpec, Stack, SweepAxis,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        key: String,
        section: String,
    },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("[{section}] is missing required key `{key}`")]
    MissingField { section: String, key: String },
    #[error("line {line}: material `{name}` is defined twice")]
    DuplicateMaterial { line: usize, name: String },
    #[error("material `{name}` is not defined")]
    UndefinedMaterial { name: String },
    #[error("material `{name}` refers back to itself through its mixture host")]
    MaterialCycle { name: String },
    #[error("material `{name}` must be a drude metal to back a scenario")]
    MetalNotDrude { name: String },
    #[error("could not read optical table `{path}`: {source}")]
    TableRead {
        path: String,
        source: std::io::Error,
    },
    #[error("optical table `{path}`: {source}")]
    TableParse {
        path: String,
        source: casimir::MaterialError,
    },
}

/// One material definition as written in the file, before resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialDef {
    Vacuum,
    Drude {
        plasma_ev: f64,
        damping_ev: f64,
    },
    Lorentz {
        /// (strength eV^2, resonance eV, width eV) per oscillator.
        oscillators: Vec<(f64, f64, f64)>,
    },
    Table {
        file: String,
        format: TableFormat,
        low_end: LowEndExtrapolation,
        high_end: HighEndTail,
    },
    Mixture {
        host: String,
        porosity: f64,
        rule: MixingRule,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKindDef {
    AerogelOnGold,
    GoldVsAerogel,
    Freestanding,
    PorosityStudy,
    Custom,
}

/// Layers outermost first plus a substrate, all by material name.
#[derive(Debug, Clone, PartialEq)]
pub struct StackDef {
    pub layers: Vec<(String, f64)>,
    pub substrate: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDef {
    pub kind: ScenarioKindDef,
    pub thickness_nm: f64,
    pub porosity: f64,
    pub mixing: MixingRule,
    /// Material name of the film's solid skeleton.
    pub solid: String,
    /// Material name of the backing metal; must resolve to a Drude model.
    pub metal: String,
    /// Explicit stacks, only for `kind = custom`.
    pub left: Option<StackDef>,
    pub right: Option<StackDef>,
}

impl Default for ScenarioDef {
    fn default() -> Self {
        ScenarioDef {
            kind: ScenarioKindDef::AerogelOnGold,
            thickness_nm: 500.0,
            porosity: 0.90,
            mixing: MixingRule::ClausiusMossotti,
            solid: "silica".into(),
            metal: "gold".into(),
            left: None,
            right: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridDef {
    /// Log-spaced, endpoints included.
    Log { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDef {
    pub axis: SweepAxis,
    pub grid: GridDef,
    /// Separation when the axis is thickness or porosity.
    pub gap_nm: f64,
}

impl Default for SweepDef {
    fn default() -> Self {
        SweepDef {
            axis: SweepAxis::Separation,
            grid: GridDef::Log {
                lo: 100.0,
                hi: 2000.0,
                n: 40,
            },
            gap_nm: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputDef {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

/// A parsed, validated configuration file. The default value is what an
/// empty file parses to.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub materials: BTreeMap<String, MaterialDef>,
    pub scenario: ScenarioDef,
    pub sweep: SweepDef,
    pub quadrature: QuadratureSpec,
    pub output: OutputDef,
}

enum SectionKind {
    Material(String),
    Scenario,
    Sweep,
    Quadrature,
    Output,
}

struct RawSection {
    kind: SectionKind,
    entries: Vec<(usize, String, String)>,
}

fn split_sections(source: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (index, raw_line) in source.lines().enumerate() {
        let line = index + 1;
        let text = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if text.is_empty() {
            continue;
        }
        if let Some(header) = text.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: "section header must end with `]`".into(),
            })?;
            let mut words = header.split_whitespace();
            let kind = match (words.next(), words.next(), words.next()) {
                (Some("material"), Some(name), None) => SectionKind::Material(name.to_string()),
                (Some("scenario"), None, _) => SectionKind::Scenario,
                (Some("sweep"), None, _) => SectionKind::Sweep,
                (Some("quadrature"), None, _) => SectionKind::Quadrature,
                (Some("output"), None, _) => SectionKind::Output,
                (Some("material"), None, _) => {
                    return Err(ConfigError::Syntax {
                        line,
                        message: "[material] needs a name: [material NAME]".into(),
                    })
                }
                _ => {
                    return Err(ConfigError::UnknownSection {
                        line,
                        name: header.trim().to_string(),
                    })
                }
            };
            sections.push(RawSection {
                kind,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, got `{text}`"),
        })?;
        let section = sections.last_mut().ok_or_else(|| ConfigError::Syntax {
            line,
            message: "key-value pair before any [section] header".into(),
        })?;
        section
            .entries
            .push((line, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("`{value}` is not a finite number"),
        })
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        message: format!("`{value}` is not a nonnegative integer"),
    })
}

fn parse_mixing(line: usize, key: &str, value: &str) -> Result<MixingRule, ConfigError> {
    match value {
        "clausius_mossotti" => Ok(MixingRule::ClausiusMossotti),
        "looyenga" => Ok(MixingRule::Looyenga),
        other => Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("`{other}` is not a mixing rule (clausius_mossotti | looyenga)"),
        }),
    }
}

/// `name thickness_nm, name thickness_nm, ...`; empty means no layers.
fn parse_layers(line: usize, key: &str, value: &str) -> Result<Vec<(String, f64)>, ConfigError> {
    let mut layers = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, thickness) = part.rsplit_once(' ').ok_or_else(|| ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("layer `{part}` must be `material_name thickness_nm`"),
        })?;
        let thickness_nm = parse_f64(line, key, thickness.trim())?;
        if !(thickness_nm > 0.0) {
            return Err(ConfigError::BadValue {
                line,
                key: key.to_string(),
                message: format!("layer thickness must be positive, got {thickness_nm}"),
            });
        }
        layers.push((name.trim().to_string(), thickness_nm));
    }
    Ok(layers)
}

/// Tracks single-assignment keys so repeats are flagged at their line.
struct Once<T> {
    value: Option<T>,
}

impl<T> Once<T> {
    fn new() -> Self {
        Once { value: None }
    }

    fn set(&mut self, line: usize, key: &str, value: T) -> Result<(), ConfigError> {
        if self.value.is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        self.value = Some(value);
        Ok(())
    }
}

fn interpret_material(
    name: &str,
    entries: &[(usize, String, String)],
) -> Result<MaterialDef, ConfigError> {
    let section = format!("material {name}");
    let type_entry = entries
        .iter()
        .find(|(_, key, _)| key == "type")
        .ok_or_else(|| ConfigError::MissingField {
            section: section.clone(),
            key: "type".into(),
        })?;
    let (type_line, _, type_value) = type_entry;

    macro_rules! reject_unknown {
        ($allowed:expr) => {
            for (line, key, _) in entries {
                if key != "type" && !$allowed.contains(&key.as_str()) {
                    return Err(ConfigError::UnknownKey {
                        line: *line,
                        key: key.clone(),
                        section: section.clone(),
                    });
                }
            }
        };
    }

    match type_value.as_str() {
        "vacuum" => {
            reject_unknown!([] as [&str; 0]);
            Ok(MaterialDef::Vacuum)
        }
        "drude" => {
            reject_unknown!(["plasma_ev", "damping_ev"]);
            let mut plasma = Once::new();
            let mut damping = Once::new();
            for (line, key, value) in entries {
                match key.as_str() {
                    "plasma_ev" => plasma.set(*line, key, parse_f64(*line, key, value)?)?,
                    "damping_ev" => damping.set(*line, key, parse_f64(*line, key, value)?)?,
                    _ => {}
                }
            }
            Ok(MaterialDef::Drude {
                plasma_ev: plasma.value.ok_or_else(|| ConfigError::MissingField {
                    section: section.clone(),
                    key: "plasma_ev".into(),
                })?,
                damping_ev: damping.value.ok_or_else(|| ConfigError::MissingField {
                    section: section.clone(),
                    key: "damping_ev".into(),
                })?,
            })
        }
        "lorentz" => {
            reject_unknown!(["oscillator"]);
            let mut oscillators = Vec::new();
            for (line, key, value) in entries {
                if key != "oscillator" {
                    continue;
                }
                let fields: Vec<&str> = value.split(',').map(str::trim).collect();
                if fields.len() != 3 {
                    return Err(ConfigError::BadValue {
                        line: *line,
                        key: key.clone(),
                        message: "expected `strength_ev2, resonance_ev, width_ev`".into(),
                    });
                }
                oscillators.push((
                    parse_f64(*line, key, fields[0])?,
                    parse_f64(*line, key, fields[1])?,
                    parse_f64(*line, key, fields[2])?,
                ));
            }
            if oscillators.is_empty() {
                return Err(ConfigError::MissingField {
                    section,
                    key: "oscillator".into(),
                });
            }
            Ok(MaterialDef::Lorentz { oscillators })
        }
        "table" => {
            reject_unknown!(["file", "format", "low_end", "high_end"]);
            let mut file = Once::new();
            let mut format = Once::new();
            let mut low_end = Once::new();
            let mut high_end = Once::new();
            for (line, key, value) in entries {
                match key.as_str() {
                    "file" => file.set(*line, key, value.clone())?,
                    "format" => format.set(
                        *line,
                        key,
                        match value.as_str() {
                            "eps2" => TableFormat::Eps2,
                            "nk" => TableFormat::Nk,
                            other => {
                                return Err(ConfigError::BadValue {
                                    line: *line,
                                    key: key.clone(),
                                    message: format!(
                                        "`{other}` is not a table format (eps2 | nk)"
                                    ),
                                })
                            }
                        },
                    )?,
                    "low_end" => low_end.set(
                        *line,
                        key,
                        match value.as_str() {
                            "linear" => LowEndExtrapolation::LinearToZero,
                            "truncate" => LowEndExtrapolation::Truncate,
                            other => {
                                return Err(ConfigError::BadValue {
                                    line: *line,
                                    key: key.clone(),
                                    message: format!(
                                        "`{other}` is not a low-end rule (linear | truncate)"
                                    ),
                                })
                            }
                        },
                    )?,
                    "high_end" => high_end.set(
                        *line,
                        key,
                        match value.as_str() {
                            "inverse_cube" => HighEndTail::InverseCube,
                            "truncate" => HighEndTail::Truncate,
                            other => {
                                return Err(ConfigError::BadValue {
                                    line: *line,
                                    key: key.clone(),
                                    message: format!(
                                        "`{other}` is not a high-end rule (inverse_cube | truncate)"
                                    ),
                                })
                            }
                        },
                    )?,
                    _ => {}
                }
            }
            Ok(MaterialDef::Table {
                file: file.value.ok_or(ConfigError::MissingField {
                    section,
                    key: "file".into(),
                })?,
                format: format.value.unwrap_or(TableFormat::Eps2),
                low_end: low_end.value.unwrap_or_default(),
                high_end: high_end.value.unwrap_or_default(),
            })
        }
        "mixture" => {
            reject_unknown!(["host", "porosity", "rule"]);
            let mut host = Once::new();
            let mut porosity = Once::new();
            let mut rule = Once::new();
            for (line, key, value) in entries {
                match key.as_str() {
                    "host" => host.set(*line, key, value.clone())?,
                    "porosity" => porosity.set(*line, key, parse_f64(*line, key, value)?)?,
                    "rule" => rule.set(*line, key, parse_mixing(*line, key, value)?)?,
                    _ => {}
                }
            }
            let porosity_value = porosity.value.ok_or_else(|| ConfigError::MissingField {
                section: section.clone(),
                key: "porosity".into(),
            })?;
            if !(0.0..=1.0).contains(&porosity_value) {
                let (line, _, _) = entries
                    .iter()
                    .find(|(_, key, _)| key == "porosity")
                    .expect("porosity entry exists");
                return Err(ConfigError::BadValue {
                    line: *line,
                    key: "porosity".into(),
                    message: format!("porosity must lie in [0, 1], got {porosity_value}"),
                });
            }
            Ok(MaterialDef::Mixture {
                host: host.value.ok_or(ConfigError::MissingField {
                    section,
                    key: "host".into(),
                })?,
                porosity: porosity_value,
                rule: rule.value.unwrap_or(MixingRule::ClausiusMossotti),
            })
        }
        other => Err(ConfigError::BadValue {
            line: *type_line,
            key: "type".into(),
            message: format!(
                "`{other}` is not a material type (vacuum | drude | lorentz | table | mixture)"
            ),
        }),
    }
}

fn interpret_scenario(entries: &[(usize, String, String)]) -> Result<ScenarioDef, ConfigError> {
    let mut def = ScenarioDef::default();
    let mut left_layers = Once::new();
    let mut left_substrate = Once::new();
    let mut right_layers = Once::new();
    let mut right_substrate = Once::new();
    let mut seen: Vec<&str> = Vec::new();
    for (line, key, value) in entries {
        if seen.contains(&key.as_str()) {
            return Err(ConfigError::DuplicateKey {
                line: *line,
                key: key.clone(),
            });
        }
        match key.as_str() {
            "kind" => {
                def.kind = match value.as_str() {
                    "aerogel_on_gold" => ScenarioKindDef::AerogelOnGold,
                    "gold_vs_aerogel" => ScenarioKindDef::GoldVsAerogel,
                    "freestanding" => ScenarioKindDef::Freestanding,
                    "porosity_study" => ScenarioKindDef::PorosityStudy,
                    "custom" => ScenarioKindDef::Custom,
                    other => {
                        return Err(ConfigError::BadValue {
                            line: *line,
                            key: key.clone(),
                            message: format!(
                                "`{other}` is not a scenario kind (aerogel_on_gold | \
                                 gold_vs_aerogel | freestanding | porosity_study | custom)"
                            ),
                        })
                    }
                };
                seen.push("kind");
            }
            "thickness_nm" => {
                def.thickness_nm = parse_f64(*line, key, value)?;
                if def.thickness_nm < 0.0 {
                    return Err(ConfigError::BadValue {
                        line: *line,
                        key: key.clone(),
                        message: format!("thickness must be nonnegative, got {}", def.thickness_nm),
                    });
                }
                seen.push("thickness_nm");
            }
            "porosity" => {
                def.porosity = parse_f64(*line, key, value)?;
                if !(0.0..=1.0).contains(&def.porosity) {
                    return Err(ConfigError::BadValue {
                        line: *line,
                        key: key.clone(),
                        message: format!("porosity must lie in [0, 1], got {}", def.porosity),
                    });
                }
                seen.push("porosity");
            }
            "mixing" => {
                def.mixing = parse_mixing(*line, key, value)?;
                seen.push("mixing");
            }
            "solid" => {
                def.solid = value.clone();
                seen.push("solid");
            }
            "metal" => {
                def.metal = value.clone();
                seen.push("metal");
            }
            "left_layers" => left_layers.set(*line, key, parse_layers(*line, key, value)?)?,
            "left_substrate" => left_substrate.set(*line, key, value.clone())?,
            "right_layers" => right_layers.set(*line, key, parse_layers(*line, key, value)?)?,
            "right_substrate" => right_substrate.set(*line, key, value.clone())?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                    section: "scenario".into(),
                })
            }
        }
    }
    if def.kind == ScenarioKindDef::Custom {
        def.left = Some(StackDef {
            layers: left_layers.value.unwrap_or_default(),
            substrate: left_substrate.value.ok_or(ConfigError::MissingField {
                section: "scenario".into(),
                key: "left_substrate".into(),
            })?,
        });
        def.right = Some(StackDef {
            layers: right_layers.value.unwrap_or_default(),
            substrate: right_substrate.value.ok_or(ConfigError::MissingField {
                section: "scenario".into(),
                key: "right_substrate".into(),
            })?,
        });
    } else if left_layers.value.is_some()
        || left_substrate.value.is_some()
        || right_layers.value.is_some()
        || right_substrate.value.is_some()
    {
        return Err(ConfigError::MissingField {
            section: "scenario".into(),
            key: "kind = custom (stack keys are only valid for custom scenarios)".into(),
        });
    }
    Ok(def)
}

fn interpret_sweep(entries: &[(usize, String, String)]) -> Result<SweepDef, ConfigError> {
    let mut def = SweepDef::default();
    let mut seen: Vec<&str> = Vec::new();
    for (line, key, value) in entries {
        if seen.contains(&key.as_str()) {
            return Err(ConfigError::DuplicateKey {
                line: *line,
                key: key.clone(),
            });
        }
        match key.as_str() {
            "axis" => {
                def.axis = match value.as_str() {
                    "separation" => SweepAxis::Separation,
                    "thickness" => SweepAxis::Thickness,
                    "porosity" => SweepAxis::Porosity,
                    other => {
                        return Err(ConfigError::BadValue {
                            line: *line,
                            key: key.clone(),
                            message: format!(
                                "`{other}` is not a sweep axis (separation | thickness | porosity)"
                            ),
                        })
                    }
                };
                seen.push("axis");
            }
            "grid" => {
                let words: Vec<&str> = value.split_whitespace().collect();
                def.grid = match words.split_first() {
                    Some((&"log", rest)) if rest.len() == 3 => {
                        let lo = parse_f64(*line, key, rest[0])?;
                        let hi = parse_f64(*line, key, rest[1])?;
                        let n = parse_usize(*line, key, rest[2])?;
                        if !(lo > 0.0 && hi > lo) || n < 2 {
                            return Err(ConfigError::BadValue {
                                line: *line,
                                key: key.clone(),
                                message: "log grid needs 0 < lo < hi and n >= 2".into(),
                            });
                        }
                        GridDef::Log { lo, hi, n }
                    }
                    Some((&"list", rest)) if !rest.is_empty() => {
                        let values = rest
                            .iter()
                            .map(|v| parse_f64(*line, key, v))
                            .collect::<Result<Vec<f64>, _>>()?;
                        GridDef::List(values)
                    }
                    _ => {
                        return Err(ConfigError::BadValue {
                            line: *line,
                            key: key.clone(),
                            message: "expected `log LO HI N` or `list V1 V2 ...`".into(),
                        })
                    }
                };
                seen.push("grid");
            }
            "gap_nm" => {
                def.gap_nm = parse_f64(*line, key, value)?;
                seen.push("gap_nm");
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                    section: "sweep".into(),
                })
            }
        }
    }
    Ok(def)
}

fn interpret_quadrature(
    entries: &[(usize, String, String)],
) -> Result<QuadratureSpec, ConfigError> {
    let mut quad = QuadratureSpec::default();
    let mut seen: Vec<&str> = Vec::new();
    for (line, key, value) in entries {
        if seen.contains(&key.as_str()) {
            return Err(ConfigError::DuplicateKey {
                line: *line,
                key: key.clone(),
            });
        }
        match key.as_str() {
            "xi_nodes" => {
                quad.xi_nodes = parse_usize(*line, key, value)?;
                seen.push("xi_nodes");
            }
            "q_nodes" => {
                quad.q_nodes = parse_usize(*line, key, value)?;
                seen.push("q_nodes");
            }
            "cutoff_scale" => {
                quad.cutoff_scale = parse_f64(*line, key, value)?;
                seen.push("cutoff_scale");
            }
            "target_rel_tol" => {
                quad.target_rel_tol = parse_f64(*line, key, value)?;
                seen.push("target_rel_tol");
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                    section: "quadrature".into(),
                })
            }
        }
    }
    Ok(quad)
}

fn interpret_output(entries: &[(usize, String, String)]) -> Result<OutputDef, ConfigError> {
    let mut def = OutputDef::default();
    let mut seen: Vec<&str> = Vec::new();
    for (line, key, value) in entries {
        if seen.contains(&key.as_str()) {
            return Err(ConfigError::DuplicateKey {
                line: *line,
                key: key.clone(),
            });
        }
        match key.as_str() {
            "csv" => {
                def.csv = Some(value.clone());
                seen.push("csv");
            }
            "svg" => {
                def.svg = Some(value.clone());
                seen.push("svg");
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                    section: "output".into(),
                })
            }
        }
    }
    Ok(def)
}

/// Parses a configuration file.
pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    let sections = split_sections(source)?;
    let mut config = RunConfig::default();
    let mut scenario_seen = false;
    let mut sweep_seen = false;
    let mut quadrature_seen = false;
    let mut output_seen = false;
    for section in &sections {
        match &section.kind {
            SectionKind::Material(name) => {
                let def = interpret_material(name, &section.entries)?;
                if config.materials.insert(name.clone(), def).is_some() {
                    let line = section.entries.first().map(|e| e.0).unwrap_or(0);
                    return Err(ConfigError::DuplicateMaterial {
                        line,
                        name: name.clone(),
                    });
                }
            }
            SectionKind::Scenario => {
                if scenario_seen {
                    return Err(ConfigError::Syntax {
                        line: section.entries.first().map(|e| e.0).unwrap_or(0),
                        message: "[scenario] appears twice".into(),
                    });
                }
                scenario_seen = true;
                config.scenario = interpret_scenario(&section.entries)?;
            }
            SectionKind::Sweep => {
                if sweep_seen {
                    return Err(ConfigError::Syntax {
                        line: section.entries.first().map(|e| e.0).unwrap_or(0),
                        message: "[sweep] appears twice".into(),
                    });
                }
                sweep_seen = true;
                config.sweep = interpret_sweep(&section.entries)?;
            }
            SectionKind::Quadrature => {
                if quadrature_seen {
                    return Err(ConfigError::Syntax {
                        line: section.entries.first().map(|e| e.0).unwrap_or(0),
                        message: "[quadrature] appears twice".into(),
                    });
                }
                quadrature_seen = true;
                config.quadrature = interpret_quadrature(&section.entries)?;
            }
            SectionKind::Output => {
                if output_seen {
                    return Err(ConfigError::Syntax {
                        line: section.entries.first().map(|e| e.0).unwrap_or(0),
                        message: "[output] appears twice".into(),
                    });
                }
                output_seen = true;
                config.output = interpret_output(&section.entries)?;
            }
        }
    }
    validate_references(&config)?;
    Ok(config)
}

/// Every material name the config mentions, in deterministic order.
fn referenced_names(config: &RunConfig) -> Vec<&str> {
    let mut names: Vec<&str> = Vec::new();
    match config.scenario.kind {
        ScenarioKindDef::Custom => {
            for stack in [&config.scenario.left, &config.scenario.right]
                .into_iter()
                .flatten()
            {
                names.extend(stack.layers.iter().map(|(name, _)| name.as_str()));
                names.push(stack.substrate.as_str());
            }
        }
        _ => {
            names.push(config.scenario.solid.as_str());
            names.push(config.scenario.metal.as_str());
        }
    }
    for def in config.materials.values() {
        if let MaterialDef::Mixture { host, .. } = def {
            names.push(host.as_str());
        }
    }
    names
}

fn is_known(config: &RunConfig, name: &str) -> bool {
    config.materials.contains_key(name) || matches!(name, "silica" | "gold" | "vacuum")
}

fn validate_references(config: &RunConfig) -> Result<(), ConfigError> {
    for name in referenced_names(config) {
        if !is_known(config, name) {
            return Err(ConfigError::UndefinedMaterial { name: name.into() });
        }
    }
    Ok(())
}

fn mixing_name(rule: MixingRule) -> &'static str {
    match rule {
        MixingRule::ClausiusMossotti => "clausius_mossotti",
        MixingRule::Looyenga => "looyenga",
    }
}

fn layers_value(layers: &[(String, f64)]) -> String {
    layers
        .iter()
        .map(|(name, d)| format!("{name} {d}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Writes the canonical full form; parsing it back yields an identical
/// `RunConfig`.
pub fn serialize_config(config: &RunConfig) -> String {
    let mut out = String::new();
    for (name, def) in &config.materials {
        let _ = writeln!(out, "[material {name}]");
        match def {
            MaterialDef::Vacuum => {
                let _ = writeln!(out, "type = vacuum");
            }
            MaterialDef::Drude {
                plasma_ev,
                damping_ev,
            } => {
                let _ = writeln!(out, "type = drude");
                let _ = writeln!(out, "plasma_ev = {plasma_ev}");
                let _ = writeln!(out, "damping_ev = {damping_ev}");
            }
            MaterialDef::Lorentz { oscillators } => {
                let _ = writeln!(out, "type = lorentz");
                for (f, w0, gamma) in oscillators {
                    let _ = writeln!(out, "oscillator = {f}, {w0}, {gamma}");
                }
            }
            MaterialDef::Table {
                file,
                format,
                low_end,
                high_end,
            } => {
                let _ = writeln!(out, "type = table");
                let _ = writeln!(out, "file = {file}");
                let _ = writeln!(
                    out,
                    "format = {}",
                    match format {
                        TableFormat::Eps2 => "eps2",
                        TableFormat::Nk => "nk",
                    }
                );
                let _ = writeln!(
                    out,
                    "low_end = {}",
                    match low_end {
                        LowEndExtrapolation::LinearToZero => "linear",
                        LowEndExtrapolation::Truncate => "truncate",
                    }
                );
                let _ = writeln!(
                    out,
                    "high_end = {}",
                    match high_end {
                        HighEndTail::InverseCube => "inverse_cube",
                        HighEndTail::Truncate => "truncate",
                    }
                );
            }
            MaterialDef::Mixture {
                host,
                porosity,
                rule,
            } => {
                let _ = writeln!(out, "type = mixture");
                let _ = writeln!(out, "host = {host}");
                let _ = writeln!(out, "porosity = {porosity}");
                let _ = writeln!(out, "rule = {}", mixing_name(*rule));
            }
        }
        let _ = writeln!(out);
    }

    let s = &config.scenario;
    let _ = writeln!(out, "[scenario]");
    let _ = writeln!(
        out,
        "kind = {}",
        match s.kind {
            ScenarioKindDef::AerogelOnGold => "aerogel_on_gold",
            ScenarioKindDef::GoldVsAerogel => "gold_vs_aerogel",
            ScenarioKindDef::Freestanding => "freestanding",
            ScenarioKindDef::PorosityStudy => "porosity_study",
            ScenarioKindDef::Custom => "custom",
        }
    );
    let _ = writeln!(out, "thickness_nm = {}", s.thickness_nm);
    let _ = writeln!(out, "porosity = {}", s.porosity);
    let _ = writeln!(out, "mixing = {}", mixing_name(s.mixing));
    let _ = writeln!(out, "solid = {}", s.solid);
    let _ = writeln!(out, "metal = {}", s.metal);
    if let (Some(left), Some(right)) = (&s.left, &s.right) {
        let _ = writeln!(out, "left_layers = {}", layers_value(&left.layers));
        let _ = writeln!(out, "left_substrate = {}", left.substrate);
        let _ = writeln!(out, "right_layers = {}", layers_value(&right.layers));
        let _ = writeln!(out, "right_substrate = {}", right.substrate);
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "[sweep]");
    let _ = writeln!(
        out,
        "axis = {}",
        match config.sweep.axis {
            SweepAxis::Separation => "separation",
            SweepAxis::Thickness => "thickness",
            SweepAxis::Porosity => "porosity",
        }
    );
    match &config.sweep.grid {
        GridDef::Log { lo, hi, n } => {
            let _ = writeln!(out, "grid = log {lo} {hi} {n}");
        }
        GridDef::List(values) => {
            let rendered: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "grid = list {}", rendered.join(" "));
        }
    }
    let _ = writeln!(out, "gap_nm = {}", config.sweep.gap_nm);
    let _ = writeln!(out);

    let q = &config.quadrature;
    let _ = writeln!(out, "[quadrature]");
    let _ = writeln!(out, "xi_nodes = {}", q.xi_nodes);
    let _ = writeln!(out, "q_nodes = {}", q.q_nodes);
    let _ = writeln!(out, "cutoff_scale = {}", q.cutoff_scale);
    let _ = writeln!(out, "target_rel_tol = {}", q.target_rel_tol);
    let _ = writeln!(out);

    let _ = writeln!(out, "[output]");
    if let Some(csv) = &config.output.csv {
        let _ = writeln!(out, "csv = {csv}");
    }
    if let Some(svg) = &config.output.svg {
        let _ = writeln!(out, "svg = {svg}");
    }
    out
}

fn resolve_material(
    config: &RunConfig,
    base_dir: &Path,
    name: &str,
    visiting: &mut Vec<String>,
) -> Result<DielectricModel, ConfigError> {
    if visiting.iter().any(|v| v == name) {
        return Err(ConfigError::MaterialCycle { name: name.into() });
    }
    let def = match config.materials.get(name) {
        Some(def) => def.clone(),
        None => {
            return match name {
                "silica" => Ok(casimir::silica_surrogate()),
                "gold" => Ok(DielectricModel::Drude(DrudeParams::gold())),
                "vacuum" => Ok(DielectricModel::Vacuum),
                _ => Err(ConfigError::UndefinedMaterial { name: name.into() }),
            }
        }
    };
    visiting.push(name.to_string());
    let model = match def {
        MaterialDef::Vacuum => DielectricModel::Vacuum,
        MaterialDef::Drude {
            plasma_ev,
            damping_ev,
        } => DielectricModel::Drude(DrudeParams {
            plasma_energy_ev: plasma_ev,
            damping_energy_ev: damping_ev,
        }),
        MaterialDef::Lorentz { oscillators } => DielectricModel::LorentzSum(
            oscillators
                .iter()
                .map(|&(strength_ev2, resonance_ev, width_ev)| LorentzOscillator {
                    strength_ev2,
                    resonance_ev,
                    width_ev,
                })
                .collect(),
        ),
        MaterialDef::Table {
            file,
            format,
            low_end,
            high_end,
        } => {
            let path = base_dir.join(&file);
            let reader = std::fs::File::open(&path).map_err(|source| ConfigError::TableRead {
                path: path.display().to_string(),
                source,
            })?;
            let table = load_optical_table(std::io::BufReader::new(reader), format).map_err(
                |source| ConfigError::TableParse {
                    path: path.display().to_string(),
                    source,
                },
            )?;
            DielectricModel::Tabulated {
                table,
                settings: KkSettings { low_end, high_end },
            }
        }
        MaterialDef::Mixture {
            host,
            porosity,
            rule,
        } => {
            let host_model = resolve_material(config, base_dir, &host, visiting)?;
            DielectricModel::Mixed(MixingSpec {
                porosity,
                rule,
                host: Box::new(host_model),
            })
        }
    };
    visiting.pop();
    Ok(model)
}

/// Resolves one material by name, using the same rules as scenario
/// resolution (explicit definitions first, then the built-ins).
pub fn resolve_named_material(
    config: &RunConfig,
    base_dir: &Path,
    name: &str,
) -> Result<DielectricModel, ConfigError> {
    resolve_material(config, base_dir, name, &mut Vec::new())
}

/// Looks a material up and requires it to be a Drude metal.
fn resolve_drude(config: &RunConfig, name: &str) -> Result<DrudeParams, ConfigError> {
    match config.materials.get(name) {
        Some(MaterialDef::Drude {
            plasma_ev,
            damping_ev,
        }) => Ok(DrudeParams {
            plasma_energy_ev: *plasma_ev,
            damping_energy_ev: *damping_ev,
        }),
        Some(_) => Err(ConfigError::MetalNotDrude { name: name.into() }),
        None if name == "gold" => Ok(DrudeParams::gold()),
        None if matches!(name, "silica" | "vacuum") => {
            Err(ConfigError::MetalNotDrude { name: name.into() })
        }
        None => Err(ConfigError::UndefinedMaterial { name: name.into() }),
    }
}

fn resolve_stack(
    config: &RunConfig,
    base_dir: &Path,
    def: &StackDef,
) -> Result<Stack, ConfigError> {
    let mut layers = Vec::with_capacity(def.layers.len());
    for (name, thickness_nm) in &def.layers {
        layers.push(Layer {
            material: resolve_material(config, base_dir, name, &mut Vec::new())?,
            thickness_nm: *thickness_nm,
        });
    }
    Ok(Stack {
        layers,
        substrate: resolve_material(config, base_dir, &def.substrate, &mut Vec::new())?,
    })
}

/// Materializes the scenario description into concrete models. Table
/// materials are loaded relative to `base_dir`.
pub fn build_scenario_spec(
    config: &RunConfig,
    base_dir: &Path,
) -> Result<ScenarioSpec, ConfigError> {
    let s = &config.scenario;
    let kind = match s.kind {
        ScenarioKindDef::AerogelOnGold => ScenarioKind::AerogelOnGoldSymmetric,
        ScenarioKindDef::GoldVsAerogel => ScenarioKind::GoldVsSupportedAerogel,
        ScenarioKindDef::Freestanding => ScenarioKind::FreestandingSlabs,
        ScenarioKindDef::PorosityStudy => ScenarioKind::PorositySweep,
        ScenarioKindDef::Custom => {
            let left = s.left.as_ref().expect("validated at parse time");
            let right = s.right.as_ref().expect("validated at parse time");
            ScenarioKind::Custom(GapConfig {
                left: resolve_stack(config, base_dir, left)?,
                right: resolve_stack(config, base_dir, right)?,
                gap_nm: 0.0,
            })
        }
    };
    Ok(ScenarioSpec {
        kind,
        aerogel_thickness_nm: s.thickness_nm,
        porosity: s.porosity,
        mixing_rule: s.mixing,
        silica_model: resolve_material(config, base_dir, &s.solid, &mut Vec::new())?,
        gold_model: resolve_drude(config, &s.metal)?,
    })
}

/// Expands the grid definition into explicit values.
pub fn materialize_grid(grid: &GridDef) -> Vec<f64> {
    match grid {
        GridDef::Log { lo, hi, n } => {
            let step = (hi / lo).ln() / (*n as f64 - 1.0);
            let mut values: Vec<f64> =
                (0..*n).map(|i| lo * (step * i as f64).exp()).collect();
            values[0] = *lo;
            values[*n - 1] = *hi;
            values
        }
        GridDef::List(values) => values.clone(),
    }
}

/// Builds the full sweep from the config.
pub fn build_sweep_spec(config: &RunConfig, base_dir: &Path) -> Result<SweepSpec, ConfigError> {
    Ok(SweepSpec {
        axis: config.sweep.axis,
        grid: materialize_grid(&config.sweep.grid),
        fixed: build_scenario_spec(config, base_dir)?,
        quad: config.quadrature,
        gap_nm: config.sweep.gap_nm,
    })
}
