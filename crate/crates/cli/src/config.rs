//! Flat key = value configuration files with [sections]. The schema is
//! validated up front: unknown sections or keys are rejected before any
//! compute starts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use daflab_core::grid::StepController;
use daflab_core::reductions::{ReductionKind, ReductionSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key `{key}` in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("missing required key `{key}` in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("key `{key}`: cannot parse `{value}` as {ty}")]
    BadValue {
        key: String,
        value: String,
        ty: &'static str,
    },
    #[error("unknown reduction kind `{0}`")]
    UnknownKind(String),
    #[error("sweep values must be non-empty")]
    EmptySweep,
    #[error("unknown sweep parameter `{0}`")]
    UnknownSweepParameter(String),
}

/// Parsed, schema-checked experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub run: RunConfig,
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: ReductionKind,
    pub ambient_n: u8,
    pub grid_n: usize,
    pub grid_dims: usize,
    pub length: Option<f64>,
    pub t_end: f64,
    pub cfl: f64,
    pub max_dt: f64,
    pub min_dt: f64,
    pub floor: f64,
    pub ceiling: f64,
    pub alphas: Vec<f64>,
    pub amplitude: f64,
    pub initial_value: f64,
    pub conservation_tol: f64,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

impl RunConfig {
    pub fn defaults(kind: ReductionKind) -> Self {
        let spec = ReductionSpec::defaults(kind);
        let max_dt = match kind {
            ReductionKind::Iwasawa | ReductionKind::Sl2c => 5e-4,
            _ => 1e-3,
        };
        let (t_end, alphas, conservation_tol) = match kind {
            ReductionKind::Iwasawa => (2.0, vec![1.0], 1e-8),
            ReductionKind::Sl2c => (3.0, vec![1.0], 1e-8),
            ReductionKind::ProductFibration => (50.0, vec![-2.0, 0.0, 1.0], 1e-8),
            ReductionKind::CalabiGray => (2.0, vec![0.0, 1.0], 1e-6),
            ReductionKind::InverseMa => (1.0, vec![-1.0, 0.0, 1.0], 1e-8),
            ReductionKind::AnomalyCkSemiflat | ReductionKind::DualAnomalySemiflat => {
                (0.4, vec![1.0, 3.0], 1e-8)
            }
        };
        RunConfig {
            kind,
            ambient_n: spec.ambient_n,
            grid_n: spec.grid_n,
            grid_dims: spec.grid_dims,
            length: None,
            t_end,
            cfl: 0.25,
            max_dt,
            min_dt: 1e-13,
            floor: 1e-6,
            ceiling: 1e6,
            alphas,
            amplitude: spec.amplitude,
            initial_value: spec.initial_value,
            conservation_tol,
        }
    }

    pub fn to_reduction_spec(&self, seed: u64) -> ReductionSpec {
        let mut spec = ReductionSpec::defaults(self.kind);
        spec.ambient_n = self.ambient_n;
        spec.grid_n = self.grid_n;
        spec.grid_dims = self.grid_dims;
        if let Some(l) = self.length {
            spec.lengths = vec![l; self.grid_dims];
        }
        spec.amplitude = self.amplitude;
        spec.initial_value = self.initial_value;
        spec.seed = seed;
        spec
    }

    pub fn controller(&self) -> StepController {
        StepController {
            cfl: self.cfl,
            max_dt: self.max_dt,
            min_dt: self.min_dt,
        }
    }
}

type Sections = BTreeMap<String, Vec<(String, String)>>;

fn parse_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::from("experiment");
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            current = line[1..line.len() - 1].trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: lineno + 1,
                text: raw.to_string(),
            });
        };
        out.entry(current.clone())
            .or_default()
            .push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        ty: "number",
    })
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        ty: "integer",
    })
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

/// Parse and schema-check a config file body.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let sections = parse_sections(text)?;
    for section in sections.keys() {
        if !["experiment", "run", "sweep"].contains(&section.as_str()) {
            return Err(ConfigError::UnknownSection(section.clone()));
        }
    }

    let mut seed = 0u64;
    let mut out_dir = None;
    if let Some(entries) = sections.get("experiment") {
        for (key, value) in entries {
            match key.as_str() {
                "seed" => {
                    seed = value.parse().map_err(|_| ConfigError::BadValue {
                        key: key.clone(),
                        value: value.clone(),
                        ty: "unsigned integer",
                    })?
                }
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        section: "experiment".into(),
                        key: key.clone(),
                    })
                }
            }
        }
    }

    let run_entries = sections
        .get("run")
        .ok_or(ConfigError::MissingKey {
            section: "run".into(),
            key: "kind".into(),
        })?
        .clone();
    let kind_value = run_entries
        .iter()
        .find(|(k, _)| k == "kind")
        .map(|(_, v)| v.clone())
        .ok_or(ConfigError::MissingKey {
            section: "run".into(),
            key: "kind".into(),
        })?;
    let kind =
        ReductionKind::parse(&kind_value).ok_or(ConfigError::UnknownKind(kind_value.clone()))?;
    let mut run = RunConfig::defaults(kind);
    for (key, value) in &run_entries {
        match key.as_str() {
            "kind" => {}
            "ambient_n" => run.ambient_n = parse_usize(key, value)? as u8,
            "grid_n" => run.grid_n = parse_usize(key, value)?,
            "grid_dims" => run.grid_dims = parse_usize(key, value)?,
            "length" => run.length = Some(parse_f64(key, value)?),
            "t_end" => run.t_end = parse_f64(key, value)?,
            "cfl" => run.cfl = parse_f64(key, value)?,
            "max_dt" => run.max_dt = parse_f64(key, value)?,
            "min_dt" => run.min_dt = parse_f64(key, value)?,
            "floor" => run.floor = parse_f64(key, value)?,
            "ceiling" => run.ceiling = parse_f64(key, value)?,
            "alphas" => run.alphas = parse_f64_list(key, value)?,
            "amplitude" => run.amplitude = parse_f64(key, value)?,
            "initial_value" => run.initial_value = parse_f64(key, value)?,
            "conservation_tol" => run.conservation_tol = parse_f64(key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    section: "run".into(),
                    key: key.clone(),
                })
            }
        }
    }

    let sweep = match sections.get("sweep") {
        None => None,
        Some(entries) => {
            let mut parameter = None;
            let mut values = Vec::new();
            for (key, value) in entries {
                match key.as_str() {
                    "parameter" => parameter = Some(value.clone()),
                    "values" => values = parse_f64_list(key, value)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: "sweep".into(),
                            key: key.clone(),
                        })
                    }
                }
            }
            let parameter = parameter.ok_or(ConfigError::MissingKey {
                section: "sweep".into(),
                key: "parameter".into(),
            })?;
            if values.is_empty() {
                return Err(ConfigError::EmptySweep);
            }
            if !["grid_n", "alpha", "amplitude", "t_end", "cfl", "seed"]
                .contains(&parameter.as_str())
            {
                return Err(ConfigError::UnknownSweepParameter(parameter));
            }
            Some(SweepConfig { parameter, values })
        }
    };

    Ok(ExperimentConfig {
        seed,
        out_dir,
        run,
        sweep,
    })
}

/// Apply one sweep value to a copy of the run configuration.
pub fn apply_sweep_value(cfg: &ExperimentConfig, parameter: &str, value: f64) -> ExperimentConfig {
    let mut out = cfg.clone();
    match parameter {
        "grid_n" => out.run.grid_n = value as usize,
        "alpha" => out.run.alphas = vec![value],
        "amplitude" => out.run.amplitude = value,
        "t_end" => out.run.t_end = value,
        "cfl" => out.run.cfl = value,
        "seed" => out.seed = value as u64,
        _ => unreachable!("validated at parse time"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = parse_config("[run]\nkind = iwasawa\n").unwrap();
        assert_eq!(cfg.run.kind, ReductionKind::Iwasawa);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn rejects_unknown_key() {
        let err = parse_config("[run]\nkind = iwasawa\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn rejects_unknown_section_and_kind() {
        assert!(matches!(
            parse_config("[mystery]\nx = 1\n[run]\nkind = iwasawa\n"),
            Err(ConfigError::UnknownSection(_))
        ));
        assert!(matches!(
            parse_config("[run]\nkind = nonsense\n"),
            Err(ConfigError::UnknownKind(_))
        ));
    }

    #[test]
    fn rejects_empty_sweep() {
        let text = "[run]\nkind = product_fibration\n[sweep]\nparameter = grid_n\nvalues =\n";
        assert!(matches!(parse_config(text), Err(ConfigError::EmptySweep)));
    }

    #[test]
    fn comments_and_overrides() {
        let text = "
[experiment]
seed = 42          # reproducibility seed
[run]
kind = product_fibration
grid_n = 32        ; smaller grid
alphas = -2, 0, 1
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.run.grid_n, 32);
        assert_eq!(cfg.run.alphas, vec![-2.0, 0.0, 1.0]);
    }
}
