//! Signal sourcing: CSV files, generator flags, JSON spec files, grids.

use std::path::Path;

use haarscatter::signals::{
    AR1_NOISE_SIGMA, AR1_PHI, DEFAULT_LENGTH, LOGISTIC_BETA, LOGISTIC_CAPACITY, LOGISTIC_INITIAL,
    LOGISTIC_NOISE_SIGMA,
};
use haarscatter::{Family, GeneratorSpec, GridConfig, InputKind, Signal};
use serde::Deserialize;

use crate::csvio::{self, fmt_f64};
use crate::{CascadeArgs, CliError, SourceArgs};

/// A signal plus everything needed to echo where it came from.
pub struct ResolvedSource {
    pub signal: Signal,
    pub spec: Option<GeneratorSpec>,
    pub input_path: Option<String>,
    pub original_len: Option<usize>,
}

impl ResolvedSource {
    pub fn family_name(&self) -> Option<&'static str> {
        self.spec.map(|s| family_name(s.family()))
    }

    /// Effective generator parameters, fully resolved.
    pub fn params_echo(&self) -> Option<Vec<(String, String)>> {
        self.spec.map(|s| spec_param_echo(&s))
    }
}

pub fn family_name(family: Family) -> &'static str {
    match family {
        Family::Sinusoid => "sinusoid",
        Family::Exponential => "exponential",
        Family::Logistic => "logistic",
        Family::Ar1 => "ar1",
    }
}

pub fn parse_family(name: &str) -> Result<Family, CliError> {
    match name {
        "sinusoid" => Ok(Family::Sinusoid),
        "exponential" => Ok(Family::Exponential),
        "logistic" => Ok(Family::Logistic),
        "ar1" => Ok(Family::Ar1),
        other => Err(CliError::usage(format!(
            "unknown family {other:?}; expected sinusoid, exponential, logistic, or ar1"
        ))),
    }
}

fn input_kind_name(kind: InputKind) -> &'static str {
    match kind {
        InputKind::None => "none",
        InputKind::Step => "step",
        InputKind::Pulse => "pulse",
    }
}

fn parse_input_kind(value: &str) -> Result<InputKind, CliError> {
    match value {
        "none" => Ok(InputKind::None),
        "step" => Ok(InputKind::Step),
        "pulse" => Ok(InputKind::Pulse),
        other => Err(CliError::usage(format!(
            "unknown input kind {other:?}; expected none, step, or pulse"
        ))),
    }
}

/// Effective parameters of a resolved spec, as `(key, value)` pairs in the
/// `--param` vocabulary.
pub fn spec_param_echo(spec: &GeneratorSpec) -> Vec<(String, String)> {
    match *spec {
        GeneratorSpec::Sinusoid { beta, length } | GeneratorSpec::Exponential { beta, length } => {
            vec![
                ("beta".into(), fmt_f64(beta)),
                ("length".into(), length.to_string()),
            ]
        }
        GeneratorSpec::Logistic {
            beta,
            capacity,
            initial,
            noise_sigma,
            length,
            ..
        } => vec![
            ("beta".into(), fmt_f64(beta)),
            ("capacity".into(), fmt_f64(capacity)),
            ("initial".into(), fmt_f64(initial)),
            ("noise".into(), fmt_f64(noise_sigma)),
            ("length".into(), length.to_string()),
        ],
        GeneratorSpec::Ar1 {
            phi,
            input,
            noise_sigma,
            length,
            ..
        } => vec![
            ("phi".into(), fmt_f64(phi)),
            ("input".into(), input_kind_name(input).into()),
            ("noise".into(), fmt_f64(noise_sigma)),
            ("length".into(), length.to_string()),
        ],
    }
}

fn split_param(raw: &str) -> Result<(&str, &str), CliError> {
    raw.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::usage(format!("parameter {raw:?} is not of the form key=value")))
}

fn parse_value_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::usage(format!("parameter {key}={value:?} is not a number")))
}

fn parse_value_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::usage(format!("parameter {key}={value:?} is not a whole number")))
}

/// Builds a fully resolved spec for `family` from defaults plus overrides.
pub fn build_spec(
    family: Family,
    overrides: &[(String, String)],
    seed: u64,
) -> Result<GeneratorSpec, CliError> {
    let mut beta = match family {
        Family::Logistic => LOGISTIC_BETA,
        _ => 1.0,
    };
    let mut capacity = LOGISTIC_CAPACITY;
    let mut initial = LOGISTIC_INITIAL;
    let mut noise = match family {
        Family::Ar1 => AR1_NOISE_SIGMA,
        _ => LOGISTIC_NOISE_SIGMA,
    };
    let mut phi = AR1_PHI;
    let mut input = InputKind::Step;
    let mut length = DEFAULT_LENGTH;

    for (key, value) in overrides {
        match (family, key.as_str()) {
            (_, "length") => length = parse_value_usize(key, value)?,
            (Family::Sinusoid | Family::Exponential | Family::Logistic, "beta") => {
                beta = parse_value_f64(key, value)?
            }
            (Family::Logistic, "capacity") => capacity = parse_value_f64(key, value)?,
            (Family::Logistic, "initial") => initial = parse_value_f64(key, value)?,
            (Family::Logistic | Family::Ar1, "noise") => noise = parse_value_f64(key, value)?,
            (Family::Ar1, "phi") => phi = parse_value_f64(key, value)?,
            (Family::Ar1, "input") => input = parse_input_kind(value)?,
            (_, other) => {
                return Err(CliError::usage(format!(
                    "parameter {other:?} does not apply to family {}",
                    family_name(family)
                )));
            }
        }
    }

    Ok(match family {
        Family::Sinusoid => GeneratorSpec::Sinusoid { beta, length },
        Family::Exponential => GeneratorSpec::Exponential { beta, length },
        Family::Logistic => GeneratorSpec::Logistic {
            beta,
            capacity,
            initial,
            noise_sigma: noise,
            length,
            seed,
        },
        Family::Ar1 => GeneratorSpec::Ar1 {
            phi,
            input,
            noise_sigma: noise,
            length,
            seed,
        },
    })
}

pub fn parse_param_flags(raw: &[String]) -> Result<Vec<(String, String)>, CliError> {
    raw.iter()
        .map(|r| split_param(r).map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

/// JSON form of a generator spec.
///
/// ```json
/// {"family": "ar1", "length": 512, "seed": 7,
///  "params": {"phi": 0.8, "input": "pulse", "noise": 0.1}}
/// ```
///
/// `length` and `seed` are optional; `params` keys match the `--param` keys
/// of the family. A `seed` in the file overrides the `--seed` flag.
#[derive(Deserialize)]
struct SpecFile {
    family: String,
    #[serde(default)]
    length: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    params: serde_json::Map<String, serde_json::Value>,
}

fn spec_from_json(path: &Path, flag_seed: u64) -> Result<GeneratorSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let file: SpecFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let family = parse_family(&file.family)?;
    let mut overrides = Vec::new();
    for (key, value) in &file.params {
        let text_value = match value {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.clone(),
            other => {
                return Err(CliError::usage(format!(
                    "{}: parameter {key:?} has unsupported value {other}",
                    path.display()
                )));
            }
        };
        overrides.push((key.clone(), text_value));
    }
    if let Some(length) = file.length {
        overrides.push(("length".into(), length.to_string()));
    }
    build_spec(family, &overrides, file.seed.unwrap_or(flag_seed))
}

fn fit_length(samples: Vec<f64>, pad: bool, truncate: bool) -> Result<Vec<f64>, CliError> {
    let len = samples.len();
    if len >= 2 && len.is_power_of_two() {
        return Ok(samples);
    }
    if pad {
        let target = len.max(2).next_power_of_two();
        let mut padded = samples;
        let last = *padded.last().expect("non-empty samples");
        padded.resize(target, last);
        return Ok(padded);
    }
    if truncate {
        let target = if len.is_power_of_two() {
            len
        } else {
            len.next_power_of_two() / 2
        };
        if target < 2 {
            return Err(CliError::usage(format!(
                "{len} samples cannot be truncated to a usable power of two"
            )));
        }
        let mut cut = samples;
        cut.truncate(target);
        return Ok(cut);
    }
    Err(CliError::usage(format!(
        "input has {len} samples; length must be a power of two at least 2 (use --pad or --truncate)"
    )))
}

/// Resolves the signal source from the common flags.
pub fn resolve(source: &SourceArgs) -> Result<ResolvedSource, CliError> {
    if let Some(path) = &source.input {
        let raw = csvio::read_samples(path)?;
        let original_len = raw.len();
        let fitted = fit_length(raw, source.pad, source.truncate)?;
        let signal = Signal::new(fitted)?;
        return Ok(ResolvedSource {
            signal,
            spec: None,
            input_path: Some(path.display().to_string()),
            original_len: Some(original_len),
        });
    }
    let spec = if let Some(path) = &source.spec {
        spec_from_json(path, source.seed)?
    } else if let Some(name) = &source.family {
        let family = parse_family(name)?;
        let overrides = parse_param_flags(&source.params)?;
        build_spec(family, &overrides, source.seed)?
    } else {
        return Err(CliError::usage(
            "no signal source; pass --input PATH, --family NAME, or --spec PATH",
        ));
    };
    let signal = spec.generate()?;
    Ok(ResolvedSource {
        signal,
        spec: Some(spec),
        input_path: None,
        original_len: None,
    })
}

fn parse_list_f64(flag: &str, list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::usage(format!("{flag}: cannot parse {s:?} as a number")))
        })
        .collect()
}

fn parse_list_i64(flag: &str, list: &str) -> Result<Vec<i64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>().map_err(|_| {
                CliError::usage(format!("{flag}: cannot parse {s:?} as a whole number"))
            })
        })
        .collect()
}

/// Whether any search-grid flag was given.
pub fn has_explicit_grid(cascade: &CascadeArgs) -> bool {
    cascade.sigma_grid.is_some() || cascade.tau_grid.is_some()
}

/// Builds the candidate grid for a signal of `signal_len` samples, filling
/// unspecified halves from the stock grid.
pub fn grid_config(cascade: &CascadeArgs, signal_len: usize) -> Result<GridConfig, CliError> {
    let stock = GridConfig::default_grid(signal_len, cascade.depth);
    let sigma_values = match &cascade.sigma_grid {
        Some(list) => parse_list_f64("--sigma-grid", list)?,
        None => stock.sigma_values,
    };
    let tau_values = match &cascade.tau_grid {
        Some(list) => parse_list_i64("--tau-grid", list)?,
        None => stock.tau_values,
    };
    if cascade.depth > 0 && (sigma_values.is_empty() || tau_values.is_empty()) {
        return Err(CliError::usage("candidate grid is empty"));
    }
    Ok(GridConfig {
        sigma_values,
        tau_values,
        depth: cascade.depth,
        per_layer: cascade.per_layer,
        use_abs: !cascade.no_abs,
    })
}

/// Depth must not exceed what the signal supports.
pub fn check_depth(depth: usize, signal: &Signal) -> Result<(), CliError> {
    if depth > signal.max_depth() {
        return Err(CliError::usage(format!(
            "depth {depth} exceeds maximum {} for {} samples",
            signal.max_depth(),
            signal.len()
        )));
    }
    Ok(())
}
