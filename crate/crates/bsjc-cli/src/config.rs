//! Line-oriented `key = value` configuration files.
//!
//! Flags override file values, which override built-in defaults. Unknown
//! keys and malformed values are configuration errors (exit code 2) naming
//! the offending key, so typos never silently fall back to defaults.

use std::path::Path;

use crate::OutputFormat;

/// Every key a config file may set. All fields optional: the file only
/// overrides what it mentions.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub alpha_mag: Option<f64>,
    pub alpha_phase: Option<f64>,
    pub lambda: Option<f64>,
    pub omega_f: Option<f64>,
    pub omega_a: Option<f64>,
    /// `auto` or an explicit truncation level.
    pub n_max: Option<Option<usize>>,
    pub tail_tol: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    pub format: Option<OutputFormat>,
}

pub fn parse_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    parse_config_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_config_str(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| format!("line {}: key `{key}`: {what} (got `{value}`)", lineno + 1);
        match key {
            "alpha_mag" => cfg.alpha_mag = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "alpha_phase" => cfg.alpha_phase = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "lambda" => cfg.lambda = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "omega_f" => cfg.omega_f = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "omega_a" => cfg.omega_a = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "tail_tol" => cfg.tail_tol = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "t_min" => cfg.t_min = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "t_max" => cfg.t_max = Some(parse_f64(value).map_err(|e| bad(&e))?),
            "t_steps" => cfg.t_steps = Some(parse_usize(value).map_err(|e| bad(&e))?),
            "n_r" => cfg.n_r = Some(parse_usize(value).map_err(|e| bad(&e))?),
            "n_theta" => cfg.n_theta = Some(parse_usize(value).map_err(|e| bad(&e))?),
            "n_max" => {
                cfg.n_max = Some(if value == "auto" {
                    None
                } else {
                    Some(parse_usize(value).map_err(|e| bad(&e))?)
                })
            }
            "format" => {
                cfg.format = Some(match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    _ => return Err(bad("expected `csv` or `json`")),
                })
            }
            _ => {
                return Err(format!(
                    "line {}: unknown key `{key}` (known keys: alpha_mag, alpha_phase, lambda, \
                     omega_f, omega_a, n_max, tail_tol, t_min, t_max, t_steps, n_r, n_theta, \
                     format)",
                    lineno + 1
                ))
            }
        }
    }
    Ok(cfg)
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| "expected a number".to_string())
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>().map_err(|_| "expected a non-negative integer".to_string())
}
