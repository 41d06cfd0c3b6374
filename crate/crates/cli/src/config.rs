//! Settings resolution: flags, then a settings file, then `HYDROMAG_DIGITS`,
//! then built-in defaults.

use std::path::Path;

use hydromag_core::zeeman::{default_controls, SectorLabel, SolveControls, DEFAULT_CONVERGENCE_TOL};

use crate::args::{ControlArgs, Format, OutputArgs};
use crate::CliError;

pub const DIGITS_ENV: &str = "HYDROMAG_DIGITS";

/// Values read from a settings file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub digits: Option<u32>,
    pub imax: Option<usize>,
    pub nconst: Option<usize>,
    pub rmatch: Option<f64>,
    pub ebtol: Option<f64>,
    pub convtol: Option<f64>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tol: Option<f64>,
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Usage(format!("config: bad value `{value}` for `{key}`"))
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// A JSON object, or `key = value` lines with `#` comments.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value =
                serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
            let obj = value.as_object().ok_or_else(|| CliError::Usage("config: expected a JSON object".into()))?;
            for (k, v) in obj {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(bad(k, &other.to_string())),
                };
                cfg.set(k, &s)?;
            }
        } else {
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("config: expected key = value, got `{line}`")))?;
                cfg.set(k.trim(), v.trim())?;
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>, CliError> {
            value.parse().map(Some).map_err(|_| bad(key, value))
        }
        match key {
            "digits" => self.digits = num(key, value)?,
            "imax" => self.imax = num(key, value)?,
            "nconst" => self.nconst = num(key, value)?,
            "rmatch" => self.rmatch = num(key, value)?,
            "ebtol" => self.ebtol = num(key, value)?,
            "convtol" => self.convtol = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "jobs" => self.jobs = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "format" => {
                self.format = Some(match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad(key, value)),
                })
            }
            _ => return Err(CliError::Usage(format!("config: unknown key `{key}`"))),
        }
        Ok(())
    }
}

pub fn load_config(output: &OutputArgs) -> Result<FileConfig, CliError> {
    output.config.as_deref().map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
}

fn env_digits() -> Result<Option<u32>, CliError> {
    match std::env::var(DIGITS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("{DIGITS_ENV}: bad value `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Solver controls and convergence tolerance for one solve.
pub fn resolve_controls(
    sector: SectorLabel,
    gamma: f64,
    index: usize,
    flags: &ControlArgs,
    cfg: &FileConfig,
) -> Result<(SolveControls, f64), CliError> {
    let mut c = default_controls(sector, gamma, index);
    if let Some(d) = flags.digits.or(cfg.digits).map_or_else(env_digits, |d| Ok(Some(d)))? {
        c.digits = d;
    }
    if let Some(v) = flags.imax.or(cfg.imax) {
        c.i_max = v;
    }
    if let Some(v) = flags.nconst.or(cfg.nconst) {
        c.n_constants = v;
    }
    if let Some(v) = flags.rmatch.or(cfg.rmatch) {
        c.r_match = v;
    }
    if let Some(v) = flags.ebtol.or(cfg.ebtol) {
        c.eb_tol = v;
    }
    // An explicit P or r_match without an explicit i_max keeps i_max legal.
    if flags.imax.or(cfg.imax).is_none() {
        c.i_max = c.i_max.max(2 * c.n_constants + 2);
    }
    c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let conv = flags.convtol.or(cfg.convtol).unwrap_or(DEFAULT_CONVERGENCE_TOL);
    if !(conv.is_finite() && conv > 0.0) {
        return Err(CliError::Usage(format!("convtol must be positive, got {conv}")));
    }
    Ok((c, conv))
}

pub fn resolve_format(output: &OutputArgs, cfg: &FileConfig) -> Format {
    output.format.or(cfg.format).unwrap_or(Format::Csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_json_agree() {
        let kv = FileConfig::parse("# run settings\ndigits = 60\nformat=json  # inline\nrmatch = 12.5\n").unwrap();
        let js = FileConfig::parse(r#"{"digits": 60, "format": "json", "rmatch": "12.5"}"#).unwrap();
        assert_eq!(kv, js);
        assert_eq!(kv.digits, Some(60));
        assert_eq!(kv.format, Some(Format::Json));
        assert_eq!(kv.rmatch, Some(12.5));
    }

    #[test]
    fn bad_files_are_usage_errors() {
        for text in ["colour = blue", "digits = many", "digits", r#"{"digits": [1]}"#, "[1, 2]", "format = xml"] {
            assert!(matches!(FileConfig::parse(text), Err(CliError::Usage(_))), "{text}");
        }
    }

    #[test]
    fn flags_beat_file() {
        let s = SectorLabel::new(0, 0).unwrap();
        let cfg = FileConfig { digits: Some(60), nconst: Some(4), ..Default::default() };
        let flags = ControlArgs { digits: Some(45), ..Default::default() };
        let (c, conv) = resolve_controls(s, 1.0, 1, &flags, &cfg).unwrap();
        assert_eq!(c.digits, 45);
        assert_eq!(c.n_constants, 4);
        assert_eq!(conv, DEFAULT_CONVERGENCE_TOL);
        let (c, _) = resolve_controls(s, 1.0, 1, &ControlArgs::default(), &cfg).unwrap();
        assert_eq!(c.digits, 60);
    }

    #[test]
    fn invalid_controls_are_usage_errors() {
        let s = SectorLabel::new(0, 0).unwrap();
        let flags = ControlArgs { imax: Some(4), nconst: Some(5), ..Default::default() };
        assert!(matches!(resolve_controls(s, 0.0, 1, &flags, &FileConfig::default()), Err(CliError::Usage(_))));
        let flags = ControlArgs { convtol: Some(-1.0), ..Default::default() };
        assert!(resolve_controls(s, 0.0, 1, &flags, &FileConfig::default()).is_err());
    }
}
