//! Run configuration: `key = value` files with dotted keys, overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use gausslind_core::{BathParams, FrequencyProfile, GaussianParams, Tolerances};
use num_complex::Complex64;
use thiserror::Error;

pub const KEYS: &[&str] = &[
    "profile.kind",
    "profile.omega0",
    "profile.gamma",
    "profile.table",
    "bath.k",
    "bath.n_bar",
    "initial.alpha_re",
    "initial.alpha_im",
    "initial.r",
    "initial.phi",
    "initial.nu",
    "grid.t_max",
    "grid.n_steps",
    "tol.ode",
    "tol.quad",
    "engine",
];

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    Line { file: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line { file, line } => write!(f, "{}:{line}", file.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: {reason}")]
    Syntax { origin: Origin, reason: String },
    #[error("{origin}: `{key}`: {reason}")]
    Field { origin: Origin, key: String, reason: String },
    #[error("`{key}`: {reason}")]
    Missing { key: &'static str, reason: String },
    #[error("cannot read {}: {reason}", path.display())]
    Read { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Chord,
    Oracle,
    Both,
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chord" => Ok(Engine::Chord),
            "oracle" => Ok(Engine::Oracle),
            "both" => Ok(Engine::Both),
            _ => Err(format!("expected chord, oracle or both, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub profile: FrequencyProfile,
    pub bath: BathParams,
    pub initial: GaussianParams,
    pub t_max: f64,
    pub n_steps: usize,
    pub tol: Tolerances,
    pub engine: Engine,
}

/// Raw `key = value` pairs with their origins; later insertions win.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str, file: &Path) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line {
                file: file.to_path_buf(),
                line: i + 1,
            };
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    origin,
                    reason: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = raw.entries.get(key) {
                return Err(ConfigError::Field {
                    origin,
                    key: key.to_string(),
                    reason: format!("already set at {}", prev.1),
                });
            }
            raw.set(key, value, origin)?;
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::Field {
                origin,
                key: key.to_string(),
                reason: "unknown key".into(),
            });
        }
        self.entries.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    fn get(&self, key: &'static str) -> Option<&(String, Origin)> {
        self.entries.get(key)
    }

    fn field(&self, key: &'static str, reason: impl Into<String>) -> ConfigError {
        match self.get(key) {
            Some((_, origin)) => ConfigError::Field {
                origin: origin.clone(),
                key: key.to_string(),
                reason: reason.into(),
            },
            None => ConfigError::Missing {
                key,
                reason: reason.into(),
            },
        }
    }

    fn number(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        let Some((value, _)) = self.get(key) else {
            return Ok(default);
        };
        let x: f64 = value
            .parse()
            .map_err(|_| self.field(key, format!("`{value}` is not a number")))?;
        if !x.is_finite() {
            return Err(self.field(key, "must be finite"));
        }
        Ok(x)
    }

    /// Attributes a core validation error to the key it names, if any.
    fn core_error(&self, fallback: &'static str, e: gausslind_core::Error) -> ConfigError {
        let section = fallback.split('.').next().unwrap_or("");
        let key = match &e {
            gausslind_core::Error::InvalidParameter { name, reason } => {
                let key = KEYS
                    .iter()
                    .find(|k| **k == *name || k.strip_prefix(section).and_then(|r| r.strip_prefix('.')) == Some(name));
                if let Some(key) = key {
                    return self.field(key, reason.clone());
                }
                fallback
            }
            _ => fallback,
        };
        self.field(key, e.to_string())
    }

    pub fn build(&self) -> Result<RunConfig, ConfigError> {
        let omega0 = self.number("profile.omega0", 1.0)?;
        let kind = self.get("profile.kind").map_or("constant", |(v, _)| v.as_str());
        let core = |fallback: &'static str| move |e: gausslind_core::Error| self.core_error(fallback, e);
        let profile = match kind {
            "constant" => FrequencyProfile::constant(omega0).map_err(core("profile.omega0"))?,
            "inverted" => FrequencyProfile::inverted(omega0).map_err(core("profile.omega0"))?,
            "sqrt_ramp" => {
                let gamma = self.number("profile.gamma", 1.0)?;
                FrequencyProfile::sqrt_ramp(omega0, gamma).map_err(core("profile.omega0"))?
            }
            "tabulated" => {
                let Some((path, _)) = self.get("profile.table") else {
                    return Err(self.field("profile.table", "required for tabulated profiles"));
                };
                let samples = read_table(Path::new(path)).map_err(|r| self.field("profile.table", r))?;
                FrequencyProfile::tabulated(samples).map_err(core("profile.table"))?
            }
            other => {
                return Err(self.field(
                    "profile.kind",
                    format!("expected constant, inverted, sqrt_ramp or tabulated, got `{other}`"),
                ))
            }
        };

        let bath = BathParams::new(self.number("bath.k", 0.0)?, self.number("bath.n_bar", 0.0)?)
            .map_err(core("bath.k"))?;
        let alpha = Complex64::new(
            self.number("initial.alpha_re", 0.0)?,
            self.number("initial.alpha_im", 0.0)?,
        );
        let initial = GaussianParams::new(
            alpha,
            self.number("initial.r", 0.0)?,
            self.number("initial.phi", 0.0)?,
            self.number("initial.nu", 0.0)?,
        )
        .map_err(core("initial.r"))?;

        let t_max = self.number("grid.t_max", 10.0)?;
        if t_max <= 0.0 {
            return Err(self.field("grid.t_max", "must be positive"));
        }
        let n_steps = match self.get("grid.n_steps") {
            None => 200,
            Some((v, _)) => v
                .parse::<usize>()
                .map_err(|_| self.field("grid.n_steps", format!("`{v}` is not a whole number")))?,
        };
        if n_steps < 2 {
            return Err(self.field("grid.n_steps", "must be at least 2"));
        }

        let default = Tolerances::default();
        let tol = Tolerances {
            ode: self.number("tol.ode", default.ode)?,
            quad: self.number("tol.quad", default.quad)?,
        };
        tol.validate().map_err(core("tol.ode"))?;

        let engine = match self.get("engine") {
            None => Engine::Chord,
            Some((v, _)) => v.parse().map_err(|e: String| self.field("engine", e))?,
        };

        Ok(RunConfig {
            profile,
            bath,
            initial,
            t_max,
            n_steps,
            tol,
            engine,
        })
    }
}

/// `t, ω²` pairs, one per line, separated by a comma or whitespace.
fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[t, w2]) => samples.push((t, w2)),
            _ => return Err(format!("{}:{}: expected `t, omega^2`", path.display(), i + 1)),
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        RawConfig::parse(text, Path::new("run.conf"))
    }

    #[test]
    fn defaults() {
        let c = parse("").unwrap().build().unwrap();
        assert_eq!(c.profile, FrequencyProfile::Constant { omega0: 1.0 });
        assert_eq!(c.engine, Engine::Chord);
        assert_eq!((c.t_max, c.n_steps), (10.0, 200));
        assert_eq!(c.tol, Tolerances::default());
    }

    #[test]
    fn full_file_with_comments() {
        let text = "# IHO run\nprofile.kind = inverted\nprofile.omega0 = 1\n\nbath.k = 1.5  # strong\nbath.n_bar=0\ninitial.r = 1\ngrid.t_max = 20\ngrid.n_steps = 40\nengine = both\n";
        let c = parse(text).unwrap().build().unwrap();
        assert_eq!(c.profile, FrequencyProfile::Inverted { omega0: 1.0 });
        assert_eq!(c.bath, BathParams::new(1.5, 0.0).unwrap());
        assert_eq!(c.initial.r, 1.0);
        assert_eq!((c.t_max, c.n_steps, c.engine), (20.0, 40, Engine::Both));
    }

    #[test]
    fn flags_override_file_values() {
        let mut raw = parse("bath.k = 1.5\n").unwrap();
        raw.set("bath.k", "0.5", Origin::Flag).unwrap();
        assert_eq!(raw.build().unwrap().bath.k, 0.5);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = parse("bath.k = 1\nbath.n_bar = lots\n").unwrap().build().unwrap_err();
        assert_eq!(e.to_string(), "run.conf:2: `bath.n_bar`: `lots` is not a number");

        let e = parse("bath.k 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { origin: Origin::Line { line: 1, .. }, .. }));

        let e = parse("\nbath.kappa = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "run.conf:2: `bath.kappa`: unknown key");

        let e = parse("engine = chord\nengine = oracle\n").unwrap_err();
        assert!(e.to_string().contains("already set at run.conf:1"), "{e}");
    }

    #[test]
    fn invalid_values() {
        for text in [
            "grid.n_steps = 1",
            "grid.n_steps = 2.5",
            "grid.t_max = 0",
            "grid.t_max = inf",
            "bath.k = -1",
            "initial.nu = -0.1",
            "engine = fast",
            "profile.kind = linear",
            "profile.omega0 = 0",
            "tol.ode = 0",
            "profile.kind = tabulated",
        ] {
            assert!(parse(text).unwrap().build().is_err(), "{text}");
        }
    }

    #[test]
    fn tabulated_profiles_read_their_table() {
        let dir = tempfile::tempdir().unwrap();
        let table = dir.path().join("omega.txt");
        std::fs::write(&table, "# t omega^2\n-1, 1\n0 1\n5, 4\n").unwrap();
        let text = format!("profile.kind = tabulated\nprofile.table = {}\n", table.display());
        let c = parse(&text).unwrap().build().unwrap();
        assert_eq!(c.profile.omega_squared(5.0).unwrap(), 4.0);

        std::fs::write(&table, "-1, 1\n0\n").unwrap();
        let e = parse(&text).unwrap().build().unwrap_err();
        assert!(e.to_string().contains("omega.txt:2"), "{e}");
    }
}
