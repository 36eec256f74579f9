//! Run configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` starts a comment. Unknown sections and keys are rejected
//! with their line and column.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::verify::Tolerances;

#[derive(Debug, Error, PartialEq)]
#[error("config line {line}, column {column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Oscillator,
    ClassicalLimit,
    Cantrans,
    Kepler,
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "verify" => Command::Verify,
            "oscillator" => Command::Oscillator,
            "classical-limit" => Command::ClassicalLimit,
            "cantrans" => Command::Cantrans,
            "kepler" => Command::Kepler,
            _ => return Err(format!("unknown command '{s}'")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            _ => Err(format!("format must be csv, json or both, got '{s}'")),
        }
    }
}

/// `min, max, count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn linear(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + step * k as f64).collect()
    }

    /// From max down to min in equal ratios.
    pub fn geometric_descending(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.max];
        }
        let ratio = self.min / self.max;
        (0..self.count).map(|k| self.max * ratio.powf(k as f64 / (self.count - 1) as f64)).collect()
    }
}

/// Grid names, defaults and whether they must be positive.
pub const GRID_TABLE: &[(&str, Grid, bool)] = &[
    ("time", Grid { min: 0.0, max: 10.0, count: 101 }, false),
    ("planck", Grid { min: 0.125, max: 1.0, count: 4 }, true),
    ("labels", Grid { min: -1.0, max: 1.0, count: 3 }, false),
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ForceCfg {
    Zero,
    Periodic { z0: f64, big_omega: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillatorCfg {
    pub m: f64,
    pub omega: f64,
    pub force: ForceCfg,
    pub q0: f64,
    pub p0: f64,
    /// starting coherent label
    pub a0: f64,
    pub b0: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalCfg {
    /// polynomial in q, p
    pub observable: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtExample {
    Flip,
    Rotshift,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtCandidate {
    Flip,
    Rotshift,
    Translated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantransCfg {
    pub example: CtExample,
    pub t: f64,
    pub c: f64,
    /// candidate matrix element tested against a custom spec
    pub candidate: CtCandidate,
    pub f: Vec<String>,
    pub big_f: Vec<String>,
    pub g: Vec<String>,
    pub big_g: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeplerCfg {
    pub nmax: u32,
    /// defaults to 60 (h/2π)²
    pub r_max: Option<f64>,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub h: f64,
    pub n: usize,
    pub suite: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    pub tolerances: Tolerances,
    pub grids: BTreeMap<String, Grid>,
    pub oscillator: OscillatorCfg,
    pub classical: ClassicalCfg,
    pub cantrans: CantransCfg,
    pub kepler: KeplerCfg,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            seed: DEFAULT_SEED,
            h: 1.0,
            n: 1,
            suite: None,
            output_dir: None,
            format: Format::Both,
            tolerances: Tolerances::default(),
            grids: GRID_TABLE.iter().map(|(k, g, _)| (k.to_string(), *g)).collect(),
            oscillator: OscillatorCfg {
                m: 1.0,
                omega: 1.0,
                force: ForceCfg::Periodic { z0: 1.0, big_omega: 2.0 },
                q0: 1.0,
                p0: 0.0,
                a0: 0.0,
                b0: 0.0,
            },
            classical: ClassicalCfg { observable: "q^2 + p^2".into(), a: 1.0, b: 2.0 },
            cantrans: CantransCfg {
                example: CtExample::Flip,
                t: FRAC_PI_2_DEFAULT,
                c: 0.0,
                candidate: CtCandidate::Flip,
                f: vec![],
                big_f: vec![],
                g: vec![],
                big_g: vec![],
            },
            kepler: KeplerCfg { nmax: 3, r_max: None, points: 2000 },
        }
    }
}

const FRAC_PI_2_DEFAULT: f64 = PI / 2.0;

impl RunConfig {
    pub fn grid(&self, name: &str) -> Grid {
        self.grids[name]
    }

    pub fn kepler_r_max(&self) -> f64 {
        self.kepler.r_max.unwrap_or(60.0 * (self.h / (2.0 * PI)).powi(2))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err(line, indent + 1, "section header must end with ']'"))?;
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(line, indent + 2, &format!("unknown section '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(err(line, indent + 1, "expected 'key = value'"));
            };
            let key = content[..eq].trim();
            let value_raw = &content[eq + 1..];
            let value = value_raw.trim();
            let value_col = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
            if key.is_empty() {
                return Err(err(line, indent + 1, "missing key"));
            }
            cfg.assign(&section, key, value).map_err(|e| match e {
                Bad::Key => err(line, indent + 1, &format!("unknown key '{key}'{}", in_section(&section))),
                Bad::Value(m) => err(line, value_col, &m),
            })?;
        }
        Ok(cfg)
    }

    fn assign(&mut self, section: &str, key: &str, v: &str) -> Result<(), Bad> {
        match (section, key) {
            ("", "command") => self.command = v.parse().map_err(Bad::Value)?,
            ("", "seed") => self.seed = num(v)?,
            ("", "h") => self.h = positive(v)?,
            ("", "n") => {
                self.n = num(v)?;
                if self.n == 0 {
                    return Err(Bad::Value("n must be at least 1".into()));
                }
            }
            ("", "suite") => {
                if !crate::verify::SUITES.contains(&v) {
                    return Err(Bad::Value(format!("unknown suite '{v}'")));
                }
                self.suite = Some(v.to_string());
            }
            ("", "output_dir") => self.output_dir = Some(PathBuf::from(v)),
            ("", "format") => self.format = v.parse().map_err(Bad::Value)?,
            ("tolerances", k) => {
                if !crate::verify::TOLERANCE_TABLE.iter().any(|(name, _, _)| *name == k) {
                    return Err(Bad::Key);
                }
                self.tolerances.set(k, num(v)?).map_err(|e| Bad::Value(e.to_string()))?;
            }
            ("grids", k) => {
                let Some(&(_, _, positive_only)) = GRID_TABLE.iter().find(|(name, _, _)| *name == k) else {
                    return Err(Bad::Key);
                };
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Bad::Value("grid must be 'min, max, count'".into()));
                }
                let g = Grid { min: num(parts[0])?, max: num(parts[1])?, count: num(parts[2])? };
                if g.count == 0 || !(g.min <= g.max) || (positive_only && g.min <= 0.0) {
                    return Err(Bad::Value(format!("invalid grid {v}")));
                }
                self.grids.insert(k.to_string(), g);
            }
            ("oscillator", "m") => self.oscillator.m = positive(v)?,
            ("oscillator", "omega") => self.oscillator.omega = positive(v)?,
            ("oscillator", "force") => {
                self.oscillator.force = match v {
                    "zero" => ForceCfg::Zero,
                    "periodic" => match self.oscillator.force {
                        f @ ForceCfg::Periodic { .. } => f,
                        ForceCfg::Zero => ForceCfg::Periodic { z0: 1.0, big_omega: 2.0 },
                    },
                    _ => return Err(Bad::Value(format!("force must be zero or periodic, got '{v}'"))),
                }
            }
            ("oscillator", "z0") => self.set_periodic(Some(num(v)?), None),
            ("oscillator", "big_omega") => self.set_periodic(None, Some(positive(v)?)),
            ("oscillator", "q0") => self.oscillator.q0 = num(v)?,
            ("oscillator", "p0") => self.oscillator.p0 = num(v)?,
            ("oscillator", "a0") => self.oscillator.a0 = num(v)?,
            ("oscillator", "b0") => self.oscillator.b0 = num(v)?,
            ("classical_limit", "observable") => self.classical.observable = v.to_string(),
            ("classical_limit", "a") => self.classical.a = num(v)?,
            ("classical_limit", "b") => self.classical.b = num(v)?,
            ("cantrans", "example") => {
                self.cantrans.example = match v {
                    "flip" => CtExample::Flip,
                    "rotshift" => CtExample::Rotshift,
                    "custom" => CtExample::Custom,
                    _ => return Err(Bad::Value(format!("example must be flip, rotshift or custom, got '{v}'"))),
                }
            }
            ("cantrans", "candidate") => {
                self.cantrans.candidate = match v {
                    "flip" => CtCandidate::Flip,
                    "rotshift" => CtCandidate::Rotshift,
                    "translated" => CtCandidate::Translated,
                    _ => return Err(Bad::Value(format!("candidate must be flip, rotshift or translated, got '{v}'"))),
                }
            }
            ("cantrans", "t") => self.cantrans.t = num(v)?,
            ("cantrans", "c") => self.cantrans.c = num(v)?,
            ("cantrans", "f") => self.cantrans.f = polys(v),
            ("cantrans", "big_f") => self.cantrans.big_f = polys(v),
            ("cantrans", "g") => self.cantrans.g = polys(v),
            ("cantrans", "big_g") => self.cantrans.big_g = polys(v),
            ("kepler", "nmax") => {
                self.kepler.nmax = num(v)?;
                if self.kepler.nmax == 0 {
                    return Err(Bad::Value("nmax must be at least 1".into()));
                }
            }
            ("kepler", "r_max") => self.kepler.r_max = Some(positive(v)?),
            ("kepler", "points") => self.kepler.points = num(v)?,
            _ => return Err(Bad::Key),
        }
        Ok(())
    }

    fn set_periodic(&mut self, z0: Option<f64>, big_omega: Option<f64>) {
        let (z, o) = match self.oscillator.force {
            ForceCfg::Periodic { z0, big_omega } => (z0, big_omega),
            ForceCfg::Zero => (1.0, 2.0),
        };
        self.oscillator.force = ForceCfg::Periodic { z0: z0.unwrap_or(z), big_omega: big_omega.unwrap_or(o) };
    }
}

const SECTIONS: [&str; 7] = ["tolerances", "grids", "oscillator", "classical_limit", "cantrans", "kepler", ""];

enum Bad {
    Key,
    Value(String),
}

fn err(line: usize, column: usize, message: &str) -> ConfigError {
    ConfigError { line, column, message: message.to_string() }
}

fn in_section(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" in [{s}]")
    }
}

fn num<T: FromStr>(v: &str) -> Result<T, Bad> {
    v.parse().map_err(|_| Bad::Value(format!("cannot parse '{v}' as a {}", std::any::type_name::<T>())))
}

fn positive(v: &str) -> Result<f64, Bad> {
    let x: f64 = num(v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Bad::Value(format!("expected a positive number, got {v}")))
    }
}

/// `;`-separated polynomials, one per degree of freedom.
fn polys(v: &str) -> Vec<String> {
    v.split(';').map(|s| s.trim().to_string()).collect()
}
