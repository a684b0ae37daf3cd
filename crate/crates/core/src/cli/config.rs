//! `key = value` run configuration.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forms::{Scheme, UpwindKind, UpwindParams};
use crate::mesh::BoxSpec;
use crate::stepper::SchemeConfig;

/// Initial data selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    Mms2d,
    Preset3dVariable,
    Preset3dConstant,
    Zero,
}

impl InitKind {
    pub const VARIANTS: &'static str = "mms2d, preset3d-variable, preset3d-constant, zero";
}

impl FromStr for InitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mms2d" => Ok(Self::Mms2d),
            "preset3d-variable" => Ok(Self::Preset3dVariable),
            "preset3d-constant" => Ok(Self::Preset3dConstant),
            "zero" => Ok(Self::Zero),
            _ => Err(format!("unknown init '{s}' (expected one of {})", Self::VARIANTS)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub n: [usize; 3],
    pub scheme: Scheme,
    pub upwind: Option<UpwindParams>,
    pub dt: f64,
    pub t_final: f64,
    pub fp_tol: f64,
    pub fp_maxiter: usize,
    pub init: InitKind,
    pub output: PathBuf,
    /// Write a VTK snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            lower: [-1.0; 3],
            upper: [1.0; 3],
            n: [8; 3],
            scheme: Scheme::B,
            upwind: None,
            dt: 0.01,
            t_final: 1.0,
            fp_tol: 1e-12,
            fp_maxiter: 100,
            init: InitKind::Mms2d,
            output: PathBuf::from("out"),
            snapshot_every: 0,
        }
    }
}

impl RunConfig {
    pub fn box_spec(&self) -> BoxSpec {
        let mut n = self.n;
        if self.dim == 2 {
            n[2] = 1;
        }
        BoxSpec::new(self.lower, self.upper, n)
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme,
            upwind: self.upwind,
            dt: self.dt,
            t_final: self.t_final,
            fp_tol: self.fp_tol,
            fp_maxiter: self.fp_maxiter,
            constant_density: self.init == InitKind::Preset3dConstant,
        }
    }
}

const KEYS: &[&str] = &[
    "dim",
    "lower",
    "upper",
    "n",
    "scheme",
    "upwind",
    "c",
    "eps",
    "dt",
    "T",
    "fp_tol",
    "fp_maxiter",
    "init",
    "output",
    "snapshot_every",
];

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| err(line, format!("{key}: cannot parse '{v}' as a number")))
}

/// One value for every axis, or one per axis.
fn triple<T: FromStr + Copy>(line: usize, key: &str, v: &str) -> Result<[T; 3]> {
    let parts: Vec<T> = v
        .split(',')
        .map(|s| number(line, key, s.trim()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [a] => Ok([a; 3]),
        [a, b] => Ok([a, b, a]),
        [a, b, c] => Ok([a, b, c]),
        _ => Err(err(line, format!("{key}: expected 1 to 3 comma-separated values"))),
    }
}

/// Parses and validates a configuration. Omitted keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut upwind_kind: Option<UpwindKind> = None;
    let mut c = UpwindParams::default().c;
    let mut eps = UpwindParams::default().eps;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', found '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let key = *KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(line, format!("unknown key '{key}' (known keys: {})", KEYS.join(", "))))?;
        if let Some(prev) = seen.insert(key, line) {
            return Err(err(line, format!("duplicate key '{key}' (first set on line {prev})")));
        }
        if value.is_empty() {
            return Err(err(line, format!("{key}: missing value")));
        }
        match key {
            "dim" => {
                cfg.dim = number(line, key, value)?;
                if cfg.dim != 2 && cfg.dim != 3 {
                    return Err(err(line, format!("dim must be 2 or 3, got {}", cfg.dim)));
                }
            }
            "lower" => cfg.lower = triple(line, key, value)?,
            "upper" => cfg.upper = triple(line, key, value)?,
            "n" => {
                cfg.n = triple(line, key, value)?;
                if cfg.n.contains(&0) {
                    return Err(err(line, "n: subdivisions must be positive"));
                }
            }
            "scheme" => {
                cfg.scheme = match value {
                    "A" => Scheme::A,
                    "B" => Scheme::B,
                    _ => return Err(err(line, format!("unknown scheme '{value}' (expected one of A, B)"))),
                }
            }
            "upwind" => {
                upwind_kind = match value {
                    "off" => None,
                    "abs" => Some(UpwindKind::Abs),
                    "smooth" => Some(UpwindKind::Smooth),
                    _ => {
                        return Err(err(
                            line,
                            format!("unknown upwind '{value}' (expected one of off, abs, smooth)"),
                        ))
                    }
                }
            }
            "c" => {
                c = number(line, key, value)?;
                if !(0.0..=0.5).contains(&c) {
                    return Err(err(line, format!("c = {c} out of range [0, 0.5]")));
                }
            }
            "eps" => {
                eps = number(line, key, value)?;
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(err(line, format!("eps must be positive, got {eps}")));
                }
            }
            "dt" => {
                cfg.dt = number(line, key, value)?;
                if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
                    return Err(err(line, format!("dt must be positive, got {}", cfg.dt)));
                }
            }
            "T" => {
                cfg.t_final = number(line, key, value)?;
                if !(cfg.t_final >= 0.0 && cfg.t_final.is_finite()) {
                    return Err(err(line, format!("T must be nonnegative, got {}", cfg.t_final)));
                }
            }
            "fp_tol" => {
                cfg.fp_tol = number(line, key, value)?;
                if !(cfg.fp_tol > 0.0) {
                    return Err(err(line, format!("fp_tol must be positive, got {}", cfg.fp_tol)));
                }
            }
            "fp_maxiter" => {
                cfg.fp_maxiter = number(line, key, value)?;
                if cfg.fp_maxiter == 0 {
                    return Err(err(line, "fp_maxiter must be at least 1"));
                }
            }
            "init" => cfg.init = value.parse().map_err(|m: String| err(line, m))?,
            "output" => cfg.output = PathBuf::from(value),
            "snapshot_every" => cfg.snapshot_every = number(line, key, value)?,
            _ => unreachable!(),
        }
    }

    let at = |key: &str| seen.get(key).copied().unwrap_or(0);
    cfg.upwind = upwind_kind.map(|kind| UpwindParams { c, eps, kind });
    if cfg.upwind.is_none() && (seen.contains_key("c") || seen.contains_key("eps")) {
        let line = at("c").max(at("eps"));
        return Err(err(line, "c and eps require upwind = abs or smooth"));
    }
    for ax in 0..cfg.dim {
        if !(cfg.upper[ax] > cfg.lower[ax]) {
            return Err(err(at("upper").max(at("lower")), format!("upper must exceed lower on axis {ax}")));
        }
    }
    let line = at("init").max(at("dim"));
    let unit = |d: usize| (0..d).all(|ax| cfg.lower[ax] == -1.0 && cfg.upper[ax] == 1.0);
    match cfg.init {
        InitKind::Mms2d if cfg.dim != 2 => return Err(err(line, "init = mms2d requires dim = 2")),
        InitKind::Mms2d if !unit(2) => return Err(err(line, "init = mms2d requires the box [-1,1]^2")),
        InitKind::Preset3dVariable | InitKind::Preset3dConstant if cfg.dim != 3 => {
            return Err(err(line, "3D presets require dim = 3"))
        }
        InitKind::Preset3dVariable | InitKind::Preset3dConstant if !unit(3) => {
            return Err(err(line, "3D presets require the box [-1,1]^3"))
        }
        _ => {}
    }
    Ok(cfg)
}
