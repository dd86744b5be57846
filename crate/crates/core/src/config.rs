//! Flat `key = value` configuration with compiled-in defaults.

use std::fmt;
use std::path::Path;

use crate::domain::GammaConvention;
use crate::error::{Error, Result};
use crate::spectral::DEFAULT_PAD_FACTOR;

/// Quadrature controls of the E_ε evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Truncate |ξ₁| at this value; `None` keeps every DFT frequency up to Nyquist.
    pub xi1_max: Option<f64>,
    /// Fixed radial cutoff; `None` starts at 64/max ρ and doubles until the
    /// certified tail bound drops below 0.1% of the value.
    pub r_max: Option<f64>,
    /// DFT length along x₁; `None` uses 8× the sample count.
    pub n_xi1: Option<usize>,
    /// Gauss–Legendre points per radial panel.
    pub n_r: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { xi1_max: None, r_max: None, n_xi1: None, n_r: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub quad: QuadConfig,
    pub gamma_convention: GammaConvention,
    /// Zero-padding factor of the 1D spectral operators.
    pub pad_factor: usize,
    /// Support threshold of the 2D limit perimeter term.
    pub pos_threshold: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            quad: QuadConfig::default(),
            gamma_convention: GammaConvention::ExactMu,
            pad_factor: DEFAULT_PAD_FACTOR,
            pos_threshold: 0.0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::Format(format!("config key {key}: cannot parse '{v}'")))
}

fn parse_opt<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>> {
    if v == "auto" {
        Ok(None)
    } else {
        parse_num(key, v).map(Some)
    }
}

impl Config {
    /// Parses `key = value` lines; `#` starts a comment; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("config line {}: expected key = value", lineno + 1))
            })?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "quad.xi1_max" => self.quad.xi1_max = parse_opt(key, v)?,
            "quad.r_max" => self.quad.r_max = parse_opt(key, v)?,
            "quad.n_xi1" => self.quad.n_xi1 = parse_opt(key, v)?,
            "quad.n_r" => self.quad.n_r = parse_num(key, v)?,
            "gamma.convention" => self.gamma_convention = v.parse()?,
            "pad.factor" => self.pad_factor = parse_num(key, v)?,
            "pos.threshold" => self.pos_threshold = parse_num(key, v)?,
            _ => return Err(Error::Format(format!("unknown config key '{key}'"))),
        }
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Format(m));
        if self.quad.n_r == 0 {
            return bad("quad.n_r must be >= 1".into());
        }
        if self.pad_factor == 0 {
            return bad("pad.factor must be >= 1".into());
        }
        if !(self.pos_threshold >= 0.0) {
            return bad("pos.threshold must be >= 0".into());
        }
        for (k, v) in [("quad.xi1_max", self.quad.xi1_max), ("quad.r_max", self.quad.r_max)] {
            if let Some(x) = v {
                if !(x > 0.0) {
                    return bad(format!("{k} must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn opt<T: fmt::Display>(v: Option<T>) -> String {
            v.map_or_else(|| "auto".to_string(), |x| x.to_string())
        }
        writeln!(f, "quad.xi1_max = {}", opt(self.quad.xi1_max))?;
        writeln!(f, "quad.r_max = {}", opt(self.quad.r_max))?;
        writeln!(f, "quad.n_xi1 = {}", opt(self.quad.n_xi1))?;
        writeln!(f, "quad.n_r = {}", self.quad.n_r)?;
        writeln!(f, "gamma.convention = {}", self.gamma_convention)?;
        writeln!(f, "pad.factor = {}", self.pad_factor)?;
        writeln!(f, "pos.threshold = {}", self.pos_threshold)
    }
}
