//! Experiment descriptions and the flat `key = value` configuration format.
//!
//! Keys mirror the command-line flags (`mode`, `tv`, `mu`, `beta`, `rho`,
//! `eps`, `seed`, `noise-kind`, `noise-level`, `sigma`, `band`, `in`, `out`,
//! `trace`) plus `example`, `size`, `max-iter`, `cross` and `record-time`.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::admm::{Fidelity, SolverParams, TvFlavor};
use crate::error::{Error, Result};
use crate::experiments::noise::{NoiseKind, NoiseSpec};

/// Built-in problem setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Example {
    /// Grayscale image, Gaussian blur, salt-and-pepper noise, TV/L1.
    #[default]
    Grayscale,
    /// RGB image, within-channel blur, salt-and-pepper noise, TV/L1.
    Rgb,
    /// RGB image with additional cross-channel blur.
    CrossChannel,
    /// Grayscale image, wider blur, white Gaussian noise, TV/L2.
    Gaussian,
    /// Separable Phillips integral equation, white Gaussian noise, TV/L2.
    Phillips,
}

impl Example {
    pub fn label(self) -> &'static str {
        match self {
            Example::Grayscale => "example1",
            Example::Rgb => "example2",
            Example::CrossChannel => "example3",
            Example::Gaussian => "example4",
            Example::Phillips => "example5",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "example1" | "1" | "grayscale" | "gray" => Ok(Example::Grayscale),
            "example2" | "2" | "rgb" => Ok(Example::Rgb),
            "example3" | "3" | "cross" | "cross-channel" => Ok(Example::CrossChannel),
            "example4" | "4" | "gaussian" => Ok(Example::Gaussian),
            "example5" | "5" | "phillips" => Ok(Example::Phillips),
            _ => Err(Error::Config(format!("unknown example '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub example: Example,
    pub mode: Fidelity,
    pub solver: SolverParams,
    pub noise: NoiseSpec,
    /// Gaussian PSF width; `0` selects the identity (no blur).
    pub sigma: f64,
    /// PSF half-bandwidth.
    pub band: usize,
    /// Side length of generated images and of the Phillips discretization.
    pub size: usize,
    /// Apply the 3 × 3 colour-mixing blur on top of the spatial blur.
    pub cross_channel: bool,
    /// Ground-truth image; a procedural stand-in is generated when absent.
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Example::Grayscale)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

impl ExperimentConfig {
    /// The highest-noise setting of each example.
    pub fn preset(example: Example) -> Self {
        let base = ExperimentConfig {
            example,
            mode: Fidelity::L1,
            solver: SolverParams::new(0.2, 50.0, 5.0, 1e-3),
            noise: NoiseSpec::new(NoiseKind::SaltPepper, 0.3, 1),
            sigma: 1.0,
            band: 4,
            size: 256,
            cross_channel: false,
            input: None,
            output: None,
            trace: None,
        };
        match example {
            Example::Grayscale => base,
            Example::Rgb | Example::CrossChannel => ExperimentConfig {
                solver: SolverParams::new(0.125, 80.0, 5.0, 1e-2),
                cross_channel: example == Example::CrossChannel,
                ..base
            },
            Example::Gaussian => ExperimentConfig {
                mode: Fidelity::L2,
                solver: SolverParams::new(0.001, 30.0, 1.0, 1e-3),
                noise: NoiseSpec::new(NoiseKind::GaussianWhite, 0.01, 1),
                sigma: 2.0,
                ..base
            },
            Example::Phillips => ExperimentConfig {
                mode: Fidelity::L2,
                solver: SolverParams::new(0.1, 40.0, 1.0, 1e-3),
                noise: NoiseSpec::new(NoiseKind::GaussianWhite, 0.1, 1),
                size: 500,
                ..base
            },
        }
    }

    /// Sets one option by its flag name (without the leading dashes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "example" => {
                let keep = (self.input.take(), self.output.take(), self.trace.take());
                *self = Self::preset(parse(key, value)?);
                (self.input, self.output, self.trace) = keep;
            }
            "mode" => self.mode = parse(key, value)?,
            "tv" => self.solver.tv = parse::<TvFlavor>(key, value)?,
            "mu" => self.solver.mu = parse(key, value)?,
            "beta" => self.solver.beta = parse(key, value)?,
            "rho" => self.solver.rho = parse(key, value)?,
            "eps" => self.solver.epsilon = parse(key, value)?,
            "max-iter" => self.solver.max_iter = parse(key, value)?,
            "seed" => self.noise.seed = parse(key, value)?,
            "noise-kind" => self.noise.kind = parse(key, value)?,
            "noise-level" => self.noise.level = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "band" => self.band = parse(key, value)?,
            "size" => self.size = parse(key, value)?,
            "cross" => self.cross_channel = parse(key, value)?,
            "record-time" => self.solver.record_time = parse(key, value)?,
            "in" => self.input = Some(PathBuf::from(value)),
            "out" => self.output = Some(PathBuf::from(value)),
            "trace" => self.trace = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Splits `key = value` lines, skipping blanks and `#` comments.
    pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", n + 1)));
            };
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    /// Applies pairs in order. The last `example` pair, if any, resets to
    /// that preset before everything else.
    pub fn apply_pairs<K: AsRef<str>, V: AsRef<str>>(&mut self, pairs: &[(K, V)]) -> Result<()> {
        if let Some((k, v)) = pairs.iter().rev().find(|(k, _)| k.as_ref().trim() == "example") {
            self.set(k.as_ref(), v.as_ref())?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k.as_ref().trim() != "example") {
            self.set(k.as_ref(), v.as_ref())?;
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        self.apply_pairs(&Self::parse_pairs(text)?)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    /// Serializes every option in the file format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "example = {}\nmode = {}\ntv = {}\nmu = {}\nbeta = {}\nrho = {}\neps = {}\nmax-iter = {}\n\
             seed = {}\nnoise-kind = {}\nnoise-level = {}\nsigma = {}\nband = {}\nsize = {}\ncross = {}\n\
             record-time = {}\n",
            self.example,
            self.mode,
            self.solver.tv,
            self.solver.mu,
            self.solver.beta,
            self.solver.rho,
            self.solver.epsilon,
            self.solver.max_iter,
            self.noise.seed,
            self.noise.kind,
            self.noise.level,
            self.sigma,
            self.band,
            self.size,
            self.cross_channel,
            self.solver.record_time,
        );
        for (k, p) in [("in", &self.input), ("out", &self.output), ("trace", &self.trace)] {
            if let Some(p) = p {
                s.push_str(&format!("{k} = {}\n", p.display()));
            }
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate(self.mode)?;
        if !(self.noise.level >= 0.0 && self.noise.level <= 1.0) {
            return Err(Error::Config(format!("noise-level must lie in [0, 1], got {}", self.noise.level)));
        }
        if self.mode == Fidelity::L2 && self.noise.kind != NoiseKind::GaussianWhite {
            return Err(Error::Config("mode tvl2 expects gaussian-white noise".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if self.size < 8 {
            return Err(Error::Config(format!("size must be at least 8, got {}", self.size)));
        }
        Ok(())
    }
}
