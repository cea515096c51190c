//! Run configuration: defaults, key=value config files, and flag overrides.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub homomorphism: f64,
    pub conjugation: f64,
    pub resolution: f64,
    pub berezin: f64,
    pub trace: f64,
    pub cyclicity: f64,
    pub numeric: f64,
    pub structural: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            homomorphism: 1e-3,
            conjugation: 1e-10,
            resolution: 1e-3,
            berezin: 1e-3,
            trace: 1e-6,
            cyclicity: 1e-6,
            numeric: 1e-4,
            structural: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub m: usize,
    pub n: usize,
    pub a0: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    /// Grid points per even axis (power of two).
    pub grid: usize,
    /// Half-extent L of the even grid.
    pub extent: f64,
    /// Use the exact rational backend where a check supports it.
    pub exact: bool,
    pub tol: Tolerances,
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 2,
            n: 1,
            a0: 1.0,
            alpha_re: 1.0,
            alpha_im: 0.0,
            grid: 64,
            extent: 8.0,
            exact: false,
            tol: Tolerances::default(),
            json: None,
        }
    }
}

impl RunConfig {
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", lineno + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| anyhow::anyhow!("bad value for {key}: {e}"))
        }
        match key {
            "m" => self.m = num(key, value)?,
            "n" => self.n = num(key, value)?,
            "a0" => self.a0 = num(key, value)?,
            "alpha_re" => self.alpha_re = num(key, value)?,
            "alpha_im" => self.alpha_im = num(key, value)?,
            "grid" => self.grid = num(key, value)?,
            "extent" => self.extent = num(key, value)?,
            "exact" => self.exact = num(key, value)?,
            "json" => self.json = Some(PathBuf::from(value)),
            "tol_homomorphism" => self.tol.homomorphism = num(key, value)?,
            "tol_conjugation" => self.tol.conjugation = num(key, value)?,
            "tol_resolution" => self.tol.resolution = num(key, value)?,
            "tol_berezin" => self.tol.berezin = num(key, value)?,
            "tol_trace" => self.tol.trace = num(key, value)?,
            "tol_cyclicity" => self.tol.cyclicity = num(key, value)?,
            "tol_numeric" => self.tol.numeric = num(key, value)?,
            "tol_structural" => self.tol.structural = num(key, value)?,
            other => bail!("unknown config key {other}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m % 2 != 0 {
            bail!("m must be even and positive (got {})", self.m);
        }
        if !self.grid.is_power_of_two() {
            bail!("grid must be a power of two (got {})", self.grid);
        }
        if !(self.extent > 0.0) {
            bail!("extent must be positive (got {})", self.extent);
        }
        if self.a0 == 0.0 {
            bail!("a0 must be nonzero");
        }
        if self.alpha_re == 0.0 && self.alpha_im == 0.0 {
            bail!("alpha must be nonzero");
        }
        let tols = [
            self.tol.homomorphism,
            self.tol.conjugation,
            self.tol.resolution,
            self.tol.berezin,
            self.tol.trace,
            self.tol.cyclicity,
            self.tol.numeric,
            self.tol.structural,
        ];
        if tols.iter().any(|t| !(*t > 0.0)) {
            bail!("tolerances must be positive");
        }
        Ok(())
    }
}
