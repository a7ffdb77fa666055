//! Run parameters and the `key=value` configuration file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::BadFlag(format!("format must be json or csv, got {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Everything that determines a report. Serialized verbatim into it, so a
/// report can be regenerated bit-identically from its own parameter block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    /// Annulus depth of the derivative scan and the growth profile.
    pub depth: u32,
    /// Pair samples and distance-ratio samples.
    pub samples: u64,
    pub seed: u64,
    /// Chordal mesh of boundary nets.
    pub mesh: f64,
    /// Overrides the tolerance of the command's headline comparison.
    pub tol: Option<f64>,
    pub format: Format,
    pub qh_depth: u32,
    pub density_depth: u32,
    pub pair_depth: u32,
    /// Coarse depth of the geodesic conditions; the fine depth is twice it.
    pub geodesic_depth: u32,
    pub hardy_rays: usize,
    pub hardy_depth: u32,
    /// Hardy radii run over `10, 100, …, 10^hardy_decades`.
    pub hardy_decades: i32,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            depth: 12,
            samples: 100_000,
            seed: 0,
            mesh: 1e-3,
            tol: None,
            format: Format::Json,
            qh_depth: 6,
            density_depth: 12,
            pair_depth: 20,
            geodesic_depth: 16,
            hardy_rays: 256,
            hardy_depth: 60,
            hardy_decades: 6,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::BadFlag(format!("cannot parse {key}={value}")))
}

impl Params {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "depth" => self.depth = parse(key, value)?,
            "samples" => self.samples = parse_count(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "mesh" => self.mesh = parse(key, value)?,
            "tol" => self.tol = Some(parse(key, value)?),
            "format" => self.format = value.parse()?,
            "qh_depth" => self.qh_depth = parse(key, value)?,
            "density_depth" => self.density_depth = parse(key, value)?,
            "pair_depth" => self.pair_depth = parse(key, value)?,
            "geodesic_depth" => self.geodesic_depth = parse(key, value)?,
            "hardy_rays" => self.hardy_rays = parse(key, value)?,
            "hardy_depth" => self.hardy_depth = parse(key, value)?,
            "hardy_decades" => self.hardy_decades = parse(key, value)?,
            _ => return Err(Error::BadFlag(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a configuration text: `key=value` lines, `#` comments.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::BadFlag(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadFlag(format!("cannot read {}: {e}", path.display())))?;
        self.apply_config(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mesh > 0.0 && self.mesh < 1.0) {
            return Err(Error::BadFlag(format!("mesh must lie in (0, 1), got {}", self.mesh)));
        }
        if self.samples == 0 {
            return Err(Error::BadFlag("samples must be positive".into()));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::BadFlag(format!("tol must be a nonnegative number, got {t}")));
            }
        }
        if self.qh_depth == 0 || self.geodesic_depth == 0 || self.hardy_decades < 1 {
            return Err(Error::BadFlag("depths and decades must be positive".into()));
        }
        Ok(())
    }
}

/// Counts accept scientific notation such as `1e5`.
pub fn parse_count(key: &str, value: &str) -> Result<u64> {
    if let Ok(n) = value.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = parse(key, value)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(Error::BadFlag(format!("{key} must be a nonnegative integer, got {value}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let mut p = Params::default();
        p.apply_config("# comment\n\ndepth = 14\nsamples=1e4\nformat=csv # trailing\n").unwrap();
        assert_eq!((p.depth, p.samples, p.format), (14, 10_000, Format::Csv));
        assert!(p.apply_config("nonsense").is_err());
        assert!(p.apply_config("colour=blue").is_err());
        assert!(p.apply_config("samples=1.5").is_err());
    }

    #[test]
    fn validation() {
        let mut p = Params::default();
        p.validate().unwrap();
        p.mesh = 2.0;
        assert!(p.validate().is_err());
    }
}
