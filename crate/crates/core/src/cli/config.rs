use std::fs;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::geom2d::{BoundingBox, Point};
use crate::maps::MapSpec;
use crate::pipeline::{RefineConfig, RefineMethod, RegionRestriction};

/// Region `D` requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoxChoice {
    /// Bounding box of observed images, grown by a quarter on every side.
    Auto,
    Fixed(BoundingBox),
}

/// Settings shared by the subcommands, read from `key = value` files and
/// overridden by flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub map: MapSpec,
    pub samples: usize,
    pub bbox: BoxChoice,
    pub eps: f64,
    pub q1: usize,
    pub q2: usize,
    pub n_ref: usize,
    pub n_add: usize,
    pub refine: RefineMethod,
    pub seed: u64,
    pub restrict: Option<RegionRestriction>,
    pub out: PathBuf,
    /// Monte Carlo sample count.
    pub n: usize,
    pub min_angle: f64,
    pub max_angle: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let refine = RefineConfig::default();
        Self {
            map: MapSpec::TraceDet(2),
            samples: 200,
            bbox: BoxChoice::Auto,
            eps: refine.eps,
            q1: refine.q1,
            q2: refine.q2,
            n_ref: 0,
            n_add: refine.n_add,
            refine: refine.method,
            seed: 0,
            restrict: None,
            out: PathBuf::from("out"),
            n: 10_000,
            min_angle: 12.0,
            max_angle: 155.0,
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn parse_reals(key: &str, value: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("{key}: expected {count} comma-separated numbers, got `{value}`")))?;
    if parts.len() != count || parts.iter().any(|v| !v.is_finite()) {
        return Err(usage(format!("{key}: expected {count} comma-separated numbers, got `{value}`")));
    }
    Ok(parts)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse `{value}`")))
}

impl RunConfig {
    /// Sets one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "map" => self.map = value.parse().map_err(|e| usage(format!("map: {e}")))?,
            "samples" => self.samples = parse_num(key, value)?,
            "box" => {
                self.bbox = if value.trim() == "auto" {
                    BoxChoice::Auto
                } else {
                    let v = parse_reals(key, value, 4)?;
                    BoxChoice::Fixed(BoundingBox::new(v[0], v[1], v[2], v[3]).map_err(|e| usage(format!("box: {e}")))?)
                }
            }
            "eps" => self.eps = parse_num(key, value)?,
            "q1" => self.q1 = parse_num(key, value)?,
            "q2" => self.q2 = parse_num(key, value)?,
            "nref" => self.n_ref = parse_num(key, value)?,
            "nadd" => self.n_add = parse_num(key, value)?,
            "refine" => self.refine = value.parse().map_err(|e| usage(format!("refine: {e}")))?,
            "seed" => self.seed = parse_num(key, value)?,
            "restrict" => {
                let v = parse_reals(key, value, 3)?;
                let rr = RegionRestriction::new(Point::new(v[0], v[1]), v[2]).map_err(|e| usage(format!("restrict: {e}")))?;
                self.restrict = Some(rr);
            }
            "out" => self.out = PathBuf::from(value.trim()),
            "n" => self.n = parse_num(key, value)?,
            "min-angle" | "min_angle" => self.min_angle = parse_num(key, value)?,
            "max-angle" | "max_angle" => self.max_angle = parse_num(key, value)?,
            other => return Err(usage(format!("unknown option `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are
    /// ignored.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        Ok(())
    }

    pub fn refine_config(&self) -> RefineConfig {
        RefineConfig {
            n_ref: self.n_ref,
            n_add: self.n_add,
            method: self.refine,
            q1: self.q1,
            q2: self.q2,
            eps: self.eps,
            ..RefineConfig::default()
        }
    }

    /// Checks the values the parsers cannot check on their own.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples < 3 {
            return Err(usage(format!("samples must be at least 3, got {}", self.samples)));
        }
        if self.n == 0 {
            return Err(usage("n must be positive".into()));
        }
        if !(self.min_angle < self.max_angle) {
            return Err(usage(format!("min-angle {} must be below max-angle {}", self.min_angle, self.max_angle)));
        }
        self.refine_config().validate().map_err(|e| usage(e.to_string()))
    }
}
