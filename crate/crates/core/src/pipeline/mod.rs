//! Multigrid refinement of a sample set, region restriction and boundary
//! extraction.

mod boundary;
mod multigrid;
mod refine;
mod restrict;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cvt::CvtError;
use crate::geom2d::{BoundingBox, GeomError, Point};
use crate::maps::MapError;
use crate::optim::BallPenalty;

pub use boundary::{extract_boundary, Boundary};
pub use multigrid::{multigrid, MultigridRun, RoundRecord};
pub use refine::{refine_delaunay, refine_spheres, RefineStats};
pub use restrict::restrict_region;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Cvt(#[from] CvtError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no sample reaches the disk: closest image is {distance} away from its center (radius {radius})")]
    InfeasibleRegion { distance: f64, radius: f64 },
    #[error("boundary extraction failed: {0}")]
    Extraction(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMethod {
    Spheres,
    Delaunay,
}

impl FromStr for RefineMethod {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "spheres" => Ok(Self::Spheres),
            "delaunay" => Ok(Self::Delaunay),
            other => Err(PipelineError::InvalidConfig(format!(
                "unknown refinement `{other}` (expected spheres or delaunay)"
            ))),
        }
    }
}

impl fmt::Display for RefineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spheres => "spheres",
            Self::Delaunay => "delaunay",
        })
    }
}

/// Parameters of the multigrid driver.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig {
    /// Refinement rounds after the initial optimisation.
    pub n_ref: usize,
    /// Directions tried around each sample by the sphere method.
    pub n_add: usize,
    pub method: RefineMethod,
    /// Lloyd iterations per round.
    pub q1: usize,
    /// Quasi-Newton iterations per round on the composed energy.
    pub q2: usize,
    /// Samples whose Jacobian has a smaller singular value are not refined.
    pub sv_threshold: f64,
    /// Lloyd stopping tolerance on image movement.
    pub eps: f64,
    /// Move samples towards the center of the box before refining.
    pub recenter: bool,
    /// Exponent of the re-centering norm.
    pub p: u32,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            n_ref: 3,
            n_add: 4,
            method: RefineMethod::Spheres,
            q1: 50,
            q2: 1500,
            sv_threshold: 1e-3,
            eps: 1e-4,
            recenter: true,
            p: 10,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(PipelineError::InvalidConfig(msg.to_string()));
        if self.n_add == 0 && self.method == RefineMethod::Spheres {
            return bad("n_add must be positive");
        }
        if !(self.sv_threshold >= 0.0 && self.sv_threshold.is_finite()) {
            return bad("sv_threshold must be a non-negative number");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive");
        }
        if self.p == 0 {
            return bad("p must be positive");
        }
        Ok(())
    }
}

/// Keeps every image inside the closed disk `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRestriction {
    pub center: Point,
    pub radius: f64,
}

impl RegionRestriction {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(PipelineError::InvalidConfig(format!("bad disk ({center:?}, {radius})")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, y: Point, slack: f64) -> bool {
        y.distance(self.center) <= self.radius * (1.0 + slack)
    }

    /// The square around the disk, widened by half a radius on each side.
    pub fn bounding_box(&self) -> BoundingBox {
        let r = 1.5 * self.radius;
        BoundingBox {
            xmin: self.center.x - r,
            xmax: self.center.x + r,
            ymin: self.center.y - r,
            ymax: self.center.y + r,
        }
    }

    pub(crate) fn penalty(&self, weight: f64) -> BallPenalty {
        BallPenalty { center: self.center, radius: self.radius, weight }
    }
}

/// Weights of the exterior penalty, raised in turn.
pub(crate) const PENALTY_WEIGHTS: [f64; 3] = [1e2, 1e4, 1e6];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names() {
        for m in [RefineMethod::Spheres, RefineMethod::Delaunay] {
            assert_eq!(m.to_string().parse::<RefineMethod>().unwrap(), m);
        }
        assert!("grid".parse::<RefineMethod>().is_err());
    }

    #[test]
    fn restriction_box_contains_the_disk() {
        let rr = RegionRestriction::new(Point::new(3.9, 1.0), 0.2).unwrap();
        let b = rr.bounding_box();
        assert!(b.contains_strictly(Point::new(4.1, 1.0)));
        assert!(b.contains_strictly(Point::new(3.9, 0.8)));
        assert!(RegionRestriction::new(Point::ORIGIN, 0.0).is_err());
    }
}
