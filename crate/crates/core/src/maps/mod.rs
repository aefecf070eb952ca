//! Maps from a box of parameters to the plane, with analytic Jacobians.
//!
//! A [`DiagramMap`] is the object whose image is being sampled. Two
//! concrete maps are provided: [`TraceDet`] sends a symmetric matrix with
//! entries in `[-1, 1]` to its (trace, determinant) pair, and
//! [`ConvexShapeMap`] sends a discretised convex shape with two symmetry
//! axes to `(100 A / P², A² / W)`.

mod affine;
mod apw;
mod montecarlo;
mod registry;
mod tracedet;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geom2d::{BoundingBox, GeomError, Point};

pub use affine::AffineMap;
pub use apw::{apw_eval, apw_jacobian, shape_build, ConvexShapeMap, ConvexShapeParams, ShapeMeasures};
pub use montecarlo::{monte_carlo, uniform_sample, MonteCarloRun};
pub use registry::{parse_map, MapSpec};
pub use tracedet::{
    adjugate, determinant, tracedet_eval, tracedet_jacobian, SymMatrixVec, TraceDet,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("parameter vector has length {got}, expected {expected}")]
    Encoding { expected: usize, got: usize },
    #[error("degenerate shape (area {area:e})")]
    DegenerateShape { area: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown map `{0}` (expected tracedet:<d> or apw:<q>)")]
    UnknownMap(String),
    #[error("monte carlo sampling gave up after {attempts} attempts ({skipped} degenerate)")]
    SamplingExhausted { attempts: usize, skipped: usize },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

pub type Result<T> = std::result::Result<T, MapError>;

/// The parameter box `∏ [lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(MapError::InvalidDomain(format!(
                "bound lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(MapError::InvalidDomain(format!(
                "coordinate {i}: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (v, (a, b)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*a, *b);
        }
    }

    pub fn clamped(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.clamp_in_place(&mut out);
        out
    }

    /// The same box repeated `copies` times, for stacked sample vectors.
    pub fn repeated(&self, copies: usize) -> BoxDomain {
        BoxDomain {
            lower: self.lower.repeat(copies),
            upper: self.upper.repeat(copies),
        }
    }
}

/// A 2×N Jacobian stored row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub rows: [Vec<f64>; 2],
}

impl Jacobian {
    pub fn zeros(n: usize) -> Self {
        Self {
            rows: [vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    /// `J v`.
    pub fn apply(&self, v: &[f64]) -> Point {
        let dot = |r: &[f64]| r.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        Point::new(dot(&self.rows[0]), dot(&self.rows[1]))
    }

    /// `Jᵀ w`, written into `out`.
    pub fn transpose_apply_into(&self, w: Point, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.rows[0][k] * w.x + self.rows[1][k] * w.y;
        }
    }

    pub fn transpose_apply(&self, w: Point) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        self.transpose_apply_into(w, &mut out);
        out
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(2, self.ncols(), |i, j| self.rows[i][j])
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> [f64; 2] {
        if self.ncols() == 1 {
            return [self.rows[0][0].hypot(self.rows[1][0]), 0.0];
        }
        let sv = self.to_matrix().singular_values();
        let mut s = [sv[0], sv[1]];
        if s[0] < s[1] {
            s.swap(0, 1);
        }
        s
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values()[1]
    }

    /// Columns `w_1, w_2` (as an N×2 matrix) with `J w_i = e_i`, built from
    /// the thin SVD `J = U S Vᵀ` as `V S⁻¹ Uᵀ`. `None` when a singular value
    /// is not above `threshold`.
    pub fn right_inverse(&self, threshold: f64) -> Option<DMatrix<f64>> {
        if self.ncols() < 2 {
            return None;
        }
        let svd = self.to_matrix().svd(true, true);
        let u = svd.u.as_ref()?;
        let v_t = svd.v_t.as_ref()?;
        if svd.singular_values.iter().any(|&s| !(s > threshold)) {
            return None;
        }
        let s_inv = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
        Some(v_t.transpose() * s_inv * u.transpose())
    }
}

/// A smooth map `F: X → R²` on a parameter box.
pub trait DiagramMap: Send + Sync {
    /// Registry name, e.g. `tracedet:3`.
    fn name(&self) -> String;

    fn domain(&self) -> &BoxDomain;

    fn evaluate(&self, x: &[f64]) -> Result<Point>;

    fn jacobian(&self, x: &[f64]) -> Result<Jacobian>;

    fn evaluate_with_jacobian(&self, x: &[f64]) -> Result<(Point, Jacobian)> {
        Ok((self.evaluate(x)?, self.jacobian(x)?))
    }

    /// A rectangle known to contain the whole image, if one is available.
    fn image_bounds(&self) -> Option<BoundingBox> {
        None
    }

    /// The tessellation box used when none is supplied.
    fn default_box(&self) -> Option<BoundingBox> {
        self.image_bounds().map(|b| b.inflated(0.125))
    }

    fn dim(&self) -> usize {
        self.domain().dim()
    }
}

impl<M: DiagramMap + ?Sized> DiagramMap for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn domain(&self) -> &BoxDomain {
        (**self).domain()
    }
    fn evaluate(&self, x: &[f64]) -> Result<Point> {
        (**self).evaluate(x)
    }
    fn jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        (**self).jacobian(x)
    }
    fn evaluate_with_jacobian(&self, x: &[f64]) -> Result<(Point, Jacobian)> {
        (**self).evaluate_with_jacobian(x)
    }
    fn image_bounds(&self) -> Option<BoundingBox> {
        (**self).image_bounds()
    }
    fn default_box(&self) -> Option<BoundingBox> {
        (**self).default_box()
    }
}

pub(crate) fn check_len(x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(MapError::Encoding {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}
