use super::{check_len, BoxDomain, DiagramMap, Jacobian, MapError, Result};
use crate::geom2d::Point;

/// `x ↦ A x + b` on a box; its image is a parallelogram (or polygon), handy
/// for checking the samplers against a known region.
#[derive(Debug, Clone)]
pub struct AffineMap {
    jac: Jacobian,
    offset: Point,
    domain: BoxDomain,
}

impl AffineMap {
    pub fn new(rows: [Vec<f64>; 2], offset: Point, domain: BoxDomain) -> Result<Self> {
        if rows[0].len() != domain.dim() || rows[1].len() != domain.dim() {
            return Err(MapError::InvalidParameters(format!(
                "matrix has {} and {} columns for a {}-dimensional domain",
                rows[0].len(),
                rows[1].len(),
                domain.dim()
            )));
        }
        Ok(Self {
            jac: Jacobian { rows },
            offset,
            domain,
        })
    }

    /// Projection onto the first two coordinates of `[lo, hi]^n`.
    pub fn coordinate_projection(n: usize, lo: f64, hi: f64) -> Result<Self> {
        let mut r0 = vec![0.0; n];
        let mut r1 = vec![0.0; n];
        r0[0] = 1.0;
        r1[1] = 1.0;
        Self::new([r0, r1], Point::ORIGIN, BoxDomain::cube(n, lo, hi)?)
    }
}

impl DiagramMap for AffineMap {
    fn name(&self) -> String {
        format!("affine:{}", self.domain.dim())
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Point> {
        check_len(x, self.domain.dim())?;
        Ok(self.jac.apply(x) + self.offset)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        check_len(x, self.domain.dim())?;
        Ok(self.jac.clone())
    }
}
