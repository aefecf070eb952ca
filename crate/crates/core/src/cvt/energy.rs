use rayon::prelude::*;

use super::{tessellate, CvtError, Result, SampleSet};
use crate::geom2d::{BoundingBox, Point, Polygon};
use crate::maps::DiagramMap;

/// Area, centroid and generator displacement of one Voronoi cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellReport {
    pub area: f64,
    pub centroid: Point,
    /// `‖yᵢ − cᵢ‖`.
    pub displacement: f64,
}

/// CVT energy `G = Σᵢ ∫_{Vᵢ} |x − yᵢ|²` and the cells it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub energy: f64,
    pub cells: Vec<CellReport>,
}

impl EnergyReport {
    pub fn max_displacement(&self) -> f64 {
        self.cells.iter().map(|c| c.displacement).fold(0.0, f64::max)
    }
}

/// `∫_V |x − y|²` over a polygon, by fanning the polygon from `y`.
///
/// For the triangle `(y, y + a, y + b)` the integral is
/// `area · (a·a + a·b + b·b) / 6`; signed areas make the sum exact for any
/// `y`.
pub fn cell_energy(cell: &Polygon, y: Point) -> f64 {
    cell.edges()
        .map(|(p, q)| {
            let (a, b) = (p - y, q - y);
            0.5 * a.cross(b) * (a.dot(a) + a.dot(b) + b.dot(b)) / 6.0
        })
        .sum()
}

/// CVT energy of `points` in `bbox` and its gradient `2 |Vᵢ| (yᵢ − cᵢ)`.
pub fn cvt_energy_grad(points: &[Point], bbox: &BoundingBox) -> Result<(EnergyReport, Vec<Point>)> {
    energy_with_seed(points, bbox, 0)
}

pub(crate) fn energy_with_seed(points: &[Point], bbox: &BoundingBox, seed: u64) -> Result<(EnergyReport, Vec<Point>)> {
    if points.is_empty() {
        return Err(CvtError::Empty);
    }
    let tess = tessellate(points, bbox, seed)?;
    let per_cell: Vec<f64> = tess
        .cells
        .par_iter()
        .zip(points.par_iter())
        .map(|(cell, &y)| cell_energy(cell, y))
        .collect();
    let energy = per_cell.iter().sum();
    let mut cells = Vec::with_capacity(points.len());
    let mut grad = Vec::with_capacity(points.len());
    for ((&y, &area), &centroid) in points.iter().zip(&tess.areas).zip(&tess.centroids) {
        cells.push(CellReport { area, centroid, displacement: y.distance(centroid) });
        grad.push((y - centroid) * (2.0 * area));
    }
    Ok((EnergyReport { energy, cells }, grad))
}

/// One Lloyd iteration: every point moves to the centroid of its cell.
pub fn lloyd_step(points: &[Point], bbox: &BoundingBox) -> Result<Vec<Point>> {
    Ok(tessellate(points, bbox, 0)?.centroids)
}

/// `H(x) = G(F(x₁), …, F(x_M))` and its gradient with respect to the
/// stacked samples, `2 |Vᵢ| DF(xᵢ)ᵀ (F(xᵢ) − cᵢ)` per block.
pub fn composed_energy_grad(state: &SampleSet, map: &dyn DiagramMap) -> Result<(f64, Vec<f64>)> {
    let flat: Vec<f64> = state.samples.concat();
    let (h, grad, _) = composed_flat(map, &flat, &state.bbox, state.seed)?;
    Ok((h, grad))
}

/// [`composed_energy_grad`] on a stacked parameter vector. Also returns the
/// energy report and the images.
pub(crate) fn composed_flat(
    map: &dyn DiagramMap,
    flat: &[f64],
    bbox: &BoundingBox,
    seed: u64,
) -> Result<(f64, Vec<f64>, (EnergyReport, Vec<Point>))> {
    let n = map.dim();
    let evaluated = flat
        .par_chunks(n)
        .enumerate()
        .map(|(index, x)| {
            let (y, jac) = map.evaluate_with_jacobian(x)?;
            if !bbox.contains_strictly(y) {
                return Err(CvtError::ImageOutsideBox { index, x: y.x, y: y.y });
            }
            Ok((y, jac))
        })
        .collect::<Result<Vec<_>>>()?;
    let images: Vec<Point> = evaluated.iter().map(|(y, _)| *y).collect();
    let (report, image_grad) = energy_with_seed(&images, bbox, seed)?;
    let mut grad = vec![0.0; flat.len()];
    grad.par_chunks_mut(n)
        .zip(evaluated.par_iter())
        .zip(image_grad.par_iter())
        .for_each(|((block, (_, jac)), &w)| jac.transpose_apply_into(w, block));
    Ok((report.energy, grad, (report, images)))
}
