//! Centroidal Voronoi tessellations of the images of a map.
//!
//! [`cvt_energy_grad`] and [`lloyd_step`] work on plain planar point sets.
//! [`lloyd_bs`] and [`variational_cvt_bs`] move parameter samples so that
//! their images approach a CVT of the region `D`.

mod energy;
mod lloyd;
mod variational;

use thiserror::Error;

use crate::geom2d::{clipped_voronoi, separate_near_duplicates, BoundingBox, GeomError, Point, Tessellation};
use crate::maps::{uniform_sample, DiagramMap, MapError};

pub use energy::{cell_energy, composed_energy_grad, cvt_energy_grad, lloyd_step, CellReport, EnergyReport};
pub use lloyd::{lloyd_bs, LloydIteration, LloydOptions, LloydRun};
pub use variational::{variational_cvt_bs, VariationalRun};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CvtError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("image of sample {index} at ({x}, {y}) is not strictly inside the region")]
    ImageOutsideBox { index: usize, x: f64, y: f64 },
    #[error("sample set is empty")]
    Empty,
    #[error("could not draw {wanted} samples with images inside the region ({drawn} found)")]
    SamplingExhausted { wanted: usize, drawn: usize },
}

pub type Result<T> = std::result::Result<T, CvtError>;

/// Parameter samples, their cached images and the region `D` being
/// tessellated.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<Vec<f64>>,
    pub images: Vec<Point>,
    pub bbox: BoundingBox,
    /// Keys the jitter applied to coincident images.
    pub seed: u64,
}

impl SampleSet {
    /// Evaluates the map on `samples`; every image must lie strictly inside
    /// `bbox`.
    pub fn new(map: &dyn DiagramMap, samples: Vec<Vec<f64>>, bbox: BoundingBox, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(CvtError::Empty);
        }
        let images = samples
            .iter()
            .enumerate()
            .map(|(index, x)| {
                let y = map.evaluate(x)?;
                if !bbox.contains_strictly(y) {
                    return Err(CvtError::ImageOutsideBox { index, x: y.x, y: y.y });
                }
                Ok(y)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples, images, bbox, seed })
    }

    /// `m` uniform samples of the map's domain. Draws whose image fails or
    /// leaves `bbox` are redrawn from the same stream.
    pub fn random(map: &dyn DiagramMap, m: usize, bbox: BoundingBox, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(CvtError::Empty);
        }
        let mut samples = Vec::with_capacity(m);
        let mut images = Vec::with_capacity(m);
        let mut stream = 0u64;
        while samples.len() < m && stream < 100 * m as u64 {
            let x = uniform_sample(map.domain(), seed, stream);
            stream += 1;
            if let Ok(y) = map.evaluate(&x) {
                if bbox.contains_strictly(y) {
                    samples.push(x);
                    images.push(y);
                }
            }
        }
        if samples.len() < m {
            return Err(CvtError::SamplingExhausted { wanted: m, drawn: samples.len() });
        }
        Ok(Self { samples, images, bbox, seed })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends a sample whose image is already known.
    pub fn push(&mut self, x: Vec<f64>, y: Point) {
        self.samples.push(x);
        self.images.push(y);
    }

    /// Largest `‖images[i] − F(samples[i])‖`.
    pub fn cache_error(&self, map: &dyn DiagramMap) -> f64 {
        self.samples
            .iter()
            .zip(&self.images)
            .map(|(x, y)| map.evaluate(x).map_or(f64::INFINITY, |z| z.distance(*y)))
            .fold(0.0, f64::max)
    }

    /// Clipped Voronoi diagram of the images.
    pub fn tessellate(&self) -> Result<Tessellation> {
        tessellate(&self.images, &self.bbox, self.seed)
    }
}

/// Clipped Voronoi diagram, separating coincident generators first when
/// needed.
pub(crate) fn tessellate(points: &[Point], bbox: &BoundingBox, seed: u64) -> Result<Tessellation> {
    match clipped_voronoi(points, bbox) {
        Err(GeomError::DuplicatePoint { .. }) => {
            let mut moved = points.to_vec();
            for pass in 0..4u64 {
                separate_near_duplicates(&mut moved, bbox, seed.wrapping_add(pass));
                match clipped_voronoi(&moved, bbox) {
                    Err(GeomError::DuplicatePoint { .. }) => continue,
                    other => return Ok(other?),
                }
            }
            Ok(clipped_voronoi(&moved, bbox)?)
        }
        other => Ok(other?),
    }
}
