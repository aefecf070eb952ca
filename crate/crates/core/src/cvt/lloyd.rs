use rayon::prelude::*;

use super::energy::energy_with_seed;
use super::{Result, SampleSet};
use crate::geom2d::Point;
use crate::maps::DiagramMap;
use crate::optim::{inverse_sample_with, BallPenalty, OptimOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct LloydOptions {
    pub max_iters: usize,
    /// Stop once no image moves by `eps` or more in one iteration.
    pub eps: f64,
    /// Options of each centroid projection.
    pub inner: OptimOptions,
    pub penalty: Option<BallPenalty>,
}

impl Default for LloydOptions {
    fn default() -> Self {
        Self {
            max_iters: 50,
            eps: 1e-4,
            inner: OptimOptions::default().with_max_iters(100),
            penalty: None,
        }
    }
}

impl LloydOptions {
    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydIteration {
    /// Energy of the images at the start of the iteration.
    pub energy: f64,
    /// Largest image displacement produced by the iteration.
    pub max_movement: f64,
    /// Projections that failed; those samples kept their old value.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub state: SampleSet,
    pub log: Vec<LloydIteration>,
    pub converged: bool,
    /// Energy of the returned state.
    pub energy: f64,
}

/// Lloyd's algorithm through the map: each iteration tessellates the
/// images, then replaces every sample by the solution of the inverse
/// problem towards its cell centroid, warm started at the sample itself.
pub fn lloyd_bs(map: &dyn DiagramMap, state: SampleSet, opts: &LloydOptions) -> Result<LloydRun> {
    let mut state = state;
    let mut log = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let (report, _) = energy_with_seed(&state.images, &state.bbox, state.seed)?;
        let bbox = state.bbox;
        let moves: Vec<Option<(Vec<f64>, Point)>> = state
            .samples
            .par_iter()
            .zip(report.cells.par_iter())
            .map(|(x, cell)| {
                let r = inverse_sample_with(map, cell.centroid, x, &opts.inner, opts.penalty.as_ref());
                if !r.f_star.is_finite() {
                    return None;
                }
                let y = map.evaluate(&r.x_star).ok()?;
                bbox.contains_strictly(y).then_some((r.x_star, y))
            })
            .collect();

        let mut failures = 0;
        let mut max_movement = 0.0f64;
        for (i, m) in moves.into_iter().enumerate() {
            match m {
                Some((x, y)) => {
                    max_movement = max_movement.max(y.distance(state.images[i]));
                    state.samples[i] = x;
                    state.images[i] = y;
                }
                None => failures += 1,
            }
        }
        log.push(LloydIteration { energy: report.energy, max_movement, failures });
        if max_movement < opts.eps {
            converged = true;
            break;
        }
    }
    let energy = energy_with_seed(&state.images, &state.bbox, state.seed)?.0.energy;
    Ok(LloydRun { state, log, converged, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::BoundingBox;
    use crate::maps::TraceDet;

    #[test]
    fn single_sample_goes_to_the_box_centroid() {
        let map = TraceDet::new(2).unwrap();
        let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let state = SampleSet::new(&map, vec![vec![0.7, 0.2, -0.4]], bbox, 0).unwrap();
        let run = lloyd_bs(&map, state, &LloydOptions::default()).unwrap();
        assert!(run.converged);
        assert!(run.state.images[0].norm() < 1e-4, "{:?}", run.state.images);
    }

    #[test]
    fn converged_state_stops_after_one_iteration() {
        let map = TraceDet::new(2).unwrap();
        let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let state = SampleSet::new(&map, vec![vec![0.0, 0.0, 0.0]], bbox, 0).unwrap();
        let run = lloyd_bs(&map, state.clone(), &LloydOptions::default()).unwrap();
        assert_eq!(run.log.len(), 1);
        assert!(run.state.images[0].distance(state.images[0]) < 1e-4);
    }
}
