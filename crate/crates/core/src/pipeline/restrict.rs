use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::multigrid::optimize_round;
use super::{PipelineError, RefineConfig, RegionRestriction, Result, PENALTY_WEIGHTS};
use crate::cvt::SampleSet;
use crate::geom2d::{BoundingBox, Point};
use crate::maps::DiagramMap;
use crate::optim::{inverse_sample, inverse_sample_with, OptimOptions};

const SLACK: f64 = 1e-3;
const TARGET_STREAM: u64 = 1 << 40;

fn intersect(a: &BoundingBox, b: &BoundingBox) -> Result<BoundingBox> {
    BoundingBox::new(a.xmin.max(b.xmin), a.xmax.min(b.xmax), a.ymin.max(b.ymin), a.ymax.min(b.ymax))
        .map_err(|_| PipelineError::InvalidConfig("the disk does not meet the region".into()))
}

/// A seeded point of the disk of radius `0.9 r`.
fn disk_target(rr: &RegionRestriction, seed: u64, i: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TARGET_STREAM + i as u64);
    let (u, v): (f64, f64) = (rng.gen(), rng.gen());
    let rho = 0.9 * rr.radius * u.sqrt();
    rr.center + Point::new(rho * (TAU * v).cos(), rho * (TAU * v).sin())
}

/// Builds a sample set inside the disk from arbitrary parameter samples.
///
/// Samples already imaged in the disk are kept. The others are moved by an
/// inverse-sample solve towards a seeded target in the disk and kept if
/// their new image lies in the region. Fails when no solve gets within the
/// radius of the center.
pub(crate) fn restrict_samples(
    map: &dyn DiagramMap,
    samples: Vec<Vec<f64>>,
    bbox: BoundingBox,
    rr: &RegionRestriction,
    seed: u64,
) -> Result<SampleSet> {
    let region = intersect(&bbox, &rr.bounding_box())?;
    let opts = OptimOptions::default();
    let placed: Vec<(Option<(Vec<f64>, Point)>, f64)> = samples
        .into_par_iter()
        .enumerate()
        .map(|(i, x)| {
            if let Ok(y) = map.evaluate(&x) {
                if rr.contains(y, 0.0) && region.contains_strictly(y) {
                    let d = y.distance(rr.center);
                    return (Some((x, y)), d);
                }
            }
            let r = inverse_sample(map, disk_target(rr, seed, i), &x, &opts);
            match map.evaluate(&r.x_star) {
                Ok(y) => {
                    let d = y.distance(rr.center);
                    (region.contains_strictly(y).then_some((r.x_star, y)), d)
                }
                Err(_) => (None, f64::INFINITY),
            }
        })
        .collect();

    let closest = placed.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if closest > rr.radius * (1.0 + SLACK) {
        return Err(PipelineError::InfeasibleRegion { distance: closest, radius: rr.radius });
    }
    let kept: Vec<Vec<f64>> = placed.into_iter().filter_map(|p| p.0).map(|(x, _)| x).collect();
    Ok(SampleSet::new(map, kept, region, seed)?)
}

/// Pulls every image back into the disk, dropping samples that cannot be
/// brought within `r (1 + 10⁻³)` of the center.
pub(crate) fn enforce_restriction(map: &dyn DiagramMap, state: SampleSet, rr: &RegionRestriction) -> Result<SampleSet> {
    let opts = OptimOptions::default();
    let penalty = rr.penalty(PENALTY_WEIGHTS[2]);
    let bbox = state.bbox;
    let fixed: Vec<Option<(Vec<f64>, Point)>> = state
        .samples
        .into_par_iter()
        .zip(state.images.into_par_iter())
        .map(|(x, y)| {
            if rr.contains(y, SLACK) {
                return Some((x, y));
            }
            let dir = y - rr.center;
            let target = rr.center + dir * (0.99 * rr.radius / dir.norm());
            let r = inverse_sample_with(map, target, &x, &opts, Some(&penalty));
            let z = map.evaluate(&r.x_star).ok()?;
            (rr.contains(z, SLACK) && bbox.contains_strictly(z)).then_some((r.x_star, z))
        })
        .collect();
    let (samples, images): (Vec<_>, Vec<_>) = fixed.into_iter().flatten().unzip();
    if samples.is_empty() {
        return Err(PipelineError::InfeasibleRegion { distance: f64::INFINITY, radius: rr.radius });
    }
    Ok(SampleSet { samples, images, bbox, seed: state.seed })
}

/// Confines a sample set to the disk `rr` and re-optimises it there.
///
/// The region becomes the intersection of the state's box with the square
/// around the disk. Samples outside are moved in (or dropped), one round of
/// Lloyd and quasi-Newton iterations runs with the exterior penalty, and
/// images still outside the disk are projected back. On success every
/// image is within `r (1 + 10⁻³)` of the center.
pub fn restrict_region(
    map: &dyn DiagramMap,
    state: &SampleSet,
    rr: &RegionRestriction,
    cfg: &RefineConfig,
) -> Result<SampleSet> {
    let seeded = restrict_samples(map, state.samples.clone(), state.bbox, rr, state.seed)?;
    let optimized = optimize_round(map, seeded, cfg, Some(rr))?;
    enforce_restriction(map, optimized, rr)
}
