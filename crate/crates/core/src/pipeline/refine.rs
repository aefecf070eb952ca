use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{RefineConfig, Result};
use crate::cvt::SampleSet;
use crate::geom2d::{delaunay, Point};
use crate::maps::DiagramMap;
use crate::optim::{inverse_sample_with, recenter, BallPenalty, OptimOptions, RecenterStatus};

/// What a refinement call did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RefineStats {
    pub added: usize,
    /// Samples left alone because their Jacobian is numerically singular.
    pub rank_deficient: usize,
    pub recentered: usize,
    /// Candidates dropped (outside the box, outside the region, failed
    /// projection or duplicate image).
    pub rejected: usize,
}

/// Smallest distance between two of the points (infinite for fewer than
/// two).
pub(crate) fn min_pairwise_distance(points: &[Point]) -> f64 {
    if let Ok(tri) = delaunay(points) {
        return tri
            .edges()
            .iter()
            .map(|&(a, b)| points[a].distance(points[b]))
            .fold(f64::INFINITY, f64::min);
    }
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(points[i].distance(points[j]));
        }
    }
    best
}

/// Adds up to `n_add` samples around every full-rank sample.
///
/// A sample is first re-centered along its fiber (if enabled). With
/// `W = V S⁻¹ Uᵀ` from the thin SVD of `DF(x₀)`, so that `DF(x₀) W = I`,
/// the candidates are `x₀ + r W (cos θⱼ, sin θⱼ)` for `n_add` equally
/// spaced angles and `r` a third of the smallest distance between images.
/// Candidates outside the parameter box or whose image leaves the region
/// are dropped.
pub fn refine_spheres(map: &dyn DiagramMap, state: &SampleSet, cfg: &RefineConfig) -> Result<(SampleSet, RefineStats)> {
    let r = min_pairwise_distance(&state.images) / 3.0;
    let inner = OptimOptions::default();
    let k = cfg.n_add;
    let bbox = state.bbox;

    struct Outcome {
        sample: Vec<f64>,
        recentered: bool,
        rank_deficient: bool,
        candidates: Vec<(Vec<f64>, Point)>,
        rejected: usize,
    }

    let outcomes: Vec<Outcome> = state
        .samples
        .par_iter()
        .map(|x| {
            let mut out = Outcome {
                sample: x.clone(),
                recentered: false,
                rank_deficient: false,
                candidates: Vec::new(),
                rejected: 0,
            };
            let full_rank = |x: &[f64]| {
                map.jacobian(x)
                    .ok()
                    .filter(|j| j.smallest_singular_value() > cfg.sv_threshold)
            };
            if full_rank(x).is_none() {
                out.rank_deficient = true;
                return out;
            }
            if cfg.recenter {
                let rc = recenter(map, x, cfg.p, &inner);
                if rc.status == RecenterStatus::Recentered {
                    out.recentered = true;
                    out.sample = rc.x_star;
                }
            }
            let Some(jac) = full_rank(&out.sample) else {
                out.rank_deficient = true;
                return out;
            };
            let Some(w) = jac.right_inverse(cfg.sv_threshold) else {
                out.rank_deficient = true;
                return out;
            };
            for j in 0..k {
                let theta = TAU * j as f64 / k as f64;
                let (c, s) = (theta.cos(), theta.sin());
                let z: Vec<f64> = out
                    .sample
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| xi + r * (w[(i, 0)] * c + w[(i, 1)] * s))
                    .collect();
                if !r.is_finite() || !map.domain().contains(&z) {
                    out.rejected += 1;
                    continue;
                }
                match map.evaluate(&z) {
                    Ok(y) if bbox.contains_strictly(y) => out.candidates.push((z, y)),
                    _ => out.rejected += 1,
                }
            }
            out
        })
        .collect();

    let mut next = state.clone();
    let mut stats = RefineStats::default();
    let mut additions = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        stats.rank_deficient += o.rank_deficient as usize;
        stats.recentered += o.recentered as usize;
        stats.rejected += o.rejected;
        if o.recentered {
            // same image up to the re-centering tolerance
            next.images[i] = map.evaluate(&o.sample)?;
            next.samples[i] = o.sample;
        }
        additions.extend(o.candidates);
    }
    stats.added = additions.len();
    for (z, y) in additions {
        next.push(z, y);
    }
    Ok((next, stats))
}

/// Spatial hash used to drop images that land on top of each other.
struct Dedup {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Point>>,
}

impl Dedup {
    fn new(cell: f64) -> Self {
        Self { cell, buckets: HashMap::new() }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    /// Inserts `p` unless a stored point is closer than the cell size.
    fn insert(&mut self, p: Point) -> bool {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(b) = self.buckets.get(&(kx + dx, ky + dy)) {
                    if b.iter().any(|q| q.distance(p) < self.cell) {
                        return false;
                    }
                }
            }
        }
        self.buckets.entry((kx, ky)).or_default().push(p);
        true
    }
}

/// Adds samples whose images sit at midpoints of Delaunay edges.
///
/// With `ℓ` the mean edge length of the Delaunay triangulation of the
/// images, every edge of length in `[ℓ/2, 3ℓ/2]` gets an inverse-sample
/// solve towards its midpoint, warm started from each endpoint; the better
/// of the two is kept. New images closer than `10⁻³ ℓ` to an existing or
/// previously added image are dropped.
pub fn refine_delaunay(
    map: &dyn DiagramMap,
    state: &SampleSet,
    opts: &OptimOptions,
    penalty: Option<&BallPenalty>,
) -> Result<(SampleSet, RefineStats)> {
    let tri = delaunay(&state.images)?;
    let edges = tri.edges();
    let lengths: Vec<f64> = edges
        .iter()
        .map(|&(a, b)| state.images[a].distance(state.images[b]))
        .collect();
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let chosen: Vec<(usize, usize)> = edges
        .iter()
        .zip(&lengths)
        .filter(|(_, &l)| (0.5 * mean..=1.5 * mean).contains(&l))
        .map(|(&e, _)| e)
        .collect();

    let bbox = state.bbox;
    let solved: Vec<Option<(Vec<f64>, Point)>> = chosen
        .par_iter()
        .map(|&(a, b)| {
            let target = state.images[a].midpoint(state.images[b]);
            [a, b]
                .iter()
                .filter_map(|&i| {
                    let r = inverse_sample_with(map, target, &state.samples[i], opts, penalty);
                    let y = map.evaluate(&r.x_star).ok()?;
                    bbox.contains_strictly(y).then(|| (y.distance(target), r.x_star, y))
                })
                .min_by(|p, q| p.0.total_cmp(&q.0))
                .map(|(_, x, y)| (x, y))
        })
        .collect();

    let mut dedup = Dedup::new(1e-3 * mean);
    for &y in &state.images {
        dedup.insert(y);
    }
    let mut next = state.clone();
    let mut stats = RefineStats::default();
    for s in solved {
        match s {
            Some((x, y)) if dedup.insert(y) => {
                next.push(x, y);
                stats.added += 1;
            }
            _ => stats.rejected += 1,
        }
    }
    Ok((next, stats))
}
