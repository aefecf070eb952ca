use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;

use super::{PipelineError, Result};
use crate::cvt::SampleSet;
use crate::geom2d::{delaunay, triangle_angles, Point, Polygon};

/// Boundary of the union of well-shaped Delaunay triangles of the images.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    /// Counter-clockwise outer loops, largest first.
    pub loops: Vec<Polygon>,
    /// Clockwise loops around holes.
    pub holes: Vec<Polygon>,
    /// Samples whose image is more than three median displacements away
    /// from its cell centroid.
    pub flagged: Vec<usize>,
    pub kept_triangles: usize,
    pub dropped_triangles: usize,
}

impl Boundary {
    /// Area enclosed by the outer loops minus the holes.
    pub fn area(&self) -> f64 {
        self.loops.iter().map(Polygon::area).sum::<f64>() - self.holes.iter().map(Polygon::area).sum::<f64>()
    }
}

/// Clockwise angle in `(0, 2π]` that turns `from` onto `to`.
fn clockwise_angle(from: Point, to: Point) -> f64 {
    let ccw = from.cross(to).atan2(from.dot(to));
    let cw = (-ccw).rem_euclid(TAU);
    if cw <= 0.0 {
        TAU
    } else {
        cw
    }
}

/// Chains directed boundary edges (interior on the left) into closed loops.
/// At a vertex with several outgoing edges the walk takes the first one
/// met turning clockwise from the edge it arrived by, so loops touching at
/// a vertex come out separated.
fn chain_loops(points: &[Point], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut outgoing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        outgoing.entry(a).or_default().push(b);
    }
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut loops = Vec::new();
    for &start in edges {
        if used.contains(&start) {
            continue;
        }
        let mut cycle = Vec::new();
        let (mut u, mut v) = start;
        used.insert(start);
        loop {
            cycle.push(u);
            if v == start.0 {
                break;
            }
            let back = points[u] - points[v];
            let next = outgoing[&v]
                .iter()
                .filter(|&&w| !used.contains(&(v, w)))
                .min_by(|&&a, &&b| {
                    clockwise_angle(back, points[a] - points[v]).total_cmp(&clockwise_angle(back, points[b] - points[v]))
                })
                .copied();
            let Some(w) = next else {
                break;
            };
            used.insert((v, w));
            (u, v) = (v, w);
        }
        if cycle.len() >= 3 {
            loops.push(cycle);
        }
    }
    loops
}

/// Extracts the outline of the sampled region.
///
/// The images are triangulated; triangles with an angle below
/// `min_angle_deg` or above `max_angle_deg` (the flat ones spanning gaps
/// outside the region) are dropped, and the boundary of the remaining union
/// is chained into loops.
pub fn extract_boundary(state: &SampleSet, min_angle_deg: f64, max_angle_deg: f64) -> Result<Boundary> {
    if state.len() < 3 {
        return Err(PipelineError::Extraction(format!("need at least 3 samples, got {}", state.len())));
    }
    let pts = &state.images;
    let tri = delaunay(pts)?;
    let kept: Vec<[usize; 3]> = tri
        .triangles
        .iter()
        .copied()
        .filter(|t| {
            let angles = triangle_angles(pts[t[0]], pts[t[1]], pts[t[2]]);
            let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = angles.iter().copied().fold(0.0, f64::max);
            lo >= min_angle_deg && hi <= max_angle_deg
        })
        .collect();
    if kept.is_empty() {
        return Err(PipelineError::Extraction(format!(
            "every triangle failed the angle test [{min_angle_deg}°, {max_angle_deg}°]; \
             try a smaller minimum or a larger maximum angle"
        )));
    }

    let directed: HashSet<(usize, usize)> = kept
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .collect();
    let mut boundary_edges: Vec<(usize, usize)> = directed
        .iter()
        .copied()
        .filter(|&(a, b)| !directed.contains(&(b, a)))
        .collect();
    boundary_edges.sort_unstable();

    let mut loops = Vec::new();
    let mut holes = Vec::new();
    for cycle in chain_loops(pts, &boundary_edges) {
        let poly = Polygon::new(cycle.iter().map(|&i| pts[i]).collect())?;
        if poly.signed_area() > 0.0 {
            loops.push(poly);
        } else {
            holes.push(poly);
        }
    }
    loops.sort_by(|a, b| b.area().total_cmp(&a.area()));

    let tess = state.tessellate()?;
    let disp: Vec<f64> = pts.iter().zip(&tess.centroids).map(|(y, c)| y.distance(*c)).collect();
    let mut sorted = disp.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let flagged = disp
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 3.0 * median)
        .map(|(i, _)| i)
        .collect();

    Ok(Boundary {
        loops,
        holes,
        flagged,
        kept_triangles: kept.len(),
        dropped_triangles: tri.len() - kept.len(),
    })
}
