use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::delaunay::neighbor_lists;
use super::{BoundingBox, GeomError, Point, PointGrid, Polygon, Result};

/// Generators closer than this fraction of the box diameter count as
/// coincident.
const DUPLICATE_FRACTION: f64 = 1e-10;
/// Displacement applied to separate coincident generators.
const JITTER_FRACTION: f64 = 1e-9;

/// Voronoi cells of a generator set, clipped to a bounding box.
#[derive(Debug, Clone)]
pub struct Tessellation {
    pub cells: Vec<Polygon>,
    pub areas: Vec<f64>,
    pub centroids: Vec<Point>,
}

impl Tessellation {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

/// Computes the Voronoi cells of `generators` restricted to `bbox`.
///
/// Each cell starts as the box and is cut by the bisector half-planes of
/// the generator's Delaunay neighbours. If the triangulation cannot be
/// built, the other generators are visited ring by ring through a bucket
/// grid instead, stopping once they are farther than twice the current
/// cell radius, since their bisectors cannot reach the cell.
pub fn clipped_voronoi(generators: &[Point], bbox: &BoundingBox) -> Result<Tessellation> {
    for (index, &p) in generators.iter().enumerate() {
        if !bbox.contains_strictly(p) {
            return Err(GeomError::OutsideBox {
                index,
                x: p.x,
                y: p.y,
            });
        }
    }
    let grid = PointGrid::new(generators, bbox);
    if let Some((first, second)) = find_near_duplicate(generators, &grid, bbox) {
        return Err(GeomError::DuplicatePoint { first, second });
    }

    let merge_tol = 1e-13 * bbox.diameter().max(1.0);
    let cells: Vec<Polygon> = match neighbor_lists(generators) {
        Some(lists) => lists
            .par_iter()
            .enumerate()
            .map(|(i, nbrs)| build_cell_from_neighbors(generators[i], nbrs, generators, bbox, merge_tol))
            .collect(),
        None => (0..generators.len())
            .into_par_iter()
            .map(|i| build_cell(i, generators, &grid, bbox, merge_tol))
            .collect(),
    };

    let mut areas = Vec::with_capacity(cells.len());
    let mut centroids = Vec::with_capacity(cells.len());
    for cell in &cells {
        areas.push(cell.signed_area());
        centroids.push(cell.centroid()?);
    }
    Ok(Tessellation {
        cells,
        areas,
        centroids,
    })
}

fn build_cell_from_neighbors(
    site: Point,
    neighbors: &[usize],
    generators: &[Point],
    bbox: &BoundingBox,
    merge_tol: f64,
) -> Polygon {
    let mut cell: Vec<Point> = bbox.corners().to_vec();
    let mut scratch = Vec::with_capacity(16);
    for &j in neighbors {
        clip_by_bisector(&cell, site, generators[j], &mut scratch);
        std::mem::swap(&mut cell, &mut scratch);
        merge_close_vertices(&mut cell, merge_tol);
    }
    Polygon::from_vertices_unchecked(cell)
}

fn build_cell(
    i: usize,
    generators: &[Point],
    grid: &PointGrid,
    bbox: &BoundingBox,
    merge_tol: f64,
) -> Polygon {
    let site = generators[i];
    let mut cell: Vec<Point> = bbox.corners().to_vec();
    let mut scratch = Vec::with_capacity(16);
    let mut radius = cell_radius(&cell, site);
    let max_ring = grid.max_ring(site);
    for k in 0..=max_ring {
        if k >= 1 && (k - 1) as f64 * grid.cell_size() > 2.0 * radius {
            break;
        }
        grid.for_each_in_ring(site, k, |j| {
            if j == i {
                return;
            }
            let other = generators[j];
            if other.distance(site) > 2.0 * radius {
                return;
            }
            clip_by_bisector(&cell, site, other, &mut scratch);
            std::mem::swap(&mut cell, &mut scratch);
            merge_close_vertices(&mut cell, merge_tol);
            radius = cell_radius(&cell, site);
        });
    }
    Polygon::from_vertices_unchecked(cell)
}

fn cell_radius(cell: &[Point], site: Point) -> f64 {
    cell.iter().map(|v| v.distance(site)).fold(0.0, f64::max)
}

/// Sutherland–Hodgman step keeping the side of the bisector closer to `site`.
fn clip_by_bisector(poly: &[Point], site: Point, other: Point, out: &mut Vec<Point>) {
    out.clear();
    let normal = other - site;
    let offset = 0.5 * normal.norm_squared();
    let side = |p: Point| (p - site).dot(normal) - offset;
    let n = poly.len();
    for idx in 0..n {
        let a = poly[idx];
        let b = poly[(idx + 1) % n];
        let sa = side(a);
        let sb = side(b);
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
}

fn merge_close_vertices(poly: &mut Vec<Point>, tol: f64) {
    if poly.len() < 2 {
        return;
    }
    let mut merged: Vec<Point> = Vec::with_capacity(poly.len());
    for &p in poly.iter() {
        if merged.last().is_none_or(|q: &Point| q.distance(p) > tol) {
            merged.push(p);
        }
    }
    while merged.len() > 1 && merged[0].distance(*merged.last().unwrap()) <= tol {
        merged.pop();
    }
    *poly = merged;
}

fn find_near_duplicate(
    points: &[Point],
    grid: &PointGrid,
    bbox: &BoundingBox,
) -> Option<(usize, usize)> {
    let tol = DUPLICATE_FRACTION * bbox.diameter();
    points.iter().enumerate().find_map(|(i, &p)| {
        grid.within(points, p, tol)
            .into_iter()
            .filter(|&j| j > i)
            .min()
            .map(|j| (i, j))
    })
}

/// Moves generators that (nearly) coincide with an earlier one by a tiny
/// seeded displacement so that the Voronoi diagram is defined.
///
/// The displacement of point `j` depends only on `(seed, j)`. Returns the
/// number of points moved.
pub fn separate_near_duplicates(points: &mut [Point], bbox: &BoundingBox, seed: u64) -> usize {
    let magnitude = JITTER_FRACTION * bbox.diameter();
    let mut moved = 0;
    for pass in 0..8u64 {
        let grid = PointGrid::new(points, bbox);
        let mut clash: Vec<usize> = Vec::new();
        let tol = DUPLICATE_FRACTION * bbox.diameter();
        for (i, &p) in points.iter().enumerate() {
            clash.extend(grid.within(points, p, tol).into_iter().filter(|&j| j > i));
        }
        if clash.is_empty() {
            break;
        }
        clash.sort_unstable();
        clash.dedup();
        for j in clash {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((pass << 48) ^ j as u64);
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let step = Point::new(angle.cos(), angle.sin()) * magnitude;
            let candidate = points[j] + step;
            points[j] = if bbox.contains_strictly(candidate) {
                candidate
            } else {
                points[j] - step
            };
            moved += 1;
        }
    }
    moved
}
