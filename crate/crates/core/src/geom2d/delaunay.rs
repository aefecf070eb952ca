use spade::{DelaunayTriangulation, Point2, Triangulation as _};

use super::{GeomError, Point, Result};

/// Delaunay triangulation as counter-clockwise index triples into the
/// input point list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted and deduplicated.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

/// Delaunay triangulation of `points`.
///
/// Points are inserted in index order with exact orientation and in-circle
/// predicates; four or more cocircular points keep the triangulation built
/// by the earlier insertions, which makes the result a deterministic
/// function of the input order.
pub fn delaunay(points: &[Point]) -> Result<Triangulation> {
    if points.len() < 3 {
        return Err(GeomError::DegenerateInput(format!(
            "{} points, need at least 3",
            points.len()
        )));
    }
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    for (i, p) in points.iter().enumerate() {
        let handle = dt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| GeomError::DegenerateInput(format!("point {i}: {e:?}")))?;
        if handle.index() != i {
            return Err(GeomError::DuplicatePoint {
                first: handle.index(),
                second: i,
            });
        }
    }
    let triangles: Vec<[usize; 3]> = dt
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            [a.fix().index(), b.fix().index(), c.fix().index()]
        })
        .collect();
    if triangles.is_empty() {
        return Err(GeomError::DegenerateInput("all points are collinear".into()));
    }
    Ok(Triangulation { triangles })
}

/// Delaunay neighbours of every point, or `None` when the points could
/// not all be inserted as distinct vertices.
pub(crate) fn neighbor_lists(points: &[Point]) -> Option<Vec<Vec<usize>>> {
    let verts: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p.x, p.y)).collect();
    let dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::bulk_load_stable(verts).ok()?;
    if dt.num_vertices() != points.len() {
        return None;
    }
    let mut lists = vec![Vec::new(); points.len()];
    for v in dt.vertices() {
        let i = v.fix().index();
        lists[i] = v.out_edges().map(|e| e.to().fix().index()).collect();
    }
    Some(lists)
}
