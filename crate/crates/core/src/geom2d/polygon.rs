use super::{GeomError, Point, Result};

/// Minimum separation between consecutive vertices.
const MIN_EDGE: f64 = 1e-12;

/// Area below which a polygon has no meaningful centroid.
const MIN_AREA: f64 = 1e-12;

/// A simple polygon given by its vertex loop (the closing edge is implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates vertex count and consecutive-vertex separation.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(GeomError::InvalidPolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(GeomError::InvalidPolygon(format!(
                "non-finite vertex ({}, {})",
                v.x, v.y
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].distance(vertices[(i + 1) % n]) <= MIN_EDGE {
                return Err(GeomError::InvalidPolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    /// Wraps a vertex loop produced by trusted geometry code.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    /// Iterator over the directed edges `(v_i, v_{i+1})`, closing edge included.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn centroid(&self) -> Result<Point> {
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (a, b) in self.edges() {
            let w = a.cross(b);
            area2 += w;
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        let area = 0.5 * area2;
        if area.abs() <= MIN_AREA {
            return Err(GeomError::DegeneratePolygon { area });
        }
        Ok(Point::new(cx / (6.0 * area), cy / (6.0 * area)))
    }

    /// Polar moment `∫ (x² + y²) dA` about the origin, signed like the area.
    pub fn second_moment(&self) -> f64 {
        self.edges()
            .map(|(a, b)| {
                a.cross(b)
                    * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y)
            })
            .sum::<f64>()
            / 12.0
    }

    /// True when every turn is a left turn (up to `tol`).
    pub fn is_convex_ccw(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= -tol
        })
    }

    /// Even-odd point containment; points on the boundary may go either way.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                if p.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn translated(&self, offset: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v + offset).collect(),
        }
    }

    /// Checks that no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 4 {
            return n == 3;
        }
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return false;
                }
            }
        }
        true
    }
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Shoelace signed area: positive for counter-clockwise loops.
pub fn signed_area(poly: &Polygon) -> f64 {
    poly.signed_area()
}

/// Area-weighted centroid of the polygon interior.
pub fn centroid(poly: &Polygon) -> Result<Point> {
    poly.centroid()
}

/// `∫ (x² + y²) dA` over a counter-clockwise polygon, via Green's theorem.
pub fn second_moment(poly: &Polygon) -> f64 {
    poly.second_moment()
}
