use super::{BoundingBox, Point};

/// Uniform bucket grid over a point set, about one point per bucket.
///
/// Used for ring-by-ring neighbour enumeration: every point in ring `k`
/// around a bucket is at least `(k - 1) * cell_size` away from any point in
/// that bucket.
#[derive(Debug, Clone)]
pub struct PointGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl PointGrid {
    pub fn new(points: &[Point], bbox: &BoundingBox) -> Self {
        let n = points.len().max(1);
        let cell = (bbox.area() / n as f64).sqrt().max(1e-300);
        let nx = ((bbox.width() / cell).ceil() as usize).clamp(1, 4096);
        let ny = ((bbox.height() / cell).ceil() as usize).clamp(1, 4096);
        let cell = (bbox.width() / nx as f64).max(bbox.height() / ny as f64);
        let mut grid = Self {
            origin: Point::new(bbox.xmin, bbox.ymin),
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            items: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|&p| grid.key(p)).collect();
        for &k in &keys {
            grid.starts[k + 1] += 1;
        }
        for i in 0..nx * ny {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            grid.items[fill[k]] = i;
            fill[k] += 1;
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn coords(&self, p: Point) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        let cx = if fx.is_finite() { fx.max(0.0) as usize } else { 0 };
        let cy = if fy.is_finite() { fy.max(0.0) as usize } else { 0 };
        (cx.min(self.nx - 1), cy.min(self.ny - 1))
    }

    fn key(&self, p: Point) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.nx + cx
    }

    fn bucket(&self, cx: usize, cy: usize) -> &[usize] {
        let k = cy * self.nx + cx;
        &self.items[self.starts[k]..self.starts[k + 1]]
    }

    /// Largest ring index that still touches the grid around `p`.
    pub fn max_ring(&self, p: Point) -> usize {
        let (cx, cy) = self.coords(p);
        cx.max(self.nx - 1 - cx).max(cy).max(self.ny - 1 - cy)
    }

    /// Calls `f` with every point index in ring `k` (Chebyshev distance `k`
    /// in bucket units) around the bucket containing `p`.
    pub fn for_each_in_ring(&self, p: Point, k: usize, mut f: impl FnMut(usize)) {
        let (cx, cy) = self.coords(p);
        let (cx, cy, k) = (cx as isize, cy as isize, k as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let mut visit = |x: isize, y: isize| {
            if x >= 0 && y >= 0 && x < nx && y < ny {
                for &i in self.bucket(x as usize, y as usize) {
                    f(i);
                }
            }
        };
        if k == 0 {
            visit(cx, cy);
            return;
        }
        for x in (cx - k)..=(cx + k) {
            visit(x, cy - k);
            visit(x, cy + k);
        }
        for y in (cy - k + 1)..=(cy + k - 1) {
            visit(cx - k, y);
            visit(cx + k, y);
        }
    }

    /// Indices of all points within `radius` of `p` (unordered).
    pub fn within(&self, points: &[Point], p: Point, radius: f64) -> Vec<usize> {
        let rings = (radius / self.cell).ceil() as usize + 1;
        let mut out = Vec::new();
        for k in 0..=rings.min(self.max_ring(p)) {
            self.for_each_in_ring(p, k, |i| {
                if points[i].distance(p) <= radius {
                    out.push(i);
                }
            });
        }
        out
    }
}
