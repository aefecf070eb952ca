use std::f64::consts::PI;

use super::{check_len, BoxDomain, DiagramMap, Jacobian, MapError, Result};
use crate::geom2d::{BoundingBox, Point, Polygon};

/// Shapes with area below this are rejected.
const MIN_SHAPE_AREA: f64 = 1e-8;

/// Parameters of a convex shape with two symmetry axes.
///
/// The upper-right boundary is the graph of a concave, non-increasing
/// piecewise-linear function sampled at `x_i = i/q`, `i = 0..=q`. It is
/// encoded by `rho[0] = h_0 - h_1`, the second differences
/// `rho[k] = (h_k - h_{k+1}) - (h_{k-1} - h_k)` for `k ≥ 1`, and the
/// right-most height `h_q`. Non-negative parameters always give a concave
/// non-increasing profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexShapeParams {
    pub rho: Vec<f64>,
    pub h_q: f64,
}

impl ConvexShapeParams {
    /// Splits a flat parameter vector `(rho_0, …, rho_{q-1}, h_q)`.
    pub fn from_slice(params: &[f64], q: usize) -> Result<Self> {
        check_len(params, q + 1)?;
        let p = Self {
            rho: params[..q].to_vec(),
            h_q: params[q],
        };
        p.validate()?;
        Ok(p)
    }

    /// Recovers parameters from a concave non-increasing height profile
    /// `h_0, …, h_q`.
    pub fn from_heights(heights: &[f64]) -> Result<Self> {
        if heights.len() < 2 {
            return Err(MapError::InvalidParameters("need at least two heights".into()));
        }
        let q = heights.len() - 1;
        let z: Vec<f64> = heights.windows(2).map(|w| w[0] - w[1]).collect();
        let mut rho = Vec::with_capacity(q);
        rho.push(z[0]);
        for k in 1..q {
            rho.push(z[k] - z[k - 1]);
        }
        let p = Self {
            rho: rho.into_iter().map(|r| if r.abs() < 1e-15 { 0.0 } else { r }).collect(),
            h_q: heights[q],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn q(&self) -> usize {
        self.rho.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.rho.clone();
        v.push(self.h_q);
        v
    }

    fn validate(&self) -> Result<()> {
        if self.rho.is_empty() {
            return Err(MapError::InvalidParameters("q must be at least 1".into()));
        }
        if self.rho.iter().chain([&self.h_q]).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(MapError::InvalidParameters(
                "shape parameters must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Heights `h_i = h_q + Σ_k (q - max(i, k)) rho_k` for `i = 0..=q`.
    pub fn heights(&self) -> Vec<f64> {
        let q = self.q();
        (0..=q)
            .map(|i| {
                self.h_q
                    + self
                        .rho
                        .iter()
                        .enumerate()
                        .map(|(k, r)| (q - i.max(k)) as f64 * r)
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Area, perimeter and polar moment of inertia of a shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeMeasures {
    pub area: f64,
    pub perimeter: f64,
    pub moment: f64,
}

impl ShapeMeasures {
    pub fn of_polygon(poly: &Polygon) -> Self {
        Self {
            area: poly.signed_area(),
            perimeter: poly.perimeter(),
            moment: poly.second_moment(),
        }
    }

    /// `(100 A / P², A² / W)`.
    pub fn ratios(&self) -> Point {
        Point::new(
            100.0 * self.area / (self.perimeter * self.perimeter),
            self.area * self.area / self.moment,
        )
    }
}

/// Builds the counter-clockwise polygon with the given profile in the
/// first quadrant, reflected across both axes. Repeated and collinear
/// boundary points are merged.
pub fn shape_build(p: &ConvexShapeParams) -> Result<Polygon> {
    let q = p.q();
    let h = p.heights();
    let x = |i: usize| i as f64 / q as f64;

    let area: f64 = 4.0 * (0..q).map(|i| (h[i] + h[i + 1]) / (2.0 * q as f64)).sum::<f64>();
    if !(area >= MIN_SHAPE_AREA) {
        return Err(MapError::DegenerateShape { area });
    }

    let mut raw = Vec::with_capacity(4 * q + 4);
    raw.extend((0..=q).rev().map(|i| Point::new(x(i), h[i])));
    raw.extend((1..=q).map(|i| Point::new(-x(i), h[i])));
    raw.extend((0..=q).rev().map(|i| Point::new(-x(i), -h[i])));
    raw.extend((1..=q).map(|i| Point::new(x(i), -h[i])));

    let scale = h[0].max(1.0);
    let verts = simplify_loop(raw, 1e-12 * scale);
    Polygon::new(verts).map_err(|_| MapError::DegenerateShape { area })
}

/// Drops repeated vertices and vertices lying on the segment between
/// their neighbours.
fn simplify_loop(mut pts: Vec<Point>, tol: f64) -> Vec<Point> {
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let mut keep = vec![true; n];
        let mut changed = false;
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let a = cur - prev;
            let b = next - cur;
            let repeated = a.norm() <= tol;
            let collinear = a.cross(b).abs() <= tol * (a.norm() + b.norm()) && a.dot(b) >= 0.0;
            if repeated || collinear {
                keep[i] = false;
                changed = true;
                break;
            }
        }
        if !changed {
            return pts;
        }
        pts = pts
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
    }
}

/// Exact area, perimeter and moment from the height profile, together with
/// their gradients with respect to the heights `h_0..=h_q`.
fn measures_with_height_gradients(h: &[f64]) -> (ShapeMeasures, [Vec<f64>; 3]) {
    let q = h.len() - 1;
    let w = 1.0 / q as f64;
    let mut area = 0.0;
    let mut edges = 0.0;
    let mut moment = 0.0;
    let mut d_area = vec![0.0; q + 1];
    let mut d_per = vec![0.0; q + 1];
    let mut d_mom = vec![0.0; q + 1];

    for i in 0..q {
        let (u, v) = (h[i], h[i + 1]);
        let a = i as f64 * w;

        area += 0.5 * w * (u + v);
        d_area[i] += 0.5 * w;
        d_area[i + 1] += 0.5 * w;

        let drop = u - v;
        let len = w.hypot(drop);
        edges += len;
        d_per[i] += drop / len;
        d_per[i + 1] -= drop / len;

        // ∫ x² h dx over the strip, h linear from u to v
        moment += w * (a * a * (u + v) / 2.0 + a * w * (u + 2.0 * v) / 3.0 + w * w * (u + 3.0 * v) / 12.0);
        d_mom[i] += w * (a * a / 2.0 + a * w / 3.0 + w * w / 12.0);
        d_mom[i + 1] += w * (a * a / 2.0 + 2.0 * a * w / 3.0 + w * w / 4.0);
        // ∫ h³/3 dx over the strip
        moment += w * (u + v) * (u * u + v * v) / 12.0;
        d_mom[i] += w * (3.0 * u * u + 2.0 * u * v + v * v) / 12.0;
        d_mom[i + 1] += w * (u * u + 2.0 * u * v + 3.0 * v * v) / 12.0;
    }

    let measures = ShapeMeasures {
        area: 4.0 * area,
        perimeter: 4.0 * edges + 4.0 * h[q],
        moment: 4.0 * moment,
    };
    d_per[q] += 1.0;
    for g in d_area.iter_mut().chain(d_per.iter_mut()).chain(d_mom.iter_mut()) {
        *g *= 4.0;
    }
    (measures, [d_area, d_per, d_mom])
}

/// `(100 A / P², A² / W)` of the built polygon.
pub fn apw_eval(p: &ConvexShapeParams) -> Result<Point> {
    let poly = shape_build(p)?;
    Ok(ShapeMeasures::of_polygon(&poly).ratios())
}

/// Analytic Jacobian of [`apw_eval`] with respect to `(rho, h_q)`.
pub fn apw_jacobian(p: &ConvexShapeParams) -> Result<Jacobian> {
    let q = p.q();
    let h = p.heights();
    let (m, [da, dp, dw]) = measures_with_height_gradients(&h);
    if !(m.area >= MIN_SHAPE_AREA) {
        return Err(MapError::DegenerateShape { area: m.area });
    }
    let (a, per, w) = (m.area, m.perimeter, m.moment);
    let p2 = per * per;
    let p3 = p2 * per;

    // gradients of the two ratios with respect to the heights
    let g1: Vec<f64> = (0..=q)
        .map(|i| 100.0 * (da[i] / p2 - 2.0 * a * dp[i] / p3))
        .collect();
    let g2: Vec<f64> = (0..=q)
        .map(|i| 2.0 * a * da[i] / w - a * a * dw[i] / (w * w))
        .collect();

    let mut jac = Jacobian::zeros(q + 1);
    for (row, g) in jac.rows.iter_mut().zip([&g1, &g2]) {
        for k in 0..q {
            row[k] = (0..=q).map(|i| (q - i.max(k)) as f64 * g[i]).sum();
        }
        row[q] = g.iter().sum();
    }
    Ok(jac)
}

/// `Ω ↦ (100 A/P², A²/W)` over convex shapes with two symmetry axes and
/// `q` profile segments per quadrant.
///
/// Parameters: `rho_k ∈ [0, 2/q]`, `h_q ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct ConvexShapeMap {
    q: usize,
    domain: BoxDomain,
}

impl ConvexShapeMap {
    pub fn new(q: usize) -> Result<Self> {
        if q < 1 {
            return Err(MapError::InvalidParameters("q must be at least 1".into()));
        }
        let mut upper = vec![2.0 / q as f64; q];
        upper.push(1.0);
        Ok(Self {
            q,
            domain: BoxDomain::new(vec![0.0; q + 1], upper)?,
        })
    }

    pub fn segments(&self) -> usize {
        self.q
    }

    pub fn params(&self, x: &[f64]) -> Result<ConvexShapeParams> {
        ConvexShapeParams::from_slice(x, self.q)
    }
}

impl DiagramMap for ConvexShapeMap {
    fn name(&self) -> String {
        format!("apw:{}", self.q)
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Point> {
        apw_eval(&self.params(x)?)
    }

    fn jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        apw_jacobian(&self.params(x)?)
    }

    /// Both ratios are maximised by the disk: `A/P² ≤ 1/(4π)`, `A²/W ≤ 2π`.
    fn image_bounds(&self) -> Option<BoundingBox> {
        BoundingBox::new(0.0, 100.0 / (4.0 * PI), 0.0, 2.0 * PI).ok()
    }
}
