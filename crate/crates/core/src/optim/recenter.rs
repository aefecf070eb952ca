use super::inverse::residual;
use super::{inverse_sample, minimize_box, OptimOptions};
use crate::maps::{DiagramMap, Jacobian};

/// Smallest singular value of the Jacobian below which a sample is left
/// where it is.
pub const RANK_THRESHOLD: f64 = 1e-3;

const PENALTIES: [f64; 3] = [1e2, 1e4, 1e6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecenterStatus {
    Recentered,
    /// The Jacobian at the start point is numerically rank deficient (or the
    /// map failed there).
    Skipped,
    /// The image could not be restored, or the sample did not move inward.
    NoProgress,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecenterResult {
    pub x_star: Vec<f64>,
    pub status: RecenterStatus,
    /// `‖F(x*) − F(x0)‖`.
    pub image_error: f64,
}

/// `(Σ |tᵢ|^p)^{1/p}` and its gradient.
fn p_norm(t: &[f64], p: i32, grad: &mut [f64]) -> f64 {
    let sum: f64 = t.iter().map(|v| v.abs().powi(p)).sum();
    if sum == 0.0 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        return 0.0;
    }
    let norm = sum.powf(1.0 / p as f64);
    let scale = norm / sum;
    for (g, v) in grad.iter_mut().zip(t) {
        *g = scale * v.abs().powi(p - 1) * v.signum();
    }
    norm
}

fn sup_distance(x: &[f64], center: &[f64]) -> f64 {
    x.iter().zip(center).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Moves `x0` along its fiber `{F(x) = F(x0)}` towards the centre of the
/// parameter box.
///
/// Minimises the `p`-norm of `x − center` plus a quadratic penalty on
/// `‖F(x) − F(x0)‖²` whose weight is raised through 10², 10⁴, 10⁶, then
/// polishes the image with an inverse-sample solve. The result is accepted
/// only if the image moved by at most `10⁻⁶ (1 + ‖F(x0)‖)` and the sup
/// distance to the centre did not grow; otherwise `x0` comes back.
pub fn recenter(map: &dyn DiagramMap, x0: &[f64], p: u32, opts: &OptimOptions) -> RecenterResult {
    let x0 = map.domain().clamped(x0);
    let keep = |status| RecenterResult { x_star: x0.clone(), status, image_error: 0.0 };
    let Ok((y0, jac)) = map.evaluate_with_jacobian(&x0) else {
        return keep(RecenterStatus::Skipped);
    };
    if jac.smallest_singular_value() <= RANK_THRESHOLD {
        return keep(RecenterStatus::Skipped);
    }
    let center = map.domain().center();
    let p = p.max(1) as i32;
    let start_distance = sup_distance(&x0, &center);
    let tolerance = 1e-6 * (1.0 + y0.norm());

    let descend = |start: &[f64]| -> Option<(Vec<f64>, f64, f64)> {
        let mut x = start.to_vec();
        let mut t = vec![0.0; x.len()];
        let mut norm_grad = vec![0.0; x.len()];
        for &penalty in &PENALTIES {
            let objective = |x: &[f64], grad: &mut [f64]| -> f64 {
                let Ok((y, jac)) = map.evaluate_with_jacobian(x) else {
                    return f64::NAN;
                };
                for ((ti, xi), ci) in t.iter_mut().zip(x).zip(&center) {
                    *ti = xi - ci;
                }
                let norm = p_norm(&t, p, &mut norm_grad);
                let r = y - y0;
                jac.transpose_apply_into(r * (2.0 * penalty), grad);
                for (g, n) in grad.iter_mut().zip(&norm_grad) {
                    *g += n;
                }
                norm + penalty * r.norm_squared()
            };
            x = minimize_box(objective, map.domain(), &x, opts).x_star;
        }
        x = inverse_sample(map, y0, &x, opts).x_star;
        let image_error = residual(map, &x, y0);
        let distance = sup_distance(&x, &center);
        (image_error <= tolerance && distance <= start_distance + 1e-8).then_some((x, distance, image_error))
    };

    let mut best = descend(&x0);
    if best.as_ref().is_none_or(|b| b.1 >= start_distance - 1e-9) {
        // x0 may be a stationary point of the penalised problem (typically a
        // box corner); restart from small steps both ways along the fiber's tangent.
        let step = 0.05
            * map
                .domain()
                .lower()
                .iter()
                .zip(map.domain().upper())
                .map(|(a, b)| 0.5 * (b - a))
                .fold(f64::INFINITY, f64::min);
        for v in tangent_directions(&jac, 2) {
            for sign in [1.0, -1.0] {
                let start: Vec<f64> = x0.iter().zip(&v).map(|(a, b)| a + sign * step * b).collect();
                if let Some(c) = descend(&map.domain().clamped(&start)) {
                    if best.as_ref().is_none_or(|b| c.1 < b.1) {
                        best = Some(c);
                    }
                }
            }
        }
    }
    match best {
        Some((x_star, _, image_error)) => RecenterResult { x_star, status: RecenterStatus::Recentered, image_error },
        None => keep(RecenterStatus::NoProgress),
    }
}

/// Up to `count` unit vectors in the kernel of `jac`, obtained by
/// projecting the coordinate axes and keeping the longest projections.
fn tangent_directions(jac: &Jacobian, count: usize) -> Vec<Vec<f64>> {
    let Some(pinv) = jac.right_inverse(RANK_THRESHOLD) else {
        return Vec::new();
    };
    let n = jac.ncols();
    let mut dirs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let (j0, j1) = (jac.rows[0][k], jac.rows[1][k]);
            let mut v: Vec<f64> = (0..n).map(|i| -(pinv[(i, 0)] * j0 + pinv[(i, 1)] * j1)).collect();
            v[k] += 1.0;
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= len.max(f64::MIN_POSITIVE));
            (len, v)
        })
        .filter(|(len, _)| *len > 0.1)
        .collect();
    dirs.sort_by(|a, b| b.0.total_cmp(&a.0));
    dirs.into_iter().take(count).map(|(_, v)| v).collect()
}
