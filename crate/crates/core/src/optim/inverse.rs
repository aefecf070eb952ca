use super::{minimize_box, OptimOptions, OptimResult, OptimStatus};
use crate::geom2d::Point;
use crate::maps::DiagramMap;

/// Smooth exterior penalty `weight · max(0, ‖y − center‖² − radius²)²` on an
/// image point `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPenalty {
    pub center: Point,
    pub radius: f64,
    pub weight: f64,
}

impl BallPenalty {
    pub fn value(&self, y: Point) -> f64 {
        let excess = ((y - self.center).norm_squared() - self.radius * self.radius).max(0.0);
        self.weight * excess * excess
    }

    /// Gradient with respect to `y`.
    pub fn gradient(&self, y: Point) -> Point {
        let r = y - self.center;
        let excess = (r.norm_squared() - self.radius * self.radius).max(0.0);
        r * (4.0 * self.weight * excess)
    }

    pub fn with_weight(self, weight: f64) -> Self {
        Self { weight, ..self }
    }
}

/// Finds parameters whose image is as close as possible to `c`, starting
/// from `x0`.
///
/// Minimises `½‖F(x) − c‖²` over the map's domain. Points where the map
/// fails count as infeasible.
pub fn inverse_sample(map: &dyn DiagramMap, c: Point, x0: &[f64], opts: &OptimOptions) -> OptimResult {
    inverse_sample_with(map, c, x0, opts, None)
}

/// [`inverse_sample`] with an optional penalty keeping the image in a ball.
pub fn inverse_sample_with(
    map: &dyn DiagramMap,
    c: Point,
    x0: &[f64],
    opts: &OptimOptions,
    penalty: Option<&BallPenalty>,
) -> OptimResult {
    let objective = |x: &[f64], grad: &mut [f64]| -> f64 {
        let Ok((y, jac)) = map.evaluate_with_jacobian(x) else {
            return f64::NAN;
        };
        let r = y - c;
        let mut f = 0.5 * r.norm_squared();
        let mut w = r;
        if let Some(p) = penalty {
            f += p.value(y);
            w += p.gradient(y);
        }
        jac.transpose_apply_into(w, grad);
        f
    };
    let result = minimize_box(objective, map.domain(), x0, opts);
    if result.status == OptimStatus::StepFailure && result.iterations == 0 && !result.f_star.is_finite() {
        // map failed at the start point
        return OptimResult { x_star: map.domain().clamped(x0), ..result };
    }
    result
}

/// Residual `‖F(x) − c‖`, or infinity where the map fails.
pub(crate) fn residual(map: &dyn DiagramMap, x: &[f64], c: Point) -> f64 {
    map.evaluate(x).map_or(f64::INFINITY, |y| y.distance(c))
}
