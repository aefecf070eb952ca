use super::energy::{composed_flat, energy_with_seed, EnergyReport};
use super::{Result, SampleSet};
use crate::maps::DiagramMap;
use crate::optim::{minimize_box_scaled, BallPenalty, OptimOptions, OptimStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalRun {
    pub state: SampleSet,
    pub report: EnergyReport,
    /// `H` at the start point.
    pub initial_energy: f64,
    /// Objective after every accepted step.
    pub trace: Vec<f64>,
    pub status: OptimStatus,
    pub iterations: usize,
    pub evals: usize,
}

impl VariationalRun {
    pub fn energy(&self) -> f64 {
        self.report.energy
    }
}

/// Minimises `H(x₁, …, x_M) = G(F(x₁), …, F(x_M))` over all samples at once
/// with a quasi-Newton method preconditioned by the inverse cell areas.
///
/// Configurations with an image outside the region, or where the map fails,
/// are infeasible for the line search. With a `penalty`, the objective is
/// `H + Σᵢ penalty(F(xᵢ))` and the report still holds the plain energy.
pub fn variational_cvt_bs(
    map: &dyn DiagramMap,
    state: SampleSet,
    opts: &OptimOptions,
    penalty: Option<&BallPenalty>,
) -> Result<VariationalRun> {
    let n = map.dim();
    let (bbox, seed) = (state.bbox, state.seed);
    let x0 = state.samples.concat();
    let bounds = map.domain().repeated(state.len());
    let (initial_energy, _, _) = composed_flat(map, &x0, &bbox, seed)?;

    let objective = |x: &[f64], grad: &mut [f64], scale: &mut [f64]| -> f64 {
        let Ok((h, g, (report, images))) = composed_flat(map, x, &bbox, seed) else {
            return f64::NAN;
        };
        grad.copy_from_slice(&g);
        // the Hessian block of sample i scales with its cell area
        for (block, cell) in scale.chunks_mut(n).zip(&report.cells) {
            block.fill(1.0 / cell.area.max(1e-300));
        }
        let Some(p) = penalty else {
            return h;
        };
        let mut total = h;
        for (block, (&y, x)) in grad.chunks_mut(n).zip(images.iter().zip(x.chunks(n))) {
            let w = p.gradient(y);
            if w.x != 0.0 || w.y != 0.0 {
                let Ok(jac) = map.jacobian(x) else {
                    return f64::NAN;
                };
                for (b, extra) in block.iter_mut().zip(jac.transpose_apply(w)) {
                    *b += extra;
                }
            }
            total += p.value(y);
        }
        total
    };
    let result = minimize_box_scaled(objective, &bounds, &x0, opts);

    let samples: Vec<Vec<f64>> = result.x_star.chunks(n).map(<[f64]>::to_vec).collect();
    let state = SampleSet::new(map, samples, bbox, seed)?;
    let (report, _) = energy_with_seed(&state.images, &bbox, seed)?;
    Ok(VariationalRun {
        state,
        report,
        initial_energy,
        trace: result.trace,
        status: result.status,
        iterations: result.iterations,
        evals: result.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::BoundingBox;
    use crate::maps::TraceDet;

    #[test]
    fn single_sample_reaches_the_centroid() {
        let map = TraceDet::new(2).unwrap();
        let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let state = SampleSet::new(&map, vec![vec![0.7, 0.2, -0.4]], bbox, 0).unwrap();
        let run = variational_cvt_bs(&map, state, &OptimOptions::default(), None).unwrap();
        assert!(run.state.images[0].norm() < 1e-4, "{:?}", run.state.images);
        assert!(run.energy() <= run.initial_energy);
    }

    #[test]
    fn energy_never_goes_up() {
        let map = TraceDet::new(2).unwrap();
        let bbox = BoundingBox::new(-2.5, 2.5, -2.5, 2.5).unwrap();
        let state = SampleSet::random(&map, 30, bbox, 11).unwrap();
        let opts = OptimOptions::default().with_max_iters(40);
        let run = variational_cvt_bs(&map, state, &opts, None).unwrap();
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(run.energy() <= run.initial_energy);
        assert!(run.state.cache_error(&map) < 1e-12);
    }
}
