use super::restrict::{enforce_restriction, restrict_samples};
use super::{refine_delaunay, refine_spheres, RefineConfig, RefineMethod, RegionRestriction, Result, PENALTY_WEIGHTS};
use crate::cvt::{composed_energy_grad, lloyd_bs, variational_cvt_bs, LloydOptions, SampleSet};
use crate::geom2d::BoundingBox;
use crate::maps::{uniform_sample, DiagramMap};
use crate::optim::OptimOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// 0 for the initial optimisation, then one per refinement.
    pub round: usize,
    pub samples: usize,
    pub added: usize,
    /// Energy at the end of the round.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultigridRun {
    pub state: SampleSet,
    pub history: Vec<RoundRecord>,
}

pub(crate) fn variational_options(cfg: &RefineConfig) -> OptimOptions {
    OptimOptions::default().with_max_iters(cfg.q2).with_grad_tol(1e-9)
}

/// `q1` Lloyd iterations followed by `q2` quasi-Newton iterations on the
/// composed energy. The Lloyd result is discarded if it raised the energy.
///
/// Under a restriction, both stages carry the exterior penalty; the
/// quasi-Newton stage is repeated with a heavier weight while some image
/// is still outside the disk.
pub(crate) fn optimize_round(
    map: &dyn DiagramMap,
    state: SampleSet,
    cfg: &RefineConfig,
    restriction: Option<&RegionRestriction>,
) -> Result<SampleSet> {
    let before = composed_energy_grad(&state, map)?.0;
    let lloyd_opts = LloydOptions {
        max_iters: cfg.q1,
        eps: cfg.eps,
        penalty: restriction.map(|rr| rr.penalty(PENALTY_WEIGHTS[1])),
        ..LloydOptions::default()
    };
    let lloyd = lloyd_bs(map, state.clone(), &lloyd_opts)?;
    let mut state = if lloyd.energy <= before { lloyd.state } else { state };

    let opts = variational_options(cfg);
    match restriction {
        None => state = variational_cvt_bs(map, state, &opts, None)?.state,
        Some(rr) => {
            for weight in PENALTY_WEIGHTS {
                let penalty = rr.penalty(weight);
                state = variational_cvt_bs(map, state, &opts, Some(&penalty))?.state;
                if state.images.iter().all(|&y| rr.contains(y, 1e-3)) {
                    break;
                }
            }
        }
    }
    Ok(state)
}

/// Global multigrid refinement.
///
/// Draws `m0` seeded samples with images in `bbox`, optimises them, then
/// runs `cfg.n_ref` rounds of refinement followed by the same
/// optimisation. A round that adds no sample ends the loop.
pub fn multigrid(
    map: &dyn DiagramMap,
    m0: usize,
    bbox: BoundingBox,
    cfg: &RefineConfig,
    seed: u64,
    restriction: Option<&RegionRestriction>,
) -> Result<MultigridRun> {
    cfg.validate()?;
    if m0 < 3 {
        return Err(super::PipelineError::InvalidConfig(format!("need at least 3 initial samples, got {m0}")));
    }
    let mut state = match restriction {
        None => SampleSet::random(map, m0, bbox, seed)?,
        Some(rr) => {
            let samples: Vec<Vec<f64>> = (0..m0 as u64).map(|i| uniform_sample(map.domain(), seed, i)).collect();
            restrict_samples(map, samples, bbox, rr, seed)?
        }
    };

    let mut history = Vec::new();
    state = finish_round(map, state, cfg, restriction)?;
    history.push(record(map, &state, 0, 0)?);

    for round in 1..=cfg.n_ref {
        let before = state.len();
        let (refined, stats) = match cfg.method {
            RefineMethod::Spheres => refine_spheres(map, &state, cfg)?,
            RefineMethod::Delaunay => {
                let penalty = restriction.map(|rr| rr.penalty(PENALTY_WEIGHTS[1]));
                refine_delaunay(map, &state, &OptimOptions::default(), penalty.as_ref())?
            }
        };
        if stats.added == 0 {
            break;
        }
        state = finish_round(map, refined, cfg, restriction)?;
        history.push(record(map, &state, round, state.len().saturating_sub(before))?);
    }
    Ok(MultigridRun { state, history })
}

fn finish_round(
    map: &dyn DiagramMap,
    state: SampleSet,
    cfg: &RefineConfig,
    restriction: Option<&RegionRestriction>,
) -> Result<SampleSet> {
    let state = optimize_round(map, state, cfg, restriction)?;
    match restriction {
        Some(rr) => enforce_restriction(map, state, rr),
        None => Ok(state),
    }
}

fn record(map: &dyn DiagramMap, state: &SampleSet, round: usize, added: usize) -> Result<RoundRecord> {
    Ok(RoundRecord {
        round,
        samples: state.len(),
        added,
        energy: composed_energy_grad(state, map)?.0,
    })
}
