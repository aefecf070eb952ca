use std::collections::VecDeque;

use super::{OptimOptions, OptimResult, OptimStatus};
use crate::maps::BoxDomain;

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

struct Correction {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Variables pinned at a bound by a gradient pointing out of the box.
fn fixed_mask(x: &[f64], g: &[f64], bounds: &BoxDomain) -> Vec<bool> {
    x.iter()
        .zip(g)
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|((&xi, &gi), (&lo, &hi))| (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0))
        .collect()
}

/// L-BFGS two-loop recursion applied to the free part of `g`.
fn quasi_newton_direction(
    g: &[f64],
    fixed: &[bool],
    scale: &[f64],
    memory: &VecDeque<Correction>,
) -> Vec<f64> {
    let mut q: Vec<f64> = g
        .iter()
        .zip(fixed)
        .map(|(&gi, &f)| if f { 0.0 } else { gi })
        .collect();
    let mut alphas = Vec::with_capacity(memory.len());
    for c in memory.iter().rev() {
        let a = c.rho * dot(&c.s, &q);
        for (qi, yi) in q.iter_mut().zip(&c.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some(last) = memory.back() {
        let yhy: f64 = last.y.iter().zip(scale).map(|(y, d)| y * y * d).sum();
        let gamma = dot(&last.s, &last.y) / yhy;
        for (qi, d) in q.iter_mut().zip(scale) {
            *qi *= gamma * d;
        }
    }
    for (c, a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = c.rho * dot(&c.y, &q);
        for (qi, si) in q.iter_mut().zip(&c.s) {
            *qi += (a - b) * si;
        }
    }
    q.iter()
        .zip(fixed)
        .map(|(&qi, &f)| if f { 0.0 } else { -qi })
        .collect()
}

/// Minimises a smooth objective over a box with a projected limited-memory
/// BFGS method.
///
/// `objective(x, grad)` returns `f(x)` and writes `∇f(x)` into `grad`. A
/// non-finite return marks `x` as infeasible: trial points are rejected
/// and the step is shortened. Each iteration searches along the projected
/// path `P(x + α d)` with Armijo backtracking; when the quasi-Newton
/// direction fails the search, the history is dropped and a projected
/// steepest-descent step is tried before giving up. Accepted objective
/// values never increase.
pub fn minimize_box<F>(
    mut objective: F,
    bounds: &BoxDomain,
    x0: &[f64],
    opts: &OptimOptions,
) -> OptimResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    minimize_box_scaled(|x, g, _| objective(x, g), bounds, x0, opts)
}

/// [`minimize_box`] with a diagonal hint for the inverse Hessian.
///
/// `objective(x, grad, scale)` may also fill `scale` with positive
/// weights; the initial quasi-Newton matrix becomes `γ diag(scale)` instead
/// of `γ I`, and steepest-descent steps are scaled the same way. Weights
/// left untouched stay at one.
pub fn minimize_box_scaled<F>(
    mut objective: F,
    bounds: &BoxDomain,
    x0: &[f64],
    opts: &OptimOptions,
) -> OptimResult
where
    F: FnMut(&[f64], &mut [f64], &mut [f64]) -> f64,
{
    let n = bounds.dim();
    let mut x = bounds.clamped(x0);
    let mut g = vec![0.0; n];
    let mut scale = vec![1.0; n];
    let mut scale_trial = vec![1.0; n];
    let mut f = objective(&x, &mut g, &mut scale);
    let mut evals = 1;
    let mut trace = vec![f];
    let finish = |x: Vec<f64>, f: f64, status, iterations, evals, trace| OptimResult {
        x_star: x,
        f_star: f,
        status,
        iterations,
        evals,
        trace,
    };
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return finish(x, f, OptimStatus::StepFailure, 0, evals, trace);
    }

    let mut memory: VecDeque<Correction> = VecDeque::with_capacity(opts.memory);
    let mut x_trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];

    for iter in 0..opts.max_iters {
        let projected_grad = sup_norm(
            x.iter()
                .zip(&g)
                .zip(bounds.lower().iter().zip(bounds.upper()))
                .map(|((&xi, &gi), (&lo, &hi))| (xi - gi).clamp(lo, hi) - xi),
        );
        if projected_grad <= opts.grad_tol {
            return finish(x, f, OptimStatus::Converged, iter, evals, trace);
        }

        let fixed = fixed_mask(&x, &g, bounds);
        let mut steepest = memory.is_empty();
        let mut accepted = None;
        for _attempt in 0..2 {
            let d = if steepest {
                g.iter()
                    .zip(&fixed)
                    .zip(&scale)
                    .map(|((&gi, &f), &di)| if f { 0.0 } else { -gi * di })
                    .collect()
            } else {
                let d = quasi_newton_direction(&g, &fixed, &scale, &memory);
                if dot(&d, &g) < 0.0 {
                    d
                } else {
                    memory.clear();
                    steepest = true;
                    continue;
                }
            };
            let d_norm = sup_norm(d.iter().copied());
            if d_norm == 0.0 {
                break;
            }
            let mut alpha = if steepest { (1.0 / d_norm).min(1.0) } else { 1.0 };
            for _ in 0..MAX_BACKTRACKS {
                for i in 0..n {
                    x_trial[i] = (x[i] + alpha * d[i]).clamp(bounds.lower()[i], bounds.upper()[i]);
                }
                let decrease: f64 = (0..n).map(|i| g[i] * (x_trial[i] - x[i])).sum();
                if decrease >= 0.0 {
                    if x_trial == x {
                        break;
                    }
                    alpha *= 0.5;
                    continue;
                }
                scale_trial.iter_mut().for_each(|d| *d = 1.0);
                let f_trial = objective(&x_trial, &mut g_trial, &mut scale_trial);
                evals += 1;
                let finite = f_trial.is_finite() && g_trial.iter().all(|v| v.is_finite());
                if finite && f_trial <= f + ARMIJO_C1 * decrease {
                    accepted = Some(f_trial);
                    break;
                }
                alpha *= if finite { 0.5 } else { 0.25 };
            }
            if accepted.is_some() || steepest {
                break;
            }
            memory.clear();
            steepest = true;
        }

        let Some(f_new) = accepted else {
            let status = if projected_grad <= opts.grad_tol {
                OptimStatus::Converged
            } else {
                OptimStatus::StepFailure
            };
            return finish(x, f, status, iter, evals, trace);
        };

        let s: Vec<f64> = x_trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_trial.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if memory.len() == opts.memory.max(1) {
                memory.pop_front();
            }
            memory.push_back(Correction { s: s.clone(), y, rho: 1.0 / sy });
        }
        std::mem::swap(&mut x, &mut x_trial);
        std::mem::swap(&mut g, &mut g_trial);
        std::mem::swap(&mut scale, &mut scale_trial);
        f = f_new;
        trace.push(f);

        if sup_norm(s) <= opts.step_tol {
            return finish(x, f, OptimStatus::Converged, iter + 1, evals, trace);
        }
    }
    let iters = opts.max_iters;
    finish(x, f, OptimStatus::MaxIters, iters, evals, trace)
}
