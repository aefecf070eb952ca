//! Box-constrained smooth minimisation and the two map-inversion problems
//! built on it.

mod inverse;
mod lbfgsb;
mod recenter;

pub use inverse::{inverse_sample, inverse_sample_with, BallPenalty};
pub use lbfgsb::{minimize_box, minimize_box_scaled};
pub use recenter::{recenter, RecenterResult, RecenterStatus};

/// Stopping rules and history length for [`minimize_box`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions {
    pub max_iters: usize,
    /// Sup-norm of the projected gradient `x - P(x - g)`.
    pub grad_tol: f64,
    /// Sup-norm of an accepted step.
    pub step_tol: f64,
    /// Number of correction pairs kept by the quasi-Newton update.
    pub memory: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            grad_tol: 1e-10,
            step_tol: 1e-14,
            memory: 10,
        }
    }
}

impl OptimOptions {
    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_grad_tol(mut self, grad_tol: f64) -> Self {
        self.grad_tol = grad_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimStatus {
    Converged,
    MaxIters,
    /// No acceptable step could be found, or the objective stopped being
    /// finite; the result holds the last good iterate.
    StepFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    pub status: OptimStatus,
    pub iterations: usize,
    pub evals: usize,
    /// Objective at the start point and after every accepted step.
    pub trace: Vec<f64>,
}
