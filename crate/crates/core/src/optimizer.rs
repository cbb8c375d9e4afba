//! The step-by-step driver shared by all algorithms.

use crate::linesearch::LineSearchOutcome;
use crate::trace::{Trace, TraceRow};
use crate::{Error, Result};

/// Query accounting for one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: u64,
    /// 1: the evaluation of `f(x^k)`.
    pub base_queries: u64,
    pub gradient_queries: u64,
    /// Hessian sampling cost per pair (empty for first-order methods).
    pub hessian_queries: Vec<u64>,
    pub line_search: LineSearchOutcome,
    /// `ĝᵀĀ⁻¹ĝ` per pair (empty for first-order methods).
    pub descent_products: Vec<f64>,
    /// Pairs whose fit failed and fell back to `κ I`.
    pub fallback_pairs: usize,
    pub new_plan: bool,
    pub plan_id: Option<u64>,
    /// Accepted objective value after the step.
    pub f_value: f64,
}

impl StepReport {
    pub fn total_queries(&self) -> u64 {
        self.base_queries + self.gradient_queries + self.hessian_queries.iter().sum::<u64>() + self.line_search.trials
    }
}

pub trait ZerothOrderOptimizer {
    /// One outer iteration, including its line search.
    fn step(&mut self) -> Result<StepReport>;

    /// Evaluates the current iterate through the meter.
    fn evaluate_current(&mut self) -> Result<f64>;

    fn evals(&self) -> u64;

    fn x(&self) -> &[f64];

    fn seed(&self) -> u64;
}

/// Runs until at least `max_evals` evaluations are spent.
///
/// The first row is the starting point (one evaluation). Each completed step
/// appends `(k + 1, evals, f(x^{k+1}))`. A step cut off by a hard oracle limit
/// ends the run without a row.
pub fn run<O: ZerothOrderOptimizer>(mut opt: O, max_evals: u64) -> Result<Trace> {
    run_with(&mut opt, max_evals, |_| {})
}

pub fn run_with<O, F>(opt: &mut O, max_evals: u64, mut on_step: F) -> Result<Trace>
where
    O: ZerothOrderOptimizer + ?Sized,
    F: FnMut(&StepReport),
{
    let seed = opt.seed();
    let mut trace = Trace::new();
    let f0 = match opt.evaluate_current() {
        Ok(f) => f,
        Err(Error::BudgetExhausted(_)) => return Ok(trace),
        Err(e) => return Err(e),
    };
    trace.push(TraceRow {
        seed,
        step: 0,
        cum_evals: opt.evals(),
        f_value: f0,
    });
    let mut k = 0;
    while opt.evals() < max_evals {
        let report = match opt.step() {
            Ok(r) => r,
            Err(Error::BudgetExhausted(_)) => break,
            Err(e) => return Err(e),
        };
        on_step(&report);
        k += 1;
        trace.push(TraceRow {
            seed,
            step: k,
            cum_evals: opt.evals(),
            f_value: report.f_value,
        });
    }
    Ok(trace)
}
