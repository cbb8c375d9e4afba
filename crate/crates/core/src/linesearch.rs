//! Backtracking line search with the Armijo sufficient-decrease test
//! `f(x - ρv) <= f(x) - c1 ρ ‖v‖²`. Shared by every optimizer in the crate.

use crate::oracle::CountedOracle;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoConfig {
    pub initial_step: f64,
    pub c1: f64,
    pub shrink: f64,
    pub min_step: f64,
}

impl Default for ArmijoConfig {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            c1: 1e-4,
            shrink: 0.5,
            min_step: 1e-6,
        }
    }
}

impl ArmijoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step > 0.0 && self.min_step > 0.0) {
            return Err(Error::param("line-search step sizes must be positive"));
        }
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return Err(Error::param("Armijo constant must lie in (0, 1)"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::param("shrink factor must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Trials spent when no step is ever accepted.
    pub fn max_trials(&self) -> u64 {
        let mut rho = self.initial_step;
        let mut n = 1;
        while rho >= self.min_step {
            rho *= self.shrink;
            n += 1;
        }
        n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    /// Accepted step, or the last step tried when rejected.
    pub step: f64,
    pub accepted: bool,
    /// `f` at the new iterate; `f(x)` when rejected.
    pub f_new: f64,
    pub x_new: Option<Vec<f64>>,
    pub trials: u64,
}

/// Tries `ρ = ρ0, ρ0·s, ρ0·s², …` along `-v`. The search gives up after
/// evaluating the first step below `min_step`. Non-finite trial values count
/// as failures.
pub fn armijo_search(
    oracle: &mut CountedOracle,
    x: &[f64],
    v: &[f64],
    f_x: f64,
    cfg: &ArmijoConfig,
) -> Result<LineSearchOutcome> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    let v_sq: f64 = v.iter().map(|vi| vi * vi).sum();
    if v_sq == 0.0 {
        return Ok(LineSearchOutcome {
            step: 0.0,
            accepted: false,
            f_new: f_x,
            x_new: None,
            trials: 0,
        });
    }
    let mut rho = cfg.initial_step;
    let mut trials = 0;
    let mut trial = vec![0.0; x.len()];
    loop {
        for ((t, xi), vi) in trial.iter_mut().zip(x).zip(v) {
            *t = xi - rho * vi;
        }
        let f_trial = oracle.evaluate(&trial)?;
        trials += 1;
        if f_trial.is_finite() && f_trial <= f_x - cfg.c1 * rho * v_sq {
            return Ok(LineSearchOutcome {
                step: rho,
                accepted: true,
                f_new: f_trial,
                x_new: Some(trial),
                trials,
            });
        }
        if rho < cfg.min_step {
            return Ok(LineSearchOutcome {
                step: rho,
                accepted: false,
                f_new: f_x,
                x_new: None,
                trials,
            });
        }
        rho *= cfg.shrink;
    }
}
