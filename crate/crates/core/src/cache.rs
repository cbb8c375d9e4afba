//! Per-pair storage of recent evaluations for reuse as Hessian-fit samples.
//!
//! Within a switching period the pairs stay fixed, so the gradient probes of
//! the two previous steps lie in the same planes and can serve as fit samples.
//! Fresh samples are only drawn at the first step of a period.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use rand::Rng;

use crate::estimator::{gram_min_eigenvalue, Probe};
use crate::{Error, Result};

/// Fresh samples drawn at the start of a period.
pub const FRESH_SAMPLES: usize = 3;
/// Resampling attempts for a well-conditioned fresh batch.
pub const MAX_RESAMPLES: usize = 10;
pub const DEFAULT_HESS_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    /// Gradient probe `θ + ε e_i`.
    Probe,
    /// Random Hessian sample drawn at a period start.
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRecord {
    pub step: u64,
    pub plan_id: u64,
    /// Projection of the evaluated point onto the pair.
    pub point: [f64; 2],
    pub value: f64,
    pub kind: RecordKind,
}

impl EvalRecord {
    pub fn new(step: u64, plan_id: u64, probe: Probe, kind: RecordKind) -> Self {
        Self {
            step,
            plan_id,
            point: probe.point,
            value: probe.value,
            kind,
        }
    }
}

/// Fit samples for one pair at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// Cached `(θ̄, f)` with `θ̄` relative to the current point.
    pub samples: Vec<([f64; 2], f64)>,
    /// Offsets from the current point that still need evaluating.
    pub fresh: Vec<[f64; 2]>,
    /// Set when no fresh batch reached the conditioning floor.
    pub degraded: bool,
}

#[derive(Debug, Clone)]
pub struct EvalCache {
    plan_id: u64,
    pairs: Vec<VecDeque<EvalRecord>>,
}

impl EvalCache {
    pub fn new(plan_id: u64, n_pairs: usize) -> Self {
        Self {
            plan_id,
            pairs: vec![VecDeque::new(); n_pairs],
        }
    }

    /// Drops everything and starts serving a new plan.
    pub fn reset(&mut self, plan_id: u64, n_pairs: usize) {
        self.plan_id = plan_id;
        self.pairs.clear();
        self.pairs.resize(n_pairs, VecDeque::new());
    }

    pub fn plan_id(&self) -> u64 {
        self.plan_id
    }

    pub fn len(&self, pair: usize) -> usize {
        self.pairs.get(pair).map_or(0, VecDeque::len)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.iter().all(VecDeque::is_empty)
    }

    /// Stores the records of step `k` and evicts those older than `k - 2`.
    pub fn record(&mut self, k: u64, pair: usize, records: &[EvalRecord]) -> Result<()> {
        if let Some(bad) = records.iter().find(|r| r.plan_id != self.plan_id) {
            return Err(Error::PlanMismatch {
                cache: self.plan_id,
                records: bad.plan_id,
            });
        }
        if records.iter().any(|r| !r.value.is_finite()) {
            return Err(Error::NonFinite("cached record"));
        }
        let n_pairs = self.pairs.len();
        let slot = self.pairs.get_mut(pair).ok_or(Error::IndexOutOfRange {
            index: pair,
            dim: n_pairs,
        })?;
        slot.extend(records.iter().copied());
        while slot.front().is_some_and(|r| r.step + 2 < k) {
            slot.pop_front();
        }
        Ok(())
    }

    /// Records stored for `pair` at step `step`.
    pub fn records_at(&self, pair: usize, step: u64) -> impl Iterator<Item = &EvalRecord> + '_ {
        self.pairs
            .get(pair)
            .into_iter()
            .flatten()
            .filter(move |r| r.step == step && r.plan_id == self.plan_id)
    }

    /// Assembles the fit samples for `pair` at step `k`.
    ///
    /// * `k mod T = 0`: no reuse; three fresh offsets on the circle of
    ///   `radius`, redrawn until `ΦᵀΦ` is conditioned above `gamma_floor`.
    /// * `k mod T = 1`: the probes and fresh samples of step `k - 1`.
    /// * otherwise: the gradient probes of steps `k - 2` and `k - 1`.
    #[allow(clippy::too_many_arguments)]
    pub fn gather_samples<R: Rng + ?Sized>(
        &self,
        k: u64,
        period: u64,
        pair: usize,
        theta: [f64; 2],
        rng: &mut R,
        radius: f64,
        gamma_floor: f64,
    ) -> Result<SampleSet> {
        if period == 0 {
            return Err(Error::param("switching period must be at least 1"));
        }
        let phase = k % period;
        if phase == 0 {
            let (fresh, degraded) = fresh_offsets(rng, radius, gamma_floor);
            return Ok(SampleSet {
                samples: Vec::new(),
                fresh,
                degraded,
            });
        }
        let recenter = |r: &EvalRecord| ([r.point[0] - theta[0], r.point[1] - theta[1]], r.value);
        let samples: Vec<_> = if phase == 1 {
            self.records_at(pair, k - 1).map(recenter).collect()
        } else {
            self.records_at(pair, k - 2)
                .chain(self.records_at(pair, k - 1))
                .filter(|r| r.kind == RecordKind::Probe)
                .map(recenter)
                .collect()
        };
        Ok(SampleSet {
            samples,
            fresh: Vec::new(),
            degraded: false,
        })
    }
}

fn fresh_offsets<R: Rng + ?Sized>(rng: &mut R, radius: f64, gamma_floor: f64) -> (Vec<[f64; 2]>, bool) {
    let mut best: Option<(f64, Vec<[f64; 2]>)> = None;
    for _ in 0..MAX_RESAMPLES {
        let batch: Vec<[f64; 2]> = (0..FRESH_SAMPLES)
            .map(|_| {
                let (s, c) = (rng.random::<f64>() * TAU).sin_cos();
                [radius * c, radius * s]
            })
            .collect();
        let score = gram_min_eigenvalue(&batch);
        if score >= gamma_floor {
            return (batch, false);
        }
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, batch));
        }
    }
    (best.map(|(_, b)| b).unwrap_or_default(), true)
}
