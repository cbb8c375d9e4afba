//! Randomized-gradient reference methods: RSPG, ZO-signSGD and ZO-AdaMM.
//!
//! All three estimate the gradient with Gaussian forward differences and move
//! through the same Armijo search as [`crate::zosah::Zosah`], so their query
//! counts are directly comparable.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linesearch::{armijo_search, ArmijoConfig};
use crate::optimizer::{StepReport, ZerothOrderOptimizer};
use crate::oracle::{CountedOracle, Objective};
use crate::zosah::{HessianMode, ZosahConfig};
use crate::{Error, Result};

/// Largest dimension accepted by [`fd_full_hessian`].
pub const FD_FULL_HESSIAN_MAX_DIM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Rspg,
    SignSgd,
    Adamm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// Random directions per gradient estimate.
    pub q: usize,
    pub epsilon: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta: f64,
    pub line_search: ArmijoConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            q: 10,
            epsilon: 1e-3,
            beta1: 0.9,
            beta2: 0.5,
            delta: 1e-8,
            line_search: ArmijoConfig::default(),
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::param("q must be at least 1"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::param("epsilon must be positive"));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::param(format!("{name} must lie in (0, 1)")));
            }
        }
        if !(self.delta > 0.0) {
            return Err(Error::param("delta must be positive"));
        }
        self.line_search.validate()
    }
}

/// Averaged forward differences along the given directions. Costs one query
/// per direction; `f_x` must already be known.
pub fn rge_with_directions(
    oracle: &mut CountedOracle,
    x: &[f64],
    f_x: f64,
    directions: &[Vec<f64>],
    epsilon: f64,
) -> Result<Vec<f64>> {
    let d = x.len();
    let mut g = vec![0.0; d];
    let mut probe = vec![0.0; d];
    for u in directions {
        if u.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.len(),
            });
        }
        for ((p, xi), ui) in probe.iter_mut().zip(x).zip(u) {
            *p = xi + epsilon * ui;
        }
        let f_u = oracle.evaluate(&probe)?;
        if !f_u.is_finite() {
            return Err(Error::NonFinite("random probe"));
        }
        let slope = (f_u - f_x) / epsilon;
        for (gi, ui) in g.iter_mut().zip(u) {
            *gi += slope * ui;
        }
    }
    let n = directions.len() as f64;
    g.iter_mut().for_each(|gi| *gi /= n);
    Ok(g)
}

fn gaussian_directions<R: Rng + ?Sized>(d: usize, q: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..q)
        .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

/// Randomized gradient estimate with `q` Gaussian directions.
///
/// Evaluates `f(x)` as well, so the cost is `q + 1`; returns the estimate and
/// `f(x)`.
pub fn rge_gradient<R: Rng + ?Sized>(
    oracle: &mut CountedOracle,
    x: &[f64],
    q: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, f64)> {
    let f_x = oracle.evaluate(x)?;
    if !f_x.is_finite() {
        return Err(Error::NonFinite("current iterate"));
    }
    let dirs = gaussian_directions(x.len(), q, rng);
    Ok((rge_with_directions(oracle, x, f_x, &dirs, epsilon)?, f_x))
}

/// Componentwise sign, with zero kept at zero.
pub fn sign_direction(g: &[f64]) -> Vec<f64> {
    g.iter().map(|&gi| if gi == 0.0 { 0.0 } else { gi.signum() }).collect()
}

/// Moment state of ZO-AdaMM.
#[derive(Debug, Clone, PartialEq)]
pub struct AdammState {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Running maximum of `second`.
    pub second_max: Vec<f64>,
}

impl AdammState {
    pub fn new(d: usize) -> Self {
        Self {
            first: vec![0.0; d],
            second: vec![0.0; d],
            second_max: vec![0.0; d],
        }
    }

    /// Folds in `g` and returns `m / (sqrt(v̂) + δ)`.
    pub fn update(&mut self, g: &[f64], beta1: f64, beta2: f64, delta: f64) -> Vec<f64> {
        let mut dir = vec![0.0; g.len()];
        for (i, &gi) in g.iter().enumerate() {
            self.first[i] = beta1 * self.first[i] + (1.0 - beta1) * gi;
            self.second[i] = beta2 * self.second[i] + (1.0 - beta2) * gi * gi;
            self.second_max[i] = self.second_max[i].max(self.second[i]);
            dir[i] = self.first[i] / (self.second_max[i].sqrt() + delta);
        }
        dir
    }
}

pub struct Baseline {
    kind: BaselineKind,
    cfg: BaselineConfig,
    oracle: CountedOracle,
    x: Vec<f64>,
    rng: ChaCha8Rng,
    seed: u64,
    k: u64,
    adamm: AdammState,
}

impl Baseline {
    pub fn new(
        kind: BaselineKind,
        objective: Arc<dyn Objective>,
        x0: Vec<f64>,
        cfg: BaselineConfig,
        seed: u64,
    ) -> Result<Self> {
        Self::with_oracle(kind, CountedOracle::new(objective), x0, cfg, seed)
    }

    pub fn with_oracle(
        kind: BaselineKind,
        oracle: CountedOracle,
        x0: Vec<f64>,
        cfg: BaselineConfig,
        seed: u64,
    ) -> Result<Self> {
        if x0.len() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                got: x0.len(),
            });
        }
        cfg.validate()?;
        let d = x0.len();
        Ok(Self {
            kind,
            cfg,
            oracle,
            x: x0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            k: 0,
            adamm: AdammState::new(d),
        })
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn adamm_state(&self) -> &AdammState {
        &self.adamm
    }
}

impl ZerothOrderOptimizer for Baseline {
    fn step(&mut self) -> Result<StepReport> {
        let (g, f_x) = rge_gradient(&mut self.oracle, &self.x, self.cfg.q, self.cfg.epsilon, &mut self.rng)?;
        let dir = match self.kind {
            BaselineKind::Rspg => g,
            BaselineKind::SignSgd => sign_direction(&g),
            // momentum advances every step, accepted or not
            BaselineKind::Adamm => self.adamm.update(&g, self.cfg.beta1, self.cfg.beta2, self.cfg.delta),
        };
        let line_search = armijo_search(&mut self.oracle, &self.x, &dir, f_x, &self.cfg.line_search)?;
        if let Some(x_new) = &line_search.x_new {
            self.x.clone_from(x_new);
        }
        let step = self.k;
        self.k += 1;
        Ok(StepReport {
            step,
            base_queries: 1,
            gradient_queries: self.cfg.q as u64,
            hessian_queries: Vec::new(),
            f_value: line_search.f_new,
            line_search,
            descent_products: Vec::new(),
            fallback_pairs: 0,
            new_plan: false,
            plan_id: None,
        })
    }

    fn evaluate_current(&mut self) -> Result<f64> {
        self.oracle.evaluate(&self.x)
    }

    fn evals(&self) -> u64 {
        self.oracle.count()
    }

    fn x(&self) -> &[f64] {
        &self.x
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

/// Randomized rank-one Hessian estimate plus `λ I` along given directions.
/// Costs `1 + 2 * directions.len()` queries.
pub fn fd_full_hessian_with_directions(
    oracle: &mut CountedOracle,
    x: &[f64],
    directions: &[Vec<f64>],
    epsilon: f64,
    lambda_reg: f64,
) -> Result<DMatrix<f64>> {
    let d = x.len();
    if d > FD_FULL_HESSIAN_MAX_DIM {
        return Err(Error::param(format!(
            "full finite-difference Hessian limited to d <= {FD_FULL_HESSIAN_MAX_DIM}"
        )));
    }
    if directions.is_empty() {
        return Err(Error::param("need at least one direction"));
    }
    let f_x = oracle.evaluate(x)?;
    let mut h = DMatrix::<f64>::zeros(d, d);
    for u in directions {
        if u.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.len(),
            });
        }
        let u = DVector::from_column_slice(u);
        let xv = DVector::from_column_slice(x);
        let plus = oracle.evaluate((&xv + &u * epsilon).as_slice())?;
        let minus = oracle.evaluate((&xv - &u * epsilon).as_slice())?;
        let curvature = (plus + minus - 2.0 * f_x) / (2.0 * epsilon * epsilon);
        h += &u * u.transpose() * curvature;
    }
    h /= directions.len() as f64;
    // exact symmetry
    let h = (&h + h.transpose()) * 0.5;
    Ok(h + DMatrix::identity(d, d) * lambda_reg)
}

pub fn fd_full_hessian<R: Rng + ?Sized>(
    oracle: &mut CountedOracle,
    x: &[f64],
    q: usize,
    epsilon: f64,
    lambda_reg: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if x.len() > FD_FULL_HESSIAN_MAX_DIM {
        return Err(Error::param(format!(
            "full finite-difference Hessian limited to d <= {FD_FULL_HESSIAN_MAX_DIM}"
        )));
    }
    let dirs = gaussian_directions(x.len(), q, rng);
    fd_full_hessian_with_directions(oracle, x, &dirs, epsilon, lambda_reg)
}

/// The ablation that keeps only the diagonal of each fitted subspace Hessian.
pub fn diag_hessian_variant(mut cfg: ZosahConfig) -> ZosahConfig {
    cfg.hessian = HessianMode::Diagonal;
    cfg
}
