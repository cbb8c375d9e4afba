//! The subspace-based approximate Hessian optimizer.
//!
//! Each step evaluates `f(x^k)`, then for every coordinate pair of the
//! current plan estimates a 2-D gradient (two queries), obtains a 2x2 Hessian,
//! repairs it to be positive definite and adds the lifted Newton direction to
//! the accumulated update `v`. The iterate moves along `-v` by Armijo
//! backtracking. Plans are redrawn every `period` steps, which also clears the
//! evaluation cache.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cache::{EvalCache, EvalRecord, RecordKind, DEFAULT_HESS_RADIUS};
use crate::estimator::{
    build_fit_system, estimate_gradient, fd_subspace_hessian, make_pd, solve_hessian, Probe, Sym2, DEFAULT_EPSILON,
    DEFAULT_GAMMA_FLOOR, DEFAULT_KAPPA,
};
use crate::linesearch::{armijo_search, ArmijoConfig};
use crate::optimizer::{StepReport, ZerothOrderOptimizer};
use crate::oracle::{CountedOracle, Objective};
use crate::subspace::SubspacePlan;
use crate::{Error, Result};

pub const DEFAULT_PERIOD: u64 = 20;

/// How each pair's Hessian is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HessianMode {
    /// Least-squares fit on cached and periodic fresh samples.
    #[default]
    Fitted,
    /// As `Fitted`, with the off-diagonal entry dropped before the repair.
    Diagonal,
    /// Coordinate second differences, three extra queries per pair per step.
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZosahConfig {
    /// Dimension of the intermediate subspace (even).
    pub m: usize,
    pub period: u64,
    pub epsilon: f64,
    pub kappa: f64,
    pub hess_radius: f64,
    pub gamma_floor: f64,
    pub line_search: ArmijoConfig,
    pub hessian: HessianMode,
}

/// `min(d, 20)` rounded down to even.
pub fn default_subspace_dim(d: usize) -> usize {
    let m = d.min(20);
    m - m % 2
}

impl ZosahConfig {
    pub fn for_dim(d: usize) -> Self {
        Self {
            m: default_subspace_dim(d),
            period: DEFAULT_PERIOD,
            epsilon: DEFAULT_EPSILON,
            kappa: DEFAULT_KAPPA,
            hess_radius: DEFAULT_HESS_RADIUS,
            gamma_floor: DEFAULT_GAMMA_FLOOR,
            line_search: ArmijoConfig::default(),
            hessian: HessianMode::Fitted,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.m < 2 || !self.m.is_multiple_of(2) || self.m > d {
            return Err(Error::param(format!(
                "m must be even with 2 <= m <= d (m = {}, d = {d})",
                self.m
            )));
        }
        if self.period == 0 {
            return Err(Error::param("switching period must be at least 1"));
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("kappa", self.kappa),
            ("hess_radius", self.hess_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be positive")));
            }
        }
        if !(self.gamma_floor >= 0.0) {
            return Err(Error::param("gamma_floor must be non-negative"));
        }
        self.line_search.validate()
    }
}

pub struct Zosah {
    cfg: ZosahConfig,
    oracle: CountedOracle,
    x: Vec<f64>,
    k: u64,
    plan: Option<SubspacePlan>,
    plans_drawn: u64,
    cache: EvalCache,
    rng: ChaCha8Rng,
    seed: u64,
}

impl Zosah {
    pub fn new(objective: Arc<dyn Objective>, x0: Vec<f64>, cfg: ZosahConfig, seed: u64) -> Result<Self> {
        Self::with_oracle(CountedOracle::new(objective), x0, cfg, seed)
    }

    pub fn with_oracle(oracle: CountedOracle, x0: Vec<f64>, cfg: ZosahConfig, seed: u64) -> Result<Self> {
        let d = oracle.dim();
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x0.len(),
            });
        }
        cfg.validate(d)?;
        Ok(Self {
            cfg,
            oracle,
            x: x0,
            k: 0,
            plan: None,
            plans_drawn: 0,
            cache: EvalCache::new(0, 0),
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        })
    }

    pub fn config(&self) -> &ZosahConfig {
        &self.cfg
    }

    pub fn plan(&self) -> Option<&SubspacePlan> {
        self.plan.as_ref()
    }

    pub fn oracle(&self) -> &CountedOracle {
        &self.oracle
    }

    pub fn iteration(&self) -> u64 {
        self.k
    }

    fn refresh_plan(&mut self) -> Result<bool> {
        if self.plan.is_some() && !self.k.is_multiple_of(self.cfg.period) {
            return Ok(false);
        }
        let id = self.plans_drawn;
        let plan = SubspacePlan::draw(self.x.len(), self.cfg.m, id, self.k, &mut self.rng)?;
        self.plans_drawn += 1;
        self.cache.reset(id, plan.pairs().len());
        self.plan = Some(plan);
        Ok(true)
    }
}

impl ZerothOrderOptimizer for Zosah {
    fn step(&mut self) -> Result<StepReport> {
        let new_plan = self.refresh_plan()?;
        let k = self.k;
        let cfg = self.cfg.clone();
        let plan = self.plan.clone().expect("plan drawn above");

        let f_x = self.oracle.evaluate(&self.x)?;
        if !f_x.is_finite() {
            return Err(Error::NonFinite("current iterate"));
        }

        let n_pairs = plan.pairs().len();
        let mut v = vec![0.0; self.x.len()];
        let mut hessian_queries = Vec::with_capacity(n_pairs);
        let mut descent_products = Vec::with_capacity(n_pairs);
        let mut fallback_pairs = 0;

        for (j, pair) in plan.pairs().iter().enumerate() {
            let grad = estimate_gradient(&mut self.oracle, &self.x, pair, cfg.epsilon, f_x)?;
            let theta = pair.project(&self.x)?;
            let mut records: Vec<EvalRecord> = grad
                .probes
                .iter()
                .map(|p| EvalRecord::new(k, plan.id(), *p, RecordKind::Probe))
                .collect();

            let before = self.oracle.count();
            let fitted = match cfg.hessian {
                HessianMode::FiniteDifference => {
                    Some(fd_subspace_hessian(&mut self.oracle, &self.x, pair, &grad, f_x)?)
                }
                HessianMode::Fitted | HessianMode::Diagonal => {
                    let set = self.cache.gather_samples(
                        k,
                        cfg.period,
                        j,
                        theta,
                        &mut self.rng,
                        cfg.hess_radius,
                        cfg.gamma_floor,
                    )?;
                    let mut samples = set.samples;
                    for offset in set.fresh {
                        let value = self.oracle.evaluate(&pair.lift(offset, &self.x)?)?;
                        if !value.is_finite() {
                            continue;
                        }
                        let point = [theta[0] + offset[0], theta[1] + offset[1]];
                        samples.push(([point[0] - theta[0], point[1] - theta[1]], value));
                        records.push(EvalRecord::new(k, plan.id(), Probe { point, value }, RecordKind::Fresh));
                    }
                    let fit = build_fit_system(&samples, grad.g, f_x)
                        .and_then(|sys| solve_hessian(&sys, cfg.gamma_floor, sys.default_ridge()));
                    match fit {
                        Ok(a) if cfg.hessian == HessianMode::Diagonal => Some(a.diagonal()),
                        Ok(a) => Some(a),
                        Err(Error::HessianUnavailable | Error::InsufficientSamples(_)) => None,
                        Err(e) => return Err(e),
                    }
                }
            };
            hessian_queries.push(self.oracle.count() - before);

            let hess = match fitted.filter(Sym2::is_finite) {
                Some(a) => make_pd(&a, cfg.kappa),
                None => {
                    fallback_pairs += 1;
                    make_pd(&Sym2::scaled_identity(cfg.kappa), cfg.kappa)
                }
            };
            let dir = hess.newton_direction(grad.g);
            descent_products.push(grad.g[0] * dir[0] + grad.g[1] * dir[1]);
            pair.lift_into(dir, &mut v)?;
            self.cache.record(k, j, &records)?;
        }

        let line_search = armijo_search(&mut self.oracle, &self.x, &v, f_x, &cfg.line_search)?;
        if let Some(x_new) = &line_search.x_new {
            self.x.clone_from(x_new);
        }
        self.k += 1;
        Ok(StepReport {
            step: k,
            base_queries: 1,
            gradient_queries: 2 * n_pairs as u64,
            hessian_queries,
            f_value: line_search.f_new,
            line_search,
            descent_products,
            fallback_pairs,
            new_plan,
            plan_id: Some(plan.id()),
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
