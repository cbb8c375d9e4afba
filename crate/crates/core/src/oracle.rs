//! Black-box objectives and the evaluation meter.
//!
//! Every algorithm in this crate reaches its objective through a
//! [`CountedOracle`]; the number of evaluations it reports is the cost unit
//! all comparisons are made in.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::estimator::Sym2;
use crate::{Error, Result};

/// A deterministic scalar function of a fixed-dimension real vector.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Callers guarantee `x.len() == self.dim()`.
    fn value(&self, x: &[f64]) -> f64;
}

/// Wraps an objective and counts evaluations.
///
/// One oracle belongs to one optimizer run. The count is never reset.
#[derive(Clone)]
pub struct CountedOracle {
    inner: Arc<dyn Objective>,
    count: u64,
    limit: Option<u64>,
}

impl CountedOracle {
    pub fn new(inner: Arc<dyn Objective>) -> Self {
        Self {
            inner,
            count: 0,
            limit: None,
        }
    }

    /// Refuse evaluations once `limit` have been spent.
    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let d = self.inner.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        if let Some(limit) = self.limit {
            if self.count >= limit {
                return Err(Error::BudgetExhausted(limit));
            }
        }
        self.count += 1;
        Ok(self.inner.value(x))
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.inner
    }
}

impl fmt::Debug for CountedOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountedOracle")
            .field("dim", &self.inner.dim())
            .field("count", &self.count)
            .field("limit", &self.limit)
            .finish()
    }
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `(x - 1)^2 + 100 (y - x^2)^2`, minimized at `(1, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rosenbrock;

impl Rosenbrock {
    pub const STANDARD_START: [f64; 2] = [-1.2, 1.0];
}

pub fn rosenbrock(x: f64, y: f64) -> f64 {
    (x - 1.0).powi(2) + 100.0 * (y - x * x).powi(2)
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        rosenbrock(x[0], x[1])
    }
}

/// Two-dimensional quadratic model `1/2 θᵀAθ + bᵀθ + c`.
pub fn quadratic_model(a: &Sym2, b: [f64; 2], c: f64, theta: [f64; 2]) -> f64 {
    0.5 * a.quad_form(theta) + b[0] * theta[0] + b[1] * theta[1] + c
}

/// Dense quadratic `1/2 xᵀAx + bᵀx + c` in any dimension.
#[derive(Debug, Clone)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let d = a.nrows();
        if a.ncols() != d {
            return Err(Error::param("quadratic matrix must be square"));
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.len(),
            });
        }
        if (&a - a.transpose()).amax() > 0.0 {
            return Err(Error::param("quadratic matrix must be symmetric"));
        }
        Ok(Self { a, b, c })
    }

    /// `1/2 xᵀAx` with no linear or constant term.
    pub fn homogeneous(a: DMatrix<f64>) -> Result<Self> {
        let d = a.nrows();
        Self::new(a, DVector::zeros(d), 0.0)
    }

    /// Random symmetric positive definite quadratic `1/2 (x - x*)ᵀ A (x - x*)`
    /// with eigenvalues log-uniform in `[1, cond]` and a random rotation.
    pub fn random_convex<R: Rng + ?Sized>(d: usize, cond: f64, rng: &mut R) -> Result<Self> {
        if d == 0 || cond < 1.0 {
            return Err(Error::param("random_convex needs d >= 1 and cond >= 1"));
        }
        let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        let eig = DVector::<f64>::from_fn(d, |i, _| {
            if d == 1 {
                1.0
            } else {
                cond.powf(i as f64 / (d - 1) as f64)
            }
        });
        let mut a = &q * DMatrix::from_diagonal(&eig) * q.transpose();
        a = (&a + a.transpose()) * 0.5;
        let center = DVector::<f64>::from_fn(d, |_, _| rng.sample(StandardNormal));
        let b = -(&a * &center);
        let c = 0.5 * center.dot(&(&a * &center));
        Self::new(a, b, c)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        (&self.a * x + &self.b).iter().copied().collect()
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        0.5 * x.dot(&(&self.a * &x)) + self.b.dot(&x) + self.c
    }
}

/// `ln(1 + e^t)` without overflow.
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Mean logistic loss `1/N Σ ln(1 + exp(-y zᵀx))` over a full dataset.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    data: Arc<Dataset>,
}

impl LogisticRegression {
    pub fn new(data: Arc<Dataset>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self { data })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }
}

pub fn logistic_loss(data: &Dataset, x: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: x.len(),
        });
    }
    Ok(mean_loss(data, x))
}

fn mean_loss(data: &Dataset, x: &[f64]) -> f64 {
    // Neumaier summation keeps the x = 0 value at ln 2 to the last bit.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (z, y) in data.iter() {
        let term = softplus(-y * z.dot(x));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / data.len() as f64
}

impl Objective for LogisticRegression {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        mean_loss(&self.data, x)
    }
}
