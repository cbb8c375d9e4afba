//! Zeroth-order optimization with subspace-based approximate Hessians.
//!
//! The optimizer in [`zosah`] works on randomly chosen two-dimensional
//! coordinate subspaces. In each one it estimates the gradient with forward
//! differences, fits the 2x2 Hessian of a local quadratic model by least
//! squares, repairs it to be positive definite and takes a Newton-style step.
//! Function values from the two previous steps are cached and reused as fit
//! samples, so fresh Hessian samples are only drawn when the subspaces are
//! switched every `T` steps.
//!
//! All algorithms meter their cost through a [`CountedOracle`], which counts
//! every function evaluation including line-search trials. The [`baselines`]
//! module holds the randomized-gradient methods (RSPG, ZO-signSGD, ZO-AdaMM)
//! that share the same oracle and the same Armijo search.
//!
//! ```
//! use std::sync::Arc;
//! use zosah_core::{oracle::Rosenbrock, zosah::{Zosah, ZosahConfig}, optimizer::run};
//!
//! let mut cfg = ZosahConfig::for_dim(2);
//! cfg.epsilon = 1e-6;
//! let opt = Zosah::new(Arc::new(Rosenbrock), vec![-1.2, 1.0], cfg, 0).unwrap();
//! let trace = run(opt, 2000).unwrap();
//! assert!(trace.final_value().unwrap() < 1e-3);
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cache;
pub mod dataset;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linesearch;
pub mod optimizer;
pub mod oracle;
pub mod subspace;
pub mod trace;
pub mod zosah;

pub use error::{Error, Result};
pub use oracle::{CountedOracle, Objective};
pub use trace::{Trace, TraceRow};
