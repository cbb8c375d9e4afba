//! Gradient and Hessian estimation inside a two-dimensional subspace.
//!
//! The gradient comes from coordinate forward differences. The Hessian is the
//! second-order coefficient matrix of a quadratic model whose constant and
//! linear terms are pinned to `f(θ)` and the gradient estimate; it is fitted
//! by least squares on sample points expressed relative to `θ`.

use nalgebra::{Matrix3, Vector3};

use crate::oracle::CountedOracle;
use crate::subspace::PairProjection;
use crate::{Error, Result};

/// Forward-difference step used throughout.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Eigenvalue floor for the positive definite repair.
pub const DEFAULT_KAPPA: f64 = 0.1;
/// Below this smallest Gram eigenvalue the fit is ridge-regularized.
pub const DEFAULT_GAMMA_FLOOR: f64 = 1e-10;

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2::new(0.0, 0.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub const fn scaled_identity(s: f64) -> Self {
        Self::new(s, 0.0, s)
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        let w = self.mul_vec(v);
        v[0] * w[0] + v[1] * w[1]
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn diagonal(&self) -> Self {
        Self::new(self.a11, 0.0, self.a22)
    }

    pub fn max_abs_diff(&self, other: &Sym2) -> f64 {
        (self.a11 - other.a11)
            .abs()
            .max((self.a12 - other.a12).abs())
            .max((self.a22 - other.a22).abs())
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_diff(&self, other: &Sym2) -> f64 {
        let d11 = self.a11 - other.a11;
        let d12 = self.a12 - other.a12;
        let d22 = self.a22 - other.a22;
        (d11 * d11 + 2.0 * d12 * d12 + d22 * d22).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    fn rank_one(v: [f64; 2], scale: f64) -> Self {
        Self::new(scale * v[0] * v[0], scale * v[0] * v[1], scale * v[1] * v[1])
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }
}

/// Eigenpairs ordered by magnitude: `|values[0]| >= |values[1]|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [[f64; 2]; 2],
}

impl Eigen2 {
    pub fn reconstruct(&self) -> Sym2 {
        Sym2::rank_one(self.vectors[0], self.values[0]).add(Sym2::rank_one(self.vectors[1], self.values[1]))
    }
}

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
///
/// Ties in magnitude are broken by signed value, larger first.
pub fn eig2x2(a: &Sym2) -> Eigen2 {
    let (p, q, r) = (a.a11, a.a12, a.a22);
    // (upper, lower) eigenvalues with their unit eigenvectors
    let (upper, lower, e_upper, e_lower) = if q == 0.0 {
        if p >= r {
            (p, r, [1.0, 0.0], [0.0, 1.0])
        } else {
            (r, p, [0.0, 1.0], [1.0, 0.0])
        }
    } else {
        let mean = 0.5 * (p + r);
        let radius = (0.5 * (p - r)).hypot(q);
        let angle = 0.5 * (2.0 * q).atan2(p - r);
        let (s, c) = angle.sin_cos();
        // the eigenvalue far from zero is exact; recover the other from det
        let det = p * r - q * q;
        let (upper, lower) = if mean >= 0.0 {
            let upper = mean + radius;
            (upper, if upper != 0.0 { det / upper } else { 0.0 })
        } else {
            let lower = mean - radius;
            (det / lower, lower)
        };
        (upper, lower, [c, s], [-s, c])
    };
    let upper_first = upper.abs() >= lower.abs();
    if upper_first {
        Eigen2 {
            values: [upper, lower],
            vectors: [e_upper, e_lower],
        }
    } else {
        Eigen2 {
            values: [lower, upper],
            vectors: [e_lower, e_upper],
        }
    }
}

/// A fitted subspace Hessian together with its positive definite repair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceHessian {
    pub raw: Sym2,
    pub eigen: Eigen2,
    /// `max(|λ_i|, κ)` for each eigenpair.
    pub repaired: [f64; 2],
}

/// Replaces every eigenvalue `λ` of `a` with `max(|λ|, κ)`.
pub fn make_pd(a: &Sym2, kappa: f64) -> SubspaceHessian {
    let eigen = eig2x2(a);
    let repaired = eigen.values.map(|l| l.abs().max(kappa));
    SubspaceHessian {
        raw: *a,
        eigen,
        repaired,
    }
}

impl SubspaceHessian {
    /// The repaired matrix. Returned unchanged when no eigenvalue needed repair.
    pub fn matrix(&self) -> Sym2 {
        if self.eigen.values == self.repaired {
            return self.raw;
        }
        Eigen2 {
            values: self.repaired,
            vectors: self.eigen.vectors,
        }
        .reconstruct()
    }

    /// `Ā⁻¹ g` through the eigendecomposition.
    pub fn newton_direction(&self, g: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (e, lam) in self.eigen.vectors.iter().zip(self.repaired) {
            let coef = (e[0] * g[0] + e[1] * g[1]) / lam;
            out[0] += coef * e[0];
            out[1] += coef * e[1];
        }
        out
    }
}

/// A subspace point and its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub point: [f64; 2],
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientEstimate {
    pub g: [f64; 2],
    /// Evaluations at `θ + ε e_1` and `θ + ε e_2`.
    pub probes: [Probe; 2],
    pub epsilon: f64,
}

/// Forward-difference gradient on the pair's two coordinates. Two queries.
pub fn estimate_gradient(
    oracle: &mut CountedOracle,
    x: &[f64],
    pair: &PairProjection,
    epsilon: f64,
    f_x: f64,
) -> Result<GradientEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::param("epsilon must be positive"));
    }
    if !f_x.is_finite() {
        return Err(Error::NonFinite("gradient base point"));
    }
    let theta = pair.project(x)?;
    let mut g = [0.0; 2];
    let mut probes = [Probe {
        point: theta,
        value: f_x,
    }; 2];
    for axis in 0..2 {
        let mut delta = [0.0; 2];
        delta[axis] = epsilon;
        let value = oracle.evaluate(&pair.lift(delta, x)?)?;
        if !value.is_finite() {
            return Err(Error::NonFinite("gradient probe"));
        }
        g[axis] = (value - f_x) / epsilon;
        probes[axis] = Probe {
            point: [theta[0] + delta[0], theta[1] + delta[1]],
            value,
        };
    }
    Ok(GradientEstimate { g, probes, epsilon })
}

/// `φ(θ) = [θ¹θ¹/2, θ¹θ², θ²θ²/2]`.
pub fn monomials(t: [f64; 2]) -> [f64; 3] {
    [0.5 * t[0] * t[0], t[0] * t[1], 0.5 * t[1] * t[1]]
}

/// Least-squares system for the second-order coefficients.
#[derive(Debug, Clone)]
pub struct FitSystem {
    pub design: Vec<[f64; 3]>,
    pub targets: Vec<f64>,
    pub gram: Matrix3<f64>,
    pub rhs: Vector3<f64>,
    pub min_eig_gram: f64,
}

impl FitSystem {
    /// `1e-8 * trace(ΦᵀΦ) / 3`.
    pub fn default_ridge(&self) -> f64 {
        1e-8 * self.gram.trace() / 3.0
    }
}

/// Smallest eigenvalue of `ΦᵀΦ` for points given relative to `θ`.
pub fn gram_min_eigenvalue(points: &[[f64; 2]]) -> f64 {
    let gram = points.iter().fold(Matrix3::zeros(), |acc, p| {
        let phi = Vector3::from(monomials(*p));
        acc + phi * phi.transpose()
    });
    gram.symmetric_eigenvalues().min()
}

/// Builds `Φ` and `q_i = f(θ̄_i) - ĝᵀθ̄_i - f(θ)` from samples at offsets
/// `θ̄_i` from the current point.
pub fn build_fit_system(samples: &[([f64; 2], f64)], g: [f64; 2], f_theta: f64) -> Result<FitSystem> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples(samples.len()));
    }
    let mut design = Vec::with_capacity(samples.len());
    let mut targets = Vec::with_capacity(samples.len());
    let mut gram = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for &(t, f) in samples {
        let phi = monomials(t);
        let q = f - (g[0] * t[0] + g[1] * t[1]) - f_theta;
        let phi_v = Vector3::from(phi);
        gram += phi_v * phi_v.transpose();
        rhs += phi_v * q;
        design.push(phi);
        targets.push(q);
    }
    let min_eig_gram = gram.symmetric_eigenvalues().min();
    Ok(FitSystem {
        design,
        targets,
        gram,
        rhs,
        min_eig_gram,
    })
}

/// Solves the normal equations, adding `ridge * I` when the smallest Gram
/// eigenvalue is below `gamma_floor`.
pub fn solve_hessian(sys: &FitSystem, gamma_floor: f64, ridge: f64) -> Result<Sym2> {
    let mut lhs = sys.gram;
    if sys.min_eig_gram < gamma_floor {
        lhs += Matrix3::identity() * ridge;
    }
    let h = match lhs.cholesky() {
        Some(chol) => chol.solve(&sys.rhs),
        None => lhs.lu().solve(&sys.rhs).ok_or(Error::HessianUnavailable)?,
    };
    let a = Sym2::new(h[0], h[1], h[2]);
    if !a.is_finite() {
        return Err(Error::HessianUnavailable);
    }
    Ok(a)
}

/// Second differences on the pair, reusing the gradient probes. Three queries.
pub fn fd_subspace_hessian(
    oracle: &mut CountedOracle,
    x: &[f64],
    pair: &PairProjection,
    grad: &GradientEstimate,
    f_x: f64,
) -> Result<Sym2> {
    let eps = grad.epsilon;
    let mut eval = |delta: [f64; 2]| -> Result<f64> {
        let v = oracle.evaluate(&pair.lift(delta, x)?)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("Hessian probe"))
        }
    };
    let f11 = eval([2.0 * eps, 0.0])?;
    let f22 = eval([0.0, 2.0 * eps])?;
    let f12 = eval([eps, eps])?;
    let (f1, f2) = (grad.probes[0].value, grad.probes[1].value);
    let h = eps * eps;
    Ok(Sym2::new(
        (f11 - 2.0 * f1 + f_x) / h,
        (f12 - f1 - f2 + f_x) / h,
        (f22 - 2.0 * f2 + f_x) / h,
    ))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::sync::Arc;

    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    use super::*;
    use crate::oracle::FnObjective;

    fn oracle_of(d: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> CountedOracle {
        CountedOracle::new(Arc::new(FnObjective::new(d, f)))
    }

    fn sym() -> impl Strategy<Value = Sym2> {
        (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b, c)| Sym2::new(a, b, c))
    }

    #[test]
    fn eig_of_rotated_matrix() {
        let e = eig2x2(&Sym2::new(5.5, 4.5, 5.5));
        assert_abs_diff_eq!(e.values[0], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-12);
        let v = e.vectors[0];
        assert_abs_diff_eq!(v[0].abs(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0], v[1], epsilon = 1e-12);
    }

    #[test]
    fn eig_of_identity_and_saddle() {
        let e = eig2x2(&Sym2::scaled_identity(1.0));
        assert_eq!(e.values, [1.0, 1.0]);
        let e = eig2x2(&Sym2::new(-1.0, 0.0, 1.0));
        assert_eq!(e.values, [1.0, -1.0]);
        assert_eq!(e.vectors, [[0.0, 1.0], [1.0, 0.0]]);
    }

    #[test]
    fn eig_orders_by_magnitude() {
        let e = eig2x2(&Sym2::new(-7.0, 0.5, 2.0));
        assert!(e.values[0] < 0.0 && e.values[0].abs() >= e.values[1].abs());
    }

    #[test]
    fn make_pd_examples() {
        let h = make_pd(&Sym2::new(-1.0, 0.0, 1.0), DEFAULT_KAPPA);
        assert_eq!(h.matrix(), Sym2::scaled_identity(1.0));
        let h = make_pd(&Sym2::new(0.05, 0.0, 2.0), DEFAULT_KAPPA);
        assert_eq!(h.matrix(), Sym2::new(0.1, 0.0, 2.0));
    }

    #[test]
    fn make_pd_leaves_well_conditioned_pd_alone() {
        let a = Sym2::new(2.0, 0.3, 1.0);
        assert_eq!(make_pd(&a, DEFAULT_KAPPA).matrix(), a);
    }

    #[test]
    fn newton_direction_examples() {
        let h = make_pd(&Sym2::new(10.0, 0.0, 1.0), DEFAULT_KAPPA);
        let d = h.newton_direction([10.0, 1.0]);
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 1.0, epsilon = 1e-15);
        let id = make_pd(&Sym2::scaled_identity(1.0), DEFAULT_KAPPA);
        assert_eq!(id.newton_direction([3.0, -2.0]), [3.0, -2.0]);
    }

    #[test]
    fn gradient_is_exact_on_affine() {
        let mut oracle = oracle_of(3, |x| 3.0 * x[2] + 2.0 * x[0] - 1.0 + 5.0 * x[1]);
        let x = [0.25, -1.0, 0.5];
        let f_x = oracle.objective().value(&x);
        let pair = PairProjection::new(2, 0).unwrap();
        for eps in [1e-3, 0.5] {
            let before = oracle.count();
            let est = estimate_gradient(&mut oracle, &x, &pair, eps, f_x).unwrap();
            assert_abs_diff_eq!(est.g[0], 3.0, epsilon = 1e-9);
            assert_abs_diff_eq!(est.g[1], 2.0, epsilon = 1e-9);
            assert_eq!(oracle.count() - before, 2);
            assert_eq!(est.probes[0].point, [0.5 + eps, 0.25]);
            assert_eq!(est.probes[1].point, [0.5, 0.25 + eps]);
        }
    }

    #[test]
    fn gradient_of_square_has_forward_bias() {
        let mut oracle = oracle_of(2, |x| x[0] * x[0]);
        let pair = PairProjection::new(0, 1).unwrap();
        let est = estimate_gradient(&mut oracle, &[1.0, 0.0], &pair, 1e-3, 1.0).unwrap();
        // ((1 + ε)^2 - 1) / ε = 2 + ε
        assert_abs_diff_eq!(est.g[0], 2.001, epsilon = 1e-10);
        assert_eq!(est.g[1], 0.0);
    }

    #[test]
    fn gradient_rejects_non_finite() {
        let mut oracle = oracle_of(2, |x| if x[0] > 0.0 { f64::NAN } else { 0.0 });
        let pair = PairProjection::new(0, 1).unwrap();
        assert!(matches!(
            estimate_gradient(&mut oracle, &[0.0, 0.0], &pair, 1e-3, 0.0),
            Err(Error::NonFinite(_))
        ));
        assert!(estimate_gradient(&mut oracle, &[0.0, 0.0], &pair, 0.0, 0.0).is_err());
    }

    #[test]
    fn design_matrix_from_monomials() {
        let samples = [([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([1.0, 1.0], 0.0)];
        let sys = build_fit_system(&samples, [0.0; 2], 0.0).unwrap();
        assert_eq!(sys.design, vec![[0.5, 0.0, 0.0], [0.0, 0.0, 0.5], [0.5, 1.0, 0.5]]);
    }

    #[test]
    fn degenerate_samples_flag_zero_gram() {
        let samples = [([0.0, 0.0], 1.0); 3];
        let sys = build_fit_system(&samples, [1.0, 1.0], 1.0).unwrap();
        assert_eq!(sys.min_eig_gram, 0.0);
        assert_eq!(sys.default_ridge(), 0.0);
        assert!(matches!(
            solve_hessian(&sys, DEFAULT_GAMMA_FLOOR, sys.default_ridge()),
            Err(Error::HessianUnavailable)
        ));
    }

    #[test]
    fn too_few_samples() {
        let samples = [([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0)];
        assert!(matches!(
            build_fit_system(&samples, [0.0; 2], 0.0),
            Err(Error::InsufficientSamples(2))
        ));
    }

    #[test]
    fn targets_of_pure_quadratic_are_half_quadratic_form() {
        let a = Sym2::new(2.0, 1.0, 3.0);
        let pts = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-0.5, 2.0]];
        let samples: Vec<_> = pts.iter().map(|&p| (p, 0.5 * a.quad_form(p))).collect();
        let sys = build_fit_system(&samples, [0.0; 2], 0.0).unwrap();
        for (q, p) in sys.targets.iter().zip(pts) {
            assert_eq!(*q, 0.5 * a.quad_form(p));
        }
    }

    #[test]
    fn hand_solved_three_point_fit() {
        let samples = [([1.0, 0.0], 1.0), ([0.0, 1.0], 1.5), ([1.0, 1.0], 3.5)];
        let sys = build_fit_system(&samples, [0.0; 2], 0.0).unwrap();
        assert_eq!(sys.targets, vec![1.0, 1.5, 3.5]);
        let a = solve_hessian(&sys, DEFAULT_GAMMA_FLOOR, sys.default_ridge()).unwrap();
        assert!(a.max_abs_diff(&Sym2::new(2.0, 1.0, 3.0)) < 1e-12);
    }

    #[test]
    fn zero_targets_give_zero_hessian() {
        let samples = [([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([1.0, 1.0], 0.0)];
        let sys = build_fit_system(&samples, [0.0; 2], 0.0).unwrap();
        assert_eq!(solve_hessian(&sys, DEFAULT_GAMMA_FLOOR, 0.0).unwrap(), Sym2::ZERO);
    }

    #[test]
    fn ridge_rescues_rank_deficient_fit() {
        // two distinct directions only: cross term is unidentifiable
        let a = Sym2::new(4.0, 0.0, 1.0);
        let pts = [[0.1, 0.0], [0.0, 0.1], [0.2, 0.0], [0.0, 0.2]];
        let samples: Vec<_> = pts.iter().map(|&p| (p, 0.5 * a.quad_form(p))).collect();
        let sys = build_fit_system(&samples, [0.0; 2], 0.0).unwrap();
        assert!(sys.min_eig_gram < DEFAULT_GAMMA_FLOOR);
        let fit = solve_hessian(&sys, DEFAULT_GAMMA_FLOOR, sys.default_ridge()).unwrap();
        assert!(fit.max_abs_diff(&a) < 1e-5, "{fit:?}");
    }

    #[test]
    fn fd_hessian_recovers_quadratic() {
        let a = Sym2::new(3.0, -1.25, 0.5);
        let mut oracle = oracle_of(3, move |x| 0.5 * a.quad_form([x[0], x[2]]) + 7.0 * x[1] - x[0]);
        let x = [0.3, -0.2, 1.1];
        let pair = PairProjection::new(0, 2).unwrap();
        let f_x = oracle.objective().value(&x);
        let grad = estimate_gradient(&mut oracle, &x, &pair, 1e-3, f_x).unwrap();
        let before = oracle.count();
        let h = fd_subspace_hessian(&mut oracle, &x, &pair, &grad, f_x).unwrap();
        assert_eq!(oracle.count() - before, 3);
        assert!(h.max_abs_diff(&a) < 1e-6, "{h:?}");
    }

    #[test]
    fn fd_hessian_of_affine_is_zero() {
        let mut oracle = oracle_of(2, |x| 2.0 * x[0] - 3.0 * x[1] + 1.0);
        let x = [0.5, 0.25];
        let pair = PairProjection::new(0, 1).unwrap();
        let f_x = oracle.objective().value(&x);
        let grad = estimate_gradient(&mut oracle, &x, &pair, 1e-3, f_x).unwrap();
        let h = fd_subspace_hessian(&mut oracle, &x, &pair, &grad, f_x).unwrap();
        assert!(h.max_abs_diff(&Sym2::ZERO) < 1e-7);
    }

    /// Dense least squares on Φ through the SVD: a different route from the
    /// normal equations used by `solve_hessian`.
    fn svd_least_squares(sys: &FitSystem) -> Sym2 {
        let phi = DMatrix::from_fn(sys.design.len(), 3, |i, j| sys.design[i][j]);
        let q = DMatrix::from_column_slice(sys.targets.len(), 1, &sys.targets);
        let h = phi.svd(true, true).solve(&q, 1e-14).unwrap();
        Sym2::new(h[0], h[1], h[2])
    }

    proptest! {
        #[test]
        fn eigen_reconstructs(a in sym()) {
            let e = eig2x2(&a);
            prop_assert!(e.reconstruct().frobenius_diff(&a) <= 1e-10);
            prop_assert!(e.values[0].abs() >= e.values[1].abs());
            let [u, v] = e.vectors;
            prop_assert!((u[0] * v[0] + u[1] * v[1]).abs() < 1e-14);
            prop_assert!((u[0].hypot(u[1]) - 1.0).abs() < 1e-14);
        }

        #[test]
        fn repair_is_positive_definite(a in sym(), x in prop::array::uniform2(-5.0f64..5.0)) {
            let bar = make_pd(&a, DEFAULT_KAPPA).matrix();
            let norm2 = x[0] * x[0] + x[1] * x[1];
            prop_assert!(bar.quad_form(x) >= DEFAULT_KAPPA * norm2 - 1e-12 * (1.0 + norm2));
        }

        #[test]
        fn newton_direction_descends(a in sym(), g in prop::array::uniform2(-5.0f64..5.0)) {
            prop_assume!(g != [0.0, 0.0]);
            let d = make_pd(&a, DEFAULT_KAPPA).newton_direction(g);
            prop_assert!(g[0] * d[0] + g[1] * d[1] > 0.0);
        }

        #[test]
        fn fit_matches_dense_least_squares(
            a in sym(),
            g in prop::array::uniform2(-3.0f64..3.0),
            pts in prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), 4..7),
        ) {
            let samples: Vec<_> = pts
                .iter()
                .map(|&p| (p, 0.5 * a.quad_form(p) + g[0] * p[0] + g[1] * p[1] + 2.0))
                .collect();
            let sys = build_fit_system(&samples, g, 2.0).unwrap();
            prop_assume!(sys.min_eig_gram >= 1e-6);
            let fit = solve_hessian(&sys, DEFAULT_GAMMA_FLOOR, sys.default_ridge()).unwrap();
            prop_assert!(fit.max_abs_diff(&a) <= 1e-8);
            prop_assert!(fit.max_abs_diff(&svd_least_squares(&sys)) <= 1e-8);
        }
    }
}
