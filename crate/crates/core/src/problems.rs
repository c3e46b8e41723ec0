//! Objective functions with exact value/gradient/Hessian, smoothness
//! metadata, and a high-accuracy reference solver for ground-truth optima.

use nalgebra::Cholesky;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constraints::FeasibleSet;
use crate::numerics::SymmetricOperator;
use crate::{Error, Matrix, Result, Vector};

/// A convex objective with exact first and second derivatives.
///
/// `hessian_smoothness` reports the Lipschitz modulus of the Hessian map when
/// a bound is known (`Some(0.0)` for quadratics); it is metadata only — no
/// solver in this crate consumes it.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn hessian(&self, x: &Vector) -> SymmetricOperator;
    fn hessian_smoothness(&self) -> Option<f64>;
    /// Finite-sum view for subsampled (minibatch) oracles, when the objective
    /// has one.
    fn as_finite_sum(&self) -> Option<&dyn FiniteSum> {
        None
    }
}

/// Finite-sum structure: exact derivatives of the average loss over a subset
/// of sample indices.
pub trait FiniteSum: Sync {
    fn num_samples(&self) -> usize;
    fn batch_value(&self, x: &Vector, idx: &[usize]) -> f64;
    fn batch_gradient(&self, x: &Vector, idx: &[usize]) -> Vector;
    fn batch_hessian(&self, x: &Vector, idx: &[usize]) -> SymmetricOperator;
}

/// A dense dataset: rows of `features` are samples, `labels` holds one real
/// (regression) or ±1 (classification) target per row.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Matrix,
    labels: Vector,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vector) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if features.nrows() == 0 {
            return Err(Error::InvalidArgument("dataset has no samples".into()));
        }
        if !features.iter().all(|v| v.is_finite()) || !labels.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("dataset entries".into()));
        }
        Ok(Dataset { features, labels })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &Vector {
        &self.labels
    }

    pub fn row(&self, i: usize) -> Vector {
        self.features.row(i).transpose()
    }

    /// Keeps only the first `k` samples.
    pub fn take(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(Error::InvalidArgument(format!(
                "subset size {k} out of range 1..={}",
                self.n()
            )));
        }
        Dataset::new(
            self.features.rows(0, k).into_owned(),
            self.labels.rows(0, k).into_owned(),
        )
    }

    fn check_binary_labels(&self) -> Result<()> {
        for &y in self.labels.iter() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidLabel(y));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

/// `f(x) = 1/(2n) ||A x - y||^2`, constant Hessian `(1/n) A^T A`.
#[derive(Debug)]
pub struct LeastSquares {
    data: Dataset,
    hess: SymmetricOperator,
}

pub fn least_squares(data: Dataset) -> Result<LeastSquares> {
    let n = data.n();
    let gram = gram_uniform(data.features(), 1.0 / n as f64);
    Ok(LeastSquares {
        data,
        hess: SymmetricOperator::dense_unchecked(gram),
    })
}

/// `(scale) * A^T A`, symmetrized against rounding.
fn gram_uniform(a: &Matrix, scale: f64) -> Matrix {
    let g = a.transpose() * a * scale;
    (&g + g.transpose()) * 0.5
}

impl LeastSquares {
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    fn residual(&self, x: &Vector, idx: &[usize]) -> Vector {
        Vector::from_fn(idx.len(), |k, _| {
            self.data.features.row(idx[k]).transpose().dot(x) - self.data.labels[idx[k]]
        })
    }
}

impl Objective for LeastSquares {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        let r = &self.data.features * x - &self.data.labels;
        0.5 * r.norm_squared() / self.data.n() as f64
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let r = &self.data.features * x - &self.data.labels;
        self.data.features.transpose() * r / self.data.n() as f64
    }

    fn hessian(&self, _x: &Vector) -> SymmetricOperator {
        self.hess.clone()
    }

    fn hessian_smoothness(&self) -> Option<f64> {
        Some(0.0)
    }

    fn as_finite_sum(&self) -> Option<&dyn FiniteSum> {
        Some(self)
    }
}

impl FiniteSum for LeastSquares {
    fn num_samples(&self) -> usize {
        self.data.n()
    }

    fn batch_value(&self, x: &Vector, idx: &[usize]) -> f64 {
        0.5 * self.residual(x, idx).norm_squared() / idx.len() as f64
    }

    fn batch_gradient(&self, x: &Vector, idx: &[usize]) -> Vector {
        let r = self.residual(x, idx);
        let mut g = Vector::zeros(self.dim());
        for (k, &i) in idx.iter().enumerate() {
            g.axpy(r[k], &self.data.row(i), 1.0);
        }
        g / idx.len() as f64
    }

    fn batch_hessian(&self, _x: &Vector, idx: &[usize]) -> SymmetricOperator {
        let sub = select_rows(&self.data.features, idx);
        SymmetricOperator::dense_unchecked(gram_uniform(&sub, 1.0 / idx.len() as f64))
    }
}

fn select_rows(a: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(idx.len(), a.ncols(), |i, j| a[(idx[i], j)])
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

/// `f(x) = 1/n sum log(1 + exp(-y_i a_i^T x)) + l2/2 ||x||^2` with ±1 labels.
#[derive(Debug)]
pub struct LogisticRegression {
    data: Dataset,
    l2: f64,
    smoothness: f64,
}

pub fn logistic_regression(data: Dataset, l2: f64) -> Result<LogisticRegression> {
    data.check_binary_labels()?;
    if l2 < 0.0 || !l2.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "l2 must be nonnegative, got {l2}"
        )));
    }
    // |sigma''| <= 1/(6 sqrt 3); the Hessian-Lipschitz bound follows from the
    // data norms. Reported for diagnostics only.
    let n = data.n() as f64;
    let sum_cubed: f64 = (0..data.n())
        .map(|i| data.features.row(i).norm().powi(3))
        .sum();
    let smoothness = sum_cubed / (6.0 * 3.0f64.sqrt() * n);
    Ok(LogisticRegression {
        data,
        l2,
        smoothness,
    })
}

fn softplus(z: f64) -> f64 {
    // log(1 + e^z), stable for large |z|.
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticRegression {
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn margins(&self, x: &Vector, idx: &[usize]) -> Vector {
        Vector::from_fn(idx.len(), |k, _| {
            self.data.labels[idx[k]] * self.data.features.row(idx[k]).transpose().dot(x)
        })
    }

    fn value_idx(&self, x: &Vector, idx: &[usize]) -> f64 {
        let m = self.margins(x, idx);
        let loss: f64 = m.iter().map(|&mi| softplus(-mi)).sum();
        loss / idx.len() as f64 + 0.5 * self.l2 * x.norm_squared()
    }

    fn gradient_idx(&self, x: &Vector, idx: &[usize]) -> Vector {
        let m = self.margins(x, idx);
        let mut g = Vector::zeros(self.dim());
        for (k, &i) in idx.iter().enumerate() {
            let coeff = -self.data.labels[i] * sigmoid(-m[k]);
            g.axpy(coeff, &self.data.row(i), 1.0);
        }
        g /= idx.len() as f64;
        g.axpy(self.l2, x, 1.0);
        g
    }

    fn hessian_idx(&self, x: &Vector, idx: &[usize]) -> SymmetricOperator {
        let m = self.margins(x, idx);
        // H = B^T B + l2 I with rows b_i = sqrt(w_i / n) a_i, w_i = s (1 - s).
        let mut scaled = select_rows(&self.data.features, idx);
        for (k, &mi) in m.iter().enumerate() {
            let s = sigmoid(mi);
            let w = (s * (1.0 - s) / idx.len() as f64).max(0.0).sqrt();
            scaled.row_mut(k).scale_mut(w);
        }
        let mut h = gram_uniform(&scaled, 1.0);
        if self.l2 > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += self.l2;
            }
        }
        SymmetricOperator::dense_unchecked(h)
    }

    fn all_indices(&self) -> Vec<usize> {
        (0..self.data.n()).collect()
    }
}

impl Objective for LogisticRegression {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.value_idx(x, &self.all_indices())
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.gradient_idx(x, &self.all_indices())
    }

    fn hessian(&self, x: &Vector) -> SymmetricOperator {
        self.hessian_idx(x, &self.all_indices())
    }

    fn hessian_smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }

    fn as_finite_sum(&self) -> Option<&dyn FiniteSum> {
        Some(self)
    }
}

impl FiniteSum for LogisticRegression {
    fn num_samples(&self) -> usize {
        self.data.n()
    }

    fn batch_value(&self, x: &Vector, idx: &[usize]) -> f64 {
        self.value_idx(x, idx)
    }

    fn batch_gradient(&self, x: &Vector, idx: &[usize]) -> Vector {
        self.gradient_idx(x, idx)
    }

    fn batch_hessian(&self, x: &Vector, idx: &[usize]) -> SymmetricOperator {
        self.hessian_idx(x, idx)
    }
}

// ---------------------------------------------------------------------------
// Synthetic quadratic
// ---------------------------------------------------------------------------

/// `f(x) = 1/2 (x - x*)^T Q (x - x*)` with SPD `Q` of prescribed condition
/// number and a known minimizer.
#[derive(Debug)]
pub struct SyntheticQuadratic {
    q: Matrix,
    x_star: Vector,
}

/// Builds a reproducible quadratic: eigenvalues log-spaced on
/// `[1, condition]`, a random orthogonal basis, and a unit-norm minimizer.
/// Returns the objective together with its exact minimizer.
pub fn synthetic_quadratic(
    dim: usize,
    condition: f64,
    seed: u64,
) -> Result<(SyntheticQuadratic, Vector)> {
    if dim == 0 {
        return Err(Error::InvalidArgument("quadratic needs dim >= 1".into()));
    }
    if !(condition >= 1.0) || !condition.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "condition number must be >= 1, got {condition}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eigenvalues = Vector::from_fn(dim, |i, _| {
        if dim == 1 {
            1.0
        } else {
            let t = i as f64 / (dim - 1) as f64;
            condition.powf(t)
        }
    });
    let gaussian = Matrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let basis = gaussian.qr().q();
    let scaled = &basis * Matrix::from_diagonal(&eigenvalues);
    let q = &scaled * basis.transpose();
    let q = (&q + q.transpose()) * 0.5;
    let mut x_star = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = x_star.norm();
    if norm > 0.0 {
        x_star /= norm;
    } else {
        x_star[0] = 1.0;
    }
    Ok((
        SyntheticQuadratic {
            q,
            x_star: x_star.clone(),
        },
        x_star,
    ))
}

impl SyntheticQuadratic {
    pub fn minimizer(&self) -> &Vector {
        &self.x_star
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }
}

impl Objective for SyntheticQuadratic {
    fn dim(&self) -> usize {
        self.x_star.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        let d = x - &self.x_star;
        0.5 * d.dot(&(&self.q * &d))
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.q * (x - &self.x_star)
    }

    fn hessian(&self, _x: &Vector) -> SymmetricOperator {
        SymmetricOperator::dense_unchecked(self.q.clone())
    }

    fn hessian_smoothness(&self) -> Option<f64> {
        Some(0.0)
    }
}

// ---------------------------------------------------------------------------
// Reference optimum
// ---------------------------------------------------------------------------

/// Options for [`reference_optimum`].
#[derive(Clone, Copy, Debug)]
pub struct ReferenceOptions {
    pub max_iterations: usize,
    /// Newton polish rounds when the first-order phase lands strictly inside
    /// a full-dimensional set.
    pub polish_rounds: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            max_iterations: 500_000,
            polish_rounds: 60,
        }
    }
}

/// Computes a ground-truth optimum by running a projected accelerated
/// first-order method (backtracking FISTA with function restarts) until the
/// projected-gradient-mapping norm drops below `tol`, then polishing interior
/// solutions with damped Newton steps. Returns the best iterate and value.
pub fn reference_optimum(
    obj: &dyn Objective,
    set: &FeasibleSet,
    tol: f64,
) -> Result<(Vector, f64)> {
    reference_optimum_with(obj, set, tol, ReferenceOptions::default())
}

pub fn reference_optimum_with(
    obj: &dyn Objective,
    set: &FeasibleSet,
    tol: f64,
    opts: ReferenceOptions,
) -> Result<(Vector, f64)> {
    if obj.dim() != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "objective dim {} vs set dim {}",
            obj.dim(),
            set.dim()
        )));
    }
    let mut x = set.project(&Vector::zeros(obj.dim()));
    let mut z = x.clone();
    let mut f_x = obj.value(&x);
    let mut lip = obj
        .hessian(&x)
        .lambda_max_estimate()
        .max(1e-12);
    let mut theta: f64 = 1.0;
    let mut best = (x.clone(), f_x);
    let mut mapping = f64::INFINITY;
    let mut since_restart = 0u32;
    // The first-order phase certifies the mapping norm down to what f64
    // arithmetic resolves; the Newton polish below finishes interior cases.
    let phase_tol = tol.max(1e-10);

    for _ in 0..opts.max_iterations {
        let g = obj.gradient(&z);
        let f_z = obj.value(&z);
        // Backtracking on the quadratic upper model at z.
        let mut x_next;
        loop {
            x_next = set.project(&(&z - &g / lip));
            let diff = &x_next - &z;
            let f_next = obj.value(&x_next);
            if f_next
                <= f_z + g.dot(&diff) + 0.5 * lip * diff.norm_squared() + 1e-14 * (1.0 + f_z.abs())
            {
                break;
            }
            lip *= 2.0;
            if lip > 1e18 {
                break;
            }
        }
        mapping = (&z - &x_next).norm() * lip;
        let f_next = obj.value(&x_next);
        if f_next < best.1 {
            best = (x_next.clone(), f_next);
        }
        if mapping <= phase_tol {
            x = x_next;
            break;
        }
        if f_next > f_x && since_restart > 0 {
            // Function restart; the guard keeps the plain descent step right
            // after a restart from re-triggering it forever.
            theta = 1.0;
            z = x.clone();
            since_restart = 0;
            continue;
        }
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        let momentum = (theta - 1.0) / theta_next;
        z = &x_next + (&x_next - &x) * momentum;
        theta = theta_next;
        x = x_next;
        f_x = f_next;
        since_restart += 1;
    }
    if mapping > phase_tol {
        return Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            residual: mapping,
            tol: phase_tol,
        });
    }

    // Interior Newton polish: quadratic local convergence pushes the value
    // error to machine precision when the solution is strictly inside a
    // full-dimensional set.
    if strictly_interior(set, &x) {
        let mut y = x.clone();
        for _ in 0..opts.polish_rounds {
            let g = obj.gradient(&y);
            let h = obj.hessian(&y);
            let step = match h.as_dense() {
                Some(m) => Cholesky::new(m.clone()).map(|c| c.solve(&g)),
                None => crate::numerics::solve_spd(&h, &g, 1e-12).ok(),
            };
            let Some(step) = step else { break };
            let mut cand = &y - &step;
            let mut damping = 1.0;
            while !(set.contains(&cand, 0.0) && obj.value(&cand) <= obj.value(&y)) {
                damping *= 0.5;
                if damping < 1e-8 {
                    break;
                }
                cand = &y - &step * damping;
            }
            if damping < 1e-8 {
                break;
            }
            let moved = (&cand - &y).norm();
            y = cand;
            if moved <= 1e-16 * (1.0 + y.norm()) {
                break;
            }
        }
        let f_y = obj.value(&y);
        if f_y <= best.1 && set.contains(&y, 0.0) {
            best = (y, f_y);
        }
    }

    if tol < phase_tol {
        // Certify the stricter request at the polished point.
        let g = obj.gradient(&best.0);
        let final_mapping = (&best.0 - set.project(&(&best.0 - &g / lip))).norm() * lip;
        if final_mapping > tol {
            return Err(Error::NonConvergence {
                iterations: opts.max_iterations,
                residual: final_mapping,
                tol,
            });
        }
    }
    Ok(best)
}

fn strictly_interior(set: &FeasibleSet, x: &Vector) -> bool {
    match set {
        FeasibleSet::Ball { center, radius } => (x - center).norm() < radius * (1.0 - 1e-9),
        FeasibleSet::Box { lower, upper } => x
            .iter()
            .zip(lower.iter().zip(upper.iter()))
            .all(|(v, (l, u))| *v > l + 1e-9 * (1.0 + l.abs()) && *v < u - 1e-9 * (1.0 + u.abs())),
        // The simplex has empty interior in R^d; no polish there.
        FeasibleSet::Simplex { .. } => false,
        FeasibleSet::Unconstrained { .. } => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dataset(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Dataset {
        let n = features.len();
        let d = features[0].len();
        Dataset::new(
            Matrix::from_fn(n, d, |i, j| features[i][j]),
            Vector::from_vec(labels),
        )
        .unwrap()
    }

    fn finite_diff_gradient(obj: &dyn Objective, x: &Vector) -> Vector {
        let h = 1e-6;
        Vector::from_fn(x.len(), |i, _| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[i] += h;
            minus[i] -= h;
            (obj.value(&plus) - obj.value(&minus)) / (2.0 * h)
        })
    }

    fn finite_diff_hessian_col(obj: &dyn Objective, x: &Vector, j: usize) -> Vector {
        let h = 1e-5;
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[j] += h;
        minus[j] -= h;
        (obj.gradient(&plus) - obj.gradient(&minus)) / (2.0 * h)
    }

    fn probe_derivatives(obj: &dyn Objective, seed: u64) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let x = Vector::from_fn(obj.dim(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let g = obj.gradient(&x);
            let g_fd = finite_diff_gradient(obj, &x);
            let gscale = g.norm().max(1.0);
            assert!(
                (g - &g_fd).norm() <= 1e-5 * gscale,
                "gradient mismatch vs finite differences"
            );
            let h = obj.hessian(&x);
            for j in 0..obj.dim() {
                let mut e = Vector::zeros(obj.dim());
                e[j] = 1.0;
                let col = h.apply(&e);
                let col_fd = finite_diff_hessian_col(obj, &x, j);
                assert!(
                    (col - col_fd).norm() <= 1e-4 * (1.0 + h.apply(&e).norm()),
                    "hessian column {j} mismatch"
                );
            }
        }
    }

    fn probe_convexity(obj: &dyn Objective, seed: u64) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = Vector::from_fn(obj.dim(), |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let y = Vector::from_fn(obj.dim(), |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let theta: f64 = rng.random::<f64>();
            let mix = &x * theta + &y * (1.0 - theta);
            assert!(
                obj.value(&mix) <= theta * obj.value(&x) + (1.0 - theta) * obj.value(&y) + 1e-10
            );
        }
    }

    #[test]
    fn least_squares_scalar_example() {
        let obj = least_squares(dataset(vec![vec![1.0]], vec![0.0])).unwrap();
        let x = Vector::from_vec(vec![2.0]);
        assert_eq!(obj.value(&x), 2.0);
        assert_eq!(obj.gradient(&x), Vector::from_vec(vec![2.0]));
        assert_eq!(obj.hessian(&x).as_dense().unwrap()[(0, 0)], 1.0);
        assert_eq!(obj.hessian_smoothness(), Some(0.0));
    }

    #[test]
    fn least_squares_normal_equation_stationarity() {
        let obj = least_squares(dataset(
            vec![vec![2.0, 0.0], vec![0.0, 3.0], vec![1.0, 1.0]],
            vec![1.0, 2.0, 3.0],
        ))
        .unwrap();
        // Solve the normal equations directly.
        let a = obj.data().features().clone();
        let aty = a.transpose() * obj.data().labels();
        let sol = Cholesky::new(a.transpose() * &a).unwrap().solve(&aty);
        assert!(obj.gradient(&sol).norm() <= 1e-12);
    }

    #[test]
    fn least_squares_identity_example() {
        let obj = least_squares(dataset(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]))
            .unwrap();
        let x = Vector::zeros(2);
        assert_eq!(obj.value(&x), 0.5);
        assert_eq!(obj.gradient(&x), Vector::from_vec(vec![-0.5, -0.5]));
    }

    #[test]
    fn least_squares_rejects_mismatched_dims() {
        let features = Matrix::zeros(2, 2);
        let labels = Vector::zeros(3);
        assert!(Dataset::new(features, labels).is_err());
    }

    #[test]
    fn logistic_at_origin_is_log_two() {
        let obj = logistic_regression(
            dataset(vec![vec![1.0, -2.0], vec![0.5, 0.25]], vec![1.0, -1.0]),
            0.0,
        )
        .unwrap();
        assert_relative_eq!(obj.value(&Vector::zeros(2)), 2.0f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn logistic_single_sample_derivatives_at_zero() {
        for l2 in [0.0, 0.3] {
            let obj = logistic_regression(dataset(vec![vec![1.0]], vec![1.0]), l2).unwrap();
            let x = Vector::zeros(1);
            assert_relative_eq!(obj.gradient(&x)[0], -0.5, epsilon = 1e-15);
            assert_relative_eq!(
                obj.hessian(&x).as_dense().unwrap()[(0, 0)],
                0.25 + l2,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn logistic_rejects_bad_labels() {
        let e = logistic_regression(dataset(vec![vec![1.0]], vec![0.5]), 0.0).unwrap_err();
        assert!(matches!(e, Error::InvalidLabel(_)));
    }

    #[test]
    fn derivative_probes_all_objectives() {
        let ls = least_squares(dataset(
            vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.25, -0.75]],
            vec![0.5, -1.0, 2.0],
        ))
        .unwrap();
        probe_derivatives(&ls, 100);
        probe_convexity(&ls, 101);

        let lr = logistic_regression(
            dataset(
                vec![vec![1.0, 0.5], vec![-0.5, 1.0], vec![0.75, -0.25], vec![-1.0, -1.0]],
                vec![1.0, -1.0, 1.0, -1.0],
            ),
            0.1,
        )
        .unwrap();
        probe_derivatives(&lr, 200);
        probe_convexity(&lr, 201);

        let (quad, _) = synthetic_quadratic(3, 25.0, 5).unwrap();
        probe_derivatives(&quad, 300);
        probe_convexity(&quad, 301);
    }

    #[test]
    fn quadratic_construction() {
        let (obj, x_star) = synthetic_quadratic(1, 1.0, 3).unwrap();
        assert_eq!(obj.dim(), 1);
        assert_eq!(obj.value(&x_star), 0.0);
        assert_eq!(obj.gradient(&x_star).norm(), 0.0);
        assert_eq!(obj.hessian_smoothness(), Some(0.0));

        let (obj, x_star) = synthetic_quadratic(6, 50.0, 9).unwrap();
        assert!(obj.value(&x_star) == 0.0);
        assert!(obj.gradient(&x_star).norm() <= 1e-14);
        // Prescribed condition number.
        let eig = nalgebra::SymmetricEigen::new(obj.matrix().clone());
        let (mn, mx) = (eig.eigenvalues.min(), eig.eigenvalues.max());
        assert_relative_eq!(mx / mn, 50.0, max_relative = 1e-8);
        // Reproducibility.
        let (obj2, x2) = synthetic_quadratic(6, 50.0, 9).unwrap();
        assert_eq!(obj.matrix(), obj2.matrix());
        assert_eq!(x_star, x2);
    }

    #[test]
    fn quadratic_hessian_constant_in_x() {
        let (obj, _) = synthetic_quadratic(4, 10.0, 1).unwrap();
        let h0 = obj.hessian(&Vector::zeros(4));
        let h1 = obj.hessian(&Vector::from_vec(vec![1.0, -2.0, 3.0, 0.5]));
        assert_eq!(h0.as_dense().unwrap(), h1.as_dense().unwrap());
    }

    #[test]
    fn reference_optimum_quadratic_interior() {
        let (obj, x_star) = synthetic_quadratic(5, 30.0, 12).unwrap();
        let set = FeasibleSet::ball(Vector::zeros(5), 4.0).unwrap();
        let (x, f) = reference_optimum(&obj, &set, 1e-10).unwrap();
        assert!((x - x_star).norm() <= 1e-8);
        assert!(f.abs() <= 1e-16);
    }

    #[test]
    fn reference_optimum_least_squares_ball() {
        let obj = least_squares(dataset(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]))
            .unwrap();
        let set = FeasibleSet::ball(Vector::zeros(2), 10.0).unwrap();
        let (x, _) = reference_optimum(&obj, &set, 1e-10).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-8);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn reference_optimum_clipped_on_box() {
        let obj = least_squares(dataset(vec![vec![1.0]], vec![2.0])).unwrap();
        let set = FeasibleSet::boxed(
            Vector::from_vec(vec![-1.0]),
            Vector::from_vec(vec![1.0]),
        )
        .unwrap();
        let (x, _) = reference_optimum(&obj, &set, 1e-10).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn dataset_take_subsets() {
        let ds = dataset(vec![vec![1.0], vec![2.0], vec![3.0]], vec![1.0, -1.0, 1.0]);
        let sub = ds.take(2).unwrap();
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.labels()[1], -1.0);
        assert!(ds.take(0).is_err());
        assert!(ds.take(4).is_err());
    }
}
