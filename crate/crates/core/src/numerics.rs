//! Dense vector/matrix kernels shared by the subproblem solvers: a symmetric
//! operator abstraction (dense or matrix-free), PSD projection, SPD linear
//! solves and scalar root-finding.

use std::sync::Arc;

use nalgebra::{Cholesky, SymmetricEigen};

use crate::{Error, Matrix, Result, Vector};

/// Relative tolerance for accepting a dense matrix as symmetric.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Iteration cap for conjugate gradients, as a multiple of the dimension.
const CG_CAP_FACTOR: usize = 10;

/// A symmetric linear operator: either an explicit dense matrix or a
/// matrix-free product.
#[derive(Clone)]
pub enum SymmetricOperator {
    Dense(Arc<Matrix>),
    MatrixFree {
        dim: usize,
        apply: Arc<dyn Fn(&Vector) -> Vector + Send + Sync>,
    },
}

impl std::fmt::Debug for SymmetricOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymmetricOperator::Dense(m) => write!(f, "Dense({}x{})", m.nrows(), m.ncols()),
            SymmetricOperator::MatrixFree { dim, .. } => write!(f, "MatrixFree(dim={dim})"),
        }
    }
}

impl SymmetricOperator {
    /// Wraps a dense matrix, validating squareness and symmetry to
    /// [`SYMMETRY_RTOL`] (relative to the largest entry).
    pub fn dense(m: Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("dense operator entries".into()));
        }
        let scale = m.amax().max(1.0);
        let mut asym = 0.0f64;
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        let rel = asym / scale;
        if rel > SYMMETRY_RTOL {
            return Err(Error::NotSymmetric { asymmetry: rel });
        }
        Ok(SymmetricOperator::Dense(Arc::new(m)))
    }

    /// Wraps a matrix already known to be symmetric (e.g. produced by
    /// [`symmetrize`] or assembled from an eigendecomposition).
    pub(crate) fn dense_unchecked(m: Matrix) -> Self {
        SymmetricOperator::Dense(Arc::new(m))
    }

    pub fn matrix_free(
        dim: usize,
        apply: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        SymmetricOperator::MatrixFree {
            dim,
            apply: Arc::new(apply),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SymmetricOperator::dense_unchecked(Matrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        SymmetricOperator::dense_unchecked(Matrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymmetricOperator::Dense(m) => m.nrows(),
            SymmetricOperator::MatrixFree { dim, .. } => *dim,
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        match self {
            SymmetricOperator::Dense(m) => m.as_ref() * v,
            SymmetricOperator::MatrixFree { apply, .. } => apply(v),
        }
    }

    pub fn as_dense(&self) -> Option<&Matrix> {
        match self {
            SymmetricOperator::Dense(m) => Some(m),
            SymmetricOperator::MatrixFree { .. } => None,
        }
    }

    /// True for an explicitly zero dense operator.
    pub fn is_dense_zero(&self) -> bool {
        self.as_dense().is_some_and(|m| m.iter().all(|&x| x == 0.0))
    }

    /// Largest eigenvalue estimate by power iteration with a deterministic
    /// start. Intended for step-size selection in the projected-gradient
    /// inner loop; accurate to ~1e-6 relative on non-degenerate spectra.
    pub fn lambda_max_estimate(&self) -> f64 {
        let d = self.dim();
        if d == 0 {
            return 0.0;
        }
        // Deterministic pseudo-random start so repeated runs agree bit-wise.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut v = Vector::from_fn(d, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        v /= n;
        let mut lambda = 0.0f64;
        for _ in 0..200 {
            let w = self.apply(&v);
            let next = w.norm();
            if next == 0.0 {
                return 0.0;
            }
            let rayleigh = v.dot(&w);
            if (rayleigh.abs() - lambda.abs()).abs() <= 1e-8 * lambda.abs().max(1.0) {
                lambda = rayleigh;
                break;
            }
            lambda = rayleigh;
            v = w / next;
        }
        lambda.abs()
    }
}

/// Returns `(M + M^T) / 2` as a symmetric operator. Idempotent.
pub fn symmetrize(m: &Matrix) -> Result<SymmetricOperator> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("symmetrize input".into()));
    }
    let sym = (m + m.transpose()) * 0.5;
    Ok(SymmetricOperator::dense_unchecked(sym))
}

/// Projects a dense symmetric operator onto the PSD cone by clipping negative
/// eigenvalues to zero.
pub fn project_psd(op: &SymmetricOperator) -> Result<SymmetricOperator> {
    let m = op.as_dense().ok_or_else(|| {
        Error::InvalidArgument("PSD projection requires a dense operator".into())
    })?;
    let eig = SymmetricEigen::try_new(m.clone(), 1e-13, 8192).ok_or_else(|| {
        Error::EigenFailure(format!(
            "symmetric eigensolver stalled on a {}x{} matrix (frobenius norm {:.3e}, max |entry| {:.3e})",
            m.nrows(),
            m.ncols(),
            m.norm(),
            m.amax(),
        ))
    })?;
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(op.clone());
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let scaled = &eig.eigenvectors * Matrix::from_diagonal(&clipped);
    let rebuilt = &scaled * eig.eigenvectors.transpose();
    // Kill the rounding asymmetry left by the two products.
    let sym = (&rebuilt + rebuilt.transpose()) * 0.5;
    Ok(SymmetricOperator::dense_unchecked(sym))
}

/// Solves `M y = rhs` for symmetric positive definite `M`.
///
/// Dense operators go through Cholesky with iterative refinement until
/// `||M y - rhs|| <= tol * ||rhs||`; matrix-free operators use conjugate
/// gradients with an iteration cap of `10 * dim`.
pub fn solve_spd(op: &SymmetricOperator, rhs: &Vector, tol: f64) -> Result<Vector> {
    if op.dim() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} vs rhs len {}",
            op.dim(),
            rhs.len()
        )));
    }
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(Vector::zeros(rhs.len()));
    }
    match op {
        SymmetricOperator::Dense(m) => {
            let chol = Cholesky::new(m.as_ref().clone()).ok_or(Error::NotPositiveDefinite)?;
            let mut y = chol.solve(rhs);
            for _ in 0..4 {
                let residual = rhs - op.apply(&y);
                if residual.norm() <= tol * rhs_norm {
                    return Ok(y);
                }
                y += chol.solve(&residual);
            }
            let residual = (rhs - op.apply(&y)).norm();
            if residual <= tol * rhs_norm {
                Ok(y)
            } else {
                Err(Error::NonConvergence {
                    iterations: 4,
                    residual,
                    tol: tol * rhs_norm,
                })
            }
        }
        SymmetricOperator::MatrixFree { dim, .. } => {
            conjugate_gradient(op, rhs, tol, CG_CAP_FACTOR * (*dim).max(1))
        }
    }
}

fn conjugate_gradient(
    op: &SymmetricOperator,
    rhs: &Vector,
    tol: f64,
    cap: usize,
) -> Result<Vector> {
    let rhs_norm = rhs.norm();
    let target = tol * rhs_norm;
    let mut x = Vector::zeros(rhs.len());
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs = r.norm_squared();
    for k in 0..cap {
        if rs.sqrt() <= target {
            return Ok(x);
        }
        let ap = op.apply(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let alpha = rs / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rs_next = r.norm_squared();
        // Periodic true-residual refresh guards against drift.
        if k % 50 == 49 {
            r = rhs - op.apply(&x);
        }
        p = &r + (rs_next / rs) * p;
        rs = r.norm_squared();
        let _ = rs_next;
    }
    let residual = (rhs - op.apply(&x)).norm();
    if residual <= target {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            iterations: cap,
            residual,
            tol: target,
        })
    }
}

/// Finds a root of a continuous monotone function on `[lo, hi]` by bisection.
/// Stops when `|phi(mid)| <= tol` or the bracket width drops below `tol`.
pub fn find_root_monotone(phi: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad bracket [{lo}, {hi}]"
        )));
    }
    let f_lo = phi(lo);
    let f_hi = phi(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let (mut a, mut b, rising) = if f_lo < 0.0 { (lo, hi, true) } else { (lo, hi, false) };
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let f_mid = phi(mid);
        if f_mid.abs() <= tol || (b - a) <= tol {
            return Ok(mid);
        }
        let below = if rising { f_mid < 0.0 } else { f_mid > 0.0 };
        if below {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(mid)
}
