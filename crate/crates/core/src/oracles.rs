//! First/second-order oracle wrappers: deterministic, additive-noise and
//! minibatch feedback, the Taylor prediction operator, and the residual
//! driving the adaptive step-size.
//!
//! Randomness is stream-addressed: each `(seed, stream)` pair yields a
//! bit-reproducible sample regardless of call order, which is what makes
//! reruns byte-identical and the lag-one contract auditable.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{project_psd, symmetrize, SymmetricOperator};
use crate::problems::Objective;
use crate::{ensure_finite, Error, Matrix, Result, Vector};

/// Oracle feedback regime.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleMode {
    Deterministic,
    AdditiveNoise { sigma_g: f64, sigma_h: f64 },
    Minibatch { batch_size: usize },
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub mode: OracleMode,
    /// Clip negative eigenvalues of noisy Hessian estimates so the
    /// extrapolation subproblem stays convex.
    pub psd_repair: bool,
    pub seed: u64,
}

impl OracleConfig {
    pub fn deterministic() -> Self {
        OracleConfig {
            mode: OracleMode::Deterministic,
            psd_repair: true,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.mode {
            OracleMode::AdditiveNoise { sigma_g, sigma_h } => {
                if sigma_g < 0.0 || sigma_h < 0.0 || !sigma_g.is_finite() || !sigma_h.is_finite()
                {
                    return Err(Error::InvalidArgument(format!(
                        "noise levels must be finite and nonnegative, got sigma_g={sigma_g}, sigma_h={sigma_h}"
                    )));
                }
            }
            OracleMode::Minibatch { batch_size } => {
                if batch_size == 0 {
                    return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
                }
            }
            OracleMode::Deterministic => {}
        }
        Ok(())
    }
}

/// Coefficient on the Hessian term of the Taylor prediction. `1.0` matches
/// the extrapolation subproblem's own stationarity condition and makes the
/// prediction exact on quadratics; `0.5` is kept as a toggle for fidelity
/// experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorFactor(f64);

impl TaylorFactor {
    pub const FULL: TaylorFactor = TaylorFactor(1.0);
    pub const HALF: TaylorFactor = TaylorFactor(0.5);

    pub fn new(factor: f64) -> Result<Self> {
        if factor == 1.0 || factor == 0.5 {
            Ok(TaylorFactor(factor))
        } else {
            Err(Error::InvalidArgument(format!(
                "taylor factor must be 1 or 0.5, got {factor}"
            )))
        }
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

impl Default for TaylorFactor {
    fn default() -> Self {
        TaylorFactor::FULL
    }
}

/// Where a sample came from.
#[derive(Clone, Debug)]
pub enum Provenance {
    Deterministic,
    Noisy { sigma_g: f64, sigma_h: f64 },
    Minibatch { indices: Vec<usize> },
}

/// One joint gradient/Hessian observation at a point.
#[derive(Clone, Debug)]
pub struct OracleSample {
    pub grad: Vector,
    pub hess: SymmetricOperator,
    pub provenance: Provenance,
}

/// Addresses the i.i.d. randomness of one oracle call: `xi_t` for the anchor
/// sample and `xi_{t+1/2}` for the fresh gradient at the lead average.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stream {
    pub t: u64,
    pub half: bool,
}

impl Stream {
    pub fn anchor(t: u64) -> Self {
        Stream { t, half: false }
    }

    pub fn lead(t: u64) -> Self {
        Stream { t, half: true }
    }

    fn index(&self) -> u64 {
        2 * self.t + self.half as u64
    }
}

/// Structural call log for auditing the lag-one contract and per-iteration
/// call accounting.
#[derive(Clone, Debug, PartialEq)]
pub enum CallEvent {
    GammaRead { t: u64 },
    Gradient { stream: Stream },
    Hessian { stream: Stream },
}

/// A seeded oracle bound to one objective. Each run owns its own instance.
pub struct Oracle<'a> {
    obj: &'a dyn Objective,
    cfg: OracleConfig,
    grad_calls: u64,
    hess_calls: u64,
    log: Vec<CallEvent>,
}

impl std::fmt::Debug for Oracle<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("cfg", &self.cfg)
            .field("grad_calls", &self.grad_calls)
            .field("hess_calls", &self.hess_calls)
            .finish()
    }
}

impl<'a> Oracle<'a> {
    pub fn new(obj: &'a dyn Objective, cfg: OracleConfig) -> Result<Self> {
        cfg.validate()?;
        if matches!(cfg.mode, OracleMode::Minibatch { .. }) && obj.as_finite_sum().is_none() {
            return Err(Error::UnsupportedMode(
                "minibatch oracle requires a finite-sum (dataset) objective".into(),
            ));
        }
        Ok(Oracle {
            obj,
            cfg,
            grad_calls: 0,
            hess_calls: 0,
            log: Vec::new(),
        })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    pub fn is_deterministic(&self) -> bool {
        match self.cfg.mode {
            OracleMode::Deterministic => true,
            OracleMode::AdditiveNoise { sigma_g, sigma_h } => sigma_g == 0.0 && sigma_h == 0.0,
            OracleMode::Minibatch { batch_size } => {
                self.obj
                    .as_finite_sum()
                    .is_some_and(|fs| batch_size >= fs.num_samples())
            }
        }
    }

    /// Cumulative (gradient, Hessian) call counts.
    pub fn counts(&self) -> (u64, u64) {
        (self.grad_calls, self.hess_calls)
    }

    pub fn log(&self) -> &[CallEvent] {
        &self.log
    }

    /// Records that the step-size for iteration `t` was read; must precede
    /// any sampling on the `t` streams.
    pub fn note_gamma_read(&mut self, t: u64) {
        self.log.push(CallEvent::GammaRead { t });
    }

    fn rng_for(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream.index());
        rng
    }

    /// Joint gradient + Hessian sample at `x` using the randomness of
    /// `stream`. Minibatch mode reuses one index batch for both.
    pub fn sample(&mut self, x: &Vector, stream: Stream) -> Result<OracleSample> {
        ensure_finite(x, "oracle query point")?;
        self.grad_calls += 1;
        self.hess_calls += 1;
        self.log.push(CallEvent::Gradient { stream });
        self.log.push(CallEvent::Hessian { stream });
        match self.cfg.mode {
            OracleMode::Deterministic => Ok(self.exact(x)),
            OracleMode::AdditiveNoise { sigma_g, sigma_h } => {
                if sigma_g == 0.0 && sigma_h == 0.0 {
                    // Zero-noise degeneracy: bit-identical to deterministic.
                    return Ok(self.exact(x));
                }
                let mut rng = self.rng_for(stream);
                let grad = noisy_gradient(self.obj, x, sigma_g, &mut rng);
                let hess = if sigma_h == 0.0 {
                    self.obj.hessian(x)
                } else {
                    let noisy = noisy_hessian(self.obj, x, sigma_h, &mut rng)?;
                    if self.cfg.psd_repair {
                        project_psd(&noisy)?
                    } else {
                        noisy
                    }
                };
                Ok(OracleSample {
                    grad,
                    hess,
                    provenance: Provenance::Noisy { sigma_g, sigma_h },
                })
            }
            OracleMode::Minibatch { batch_size } => {
                let fs = self.finite_sum()?;
                let n = fs.num_samples();
                if batch_size >= n {
                    // Full-batch degeneracy: identical to deterministic.
                    return Ok(self.exact(x));
                }
                let mut rng = self.rng_for(stream);
                let indices = rand::seq::index::sample(&mut rng, n, batch_size).into_vec();
                Ok(OracleSample {
                    grad: fs.batch_gradient(x, &indices),
                    hess: fs.batch_hessian(x, &indices),
                    provenance: Provenance::Minibatch { indices },
                })
            }
        }
    }

    /// Gradient-only sample (one gradient call, no Hessian).
    pub fn sample_gradient(&mut self, x: &Vector, stream: Stream) -> Result<Vector> {
        ensure_finite(x, "oracle query point")?;
        self.grad_calls += 1;
        self.log.push(CallEvent::Gradient { stream });
        match self.cfg.mode {
            OracleMode::Deterministic => Ok(self.obj.gradient(x)),
            OracleMode::AdditiveNoise { sigma_g, .. } => {
                if sigma_g == 0.0 {
                    return Ok(self.obj.gradient(x));
                }
                let mut rng = self.rng_for(stream);
                Ok(noisy_gradient(self.obj, x, sigma_g, &mut rng))
            }
            OracleMode::Minibatch { batch_size } => {
                let fs = self.finite_sum()?;
                let n = fs.num_samples();
                if batch_size >= n {
                    return Ok(self.obj.gradient(x));
                }
                let mut rng = self.rng_for(stream);
                let indices = rand::seq::index::sample(&mut rng, n, batch_size).into_vec();
                Ok(fs.batch_gradient(x, &indices))
            }
        }
    }

    fn exact(&self, x: &Vector) -> OracleSample {
        OracleSample {
            grad: self.obj.gradient(x),
            hess: self.obj.hessian(x),
            provenance: Provenance::Deterministic,
        }
    }

    fn finite_sum(&self) -> Result<&dyn crate::problems::FiniteSum> {
        self.obj.as_finite_sum().ok_or_else(|| {
            Error::UnsupportedMode(
                "minibatch oracle requires a finite-sum (dataset) objective".into(),
            )
        })
    }
}

/// `grad = exact + sigma_g * z / sqrt(d)` with standard normal `z`, so
/// `E ||noise||^2 = sigma_g^2` exactly.
fn noisy_gradient(obj: &dyn Objective, x: &Vector, sigma_g: f64, rng: &mut ChaCha8Rng) -> Vector {
    let d = x.len();
    let mut g = obj.gradient(x);
    let scale = sigma_g / (d as f64).sqrt();
    for i in 0..d {
        g[i] += scale * rng.sample::<f64, _>(StandardNormal);
    }
    g
}

/// `hess = symmetrize(exact + c * (G + G^T)/2)` with i.i.d. standard normal
/// `G` and `c` chosen so the noise satisfies `E ||noise||_F^2 = sigma_h^2`
/// (hence the same bound in operator norm).
fn noisy_hessian(
    obj: &dyn Objective,
    x: &Vector,
    sigma_h: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SymmetricOperator> {
    let d = x.len();
    let exact = obj.hessian(x);
    let base = exact.as_dense().ok_or_else(|| {
        Error::UnsupportedMode("additive Hessian noise requires a dense Hessian".into())
    })?;
    let gauss = Matrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let scale = sigma_h / (d as f64 * (d as f64 + 1.0) / 2.0).sqrt();
    let noisy = base + (&gauss + gauss.transpose()) * (0.5 * scale);
    symmetrize(&noisy)
}

/// Gradient of the second-order Taylor model anchored at `anchor`:
/// `g + factor * H (x - anchor)`.
pub fn taylor_operator(
    sample: &OracleSample,
    x: &Vector,
    anchor: &Vector,
    tf: TaylorFactor,
) -> Vector {
    if x == anchor {
        return sample.grad.clone();
    }
    &sample.grad + sample.hess.apply(&(x - anchor)) * tf.get()
}

/// `|| g_lead - (g_anchor + factor * H_anchor (x_bar - x_tilde)) ||` — the
/// quantity accumulated by the adaptive step-size.
pub fn step_residual(
    anchor: &OracleSample,
    lead_grad: &Vector,
    x_bar: &Vector,
    x_tilde: &Vector,
    tf: TaylorFactor,
) -> f64 {
    (lead_grad - taylor_operator(anchor, x_bar, x_tilde, tf)).norm()
}
