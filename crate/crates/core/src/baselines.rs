//! Comparison optimizers sharing the objective/set/oracle interfaces and the
//! Extra-Newton trace schema, so gap-versus-oracle-calls plots line up.

use std::time::Instant;

use crate::constraints::FeasibleSet;
use crate::extra_newton::{Init, IterationRecord, RunOutput, Trace, TraceMeta};
use crate::numerics::SymmetricOperator;
use crate::oracles::{Oracle, OracleConfig, OracleMode, Stream};
use crate::problems::Objective;
use crate::schedule::StepState;
use crate::{ensure_finite, Error, Result, Vector};

/// Abort threshold: objective above `1e8 x` the initial value counts as
/// divergence.
const DIVERGENCE_FACTOR: f64 = 1e8;

/// Baseline algorithm selector with per-kind hyperparameters. None of these
/// are tuned internally; sweeps live in the harness.
#[derive(Clone, Debug)]
pub enum BaselineKind {
    /// `x <- P(x - eta g)`.
    ProjGrad { eta: f64 },
    /// Projected accelerated gradient with fixed step.
    NesterovAgd { eta: f64 },
    /// Extragradient with the same accumulator step-size shape as
    /// Extra-Newton but first-order-only anchors (`a_t = b_t = t`).
    AdaptiveExtraGrad { gamma: Option<f64>, gamma0: f64 },
    /// `x <- P(x - (H + lambda I)^{-1} g)` with `lambda = sqrt(l_hat ||g||)`.
    RegularizedNewton { l_hat: f64 },
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::ProjGrad { .. } => "proj_grad",
            BaselineKind::NesterovAgd { .. } => "nesterov_agd",
            BaselineKind::AdaptiveExtraGrad { .. } => "adaptive_extra_grad",
            BaselineKind::RegularizedNewton { .. } => "reg_newton",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            BaselineKind::ProjGrad { eta } | BaselineKind::NesterovAgd { eta } => {
                *eta > 0.0 && eta.is_finite()
            }
            BaselineKind::AdaptiveExtraGrad { gamma, gamma0 } => {
                gamma.map_or(true, |g| g > 0.0 && g.is_finite()) && *gamma0 > 0.0
            }
            BaselineKind::RegularizedNewton { l_hat } => *l_hat > 0.0 && l_hat.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid hyperparameters for {}",
                self.name()
            )))
        }
    }
}

/// Runs a baseline for `horizon` iterations, producing a trace in the shared
/// schema. A diverged run returns early with the flag set instead of erroring.
pub fn run_baseline(
    kind: &BaselineKind,
    obj: &dyn Objective,
    set: &FeasibleSet,
    oracle_cfg: OracleConfig,
    horizon: u64,
    init: Init,
) -> Result<RunOutput> {
    kind.validate()?;
    if horizon < 1 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    if let BaselineKind::RegularizedNewton { .. } = kind {
        if matches!(oracle_cfg.mode, OracleMode::AdditiveNoise { sigma_h, .. } if sigma_h > 0.0)
            && !oracle_cfg.psd_repair
        {
            return Err(Error::InvalidArgument(
                "regularized Newton needs deterministic or PSD-repaired Hessians".into(),
            ));
        }
    }
    let x0 = match init {
        Init::Auto => set.project(&Vector::zeros(obj.dim())),
        Init::Point(p) => {
            ensure_finite(&p, "initial point")?;
            set.project(&p)
        }
    };
    let seed = oracle_cfg.seed;
    let mut oracle = Oracle::new(obj, oracle_cfg)?;
    let meta = TraceMeta {
        algorithm: kind.name().into(),
        p: 1.0,
        gamma_scale: match kind {
            BaselineKind::AdaptiveExtraGrad { gamma, .. } => {
                gamma.unwrap_or_else(|| set.diameter().unwrap_or(1.0))
            }
            _ => 1.0,
        },
        gamma0: match kind {
            BaselineKind::AdaptiveExtraGrad { gamma0, .. } => *gamma0,
            _ => 1.0,
        },
        taylor_factor: 0.0,
        deterministic: oracle.is_deterministic(),
        seed,
        warnings: Vec::new(),
    };
    match kind {
        BaselineKind::ProjGrad { eta } => {
            first_order_loop(obj, set, &mut oracle, meta, horizon, x0, ProjGradState { eta: *eta })
        }
        BaselineKind::NesterovAgd { eta } => first_order_loop(
            obj,
            set,
            &mut oracle,
            meta,
            horizon,
            x0.clone(),
            AgdState {
                eta: *eta,
                theta: 1.0,
                y: x0.clone(),
                x_prev: x0,
            },
        ),
        BaselineKind::AdaptiveExtraGrad { gamma, gamma0 } => {
            let scale = gamma.unwrap_or_else(|| set.diameter().unwrap_or(1.0));
            adaptive_extragrad(obj, set, &mut oracle, meta, horizon, x0, scale, *gamma0)
        }
        BaselineKind::RegularizedNewton { l_hat } => {
            reg_newton(obj, set, &mut oracle, meta, horizon, x0, *l_hat)
        }
    }
}

fn diverged(f: f64, f0: f64) -> bool {
    !f.is_finite() || f > DIVERGENCE_FACTOR * f0.abs().max(1.0)
}

fn record(
    t: u64,
    gamma: f64,
    residual: f64,
    reporting: &Vector,
    lead: &Vector,
    step_dist: f64,
    f: f64,
    oracle: &Oracle<'_>,
    started: &Instant,
) -> IterationRecord {
    let (grad_calls, hess_calls) = oracle.counts();
    IterationRecord {
        t,
        gamma,
        residual,
        x_lead: lead.clone(),
        xbar_lead: reporting.clone(),
        f_at_xbar: f,
        step_dist,
        grad_calls,
        hess_calls,
        wall: started.elapsed(),
    }
}

trait FirstOrderStep {
    /// One update from `x`; returns (next iterate, step length used).
    fn advance(
        &mut self,
        obj: &dyn Objective,
        set: &FeasibleSet,
        oracle: &mut Oracle<'_>,
        t: u64,
        x: &Vector,
    ) -> Result<(Vector, f64)>;
}

struct ProjGradState {
    eta: f64,
}

impl FirstOrderStep for ProjGradState {
    fn advance(
        &mut self,
        _obj: &dyn Objective,
        set: &FeasibleSet,
        oracle: &mut Oracle<'_>,
        t: u64,
        x: &Vector,
    ) -> Result<(Vector, f64)> {
        let g = oracle.sample_gradient(x, Stream::anchor(t))?;
        Ok((set.project(&(x - &g * self.eta)), self.eta))
    }
}

struct AgdState {
    eta: f64,
    theta: f64,
    y: Vector,
    x_prev: Vector,
}

impl FirstOrderStep for AgdState {
    fn advance(
        &mut self,
        _obj: &dyn Objective,
        set: &FeasibleSet,
        oracle: &mut Oracle<'_>,
        t: u64,
        _x: &Vector,
    ) -> Result<(Vector, f64)> {
        let g = oracle.sample_gradient(&self.y, Stream::anchor(t))?;
        let x_next = set.project(&(&self.y - &g * self.eta));
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * self.theta * self.theta).sqrt());
        let momentum = (self.theta - 1.0) / theta_next;
        self.y = &x_next + (&x_next - &self.x_prev) * momentum;
        self.theta = theta_next;
        self.x_prev = x_next.clone();
        Ok((x_next, self.eta))
    }
}

fn first_order_loop(
    obj: &dyn Objective,
    set: &FeasibleSet,
    oracle: &mut Oracle<'_>,
    meta: TraceMeta,
    horizon: u64,
    x0: Vector,
    mut stepper: impl FirstOrderStep,
) -> Result<RunOutput> {
    let started = Instant::now();
    let f0 = obj.value(&x0);
    let mut x = x0;
    let mut records = Vec::with_capacity(horizon as usize);
    let mut was_diverged = false;
    for t in 1..=horizon {
        let (x_next, eta) = stepper.advance(obj, set, oracle, t, &x)?;
        let f = obj.value(&x_next);
        let dist = (&x_next - &x).norm();
        records.push(record(t, eta, 0.0, &x_next, &x_next, dist, f, oracle, &started));
        x = x_next;
        if diverged(f, f0) {
            was_diverged = true;
            break;
        }
    }
    Ok(RunOutput {
        x_bar: x,
        trace: Trace { meta, records },
        diverged: was_diverged,
    })
}

/// Extragradient with averaging weights `a_t = b_t = t` and the accumulator
/// step-size `gamma / sqrt(gamma0 + sum a_s^2 ||g_lead - g_anchor||^2)`.
#[allow(clippy::too_many_arguments)]
fn adaptive_extragrad(
    obj: &dyn Objective,
    set: &FeasibleSet,
    oracle: &mut Oracle<'_>,
    meta: TraceMeta,
    horizon: u64,
    x0: Vector,
    gamma_scale: f64,
    gamma0: f64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let mut step = StepState::new(gamma_scale, gamma0)?;
    let mut x = x0.clone();
    let mut lead_sum = Vector::zeros(x.len());
    let mut big_b = 0.0f64;
    let f0 = obj.value(&x0);
    let mut records = Vec::with_capacity(horizon as usize);
    let mut was_diverged = false;
    let mut x_bar_final = x0;
    for t in 1..=horizon {
        let a = t as f64;
        let b = t as f64;
        let total_b = big_b + b;
        let gamma = step.current_gamma();
        oracle.note_gamma_read(t);
        let x_tilde = (&x * b + &lead_sum) / total_b;
        let g_anchor = oracle.sample_gradient(&x_tilde, Stream::anchor(t))?;
        let x_lead = set.project(&(&x - &g_anchor * (gamma * a)));
        let x_bar = (&x_lead * b + &lead_sum) / total_b;
        let g_lead = oracle.sample_gradient(&x_bar, Stream::lead(t))?;
        let x_next = set.project(&(&x - &g_lead * (gamma * a)));
        let residual = (&g_lead - &g_anchor).norm();
        step.push_residual(a, residual)?;
        lead_sum += &x_lead * b;
        big_b = total_b;
        let f = obj.value(&x_bar);
        let dist = (&x_lead - &x).norm();
        records.push(record(t, gamma, residual, &x_bar, &x_lead, dist, f, oracle, &started));
        x = x_next;
        x_bar_final = x_bar;
        if diverged(f, f0) {
            was_diverged = true;
            break;
        }
    }
    Ok(RunOutput {
        x_bar: x_bar_final,
        trace: Trace { meta, records },
        diverged: was_diverged,
    })
}

fn reg_newton(
    obj: &dyn Objective,
    set: &FeasibleSet,
    oracle: &mut Oracle<'_>,
    meta: TraceMeta,
    horizon: u64,
    x0: Vector,
    l_hat: f64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let f0 = obj.value(&x0);
    let mut x = x0;
    let mut records = Vec::with_capacity(horizon as usize);
    let mut was_diverged = false;
    for t in 1..=horizon {
        let sample = oracle.sample(&x, Stream::anchor(t))?;
        let gnorm = sample.grad.norm();
        let x_next = if gnorm == 0.0 {
            x.clone()
        } else {
            let lambda = (l_hat * gnorm).sqrt();
            let shifted = match sample.hess.as_dense() {
                Some(h) => {
                    let mut m = h.clone();
                    for i in 0..m.nrows() {
                        m[(i, i)] += lambda;
                    }
                    SymmetricOperator::dense_unchecked(m)
                }
                None => {
                    let h = sample.hess.clone();
                    let d = x.len();
                    SymmetricOperator::matrix_free(d, move |v| h.apply(v) + v * lambda)
                }
            };
            let direction = crate::numerics::solve_spd(&shifted, &sample.grad, 1e-10)?;
            set.project(&(&x - direction))
        };
        let f = obj.value(&x_next);
        let dist = (&x_next - &x).norm();
        records.push(record(t, 0.0, 0.0, &x_next, &x_next, dist, f, oracle, &started));
        x = x_next;
        if diverged(f, f0) {
            was_diverged = true;
            break;
        }
    }
    Ok(RunOutput {
        x_bar: x,
        trace: Trace { meta, records },
        diverged: was_diverged,
    })
}
