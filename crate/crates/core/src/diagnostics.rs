//! Executable convergence checks run against traces: the online-to-batch
//! conversion bound, the regret template bound, the sqrt-sum sandwich, rate
//! slopes, and step-size noise adaptivity.

use serde::{Deserialize, Serialize};

use crate::constraints::FeasibleSet;
use crate::extra_newton::Trace;
use crate::problems::Objective;
use crate::schedule::WeightSchedule;
use crate::{Error, Result, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one executable check. For executed checks,
/// `status == Pass  <=>  worst_margin >= -tolerance`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub tolerance: f64,
    /// Most-violated slack across the series (`None` when skipped).
    pub worst_margin: Option<f64>,
    /// Per-horizon slack series (bound minus measured quantity).
    pub slacks: Vec<f64>,
    pub note: Option<String>,
}

impl CheckReport {
    fn from_slacks(name: &str, tolerance: f64, slacks: Vec<f64>, note: Option<String>) -> Self {
        let worst = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        let status = if worst >= -tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckReport {
            name: name.into(),
            status,
            tolerance,
            worst_margin: Some(worst),
            slacks,
            note,
        }
    }

    fn skipped(name: &str, note: &str) -> Self {
        CheckReport {
            name: name.into(),
            status: CheckStatus::Skipped,
            tolerance: 0.0,
            worst_margin: None,
            slacks: Vec::new(),
            note: Some(note.into()),
        }
    }

    /// True unless the check executed and failed.
    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

fn weight_hypothesis_gate(sched: &WeightSchedule, horizon: u64) -> Result<()> {
    let mut prev = f64::INFINITY;
    for t in 1..=horizon {
        let ratio = sched.a(t) / sched.b(t);
        if ratio > prev * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "weight hypothesis violated: a_t/b_t increases at t={t}"
            )));
        }
        prev = ratio;
    }
    Ok(())
}

/// Anytime online-to-batch conversion: at every horizon `T` in the trace,
/// `f(xbar_{T+1/2}) - f(x_star) <= R_T(x_star) / (a_T B_T / b_T)` where
/// `R_T(x_star) = sum_{t<=T} a_t <grad f(xbar_{t+1/2}), x_{t+1/2} - x_star>`
/// is the weighted regret computed with exact gradients.
///
/// `f_star` must be the caller's `f(x_star)` for the same comparator point.
/// The comparator may be any feasible point; the reference optimum gives the
/// tightest reading.
pub fn check_conversion(
    trace: &Trace,
    obj: &dyn Objective,
    sched: &WeightSchedule,
    x_star: &Vector,
    f_star: f64,
    tolerance: f64,
) -> Result<CheckReport> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    if x_star.len() != obj.dim() {
        return Err(Error::DimensionMismatch(format!(
            "comparator dim {} vs objective dim {}",
            x_star.len(),
            obj.dim()
        )));
    }
    let horizon = trace.records.last().unwrap().t;
    weight_hypothesis_gate(sched, horizon)?;
    let mut own = sched.clone();
    let mut regret = 0.0f64;
    let mut comp = 0.0f64;
    let mut slacks = Vec::with_capacity(trace.len());
    for rec in &trace.records {
        let w = own.weights_at(rec.t)?;
        let g = obj.gradient(&rec.xbar_lead);
        let term = w.a * g.dot(&(&rec.x_lead - x_star));
        // Kahan-compensated regret sum; the terms grow like t^2.
        let y = term - comp;
        let t_sum = regret + y;
        comp = (t_sum - regret) - y;
        regret = t_sum;
        let bound = regret / (w.a * w.big_b / w.b);
        let gap = rec.f_at_xbar - f_star;
        slacks.push(bound - gap);
    }
    Ok(CheckReport::from_slacks(
        "conversion",
        tolerance,
        slacks,
        None,
    ))
}

/// Deterministic regret template: at every horizon `T`,
/// `R_T(x_star) <= 1/2 [ 3 D^2 / gamma_{T+1}
///                      + sum_{t<=T} gamma_{t+1} a_t^2 residual_t^2
///                      - sum_{t<=T} ||x_{t+1/2} - x_t||^2 / gamma_{t+1} ]`.
///
/// Holds per path only for deterministic oracles; stochastic traces are
/// reported as skipped since the stochastic version is an expectation bound.
pub fn check_template_inequality(
    trace: &Trace,
    obj: &dyn Objective,
    set: &FeasibleSet,
    x_star: &Vector,
    tolerance: f64,
) -> Result<CheckReport> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    if !trace.meta.deterministic {
        return Ok(CheckReport::skipped(
            "template_inequality",
            "skipped (expectation-only): the stochastic template bound holds in \
             expectation, not per sample path",
        ));
    }
    let diameter = set.diameter()?;
    let d_squared = diameter * diameter;
    let mut sched = WeightSchedule::new_unchecked(trace.meta.p);
    let horizon = trace.records.last().unwrap().t;
    weight_hypothesis_gate(&sched, horizon)?;

    let gamma_scale = trace.meta.gamma_scale;
    let gamma0 = trace.meta.gamma0;
    let mut acc = 0.0f64; // sum a_s^2 r_s^2 for s <= t
    let mut regret = 0.0f64;
    let mut sum_pos = 0.0f64;
    let mut sum_neg = 0.0f64;
    let mut slacks = Vec::with_capacity(trace.len());
    for rec in &trace.records {
        let w = sched.weights_at(rec.t)?;
        // Cross-check the recorded step-size against the lag-one recursion.
        let expected_gamma = gamma_scale / (gamma0 + acc).sqrt();
        if (rec.gamma - expected_gamma).abs() > 1e-9 * expected_gamma.max(1e-300) {
            return Err(Error::Integrity(format!(
                "recorded gamma at t={} ({:.17e}) does not match the step-size \
                 recursion ({:.17e})",
                rec.t, rec.gamma, expected_gamma
            )));
        }
        acc += w.a * w.a * rec.residual * rec.residual;
        let gamma_next = gamma_scale / (gamma0 + acc).sqrt();

        let g = obj.gradient(&rec.xbar_lead);
        regret += w.a * g.dot(&(&rec.x_lead - x_star));
        sum_pos += gamma_next * w.a * w.a * rec.residual * rec.residual;
        sum_neg += rec.step_dist * rec.step_dist / gamma_next;
        let bound = 0.5 * (3.0 * d_squared / gamma_next + sum_pos - sum_neg);
        slacks.push(bound - regret);
    }
    Ok(CheckReport::from_slacks(
        "template_inequality",
        tolerance,
        slacks,
        None,
    ))
}

/// Sandwich bound for nonnegative sequences:
/// `sqrt(sum a) <= sum_t a_t / sqrt(sum_{i<=t} a_i) <= 2 sqrt(sum a)`,
/// checked at every prefix. Terms with a zero running sum contribute zero.
pub fn check_sqrt_sum_lemma(alphas: &[f64], tolerance: f64) -> Result<CheckReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    if alphas.iter().any(|&a| a < 0.0 || !a.is_finite()) {
        return Err(Error::InvalidArgument(
            "sequence entries must be nonnegative and finite".into(),
        ));
    }
    if alphas.iter().all(|&a| a == 0.0) {
        return Err(Error::InvalidArgument(
            "sequence must contain a positive entry".into(),
        ));
    }
    let mut total = 0.0f64;
    let mut weighted = 0.0f64;
    let mut slacks = Vec::with_capacity(2 * alphas.len());
    for &a in alphas {
        total += a;
        if a > 0.0 {
            weighted += a / total.sqrt();
        }
        if total == 0.0 {
            continue;
        }
        let root = total.sqrt();
        let scale = root.max(1.0);
        slacks.push((weighted - root) / scale);
        slacks.push((2.0 * root - weighted) / scale);
    }
    Ok(CheckReport::from_slacks(
        "sqrt_sum_lemma",
        tolerance,
        slacks,
        None,
    ))
}

/// Least-squares slope of `log(gap)` against `log(T)` over the window
/// `T in [window.0, window.1]`. Errors on non-positive gaps in the window.
pub fn estimate_rate_slope(gaps: &[(u64, f64)], window: (u64, u64)) -> Result<f64> {
    let points: Vec<(f64, f64)> = gaps
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|&(t, gap)| {
            if gap > 0.0 {
                Ok(((t as f64).ln(), gap.ln()))
            } else {
                Err(Error::InvalidArgument(format!(
                    "non-positive gap {gap} at T={t} inside the slope window"
                )))
            }
        })
        .collect::<Result<_>>()?;
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "slope window [{}, {}] covers {} point(s); need at least 2",
            window.0,
            window.1,
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "slope window has no spread in T".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Thresholds for [`check_noise_adaptivity`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptivityThresholds {
    /// Deterministic plateau: `gamma_T / gamma_{T/2}` must stay above this.
    pub plateau_min: f64,
    /// Stochastic decay: `gamma_T / gamma_{T/2}` must stay below this.
    pub decay_max: f64,
}

impl Default for AdaptivityThresholds {
    fn default() -> Self {
        AdaptivityThresholds {
            plateau_min: 0.9,
            decay_max: 0.8,
        }
    }
}

/// Compares step-size trajectories of a deterministic and a stochastic run
/// of equal horizon: the deterministic step-size must dominate and plateau
/// over the last doubling, while the stochastic one keeps decaying.
/// Identical series (zero-noise degeneracy) are reported as an equal pass.
pub fn check_noise_adaptivity(
    trace_det: &Trace,
    trace_stoch: &Trace,
    thresholds: AdaptivityThresholds,
) -> Result<CheckReport> {
    if trace_det.len() != trace_stoch.len() || trace_det.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "horizon mismatch: {} vs {}",
            trace_det.len(),
            trace_stoch.len()
        )));
    }
    let det = trace_det.gamma_series();
    let sto = trace_stoch.gamma_series();
    let horizon = det.len();
    let half = horizon / 2;
    if half == 0 {
        return Err(Error::InvalidArgument("horizon too short".into()));
    }
    let equal = det
        .iter()
        .zip(sto.iter())
        .all(|(a, b)| (a - b).abs() <= 1e-15 * a.abs().max(1.0));
    if equal {
        return Ok(CheckReport {
            name: "noise_adaptivity".into(),
            status: CheckStatus::Pass,
            tolerance: 0.0,
            worst_margin: Some(0.0),
            slacks: vec![0.0],
            note: Some("degenerate: step-size series are identical (zero noise)".into()),
        });
    }
    let det_ratio = det[horizon - 1] / det[half - 1];
    let sto_ratio = sto[horizon - 1] / sto[half - 1];
    let slacks = vec![
        det[horizon - 1] - sto[horizon - 1],
        det_ratio - thresholds.plateau_min,
        thresholds.decay_max - sto_ratio,
    ];
    Ok(CheckReport::from_slacks(
        "noise_adaptivity",
        1e-12,
        slacks,
        Some(format!(
            "det ratio {det_ratio:.4}, stoch ratio {sto_ratio:.4}"
        )),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::FeasibleSet;
    use crate::extra_newton::{ExtraNewton, Init, SolverOptions};
    use crate::numerics::SymmetricOperator;
    use crate::oracles::{OracleConfig, OracleMode, TaylorFactor};
    use crate::problems::synthetic_quadratic;
    use crate::{Matrix, Vector};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// f(x) = x^2 / 2 in one dimension (minimum 0 at the origin).
    struct Half1d;

    impl Objective for Half1d {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &Vector) -> f64 {
            0.5 * x[0] * x[0]
        }
        fn gradient(&self, x: &Vector) -> Vector {
            x.clone()
        }
        fn hessian(&self, _x: &Vector) -> SymmetricOperator {
            SymmetricOperator::dense(Matrix::from_vec(1, 1, vec![1.0])).unwrap()
        }
        fn hessian_smoothness(&self) -> Option<f64> {
            Some(0.0)
        }
    }

    fn worked_run(horizon: u64) -> Trace {
        let set = FeasibleSet::boxed(
            Vector::from_vec(vec![-10.0]),
            Vector::from_vec(vec![10.0]),
        )
        .unwrap();
        ExtraNewton::new(
            &Half1d,
            &set,
            OracleConfig::deterministic(),
            SolverOptions {
                gamma: Some(1.0),
                ..SolverOptions::default()
            },
            Init::Point(Vector::from_vec(vec![4.0])),
        )
        .unwrap()
        .run(horizon, None)
        .unwrap()
        .trace
    }

    #[test]
    fn conversion_on_worked_example() {
        let trace = worked_run(1);
        let sched = WeightSchedule::new(2.0).unwrap();
        let x_star = Vector::zeros(1);
        let report =
            check_conversion(&trace, &Half1d, &sched, &x_star, 0.0, 1e-8).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        // Gap 2 against bound R_1 / (a_1 B_1 / b_1) = 4: slack 2.
        assert_relative_eq!(report.slacks[0], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn conversion_passes_along_longer_runs() {
        let trace = worked_run(100);
        let sched = WeightSchedule::new(2.0).unwrap();
        let report = check_conversion(&trace, &Half1d, &sched, &Vector::zeros(1), 0.0, 1e-8)
            .unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        assert_eq!(report.slacks.len(), 100);
    }

    #[test]
    fn conversion_equality_boundary_at_optimum_start() {
        // Starting exactly at the optimum pins every extrapolated point to
        // x_star: the regret and the gap are both zero.
        let (obj, x_star) = synthetic_quadratic(2, 6.0, 3).unwrap();
        let set = FeasibleSet::ball(Vector::zeros(2), 3.0).unwrap();
        let trace = ExtraNewton::new(
            &obj,
            &set,
            OracleConfig::deterministic(),
            SolverOptions::default(),
            Init::Point(x_star.clone()),
        )
        .unwrap()
        .run(5, None)
        .unwrap()
        .trace;
        let sched = WeightSchedule::new(2.0).unwrap();
        let f_star = obj.value(&x_star);
        let report =
            check_conversion(&trace, &obj, &sched, &x_star, f_star, 1e-8).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        for s in &report.slacks {
            assert!(s.abs() <= 1e-8, "expected equality boundary, slack {s}");
        }
    }

    #[test]
    fn conversion_gates_on_weight_hypothesis() {
        let trace = worked_run(3);
        // a_t / b_t = t is increasing for b_t = t.
        let bad = WeightSchedule::new_unchecked(1.0);
        let e = check_conversion(&trace, &Half1d, &bad, &Vector::zeros(1), 0.0, 1e-8)
            .unwrap_err();
        assert!(matches!(e, Error::InvalidArgument(_)));
    }

    #[test]
    fn template_on_worked_example() {
        let trace = worked_run(1);
        let set = FeasibleSet::boxed(
            Vector::from_vec(vec![-10.0]),
            Vector::from_vec(vec![10.0]),
        )
        .unwrap();
        let report =
            check_template_inequality(&trace, &Half1d, &set, &Vector::zeros(1), 1e-7).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        // R_1 = 4; bound = (3 * 400 / 1 - 4) / 2 = 598; slack 594.
        assert_relative_eq!(report.slacks[0], 594.0, epsilon = 1e-6);
    }

    #[test]
    fn template_passes_on_deterministic_quadratic() {
        let (obj, _) = synthetic_quadratic(4, 40.0, 11).unwrap();
        let set = FeasibleSet::ball(Vector::zeros(4), 2.0).unwrap();
        let trace = ExtraNewton::new(
            &obj,
            &set,
            OracleConfig::deterministic(),
            SolverOptions::default(),
            Init::Auto,
        )
        .unwrap()
        .run(60, None)
        .unwrap()
        .trace;
        let x_star = obj.minimizer().clone();
        let report = check_template_inequality(&trace, &obj, &set, &x_star, 1e-7).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
    }

    #[test]
    fn template_skipped_for_stochastic_traces() {
        let (obj, x_star) = synthetic_quadratic(2, 4.0, 5).unwrap();
        let set = FeasibleSet::ball(Vector::zeros(2), 2.0).unwrap();
        let trace = ExtraNewton::new(
            &obj,
            &set,
            OracleConfig {
                mode: OracleMode::AdditiveNoise {
                    sigma_g: 0.5,
                    sigma_h: 0.0,
                },
                psd_repair: true,
                seed: 7,
            },
            SolverOptions::default(),
            Init::Auto,
        )
        .unwrap()
        .run(5, None)
        .unwrap()
        .trace;
        let report = check_template_inequality(&trace, &obj, &set, &x_star, 1e-7).unwrap();
        assert_eq!(report.status, CheckStatus::Skipped);
        assert!(report.passed());
        assert!(report.note.unwrap().contains("expectation-only"));
    }

    #[test]
    fn template_requires_bounded_set() {
        let trace = worked_run(1);
        let set = FeasibleSet::unconstrained(1);
        let e = check_template_inequality(&trace, &Half1d, &set, &Vector::zeros(1), 1e-7)
            .unwrap_err();
        assert!(matches!(e, Error::UnboundedSet(_)));
    }

    #[test]
    fn implicit_recursion_realized_by_deterministic_runs() {
        // With a deterministic oracle and the full Taylor factor, the solved
        // extrapolation point satisfies the implicit projection recursion
        // x_{t+1/2} = P(x_t - gamma_t a_t F(xbar_{t+1/2}; x_tilde_t)).
        let (obj, _) = synthetic_quadratic(3, 15.0, 2).unwrap();
        let set = FeasibleSet::ball(Vector::zeros(3), 1.5).unwrap();
        let mut solver = ExtraNewton::new(
            &obj,
            &set,
            OracleConfig::deterministic(),
            SolverOptions {
                taylor: TaylorFactor::FULL,
                ..SolverOptions::default()
            },
            Init::Auto,
        )
        .unwrap();
        let mut sched = WeightSchedule::new(2.0).unwrap();
        for t in 1..=20u64 {
            let x_t = solver.current_iterate().clone();
            solver.step().unwrap();
            let w = sched.weights_at(t).unwrap();
            // Reconstruct the anchor average from the shared-tail identity.
            let rec = solver.records().last().unwrap();
            let x_tilde = &rec.xbar_lead - (&rec.x_lead - &x_t) * (w.b / w.big_b);
            let taylor = obj.gradient(&x_tilde)
                + obj.hessian(&x_tilde).apply(&(&rec.xbar_lead - &x_tilde));
            let implicit = set.project(&(&x_t - taylor * (rec.gamma * w.a)));
            assert!(
                (&rec.x_lead - implicit).norm() <= 1e-7,
                "implicit recursion violated at t={t}"
            );
        }
    }

    #[test]
    fn sqrt_sum_lemma_examples() {
        let report = check_sqrt_sum_lemma(&[1.0, 1.0, 1.0, 1.0], 1e-12).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        // Middle quantity at T=4: 1 + 1/sqrt2 + 1/sqrt3 + 1/2 ~ 2.784.
        let mid = 1.0 + 0.5f64.sqrt() + 1.0 / 3.0f64.sqrt() + 0.5;
        assert!(mid >= 2.0 && mid <= 4.0);

        // Single element: equality at the lower bound.
        let report = check_sqrt_sum_lemma(&[4.0], 1e-12).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        assert!(report.slacks[0].abs() <= 1e-15);

        assert!(check_sqrt_sum_lemma(&[1.0, -0.5], 1e-12).is_err());
        assert!(check_sqrt_sum_lemma(&[0.0, 0.0], 1e-12).is_err());
    }

    #[test]
    fn sqrt_sum_lemma_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let len = rng.random_range(1..=200);
            let alphas: Vec<f64> = (0..len)
                .map(|_| {
                    if rng.random::<f64>() < 0.2 {
                        0.0
                    } else {
                        rng.random::<f64>() * 10.0
                    }
                })
                .collect();
            if alphas.iter().all(|&a| a == 0.0) {
                continue;
            }
            let report = check_sqrt_sum_lemma(&alphas, 1e-12).unwrap();
            assert_eq!(report.status, CheckStatus::Pass);
        }
    }

    #[test]
    fn slope_recovers_exact_power_laws() {
        let cubic: Vec<(u64, f64)> = (1..=1000).map(|t| (t, 5.0 / (t as f64).powi(3))).collect();
        assert_relative_eq!(
            estimate_rate_slope(&cubic, (10, 1000)).unwrap(),
            -3.0,
            epsilon = 1e-9
        );
        let half: Vec<(u64, f64)> = (1..=1000).map(|t| (t, 2.0 / (t as f64).sqrt())).collect();
        assert_relative_eq!(
            estimate_rate_slope(&half, (10, 1000)).unwrap(),
            -0.5,
            epsilon = 1e-9
        );
        let flat: Vec<(u64, f64)> = (1..=100).map(|t| (t, 3.5)).collect();
        assert_relative_eq!(
            estimate_rate_slope(&flat, (1, 100)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn slope_rejects_nonpositive_gaps() {
        let gaps = vec![(1u64, 1.0), (2, 0.0), (3, 0.5)];
        assert!(estimate_rate_slope(&gaps, (1, 3)).is_err());
        assert!(estimate_rate_slope(&gaps, (3, 3)).is_err());
    }

    #[test]
    fn noise_adaptivity_constant_vs_decaying() {
        let mk = |gammas: Vec<f64>, det: bool| Trace {
            meta: crate::extra_newton::TraceMeta {
                algorithm: "extra_newton".into(),
                p: 2.0,
                gamma_scale: 1.0,
                gamma0: 1.0,
                taylor_factor: 1.0,
                deterministic: det,
                seed: 0,
                warnings: Vec::new(),
            },
            records: gammas
                .iter()
                .enumerate()
                .map(|(k, &g)| crate::extra_newton::IterationRecord {
                    t: (k + 1) as u64,
                    gamma: g,
                    residual: 0.0,
                    x_lead: Vector::zeros(1),
                    xbar_lead: Vector::zeros(1),
                    f_at_xbar: 0.0,
                    step_dist: 0.0,
                    grad_calls: 0,
                    hess_calls: 0,
                    wall: std::time::Duration::ZERO,
                })
                .collect(),
        };
        let det = mk(vec![1.0; 64], true);
        let sto = mk((1..=64).map(|t| 1.0 / (t as f64).sqrt()).collect(), false);
        let report = check_noise_adaptivity(&det, &sto, AdaptivityThresholds::default()).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);

        // Identical series: degenerate equal pass.
        let a = mk(vec![0.5; 32], true);
        let b = mk(vec![0.5; 32], false);
        let report = check_noise_adaptivity(&a, &b, AdaptivityThresholds::default()).unwrap();
        assert_eq!(report.status, CheckStatus::Pass);
        assert!(report.note.unwrap().contains("degenerate"));

        // Horizon mismatch.
        assert!(check_noise_adaptivity(&det, &b, AdaptivityThresholds::default()).is_err());
    }
}
