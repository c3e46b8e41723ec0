//! Weight sequences `a_t = t^2`, `b_t = t^p` with running sums, and the
//! lagged adaptive step-size accumulator.

use crate::{Error, Result};

/// Weights at a single iteration: `a_t`, `b_t` and the prefix sums
/// `A_t = sum a_s`, `B_t = sum b_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub a: f64,
    pub b: f64,
    pub big_a: f64,
    pub big_b: f64,
}

/// Gradient weights `a_t = t^2` and averaging weights `b_t = t^p`, `p >= 2`.
///
/// Prefix sums are maintained incrementally with compensated (Kahan)
/// accumulation; `t^p` grows fast enough that naive summation drifts over
/// long horizons.
#[derive(Clone, Debug)]
pub struct WeightSchedule {
    p: f64,
    // (A_t, B_t) for t = 1.. ; extended on demand.
    sums: Vec<(f64, f64)>,
    comp_a: f64,
    comp_b: f64,
}

impl WeightSchedule {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 2.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "averaging exponent p must be finite and >= 2, got {p}"
            )));
        }
        Ok(WeightSchedule {
            p,
            sums: Vec::new(),
            comp_a: 0.0,
            comp_b: 0.0,
        })
    }

    /// Bypasses the `p >= 2` validation; only for exercising the hypothesis
    /// gates in the convergence checkers.
    #[doc(hidden)]
    pub fn new_unchecked(p: f64) -> Self {
        WeightSchedule {
            p,
            sums: Vec::new(),
            comp_a: 0.0,
            comp_b: 0.0,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self, t: u64) -> f64 {
        let tf = t as f64;
        tf * tf
    }

    pub fn b(&self, t: u64) -> f64 {
        let tf = t as f64;
        if self.p == 2.0 {
            tf * tf
        } else if self.p == 3.0 {
            tf * tf * tf
        } else if self.p.fract() == 0.0 && self.p <= 32.0 {
            tf.powi(self.p as i32)
        } else {
            tf.powf(self.p)
        }
    }

    /// Weights and prefix sums at iteration `t >= 1`.
    pub fn weights_at(&mut self, t: u64) -> Result<Weights> {
        if t < 1 {
            return Err(Error::InvalidArgument("iteration index must be >= 1".into()));
        }
        while (self.sums.len() as u64) < t {
            let s = self.sums.len() as u64 + 1;
            let (prev_a, prev_b) = self.sums.last().copied().unwrap_or((0.0, 0.0));
            let (next_a, ca) = kahan_add(prev_a, self.comp_a, self.a(s));
            let (next_b, cb) = kahan_add(prev_b, self.comp_b, self.b(s));
            self.comp_a = ca;
            self.comp_b = cb;
            self.sums.push((next_a, next_b));
        }
        let (big_a, big_b) = self.sums[(t - 1) as usize];
        Ok(Weights {
            a: self.a(t),
            b: self.b(t),
            big_a,
            big_b,
        })
    }
}

fn kahan_add(sum: f64, comp: f64, term: f64) -> (f64, f64) {
    let y = term - comp;
    let t = sum + y;
    let new_comp = (t - sum) - y;
    (t, new_comp)
}

/// Adaptive step-size state: `gamma_t = gamma / sqrt(gamma0 + acc)` where
/// `acc` accumulates `a_s^2 * residual_s^2` for `s <= t - 1`.
///
/// The lag-one contract is the caller's: `push_residual` for iteration `t`
/// must happen only after the whole step at time `t` is computed, so the
/// step-size read at time `t` never depends on time-`t` randomness.
#[derive(Clone, Debug)]
pub struct StepState {
    gamma_scale: f64,
    gamma0: f64,
    accumulator: f64,
    comp: f64,
    pushes: u64,
}

impl StepState {
    pub fn new(gamma_scale: f64, gamma0: f64) -> Result<Self> {
        if !(gamma_scale > 0.0) || !gamma_scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive and finite, got {gamma_scale}"
            )));
        }
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma0 must be positive and finite, got {gamma0}"
            )));
        }
        Ok(StepState {
            gamma_scale,
            gamma0,
            accumulator: 0.0,
            comp: 0.0,
            pushes: 0,
        })
    }

    pub fn gamma_scale(&self) -> f64 {
        self.gamma_scale
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn accumulator(&self) -> f64 {
        self.accumulator
    }

    /// Number of residuals pushed so far.
    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn current_gamma(&self) -> f64 {
        self.gamma_scale / (self.gamma0 + self.accumulator).sqrt()
    }

    pub fn push_residual(&mut self, a_t: f64, residual: f64) -> Result<()> {
        if residual < 0.0 || !residual.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "residual must be nonnegative and finite, got {residual}"
            )));
        }
        let term = a_t * a_t * residual * residual;
        let (acc, comp) = kahan_add(self.accumulator, self.comp, term);
        self.accumulator = acc;
        self.comp = comp;
        self.pushes += 1;
        Ok(())
    }
}
