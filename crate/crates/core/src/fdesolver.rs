//! Numerical solution of fractional initial value problems.
//!
//! Solves `D^mu x(t) = f(t, x(t))` on `[a, b]` with the Caputo
//! derivative of order `mu` in `(0, 2)`, using the fractional
//! Adams-Bashforth-Moulton predictor-corrector: the problem is recast as
//! a Volterra integral equation and integrated with a product-rectangle
//! predictor and a product-trapezoid corrector (one correction per
//! step). At `mu = 1` the scheme reduces exactly to the classical
//! trapezoid predictor-corrector; for smooth right-hand sides it
//! converges at order `min(2, 1 + mu)`.
//!
//! For `mu` in `(1, 2)` a second initial condition, the starting
//! velocity `v0`, is required; supplying it at lower orders (or omitting
//! it at higher ones) is rejected rather than silently ignored.

use crate::fractops::SampledTrajectory;
use crate::specialfn::{gamma, SpecialFnError};
use crate::{rf, Real};
use std::sync::Arc;
use thiserror::Error;

/// Right-hand side `f(t, x)` of a fractional differential equation.
pub type RhsFn<R> = Arc<dyn Fn(R, R) -> R + Send + Sync>;

/// Errors from the fractional initial-value-problem solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdeError {
    /// The problem description is inconsistent.
    #[error("invalid problem: {msg}")]
    InvalidProblem {
        /// What was wrong.
        msg: String,
    },
    /// The iteration produced a non-finite value (blow-up or overflow).
    #[error("solution became non-finite at step {step}")]
    NonFiniteValue {
        /// 1-based step index where the value degenerated.
        step: usize,
    },
    /// A gamma evaluation failed.
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
}

/// A fractional initial value problem `D^mu x = f(t, x)` on `[a, b]`.
#[derive(Clone)]
pub struct FdeProblem<R> {
    /// Caputo derivative order, in `(0, 2)`.
    pub mu: R,
    /// Right-hand side `f(t, x)`.
    pub f: RhsFn<R>,
    /// Initial position `x(a)`.
    pub x0: R,
    /// Initial velocity `x'(a)`; required exactly when `mu > 1`.
    pub v0: Option<R>,
    /// Interval start.
    pub a: R,
    /// Interval end.
    pub b: R,
    /// Number of steps (at least 8).
    pub n: usize,
}

impl<R: Real> FdeProblem<R> {
    fn validate(&self) -> Result<(), FdeError> {
        let bad = |msg: &str| {
            Err(FdeError::InvalidProblem {
                msg: msg.to_string(),
            })
        };
        if !self.mu.is_finite() || !(self.mu > R::zero()) || self.mu >= rf::<R>(2.0) {
            return bad("derivative order must lie in (0, 2)");
        }
        if !self.a.is_finite() || !self.b.is_finite() || !(self.b > self.a) {
            return bad("interval must be finite with positive length");
        }
        if self.n < 8 {
            return bad("need at least 8 steps");
        }
        if !self.x0.is_finite() {
            return bad("initial position must be finite");
        }
        match self.v0 {
            Some(_) if self.mu <= R::one() => {
                bad("initial velocity is only meaningful for orders above 1")
            }
            Some(v) if !v.is_finite() => bad("initial velocity must be finite"),
            None if self.mu > R::one() => bad("orders above 1 need an initial velocity"),
            _ => Ok(()),
        }
    }
}

/// Solves the fractional initial value problem with the
/// Adams-Bashforth-Moulton predictor-corrector, returning the solution
/// sampled on the uniform grid.
pub fn solve_abm<R: Real>(problem: &FdeProblem<R>) -> Result<SampledTrajectory<R>, FdeError> {
    problem.validate()?;
    let mu = problem.mu;
    let one = R::one();
    let n = problem.n;
    let h = (problem.b - problem.a) / rf::<R>(n as f64);
    let h_mu = h.powf(mu);
    let pred_scale = h_mu / gamma(mu + one)?;
    let corr_scale = h_mu / gamma(mu + rf::<R>(2.0))?;
    let v0 = problem.v0.unwrap_or_else(R::zero);

    // Taylor part of the Volterra equation: the initial conditions
    // propagated forward.
    let history = |t: R| -> R {
        if mu > one {
            problem.x0 + v0 * (t - problem.a)
        } else {
            problem.x0
        }
    };

    // Predictor weights b_i = (i+1)^mu - i^mu.
    let bw: Vec<R> = (0..n)
        .map(|i| {
            let ir = rf::<R>(i as f64);
            (ir + one).powf(mu) - ir.powf(mu)
        })
        .collect();
    // Corrector interior weights
    // a_i = (i+1)^(mu+1) - 2 i^(mu+1) + (i-1)^(mu+1), for i >= 1.
    let mup1 = mu + one;
    let two = rf::<R>(2.0);
    let aw: Vec<R> = (0..n)
        .map(|i| {
            if i == 0 {
                R::zero()
            } else {
                let ir = rf::<R>(i as f64);
                (ir + one).powf(mup1) - two * ir.powf(mup1) + (ir - one).powf(mup1)
            }
        })
        .collect();

    let mut xs: Vec<R> = Vec::with_capacity(n + 1);
    let mut fs: Vec<R> = Vec::with_capacity(n + 1);
    xs.push(problem.x0);
    let f0 = (problem.f)(problem.a, problem.x0);
    if !f0.is_finite() {
        return Err(FdeError::NonFiniteValue { step: 0 });
    }
    fs.push(f0);

    for m in 1..=n {
        let tm = problem.a + h * rf::<R>(m as f64);
        let tail = history(tm);

        let mut pred_sum = R::zero();
        for (j, fj) in fs.iter().enumerate() {
            pred_sum += bw[m - 1 - j] * *fj;
        }
        let x_pred = tail + pred_scale * pred_sum;
        let f_pred = (problem.f)(tm, x_pred);
        if !x_pred.is_finite() || !f_pred.is_finite() {
            return Err(FdeError::NonFiniteValue { step: m });
        }

        // Initial-node corrector weight
        // a_0(m) = (m-1)^(mu+1) - (m-1-mu) * m^mu.
        let mr = rf::<R>(m as f64);
        let a0 = (mr - one).powf(mup1) - (mr - one - mu) * mr.powf(mu);
        let mut corr_sum = f_pred + a0 * fs[0];
        for j in 1..m {
            corr_sum += aw[m - j] * fs[j];
        }
        let xm = tail + corr_scale * corr_sum;
        let fm = (problem.f)(tm, xm);
        if !xm.is_finite() || !fm.is_finite() {
            return Err(FdeError::NonFiniteValue { step: m });
        }
        xs.push(xm);
        fs.push(fm);
    }

    SampledTrajectory::new(problem.a, h, xs)
        .map_err(|e| FdeError::InvalidProblem { msg: e.to_string() })
}
