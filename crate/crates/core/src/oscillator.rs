//! End-to-end fractional harmonic oscillator scenarios.
//!
//! The harmonic oscillator is the one system where every layer of this
//! crate meets: its fractional embeddings have closed-form solutions in
//! the Mittag-Leffler function, the embedded Euler-Lagrange equation can
//! be integrated numerically and compared against them, and the
//! corresponding equation documents can be checked symbolically for
//! dimensional homogeneity.
//!
//! Three closed forms are provided, one per embedding:
//!
//! * homogeneous-operator, on physical time:
//!   `x(t) = x_a * E_{2a}(-w^2 * tau^(2-2a) * (t-a)^(2a))`;
//! * nondimensionalized, on rescaled time `u`:
//!   `x(u) = x_a * E_{2a}(-(w*tau)^2 * (u-a/tau)^(2a))`;
//! * direct substitution, on physical time:
//!   `x(t) = x_a * E_{2a}(-w^2 * (t-a)^(2a))`, whose Mittag-Leffler
//!   argument carries the order-dependent dimension `T^(2a-2)`.
//!
//! The first two describe the same motion (`x(t) = x_nondim(t/tau)`);
//! the third genuinely differs for `tau != 1`, which is the numerical
//! footprint of its dimensional inhomogeneity.

use crate::dimension::{BaseUnit, Dimension, ExponentExpr};
use crate::eqdsl::{
    check_homogeneity, parse_document, substitute_operator, EqError, OperatorRule, WrtFilter,
};
use crate::fdesolver::{solve_abm, FdeError, FdeProblem};
use crate::fractops::{FracOpsError, SampledTrajectory};
use crate::lagrangian::{
    el_residual_natural, EmbedMethod, EmbeddingReport, LagrangianError, NaturalLagrangian,
};
use crate::specialfn::{mittag_leffler, SpecialFnError};
use crate::{rf, Real};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Errors from oscillator scenarios.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    /// The configuration is out of range.
    #[error("invalid configuration: {msg}")]
    InvalidConfig {
        /// What was wrong.
        msg: String,
    },
    /// A special-function evaluation failed.
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    /// A grid or fractional-operator error.
    #[error(transparent)]
    FracOps(#[from] FracOpsError),
    /// A Lagrangian-layer error.
    #[error(transparent)]
    Lagrangian(#[from] LagrangianError),
    /// A solver error.
    #[error(transparent)]
    Fde(#[from] FdeError),
    /// An equation-document error.
    #[error(transparent)]
    Eq(#[from] EqError),
}

/// Parameters of a fractional harmonic oscillator run.
///
/// Every field has a default, so a configuration file may set any subset;
/// unknown keys are rejected rather than silently ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(serialize = "R: Serialize", deserialize = "R: Real + Deserialize<'de>")
)]
pub struct OscillatorConfig<R> {
    /// Mass.
    pub m: R,
    /// Spring constant.
    pub k: R,
    /// Fractional order; closed forms accept `(0, 1]`, the numerical
    /// scenario needs `(0, 1)`.
    pub alpha: R,
    /// Characteristic time scale.
    pub tau: R,
    /// Initial amplitude `x(a)`.
    pub x_a: R,
    /// Interval start.
    pub a: R,
    /// Interval end.
    pub b: R,
    /// Number of grid steps.
    pub n: usize,
}

impl<R: Real> Default for OscillatorConfig<R> {
    fn default() -> Self {
        OscillatorConfig {
            m: R::one(),
            k: R::one(),
            alpha: rf::<R>(0.75),
            tau: rf::<R>(2.0),
            x_a: R::one(),
            a: R::zero(),
            b: rf::<R>(5.0),
            n: 2000,
        }
    }
}

impl<R: Real> OscillatorConfig<R> {
    /// Validates parameter ranges.
    pub fn validate(&self) -> Result<(), OscillatorError> {
        let bad = |msg: &str| {
            Err(OscillatorError::InvalidConfig {
                msg: msg.to_string(),
            })
        };
        if !(self.m > R::zero()) || !self.m.is_finite() {
            return bad("mass must be positive and finite");
        }
        if !(self.k > R::zero()) || !self.k.is_finite() {
            return bad("spring constant must be positive and finite");
        }
        if !self.alpha.is_finite() || !(self.alpha > R::zero()) || self.alpha > R::one() {
            return bad("fractional order must lie in (0, 1]");
        }
        if !(self.tau > R::zero()) || !self.tau.is_finite() {
            return bad("time scale must be positive and finite");
        }
        if !self.x_a.is_finite() {
            return bad("initial amplitude must be finite");
        }
        if !self.a.is_finite() || !self.b.is_finite() || !(self.b > self.a) {
            return bad("interval must be finite with positive length");
        }
        if self.n < 2 {
            return bad("need at least two grid steps");
        }
        Ok(())
    }

    /// Angular frequency `sqrt(k / m)`.
    pub fn omega(&self) -> R {
        (self.k / self.m).sqrt()
    }
}

/// The three closed-form variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Nondimensionalized motion on the rescaled time grid.
    Nondim,
    /// Homogeneous-operator motion on physical time.
    Homogeneous,
    /// Direct (dimensionally inhomogeneous) substitution on physical
    /// time.
    Inhomogeneous,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Variant::Nondim => "nondim",
            Variant::Homogeneous => "homogeneous",
            Variant::Inhomogeneous => "inhomogeneous",
        };
        f.write_str(name)
    }
}

/// Closed-form solution of the embedded oscillator for the chosen
/// variant, sampled on its natural grid (`[a, b]` on physical time, or
/// the rescaled interval for [`Variant::Nondim`]).
pub fn closed_form<R: Real>(
    config: &OscillatorConfig<R>,
    variant: Variant,
) -> Result<SampledTrajectory<R>, OscillatorError> {
    config.validate()?;
    let omega = config.omega();
    let omega2 = omega * omega;
    let one = R::one();
    let two = rf::<R>(2.0);
    let two_alpha = two * config.alpha;

    let (start, end, coefficient) = match variant {
        Variant::Homogeneous => (
            config.a,
            config.b,
            omega2 * config.tau.powf(two * (one - config.alpha)),
        ),
        Variant::Nondim => {
            let wt = omega * config.tau;
            (config.a / config.tau, config.b / config.tau, wt * wt)
        }
        Variant::Inhomogeneous => (config.a, config.b, omega2),
    };

    let h = (end - start) / rf::<R>(config.n as f64);
    let mut values = Vec::with_capacity(config.n + 1);
    for i in 0..=config.n {
        let dt = h * rf::<R>(i as f64);
        let z = if i == 0 {
            R::zero()
        } else {
            -coefficient * dt.powf(two_alpha)
        };
        values.push(config.x_a * mittag_leffler(two_alpha, z)?);
    }
    Ok(SampledTrajectory::new(start, h, values)?)
}

/// Dimension of the Mittag-Leffler argument of each closed form, as a
/// function of the order symbol `a`. The homogeneous and
/// nondimensionalized variants feed the special function a
/// dimensionless argument for every order; the direct substitution
/// feeds it `T^(2a-2)`, which is dimensionless only at `a = 1`.
pub fn ml_argument_dimension(variant: Variant) -> Dimension {
    let time = Dimension::base(BaseUnit::TIME);
    let two_alpha = ExponentExpr::term(Rational64::from_integer(2), "a");
    let expect = "time carries a constant exponent, so symbolic powers cannot fail";
    match variant {
        Variant::Homogeneous => {
            // w^2 * tau^(2-2a) * (t-a)^(2a)
            let omega_sq = time.inv().pow_rational(Rational64::from_integer(2));
            let tau_pow = time
                .pow(&(ExponentExpr::from_integer(2) - two_alpha.clone()))
                .expect(expect);
            let dt_pow = time.pow(&two_alpha).expect(expect);
            omega_sq.mul(&tau_pow).mul(&dt_pow)
        }
        Variant::Nondim => {
            // (w*tau)^2 * u^(2a): both factors dimensionless.
            let omega_tau = time.inv().mul(&time);
            let u_pow = Dimension::dimensionless().pow(&two_alpha).expect(expect);
            omega_tau
                .pow_rational(Rational64::from_integer(2))
                .mul(&u_pow)
        }
        Variant::Inhomogeneous => {
            // w^2 * (t-a)^(2a)
            let omega_sq = time.inv().pow_rational(Rational64::from_integer(2));
            let dt_pow = time.pow(&two_alpha).expect(expect);
            omega_sq.mul(&dt_pow)
        }
    }
}

/// File name for a variant's trajectory export.
pub fn csv_name<R: Real>(variant: Variant, alpha: R, tau: R) -> String {
    format!(
        "osc_{variant}_a{}_tau{}.csv",
        alpha.to_f64().unwrap_or(f64::NAN),
        tau.to_f64().unwrap_or(f64::NAN)
    )
}

/// Symbolic side of the scenario: the classical oscillator document and
/// its two operator rewrites, with homogeneity verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocPipelineReport {
    /// The classical second-order document.
    pub classical: String,
    /// The naive fractional rewrite (`d/dt` to `D^a`).
    pub naive: String,
    /// Homogeneity verdict of the naive rewrite.
    pub naive_verdict: String,
    /// Whether the naive rewrite is homogeneous at some fractional
    /// order.
    pub naive_is_homogeneous: bool,
    /// The homogeneous rewrite (`d/dt` to `tau^(a-1) D^a`).
    pub homogeneous: String,
    /// Homogeneity verdict of the homogeneous rewrite.
    pub homogeneous_verdict: String,
    /// Whether the homogeneous rewrite is homogeneous at some
    /// fractional order.
    pub homogeneous_is_homogeneous: bool,
}

/// JSON-friendly summary of a full scenario run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    /// Mass.
    pub m: f64,
    /// Spring constant.
    pub k: f64,
    /// Fractional order.
    pub alpha: f64,
    /// Time scale.
    pub tau: f64,
    /// Initial amplitude.
    pub x_a: f64,
    /// Physical time interval.
    pub interval: [f64; 2],
    /// Number of grid steps.
    pub n_steps: usize,
    /// Angular frequency.
    pub omega: f64,
    /// Coefficient `w^2 * tau^(2-2a)` of the homogeneous equation of
    /// motion `D^(2a) x = -coefficient * x`.
    pub homogeneous_coefficient: f64,
    /// Largest gap between the numerical solution and the homogeneous
    /// closed form.
    pub abm_vs_closed_max: f64,
    /// Largest gap between the homogeneous closed form and the
    /// rescaled nondimensionalized one (zero in exact arithmetic).
    pub identity_max_gap: f64,
    /// Euler-Lagrange residual of the numerical solution under the
    /// homogeneous embedding.
    pub embedding: EmbeddingReport,
    /// Dimension of the Mittag-Leffler argument per variant.
    pub ml_argument_dimensions: BTreeMap<String, String>,
    /// Symbolic pipeline results.
    pub docs: DocPipelineReport,
}

/// A scenario's report plus its trajectories, keyed by name.
pub struct ScenarioOutput<R> {
    /// The JSON-friendly summary.
    pub report: ScenarioReport,
    /// Trajectories: `numerical`, `closed_homogeneous`, `closed_nondim`
    /// (on the rescaled grid), and `closed_inhomogeneous`.
    pub trajectories: BTreeMap<String, SampledTrajectory<R>>,
}

const CLASSICAL_OSCILLATOR_DOC: &str = "\
const omega: T^(-1);
var x: L of t: T;
eq: D(2,t)x + omega^2*x = 0;";

fn doc_pipeline() -> Result<DocPipelineReport, EqError> {
    let classical = parse_document(CLASSICAL_OSCILLATOR_DOC)?;
    let alpha = ExponentExpr::symbol("a");
    let naive = substitute_operator(
        &classical,
        &OperatorRule::ReplaceDer {
            alpha: alpha.clone(),
        },
        &WrtFilter::TimeDimensioned,
    )?;
    let homogeneous = substitute_operator(
        &classical,
        &OperatorRule::HomogeneousReplace { alpha },
        &WrtFilter::TimeDimensioned,
    )?;
    let naive_verdict = check_homogeneity(&naive)?;
    let homogeneous_verdict = check_homogeneity(&homogeneous)?;
    Ok(DocPipelineReport {
        classical: classical.to_string(),
        naive: naive.to_string(),
        naive_verdict: naive_verdict.kind.to_string(),
        naive_is_homogeneous: naive_verdict.is_fractionally_homogeneous(),
        homogeneous: homogeneous.to_string(),
        homogeneous_verdict: homogeneous_verdict.kind.to_string(),
        homogeneous_is_homogeneous: homogeneous_verdict.is_fractionally_homogeneous(),
    })
}

/// Runs the full scenario: solve the homogeneous embedded equation of
/// motion numerically, compare against the closed forms, evaluate the
/// Euler-Lagrange residual, and run the symbolic pipeline. Requires an
/// order strictly inside `(0, 1)` and at least 8 steps.
pub fn run_scenario<R: Real>(
    config: &OscillatorConfig<R>,
) -> Result<ScenarioOutput<R>, OscillatorError> {
    config.validate()?;
    if config.alpha >= R::one() {
        return Err(OscillatorError::InvalidConfig {
            msg: "the numerical scenario needs an order strictly inside (0, 1); \
                  closed forms alone also accept 1"
                .into(),
        });
    }
    let one = R::one();
    let two = rf::<R>(2.0);
    let omega = config.omega();
    let omega2 = omega * omega;
    let coefficient = omega2 * config.tau.powf(two * (one - config.alpha));
    let mu = two * config.alpha;

    let problem = FdeProblem {
        mu,
        f: Arc::new(move |_t, x| -coefficient * x),
        x0: config.x_a,
        v0: if mu > one { Some(R::zero()) } else { None },
        a: config.a,
        b: config.b,
        n: config.n,
    };
    let numerical = solve_abm(&problem)?;

    let closed_h = closed_form(config, Variant::Homogeneous)?;
    let closed_n = closed_form(config, Variant::Nondim)?;
    let closed_i = closed_form(config, Variant::Inhomogeneous)?;

    let mut abm_vs_closed_max = 0.0f64;
    let mut identity_max_gap = 0.0f64;
    for i in 0..numerical.len() {
        let xh = closed_h.values()[i].to_f64().unwrap_or(f64::NAN);
        let xn = numerical.values()[i].to_f64().unwrap_or(f64::NAN);
        let xu = closed_n.values()[i].to_f64().unwrap_or(f64::NAN);
        abm_vs_closed_max = abm_vs_closed_max.max((xn - xh).abs());
        identity_max_gap = identity_max_gap.max((xu - xh).abs());
    }

    let k = config.k;
    let nat = NaturalLagrangian {
        m: config.m,
        v: Arc::new(move |x| rf::<R>(0.5) * k * x * x),
        v_prime: Arc::new(move |x| k * x),
        a: config.a,
        b: config.b,
    };
    let residual = el_residual_natural(
        &nat,
        EmbedMethod::Homogeneous,
        config.alpha,
        config.tau,
        &numerical,
    )?;
    let embedding = EmbeddingReport::from_residual(
        EmbedMethod::Homogeneous,
        config.alpha,
        config.tau,
        &residual,
    );

    let mut ml_argument_dimensions = BTreeMap::new();
    for variant in [
        Variant::Nondim,
        Variant::Homogeneous,
        Variant::Inhomogeneous,
    ] {
        ml_argument_dimensions.insert(
            variant.to_string(),
            ml_argument_dimension(variant).to_string(),
        );
    }

    let report = ScenarioReport {
        m: config.m.to_f64().unwrap_or(f64::NAN),
        k: config.k.to_f64().unwrap_or(f64::NAN),
        alpha: config.alpha.to_f64().unwrap_or(f64::NAN),
        tau: config.tau.to_f64().unwrap_or(f64::NAN),
        x_a: config.x_a.to_f64().unwrap_or(f64::NAN),
        interval: [
            config.a.to_f64().unwrap_or(f64::NAN),
            config.b.to_f64().unwrap_or(f64::NAN),
        ],
        n_steps: config.n,
        omega: omega.to_f64().unwrap_or(f64::NAN),
        homogeneous_coefficient: coefficient.to_f64().unwrap_or(f64::NAN),
        abm_vs_closed_max,
        identity_max_gap,
        embedding,
        ml_argument_dimensions,
        docs: doc_pipeline()?,
    };

    let mut trajectories = BTreeMap::new();
    trajectories.insert("numerical".to_string(), numerical);
    trajectories.insert("closed_homogeneous".to_string(), closed_h);
    trajectories.insert("closed_nondim".to_string(), closed_n);
    trajectories.insert("closed_inhomogeneous".to_string(), closed_i);

    Ok(ScenarioOutput {
        report,
        trajectories,
    })
}

/// Symbolic free-fall scenario: the naive fractional rewrite of
/// `x'' + g = 0` is inhomogeneous away from order 1, while rewriting
/// the constant as `g^a * R^(1-a)` with a reference length `R` restores
/// homogeneity for every order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeFallReport {
    /// Gravitational acceleration (echoed for display).
    pub g: f64,
    /// Sample fractional order (echoed for display).
    pub alpha: f64,
    /// The naive fractional document.
    pub naive: String,
    /// Its homogeneity verdict.
    pub naive_verdict: String,
    /// Whether the naive document is homogeneous at a fractional order.
    pub naive_is_homogeneous: bool,
    /// The constant-rewritten document.
    pub rewritten: String,
    /// Its homogeneity verdict.
    pub rewritten_verdict: String,
    /// Whether the rewritten document is homogeneous at a fractional
    /// order.
    pub rewritten_is_homogeneous: bool,
}

const CLASSICAL_FREE_FALL_DOC: &str = "\
const g: L*T^(-2);
var x: L of t: T;
eq: D(2,t)x + g = 0;";

const REWRITTEN_FREE_FALL_DOC: &str = "\
order a;
const g: L*T^(-2);
const R_T: L;
var x: L of t: T;
eq: FD(2*a,t)x + g^(a)*R_T^(1-a) = 0;";

/// Builds the free-fall demonstration; `g` and `alpha` are echoed into
/// the report for display.
pub fn free_fall_scenario<R: Real>(g: R, alpha: R) -> Result<FreeFallReport, OscillatorError> {
    let classical = parse_document(CLASSICAL_FREE_FALL_DOC)?;
    let naive = substitute_operator(
        &classical,
        &OperatorRule::ReplaceDer {
            alpha: ExponentExpr::symbol("a"),
        },
        &WrtFilter::TimeDimensioned,
    )?;
    let rewritten = parse_document(REWRITTEN_FREE_FALL_DOC)?;
    let naive_verdict = check_homogeneity(&naive)?;
    let rewritten_verdict = check_homogeneity(&rewritten)?;
    Ok(FreeFallReport {
        g: g.to_f64().unwrap_or(f64::NAN),
        alpha: alpha.to_f64().unwrap_or(f64::NAN),
        naive: naive.to_string(),
        naive_verdict: naive_verdict.kind.to_string(),
        naive_is_homogeneous: naive_verdict.is_fractionally_homogeneous(),
        rewritten: rewritten.to_string(),
        rewritten_verdict: rewritten_verdict.kind.to_string(),
        rewritten_is_homogeneous: rewritten_verdict.is_fractionally_homogeneous(),
    })
}
