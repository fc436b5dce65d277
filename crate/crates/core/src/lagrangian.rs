//! Lagrangian mechanics with fractional embeddings that respect
//! dimensional homogeneity.
//!
//! A classical action with Lagrangian `L(x, dx/dt, t)` can be carried to
//! fractional order `alpha` in several inequivalent-looking ways. This
//! module implements three that all keep every term of the resulting
//! Euler-Lagrange equation at a consistent dimension for every order,
//! plus the naive route that does not:
//!
//! * **Nondimensionalized** ([`EmbedMethod::Nondim`]): rescale time by a
//!   characteristic scale `tau`, substitute the fractional derivative in
//!   the dimensionless time `u = t / tau`, and work on the rescaled
//!   interval.
//! * **Homogeneous operator** ([`EmbedMethod::Homogeneous`]): replace
//!   `d/dt` by `tau^(alpha-1) * D^alpha`, an operator that keeps the
//!   dimension of a first derivative for every `alpha`.
//! * **Fractional constants** ([`EmbedMethod::FracConst`]): for
//!   Lagrangians that are Laurent polynomials in the velocity, absorb
//!   the `tau` powers into the coefficients, so each coefficient's
//!   dimension becomes order-dependent while the operator stays the
//!   plain `D^alpha`.
//! * **Direct substitution** ([`EmbedMethod::InhomogeneousDirect`]):
//!   replace `d/dt` by the bare `D^alpha`. The dynamics is well defined
//!   but the terms of the equation of motion no longer share a
//!   dimension; it is included as the baseline the other three improve
//!   on.
//!
//! The first three are different bookkeepings of the same dynamics:
//! [`check_method_equivalence`] and [`check_fracconst_equivalence`]
//! verify the agreement numerically, and [`check_coherence`] verifies
//! that embedding the Euler-Lagrange *equation* term by term agrees with
//! embedding the *Lagrangian* and re-deriving the equation.
//!
//! All Euler-Lagrange residuals use causal (left-sided) fractional
//! derivatives throughout, so each residual value depends only on the
//! trajectory's past.

use crate::dimension::ExponentExpr;
use crate::fractops::{
    caputo, caputo_with, derivative_samples, resample_scaled, sample_at_index, CaputoSpec,
    FracOpsError, SampledTrajectory,
};
use crate::{rf, Real};
use num_rational::Rational64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Shared callable of one scalar argument.
pub type ScalarFn1<R> = Arc<dyn Fn(R) -> R + Send + Sync>;
/// Shared callable of two scalar arguments, used as `f(x, t)`.
pub type ScalarFn2<R> = Arc<dyn Fn(R, R) -> R + Send + Sync>;
/// Shared callable of three scalar arguments, used as `f(x, v, t)`.
pub type ScalarFn3<R> = Arc<dyn Fn(R, R, R) -> R + Send + Sync>;

/// Errors from embeddings and Euler-Lagrange evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LagrangianError {
    /// An embedding parameter is out of range.
    #[error("invalid embedding: {msg}")]
    InvalidSpec {
        /// What was wrong.
        msg: String,
    },
    /// A grid or operator error from the sampled-trajectory layer.
    #[error(transparent)]
    Grid(#[from] FracOpsError),
    /// A Laurent term with a negative velocity power was evaluated where
    /// the causal fractional velocity vanishes (the initial node).
    #[error("Laurent term is singular at the initial node where the causal fractional velocity vanishes")]
    SingularAtInitialNode,
    /// The trajectory's grid does not cover the Lagrangian's interval.
    #[error("trajectory interval [{found_a}, {found_b}] does not match the expected [{expected_a}, {expected_b}]")]
    IntervalMismatch {
        /// Expected interval start.
        expected_a: f64,
        /// Expected interval end.
        expected_b: f64,
        /// Trajectory interval start.
        found_a: f64,
        /// Trajectory interval end.
        found_b: f64,
    },
    /// The reference potential value used to normalize a Laurent
    /// decomposition is zero.
    #[error("potential vanishes at the normalization point; pick a different reference")]
    NormalizationZero,
}

/// A Lagrangian `L(x, v, t)` together with its partial derivatives with
/// respect to position (`d1`) and velocity (`d2`), on the time interval
/// `[a, b]`.
#[derive(Clone)]
pub struct GeneralLagrangian<R> {
    /// Interval start.
    pub a: R,
    /// Interval end.
    pub b: R,
    /// The Lagrangian `L(x, v, t)`.
    pub l: ScalarFn3<R>,
    /// Partial derivative of `L` in its first slot (position).
    pub d1: ScalarFn3<R>,
    /// Partial derivative of `L` in its second slot (velocity).
    pub d2: ScalarFn3<R>,
}

impl<R: fmt::Debug> fmt::Debug for GeneralLagrangian<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralLagrangian")
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

/// A natural Lagrangian `L = m/2 * v^2 - V(x)` on `[a, b]`.
#[derive(Clone)]
pub struct NaturalLagrangian<R> {
    /// Mass (coefficient of the kinetic term).
    pub m: R,
    /// Potential `V(x)`.
    pub v: ScalarFn1<R>,
    /// Derivative `V'(x)`.
    pub v_prime: ScalarFn1<R>,
    /// Interval start.
    pub a: R,
    /// Interval end.
    pub b: R,
}

impl<R: Real> NaturalLagrangian<R> {
    /// Views the natural Lagrangian as a general one.
    pub fn to_general(&self) -> GeneralLagrangian<R> {
        let m = self.m;
        let v = self.v.clone();
        let vp = self.v_prime.clone();
        let half = rf::<R>(0.5);
        GeneralLagrangian {
            a: self.a,
            b: self.b,
            l: Arc::new(move |x, vel, _t| half * m * vel * vel - v(x)),
            d1: Arc::new(move |x, _vel, _t| -vp(x)),
            d2: Arc::new(move |_x, vel, _t| m * vel),
        }
    }
}

impl<R: fmt::Debug> fmt::Debug for NaturalLagrangian<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NaturalLagrangian")
            .field("m", &self.m)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

/// One term `coeff * f(x, t) * v^index` of a Laurent-in-velocity
/// Lagrangian. The shape function `f` must carry no time dimension;
/// the coefficient carries all of it.
#[derive(Clone)]
pub struct LaurentTerm<R> {
    /// Power of the velocity, possibly negative.
    pub index: i32,
    /// Dimensional coefficient of the term.
    pub coeff: R,
    /// Shape function `f(x, t)`.
    pub f: ScalarFn2<R>,
    /// Partial derivative of `f` with respect to `x`.
    pub f_dx: ScalarFn2<R>,
}

impl<R: fmt::Debug> fmt::Debug for LaurentTerm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaurentTerm")
            .field("index", &self.index)
            .field("coeff", &self.coeff)
            .finish_non_exhaustive()
    }
}

/// A Lagrangian that is a Laurent polynomial in the velocity:
/// `L = sum_i coeff_i * f_i(x, t) * v^i` on `[a, b]`.
///
/// `n0` is the overall temporal weight: the `i`-th coefficient carries
/// the time dimension `T^(i + n0)`, so that every term of `L` carries
/// `T^n0` once the velocity contributes `T^(-i)`.
#[derive(Clone)]
pub struct LaurentLagrangian<R> {
    /// The Laurent terms.
    pub terms: Vec<LaurentTerm<R>>,
    /// Overall temporal weight of the Lagrangian (for an energy, `-2`).
    pub n0: i32,
    /// Interval start.
    pub a: R,
    /// Interval end.
    pub b: R,
}

impl<R: fmt::Debug> fmt::Debug for LaurentLagrangian<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaurentLagrangian")
            .field("terms", &self.terms)
            .field("n0", &self.n0)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish()
    }
}

/// A coefficient after the fractional-constants embedding: the original
/// coefficient times `tau^(i * (alpha - 1))`, whose time dimension
/// depends on the order.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalConstant<R> {
    /// Velocity power the coefficient belongs to.
    pub index: i32,
    /// Numerical value of the embedded coefficient.
    pub value: R,
    /// Temporal dimension exponent of the embedded coefficient as an
    /// affine expression in the order symbol `a`: `i*a + n0`.
    pub dimension: ExponentExpr,
}

impl<R: Real> LaurentLagrangian<R> {
    /// The harmonic oscillator `L = m/2 * v^2 - k/2 * x^2` as a Laurent
    /// Lagrangian with terms at velocity powers 2 and 0.
    pub fn harmonic_oscillator(m: R, k: R, a: R, b: R) -> Self {
        let half = rf::<R>(0.5);
        LaurentLagrangian {
            terms: vec![
                LaurentTerm {
                    index: 2,
                    coeff: m,
                    f: Arc::new(move |_x, _t| half),
                    f_dx: Arc::new(move |_x, _t| R::zero()),
                },
                LaurentTerm {
                    index: 0,
                    coeff: half * k,
                    f: Arc::new(move |x, _t| -(x * x)),
                    f_dx: Arc::new(move |x, _t| -(x + x)),
                },
            ],
            n0: -2,
            a,
            b,
        }
    }

    /// Decomposes a natural Lagrangian into Laurent form, normalizing
    /// the potential term by its value at `x0_ref` so that the shape
    /// function stays dimensionless in time.
    pub fn from_natural(nat: &NaturalLagrangian<R>, x0_ref: R) -> Result<Self, LagrangianError> {
        let v0 = (nat.v)(x0_ref);
        if v0 == R::zero() || !v0.is_finite() {
            return Err(LagrangianError::NormalizationZero);
        }
        let half = rf::<R>(0.5);
        let v = nat.v.clone();
        let vp = nat.v_prime.clone();
        Ok(LaurentLagrangian {
            terms: vec![
                LaurentTerm {
                    index: 2,
                    coeff: nat.m,
                    f: Arc::new(move |_x, _t| half),
                    f_dx: Arc::new(move |_x, _t| R::zero()),
                },
                LaurentTerm {
                    index: 0,
                    coeff: v0,
                    f: Arc::new(move |x, _t| -v(x) / v0),
                    f_dx: Arc::new(move |x, _t| -vp(x) / v0),
                },
            ],
            n0: -2,
            a: nat.a,
            b: nat.b,
        })
    }

    /// The embedded coefficients `coeff_i * tau^(i * (alpha - 1))`
    /// together with their order-dependent time dimensions.
    pub fn fractional_constants(&self, alpha: R, tau: R) -> Vec<FractionalConstant<R>> {
        self.terms
            .iter()
            .map(|term| {
                let i = term.index;
                let exponent = rf::<R>(i as f64) * (alpha - R::one());
                FractionalConstant {
                    index: i,
                    value: term.coeff * tau.powf(exponent),
                    dimension: ExponentExpr::term(Rational64::from_integer(i.into()), "a")
                        + ExponentExpr::from_integer(self.n0.into()),
                }
            })
            .collect()
    }

    /// Views the Laurent Lagrangian as a general one with the original
    /// (classical) coefficients.
    pub fn to_general(&self) -> GeneralLagrangian<R> {
        let terms_l = self.terms.clone();
        let terms_d1 = self.terms.clone();
        let terms_d2 = self.terms.clone();
        GeneralLagrangian {
            a: self.a,
            b: self.b,
            l: Arc::new(move |x, vel, t| {
                let mut acc = R::zero();
                for term in &terms_l {
                    acc += term.coeff * (term.f)(x, t) * vel.powi(term.index);
                }
                acc
            }),
            d1: Arc::new(move |x, vel, t| {
                let mut acc = R::zero();
                for term in &terms_d1 {
                    acc += term.coeff * (term.f_dx)(x, t) * vel.powi(term.index);
                }
                acc
            }),
            d2: Arc::new(move |x, vel, t| {
                let mut acc = R::zero();
                for term in &terms_d2 {
                    if term.index != 0 {
                        acc += rf::<R>(term.index as f64)
                            * term.coeff
                            * (term.f)(x, t)
                            * vel.powi(term.index - 1);
                    }
                }
                acc
            }),
        }
    }
}

/// The embedding strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedMethod {
    /// Work in rescaled dimensionless time `u = t / tau`.
    Nondim,
    /// Replace `d/dt` by `tau^(alpha-1) * D^alpha`.
    Homogeneous,
    /// Absorb the `tau` powers into order-dependent coefficients.
    FracConst,
    /// Replace `d/dt` by the bare `D^alpha` (dimensionally
    /// inhomogeneous baseline).
    InhomogeneousDirect,
}

impl fmt::Display for EmbedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EmbedMethod::Nondim => "nondim",
            EmbedMethod::Homogeneous => "homogeneous",
            EmbedMethod::FracConst => "frac-const",
            EmbedMethod::InhomogeneousDirect => "inhomogeneous-direct",
        };
        f.write_str(name)
    }
}

/// A validated choice of embedding method, fractional order, and time
/// scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingSpec<R> {
    /// The embedding strategy.
    pub method: EmbedMethod,
    /// Fractional order, strictly inside `(0, 1)`.
    pub alpha: R,
    /// Characteristic time scale, positive and finite.
    pub tau: R,
}

impl<R: Real> EmbeddingSpec<R> {
    /// Builds a spec, rejecting orders outside `(0, 1)` and nonpositive
    /// time scales.
    pub fn new(method: EmbedMethod, alpha: R, tau: R) -> Result<Self, LagrangianError> {
        let spec = EmbeddingSpec { method, alpha, tau };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), LagrangianError> {
        if !self.alpha.is_finite() || !(self.alpha > R::zero()) || self.alpha >= R::one() {
            return Err(LagrangianError::InvalidSpec {
                msg: "fractional order must lie strictly inside (0, 1)".into(),
            });
        }
        if !self.tau.is_finite() || !(self.tau > R::zero()) {
            return Err(LagrangianError::InvalidSpec {
                msg: "time scale must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

/// A causal first-derivative-like operator along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CausalOperator<R> {
    /// The classical first derivative.
    Classical,
    /// The plain Caputo derivative of order `alpha`.
    Caputo {
        /// Derivative order.
        alpha: R,
    },
    /// The rescaled Caputo derivative `tau^(alpha-1) * D^alpha`, which
    /// has the dimension of a first derivative for every order.
    HomogeneousCaputo {
        /// Derivative order.
        alpha: R,
        /// Time scale.
        tau: R,
    },
}

impl<R: Real> CausalOperator<R> {
    /// Applies the operator along the trajectory's grid, one value per
    /// node.
    pub fn apply(&self, x: &SampledTrajectory<R>) -> Result<Vec<R>, FracOpsError> {
        match *self {
            CausalOperator::Classical => Ok(derivative_samples(x)),
            CausalOperator::Caputo { alpha } => caputo(x, alpha),
            CausalOperator::HomogeneousCaputo { alpha, tau } => caputo_with(
                x,
                &CaputoSpec {
                    mu: alpha,
                    tau: Some(tau),
                },
            ),
        }
    }
}

fn check_interval<R: Real>(x: &SampledTrajectory<R>, a: R, b: R) -> Result<(), LagrangianError> {
    let fa = x.t0().to_f64().unwrap_or(f64::NAN);
    let fb = x.t(x.len() - 1).to_f64().unwrap_or(f64::NAN);
    let ea = a.to_f64().unwrap_or(f64::NAN);
    let eb = b.to_f64().unwrap_or(f64::NAN);
    let scale = 1.0f64.max(ea.abs()).max(eb.abs());
    let h = x.h().to_f64().unwrap_or(f64::NAN);
    // The start must match; the trajectory may stop early (the dynamics
    // is causal) but must not extend past the declared interval.
    if (fa - ea).abs() > 1e-9 * scale || fb > eb + 0.5 * h {
        return Err(LagrangianError::IntervalMismatch {
            expected_a: ea,
            expected_b: eb,
            found_a: fa,
            found_b: fb,
        });
    }
    Ok(())
}

/// Core Euler-Lagrange residual assembly: `d1 - op(d2)` along the
/// trajectory, returned on the interior nodes (the initial node is
/// dropped, where causal fractional operators are identically zero).
fn assemble_el<R: Real>(
    l: &GeneralLagrangian<R>,
    op: &CausalOperator<R>,
    x: &SampledTrajectory<R>,
) -> Result<SampledTrajectory<R>, LagrangianError> {
    let dx = op.apply(x)?;
    let n = x.len();
    let mut p = Vec::with_capacity(n);
    for i in 0..n {
        p.push((l.d2)(x.values()[i], dx[i], x.t(i)));
    }
    if !p[0].is_finite() {
        return Err(LagrangianError::SingularAtInitialNode);
    }
    let p_traj = SampledTrajectory::new(x.t0(), x.h(), p)?;
    let dp = op.apply(&p_traj)?;
    let mut r = Vec::with_capacity(n - 1);
    for i in 1..n {
        r.push((l.d1)(x.values()[i], dx[i], x.t(i)) - dp[i]);
    }
    Ok(SampledTrajectory::new(x.t0() + x.h(), x.h(), r)?)
}

/// Classical Euler-Lagrange residual `dL/dx - d/dt(dL/dv)` along a
/// trajectory, on the interior nodes. Zero (to discretization error) on
/// solutions of the classical equation of motion.
pub fn el_residual_classical<R: Real>(
    l: &GeneralLagrangian<R>,
    x: &SampledTrajectory<R>,
) -> Result<SampledTrajectory<R>, LagrangianError> {
    check_interval(x, l.a, l.b)?;
    assemble_el(l, &CausalOperator::Classical, x)
}

/// Fractional Euler-Lagrange residual for the chosen embedding.
///
/// For [`EmbedMethod::Nondim`] the trajectory must live on the rescaled
/// interval starting at `l.a / tau` and the residual is produced on that
/// grid; for the other methods the trajectory lives on `[l.a, l.b]`.
/// [`EmbedMethod::FracConst`] needs Laurent structure and is rejected
/// here; use [`laurent_el_residual`].
pub fn el_residual_fractional<R: Real>(
    l: &GeneralLagrangian<R>,
    spec: &EmbeddingSpec<R>,
    x: &SampledTrajectory<R>,
) -> Result<SampledTrajectory<R>, LagrangianError> {
    spec.validate()?;
    match spec.method {
        EmbedMethod::InhomogeneousDirect => {
            check_interval(x, l.a, l.b)?;
            assemble_el(l, &CausalOperator::Caputo { alpha: spec.alpha }, x)
        }
        EmbedMethod::Homogeneous => {
            check_interval(x, l.a, l.b)?;
            assemble_el(
                l,
                &CausalOperator::HomogeneousCaputo {
                    alpha: spec.alpha,
                    tau: spec.tau,
                },
                x,
            )
        }
        EmbedMethod::Nondim => {
            let ln = nondimensionalize(l, spec.tau);
            check_interval(x, ln.a, ln.b)?;
            assemble_el(&ln, &CausalOperator::Caputo { alpha: spec.alpha }, x)
        }
        EmbedMethod::FracConst => Err(LagrangianError::InvalidSpec {
            msg: "the fractional-constants embedding needs a Laurent Lagrangian; \
                  use laurent_el_residual or check_fracconst_equivalence"
                .into(),
        }),
    }
}

/// Rescales a Lagrangian to dimensionless time `u = t / tau`: the
/// returned Lagrangian takes the rescaled velocity and time and lives on
/// `[a / tau, b / tau]`.
pub fn nondimensionalize<R: Real>(l: &GeneralLagrangian<R>, tau: R) -> GeneralLagrangian<R> {
    let (fl, f1, f2) = (l.l.clone(), l.d1.clone(), l.d2.clone());
    GeneralLagrangian {
        a: l.a / tau,
        b: l.b / tau,
        l: Arc::new(move |y, w, u| fl(y, w / tau, tau * u)),
        d1: Arc::new(move |y, w, u| f1(y, w / tau, tau * u)),
        d2: Arc::new(move |y, w, u| f2(y, w / tau, tau * u) / tau),
    }
}

/// Euler-Lagrange residual of a Laurent Lagrangian under the
/// fractional-constants embedding: the coefficients become
/// `coeff_i * tau^(i*(alpha-1))` and the operator is the plain
/// `D^alpha`. Returned on the interior nodes of the trajectory's grid.
pub fn laurent_el_residual<R: Real>(
    l: &LaurentLagrangian<R>,
    alpha: R,
    tau: R,
    x: &SampledTrajectory<R>,
) -> Result<SampledTrajectory<R>, LagrangianError> {
    let spec = EmbeddingSpec::new(EmbedMethod::FracConst, alpha, tau)?;
    check_interval(x, l.a, l.b)?;
    let embedded = l.fractional_constants(spec.alpha, spec.tau);
    let dx = caputo(x, alpha)?;
    let n = x.len();

    // dL/dx with the embedded coefficients.
    let mut e1 = Vec::with_capacity(n);
    // dL/dv with the embedded coefficients, to be differentiated.
    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        let (xi, ti, vi) = (x.values()[i], x.t(i), dx[i]);
        let mut s1 = R::zero();
        let mut s2 = R::zero();
        for (term, fc) in l.terms.iter().zip(&embedded) {
            s1 += fc.value * (term.f_dx)(xi, ti) * vi.powi(term.index);
            if term.index != 0 {
                s2 += rf::<R>(term.index as f64)
                    * fc.value
                    * (term.f)(xi, ti)
                    * vi.powi(term.index - 1);
            }
        }
        e1.push(s1);
        q.push(s2);
    }
    if !e1[0].is_finite() || !q[0].is_finite() {
        return Err(LagrangianError::SingularAtInitialNode);
    }
    let q_traj = SampledTrajectory::new(x.t0(), x.h(), q)?;
    let dq = caputo(&q_traj, alpha)?;
    let mut r = Vec::with_capacity(n - 1);
    for i in 1..n {
        r.push(e1[i] - dq[i]);
    }
    Ok(SampledTrajectory::new(x.t0() + x.h(), x.h(), r)?)
}

/// Euler-Lagrange residual of a natural Lagrangian, where every
/// embedding collapses to a single constant `c` in front of the kinetic
/// term: the residual is `m * c * D^(2*alpha) x + V'(x)`.
///
/// The constant is `tau^(2*(alpha-1))` for the homogeneous and
/// fractional-constants embeddings, `tau^(-2)` for the
/// nondimensionalized one (whose trajectory lives on the rescaled
/// grid), and `1` for direct substitution. Orders up to and including
/// `alpha = 1` are accepted; at `alpha = 1` the operator is the
/// classical second derivative.
pub fn el_residual_natural<R: Real>(
    nat: &NaturalLagrangian<R>,
    method: EmbedMethod,
    alpha: R,
    tau: R,
    x: &SampledTrajectory<R>,
) -> Result<SampledTrajectory<R>, LagrangianError> {
    if !alpha.is_finite() || !(alpha > R::zero()) || alpha > R::one() {
        return Err(LagrangianError::InvalidSpec {
            msg: "fractional order must lie in (0, 1]".into(),
        });
    }
    if !tau.is_finite() || !(tau > R::zero()) {
        return Err(LagrangianError::InvalidSpec {
            msg: "time scale must be positive and finite".into(),
        });
    }
    let one = R::one();
    let two = rf::<R>(2.0);
    let c = match method {
        EmbedMethod::Homogeneous | EmbedMethod::FracConst => tau.powf(two * (alpha - one)),
        EmbedMethod::Nondim => one / (tau * tau),
        EmbedMethod::InhomogeneousDirect => one,
    };
    if method == EmbedMethod::Nondim {
        check_interval(x, nat.a / tau, nat.b / tau)?;
    } else {
        check_interval(x, nat.a, nat.b)?;
    }
    let mu = two * alpha;
    let d = if mu == two {
        let first = derivative_samples(x);
        let first_traj = SampledTrajectory::new(x.t0(), x.h(), first)?;
        derivative_samples(&first_traj)
    } else {
        caputo(x, mu)?
    };
    let n = x.len();
    let mut r = Vec::with_capacity(n - 1);
    for i in 1..n {
        r.push(nat.m * c * d[i] + (nat.v_prime)(x.values()[i]));
    }
    Ok(SampledTrajectory::new(x.t0() + x.h(), x.h(), r)?)
}

/// Trapezoid-rule action integral of `l` along the trajectory, with the
/// velocity slot filled by `op`.
pub fn action<R: Real>(
    l: &GeneralLagrangian<R>,
    op: &CausalOperator<R>,
    x: &SampledTrajectory<R>,
) -> Result<R, LagrangianError> {
    let dx = op.apply(x)?;
    let n = x.len();
    let mut sum = R::zero();
    for i in 0..n {
        let li = (l.l)(x.values()[i], dx[i], x.t(i));
        let w = if i == 0 || i == n - 1 {
            rf::<R>(0.5)
        } else {
            R::one()
        };
        sum += w * li;
    }
    Ok(sum * x.h())
}

/// Result of a pairwise comparison of two embedding routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport<R> {
    /// Largest node-wise absolute difference between the two routes.
    pub max_gap: R,
    /// Largest magnitude of the reference route on the compared nodes.
    pub scale: R,
    /// Number of nodes entering the comparison.
    pub compared_nodes: usize,
}

impl<R: Real> EquivalenceReport<R> {
    /// The gap divided by the reference scale (or the raw gap when the
    /// reference vanishes identically).
    pub fn normalized(&self) -> R {
        if self.scale > R::zero() {
            self.max_gap / self.scale
        } else {
            self.max_gap
        }
    }
}

fn compare_series<R: Real>(gap: &mut EquivalenceReport<R>, left: R, right: R) {
    let diff = (left - right).abs();
    if diff > gap.max_gap {
        gap.max_gap = diff;
    }
    if right.abs() > gap.scale {
        gap.scale = right.abs();
    }
    gap.compared_nodes += 1;
}

/// Compares the nondimensionalized and homogeneous-operator embeddings
/// of the same Lagrangian on the same underlying trajectory.
///
/// The homogeneous residual is computed on the trajectory's own grid;
/// the nondimensionalized one on the time-rescaled grid; corresponding
/// nodes are then compared. The two routes agree in the continuum, so
/// the normalized gap shrinks at the scheme's convergence order; with
/// `tau = 1` the two computations are identical arithmetic and the raw
/// gap is exactly zero.
pub fn check_method_equivalence<R: Real>(
    l: &GeneralLagrangian<R>,
    alpha: R,
    tau: R,
    x: &SampledTrajectory<R>,
) -> Result<EquivalenceReport<R>, LagrangianError> {
    let homog = EmbeddingSpec::new(EmbedMethod::Homogeneous, alpha, tau)?;
    let r_h = el_residual_fractional(l, &homog, x)?;
    let rescaled = resample_scaled(x, tau)?;
    let nondim = EmbeddingSpec::new(EmbedMethod::Nondim, alpha, tau)?;
    let r_n = el_residual_fractional(l, &nondim, &rescaled)?;

    let tau_f = tau.to_f64().unwrap_or(f64::NAN);
    let n_interior = r_h.len();
    let mut report = EquivalenceReport {
        max_gap: R::zero(),
        scale: R::zero(),
        compared_nodes: 0,
    };
    for j in 0..r_n.len() {
        // Interior node j of the rescaled grid is full-grid node j + 1,
        // which sits at full-grid time index (j + 1) * tau, i.e. at
        // interior index (j + 1) * tau - 1 of the homogeneous residual.
        let p = (j + 1) as f64 * tau_f - 1.0;
        if p < -1e-9 || p > (n_interior - 1) as f64 + 1e-9 {
            continue;
        }
        let right = sample_at_index(r_h.values(), p);
        compare_series(&mut report, r_n.values()[j], right);
    }
    Ok(report)
}

/// Compares the two bookkeepings of the Laurent dynamics: embedded
/// coefficients with the plain operator (route one) against original
/// coefficients with the homogeneous operator (route two). The routes
/// are algebraically identical, so the gap sits at roundoff level.
pub fn check_fracconst_equivalence<R: Real>(
    l: &LaurentLagrangian<R>,
    alpha: R,
    tau: R,
    x: &SampledTrajectory<R>,
) -> Result<EquivalenceReport<R>, LagrangianError> {
    let r_fc = laurent_el_residual(l, alpha, tau, x)?;
    let spec = EmbeddingSpec::new(EmbedMethod::Homogeneous, alpha, tau)?;
    let r_h = el_residual_fractional(&l.to_general(), &spec, x)?;

    let mut report = EquivalenceReport {
        max_gap: R::zero(),
        scale: R::zero(),
        compared_nodes: 0,
    };
    for i in 0..r_fc.len() {
        compare_series(&mut report, r_fc.values()[i], r_h.values()[i]);
    }
    Ok(report)
}

/// One term `D^(order * alpha)-ish` of an operator-level equation of
/// motion: the classical term `d^order/dt^order [ g(x, dx, t) ]`.
#[derive(Clone)]
pub struct OperatorTerm<R> {
    /// Classical derivative order of the term (0 means no derivative).
    pub order: u32,
    /// The differentiated quantity as a function `g(x, dx, t)` of the
    /// position, the embedded velocity, and time.
    pub g: ScalarFn3<R>,
}

/// An equation of motion written as a sum of differentiated terms,
/// `sum_k d^k/dt^k [ g_k(x, dx, t) ] = 0`.
#[derive(Clone)]
pub struct OperatorFamily<R> {
    /// The terms of the sum.
    pub terms: Vec<OperatorTerm<R>>,
}

impl<R: Real> OperatorFamily<R> {
    /// Embeds each derivative homogeneously (`d^k/dt^k` becomes
    /// `tau^(k*(alpha-1)) * D^(k*alpha)`) and evaluates the sum along
    /// the trajectory, on the interior nodes. The velocity slot of each
    /// `g_k` is filled with the embedded first derivative.
    pub fn apply_embedded(
        &self,
        alpha: R,
        tau: R,
        x: &SampledTrajectory<R>,
    ) -> Result<SampledTrajectory<R>, LagrangianError> {
        let spec = EmbeddingSpec::new(EmbedMethod::Homogeneous, alpha, tau)?;
        let dx = CausalOperator::HomogeneousCaputo {
            alpha: spec.alpha,
            tau: spec.tau,
        }
        .apply(x)?;
        let n = x.len();
        let mut total = vec![R::zero(); n - 1];
        for term in &self.terms {
            let mut g_vals = Vec::with_capacity(n);
            for i in 0..n {
                g_vals.push((term.g)(x.values()[i], dx[i], x.t(i)));
            }
            if term.order == 0 {
                for i in 1..n {
                    total[i - 1] += g_vals[i];
                }
                continue;
            }
            if !g_vals[0].is_finite() {
                return Err(LagrangianError::SingularAtInitialNode);
            }
            let g_traj = SampledTrajectory::new(x.t0(), x.h(), g_vals)?;
            let k = rf::<R>(f64::from(term.order));
            let dg = caputo(&g_traj, k * spec.alpha)?;
            let prefactor = spec.tau.powf(k * (spec.alpha - R::one()));
            for i in 1..n {
                total[i - 1] += prefactor * dg[i];
            }
        }
        Ok(SampledTrajectory::new(x.t0() + x.h(), x.h(), total)?)
    }
}

/// Checks that embedding the Euler-Lagrange equation term by term (as an
/// operator family) agrees with embedding the Lagrangian and deriving
/// the equation afterwards. The two routes perform the same arithmetic,
/// so the gap sits at roundoff level.
pub fn check_coherence<R: Real>(
    l: &GeneralLagrangian<R>,
    alpha: R,
    tau: R,
    x: &SampledTrajectory<R>,
) -> Result<EquivalenceReport<R>, LagrangianError> {
    let spec = EmbeddingSpec::new(EmbedMethod::Homogeneous, alpha, tau)?;
    let r_l = el_residual_fractional(l, &spec, x)?;

    let d1 = l.d1.clone();
    let d2 = l.d2.clone();
    let family = OperatorFamily {
        terms: vec![
            OperatorTerm {
                order: 0,
                g: Arc::new(move |xi, vi, ti| d1(xi, vi, ti)),
            },
            OperatorTerm {
                order: 1,
                g: Arc::new(move |xi, vi, ti| -d2(xi, vi, ti)),
            },
        ],
    };
    let r_f = family.apply_embedded(alpha, tau, x)?;

    let mut report = EquivalenceReport {
        max_gap: R::zero(),
        scale: R::zero(),
        compared_nodes: 0,
    };
    for i in 0..r_f.len() {
        compare_series(&mut report, r_f.values()[i], r_l.values()[i]);
    }
    Ok(report)
}

/// Grid metadata of a residual evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    /// Grid step.
    pub h: f64,
    /// Number of residual nodes.
    pub n: usize,
}

/// Summary of one embedded Euler-Lagrange residual evaluation, suitable
/// for JSON serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// Which embedding produced the residual.
    pub method: EmbedMethod,
    /// Fractional order.
    pub alpha: f64,
    /// Time scale.
    pub tau: f64,
    /// Interval the residual was evaluated on.
    pub interval: [f64; 2],
    /// Largest residual magnitude.
    pub residual_max: f64,
    /// Discrete L2 norm of the residual, `sqrt(h * sum r^2)`.
    pub residual_l2: f64,
    /// Residual grid metadata.
    pub grid: GridInfo,
}

impl EmbeddingReport {
    /// Builds the report from a residual trajectory.
    pub fn from_residual<R: Real>(
        method: EmbedMethod,
        alpha: R,
        tau: R,
        residual: &SampledTrajectory<R>,
    ) -> EmbeddingReport {
        let mut max = 0.0f64;
        let mut sq = 0.0f64;
        for v in residual.values() {
            let fv = v.to_f64().unwrap_or(f64::NAN);
            max = max.max(fv.abs());
            sq += fv * fv;
        }
        let h = residual.h().to_f64().unwrap_or(f64::NAN);
        EmbeddingReport {
            method,
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            tau: tau.to_f64().unwrap_or(f64::NAN),
            interval: [
                residual.t0().to_f64().unwrap_or(f64::NAN),
                residual.t(residual.len() - 1).to_f64().unwrap_or(f64::NAN),
            ],
            residual_max: max,
            residual_l2: (h * sq).sqrt(),
            grid: GridInfo {
                h,
                n: residual.len(),
            },
        }
    }
}
