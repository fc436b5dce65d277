//! Dimensional bookkeeping and numerics for fractional-in-time dynamics.
//!
//! The crate has three layers:
//!
//! * **Symbolic layer** ([`dimension`], [`eqdsl`]): physical dimensions whose
//!   exponents may depend affinely on named fractional orders, a small
//!   equation language for writing dynamical equations with integer and
//!   fractional derivatives, and a homogeneity checker that decides whether
//!   all terms of an equation can carry the same dimension.
//! * **Numerical layer** ([`specialfn`], [`fractops`], [`fdesolver`]):
//!   gamma and Mittag-Leffler evaluation, Caputo derivatives of sampled
//!   trajectories, and a predictor-corrector solver for fractional initial
//!   value problems.
//! * **Variational layer** ([`lagrangian`], [`oscillator`]): fractional
//!   embeddings of Lagrangian systems (nondimensionalized, homogeneous
//!   operator, fractional constants), their Euler-Lagrange residuals, and a
//!   worked harmonic-oscillator scenario with closed-form solutions.
//!
//! Numerical routines are generic over the scalar type through the [`Real`]
//! trait; `f64` and `f32` aliases for the common types live at the crate
//! root. The symbolic layer is exact and uses 64-bit rationals throughout.

// Validation guards are written `!(x > 0.0)` so that NaN fails them too;
// `x <= 0.0` would silently accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// The numeric kernels walk several arrays with one index plus offsets;
// iterator chains would obscure the recurrences.
#![allow(clippy::needless_range_loop)]

pub mod dimension;
pub mod eqdsl;
pub mod fdesolver;
pub mod fractops;
mod gfmt;
pub mod lagrangian;
mod lex;
pub mod oscillator;
pub mod specialfn;

pub use gfmt::g17;

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar usable by the numerical layers.
///
/// Implemented by `f64` and `f32` out of the box; any type providing the
/// same `num_traits` surface works.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn rf<R: Real>(v: f64) -> R {
    R::from_f64(v).expect("constant must be representable in the scalar type")
}

/// Sampled trajectory with `f64` samples.
pub type Trajectory64 = fractops::SampledTrajectory<f64>;
/// Sampled trajectory with `f32` samples.
pub type Trajectory32 = fractops::SampledTrajectory<f32>;
/// Mittag-Leffler evaluation parameters for `f64`.
pub type MlParams64 = specialfn::MlParams<f64>;
/// Caputo operator description for `f64`.
pub type CaputoSpec64 = fractops::CaputoSpec<f64>;
/// General Lagrangian over `f64`.
pub type GeneralLagrangian64 = lagrangian::GeneralLagrangian<f64>;
/// Kinetic-minus-potential Lagrangian over `f64`.
pub type NaturalLagrangian64 = lagrangian::NaturalLagrangian<f64>;
/// Laurent-form Lagrangian over `f64`.
pub type LaurentLagrangian64 = lagrangian::LaurentLagrangian<f64>;
/// Embedding description over `f64`.
pub type EmbeddingSpec64 = lagrangian::EmbeddingSpec<f64>;
/// Fractional initial value problem over `f64`.
pub type FdeProblem64 = fdesolver::FdeProblem<f64>;
/// Oscillator scenario configuration over `f64`.
pub type OscillatorConfig64 = oscillator::OscillatorConfig<f64>;
