//! Physical dimensions with symbolic fractional exponents.
//!
//! A [`Dimension`] is a product of base units (`M`, `L`, `T`) raised to
//! [`ExponentExpr`] powers, i.e. exponents that are affine in named order
//! symbols with exact rational coefficients. [`solve_equal`] decides whether
//! a list of term dimensions can be made equal: identically, only at
//! specific order values, or not at all.

mod exponent;
mod solve;

pub use exponent::ExponentExpr;
pub use solve::{solve_equal, HomogeneityVerdict, VerdictKind};

use crate::lex::{lex, Tok, TokKind};
use num_rational::Rational64;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// The fixed table of base units, in display order.
pub const BASE_UNITS: [&str; 3] = ["M", "L", "T"];

/// One of the base units from [`BASE_UNITS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseUnit(&'static str);

impl BaseUnit {
    /// Mass.
    pub const MASS: BaseUnit = BaseUnit("M");
    /// Length.
    pub const LENGTH: BaseUnit = BaseUnit("L");
    /// Time.
    pub const TIME: BaseUnit = BaseUnit("T");

    /// Looks `name` up in the base unit table.
    pub fn new(name: &str) -> Result<Self, DimError> {
        BASE_UNITS
            .iter()
            .find(|&&u| u == name)
            .map(|&u| BaseUnit(u))
            .ok_or_else(|| DimError::UnknownBaseUnit {
                name: name.to_string(),
            })
    }

    /// The unit's name.
    pub fn name(&self) -> &'static str {
        self.0
    }
}

impl fmt::Display for BaseUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Errors from dimension parsing and algebra.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DimError {
    /// The literal could not be parsed.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },
    /// A unit name outside the base table.
    #[error("unknown base unit `{name}` (expected one of M, L, T)")]
    UnknownBaseUnit { name: String },
    /// Raising a symbolic exponent to a symbolic power would leave the
    /// affine exponent language.
    #[error("exponent would no longer be affine in the order symbols")]
    NonAffineExponent,
}

/// A product of base units raised to affine symbolic exponents.
///
/// The representation is canonical: zero exponents are never stored, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Dimension {
    exps: BTreeMap<BaseUnit, ExponentExpr>,
}

impl Dimension {
    /// The dimensionless dimension.
    pub fn dimensionless() -> Self {
        Self::default()
    }

    /// A single base unit to the first power.
    pub fn base(unit: BaseUnit) -> Self {
        let mut exps = BTreeMap::new();
        exps.insert(unit, ExponentExpr::from_integer(1));
        Self { exps }
    }

    /// Builds a dimension from unit/exponent pairs. Repeated units multiply.
    pub fn from_exponents<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (BaseUnit, ExponentExpr)>,
    {
        let mut exps: BTreeMap<BaseUnit, ExponentExpr> = BTreeMap::new();
        for (unit, e) in pairs {
            let cur = exps.remove(&unit).unwrap_or_else(ExponentExpr::zero);
            let sum = cur + e;
            if !sum.is_zero() {
                exps.insert(unit, sum);
            }
        }
        Self { exps }
    }

    /// True for the dimensionless dimension.
    pub fn is_dimensionless(&self) -> bool {
        self.exps.is_empty()
    }

    /// The exponent of `unit` (zero when absent).
    pub fn exponent(&self, unit: BaseUnit) -> ExponentExpr {
        self.exps
            .get(&unit)
            .cloned()
            .unwrap_or_else(ExponentExpr::zero)
    }

    /// Product of two dimensions.
    pub fn mul(&self, other: &Dimension) -> Dimension {
        Dimension::from_exponents(
            self.exps
                .iter()
                .chain(other.exps.iter())
                .map(|(u, e)| (*u, e.clone())),
        )
    }

    /// Quotient of two dimensions.
    pub fn div(&self, other: &Dimension) -> Dimension {
        self.mul(&other.inv())
    }

    /// Reciprocal dimension.
    pub fn inv(&self) -> Dimension {
        Dimension {
            exps: self.exps.iter().map(|(u, e)| (*u, -e.clone())).collect(),
        }
    }

    /// Raises to a constant rational power.
    pub fn pow_rational(&self, q: Rational64) -> Dimension {
        if q.is_zero() {
            return Dimension::dimensionless();
        }
        Dimension {
            exps: self.exps.iter().map(|(u, e)| (*u, e.scale(q))).collect(),
        }
    }

    /// Raises to an affine power.
    ///
    /// Fails with [`DimError::NonAffineExponent`] when both the power and
    /// some stored exponent carry order symbols: the product of two
    /// genuinely affine expressions is quadratic.
    pub fn pow(&self, power: &ExponentExpr) -> Result<Dimension, DimError> {
        if let Some(q) = power.as_constant() {
            return Ok(self.pow_rational(q));
        }
        let mut exps = BTreeMap::new();
        for (u, e) in &self.exps {
            let c = e.as_constant().ok_or(DimError::NonAffineExponent)?;
            let scaled = power.scale(c);
            if !scaled.is_zero() {
                exps.insert(*u, scaled);
            }
        }
        Ok(Dimension { exps })
    }

    /// All order symbols appearing in exponents.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.exps
            .values()
            .flat_map(|e| e.symbols().map(str::to_string))
            .collect()
    }

    /// Substitutes a value for one order symbol in every exponent.
    pub fn substitute(&self, name: &str, value: Rational64) -> Dimension {
        Dimension::from_exponents(
            self.exps
                .iter()
                .map(|(u, e)| (*u, e.substitute(name, value))),
        )
    }

    /// Parses a dimension literal such as `1`, `L`, `L^2*T^(-1)` or
    /// `T^(2*a-2)`. Negative, rational and symbolic exponents must be
    /// parenthesized.
    pub fn parse(src: &str) -> Result<Self, DimError> {
        let toks = lex(src).map_err(|e| DimError::Parse {
            line: e.line,
            col: e.col,
            msg: e.msg,
        })?;
        let mut pos = 0;
        let dim = parse_dimension_tokens(&toks, &mut pos)?;
        expect_eof(&toks, pos)?;
        Ok(dim)
    }
}

impl fmt::Display for Dimension {
    /// Formats in base-table order (`M`, `L`, `T`); `1` when dimensionless.
    /// Exponent 1 is omitted; nonnegative integer exponents print bare and
    /// everything else is parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let mut first = true;
        for name in BASE_UNITS {
            let unit = BaseUnit(name);
            let Some(e) = self.exps.get(&unit) else {
                continue;
            };
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{unit}")?;
            if e.as_integer() == Some(1) {
                continue;
            }
            match e.as_integer() {
                Some(n) if n >= 0 => write!(f, "^{n}")?,
                _ => write!(f, "^({e})")?,
            }
        }
        Ok(())
    }
}

fn err_at(tok: &Tok, msg: impl Into<String>) -> DimError {
    DimError::Parse {
        line: tok.line,
        col: tok.col,
        msg: msg.into(),
    }
}

fn expect_eof(toks: &[Tok], pos: usize) -> Result<(), DimError> {
    if toks[pos].kind == TokKind::Eof {
        Ok(())
    } else {
        Err(err_at(&toks[pos], "expected end of input"))
    }
}

/// Parses a dimension literal from a token stream, leaving `pos` on the
/// first token after it. Shared with the equation parser.
pub(crate) fn parse_dimension_tokens(toks: &[Tok], pos: &mut usize) -> Result<Dimension, DimError> {
    if toks[*pos].kind == TokKind::Int(1) {
        *pos += 1;
        return Ok(Dimension::dimensionless());
    }
    let mut pairs = Vec::new();
    loop {
        let tok = &toks[*pos];
        let TokKind::Ident(name) = &tok.kind else {
            return Err(err_at(tok, "expected a base unit name"));
        };
        let unit = BaseUnit::new(name)?;
        *pos += 1;
        let e = if toks[*pos].kind == TokKind::Caret {
            *pos += 1;
            parse_power_tokens(toks, pos)?
        } else {
            ExponentExpr::from_integer(1)
        };
        pairs.push((unit, e));
        if toks[*pos].kind == TokKind::Star {
            *pos += 1;
        } else {
            break;
        }
    }
    Ok(Dimension::from_exponents(pairs))
}

/// Parses what may follow `^`: a bare nonnegative integer, or a
/// parenthesized affine expression.
pub(crate) fn parse_power_tokens(toks: &[Tok], pos: &mut usize) -> Result<ExponentExpr, DimError> {
    match &toks[*pos].kind {
        TokKind::Int(n) => {
            *pos += 1;
            Ok(ExponentExpr::from_integer(*n))
        }
        TokKind::LParen => {
            *pos += 1;
            let e = parse_affine_tokens(toks, pos)?;
            if toks[*pos].kind != TokKind::RParen {
                return Err(err_at(&toks[*pos], "expected `)` after exponent"));
            }
            *pos += 1;
            Ok(e)
        }
        _ => Err(err_at(
            &toks[*pos],
            "expected an integer or a parenthesized exponent after `^`",
        )),
    }
}

/// Parses an affine exponent expression from a token stream:
/// sums and differences of `q`, `sym` and `q*sym` terms, where `q` is an
/// integer or `int/int` rational.
pub(crate) fn parse_affine_tokens(toks: &[Tok], pos: &mut usize) -> Result<ExponentExpr, DimError> {
    let mut acc = ExponentExpr::zero();
    let mut sign = Rational64::from_integer(1);
    if toks[*pos].kind == TokKind::Minus {
        sign = -sign;
        *pos += 1;
    }
    loop {
        let term = parse_affine_term(toks, pos)?;
        acc = acc + term.scale(sign);
        match toks[*pos].kind {
            TokKind::Plus => {
                sign = Rational64::from_integer(1);
                *pos += 1;
            }
            TokKind::Minus => {
                sign = Rational64::from_integer(-1);
                *pos += 1;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_affine_term(toks: &[Tok], pos: &mut usize) -> Result<ExponentExpr, DimError> {
    match &toks[*pos].kind {
        TokKind::Int(n) => {
            let mut q = Rational64::from_integer(*n);
            *pos += 1;
            if toks[*pos].kind == TokKind::Slash {
                let denom_tok = &toks[*pos + 1];
                let TokKind::Int(d) = &denom_tok.kind else {
                    return Err(err_at(denom_tok, "expected a denominator"));
                };
                if *d == 0 {
                    return Err(err_at(denom_tok, "zero denominator"));
                }
                q = Rational64::new(*n, *d);
                *pos += 2;
            }
            if toks[*pos].kind == TokKind::Star {
                let sym_tok = &toks[*pos + 1];
                let TokKind::Ident(sym) = &sym_tok.kind else {
                    return Err(err_at(sym_tok, "expected an order symbol after `*`"));
                };
                *pos += 2;
                Ok(ExponentExpr::term(q, sym))
            } else {
                Ok(ExponentExpr::constant(q))
            }
        }
        TokKind::Ident(sym) => {
            let e = ExponentExpr::symbol(sym);
            *pos += 1;
            Ok(e)
        }
        _ => Err(err_at(&toks[*pos], "expected an exponent term")),
    }
}

/// Parses an affine exponent expression such as `a`, `2*a-2` or `3/2`.
pub fn parse_exponent_expr(src: &str) -> Result<ExponentExpr, DimError> {
    let toks = lex(src).map_err(|e| DimError::Parse {
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let mut pos = 0;
    let e = parse_affine_tokens(&toks, &mut pos)?;
    expect_eof(&toks, pos)?;
    Ok(e)
}
