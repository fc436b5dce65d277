//! Exponents that are affine in named fractional orders.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A rational constant plus rational multiples of named order symbols,
/// e.g. `2*a - 2` or `3/2`.
///
/// This is the exponent language of the whole symbolic layer: base units are
/// raised to these, fractional derivative orders are written in them, and
/// the homogeneity solver works on linear equations between them. The
/// representation is canonical (no zero coefficients are stored), so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentExpr {
    constant: Rational64,
    coeffs: BTreeMap<String, Rational64>,
}

impl ExponentExpr {
    /// The zero exponent.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A constant exponent.
    pub fn constant(c: Rational64) -> Self {
        Self {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    /// A constant integer exponent.
    pub fn from_integer(n: i64) -> Self {
        Self::constant(Rational64::from_integer(n))
    }

    /// The bare symbol `name`.
    pub fn symbol(name: &str) -> Self {
        Self::term(Rational64::from_integer(1), name)
    }

    /// The single term `coeff * name`.
    pub fn term(coeff: Rational64, name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(name.to_string(), coeff);
        }
        Self {
            constant: Rational64::zero(),
            coeffs,
        }
    }

    /// True when no symbol appears.
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when the exponent is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    /// The constant part (the value at all symbols set to zero).
    pub fn constant_part(&self) -> Rational64 {
        self.constant
    }

    /// The coefficient of `name`, zero if absent.
    pub fn coeff(&self, name: &str) -> Rational64 {
        self.coeffs
            .get(name)
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    /// The symbols with nonzero coefficient, in sorted order.
    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(|s| s.as_str())
    }

    /// `Some(c)` when the exponent is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational64> {
        self.is_constant().then_some(self.constant)
    }

    /// `Some(n)` when the exponent is the integer constant `n`.
    pub fn as_integer(&self) -> Option<i64> {
        match self.as_constant() {
            Some(c) if c.is_integer() => Some(c.to_integer()),
            _ => None,
        }
    }

    /// Multiplies every coefficient and the constant by `k`.
    pub fn scale(&self, k: Rational64) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            constant: self.constant * k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, c)| (s.clone(), c * k))
                .collect(),
        }
    }

    /// Evaluates exactly; `None` when a symbol has no value.
    pub fn evaluate(&self, values: &BTreeMap<String, Rational64>) -> Option<Rational64> {
        let mut acc = self.constant;
        for (sym, c) in &self.coeffs {
            acc += c * values.get(sym)?;
        }
        Some(acc)
    }

    /// Evaluates in floating point; `None` when a symbol has no value.
    pub fn eval_f64(&self, values: &BTreeMap<String, f64>) -> Option<f64> {
        let mut acc = ratio_to_f64(self.constant);
        for (sym, c) in &self.coeffs {
            acc += ratio_to_f64(*c) * values.get(sym)?;
        }
        Some(acc)
    }

    /// Replaces `name` by the constant `value`.
    pub fn substitute(&self, name: &str, value: Rational64) -> Self {
        let mut out = self.clone();
        if let Some(c) = out.coeffs.remove(name) {
            out.constant += c * value;
        }
        out
    }
}

pub(crate) fn ratio_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

impl Add for ExponentExpr {
    type Output = ExponentExpr;
    fn add(self, rhs: ExponentExpr) -> ExponentExpr {
        let mut coeffs = self.coeffs;
        for (sym, c) in rhs.coeffs {
            let entry = coeffs.entry(sym).or_insert_with(Rational64::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        ExponentExpr {
            constant: self.constant + rhs.constant,
            coeffs,
        }
    }
}

impl Sub for ExponentExpr {
    type Output = ExponentExpr;
    fn sub(self, rhs: ExponentExpr) -> ExponentExpr {
        self + (-rhs)
    }
}

impl Neg for ExponentExpr {
    type Output = ExponentExpr;
    fn neg(self) -> ExponentExpr {
        self.scale(Rational64::from_integer(-1))
    }
}

impl Mul<Rational64> for ExponentExpr {
    type Output = ExponentExpr;
    fn mul(self, k: Rational64) -> ExponentExpr {
        self.scale(k)
    }
}

fn fmt_ratio_abs(q: Rational64) -> String {
    let q = q.abs();
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExponentExpr {
    /// Canonical form: symbol terms in sorted order, then the constant,
    /// joined with explicit signs, e.g. `2*a-2`, `-a+1`, `3/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, neg: bool, body: String| -> fmt::Result {
            if first {
                first = false;
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            write!(f, "{body}")
        };
        for (sym, c) in &self.coeffs {
            let mag = c.abs();
            let body = if mag == Rational64::from_integer(1) {
                sym.clone()
            } else {
                format!("{}*{}", fmt_ratio_abs(*c), sym)
            };
            emit(f, c.is_negative(), body)?;
        }
        if !self.constant.is_zero() {
            emit(f, self.constant.is_negative(), fmt_ratio_abs(self.constant))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::parse_exponent_expr;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn canonical_zero_coefficients_vanish() {
        let e = ExponentExpr::symbol("a") - ExponentExpr::symbol("a");
        assert!(e.is_zero());
        assert_eq!(e, ExponentExpr::zero());
    }

    #[test]
    fn arithmetic() {
        let e = ExponentExpr::term(r(2, 1), "a") + ExponentExpr::from_integer(-2);
        assert_eq!(e.coeff("a"), r(2, 1));
        assert_eq!(e.constant_part(), r(-2, 1));
        assert_eq!(e.substitute("a", r(1, 1)), ExponentExpr::zero());
        assert_eq!(e.substitute("a", r(1, 2)), ExponentExpr::from_integer(-1));
        assert_eq!(
            e.scale(r(1, 2)),
            ExponentExpr::symbol("a") + ExponentExpr::from_integer(-1)
        );
    }

    #[test]
    fn evaluation() {
        let e = ExponentExpr::term(r(3, 2), "a") + ExponentExpr::constant(r(1, 2));
        let vals: BTreeMap<String, Rational64> = [("a".to_string(), r(1, 3))].into();
        assert_eq!(e.evaluate(&vals), Some(r(1, 1)));
        assert_eq!(ExponentExpr::symbol("b").evaluate(&vals), None);
    }

    #[test]
    fn display_forms() {
        let two_a_minus_two = ExponentExpr::term(r(2, 1), "a") + ExponentExpr::from_integer(-2);
        assert_eq!(two_a_minus_two.to_string(), "2*a-2");
        let neg_lead = -ExponentExpr::symbol("a") + ExponentExpr::from_integer(1);
        assert_eq!(neg_lead.to_string(), "-a+1");
        assert_eq!(ExponentExpr::constant(r(3, 2)).to_string(), "3/2");
        assert_eq!(ExponentExpr::constant(r(-1, 2)).to_string(), "-1/2");
        assert_eq!(ExponentExpr::zero().to_string(), "0");
        let mixed = ExponentExpr::term(r(3, 2), "a") + ExponentExpr::term(r(-1, 1), "b");
        assert_eq!(mixed.to_string(), "3/2*a-b");
    }

    #[test]
    fn display_parses_back() {
        for e in [
            ExponentExpr::term(r(2, 1), "a") + ExponentExpr::from_integer(-2),
            -ExponentExpr::symbol("a"),
            ExponentExpr::constant(r(-7, 3)),
            ExponentExpr::term(r(1, 2), "alpha")
                + ExponentExpr::term(r(-5, 4), "beta")
                + ExponentExpr::from_integer(3),
            ExponentExpr::zero(),
        ] {
            assert_eq!(parse_exponent_expr(&e.to_string()).unwrap(), e);
        }
    }
}
