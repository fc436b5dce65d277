//! Rewriting classical derivatives into fractional ones.
//!
//! Two rewrite rules cover the common ways a fractional model is obtained
//! from a classical equation:
//!
//! * [`OperatorRule::ReplaceDer`] swaps each k-th derivative for a
//!   fractional derivative of order `k*alpha`, changing the dimension of
//!   every derivative term.
//! * [`OperatorRule::HomogeneousReplace`] swaps `D(k, t)` for
//!   `tau^(k*alpha - k) * FD(k*alpha, t)`, which keeps every term's
//!   dimension unchanged for all orders because the time-scale prefactor
//!   absorbs the deficit.
//!
//! The rewritten document gains `order` declarations for any new exponent
//! symbols and, for the homogeneous rule, a `const tau: T;` declaration.

use super::parse::doc_env;
use super::{Decl, DeclKind, EqError, EquationDoc, Expr};
use crate::dimension::{BaseUnit, Dimension, ExponentExpr};

/// Selects which derivatives a rewrite applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WrtFilter {
    /// Rewrite derivatives taken with respect to any independent variable
    /// whose dimension is exactly time.
    TimeDimensioned,
    /// Rewrite derivatives taken with respect to this independent variable
    /// only.
    Named(String),
}

/// A rule for rewriting classical derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorRule {
    /// `D(k, w)` becomes `FD(k*alpha, w)`.
    ReplaceDer {
        /// Base order of the fractional operator; a first derivative
        /// becomes a fractional derivative of this order.
        alpha: ExponentExpr,
    },
    /// `D(k, w)` becomes `tau^(k*alpha - k) * FD(k*alpha, w)`.
    HomogeneousReplace {
        /// Base order of the fractional operator.
        alpha: ExponentExpr,
    },
}

impl OperatorRule {
    fn alpha(&self) -> &ExponentExpr {
        match self {
            OperatorRule::ReplaceDer { alpha } | OperatorRule::HomogeneousReplace { alpha } => {
                alpha
            }
        }
    }
}

const TAU: &str = "tau";

/// Applies `rule` to every classical derivative in `doc` selected by
/// `filter`, returning the rewritten document.
///
/// New exponent symbols appearing in the rule's order are declared as
/// `order` symbols; [`OperatorRule::HomogeneousReplace`] also declares
/// `const tau: T;` when absent. A clash with an existing declaration of a
/// different kind is an [`EqError::InvalidUsage`].
pub fn substitute_operator(
    doc: &EquationDoc,
    rule: &OperatorRule,
    filter: &WrtFilter,
) -> Result<EquationDoc, EqError> {
    let env = doc_env(doc)?;
    let applies = |wrt: &str| -> bool {
        match filter {
            WrtFilter::TimeDimensioned => env
                .indep_dim(wrt)
                .is_some_and(|d| *d == Dimension::base(BaseUnit::TIME)),
            WrtFilter::Named(name) => wrt == name,
        }
    };

    let lhs = rewrite(&doc.lhs, rule, &applies);

    let mut decls = Vec::new();
    for sym in rule.alpha().symbols() {
        if env.is_order(sym) {
            continue;
        }
        if env.knows(sym) {
            return Err(EqError::InvalidUsage {
                name: sym.to_string(),
                msg: "already declared as something other than an order symbol".into(),
            });
        }
        decls.push(Decl {
            name: sym.to_string(),
            kind: DeclKind::Order,
        });
    }
    if matches!(rule, OperatorRule::HomogeneousReplace { .. }) {
        match env.const_dim(TAU) {
            Some(d) if *d == Dimension::base(BaseUnit::TIME) => {}
            Some(_) => {
                return Err(EqError::InvalidUsage {
                    name: TAU.into(),
                    msg: "declared with a dimension other than T".into(),
                })
            }
            None if env.knows(TAU) => {
                return Err(EqError::InvalidUsage {
                    name: TAU.into(),
                    msg: "already declared as something other than a constant".into(),
                })
            }
            None => decls.push(Decl {
                name: TAU.into(),
                kind: DeclKind::Constant {
                    dim: Dimension::base(BaseUnit::TIME),
                },
            }),
        }
    }
    decls.extend(doc.decls.iter().cloned());

    Ok(EquationDoc { decls, lhs })
}

fn rewrite(e: &Expr, rule: &OperatorRule, applies: &dyn Fn(&str) -> bool) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Add(terms) => Expr::add(terms.iter().map(|t| rewrite(t, rule, applies)).collect()),
        Expr::Mul(factors) => {
            Expr::mul(factors.iter().map(|t| rewrite(t, rule, applies)).collect())
        }
        Expr::Pow(base, exp) => Expr::Pow(Box::new(rewrite(base, rule, applies)), exp.clone()),
        Expr::Apply { func, arg } => Expr::Apply {
            func: func.clone(),
            arg: Box::new(rewrite(arg, rule, applies)),
        },
        Expr::FracDer { order, wrt, arg } => Expr::FracDer {
            order: order.clone(),
            wrt: wrt.clone(),
            arg: Box::new(rewrite(arg, rule, applies)),
        },
        Expr::Der { order, wrt, arg } => {
            let inner = Box::new(rewrite(arg, rule, applies));
            if !applies(wrt) {
                return Expr::Der {
                    order: *order,
                    wrt: wrt.clone(),
                    arg: inner,
                };
            }
            let k = i64::from(*order);
            let frac_order = rule.alpha().clone() * num_rational::Rational64::from_integer(k);
            let frac = Expr::FracDer {
                order: frac_order.clone(),
                wrt: wrt.clone(),
                arg: inner,
            };
            match rule {
                OperatorRule::ReplaceDer { .. } => frac,
                OperatorRule::HomogeneousReplace { .. } => {
                    let deficit = frac_order - ExponentExpr::from_integer(k);
                    Expr::Mul(vec![
                        Expr::Pow(Box::new(Expr::Const(TAU.into())), deficit),
                        frac,
                    ])
                }
            }
        }
    }
}
