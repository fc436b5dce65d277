//! A small language for dynamical equations with fractional derivatives.
//!
//! A document declares order symbols, constants, variables and functions,
//! then states one equation:
//!
//! ```text
//! order a;
//! const omega: T^(-1);
//! const lambda: T^(-1);
//! var x: L of t: T;
//! eq: FD(2*a,t)x + lambda^(a)*FD(a,t)x + omega^(2*a)*x = 0;
//! ```
//!
//! `D(k,t)` is the k-th classical derivative in `t`; `FD(mu,t)` is a
//! fractional derivative of affine symbolic order `mu`. Exponents on
//! constants and variables may also be affine in the order symbols, so
//! dimensional bookkeeping stays exact. Parsing ([`parse_document`]),
//! canonical formatting (`Display`), dimensional inference and homogeneity
//! checking ([`check_homogeneity`]), and operator substitution
//! ([`substitute_operator`]) all work on the same [`EquationDoc`] tree.

mod format;
mod infer;
mod parse;
mod subst;

pub use infer::{check_homogeneity, infer_dimension, TypeEnv};
pub use parse::parse_document;
pub use subst::{substitute_operator, OperatorRule, WrtFilter};

use crate::dimension::{DimError, Dimension, ExponentExpr};
use num_rational::Rational64;
use thiserror::Error;

/// Expression tree of one side of an equation.
///
/// Built in canonical form: `Add` and `Mul` hold at least two children and
/// never nest themselves directly, which makes structural equality useful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// A rational number literal.
    Num(Rational64),
    /// A declared constant.
    Const(String),
    /// A declared dependent or independent variable.
    Var(String),
    /// A base raised to an affine exponent.
    Pow(Box<Expr>, ExponentExpr),
    /// A product of at least two factors.
    Mul(Vec<Expr>),
    /// A sum of at least two terms.
    Add(Vec<Expr>),
    /// A classical derivative of integer order in one independent variable.
    Der {
        /// Derivative order, at least 1.
        order: u32,
        /// Independent variable differentiated against.
        wrt: String,
        /// The differentiated expression.
        arg: Box<Expr>,
    },
    /// A fractional derivative of affine symbolic order.
    FracDer {
        /// Derivative order, affine in the order symbols.
        order: ExponentExpr,
        /// Independent variable differentiated against.
        wrt: String,
        /// The differentiated expression.
        arg: Box<Expr>,
    },
    /// A declared function applied to an argument.
    Apply {
        /// Function name.
        func: String,
        /// Argument expression.
        arg: Box<Expr>,
    },
}

impl Expr {
    /// Integer literal.
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational64::from_integer(n))
    }

    /// Builds a sum, flattening nested sums; empty becomes `0` and a single
    /// term is returned unchanged.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Expr::Add(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::int(0),
            1 => flat.pop().expect("one element"),
            _ => Expr::Add(flat),
        }
    }

    /// Builds a product, flattening nested products; empty becomes `1` and
    /// a single factor is returned unchanged.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                Expr::Mul(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::int(1),
            1 => flat.pop().expect("one element"),
            _ => Expr::Mul(flat),
        }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;

    /// Negates without growing the tree more than necessary: literals flip
    /// sign, sums negate termwise, products flip a leading literal or gain
    /// a `-1` factor.
    fn neg(self) -> Expr {
        match self {
            Expr::Num(q) => Expr::Num(-q),
            Expr::Add(terms) => Expr::Add(terms.into_iter().map(Expr::neg).collect()),
            Expr::Mul(mut factors) => {
                if let Expr::Num(q) = &mut factors[0] {
                    *q = -*q;
                } else {
                    factors.insert(0, Expr::int(-1));
                }
                Expr::Mul(factors)
            }
            other => Expr::Mul(vec![Expr::int(-1), other]),
        }
    }
}

/// What a declaration introduces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclKind {
    /// A fractional order symbol, usable in exponents and `FD` orders.
    Order,
    /// A constant with a fixed dimension.
    Constant {
        /// The constant's dimension.
        dim: Dimension,
    },
    /// A dependent variable and the independent variables it depends on.
    Variable {
        /// The variable's own dimension.
        dim: Dimension,
        /// Independent variables with their dimensions, in written order.
        deps: Vec<(String, Dimension)>,
    },
    /// A function with fixed argument and result dimensions.
    Function {
        /// Required argument dimension.
        arg: Dimension,
        /// Result dimension.
        ret: Dimension,
    },
}

/// One declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    /// Declared name.
    pub name: String,
    /// What the name stands for.
    pub kind: DeclKind,
}

/// A parsed document: declarations plus one equation.
///
/// The equation is normalized to `lhs = 0` form at parse time by moving the
/// right-hand side over with negated sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationDoc {
    /// Declarations in source order (with any synthesized ones added by
    /// [`substitute_operator`]).
    pub decls: Vec<Decl>,
    /// The left-hand side of the normalized equation `lhs = 0`.
    pub lhs: Expr,
}

/// Errors from parsing, inference and substitution.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EqError {
    /// Tokenization or grammar failure.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax {
        /// 1-based source line.
        line: u32,
        /// 1-based source column.
        col: u32,
        /// What went wrong.
        msg: String,
    },
    /// A name was used without being declared.
    #[error("`{name}` is not declared")]
    Undeclared {
        /// The offending name.
        name: String,
    },
    /// A name was declared more than once.
    #[error("`{name}` is declared more than once")]
    Duplicate {
        /// The offending name.
        name: String,
    },
    /// A keyword or operator name was used as a declaration name.
    #[error("`{name}` cannot be declared: {msg}")]
    Reserved {
        /// The offending name.
        name: String,
        /// Why it is reserved.
        msg: String,
    },
    /// A declared name was used in a position its kind does not allow.
    #[error("invalid use of `{name}`: {msg}")]
    InvalidUsage {
        /// The offending name.
        name: String,
        /// What was expected instead.
        msg: String,
    },
    /// Something that is not a function was applied to an argument.
    #[error("`{name}` is not a function")]
    NotAFunction {
        /// The offending name.
        name: String,
    },
    /// A nested sum mixes dimensions, so no dimension can be assigned.
    #[error("terms of a sum have different dimensions ({left} vs {right})")]
    InhomogeneousSum {
        /// Dimension of the first term.
        left: String,
        /// Dimension of the first disagreeing term.
        right: String,
    },
    /// A function was applied to an argument of the wrong dimension.
    #[error("argument of `{name}` has dimension {found}, expected {expected}")]
    BadFunctionArg {
        /// Function name.
        name: String,
        /// Inferred argument dimension.
        found: String,
        /// Declared argument dimension.
        expected: String,
    },
    /// Dimension parsing or algebra failed.
    #[error(transparent)]
    Dim(#[from] DimError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_flatten() {
        let x = Expr::Var("x".into());
        let y = Expr::Var("y".into());
        let z = Expr::Var("z".into());
        let nested = Expr::add(vec![Expr::add(vec![x.clone(), y.clone()]), z.clone()]);
        assert_eq!(nested, Expr::Add(vec![x.clone(), y.clone(), z.clone()]));
        let nested = Expr::mul(vec![Expr::mul(vec![x.clone(), y.clone()]), z.clone()]);
        assert_eq!(nested, Expr::Mul(vec![x.clone(), y, z]));
        assert_eq!(Expr::add(vec![]), Expr::int(0));
        assert_eq!(Expr::mul(vec![x.clone()]), x);
    }

    #[test]
    fn negation_rules() {
        assert_eq!(-Expr::int(2), Expr::int(-2));
        let x = Expr::Var("x".into());
        assert_eq!(
            -Expr::Mul(vec![Expr::int(2), x.clone()]),
            Expr::Mul(vec![Expr::int(-2), x.clone()])
        );
        assert_eq!(
            -Expr::Mul(vec![x.clone(), x.clone()]),
            Expr::Mul(vec![Expr::int(-1), x.clone(), x.clone()])
        );
        assert_eq!(-x.clone(), Expr::Mul(vec![Expr::int(-1), x.clone()]));
        assert_eq!(
            -Expr::Add(vec![x.clone(), Expr::int(1)]),
            Expr::Add(vec![-x, Expr::int(-1)])
        );
    }
}
