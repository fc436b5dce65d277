//! Canonical text rendering of documents and expressions.
//!
//! The output parses back to the same tree, so formatting then parsing is
//! the identity on canonical documents.

use super::{Decl, DeclKind, EquationDoc, Expr};
use crate::dimension::ExponentExpr;
use num_rational::Rational64;
use num_traits::Signed;
use std::fmt;

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DeclKind::Order => write!(f, "order {};", self.name),
            DeclKind::Constant { dim } => write!(f, "const {}: {dim};", self.name),
            DeclKind::Variable { dim, deps } => {
                write!(f, "var {}: {dim} of ", self.name)?;
                for (i, (dep, ddim)) in deps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{dep}: {ddim}")?;
                }
                write!(f, ";")
            }
            DeclKind::Function { arg, ret } => {
                write!(f, "fn {}: {arg} -> {ret};", self.name)
            }
        }
    }
}

impl fmt::Display for EquationDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        write!(f, "eq: {} = 0;", format_expr(&self.lhs))
    }
}

/// Renders an expression at statement level, with signs extracted from the
/// terms of a sum: `FD(2*a,t)x - omega^2*x`.
pub(crate) fn format_expr(e: &Expr) -> String {
    match e {
        Expr::Add(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let (neg, body) = signed_term(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&body);
            }
            out
        }
        single => format_term(single),
    }
}

/// Renders a single term with its sign attached: `-omega^2*x`.
pub(crate) fn format_term(t: &Expr) -> String {
    let (neg, body) = signed_term(t);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Splits a leading minus off a term: negative literals and products whose
/// first factor is a negative literal render without the sign.
fn signed_term(t: &Expr) -> (bool, String) {
    match t {
        Expr::Num(q) if q.is_negative() => (true, render_num(&-*q)),
        Expr::Mul(factors) => {
            if let Expr::Num(q) = &factors[0] {
                if q.is_negative() {
                    let magnitude = -*q;
                    let mut parts = Vec::new();
                    if magnitude != Rational64::from_integer(1) || factors.len() == 1 {
                        parts.push(render_num(&magnitude));
                    }
                    parts.extend(factors[1..].iter().map(render_factor));
                    return (true, parts.join("*"));
                }
            }
            (
                false,
                factors
                    .iter()
                    .map(render_factor)
                    .collect::<Vec<_>>()
                    .join("*"),
            )
        }
        other => (false, render_factor(other)),
    }
}

fn render_factor(f: &Expr) -> String {
    match f {
        Expr::Pow(base, e) => format!("{}^{}", render_atom(base), render_exponent(e)),
        other => render_atom(other),
    }
}

fn render_exponent(e: &ExponentExpr) -> String {
    match e.as_integer() {
        Some(n) if n >= 0 => n.to_string(),
        _ => format!("({e})"),
    }
}

fn render_atom(a: &Expr) -> String {
    match a {
        Expr::Num(q) if !q.is_negative() => render_num(q),
        Expr::Num(q) => format!("(-{})", render_num(&-*q)),
        Expr::Const(name) | Expr::Var(name) => name.clone(),
        Expr::Apply { func, arg } => format!("{func}({})", format_expr(arg)),
        Expr::Der { order, wrt, arg } => {
            format!("D({order},{wrt}){}", render_atom(arg))
        }
        Expr::FracDer { order, wrt, arg } => {
            format!("FD({order},{wrt}){}", render_atom(arg))
        }
        Expr::Add(_) | Expr::Mul(_) | Expr::Pow(..) => format!("({})", format_expr(a)),
    }
}

fn render_num(q: &Rational64) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_document;
    use super::*;

    /// Parses, formats, and checks both the exact output string and that
    /// the output reparses to the same tree.
    fn round_trip(src: &str, canonical: &str) {
        let doc = parse_document(src).unwrap();
        let rendered = doc.to_string();
        assert_eq!(rendered, canonical);
        let reparsed = parse_document(&rendered).unwrap();
        assert_eq!(reparsed, doc);
    }

    #[test]
    fn oscillator_documents() {
        round_trip(
            "order a;\nconst lambda: T^(-1);\nconst omega: T^(-1);\nvar x: L of t: T;\n\
             eq: FD(2*a,t)x + lambda^(a)*FD(a,t)x + omega^(2*a)*x = 0;",
            "order a;\nconst lambda: T^(-1);\nconst omega: T^(-1);\nvar x: L of t: T;\n\
             eq: FD(2*a,t)x + lambda^(a)*FD(a,t)x + omega^(2*a)*x = 0;",
        );
    }

    #[test]
    fn signs_and_rationals() {
        round_trip(
            "var x: L of t: T;\neq: -x + 1/2*x - 2*x = 0;",
            "var x: L of t: T;\neq: -x + 1/2*x - 2*x = 0;",
        );
    }

    #[test]
    fn rhs_folding_formats_as_subtraction() {
        round_trip(
            "const omega: T^(-1);\nvar x: L of t: T;\neq: D(2,t)x = omega^2*x;",
            "const omega: T^(-1);\nvar x: L of t: T;\neq: D(2,t)x - omega^2*x = 0;",
        );
    }

    #[test]
    fn multi_independent_and_functions() {
        round_trip(
            "order a;\nconst D: L^2*T^(-1);\nvar u: 1 of t: T, x: L;\n\
             eq: FD(a,t)u - D^(a)*FD(2*a,x)u = 0;",
            "order a;\nconst D: L^2*T^(-1);\nvar u: 1 of t: T, x: L;\n\
             eq: FD(a,t)u - D^(a)*FD(2*a,x)u = 0;",
        );
        round_trip(
            "const omega: T^(-1);\nvar x: L of t: T;\nfn f: 1 -> 1;\n\
             eq: f(omega*t)*x + x = 0;",
            "const omega: T^(-1);\nvar x: L of t: T;\nfn f: 1 -> 1;\n\
             eq: f(omega*t)*x + x = 0;",
        );
    }

    #[test]
    fn operand_parenthesization_survives() {
        round_trip(
            "var x: L of t: T;\neq: D(1,t)(x^2) + D(1,t)x^2 = 0;",
            "var x: L of t: T;\neq: D(1,t)(x^2) + D(1,t)x^2 = 0;",
        );
        // D(1,t)(x^2) keeps the power inside; D(1,t)x^2 is (D(1,t)x)^2.
        let doc = parse_document("var x: L of t: T;\neq: D(1,t)x^2 = 0;").unwrap();
        assert!(matches!(doc.lhs, Expr::Pow(..)));
    }

    #[test]
    fn nested_groups() {
        round_trip(
            "var x: L of t: T;\neq: x*(x + x)^2 = 0;",
            "var x: L of t: T;\neq: x*(x + x)^2 = 0;",
        );
        round_trip(
            "var x: L of t: T;\neq: (-2)^2*x = 0;",
            "var x: L of t: T;\neq: (-2)^2*x = 0;",
        );
    }

    #[test]
    fn negative_one_products_drop_the_one() {
        round_trip(
            "const omega: T^(-1);\nvar x: L of t: T;\neq: x = omega^2*x;",
            "const omega: T^(-1);\nvar x: L of t: T;\neq: x - omega^2*x = 0;",
        );
    }
}
