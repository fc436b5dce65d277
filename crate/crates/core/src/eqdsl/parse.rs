//! Recursive-descent parser for equation documents.

use super::infer::TypeEnv;
use super::{Decl, DeclKind, EqError, EquationDoc, Expr};
use crate::dimension::{
    parse_affine_tokens, parse_dimension_tokens, parse_power_tokens, DimError, ExponentExpr,
};
use crate::lex::{lex, Tok, TokKind};
use num_rational::Rational64;

/// Parses a complete document: declarations followed by `eq: lhs = rhs;`.
///
/// All names are validated against the declarations while parsing, and the
/// right-hand side is folded into the left so the stored equation reads
/// `lhs = 0`.
pub fn parse_document(src: &str) -> Result<EquationDoc, EqError> {
    let toks = lex(src).map_err(|e| EqError::Syntax {
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let mut decls = Vec::new();
    let mut pos = 0;

    loop {
        let tok = &toks[pos];
        let TokKind::Ident(word) = &tok.kind else {
            return Err(syntax(tok, "expected a declaration or `eq:`"));
        };
        match word.as_str() {
            "eq" => break,
            "order" | "const" | "var" | "fn" => {
                decls.push(parse_decl(&toks, &mut pos)?);
            }
            other => {
                return Err(syntax(
                    tok,
                    format!("unknown declaration keyword `{other}`"),
                ));
            }
        }
    }

    let env = TypeEnv::from_decls(&decls)?;
    let mut p = ExprParser {
        toks: &toks,
        pos,
        env: &env,
    };
    p.expect_keyword("eq")?;
    p.expect(&TokKind::Colon, "`:` after `eq`")?;
    let lhs = p.parse_expr()?;
    p.expect(&TokKind::Assign, "`=` between the equation sides")?;
    let rhs = p.parse_expr()?;
    p.expect(&TokKind::Semi, "`;` after the equation")?;
    if p.peek().kind != TokKind::Eof {
        return Err(syntax(p.peek(), "expected end of input after the equation"));
    }

    let lhs = if rhs == Expr::int(0) {
        lhs
    } else {
        Expr::add(vec![lhs, -rhs])
    };
    Ok(EquationDoc { decls, lhs })
}

fn syntax(tok: &Tok, msg: impl Into<String>) -> EqError {
    EqError::Syntax {
        line: tok.line,
        col: tok.col,
        msg: msg.into(),
    }
}

/// Dimension-layer parse errors become syntax errors (the positions refer
/// to the same source); other dimension errors pass through.
fn lift_dim(e: DimError) -> EqError {
    match e {
        DimError::Parse { line, col, msg } => EqError::Syntax { line, col, msg },
        other => EqError::Dim(other),
    }
}

fn parse_decl(toks: &[Tok], pos: &mut usize) -> Result<Decl, EqError> {
    let TokKind::Ident(keyword) = &toks[*pos].kind else {
        unreachable!("caller checked")
    };
    let keyword = keyword.clone();
    *pos += 1;

    let name_tok = &toks[*pos];
    let TokKind::Ident(name) = &name_tok.kind else {
        return Err(syntax(
            name_tok,
            format!("expected a name after `{keyword}`"),
        ));
    };
    let name = name.clone();
    *pos += 1;

    let kind = match keyword.as_str() {
        "order" => DeclKind::Order,
        "const" => {
            expect_tok(toks, pos, &TokKind::Colon, "`:` after the constant name")?;
            let dim = parse_dimension_tokens(toks, pos).map_err(lift_dim)?;
            DeclKind::Constant { dim }
        }
        "var" => {
            expect_tok(toks, pos, &TokKind::Colon, "`:` after the variable name")?;
            let dim = parse_dimension_tokens(toks, pos).map_err(lift_dim)?;
            let of_tok = &toks[*pos];
            match &of_tok.kind {
                TokKind::Ident(w) if w == "of" => *pos += 1,
                _ => {
                    return Err(syntax(
                        of_tok,
                        "expected `of` and the independent variables",
                    ))
                }
            }
            let mut deps = Vec::new();
            loop {
                let dep_tok = &toks[*pos];
                let TokKind::Ident(dep) = &dep_tok.kind else {
                    return Err(syntax(dep_tok, "expected an independent variable name"));
                };
                let dep = dep.clone();
                *pos += 1;
                expect_tok(
                    toks,
                    pos,
                    &TokKind::Colon,
                    "`:` after the independent variable",
                )?;
                let ddim = parse_dimension_tokens(toks, pos).map_err(lift_dim)?;
                deps.push((dep, ddim));
                if toks[*pos].kind == TokKind::Comma {
                    *pos += 1;
                } else {
                    break;
                }
            }
            DeclKind::Variable { dim, deps }
        }
        "fn" => {
            expect_tok(toks, pos, &TokKind::Colon, "`:` after the function name")?;
            let arg = parse_dimension_tokens(toks, pos).map_err(lift_dim)?;
            expect_tok(
                toks,
                pos,
                &TokKind::Arrow,
                "`->` between the function dimensions",
            )?;
            let ret = parse_dimension_tokens(toks, pos).map_err(lift_dim)?;
            DeclKind::Function { arg, ret }
        }
        _ => unreachable!("caller matched the keyword"),
    };
    expect_tok(toks, pos, &TokKind::Semi, "`;` after the declaration")?;
    Ok(Decl { name, kind })
}

fn expect_tok(toks: &[Tok], pos: &mut usize, kind: &TokKind, what: &str) -> Result<(), EqError> {
    if &toks[*pos].kind == kind {
        *pos += 1;
        Ok(())
    } else {
        Err(syntax(&toks[*pos], format!("expected {what}")))
    }
}

struct ExprParser<'a> {
    toks: &'a [Tok],
    pos: usize,
    env: &'a TypeEnv,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> &'a Tok {
        &self.toks[self.pos]
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if &self.peek().kind == kind {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokKind, what: &str) -> Result<(), EqError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(syntax(self.peek(), format!("expected {what}")))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), EqError> {
        match &self.peek().kind {
            TokKind::Ident(w) if w == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(syntax(self.peek(), format!("expected `{word}`"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, EqError> {
        let mut terms = Vec::new();
        let negate_first = self.eat(&TokKind::Minus);
        let first = self.parse_term()?;
        terms.push(if negate_first { -first } else { first });
        loop {
            if self.eat(&TokKind::Plus) {
                terms.push(self.parse_term()?);
            } else if self.eat(&TokKind::Minus) {
                terms.push(-self.parse_term()?);
            } else {
                break;
            }
        }
        Ok(Expr::add(terms))
    }

    fn parse_term(&mut self) -> Result<Expr, EqError> {
        let mut factors = vec![self.parse_factor()?];
        while self.eat(&TokKind::Star) {
            factors.push(self.parse_factor()?);
        }
        Ok(Expr::mul(factors))
    }

    fn parse_factor(&mut self) -> Result<Expr, EqError> {
        let atom = self.parse_atom()?;
        if self.eat(&TokKind::Caret) {
            let mut pos = self.pos;
            let e = parse_power_tokens(self.toks, &mut pos).map_err(lift_dim)?;
            self.pos = pos;
            self.check_order_symbols(&e)?;
            Ok(Expr::Pow(Box::new(atom), e))
        } else {
            Ok(atom)
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, EqError> {
        let tok = self.peek();
        match &tok.kind {
            TokKind::Int(n) => {
                let n = *n;
                self.pos += 1;
                if self.peek().kind == TokKind::Slash {
                    let denom_tok = &self.toks[self.pos + 1];
                    let TokKind::Int(d) = &denom_tok.kind else {
                        return Err(syntax(denom_tok, "expected a denominator"));
                    };
                    if *d == 0 {
                        return Err(syntax(denom_tok, "zero denominator"));
                    }
                    let q = Rational64::new(n, *d);
                    self.pos += 2;
                    Ok(Expr::Num(q))
                } else {
                    Ok(Expr::int(n))
                }
            }
            TokKind::LParen => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(&TokKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokKind::Ident(name) => {
                let name = name.clone();
                let applied = self.toks[self.pos + 1].kind == TokKind::LParen;
                if name == "D" && applied {
                    self.parse_classical_derivative()
                } else if name == "FD" && applied {
                    self.parse_fractional_derivative()
                } else if applied {
                    self.parse_application(name)
                } else {
                    self.pos += 1;
                    self.resolve_name(name)
                }
            }
            _ => Err(syntax(
                tok,
                "expected a number, a name, a derivative or `(`",
            )),
        }
    }

    fn parse_classical_derivative(&mut self) -> Result<Expr, EqError> {
        self.pos += 2; // `D` `(`
        let order_tok = self.peek();
        let TokKind::Int(order) = order_tok.kind else {
            return Err(syntax(order_tok, "expected an integer derivative order"));
        };
        if order < 1 {
            return Err(EqError::InvalidUsage {
                name: "D".to_string(),
                msg: "derivative order must be at least 1".to_string(),
            });
        }
        let order = u32::try_from(order).map_err(|_| EqError::InvalidUsage {
            name: "D".to_string(),
            msg: "derivative order is too large".to_string(),
        })?;
        self.pos += 1;
        self.expect(&TokKind::Comma, "`,` between order and variable")?;
        let wrt = self.expect_indep()?;
        self.expect(&TokKind::RParen, "`)` closing the derivative")?;
        let arg = self.parse_atom()?;
        Ok(Expr::Der {
            order,
            wrt,
            arg: Box::new(arg),
        })
    }

    fn parse_fractional_derivative(&mut self) -> Result<Expr, EqError> {
        self.pos += 2; // `FD` `(`
        let mut pos = self.pos;
        let order = parse_affine_tokens(self.toks, &mut pos).map_err(lift_dim)?;
        self.pos = pos;
        self.check_order_symbols(&order)?;
        self.expect(&TokKind::Comma, "`,` between order and variable")?;
        let wrt = self.expect_indep()?;
        self.expect(&TokKind::RParen, "`)` closing the derivative")?;
        let arg = self.parse_atom()?;
        Ok(Expr::FracDer {
            order,
            wrt,
            arg: Box::new(arg),
        })
    }

    fn parse_application(&mut self, name: String) -> Result<Expr, EqError> {
        if self.env.fn_sig(&name).is_none() {
            if self.env.knows(&name) {
                return Err(EqError::NotAFunction { name });
            }
            return Err(EqError::Undeclared { name });
        }
        self.pos += 2; // name `(`
        let arg = self.parse_expr()?;
        self.expect(&TokKind::RParen, "`)` closing the function argument")?;
        Ok(Expr::Apply {
            func: name,
            arg: Box::new(arg),
        })
    }

    fn resolve_name(&self, name: String) -> Result<Expr, EqError> {
        if self.env.const_dim(&name).is_some() {
            Ok(Expr::Const(name))
        } else if self.env.var_dim(&name).is_some() || self.env.indep_dim(&name).is_some() {
            Ok(Expr::Var(name))
        } else if self.env.is_order(&name) {
            Err(EqError::InvalidUsage {
                name,
                msg: "order symbols only appear in exponents and derivative orders".to_string(),
            })
        } else if self.env.fn_sig(&name).is_some() {
            Err(EqError::InvalidUsage {
                name,
                msg: "functions must be applied to an argument".to_string(),
            })
        } else {
            Err(EqError::Undeclared { name })
        }
    }

    fn expect_indep(&mut self) -> Result<String, EqError> {
        let tok = self.peek();
        let TokKind::Ident(name) = &tok.kind else {
            return Err(syntax(tok, "expected an independent variable"));
        };
        let name = name.clone();
        if self.env.indep_dim(&name).is_none() {
            if self.env.knows(&name) {
                return Err(EqError::InvalidUsage {
                    name,
                    msg: "not an independent variable".to_string(),
                });
            }
            return Err(EqError::Undeclared { name });
        }
        self.pos += 1;
        Ok(name)
    }

    /// Every symbol in an exponent or derivative order must be a declared
    /// order symbol.
    fn check_order_symbols(&self, e: &ExponentExpr) -> Result<(), EqError> {
        for sym in e.symbols() {
            if !self.env.is_order(sym) {
                if self.env.knows(sym) {
                    return Err(EqError::InvalidUsage {
                        name: sym.to_string(),
                        msg: "only order symbols may appear in exponents".to_string(),
                    });
                }
                return Err(EqError::Undeclared {
                    name: sym.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Convenience: the declaration environment of a parsed document.
pub(crate) fn doc_env(doc: &EquationDoc) -> Result<TypeEnv, EqError> {
    TypeEnv::from_decls(&doc.decls)
}
