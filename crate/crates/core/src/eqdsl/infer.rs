//! Dimensional inference and homogeneity checking.

use super::format::format_term;
use super::{Decl, DeclKind, EqError, EquationDoc, Expr};
use crate::dimension::{solve_equal, Dimension, HomogeneityVerdict, BASE_UNITS};
use std::collections::{BTreeMap, BTreeSet};

pub(crate) const KEYWORDS: [&str; 6] = ["order", "const", "var", "fn", "of", "eq"];

/// Name environment built from a document's declarations.
///
/// All declared names (including independent variables) share one flat
/// namespace; only independent variables may be introduced twice, and then
/// only with the same dimension.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    orders: BTreeSet<String>,
    consts: BTreeMap<String, Dimension>,
    vars: BTreeMap<String, Dimension>,
    indeps: BTreeMap<String, Dimension>,
    fns: BTreeMap<String, (Dimension, Dimension)>,
}

impl TypeEnv {
    /// Builds and validates the environment: reserved names and duplicates
    /// are rejected here.
    pub fn from_decls(decls: &[Decl]) -> Result<Self, EqError> {
        let mut env = TypeEnv::default();
        for decl in decls {
            check_reserved(&decl.name, matches!(decl.kind, DeclKind::Function { .. }))?;
            match &decl.kind {
                DeclKind::Order => {
                    env.insert_unique(&decl.name)?;
                    env.orders.insert(decl.name.clone());
                }
                DeclKind::Constant { dim } => {
                    env.insert_unique(&decl.name)?;
                    env.consts.insert(decl.name.clone(), dim.clone());
                }
                DeclKind::Variable { dim, deps } => {
                    env.insert_unique(&decl.name)?;
                    env.vars.insert(decl.name.clone(), dim.clone());
                    for (dep, ddim) in deps {
                        check_reserved(dep, false)?;
                        if let Some(known) = env.indeps.get(dep) {
                            if known != ddim {
                                return Err(EqError::InvalidUsage {
                                    name: dep.clone(),
                                    msg: "independent variable redeclared with a different \
                                          dimension"
                                        .to_string(),
                                });
                            }
                        } else {
                            env.insert_unique(dep)?;
                            env.indeps.insert(dep.clone(), ddim.clone());
                        }
                    }
                }
                DeclKind::Function { arg, ret } => {
                    env.insert_unique(&decl.name)?;
                    env.fns
                        .insert(decl.name.clone(), (arg.clone(), ret.clone()));
                }
            }
        }
        Ok(env)
    }

    fn insert_unique(&mut self, name: &str) -> Result<(), EqError> {
        if self.knows(name) {
            Err(EqError::Duplicate {
                name: name.to_string(),
            })
        } else {
            Ok(())
        }
    }

    /// True when the name is declared in any role.
    pub fn knows(&self, name: &str) -> bool {
        self.orders.contains(name)
            || self.consts.contains_key(name)
            || self.vars.contains_key(name)
            || self.indeps.contains_key(name)
            || self.fns.contains_key(name)
    }

    /// True for declared order symbols.
    pub fn is_order(&self, name: &str) -> bool {
        self.orders.contains(name)
    }

    /// Dimension of a declared constant.
    pub fn const_dim(&self, name: &str) -> Option<&Dimension> {
        self.consts.get(name)
    }

    /// Dimension of a declared dependent variable.
    pub fn var_dim(&self, name: &str) -> Option<&Dimension> {
        self.vars.get(name)
    }

    /// Dimension of an independent variable.
    pub fn indep_dim(&self, name: &str) -> Option<&Dimension> {
        self.indeps.get(name)
    }

    /// Argument and result dimensions of a declared function.
    pub fn fn_sig(&self, name: &str) -> Option<&(Dimension, Dimension)> {
        self.fns.get(name)
    }

    /// Declared order symbols in sorted order.
    pub fn orders(&self) -> impl Iterator<Item = &str> {
        self.orders.iter().map(String::as_str)
    }
}

fn check_reserved(name: &str, is_function: bool) -> Result<(), EqError> {
    if KEYWORDS.contains(&name) {
        return Err(EqError::Reserved {
            name: name.to_string(),
            msg: "it is a keyword of the equation language".to_string(),
        });
    }
    if BASE_UNITS.contains(&name) {
        return Err(EqError::Reserved {
            name: name.to_string(),
            msg: "it is a base unit name".to_string(),
        });
    }
    if is_function && (name == "D" || name == "FD") {
        return Err(EqError::Reserved {
            name: name.to_string(),
            msg: "it is a derivative operator and cannot name a function".to_string(),
        });
    }
    Ok(())
}

/// Infers the dimension of an expression under the given environment.
///
/// Sums must already be homogeneous to carry a dimension, so a mixed nested
/// sum is an error here. The top-level sum of an equation is judged by
/// [`check_homogeneity`] instead, which compares the terms' dimensions
/// without requiring them to agree.
pub fn infer_dimension(expr: &Expr, env: &TypeEnv) -> Result<Dimension, EqError> {
    match expr {
        Expr::Num(_) => Ok(Dimension::dimensionless()),
        Expr::Const(name) => env
            .const_dim(name)
            .cloned()
            .ok_or_else(|| EqError::Undeclared { name: name.clone() }),
        Expr::Var(name) => env
            .var_dim(name)
            .or_else(|| env.indep_dim(name))
            .cloned()
            .ok_or_else(|| EqError::Undeclared { name: name.clone() }),
        Expr::Pow(base, e) => Ok(infer_dimension(base, env)?.pow(e)?),
        Expr::Mul(factors) => {
            let mut acc = Dimension::dimensionless();
            for f in factors {
                acc = acc.mul(&infer_dimension(f, env)?);
            }
            Ok(acc)
        }
        Expr::Add(terms) => {
            let first = infer_dimension(&terms[0], env)?;
            for t in &terms[1..] {
                let d = infer_dimension(t, env)?;
                if d != first {
                    return Err(EqError::InhomogeneousSum {
                        left: first.to_string(),
                        right: d.to_string(),
                    });
                }
            }
            Ok(first)
        }
        Expr::Der { order, wrt, arg } => {
            let base = infer_dimension(arg, env)?;
            let wdim = env
                .indep_dim(wrt)
                .ok_or_else(|| EqError::Undeclared { name: wrt.clone() })?;
            Ok(base.mul(&wdim.pow_rational((-i64::from(*order)).into())))
        }
        Expr::FracDer { order, wrt, arg } => {
            let base = infer_dimension(arg, env)?;
            let wdim = env
                .indep_dim(wrt)
                .ok_or_else(|| EqError::Undeclared { name: wrt.clone() })?;
            Ok(base.mul(&wdim.pow(&(-order.clone()))?))
        }
        Expr::Apply { func, arg } => {
            let (adim, rdim) = env
                .fn_sig(func)
                .ok_or_else(|| EqError::Undeclared { name: func.clone() })?;
            let found = infer_dimension(arg, env)?;
            if &found != adim {
                return Err(EqError::BadFunctionArg {
                    name: func.clone(),
                    found: found.to_string(),
                    expected: adim.to_string(),
                });
            }
            Ok(rdim.clone())
        }
    }
}

/// Checks whether the document's equation is dimensionally homogeneous.
///
/// The equation's top-level terms are inferred independently and their
/// dimensions handed to the exact linear solver; the result records the
/// decision together with each term and its dimension.
pub fn check_homogeneity(doc: &EquationDoc) -> Result<HomogeneityVerdict, EqError> {
    let env = TypeEnv::from_decls(&doc.decls)?;
    let terms: Vec<&Expr> = match &doc.lhs {
        Expr::Add(ts) => ts.iter().collect(),
        single => vec![single],
    };
    let mut per_term = Vec::with_capacity(terms.len());
    let mut dims = Vec::with_capacity(terms.len());
    for t in terms {
        let d = infer_dimension(t, &env)?;
        per_term.push((format_term(t), d.clone()));
        dims.push(d);
    }
    Ok(HomogeneityVerdict {
        kind: solve_equal(&dims),
        per_term,
    })
}
