//! Deciding whether term dimensions can be made equal.

use super::{Dimension, ExponentExpr};
use crate::dimension::BaseUnit;
use num_rational::Rational64;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Outcome of [`solve_equal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    /// All terms carry identical dimensions whatever the order symbols are.
    ForAllOrders,
    /// The terms agree exactly at the listed symbol values and nowhere else
    /// (underdetermined symbols are pinned to 1/2, the midpoint of the
    /// fractional range).
    OnlyAt {
        /// Solved values for every symbol the equations involve.
        assignments: BTreeMap<String, Rational64>,
        /// True when some assignment falls outside the open interval (0, 1).
        outside_fractional_range: bool,
    },
    /// No symbol values make the terms agree.
    Inhomogeneous,
}

/// A homogeneity verdict together with the per-term dimensions that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneityVerdict {
    /// The decision.
    pub kind: VerdictKind,
    /// Formatted term and its inferred dimension, in equation order.
    pub per_term: Vec<(String, Dimension)>,
}

impl HomogeneityVerdict {
    /// True when the equation is homogeneous somewhere strictly inside the
    /// fractional range: either for every order, or at values that all lie
    /// in the open interval (0, 1).
    pub fn is_fractionally_homogeneous(&self) -> bool {
        match &self.kind {
            VerdictKind::ForAllOrders => true,
            VerdictKind::OnlyAt {
                outside_fractional_range,
                ..
            } => !outside_fractional_range,
            VerdictKind::Inhomogeneous => false,
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::ForAllOrders => write!(f, "homogeneous for all orders"),
            VerdictKind::OnlyAt {
                assignments,
                outside_fractional_range,
            } => {
                write!(f, "homogeneous only at ")?;
                let mut first = true;
                for (sym, val) in assignments {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{sym} = {val}")?;
                }
                if *outside_fractional_range {
                    write!(f, " (outside the fractional range)")?;
                }
                Ok(())
            }
            VerdictKind::Inhomogeneous => write!(f, "inhomogeneous"),
        }
    }
}

/// Decides whether the given dimensions can all be equal.
///
/// Equating each dimension with the first yields, per base unit, a linear
/// equation over the order symbols with exact rational coefficients. The
/// system is reduced by Gauss-Jordan elimination:
///
/// * no equations with symbols and no contradictions: [`VerdictKind::ForAllOrders`];
/// * a contradiction: [`VerdictKind::Inhomogeneous`];
/// * otherwise: [`VerdictKind::OnlyAt`] with one value per involved symbol,
///   free symbols pinned to 1/2.
pub fn solve_equal(dims: &[Dimension]) -> VerdictKind {
    // Collect the linear equations "exponent difference = 0".
    let mut symbols: BTreeSet<String> = BTreeSet::new();
    let mut diffs: Vec<ExponentExpr> = Vec::new();
    if let Some((first, rest)) = dims.split_first() {
        for d in rest {
            for unit in super::BASE_UNITS {
                let unit = BaseUnit::new(unit).expect("table unit");
                let diff = d.exponent(unit) - first.exponent(unit);
                if diff.is_zero() {
                    continue;
                }
                symbols.extend(diff.symbols().map(str::to_string));
                diffs.push(diff);
            }
        }
    }
    if diffs.is_empty() {
        return VerdictKind::ForAllOrders;
    }
    let symbols: Vec<String> = symbols.into_iter().collect();
    if symbols.is_empty() {
        // Some constant difference is nonzero.
        return VerdictKind::Inhomogeneous;
    }

    // Rows are [coefficients | rhs] for sum(c_i x_i) = -constant.
    let cols = symbols.len();
    let mut rows: Vec<Vec<Rational64>> = diffs
        .iter()
        .map(|diff| {
            let mut row: Vec<Rational64> = symbols.iter().map(|s| diff.coeff(s)).collect();
            row.push(-diff.constant_part());
            row
        })
        .collect();

    // Gauss-Jordan elimination with exact arithmetic.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next_row = 0;
    for col in 0..cols {
        let Some(src) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, src);
        let inv = rows[next_row][col].recip();
        for v in rows[next_row].iter_mut() {
            *v *= inv;
        }
        for r in 0..rows.len() {
            if r != next_row && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in 0..=cols {
                    let delta = factor * rows[next_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }

    // A row 0 = nonzero means the system is unsolvable.
    for row in &rows[next_row.min(rows.len())..] {
        if row[..cols].iter().all(Zero::is_zero) && !row[cols].is_zero() {
            return VerdictKind::Inhomogeneous;
        }
    }

    // Back-substitute with every free symbol pinned to 1/2.
    let half = Rational64::new(1, 2);
    let mut assignments: BTreeMap<String, Rational64> = BTreeMap::new();
    for (col, sym) in symbols.iter().enumerate() {
        if pivot_of_col[col].is_none() {
            assignments.insert(sym.clone(), half);
        }
    }
    for (col, sym) in symbols.iter().enumerate() {
        let Some(r) = pivot_of_col[col] else { continue };
        let mut value = rows[r][cols];
        for free_col in 0..cols {
            if free_col != col && !rows[r][free_col].is_zero() {
                value -= rows[r][free_col] * half;
            }
        }
        assignments.insert(sym.clone(), value);
    }

    let one = Rational64::from_integer(1);
    let outside = assignments
        .values()
        .any(|v| *v <= Rational64::zero() || *v >= one);
    VerdictKind::OnlyAt {
        assignments,
        outside_fractional_range: outside,
    }
}
