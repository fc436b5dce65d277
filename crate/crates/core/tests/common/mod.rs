//! Shared fixtures for the integration suite: a frozen set of equation
//! documents spanning every verdict class, and a random document generator
//! used to exercise the formatter/parser round trip.

use fracdyn::dimension::ExponentExpr;
use fracdyn::eqdsl::{parse_document, EquationDoc, Expr};
use num_rational::Rational64;
use proptest::collection::{btree_map, vec};
use proptest::prelude::*;

/// Classical damped oscillator; dimensionally consistent as written.
pub const CLASSICAL_OSCILLATOR: &str = "\
const lambda: T^(-1);
const omega: T^(-1);
var x: L of t: T;
eq: D(2,t)x + lambda*D(1,t)x + omega^2*x = 0;
";

/// Damped oscillator with the integer derivatives naively replaced by
/// fractional ones of order 2a and a; only consistent at a = 1.
pub const NAIVE_OSCILLATOR: &str = "\
order a;
const lambda: T^(-1);
const omega: T^(-1);
var x: L of t: T;
eq: FD(2*a,t)x + lambda*FD(a,t)x + omega^2*x = 0;
";

/// Damped oscillator with the coefficients' exponents tied to the order so
/// every term carries the same dimension for every a.
pub const HOMOGENEOUS_OSCILLATOR: &str = "\
order a;
const lambda: T^(-1);
const omega: T^(-1);
var x: L of t: T;
eq: FD(2*a,t)x + lambda^(a)*FD(a,t)x + omega^(2*a)*x = 0;
";

/// Classical diffusion equation; consistent as written.
pub const CLASSICAL_DIFFUSION: &str = "\
const D: L^2*T^(-1);
var u: 1 of t: T, x: L;
eq: D(1,t)u - D*D(2,x)u = 0;
";

/// Diffusion with only the time derivative made fractional; the diffusivity
/// power alone cannot absorb the mismatch, so it pins a = 1.
pub const NAIVE_DIFFUSION: &str = "\
order a;
const D: L^2*T^(-1);
var u: 1 of t: T, x: L;
eq: FD(a,t)u - D^(a)*D(2,x)u = 0;
";

/// Diffusion fractional in both time and space with the diffusivity raised to
/// the order; consistent for every a.
pub const HOMOGENEOUS_DIFFUSION: &str = "\
order a;
const D: L^2*T^(-1);
var u: 1 of t: T, x: L;
eq: FD(a,t)u - D^(a)*FD(2*a,x)u = 0;
";

/// Free fall under constant acceleration; consistent as written.
pub const CLASSICAL_FREE_FALL: &str = "\
const g: L*T^(-2);
var x: L of t: T;
eq: D(2,t)x + g = 0;
";

/// Free fall with a bare fractional derivative against the unchanged
/// acceleration constant; only consistent at a = 1.
pub const NAIVE_FREE_FALL: &str = "\
order a;
const g: L*T^(-2);
var x: L of t: T;
eq: FD(2*a,t)x + g = 0;
";

/// Free fall with the forcing rebuilt from g and a reference length so both
/// terms scale identically with the order.
pub const REWRITTEN_FREE_FALL: &str = "\
order a;
const g: L*T^(-2);
const R_T: L;
var x: L of t: T;
eq: FD(2*a,t)x + g^(a)*R_T^(1-a) = 0;
";

/// Damped oscillator where the stiffness coefficient carries an extra
/// lambda^(2a-2) factor; consistent for every a.
pub const UNDERDETERMINED_DAMPED: &str = "\
order a;
const lambda: T^(-1);
const omega: T^(-1);
var x: L of t: T;
eq: FD(2*a,t)x + lambda^(a)*FD(a,t)x + omega^2*lambda^(2*a-2)*x = 0;
";

/// Two independent orders a and b with the damping exponent solved
/// symbolically as 2a-b; consistent for every (a, b).
pub const TWO_ORDER_DAMPED: &str = "\
order a;
order b;
const lambda: T^(-1);
const omega: T^(-1);
var x: L of t: T;
eq: FD(2*a,t)x + lambda^(2*a-b)*FD(b,t)x + omega^(2*a)*x = 0;
";

/// Every frozen document with a short label, in presentation order.
pub fn all_documents() -> [(&'static str, &'static str); 11] {
    [
        ("classical oscillator", CLASSICAL_OSCILLATOR),
        ("naive fractional oscillator", NAIVE_OSCILLATOR),
        ("homogeneous fractional oscillator", HOMOGENEOUS_OSCILLATOR),
        ("classical diffusion", CLASSICAL_DIFFUSION),
        ("naive fractional diffusion", NAIVE_DIFFUSION),
        ("homogeneous fractional diffusion", HOMOGENEOUS_DIFFUSION),
        ("classical free fall", CLASSICAL_FREE_FALL),
        ("naive fractional free fall", NAIVE_FREE_FALL),
        ("rewritten fractional free fall", REWRITTEN_FREE_FALL),
        ("underdetermined damped oscillator", UNDERDETERMINED_DAMPED),
        ("two-order damped oscillator", TWO_ORDER_DAMPED),
    ]
}

/// Declaration header shared by every generated document.  It provides two
/// order symbols, constants and variables of assorted dimensions, and two
/// declared functions, so the expression generator can draw from every atom
/// kind without inventing names.
pub const GENERATOR_HEADER: &str = "\
order a;
order b;
const c1: T^(-1);
const c2: M*L^2*T^(-2);
const kappa: 1;
var x: L of t: T;
var u: 1 of t: T, s: L;
fn f: 1 -> 1;
fn gee: L -> 1;
";

fn small_ratio() -> impl Strategy<Value = Rational64> {
    (-12i64..13, 1i64..5).prop_map(|(n, d)| Rational64::new(n, d))
}

/// Affine exponent over the declared order symbols with small rational
/// coefficients; may degenerate to a pure constant (including zero).
fn arb_exponent() -> impl Strategy<Value = ExponentExpr> {
    let coeff = (-6i64..7, 1i64..4).prop_map(|(n, d)| Rational64::new(n, d));
    (small_ratio(), btree_map("[ab]", coeff, 0..3)).prop_map(|(c, coeffs)| {
        let mut e = ExponentExpr::constant(c);
        for (name, q) in coeffs {
            e = e + ExponentExpr::term(q, &name);
        }
        e
    })
}

fn arb_wrt() -> impl Strategy<Value = String> {
    prop_oneof![Just("t".to_string()), Just("s".to_string())]
}

/// Expression trees over the generator header, built exclusively through the
/// canonicalizing constructors so sums and products stay flat.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        small_ratio().prop_map(Expr::Num),
        prop_oneof![
            Just("c1".to_string()),
            Just("c2".to_string()),
            Just("kappa".to_string())
        ]
        .prop_map(Expr::Const),
        prop_oneof![
            Just("x".to_string()),
            Just("u".to_string()),
            Just("t".to_string()),
            Just("s".to_string())
        ]
        .prop_map(Expr::Var),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            vec(inner.clone(), 2..4).prop_map(Expr::add),
            vec(inner.clone(), 2..4).prop_map(Expr::mul),
            (inner.clone(), arb_exponent()).prop_map(|(b, e)| Expr::Pow(Box::new(b), e)),
            (1u32..4, arb_wrt(), inner.clone()).prop_map(|(order, wrt, arg)| Expr::Der {
                order,
                wrt,
                arg: Box::new(arg),
            }),
            (arb_exponent(), arb_wrt(), inner.clone()).prop_map(|(order, wrt, arg)| {
                Expr::FracDer {
                    order,
                    wrt,
                    arg: Box::new(arg),
                }
            }),
            (
                prop_oneof![Just("f".to_string()), Just("gee".to_string())],
                inner
            )
                .prop_map(|(func, arg)| Expr::Apply {
                    func,
                    arg: Box::new(arg),
                }),
        ]
    })
}

/// A document pairing the fixed header with a generated left-hand side.
pub fn arb_document() -> impl Strategy<Value = EquationDoc> {
    arb_expr().prop_map(|lhs| {
        let base = parse_document(&format!("{GENERATOR_HEADER}eq: x = 0;"))
            .expect("the generator header parses");
        EquationDoc {
            decls: base.decls,
            lhs,
        }
    })
}
