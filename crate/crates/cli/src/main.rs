//! Command-line front end for the fracdyn toolkit.
//!
//! Subcommands:
//!
//! * `check` — parse an equation document and report whether its terms
//!   can carry a common dimension (exit 0: for all orders; 2: only at
//!   isolated orders; 3: never);
//! * `embed` — rewrite classical time derivatives as fractional
//!   operators, naively or with the scale-carrying prefactor;
//! * `oscillator` — run the fractional harmonic oscillator end to end
//!   and export trajectories plus a JSON report;
//! * `verify` — numerically confirm an operator identity on a grid
//!   refinement ladder;
//! * `ml` — evaluate the one-parameter Mittag-Leffler function;
//! * `caputo` — apply a Caputo derivative to a CSV trajectory.
//!
//! All floating-point output is formatted with 17 significant digits so
//! values round-trip exactly.

// Input guards are written `!(x > 0.0)` so that NaN (which parses fine
// from the command line) fails them too; `x <= 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracdyn::dimension::parse_exponent_expr;
use fracdyn::dimension::VerdictKind;
use fracdyn::eqdsl::{
    check_homogeneity, parse_document, substitute_operator, OperatorRule, WrtFilter,
};
use fracdyn::fractops::{caputo_with, verify_scaling_condition, CaputoSpec, SampledTrajectory};
use fracdyn::lagrangian::{
    check_coherence, check_fracconst_equivalence, check_method_equivalence, LaurentLagrangian,
    NaturalLagrangian,
};
use fracdyn::oscillator::{csv_name, run_scenario, Variant};
use fracdyn::specialfn::{mittag_leffler_with, MlParams};
use fracdyn::{g17, OscillatorConfig64, Trajectory64};
use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

type CliResult = Result<ExitCode, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "fracdyn",
    version,
    about = "Dimensional-homogeneity tools for fractional-in-time dynamics",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an equation document for dimensional homogeneity.
    ///
    /// Exit codes: 0 homogeneous for all orders, 2 homogeneous only at
    /// isolated order values, 3 inhomogeneous, 1 on errors.
    Check(CheckArgs),
    /// Rewrite classical time derivatives as fractional operators.
    Embed(EmbedArgs),
    /// Run the fractional harmonic-oscillator scenario.
    Oscillator(OscillatorArgs),
    /// Verify an operator identity on a grid refinement ladder.
    Verify(VerifyArgs),
    /// Evaluate the one-parameter Mittag-Leffler function.
    Ml(MlArgs),
    /// Apply a Caputo derivative to a sampled trajectory.
    Caputo(CaputoArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Equation document to check.
    file: PathBuf,
    /// Emit the result as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedMethodArg {
    /// Replace d^k/dt^k by the bare fractional operator of order k*a.
    Direct,
    /// Replace d^k/dt^k by tau^(k*a-k) times the fractional operator,
    /// keeping the dimension of the original derivative.
    Homogeneous,
}

#[derive(Args)]
struct EmbedArgs {
    /// Equation document to rewrite.
    file: PathBuf,
    /// How to replace the derivatives.
    #[arg(long, value_enum)]
    method: EmbedMethodArg,
    /// Order expression, e.g. "a" or "2*a" (affine in order symbols).
    #[arg(long, default_value = "a")]
    alpha: String,
    /// Numeric time-scale value, recorded as a comment in the output.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Rewrite only derivatives taken with respect to this variable
    /// (default: every time-dimensioned variable).
    #[arg(long)]
    wrt: Option<String>,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OscillatorArgs {
    /// JSON configuration file; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mass override.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Spring-constant override.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Fractional-order override.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Time-scale override.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Initial-amplitude override.
    #[arg(long, allow_negative_numbers = true)]
    x_a: Option<f64>,
    /// Interval-start override.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Interval-end override.
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Grid-steps override.
    #[arg(long)]
    n: Option<usize>,
    /// Directory for the CSV exports and report.json.
    #[arg(long, default_value = ".")]
    outdir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    /// Time-rescaling identity of the fractional derivative.
    Scaling,
    /// Agreement of the rescaled and operator-based embeddings.
    Equivalence,
    /// Operator-family route against the Lagrangian route (exact).
    Coherence,
    /// Modified-constant route against the operator route (roundoff).
    Fracconst,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which identity to verify.
    #[arg(long, value_enum)]
    what: VerifyWhat,
    /// Fractional order.
    #[arg(long, default_value_t = 0.75, allow_negative_numbers = true)]
    alpha: f64,
    /// Time scale.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    tau: f64,
    /// Interval start.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Interval end.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Coarsest step count; the ladder runs n, 2n, 4n.
    #[arg(long, default_value_t = 200)]
    n: usize,
}

#[derive(Args)]
struct MlArgs {
    /// Order parameter of the series (must be positive).
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// Argument.
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
}

#[derive(Args)]
struct CaputoArgs {
    /// Derivative order in (0, 2).
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    /// Input trajectory CSV with a "t,x" header.
    #[arg(long)]
    input: PathBuf,
    /// Optional time scale: applies the prefactor tau^(mu-1).
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Check(args) => run_check(args),
        Command::Embed(args) => run_embed(args),
        Command::Oscillator(args) => run_oscillator(args),
        Command::Verify(args) => run_verify(args),
        Command::Ml(args) => run_ml(args),
        Command::Caputo(args) => run_caputo(args),
    }
}

fn run_check(args: CheckArgs) -> CliResult {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let doc = parse_document(&text)?;
    let verdict = check_homogeneity(&doc)?;

    if args.json {
        let per_term: Vec<serde_json::Value> = verdict
            .per_term
            .iter()
            .map(|(term, dim)| serde_json::json!({ "term": term, "dimension": dim.to_string() }))
            .collect();
        let mut body = serde_json::json!({
            "verdict": verdict.kind.to_string(),
            "fractionally_homogeneous": verdict.is_fractionally_homogeneous(),
            "per_term": per_term,
        });
        let (kind, extra) = match &verdict.kind {
            VerdictKind::ForAllOrders => ("for-all-orders", None),
            VerdictKind::OnlyAt {
                assignments,
                outside_fractional_range,
            } => {
                let map: serde_json::Map<String, serde_json::Value> = assignments
                    .iter()
                    .map(|(s, v)| (s.clone(), serde_json::Value::from(v.to_string())))
                    .collect();
                ("only-at", Some((map, *outside_fractional_range)))
            }
            VerdictKind::Inhomogeneous => ("inhomogeneous", None),
        };
        body["kind"] = kind.into();
        if let Some((assignments, outside)) = extra {
            body["assignments"] = serde_json::Value::Object(assignments);
            body["outside_fractional_range"] = outside.into();
        }
        println!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        for (term, dim) in &verdict.per_term {
            println!("term {term}: {dim}");
        }
        println!("verdict: {}", verdict.kind);
    }

    let code = match &verdict.kind {
        VerdictKind::ForAllOrders => 0,
        VerdictKind::OnlyAt { .. } => 2,
        VerdictKind::Inhomogeneous => 3,
    };
    Ok(ExitCode::from(code))
}

fn run_embed(args: EmbedArgs) -> CliResult {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let doc = parse_document(&text)?;
    let alpha = parse_exponent_expr(&args.alpha)?;
    let rule = match args.method {
        EmbedMethodArg::Direct => OperatorRule::ReplaceDer { alpha },
        EmbedMethodArg::Homogeneous => OperatorRule::HomogeneousReplace { alpha },
    };
    let filter = match &args.wrt {
        Some(name) => WrtFilter::Named(name.clone()),
        None => WrtFilter::TimeDimensioned,
    };
    let rewritten = substitute_operator(&doc, &rule, &filter)?;
    let mut out = String::new();
    if let Some(tau) = args.tau {
        out.push_str(&format!("# tau = {}\n", g17(tau)));
    }
    out.push_str(&rewritten.to_string());
    out.push('\n');
    match &args.output {
        Some(path) => {
            fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{out}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oscillator(args: OscillatorArgs) -> CliResult {
    let mut config: OscillatorConfig64 = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("bad configuration in {}: {e}", path.display()))?
        }
        None => OscillatorConfig64::default(),
    };
    // Command-line flags override the configuration file.
    if let Some(v) = args.m {
        config.m = v;
    }
    if let Some(v) = args.k {
        config.k = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.tau {
        config.tau = v;
    }
    if let Some(v) = args.x_a {
        config.x_a = v;
    }
    if let Some(v) = args.a {
        config.a = v;
    }
    if let Some(v) = args.b {
        config.b = v;
    }
    if let Some(v) = args.n {
        config.n = v;
    }

    let out = run_scenario(&config)?;
    fs::create_dir_all(&args.outdir)
        .map_err(|e| format!("cannot create {}: {e}", args.outdir.display()))?;

    let mut files = Vec::new();
    for (key, traj) in &out.trajectories {
        let name = match key.as_str() {
            "closed_homogeneous" => csv_name(Variant::Homogeneous, config.alpha, config.tau),
            "closed_nondim" => csv_name(Variant::Nondim, config.alpha, config.tau),
            "closed_inhomogeneous" => csv_name(Variant::Inhomogeneous, config.alpha, config.tau),
            _ => format!("osc_numerical_a{}_tau{}.csv", config.alpha, config.tau),
        };
        let path = args.outdir.join(&name);
        fs::write(&path, traj.to_csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        files.push(name);
    }
    let report_path = args.outdir.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&out.report)?)
        .map_err(|e| format!("cannot write {}: {e}", report_path.display()))?;

    let r = &out.report;
    println!("omega = {}", g17(r.omega));
    println!(
        "homogeneous coefficient = {}",
        g17(r.homogeneous_coefficient)
    );
    println!(
        "max |numerical - closed form| = {}",
        g17(r.abm_vs_closed_max)
    );
    println!("closed-form identity gap = {}", g17(r.identity_max_gap));
    println!(
        "Euler-Lagrange residual: max = {}, l2 = {}",
        g17(r.embedding.residual_max),
        g17(r.embedding.residual_l2)
    );
    println!("naive rewrite: {}", r.docs.naive_verdict);
    println!("homogeneous rewrite: {}", r.docs.homogeneous_verdict);
    println!(
        "wrote report.json and {} trajectories to {}",
        files.len(),
        args.outdir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> CliResult {
    if args.n < 8 {
        return Err("need at least 8 steps".into());
    }
    if !(args.b > args.a) {
        return Err("interval end must exceed its start".into());
    }
    let (alpha, tau, a, b) = (args.alpha, args.tau, args.a, args.b);

    let what_name = match args.what {
        VerifyWhat::Scaling => "time-rescaling identity",
        VerifyWhat::Equivalence => "rescaled vs operator embedding",
        VerifyWhat::Coherence => "operator family vs Lagrangian route",
        VerifyWhat::Fracconst => "modified constants vs operator route",
    };
    println!(
        "{what_name}: alpha = {}, tau = {}, interval [{}, {}]",
        g17(alpha),
        g17(tau),
        g17(a),
        g17(b)
    );

    let gap_at = |n: usize| -> Result<f64, Box<dyn Error>> {
        match args.what {
            VerifyWhat::Scaling => {
                let x = SampledTrajectory::from_fn(a, b, n, |t| (t - a) * (t - a))?;
                Ok(verify_scaling_condition(alpha, tau, &x)?.max_rel_error)
            }
            VerifyWhat::Equivalence | VerifyWhat::Coherence => {
                let nat = NaturalLagrangian {
                    m: 1.0,
                    v: Arc::new(|x: f64| 0.5 * x * x),
                    v_prime: Arc::new(|x: f64| x),
                    a,
                    b,
                };
                let l = nat.to_general();
                let x = SampledTrajectory::from_fn(a, b, n, f64::cos)?;
                let report = match args.what {
                    VerifyWhat::Equivalence => check_method_equivalence(&l, alpha, tau, &x)?,
                    _ => check_coherence(&l, alpha, tau, &x)?,
                };
                Ok(report.normalized())
            }
            VerifyWhat::Fracconst => {
                let l = LaurentLagrangian::harmonic_oscillator(1.0, 1.0, a, b);
                let x = SampledTrajectory::from_fn(a, b, n, f64::cos)?;
                Ok(check_fracconst_equivalence(&l, alpha, tau, &x)?.normalized())
            }
        }
    };

    const FLOOR: f64 = 1e-12;
    let mut gaps = Vec::new();
    for level in [args.n, 2 * args.n, 4 * args.n] {
        let gap = gap_at(level)?;
        let h = (b - a) / level as f64;
        println!("n = {level}  h = {}  gap = {}", g17(h), g17(gap));
        gaps.push(gap);
    }
    for pair in gaps.windows(2) {
        if pair[0] > FLOOR && pair[1] > FLOOR {
            println!("observed order = {}", g17((pair[0] / pair[1]).log2()));
        }
    }
    if gaps[gaps.len() - 1] <= FLOOR {
        println!("gap is at the roundoff floor; no rate to estimate");
    }
    Ok(ExitCode::SUCCESS)
}

fn run_ml(args: MlArgs) -> CliResult {
    let mut params = MlParams::default();
    match std::env::var("FRACDYN_TOL") {
        Ok(raw) => {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| format!("FRACDYN_TOL must be a number, got {raw:?}"))?;
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(format!("FRACDYN_TOL must be positive and finite, got {raw:?}").into());
            }
            params.tol = tol;
        }
        Err(std::env::VarError::NotPresent) => {}
        Err(e) => return Err(format!("FRACDYN_TOL is not readable: {e}").into()),
    }
    let value = mittag_leffler_with(args.lambda, args.z, &params)?;
    println!("E_{}({}) = {}", g17(args.lambda), g17(args.z), g17(value));
    Ok(ExitCode::SUCCESS)
}

fn run_caputo(args: CaputoArgs) -> CliResult {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| format!("cannot read {}: {e}", args.input.display()))?;
    let x = Trajectory64::from_csv(&text)?;
    let spec = CaputoSpec {
        mu: args.mu,
        tau: args.tau,
    };
    let d = caputo_with(&x, &spec)?;
    let out = Trajectory64::new(x.t0(), x.h(), d)?;
    let csv = out.to_csv();
    match &args.output {
        Some(path) => {
            fs::write(path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
