//! `teuclid`: batch front end for ordinal arithmetic, the transfinite
//! Euclidean rings and Motzkin stratification.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use transfinite_euclid::checks::{self, CheckReport};
use transfinite_euclid::eucworld::{
    nonmult_witness, DescentTrace, DivisionPath, DivisionResult, Ring, RingConfig, RingError,
    Variant,
};
use transfinite_euclid::motzkin::{self, MotzkinError, RingModel};
use transfinite_euclid::ordinals::OrdinalParseError;
use transfinite_euclid::polyfactor::{Field, PolyError};
use transfinite_euclid::Ordinal;

#[derive(Parser)]
#[command(name = "teuclid", version, about = "Transfinite Euclidean domains and ordinal norms")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Coefficient field of the ring [default: f2, or q for the z-variant]
    #[arg(long, global = true, value_enum)]
    field: Option<FieldArg>,
    /// Exponent α of the order type ω^α [default: 2, or 1 for the z-variant]
    #[arg(long, global = true, value_parser = parse_ordinal)]
    alpha: Option<Ordinal>,
    /// Ring construction [default: base, or z for the demo commands]
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    /// Accept the z-variant over a finite field
    #[arg(long, global = true)]
    unverified_minimality: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled property runs
    #[arg(long, global = true, default_value_t = checks::DEFAULT_SEED)]
    seed: u64,
    /// Candidate limit per factorization
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    F2,
    F3,
    Q,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Base,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal arithmetic
    #[command(subcommand)]
    Ord(OrdCommand),
    /// Elements, norms and division in the transfinite Euclidean ring
    #[command(subcommand)]
    Ring(RingCommand),
    /// Minimal norm stratification of truncated classical rings
    #[command(subcommand)]
    Motzkin(MotzkinCommand),
    /// Seeded property suites
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Subcommand)]
enum OrdCommand {
    /// Evaluate an expression; `+` is ordinal addition and `(+)` the natural sum
    Eval { expr: String },
}

#[derive(Subcommand)]
enum RingCommand {
    /// Norm, Sub and stage of an element
    Norm { elem: String },
    /// Division with remainder of n by d
    Divide { n: String, d: String },
    /// Euclidean algorithm with its norm descent
    Gcd { a: String, b: String },
    /// The pair k^(k+1) < (k+1)^(k+1) ruling out a multiplicative norm
    DemoNonmult { k: u64 },
    /// The monoid norm ψ next to φ
    DemoMonoid { elem: String },
}

#[derive(Subcommand)]
enum MotzkinCommand {
    /// Rank every nonzero element of the model
    Stratify {
        /// `int:N` or `poly:q:D`
        #[arg(long)]
        model: RingModel,
        #[arg(long, default_value_t = motzkin::DEFAULT_MAX_ELEMENTS)]
        max_elements: u64,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Run every property suite
    All,
}

fn parse_ordinal(s: &str) -> Result<Ordinal, String> {
    Ordinal::parse(s).map_err(|e| e.to_string())
}

/// A domain error with a stable machine-readable code.
struct Failure {
    code: String,
    message: String,
}

impl Failure {
    fn new(code: &str, message: impl ToString) -> Self {
        Failure {
            code: code.to_string(),
            message: message.to_string(),
        }
    }
}

fn poly_code(e: &PolyError) -> &'static str {
    match e {
        PolyError::NotPrime(_) => "poly.not_prime",
        PolyError::FieldMismatch(..) => "poly.field_mismatch",
        PolyError::DivisionByZero => "poly.division_by_zero",
        PolyError::ZeroPolynomial => "poly.zero_polynomial",
        PolyError::Unit => "poly.unit",
        PolyError::FactorizationIncomplete(_) => "poly.factorization_incomplete",
        PolyError::Parse { .. } => "poly.parse",
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        let code = match &e {
            RingError::InvalidConfig(_) => "ring.invalid_config",
            RingError::OutOfRange { .. } => "ring.out_of_range",
            RingError::NotVariant => "ring.not_variant",
            RingError::ScalarSub => "ring.scalar_sub",
            RingError::ZeroElement => "ring.zero_element",
            RingError::ZeroDivisor => "ring.zero_divisor",
            RingError::BothZero => "ring.both_zero",
            RingError::ForeignElement => "ring.foreign_element",
            RingError::NotEligible(_) => "ring.not_eligible",
            RingError::NotPolynomial => "ring.not_polynomial",
            RingError::NotAUnit(_) => "ring.not_a_unit",
            RingError::NotIrreducible => "ring.not_irreducible",
            RingError::UnknownVariable(_) => "ring.unknown_variable",
            RingError::NonPositive => "ring.non_positive",
            RingError::Poly(p) => poly_code(p),
        };
        Failure::new(code, e)
    }
}

impl From<MotzkinError> for Failure {
    fn from(e: MotzkinError) -> Self {
        let code = match &e {
            MotzkinError::InvalidModel(_) => "motzkin.invalid_model",
            MotzkinError::TooLarge { .. } => "motzkin.too_large",
            MotzkinError::Zero => "motzkin.zero",
            MotzkinError::Stalled(_) => "motzkin.stalled",
        };
        Failure::new(code, e)
    }
}

impl From<OrdinalParseError> for Failure {
    fn from(e: OrdinalParseError) -> Self {
        Failure::new("ordinal.parse", e)
    }
}

/// Rendered output of a successful command, or of a failed check run.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, ok: true }
    }
}

fn ring_config(opts: &Opts, default_variant: Variant) -> RingConfig {
    let variant = match opts.variant {
        Some(VariantArg::Base) => Variant::Base,
        Some(VariantArg::Z) => Variant::Z,
        None => default_variant,
    };
    let mut config = match variant {
        Variant::Base => RingConfig::base(Field::Prime(2), Ordinal::finite(2u32)),
        Variant::Z => RingConfig::z_variant(),
    };
    if let Some(f) = opts.field {
        config.field = match f {
            FieldArg::F2 => Field::Prime(2),
            FieldArg::F3 => Field::Prime(3),
            FieldArg::Q => Field::Rationals,
        };
    }
    if let Some(alpha) = &opts.alpha {
        config.alpha = alpha.clone();
    }
    if let Some(b) = opts.budget {
        config.budget.max_candidates = b;
    }
    config.unverified_minimality = opts.unverified_minimality;
    config
}

fn division_text(ring: &Ring, res: &DivisionResult) -> String {
    let path = match res.path {
        DivisionPath::Exact => "exact",
        DivisionPath::SmallNorm => "small_norm",
        DivisionPath::General => "general",
    };
    let rnorm = res
        .remainder_norm
        .as_ref()
        .map_or_else(|| "-".to_string(), |o| o.to_string());
    let mut out = format!(
        "quotient: {}\nremainder: {}\ndivisor_norm: {}\nremainder_norm: {}\npath: {}\n",
        ring.display(&res.quotient),
        ring.display(&res.remainder),
        res.divisor_norm,
        rnorm,
        path
    );
    if let Some(v) = res.adjoined_var {
        out.push_str(&format!("adjoined: {}\n", ring.var_name(v)));
    }
    out
}

fn trace_text(ring: &Ring, trace: &DescentTrace) -> String {
    let mut out = String::new();
    for (i, s) in trace.steps.iter().enumerate() {
        let rnorm = s
            .remainder_norm
            .as_ref()
            .map_or_else(|| "-".to_string(), |o| o.to_string());
        out.push_str(&format!(
            "step {}: ({}) = ({})*({}) + ({})  norm {} -> {}\n",
            i + 1,
            ring.display(&s.numerator),
            ring.display(&s.quotient),
            ring.display(&s.divisor),
            ring.display(&s.remainder),
            s.divisor_norm,
            rnorm
        ));
    }
    out.push_str(&format!("gcd: {}\n", ring.display(&trace.final_gcd)));
    out
}

fn report_json(r: &CheckReport) -> Value {
    json!({
        "name": r.name,
        "cases": r.cases,
        "passed": r.passed(),
        "failures": r.failures,
    })
}

fn run_ring(cmd: &RingCommand, opts: &Opts) -> Result<Output, Failure> {
    let default_variant = match cmd {
        RingCommand::DemoNonmult { .. } | RingCommand::DemoMonoid { .. } => Variant::Z,
        _ => Variant::Base,
    };
    if let RingCommand::DemoNonmult { k } = cmd {
        let (lhs, rhs) = nonmult_witness(*k)?;
        let text = format!("{k}^{e} = {lhs} < {rhs} = {k1}^{e}\n", e = k + 1, k1 = k + 1);
        let json = json!({
            "k": k,
            "lhs": lhs.to_string(),
            "rhs": rhs.to_string(),
            "holds": lhs < rhs,
        });
        return Ok(Output::new(text, json));
    }
    let mut ring = Ring::new(ring_config(opts, default_variant))?;
    match cmd {
        RingCommand::Norm { elem } => {
            let r = ring.parse(elem)?;
            let norm = ring.norm(&r)?;
            let sub = ring.sub_of(&r)?;
            let json = json!({
                "element": ring.element_json(&r),
                "norm": norm.to_string(),
                "sub": sub.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "stage": ring.stage_of(&r),
            });
            Ok(Output::new(format!("{norm}\n"), json))
        }
        RingCommand::Divide { n, d } => {
            let n = ring.parse(n)?;
            let d = ring.parse(d)?;
            let res = ring.divide(&n, &d)?;
            Ok(Output::new(division_text(&ring, &res), ring.division_json(&res)))
        }
        RingCommand::Gcd { a, b } => {
            let a = ring.parse(a)?;
            let b = ring.parse(b)?;
            let trace = ring.euclid_gcd(&a, &b)?;
            Ok(Output::new(trace_text(&ring, &trace), ring.trace_json(&trace)))
        }
        RingCommand::DemoMonoid { elem } => {
            let r = ring.parse(elem)?;
            let psi = ring.psi_monoid(&r)?;
            let phi = ring.norm(&r)?;
            let json = json!({
                "element": ring.element_json(&r),
                "psi": psi.to_string(),
                "phi": phi.to_string(),
            });
            Ok(Output::new(format!("psi: {psi}\nphi: {phi}\n"), json))
        }
        RingCommand::DemoNonmult { .. } => unreachable!("handled above"),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Ord(OrdCommand::Eval { expr }) => {
            let v = Ordinal::eval(expr)?;
            let json = json!({ "expr": expr, "value": v.to_string() });
            Ok(Output::new(format!("{v}\n"), json))
        }
        Command::Ring(cmd) => run_ring(cmd, opts),
        Command::Motzkin(MotzkinCommand::Stratify { model, max_elements }) => {
            let r = motzkin::stratify(*model, *max_elements)?;
            Ok(Output::new(r.to_tsv(), r.summary_json()))
        }
        Command::Check(CheckCommand::All) => {
            let reports = checks::run_all(opts.seed).map_err(|m| Failure::new("check.error", m))?;
            let ok = reports.iter().all(CheckReport::passed);
            let mut text = String::new();
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                text.push_str(&format!("{status} {} ({} cases)\n", r.name, r.cases));
                for f in r.failures.iter().take(5) {
                    text.push_str(&format!("  {f}\n"));
                }
            }
            let json = json!({
                "seed": opts.seed,
                "passed": ok,
                "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
            });
            Ok(Output { text, json, ok })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.opts.format == Format::Json;
    match run(&cli) {
        Ok(out) => {
            let body = if json_mode {
                serde_json::to_string_pretty(&out.json).expect("serializable") + "\n"
            } else {
                out.text
            };
            let mut stdout = io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error of the command.
            if let Err(e) = stdout.write_all(body.as_bytes()).and_then(|()| stdout.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error[io]: {e}");
                    return ExitCode::from(1);
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            if json_mode {
                let err = json!({ "error": { "code": f.code, "message": f.message } });
                eprintln!("{}", serde_json::to_string_pretty(&err).expect("serializable"));
            } else {
                eprintln!("error[{}]: {}", f.code, f.message);
            }
            ExitCode::from(1)
        }
    }
}
