//! Command-line front end: verification suites, coproduct tables, bracket
//! evaluation and PBW certificates, as text or JSON.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qborel::coeffring::{Numeric, Scalar, ScalarDomain, Symbolic};
use qborel::datum::{
    default_point, make_datum, numeric_datum, QuantumDatum, Series, Specialization,
};
use qborel::freeword::{Algebra, FreeElem};
use qborel::verify::{
    coproduct_formula, run_suite, Arith, CoproductFormula, CoproductMode, Suite, SuiteOptions,
    VerificationReport,
};
use serde::Serialize;
use thiserror::Error;

pub mod expr;

pub use expr::{parse_expr, BracketExpr};

pub const WORKERS_ENV: &str = "QBOREL_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qborel::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for a mathematical failure, 2 for anything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                qborel::Error::TheoremMismatch { .. }
                | qborel::Error::NonProportionalProjection { .. }
                | qborel::Error::DegenerateEvaluationPoint(_),
            ) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qborel",
    version,
    about = "PBW generators and coproduct formulas for quantum Borel algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and report every case.
    Verify(VerifyArgs),
    /// Coproduct of one generator, with its coefficients.
    Coproduct(CoproductArgs),
    /// Shuffle image of a bracket expression such as "[x1,[x2,x3]]".
    Eval(EvalArgs),
    /// Linear independence certificate for ordered PBW products.
    Pbw(PbwArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    #[value(name = "A")]
    A,
    #[value(name = "C")]
    C,
    #[value(name = "D")]
    D,
}

impl From<SeriesArg> for Series {
    fn from(s: SeriesArg) -> Series {
        match s {
            SeriesArg::A => Series::A,
            SeriesArg::C => Series::C,
            SeriesArg::D => Series::D,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArithArg {
    Symbolic,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Sigma,
    Images,
    Serre,
    Identities,
    Arrangements,
    Coproduct,
    Pbw,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoproductModeArg {
    Assert,
    Discover,
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, value_enum, ignore_case = true)]
    pub series: SeriesArg,
    #[arg(long)]
    pub rank: u32,
    /// Seed for the numeric point and for random instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Arithmetic; defaults to symbolic up to rank 4 and numeric above.
    #[arg(long, value_enum)]
    pub mode: Option<ArithArg>,
    #[arg(long, default_value_t = 4)]
    pub max_degree: u32,
    /// Random instances per identity.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
}

#[derive(Args, Debug)]
pub struct CoproductArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = CoproductModeArg::Discover)]
    pub mode: CoproductModeArg,
    /// Arithmetic; defaults to symbolic up to rank 4 and numeric above.
    #[arg(long, value_enum)]
    pub arith: Option<ArithArg>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub expr: String,
    #[arg(long, value_enum, default_value_t = ArithArg::Symbolic)]
    pub arith: ArithArg,
}

#[derive(Args, Debug)]
pub struct PbwArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 4)]
    pub max_degree: u32,
}

fn default_arith(rank: u32, chosen: Option<ArithArg>) -> Arith {
    match chosen {
        Some(ArithArg::Symbolic) => Arith::Symbolic,
        Some(ArithArg::Numeric) => Arith::Numeric,
        None if rank <= 4 => Arith::Symbolic,
        None => Arith::Numeric,
    }
}

fn arith_name(a: Arith) -> &'static str {
    match a {
        Arith::Symbolic => "symbolic",
        Arith::Numeric => "numeric",
    }
}

fn datum(c: &Common) -> Result<QuantumDatum, CliError> {
    Ok(make_datum(
        c.series.into(),
        c.rank,
        Specialization::Multiparameter,
    )?)
}

fn numeric_of(d: &QuantumDatum, seed: u64) -> Result<QuantumDatum, CliError> {
    Ok(numeric_datum(
        d.series,
        d.rank,
        default_point(d.vars, seed),
    )?)
}

/// What a subcommand produced: the rendered document and whether every
/// checked statement held.
pub struct Output {
    pub body: String,
    pub passed: bool,
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyDoc<'a> {
    series: Series,
    rank: u32,
    mode: &'static str,
    passed: bool,
    reports: &'a [VerificationReport],
}

fn suites_for(s: SuiteArg) -> Vec<Suite> {
    match s {
        SuiteArg::Sigma => vec![Suite::Sigma],
        SuiteArg::Images => vec![Suite::Images],
        SuiteArg::Serre => vec![Suite::Serre],
        SuiteArg::Identities => vec![Suite::Identities],
        SuiteArg::Arrangements => vec![Suite::Arrangements],
        SuiteArg::Coproduct => vec![Suite::Coproduct],
        SuiteArg::Pbw => vec![Suite::Pbw],
        SuiteArg::All => Suite::ALL.to_vec(),
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Output, CliError> {
    let d = datum(&a.common)?;
    let arith = default_arith(d.rank, a.mode);
    let opts = SuiteOptions {
        arith,
        seed: a.common.seed,
        max_degree: a.max_degree,
        identity_count: a.count,
    };
    let mut reports = Vec::new();
    for suite in suites_for(a.suite) {
        reports.push(run_suite(&d, suite, &opts)?);
    }
    let passed = reports.iter().all(|r| r.passed());
    let body = match a.common.format {
        Format::Json => {
            let doc = VerifyDoc {
                series: d.series,
                rank: d.rank,
                mode: arith_name(arith),
                passed,
                reports: &reports,
            };
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&r.to_string());
            }
            let total: usize = reports.iter().map(|r| r.cases.len()).sum();
            let good: usize = reports.iter().map(|r| r.pass_count()).sum();
            let _ = writeln!(
                s,
                "{}: {good}/{total} cases pass",
                if passed { "PASS" } else { "FAIL" }
            );
            s
        }
    };
    Ok(Output { body, passed })
}

// ---------------------------------------------------------------------------
// coproduct
// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct TermDoc {
    pub i: u32,
    pub tau: String,
    pub grouplike: Vec<u32>,
    pub left: String,
    pub right: String,
    /// coefficient of `left ⊗ right` in the ordinary coproduct
    pub coefficient: String,
    pub braided: String,
    pub vanishing: bool,
}

#[derive(Serialize)]
pub struct CoproductDoc {
    pub series: Series,
    pub rank: u32,
    pub k: u32,
    pub m: u32,
    pub mode: &'static str,
    pub arithmetic: &'static str,
    pub in_pbw_set: bool,
    pub terms: Vec<TermDoc>,
}

fn coproduct_doc<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    f: &CoproductFormula<D::Elem>,
    arith: Arith,
) -> (CoproductDoc, Vec<Option<String>>) {
    let d = alg.datum;
    let n = d.rank;
    // τ_{n-1} for series D is the parameter p_{n,n-1}; say so in the table
    let special = (d.series == Series::D).then(|| alg.embed(d.p(n, n - 1)));
    let mut notes = Vec::new();
    let terms = f
        .terms
        .iter()
        .map(|t| {
            let note = match &special {
                Some(p) if &t.tau == p && !t.tau.is_zero() && t.tau != alg.one() => {
                    Some(format!("p_{}_{}", n, n - 1))
                }
                _ => None,
            };
            notes.push(note);
            TermDoc {
                i: t.i,
                tau: t.tau.to_string(),
                grouplike: t.grouplike.clone(),
                left: t.left.label(d.series),
                right: t.right.label(d.series),
                coefficient: t.unbraided.to_string(),
                braided: t.braided.to_string(),
                vanishing: t.vanishing,
            }
        })
        .collect();
    let doc = CoproductDoc {
        series: d.series,
        rank: n,
        k: f.k,
        m: f.m,
        mode: match f.mode {
            CoproductMode::Assert => "assert",
            CoproductMode::Discover => "discover",
        },
        arithmetic: arith_name(arith),
        in_pbw_set: f.in_pbw_set,
        terms,
    };
    (doc, notes)
}

fn render_coproduct(doc: &CoproductDoc, notes: &[Option<String>]) -> String {
    let label = |k: u32, m: u32| {
        if doc.series == Series::D {
            format!("e[{k},{m}]")
        } else {
            format!("v[{k},{m}]")
        }
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}{} coproduct of {} ({}, {}){}",
        doc.series,
        doc.rank,
        label(doc.k, doc.m),
        doc.mode,
        doc.arithmetic,
        if doc.in_pbw_set {
            ""
        } else {
            ", outside the PBW set"
        }
    );
    let _ = writeln!(
        s,
        "  g * {0} (x) 1 + 1 (x) {0}  plus the middle terms:",
        label(doc.k, doc.m)
    );
    let rows: Vec<[String; 6]> = doc
        .terms
        .iter()
        .zip(notes)
        .map(|(t, note)| {
            let tau = match note {
                Some(n) => format!("{} = {n}", t.tau),
                None => t.tau.clone(),
            };
            let coef = if t.vanishing {
                format!("{} (tensor vanishes)", t.coefficient)
            } else {
                t.coefficient.clone()
            };
            let g: Vec<String> = t.grouplike.iter().map(|x| x.to_string()).collect();
            [
                t.i.to_string(),
                tau,
                format!("({})", g.join(",")),
                t.left.clone(),
                t.right.clone(),
                coef,
            ]
        })
        .collect();
    let header = ["i", "tau", "grouplike", "left", "right", "coefficient"];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut l = String::from(" ");
        for (c, w) in cells.iter().zip(widths) {
            let _ = write!(l, " {c:<w$}");
        }
        l.trim_end().to_string()
    };
    let _ = writeln!(s, "{}", line(&header.map(String::from)));
    for r in &rows {
        let _ = writeln!(s, "{}", line(r));
    }
    if rows.is_empty() {
        let _ = writeln!(s, "  (primitive: no middle terms)");
    }
    s
}

fn coproduct_in<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    a: &CoproductArgs,
    arith: Arith,
) -> Result<Output, CliError> {
    let mode = match a.mode {
        CoproductModeArg::Assert => CoproductMode::Assert,
        CoproductModeArg::Discover => CoproductMode::Discover,
    };
    let f = coproduct_formula(alg, a.k, a.m, mode)?;
    let (doc, notes) = coproduct_doc(alg, &f, arith);
    let body = match a.common.format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("document serializes") + "\n",
        Format::Text => render_coproduct(&doc, &notes),
    };
    Ok(Output { body, passed: true })
}

pub fn cmd_coproduct(a: &CoproductArgs) -> Result<Output, CliError> {
    let d = datum(&a.common)?;
    d.check_index(a.k, a.m)?;
    let arith = default_arith(d.rank, a.arith);
    match arith {
        Arith::Symbolic => coproduct_in(&Algebra::new(&d, Symbolic::new(d.vars)), a, arith),
        Arith::Numeric => {
            let nd = numeric_of(&d, a.common.seed)?;
            let alg: Algebra<'_, Numeric> = Algebra::numeric(&nd)?;
            coproduct_in(&alg, a, arith)
        }
    }
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalDoc {
    series: Series,
    rank: u32,
    expr: String,
    arithmetic: &'static str,
    image: Vec<(String, String)>,
    rendered: String,
}

fn eval_in<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    a: &EvalArgs,
    e: &BracketExpr,
) -> Result<Output, CliError> {
    let f: FreeElem<D::Elem> = e.bind(alg)?;
    let img = alg.eval_free(&f);
    let rendered = img.to_string();
    let body = match a.common.format {
        Format::Text => format!("{rendered}\n"),
        Format::Json => {
            let image = img
                .terms()
                .map(|(w, c)| {
                    let letters: Vec<String> = w.iter().map(|l| format!("x{l}")).collect();
                    (format!("({})", letters.join(" ")), c.to_string())
                })
                .collect();
            let doc = EvalDoc {
                series: alg.datum.series,
                rank: alg.datum.rank,
                expr: e.to_string(),
                arithmetic: if a.arith == ArithArg::Numeric {
                    "numeric"
                } else {
                    "symbolic"
                },
                image,
                rendered,
            };
            serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
        }
    };
    Ok(Output { body, passed: true })
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Output, CliError> {
    let e = parse_expr(&a.expr)?;
    let d = datum(&a.common)?;
    match a.arith {
        ArithArg::Symbolic => eval_in(&Algebra::new(&d, Symbolic::new(d.vars)), a, &e),
        ArithArg::Numeric => {
            let nd = numeric_of(&d, a.common.seed)?;
            let alg: Algebra<'_, Numeric> = Algebra::numeric(&nd)?;
            eval_in(&alg, a, &e)
        }
    }
}

// ---------------------------------------------------------------------------
// pbw
// ---------------------------------------------------------------------------

pub fn cmd_pbw(a: &PbwArgs) -> Result<Output, CliError> {
    let d = datum(&a.common)?;
    let opts = SuiteOptions {
        arith: Arith::Numeric,
        seed: a.common.seed,
        max_degree: a.max_degree,
        identity_count: 0,
    };
    let r = run_suite(&d, Suite::Pbw, &opts)?;
    let passed = r.passed();
    let body = match a.common.format {
        Format::Json => serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
        Format::Text => r.to_string(),
    };
    Ok(Output { body, passed })
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Coproduct(a) => cmd_coproduct(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Pbw(a) => cmd_pbw(a),
    }
}

fn common(cli: &Cli) -> &Common {
    match &cli.command {
        Command::Verify(a) => &a.common,
        Command::Coproduct(a) => &a.common,
        Command::Eval(a) => &a.common,
        Command::Pbw(a) => &a.common,
    }
}

/// Configure the worker pool from the environment; a bad value is a usage
/// error, an already-initialised pool is left alone.
fn init_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "{WORKERS_ENV} must be a positive integer, got {v:?}"
        ))
    })?;
    if n == 0 {
        return Err(CliError::Usage(format!(
            "{WORKERS_ENV} must be a positive integer"
        )));
    }
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Run the CLI on `args` (including the program name) and return the exit
/// code: 0 when every check holds, 1 on a mathematical failure, 2 on a
/// usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Err(e) = init_workers() {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    match dispatch(&cli) {
        Ok(out) => {
            let written = match &common(&cli).out {
                Some(path) => std::fs::write(path, &out.body),
                None => stdout.write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            if out.passed {
                0
            } else {
                let _ = writeln!(
                    stderr,
                    "verification failed; witnesses are listed in the report"
                );
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
