//! Command-line front end: classification, synthesis, verification and
//! pullback generation for scalar third-order ODEs u''' = f(x, u, u', u'').
//!
//! Exit codes: 0 ok/verified, 2 parse or usage error, 3 not-applicable or
//! not-verified, 4 partial synthesis.

use clap::{Args, Parser, Subcommand};
use maxsym_core::report::{AuxOut, Report, Status, TransformOut};
use maxsym_core::{
    parse, synthesize, Hints, Ode3, ParseError, PointTransform, RationalExpr, SynthesisOptions,
    SynthesisResult, TransformError, Verdict,
};
use std::io::{BufRead, Write};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_APPLICABLE: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "maxsym",
    about = "Exact classification and linearization of third-order ODEs u''' = f(x, u, u', u'')",
    version
)]
struct Cli {
    /// Emit a JSON report instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Only print the verdict / status line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether u''' = f admits the maximal seven-dimensional point
    /// symmetry group (equivalently, is point-equivalent to u''' = 0).
    Classify {
        /// Right-hand side f, or `-` to read newline-delimited expressions
        /// from standard input (one JSON report per line).
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Construct and verify a linearizing point transformation.
    Synthesize {
        /// Right-hand side f, or `-` for batch mode from standard input.
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
        #[command(flatten)]
        opts: SynthOpts,
    },
    /// Check that (phi, psi) maps solutions of u''' = f to ubar''' = 0.
    Verify {
        /// Right-hand side f.
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// New independent variable phi(x, u).
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// New dependent variable psi(x, u).
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
    /// Print the ODE mapped onto ubar''' = target by (phi, psi).
    Pullback {
        /// New independent variable phi(x, u).
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        /// New dependent variable psi(x, u).
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        /// Target right-hand side in the barred variables (default 0).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        target: String,
    },
}

#[derive(Args, Clone)]
struct SynthOpts {
    /// Total-degree bound for undetermined-coefficient candidates.
    #[arg(long, default_value_t = 6)]
    max_degree: u32,
    /// Degree bound for the Riccati rational-solution search.
    #[arg(long, default_value_t = 4)]
    riccati_degree: u32,
    /// Stage hint `stage=expr` with stage one of a3, a2, f2, phi, psi;
    /// may be repeated.
    #[arg(long = "hint", value_name = "STAGE=EXPR", allow_hyphen_values = true)]
    hints: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            EXIT_PARSE
        }
    };
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Classify { expr } => match expr.as_deref() {
            Some("-") | None => batch(|line| classify_report(line)),
            Some(text) => {
                let (report, code) = classify_report(text);
                emit(cli, &report, classify_lines(&report));
                Ok(code)
            }
        },
        Command::Synthesize { expr, opts } => {
            let options = build_options(opts)?;
            match expr.as_deref() {
                Some("-") | None => batch(|line| synthesize_report(line, &options)),
                Some(text) => {
                    let (report, code) = synthesize_report(text, &options);
                    emit(cli, &report, synthesize_lines(&report));
                    Ok(code)
                }
            }
        }
        Command::Verify { expr, phi, psi } => {
            let (report, code) = verify_report(expr, phi, psi);
            let lines = vec![match report.verified {
                Some(true) => "verified: the transformation linearizes the equation".to_string(),
                Some(false) => "not verified: A + B*f does not vanish".to_string(),
                None => describe_error(&report),
            }];
            emit(cli, &report, lines);
            Ok(code)
        }
        Command::Pullback { phi, psi, target } => {
            let (report, code) = pullback_report(phi, psi, target);
            let lines = vec![match &report.pullback {
                Some(f) => f.clone(),
                None => describe_error(&report),
            }];
            emit(cli, &report, lines);
            Ok(code)
        }
    }
}

fn batch(per_line: impl Fn(&str) -> (Report, u8)) -> Result<u8, String> {
    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    let mut worst = EXIT_OK;
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| format!("error reading standard input: {e}"))?;
        if line.trim().is_empty() {
            continue;
        }
        let (report, code) = per_line(line.trim());
        writeln!(out, "{}", report.to_json()).map_err(|e| e.to_string())?;
        if worst == EXIT_OK && code != EXIT_OK {
            worst = code;
        }
    }
    Ok(worst)
}

fn emit(cli: &Cli, report: &Report, lines: Vec<String>) {
    if cli.json {
        println!("{}", report.to_json_pretty());
        return;
    }
    if cli.quiet {
        if let Some(first) = lines.first() {
            println!("{first}");
        }
        return;
    }
    for line in lines {
        println!("{line}");
    }
}

fn build_options(opts: &SynthOpts) -> Result<SynthesisOptions, String> {
    let mut hints = Hints::default();
    for spec in &opts.hints {
        let (stage, text) = spec
            .split_once('=')
            .ok_or_else(|| format!("invalid hint `{spec}`: expected stage=expr"))?;
        let value = parse(text).map_err(|e| format!("invalid hint expression: {e}"))?;
        match stage {
            "a3" => hints.a3 = Some(value),
            "a2" => hints.a2 = Some(value),
            "f2" => hints.f2 = Some(value),
            "phi" => hints.phi = Some(value),
            "psi" => hints.psi = Some(value),
            other => {
                return Err(format!(
                    "unknown hint stage `{other}` (use a3, a2, f2, phi, psi)"
                ))
            }
        }
    }
    Ok(SynthesisOptions {
        max_degree: opts.max_degree,
        riccati_degree: opts.riccati_degree,
        hints,
    })
}

fn parse_error_report(err: &ParseError) -> Report {
    let position = match err {
        ParseError::Syntax { pos, .. }
        | ParseError::NonIntegerExponent { pos }
        | ParseError::UnknownIdentifier { pos, .. }
        | ParseError::DivisionByZero { pos } => Some(*pos),
    };
    Report::error("parse-error", err.to_string(), position)
}

fn transform_error_report(err: &TransformError) -> Report {
    Report::error("degenerate-transformation", err.to_string(), None)
}

fn describe_error(report: &Report) -> String {
    report
        .error
        .as_ref()
        .map(|e| format!("error ({}): {}", e.kind, e.message))
        .unwrap_or_else(|| "error".to_string())
}

fn classify_report(text: &str) -> (Report, u8) {
    let f = match parse(text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return (parse_error_report(&e), EXIT_PARSE);
        }
    };
    let ode = Ode3::new(f.clone());
    let invariants = ode.invariants();
    let mut report = Report::empty(Status::Ok).with_invariants(&invariants);
    report.input = Some(f.to_string());
    let code = match invariants.verdict {
        Verdict::MaximallySymmetric => EXIT_OK,
        Verdict::NotMaximallySymmetric => EXIT_NOT_APPLICABLE,
    };
    (report, code)
}

fn classify_lines(report: &Report) -> Vec<String> {
    let mut lines = Vec::new();
    if let Some(v) = report.verdict {
        lines.push(format!("verdict: {v}"));
    }
    if let Some(w) = &report.witness {
        lines.push(format!("witness: {w} is the first nonvanishing invariant"));
    }
    if let (Some(inv), Some(van)) = (&report.invariants, &report.vanishing) {
        for (name, (value, vanishes)) in ["I1", "I2", "I3", "I4"].iter().zip([
            (&inv.i1, van[0]),
            (&inv.i2, van[1]),
            (&inv.i3, van[2]),
            (&inv.i4, van[3]),
        ]) {
            let mark = if vanishes { "= 0" } else { "!= 0" };
            lines.push(format!("{name} {mark}: {value}"));
        }
    }
    lines
}

fn synthesize_report(text: &str, options: &SynthesisOptions) -> (Report, u8) {
    let f = match parse(text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return (parse_error_report(&e), EXIT_PARSE);
        }
    };
    let ode = Ode3::new(f.clone());
    let invariants = ode.invariants();
    match synthesize(&ode, options) {
        SynthesisResult::Success {
            transform,
            aux,
            trace,
        } => {
            let mut report = Report::empty(Status::Ok).with_invariants(&invariants);
            report.input = Some(f.to_string());
            report.transformation = Some(TransformOut {
                phi: transform.phi().to_string(),
                psi: transform.psi().to_string(),
            });
            report.auxiliaries = Some(AuxOut {
                a1: aux.a1.to_string(),
                a2: aux.a2.to_string(),
                a3: aux.a3.to_string(),
            });
            report.trace = Some(trace.steps);
            (report, EXIT_OK)
        }
        SynthesisResult::Partial {
            aux,
            trace,
            blocking,
            error,
        } => {
            let mut report = Report::empty(Status::Partial).with_invariants(&invariants);
            report.input = Some(f.to_string());
            report.auxiliaries = Some(AuxOut {
                a1: aux.a1.map(|e| e.to_string()).unwrap_or_default(),
                a2: aux.a2.map(|e| e.to_string()).unwrap_or_default(),
                a3: aux.a3.map(|e| e.to_string()).unwrap_or_default(),
            });
            report.trace = Some(trace.steps);
            report.blocking_stage = Some(blocking.to_string());
            report.error = Some(maxsym_core::report::ErrorOut {
                kind: "stage-error".into(),
                message: error.to_string(),
                position: None,
            });
            (report, EXIT_PARTIAL)
        }
        SynthesisResult::NotApplicable { report: inv, .. } => {
            let mut report = Report::empty(Status::NotApplicable).with_invariants(&inv);
            report.input = Some(f.to_string());
            (report, EXIT_NOT_APPLICABLE)
        }
    }
}

fn synthesize_lines(report: &Report) -> Vec<String> {
    let mut lines = Vec::new();
    match report.status {
        Status::Ok => {
            if let Some(t) = &report.transformation {
                lines.push(format!("success: xbar = {}, ubar = {}", t.phi, t.psi));
            }
            if let Some(a) = &report.auxiliaries {
                lines.push(format!("a1 = {}", a.a1));
                lines.push(format!("a2 = {}", a.a2));
                lines.push(format!("a3 = {}", a.a3));
            }
            if let Some(trace) = &report.trace {
                for step in trace {
                    lines.push(format!(
                        "[{}] {} | ansatz: {} | {}",
                        step.stage, step.equation, step.ansatz, step.result
                    ));
                }
            }
        }
        Status::Partial => {
            lines.push(format!(
                "partial: blocked at stage {}",
                report.blocking_stage.as_deref().unwrap_or("?")
            ));
            lines.push(describe_error(report));
            if let Some(trace) = &report.trace {
                for step in trace {
                    lines.push(format!(
                        "[{}] {} | ansatz: {} | {}",
                        step.stage, step.equation, step.ansatz, step.result
                    ));
                }
            }
        }
        Status::NotApplicable => {
            lines.push("not applicable: the equation is not maximally symmetric".to_string());
            if let Some(w) = &report.witness {
                lines.push(format!("witness: {w} does not vanish"));
            }
        }
        Status::Error => lines.push(describe_error(report)),
    }
    lines
}

fn verify_report(expr: &str, phi: &str, psi: &str) -> (Report, u8) {
    let parsed: Result<Vec<RationalExpr>, ParseError> =
        [expr, phi, psi].iter().map(|t| parse(t)).collect();
    let exprs = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return (parse_error_report(&e), EXIT_PARSE);
        }
    };
    let transform = match PointTransform::new(exprs[1].clone(), exprs[2].clone()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return (transform_error_report(&e), EXIT_PARSE);
        }
    };
    let ode = Ode3::new(exprs[0].clone());
    let verified = transform.verify(&ode);
    let mut report = Report::empty(Status::Ok);
    report.input = Some(exprs[0].to_string());
    report.transformation = Some(TransformOut {
        phi: transform.phi().to_string(),
        psi: transform.psi().to_string(),
    });
    report.verified = Some(verified);
    (
        report,
        if verified { EXIT_OK } else { EXIT_NOT_APPLICABLE },
    )
}

fn pullback_report(phi: &str, psi: &str, target: &str) -> (Report, u8) {
    let parsed: Result<Vec<RationalExpr>, ParseError> =
        [phi, psi, target].iter().map(|t| parse(t)).collect();
    let exprs = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return (parse_error_report(&e), EXIT_PARSE);
        }
    };
    let transform = match PointTransform::new(exprs[0].clone(), exprs[1].clone()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return (transform_error_report(&e), EXIT_PARSE);
        }
    };
    let pulled = transform.pullback(&exprs[2]);
    let mut report = Report::empty(Status::Ok);
    report.transformation = Some(TransformOut {
        phi: transform.phi().to_string(),
        psi: transform.psi().to_string(),
    });
    report.pullback = Some(pulled.rhs().to_string());
    (report, EXIT_OK)
}
