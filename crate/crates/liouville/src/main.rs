//! Thin command-line driver over the library: solve a single equation
//! or run a regression corpus.

use clap::{Args, Parser, Subcommand};
use liouville::corpus::{run_corpus, CorpusOverrides};
use liouville::render::Style;
use liouville::{
    parse_foode, quadrature, solve, CaseSelect, FirstIntegral, ParseError, SolveConfig, Status,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "liouville", version, about = "Exact integrating factors for first-order ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equation given in the input grammar.
    Solve(SolveArgs),
    /// Run a JSON-lines corpus of equations with expectations.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Equation text: `dy/dx = <expr>` or `<expr> * dy/dx + <expr> = 0`.
    ode: String,
    /// Largest eigenpolynomial degree to search.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Restrict the search to one method.
    #[arg(long, default_value = "auto", value_parser = parse_case)]
    case: CaseSelect,
    /// Declare a named rational parameter (at most one).
    #[arg(long = "param")]
    params: Vec<String>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Highest multiplicity tried for the separated-exponent denominators.
    #[arg(long = "ansatz-mult", default_value_t = 2)]
    ansatz_mult: u32,
    /// Numerator degree slack of the separated-exponent ansatz
    /// (default: max degree of the equation).
    #[arg(long = "ansatz-slack")]
    ansatz_slack: Option<u32>,
    /// Include wall-clock timings in the output (breaks byte-for-byte
    /// reproducibility).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// JSON-lines corpus file.
    file: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Override the per-entry degree bound.
    #[arg(long)]
    degree: Option<u32>,
    /// Per-entry wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<u64>,
}

fn parse_case(s: &str) -> Result<CaseSelect, String> {
    CaseSelect::from_str_opt(s).ok_or_else(|| format!("unknown case '{}'", s))
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Corpus(args) => run_corpus_cmd(args),
    }
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let eq = match parse_foode(&args.ode, &args.params) {
        Ok(eq) => eq,
        Err(err) => {
            report_parse_error(&args.ode, &err);
            return ExitCode::from(1);
        }
    };
    let config = SolveConfig {
        max_degree: args.degree,
        case: args.case,
        timeout: Duration::from_secs(args.timeout),
        ansatz_mult: args.ansatz_mult,
        ansatz_slack: args.ansatz_slack,
    };
    let report = solve(&eq, &config);
    if args.json {
        println!("{}", report.to_json(&eq, args.timings));
    } else {
        let param = eq.param();
        println!("status: {:?}", report.status);
        if let Some(m) = report.method {
            println!("method: {}", m);
        }
        if let Some(f) = &report.factor {
            println!("R = {}", f.render(Style::Plain, param));
        }
        match &report.first_integral {
            Some(FirstIntegral::Closed(cf)) => {
                println!("first integral: {}", quadrature::closed_form_str(cf, Style::Plain, param));
            }
            Some(FirstIntegral::Unevaluated(of)) => {
                println!("one-form: {}", quadrature::one_form_str(of, Style::Plain, param));
            }
            None => {}
        }
        if !report.darboux_used.is_empty() {
            println!("eigenpolynomials (degree <= {}):", report.degree_bound);
            for q in &report.darboux_used {
                println!(
                    "  p = {:<24} g = {}",
                    liouville::render::poly_str(&q.p, Style::Plain, param),
                    liouville::render::poly_str(&q.g, Style::Plain, param)
                );
            }
        }
        for note in &report.notes {
            println!("note: {}", note);
        }
        if args.timings {
            for (stage, ms) in &report.timings_ms {
                println!("timing {}: {} ms", stage, ms);
            }
        }
    }
    match report.status {
        Status::Solved => ExitCode::SUCCESS,
        Status::NoResult => ExitCode::from(2),
        Status::Timeout => ExitCode::from(3),
    }
}

fn report_parse_error(src: &str, err: &ParseError) {
    eprintln!("error: {}", err);
    let pos = match err {
        ParseError::Syntax { pos, .. } => Some(*pos),
        ParseError::NonRational { pos, .. } => Some(*pos),
        ParseError::ZeroDenominator { pos } => Some(*pos),
    };
    if let Some(pos) = pos {
        eprintln!("  {}", src);
        eprintln!("  {}^", " ".repeat(pos.min(src.len())));
    }
}

fn run_corpus_cmd(args: CorpusArgs) -> ExitCode {
    let overrides = CorpusOverrides {
        max_degree: args.degree,
        timeout: args.timeout.map(Duration::from_secs),
    };
    let summary = match run_corpus(&args.file, overrides) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: cannot read {}: {}", args.file.display(), err);
            return ExitCode::from(1);
        }
    };
    if args.json {
        let entries: Vec<serde_json::Value> = summary
            .outcomes
            .iter()
            .map(|o| {
                let mut obj = serde_json::json!({
                    "line": o.line,
                    "id": o.id,
                    "passed": o.passed,
                    "detail": o.detail,
                });
                if let Some((report, eq)) = &o.report {
                    obj["report"] = report.to_json(eq, false);
                }
                obj
            })
            .collect();
        let doc = serde_json::json!({
            "entries": entries,
            "passed": summary.passed,
            "failed": summary.failed,
            "malformed": summary.malformed,
        });
        println!("{}", doc);
    } else {
        for o in &summary.outcomes {
            let mark = if o.passed { "ok  " } else { "FAIL" };
            println!("{} {:32} {} ({} ms)", mark, o.id, o.detail, o.elapsed_ms);
        }
        println!(
            "{}/{} passed, {} malformed",
            summary.passed,
            summary.passed + summary.failed,
            summary.malformed
        );
    }
    if summary.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
