use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mulbasis::basis::Mode;
use mulbasis::pipeline::{self, RunReport};
use mulbasis::verify::verify_document;
use mulbasis::witness::{default_context, family_report, FamilyKind};
use mulbasis::Field;

/// Triangular bases, morphism classification and multiplicative bases for matrix presentations.
#[derive(Parser)]
#[command(name = "mulbasis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// numeric or symbolic parameters
    #[arg(long, global = true, default_value = "numeric")]
    mode: Mode,
    /// reinterpret entries over Q or F_p (e.g. Q, F5)
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<Field>,
    /// seed for the isomorphism solver
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// validate, filtration, classification, poset and graph checks
    Analyze { input: PathBuf },
    /// all checks, then rescale to a multiplicative basis
    Normalize { input: PathBuf },
    /// weight-function kernel generators and residuals
    Certify { input: PathBuf },
    /// build a witness family and test its members pairwise
    Witness {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        params: Vec<String>,
    },
    /// check a basis document (e.g. normalize output) without synthesis
    Verify { input: PathBuf },
}

fn parse_field(s: &str) -> Result<Field, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Field::Rational);
    }
    let digits = t.trim_start_matches(['F', 'f', 'p', 'P', '_']);
    let p: u64 = digits.parse().map_err(|_| format!("unknown field {s:?}"))?;
    Field::prime(p).map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(opts: &Opts, json: &str) -> Result<(), String> {
    match &opts.output {
        Some(path) => fs::write(path, format!("{json}\n")).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{json}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
                _ => Ok(()),
            }
        }
    }
}

fn run_pipeline(opts: &Opts, input: &Path, f: fn(&mulbasis::presentation::Presentation, Mode) -> RunReport) -> Result<i32, String> {
    let text = read(input)?;
    let p = pipeline::load_presentation(&text, opts.field).map_err(|e| format!("{}: {e}", input.display()))?;
    let report = f(&p, opts.mode);
    emit(opts, &report.to_json())?;
    Ok(report.exit_code())
}

fn run(cli: &Cli) -> Result<i32, String> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Analyze { input } => run_pipeline(opts, input, |p, m| pipeline::analyze(p, m).report),
        Command::Normalize { input } => run_pipeline(opts, input, pipeline::normalize),
        Command::Certify { input } => run_pipeline(opts, input, pipeline::certify),
        Command::Witness { family, params } => {
            let kind: FamilyKind = family.parse().map_err(|e: mulbasis::witness::WitnessError| e.to_string())?;
            let field = opts.field.unwrap_or(Field::Rational);
            let params = params
                .iter()
                .map(|s| field.parse_entry(s).map_err(|e| format!("parameter {s:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            let ctx = default_context(kind, field);
            let report = family_report(kind, &ctx, &params, opts.seed).map_err(|e| e.to_string())?;
            emit(opts, &serde_json::to_string_pretty(&report).unwrap())?;
            Ok(if report.separates() { 0 } else { 2 })
        }
        Command::Verify { input } => {
            let text = read(input)?;
            let (_, report) = verify_document(&text, opts.field).map_err(|e| format!("{}: {e}", input.display()))?;
            emit(opts, &serde_json::to_string_pretty(&report).unwrap())?;
            Ok(if report.accepted { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
