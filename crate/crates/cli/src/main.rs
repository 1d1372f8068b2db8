use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use patchalg::finring::cap_from_env;
use patchalg_cli::commands::{self, Options, Output};
use patchalg_cli::corpus::CorpusConfig;
use patchalg_cli::error::{CliError, CliResult};
use patchalg_cli::report::Report;
use patchalg_cli::spec::{Input, Selection};
use patchalg_cli::suites;

#[derive(Parser)]
#[command(name = "patchalg", version, about = "Subring spaces, patch presheaves and patch algebras of finite rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write a DOT diagram to this file.
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,

    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Enumeration cap; defaults to PATCHALG_CAP or 4096.
    #[arg(long, global = true)]
    cap: Option<usize>,

    /// Subring selection as JSON: "all" or a list of element lists.
    #[arg(long, global = true, value_name = "JSON")]
    select: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Tables, idempotents, spectra and predicates of a ring.
    Ring { spec: PathBuf },
    /// A subspace of Σ(R) and its topological properties.
    Space { spec: PathBuf },
    /// A patch presheaf, its stalks and its distinguished structure.
    Presheaf { spec: PathBuf },
    /// The patch algebra of a presheaf with its certificates.
    Algebra { spec: PathBuf },
    /// Run the verification suites over a corpus (the default one if omitted).
    Verify { spec: Option<PathBuf> },
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(cli: &Cli, output: &Output) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&output.report).expect("report serializes");
    println!("{text}");
    if let Some(path) = &cli.json {
        write(path, &text)?;
    }
    if let (Some(path), Some(dot)) = (&cli.dot, &output.dot) {
        write(path, dot)?;
    }
    Ok(())
}

fn selection(cli: &Cli, input: &Input) -> CliResult<Selection> {
    match &cli.select {
        Some(text) => Ok(serde_json::from_str(text)?),
        None => Ok(input.select.clone().unwrap_or_default()),
    }
}

fn verify(cli: &Cli, path: Option<&Path>) -> CliResult<Report> {
    let mut cfg: CorpusConfig = match path {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => CorpusConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let cap = cli.cap.or(cfg.cap).unwrap_or_else(cap_from_env);
    let report = suites::verify(&cfg, cap);
    for c in &report.certificates {
        eprintln!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.tag);
    }
    Ok(report)
}

fn run(cli: &Cli) -> CliResult<()> {
    let opts = Options { cap: cli.cap.unwrap_or_else(cap_from_env), seed: cli.seed.unwrap_or(0) };
    let output = match &cli.command {
        Command::Verify { spec } => {
            let report = verify(cli, spec.as_deref())?;
            let failure = report.certificates.iter().find(|c| !c.passed).map(|c| {
                format!("{}: {}\n{}", c.tag, c.statement, serde_json::to_string_pretty(&c.witness["counterexample"]).unwrap_or_default())
            });
            emit(cli, &Output { report, dot: None })?;
            return match failure {
                Some(f) => Err(CliError::Verification(f)),
                None => Ok(()),
            };
        }
        Command::Ring { spec } => commands::cmd_ring(&Input::parse(&read(spec)?)?, opts)?,
        Command::Space { spec } => {
            let input = Input::parse(&read(spec)?)?;
            commands::cmd_space(&input, &selection(cli, &input)?, opts)?
        }
        Command::Presheaf { spec } => {
            let input = Input::parse(&read(spec)?)?;
            commands::cmd_presheaf(&input, &selection(cli, &input)?, opts)?
        }
        Command::Algebra { spec } => {
            let input = Input::parse(&read(spec)?)?;
            commands::cmd_algebra(&input, &selection(cli, &input)?, opts)?
        }
    };
    emit(cli, &output)?;
    if output.report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = output.report.certificates.iter().filter(|c| !c.passed).map(|c| c.tag.as_str()).collect();
        Err(CliError::Verification(format!("certificates failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("patchalg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
