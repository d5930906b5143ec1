use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use solvquot::dsl::{parse_spec, text_summary};
use solvquot::json::{decode_result, emit_json, ChecksDoc};
use solvquot::pipeline::{solvable_invariants, Options, DEFAULT_MAX_ITER};
use solvquot::verify::{numeric_spotcheck, verify_output};
use solvquot::{gallery, Error};

#[derive(Parser)]
#[command(name = "solvquot", version, about = "Invariant rings and quotients of solvable group actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the quotient presentation of an action file.
    Compute {
        file: PathBuf,
        /// Write the result as JSON to this path (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Print the text summary even when writing JSON to stdout.
        #[arg(long)]
        text: bool,
        /// Skip the symbolic self-checks.
        #[arg(long)]
        no_check: bool,
        /// Run a numeric spot check with this many random trials.
        #[arg(long, value_name = "N")]
        spotcheck: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration cap of each slice search.
        #[arg(long, env = "SOLVQUOT_MAX_ITER", default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Re-check a JSON result against its action file.
    Verify {
        spec: PathBuf,
        result: PathBuf,
        #[arg(long, value_name = "N")]
        spotcheck: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the example action files into a directory.
    Examples {
        dir: PathBuf,
        /// Overwrite an existing directory.
        #[arg(long)]
        force: bool,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn compute(
    file: &Path,
    json: Option<&Path>,
    text: bool,
    no_check: bool,
    spotcheck: Option<usize>,
    seed: u64,
    max_iter: usize,
) -> Result<(), Failure> {
    let spec = parse_spec(&read(file)?)?;
    let q = solvable_invariants(&spec, &Options { max_iter })?;
    let report = (!no_check).then(|| verify_output(&q));
    let spot = spotcheck.map(|n| numeric_spotcheck(&q, n, seed));
    let json_to_stdout = json.is_some_and(|p| p == Path::new("-"));
    if !json_to_stdout || text {
        print!("{}", text_summary(&q, report.as_ref(), spot.as_ref()));
    }
    if let Some(path) = json {
        let doc = emit_json(&q, ChecksDoc::from_reports(report.as_ref(), spot.as_ref()));
        if json_to_stdout {
            print!("{doc}");
        } else {
            write(path, &doc)?;
        }
    }
    conclude(report.as_ref().map(|r| r.passed()), spot.as_ref().map(|s| s.passed()))
}

fn conclude(checks: Option<bool>, spot: Option<bool>) -> Result<(), Failure> {
    if checks == Some(false) {
        return Err(Error::Verification("symbolic checks failed".into()).into());
    }
    if spot == Some(false) {
        return Err(Error::Verification("numeric spot check disagreed".into()).into());
    }
    Ok(())
}

fn verify(spec: &Path, result: &Path, spotcheck: Option<usize>, seed: u64) -> Result<(), Failure> {
    let spec = parse_spec(&read(spec)?)?;
    let q = decode_result(&spec, &read(result)?)?;
    let report = verify_output(&q);
    let spot = spotcheck.map(|n| numeric_spotcheck(&q, n, seed));
    print!("{report}");
    if let Some(s) = &spot {
        println!("spotcheck        {} ({} of {} agreed)", if s.passed() { "ok" } else { "FAILED" }, s.agreed, s.trials);
        for d in &s.disagreements {
            println!("    {d}");
        }
    }
    conclude(Some(report.passed()), spot.map(|s| s.passed()))
}

fn examples(dir: &Path, force: bool) -> Result<(), Failure> {
    if dir.exists() && !force {
        return Err(Failure::Io(format!("{} already exists (use --force to overwrite)", dir.display())));
    }
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    for (name, text) in gallery::EXAMPLES {
        let path = dir.join(name);
        write(&path, text)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compute { file, json, text, no_check, spotcheck, seed, max_iter } => {
            compute(file, json.as_deref(), *text, *no_check, *spotcheck, *seed, *max_iter)
        }
        Command::Verify { spec, result, spotcheck, seed } => verify(spec, result, *spotcheck, *seed),
        Command::Examples { dir, force } => examples(dir, *force),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
