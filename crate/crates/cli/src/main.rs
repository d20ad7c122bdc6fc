mod args;
mod commands;
mod config;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use fracld::Error;

use args::{Cli, Command, OutputArgs};
use commands::Failure;

const THREADS_VAR: &str = "FRACLD_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Validation(_) => 2,
        Failure::Numeric(Error::InsufficientReplications { .. }) => 4,
        Failure::Numeric(_) => 3,
        Failure::Io(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (report, out): (report::Report, &OutputArgs) = match &cli.command {
        Command::MlEval(a) => (commands::ml_eval(a)?, &a.out),
        Command::Pmf(a) => (commands::pmf(a)?, &a.out),
        Command::Sample(a) => (commands::sample(a)?, &a.out),
        Command::Rate(a) => (commands::rate(a)?, &a.out),
        Command::Entropy(a) => (commands::entropy(a)?, &a.out),
        Command::LdpProfile(a) => (commands::ldp_profile(a)?, &a.out),
        Command::CompareSubordinated(a) => (commands::compare(a)?, &a.out),
        Command::Ruin(a) => (commands::ruin(a)?, &a.out),
    };
    if out.output == "-" {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        report.write(out.format, &mut w)?;
        w.flush()?;
    } else {
        let mut w = BufWriter::new(File::create(&out.output)?);
        report.write(out.format, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(msg) => eprintln!("error: {msg}"),
                Failure::Numeric(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
