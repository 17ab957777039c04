#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod output;
mod svg;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use error::CliError;

const THREADS_VAR: &str = "LHSPHERE_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let ray_command = match &cli.command {
        Command::Rays(_) => true,
        Command::Figure(f) => commands::is_ray_figure(f.name),
        _ => false,
    };
    let format = cli
        .format
        .unwrap_or(if ray_command { Format::Svg } else { Format::Csv });
    if format == Format::Svg && !ray_command {
        return Err(CliError::Usage(
            "svg output is only available for rays, fig2 and fig3".into(),
        ));
    }

    let out = match &cli.command {
        Command::Rates(a) => commands::rates(a)?,
        Command::Mie(a) => commands::mie(a)?,
        Command::Modes(a) => commands::modes(a)?,
        Command::Rays(a) => commands::rays(a)?,
        Command::Figure(a) => commands::figure(a)?,
    };

    let mut sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => out.table.write_csv(&mut sink)?,
        Format::Jsonl => out.table.write_jsonl(&mut sink)?,
        Format::Svg => sink.write_all(out.svg.unwrap_or_default().as_bytes())?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let argv = match args::merge_config(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
