mod args;
mod commands;
mod identities;
mod manifest;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{CommandFactory, FromArgMatches};

use args::Cli;
use commands::{CliError, Format};
use manifest::{digest, RunManifest};

fn source(matches: &clap::ArgMatches, id: &str) -> String {
    match matches.value_source(id) {
        Some(ValueSource::CommandLine) => "flag",
        Some(ValueSource::EnvVariable) => "env",
        _ => "default",
    }
    .into()
}

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("derived parser");
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(&matches);
    let config_sources: BTreeMap<String, String> = ["out_dir", "threads", "seed"]
        .iter()
        .map(|id| {
            let s = source(sub, id);
            (id.to_string(), if s == "default" { source(&matches, id) } else { s })
        })
        .collect();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    let started = chrono::Utc::now();
    let name = cli.command.name();
    let outcome = match commands::run(&cli.command, cli.seed) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n");
            let mut cmd = Cli::command();
            if let Some(sc) = cmd.find_subcommand_mut(name) {
                eprintln!("{}", sc.render_usage());
            }
            return ExitCode::from(2);
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let finished = chrono::Utc::now();

    let ext = match outcome.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let output_file = format!("{name}.{ext}");
    let manifest = RunManifest {
        command: name.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cli.seed,
        params: outcome.params.clone(),
        config_sources,
        started_at: started.to_rfc3339(),
        finished_at: finished.to_rfc3339(),
        elapsed_ms: outcome.elapsed_ms.unwrap_or_else(|| (finished - started).num_milliseconds().max(0) as u128),
        checkpoints: outcome.checkpoints.clone(),
        totals: outcome.totals.clone(),
        output_file: output_file.clone(),
        result_digest: digest(outcome.body.as_bytes()),
    };
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(&cli.out_dir)?;
        std::fs::write(cli.out_dir.join(&output_file), &outcome.body)?;
        let text = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
        std::fs::write(cli.out_dir.join(format!("{name}.manifest.json")), text)
    };
    if let Err(e) = write() {
        eprintln!("error: cannot write outputs to {}: {e}", cli.out_dir.display());
        return ExitCode::from(1);
    }
    print!("{}", outcome.body);
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
