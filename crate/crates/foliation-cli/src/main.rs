//! Command-line entry point. Files in one invocation are independent work
//! items and run through the order-preserving batch executor; each file's
//! own pipeline stays sequential.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foliation_core::batch::{map_ordered, ExecMode};
use foliation_core::Rat;
use foliation_cli::commands::{drive, Action, RunCmd, Task, EXIT_PARSE};
use foliation_cli::corpus_docs;
use foliation_cli::report::Outcome;

#[derive(Parser)]
#[command(name = "foliation", version, about = "Exact analysis of foliated surface documents")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every document against the model axioms and report violations.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
        /// Process files one at a time even when parallel execution is compiled in.
        #[arg(long)]
        sequential: bool,
        /// Directory for per-file JSON and text reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one analysis command over every document.
    Run {
        #[arg(long, value_enum)]
        command: CommandArg,
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Name of the document divisor to use as the boundary.
        #[arg(long)]
        divisor: Option<String>,
        /// Single perturbation size as an exact fraction, e.g. 1/8.
        #[arg(long, value_parser = parse_rat)]
        epsilon: Option<Rat>,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
        /// Process files one at a time even when parallel execution is compiled in.
        #[arg(long)]
        sequential: bool,
        /// Directory for per-file JSON and text reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the negative part along every independent route and compare.
    Crosscheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Name of the document divisor to use as the boundary.
        #[arg(long)]
        divisor: Option<String>,
        /// Process files one at a time even when parallel execution is compiled in.
        #[arg(long)]
        sequential: bool,
        /// Directory for per-file JSON and text reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the built-in document corpus into a directory.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CommandArg {
    Chains,
    Mmp,
    Zariski,
    Theta,
    Classify,
    Vanishing,
    Perturb,
}

impl From<CommandArg> for RunCmd {
    fn from(c: CommandArg) -> RunCmd {
        match c {
            CommandArg::Chains => RunCmd::Chains,
            CommandArg::Mmp => RunCmd::Mmp,
            CommandArg::Zariski => RunCmd::Zariski,
            CommandArg::Theta => RunCmd::Theta,
            CommandArg::Classify => RunCmd::Classify,
            CommandArg::Vanishing => RunCmd::Vanishing,
            CommandArg::Perturb => RunCmd::Perturb,
        }
    }
}

fn parse_rat(s: &str) -> Result<Rat, foliation_core::rational::ParseRatError> {
    s.parse()
}

fn batch(files: Vec<PathBuf>, task: Task, sequential: bool, out: Option<PathBuf>) -> ExitCode {
    let mode = if sequential {
        ExecMode::Sequential
    } else {
        ExecMode::auto()
    };
    let outcomes: Vec<Outcome> = map_ordered(mode, files, |f| drive(&f, &task));
    let mut exit = 0;
    for o in &outcomes {
        print!("{}", o.text);
        if exit == 0 {
            exit = o.exit;
        }
    }
    if let Some(dir) = out {
        for o in &outcomes {
            if let Err(e) = o.write_into(&dir) {
                eprintln!("error: cannot write report into {}: {e}", dir.display());
                return ExitCode::from(EXIT_PARSE as u8);
            }
        }
    }
    ExitCode::from(exit as u8)
}

fn corpus_cmd(out: PathBuf) -> ExitCode {
    match corpus_docs::write_corpus(&out) {
        Ok(names) => {
            for name in names {
                println!("wrote {}", out.join(name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write corpus into {}: {e}", out.display());
            ExitCode::from(EXIT_PARSE as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Validate {
            files,
            strict,
            sequential,
            out,
        } => batch(
            files,
            Task {
                action: Action::Validate,
                divisor: None,
                epsilon: None,
                strict,
            },
            sequential,
            out,
        ),
        Cmd::Run {
            command,
            files,
            divisor,
            epsilon,
            strict,
            sequential,
            out,
        } => batch(
            files,
            Task {
                action: Action::Run(command.into()),
                divisor,
                epsilon,
                strict,
            },
            sequential,
            out,
        ),
        Cmd::Crosscheck {
            files,
            divisor,
            sequential,
            out,
        } => batch(
            files,
            Task {
                action: Action::Crosscheck,
                divisor,
                epsilon: None,
                strict: false,
            },
            sequential,
            out,
        ),
        Cmd::Corpus { out } => corpus_cmd(out),
    }
}
