use std::io::{self, IsTerminal};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tss::repl::{self, Reply, Session, Status, DEFAULT_BUDGET, DEFAULT_TERMS};
use tss_core::{Budget, FieldKind};

#[derive(Parser)]
#[command(name = "tss", version, about = "Exact transseries arithmetic and asymptotic comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session reading commands from standard input.
    Repl {
        /// Write each command back before its output.
        #[arg(long)]
        echo: bool,
    },
    /// Print the leading terms of an expression.
    Eval {
        expr: String,
        /// Number of terms to display.
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
        #[command(flatten)]
        opts: Opts,
    },
    /// Decide the eventual order of two expressions.
    Compare {
        lhs: String,
        rhs: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Check the exponential axioms on the built-in instances.
    Axioms {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

#[derive(Args)]
struct Opts {
    /// Term budget for work whose outcome is not yet settled.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, value_enum, default_value_t = Field::Rational)]
    field: Field,
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    Rational,
    Exprational,
}

fn budget(n: usize) -> Result<Budget, Reply> {
    Budget::new(n).map_err(|e| Reply { text: format!("error: {e}"), status: Status::Error })
}

fn session(opts: &Opts) -> Result<Session, Reply> {
    let field = match opts.field {
        Field::Rational => FieldKind::Rational,
        Field::Exprational => FieldKind::ExpRational,
    };
    Ok(Session { budget: budget(opts.budget)?, field, ..Session::default() })
}

fn report(reply: Reply) -> ExitCode {
    if reply.status == Status::Error {
        eprintln!("{}", reply.text);
    } else {
        println!("{}", reply.text);
    }
    ExitCode::from(reply.status.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let reply = match cli.command {
        Command::Repl { echo } => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            return match repl::run(stdin.lock(), io::stdout().lock(), prompt, echo) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            };
        }
        Command::Eval { expr, terms, opts } => match session(&opts) {
            Ok(_) if terms == 0 => Reply { text: "error: --terms must be positive".into(), status: Status::Error },
            Ok(s) => s.expand_text(&expr, terms),
            Err(r) => r,
        },
        Command::Compare { lhs, rhs, opts } => match session(&opts) {
            Ok(s) => s.compare_text(&lhs, &rhs),
            Err(r) => r,
        },
        Command::Axioms { budget: n } => match budget(n) {
            Ok(b) => {
                let mut s = Session { budget: b, ..Session::default() };
                let r = s.execute("axioms");
                println!("{}", r.text);
                return ExitCode::from(r.status.exit_code() as u8);
            }
            Err(r) => r,
        },
    };
    report(reply)
}
