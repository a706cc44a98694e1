use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use muwb_cli::soundness::{Battery, DEFAULT_SEED};
use muwb_cli::{check, input, mc, serve, soundness, Format, Report};
use muwb_core::session::protocol::{Server, DEFAULT_MAX_SESSIONS};

/// Workbench for the modal mu-calculus: proof checking, model checking and
/// an interactive proof server.
#[derive(Parser)]
#[command(name = "muwb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay proof scripts (.mu) or check derivation files (.json).
    Check {
        /// A file, or a directory of .mu and .json files
        path: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate a formula on a model and check a consequence.
    Mc {
        /// Model file (JSON)
        model: PathBuf,
        formula: String,
        /// Hypothesis of the consequence check; repeatable
        #[arg(long = "hyp")]
        hyps: Vec<String>,
        /// Identifiers to read as variables, comma separated
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Evaluate under this assignment only, e.g. x=s0,s1; repeatable
        #[arg(long)]
        env: Vec<String>,
        /// Exit with status 1 when the consequence fails
        #[arg(long)]
        assert: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check every proved sequent against a battery of random models.
    Soundness {
        /// A file, or a directory of .mu and .json files
        path: PathBuf,
        #[arg(long, default_value_t = 200)]
        battery: usize,
        #[arg(long, env = "MUWB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Use a kernel without the empty-context check of [.]-introduction
        #[cfg(feature = "negative-control")]
        #[arg(long, hide = true)]
        weakened_kernel: bool,
    },
    /// Run the interactive session server.
    Serve {
        #[arg(long, default_value = serve::DEFAULT_BIND)]
        bind: String,
        #[arg(long, default_value_t = DEFAULT_MAX_SESSIONS)]
        max_sessions: usize,
        /// Speak the protocol on stdin/stdout instead of HTTP
        #[arg(long)]
        stdio: bool,
    },
}

fn emit(report: &Report, format: Format) -> ExitCode {
    let out = report.render(format);
    if format == Format::Text && report.status == muwb_cli::Status::Usage {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(report.status.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { path, format } => emit(&check::run(&path), format),
        Command::Mc {
            model,
            formula,
            hyps,
            vars,
            env,
            assert,
            format,
        } => {
            let q = mc::Query {
                formula,
                hyps,
                vars,
                env,
                assert,
            };
            emit(&mc::run(&model, &q), format)
        }
        Command::Soundness {
            path,
            battery,
            seed,
            format,
            #[cfg(feature = "negative-control")]
            weakened_kernel,
        } => {
            let lemmas = match input::load(&path) {
                Ok(l) => l,
                Err(e) => return emit(&Report::usage(e.to_string()), format),
            };
            #[allow(unused_mut)]
            let mut checker: input::Checker = muwb_core::kernel::check;
            #[cfg(feature = "negative-control")]
            if weakened_kernel {
                checker = muwb_core::kernel::check_skipping_box_i_context;
            }
            emit(&soundness::run(&lemmas, &Battery::new(battery, seed), checker), format)
        }
        Command::Serve {
            bind,
            max_sessions,
            stdio,
        } => run_server(&bind, max_sessions, stdio),
    }
}

fn run_server(bind: &str, max_sessions: usize, stdio: bool) -> ExitCode {
    let server = Arc::new(Server::new(max_sessions));
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return ExitCode::from(2);
        }
    };
    let result = runtime.block_on(async move {
        if stdio {
            return serve::serve_stdio(server).await;
        }
        let listener = match tokio::net::TcpListener::bind(bind).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind {bind}: {e}");
                std::process::exit(2);
            }
        };
        let addr = listener.local_addr()?;
        eprintln!("listening on http://{addr} (max {max_sessions} sessions)");
        serve::serve_http(listener, server).await
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
