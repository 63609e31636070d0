use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use groupcut::compendium::{catalog, EntryStatus};
use groupcut::{extremality_test, minimality_test, oracle_check, OracleVerdict, Rational, Status};
use groupcut_cli::family::Family;
use groupcut_cli::report::{run_report, to_json};
use groupcut_cli::search::search_random;
use groupcut_cli::svg::{plot_complex, plot_function};
use groupcut_cli::{constraints_help, exit, read_file, resolve, write_file, CliError};

/// Cut-generating functions for the one-dimensional infinite group problem.
#[derive(Parser)]
#[command(name = "groupcut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FunctionArgs {
    /// Catalog name, e.g. gmic.
    name: Option<String>,
    /// Parameter as key=value, e.g. f=1/5. Repeatable.
    #[arg(short, long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// JSON file of breakpoint records instead of a catalog name.
    #[arg(long, conflicts_with = "name")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Construct a function and print its breakpoint records.
    Show(FunctionArgs),
    /// Minimality test; exit 0 when minimal, 1 otherwise.
    Minimality {
        #[command(flatten)]
        function: FunctionArgs,
        /// Use this f instead of detecting it.
        #[arg(long)]
        f: Option<Rational>,
    },
    /// Extremality test; exit 0 Extreme, 1 NotExtreme, 2 Inconclusive.
    Extremality(FunctionArgs),
    /// Finite-group restriction oracle; exit 0 extreme, 1 not extreme.
    Oracle(FunctionArgs),
    /// Write an SVG diagram.
    Plot {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        out: PathBuf,
        /// The complex with additive faces (default).
        #[arg(long, conflicts_with = "function_plot")]
        complex: bool,
        /// The function graph, with the perturbation witness if not extreme.
        #[arg(long = "function", id = "function_plot")]
        function_plot: bool,
    },
    /// Full JSON report.
    Report {
        #[command(flatten)]
        function: FunctionArgs,
        /// Output path, or - for stdout.
        #[arg(long)]
        json: PathBuf,
        /// Include wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Classify random members of a parametric family.
    SearchRandom {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn color_enabled() -> bool {
    std::env::var_os("GROUPCUT_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn status_line(label: &str, good: bool) {
    if color_enabled() {
        let code = if good { "32" } else { "31" };
        eprintln!("\x1b[{code}m{label}\x1b[0m");
    } else {
        eprintln!("{label}");
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    let mut out = std::io::stdout().lock();
    if serde_json::to_writer_pretty(&mut out, value).is_ok() {
        writeln!(out).ok();
    }
}

fn run(cmd: Command) -> Result<i32, CliError> {
    let load = |a: &FunctionArgs| resolve(a.name.as_deref(), &a.params, a.file.as_deref());
    match cmd {
        Command::List { json } => {
            let entries = catalog();
            if json {
                print_json(&entries);
            } else {
                for e in entries {
                    let status = match e.status {
                        EntryStatus::Constructible => "constructible",
                        EntryStatus::KnownAbsentStub => "stub",
                    };
                    let params: Vec<String> = e.parameters.iter().map(|(p, c)| format!("{p}: {c}")).collect();
                    println!("{:<40} {:<14} {}", e.name, status, params.join("; "));
                }
            }
            Ok(0)
        }
        Command::Show(a) => {
            let (_, pi) = load(&a)?;
            print_json(&pi);
            Ok(0)
        }
        Command::Minimality { function, f } => {
            let (_, pi) = load(&function)?;
            let report = minimality_test(&pi, f.as_ref());
            print_json(&report);
            status_line(if report.is_minimal { "minimal" } else { "not minimal" }, report.is_minimal);
            Ok(if report.is_minimal { 0 } else { 1 })
        }
        Command::Extremality(a) => {
            let (_, pi) = load(&a)?;
            let verdict = extremality_test(&pi)?;
            print_json(&verdict);
            status_line(&format!("{:?}", verdict.status), verdict.status == Status::Extreme);
            Ok(verdict.status.exit_code())
        }
        Command::Oracle(a) => {
            let (_, pi) = load(&a)?;
            let report = oracle_check(&pi)?;
            print_json(&report);
            let extreme = report.verdict == OracleVerdict::Extreme;
            status_line(if extreme { "extreme" } else { "not extreme" }, extreme);
            Ok(if extreme { 0 } else { 1 })
        }
        Command::Plot {
            function,
            out,
            complex: _,
            function_plot,
        } => {
            let (_, pi) = load(&function)?;
            let svg = if function_plot {
                match extremality_test(&pi).ok().and_then(|v| v.witness) {
                    Some(w) => plot_function(&[
                        ("pi", &pi),
                        ("pi1 = pi + perturbation", &w.pi1),
                        ("pi2 = pi - perturbation", &w.pi2),
                        ("perturbation", &w.pi1.add_scaled(&Rational::from_integer(-1), &pi)),
                    ]),
                    None => plot_function(&[("pi", &pi)]),
                }
            } else {
                plot_complex(&pi)
            };
            write_file(&out, &svg)?;
            Ok(0)
        }
        Command::Report { function, json, timings } => {
            let (input, pi) = load(&function)?;
            let text = to_json(&run_report(input, &pi, timings));
            if json.as_os_str() == "-" {
                print!("{text}");
            } else {
                write_file(&json, &text)?;
            }
            Ok(0)
        }
        Command::SearchRandom { family, count, seed } => {
            let family = Family::from_json(&read_file(&family)?)?;
            print_json(&search_random(&family, count, seed));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let help = constraints_help();
    let mut command = Cli::command();
    for name in ["show", "minimality", "extremality", "oracle", "plot", "report", "list"] {
        command = command.mut_subcommand(name, |c| c.after_help(help.clone()));
    }
    let cli = match command.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            e.print().ok();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
