use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orbitlock::endo::DEFAULT_END_CAP;
use orbitlock::group::DEFAULT_AUT_CAP;

mod analyze;
mod dump;
mod verify;

#[derive(Parser)]
#[command(name = "orbitlock", version, about = "Automorphism and orbit-structure analysis of finite posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Format {
    /// Machine-readable output.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output.
    #[arg(long)]
    text: bool,
}

impl Format {
    fn json_or(self, default_json: bool) -> bool {
        self.json || (default_json && !self.text)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis pipeline on one poset (JSON by default).
    Analyze {
        /// Poset in `.pos` format.
        path: PathBuf,
        /// Dictated orbit structure in `.dos` format; defaults to the natural orbits.
        #[arg(long, value_name = "FILE")]
        structure: Option<PathBuf>,
        /// Analyze the dual poset (the structure keeps its labels).
        #[arg(long)]
        dual: bool,
        /// Largest poset for automorphism search (at most the library ceiling).
        #[arg(long, value_name = "N", default_value_t = DEFAULT_AUT_CAP)]
        cap_aut: usize,
        /// Largest poset whose endomorphisms are counted exactly; larger ones get a flagged bound.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_END_CAP)]
        cap_end: usize,
        /// Add the generation time to the report.
        #[arg(long)]
        timestamps: bool,
        #[command(flatten)]
        format: Format,
    },
    /// Run a property suite exhaustively up to a size bound.
    Verify {
        /// One of lemmas-core, prune, bounds, catalog, ratios.
        suite: String,
        /// Size bound; its meaning depends on the suite.
        n_max: usize,
        /// Worker threads.
        #[arg(long, env = "ORBITLOCK_JOBS")]
        jobs: Option<usize>,
        #[command(flatten)]
        format: Format,
    },
    /// Dump the forbidden-configuration catalog with computed statistics.
    Catalog {
        /// Largest width of the height-1 max-locked family.
        max_w: usize,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_END_CAP)]
        cap_end: usize,
        #[command(flatten)]
        format: Format,
    },
    /// Stream isomorph-free posets or flexible tight orbit unions of one size.
    Enumerate {
        kind: EnumerateKind,
        n: usize,
        /// Only posets of at most this width.
        #[arg(long)]
        max_width: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumerateKind {
    Posets,
    Unions,
}

/// Why a command stopped; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    Verification(String),
    Invariant(String),
    Parse(String),
    Cap(String),
    /// The reader closed stdout; not an error.
    Closed,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Invariant(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Cap(_) => 4,
            Failure::Closed => 0,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Invariant(m) | Failure::Parse(m) | Failure::Cap(m) => m,
            Failure::Closed => "",
        }
    }
}

impl From<orbitlock::Error> for Failure {
    fn from(e: orbitlock::Error) -> Self {
        use orbitlock::Error as E;
        match e {
            E::CapExceeded { .. } => Failure::Cap(e.to_string()),
            E::Parse { .. }
            | E::CycleDetected(_)
            | E::IndexOutOfRange { .. }
            | E::NotAnAntichainPartition(_)
            | E::UnknownSuite(_) => Failure::Parse(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Parse(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { path, structure, dual, cap_aut, cap_end, timestamps, format } => {
            let options = analyze::Options { dual, cap_aut, cap_end, timestamps };
            let pos = read_file(&path)?;
            let dos = structure.as_deref().map(read_file).transpose()?;
            let report = analyze::analyze(&pos, dos.as_deref(), &options)?;
            if format.json_or(true) {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("values serialize"))?;
            } else {
                write!(out, "{}", report.text)?;
            }
            if report.violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Invariant(format!("consistency checks failed: {}", report.violations.join("; "))))
            }
        }
        Command::Verify { suite, n_max, jobs, format } => {
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
            let summary = verify::run_suite(&suite, n_max, jobs)?;
            if format.json_or(false) {
                writeln!(out, "{}", serde_json::to_string_pretty(&summary.to_json()).expect("values serialize"))?;
            } else {
                write!(out, "{}", summary.to_text())?;
            }
            if summary.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!("suite {suite} reported failures")))
            }
        }
        Command::Catalog { max_w, cap_end, format } => dump::catalog(max_w, cap_end, format.json_or(false), out),
        Command::Enumerate { kind, n, max_width } => match kind {
            EnumerateKind::Posets => dump::enumerate_posets(n, max_width, out),
            EnumerateKind::Unions => dump::enumerate_unions(n, out),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors; bad arguments are
            // parse failures.
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(()) => match flushed {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
            _ => ExitCode::SUCCESS,
        },
        Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
