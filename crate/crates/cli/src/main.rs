use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use transvect_cli::{run, Command, Format, GenKind, JobConfig, Profile};

#[derive(Parser)]
#[command(name = "transvect", version, about = "Groups generated by transvections over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Generator file: {"field":"p^f","generators":[{"v":…,"phi":…} | {"matrix":…}]}
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Field as "p^f" (checked against the input file)
    #[arg(long)]
    field: Option<String>,
    /// Enumeration cap (also TRANSVECT_BUDGET_ELEMENTS)
    #[arg(long)]
    budget_elements: Option<usize>,
    /// Cap on q^n for projective scans
    #[arg(long)]
    budget_projective: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Fmt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall time in the report
    #[arg(long)]
    timing: bool,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prof {
    Full,
    Transvections,
}

#[derive(Subcommand)]
enum Cmd {
    /// Graph, irreducibility, density, defining field and forms
    Analyze(Common),
    /// Type of the generated group
    Classify(Common),
    /// Certificate with words in the generators
    Certify(Common),
    /// Cayley diameter and distance histogram
    Diameter {
        #[command(flatten)]
        common: Common,
        /// Alias of --budget-elements
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, value_enum, default_value = "full")]
        profile: Prof,
        /// Matrix rows as JSON, e.g. "[[1,0],[1,1]]"; emits a minimal word
        #[arg(long)]
        witness: Option<String>,
        /// Meet-in-the-middle search for the witness
        #[arg(long)]
        bidirectional: bool,
    },
    /// Standard generator files
    Gen {
        #[command(flatten)]
        common: Common,
        /// sl, su3, sp, o, full-sl, full-sp, full-su, full-o+, full-o-, monomial, symmetric
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Transvective splitting of a vector, or a word for a group element
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        element: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, command) = match cli.command {
        Cmd::Analyze(c) => (c, Ok(Command::Analyze)),
        Cmd::Classify(c) => (c, Ok(Command::Classify)),
        Cmd::Certify(c) => (c, Ok(Command::Certify)),
        Cmd::Diameter {
            mut common,
            cap,
            profile,
            witness,
            bidirectional,
        } => {
            common.budget_elements = common.budget_elements.or(cap);
            let profile = match profile {
                Prof::Full => Profile::Full,
                Prof::Transvections => Profile::Transvections,
            };
            (
                common,
                Ok(Command::Diameter {
                    profile,
                    witness,
                    bidirectional,
                }),
            )
        }
        Cmd::Gen { common, kind, n, a, m } => {
            let k = GenKind::parse(&kind).map(|kind| Command::Gen { kind, n, a, m });
            (common, k)
        }
        Cmd::Decompose { common, vector, element } => (common, Ok(Command::Decompose { vector, element })),
    };
    let command = match command {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let job = JobConfig {
        field: common.field,
        input: common.input,
        command,
        budget_elements: common.budget_elements,
        budget_projective: common.budget_projective,
        format: match common.format {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
        },
        seed: common.seed,
        timing: common.timing,
    };
    match run(&job) {
        Ok(report) => {
            let text = report.render();
            match common.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
