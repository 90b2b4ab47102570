use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tesex::cli::{self, AnalysisConfig, CliError, Dump, Format};

#[derive(Parser)]
#[command(name = "tesex", version, about = "Focal methods and usage examples from JUnit tests")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Md,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Detect focal methods and synthesize usage examples.
    Analyze {
        #[arg(long)]
        project: PathBuf,
        #[arg(long, default_value = "src/main/java")]
        src: PathBuf,
        #[arg(long, default_value = "src/test/java")]
        tests: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: FormatArg,
        /// callgraph | effects | tests | graph[:TestId]; repeatable.
        #[arg(long = "dump")]
        dumps: Vec<Dump>,
        /// Prepend setUp statements to examples that use fixture fields.
        #[arg(long)]
        inline_fixtures: bool,
    },
    /// Write only the focal method report.
    Focal {
        #[arg(long)]
        project: PathBuf,
        #[arg(long, default_value = "src/main/java")]
        src: PathBuf,
        #[arg(long, default_value = "src/test/java")]
        tests: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score generated examples against a reference dataset.
    Eval {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.cmd {
        Cmd::Analyze { project, src, tests, out, format, dumps, inline_fixtures } => {
            let mut config = AnalysisConfig::new(project, out);
            config.src_dir = src;
            config.test_dir = tests;
            config.format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Md => Format::Md,
                FormatArg::Both => Format::Both,
            };
            config.dumps = dumps.into_iter().collect();
            config.inline_fixtures = inline_fixtures;
            let a = cli::cmd_analyze(&config)?;
            println!("{} examples written to {}", a.examples.examples.len(), config.out_dir.display());
        }
        Cmd::Focal { project, src, tests, out } => {
            let mut config = AnalysisConfig::new(project, out);
            config.src_dir = src;
            config.test_dir = tests;
            let r = cli::cmd_focal(&config)?;
            println!("{} tests written to {}", r.tests.len(), config.out_dir.join("focal_report.json").display());
        }
        Cmd::Eval { generated, reference } => {
            let report = cli::cmd_eval(&generated, &reference)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    cli::init_logging();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ERROR {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
