//! Command implementations behind the `tesex` binary.

pub mod eval;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ingest::{load_project, IngestError, Level, ProjectModel};
use crate::pipeline::{self, Analysis, Options};
use crate::synthesis::{to_markdown, ExampleSet};
use crate::usagegraph::build_usage_graph;

pub use eval::{evaluate, EvalReport, ReferenceDataset};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("unknown test {0}")]
    UnknownTest(String),
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Ingest(IngestError::EmptyProject(_)) | CliError::NotADirectory(_) => 2,
            CliError::Schema { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Md,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dump {
    CallGraph,
    Effects,
    Tests,
    /// All usage graphs, or only the named test's.
    Graph(Option<String>),
}

impl std::str::FromStr for Dump {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "callgraph" => Ok(Dump::CallGraph),
            "effects" => Ok(Dump::Effects),
            "tests" => Ok(Dump::Tests),
            "graph" => Ok(Dump::Graph(None)),
            _ => match s.strip_prefix("graph:") {
                Some(id) if !id.is_empty() => Ok(Dump::Graph(Some(id.to_string()))),
                _ => Err(format!("unknown dump `{s}`, expected callgraph|effects|tests|graph[:TestId]")),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub project_root: PathBuf,
    pub src_dir: PathBuf,
    pub test_dir: PathBuf,
    pub out_dir: PathBuf,
    pub format: Format,
    pub dumps: BTreeSet<Dump>,
    pub inline_fixtures: bool,
}

impl AnalysisConfig {
    pub fn new(project_root: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            project_root: project_root.into(),
            src_dir: "src/main/java".into(),
            test_dir: "src/test/java".into(),
            out_dir: out_dir.into(),
            format: Format::Both,
            dumps: BTreeSet::new(),
            inline_fixtures: false,
        }
    }
}

fn write(path: PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Loads the project and logs model diagnostics as `LEVEL file:line message`.
pub fn load(config: &AnalysisConfig) -> Result<ProjectModel, CliError> {
    let src = config.project_root.join(&config.src_dir);
    if !src.is_dir() {
        return Err(CliError::NotADirectory(src));
    }
    let model = load_project(&src, &config.project_root.join(&config.test_dir))?;
    for d in &model.diagnostics {
        let level = match d.level {
            Level::Error => log::Level::Error,
            Level::Warn => log::Level::Warn,
            Level::Info => log::Level::Info,
        };
        log::log!(level, "{}:{} {}", d.file.display(), d.line, d.message);
    }
    Ok(model)
}

fn project_name(config: &AnalysisConfig) -> String {
    let root = config.project_root.canonicalize().unwrap_or_else(|_| config.project_root.clone());
    root.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })
}

/// Test ids may be given qualified or by simple class name.
fn matches_test(id: &str, wanted: &str) -> bool {
    id == wanted || id.ends_with(&format!(".{wanted}"))
}

fn dot_file_name(test_id: &str) -> String {
    let safe: String = test_id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    format!("graph_{safe}.dot")
}

fn write_dumps(config: &AnalysisConfig, model: &ProjectModel, a: &Analysis) -> Result<(), CliError> {
    let out = &config.out_dir;
    for d in &config.dumps {
        match d {
            Dump::CallGraph => write(out.join("callgraph.dot"), &a.callgraph.to_dot(model))?,
            Dump::Effects => write(out.join("effects.tsv"), &a.effects.to_tsv(model))?,
            Dump::Tests => write(out.join("tests.json"), &to_json(&a.tests)?)?,
            Dump::Graph(None) => {
                for (id, g) in &a.graphs {
                    write(out.join(dot_file_name(id)), &g.to_dot(model))?;
                }
            }
            Dump::Graph(Some(wanted)) => {
                let test = a.tests.iter().find(|t| matches_test(&t.id, wanted)).ok_or_else(|| CliError::UnknownTest(wanted.clone()))?;
                let dot = match a.graphs.get(&test.id) {
                    Some(g) => g.to_dot(model),
                    None => build_usage_graph(model, &a.effects, test).to_dot(model),
                };
                write(out.join(dot_file_name(&test.id)), &dot)?;
            }
        }
    }
    Ok(())
}

/// Full pipeline; writes the focal report, the examples and any requested dumps.
pub fn cmd_analyze(config: &AnalysisConfig) -> Result<Analysis, CliError> {
    let model = load(config)?;
    let opts = Options { project_name: project_name(config), inline_fixtures: config.inline_fixtures };
    let a = pipeline::run(&model, &opts);
    for e in &a.test_errors {
        log::warn!("{e}");
    }
    for d in &a.focal.diagnostics {
        log::warn!("{d}");
    }
    create_out(&config.out_dir)?;
    write(config.out_dir.join("focal_report.json"), &to_json(&a.focal)?)?;
    if config.format != Format::Md {
        write(config.out_dir.join("examples.json"), &to_json(&a.examples)?)?;
    }
    if config.format != Format::Json {
        write(config.out_dir.join("examples.md"), &to_markdown(&a.examples))?;
    }
    write_dumps(config, &model, &a)?;
    Ok(a)
}

/// Focal detection only; writes `focal_report.json`.
pub fn cmd_focal(config: &AnalysisConfig) -> Result<crate::focal::FocalReport, CliError> {
    let model = load(config)?;
    let cg = crate::callgraph::build_call_graph(&model);
    let acc = crate::effects::collect_accesses(&model, &cg);
    let effects = crate::effects::classify_effects(&model, &cg, &acc);
    let (tests, errors) = crate::testmodel::analyze_tests(&model);
    for e in &errors {
        log::warn!("{e}");
    }
    let report = crate::focal::focal_report(&model, &effects, &tests);
    create_out(&config.out_dir)?;
    write(config.out_dir.join("focal_report.json"), &to_json(&report)?)?;
    Ok(report)
}

fn read_json(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema { path: path.to_path_buf(), message: e.to_string() })
}

/// A reference file is either a dataset of entries or a previously
/// generated `examples.json`.
pub fn read_reference(path: &Path) -> Result<ReferenceDataset, CliError> {
    let schema = |message: String| CliError::Schema { path: path.to_path_buf(), message };
    let v = read_json(path)?;
    let ds = if v.get("examples").is_some() {
        let set: ExampleSet = serde_json::from_value(v).map_err(|e| schema(e.to_string()))?;
        ReferenceDataset::from_examples(&set)
    } else {
        serde_json::from_value(v).map_err(|e| schema(e.to_string()))?
    };
    ds.validate().map_err(|e| schema(e.to_string()))?;
    Ok(ds)
}

pub fn read_examples(path: &Path) -> Result<ExampleSet, CliError> {
    let v = read_json(path)?;
    serde_json::from_value(v).map_err(|e| CliError::Schema { path: path.to_path_buf(), message: e.to_string() })
}

pub fn cmd_eval(generated: &Path, reference: &Path) -> Result<EvalReport, CliError> {
    let set = read_examples(generated)?;
    let reference = read_reference(reference)?;
    Ok(evaluate(&set, &reference))
}

/// `TESEX_LOG` selects the level; records print as `LEVEL message`.
pub fn init_logging() {
    use std::io::Write;
    let env = env_logger::Env::new().filter_or("TESEX_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format(|buf, record| writeln!(buf, "{} {}", record.level(), record.args()))
        .try_init();
}
