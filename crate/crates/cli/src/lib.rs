//! `ahp` command-line front end.
//!
//! Exit codes are part of the interface:
//! 0 success, 1 domain defect, 2 usage or parse error, 3 inconsistent judgments.

pub mod output;
mod render;

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ahp_core::consistency::{estimate_random_index, RandomIndexTable};
use ahp_core::evaluate::{evaluate, Evaluation, EvaluationError, EvaluationOptions};
use ahp_core::store::{export_global_weights_csv, export_results, export_scores_csv, load_model, ExportFormat, ModelDocument, StoreError};
use ahp_core::synthesis::{leaf_weights, score_alternatives, sensitivity_scan, SensitivityQuery, SynthesisError};
use ahp_core::{validate_hierarchy, Method};

use output::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DEFECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// Environment variable supplying the default consistency-ratio threshold.
pub const CR_THRESHOLD_ENV: &str = "AHP_CR_THRESHOLD";

#[derive(Debug, Parser)]
#[command(name = "ahp", version, about = "Analytic hierarchy process decision engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Eigenvector,
    #[value(name = "geometric_mean", alias = "geometric-mean")]
    GeometricMean,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Eigenvector => Method::Eigenvector,
            MethodArg::GeometricMean => Method::GeometricMean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportTable {
    All,
    Weights,
    Scores,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Path to a `.ahp.json` model
    pub model: PathBuf,
    /// Priority derivation method (defaults to the model's setting)
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Consistency-ratio threshold; overrides the environment and the model
    #[arg(long, env = CR_THRESHOLD_ENV, value_parser = positive_f64)]
    pub cr_threshold: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model's structure and judgment completeness
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Local weights, consistency and global leaf weights
    Weights(ModelArgs),
    /// Consistency report for every judgment matrix
    Check(ModelArgs),
    /// Score and rank the alternatives
    Rank(ModelArgs),
    /// Sweep one criterion's weight and report rank reversals
    Sensitivity {
        #[command(flatten)]
        model: ModelArgs,
        /// Criterion whose local weight is varied
        #[arg(long)]
        node: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(2..))]
        steps: u32,
        /// Weight that must appear in the sweep (defaults to the current weight)
        #[arg(long)]
        weight: Option<f64>,
    },
    /// Monte-Carlo estimate of the random index next to the table constant
    Ri {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=10))]
        n: u32,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Export global weights and alternative scores
    Export {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "to", value_enum, default_value = "csv")]
        to: ExportKind,
        #[arg(long, value_enum, default_value = "all")]
        table: ExportTable,
        /// Write to a file instead of standard output
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for write-through `.ahp.json` persistence
        #[arg(long, env = "AHP_DATA_DIR")]
        data_dir: Option<PathBuf>,
        /// Disable permissive cross-origin headers
        #[arg(long)]
        no_cors: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Csv,
    Json,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// A command failure: exit code plus a diagnostic for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_USAGE, e.to_string())
    }
}

fn store_failure(path: &Path, e: StoreError) -> Failure {
    let code = match e {
        StoreError::Defects(_) | StoreError::Judgment { .. } => EXIT_DEFECT,
        _ => EXIT_USAGE,
    };
    Failure::new(code, format!("{}: {e}", path.display()))
}

fn evaluation_failure(e: EvaluationError) -> Failure {
    Failure::new(EXIT_DEFECT, e.to_string())
}

fn synthesis_failure(e: SynthesisError) -> Failure {
    Failure::new(EXIT_DEFECT, e.to_string())
}

fn read_model(path: &Path) -> Result<ModelDocument, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    load_model(&bytes).map_err(|e| store_failure(path, e))
}

fn options(doc: &mut ModelDocument, args: &ModelArgs, include_alternatives: bool) -> EvaluationOptions {
    if let Some(m) = args.method {
        doc.settings.method = m.into();
    }
    if let Some(t) = args.cr_threshold {
        doc.settings.cr_threshold = t;
    }
    EvaluationOptions { include_alternatives, ..EvaluationOptions::from_document(doc) }
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn consistency_code(eval: &Evaluation) -> i32 {
    if eval.all_consistent() {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    }
}

/// Runs one parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { model, format } => cmd_validate(&model, format, out),
        Command::Weights(args) => cmd_weights(&args, out, err),
        Command::Check(args) => cmd_check(&args, out, err),
        Command::Rank(args) => cmd_rank(&args, out, err),
        Command::Sensitivity { model, node, steps, weight } => {
            cmd_sensitivity(&model, &node, steps as usize, weight, out)
        }
        Command::Ri { n, samples, seed, format } => cmd_ri(n as usize, samples as usize, seed, format, out),
        Command::Export { model, to, table, output } => cmd_export(&model, to, table, output.as_deref(), out, err),
        Command::Serve { bind, port, data_dir, no_cors } => {
            let config = ahp_service::ServiceConfig { addr: SocketAddr::new(bind, port), data_dir, cors: !no_cors };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(ahp_service::serve(config))?;
            Ok(EXIT_OK)
        }
    }
}

pub fn cmd_validate(path: &Path, format: OutputFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let (defects, incomplete) = match load_model(&bytes) {
        Ok(doc) => {
            debug_assert!(validate_hierarchy(&doc.hierarchy).is_empty());
            (Vec::new(), doc.incomplete_nodes(true))
        }
        Err(StoreError::Defects(d)) => (d.iter().map(ToString::to_string).collect(), Vec::new()),
        Err(e @ StoreError::Judgment { .. }) => (vec![e.to_string()], Vec::new()),
        Err(e) => return Err(store_failure(path, e)),
    };
    let valid = defects.is_empty() && incomplete.is_empty();
    let report = ValidateOutput { schema: VALIDATE_SCHEMA.into(), valid, defects, incomplete };
    match format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::validate(out, path, &report)?,
    }
    Ok(if valid { EXIT_OK } else { EXIT_DEFECT })
}

pub fn cmd_weights(args: &ModelArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut doc = read_model(&args.model)?;
    let opts = options(&mut doc, args, false);
    let eval = evaluate(&doc, &opts).map_err(evaluation_failure)?;
    let leaves = leaf_weights(&eval.model).map_err(synthesis_failure)?;
    let report = WeightsOutput {
        schema: WEIGHTS_SCHEMA.into(),
        method: opts.settings.method.to_string(),
        cr_threshold: opts.cr_threshold,
        consistent: eval.all_consistent(),
        nodes: render::node_outputs(&doc, &eval),
        global_weights: leaves,
    };
    match args.format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::weights(out, &doc, &report)?,
    }
    warn_inconsistent(err, &eval)?;
    Ok(consistency_code(&eval))
}

fn warn_inconsistent(err: &mut dyn Write, eval: &Evaluation) -> std::io::Result<()> {
    for n in eval.inconsistent() {
        writeln!(err, "warning: node {:?} is inconsistent (CR {:.4} > {})", n.node, n.report.cr, n.report.threshold)?;
    }
    Ok(())
}

pub fn cmd_check(args: &ModelArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut doc = read_model(&args.model)?;
    let opts = options(&mut doc, args, true);
    let eval = evaluate(&doc, &opts).map_err(evaluation_failure)?;
    let report = CheckOutput {
        schema: CHECK_SCHEMA.into(),
        cr_threshold: opts.cr_threshold,
        consistent: eval.all_consistent(),
        nodes: eval.nodes.iter().map(|n| CheckEntry { node: n.node.clone(), report: n.report.clone() }).collect(),
    };
    match args.format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::check(out, &doc, &report)?,
    }
    warn_inconsistent(err, &eval)?;
    Ok(consistency_code(&eval))
}

fn most_suitable(result: &ahp_core::SynthesisResult) -> Option<String> {
    let top = result.top()?;
    let tied = result.ties.iter().any(|t| t.iter().any(|id| id == top));
    (!tied).then(|| top.to_string())
}

pub fn cmd_rank(args: &ModelArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut doc = read_model(&args.model)?;
    let opts = options(&mut doc, args, true);
    let eval = evaluate(&doc, &opts).map_err(evaluation_failure)?;
    let result = score_alternatives(&eval.model).map_err(synthesis_failure)?;
    let report = RankOutput {
        schema: RANK_SCHEMA.into(),
        consistent: eval.all_consistent(),
        most_suitable: most_suitable(&result),
        result,
    };
    match args.format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::rank(out, &report)?,
    }
    warn_inconsistent(err, &eval)?;
    Ok(consistency_code(&eval))
}

pub fn cmd_sensitivity(
    args: &ModelArgs,
    node: &str,
    steps: usize,
    weight: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut doc = read_model(&args.model)?;
    let opts = options(&mut doc, args, true);
    let eval = evaluate(&doc, &opts).map_err(evaluation_failure)?;
    let h = &eval.model.hierarchy;
    let (parent, idx) = h
        .parent_of(node)
        .ok_or_else(|| Failure::new(EXIT_DEFECT, format!("unknown node {node:?}")))?;
    if h.children_of(parent).map_or(0, <[_]>::len) < 2 {
        return Err(synthesis_failure(SynthesisError::OnlyChild(node.to_string())));
    }
    let current = eval.model.local[parent].get(idx);
    let query = SensitivityQuery { target_node: node.to_string(), new_weight: weight.unwrap_or(current) };
    let scan = sensitivity_scan(&eval.model, &query, steps).map_err(|e| match e {
        SynthesisError::WeightOutOfRange(_) => Failure::new(EXIT_USAGE, e.to_string()),
        e => synthesis_failure(e),
    })?;
    let report = SensitivityOutput { schema: SENSITIVITY_SCHEMA.into(), steps, scan };
    match args.format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::sensitivity(out, &doc, &report)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_ri(n: usize, samples: usize, seed: u64, format: OutputFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    let estimate = estimate_random_index(n, samples, seed).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let table = RandomIndexTable::get(n).expect("estimator range lies inside the table");
    let report = RiOutput { schema: RI_SCHEMA.into(), n, samples, seed, estimate, table, difference: estimate - table };
    match format {
        OutputFormat::Json => write_json(out, &report)?,
        OutputFormat::Text => render::ri(out, &report)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_export(
    args: &ModelArgs,
    to: ExportKind,
    table: ExportTable,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut doc = read_model(&args.model)?;
    let opts = options(&mut doc, args, true);
    let eval = evaluate(&doc, &opts).map_err(evaluation_failure)?;
    let result = score_alternatives(&eval.model).map_err(synthesis_failure)?;
    let bytes = match (to, table) {
        (ExportKind::Csv, ExportTable::Weights) => export_global_weights_csv(&result),
        (ExportKind::Csv, ExportTable::Scores) => export_scores_csv(&result),
        (ExportKind::Csv, ExportTable::All) => export_results(&result, ExportFormat::Csv),
        (ExportKind::Json, _) => export_results(&result, ExportFormat::Json),
    };
    match output {
        Some(path) => std::fs::write(path, bytes)?,
        None => out.write_all(&bytes)?,
    }
    warn_inconsistent(err, &eval)?;
    Ok(consistency_code(&eval))
}
