//! The `mlnn` subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mlnn_core::data::{Dataset, LabelSet};
use mlnn_core::landscape::{landscape_grid, Fixture, GridRange, OUTPUTS};
use mlnn_core::network::{Activation, LossConfig, LossKind};
use mlnn_core::train::{select_learning_rate, train, TrainError};

use crate::config::RunConfig;
use crate::svmlight::{read_svmlight, write_svmlight, Shape};
use crate::vocab::{read_documents, Vocabulary};
use crate::{dense, logs, model_file, report};

#[derive(Debug, Parser)]
#[command(
    name = "mlnn",
    version,
    about = "Multi-label classification with a single-hidden-layer network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a network and its threshold predictor.
    Train(Box<TrainArgs>),
    /// Score a dataset with a saved model and report all measures.
    Evaluate(EvaluateArgs),
    /// Write the cost surface of the two-weight toy network as CSV.
    Landscape(LandscapeArgs),
    /// Turn tokenized documents into tf-idf svmlight data.
    Vectorize(VectorizeArgs),
    /// Split a dataset in two at random.
    Split(SplitArgs),
}

macro_rules! config_flags {
    ($($key:ident => $help:literal),* $(,)?) => {
        /// Every configuration key is also a flag and overrides the file.
        #[derive(Debug, Args)]
        pub struct TrainArgs {
            /// `key = value` configuration file.
            #[arg(long)]
            pub config: Option<PathBuf>,
            $(
                #[arg(long = stringify!($key), value_name = "VALUE", help = $help)]
                pub $key: Option<String>,
            )*
        }

        impl TrainArgs {
            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$key {
                        out.push((stringify!($key), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

config_flags!(
    loss => "ce (sigmoid outputs) or pwe (tanh outputs) [default: ce]",
    weighting => "unit or inverse_cardinality [default: unit for ce, inverse_cardinality for pwe]",
    hidden_units => "Hidden layer width [default: 1000]",
    hidden_activation => "relu, tanh or sigmoid [default: relu]",
    dropout => "Hidden-unit dropout rate in [0, 1) [default: 0.5]",
    optimizer => "sgd, momentum or adagrad [default: adagrad]",
    eta0 => "Base learning rate; a comma list selects the best by validation rank loss [default: 0.01]",
    momentum => "Momentum coefficient [default: 0.9]",
    epochs => "Passes over the training set [default: 10]",
    max_updates => "Update budget, or none [default: none]",
    batch_size => "Examples per update [default: 1]",
    eval_every => "Validate every this many updates [default: 1000]",
    seed => "Seed for initialization, shuffling and dropout [default: 0]",
    lambda => "Ridge penalty of the threshold predictor [default: 1]",
    valid_fraction => "Share of the training file held out when no valid path is given [default: 0.1]",
    dim => "Feature count, when the data has no header",
    label_count => "Label count; required for dense CSV",
    train => "Training data (.csv for dense, svmlight otherwise)",
    valid => "Validation data",
    test => "Test data, evaluated after training",
    model => "Model output path",
    report => "Test report path; CSV if the name ends in .csv",
    log => "Run log CSV path",
);

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Report destination; CSV if the name ends in `.csv`, text otherwise.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[arg(long, default_value = "ce")]
    pub loss: String,
    #[arg(long = "hidden_activation", default_value = "tanh")]
    pub hidden_activation: String,
    /// `lo:hi:steps`
    #[arg(long, default_value = "-10:10:50", allow_hyphen_values = true)]
    pub w1: String,
    #[arg(long, default_value = "-10:10:50", allow_hyphen_values = true)]
    pub w2: String,
    /// Value of the three fixed hidden-to-output weights.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Relevant outputs, comma-separated.
    #[arg(long, default_value = "0")]
    pub relevant: String,
    #[arg(long = "plateau_tol", default_value_t = 1e-3)]
    pub plateau_tol: f64,
    #[arg(long = "plateau_excess", default_value_t = 0.1)]
    pub plateau_excess: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VectorizeArgs {
    /// Tokenized documents, `labels<TAB>tokens` per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Fit the vocabulary on the input and write it, instead of reading it.
    #[arg(long)]
    pub fit: bool,
    #[arg(long = "max_features")]
    pub max_features: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Share of examples that goes to `--first`.
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub first: PathBuf,
    #[arg(long)]
    pub second: PathBuf,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long = "label_count")]
    pub label_count: Option<usize>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads svmlight data, or dense CSV when the file name ends in `.csv`.
pub fn load_dataset(path: &Path, shape: Shape) -> Result<Dataset> {
    let text = read_text(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let data = if is_csv {
        let l = shape
            .label_count
            .ok_or_else(|| anyhow!("{}: dense CSV needs label_count", path.display()))?;
        dense::read_dense_csv(&text, l)?
    } else {
        read_svmlight(&text, shape)?
    };
    if let Some(d) = shape.dim.filter(|&d| d != data.dim()) {
        bail!(
            "{}: expected {d} features, found {}",
            path.display(),
            data.dim()
        );
    }
    Ok(data)
}

fn run_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => {
            RunConfig::parse(&read_text(p)?).with_context(|| format!("in {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    for (k, v) in args.overrides() {
        cfg.set(k, v).map_err(|e| anyhow!("--{k}: {e}"))?;
    }
    let cfg = cfg.finish()?;
    let train_path = cfg
        .paths
        .train
        .as_deref()
        .ok_or_else(|| anyhow!("no train path given"))?;
    let full = load_dataset(
        train_path,
        Shape {
            dim: cfg.dim,
            label_count: cfg.label_count,
        },
    )?;
    let same = Shape {
        dim: Some(full.dim()),
        label_count: Some(full.label_count()),
    };
    let (train_set, valid_set) = match &cfg.paths.valid {
        Some(p) => (full, load_dataset(p, same)?),
        None => full.split(1.0 - cfg.valid_fraction, cfg.train.seed)?,
    };
    let result = match &cfg.eta0_grid {
        Some(grid) => select_learning_rate(&cfg.train, grid, &train_set, &valid_set),
        None => train(&cfg.train, &train_set, &valid_set).map(|o| (cfg.train.eta0, o)),
    };
    let (eta0, outcome) = match result {
        Ok(r) => r,
        Err(TrainError::Diverged {
            updates,
            reason,
            checkpoint,
        }) => {
            if let Some(p) = &cfg.paths.model {
                let ckpt = p.with_extension("checkpoint");
                let model = mlnn_core::train::Model {
                    params: *checkpoint,
                    hidden_activation: cfg.train.hidden_activation,
                    loss: cfg.train.loss,
                    threshold: None,
                };
                model_file::save(&ckpt, &model)?;
                bail!(
                    "{reason} at update {updates}; last good parameters in {}",
                    ckpt.display()
                );
            }
            bail!("{reason} at update {updates}");
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &cfg.paths.model {
        model_file::save(p, &outcome.model)?;
    }
    if let Some(p) = &cfg.paths.log {
        write_text(p, &logs::write_run_log(&outcome.log))?;
    }
    writeln!(out, "eta0 = {eta0}")?;
    writeln!(out, "updates = {}", outcome.updates)?;
    writeln!(out, "selected_at = {}", outcome.selected_at)?;
    writeln!(out, "skipped_examples = {}", outcome.skipped_examples)?;
    if let Some(p) = &cfg.paths.test {
        let test = load_dataset(p, same)?;
        let r = outcome.model.evaluate(&test)?;
        emit_report(&r, cfg.paths.report.as_deref(), out)?;
    }
    Ok(())
}

fn emit_report(
    r: &mlnn_core::metrics::EvaluationReport,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let text = report::to_text(r);
    out.write_all(text.as_bytes())?;
    if let Some(p) = path {
        let is_csv = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        write_text(p, &if is_csv { report::to_csv(r) } else { text })?;
    }
    Ok(())
}

fn run_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let model = model_file::load(&args.model)
        .with_context(|| format!("loading {}", args.model.display()))?;
    let dims = model.params.dims();
    let test = load_dataset(
        &args.test,
        Shape {
            dim: Some(dims.input),
            label_count: Some(dims.labels),
        },
    )?;
    let r = model.evaluate(&test)?;
    emit_report(&r, args.report.as_deref(), out)
}

fn parse_range(s: &str) -> Result<GridRange> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        bail!("range {s:?} is not lo:hi:steps");
    };
    Ok(GridRange::new(lo.parse()?, hi.parse()?, steps.parse()?)?)
}

fn run_landscape(args: &LandscapeArgs, out: &mut dyn Write) -> Result<()> {
    let kind =
        LossKind::from_name(&args.loss).ok_or_else(|| anyhow!("unknown loss {:?}", args.loss))?;
    let act = Activation::from_name(&args.hidden_activation)
        .ok_or_else(|| anyhow!("unknown activation {:?}", args.hidden_activation))?;
    let relevant = args
        .relevant
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<usize>, _>>()?;
    let fixture = Fixture {
        x: args.x,
        y: LabelSet::new(OUTPUTS, relevant)?,
        c: args.c,
    };
    let grid = landscape_grid(
        parse_range(&args.w1)?,
        parse_range(&args.w2)?,
        LossConfig::of_kind(kind),
        act,
        &fixture,
    )?;
    let csv = logs::write_landscape(&grid);
    let plateaus = grid
        .plateau_cells(args.plateau_tol, args.plateau_excess)
        .len();
    match &args.output {
        Some(p) => {
            write_text(p, &csv)?;
            writeln!(out, "cells = {}", grid.cost.len())?;
            writeln!(out, "plateau_cells = {plateaus}")?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn run_vectorize(args: &VectorizeArgs, out: &mut dyn Write) -> Result<()> {
    let docs = read_documents(&read_text(&args.input)?)?;
    let vocab = if args.fit {
        let v = Vocabulary::fit(&docs, args.max_features)?;
        write_text(&args.vocab, &v.to_text())?;
        v
    } else {
        Vocabulary::from_text(&read_text(&args.vocab)?)?
    };
    let data = vocab.vectorize(&docs)?;
    write_text(&args.output, &write_svmlight(&data))?;
    writeln!(
        out,
        "documents = {}\nfeatures = {}\nlabels = {}",
        data.len(),
        data.dim(),
        data.label_count()
    )?;
    Ok(())
}

fn run_split(args: &SplitArgs, out: &mut dyn Write) -> Result<()> {
    let data = load_dataset(
        &args.input,
        Shape {
            dim: args.dim,
            label_count: args.label_count,
        },
    )?;
    let (a, b) = data.split(args.fraction, args.seed)?;
    write_text(&args.first, &write_svmlight(&a))?;
    write_text(&args.second, &write_svmlight(&b))?;
    writeln!(out, "first = {}\nsecond = {}", a.len(), b.len())?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Train(a) => run_train(a, out),
        Command::Evaluate(a) => run_evaluate(a, out),
        Command::Landscape(a) => run_landscape(a, out),
        Command::Vectorize(a) => run_vectorize(a, out),
        Command::Split(a) => run_split(a, out),
    }
}
