//! `oselm` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oselm::data::{parse_dataset, Format, FormatSpec, LabelEncoding, LabelPosition};
use oselm::harness::{
    run_kfold, run_stream_benchmark, train_model, DataSource, EvaluationReport, RunConfig,
};
use oselm::metrics::multi_label_metrics;
use oselm::persist::{load_model, save_model};
use oselm::types::dataset_stats;
use oselm::{Activation, Dataset, Error, ErrorCategory, FallbackPolicy};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "oselm",
    version,
    about = "Online universal classifier for binary, multi-class and multi-label data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model on a whole file and save it.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        net: NetArgs,
        /// Where to write the model.
        #[arg(long, visible_alias = "model")]
        out: PathBuf,
    },
    /// Classify every sample of a file with a saved model.
    Predict {
        /// Model written by `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "dense")]
        format: Format,
        #[arg(long, default_value = "trailing")]
        label_position: LabelPosition,
        #[arg(long, default_value = "class")]
        label_encoding: LabelEncoding,
        #[arg(long, default_value = "empty")]
        fallback: FallbackPolicy,
        /// Write predictions as JSON here instead of printing them.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-fold cross-validation.
    Kfold {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Single held-out split with timing and an accuracy trajectory.
    StreamBench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Number of evaluation points along the stream.
        #[arg(long, default_value_t = 20)]
        checkpoints: usize,
    },
    /// Print sample count, dimensions, label cardinality and density.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print what a saved model contains.
    InspectModel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    /// dense, arff or sparse.
    #[arg(long, default_value = "dense")]
    format: Format,
    /// Number of labels L.
    #[arg(long)]
    labels: usize,
    /// leading or trailing (dense files).
    #[arg(long, default_value = "trailing")]
    label_position: LabelPosition,
    /// class or indicators (dense files).
    #[arg(long, default_value = "class")]
    label_encoding: LabelEncoding,
    /// Feature dimension of sparse files; defaults to the largest index seen.
    #[arg(long)]
    feature_dim: Option<usize>,
}

impl DataArgs {
    fn spec(&self) -> FormatSpec {
        let mut spec = FormatSpec::new(self.format, self.labels)
            .with_position(self.label_position)
            .with_encoding(self.label_encoding);
        if let Some(n) = self.feature_dim {
            spec = spec.with_feature_dim(n);
        }
        spec
    }

    fn load(&self) -> oselm::Result<Dataset> {
        parse_dataset(&self.data, &self.spec()).map_err(|e| with_path(e, &self.data))
    }
}

#[derive(Args)]
struct NetArgs {
    /// Hidden neurons.
    #[arg(long, default_value_t = 20)]
    hidden: usize,
    /// sigmoid, tanh, hardlimit or sine.
    #[arg(long, default_value = "sigmoid")]
    activation: Activation,
    #[arg(long, default_value_t = oselm::elm::DEFAULT_RIDGE)]
    ridge: f64,
    /// Initial block size; defaults to twice the hidden count.
    #[arg(long)]
    init_block: Option<usize>,
    /// Samples per sequential update.
    #[arg(long, default_value_t = 1)]
    chunk: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "empty")]
    fallback: FallbackPolicy,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Seed of the sample shuffle; defaults to `--seed`.
    #[arg(long)]
    shuffle_seed: Option<u64>,
    /// Run folds on all cores.
    #[arg(long)]
    parallel: bool,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_config(data: &DataArgs, net: &NetArgs, run: Option<&RunArgs>) -> RunConfig {
    let mut cfg = RunConfig::new(net.hidden);
    cfg.source = Some(DataSource {
        path: data.data.clone(),
        format: data.spec(),
    });
    cfg.activation = net.activation;
    cfg.ridge = net.ridge;
    cfg.seed = net.seed;
    cfg.init_block = net.init_block;
    cfg.chunk_size = net.chunk;
    cfg.fallback = net.fallback;
    cfg.shuffle_seed = net.seed;
    if let Some(run) = run {
        cfg.folds = run.folds;
        cfg.repetitions = run.repetitions;
        cfg.shuffle_seed = run.shuffle_seed.unwrap_or(net.seed);
        cfg.parallel = run.parallel;
        cfg.output = run.out.clone();
    }
    cfg
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    }
}

fn emit_report(report: &EvaluationReport, out: Option<&Path>) -> oselm::Result<()> {
    print!("{}", report.render_table());
    if let Some(path) = out {
        let text = report
            .to_json()
            .map_err(|e| Error::Integrity(e.to_string()))?;
        std::fs::write(path, text)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> oselm::Result<()> {
    match cli.command {
        Command::Train { data, net, out } => {
            let d = data.load()?;
            let cfg = run_config(&data, &net, None);
            let (saved, elapsed) = train_model(&d, &cfg)?;
            save_model(&saved, &out)?;
            println!(
                "trained on {} samples ({}) in {:.5}s; model written to {}",
                saved.model.samples_seen(),
                d.effective_type(),
                elapsed.as_secs_f64(),
                out.display()
            );
        }
        Command::Predict {
            model,
            data,
            format,
            label_position,
            label_encoding,
            fallback,
            out,
        } => {
            let saved = load_model(&model).map_err(|e| with_path(e, &model))?;
            let cfg = saved.model.config();
            let spec = FormatSpec::new(format, cfg.output_dim)
                .with_position(label_position)
                .with_encoding(label_encoding)
                .with_feature_dim(cfg.input_dim);
            let d = parse_dataset(&data, &spec).map_err(|e| with_path(e, &data))?;
            let preds = saved.predict(d.samples(), fallback)?;
            let name = |j: &usize| {
                saved
                    .label_names
                    .get(*j)
                    .cloned()
                    .unwrap_or_else(|| j.to_string())
            };
            let rows: Vec<_> = preds
                .iter()
                .map(|p| {
                    json!({
                        "labels": p.labels.iter().map(name).collect::<Vec<_>>(),
                        "type": p.ctype.to_string(),
                        "ct": p.ct,
                        "fallback": p.fallback_used,
                        "raw": p.raw,
                    })
                })
                .collect();
            match &out {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&rows)
                        .map_err(|e| Error::Integrity(e.to_string()))?;
                    std::fs::write(path, text)?;
                }
                None => {
                    for (i, p) in preds.iter().enumerate() {
                        let labels: Vec<String> = p.labels.iter().map(name).collect();
                        println!(
                            "{i}\t{}\t{}{}",
                            labels.join(","),
                            p.ctype,
                            if p.fallback_used { "\tfallback" } else { "" }
                        );
                    }
                }
            }
            let truth: Vec<_> = d
                .samples()
                .iter()
                .filter_map(|s| s.labels.as_ref().map(|l| l.positives()))
                .collect();
            if truth.len() == preds.len() {
                let predicted: Vec<_> = preds.iter().map(|p| p.labels.clone()).collect();
                let m = multi_label_metrics(&truth, &predicted, cfg.output_dim)?;
                let exact = truth.iter().zip(&predicted).filter(|(t, p)| t == p).count() as f64
                    / truth.len() as f64;
                eprintln!(
                    "{} samples: exact match {:.4}, hamming loss {:.4}, f1 {:.4}",
                    truth.len(),
                    exact,
                    m.hamming_loss,
                    m.f1
                );
            }
        }
        Command::Kfold { data, net, run } => {
            let d = data.load()?;
            let cfg = run_config(&data, &net, Some(&run));
            emit_report(&run_kfold(&d, &cfg)?, run.out.as_deref())?;
        }
        Command::StreamBench {
            data,
            net,
            run,
            checkpoints,
        } => {
            let d = data.load()?;
            let mut cfg = run_config(&data, &net, Some(&run));
            cfg.checkpoints = checkpoints;
            emit_report(&run_stream_benchmark(&d, &cfg)?, run.out.as_deref())?;
        }
        Command::Stats { data, json } => {
            let d = data.load()?;
            let st = dataset_stats(&d)?;
            if json {
                let v = json!({
                    "samples": st.samples,
                    "feature_dim": d.feature_dim(),
                    "label_count": d.label_count(),
                    "classification_type": d.effective_type().to_string(),
                    "cardinality": st.cardinality,
                    "density": st.density,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v)
                        .map_err(|e| Error::Integrity(e.to_string()))?
                );
            } else {
                println!("samples       {}", st.samples);
                println!("features      {}", d.feature_dim());
                println!("labels        {}", d.label_count());
                println!("type          {}", d.effective_type());
                println!("cardinality   {:.4}", st.cardinality);
                println!("density       {:.4}", st.density);
            }
        }
        Command::InspectModel { model, json } => {
            let saved = load_model(&model).map_err(|e| with_path(e, &model))?;
            let c = saved.model.config();
            let declared = saved
                .declared_type
                .map_or("undeclared".to_string(), |t| t.to_string());
            if json {
                let v = json!({
                    "n_hidden": c.n_hidden,
                    "activation": c.activation.to_string(),
                    "input_dim": c.input_dim,
                    "output_dim": c.output_dim,
                    "ridge": c.ridge,
                    "seed": c.seed,
                    "samples_seen": saved.model.samples_seen(),
                    "declared_type": declared,
                    "label_names": saved.label_names,
                    "normalized": saved.normalizer.is_some(),
                    "beta_norm": saved.model.beta().norm(),
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v)
                        .map_err(|e| Error::Integrity(e.to_string()))?
                );
            } else {
                println!("hidden        {} ({})", c.n_hidden, c.activation);
                println!("inputs        {}", c.input_dim);
                println!("outputs       {}", c.output_dim);
                println!("ridge         {:e}", c.ridge);
                println!("seed          {}", c.seed);
                println!("samples seen  {}", saved.model.samples_seen());
                println!("type          {declared}");
                println!("labels        {}", saved.label_names.join(","));
                println!(
                    "normalizer    {}",
                    if saved.normalizer.is_some() {
                        "yes"
                    } else {
                        "no"
                    }
                );
                println!("|beta|        {:.6}", saved.model.beta().norm());
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Configuration => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Numerical => 4,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
