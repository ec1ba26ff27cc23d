//! Command-line interface for training, evaluating, and inspecting
//! warped-linear classifiers.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use warplin::classifiers::{ClassifierKind, ClassifierSpec, DiscriminantCount};
use warplin::data::{synth_generate, Dataset, SynthKind};
use warplin::error::Error;
use warplin::eval::{accuracy, elasticity_grid, eval_report, export_trace};
use warplin::learning::{train, LossKind, TrainConfig, LR_FLOOR};
use warplin::model_io::{load_model, save_model};
use warplin::selfcheck;

#[derive(Parser)]
#[command(
    name = "warplin",
    about = "Warped-linear models for time series classification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier on a delimited label-first dataset file.
    Train(TrainCmd),
    /// Predict labels for a dataset with a saved model.
    Predict(PredictCmd),
    /// Stratified k-fold cross validation.
    Cv(CvCmd),
    /// Elasticity grid search by minimum training risk.
    Grid(GridCmd),
    /// Generate a synthetic two-dimensional dataset.
    Synth(SynthCmd),
    /// Run the built-in property and oracle suite.
    Verify(VerifyCmd),
    /// Pairwise comparison reports from an accuracy table.
    Report(ReportCmd),
}

#[derive(Args)]
struct TrainOpts {
    /// Classifier family: sm, wp, ep, or ml.
    #[arg(long, default_value = "ep")]
    kind: String,
    /// Weight-sequence length / weight-matrix columns / ML component count.
    #[arg(long, default_value_t = 5)]
    elasticity: usize,
    /// Loss: adaline, perceptron, margin_perceptron (optionally with a
    /// margin, e.g. "margin_perceptron:0.5"), hinge_svm,
    /// logistic, multinomial_logistic.
    #[arg(long, default_value = "multinomial_logistic")]
    loss: String,
    /// Weight-decay strength.
    #[arg(long)]
    lambda: Option<f64>,
    /// Band half-width constraint on warping paths.
    #[arg(long)]
    band: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_epochs: usize,
    #[arg(long, default_value_t = 100)]
    patience: usize,
    /// Skip the learning-rate search and use this rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Z-normalize every series before use.
    #[arg(long)]
    znorm: bool,
    /// Discriminant arrangement: "k" (one per class) or "1" (two-class
    /// single discriminant).
    #[arg(long, default_value = "k")]
    discriminants: String,
}

impl TrainOpts {
    fn config(&self) -> Result<TrainConfig, Error> {
        let loss: LossKind = self.loss.parse()?;
        let mut cfg = TrainConfig::new(self.elasticity, loss);
        if let Some(lambda) = self.lambda {
            cfg.lambda = lambda;
        }
        cfg.band = self.band;
        cfg.rng_seed = self.seed;
        cfg.max_epochs = self.max_epochs;
        cfg.patience = self.patience;
        cfg.lr_override = self.lr;
        Ok(cfg)
    }

    fn spec(&self) -> Result<ClassifierSpec, Error> {
        let kind: ClassifierKind = self.kind.parse()?;
        let discriminants = match self.discriminants.as_str() {
            "k" => DiscriminantCount::PerClass,
            "1" => DiscriminantCount::Single,
            other => {
                return Err(Error::InvalidShape(format!(
                    "discriminants must be \"1\" or \"k\", got {other:?}"
                )))
            }
        };
        Ok(ClassifierSpec {
            kind,
            discriminants,
        })
    }
}

#[derive(Args)]
struct TrainCmd {
    /// Training data file.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    opts: TrainOpts,
    /// Output directory for model.txt and trace.tsv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictCmd {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    znorm: bool,
    /// Output directory for predictions.tsv (optional).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvCmd {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    opts: TrainOpts,
    /// Output directory for cv.tsv (optional).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridCmd {
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated elasticity grid.
    #[arg(long, default_value = "1,2,3,4,5,7,10,15,20,25,30,35,40,45,50")]
    grid: String,
    #[command(flatten)]
    opts: TrainOpts,
    /// Output directory for grid.tsv and the winning model (optional).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthCmd {
    /// disk, ring3, grid9, or square2.
    #[arg(long = "synth-kind")]
    kind: String,
    #[arg(long = "n-per-class", default_value_t = 500)]
    n_per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the dataset file and its plot-data companion.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyCmd {
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct ReportCmd {
    /// Accuracy table: one row per classifier, name then tab-separated
    /// accuracies, identical dataset order in every row.
    #[arg(long)]
    accs: PathBuf,
    /// Output directory for winning.tsv, mpd.tsv, ranks.tsv.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(cmd) => cmd_train(cmd),
        Command::Predict(cmd) => cmd_predict(cmd),
        Command::Cv(cmd) => cmd_cv(cmd),
        Command::Grid(cmd) => cmd_grid(cmd),
        Command::Synth(cmd) => cmd_synth(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
        Command::Report(cmd) => cmd_report(cmd),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn load_data(path: &Path, znorm: bool) -> Result<Dataset, Error> {
    let ds = Dataset::load_ucr(path)?;
    Ok(if znorm { ds.znormalized() } else { ds })
}

fn cmd_train(cmd: TrainCmd) -> Result<ExitCode, Error> {
    let ds = load_data(&cmd.data, cmd.opts.znorm)?;
    let cfg = cmd.opts.config()?;
    let spec = cmd.opts.spec()?;
    let outcome = train(&cfg, &ds, spec)?;
    if outcome.learning_rate == LR_FLOOR {
        eprintln!("warning: learning-rate search hit the floor {LR_FLOOR}");
    }
    std::fs::create_dir_all(&cmd.out)?;
    save_model(&outcome.classifier, cmd.out.join("model.txt"))?;
    std::fs::write(cmd.out.join("trace.tsv"), export_trace(&outcome.trace))?;
    let train_acc = accuracy(&outcome.classifier, &ds, cfg.rng_seed)?;
    println!(
        "trained {} on {} ({} examples, {} classes)",
        spec.kind.name(),
        ds.name(),
        ds.len(),
        ds.num_classes()
    );
    println!(
        "learning rate {}  best risk {:.6} (epoch {})  train accuracy {:.2}%",
        outcome.learning_rate, outcome.best_risk, outcome.best_epoch, train_acc
    );
    println!("model written to {}", cmd.out.join("model.txt").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_predict(cmd: PredictCmd) -> Result<ExitCode, Error> {
    let model = load_model(&cmd.model)?;
    let ds = load_data(&cmd.data, cmd.znorm)?;
    // The tie-break stream is seeded per prediction; record the base seed so
    // the run can be reproduced from the log alone.
    let mut lines = format!("# seed: {}\nindex\tpredicted\tactual\n", cmd.seed);
    let mut correct = 0usize;
    for (i, (x, y)) in ds.examples().iter().enumerate() {
        let pred = model.predict_with_seed(x, cmd.seed.wrapping_add(i as u64))?;
        if pred == *y {
            correct += 1;
        }
        lines.push_str(&format!("{i}\t{pred}\t{y}\n"));
    }
    let acc = 100.0 * correct as f64 / ds.len() as f64;
    println!("accuracy {:.2}% on {} examples", acc, ds.len());
    if let Some(out) = cmd.out {
        std::fs::create_dir_all(&out)?;
        std::fs::write(out.join("predictions.tsv"), lines)?;
        println!(
            "predictions written to {}",
            out.join("predictions.tsv").display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cv(cmd: CvCmd) -> Result<ExitCode, Error> {
    let ds = load_data(&cmd.data, cmd.opts.znorm)?;
    let cfg = cmd.opts.config()?;
    let spec = cmd.opts.spec()?;
    let folds = ds.kfold_split(cmd.folds, cfg.rng_seed)?;
    let mut rows = String::from("fold\ttrain_risk\ttest_accuracy\n");
    let mut accs = Vec::with_capacity(folds.len());
    for (i, (train_ds, test_ds)) in folds.iter().enumerate() {
        let outcome = train(&cfg, train_ds, spec)?;
        let acc = accuracy(
            &outcome.classifier,
            test_ds,
            cfg.rng_seed.wrapping_add(i as u64),
        )?;
        rows.push_str(&format!("{i}\t{}\t{acc}\n", outcome.best_risk));
        println!("fold {i}: test accuracy {acc:.2}%");
        accs.push(acc);
    }
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    let std =
        (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64).sqrt();
    println!(
        "mean accuracy {mean:.2}% +- {std:.2} over {} folds",
        accs.len()
    );
    if let Some(out) = cmd.out {
        std::fs::create_dir_all(&out)?;
        std::fs::write(out.join("cv.tsv"), rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grid(cmd: GridCmd) -> Result<ExitCode, Error> {
    let ds = load_data(&cmd.data, cmd.opts.znorm)?;
    let cfg = cmd.opts.config()?;
    let spec = cmd.opts.spec()?;
    let grid: Vec<usize> = cmd
        .grid
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidShape(format!("bad elasticity token {t:?} in grid")))
        })
        .collect::<Result<_, _>>()?;
    let outcome = elasticity_grid(&cfg, &grid, &ds, spec)?;
    let mut rows = String::from("elasticity\tbest_risk\n");
    for (e, risk) in &outcome.risks {
        rows.push_str(&format!("{e}\t{risk}\n"));
        println!("elasticity {e}: best risk {risk:.6}");
    }
    println!("selected elasticity {}", outcome.best_elasticity);
    if let Some(out) = cmd.out {
        std::fs::create_dir_all(&out)?;
        std::fs::write(out.join("grid.tsv"), rows)?;
        save_model(&outcome.best.classifier, out.join("model.txt"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(cmd: SynthCmd) -> Result<ExitCode, Error> {
    let kind: SynthKind = cmd.kind.parse()?;
    let ds = synth_generate(kind, cmd.n_per_class, cmd.seed)?;
    std::fs::create_dir_all(&cmd.out)?;
    let mut data = String::new();
    let mut plot = String::from("x\ty\tlabel\n");
    for (x, y) in ds.examples() {
        let vals: Vec<String> = x.values().iter().map(f64::to_string).collect();
        data.push_str(&format!("{y},{}\n", vals.join(",")));
        plot.push_str(&format!("{}\t{}\t{y}\n", x.values()[0], x.values()[1]));
    }
    let data_path = cmd.out.join(format!("{}.txt", kind.name()));
    std::fs::write(&data_path, data)?;
    std::fs::write(cmd.out.join(format!("{}_plot.tsv", kind.name())), plot)?;
    println!(
        "wrote {} examples ({} classes) to {}",
        ds.len(),
        ds.num_classes(),
        data_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cmd: VerifyCmd) -> Result<ExitCode, Error> {
    let results = selfcheck::run_all(cmd.seed)?;
    let mut all_ok = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {} ({})", r.name, r.detail);
        all_ok &= r.passed;
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_report(cmd: ReportCmd) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&cmd.accs)?;
    let mut names = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or_default().to_string();
        let values: Vec<f64> = fields
            .map(|t| {
                t.trim().parse().map_err(|_| Error::ParseError {
                    line: no + 1,
                    detail: format!("bad accuracy token {t:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        if values.is_empty() {
            return Err(Error::ParseError {
                line: no + 1,
                detail: "row carries no accuracies".into(),
            });
        }
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::ShapeMismatch(format!(
                    "row {} has {} accuracies, expected {}",
                    no + 1,
                    values.len(),
                    first.len()
                )));
            }
        }
        names.push(name);
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    let accs =
        ndarray::Array2::from_shape_fn((rows.len(), rows[0].len()), |(i, j)| rows[i][j]);
    let report = eval_report(names, accs)?;
    let names = &report.classifier_names;
    let (w, a, ranks) = (
        &report.winning,
        &report.mean_percentage_difference,
        &report.ranks,
    );
    std::fs::create_dir_all(&cmd.out)?;

    let matrix_tsv = |m: &ndarray::Array2<f64>| {
        let mut out = String::from("classifier");
        for n in names {
            out.push('\t');
            out.push_str(n);
        }
        out.push('\n');
        for (i, n) in names.iter().enumerate() {
            out.push_str(n);
            for j in 0..names.len() {
                out.push_str(&format!("\t{}", m[(i, j)]));
            }
            out.push('\n');
        }
        out
    };
    std::fs::write(cmd.out.join("winning.tsv"), matrix_tsv(w))?;
    std::fs::write(cmd.out.join("mpd.tsv"), matrix_tsv(a))?;

    let mut rank_rows = String::from("classifier");
    for r in 1..=names.len() {
        rank_rows.push_str(&format!("\trank{r}"));
    }
    rank_rows.push_str("\tmean\tstd\n");
    for (i, n) in names.iter().enumerate() {
        rank_rows.push_str(n);
        for c in &ranks.counts[i] {
            rank_rows.push_str(&format!("\t{c}"));
        }
        rank_rows.push_str(&format!("\t{}\t{}\n", ranks.mean[i], ranks.std[i]));
    }
    std::fs::write(cmd.out.join("ranks.tsv"), rank_rows)?;
    println!("reports written to {}", cmd.out.display());
    for (i, n) in names.iter().enumerate() {
        println!("{n}: mean rank {:.2} +- {:.2}", ranks.mean[i], ranks.std[i]);
    }
    Ok(ExitCode::SUCCESS)
}
