//! Command-line front end; every subcommand is a thin wrapper over the
//! library.

use clap::{Args, Parser, Subcommand};
use cspsel::eval::{
    baseline, evaluate, parse_summary_csv, report_tables, write_details_csv, write_summary_csv,
    BaselineKind, EnsembleChooser, EvaluationReport,
};
use cspsel::features::{
    extract, instance_seed, parse_features_csv, write_features_csv, FeatureSet,
};
use cspsel::learners::Learner;
use cspsel::parse::parse_instance;
use cspsel::perf::{
    label_matrix, parse_labels_csv, parse_runtime_csv, write_labels_csv, SolverSet,
};
use cspsel::pipeline::{
    describe_ensemble, load_ensemble, save_ensemble, train_meta, Ensemble, LabeledRow,
};
use cspsel::synth::{synth_generate, write_planted_csv, SynthConfig, SynthMode};
use std::collections::HashMap;
use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cspsel",
    about = "Decide per instance which alldifferent implementation to use",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature vectors from a directory of instance files
    Extract(ExtractArgs),
    /// Label instances from a runtime matrix
    Label(LabelArgs),
    /// Train the majority-vote meta-classifier
    Train(TrainArgs),
    /// Predict solvers for a features file with a trained ensemble
    Predict(PredictArgs),
    /// Evaluate baselines (and optionally an ensemble) by misclassification penalty
    Evaluate(EvaluateArgs),
    /// Generate synthetic instances and runtimes with a planted rule
    Synth(SynthArgs),
    /// Merge evaluation summaries into a classifier-by-condition table
    Report(ReportArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Directory containing instance files (read in sorted filename order)
    #[arg(long)]
    instances: PathBuf,
    /// Output features CSV
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_feature_set, default_value = "full")]
    feature_set: FeatureSet,
    /// Seed for tightness sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct LabelArgs {
    /// Runtime matrix CSV
    #[arg(long)]
    runtimes: PathBuf,
    /// Solvers file (names, naive/default roles, timeout)
    #[arg(long)]
    solvers: PathBuf,
    /// Output labels CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Features CSV (training instances)
    #[arg(long)]
    features: PathBuf,
    /// Labels CSV
    #[arg(long)]
    labels: PathBuf,
    /// Solvers file
    #[arg(long)]
    solvers: PathBuf,
    /// Output ensemble file
    #[arg(long)]
    out: PathBuf,
    /// Cross-validation folds
    #[arg(long, default_value_t = 3)]
    folds: usize,
    /// Comma-separated learner bank
    #[arg(long, default_value = "zeror,oner,nbayes,knn,tree", value_parser = parse_learners)]
    learners: LearnerBank,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep all duplicated copies of an instance in one fold
    #[arg(long)]
    strict_folds: bool,
    /// Skip cost-based instance duplication (all instances weigh equally)
    #[arg(long)]
    no_duplication: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained ensemble file
    #[arg(long)]
    ensemble: PathBuf,
    /// Features CSV
    #[arg(long)]
    features: PathBuf,
    /// Output predictions CSV (instance,solver)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Features CSV of the evaluation instances
    #[arg(long)]
    features: PathBuf,
    /// Runtime matrix CSV of the evaluation instances
    #[arg(long)]
    runtimes: PathBuf,
    /// Solvers file
    #[arg(long)]
    solvers: PathBuf,
    /// Comma-separated baselines to evaluate
    #[arg(long, default_value = "oracle,anti-oracle,default,random")]
    baselines: String,
    /// Optional trained ensemble to evaluate alongside the baselines
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Output summary CSV (one row per classifier)
    #[arg(long)]
    out: PathBuf,
    /// Optional per-instance details CSV
    #[arg(long)]
    details: Option<PathBuf>,
    /// Seed for the random baseline
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory (creates instances/, runtimes.csv, solvers.txt, planted.csv)
    #[arg(long)]
    out_dir: PathBuf,
    /// Number of instances
    #[arg(long)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// planted | cost-study
    #[arg(long, default_value = "planted", value_parser = parse_mode)]
    mode: SynthMode,
    /// Planted winner's advantage in seconds
    #[arg(long, default_value_t = 10.0)]
    margin: f64,
    /// Instance name prefix
    #[arg(long, default_value = "inst")]
    prefix: String,
}

#[derive(Args)]
struct ReportArgs {
    /// Evaluation summary CSVs, one per condition
    #[arg(long, required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Condition labels matching --inputs (defaults to file stems)
    #[arg(long, num_args = 0..)]
    labels: Vec<String>,
    /// Output table CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone)]
struct LearnerBank(Vec<Learner>);

fn parse_feature_set(s: &str) -> Result<FeatureSet, String> {
    FeatureSet::from_name(s).ok_or_else(|| format!("unknown feature set `{s}` (full|cheap)"))
}

fn parse_mode(s: &str) -> Result<SynthMode, String> {
    SynthMode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (planted|cost-study)"))
}

fn parse_learners(s: &str) -> Result<LearnerBank, String> {
    let mut bank = Vec::new();
    for name in s.split(',') {
        let name = name.trim();
        let learner = Learner::from_name(name)
            .ok_or_else(|| format!("unknown learner `{name}` (zeror|oner|nbayes|knn|tree)"))?;
        bank.push(learner);
    }
    if bank.is_empty() {
        return Err("learner bank is empty".into());
    }
    Ok(LearnerBank(bank))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cspsel: error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<String, Box<dyn Error>> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn write(path: &Path, content: &str) -> Result<(), Box<dyn Error>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()).into())
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    match cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Label(args) => cmd_label(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_extract(args: ExtractArgs) -> Result<(), Box<dyn Error>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.instances)
        .map_err(|e| format!("cannot read {}: {e}", args.instances.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(format!("no instance files in {}", args.instances.display()).into());
    }
    let mut vectors = Vec::with_capacity(paths.len());
    for path in &paths {
        let text = read(path)?;
        let inst = parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        vectors.push(extract(&inst, args.feature_set, instance_seed(args.seed, &inst.name)));
    }
    write(&args.out, &write_features_csv(&vectors, args.feature_set))?;
    let total: f64 = vectors.iter().map(|v| v.extract_seconds).sum();
    println!(
        "extracted {} {} vectors in {:.3}s total ({:.4}s/instance) -> {}",
        vectors.len(),
        args.feature_set.name(),
        total,
        total / vectors.len() as f64,
        args.out.display()
    );
    Ok(())
}

fn cmd_label(args: LabelArgs) -> Result<(), Box<dyn Error>> {
    let solvers = SolverSet::parse(&read(&args.solvers)?)?;
    let matrix = parse_runtime_csv(&read(&args.runtimes)?, &solvers)?;
    let labels = label_matrix(&matrix);
    let dont_know = labels
        .iter()
        .filter(|(_, l)| l.class == cspsel::perf::LabelClass::DontKnow)
        .count();
    write(&args.out, &write_labels_csv(&labels, &solvers))?;
    println!(
        "labeled {} instances ({} don't-know) -> {}",
        labels.len(),
        dont_know,
        args.out.display()
    );
    Ok(())
}

fn load_labeled_rows(
    features_path: &Path,
    labels_path: &Path,
    solvers: &SolverSet,
) -> Result<(FeatureSet, Vec<LabeledRow>), Box<dyn Error>> {
    let (set, vectors) = parse_features_csv(&read(features_path)?)?;
    let labels = parse_labels_csv(&read(labels_path)?, solvers)?;
    let by_name: HashMap<&str, &cspsel::perf::Label> =
        labels.iter().map(|(n, l)| (n.as_str(), l)).collect();
    let mut rows = Vec::with_capacity(vectors.len());
    for fv in &vectors {
        let label = by_name
            .get(fv.instance.as_str())
            .ok_or_else(|| format!("no label for instance `{}`", fv.instance))?;
        rows.push(LabeledRow {
            instance: fv.instance.clone(),
            values: fv.values.clone(),
            label: label.class,
            cost: label.cost,
        });
    }
    Ok((set, rows))
}

fn cmd_train(args: TrainArgs) -> Result<(), Box<dyn Error>> {
    let solvers = SolverSet::parse(&read(&args.solvers)?)?;
    let (set, mut rows) = load_labeled_rows(&args.features, &args.labels, &solvers)?;
    if args.no_duplication {
        // neutralise the cost model: every instance appears exactly once
        for r in &mut rows {
            r.cost = 0.0;
        }
    }
    let ensemble = train_meta(
        &rows,
        &args.learners.0,
        args.folds,
        args.seed,
        args.strict_folds,
        &solvers,
        set,
    )?;
    write(&args.out, &save_ensemble(&ensemble))?;
    println!(
        "trained {} -> {}",
        describe_ensemble(&ensemble),
        args.out.display()
    );
    Ok(())
}

fn load_ensemble_file(path: &Path) -> Result<Ensemble, Box<dyn Error>> {
    Ok(load_ensemble(&read(path)?)?)
}

fn check_schema(ensemble: &Ensemble, set: FeatureSet) -> Result<(), Box<dyn Error>> {
    if ensemble.feature_set != set {
        return Err(format!(
            "ensemble was trained on {} features but the file provides {}",
            ensemble.feature_set.name(),
            set.name()
        )
        .into());
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), Box<dyn Error>> {
    let ensemble = load_ensemble_file(&args.ensemble)?;
    let (set, vectors) = parse_features_csv(&read(&args.features)?)?;
    check_schema(&ensemble, set)?;
    let mut out = String::from("instance,solver\n");
    for fv in &vectors {
        let solver = ensemble.predict(&fv.values)?;
        out.push_str(&format!(
            "{},{}\n",
            fv.instance, ensemble.solvers.names[solver]
        ));
    }
    write(&args.out, &out)?;
    println!(
        "predicted {} instances -> {}",
        vectors.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Box<dyn Error>> {
    let solvers = SolverSet::parse(&read(&args.solvers)?)?;
    let matrix = parse_runtime_csv(&read(&args.runtimes)?, &solvers)?;
    let (set, vectors) = parse_features_csv(&read(&args.features)?)?;

    let mut reports: Vec<EvaluationReport> = Vec::new();
    for name in args.baselines.split(',').filter(|s| !s.trim().is_empty()) {
        let kind = BaselineKind::parse(name.trim(), args.seed)
            .ok_or_else(|| format!("unknown baseline `{name}`"))?;
        reports.push(evaluate(&baseline(kind, &matrix), &vectors, &matrix)?);
    }
    if let Some(path) = &args.ensemble {
        let ensemble = load_ensemble_file(path)?;
        check_schema(&ensemble, set)?;
        let chooser = EnsembleChooser {
            ensemble: &ensemble,
            name: "meta".into(),
        };
        reports.push(evaluate(&chooser, &vectors, &matrix)?);
    }

    write(&args.out, &write_summary_csv(&reports))?;
    if let Some(details) = &args.details {
        let mut text = String::new();
        for (i, r) in reports.iter().enumerate() {
            let csv = write_details_csv(r, &solvers);
            if i == 0 {
                text.push_str(&csv);
            } else {
                // skip the repeated header
                text.push_str(csv.split_once('\n').map(|x| x.1).unwrap_or(""));
            }
        }
        write(details, &text)?;
    }
    for r in &reports {
        println!(
            "{:<12} total penalty {:>12.3}s over {} instances ({} don't-know excluded), overhead {:.3}s features + {:.3}s predict",
            r.classifier,
            r.total_penalty,
            r.instances_included(),
            r.dont_know_excluded,
            r.total_feature_seconds,
            r.total_predict_seconds,
        );
    }
    println!("summary -> {}", args.out.display());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Box<dyn Error>> {
    let mut config = SynthConfig::new(args.instances, args.seed, args.mode);
    config.margin_seconds = args.margin;
    config.name_prefix = args.prefix.clone();
    let data = synth_generate(&config);

    let instance_dir = args.out_dir.join("instances");
    fs::create_dir_all(&instance_dir)?;
    for inst in &data.instances {
        write(
            &instance_dir.join(format!("{}.csp", inst.name)),
            &inst.render(),
        )?;
    }
    write(&args.out_dir.join("runtimes.csv"), &data.matrix.render_csv())?;
    write(&args.out_dir.join("solvers.txt"), &data.solvers.render())?;
    write(
        &args.out_dir.join("planted.csv"),
        &write_planted_csv(&data.planted, &data.solvers),
    )?;
    println!(
        "generated {} {} instances (seed {}) -> {}",
        data.instances.len(),
        config.mode.name(),
        config.seed,
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Box<dyn Error>> {
    if !args.labels.is_empty() && args.labels.len() != args.inputs.len() {
        return Err(format!(
            "{} labels for {} inputs",
            args.labels.len(),
            args.inputs.len()
        )
        .into());
    }
    let mut conditions = Vec::new();
    for (i, path) in args.inputs.iter().enumerate() {
        let label = args.labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("condition{i}"))
        });
        conditions.push((label, parse_summary_csv(&read(path)?)?));
    }
    let table = report_tables(&conditions)?;
    write(&args.out, &table.to_csv())?;
    print!("{table}");
    println!("table -> {}", args.out.display());
    Ok(())
}
