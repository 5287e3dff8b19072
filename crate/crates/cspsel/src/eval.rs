//! Baseline classifiers, misclassification-penalty evaluation and report
//! tables.
//!
//! A chooser maps a feature vector to a solver index. Baselines either look
//! the instance up in the runtime matrix (oracle, anti-oracle) or ignore it
//! (default, seeded random); the trained ensemble is wrapped behind the same
//! interface. Evaluation sums misclassification penalties over all
//! instances with at least one solved solver and reports decision overhead
//! (feature time, predict time) separately, never silently added to
//! penalties.

use crate::features::{FeatureSet, FeatureVector};
use crate::perf::{misclassification_penalty, PerfError, RuntimeMatrix, SolverSet};
use crate::pipeline::Ensemble;
use crate::learners::LearnError;
use crate::util::{fnv1a64, fnv1a64_extend, format_float, sig4};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("features and runtimes cover different instances (e.g. `{example}` is {side})")]
    InstanceMismatch { example: String, side: &'static str },
    #[error("no classifiers to report")]
    NoClassifiers,
    #[error("summary file line {line}: {msg}")]
    SummarySyntax { line: usize, msg: String },
    #[error(transparent)]
    Perf(#[from] PerfError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

/// Anything that picks a solver for an instance's feature vector.
pub trait Chooser {
    fn name(&self) -> &str;
    fn choose(&self, fv: &FeatureVector) -> Result<usize, EvalError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Oracle,
    AntiOracle,
    Default,
    Random { seed: u64 },
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Oracle => "oracle",
            BaselineKind::AntiOracle => "anti_oracle",
            BaselineKind::Default => "default",
            BaselineKind::Random { .. } => "random",
        }
    }

    pub fn parse(s: &str, seed: u64) -> Option<BaselineKind> {
        match s {
            "oracle" => Some(BaselineKind::Oracle),
            "anti-oracle" | "anti_oracle" => Some(BaselineKind::AntiOracle),
            "default" => Some(BaselineKind::Default),
            "random" => Some(BaselineKind::Random { seed }),
            _ => None,
        }
    }
}

/// Hypothetical classifier built from the runtime matrix itself: the oracle
/// picks the fastest solved solver, the anti-oracle the worst possible
/// choice, `default` always the default implementation and `random` a
/// uniformly random solver (deterministic per seed and instance name).
pub struct Baseline<'a> {
    kind: BaselineKind,
    runtimes: &'a RuntimeMatrix,
}

pub fn baseline(kind: BaselineKind, runtimes: &RuntimeMatrix) -> Baseline<'_> {
    Baseline { kind, runtimes }
}

impl Baseline<'_> {
    fn row(&self, instance: &str) -> Result<&[crate::perf::RunRecord], EvalError> {
        self.runtimes
            .row(instance)
            .ok_or_else(|| EvalError::InstanceMismatch {
                example: instance.to_string(),
                side: "missing from the runtime matrix",
            })
    }
}

impl Chooser for Baseline<'_> {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn choose(&self, fv: &FeatureVector) -> Result<usize, EvalError> {
        let solvers = &self.runtimes.solvers;
        match self.kind {
            BaselineKind::Default => Ok(solvers.default),
            BaselineKind::Random { seed } => {
                let h = fnv1a64_extend(fnv1a64(&seed.to_le_bytes()), fv.instance.as_bytes());
                let mut rng = ChaCha8Rng::seed_from_u64(h);
                Ok(rng.random_range(0..solvers.len()))
            }
            BaselineKind::Oracle => {
                let row = self.row(&fv.instance)?;
                let fastest = (0..row.len())
                    .filter(|&i| row[i].solved())
                    .min_by(|&a, &b| {
                        row[a]
                            .cpu_seconds
                            .partial_cmp(&row[b].cpu_seconds)
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .ok_or(PerfError::NoSolvedSolver(fv.instance.clone()))?;
                Ok(fastest)
            }
            BaselineKind::AntiOracle => {
                let row = self.row(&fv.instance)?;
                let worst = (0..row.len())
                    .max_by(|&a, &b| {
                        let pa = misclassification_penalty(row, a, solvers).unwrap_or(0.0);
                        let pb = misclassification_penalty(row, b, solvers).unwrap_or(0.0);
                        pa.partial_cmp(&pb).unwrap().then(b.cmp(&a))
                    })
                    .expect("solver set is non-empty");
                Ok(worst)
            }
        }
    }
}

/// A trained ensemble behind the chooser interface.
pub struct EnsembleChooser<'a> {
    pub ensemble: &'a Ensemble,
    pub name: String,
}

impl Chooser for EnsembleChooser<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn choose(&self, fv: &FeatureVector) -> Result<usize, EvalError> {
        Ok(self.ensemble.predict(&fv.values)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub instance: String,
    pub chosen: usize,
    pub penalty: f64,
    pub feature_seconds: f64,
    pub predict_seconds: f64,
}

/// Per-classifier evaluation result: total penalty over the included
/// instances plus separately-accounted decision overhead.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub classifier: String,
    pub feature_set: FeatureSet,
    pub total_penalty: f64,
    pub dont_know_excluded: usize,
    pub outcomes: Vec<InstanceOutcome>,
    pub total_feature_seconds: f64,
    pub total_predict_seconds: f64,
}

impl EvaluationReport {
    /// Penalty-plus-overhead view (feature and predict time included).
    pub fn total_with_overhead(&self) -> f64 {
        self.total_penalty + self.total_feature_seconds + self.total_predict_seconds
    }

    pub fn instances_included(&self) -> usize {
        self.outcomes.len()
    }
}

/// Evaluates one chooser over a feature/runtime corpus. The two inputs must
/// cover exactly the same instance set; instances no solver solved are
/// excluded and counted.
pub fn evaluate(
    chooser: &dyn Chooser,
    features: &[FeatureVector],
    runtimes: &RuntimeMatrix,
) -> Result<EvaluationReport, EvalError> {
    let feature_names: std::collections::HashSet<&str> =
        features.iter().map(|f| f.instance.as_str()).collect();
    for name in runtimes.instance_names() {
        if !feature_names.contains(name.as_str()) {
            return Err(EvalError::InstanceMismatch {
                example: name.clone(),
                side: "missing from the features",
            });
        }
    }
    if feature_names.len() != runtimes.instance_names().len() {
        let missing = features
            .iter()
            .find(|f| runtimes.row(&f.instance).is_none())
            .expect("some feature instance lacks a runtime row");
        return Err(EvalError::InstanceMismatch {
            example: missing.instance.clone(),
            side: "missing from the runtime matrix",
        });
    }

    let solvers = &runtimes.solvers;
    let mut outcomes = Vec::new();
    let mut dont_know_excluded = 0;
    let mut total_penalty = 0.0;
    let mut total_feature_seconds = 0.0;
    let mut total_predict_seconds = 0.0;
    for fv in features {
        let row = runtimes.row(&fv.instance).expect("coverage checked");
        if row.iter().all(|r| !r.solved()) {
            dont_know_excluded += 1;
            continue;
        }
        let started = Instant::now();
        let chosen = chooser.choose(fv)?;
        let predict_seconds = started.elapsed().as_secs_f64();
        let penalty = misclassification_penalty(row, chosen, solvers)?;
        total_penalty += penalty;
        total_feature_seconds += fv.extract_seconds;
        total_predict_seconds += predict_seconds;
        outcomes.push(InstanceOutcome {
            instance: fv.instance.clone(),
            chosen,
            penalty,
            feature_seconds: fv.extract_seconds,
            predict_seconds,
        });
    }
    Ok(EvaluationReport {
        classifier: chooser.name().to_string(),
        feature_set: features.first().map(|f| f.feature_set).unwrap_or(FeatureSet::Full),
        total_penalty,
        dont_know_excluded,
        outcomes,
        total_feature_seconds,
        total_predict_seconds,
    })
}

pub const SUMMARY_CSV_HEADER: &str = "classifier,feature_set,total_penalty_seconds,instances,dont_know_excluded,total_feature_seconds,total_predict_seconds,total_with_overhead_seconds";

/// One-row-per-classifier summary CSV for a single evaluation condition.
pub fn write_summary_csv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.classifier,
            r.feature_set.name(),
            format_float(r.total_penalty),
            r.instances_included(),
            r.dont_know_excluded,
            format_float(r.total_feature_seconds),
            format_float(r.total_predict_seconds),
            format_float(r.total_with_overhead()),
        ));
    }
    out
}

/// Parses a summary CSV back to (classifier, total penalty) pairs.
pub fn parse_summary_csv(text: &str) -> Result<Vec<(String, f64)>, EvalError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SUMMARY_CSV_HEADER => {}
        _ => {
            return Err(EvalError::SummarySyntax {
                line: 1,
                msg: format!("expected header `{SUMMARY_CSV_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(EvalError::SummarySyntax {
                line: lineno,
                msg: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let total: f64 = fields[2].parse().map_err(|_| EvalError::SummarySyntax {
            line: lineno,
            msg: format!("bad total `{}`", fields[2]),
        })?;
        rows.push((fields[0].to_string(), total));
    }
    Ok(rows)
}

pub const DETAILS_CSV_HEADER: &str =
    "instance,classifier,chosen_solver,penalty_seconds,feature_seconds,predict_seconds";

pub fn write_details_csv(report: &EvaluationReport, solvers: &SolverSet) -> String {
    let mut out = String::from(DETAILS_CSV_HEADER);
    out.push('\n');
    for o in &report.outcomes {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            o.instance,
            report.classifier,
            solvers.names[o.chosen],
            format_float(o.penalty),
            format_float(o.feature_seconds),
            format_float(o.predict_seconds),
        ));
    }
    out
}

/// Classifier-by-condition table of total penalties, mirroring the shape of
/// a per-classifier comparison across evaluation conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub conditions: Vec<String>,
    /// (classifier, one total per condition; None when absent)
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

/// Builds the table from per-condition lists of (classifier, total penalty).
/// Classifiers appear in first-encounter order.
pub fn report_tables(conditions: &[(String, Vec<(String, f64)>)]) -> Result<ReportTable, EvalError> {
    let mut names: Vec<String> = Vec::new();
    for (_, rows) in conditions {
        for (classifier, _) in rows {
            if !names.contains(classifier) {
                names.push(classifier.clone());
            }
        }
    }
    if names.is_empty() {
        return Err(EvalError::NoClassifiers);
    }
    let rows = names
        .into_iter()
        .map(|name| {
            let cells = conditions
                .iter()
                .map(|(_, rows)| {
                    rows.iter()
                        .find(|(c, _)| *c == name)
                        .map(|(_, total)| *total)
                })
                .collect();
            (name, cells)
        })
        .collect();
    Ok(ReportTable {
        conditions: conditions.iter().map(|(c, _)| c.clone()).collect(),
        rows,
    })
}

impl ReportTable {
    /// Full-precision CSV: `classifier,<condition>...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("classifier");
        for c in &self.conditions {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (name, cells) in &self.rows {
            out.push_str(name);
            for cell in cells {
                out.push(',');
                if let Some(v) = cell {
                    out.push_str(&format_float(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Display for ReportTable {
    /// Fixed-width text table with values rounded to 4 significant digits.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name_width = self
            .rows
            .iter()
            .map(|(n, _)| n.len())
            .chain(["classifier".len()])
            .max()
            .unwrap_or(10);
        let mut col_widths: Vec<usize> = self.conditions.iter().map(|c| c.len()).collect();
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .map(|(i, cell)| {
                        let text = cell.map(sig4).unwrap_or_default();
                        col_widths[i] = col_widths[i].max(text.len());
                        text
                    })
                    .collect()
            })
            .collect();
        write!(f, "{:name_width$}", "classifier")?;
        for (c, w) in self.conditions.iter().zip(&col_widths) {
            write!(f, "  {c:>w$}")?;
        }
        writeln!(f)?;
        for ((name, _), row) in self.rows.iter().zip(&cells) {
            write!(f, "{name:name_width$}")?;
            for (text, w) in row.iter().zip(&col_widths) {
                write!(f, "  {text:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
