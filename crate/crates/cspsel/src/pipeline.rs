//! Training machinery: cost-based instance duplication, stratified k-fold
//! cross-validation, two-level hierarchical models and the majority-vote
//! meta-classifier, plus ensemble persistence.
//!
//! The hierarchical model first decides naive vs propagating, then (only for
//! the propagating branch) which specific variant. The meta-classifier holds
//! one hierarchical model per (learner, fold) pair and combines their final
//! solver decisions by majority vote.

use crate::features::FeatureSet;
use crate::learners::{Learner, LearnError, Model, TrainingRow, TrainingSet};
use crate::perf::{LabelClass, SolverSet};
use crate::util::{fnv1a64, format_float};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One labeled feature row: extracted values plus the class and cost that
/// perf-data labeling produced.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub instance: String,
    pub values: Vec<f64>,
    pub label: LabelClass,
    pub cost: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("instance `{instance}` has negative cost {cost}")]
    NegativeCost { instance: String, cost: f64 },
    #[error("need at least 2 folds, requested {0}")]
    TooFewFolds(usize),
    #[error("{folds} folds exceed the {rows} available rows")]
    FoldsExceedRows { folds: usize, rows: usize },
    #[error("no usable training rows (all don't-know?)")]
    EmptyTrainingData,
    #[error("row for `{instance}` has {got} features, expected {expected}")]
    RowArity {
        instance: String,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Learn(#[from] LearnError),
}

/// Replicates each row `max(1, 1 + ceil(log2(max(cost, 1))))` times so that
/// learners weight high-stakes instances more; don't-know rows are dropped.
/// First-occurrence order is preserved (copies are adjacent).
pub fn duplicate_by_cost(rows: &[LabeledRow]) -> Result<Vec<LabeledRow>, PipelineError> {
    let mut out = Vec::new();
    for row in rows {
        if row.cost < 0.0 {
            return Err(PipelineError::NegativeCost {
                instance: row.instance.clone(),
                cost: row.cost,
            });
        }
        if row.label == LabelClass::DontKnow {
            continue;
        }
        for _ in 0..copies_for_cost(row.cost) {
            out.push(row.clone());
        }
    }
    Ok(out)
}

/// `1 + ceil(log2(cost))`, clamped below at one copy.
pub fn copies_for_cost(cost: f64) -> usize {
    let c = cost.max(1.0);
    1 + c.log2().ceil() as usize
}

/// Deals each class's (seeded-shuffled) rows round-robin across `k` folds,
/// so per-fold class counts deviate from exact proportionality by less
/// than 1. Returns disjoint index sets partitioning `0..classes.len()`.
pub fn stratified_kfold(
    classes: &[usize],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, PipelineError> {
    if k < 2 {
        return Err(PipelineError::TooFewFolds(k));
    }
    if k > classes.len() {
        return Err(PipelineError::FoldsExceedRows {
            folds: k,
            rows: classes.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &c) in classes.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut folds = vec![Vec::new(); k];
    for (_, mut members) in by_class {
        members.shuffle(&mut rng);
        for (j, idx) in members.into_iter().enumerate() {
            folds[j % k].push(idx);
        }
    }
    Ok(folds)
}

/// Two-level model: level 1 decides naive vs propagating, level 2 picks the
/// specific variant among the non-naive solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalModel {
    level1: Model,
    level2: Model,
    naive_solver: usize,
    variant_solvers: Vec<usize>,
}

const LEVEL1_NAIVE: usize = 0;
const LEVEL1_PROPAGATING: usize = 1;

/// Trains both levels with `learner`. Rows labeled don't-know are ignored;
/// if either side of the level-1 decision has no rows, that level becomes a
/// constant model (the level-2 constant is the default variant).
pub fn train_hierarchical(
    rows: &[LabeledRow],
    learner: Learner,
    solvers: &SolverSet,
    arity: usize,
) -> Result<HierarchicalModel, PipelineError> {
    let usable: Vec<&LabeledRow> = rows
        .iter()
        .filter(|r| r.label != LabelClass::DontKnow)
        .collect();
    if usable.is_empty() {
        return Err(PipelineError::EmptyTrainingData);
    }
    for r in &usable {
        if r.values.len() != arity {
            return Err(PipelineError::RowArity {
                instance: r.instance.clone(),
                got: r.values.len(),
                expected: arity,
            });
        }
    }
    let variant_solvers = solvers.variant_indices();
    let variant_position = |solver: usize| variant_solvers.iter().position(|&v| v == solver);

    let mut level1_rows = Vec::with_capacity(usable.len());
    let mut level2_rows = Vec::new();
    for r in &usable {
        let solver = match r.label {
            LabelClass::Solver(s) => s,
            LabelClass::DontKnow => unreachable!(),
        };
        if solver == solvers.naive {
            level1_rows.push(TrainingRow {
                values: r.values.clone(),
                class: LEVEL1_NAIVE,
            });
        } else {
            level1_rows.push(TrainingRow {
                values: r.values.clone(),
                class: LEVEL1_PROPAGATING,
            });
            level2_rows.push(TrainingRow {
                values: r.values.clone(),
                class: variant_position(solver).expect("label is a known variant"),
            });
        }
    }

    let has_naive = level1_rows.iter().any(|r| r.class == LEVEL1_NAIVE);
    let has_variant = !level2_rows.is_empty();

    let level1 = if has_naive && has_variant {
        learner.train(&TrainingSet::new(arity, 2, level1_rows)?)?
    } else if has_naive {
        Model::constant(arity, 2, LEVEL1_NAIVE)
    } else {
        Model::constant(arity, 2, LEVEL1_PROPAGATING)
    };

    let level2 = if has_variant {
        let distinct: std::collections::BTreeSet<usize> =
            level2_rows.iter().map(|r| r.class).collect();
        if distinct.len() == 1 {
            Model::constant(arity, variant_solvers.len(), *distinct.iter().next().unwrap())
        } else {
            learner.train(&TrainingSet::new(arity, variant_solvers.len(), level2_rows)?)?
        }
    } else {
        // no propagating rows: fall back to the default implementation
        // (or the first variant when the default is the naive solver)
        let fallback = variant_position(solvers.default).unwrap_or(0);
        Model::constant(arity, variant_solvers.len(), fallback)
    };

    Ok(HierarchicalModel {
        level1,
        level2,
        naive_solver: solvers.naive,
        variant_solvers,
    })
}

impl HierarchicalModel {
    /// Level 1 says naive → the naive solver; otherwise level 2's variant.
    pub fn predict(&self, values: &[f64]) -> Result<usize, LearnError> {
        if self.level1.predict(values)? == LEVEL1_NAIVE {
            Ok(self.naive_solver)
        } else {
            let variant = self.level2.predict(values)?;
            Ok(self.variant_solvers[variant])
        }
    }

    pub fn arity(&self) -> usize {
        self.level1.arity()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub learner: usize,
    pub fold: usize,
    pub model: HierarchicalModel,
}

/// Majority-vote combination of all (fold × learner) hierarchical models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub solvers: SolverSet,
    pub feature_set: FeatureSet,
    pub feature_names: Vec<String>,
    pub learner_names: Vec<String>,
    pub folds: usize,
    /// Solver precedence for vote ties: the default solver first, then the
    /// remaining solvers in list order.
    pub tie_order: Vec<usize>,
    /// Sorted by (learner, fold).
    pub members: Vec<EnsembleMember>,
}

fn tie_order(solvers: &SolverSet) -> Vec<usize> {
    let mut order = vec![solvers.default];
    order.extend((0..solvers.len()).filter(|&i| i != solvers.default));
    order
}

/// Trains the meta-classifier: duplication is applied before fold
/// assignment (copies of one instance may land in different folds), unless
/// `strict_folds` groups all copies of an instance into one fold.
pub fn train_meta(
    rows: &[LabeledRow],
    bank: &[Learner],
    folds: usize,
    seed: u64,
    strict_folds: bool,
    solvers: &SolverSet,
    feature_set: FeatureSet,
) -> Result<Ensemble, PipelineError> {
    assert!(!bank.is_empty(), "learner bank is empty");
    let arity = feature_set.len();

    // fold membership is computed once and shared by every learner
    let fold_training_sets = fold_training_sets(rows, folds, seed, strict_folds)?;

    let mut members = Vec::with_capacity(bank.len() * folds);
    for (learner_idx, learner) in bank.iter().enumerate() {
        for (fold_idx, training) in fold_training_sets.iter().enumerate() {
            let model = train_hierarchical(training, *learner, solvers, arity)?;
            members.push(EnsembleMember {
                learner: learner_idx,
                fold: fold_idx,
                model,
            });
        }
    }

    Ok(Ensemble {
        solvers: solvers.clone(),
        feature_set,
        feature_names: feature_set
            .feature_names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        learner_names: bank.iter().map(|l| l.name().to_string()).collect(),
        folds,
        tie_order: tie_order(solvers),
        members,
    })
}

/// Per-fold training sets. By default duplication happens first and the
/// copies are stratified individually (copies of one instance may land in
/// different folds); strict mode stratifies the unique rows and duplicates
/// afterwards, so every copy of an instance trains the same members.
fn fold_training_sets(
    rows: &[LabeledRow],
    folds: usize,
    seed: u64,
    strict: bool,
) -> Result<Vec<Vec<LabeledRow>>, PipelineError> {
    let complement = |pool: &[LabeledRow], test_fold: &[usize]| -> Vec<LabeledRow> {
        let in_test: std::collections::HashSet<usize> = test_fold.iter().copied().collect();
        pool.iter()
            .enumerate()
            .filter(|(i, _)| !in_test.contains(i))
            .map(|(_, r)| r.clone())
            .collect()
    };
    if strict {
        let unique: Vec<LabeledRow> = rows
            .iter()
            .filter(|r| r.label != LabelClass::DontKnow)
            .cloned()
            .collect();
        if unique.is_empty() {
            return Err(PipelineError::EmptyTrainingData);
        }
        let classes: Vec<usize> = unique.iter().map(class_of).collect();
        stratified_kfold(&classes, folds, seed)?
            .iter()
            .map(|test_fold| duplicate_by_cost(&complement(&unique, test_fold)))
            .collect()
    } else {
        let expanded = duplicate_by_cost(rows)?;
        if expanded.is_empty() {
            return Err(PipelineError::EmptyTrainingData);
        }
        let classes: Vec<usize> = expanded.iter().map(class_of).collect();
        Ok(stratified_kfold(&classes, folds, seed)?
            .iter()
            .map(|test_fold| complement(&expanded, test_fold))
            .collect())
    }
}

fn class_of(row: &LabeledRow) -> usize {
    match row.label {
        LabelClass::Solver(s) => s,
        LabelClass::DontKnow => usize::MAX,
    }
}

impl Ensemble {
    /// Every member votes a final solver; plurality wins, ties go to the
    /// earliest solver in the tie order. Depends only on the multiset of
    /// votes, not on member iteration order.
    pub fn predict(&self, values: &[f64]) -> Result<usize, LearnError> {
        let mut votes = vec![0usize; self.solvers.len()];
        for member in &self.members {
            votes[member.model.predict(values)?] += 1;
        }
        let mut best = self.tie_order[0];
        for &s in &self.tie_order {
            if votes[s] > votes[best] {
                best = s;
            }
        }
        Ok(best)
    }

    pub fn arity(&self) -> usize {
        self.feature_names.len()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PersistError {
    #[error("unsupported ensemble file version `{found}` (expected `{ENSEMBLE_FORMAT_VERSION}`)")]
    VersionMismatch { found: String },
    #[error("ensemble file corrupt: {0}")]
    Corrupt(String),
}

pub const ENSEMBLE_FORMAT_VERSION: &str = "cspsel-ensemble v1";

/// Serialises an ensemble: a version header, a JSON body and an FNV-1a
/// checksum trailer over everything before it. Byte-stable for identical
/// inputs.
pub fn save_ensemble(e: &Ensemble) -> String {
    let json = serde_json::to_string(e).expect("ensemble serialises");
    let body = format!("{ENSEMBLE_FORMAT_VERSION}\n{json}\n");
    let checksum = fnv1a64(body.as_bytes());
    format!("{body}checksum fnv1a64:{checksum:016x}\n")
}

/// Parses and verifies an ensemble file (version, checksum, schema).
pub fn load_ensemble(text: &str) -> Result<Ensemble, PersistError> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.len() < 3 {
        return Err(PersistError::Corrupt("file truncated".into()));
    }
    let header = lines[0];
    if header != ENSEMBLE_FORMAT_VERSION {
        if header.starts_with("cspsel-ensemble") {
            return Err(PersistError::VersionMismatch {
                found: header.to_string(),
            });
        }
        return Err(PersistError::Corrupt("missing version header".into()));
    }
    let trailer = lines[lines.len() - 1];
    let stated = trailer
        .strip_prefix("checksum fnv1a64:")
        .ok_or_else(|| PersistError::Corrupt("missing checksum trailer".into()))?;
    let stated = u64::from_str_radix(stated.trim(), 16)
        .map_err(|_| PersistError::Corrupt("unreadable checksum".into()))?;
    let body_len = text
        .rfind("checksum fnv1a64:")
        .expect("trailer located above");
    let actual = fnv1a64(&text.as_bytes()[..body_len]);
    if stated != actual {
        return Err(PersistError::Corrupt(format!(
            "checksum mismatch (stated {stated:016x}, computed {actual:016x})"
        )));
    }
    let json = lines[1..lines.len() - 1].join("\n");
    serde_json::from_str(&json).map_err(|e| PersistError::Corrupt(format!("bad body: {e}")))
}

/// Summary line describing an ensemble (for logs and reports).
pub fn describe_ensemble(e: &Ensemble) -> String {
    format!(
        "{} members ({} learners x {} folds), {} features ({}), solvers: {}, timeout {}s",
        e.members.len(),
        e.learner_names.len(),
        e.folds,
        e.feature_names.len(),
        e.feature_set.name(),
        e.solvers.names.join("/"),
        format_float(e.solvers.timeout_seconds),
    )
}
