//! Native base classifiers behind a uniform train/predict interface.
//!
//! The bank spans the classic methodology families: majority rule (ZeroR),
//! single-attribute rule (OneR), Gaussian naive Bayes, k-nearest-neighbour
//! and an information-gain decision tree. Every tie anywhere is broken by a
//! fixed order (class index, then feature index, then threshold) so that
//! training and prediction are fully reproducible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    pub values: Vec<f64>,
    pub class: usize,
}

/// Rows share one feature arity; classes are indices into an external
/// alphabet of size `num_classes` (lower index = higher tie priority).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub arity: usize,
    pub num_classes: usize,
    pub rows: Vec<TrainingRow>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("row {0} has a different feature arity")]
    InconsistentArity(usize),
    #[error("row {row} has class {class}, but the alphabet has {num_classes} classes")]
    ClassOutOfRange {
        row: usize,
        class: usize,
        num_classes: usize,
    },
    #[error("feature vector has {got} values but the model expects {expected}")]
    ArityMismatch { got: usize, expected: usize },
}

impl TrainingSet {
    pub fn new(
        arity: usize,
        num_classes: usize,
        rows: Vec<TrainingRow>,
    ) -> Result<TrainingSet, LearnError> {
        for (i, r) in rows.iter().enumerate() {
            if r.values.len() != arity {
                return Err(LearnError::InconsistentArity(i));
            }
            if r.class >= num_classes {
                return Err(LearnError::ClassOutOfRange {
                    row: i,
                    class: r.class,
                    num_classes,
                });
            }
        }
        Ok(TrainingSet {
            arity,
            num_classes,
            rows,
        })
    }

    fn require_rows(&self) -> Result<(), LearnError> {
        if self.rows.is_empty() {
            Err(LearnError::EmptyTrainingSet)
        } else {
            Ok(())
        }
    }

    fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for r in &self.rows {
            counts[r.class] += 1;
        }
        counts
    }
}

/// Majority class with ties to the lowest index.
fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

/// Learner kinds with their hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Learner {
    ZeroR,
    OneR { min_bucket: usize },
    NaiveBayes { var_floor: f64 },
    Knn { k: usize },
    Tree { max_depth: usize, min_leaf: usize },
}

impl Learner {
    pub const DEFAULT_ONE_R_MIN_BUCKET: usize = 6;
    pub const DEFAULT_NB_VAR_FLOOR: f64 = 1e-9;
    pub const DEFAULT_KNN_K: usize = 5;
    pub const DEFAULT_TREE_MAX_DEPTH: usize = 20;
    pub const DEFAULT_TREE_MIN_LEAF: usize = 2;

    /// The standard five-learner bank with default hyperparameters.
    pub fn default_bank() -> Vec<Learner> {
        vec![
            Learner::ZeroR,
            Learner::OneR {
                min_bucket: Self::DEFAULT_ONE_R_MIN_BUCKET,
            },
            Learner::NaiveBayes {
                var_floor: Self::DEFAULT_NB_VAR_FLOOR,
            },
            Learner::Knn {
                k: Self::DEFAULT_KNN_K,
            },
            Learner::Tree {
                max_depth: Self::DEFAULT_TREE_MAX_DEPTH,
                min_leaf: Self::DEFAULT_TREE_MIN_LEAF,
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Learner::ZeroR => "zeror",
            Learner::OneR { .. } => "oner",
            Learner::NaiveBayes { .. } => "nbayes",
            Learner::Knn { .. } => "knn",
            Learner::Tree { .. } => "tree",
        }
    }

    pub fn from_name(name: &str) -> Option<Learner> {
        let bank = Learner::default_bank();
        bank.into_iter().find(|l| l.name() == name)
    }

    pub fn train(&self, ts: &TrainingSet) -> Result<Model, LearnError> {
        match *self {
            Learner::ZeroR => train_zero_r(ts),
            Learner::OneR { min_bucket } => train_one_r(ts, min_bucket),
            Learner::NaiveBayes { var_floor } => train_naive_bayes(ts, var_floor),
            Learner::Knn { k } => train_knn(ts, k),
            Learner::Tree {
                max_depth,
                min_leaf,
            } => train_decision_tree(ts, max_depth, min_leaf),
        }
    }
}

/// A trained model; parameters are opaque to callers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    arity: usize,
    num_classes: usize,
    kind: ModelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ModelKind {
    Constant { class: usize },
    OneR(OneRModel),
    NaiveBayes(NaiveBayesModel),
    Knn(KnnModel),
    Tree(TreeModel),
}

impl Model {
    /// A model that predicts `class` for every input.
    pub fn constant(arity: usize, num_classes: usize, class: usize) -> Model {
        assert!(class < num_classes);
        Model {
            arity,
            num_classes,
            kind: ModelKind::Constant { class },
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Deterministic class prediction; errors only on arity mismatch.
    pub fn predict(&self, values: &[f64]) -> Result<usize, LearnError> {
        if values.len() != self.arity {
            return Err(LearnError::ArityMismatch {
                got: values.len(),
                expected: self.arity,
            });
        }
        Ok(match &self.kind {
            ModelKind::Constant { class } => *class,
            ModelKind::OneR(m) => m.predict(values),
            ModelKind::NaiveBayes(m) => m.predict(values),
            ModelKind::Knn(m) => m.predict(values),
            ModelKind::Tree(m) => m.predict(values),
        })
    }
}

/// Majority-class baseline.
pub fn train_zero_r(ts: &TrainingSet) -> Result<Model, LearnError> {
    ts.require_rows()?;
    let class = majority(&ts.class_counts());
    Ok(Model::constant(ts.arity, ts.num_classes, class))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OneRModel {
    feature: usize,
    /// Upper bucket boundaries (midpoints); bucket i covers values up to
    /// thresholds[i], the last bucket is unbounded.
    thresholds: Vec<f64>,
    classes: Vec<usize>,
}

impl OneRModel {
    fn predict(&self, values: &[f64]) -> usize {
        let v = values[self.feature];
        let bucket = self.thresholds.partition_point(|&t| v > t);
        self.classes[bucket]
    }
}

/// Single-feature rule: per feature, sorted values are greedily grown into
/// buckets until the bucket's majority class holds at least `min_bucket`
/// rows (never splitting runs of equal values), adjacent buckets with equal
/// majority are merged, and the feature whose rule scores the best training
/// accuracy wins (ties to the lower feature index).
pub fn train_one_r(ts: &TrainingSet, min_bucket: usize) -> Result<Model, LearnError> {
    ts.require_rows()?;
    let min_bucket = min_bucket.max(1);
    let mut best: Option<(usize, OneRModel)> = None; // (correct, model)
    for feature in 0..ts.arity {
        let mut pairs: Vec<(f64, usize)> = ts
            .rows
            .iter()
            .map(|r| (r.values[feature], r.class))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        // grow buckets
        let n = pairs.len();
        let mut buckets: Vec<(usize, usize, usize)> = Vec::new(); // (start, end, majority)
        let mut start = 0;
        while start < n {
            let mut counts = vec![0usize; ts.num_classes];
            let mut end = start;
            let mut max_count = 0;
            while end < n {
                counts[pairs[end].1] += 1;
                max_count = max_count.max(counts[pairs[end].1]);
                end += 1;
                if max_count >= min_bucket {
                    // the bucket is full: keep absorbing runs of equal values
                    // (they cannot be split) and subsequent rows of the
                    // bucket's majority class
                    loop {
                        while end < n && pairs[end].0 == pairs[end - 1].0 {
                            counts[pairs[end].1] += 1;
                            end += 1;
                        }
                        if end < n && pairs[end].1 == majority(&counts) {
                            counts[pairs[end].1] += 1;
                            end += 1;
                        } else {
                            break;
                        }
                    }
                    break;
                }
            }
            buckets.push((start, end, majority(&counts)));
            start = end;
        }

        // merge adjacent buckets with equal majority class
        let mut merged: Vec<(usize, usize, usize)> = Vec::new();
        for b in buckets {
            match merged.last_mut() {
                Some(last) if last.2 == b.2 => last.1 = b.1,
                _ => merged.push(b),
            }
        }

        let correct: usize = merged
            .iter()
            .map(|&(s, e, cls)| pairs[s..e].iter().filter(|p| p.1 == cls).count())
            .sum();
        let thresholds: Vec<f64> = merged
            .windows(2)
            .map(|w| {
                let last_left = pairs[w[0].1 - 1].0;
                let first_right = pairs[w[1].0].0;
                (last_left + first_right) / 2.0
            })
            .collect();
        let model = OneRModel {
            feature,
            thresholds,
            classes: merged.iter().map(|&(_, _, c)| c).collect(),
        };
        if best.as_ref().is_none_or(|(c, _)| correct > *c) {
            best = Some((correct, model));
        }
    }
    let (_, model) = best.unwrap();
    Ok(Model {
        arity: ts.arity,
        num_classes: ts.num_classes,
        kind: ModelKind::OneR(model),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NaiveBayesModel {
    /// Log prior per class; classes absent from training never win.
    log_priors: Vec<f64>,
    present: Vec<bool>,
    /// Per class, per feature: (mean, floored variance).
    gaussians: Vec<Vec<(f64, f64)>>,
}

impl NaiveBayesModel {
    fn predict(&self, values: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for class in 0..self.log_priors.len() {
            if !self.present[class] {
                continue;
            }
            let mut score = self.log_priors[class];
            for (f, &x) in values.iter().enumerate() {
                let (mean, var) = self.gaussians[class][f];
                score += -0.5 * (2.0 * std::f64::consts::PI * var).ln()
                    - (x - mean) * (x - mean) / (2.0 * var);
            }
            if score > best_score {
                best_score = score;
                best = class;
            }
        }
        best
    }
}

/// Gaussian naive Bayes with add-one prior smoothing and a variance floor.
pub fn train_naive_bayes(ts: &TrainingSet, var_floor: f64) -> Result<Model, LearnError> {
    ts.require_rows()?;
    let counts = ts.class_counts();
    let n = ts.rows.len() as f64;
    let log_priors: Vec<f64> = counts
        .iter()
        .map(|&c| ((c as f64 + 1.0) / (n + ts.num_classes as f64)).ln())
        .collect();
    let present: Vec<bool> = counts.iter().map(|&c| c > 0).collect();
    let mut gaussians = vec![vec![(0.0, var_floor); ts.arity]; ts.num_classes];
    for class in 0..ts.num_classes {
        if counts[class] == 0 {
            continue;
        }
        let members: Vec<&TrainingRow> =
            ts.rows.iter().filter(|r| r.class == class).collect();
        let k = members.len() as f64;
        for (f, slot) in gaussians[class].iter_mut().enumerate() {
            let mean = members.iter().map(|r| r.values[f]).sum::<f64>() / k;
            let var = members
                .iter()
                .map(|r| {
                    let d = r.values[f] - mean;
                    d * d
                })
                .sum::<f64>()
                / k;
            *slot = (mean, var.max(var_floor));
        }
    }
    Ok(Model {
        arity: ts.arity,
        num_classes: ts.num_classes,
        kind: ModelKind::NaiveBayes(NaiveBayesModel {
            log_priors,
            present,
            gaussians,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct KnnModel {
    k: usize,
    means: Vec<f64>,
    /// Population standard deviation per feature; 0 means the feature is
    /// constant and contributes no distance.
    sds: Vec<f64>,
    /// z-normalised training rows.
    rows: Vec<(Vec<f64>, usize)>,
    num_classes: usize,
}

impl KnnModel {
    fn normalise(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(f, &x)| {
                if self.sds[f] > 0.0 {
                    (x - self.means[f]) / self.sds[f]
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn predict(&self, values: &[f64]) -> usize {
        let q = self.normalise(values);
        let mut dists: Vec<(f64, usize)> = self
            .rows
            .iter()
            .map(|(row, class)| {
                let d2: f64 = row.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, *class)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // neighbours tied with the k-th distance are all included
        let cutoff = dists[self.k.min(dists.len()) - 1].0;
        let mut counts = vec![0usize; self.num_classes];
        for &(d2, class) in dists.iter().take_while(|&&(d2, _)| d2 <= cutoff) {
            let _ = d2;
            counts[class] += 1;
        }
        majority(&counts)
    }
}

/// k-nearest-neighbour on z-score-normalised features with Euclidean
/// distance. Constant features contribute no distance; all neighbours tied
/// at the k-th distance vote.
pub fn train_knn(ts: &TrainingSet, k: usize) -> Result<Model, LearnError> {
    ts.require_rows()?;
    let k = k.max(1);
    let n = ts.rows.len() as f64;
    let mut means = vec![0.0; ts.arity];
    let mut sds = vec![0.0; ts.arity];
    for f in 0..ts.arity {
        let mean = ts.rows.iter().map(|r| r.values[f]).sum::<f64>() / n;
        let var = ts
            .rows
            .iter()
            .map(|r| {
                let d = r.values[f] - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        means[f] = mean;
        sds[f] = var.sqrt();
    }
    let model = KnnModel {
        k,
        rows: ts
            .rows
            .iter()
            .map(|r| {
                (
                    r.values
                        .iter()
                        .enumerate()
                        .map(|(f, &x)| if sds[f] > 0.0 { (x - means[f]) / sds[f] } else { 0.0 })
                        .collect(),
                    r.class,
                )
            })
            .collect(),
        means,
        sds,
        num_classes: ts.num_classes,
    };
    Ok(Model {
        arity: ts.arity,
        num_classes: ts.num_classes,
        kind: ModelKind::Knn(model),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeModel {
    nodes: Vec<TreeNode>,
}

impl TreeModel {
    fn predict(&self, values: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { class } => return class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if values[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

const GAIN_EPS: f64 = 1e-12;

struct TreeBuilder<'a> {
    ts: &'a TrainingSet,
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<TreeNode>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    boundary: usize,
    gain: f64,
}

impl<'a> TreeBuilder<'a> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut counts = vec![0usize; self.ts.num_classes];
        for &i in &rows {
            counts[self.ts.rows[i].class] += 1;
        }
        let total = rows.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth {
            return self.leaf(&counts);
        }
        match self.best_split(&rows, &counts) {
            None => self.leaf(&counts),
            Some(choice) => {
                let mut order = rows;
                order.sort_by(|&a, &b| {
                    self.ts.rows[a].values[choice.feature]
                        .partial_cmp(&self.ts.rows[b].values[choice.feature])
                        .unwrap()
                        .then(a.cmp(&b))
                });
                let right = order.split_off(choice.boundary);
                debug_assert!(order.len() >= self.min_leaf && right.len() >= self.min_leaf);
                debug_assert_eq!(order.len() + right.len(), total);
                let node = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { class: 0 }); // placeholder
                let left_id = self.build(order, depth + 1);
                let right_id = self.build(right, depth + 1);
                self.nodes[node] = TreeNode::Split {
                    feature: choice.feature,
                    threshold: choice.threshold,
                    left: left_id,
                    right: right_id,
                };
                node
            }
        }
    }

    fn leaf(&mut self, counts: &[usize]) -> usize {
        self.nodes.push(TreeNode::Leaf {
            class: majority(counts),
        });
        self.nodes.len() - 1
    }

    /// Maximum-information-gain split over all features and boundary
    /// midpoints; ties keep the lower feature index, then lower threshold.
    /// When every candidate has zero gain but the node is impure, the first
    /// candidate is taken so that structure like XOR still separates.
    fn best_split(&self, rows: &[usize], counts: &[usize]) -> Option<SplitChoice> {
        let total = rows.len();
        if total < 2 * self.min_leaf {
            return None;
        }
        let parent_entropy = entropy(counts, total);
        let mut best: Option<SplitChoice> = None;
        for feature in 0..self.ts.arity {
            let mut order: Vec<usize> = rows.to_vec();
            order.sort_by(|&a, &b| {
                self.ts.rows[a].values[feature]
                    .partial_cmp(&self.ts.rows[b].values[feature])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut left = vec![0usize; self.ts.num_classes];
            for boundary in 1..total {
                left[self.ts.rows[order[boundary - 1]].class] += 1;
                let lo = self.ts.rows[order[boundary - 1]].values[feature];
                let hi = self.ts.rows[order[boundary]].values[feature];
                if lo == hi {
                    continue;
                }
                if boundary < self.min_leaf || total - boundary < self.min_leaf {
                    continue;
                }
                let right: Vec<usize> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                let weighted = (boundary as f64 * entropy(&left, boundary)
                    + (total - boundary) as f64 * entropy(&right, total - boundary))
                    / total as f64;
                let gain = parent_entropy - weighted;
                let mut threshold = (lo + hi) / 2.0;
                if threshold >= hi {
                    // adjacent floats: the midpoint rounded up; fall back to
                    // the left value so both sides stay non-empty
                    threshold = lo;
                }
                if best.as_ref().is_none_or(|b| gain > b.gain + GAIN_EPS) {
                    best = Some(SplitChoice {
                        feature,
                        threshold,
                        boundary,
                        gain,
                    });
                }
            }
        }
        match best {
            Some(b) if b.gain > GAIN_EPS => Some(b),
            // zero-gain fallback on impure nodes
            Some(b) if counts.iter().filter(|&&c| c > 0).count() > 1 => Some(b),
            _ => None,
        }
    }
}

/// Recursive binary splitting on numeric thresholds (midpoints between
/// consecutive distinct values), maximising Shannon information gain.
pub fn train_decision_tree(
    ts: &TrainingSet,
    max_depth: usize,
    min_leaf: usize,
) -> Result<Model, LearnError> {
    ts.require_rows()?;
    let mut builder = TreeBuilder {
        ts,
        max_depth,
        min_leaf: min_leaf.max(1),
        nodes: Vec::new(),
    };
    let all: Vec<usize> = (0..ts.rows.len()).collect();
    let root = builder.build(all, 0);
    debug_assert_eq!(root, 0);
    Ok(Model {
        arity: ts.arity,
        num_classes: ts.num_classes,
        kind: ModelKind::Tree(TreeModel {
            nodes: builder.nodes,
        }),
    })
}
