//! Instance attribute extraction: the full 37-entry feature vector or the
//! cheap 29-entry subset.
//!
//! The full set decomposes as 9 graph attributes + 6 domain + 6 arity +
//! 1 multi-shared + 1 constraints-per-variable + 1 aux ratio + 6 tightness +
//! 1 symmetry + 6 alldifferent statistics. The cheap set drops every graph
//! attribute except edge density; the dropped computations are not executed.

use crate::graph::{
    build_primal_graph, clustering_coefficient, degree_stats, edge_density, width_of_graph,
    width_of_ordering,
};
use crate::instance::{eval_constraint, Constraint, ConstraintKind, Instance};
use crate::symmetry::symmetry_proportion;
use crate::util::{fnv1a64, fnv1a64_extend, format_float};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

/// Canonical feature order; also the column order of the features CSV.
pub const FULL_FEATURE_NAMES: [&str; 37] = [
    "edge_density",
    "clustering",
    "deg_min",
    "deg_max",
    "deg_mean",
    "deg_median",
    "deg_sd",
    "width_ordering",
    "width_graph",
    "dom_min",
    "dom_q1",
    "dom_median",
    "dom_q3",
    "dom_max",
    "dom_mean",
    "arity_min",
    "arity_q1",
    "arity_median",
    "arity_q3",
    "arity_max",
    "arity_mean",
    "multi_shared",
    "con_per_var",
    "aux_ratio",
    "tight_min",
    "tight_q1",
    "tight_median",
    "tight_q3",
    "tight_max",
    "tight_mean",
    "sym_prop",
    "ad_min",
    "ad_q1",
    "ad_median",
    "ad_q3",
    "ad_max",
    "ad_mean",
];

/// Graph attributes absent from the cheap set (everything primal-graph based
/// apart from edge density).
pub const CHEAP_EXCLUDED: [&str; 8] = [
    "clustering",
    "deg_min",
    "deg_max",
    "deg_mean",
    "deg_median",
    "deg_sd",
    "width_ordering",
    "width_graph",
];

// 9 graph + 6 domain + 6 arity + 1 + 1 + 1 + 6 tightness + 1 symmetry + 6 alldifferent
const _: () = assert!(9 + 6 + 6 + 1 + 1 + 1 + 6 + 1 + 6 == FULL_FEATURE_NAMES.len());
const _: () = assert!(FULL_FEATURE_NAMES.len() - CHEAP_EXCLUDED.len() == 29);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSet {
    Full,
    Cheap,
}

impl FeatureSet {
    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Full => "full",
            FeatureSet::Cheap => "cheap",
        }
    }

    pub fn from_name(s: &str) -> Option<FeatureSet> {
        match s {
            "full" => Some(FeatureSet::Full),
            "cheap" => Some(FeatureSet::Cheap),
            _ => None,
        }
    }

    /// Feature names in canonical order for this set.
    pub fn feature_names(self) -> Vec<&'static str> {
        match self {
            FeatureSet::Full => FULL_FEATURE_NAMES.to_vec(),
            FeatureSet::Cheap => FULL_FEATURE_NAMES
                .iter()
                .copied()
                .filter(|n| !CHEAP_EXCLUDED.contains(n))
                .collect(),
        }
    }

    /// Number of features in this set.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            FeatureSet::Full => 37,
            FeatureSet::Cheap => 29,
        }
    }
}

/// True for features whose definition bounds them to [0, 1]; domain sizes,
/// arity ratios, the aux ratio and alldifferent union ratios are unbounded.
pub fn is_normalised_feature(name: &str) -> bool {
    matches!(
        name,
        "edge_density"
            | "clustering"
            | "deg_min"
            | "deg_max"
            | "deg_mean"
            | "deg_median"
            | "deg_sd"
            | "width_ordering"
            | "width_graph"
            | "multi_shared"
            | "con_per_var"
            | "tight_min"
            | "tight_q1"
            | "tight_median"
            | "tight_q3"
            | "tight_max"
            | "tight_mean"
            | "sym_prop"
    )
}

/// One instance's extracted attributes in canonical order.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    pub instance: String,
    pub feature_set: FeatureSet,
    pub values: Vec<f64>,
    /// Wall-clock seconds spent computing the attributes (parsing excluded).
    pub extract_seconds: f64,
    /// Degenerate statistics that were forced to zero.
    pub diagnostics: Vec<String>,
}

/// Five-number summary plus mean. Quantiles use linear interpolation on the
/// rank h = p(k-1) of the sorted values; an empty input yields all zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary6 {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary6 {
    pub const ZERO: Summary6 = Summary6 {
        min: 0.0,
        q1: 0.0,
        median: 0.0,
        q3: 0.0,
        max: 0.0,
        mean: 0.0,
    };

    /// Values in CSV column order: min, q1, median, q3, max, mean.
    pub fn as_array(self) -> [f64; 6] {
        [self.min, self.q1, self.median, self.q3, self.max, self.mean]
    }
}

pub fn summary6(values: &[f64]) -> Summary6 {
    if values.is_empty() {
        return Summary6::ZERO;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Summary6 {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: *sorted.last().unwrap(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
    }
}

/// Summary over per-variable domain sizes.
pub fn domain_features(inst: &Instance) -> Summary6 {
    let sizes: Vec<f64> = inst.variables.iter().map(|v| v.domain.len() as f64).collect();
    summary6(&sizes)
}

/// Summary over constraint arities, each divided by the constraint count.
pub fn arity_features(inst: &Instance) -> Summary6 {
    let m = inst.constraints.len();
    if m == 0 {
        return Summary6::ZERO;
    }
    let values: Vec<f64> = inst
        .constraints
        .iter()
        .map(|c| c.arity() as f64 / m as f64)
        .collect();
    summary6(&values)
}

/// Proportion of unordered constraint pairs sharing more than one variable.
pub fn multiple_shared_variables(inst: &Instance) -> f64 {
    let m = inst.constraints.len();
    if m < 2 {
        return 0.0;
    }
    let scopes: Vec<Vec<usize>> = inst
        .constraints
        .iter()
        .map(|c| {
            let mut s = c.scope.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let mut sharing = 0usize;
    for i in 0..m {
        for j in (i + 1)..m {
            if shares_at_least_two(&scopes[i], &scopes[j]) {
                sharing += 1;
            }
        }
    }
    sharing as f64 / (m * (m - 1) / 2) as f64
}

fn shares_at_least_two(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                if shared >= 2 {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// Mean number of constraints per variable, divided by the constraint count.
pub fn mean_constraints_per_variable(inst: &Instance) -> f64 {
    let m = inst.constraints.len();
    if m == 0 || inst.variables.is_empty() {
        return 0.0;
    }
    let mut counts = vec![0usize; inst.variables.len()];
    for c in &inst.constraints {
        for &v in &c.scope {
            counts[v] += 1;
        }
    }
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    mean / m as f64
}

/// Auxiliary variables divided by non-auxiliary variables; 0 when there are
/// no non-auxiliary variables.
pub fn aux_ratio(inst: &Instance) -> f64 {
    let aux = inst.variables.iter().filter(|v| v.aux).count();
    let other = inst.variables.len() - aux;
    if other == 0 {
        0.0
    } else {
        aux as f64 / other as f64
    }
}

/// Per-constraint proportion of disallowed tuples, summarised over all
/// constraints. Estimated from `samples` domain-valid draws, except that a
/// scope whose domain product is at most `samples` is enumerated exactly.
pub fn tightness_features(inst: &Instance, seed: u64, samples: usize) -> Summary6 {
    let values: Vec<f64> = inst
        .constraints
        .iter()
        .map(|c| constraint_tightness(inst, c, seed, samples))
        .collect();
    summary6(&values)
}

fn constraint_tightness(inst: &Instance, c: &Constraint, seed: u64, samples: usize) -> f64 {
    let mut product: u128 = 1;
    for &v in &c.scope {
        product = product.saturating_mul(inst.variables[v].domain.len() as u128);
    }
    if product <= samples as u128 {
        let total = product as usize;
        let mut disallowed = 0usize;
        let mut tuple: Vec<i64> = c
            .scope
            .iter()
            .map(|&v| inst.variables[v].domain[0])
            .collect();
        let mut counter = vec![0usize; c.scope.len()];
        for _ in 0..total {
            if !eval_constraint(c, &tuple) {
                disallowed += 1;
            }
            // mixed-radix increment over the scope domains
            for pos in (0..counter.len()).rev() {
                let domain = &inst.variables[c.scope[pos]].domain;
                counter[pos] += 1;
                if counter[pos] < domain.len() {
                    tuple[pos] = domain[counter[pos]];
                    break;
                }
                counter[pos] = 0;
                tuple[pos] = domain[0];
            }
        }
        disallowed as f64 / total as f64
    } else {
        // the per-constraint stream is derived from the constraint's content,
        // keeping every feature invariant under constraint reordering
        let mut rng = ChaCha8Rng::seed_from_u64(constraint_seed(seed, c));
        let mut disallowed = 0usize;
        let mut tuple = vec![0i64; c.arity()];
        for _ in 0..samples {
            for (slot, &var) in tuple.iter_mut().zip(&c.scope) {
                let d = &inst.variables[var].domain;
                *slot = d[rng.random_range(0..d.len())];
            }
            if !eval_constraint(c, &tuple) {
                disallowed += 1;
            }
        }
        disallowed as f64 / samples as f64
    }
}

fn constraint_seed(seed: u64, c: &Constraint) -> u64 {
    let body = serde_json::to_vec(c).expect("constraint serialises");
    fnv1a64_extend(fnv1a64(&seed.to_le_bytes()), &body)
}

/// Per alldifferent constraint, the size of the union of its scope domains
/// divided by the arity; summarised over all alldifferent constraints.
pub fn alldiff_features(inst: &Instance) -> Summary6 {
    let mut union = std::collections::HashSet::new();
    let values: Vec<f64> = inst
        .constraints
        .iter()
        .filter(|c| matches!(c.kind, ConstraintKind::AllDifferent))
        .map(|c| {
            union.clear();
            for &v in &c.scope {
                union.extend(inst.variables[v].domain.iter().copied());
            }
            union.len() as f64 / c.arity() as f64
        })
        .collect();
    summary6(&values)
}

/// Number of random tuples drawn per constraint when estimating tightness.
pub const TIGHTNESS_SAMPLES: usize = 1000;

/// Derives a per-instance extraction seed from a corpus-level seed, so that
/// batch extraction is deterministic regardless of processing order.
pub fn instance_seed(seed: u64, instance_name: &str) -> u64 {
    fnv1a64_extend(fnv1a64(&seed.to_le_bytes()), instance_name.as_bytes())
}

/// Extracts the feature vector. Deterministic given the instance, set and
/// seed; the cheap set skips the excluded graph computations entirely.
pub fn extract(inst: &Instance, set: FeatureSet, seed: u64) -> FeatureVector {
    let started = Instant::now();
    let mut diagnostics = Vec::new();
    let mut values = Vec::with_capacity(set.len());

    let g = build_primal_graph(inst);
    values.push(edge_density(&g));
    if set == FeatureSet::Full {
        values.push(clustering_coefficient(&g));
        let ds = degree_stats(&g);
        values.extend([ds.min, ds.max, ds.mean, ds.median, ds.sd]);
        let wo = width_of_ordering(&g, &inst.ordering).expect("instance ordering is a permutation");
        values.push(wo);
        values.push(width_of_graph(&g));
    }

    if inst.variables.is_empty() {
        diagnostics.push("no variables: domain statistics zeroed".into());
    }
    values.extend(domain_features(inst).as_array());

    if inst.constraints.is_empty() {
        diagnostics.push("no constraints: arity and tightness statistics zeroed".into());
    }
    values.extend(arity_features(inst).as_array());
    values.push(multiple_shared_variables(inst));
    values.push(mean_constraints_per_variable(inst));

    if !inst.variables.is_empty() && inst.variables.iter().all(|v| v.aux) {
        diagnostics.push("all variables auxiliary: aux ratio zeroed".into());
    }
    values.push(aux_ratio(inst));

    values.extend(tightness_features(inst, seed, TIGHTNESS_SAMPLES).as_array());
    values.push(symmetry_proportion(inst));

    if !inst
        .constraints
        .iter()
        .any(|c| matches!(c.kind, ConstraintKind::AllDifferent))
    {
        diagnostics.push("no alldifferent constraints: alldifferent statistics zeroed".into());
    }
    values.extend(alldiff_features(inst).as_array());

    debug_assert_eq!(values.len(), set.len());
    debug_assert!(values.iter().all(|v| v.is_finite()));

    FeatureVector {
        instance: inst.name.clone(),
        feature_set: set,
        values,
        extract_seconds: started.elapsed().as_secs_f64(),
        diagnostics,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureCsvError {
    #[error("features file is empty")]
    Empty,
    #[error("header does not match the full or cheap feature schema")]
    HeaderMismatch,
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: `{text}` is not a finite number")]
    BadNumber { line: usize, text: String },
    #[error("line {line}: duplicate instance `{name}`")]
    DuplicateInstance { line: usize, name: String },
}

fn csv_header(set: FeatureSet) -> String {
    let mut cols = vec!["instance"];
    cols.extend(set.feature_names());
    cols.push("extract_seconds");
    cols.join(",")
}

/// Serialises feature vectors as CSV with full-precision numbers. All
/// vectors must belong to `set`.
pub fn write_features_csv(vectors: &[FeatureVector], set: FeatureSet) -> String {
    let mut out = csv_header(set);
    out.push('\n');
    for fv in vectors {
        assert_eq!(fv.feature_set, set, "mixed feature sets in one file");
        out.push_str(&fv.instance);
        for v in &fv.values {
            out.push(',');
            out.push_str(&format_float(*v));
        }
        out.push(',');
        out.push_str(&format_float(fv.extract_seconds));
        out.push('\n');
    }
    out
}

/// Parses a features CSV, detecting full vs cheap from the header.
pub fn parse_features_csv(text: &str) -> Result<(FeatureSet, Vec<FeatureVector>), FeatureCsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FeatureCsvError::Empty)?;
    let set = if header == csv_header(FeatureSet::Full) {
        FeatureSet::Full
    } else if header == csv_header(FeatureSet::Cheap) {
        FeatureSet::Cheap
    } else {
        return Err(FeatureCsvError::HeaderMismatch);
    };
    let expected = set.len() + 2;
    let mut seen = std::collections::HashSet::new();
    let mut vectors = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            return Err(FeatureCsvError::FieldCount {
                line: lineno,
                expected,
                found: fields.len(),
            });
        }
        let name = fields[0].to_string();
        if !seen.insert(name.clone()) {
            return Err(FeatureCsvError::DuplicateInstance {
                line: lineno,
                name,
            });
        }
        let mut numbers = Vec::with_capacity(expected - 1);
        for field in &fields[1..] {
            let v: f64 = field.parse().map_err(|_| FeatureCsvError::BadNumber {
                line: lineno,
                text: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(FeatureCsvError::BadNumber {
                    line: lineno,
                    text: field.to_string(),
                });
            }
            numbers.push(v);
        }
        let extract_seconds = numbers.pop().unwrap();
        vectors.push(FeatureVector {
            instance: name,
            feature_set: set,
            values: numbers,
            extract_seconds,
            diagnostics: Vec::new(),
        });
    }
    Ok((set, vectors))
}
