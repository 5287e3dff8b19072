//! Synthetic instance and runtime generation with a planted best-solver
//! rule, as a desk-scale stand-in for a real benchmark corpus.
//!
//! Two modes:
//! - `PlantedRule`: the winning solver is a deterministic function of the
//!   alldifferent domain-union ratio (spread scope domains → a propagating
//!   variant wins by the configured margin, tight domains → naive wins), so
//!   the rule is learnable from the extracted features.
//! - `CostStudy`: structurally identical instances where a 30% minority is
//!   fastest with a propagating variant and carries a near-timeout cost
//!   while the 70% majority is naive with a small cost. Learners without
//!   cost-based duplication side with the cheap majority; duplication flips
//!   them to the expensive minority.

use crate::instance::{Constraint, ConstraintKind, ExtPolarity, Instance, RelOp, Variable};
use crate::perf::{RunRecord, RunStatus, RuntimeMatrix, SolverSet};
use crate::util::{fnv1a64, fnv1a64_extend, format_float};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    PlantedRule,
    CostStudy,
}

impl SynthMode {
    pub fn name(self) -> &'static str {
        match self {
            SynthMode::PlantedRule => "planted",
            SynthMode::CostStudy => "cost-study",
        }
    }

    pub fn parse(s: &str) -> Option<SynthMode> {
        match s {
            "planted" => Some(SynthMode::PlantedRule),
            "cost-study" | "cost_study" => Some(SynthMode::CostStudy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub instances: usize,
    pub seed: u64,
    pub mode: SynthMode,
    /// How many seconds the planted winner beats every other solver by.
    pub margin_seconds: f64,
    pub name_prefix: String,
}

impl SynthConfig {
    pub fn new(instances: usize, seed: u64, mode: SynthMode) -> SynthConfig {
        SynthConfig {
            instances,
            seed,
            mode,
            margin_seconds: 10.0,
            name_prefix: "inst".into(),
        }
    }
}

/// Generator bookkeeping: which solver was planted as best, and the
/// instance's cost (maximum misclassification penalty) by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRecord {
    pub instance: String,
    pub best: usize,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub solvers: SolverSet,
    pub instances: Vec<Instance>,
    pub matrix: RuntimeMatrix,
    pub planted: Vec<PlantedRecord>,
}

/// The synthetic solver portfolio: a naive implementation, a default
/// propagating variant that is never planted as best, the variant that wins
/// on spread-domain instances, and one more noise variant.
pub fn synth_solver_set() -> SolverSet {
    SolverSet::new(
        vec![
            "naive".into(),
            "gac_default".into(),
            "gac_hi".into(),
            "gac_lo".into(),
        ],
        0,
        1,
        3600.0,
    )
    .unwrap()
}

const GAC_HI: usize = 2;

pub fn synth_generate(config: &SynthConfig) -> SynthData {
    let solvers = synth_solver_set();
    let mut instances = Vec::with_capacity(config.instances);
    let mut rows = Vec::with_capacity(config.instances);
    let mut planted = Vec::with_capacity(config.instances);
    for i in 0..config.instances {
        let name = format!("{}{:04}", config.name_prefix, i);
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a64_extend(
            fnv1a64(&config.seed.to_le_bytes()),
            name.as_bytes(),
        ));
        let (instance, row, record) = match config.mode {
            SynthMode::PlantedRule => planted_rule_instance(&name, &mut rng, config, &solvers),
            SynthMode::CostStudy => cost_study_instance(&name, &mut rng, config, &solvers),
        };
        instances.push(instance);
        rows.push((name, row));
        planted.push(record);
    }
    let matrix = RuntimeMatrix::from_rows(solvers.clone(), rows).expect("unique synthetic names");
    SynthData {
        solvers,
        instances,
        matrix,
        planted,
    }
}

/// Base CPU seconds for the winner, quantised to milliseconds.
fn base_cpu<R: Rng>(rng: &mut R) -> f64 {
    let t: f64 = rng.random_range(5.0..50.0);
    (t * 1000.0).round() / 1000.0
}

fn planted_rule_instance(
    name: &str,
    rng: &mut ChaCha8Rng,
    config: &SynthConfig,
    solvers: &SolverSet,
) -> (Instance, Vec<RunRecord>, PlantedRecord) {
    let spread = rng.random_bool(0.5);
    let arity = rng.random_range(3..=5usize);
    let extra_vars = rng.random_range(3..=5usize);
    let mut variables = Vec::new();
    for p in 0..arity {
        // spread: pairwise disjoint 3-value domains (union ratio 3);
        // tight: one shared arity-sized domain (union ratio 1)
        let domain: Vec<i64> = if spread {
            let base = (p as i64) * 10;
            (base..base + 3).collect()
        } else {
            (0..arity as i64).collect()
        };
        variables.push(Variable {
            name: format!("s{p}"),
            domain,
            aux: false,
        });
    }
    for p in 0..extra_vars {
        variables.push(Variable {
            name: format!("v{p}"),
            domain: (0..=4).collect(),
            aux: p == 0,
        });
    }
    let mut constraints = vec![Constraint {
        kind: ConstraintKind::AllDifferent,
        scope: (0..arity).collect(),
    }];
    // unrelated binary relations among the extra variables
    let rel_count = rng.random_range(1..=2usize);
    for r in 0..rel_count {
        let a = arity + (r % extra_vars);
        let b = arity + ((r + 1) % extra_vars);
        let op = [RelOp::Lt, RelOp::Le, RelOp::Ne][rng.random_range(0..3usize)];
        constraints.push(Constraint {
            kind: ConstraintKind::Relation {
                op,
                offset: rng.random_range(-1..=1),
            },
            scope: vec![a, b],
        });
    }
    if rng.random_bool(0.5) {
        let a = arity + (rng.random_range(0..extra_vars));
        let b = arity + ((a - arity + 2) % extra_vars);
        if a != b {
            constraints.push(Constraint {
                kind: ConstraintKind::Extension {
                    polarity: ExtPolarity::Forbidden,
                    tuples: vec![vec![0, 0], vec![1, 1]],
                },
                scope: vec![a, b],
            });
        }
    }
    let instance =
        Instance::new(name, variables, constraints, None).expect("generated instance is valid");

    let winner = if spread { GAC_HI } else { solvers.naive };
    let t = base_cpu(rng);
    let margin = config.margin_seconds;
    let nodes_shared = (t * 1000.0) as u64 + 1;
    let row: Vec<RunRecord> = (0..solvers.len())
        .map(|s| {
            let cpu = if s == winner { t } else { t + margin };
            let nodes = if s == solvers.naive {
                (t * 1500.0) as u64 + 1
            } else {
                nodes_shared
            };
            RunRecord {
                cpu_seconds: cpu,
                nodes,
                status: RunStatus::Solved,
            }
        })
        .collect();
    let record = PlantedRecord {
        instance: name.to_string(),
        best: winner,
        cost: margin,
    };
    (instance, row, record)
}

fn cost_study_instance(
    name: &str,
    rng: &mut ChaCha8Rng,
    _config: &SynthConfig,
    solvers: &SolverSet,
) -> (Instance, Vec<RunRecord>, PlantedRecord) {
    // every instance is structurally identical, so no feature separates the
    // expensive minority from the cheap majority
    let variables: Vec<Variable> = (0..6)
        .map(|p| Variable {
            name: format!("v{p}"),
            domain: (0..=4).collect(),
            aux: false,
        })
        .collect();
    let constraints = vec![
        Constraint {
            kind: ConstraintKind::AllDifferent,
            scope: vec![0, 1, 2],
        },
        Constraint {
            kind: ConstraintKind::Relation {
                op: RelOp::Lt,
                offset: 0,
            },
            scope: vec![3, 4],
        },
    ];
    let instance =
        Instance::new(name, variables, constraints, None).expect("generated instance is valid");

    let expensive = rng.random_bool(0.3);
    let t = base_cpu(rng);
    let small = 2.0;
    let (row, winner, cost) = if expensive {
        // the propagating variant wins; naive times out
        let row = (0..solvers.len())
            .map(|s| {
                if s == solvers.naive {
                    RunRecord {
                        cpu_seconds: solvers.timeout_seconds,
                        nodes: 0,
                        status: RunStatus::Timeout,
                    }
                } else {
                    RunRecord {
                        cpu_seconds: if s == GAC_HI { t } else { t + small },
                        nodes: (t * 1000.0) as u64 + 1,
                        status: RunStatus::Solved,
                    }
                }
            })
            .collect();
        (row, GAC_HI, solvers.timeout_seconds - t)
    } else {
        // naive wins by a small margin over everything
        let row = (0..solvers.len())
            .map(|s| RunRecord {
                cpu_seconds: if s == solvers.naive { t } else { t + small },
                nodes: (t * 1000.0) as u64 + 1,
                status: RunStatus::Solved,
            })
            .collect();
        (row, solvers.naive, small)
    };
    let record = PlantedRecord {
        instance: name.to_string(),
        best: winner,
        cost,
    };
    (instance, row, record)
}

pub const PLANTED_CSV_HEADER: &str = "instance,best_solver,cost_seconds";

pub fn write_planted_csv(records: &[PlantedRecord], solvers: &SolverSet) -> String {
    let mut out = String::from(PLANTED_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.instance,
            solvers.names[r.best],
            format_float(r.cost)
        ));
    }
    out
}

/// A large instance whose scope pattern is dense enough that the primal
/// graph attributes dominate extraction time; used for relative cost
/// comparisons between the full and cheap feature sets.
pub fn generate_timing_instance(
    variables: usize,
    cliques: usize,
    clique_arity: usize,
    seed: u64,
) -> Instance {
    assert!(clique_arity <= variables);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<Variable> = (0..variables)
        .map(|i| Variable {
            name: format!("x{i}"),
            domain: (0..400).collect(),
            aux: i % 17 == 0,
        })
        .collect();
    let mut constraints = Vec::new();
    let mut indices: Vec<usize> = (0..variables).collect();
    for _ in 0..cliques {
        // random scope: partial Fisher-Yates over the index pool
        for p in 0..clique_arity {
            let q = rng.random_range(p..variables);
            indices.swap(p, q);
        }
        let mut scope = indices[..clique_arity].to_vec();
        scope.sort_unstable();
        constraints.push(Constraint {
            kind: ConstraintKind::AllDifferent,
            scope,
        });
    }
    for _ in 0..300 {
        let a = rng.random_range(0..variables);
        let mut b = rng.random_range(0..variables);
        if a == b {
            b = (b + 1) % variables;
        }
        constraints.push(Constraint {
            kind: ConstraintKind::Relation {
                op: RelOp::Le,
                offset: 0,
            },
            scope: vec![a, b],
        });
    }
    Instance::new("timing", vars, constraints, None).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perf::{label_instance, LabelClass};

    #[test]
    fn generation_is_reproducible() {
        let config = SynthConfig::new(20, 7, SynthMode::PlantedRule);
        let a = synth_generate(&config);
        let b = synth_generate(&config);
        assert_eq!(a.matrix.render_csv(), b.matrix.render_csv());
        for (x, y) in a.instances.iter().zip(&b.instances) {
            assert_eq!(x.render(), y.render());
        }
        assert_eq!(a.planted, b.planted);
        let c = synth_generate(&SynthConfig::new(20, 8, SynthMode::PlantedRule));
        assert_ne!(a.matrix.render_csv(), c.matrix.render_csv());
    }

    #[test]
    fn labels_match_planted_best_with_zero_noise() {
        for mode in [SynthMode::PlantedRule, SynthMode::CostStudy] {
            let data = synth_generate(&SynthConfig::new(60, 3, mode));
            for record in &data.planted {
                let row = data.matrix.row(&record.instance).unwrap();
                let label = label_instance(row, &data.solvers);
                assert_eq!(
                    label.class,
                    LabelClass::Solver(record.best),
                    "{} ({:?})",
                    record.instance,
                    mode
                );
                assert!(
                    (label.cost - record.cost).abs() < 1e-9,
                    "{}: cost {} vs planted {}",
                    record.instance,
                    label.cost,
                    record.cost
                );
            }
        }
    }

    #[test]
    fn planted_margin_shows_up_as_default_penalty() {
        let config = SynthConfig::new(40, 11, SynthMode::PlantedRule);
        let data = synth_generate(&config);
        let wrong = data
            .planted
            .iter()
            .filter(|r| r.best != data.solvers.default)
            .count();
        // every instance where the default is not planted best costs the margin
        assert_eq!(wrong, 40, "gac_default is never planted best");
        let mut total = 0.0;
        for r in &data.planted {
            let row = data.matrix.row(&r.instance).unwrap();
            total +=
                crate::perf::misclassification_penalty(row, data.solvers.default, &data.solvers)
                    .unwrap();
        }
        assert!((total - 40.0 * config.margin_seconds).abs() < 1e-9);
    }

    #[test]
    fn cost_study_has_expensive_minority() {
        let data = synth_generate(&SynthConfig::new(200, 5, SynthMode::CostStudy));
        let expensive = data.planted.iter().filter(|r| r.cost > 1000.0).count();
        assert!((30..=90).contains(&expensive), "got {expensive} expensive of 200");
        // structural identity: every instance renders identically modulo name
        let strip = |inst: &Instance| inst.render().lines().skip(1).collect::<Vec<_>>().join("\n");
        let first = strip(&data.instances[0]);
        for inst in &data.instances[1..] {
            assert_eq!(strip(inst), first);
        }
    }

    #[test]
    fn timing_instance_is_large_and_valid() {
        let inst = generate_timing_instance(500, 4, 60, 1);
        assert_eq!(inst.variables.len(), 500);
        assert!(inst.constraints.len() > 300);
    }
}
