//! Cross-module invariants: parser round-trips, semantics oracles, graph
//! relabeling invariance, refinement soundness against brute-force variable
//! orbits, penalty bounds and ensemble vote properties.

use cspsel::features::{extract, FeatureSet};
use cspsel::graph::{clustering_coefficient, edge_density, PrimalGraph};
use cspsel::instance::{Constraint, ConstraintKind, ExtPolarity, Instance, RelOp, Variable};
use cspsel::parse::parse_instance;
use cspsel::perf::{
    instance_cost, label_instance, misclassification_penalty, LabelClass, RunRecord, RunStatus,
    SolverSet,
};
use cspsel::symmetry::refine_variable_classes;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

// ---------------------------------------------------------------------------
// random instance generation (shared by the seeded-loop properties)
// ---------------------------------------------------------------------------

fn random_small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let nv = rng.random_range(2..=6usize);
    let domain_pool: [&[i64]; 4] = [&[0, 1], &[0, 1, 2], &[1, 2], &[0, 2]];
    let variables: Vec<Variable> = (0..nv)
        .map(|i| Variable {
            name: format!("v{i}"),
            domain: domain_pool[rng.random_range(0..domain_pool.len())].to_vec(),
            aux: rng.random_bool(0.2),
        })
        .collect();
    let nc = rng.random_range(0..=3usize);
    let mut constraints = Vec::new();
    for _ in 0..nc {
        let arity = rng.random_range(2..=3usize.min(nv));
        let mut scope: Vec<usize> = (0..nv).collect();
        for p in 0..arity {
            let q = rng.random_range(p..nv);
            scope.swap(p, q);
        }
        scope.truncate(arity);
        let kind = match rng.random_range(0..3) {
            0 => ConstraintKind::AllDifferent,
            1 => {
                scope.truncate(2);
                ConstraintKind::Relation {
                    op: [RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge]
                        [rng.random_range(0..6)],
                    offset: rng.random_range(-1..=1),
                }
            }
            _ => {
                let tuples: Vec<Vec<i64>> = (0..rng.random_range(1..=6))
                    .map(|_| (0..scope.len()).map(|_| rng.random_range(0..3i64)).collect())
                    .collect();
                ConstraintKind::Extension {
                    polarity: if rng.random_bool(0.5) {
                        ExtPolarity::Allowed
                    } else {
                        ExtPolarity::Forbidden
                    },
                    tuples,
                }
            }
        };
        constraints.push(Constraint { kind, scope });
    }
    Instance::new("prop", variables, constraints, None).unwrap()
}

// ---------------------------------------------------------------------------
// parser round-trip (proptest)
// ---------------------------------------------------------------------------

fn domain_strategy() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(-9i64..9, 1..5).prop_map(|s| s.into_iter().collect())
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (2usize..6, proptest::collection::vec((domain_strategy(), any::<bool>()), 6))
        .prop_flat_map(|(nv, domains)| {
            let variables: Vec<Variable> = (0..nv)
                .map(|i| Variable {
                    name: format!("v{i}"),
                    domain: domains[i].0.clone(),
                    aux: domains[i].1,
                })
                .collect();
            let con = (0u8..3, proptest::collection::vec(0..nv, 2), -3i64..3).prop_map(
                move |(kind, scope_seed, off)| {
                    let a = scope_seed[0];
                    let b = (scope_seed[0] + 1 + scope_seed[1] % (nv - 1)) % nv;
                    match kind {
                        0 => Constraint {
                            kind: ConstraintKind::AllDifferent,
                            scope: vec![a, b],
                        },
                        1 => Constraint {
                            kind: ConstraintKind::Relation {
                                op: [RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le][off.unsigned_abs() as usize % 4],
                                offset: off,
                            },
                            scope: vec![a, b],
                        },
                        _ => Constraint {
                            kind: ConstraintKind::Extension {
                                polarity: if off >= 0 {
                                    ExtPolarity::Allowed
                                } else {
                                    ExtPolarity::Forbidden
                                },
                                tuples: vec![vec![off, -off], vec![0, off]],
                            },
                            scope: vec![a, b],
                        },
                    }
                },
            );
            (
                Just(variables),
                proptest::collection::vec(con, 0..4),
                proptest::sample::subsequence((0..nv).collect::<Vec<_>>(), nv),
            )
        })
        .prop_map(|(variables, constraints, order)| {
            Instance::new("roundtrip", variables, constraints, Some(order)).unwrap()
        })
}

proptest! {
    #[test]
    fn parse_render_round_trip(inst in instance_strategy()) {
        let rendered = inst.render();
        let reparsed = parse_instance(&rendered).unwrap();
        prop_assert_eq!(inst, reparsed);
    }
}

// ---------------------------------------------------------------------------
// satisfies agrees with brute-force membership on extension constraints
// ---------------------------------------------------------------------------

#[test]
fn extension_satisfies_matches_membership_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked_constraints = 0;
    for _ in 0..200 {
        let inst = random_small_instance(&mut rng);
        for c in &inst.constraints {
            let (polarity, tuples) = match &c.kind {
                ConstraintKind::Extension { polarity, tuples } => (polarity, tuples),
                _ => continue,
            };
            let members: HashSet<&Vec<i64>> = tuples.iter().collect();
            let domains: Vec<&[i64]> = c
                .scope
                .iter()
                .map(|&v| inst.variables[v].domain.as_slice())
                .collect();
            let product: usize = domains.iter().map(|d| d.len()).product();
            assert!(product <= 10_000);
            let mut idx = vec![0usize; domains.len()];
            for _ in 0..product {
                let tuple: Vec<i64> = idx.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
                let want = match polarity {
                    ExtPolarity::Allowed => members.contains(&tuple),
                    ExtPolarity::Forbidden => !members.contains(&tuple),
                };
                assert_eq!(inst.satisfies(c, &tuple).unwrap(), want);
                for pos in (0..idx.len()).rev() {
                    idx[pos] += 1;
                    if idx[pos] < domains[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
            checked_constraints += 1;
        }
    }
    assert!(checked_constraints > 30, "too few extension constraints generated");
}

// ---------------------------------------------------------------------------
// graph feature invariance under vertex relabeling
// ---------------------------------------------------------------------------

#[test]
fn graph_features_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..100 {
        let n = rng.random_range(2..9usize);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for p in 0..n {
            let q = rng.random_range(p..n);
            perm.swap(p, q);
        }
        let relabeled: Vec<(usize, usize)> =
            edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let g = PrimalGraph::from_edges(n, &edges);
        let h = PrimalGraph::from_edges(n, &relabeled);
        assert!((edge_density(&g) - edge_density(&h)).abs() < 1e-12);
        assert!((clustering_coefficient(&g) - clustering_coefficient(&h)).abs() < 1e-12);
    }
}

// ---------------------------------------------------------------------------
// refinement is coarser than (or equal to) the true orbit partition
// ---------------------------------------------------------------------------

/// Scope as a set plus the full set of satisfying assignments written as
/// sorted (variable, value) pairs.
type SemanticKey = (Vec<usize>, Vec<Vec<(usize, i64)>>);

/// Semantic key of a constraint.
fn semantic_key(inst: &Instance, c: &Constraint) -> SemanticKey {
    let mut scope_set = c.scope.clone();
    scope_set.sort_unstable();
    let domains: Vec<&[i64]> = c
        .scope
        .iter()
        .map(|&v| inst.variables[v].domain.as_slice())
        .collect();
    let product: usize = domains.iter().map(|d| d.len()).product();
    let mut sat = Vec::new();
    let mut idx = vec![0usize; domains.len()];
    for _ in 0..product {
        let tuple: Vec<i64> = idx.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
        if inst.satisfies(c, &tuple).unwrap() {
            let mut assignment: Vec<(usize, i64)> =
                c.scope.iter().copied().zip(tuple.iter().copied()).collect();
            assignment.sort_unstable();
            sat.push(assignment);
        }
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    sat.sort_unstable();
    (scope_set, sat)
}

fn apply_perm_to_key(key: &SemanticKey, perm: &[usize]) -> SemanticKey {
    let mut scope: Vec<usize> = key.0.iter().map(|&v| perm[v]).collect();
    scope.sort_unstable();
    let mut sat: Vec<Vec<(usize, i64)>> = key
        .1
        .iter()
        .map(|assignment| {
            let mut mapped: Vec<(usize, i64)> =
                assignment.iter().map(|&(v, x)| (perm[v], x)).collect();
            mapped.sort_unstable();
            mapped
        })
        .collect();
    sat.sort_unstable();
    (scope, sat)
}

/// True orbit partition by exhaustive automorphism search: a permutation of
/// the variables is an automorphism when it preserves domains, aux flags and
/// the multiset of constraint semantics.
fn brute_force_orbit_ids(inst: &Instance) -> Vec<usize> {
    let n = inst.variables.len();
    let keys: Vec<_> = inst
        .constraints
        .iter()
        .map(|c| semantic_key(inst, c))
        .collect();
    let mut key_counts: HashMap<SemanticKey, usize> = HashMap::new();
    for k in &keys {
        *key_counts.entry(k.clone()).or_insert(0) += 1;
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        if parent[v] != v {
            let root = find(parent, parent[v]);
            parent[v] = root;
        }
        parent[v]
    }

    // enumerate all permutations iteratively
    let identity: Vec<usize> = (0..n).collect();
    let mut stack = vec![(0usize, identity)];
    let mut all_perms = Vec::new();
    while let Some((k, p)) = stack.pop() {
        if k == n {
            all_perms.push(p);
            continue;
        }
        for i in k..n {
            let mut q = p.clone();
            q.swap(k, i);
            stack.push((k + 1, q));
        }
    }

    for p in all_perms {
        let vars_ok = p.iter().enumerate().all(|(v, &pv)| {
            inst.variables[v].domain == inst.variables[pv].domain
                && inst.variables[v].aux == inst.variables[pv].aux
        });
        if !vars_ok {
            continue;
        }
        let mut mapped_counts: HashMap<SemanticKey, usize> = HashMap::new();
        for k in &keys {
            *mapped_counts.entry(apply_perm_to_key(k, &p)).or_insert(0) += 1;
        }
        if mapped_counts != key_counts {
            continue;
        }
        for (v, &pv) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, pv));
            if a != b {
                parent[a] = b;
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

#[test]
fn refinement_never_splits_interchangeable_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for trial in 0..250 {
        let inst = random_small_instance(&mut rng);
        let orbits = brute_force_orbit_ids(&inst);
        let classes = refine_variable_classes(&inst);
        for i in 0..inst.variables.len() {
            for j in (i + 1)..inst.variables.len() {
                if orbits[i] == orbits[j] {
                    assert_eq!(
                        classes[i], classes[j],
                        "trial {trial}: refinement split interchangeable variables {i},{j}\n{}",
                        inst.render()
                    );
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// penalty and labeling properties on random runtime rows
// ---------------------------------------------------------------------------

#[test]
fn penalty_bounds_and_label_sanity() {
    let solvers = SolverSet::new(
        (0..6).map(|i| format!("s{i}")).collect(),
        0,
        2,
        3600.0,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..2000 {
        let row: Vec<RunRecord> = (0..solvers.len())
            .map(|_| {
                if rng.random_bool(0.8) {
                    RunRecord {
                        cpu_seconds: rng.random_range(0.0..3600.0),
                        nodes: rng.random_range(0..100_000),
                        status: RunStatus::Solved,
                    }
                } else {
                    RunRecord {
                        cpu_seconds: 3600.0,
                        nodes: 0,
                        status: RunStatus::Timeout,
                    }
                }
            })
            .collect();
        let any_solved = row.iter().any(|r| r.status == RunStatus::Solved);
        let label = label_instance(&row, &solvers);
        if !any_solved {
            assert_eq!(label.class, LabelClass::DontKnow);
            assert_eq!(instance_cost(&row, &solvers), 0.0);
            continue;
        }
        // the labeled solver always solved
        match label.class {
            LabelClass::Solver(s) => assert_eq!(row[s].status, RunStatus::Solved),
            LabelClass::DontKnow => panic!("dont_know despite a solved solver"),
        }
        // fastest solver has zero penalty; all penalties within [0, timeout];
        // cost is the max penalty
        let fastest = (0..row.len())
            .filter(|&i| row[i].status == RunStatus::Solved)
            .min_by(|&a, &b| row[a].cpu_seconds.partial_cmp(&row[b].cpu_seconds).unwrap())
            .unwrap();
        assert_eq!(misclassification_penalty(&row, fastest, &solvers).unwrap(), 0.0);
        let mut max_penalty = 0.0f64;
        for s in 0..row.len() {
            let p = misclassification_penalty(&row, s, &solvers).unwrap();
            assert!((0.0..=3600.0).contains(&p));
            max_penalty = max_penalty.max(p);
        }
        assert_eq!(instance_cost(&row, &solvers), max_penalty);
        assert_eq!(label.cost, max_penalty);
    }
}

// ---------------------------------------------------------------------------
// unanimity: if every member is right, the meta vote is right
// ---------------------------------------------------------------------------

#[test]
fn unanimous_members_make_the_meta_correct() {
    use cspsel::learners::Learner;
    use cspsel::pipeline::{train_meta, LabeledRow};
    use cspsel::synth::{synth_generate, SynthConfig, SynthMode};

    let data = synth_generate(&SynthConfig::new(60, 17, SynthMode::PlantedRule));
    let labels = cspsel::perf::label_matrix(&data.matrix);
    let rows: Vec<LabeledRow> = data
        .instances
        .iter()
        .zip(&labels)
        .map(|(inst, (_, label))| LabeledRow {
            instance: inst.name.clone(),
            values: extract(inst, FeatureSet::Cheap, 3).values,
            label: label.class,
            cost: label.cost,
        })
        .collect();
    let ensemble = train_meta(
        &rows,
        &Learner::default_bank(),
        3,
        9,
        false,
        &data.solvers,
        FeatureSet::Cheap,
    )
    .unwrap();
    let mut unanimous_seen = 0;
    for row in &rows {
        let votes: Vec<usize> = ensemble
            .members
            .iter()
            .map(|m| m.model.predict(&row.values).unwrap())
            .collect();
        if let LabelClass::Solver(want) = row.label {
            if votes.iter().all(|&v| v == want) {
                unanimous_seen += 1;
                assert_eq!(ensemble.predict(&row.values).unwrap(), want);
            }
        }
    }
    assert!(unanimous_seen > 0, "no unanimous instances to check");
}
