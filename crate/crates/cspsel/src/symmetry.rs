//! Symmetric-variable detection by iterative colour refinement.
//!
//! Variables and constraints form a bipartite graph: one vertex per variable
//! (initially coloured by domain and aux flag), one per constraint (coloured
//! by a canonical descriptor of its semantics), with an edge per scope
//! position. Positions that are interchangeable under the constraint's
//! tuple-set symmetry group share an edge label, so refinement cannot split
//! variables that only differ by such a position swap. The refinement
//! partition is a sound over-approximation of the variable orbit partition:
//! it may merge variables a full automorphism search would separate, but
//! never splits truly interchangeable ones (for extension constraints this
//! holds up to the arity-4 cap on the permutation test).

use crate::instance::{Constraint, ConstraintKind, ExtPolarity, Instance, RelOp};
use std::collections::BTreeMap;

/// Proportion of variable pairs that the refinement partition places in the
/// same part: `Σ_parts C(|part|,2) / C(#vars,2)`, 0 when fewer than 2
/// variables.
pub fn symmetry_proportion(inst: &Instance) -> f64 {
    let nv = inst.variables.len();
    if nv < 2 {
        return 0.0;
    }
    let parts = refine_partition(inst);
    let same: u64 = parts.iter().map(|s| pairs(*s)).sum();
    same as f64 / pairs(nv) as f64
}

/// Sizes of the variable colour classes at the refinement fixpoint, sorted
/// descending. Exposed for inspection and tests.
pub fn refine_partition(inst: &Instance) -> Vec<usize> {
    let classes = refine_variable_classes(inst);
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for c in classes {
        *counts.entry(c).or_insert(0) += 1;
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Final colour id per variable (two variables are in one part of the
/// refinement partition iff their ids are equal).
pub fn refine_variable_classes(inst: &Instance) -> Vec<u32> {
    let nv = inst.variables.len();
    let nc = inst.constraints.len();
    let total = nv + nc;

    // initial colours; variable domains are interned by reference to avoid
    // cloning large domains
    let mut domain_ids: BTreeMap<(&[i64], bool), u32> = BTreeMap::new();
    let mut colour = vec![0u32; total];
    for (i, v) in inst.variables.iter().enumerate() {
        let next = domain_ids.len() as u32;
        colour[i] = *domain_ids.entry((&v.domain, v.aux)).or_insert(next);
    }
    let mut key_ids: BTreeMap<InitKey, u32> = BTreeMap::new();
    let colour_base = domain_ids.len() as u32;
    let mut labels_per_con: Vec<Vec<u32>> = Vec::with_capacity(nc);
    for (i, c) in inst.constraints.iter().enumerate() {
        let (key, labels) = constraint_signature(c, inst);
        let next = colour_base + key_ids.len() as u32;
        colour[nv + i] = *key_ids.entry(key).or_insert(next);
        labels_per_con.push(labels);
    }

    // incidences: (edge label, other endpoint)
    let mut incident: Vec<Vec<(u32, usize)>> = vec![Vec::new(); total];
    for (i, c) in inst.constraints.iter().enumerate() {
        for (p, &var) in c.scope.iter().enumerate() {
            let label = labels_per_con[i][p];
            incident[var].push((label, nv + i));
            incident[nv + i].push((label, var));
        }
    }

    // refine to fixpoint: a vertex's new colour is its old colour plus the
    // sorted multiset of (edge label, neighbour colour)
    let mut num_colours = domain_ids.len() + key_ids.len();
    loop {
        let mut sig_ids: BTreeMap<(u32, Vec<(u32, u32)>), u32> = BTreeMap::new();
        let mut next_colour = vec![0u32; total];
        for v in 0..total {
            let mut sig: Vec<(u32, u32)> = incident[v]
                .iter()
                .map(|&(label, u)| (label, colour[u]))
                .collect();
            sig.sort_unstable();
            let next = sig_ids.len() as u32;
            next_colour[v] = *sig_ids.entry((colour[v], sig)).or_insert(next);
        }
        let new_count = sig_ids.len();
        colour = next_colour;
        if new_count == num_colours {
            break;
        }
        num_colours = new_count;
    }

    colour.truncate(nv);
    colour
}

fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Initial constraint colour keys; variable colours come from domain
/// interning and use a disjoint id range, so the two vertex kinds can never
/// collide.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum InitKey {
    /// arity, canonical satisfying-tuple table (small scopes of any kind)
    Sem(usize, Vec<Vec<i64>>),
    AllDiff(usize),
    /// canonical op discriminant, canonical offset
    Rel(u8, i64),
    /// polarity, arity, canonical tuple list
    Ext(bool, usize, Vec<Vec<i64>>),
}

/// Canonical descriptor of a constraint plus one edge label per scope
/// position. Two constraints that are position-permuted copies of each other
/// receive the same descriptor, with labels that correspond under the
/// permutation.
///
/// Small scopes are described purely semantically (the enumerated satisfying
/// tuples), so that syntactically different but semantically identical
/// constraints share a colour. Larger scopes fall back to kind-specific
/// analytic descriptors; the regime boundary depends only on arity and
/// domain sizes, both of which any automorphism preserves, so the two
/// regimes can never be asked to match each other.
fn constraint_signature(c: &Constraint, inst: &Instance) -> (InitKey, Vec<u32>) {
    let product: u128 = c
        .scope
        .iter()
        .map(|&v| inst.variables[v].domain.len() as u128)
        .fold(1u128, |acc, d| acc.saturating_mul(d));
    if c.arity() <= MAX_SYMMETRY_ARITY && product <= SEMANTIC_TABLE_CAP as u128 {
        let table = satisfying_table(c, inst);
        let (canonical, labels) = canonical_tuple_set(&table, c.arity());
        return (InitKey::Sem(c.arity(), canonical), labels);
    }
    match &c.kind {
        ConstraintKind::AllDifferent => {
            // fully position-symmetric
            (InitKey::AllDiff(c.arity()), vec![0; c.arity()])
        }
        ConstraintKind::Relation { op, offset } => relation_signature(*op, *offset),
        ConstraintKind::Extension { polarity, tuples } => {
            let allowed = *polarity == ExtPolarity::Allowed;
            // restrict to tuples realisable within the scope's domains so the
            // descriptor reflects the constraint's semantics
            let filtered: Vec<Vec<i64>> = tuples
                .iter()
                .filter(|t| {
                    t.iter().zip(&c.scope).all(|(value, &var)| {
                        inst.variables[var].domain.binary_search(value).is_ok()
                    })
                })
                .cloned()
                .collect();
            let k = c.arity();
            if k > MAX_SYMMETRY_ARITY {
                // positional labels; may split symmetric positions
                return (
                    InitKey::Ext(allowed, k, filtered),
                    (0..k as u32).collect(),
                );
            }
            let (canonical, labels) = canonical_tuple_set(&filtered, k);
            (InitKey::Ext(allowed, k, canonical), labels)
        }
    }
}

/// All scope assignments that satisfy the constraint, enumerated over the
/// domain product.
fn satisfying_table(c: &Constraint, inst: &Instance) -> Vec<Vec<i64>> {
    let domains: Vec<&[i64]> = c
        .scope
        .iter()
        .map(|&v| inst.variables[v].domain.as_slice())
        .collect();
    let total: usize = domains.iter().map(|d| d.len()).product();
    let mut table = Vec::new();
    let mut idx = vec![0usize; domains.len()];
    for _ in 0..total {
        let tuple: Vec<i64> = idx.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
        if crate::instance::eval_constraint(c, &tuple) {
            table.push(tuple);
        }
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    table
}

/// Position-permutation testing is arity! per constraint; beyond this cap
/// positions are labelled by index.
pub const MAX_SYMMETRY_ARITY: usize = 4;

/// Scopes whose domain product is at most this are described by their full
/// satisfying table; larger scopes use the analytic per-kind descriptors.
pub const SEMANTIC_TABLE_CAP: usize = 1000;

/// `x op (y + offset)` rewritten so that `>`/`>=` fold onto `<`/`<=` with the
/// scope roles swapped, and `=`/`!=` use |offset| with roles chosen by sign.
/// Labels are per stored scope position; equal labels mean interchangeable.
fn relation_signature(op: RelOp, offset: i64) -> (InitKey, Vec<u32>) {
    match op {
        RelOp::Eq | RelOp::Ne => {
            let disc = if op == RelOp::Eq { 0 } else { 1 };
            if offset == 0 {
                (InitKey::Rel(disc, 0), vec![0, 0])
            } else if offset > 0 {
                (InitKey::Rel(disc, offset), vec![0, 1])
            } else {
                (InitKey::Rel(disc, -offset), vec![1, 0])
            }
        }
        RelOp::Lt => (InitKey::Rel(2, offset), vec![0, 1]),
        RelOp::Le => (InitKey::Rel(3, offset), vec![0, 1]),
        // x > y + o  <=>  y < x - o
        RelOp::Gt => (InitKey::Rel(2, -offset), vec![1, 0]),
        RelOp::Ge => (InitKey::Rel(3, -offset), vec![1, 0]),
    }
}

/// Minimises the sorted tuple list over all position permutations. The label
/// of position `i` is the smallest canonical slot `i` can occupy among the
/// minimising permutations, which is constant on orbits of the tuple set's
/// symmetry group and consistent across permuted copies of the constraint.
fn canonical_tuple_set(tuples: &[Vec<i64>], arity: usize) -> (Vec<Vec<i64>>, Vec<u32>) {
    let perms = permutations(arity);
    let mut best: Option<Vec<Vec<i64>>> = None;
    let mut minimisers: Vec<&Vec<usize>> = Vec::new();
    for perm in &perms {
        let mut mapped: Vec<Vec<i64>> = tuples
            .iter()
            .map(|t| perm.iter().map(|&j| t[j]).collect())
            .collect();
        mapped.sort_unstable();
        match &best {
            None => {
                best = Some(mapped);
                minimisers.push(perm);
            }
            Some(current) => match mapped.cmp(current) {
                std::cmp::Ordering::Less => {
                    best = Some(mapped);
                    minimisers.clear();
                    minimisers.push(perm);
                }
                std::cmp::Ordering::Equal => minimisers.push(perm),
                std::cmp::Ordering::Greater => {}
            },
        }
    }
    // slot j of a minimiser perm holds original position perm[j]
    let mut labels = vec![u32::MAX; arity];
    for perm in &minimisers {
        for (slot, &orig) in perm.iter().enumerate() {
            labels[orig] = labels[orig].min(slot as u32);
        }
    }
    (best.unwrap(), labels)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    heap_permute(&mut current, k, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
