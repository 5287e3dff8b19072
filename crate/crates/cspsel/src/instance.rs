//! CSP instance data model and constraint semantics.
//!
//! An [`Instance`] is a set of finite-domain variables plus a list of
//! constraints over them, together with a variable ordering (explicit or, by
//! default, declaration order). Instances are immutable after construction
//! and safe to share read-only across threads.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary relation operators usable in `rel` constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<RelOp> {
        Some(match s {
            "=" => RelOp::Eq,
            "!=" => RelOp::Ne,
            "<" => RelOp::Lt,
            "<=" => RelOp::Le,
            ">" => RelOp::Gt,
            ">=" => RelOp::Ge,
            _ => return None,
        })
    }

    fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            RelOp::Eq => lhs == rhs,
            RelOp::Ne => lhs != rhs,
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Gt => lhs > rhs,
            RelOp::Ge => lhs >= rhs,
        }
    }
}

/// Whether an extension constraint lists allowed or forbidden tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtPolarity {
    Allowed,
    Forbidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// All scope variables take pairwise distinct values.
    AllDifferent,
    /// Explicit tuple list; `tuples` is sorted and duplicate-free, every
    /// tuple has length equal to the scope arity.
    Extension {
        polarity: ExtPolarity,
        tuples: Vec<Vec<i64>>,
    },
    /// Binary `x op (y + offset)` over scope `(x, y)`.
    Relation { op: RelOp, offset: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    /// Variable indices into `Instance::variables`; no repeats.
    pub scope: Vec<usize>,
}

impl Constraint {
    pub fn arity(&self) -> usize {
        self.scope.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// Finite non-empty domain, stored sorted ascending without duplicates.
    pub domain: Vec<i64>,
    /// Introduced by decomposition rather than the original model.
    pub aux: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Permutation of variable indices; defaults to declaration order.
    pub ordering: Vec<usize>,
}

/// Structural invariant violations detected when assembling an instance.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{0}` has duplicate domain values")]
    DuplicateDomainValue(String),
    #[error("constraint {index} references variable index {var} out of range")]
    ScopeOutOfRange { index: usize, var: usize },
    #[error("constraint {0} repeats a variable in its scope")]
    RepeatedScopeVariable(usize),
    #[error("constraint {0} has arity 0")]
    EmptyScope(usize),
    #[error("alldifferent constraint {0} has arity < 2")]
    AllDifferentArity(usize),
    #[error("relation constraint {0} must have arity exactly 2")]
    RelationArity(usize),
    #[error("extension constraint {index} has a tuple of length {got}, expected {expected}")]
    TupleLength {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("ordering is not a permutation of all variable indices")]
    BadOrdering,
}

/// Runtime misuse of constraint semantics.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("assignment has {got} values but the constraint has arity {expected}")]
    ArityMismatch { got: usize, expected: usize },
    #[error("value {value} is outside the domain of variable `{variable}`")]
    OutsideDomain { variable: String, value: i64 },
}

impl Instance {
    /// Assembles an instance, checking every structural invariant. Extension
    /// tuple lists are sorted and deduplicated.
    pub fn new(
        name: impl Into<String>,
        variables: Vec<Variable>,
        mut constraints: Vec<Constraint>,
        ordering: Option<Vec<usize>>,
    ) -> Result<Instance, ValidationError> {
        let mut seen = std::collections::HashSet::new();
        for v in &variables {
            if !seen.insert(v.name.clone()) {
                return Err(ValidationError::DuplicateVariable(v.name.clone()));
            }
            if v.domain.is_empty() {
                return Err(ValidationError::EmptyDomain(v.name.clone()));
            }
            let mut sorted = v.domain.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != v.domain.len() {
                return Err(ValidationError::DuplicateDomainValue(v.name.clone()));
            }
        }
        let mut variables = variables;
        for v in &mut variables {
            v.domain.sort_unstable();
        }

        for (index, c) in constraints.iter_mut().enumerate() {
            if c.scope.is_empty() {
                return Err(ValidationError::EmptyScope(index));
            }
            let mut in_scope = std::collections::HashSet::new();
            for &var in &c.scope {
                if var >= variables.len() {
                    return Err(ValidationError::ScopeOutOfRange { index, var });
                }
                if !in_scope.insert(var) {
                    return Err(ValidationError::RepeatedScopeVariable(index));
                }
            }
            match &mut c.kind {
                ConstraintKind::AllDifferent => {
                    if c.scope.len() < 2 {
                        return Err(ValidationError::AllDifferentArity(index));
                    }
                }
                ConstraintKind::Relation { .. } => {
                    if c.scope.len() != 2 {
                        return Err(ValidationError::RelationArity(index));
                    }
                }
                ConstraintKind::Extension { tuples, .. } => {
                    for t in tuples.iter() {
                        if t.len() != c.scope.len() {
                            return Err(ValidationError::TupleLength {
                                index,
                                got: t.len(),
                                expected: c.scope.len(),
                            });
                        }
                    }
                    tuples.sort_unstable();
                    tuples.dedup();
                }
            }
        }

        let ordering = match ordering {
            Some(ord) => {
                if !is_permutation(&ord, variables.len()) {
                    return Err(ValidationError::BadOrdering);
                }
                ord
            }
            None => (0..variables.len()).collect(),
        };

        Ok(Instance {
            name: name.into(),
            variables,
            constraints,
            ordering,
        })
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Tests whether `assignment` (one value per scope position) satisfies
    /// the constraint, after validating arity and domain membership.
    pub fn satisfies(&self, c: &Constraint, assignment: &[i64]) -> Result<bool, SemanticsError> {
        if assignment.len() != c.arity() {
            return Err(SemanticsError::ArityMismatch {
                got: assignment.len(),
                expected: c.arity(),
            });
        }
        for (&var, &value) in c.scope.iter().zip(assignment) {
            let v = &self.variables[var];
            if v.domain.binary_search(&value).is_err() {
                return Err(SemanticsError::OutsideDomain {
                    variable: v.name.clone(),
                    value,
                });
            }
        }
        Ok(eval_constraint(c, assignment))
    }

    /// Draws one tuple with each position independently uniform over the
    /// corresponding variable's domain. Deterministic given the rng state.
    pub fn sample_valid_tuple<R: Rng + ?Sized>(&self, c: &Constraint, rng: &mut R) -> Vec<i64> {
        c.scope
            .iter()
            .map(|&var| {
                let d = &self.variables[var].domain;
                d[rng.random_range(0..d.len())]
            })
            .collect()
    }

    /// Renders the instance in the textual format accepted by
    /// [`parse_instance`](crate::parse::parse_instance). The ordering is
    /// always emitted explicitly, so `parse(render(inst)) == inst`.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "instance {}", self.name).unwrap();
        for v in &self.variables {
            let aux = if v.aux { " aux" } else { "" };
            let domain = v
                .domain
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "var {}{} {{{}}}", v.name, aux, domain).unwrap();
        }
        if !self.variables.is_empty() {
            let order = self
                .ordering
                .iter()
                .map(|&i| self.variables[i].name.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "order {}", order).unwrap();
        }
        for c in &self.constraints {
            let scope = c
                .scope
                .iter()
                .map(|&i| self.variables[i].name.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            match &c.kind {
                ConstraintKind::AllDifferent => {
                    writeln!(out, "con alldifferent ( {} )", scope).unwrap();
                }
                ConstraintKind::Relation { op, offset } => {
                    let x = self.variables[c.scope[0]].name.as_str();
                    let y = self.variables[c.scope[1]].name.as_str();
                    if *offset == 0 {
                        writeln!(out, "con rel {} {} {}", x, op.symbol(), y).unwrap();
                    } else {
                        writeln!(out, "con rel {} {} {} + {}", x, op.symbol(), y, offset).unwrap();
                    }
                }
                ConstraintKind::Extension { polarity, tuples } => {
                    let pol = match polarity {
                        ExtPolarity::Allowed => "allowed",
                        ExtPolarity::Forbidden => "forbidden",
                    };
                    let body = tuples
                        .iter()
                        .map(|t| {
                            format!(
                                "({})",
                                t.iter()
                                    .map(|x| x.to_string())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            )
                        })
                        .collect::<Vec<_>>()
                        .join(" ; ");
                    writeln!(out, "con ext {} ( {} ) {{ {} }}", pol, scope, body).unwrap();
                }
            }
        }
        out
    }
}

/// Constraint truth value on an arity-checked assignment.
pub(crate) fn eval_constraint(c: &Constraint, assignment: &[i64]) -> bool {
    match &c.kind {
        ConstraintKind::AllDifferent => {
            // pairwise check with early exit; sampled wide scopes collide
            // within a few positions, so this beats sorting
            for i in 1..assignment.len() {
                for j in 0..i {
                    if assignment[i] == assignment[j] {
                        return false;
                    }
                }
            }
            true
        }
        ConstraintKind::Extension { polarity, tuples } => {
            let member = tuples.binary_search_by(|t| t.as_slice().cmp(assignment)).is_ok();
            match polarity {
                ExtPolarity::Allowed => member,
                ExtPolarity::Forbidden => !member,
            }
        }
        ConstraintKind::Relation { op, offset } => {
            op.eval(assignment[0], assignment[1].wrapping_add(*offset))
        }
    }
}

pub(crate) fn is_permutation(ord: &[usize], n: usize) -> bool {
    if ord.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in ord {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}
