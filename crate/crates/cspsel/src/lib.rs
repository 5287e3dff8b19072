//! Per-instance selection among alldifferent constraint implementations.
//!
//! Given CSP instances and solver runtime data, this crate extracts 37
//! instance attributes (or a cheap 29-attribute subset), labels each
//! instance with the implementation that performed best, trains a bank of
//! cost-sensitive hierarchical classifiers under stratified cross-validation
//! and combines them into a majority-vote meta-classifier, evaluated by
//! misclassification penalty against oracle/anti-oracle/default/random
//! baselines.
//!
//! The runnable examples under `examples/` walk through each capability;
//! the `cspsel` binary exposes the same operations as subcommands
//! (`extract`, `label`, `train`, `predict`, `evaluate`, `synth`, `report`).

pub mod eval;
pub mod features;
pub mod graph;
pub mod instance;
pub mod learners;
pub mod parse;
pub mod perf;
pub mod pipeline;
pub mod symmetry;
pub mod synth;

mod util;

pub use instance::{Constraint, ConstraintKind, Instance, Variable};
pub use parse::parse_instance;
