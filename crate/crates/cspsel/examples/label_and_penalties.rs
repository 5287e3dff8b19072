//! Labeling instances from runtimes and the misclassification-penalty
//! arithmetic that drives both training costs and evaluation.
//!
//! Run with:
//! ```bash
//! cargo run --example label_and_penalties
//! ```

use cspsel::perf::{
    instance_cost, label_instance, misclassification_penalty, LabelClass, RunRecord, RunStatus,
    SolverSet,
};
use cspsel::pipeline::copies_for_cost;

fn solved(cpu: f64, nodes: u64) -> RunRecord {
    RunRecord {
        cpu_seconds: cpu,
        nodes,
        status: RunStatus::Solved,
    }
}

fn main() {
    let solvers = SolverSet::new(
        vec!["naive".into(), "gacalldiff".into(), "gac2001".into()],
        0, // naive
        1, // default
        3600.0,
    )
    .unwrap();
    let timeout = RunRecord {
        cpu_seconds: 3600.0,
        nodes: 0,
        status: RunStatus::Timeout,
    };

    let describe = |label: &cspsel::perf::Label| match label.class {
        LabelClass::Solver(s) => format!("{} (cost {:.0}s)", solvers.names[s], label.cost),
        LabelClass::DontKnow => "dont_know".to_string(),
    };

    // naive strictly fastest: chosen outright
    let row = [solved(10.0, 800), solved(12.0, 5000), solved(15.0, 9000)];
    println!("naive fastest       -> {}", describe(&label_instance(&row, &solvers)));

    // naive slower: nodes per second decides among the propagating variants,
    // because they all explore the same search space
    let row = [solved(20.0, 100), solved(10.0, 1000), solved(12.0, 1800)];
    println!(
        "variant race        -> {}  (gac2001 at 150 nodes/s beats gacalldiff at 100)",
        describe(&label_instance(&row, &solvers))
    );

    // nothing solved: no label, no training weight
    let row = [timeout, timeout, timeout];
    println!("all timeout         -> {}", describe(&label_instance(&row, &solvers)));

    // penalty = chosen CPU minus the fastest; a timed-out choice costs
    // timeout minus fastest (a lower bound on the truth)
    println!("\npenalties on a row with cpus (10, 12, timeout):");
    let row = [solved(10.0, 1), solved(12.0, 1), timeout];
    for s in 0..solvers.len() {
        println!(
            "  choose {:10} -> {:7.0}s",
            solvers.names[s],
            misclassification_penalty(&row, s, &solvers).unwrap()
        );
    }
    println!("  instance cost (max penalty): {:.0}s", instance_cost(&row, &solvers));

    // the cost decides how often the instance is duplicated for training
    println!("\ncost-based duplication (1 + ceil(log2(cost)) copies, min 1):");
    for cost in [0.0, 1.0, 2.0, 10.0, 100.0, 3600.0] {
        println!("  cost {cost:7.1}s -> {:2} copies", copies_for_cost(cost));
    }
}
