//! Training the hierarchical majority-vote meta-classifier on synthetic
//! planted-rule data, then persisting and reloading it.
//!
//! Run with:
//! ```bash
//! cargo run --release --example train_meta_classifier
//! ```

use cspsel::features::{extract, instance_seed, FeatureSet};
use cspsel::learners::Learner;
use cspsel::perf::label_matrix;
use cspsel::pipeline::{
    describe_ensemble, duplicate_by_cost, load_ensemble, save_ensemble, train_meta, LabeledRow,
};
use cspsel::synth::{synth_generate, SynthConfig, SynthMode};

fn main() {
    // 120 instances where the alldifferent domain-union ratio decides the
    // winner: spread domains -> gac_hi, tight domains -> naive
    let data = synth_generate(&SynthConfig::new(120, 21, SynthMode::PlantedRule));
    println!("generated {} instances with a planted best-solver rule", data.instances.len());

    // features + labels join into the training rows
    let labels = label_matrix(&data.matrix);
    let rows: Vec<LabeledRow> = data
        .instances
        .iter()
        .zip(&labels)
        .map(|(inst, (_, label))| LabeledRow {
            instance: inst.name.clone(),
            values: extract(inst, FeatureSet::Full, instance_seed(5, &inst.name)).values,
            label: label.class,
            cost: label.cost,
        })
        .collect();

    let expanded = duplicate_by_cost(&rows).unwrap();
    println!(
        "cost-based duplication: {} rows grew to {} training rows",
        rows.len(),
        expanded.len()
    );

    // 5 learners x 3 folds = 15 hierarchical members; each one first decides
    // naive vs propagating, then which propagating variant
    let ensemble = train_meta(
        &rows,
        &Learner::default_bank(),
        3,
        9,
        false,
        &data.solvers,
        FeatureSet::Full,
    )
    .unwrap();
    println!("trained: {}", describe_ensemble(&ensemble));

    let mut correct = 0;
    for row in &rows {
        let vote = ensemble.predict(&row.values).unwrap();
        if cspsel::perf::LabelClass::Solver(vote) == row.label {
            correct += 1;
        }
    }
    println!(
        "training-set vote accuracy: {correct}/{} ({:.1}%)",
        rows.len(),
        100.0 * correct as f64 / rows.len() as f64
    );

    // persistence: versioned, checksummed, byte-stable
    let text = save_ensemble(&ensemble);
    println!(
        "\nserialised ensemble: {} bytes, header `{}`",
        text.len(),
        text.lines().next().unwrap()
    );
    let reloaded = load_ensemble(&text).unwrap();
    let sample = &rows[0].values;
    println!(
        "reloaded ensemble predicts identically: {}",
        reloaded.predict(sample).unwrap() == ensemble.predict(sample).unwrap()
    );
}
