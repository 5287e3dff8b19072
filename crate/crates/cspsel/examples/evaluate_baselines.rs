//! The full experiment: train on one planted corpus, evaluate on a held-out
//! one against the oracle / anti-oracle / default / random baselines, and
//! print the comparison table, including the effect of cost-based
//! duplication.
//!
//! Run with:
//! ```bash
//! cargo run --release --example evaluate_baselines
//! ```

use cspsel::eval::{baseline, evaluate, report_tables, BaselineKind, EnsembleChooser};
use cspsel::features::{extract, instance_seed, FeatureSet, FeatureVector};
use cspsel::learners::Learner;
use cspsel::perf::label_matrix;
use cspsel::pipeline::{train_meta, LabeledRow};
use cspsel::synth::{synth_generate, SynthConfig, SynthData, SynthMode};

fn labeled_rows(data: &SynthData, set: FeatureSet) -> Vec<LabeledRow> {
    let labels = label_matrix(&data.matrix);
    data.instances
        .iter()
        .zip(&labels)
        .map(|(inst, (_, label))| LabeledRow {
            instance: inst.name.clone(),
            values: extract(inst, set, instance_seed(1, &inst.name)).values,
            label: label.class,
            cost: label.cost,
        })
        .collect()
}

fn features_of(data: &SynthData, set: FeatureSet) -> Vec<FeatureVector> {
    data.instances
        .iter()
        .map(|inst| extract(inst, set, instance_seed(1, &inst.name)))
        .collect()
}

fn main() {
    let train = synth_generate(&SynthConfig::new(200, 31, SynthMode::PlantedRule));
    let mut held_cfg = SynthConfig::new(200, 32, SynthMode::PlantedRule);
    held_cfg.name_prefix = "held".into();
    let held = synth_generate(&held_cfg);
    println!("200 training + 200 held-out instances, planted rule, 10s margin\n");

    let mut conditions = Vec::new();
    for set in [FeatureSet::Full, FeatureSet::Cheap] {
        let rows = labeled_rows(&train, set);
        let ensemble =
            train_meta(&rows, &Learner::default_bank(), 3, 7, false, &train.solvers, set).unwrap();

        let held_features = features_of(&held, set);
        let mut results = Vec::new();
        for kind in [
            BaselineKind::Oracle,
            BaselineKind::AntiOracle,
            BaselineKind::Default,
            BaselineKind::Random { seed: 13 },
        ] {
            let report = evaluate(&baseline(kind, &held.matrix), &held_features, &held.matrix)
                .unwrap();
            results.push((report.classifier.clone(), report.total_penalty));
        }
        let meta = evaluate(
            &EnsembleChooser {
                ensemble: &ensemble,
                name: "meta".into(),
            },
            &held_features,
            &held.matrix,
        )
        .unwrap();
        println!(
            "{} features: meta overhead = {:.3}s extraction + {:.3}s prediction",
            set.name(),
            meta.total_feature_seconds,
            meta.total_predict_seconds
        );
        results.push((meta.classifier.clone(), meta.total_penalty));
        conditions.push((format!("{}_features", set.name()), results));
    }

    println!("\nheld-out total misclassification penalty [s]:\n");
    let table = report_tables(&conditions).unwrap();
    print!("{table}");

    // the cost model: on data where the expensive instances contradict the
    // cheap majority, duplication is what keeps the meta-classifier honest
    println!("\ncost-model study (expensive minority vs cheap majority):");
    let study_train = synth_generate(&SynthConfig::new(150, 41, SynthMode::CostStudy));
    let mut study_cfg = SynthConfig::new(150, 42, SynthMode::CostStudy);
    study_cfg.name_prefix = "study".into();
    let study_held = synth_generate(&study_cfg);

    let rows = labeled_rows(&study_train, FeatureSet::Cheap);
    let rows_flat: Vec<LabeledRow> = rows
        .iter()
        .map(|r| LabeledRow {
            cost: 0.0,
            ..r.clone()
        })
        .collect();
    let held_features = features_of(&study_held, FeatureSet::Cheap);
    for (tag, training_rows) in [("with duplication", &rows), ("without duplication", &rows_flat)]
    {
        let ensemble = train_meta(
            training_rows,
            &Learner::default_bank(),
            3,
            7,
            false,
            &study_train.solvers,
            FeatureSet::Cheap,
        )
        .unwrap();
        let total = evaluate(
            &EnsembleChooser {
                ensemble: &ensemble,
                name: tag.into(),
            },
            &held_features,
            &study_held.matrix,
        )
        .unwrap()
        .total_penalty;
        println!("  {tag:20} -> {total:10.1}s held-out penalty");
    }
}
