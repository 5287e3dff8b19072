//! Solver runtime ingestion, instance labeling and misclassification
//! penalties.
//!
//! A [`RuntimeMatrix`] stores one record per (instance, solver). Labeling
//! picks the naive implementation when it is strictly fastest, otherwise the
//! solved propagating variant with the most search nodes per second; an
//! instance nobody solved gets a don't-know label. The misclassification
//! penalty of a choice is the extra CPU time over the fastest solver, with
//! timeouts contributing a lower bound of timeout minus fastest.

use crate::util::format_float;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_TIMEOUT_SECONDS: f64 = 3600.0;

/// CPU floor when dividing for nodes per second; sub-millisecond timings are
/// measurement noise.
pub const CPU_FLOOR_SECONDS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSet {
    pub names: Vec<String>,
    /// Index of the decomposition-equivalent implementation.
    pub naive: usize,
    /// Index of the default implementation.
    pub default: usize,
    pub timeout_seconds: f64,
}

impl SolverSet {
    pub fn new(
        names: Vec<String>,
        naive: usize,
        default: usize,
        timeout_seconds: f64,
    ) -> Result<SolverSet, PerfError> {
        if names.len() < 2 {
            return Err(PerfError::TooFewSolvers(names.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(PerfError::DuplicateSolver(n.clone()));
            }
        }
        if naive >= names.len() || default >= names.len() {
            return Err(PerfError::BadRoleIndex);
        }
        if !timeout_seconds.is_finite() || timeout_seconds <= 0.0 {
            return Err(PerfError::BadTimeout(timeout_seconds));
        }
        Ok(SolverSet {
            names,
            naive,
            default,
            timeout_seconds,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Non-naive solver indices in list order.
    pub fn variant_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| i != self.naive).collect()
    }

    /// Parses the solvers file: one solver name per line with optional
    /// `naive` / `default` role annotations, plus a `timeout <seconds>` line.
    pub fn parse(text: &str) -> Result<SolverSet, PerfError> {
        let mut names = Vec::new();
        let mut naive = None;
        let mut default = None;
        let mut timeout = DEFAULT_TIMEOUT_SECONDS;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap();
            if first == "timeout" {
                let value = parts.next().ok_or(PerfError::SolversSyntax {
                    line: lineno,
                    msg: "expected `timeout <seconds>`".into(),
                })?;
                timeout = value.parse().map_err(|_| PerfError::SolversSyntax {
                    line: lineno,
                    msg: format!("bad timeout value `{value}`"),
                })?;
                if parts.next().is_some() {
                    return Err(PerfError::SolversSyntax {
                        line: lineno,
                        msg: "trailing tokens after timeout".into(),
                    });
                }
                continue;
            }
            let index = names.len();
            names.push(first.to_string());
            for role in parts {
                match role {
                    "naive" => {
                        if naive.replace(index).is_some() {
                            return Err(PerfError::SolversSyntax {
                                line: lineno,
                                msg: "more than one solver marked naive".into(),
                            });
                        }
                    }
                    "default" => {
                        if default.replace(index).is_some() {
                            return Err(PerfError::SolversSyntax {
                                line: lineno,
                                msg: "more than one solver marked default".into(),
                            });
                        }
                    }
                    other => {
                        return Err(PerfError::SolversSyntax {
                            line: lineno,
                            msg: format!("unknown annotation `{other}`"),
                        });
                    }
                }
            }
        }
        let naive = naive.ok_or(PerfError::MissingRole("naive"))?;
        let default = default.ok_or(PerfError::MissingRole("default"))?;
        SolverSet::new(names, naive, default, timeout)
    }

    pub fn render(&self) -> String {
        let mut out = format!("timeout {}\n", format_float(self.timeout_seconds));
        for (i, name) in self.names.iter().enumerate() {
            out.push_str(name);
            if i == self.naive {
                out.push_str(" naive");
            }
            if i == self.default {
                out.push_str(" default");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Solved,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub cpu_seconds: f64,
    pub nodes: u64,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.status == RunStatus::Solved
    }
}

/// Complete runtime matrix: one record per (instance, solver).
#[derive(Debug, Clone)]
pub struct RuntimeMatrix {
    pub solvers: SolverSet,
    instance_names: Vec<String>,
    index: HashMap<String, usize>,
    /// rows[instance][solver]
    rows: Vec<Vec<RunRecord>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PerfError {
    #[error("need at least 2 solvers, found {0}")]
    TooFewSolvers(usize),
    #[error("duplicate solver name `{0}`")]
    DuplicateSolver(String),
    #[error("naive/default index out of range")]
    BadRoleIndex,
    #[error("timeout must be positive, found {0}")]
    BadTimeout(f64),
    #[error("solvers file line {line}: {msg}")]
    SolversSyntax { line: usize, msg: String },
    #[error("no solver is marked `{0}`")]
    MissingRole(&'static str),
    #[error("runtime file line {line}: {msg}")]
    RowSyntax { line: usize, msg: String },
    #[error("runtime file line {line}: unknown solver `{name}`")]
    UnknownSolver { line: usize, name: String },
    #[error("runtime file line {line}: duplicate cell for instance `{instance}`, solver `{solver}`")]
    DuplicateCell {
        line: usize,
        instance: String,
        solver: String,
    },
    #[error("runtime file line {line}: timeout rows must record cpu_seconds equal to the timeout ({timeout})")]
    TimeoutCpuMismatch { line: usize, timeout: f64 },
    #[error("instance `{instance}`, solver `{solver}`: {msg}")]
    InvalidRecord {
        instance: String,
        solver: String,
        msg: String,
    },
    #[error("incomplete matrix: no record for instance `{instance}`, solver `{solver}`")]
    MissingCell { instance: String, solver: String },
    #[error("misclassification penalty undefined: no solver solved instance `{0}`")]
    NoSolvedSolver(String),
}

pub const RUNTIME_CSV_HEADER: &str = "instance,solver,cpu_seconds,nodes,status";

impl RuntimeMatrix {
    /// Builds a matrix from per-instance rows listed in solver order.
    pub fn from_rows(
        solvers: SolverSet,
        rows: Vec<(String, Vec<RunRecord>)>,
    ) -> Result<RuntimeMatrix, PerfError> {
        let mut m = RuntimeMatrix {
            solvers,
            instance_names: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
        };
        for (name, records) in rows {
            assert_eq!(records.len(), m.solvers.len(), "row width mismatch");
            if m.index.contains_key(&name) {
                return Err(PerfError::DuplicateCell {
                    line: 0,
                    instance: name,
                    solver: String::new(),
                });
            }
            for (s, rec) in records.iter().enumerate() {
                let invalid = if !rec.cpu_seconds.is_finite() || rec.cpu_seconds < 0.0 {
                    Some("cpu_seconds must be finite and >= 0")
                } else if rec.cpu_seconds > m.solvers.timeout_seconds {
                    Some("cpu_seconds exceeds the timeout")
                } else if rec.status == RunStatus::Timeout
                    && rec.cpu_seconds != m.solvers.timeout_seconds
                {
                    Some("timeout records must have cpu_seconds equal to the timeout")
                } else {
                    None
                };
                if let Some(msg) = invalid {
                    return Err(PerfError::InvalidRecord {
                        instance: name,
                        solver: m.solvers.names[s].clone(),
                        msg: msg.into(),
                    });
                }
            }
            m.index.insert(name.clone(), m.rows.len());
            m.instance_names.push(name);
            m.rows.push(records);
        }
        Ok(m)
    }

    pub fn instance_names(&self) -> &[String] {
        &self.instance_names
    }

    pub fn row(&self, instance: &str) -> Option<&[RunRecord]> {
        self.index.get(instance).map(|&i| self.rows[i].as_slice())
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[RunRecord])> {
        self.instance_names
            .iter()
            .zip(&self.rows)
            .map(|(n, r)| (n.as_str(), r.as_slice()))
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from(RUNTIME_CSV_HEADER);
        out.push('\n');
        for (name, records) in self.rows() {
            for (s, rec) in records.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    name,
                    self.solvers.names[s],
                    format_float(rec.cpu_seconds),
                    rec.nodes,
                    match rec.status {
                        RunStatus::Solved => "solved",
                        RunStatus::Timeout => "timeout",
                    }
                ));
            }
        }
        out
    }
}

/// Parses the runtime CSV (`instance,solver,cpu_seconds,nodes,status`),
/// requiring a complete matrix over the solver set.
pub fn parse_runtime_csv(text: &str, solvers: &SolverSet) -> Result<RuntimeMatrix, PerfError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RUNTIME_CSV_HEADER => {}
        _ => {
            return Err(PerfError::RowSyntax {
                line: 1,
                msg: format!("expected header `{RUNTIME_CSV_HEADER}`"),
            })
        }
    }
    let mut order: Vec<String> = Vec::new();
    let mut cells: HashMap<String, Vec<Option<(usize, RunRecord)>>> = HashMap::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let instance = fields[0].to_string();
        let solver = fields[1];
        let solver_idx = solvers
            .index_of(solver)
            .ok_or_else(|| PerfError::UnknownSolver {
                line: lineno,
                name: solver.to_string(),
            })?;
        let cpu_seconds: f64 = fields[2].parse().map_err(|_| PerfError::RowSyntax {
            line: lineno,
            msg: format!("bad cpu_seconds `{}`", fields[2]),
        })?;
        if !cpu_seconds.is_finite() || cpu_seconds < 0.0 {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!("cpu_seconds must be finite and >= 0, found `{}`", fields[2]),
            });
        }
        if cpu_seconds > solvers.timeout_seconds {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!(
                    "cpu_seconds {} exceeds the timeout {}",
                    fields[2], solvers.timeout_seconds
                ),
            });
        }
        let nodes: u64 = fields[3].parse().map_err(|_| PerfError::RowSyntax {
            line: lineno,
            msg: format!("bad nodes `{}`", fields[3]),
        })?;
        let status = match fields[4] {
            "solved" => RunStatus::Solved,
            "timeout" => RunStatus::Timeout,
            other => {
                return Err(PerfError::RowSyntax {
                    line: lineno,
                    msg: format!("status must be solved or timeout, found `{other}`"),
                })
            }
        };
        if status == RunStatus::Timeout && cpu_seconds != solvers.timeout_seconds {
            return Err(PerfError::TimeoutCpuMismatch {
                line: lineno,
                timeout: solvers.timeout_seconds,
            });
        }
        let record = RunRecord {
            cpu_seconds,
            nodes,
            status,
        };
        let entry = cells.entry(instance.clone()).or_insert_with(|| {
            order.push(instance.clone());
            vec![None; solvers.len()]
        });
        if entry[solver_idx].is_some() {
            return Err(PerfError::DuplicateCell {
                line: lineno,
                instance,
                solver: solver.to_string(),
            });
        }
        entry[solver_idx] = Some((lineno, record));
    }

    let mut rows = Vec::with_capacity(order.len());
    for name in order {
        let entry = cells.remove(&name).unwrap();
        let mut records = Vec::with_capacity(solvers.len());
        for (s, cell) in entry.into_iter().enumerate() {
            match cell {
                Some((_, rec)) => records.push(rec),
                None => {
                    return Err(PerfError::MissingCell {
                        instance: name,
                        solver: solvers.names[s].clone(),
                    })
                }
            }
        }
        rows.push((name, records));
    }
    RuntimeMatrix::from_rows(solvers.clone(), rows)
}

/// Class assigned to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelClass {
    /// Index into the solver set (naive or one of the variants).
    Solver(usize),
    DontKnow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    pub class: LabelClass,
    /// Maximum misclassification penalty of the row, in seconds.
    pub cost: f64,
}

/// Labels one instance's row: naive if it solved strictly fastest, else the
/// solved variant with the most nodes per second (ties by solver order),
/// don't-know if nothing solved.
pub fn label_instance(row: &[RunRecord], solvers: &SolverSet) -> Label {
    assert_eq!(row.len(), solvers.len(), "row width mismatch");
    if row.iter().all(|r| !r.solved()) {
        return Label {
            class: LabelClass::DontKnow,
            cost: 0.0,
        };
    }
    let cost = instance_cost(row, solvers);
    let naive = &row[solvers.naive];
    if naive.solved() {
        let strictly_fastest = row
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != solvers.naive)
            .all(|(_, r)| naive.cpu_seconds < r.cpu_seconds);
        if strictly_fastest {
            return Label {
                class: LabelClass::Solver(solvers.naive),
                cost,
            };
        }
    }
    // ties break to the earlier solver in list order
    let mut best_variant: Option<(usize, f64)> = None;
    for i in solvers.variant_indices() {
        if !row[i].solved() {
            continue;
        }
        let rate = nodes_per_second(&row[i]);
        if best_variant.is_none_or(|(_, best)| rate > best) {
            best_variant = Some((i, rate));
        }
    }
    match best_variant.map(|(i, _)| i) {
        Some(i) => Label {
            class: LabelClass::Solver(i),
            cost,
        },
        // only the naive solver solved, but not strictly fastest (it tied
        // with the timeout value); it is still the only defensible choice
        None => Label {
            class: LabelClass::Solver(solvers.naive),
            cost,
        },
    }
}

fn nodes_per_second(r: &RunRecord) -> f64 {
    r.nodes as f64 / r.cpu_seconds.max(CPU_FLOOR_SECONDS)
}

/// Extra CPU seconds over the fastest solved solver; a timed-out choice
/// contributes timeout minus fastest (a lower bound).
pub fn misclassification_penalty(
    row: &[RunRecord],
    chosen: usize,
    solvers: &SolverSet,
) -> Result<f64, PerfError> {
    let fastest = row
        .iter()
        .filter(|r| r.solved())
        .map(|r| r.cpu_seconds)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .ok_or_else(|| PerfError::NoSolvedSolver(String::new()))?;
    let chosen = &row[chosen];
    if chosen.solved() {
        Ok(chosen.cpu_seconds - fastest)
    } else {
        Ok(solvers.timeout_seconds - fastest)
    }
}

/// Maximum misclassification penalty over all solvers; 0 when nothing
/// solved (such instances carry no training weight).
pub fn instance_cost(row: &[RunRecord], solvers: &SolverSet) -> f64 {
    if row.iter().all(|r| !r.solved()) {
        return 0.0;
    }
    (0..row.len())
        .map(|i| misclassification_penalty(row, i, solvers).expect("some solver solved"))
        .fold(0.0, f64::max)
}

pub const LABELS_CSV_HEADER: &str = "instance,label,cost_seconds";

/// Labels every instance of the matrix, in matrix order.
pub fn label_matrix(matrix: &RuntimeMatrix) -> Vec<(String, Label)> {
    matrix
        .rows()
        .map(|(name, row)| (name.to_string(), label_instance(row, &matrix.solvers)))
        .collect()
}

pub fn write_labels_csv(labels: &[(String, Label)], solvers: &SolverSet) -> String {
    let mut out = String::from(LABELS_CSV_HEADER);
    out.push('\n');
    for (name, label) in labels {
        let class = match label.class {
            LabelClass::Solver(i) => solvers.names[i].as_str(),
            LabelClass::DontKnow => "dont_know",
        };
        out.push_str(&format!(
            "{},{},{}\n",
            name,
            class,
            format_float(label.cost)
        ));
    }
    out
}

/// Parses a labels CSV against the solver set.
pub fn parse_labels_csv(
    text: &str,
    solvers: &SolverSet,
) -> Result<Vec<(String, Label)>, PerfError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == LABELS_CSV_HEADER => {}
        _ => {
            return Err(PerfError::RowSyntax {
                line: 1,
                msg: format!("expected header `{LABELS_CSV_HEADER}`"),
            })
        }
    }
    let mut labels = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        if !seen.insert(fields[0].to_string()) {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!("duplicate label for instance `{}`", fields[0]),
            });
        }
        let class = if fields[1] == "dont_know" {
            LabelClass::DontKnow
        } else {
            LabelClass::Solver(solvers.index_of(fields[1]).ok_or_else(|| {
                PerfError::UnknownSolver {
                    line: lineno,
                    name: fields[1].to_string(),
                }
            })?)
        };
        let cost: f64 = fields[2].parse().map_err(|_| PerfError::RowSyntax {
            line: lineno,
            msg: format!("bad cost_seconds `{}`", fields[2]),
        })?;
        if !cost.is_finite() || cost < 0.0 {
            return Err(PerfError::RowSyntax {
                line: lineno,
                msg: format!("cost_seconds must be finite and >= 0, found `{}`", fields[2]),
            });
        }
        labels.push((fields[0].to_string(), Label { class, cost }));
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solvers3() -> SolverSet {
        SolverSet::new(
            vec!["naive".into(), "gac_a".into(), "gac_b".into()],
            0,
            1,
            3600.0,
        )
        .unwrap()
    }

    fn solved(cpu: f64, nodes: u64) -> RunRecord {
        RunRecord {
            cpu_seconds: cpu,
            nodes,
            status: RunStatus::Solved,
        }
    }

    fn timeout() -> RunRecord {
        RunRecord {
            cpu_seconds: 3600.0,
            nodes: 0,
            status: RunStatus::Timeout,
        }
    }

    #[test]
    fn naive_strictly_fastest_wins() {
        let s = solvers3();
        let row = [solved(10.0, 100), solved(12.0, 1000), solved(15.0, 2000)];
        assert_eq!(label_instance(&row, &s).class, LabelClass::Solver(0));
    }

    #[test]
    fn nodes_per_second_beats_lower_cpu() {
        let s = solvers3();
        // naive slower; variant A 10s/1000 nodes = 100 n/s, variant B
        // 12s/1800 nodes = 150 n/s: B wins despite higher CPU
        let row = [solved(20.0, 100), solved(10.0, 1000), solved(12.0, 1800)];
        assert_eq!(label_instance(&row, &s).class, LabelClass::Solver(2));
    }

    #[test]
    fn all_timeout_is_dont_know() {
        let s = solvers3();
        let row = [timeout(), timeout(), timeout()];
        let label = label_instance(&row, &s);
        assert_eq!(label.class, LabelClass::DontKnow);
        assert_eq!(label.cost, 0.0);
    }

    #[test]
    fn naive_tie_falls_through_to_variants() {
        let s = solvers3();
        // naive ties variant A on CPU: not strictly fastest, so the variant
        // branch decides
        let row = [solved(10.0, 9999), solved(10.0, 500), solved(11.0, 400)];
        assert_eq!(label_instance(&row, &s).class, LabelClass::Solver(1));
    }

    #[test]
    fn variant_rate_ties_break_by_solver_order() {
        let s = solvers3();
        let row = [solved(20.0, 1), solved(10.0, 1000), solved(10.0, 1000)];
        assert_eq!(label_instance(&row, &s).class, LabelClass::Solver(1));
    }

    #[test]
    fn timed_out_variants_are_never_labeled() {
        let s = solvers3();
        // naive is slower than gac_b, so the variant branch decides; the
        // timed-out gac_a is not a candidate
        let row = [solved(70.0, 10), timeout(), solved(60.0, 30)];
        assert_eq!(label_instance(&row, &s).class, LabelClass::Solver(2));
    }

    #[test]
    fn penalty_definition() {
        let s = solvers3();
        let row = [solved(10.0, 1), solved(12.0, 1), timeout()];
        assert_eq!(misclassification_penalty(&row, 1, &s).unwrap(), 2.0);
        assert_eq!(misclassification_penalty(&row, 0, &s).unwrap(), 0.0);
        assert_eq!(misclassification_penalty(&row, 2, &s).unwrap(), 3590.0);
        assert_eq!(instance_cost(&row, &s), 3590.0);
    }

    #[test]
    fn cost_of_equal_row_is_zero() {
        let s = solvers3();
        let row = [solved(7.0, 1), solved(7.0, 1), solved(7.0, 1)];
        assert_eq!(instance_cost(&row, &s), 0.0);
        let row = [solved(10.0, 1), solved(14.0, 1), solved(12.0, 1)];
        assert_eq!(instance_cost(&row, &s), 4.0);
    }

    #[test]
    fn penalty_undefined_without_solved_solver() {
        let s = solvers3();
        let row = [timeout(), timeout(), timeout()];
        assert!(misclassification_penalty(&row, 0, &s).is_err());
        assert_eq!(instance_cost(&row, &s), 0.0);
    }

    #[test]
    fn runtime_csv_round_trip() {
        let s = solvers3();
        let m = RuntimeMatrix::from_rows(
            s.clone(),
            vec![
                ("a".into(), vec![solved(1.0, 10), solved(2.0, 20), timeout()]),
                ("b".into(), vec![solved(5.5, 1), solved(0.5, 9), solved(2.0, 3)]),
            ],
        )
        .unwrap();
        let text = m.render_csv();
        let parsed = parse_runtime_csv(&text, &s).unwrap();
        assert_eq!(parsed.instance_names(), m.instance_names());
        assert_eq!(parsed.row("a").unwrap(), m.row("a").unwrap());
        assert_eq!(parsed.row("b").unwrap(), m.row("b").unwrap());
    }

    #[test]
    fn runtime_csv_rejects_bad_rows() {
        let s = solvers3();
        let header = RUNTIME_CSV_HEADER;
        // timeout row with wrong cpu
        let text = format!("{header}\ni,naive,100,5,timeout\n");
        assert!(matches!(
            parse_runtime_csv(&text, &s),
            Err(PerfError::TimeoutCpuMismatch { line: 2, .. })
        ));
        // unknown solver
        let text = format!("{header}\ni,mystery,1,5,solved\n");
        assert!(matches!(
            parse_runtime_csv(&text, &s),
            Err(PerfError::UnknownSolver { .. })
        ));
        // incomplete matrix names instance and solver
        let text = format!("{header}\ni,naive,1,5,solved\ni,gac_a,1,5,solved\n");
        match parse_runtime_csv(&text, &s) {
            Err(PerfError::MissingCell { instance, solver }) => {
                assert_eq!(instance, "i");
                assert_eq!(solver, "gac_b");
            }
            other => panic!("unexpected {other:?}"),
        }
        // duplicate cell
        let text = format!("{header}\ni,naive,1,5,solved\ni,naive,2,5,solved\n");
        assert!(matches!(
            parse_runtime_csv(&text, &s),
            Err(PerfError::DuplicateCell { line: 3, .. })
        ));
    }

    #[test]
    fn labeling_ignores_csv_row_order() {
        let s = solvers3();
        let header = RUNTIME_CSV_HEADER;
        let rows = [
            "i,naive,20,100,solved",
            "i,gac_a,10,1000,solved",
            "i,gac_b,12,1800,solved",
        ];
        let forward = format!("{header}\n{}\n{}\n{}\n", rows[0], rows[1], rows[2]);
        let backward = format!("{header}\n{}\n{}\n{}\n", rows[2], rows[0], rows[1]);
        let a = parse_runtime_csv(&forward, &s).unwrap();
        let b = parse_runtime_csv(&backward, &s).unwrap();
        assert_eq!(
            label_instance(a.row("i").unwrap(), &s),
            label_instance(b.row("i").unwrap(), &s)
        );
    }

    #[test]
    fn solvers_file_round_trip() {
        let text = "timeout 1800\nnaive_ad naive\ngacalldiff default\ngac2001\n";
        let s = SolverSet::parse(text).unwrap();
        assert_eq!(s.naive, 0);
        assert_eq!(s.default, 1);
        assert_eq!(s.timeout_seconds, 1800.0);
        assert_eq!(s.names.len(), 3);
        let again = SolverSet::parse(&s.render()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn solvers_file_requires_roles() {
        assert!(matches!(
            SolverSet::parse("a\nb\n"),
            Err(PerfError::MissingRole("naive"))
        ));
        assert!(matches!(
            SolverSet::parse("a naive\nb\n"),
            Err(PerfError::MissingRole("default"))
        ));
    }

    #[test]
    fn labels_csv_round_trip() {
        let s = solvers3();
        let labels = vec![
            (
                "a".to_string(),
                Label {
                    class: LabelClass::Solver(2),
                    cost: 12.5,
                },
            ),
            (
                "b".to_string(),
                Label {
                    class: LabelClass::DontKnow,
                    cost: 0.0,
                },
            ),
        ];
        let text = write_labels_csv(&labels, &s);
        let parsed = parse_labels_csv(&text, &s).unwrap();
        assert_eq!(parsed, labels);
    }
}
