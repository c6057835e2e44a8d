//! Seeded, parallel Monte Carlo studies: test size under the first-order
//! null, power against second-order alternatives, and the numerical check
//! of the `M₂ = −M₁ · E m²` condition.
//!
//! Every replication draws from its own stream keyed by
//! `(master_seed, cell label, replication)`, so tables do not depend on the
//! number of worker threads or on scheduling order.

use crate::atm::{simulate, AtmConfig, InnovationFamily, DEFAULT_BURN_IN, DEFAULT_GRID_CELLS};
use crate::diagnostics::{condition_discrepancy, default_split, mcleod_tests_with, split_tests_with};
use crate::error::{AtmError, Result};
use crate::estimation::SeriesStats;
use crate::rng::{hash_label, RandomStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Cells with a larger share of failed replications are flagged.
pub const FAILURE_FLAG_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    Size,
    Power,
    Condition,
}

impl std::fmt::Display for StudyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StudyKind::Size => "size",
            StudyKind::Power => "power",
            StudyKind::Condition => "condition",
        })
    }
}

fn default_beta() -> f64 {
    0.05
}
fn default_reps() -> usize {
    1000
}
fn default_grid() -> usize {
    DEFAULT_GRID_CELLS
}
fn default_burn() -> usize {
    DEFAULT_BURN_IN
}

/// Declarative description of a study, readable from a TOML file:
///
/// ```toml
/// kind = "size"            # size | power | condition
/// alphas = [0.2, 0.5]      # size and condition
/// pairs = [[0.5, 0.2]]     # power: (α₁, α₂)
/// ns = [100, 400]
/// ks = [3, 6, 9]
/// reps = 1000
/// beta = 0.05
/// family = "trig"          # trig | power | poly (or e1 | e2 | e3)
/// master_seed = 7
/// grid_cells = 1000        # optional
/// burn_in = 200            # optional
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub kind: StudyKind,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub pairs: Vec<(f64, f64)>,
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub family: InnovationFamily,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_grid")]
    pub grid_cells: usize,
    #[serde(default = "default_burn")]
    pub burn_in: usize,
}

/// Smallest sample size accepted by a study.
pub const MIN_STUDY_N: usize = 20;

impl StudySpec {
    /// Default grid of parameters, sample sizes and lags for the given kind.
    pub fn new(kind: StudyKind) -> Self {
        let (alphas, pairs, ns, ks, reps) = match kind {
            StudyKind::Size => (vec![-0.4, -0.2, 0.2, 0.5], vec![], vec![100, 200, 400], vec![3, 6, 9], 1000),
            StudyKind::Power => (
                vec![],
                vec![(0.2, 0.1), (-0.2, -0.1), (0.5, 0.2), (-0.5, -0.2)],
                vec![100, 200, 400],
                vec![3, 6, 9],
                1000,
            ),
            StudyKind::Condition => (vec![0.5, 0.2, -0.2, -0.4], vec![], vec![5000], vec![12], 100),
        };
        StudySpec {
            kind,
            alphas,
            pairs,
            ns,
            ks,
            reps,
            beta: 0.05,
            family: InnovationFamily::Trig,
            master_seed: 0,
            grid_cells: DEFAULT_GRID_CELLS,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: StudySpec = toml::from_str(text).map_err(|e| AtmError::Schema(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(AtmError::Param("reps must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(AtmError::Param(format!("beta = {} outside (0, 1)", self.beta)));
        }
        if self.ns.is_empty() || self.ks.is_empty() {
            return Err(AtmError::Param("ns and ks must be nonempty".into()));
        }
        if let Some(n) = self.ns.iter().find(|&&n| n < MIN_STUDY_N) {
            return Err(AtmError::Param(format!("sample size {n} below {MIN_STUDY_N}")));
        }
        if self.ks.contains(&0) {
            return Err(AtmError::Param("lag counts must be positive".into()));
        }
        let bad_alpha = |a: f64| !(a.abs() < 1.0);
        match self.kind {
            StudyKind::Size | StudyKind::Condition => {
                if self.alphas.is_empty() {
                    return Err(AtmError::Param("alphas must be nonempty".into()));
                }
                if let Some(a) = self.alphas.iter().find(|&&a| bad_alpha(a)) {
                    return Err(AtmError::Param(format!("alpha = {a} outside (-1, 1)")));
                }
            }
            StudyKind::Power => {
                if self.pairs.is_empty() {
                    return Err(AtmError::Param("pairs must be nonempty".into()));
                }
                if let Some(p) = self.pairs.iter().find(|p| bad_alpha(p.0) || bad_alpha(p.1)) {
                    return Err(AtmError::Param(format!("pair {p:?} outside (-1, 1)")));
                }
            }
        }
        if self.grid_cells < 2 {
            return Err(AtmError::Param("grid_cells must be at least 2".into()));
        }
        Ok(())
    }

    fn config(&self, coefficients: Vec<f64>, n: usize, seed: u64) -> AtmConfig {
        AtmConfig {
            coefficients,
            n,
            burn_in: self.burn_in,
            family: self.family,
            seed,
            grid_cells: self.grid_cells,
        }
    }
}

/// One aggregated table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub parameter: String,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub method: String,
    /// Rejection rate, or mean for the condition study.
    pub value: f64,
    pub std: f64,
    /// Replications that produced a value.
    pub reps: usize,
    pub mc_stderr: f64,
    pub failures: usize,
    pub flagged: bool,
}

impl Cell {
    fn rate(parameter: &str, n: usize, k: usize, method: &str, hits: usize, ok: usize, failures: usize) -> Cell {
        let rate = if ok > 0 { hits as f64 / ok as f64 } else { f64::NAN };
        let sd = (rate * (1.0 - rate)).sqrt();
        Cell {
            parameter: parameter.to_string(),
            n,
            k,
            method: method.to_string(),
            value: rate,
            std: sd,
            reps: ok,
            mc_stderr: sd / (ok as f64).sqrt(),
            failures,
            flagged: flag(failures, ok + failures),
        }
    }

    fn mean(parameter: &str, n: usize, k: usize, method: &str, xs: &[f64], failures: usize) -> Cell {
        let ok = xs.len();
        let mean = xs.iter().sum::<f64>() / ok as f64;
        let sd = if ok > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (ok - 1) as f64).sqrt()
        } else {
            0.0
        };
        Cell {
            parameter: parameter.to_string(),
            n,
            k,
            method: method.to_string(),
            value: mean,
            std: sd,
            reps: ok,
            mc_stderr: sd / (ok as f64).sqrt(),
            failures,
            flagged: flag(failures, ok + failures),
        }
    }
}

fn flag(failures: usize, total: usize) -> bool {
    total > 0 && failures as f64 > FAILURE_FLAG_SHARE * total as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub kind: StudyKind,
    pub family: InnovationFamily,
    pub beta: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub grid_cells: usize,
    pub burn_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub metadata: TableMetadata,
    pub cells: Vec<Cell>,
}

/// Output format for tables and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl ExperimentTable {
    pub fn cell(&self, parameter: &str, n: usize, k: usize, method: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.parameter == parameter && c.n == n && c.k == k && c.method == method)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "kind", "family", "parameter", "n", "K", "method", "value", "std", "reps", "mc_stderr", "failures",
            "flagged", "grid_cells", "burn_in", "beta", "master_seed",
        ])
        .map_err(csv_err)?;
        let md = &self.metadata;
        for c in &self.cells {
            w.write_record([
                md.kind.to_string(),
                md.family.to_string(),
                c.parameter.clone(),
                c.n.to_string(),
                c.k.to_string(),
                c.method.clone(),
                c.value.to_string(),
                c.std.to_string(),
                c.reps.to_string(),
                c.mc_stderr.to_string(),
                c.failures.to_string(),
                c.flagged.to_string(),
                md.grid_cells.to_string(),
                md.burn_in.to_string(),
                md.beta.to_string(),
                md.master_seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| AtmError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Methods and lag counts as rows, `(parameter, n)` pairs as columns.
    pub fn to_text(&self) -> String {
        let mut cols: Vec<(String, usize)> = Vec::new();
        let mut rows: Vec<(usize, String)> = Vec::new();
        for c in &self.cells {
            let col = (c.parameter.clone(), c.n);
            if !cols.contains(&col) {
                cols.push(col);
            }
            let row = (c.k, c.method.clone());
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let md = &self.metadata;
        let mut out = format!(
            "{} study, family {}, beta {}, {} reps, grid {} cells, burn-in {}\n",
            md.kind, md.family, md.beta, md.reps, md.grid_cells, md.burn_in
        );
        let _ = write!(out, "{:>4} {:>8}", "K", "method");
        for (p, n) in &cols {
            let _ = write!(out, " {:>16}", format!("{p} n={n}"));
        }
        out.push('\n');
        for (k, method) in &rows {
            let _ = write!(out, "{k:>4} {method:>8}");
            for (p, n) in &cols {
                match self.cell(p, *n, *k, method) {
                    Some(c) if md.kind == StudyKind::Condition => {
                        let _ = write!(out, " {:>16}", format!("{:.4}({:.4})", c.value, c.std));
                    }
                    Some(c) => {
                        let mark = if c.flagged { "*" } else { "" };
                        let _ = write!(out, " {:>16}", format!("{:.3}{mark}", c.value));
                    }
                    None => {
                        let _ = write!(out, " {:>16}", "-");
                    }
                }
            }
            out.push('\n');
        }
        if self.cells.iter().any(|c| c.flagged) {
            out.push_str("* more than 1% of replications failed\n");
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        })
    }
}

fn csv_err(e: csv::Error) -> AtmError {
    AtmError::Io(std::io::Error::other(e))
}

/// Per-replication outcome of both tests at each lag count.
#[derive(Debug, Clone, Copy)]
enum Outcome {
    Reject(bool),
    Failed,
}

struct RepResult {
    mcleod: Vec<Outcome>,
    split: Vec<Outcome>,
}

fn outcomes(reports: Result<Vec<crate::diagnostics::DiagnosticReport>>, ks: &[usize]) -> Vec<Outcome> {
    match reports {
        Ok(rs) => rs.iter().map(|r| Outcome::Reject(r.reject)).collect(),
        Err(_) => ks.iter().map(|_| Outcome::Failed).collect(),
    }
}

/// Test each lag count separately so a singular covariance at one K does
/// not discard the others.
fn mcleod_outcomes(stats: &SeriesStats<'_>, ks: &[usize], beta: f64) -> Vec<Outcome> {
    let fit = match stats.fit() {
        Ok(f) => f,
        Err(_) => return ks.iter().map(|_| Outcome::Failed).collect(),
    };
    ks.iter()
        .map(|&k| match mcleod_tests_with(stats, fit.alpha_hat, &[k], beta) {
            Ok((r, _)) => Outcome::Reject(r[0].reject),
            Err(_) => Outcome::Failed,
        })
        .collect()
}

fn test_replication(spec: &StudySpec, coefficients: Vec<f64>, n: usize, seed: u64) -> RepResult {
    let fail = || RepResult {
        mcleod: spec.ks.iter().map(|_| Outcome::Failed).collect(),
        split: spec.ks.iter().map(|_| Outcome::Failed).collect(),
    };
    let series = match simulate(&spec.config(coefficients, n, seed)) {
        Ok(s) => s,
        Err(_) => return fail(),
    };
    let stats = SeriesStats::new(&series);
    let (f_n, l_n) = default_split(n);
    RepResult {
        mcleod: mcleod_outcomes(&stats, &spec.ks, spec.beta),
        split: outcomes(split_tests_with(&stats, &spec.ks, spec.beta, f_n, l_n).map(|r| r.0), &spec.ks),
    }
}

/// Replication seeds for one cell.
pub fn replication_seed(master_seed: u64, cell_label: &str, rep: usize) -> u64 {
    RandomStream::for_replication(master_seed, hash_label(cell_label), rep as u64).key()
}

fn tally(parameter: &str, n: usize, ks: &[usize], method: &str, results: &[Vec<Outcome>]) -> Vec<Cell> {
    ks.iter()
        .enumerate()
        .map(|(j, &k)| {
            let (mut hits, mut ok, mut failed) = (0, 0, 0);
            for r in results {
                match r[j] {
                    Outcome::Reject(true) => {
                        hits += 1;
                        ok += 1;
                    }
                    Outcome::Reject(false) => ok += 1,
                    Outcome::Failed => failed += 1,
                }
            }
            Cell::rate(parameter, n, k, method, hits, ok, failed)
        })
        .collect()
}

fn rejection_study(spec: &StudySpec, params: Vec<(String, Vec<f64>)>) -> ExperimentTable {
    let mut cells = Vec::new();
    for (label, coefficients) in &params {
        for &n in &spec.ns {
            let cell_label = format!("{}|{label}|{n}", spec.kind);
            let results: Vec<RepResult> = (0..spec.reps)
                .into_par_iter()
                .map(|r| test_replication(spec, coefficients.clone(), n, replication_seed(spec.master_seed, &cell_label, r)))
                .collect();
            let mc: Vec<_> = results.iter().map(|r| r.mcleod.clone()).collect();
            let sp: Vec<_> = results.iter().map(|r| r.split.clone()).collect();
            cells.extend(tally(label, n, &spec.ks, "mcleod", &mc));
            cells.extend(tally(label, n, &spec.ks, "split", &sp));
        }
    }
    ExperimentTable { metadata: metadata(spec), cells }
}

fn metadata(spec: &StudySpec) -> TableMetadata {
    TableMetadata {
        kind: spec.kind,
        family: spec.family,
        beta: spec.beta,
        reps: spec.reps,
        master_seed: spec.master_seed,
        grid_cells: spec.grid_cells,
        burn_in: spec.burn_in,
    }
}

fn require(spec: &StudySpec, kind: StudyKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(AtmError::Param(format!("expected a {kind} study, got {}", spec.kind)));
    }
    Ok(())
}

/// Rejection rates of both tests under first-order nulls.
pub fn run_size_study(spec: &StudySpec) -> Result<ExperimentTable> {
    require(spec, StudyKind::Size)?;
    let params = spec.alphas.iter().map(|&a| (format!("{a}"), vec![a])).collect();
    Ok(rejection_study(spec, params))
}

/// Rejection rates when second-order data are fitted with a first-order model.
pub fn run_power_study(spec: &StudySpec) -> Result<ExperimentTable> {
    require(spec, StudyKind::Power)?;
    let params = spec.pairs.iter().map(|&(a, b)| (format!("({a},{b})"), vec![a, b])).collect();
    Ok(rejection_study(spec, params))
}

/// Mean and spread of the L¹ / L² discrepancy between `M̂₂` and `−M̂₁ · avar`.
pub fn run_condition_study(spec: &StudySpec) -> Result<ExperimentTable> {
    require(spec, StudyKind::Condition)?;
    let mut cells = Vec::new();
    for &alpha in &spec.alphas {
        for &n in &spec.ns {
            let label = format!("{alpha}");
            let cell_label = format!("condition|{}|{label}|{n}", spec.family);
            let k_max = *spec.ks.iter().max().expect("validated");
            let results: Vec<Option<Vec<(f64, f64)>>> = (0..spec.reps)
                .into_par_iter()
                .map(|r| {
                    let seed = replication_seed(spec.master_seed, &cell_label, r);
                    let series = simulate(&spec.config(vec![alpha], n, seed)).ok()?;
                    let d = condition_discrepancy(&series, alpha, k_max).ok()?;
                    // prefixes give the discrepancy for each smaller K
                    Some(
                        spec.ks
                            .iter()
                            .map(|&k| {
                                let diff: Vec<f64> =
                                    (0..k).map(|j| d.m2_hat[j] + d.m1_hat[j] * d.avar_hat).collect();
                                (diff.iter().map(|v| v.abs()).sum(), diff.iter().map(|v| v * v).sum::<f64>().sqrt())
                            })
                            .collect(),
                    )
                })
                .collect();
            let failures = results.iter().filter(|r| r.is_none()).count();
            for (j, &k) in spec.ks.iter().enumerate() {
                let l1: Vec<f64> = results.iter().flatten().map(|v| v[j].0).collect();
                let l2: Vec<f64> = results.iter().flatten().map(|v| v[j].1).collect();
                cells.push(Cell::mean(&label, n, k, "L1", &l1, failures));
                cells.push(Cell::mean(&label, n, k, "L2", &l2, failures));
            }
        }
    }
    Ok(ExperimentTable { metadata: metadata(spec), cells })
}

/// Condition validation for one `(family, α₀)` cell.
pub fn condition_check(
    family: InnovationFamily,
    alpha0: f64,
    n: usize,
    reps: usize,
    k: usize,
    master_seed: u64,
) -> Result<ExperimentTable> {
    let spec = StudySpec {
        alphas: vec![alpha0],
        ns: vec![n],
        ks: vec![k],
        reps,
        family,
        master_seed,
        ..StudySpec::new(StudyKind::Condition)
    };
    run_condition_study(&spec)
}

/// Dispatch on `spec.kind`.
pub fn run_study(spec: &StudySpec) -> Result<ExperimentTable> {
    match spec.kind {
        StudyKind::Size => run_size_study(spec),
        StudyKind::Power => run_power_study(spec),
        StudyKind::Condition => run_condition_study(spec),
    }
}
