//! Experiment plumbing: configuration, datasets, training runs and their artifacts.

pub mod config;
pub mod dataset;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use config::{ConfigMap, DatasetSource, ExperimentConfig};
pub use dataset::{
    format_bits, format_dataset, gen_dataset, parse_bits, parse_dataset, read_dataset, satisfies, write_dataset,
    GeneratorRule, GeneratorSpec,
};

use crate::circuit::{Circuit, ParamBindings, ParamId};
use crate::error::{Error, Result};
use crate::grover::{analytic_success_probability, grover_search, MarkedSet};
use crate::network::IGOQNN;
use crate::training::{self, Dataset, LossConfig, TrainReport, TrainingExample};

pub const METRICS_FILE: &str = "metrics.csv";
pub const PARAMS_FILE: &str = "params.json";
pub const QASM_FILE: &str = "circuit.qasm";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DATASET_FILE: &str = "dataset.txt";

/// Parses OpenQASM 2.0 text in the subset the exporter writes.
pub fn read_qasm(text: &str) -> Result<Circuit> {
    Circuit::from_qasm(text)
}

/// Run record written next to the other artifacts. Holds no clock readings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub examples: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub final_accuracy: f64,
    pub artifacts: Vec<String>,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub network: IGOQNN,
    pub dataset: Dataset,
    pub report: TrainReport,
    pub manifest: Manifest,
}

pub fn build_network(config: &ExperimentConfig) -> Result<IGOQNN> {
    IGOQNN::build(&config.shape, config.synapse_mode, config.flag_mode)
}

/// The dataset a config points at, checked against the network width.
pub fn load_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    let data = match &config.dataset {
        DatasetSource::File(path) => read_dataset(path)?,
        DatasetSource::Generated(spec) => gen_dataset(spec, config.seed())?,
    };
    let n = config.shape.n_database();
    if let Some(e) = data.iter().find(|e| e.database.len() != n) {
        return Err(Error::Config(format!(
            "dataset: examples have N = {} but network.n = {n}",
            e.database.len()
        )));
    }
    Ok(data)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn params_json(bindings: &ParamBindings) -> String {
    let map: BTreeMap<&str, f64> = bindings.iter().map(|(id, v)| (id.label(), v)).collect();
    let mut text = serde_json::to_string_pretty(&map).expect("string keys and finite floats serialise");
    text.push('\n');
    text
}

pub fn parse_params_json(text: &str) -> Result<ParamBindings> {
    let map: BTreeMap<String, f64> =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    Ok(map.into_iter().map(|(k, v)| (ParamId::new(k), v)).collect())
}

/// Trains per `config` and writes metrics, parameters, the bound circuit,
/// the dataset used and a manifest into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let network = build_network(config)?;
    let dataset = load_dataset(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("output.dir: cannot create {}: {e}", dir.display())))?;

    let report = training::train(&network, &dataset, &config.loss, &config.optimizer)?;
    let qasm = network.export_qasm(&report.final_bindings)?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed(),
        config: config.to_map().entries().clone(),
        examples: dataset.len(),
        epochs_run: report.epochs.len(),
        stopped_early: report.stopped_early,
        initial_loss: report.initial_loss,
        final_loss: report.final_loss(),
        final_accuracy: report.final_accuracy(),
        artifacts: [METRICS_FILE, PARAMS_FILE, QASM_FILE, DATASET_FILE]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    write(dir, METRICS_FILE, &report.metrics_csv())?;
    write(dir, PARAMS_FILE, &params_json(&report.final_bindings))?;
    write(dir, QASM_FILE, &qasm)?;
    write(dir, DATASET_FILE, &format_dataset(&dataset))?;
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    text.push('\n');
    write(dir, MANIFEST_FILE, &text)?;

    Ok(ExperimentOutcome {
        network,
        dataset,
        report,
        manifest,
    })
}

/// A finished run reloaded from its output directory.
pub struct StoredRun {
    pub config: ExperimentConfig,
    pub network: IGOQNN,
    pub bindings: ParamBindings,
    pub dataset: Dataset,
}

pub fn load_run(dir: &Path) -> Result<StoredRun> {
    let read = |name: &str| {
        let path = dir.join(name);
        std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    };
    let manifest: Manifest = serde_json::from_str(&read(MANIFEST_FILE)?)
        .map_err(|e| Error::Parse { line: e.line(), message: format!("{MANIFEST_FILE}: {e}") })?;
    let mut map = ConfigMap::default();
    for (k, v) in &manifest.config {
        map.set(k, v.clone())?;
    }
    let config = ExperimentConfig::from_map(&map)?;
    let network = build_network(&config)?;
    let bindings = parse_params_json(&read(PARAMS_FILE)?)?;
    bindings.values_for(network.parameters())?;
    let dataset = parse_dataset(&read(DATASET_FILE)?)?;
    Ok(StoredRun {
        config,
        network,
        bindings,
        dataset,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub example: TrainingExample,
    pub marginals: Vec<f64>,
    pub hits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    pub bit_accuracy: f64,
    pub predictions: Vec<Prediction>,
}

/// Exact-mode scores of `bindings` on `dataset`; hits are marginals above `threshold`.
pub fn evaluate(
    network: &IGOQNN,
    bindings: &ParamBindings,
    dataset: &[TrainingExample],
    loss: &LossConfig,
    threshold: f64,
) -> Result<Evaluation> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Argument(format!("threshold {threshold} outside (0, 1)")));
    }
    let mut predictions = Vec::with_capacity(dataset.len());
    for e in dataset {
        let marginals = network.propagate(bindings, &e.database)?;
        let hits = training::threshold_hits(&marginals, threshold);
        predictions.push(Prediction {
            example: e.clone(),
            marginals,
            hits,
        });
    }
    let total = dataset.len().max(1) as f64;
    let exact = predictions.iter().filter(|p| p.hits == p.example.hits).count();
    let bits: usize = predictions
        .iter()
        .map(|p| p.hits.iter().zip(&p.example.hits).filter(|(a, b)| a == b).count())
        .sum();
    let width = dataset.first().map_or(1, |e| e.hits.len()) as f64;
    Ok(Evaluation {
        loss: training::batch_loss(network, bindings, dataset, loss)?,
        accuracy: exact as f64 / total,
        bit_accuracy: bits as f64 / (total * width),
        predictions,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverDemo {
    pub n_index_qubits: usize,
    pub marked: Vec<usize>,
    pub iterations: usize,
    pub simulated: f64,
    pub analytic: f64,
}

impl GroverDemo {
    pub fn difference(&self) -> f64 {
        (self.simulated - self.analytic).abs()
    }
}

impl fmt::Display for GroverDemo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marked: Vec<String> = self.marked.iter().map(usize::to_string).collect();
        writeln!(f, "index qubits: {}", self.n_index_qubits)?;
        writeln!(f, "marked: {{{}}}", marked.join(", "))?;
        writeln!(f, "iterations: {}", self.iterations)?;
        writeln!(f, "simulated: {:.10}", self.simulated)?;
        writeln!(f, "analytic:  {:.10}", self.analytic)?;
        writeln!(f, "abs diff:  {:.3e}", self.difference())
    }
}

/// Simulated against analytic success probability; `iterations` defaults to the optimum.
pub fn grover_demo(n_index_qubits: usize, marked: &[usize], iterations: Option<usize>) -> Result<GroverDemo> {
    let set = MarkedSet::new(n_index_qubits, marked.iter().copied())?;
    let outcome = grover_search(&set, iterations)?;
    Ok(GroverDemo {
        n_index_qubits,
        marked: set.marked().iter().copied().collect(),
        iterations: outcome.iterations,
        simulated: outcome.success_probability,
        analytic: analytic_success_probability(set.num_entries(), set.marked().len(), outcome.iterations),
    })
}
