//! Classical optimisation of network parameters against database/hit examples.

pub mod gradient;
pub mod loss;
pub mod optimizer;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::ParamBindings;
use crate::error::{Error, Result};
use crate::model::{ExecutionMode, VariationalModel};
use crate::network::IGOQNN;

pub use gradient::{causal_instructions, Estimator, Objective, Plan};
pub use loss::{LossConfig, LossKind};
pub use optimizer::{
    AdamConfig, AdamState, GradientMethod, OptimizerConfig, OptimizerKind, SpsaConfig, SpsaState,
};

/// Loss-improvement window and tolerance for early stopping.
pub const EARLY_STOP_WINDOW: usize = 20;
pub const EARLY_STOP_TOLERANCE: f64 = 1e-6;

/// Half-width of the uniform initialisation interval.
pub const INIT_SCALE: f64 = 0.1;

/// A database bit pattern and the hits it should produce; index `i` is channel `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrainingExample {
    pub database: Vec<bool>,
    pub hits: Vec<bool>,
}

impl TrainingExample {
    pub fn new(database: Vec<bool>, hits: Vec<bool>) -> Result<Self> {
        if database.is_empty() || database.len() != hits.len() {
            return Err(Error::Argument(format!(
                "database has {} bits and hits {}; both must be equal and non-empty",
                database.len(),
                hits.len()
            )));
        }
        Ok(TrainingExample { database, hits })
    }

    pub fn to_sample(&self) -> Sample {
        Sample {
            inputs: self.database.clone(),
            targets: self.hits.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect(),
        }
    }
}

pub type Dataset = Vec<TrainingExample>;

/// Model-level example: input bits and real-valued target marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub inputs: Vec<bool>,
    pub targets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub loss: f64,
    /// Fraction of examples whose thresholded outputs match all target bits.
    pub accuracy: f64,
    /// Fraction of matching output bits over all examples.
    pub bit_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    /// One record per executed epoch, measured after that epoch's update.
    pub epochs: Vec<EpochRecord>,
    pub initial_loss: f64,
    pub initial_accuracy: f64,
    pub final_values: Vec<f64>,
    /// Covers the full parameter inventory.
    pub final_bindings: ParamBindings,
    pub stopped_early: bool,
    pub wall_time: Duration,
}

impl TrainReport {
    pub fn final_record(&self) -> &EpochRecord {
        self.epochs.last().expect("at least one epoch runs")
    }

    pub fn final_loss(&self) -> f64 {
        self.final_record().loss
    }

    pub fn final_accuracy(&self) -> f64 {
        self.final_record().accuracy
    }

    /// `epoch,loss,accuracy,bit_accuracy` with a header row.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("epoch,loss,accuracy,bit_accuracy\n");
        for r in &self.epochs {
            out.push_str(&format!("{},{},{},{}\n", r.epoch, r.loss, r.accuracy, r.bit_accuracy));
        }
        out
    }
}

/// Marginals this close to the threshold count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Bit `i` is set iff `marginals[i]` exceeds `threshold` by more than [`TIE_TOLERANCE`].
pub fn threshold_hits(marginals: &[f64], threshold: f64) -> Vec<bool> {
    marginals.iter().map(|&p| p > threshold + TIE_TOLERANCE).collect()
}

/// `(exact-match fraction, per-bit fraction)` of thresholded marginals at 0.5.
pub fn hit_accuracy(marginals: &[Vec<f64>], samples: &[Sample]) -> (f64, f64) {
    let mut exact = 0usize;
    let mut bits = 0usize;
    let mut total_bits = 0usize;
    for (p, s) in marginals.iter().zip(samples) {
        let predicted = threshold_hits(p, 0.5);
        let matches = predicted
            .iter()
            .zip(&s.targets)
            .filter(|(&hit, &y)| hit == (y > 0.5))
            .count();
        if matches == s.targets.len() {
            exact += 1;
        }
        bits += matches;
        total_bits += s.targets.len();
    }
    (exact as f64 / samples.len() as f64, bits as f64 / total_bits as f64)
}

/// Uniform draws in `[-INIT_SCALE, INIT_SCALE]`.
pub fn initial_values(num_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_params).map(|_| rng.gen_range(-INIT_SCALE..=INIT_SCALE)).collect()
}

fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn estimator(mode: ExecutionMode, seed: u64) -> Estimator {
    match mode {
        ExecutionMode::Exact => Estimator::Exact,
        ExecutionMode::Shots { shots } => Estimator::Shots {
            shots,
            rng: seeded_stream(seed, 1),
        },
    }
}

fn samples_for(network: &IGOQNN, batch: &[TrainingExample]) -> Result<Vec<Sample>> {
    if batch.is_empty() {
        return Err(Error::Argument("dataset is empty".into()));
    }
    let n = network.shape().n_database();
    for (i, ex) in batch.iter().enumerate() {
        if ex.database.len() != n || ex.hits.len() != n {
            return Err(Error::Argument(format!(
                "example {i} has {} database and {} hit bits, network has N = {n}",
                ex.database.len(),
                ex.hits.len()
            )));
        }
    }
    Ok(batch.iter().map(TrainingExample::to_sample).collect())
}

fn to_bindings(model: &VariationalModel, values: &[f64]) -> ParamBindings {
    model.params().iter().cloned().zip(values.iter().copied()).collect()
}

/// Data loss of one example plus the L1 penalty.
pub fn loss(network: &IGOQNN, bindings: &ParamBindings, example: &TrainingExample, cfg: &LossConfig) -> Result<f64> {
    let samples = samples_for(network, std::slice::from_ref(example))?;
    let values = bindings.values_for(network.parameters())?;
    Objective::new(network.model(), &samples, *cfg)?.value(&values, &mut Estimator::Exact)
}

/// Batch-mean loss plus the L1 penalty.
pub fn batch_loss(network: &IGOQNN, bindings: &ParamBindings, batch: &[TrainingExample], cfg: &LossConfig) -> Result<f64> {
    let samples = samples_for(network, batch)?;
    let values = bindings.values_for(network.parameters())?;
    Objective::new(network.model(), &samples, *cfg)?.value(&values, &mut Estimator::Exact)
}

pub fn grad_central_fd(
    network: &IGOQNN,
    bindings: &ParamBindings,
    batch: &[TrainingExample],
    cfg: &LossConfig,
    h: f64,
) -> Result<ParamBindings> {
    let samples = samples_for(network, batch)?;
    let values = bindings.values_for(network.parameters())?;
    let grad = Objective::new(network.model(), &samples, *cfg)?.central_difference(&values, h, &mut Estimator::Exact)?;
    Ok(to_bindings(network.model(), &grad))
}

pub fn grad_param_shift(
    network: &IGOQNN,
    bindings: &ParamBindings,
    batch: &[TrainingExample],
    cfg: &LossConfig,
) -> Result<ParamBindings> {
    let samples = samples_for(network, batch)?;
    let values = bindings.values_for(network.parameters())?;
    let (_, grad) = Objective::new(network.model(), &samples, *cfg)?.parameter_shift(&values, &mut Estimator::Exact)?;
    Ok(to_bindings(network.model(), &grad))
}

/// One SPSA update of `bindings` on the batch objective.
pub fn spsa_step(
    network: &IGOQNN,
    bindings: &ParamBindings,
    batch: &[TrainingExample],
    cfg: &LossConfig,
    spsa: &SpsaConfig,
    state: &mut SpsaState,
) -> Result<ParamBindings> {
    let samples = samples_for(network, batch)?;
    let mut values = bindings.values_for(network.parameters())?;
    let obj = Objective::new(network.model(), &samples, *cfg)?;
    optimizer::spsa_update(&mut values, spsa, state, |v| obj.value(v, &mut Estimator::Exact))?;
    Ok(to_bindings(network.model(), &values))
}

/// Output hits for one database pattern; ties at `threshold` read as 0.
pub fn predict_hits(network: &IGOQNN, bindings: &ParamBindings, database_bits: &[bool], threshold: f64) -> Result<Vec<bool>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Argument(format!("threshold {threshold} outside (0, 1)")));
    }
    Ok(threshold_hits(&network.propagate(bindings, database_bits)?, threshold))
}

/// Trains a network from seeded uniform initial parameters.
pub fn train(
    network: &IGOQNN,
    dataset: &[TrainingExample],
    loss: &LossConfig,
    opt: &OptimizerConfig,
) -> Result<TrainReport> {
    let samples = samples_for(network, dataset)?;
    let init = initial_values(network.parameters().len(), opt.seed);
    train_model(network.model(), &samples, loss, opt, init)
}

/// Full-batch training loop over an arbitrary model.
pub fn train_model(
    model: &VariationalModel,
    samples: &[Sample],
    loss: &LossConfig,
    opt: &OptimizerConfig,
    initial: Vec<f64>,
) -> Result<TrainReport> {
    opt.validate()?;
    let start = Instant::now();
    let obj = Objective::new(model, samples, *loss)?;
    let mut est = estimator(opt.execution, opt.seed);
    let mut values = initial;
    model.program().check_values(&values)?;

    let m0 = obj.marginals(&values, &mut est)?;
    let initial_loss = obj.loss_from_marginals(&values, &m0);
    let (initial_accuracy, _) = hit_accuracy(&m0, samples);

    let mut adam = AdamState::new(values.len());
    let mut spsa = SpsaState::new(seeded_stream(opt.seed, 2).gen());
    let mut epochs: Vec<EpochRecord> = Vec::new();
    let mut stopped_early = false;

    for epoch in 1..=opt.max_epochs {
        match opt.kind {
            OptimizerKind::GradientDescent | OptimizerKind::Adam => {
                let grad = match opt.gradient {
                    GradientMethod::ParameterShift => obj.parameter_shift(&values, &mut est)?.1,
                    GradientMethod::CentralDifference { step } => obj.central_difference(&values, step, &mut est)?,
                };
                if opt.kind == OptimizerKind::Adam {
                    adam.update(&mut values, &grad, opt.learning_rate, &opt.adam);
                } else {
                    optimizer::gd_update(&mut values, &grad, opt.learning_rate);
                }
            }
            OptimizerKind::Spsa => {
                optimizer::spsa_update(&mut values, &opt.spsa, &mut spsa, |v| obj.value(v, &mut est))?;
            }
        }

        let m = obj.marginals(&values, &mut est)?;
        let loss = obj.loss_from_marginals(&values, &m);
        let (accuracy, bit_accuracy) = hit_accuracy(&m, samples);
        epochs.push(EpochRecord {
            epoch,
            loss,
            accuracy,
            bit_accuracy,
        });

        if epoch >= EARLY_STOP_WINDOW {
            let reference = if epoch == EARLY_STOP_WINDOW {
                initial_loss
            } else {
                epochs[epoch - EARLY_STOP_WINDOW - 1].loss
            };
            if reference - loss < EARLY_STOP_TOLERANCE {
                stopped_early = epoch < opt.max_epochs;
                break;
            }
        }
    }

    Ok(TrainReport {
        epochs,
        initial_loss,
        initial_accuracy,
        final_bindings: to_bindings(model, &values),
        final_values: values,
        stopped_early,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests;
