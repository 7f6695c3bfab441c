//! A compiled parameterised circuit with basis-encoded inputs and measured outputs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, ParamId, Program};
use crate::error::{Error, Result};
use crate::statevector::{sample_from, StateVector};

/// How output marginals are obtained from a final state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionMode {
    #[default]
    Exact,
    /// Frequencies over `shots` sampled measurements of the output qubits.
    Shots { shots: usize },
}

#[derive(Clone, Debug)]
pub struct VariationalModel {
    program: Program,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    regularized: Vec<bool>,
}

impl VariationalModel {
    /// `inputs[i]` receives data bit `i` as an X gate; `outputs[i]` yields marginal `i`.
    /// `regularized` lists the parameters subject to the L1 penalty.
    pub fn new(
        circuit: &Circuit,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        regularized: &[ParamId],
    ) -> Result<Self> {
        let n = circuit.num_qubits();
        if let Some(&q) = inputs.iter().chain(&outputs).find(|&&q| q >= n) {
            return Err(Error::Index(format!("qubit {q} outside {n}-qubit circuit")));
        }
        if outputs.is_empty() {
            return Err(Error::Argument("model has no output qubits".into()));
        }
        let program = circuit.compile();
        let mut mask = vec![false; program.params().len()];
        for id in regularized {
            match program.params().iter().position(|p| p == id) {
                Some(i) => mask[i] = true,
                None => {
                    return Err(Error::Argument(format!(
                        "regularised parameter `{id}` does not occur in the circuit"
                    )))
                }
            }
        }
        Ok(VariationalModel {
            program,
            inputs,
            outputs,
            regularized: mask,
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn params(&self) -> &[ParamId] {
        self.program.params()
    }

    pub fn num_params(&self) -> usize {
        self.program.params().len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Per-parameter flag, aligned with [`Self::params`].
    pub fn regularized(&self) -> &[bool] {
        &self.regularized
    }

    pub fn check_bits(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.inputs.len() {
            return Err(Error::Argument(format!(
                "expected {} input bits, got {}",
                self.inputs.len(),
                bits.len()
            )));
        }
        Ok(())
    }

    /// Basis state with input qubit `inputs[i]` set iff `bits[i]`.
    pub fn initial_state(&self, bits: &[bool]) -> Result<StateVector> {
        self.check_bits(bits)?;
        let index = self
            .inputs
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .fold(0usize, |acc, (&q, _)| acc | (1 << q));
        StateVector::basis_state(self.program.num_qubits(), index)
    }

    pub fn final_state(&self, values: &[f64], bits: &[bool]) -> Result<StateVector> {
        let mut state = self.initial_state(bits)?;
        self.program.run(&mut state, values)?;
        Ok(state)
    }

    /// Exact probability of each output qubit reading 1.
    pub fn marginals(&self, values: &[f64], bits: &[bool]) -> Result<Vec<f64>> {
        let state = self.final_state(values, bits)?;
        Ok(self.exact_marginals(&state))
    }

    pub fn exact_marginals(&self, state: &StateVector) -> Vec<f64> {
        self.outputs
            .iter()
            .map(|&q| crate::statevector::marginal_one(state.amplitudes(), q))
            .collect()
    }

    /// Marginals estimated from `shots` joint samples of the output qubits.
    pub fn sampled_marginals(&self, state: &StateVector, shots: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
        sampled_marginals_of(state, &self.outputs, shots, rng)
    }
}

/// Per-qubit frequencies of 1 over `shots` joint samples of `qubits`.
pub(crate) fn sampled_marginals_of(
    state: &StateVector,
    qubits: &[usize],
    shots: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let dist = state.joint_distribution(qubits)?;
    let mut ones = vec![0usize; qubits.len()];
    for outcome in sample_from(&dist, shots, rng) {
        for (i, count) in ones.iter_mut().enumerate() {
            *count += (outcome >> i) & 1;
        }
    }
    Ok(ones.into_iter().map(|c| c as f64 / shots as f64).collect())
}
