//! Batch objective evaluation and its gradients.
//!
//! Evaluation runs a [`Plan`]: the model program with instructions outside
//! the backward lightcone of the measured qubits removed and with ancillas
//! that only ever receive phase kickback folded into phases on their controls.
//! Both rewrites leave the output marginals unchanged.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use super::loss::{data_loss, data_loss_grad, l1_penalty, l1_subgradient, LossConfig};
use super::Sample;
use crate::circuit::{Instr, Program, Slot};
use crate::error::{Error, Result};
use crate::model::{sampled_marginals_of, VariationalModel};
use crate::statevector::{kernel, marginal_one, StateVector, Unitary2};

/// Source of output marginals for a final state.
#[derive(Clone, Debug)]
pub enum Estimator {
    Exact,
    Shots { shots: usize, rng: ChaCha8Rng },
}

impl Estimator {
    fn marginals(&mut self, state: &StateVector, outputs: &[usize]) -> Result<Vec<f64>> {
        match self {
            Estimator::Exact => Ok(outputs.iter().map(|&q| marginal_one(state.amplitudes(), q)).collect()),
            Estimator::Shots { shots, rng } => sampled_marginals_of(state, outputs, *shots, rng),
        }
    }
}

/// Indices of instructions that can influence the reduced state of `outputs`, ascending.
pub fn causal_instructions(program: &Program, outputs: &[usize]) -> Vec<usize> {
    causal_indices(program.instrs(), program.num_qubits(), outputs)
}

fn causal_indices(instrs: &[Instr], num_qubits: usize, outputs: &[usize]) -> Vec<usize> {
    let mut reach = vec![false; num_qubits];
    for &q in outputs {
        reach[q] = true;
    }
    let mut live = Vec::new();
    for (k, instr) in instrs.iter().enumerate().rev() {
        let (a, b) = instr.qubits();
        if reach[a] || b.is_some_and(|b| reach[b]) {
            reach[a] = true;
            if let Some(b) = b {
                reach[b] = true;
            }
            live.push(k);
        }
    }
    live.reverse();
    live
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_z() -> Unitary2 {
    Unitary2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

fn pauli_y() -> Unitary2 {
    Unitary2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

/// `P(φ)·Y·P(φ)†` with `P(φ) = diag(1, e^{iφ})`.
fn phased_y(phi: f64) -> Unitary2 {
    let e = Complex64::from_polar(1.0, phi);
    Unitary2([[c(0.0, 0.0), c(0.0, -1.0) * e.conj()], [c(0.0, 1.0) * e, c(0.0, 0.0)]])
}

/// Zeroes every amplitude whose bit `q` differs from `bit`.
fn project(amps: &mut [Complex64], q: usize, bit: bool) {
    for (i, a) in amps.iter_mut().enumerate() {
        if ((i >> q) & 1 == 1) != bit {
            *a = c(0.0, 0.0);
        }
    }
}

/// `q` starts in |0⟩, sees only literal one-qubit gates until it is an X
/// eigenstate, and is afterwards only ever the target of CX. Then every such
/// CX equals `Z^k` on its control (`k = 1` for |−⟩, `0` for |+⟩) and `q` can
/// be dropped. Returns the rewritten instruction list.
fn absorb_kickback_qubit(instrs: &[Instr], q: usize) -> Option<Vec<Instr>> {
    let mut ket = [c(1.0, 0.0), c(0.0, 0.0)];
    let mut kickback: Option<bool> = None;
    let mut out = Vec::with_capacity(instrs.len());
    for instr in instrs {
        let (a, b) = instr.qubits();
        if a != q && b != Some(q) {
            out.push(instr.clone());
            continue;
        }
        match (instr, kickback) {
            (Instr::Fixed { u, .. }, None) => {
                let [[u00, u01], [u10, u11]] = u.0;
                ket = [u00 * ket[0] + u01 * ket[1], u10 * ket[0] + u11 * ket[1]];
            }
            (Instr::X { .. }, None) => ket.swap(0, 1),
            (Instr::Cx { control, target }, _) if *target == q => {
                let flips = match kickback {
                    Some(f) => f,
                    None => {
                        let x = 2.0 * (ket[0].conj() * ket[1]).re;
                        let f = if (x + 1.0).abs() < 1e-12 {
                            true
                        } else if (x - 1.0).abs() < 1e-12 {
                            false
                        } else {
                            return None;
                        };
                        kickback = Some(f);
                        f
                    }
                };
                if flips {
                    out.push(Instr::Fixed {
                        target: *control,
                        u: pauli_z(),
                    });
                }
            }
            _ => return None,
        }
    }
    Some(out)
}

fn literal(instr: &Instr) -> Option<(usize, Unitary2)> {
    match instr {
        Instr::Fixed { target, u } => Some((*target, *u)),
        Instr::X { target } => Some((*target, Unitary2::pauli_x())),
        _ => None,
    }
}

/// Merges runs of literal one-qubit gates on the same qubit into one gate.
fn fuse_literals(instrs: Vec<Instr>, num_qubits: usize) -> Vec<Instr> {
    let mut out: Vec<Instr> = Vec::with_capacity(instrs.len());
    // Per qubit: position in `out` of a literal gate not yet followed by anything on that qubit.
    let mut open: Vec<Option<usize>> = vec![None; num_qubits];
    for instr in instrs {
        if let Some((q, u)) = literal(&instr) {
            if let Some(k) = open[q] {
                let (_, prev) = literal(&out[k]).expect("open slots hold literals");
                out[k] = Instr::Fixed { target: q, u: u.mul(&prev) };
                continue;
            }
            open[q] = Some(out.len());
            out.push(instr);
            continue;
        }
        let (a, b) = instr.qubits();
        open[a] = None;
        if let Some(b) = b {
            open[b] = None;
        }
        out.push(instr);
    }
    out
}

/// A model program specialised for evaluating output marginals.
#[derive(Clone, Debug)]
pub struct Plan {
    num_qubits: usize,
    instrs: Vec<Instr>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Plan {
    pub fn new(model: &VariationalModel) -> Self {
        let program = model.program();
        let n = program.num_qubits();
        let mut instrs = program.instrs().to_vec();
        let mut kept = vec![true; n];
        for q in 0..n {
            if model.inputs().contains(&q) || model.outputs().contains(&q) {
                continue;
            }
            if let Some(rewritten) = absorb_kickback_qubit(&instrs, q) {
                instrs = rewritten;
                kept[q] = false;
            }
        }
        let live = causal_indices(&instrs, n, model.outputs());
        // Gradient runs replay suffixes, so late gates dominate the cost. Their
        // qubits get the high indices, where kernels stream long contiguous runs.
        let mut weight = vec![0usize; n];
        for (pos, &k) in live.iter().enumerate() {
            let (a, b) = instrs[k].qubits();
            weight[a] += pos + 1;
            if let Some(b) = b {
                weight[b] += pos + 1;
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&q| kept[q]).collect();
        order.sort_by_key(|&q| (weight[q], q));
        let mut map = vec![usize::MAX; n];
        for (slot, &q) in order.iter().enumerate() {
            map[q] = slot;
        }
        let width = order.len();
        let live: Vec<Instr> = live.into_iter().map(|k| instrs[k].remap(&map)).collect();
        Plan {
            num_qubits: width,
            instrs: fuse_literals(live, width),
            inputs: model.inputs().iter().map(|&q| map[q]).collect(),
            outputs: model.outputs().iter().map(|&q| map[q]).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    fn initial_state(&self, bits: &[bool]) -> Result<StateVector> {
        let index = self
            .inputs
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .fold(0usize, |acc, (&q, _)| acc | (1 << q));
        StateVector::basis_state(self.num_qubits, index)
    }

    fn run(&self, state: &mut StateVector, values: &[f64], from: usize) {
        let amps = state.amplitudes_mut();
        for instr in &self.instrs[from..] {
            instr.apply(amps, values);
        }
    }
}

fn slot_sign(slot: &Slot) -> Option<(usize, f64)> {
    match *slot {
        Slot::Fixed(_) => None,
        Slot::Param { index, negated } => Some((index, if negated { -1.0 } else { 1.0 })),
    }
}

/// Full-batch objective: mean data loss over `samples` plus the L1 term.
pub struct Objective<'a> {
    model: &'a VariationalModel,
    samples: &'a [Sample],
    loss: LossConfig,
    plan: Plan,
}

impl<'a> Objective<'a> {
    pub fn new(model: &'a VariationalModel, samples: &'a [Sample], loss: LossConfig) -> Result<Self> {
        loss.validate()?;
        if samples.is_empty() {
            return Err(Error::Argument("dataset is empty".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            model.check_bits(&s.inputs).map_err(|e| Error::Argument(format!("example {i}: {e}")))?;
            if s.targets.len() != model.outputs().len() {
                return Err(Error::Argument(format!(
                    "example {i}: expected {} targets, got {}",
                    model.outputs().len(),
                    s.targets.len()
                )));
            }
            if s.targets.iter().any(|y| !(0.0..=1.0).contains(y)) {
                return Err(Error::Argument(format!("example {i}: targets must lie in [0, 1]")));
            }
        }
        Ok(Objective {
            model,
            samples,
            loss,
            plan: Plan::new(model),
        })
    }

    pub fn model(&self) -> &VariationalModel {
        self.model
    }

    pub fn samples(&self) -> &[Sample] {
        self.samples
    }

    pub fn loss_config(&self) -> &LossConfig {
        &self.loss
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    fn forward(&self, values: &[f64], sample: &Sample) -> Result<StateVector> {
        let mut state = self.plan.initial_state(&sample.inputs)?;
        self.plan.run(&mut state, values, 0);
        Ok(state)
    }

    /// Output marginals for every sample.
    pub fn marginals(&self, values: &[f64], est: &mut Estimator) -> Result<Vec<Vec<f64>>> {
        self.model.program().check_values(values)?;
        self.samples
            .iter()
            .map(|s| est.marginals(&self.forward(values, s)?, &self.plan.outputs))
            .collect()
    }

    pub fn penalty(&self, values: &[f64]) -> f64 {
        l1_penalty(values, self.model.regularized(), self.loss.l1_strength)
    }

    /// Mean data loss of precomputed marginals plus the penalty at `values`.
    pub fn loss_from_marginals(&self, values: &[f64], marginals: &[Vec<f64>]) -> f64 {
        let data: f64 = marginals
            .iter()
            .zip(self.samples)
            .map(|(p, s)| data_loss(p, &s.targets, &self.loss))
            .sum();
        data / self.samples.len() as f64 + self.penalty(values)
    }

    pub fn value(&self, values: &[f64], est: &mut Estimator) -> Result<f64> {
        let m = self.marginals(values, est)?;
        Ok(self.loss_from_marginals(values, &m))
    }

    /// `(L(θ+h e_i) - L(θ-h e_i)) / 2h` for every parameter.
    pub fn central_difference(&self, values: &[f64], h: f64, est: &mut Estimator) -> Result<Vec<f64>> {
        if !(1e-8..=1e-2).contains(&h) {
            return Err(Error::Argument(format!("finite-difference step {h} outside [1e-8, 1e-2]")));
        }
        self.model.program().check_values(values)?;
        let mut probe = values.to_vec();
        let mut grad = Vec::with_capacity(values.len());
        for i in 0..values.len() {
            probe[i] = values[i] + h;
            let up = self.value(&probe, est)?;
            probe[i] = values[i] - h;
            let down = self.value(&probe, est)?;
            probe[i] = values[i];
            grad.push((up - down) / (2.0 * h));
        }
        Ok(grad)
    }

    /// Loss and its parameter-shift gradient.
    ///
    /// Each slot contributes `(f(+π/2) - f(-π/2)) / 2`, where `f` is the
    /// chain-rule observable of the circuit with that one slot occurrence
    /// shifted. CU3 polar angles go through `C[RY(θ)] = RY(θ/2)·CX·RY(-θ/2)·CX`
    /// and shift the two uncontrolled rotations instead.
    pub fn parameter_shift(&self, values: &[f64], est: &mut Estimator) -> Result<(f64, Vec<f64>)> {
        self.model.program().check_values(values)?;
        let mut grad = vec![0.0; values.len()];
        let mut data = 0.0;
        for sample in self.samples {
            data += self.shift_one(values, sample, est, &mut grad)?;
        }
        let scale = 1.0 / self.samples.len() as f64;
        for g in &mut grad {
            *g *= scale;
        }
        let l1 = l1_subgradient(values, self.model.regularized(), self.loss.l1_strength);
        for (g, p) in grad.iter_mut().zip(l1) {
            *g += p;
        }
        Ok((data * scale + self.penalty(values), grad))
    }

    /// Accumulates `∂ data_loss / ∂ values` of one sample into `grad`; returns its data loss.
    ///
    /// A shift by `s` of a rotation with involutory generator `G` turns the
    /// state `a` right after the gate into `cos(s/2)·a - i·sin(s/2)·G·a`, up to
    /// global phase. The suffix `S` is linear, so the shifted final state is
    /// `cos(s/2)·ψ - i·sin(s/2)·S(G·a)`: one suffix run yields both shifted circuits.
    fn shift_one(&self, values: &[f64], sample: &Sample, est: &mut Estimator, grad: &mut [f64]) -> Result<f64> {
        let plan = &self.plan;
        let mut prefix = plan.initial_state(&sample.inputs)?;
        let mut psi = prefix.clone();
        plan.run(&mut psi, values, 0);
        let p = est.marginals(&psi, &plan.outputs)?;
        let weights = data_loss_grad(&p, &sample.targets, &self.loss);
        let loss = data_loss(&p, &sample.targets, &self.loss);
        if weights.iter().all(|&w| w == 0.0) {
            return Ok(loss);
        }

        let mut shifted = psi.clone();
        // (f(+π/2) - f(-π/2)) / 2 given the suffix image `sg` of `G·a`.
        let mut two_term = |sg: &[Complex64]| -> Result<f64> {
            let mut f = [0.0; 2];
            for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                let d = c(0.0, -sign * FRAC_1_SQRT_2);
                for ((o, a), b) in shifted.amplitudes_mut().iter_mut().zip(psi.amplitudes()).zip(sg) {
                    *o = a * FRAC_1_SQRT_2 + b * d;
                }
                let m = est.marginals(&shifted, &plan.outputs)?;
                f[k] = m.iter().zip(&weights).map(|(p, w)| p * w).sum();
            }
            Ok((f[0] - f[1]) / 2.0)
        };
        let suffix = |from: usize, mut v: StateVector| -> StateVector {
            plan.run(&mut v, values, from);
            v
        };

        for (pos, instr) in plan.instrs.iter().enumerate() {
            let slots = match instr.slots() {
                Some(s) if s.iter().any(|s| matches!(s, Slot::Param { .. })) => s,
                _ => {
                    instr.apply(prefix.amplitudes_mut(), values);
                    continue;
                }
            };
            let [theta, phi, lambda] = [slots[0].value(values), slots[1].value(values), slots[2].value(values)];
            let u = Unitary2::u3(theta, phi, lambda);
            let mut post = prefix.clone();
            instr.apply(post.amplitudes_mut(), values);
            let next = pos + 1;

            match *instr {
                Instr::U3 { target, .. } => {
                    for (j, slot) in slots.iter().enumerate() {
                        let Some((index, sign)) = slot_sign(slot) else { continue };
                        let mut v = if j == 2 { prefix.clone() } else { post.clone() };
                        let amps = v.amplitudes_mut();
                        match j {
                            // U3(θ+s) = P(φ)RY(s)P(φ)† · U3(θ)
                            0 => kernel::apply_1q(amps, &phased_y(phi), target),
                            // U3(φ+s) = P(s) · U3
                            1 => kernel::apply_1q(amps, &pauli_z(), target),
                            // U3(λ+s) = U3 · P(s)
                            _ => {
                                kernel::apply_1q(amps, &pauli_z(), target);
                                kernel::apply_1q(amps, &u, target);
                            }
                        }
                        grad[index] += sign * two_term(suffix(next, v).amplitudes())?;
                    }
                }
                Instr::Cu3 { control, target, .. } => {
                    if let Some((index, sign)) = slot_sign(&slots[0]) {
                        // Inner rotation shift: G = P0⊗Y - P1⊗Y_φ; outer: G = P0⊗Y + P1⊗Y_φ.
                        let mut low = post.clone();
                        kernel::apply_1q(low.amplitudes_mut(), &pauli_y(), target);
                        project(low.amplitudes_mut(), control, false);
                        let mut high = post.clone();
                        project(high.amplitudes_mut(), control, true);
                        kernel::apply_1q(high.amplitudes_mut(), &phased_y(phi), target);
                        let low = suffix(next, low);
                        let high = suffix(next, high);
                        let inner: Vec<Complex64> =
                            low.amplitudes().iter().zip(high.amplitudes()).map(|(a, b)| a - b).collect();
                        let outer: Vec<Complex64> =
                            low.amplitudes().iter().zip(high.amplitudes()).map(|(a, b)| a + b).collect();
                        let d = -0.5 * two_term(&inner)? + 0.5 * two_term(&outer)?;
                        grad[index] += sign * d;
                    }
                    for j in 1..3 {
                        let Some((index, sign)) = slot_sign(&slots[j]) else { continue };
                        // C[P(s)] ∝ cos(s/2)·I - i·sin(s/2)·CZ.
                        let mut v = if j == 1 { post.clone() } else { prefix.clone() };
                        let amps = v.amplitudes_mut();
                        kernel::apply_controlled_1q(amps, &pauli_z(), control, target);
                        if j == 2 {
                            kernel::apply_controlled_1q(amps, &u, control, target);
                        }
                        grad[index] += sign * two_term(suffix(next, v).amplitudes())?;
                    }
                }
                _ => unreachable!("only U3 and CU3 carry slots"),
            }
            prefix = post;
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, GateOp, ParamId};
    use crate::training::loss::LossKind;

    fn sym(label: &str) -> crate::circuit::Angle {
        crate::circuit::Angle::symbol(ParamId::new(label))
    }

    fn toy_model() -> VariationalModel {
        let mut c = Circuit::new(3).unwrap();
        c.append(GateOp::h(0)).unwrap();
        c.append(GateOp::u3(1, sym("a"), sym("b"), sym("c"))).unwrap();
        c.append(GateOp::cu3(0, 1, sym("d"), sym("e"), sym("f"))).unwrap();
        c.append(GateOp::cu3(1, 2, sym("g").negate(), sym("a"), 0.3)).unwrap();
        c.append(GateOp::u3(2, sym("d"), sym("b").negate(), sym("h"))).unwrap();
        VariationalModel::new(&c, vec![0], vec![1, 2], &[ParamId::new("d")]).unwrap()
    }

    #[test]
    fn shift_matches_difference_on_shared_and_negated_slots() {
        let model = toy_model();
        let samples = vec![
            Sample {
                inputs: vec![false],
                targets: vec![1.0, 0.0],
            },
            Sample {
                inputs: vec![true],
                targets: vec![0.0, 1.0],
            },
        ];
        for kind in [LossKind::Bce, LossKind::L2] {
            let cfg = LossConfig {
                kind,
                l1_strength: 0.1,
                ..Default::default()
            };
            let obj = Objective::new(&model, &samples, cfg).unwrap();
            let values: Vec<f64> = (0..model.num_params()).map(|i| 0.7 * i as f64 - 1.3).collect();
            let (loss, shift) = obj.parameter_shift(&values, &mut Estimator::Exact).unwrap();
            let fd = obj.central_difference(&values, 1e-5, &mut Estimator::Exact).unwrap();
            assert!((loss - obj.value(&values, &mut Estimator::Exact).unwrap()).abs() < 1e-14);
            for (s, f) in shift.iter().zip(&fd) {
                assert!((s - f).abs() < 1e-7, "{shift:?} vs {fd:?}");
            }
        }
    }

    #[test]
    fn lightcone_excludes_trailing_gates() {
        let mut c = Circuit::new(3).unwrap();
        c.append(GateOp::u3(0, sym("x"), 0.0, 0.0)).unwrap();
        c.append(GateOp::cx(0, 1)).unwrap();
        c.append(GateOp::u3(0, sym("y"), sym("z"), 0.0)).unwrap();
        c.append(GateOp::u3(2, sym("w"), 0.0, 0.0)).unwrap();
        let model = VariationalModel::new(&c, vec![], vec![1], &[]).unwrap();
        assert_eq!(causal_instructions(model.program(), &[1]), vec![0, 1]);
        let samples = vec![Sample {
            inputs: vec![],
            targets: vec![1.0],
        }];
        let obj = Objective::new(&model, &samples, LossConfig::default()).unwrap();
        let values = [0.4, 1.1, -0.3, 0.8];
        let (_, g) = obj.parameter_shift(&values, &mut Estimator::Exact).unwrap();
        let fd = obj.central_difference(&values, 1e-5, &mut Estimator::Exact).unwrap();
        let ids: Vec<&str> = model.params().iter().map(|p| p.label()).collect();
        for (i, id) in ids.iter().enumerate() {
            if *id != "x" {
                assert!(g[i].abs() < 1e-9 && fd[i].abs() < 1e-9);
            }
        }
        assert!(g[0].abs() > 0.1);
    }

    #[test]
    fn finite_difference_step_is_checked() {
        let model = toy_model();
        let samples = vec![Sample {
            inputs: vec![false],
            targets: vec![0.0, 0.0],
        }];
        let obj = Objective::new(&model, &samples, LossConfig::default()).unwrap();
        let v = vec![0.0; model.num_params()];
        assert!(obj.central_difference(&v, 0.1, &mut Estimator::Exact).is_err());
        assert!(obj.central_difference(&v, 1e-9, &mut Estimator::Exact).is_err());
        assert!(obj.parameter_shift(&v[1..], &mut Estimator::Exact).is_err());
    }

    #[test]
    fn objective_validates_samples() {
        let model = toy_model();
        let cfg = LossConfig::default();
        assert!(Objective::new(&model, &[], cfg).is_err());
        let wrong = [Sample {
            inputs: vec![true, true],
            targets: vec![0.0, 0.0],
        }];
        assert!(Objective::new(&model, &wrong, cfg).is_err());
        let wrong = [Sample {
            inputs: vec![true],
            targets: vec![2.0, 0.0],
        }];
        assert!(Objective::new(&model, &wrong, cfg).is_err());
    }

    fn network_models() -> Vec<crate::network::IGOQNN> {
        use crate::network::*;
        let mut out = Vec::new();
        for (n, widths) in [(1, vec![1]), (2, vec![1]), (2, vec![2, 1])] {
            let shape = NetworkShape::new(n, widths).unwrap();
            for synapse_mode in [SynapseMode::NullConsistent, SynapseMode::PaperLiteral] {
                for flag_mode in [FlagMode::Parity, FlagMode::Conjunction] {
                    for flag_source in [FlagSource::Input, FlagSource::Output] {
                        for diffuser_target in [DiffuserTarget::Output, DiffuserTarget::Input] {
                            let options = NetworkOptions {
                                synapse_mode,
                                flag_mode,
                                flag_source,
                                diffuser_target,
                                ..Default::default()
                            };
                            out.push(IGOQNN::build_with(&shape, options).unwrap());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn plan_preserves_output_marginals() {
        for (k, net) in network_models().iter().enumerate() {
            let model = net.model();
            let values = crate::training::initial_values(model.num_params(), k as u64)
                .iter()
                .map(|v| v * 20.0)
                .collect::<Vec<_>>();
            let n = model.inputs().len();
            let samples: Vec<Sample> = (0..1usize << n)
                .map(|d| Sample {
                    inputs: (0..n).map(|b| d >> b & 1 == 1).collect(),
                    targets: vec![0.0; n],
                })
                .collect();
            let obj = Objective::new(model, &samples, LossConfig::default()).unwrap();
            assert!(obj.plan().num_qubits() <= model.program().num_qubits());
            let planned = obj.marginals(&values, &mut Estimator::Exact).unwrap();
            for (s, p) in samples.iter().zip(&planned) {
                let direct = model.marginals(&values, &s.inputs).unwrap();
                for (a, b) in p.iter().zip(&direct) {
                    assert!((a - b).abs() < 1e-12, "network {k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn parity_oracle_qubit_is_absorbed() {
        let net = &network_models()[0];
        let obj_samples = [Sample {
            inputs: vec![true],
            targets: vec![1.0],
        }];
        let obj = Objective::new(net.model(), &obj_samples, LossConfig::default()).unwrap();
        assert_eq!(obj.plan().num_qubits(), net.num_qubits() - 1);
    }

    #[test]
    fn shift_matches_difference_on_networks() {
        for (k, net) in network_models().iter().enumerate().step_by(5) {
            let model = net.model();
            let values: Vec<f64> = crate::training::initial_values(model.num_params(), 100 + k as u64)
                .iter()
                .map(|v| v * 15.0)
                .collect();
            let n = model.inputs().len();
            let samples = vec![Sample {
                inputs: (0..n).map(|b| b % 2 == 0).collect(),
                targets: (0..n).map(|b| (b % 2) as f64).collect(),
            }];
            let obj = Objective::new(model, &samples, LossConfig::default()).unwrap();
            let (_, shift) = obj.parameter_shift(&values, &mut Estimator::Exact).unwrap();
            let fd = obj.central_difference(&values, 1e-5, &mut Estimator::Exact).unwrap();
            for (i, (a, b)) in shift.iter().zip(&fd).enumerate() {
                assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "network {k} param {i}: {a} vs {b}");
            }
        }
    }
}
