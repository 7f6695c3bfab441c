//! Textbook Grover search over a binary-indexed database of `2^n` entries.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::circuit::{multi_controlled_z, Circuit, GateOp};
use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Index-register width beyond which the ancilla-free decompositions get impractically long.
pub const MAX_INDEX_QUBITS: usize = 10;

/// Solution indices `ω` of a search over `n_index_qubits` index qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSet {
    n_index_qubits: usize,
    marked: BTreeSet<usize>,
}

impl MarkedSet {
    pub fn new(n_index_qubits: usize, marked: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_index_qubits == 0 || n_index_qubits > MAX_INDEX_QUBITS {
            return Err(Error::Argument(format!(
                "index register width {n_index_qubits} outside 1..={MAX_INDEX_QUBITS}"
            )));
        }
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        let entries = 1usize << n_index_qubits;
        if marked.is_empty() {
            return Err(Error::Argument("marked set is empty".into()));
        }
        if let Some(&bad) = marked.iter().find(|&&w| w >= entries) {
            return Err(Error::Argument(format!(
                "marked index {bad} out of range for {entries} entries"
            )));
        }
        if marked.len() >= entries {
            return Err(Error::Argument(format!(
                "every one of the {entries} entries is marked"
            )));
        }
        Ok(MarkedSet {
            n_index_qubits,
            marked,
        })
    }

    pub fn n_index_qubits(&self) -> usize {
        self.n_index_qubits
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn num_entries(&self) -> usize {
        1 << self.n_index_qubits
    }
}

/// `H` on every qubit.
pub fn uniform_superposition(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        c.append(GateOp::h(q))?;
    }
    Ok(c)
}

/// `|x⟩ -> -|x⟩` for marked `x`: per solution, X-conjugate its zero bits around a multi-controlled Z.
pub fn phase_oracle(marked: &MarkedSet) -> Result<Circuit> {
    let n = marked.n_index_qubits;
    let qubits: Vec<usize> = (0..n).collect();
    let mcz = multi_controlled_z(&qubits);
    let mut c = Circuit::new(n)?;
    for &w in &marked.marked {
        let zeros: Vec<usize> = (0..n).filter(|q| (w >> q) & 1 == 0).collect();
        for &q in &zeros {
            c.append(GateOp::x(q))?;
        }
        for op in &mcz {
            c.append(op.clone())?;
        }
        for &q in &zeros {
            c.append(GateOp::x(q))?;
        }
    }
    Ok(c)
}

/// `2|s⟩⟨s| - I` over `n` qubits, exact including global phase.
pub fn diffuser(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    let qubits: Vec<usize> = (0..n).collect();
    for &q in &qubits {
        c.append(GateOp::h(q))?;
    }
    for &q in &qubits {
        c.append(GateOp::x(q))?;
    }
    for op in multi_controlled_z(&qubits) {
        c.append(op)?;
    }
    // u3(2π,0,0) = -I turns I - 2|0⟩⟨0| into 2|0⟩⟨0| - I.
    c.append(GateOp::u3(0, 2.0 * PI, 0.0, 0.0))?;
    for &q in &qubits {
        c.append(GateOp::x(q))?;
    }
    for &q in &qubits {
        c.append(GateOp::h(q))?;
    }
    Ok(c)
}

/// `floor(π/4 · sqrt(N/M))`, at least 1.
pub fn optimal_iterations(num_entries: usize, num_marked: usize) -> Result<usize> {
    if num_marked == 0 || num_marked >= num_entries {
        return Err(Error::Argument(format!(
            "need 1 <= marked < entries, got {num_marked} of {num_entries}"
        )));
    }
    let k = (FRAC_PI_4 * (num_entries as f64 / num_marked as f64).sqrt()).floor() as usize;
    Ok(k.max(1))
}

/// `sin²((2k+1)·asin(sqrt(M/N)))`.
pub fn analytic_success_probability(num_entries: usize, num_marked: usize, iterations: usize) -> f64 {
    let theta = (num_marked as f64 / num_entries as f64).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

#[derive(Clone, Debug)]
pub struct GroverOutcome {
    pub state: StateVector,
    pub success_probability: f64,
    pub iterations: usize,
}

fn success_probability(state: &StateVector, marked: &MarkedSet) -> f64 {
    let amps = state.amplitudes();
    marked.marked.iter().map(|&w| amps[w].norm_sqr()).sum()
}

/// Full circuit: superposition followed by `iterations` rounds of oracle then diffuser.
pub fn grover_circuit(marked: &MarkedSet, iterations: usize) -> Result<Circuit> {
    let n = marked.n_index_qubits;
    let oracle = phase_oracle(marked)?;
    let diff = diffuser(n)?;
    let mut c = uniform_superposition(n)?;
    for _ in 0..iterations {
        c.extend(&oracle)?;
        c.extend(&diff)?;
    }
    Ok(c)
}

/// Runs the search; `iterations` defaults to [`optimal_iterations`].
pub fn grover_search(marked: &MarkedSet, iterations: Option<usize>) -> Result<GroverOutcome> {
    let iterations = match iterations {
        Some(k) => k,
        None => optimal_iterations(marked.num_entries(), marked.marked.len())?,
    };
    let circuit = grover_circuit(marked, iterations)?;
    let state = circuit.run(StateVector::new_zero_state(marked.n_index_qubits)?)?;
    let success_probability = success_probability(&state, marked);
    Ok(GroverOutcome {
        state,
        success_probability,
        iterations,
    })
}

/// Success probability after each of `0..=max_iterations` rounds, from a single simulation.
pub fn success_trace(marked: &MarkedSet, max_iterations: usize) -> Result<Vec<f64>> {
    let n = marked.n_index_qubits;
    let oracle = phase_oracle(marked)?.compile();
    let diff = diffuser(n)?.compile();
    let mut state = uniform_superposition(n)?.run(StateVector::new_zero_state(n)?)?;
    let mut trace = vec![success_probability(&state, marked)];
    for _ in 0..max_iterations {
        oracle.run(&mut state, &[])?;
        diff.run(&mut state, &[])?;
        trace.push(success_probability(&state, marked));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn run(c: &Circuit, s: StateVector) -> StateVector {
        c.run(s).unwrap()
    }

    #[test]
    fn superposition_amplitudes() {
        let one = run(&uniform_superposition(1).unwrap(), StateVector::new_zero_state(1).unwrap());
        for a in one.amplitudes() {
            assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let two = run(&uniform_superposition(2).unwrap(), StateVector::new_zero_state(2).unwrap());
        for a in two.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
        for q in 0..2 {
            assert!((two.marginal_prob_one(q).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_examples() {
        let m = MarkedSet::new(2, [3]).unwrap();
        let o = phase_oracle(&m).unwrap();
        let three = run(&o, StateVector::basis_state(2, 3).unwrap());
        assert!((three.amplitudes()[3].re + 1.0).abs() < 1e-12);
        let zero = run(&o, StateVector::basis_state(2, 0).unwrap());
        assert!((zero.amplitudes()[0].re - 1.0).abs() < 1e-12);
        let s = run(&uniform_superposition(2).unwrap(), StateVector::new_zero_state(2).unwrap());
        let flagged = run(&o, s);
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in flagged.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn marked_set_validation() {
        assert!(MarkedSet::new(3, []).is_err());
        assert!(MarkedSet::new(2, [4]).is_err());
        assert!(MarkedSet::new(1, [0, 1]).is_err());
        assert!(MarkedSet::new(0, [0]).is_err());
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(optimal_iterations(4, 1).unwrap(), 1);
        assert_eq!(optimal_iterations(8, 1).unwrap(), 2);
        assert_eq!(optimal_iterations(2, 1).unwrap(), 1);
        assert!(optimal_iterations(4, 4).is_err());
        assert!(optimal_iterations(4, 0).is_err());
    }

    #[test]
    fn search_examples() {
        let out = grover_search(&MarkedSet::new(2, [2]).unwrap(), Some(1)).unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-9);
        let out = grover_search(&MarkedSet::new(3, [5]).unwrap(), Some(2)).unwrap();
        assert!((out.success_probability - 0.9453).abs() < 1e-4);
        let m = MarkedSet::new(3, [1, 6]).unwrap();
        let out = grover_search(&m, Some(0)).unwrap();
        assert!((out.success_probability - 2.0 / 8.0).abs() < 1e-12);
        assert_eq!(grover_search(&m, None).unwrap().iterations, 1);
    }

    #[test]
    fn diffuser_fixes_uniform_state() {
        for n in 1..=4 {
            let s = run(&uniform_superposition(n).unwrap(), StateVector::new_zero_state(n).unwrap());
            let d = run(&diffuser(n).unwrap(), s.clone());
            let overlap = s.inner(&d).unwrap();
            assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn oracle_is_self_inverse() {
        let m = MarkedSet::new(3, [0, 5, 6]).unwrap();
        let o = phase_oracle(&m).unwrap();
        let mut twice = o.clone();
        twice.extend(&o).unwrap();
        let mut s = StateVector::new_zero_state(3).unwrap();
        for q in 0..3 {
            s.apply_1q(&crate::Unitary2::u3(0.4 * q as f64 + 0.3, 0.1, 0.9), q).unwrap();
        }
        let out = run(&twice, s.clone());
        assert!(out.fidelity(&s).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn trace_matches_full_runs() {
        let m = MarkedSet::new(4, [3, 9]).unwrap();
        let trace = success_trace(&m, 4).unwrap();
        for (k, p) in trace.iter().enumerate() {
            let full = grover_search(&m, Some(k)).unwrap().success_probability;
            assert!((p - full).abs() < 1e-12);
        }
    }
}
