//! Ancilla-free multi-controlled gates expressed with `h`, `x`, `cx`, `u3` and `cu3`.

use std::f64::consts::PI;

use super::GateOp;

/// `diag(1, e^{i·angle})` on `target`, conditioned on every control being 1.
///
/// Recursive square-root construction: the phase is split in half between the
/// last control and the remaining controls, with a multi-controlled X toggling
/// the last control in between. Gate count grows as roughly `3^n`.
pub fn multi_controlled_phase(controls: &[usize], target: usize, angle: f64) -> Vec<GateOp> {
    let mut ops = Vec::new();
    push_mcp(&mut ops, controls, target, angle);
    ops
}

/// X on `target` conditioned on every control being 1.
pub fn multi_controlled_x(controls: &[usize], target: usize) -> Vec<GateOp> {
    let mut ops = Vec::new();
    push_mcx(&mut ops, controls, target);
    ops
}

/// Phase flip on the all-ones basis state of `qubits`.
pub fn multi_controlled_z(qubits: &[usize]) -> Vec<GateOp> {
    match qubits.split_last() {
        None => Vec::new(),
        Some((&target, controls)) => multi_controlled_phase(controls, target, PI),
    }
}

fn push_mcp(ops: &mut Vec<GateOp>, controls: &[usize], target: usize, angle: f64) {
    match controls {
        [] => ops.push(GateOp::u3(target, 0.0, 0.0, angle)),
        [c] => ops.push(GateOp::cu3(*c, target, 0.0, 0.0, angle)),
        [rest @ .., last] => {
            let half = angle / 2.0;
            ops.push(GateOp::cu3(*last, target, 0.0, 0.0, half));
            push_mcx(ops, rest, *last);
            ops.push(GateOp::cu3(*last, target, 0.0, 0.0, -half));
            push_mcx(ops, rest, *last);
            push_mcp(ops, rest, target, half);
        }
    }
}

fn push_mcx(ops: &mut Vec<GateOp>, controls: &[usize], target: usize) {
    match controls {
        [] => ops.push(GateOp::x(target)),
        [c] => ops.push(GateOp::cx(*c, target)),
        _ => {
            ops.push(GateOp::h(target));
            push_mcp(ops, controls, target, PI);
            ops.push(GateOp::h(target));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::statevector::StateVector;

    fn run_basis(n: usize, ops: &[GateOp], index: usize) -> StateVector {
        let mut c = Circuit::new(n).unwrap();
        for op in ops {
            c.append(op.clone()).unwrap();
        }
        c.run(StateVector::basis_state(n, index).unwrap()).unwrap()
    }

    #[test]
    fn mcz_flips_only_all_ones() {
        for n in 1..=5 {
            let qubits: Vec<usize> = (0..n).collect();
            let ops = multi_controlled_z(&qubits);
            let all = (1usize << n) - 1;
            for idx in 0..(1usize << n) {
                let out = run_basis(n, &ops, idx);
                let amp = out.amplitudes()[idx];
                let expect = if idx == all { -1.0 } else { 1.0 };
                assert!((amp.re - expect).abs() < 1e-12 && amp.im.abs() < 1e-12, "n={n} idx={idx} {amp}");
            }
        }
    }

    #[test]
    fn mcx_permutes_basis_states() {
        for n in 1..=5usize {
            let controls: Vec<usize> = (1..n).collect();
            let ops = multi_controlled_x(&controls, 0);
            let cmask = ((1usize << n) - 1) & !1;
            for idx in 0..(1usize << n) {
                let out = run_basis(n, &ops, idx);
                let expect = if idx & cmask == cmask { idx ^ 1 } else { idx };
                let amp = out.amplitudes()[expect];
                assert!((amp.re - 1.0).abs() < 1e-12 && amp.im.abs() < 1e-12, "n={n} idx={idx}");
            }
        }
    }

    #[test]
    fn mcp_general_angle() {
        let ops = multi_controlled_phase(&[0, 2], 1, 0.7);
        for idx in 0..8usize {
            let out = run_basis(3, &ops, idx);
            let amp = out.amplitudes()[idx];
            let phase = if idx == 7 { 0.7 } else { 0.0 };
            assert!((amp.arg() - phase).abs() < 1e-12 && (amp.norm() - 1.0).abs() < 1e-12);
        }
    }
}
