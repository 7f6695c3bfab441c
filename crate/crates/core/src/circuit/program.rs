//! Executable lowering of a [`Circuit`]: literal gates carry precomputed
//! matrices and symbolic slots index into a flat parameter vector.

use std::collections::HashMap;
use std::ops::Range;

use super::{Angle, Circuit, GateOp, ParamId};
use crate::error::{Error, Result};
use crate::statevector::{kernel, StateVector, Unitary2};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slot {
    Fixed(f64),
    /// `±values[index]`.
    Param { index: usize, negated: bool },
}

impl Slot {
    #[inline]
    pub fn value(&self, values: &[f64]) -> f64 {
        match *self {
            Slot::Fixed(v) => v,
            Slot::Param { index, negated } => {
                if negated {
                    -values[index]
                } else {
                    values[index]
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    Fixed { target: usize, u: Unitary2 },
    X { target: usize },
    Cx { control: usize, target: usize },
    FixedControlled { control: usize, target: usize, u: Unitary2 },
    U3 { target: usize, slots: [Slot; 3] },
    Cu3 { control: usize, target: usize, slots: [Slot; 3] },
}

impl Instr {
    /// `(first, second)` qubit; `first` is the control of two-qubit instructions.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Instr::Fixed { target, .. } | Instr::X { target } | Instr::U3 { target, .. } => (target, None),
            Instr::Cx { control, target }
            | Instr::FixedControlled { control, target, .. }
            | Instr::Cu3 { control, target, .. } => (control, Some(target)),
        }
    }

    /// Same instruction with qubit `q` moved to `map[q]`.
    pub fn remap(&self, map: &[usize]) -> Instr {
        let mut out = self.clone();
        match &mut out {
            Instr::Fixed { target, .. } | Instr::X { target } | Instr::U3 { target, .. } => {
                *target = map[*target]
            }
            Instr::Cx { control, target }
            | Instr::FixedControlled { control, target, .. }
            | Instr::Cu3 { control, target, .. } => {
                *control = map[*control];
                *target = map[*target];
            }
        }
        out
    }

    pub fn slots(&self) -> Option<&[Slot; 3]> {
        match self {
            Instr::U3 { slots, .. } | Instr::Cu3 { slots, .. } => Some(slots),
            _ => None,
        }
    }

    #[inline]
    pub fn apply(&self, amps: &mut [num_complex::Complex64], values: &[f64]) {
        match self {
            Instr::Fixed { target, u } => kernel::apply_1q(amps, u, *target),
            Instr::X { target } => kernel::apply_x(amps, *target),
            Instr::Cx { control, target } => kernel::apply_cx(amps, *control, *target),
            Instr::FixedControlled { control, target, u } => {
                kernel::apply_controlled_1q(amps, u, *control, *target)
            }
            Instr::U3 { target, slots } => {
                let u = u3_of(slots, values);
                kernel::apply_1q(amps, &u, *target)
            }
            Instr::Cu3 {
                control,
                target,
                slots,
            } => {
                let u = u3_of(slots, values);
                kernel::apply_controlled_1q(amps, &u, *control, *target)
            }
        }
    }
}

#[inline]
fn u3_of(slots: &[Slot; 3], values: &[f64]) -> Unitary2 {
    Unitary2::u3(slots[0].value(values), slots[1].value(values), slots[2].value(values))
}

/// A circuit lowered for repeated evaluation at different parameter values.
#[derive(Clone, Debug)]
pub struct Program {
    num_qubits: usize,
    instrs: Vec<Instr>,
    params: Vec<ParamId>,
}

impl Program {
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let params = circuit.parameters();
        let index: HashMap<&ParamId, usize> = params.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let lower_slot = |a: &Angle| match a {
            Angle::Literal(v) => Slot::Fixed(*v),
            Angle::Symbol { id, negated } => Slot::Param {
                index: index[id],
                negated: *negated,
            },
        };
        let lower3 = |p: &[Angle; 3]| [lower_slot(&p[0]), lower_slot(&p[1]), lower_slot(&p[2])];
        let instrs = circuit
            .ops()
            .iter()
            .map(|op| match op {
                GateOp::H { target } => Instr::Fixed {
                    target: *target,
                    u: Unitary2::hadamard(),
                },
                GateOp::X { target } => Instr::X { target: *target },
                GateOp::CX { control, target } => Instr::Cx {
                    control: *control,
                    target: *target,
                },
                GateOp::U3 { target, params } => match literal3(params) {
                    Some([t, p, l]) => Instr::Fixed {
                        target: *target,
                        u: Unitary2::u3(t, p, l),
                    },
                    None => Instr::U3 {
                        target: *target,
                        slots: lower3(params),
                    },
                },
                GateOp::CU3 {
                    control,
                    target,
                    params,
                } => match literal3(params) {
                    Some([t, p, l]) => Instr::FixedControlled {
                        control: *control,
                        target: *target,
                        u: Unitary2::u3(t, p, l),
                    },
                    None => Instr::Cu3 {
                        control: *control,
                        target: *target,
                        slots: lower3(params),
                    },
                },
            })
            .collect();
        Program {
            num_qubits: circuit.num_qubits(),
            instrs,
            params,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    /// Parameter inventory; `values[i]` binds `params()[i]`.
    pub fn params(&self) -> &[ParamId] {
        &self.params
    }

    pub fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.params.len() {
            return Err(Error::Argument(format!(
                "program has {} parameters, got {} values",
                self.params.len(),
                values.len()
            )));
        }
        Ok(())
    }

    /// Applies instructions in `range`; `values` must already be checked.
    pub fn run_range(&self, state: &mut StateVector, values: &[f64], range: Range<usize>) {
        let amps = state.amplitudes_mut();
        for instr in &self.instrs[range] {
            instr.apply(amps, values);
        }
    }

    pub fn run(&self, state: &mut StateVector, values: &[f64]) -> Result<()> {
        self.check_values(values)?;
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Argument(format!(
                "state has {} qubits, program has {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        self.run_range(state, values, 0..self.instrs.len());
        Ok(())
    }
}

fn literal3(p: &[Angle; 3]) -> Option<[f64; 3]> {
    Some([p[0].literal()?, p[1].literal()?, p[2].literal()?])
}
