//! Parameterised circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`GateOp`]s over named registers.
//! Parameter slots hold either a literal angle or a symbolic [`ParamId`]
//! (optionally negated, which is how inverses stay symbolic).

mod decompose;
mod program;
mod qasm;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::statevector::{StateVector, Unitary2};

pub use decompose::{multi_controlled_phase, multi_controlled_x, multi_controlled_z};
pub use program::{Instr, Program, Slot};

/// Identifier of a trainable angle. The label is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(Arc<str>);

impl ParamId {
    pub fn new(label: impl AsRef<str>) -> Self {
        ParamId(Arc::from(label.as_ref()))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamId({})", self.0)
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One parameter slot of a gate.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    Literal(f64),
    Symbol { id: ParamId, negated: bool },
}

impl Angle {
    pub fn symbol(id: ParamId) -> Self {
        Angle::Symbol { id, negated: false }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Angle::Symbol { .. })
    }

    pub fn negate(&self) -> Self {
        match self {
            Angle::Literal(v) => Angle::Literal(-v),
            Angle::Symbol { id, negated } => Angle::Symbol {
                id: id.clone(),
                negated: !negated,
            },
        }
    }

    pub fn literal(&self) -> Option<f64> {
        match self {
            Angle::Literal(v) => Some(*v),
            Angle::Symbol { .. } => None,
        }
    }

    fn bind(&self, bindings: &ParamBindings) -> Result<Angle> {
        match self {
            Angle::Literal(v) => Ok(Angle::Literal(*v)),
            Angle::Symbol { id, negated } => {
                let v = bindings
                    .get(id)
                    .ok_or_else(|| Error::UnboundParameter(id.label().to_string()))?;
                Ok(Angle::Literal(if *negated { -v } else { v }))
            }
        }
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Literal(v)
    }
}

impl From<ParamId> for Angle {
    fn from(id: ParamId) -> Self {
        Angle::symbol(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    U3,
    CX,
    CU3,
}

impl GateKind {
    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::U3 => 1,
            GateKind::CX | GateKind::CU3 => 2,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::U3 | GateKind::CU3 => 3,
            _ => 0,
        }
    }

    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::U3 => "u3",
            GateKind::CX => "cx",
            GateKind::CU3 => "cu3",
        }
    }

    pub fn from_qasm_name(name: &str) -> Option<Self> {
        Some(match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "u3" => GateKind::U3,
            "cx" => GateKind::CX,
            "cu3" => GateKind::CU3,
            _ => return None,
        })
    }
}

/// A single gate. Two-qubit gates list the control first.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    H { target: usize },
    X { target: usize },
    U3 { target: usize, params: [Angle; 3] },
    CX { control: usize, target: usize },
    CU3 { control: usize, target: usize, params: [Angle; 3] },
}

impl GateOp {
    /// Generic constructor with arity checking.
    pub fn new(kind: GateKind, qubits: &[usize], params: Vec<Angle>) -> Result<Self> {
        if qubits.len() != kind.num_qubits() {
            return Err(Error::Construction(format!(
                "{} takes {} qubit operand(s), got {}",
                kind.qasm_name(),
                kind.num_qubits(),
                qubits.len()
            )));
        }
        if params.len() != kind.num_params() {
            return Err(Error::Construction(format!(
                "{} takes {} parameter(s), got {}",
                kind.qasm_name(),
                kind.num_params(),
                params.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::Construction(format!(
                "{} control and target are both qubit {}",
                kind.qasm_name(),
                qubits[0]
            )));
        }
        let three = |p: Vec<Angle>| -> [Angle; 3] {
            let mut it = p.into_iter();
            [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
        };
        Ok(match kind {
            GateKind::H => GateOp::H { target: qubits[0] },
            GateKind::X => GateOp::X { target: qubits[0] },
            GateKind::U3 => GateOp::U3 {
                target: qubits[0],
                params: three(params),
            },
            GateKind::CX => GateOp::CX {
                control: qubits[0],
                target: qubits[1],
            },
            GateKind::CU3 => GateOp::CU3 {
                control: qubits[0],
                target: qubits[1],
                params: three(params),
            },
        })
    }

    pub fn h(target: usize) -> Self {
        GateOp::H { target }
    }

    pub fn x(target: usize) -> Self {
        GateOp::X { target }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp::CX { control, target }
    }

    pub fn u3(target: usize, theta: impl Into<Angle>, phi: impl Into<Angle>, lambda: impl Into<Angle>) -> Self {
        GateOp::U3 {
            target,
            params: [theta.into(), phi.into(), lambda.into()],
        }
    }

    pub fn cu3(
        control: usize,
        target: usize,
        theta: impl Into<Angle>,
        phi: impl Into<Angle>,
        lambda: impl Into<Angle>,
    ) -> Self {
        GateOp::CU3 {
            control,
            target,
            params: [theta.into(), phi.into(), lambda.into()],
        }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            GateOp::H { .. } => GateKind::H,
            GateOp::X { .. } => GateKind::X,
            GateOp::U3 { .. } => GateKind::U3,
            GateOp::CX { .. } => GateKind::CX,
            GateOp::CU3 { .. } => GateKind::CU3,
        }
    }

    /// Operands, control first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::H { target } | GateOp::X { target } | GateOp::U3 { target, .. } => vec![*target],
            GateOp::CX { control, target } | GateOp::CU3 { control, target, .. } => {
                vec![*control, *target]
            }
        }
    }

    pub fn params(&self) -> &[Angle] {
        match self {
            GateOp::U3 { params, .. } | GateOp::CU3 { params, .. } => params,
            _ => &[],
        }
    }

    /// The adjoint gate. `u3(θ,φ,λ)† = u3(-θ,-λ,-φ)`.
    pub fn adjoint(&self) -> GateOp {
        let flip = |p: &[Angle; 3]| [p[0].negate(), p[2].negate(), p[1].negate()];
        match self {
            GateOp::U3 { target, params } => GateOp::U3 {
                target: *target,
                params: flip(params),
            },
            GateOp::CU3 {
                control,
                target,
                params,
            } => GateOp::CU3 {
                control: *control,
                target: *target,
                params: flip(params),
            },
            other => other.clone(),
        }
    }

    /// Relabels operands through `map` (`new = map[old]`).
    pub fn remap(&self, map: &[usize]) -> Result<GateOp> {
        let m = |q: usize| {
            map.get(q)
                .copied()
                .ok_or_else(|| Error::Index(format!("qubit {q} missing from remap table")))
        };
        Ok(match self {
            GateOp::H { target } => GateOp::H { target: m(*target)? },
            GateOp::X { target } => GateOp::X { target: m(*target)? },
            GateOp::U3 { target, params } => GateOp::U3 {
                target: m(*target)?,
                params: params.clone(),
            },
            GateOp::CX { control, target } => GateOp::CX {
                control: m(*control)?,
                target: m(*target)?,
            },
            GateOp::CU3 {
                control,
                target,
                params,
            } => GateOp::CU3 {
                control: m(*control)?,
                target: m(*target)?,
                params: params.clone(),
            },
        })
    }

    fn bind(&self, bindings: &ParamBindings) -> Result<GateOp> {
        let bind3 = |p: &[Angle; 3]| -> Result<[Angle; 3]> {
            Ok([p[0].bind(bindings)?, p[1].bind(bindings)?, p[2].bind(bindings)?])
        };
        Ok(match self {
            GateOp::U3 { target, params } => GateOp::U3 {
                target: *target,
                params: bind3(params)?,
            },
            GateOp::CU3 {
                control,
                target,
                params,
            } => GateOp::CU3 {
                control: *control,
                target: *target,
                params: bind3(params)?,
            },
            other => other.clone(),
        })
    }

    fn literal_params(&self) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (slot, angle) in out.iter_mut().zip(self.params()) {
            *slot = match angle {
                Angle::Literal(v) => *v,
                Angle::Symbol { id, .. } => {
                    return Err(Error::UnboundParameter(id.label().to_string()))
                }
            };
        }
        Ok(out)
    }
}

/// Map from parameter to its current value in radians.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamBindings(BTreeMap<ParamId, f64>);

impl ParamBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: ParamId, value: f64) -> Option<f64> {
        self.0.insert(id, value)
    }

    pub fn get(&self, id: &ParamId) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn get_label(&self, label: &str) -> Option<f64> {
        self.0.get(&ParamId::new(label)).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamId, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    /// Builds bindings from an ordered inventory and matching values.
    pub fn from_values(ids: &[ParamId], values: &[f64]) -> Result<Self> {
        if ids.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} parameters but {} values",
                ids.len(),
                values.len()
            )));
        }
        Ok(ids.iter().cloned().zip(values.iter().copied()).collect())
    }

    /// Values for `ids` in order.
    pub fn values_for(&self, ids: &[ParamId]) -> Result<Vec<f64>> {
        ids.iter()
            .map(|id| {
                self.get(id)
                    .ok_or_else(|| Error::UnboundParameter(id.label().to_string()))
            })
            .collect()
    }
}

impl FromIterator<(ParamId, f64)> for ParamBindings {
    fn from_iter<I: IntoIterator<Item = (ParamId, f64)>>(iter: I) -> Self {
        ParamBindings(iter.into_iter().collect())
    }
}

/// Contiguous named qubit range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubit(&self, i: usize) -> usize {
        debug_assert!(i < self.len);
        self.start + i
    }

    pub fn qubits(&self) -> Vec<usize> {
        (self.start..self.start + self.len).collect()
    }
}

/// Terminal measurement of `qubits[i]` into bit `i` of the classical register `creg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub creg: String,
    pub qubits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    registers: Vec<Register>,
    ops: Vec<GateOp>,
    measurement: Option<Measurement>,
}

impl Circuit {
    /// Circuit with a single register `q` covering every qubit.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_registers(&[("q", num_qubits)])
    }

    /// Circuit whose qubits are laid out register by register in the given order.
    pub fn with_registers(layout: &[(&str, usize)]) -> Result<Self> {
        let mut registers = Vec::with_capacity(layout.len());
        let mut seen = HashSet::new();
        let mut start = 0;
        for &(name, len) in layout {
            if len == 0 {
                return Err(Error::Construction(format!("register `{name}` is empty")));
            }
            if !is_identifier(name) {
                return Err(Error::Construction(format!(
                    "register name `{name}` is not an identifier"
                )));
            }
            if !seen.insert(name) {
                return Err(Error::Construction(format!("duplicate register `{name}`")));
            }
            registers.push(Register {
                name: name.to_string(),
                start,
                len,
            });
            start += len;
        }
        if start == 0 {
            return Err(Error::Construction("circuit has no qubits".into()));
        }
        Ok(Circuit {
            num_qubits: start,
            registers,
            ops: Vec::new(),
            measurement: None,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn measurement(&self) -> Option<&Measurement> {
        self.measurement.as_ref()
    }

    fn validate(&self, op: &GateOp) -> Result<()> {
        let qs = op.qubits();
        for &q in &qs {
            if q >= self.num_qubits {
                return Err(Error::Construction(format!(
                    "qubit {q} out of range for {}-qubit circuit",
                    self.num_qubits
                )));
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Construction(format!(
                "{} control and target are both qubit {}",
                op.kind().qasm_name(),
                qs[0]
            )));
        }
        Ok(())
    }

    pub fn append(&mut self, op: GateOp) -> Result<&mut Self> {
        self.validate(&op)?;
        self.ops.push(op);
        Ok(self)
    }

    /// Appends every op of `fragment`, which must have the same width.
    pub fn extend(&mut self, fragment: &Circuit) -> Result<&mut Self> {
        if fragment.num_qubits != self.num_qubits {
            return Err(Error::Construction(format!(
                "fragment has {} qubits, circuit has {}",
                fragment.num_qubits, self.num_qubits
            )));
        }
        self.ops.extend(fragment.ops.iter().cloned());
        Ok(self)
    }

    /// Appends `fragment` with its qubit `i` placed on `map[i]`.
    pub fn extend_mapped(&mut self, fragment: &Circuit, map: &[usize]) -> Result<&mut Self> {
        if map.len() != fragment.num_qubits {
            return Err(Error::Construction(format!(
                "remap table has {} entries for a {}-qubit fragment",
                map.len(),
                fragment.num_qubits
            )));
        }
        let mut mapped = Vec::with_capacity(fragment.ops.len());
        for op in &fragment.ops {
            let op = op.remap(map)?;
            self.validate(&op)?;
            mapped.push(op);
        }
        self.ops.extend(mapped);
        Ok(self)
    }

    /// Declares terminal measurement of `qubits` into classical register `creg`.
    pub fn measure(&mut self, creg: &str, qubits: &[usize]) -> Result<&mut Self> {
        if !is_identifier(creg) || self.register(creg).is_some() {
            return Err(Error::Construction(format!(
                "invalid classical register name `{creg}`"
            )));
        }
        if qubits.is_empty() {
            return Err(Error::Construction("nothing to measure".into()));
        }
        let mut seen = HashSet::new();
        for &q in qubits {
            if q >= self.num_qubits || !seen.insert(q) {
                return Err(Error::Construction(format!("bad measured qubit {q}")));
            }
        }
        self.measurement = Some(Measurement {
            creg: creg.to_string(),
            qubits: qubits.to_vec(),
        });
        Ok(self)
    }

    /// Reversed adjoint sequence; measurements are not carried over.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            ops: self.ops.iter().rev().map(GateOp::adjoint).collect(),
            measurement: None,
        }
    }

    /// Distinct symbolic parameters in order of first appearance.
    pub fn parameters(&self) -> Vec<ParamId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for op in &self.ops {
            for angle in op.params() {
                if let Angle::Symbol { id, .. } = angle {
                    if seen.insert(id.clone()) {
                        out.push(id.clone());
                    }
                }
            }
        }
        out
    }

    pub fn is_literal(&self) -> bool {
        self.ops
            .iter()
            .all(|op| op.params().iter().all(|a| !a.is_symbolic()))
    }

    /// Replaces every symbolic slot with its bound value.
    pub fn bind(&self, bindings: &ParamBindings) -> Result<Circuit> {
        let ops = self
            .ops
            .iter()
            .map(|op| op.bind(bindings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            num_qubits: self.num_qubits,
            registers: self.registers.clone(),
            ops,
            measurement: self.measurement.clone(),
        })
    }

    /// Executes the (literal) circuit on `initial`.
    pub fn run(&self, mut initial: StateVector) -> Result<StateVector> {
        self.run_in_place(&mut initial)?;
        Ok(initial)
    }

    pub fn run_in_place(&self, state: &mut StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Argument(format!(
                "state has {} qubits, circuit has {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        if let Some(id) = self.parameters().first() {
            return Err(Error::UnboundParameter(id.label().to_string()));
        }
        for op in &self.ops {
            apply_literal(state, op)?;
        }
        Ok(())
    }

    /// OpenQASM 2.0 text of the circuit, binding symbolic slots from `bindings`.
    pub fn export_qasm(&self, bindings: Option<&ParamBindings>) -> Result<String> {
        qasm::export(self, bindings)
    }

    /// Parses OpenQASM 2.0 text in the subset written by [`Circuit::export_qasm`].
    pub fn from_qasm(text: &str) -> Result<Circuit> {
        qasm::parse(text)
    }

    /// Zero-qubit circuit; only reachable by parsing a program that declares no registers.
    pub(crate) fn empty() -> Self {
        Circuit {
            num_qubits: 0,
            registers: Vec::new(),
            ops: Vec::new(),
            measurement: None,
        }
    }

    /// Lowers the circuit into an executable program over its parameter inventory.
    pub fn compile(&self) -> Program {
        Program::from_circuit(self)
    }

    pub(crate) fn from_parts(
        registers: Vec<Register>,
        ops: Vec<GateOp>,
        measurement: Option<Measurement>,
    ) -> Result<Self> {
        let layout: Vec<(&str, usize)> = registers.iter().map(|r| (r.name.as_str(), r.len)).collect();
        let mut c = Circuit::with_registers(&layout)?;
        for op in ops {
            c.append(op)?;
        }
        if let Some(m) = measurement {
            c.measure(&m.creg, &m.qubits)?;
        }
        Ok(c)
    }
}

fn apply_literal(state: &mut StateVector, op: &GateOp) -> Result<()> {
    match op {
        GateOp::H { target } => state.apply_1q(&Unitary2::hadamard(), *target),
        GateOp::X { target } => state.apply_1q(&Unitary2::pauli_x(), *target),
        GateOp::CX { control, target } => {
            state.apply_controlled_1q(&Unitary2::pauli_x(), *control, *target)
        }
        GateOp::U3 { target, .. } => {
            let [t, p, l] = op.literal_params()?;
            state.apply_1q(&Unitary2::u3(t, p, l), *target)
        }
        GateOp::CU3 { control, target, .. } => {
            let [t, p, l] = op.literal_params()?;
            state.apply_controlled_1q(&Unitary2::u3(t, p, l), *control, *target)
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::StateVector;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2).unwrap();
        c.append(GateOp::h(0)).unwrap();
        c.append(GateOp::cx(0, 1)).unwrap();
        c
    }

    #[test]
    fn append_validation() {
        let mut c = Circuit::new(1).unwrap();
        c.append(GateOp::h(0)).unwrap();
        assert_eq!(c.len(), 1);
        let mut c2 = Circuit::new(2).unwrap();
        assert!(matches!(
            c2.append(GateOp::cx(0, 0)),
            Err(Error::Construction(_))
        ));
        assert!(matches!(c2.append(GateOp::h(2)), Err(Error::Construction(_))));
        assert!(matches!(
            GateOp::new(GateKind::U3, &[0], vec![0.0.into(), 0.0.into()]),
            Err(Error::Construction(_))
        ));
        assert!(matches!(
            GateOp::new(GateKind::CX, &[0], vec![]),
            Err(Error::Construction(_))
        ));
        assert!(GateOp::new(GateKind::CU3, &[1, 0], vec![0.1.into(), 0.2.into(), 0.3.into()]).is_ok());
    }

    #[test]
    fn register_layout() {
        assert!(Circuit::with_registers(&[("a", 2), ("a", 1)]).is_err());
        assert!(Circuit::with_registers(&[("a", 0)]).is_err());
        assert!(Circuit::with_registers(&[("Bad", 1)]).is_err());
        let c = Circuit::with_registers(&[("input", 2), ("output", 2), ("oracle", 1)]).unwrap();
        assert_eq!(c.num_qubits(), 5);
        assert_eq!(c.register("output").unwrap().qubits(), vec![2, 3]);
    }

    #[test]
    fn inverse_swaps_phi_and_lambda() {
        let mut c = Circuit::new(1).unwrap();
        c.append(GateOp::u3(0, 0.3, 0.5, 0.7)).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.ops()[0], GateOp::u3(0, -0.3, -0.7, -0.5));

        // u3(θ,φ,λ)·u3(-θ,-λ,-φ) = I by direct 2x2 arithmetic.
        let prod = Unitary2::u3(0.3, 0.5, 0.7).mul(&Unitary2::u3(-0.3, -0.7, -0.5));
        let id = Unitary2::identity();
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod.0[i][j] - id.0[i][j]).norm() < 1e-15);
            }
        }
        assert_eq!(inv.inverse(), c);
    }

    #[test]
    fn symbolic_inverse_and_bind() {
        let (a, b, cc) = (ParamId::new("a"), ParamId::new("b"), ParamId::new("c"));
        let mut c = Circuit::new(2).unwrap();
        c.append(GateOp::cu3(0, 1, a.clone(), b.clone(), cc.clone())).unwrap();
        c.append(GateOp::x(0)).unwrap();
        assert_eq!(c.parameters(), vec![a.clone(), b.clone(), cc.clone()]);
        let bindings: ParamBindings = [(a.clone(), 0.1), (b.clone(), 0.2), (cc.clone(), 0.3)]
            .into_iter()
            .collect();
        let bound_inv = c.inverse().bind(&bindings).unwrap();
        let inv_bound = c.bind(&bindings).unwrap().inverse();
        assert_eq!(bound_inv, inv_bound);

        let missing: ParamBindings = [(a, 0.0), (b, 0.0)].into_iter().collect();
        assert_eq!(
            c.bind(&missing),
            Err(Error::UnboundParameter("c".into()))
        );
    }

    #[test]
    fn zero_binding_is_identity_gate() {
        let mut c = Circuit::new(1).unwrap();
        c.append(GateOp::u3(0, ParamId::new("a"), ParamId::new("b"), ParamId::new("c")))
            .unwrap();
        let b: ParamBindings = ["a", "b", "c"].iter().map(|l| (ParamId::new(l), 0.0)).collect();
        let bound = c.bind(&b).unwrap();
        assert!(bound.is_literal());
        let mut s = StateVector::new_zero_state(1).unwrap();
        s.apply_1q(&Unitary2::u3(1.0, 2.0, 3.0), 0).unwrap();
        assert_eq!(bound.run(s.clone()).unwrap(), s);
        assert_eq!(bound.bind(&ParamBindings::new()).unwrap(), bound);
    }

    #[test]
    fn run_examples() {
        let zero = StateVector::new_zero_state(2).unwrap();
        let empty = Circuit::new(2).unwrap();
        assert_eq!(empty.run(zero.clone()).unwrap(), zero);

        let out = bell().run(zero.clone()).unwrap();
        let a = out.amplitudes();
        assert!((a[0].re - a[3].re).abs() < 1e-15 && a[1].norm() < 1e-15);

        let mut xx = Circuit::new(1).unwrap();
        xx.append(GateOp::x(0)).unwrap().append(GateOp::x(0)).unwrap();
        let z1 = StateVector::new_zero_state(1).unwrap();
        assert_eq!(xx.run(z1.clone()).unwrap(), z1);

        let mut sym = Circuit::new(1).unwrap();
        sym.append(GateOp::u3(0, ParamId::new("t"), 0.0, 0.0)).unwrap();
        assert!(matches!(sym.run(z1), Err(Error::UnboundParameter(_))));
        assert!(bell().run(StateVector::new_zero_state(3).unwrap()).is_err());
    }

    #[test]
    fn extend_mapped_relabels() {
        let mut host = Circuit::new(3).unwrap();
        host.extend_mapped(&bell(), &[2, 0]).unwrap();
        assert_eq!(host.ops(), &[GateOp::h(2), GateOp::cx(2, 0)]);
        assert!(host.extend_mapped(&bell(), &[1, 1]).is_err());
        assert!(host.extend(&bell()).is_err());
    }
}
