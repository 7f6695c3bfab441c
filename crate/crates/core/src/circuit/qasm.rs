use std::fmt::Write as _;

use super::{Angle, Circuit, GateKind, GateOp, Measurement, ParamBindings, Register};
use crate::error::{Error, Result};

pub(super) fn export(circuit: &Circuit, bindings: Option<&ParamBindings>) -> Result<String> {
    let bound;
    let circuit = match bindings {
        Some(b) => {
            bound = circuit.bind(b)?;
            &bound
        }
        None => circuit,
    };

    // Flat qubit index -> (register name, offset).
    let mut names = Vec::with_capacity(circuit.num_qubits());
    for reg in circuit.registers() {
        for i in 0..reg.len {
            names.push(format!("{}[{}]", reg.name, i));
        }
    }

    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for reg in circuit.registers() {
        writeln!(out, "qreg {}[{}];", reg.name, reg.len).unwrap();
    }
    if let Some(m) = circuit.measurement() {
        writeln!(out, "creg {}[{}];", m.creg, m.qubits.len()).unwrap();
    }

    for op in circuit.ops() {
        out.push_str(op.kind().qasm_name());
        if !op.params().is_empty() {
            out.push('(');
            for (i, angle) in op.params().iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format_angle(angle)?);
            }
            out.push(')');
        }
        out.push(' ');
        let operands: Vec<&str> = op.qubits().into_iter().map(|q| names[q].as_str()).collect();
        out.push_str(&operands.join(","));
        out.push_str(";\n");
    }

    if let Some(m) = circuit.measurement() {
        for (bit, &q) in m.qubits.iter().enumerate() {
            writeln!(out, "measure {} -> {}[{}];", names[q], m.creg, bit).unwrap();
        }
    }
    Ok(out)
}

fn format_angle(angle: &Angle) -> Result<String> {
    match angle {
        Angle::Literal(v) if v.is_finite() => Ok(format!("{v}")),
        Angle::Literal(v) => Err(Error::Argument(format!("non-finite angle {v}"))),
        Angle::Symbol { id, .. } => Err(Error::UnboundParameter(id.label().to_string())),
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// `name[index]` with both parts resolved against `regs`.
fn operand(text: &str, regs: &[Register], line: usize) -> Result<usize> {
    let (name, index) = indexed(text, line)?;
    let reg = regs
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| parse_error(line, format!("unknown register `{name}`")))?;
    if index >= reg.len {
        return Err(parse_error(line, format!("{name}[{index}] out of range")));
    }
    Ok(reg.qubit(index))
}

fn indexed(text: &str, line: usize) -> Result<(&str, usize)> {
    let text = text.trim();
    let inner = text
        .strip_suffix(']')
        .and_then(|t| t.split_once('['))
        .ok_or_else(|| parse_error(line, format!("expected `name[index]`, got `{text}`")))?;
    let index = inner
        .1
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("bad index in `{text}`")))?;
    Ok((inner.0.trim(), index))
}

/// Reads the subset written by [`export`]: `qreg`, `creg`, the five gate
/// names with literal angles, and trailing `measure` statements.
pub(super) fn parse(text: &str) -> Result<Circuit> {
    let mut registers: Vec<Register> = Vec::new();
    let mut creg: Option<(String, usize, usize)> = None;
    let mut measured: Vec<Option<usize>> = Vec::new();
    let mut ops: Vec<GateOp> = Vec::new();
    let mut header = false;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let stmt = raw.split("//").next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix(';')
            .ok_or_else(|| parse_error(line, "missing `;`"))?
            .trim();
        if !header {
            if stmt != "OPENQASM 2.0" {
                return Err(parse_error(line, "expected `OPENQASM 2.0;` header"));
            }
            header = true;
            continue;
        }
        let (head, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let rest = rest.trim();
        match head {
            "include" => {
                if rest != "\"qelib1.inc\"" {
                    return Err(parse_error(line, format!("unsupported include {rest}")));
                }
            }
            "qreg" => {
                if !ops.is_empty() || creg.is_some() {
                    return Err(parse_error(line, "qreg after gates"));
                }
                let (name, len) = indexed(rest, line)?;
                if len == 0 || !super::is_identifier(name) || registers.iter().any(|r| r.name == name) {
                    return Err(parse_error(line, format!("invalid qreg `{rest}`")));
                }
                let start = registers.last().map_or(0, |r| r.start + r.len);
                registers.push(Register {
                    name: name.to_string(),
                    start,
                    len,
                });
            }
            "creg" => {
                if creg.is_some() {
                    return Err(parse_error(line, "only one creg is supported"));
                }
                let (name, len) = indexed(rest, line)?;
                if len == 0 || !super::is_identifier(name) {
                    return Err(parse_error(line, format!("invalid creg `{rest}`")));
                }
                creg = Some((name.to_string(), len, line));
                measured = vec![None; len];
            }
            "measure" => {
                let (q, c) = rest
                    .split_once("->")
                    .ok_or_else(|| parse_error(line, "expected `measure q -> c`"))?;
                let q = operand(q, &registers, line)?;
                let (name, bit) = indexed(c, line)?;
                match &creg {
                    Some((cname, len, _)) if cname == name && bit < *len => {
                        if measured[bit].replace(q).is_some() {
                            return Err(parse_error(line, format!("bit {bit} measured twice")));
                        }
                    }
                    _ => return Err(parse_error(line, format!("unknown classical bit `{}`", c.trim()))),
                }
            }
            _ => {
                if measured.iter().any(Option::is_some) {
                    return Err(parse_error(line, "gate after measurement"));
                }
                let (name, params) = match stmt.split_once('(') {
                    Some((name, tail)) => {
                        let (args, _) = tail
                            .split_once(')')
                            .ok_or_else(|| parse_error(line, "unclosed parameter list"))?;
                        (name.trim(), Some(args))
                    }
                    None => (head, None),
                };
                let kind = GateKind::from_qasm_name(name)
                    .ok_or_else(|| parse_error(line, format!("unsupported instruction `{name}`")))?;
                let angles = match params {
                    Some(args) => args
                        .split(',')
                        .map(|a| {
                            a.trim()
                                .parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .map(Angle::Literal)
                                .ok_or_else(|| parse_error(line, format!("bad angle `{}`", a.trim())))
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => Vec::new(),
                };
                let operands = stmt.rsplit_once(')').map_or(rest, |(_, t)| t.trim());
                let qubits = operands
                    .split(',')
                    .map(|o| operand(o, &registers, line))
                    .collect::<Result<Vec<_>>>()?;
                let op = GateOp::new(kind, &qubits, angles).map_err(|e| parse_error(line, e.to_string()))?;
                ops.push(op);
            }
        }
    }
    if !header {
        return Err(parse_error(1, "missing `OPENQASM 2.0;` header"));
    }
    let measurement = match creg {
        Some((name, _, line)) => {
            let qubits = measured
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| parse_error(line, format!("creg `{name}` is not fully measured")))?;
            Some(Measurement { creg: name, qubits })
        }
        None => None,
    };
    if registers.is_empty() {
        if !ops.is_empty() || measurement.is_some() {
            return Err(parse_error(1, "no qreg declared"));
        }
        return Ok(Circuit::empty());
    }
    Circuit::from_parts(registers, ops, measurement)
}
