use super::{DiffuserTarget, FlagMode, FlagSource, Layout, SynapseMode};
use crate::circuit::{multi_controlled_x, Angle, Circuit, GateOp, ParamId};
use crate::error::{Error, Result};
use crate::grover;

const COMPONENTS: [&str; 3] = ["theta", "phi", "lambda"];

fn triple(prefix: &str) -> [ParamId; 3] {
    COMPONENTS.map(|c| ParamId::new(format!("{prefix}.{c}")))
}

fn symbols(ids: &[ParamId; 3]) -> [Angle; 3] {
    [
        Angle::symbol(ids[0].clone()),
        Angle::symbol(ids[1].clone()),
        Angle::symbol(ids[2].clone()),
    ]
}

/// X on input channel `i` iff `bits[i]`.
pub fn encode_input(layout: &Layout, bits: &[bool]) -> Result<Circuit> {
    if bits.len() != layout.input.len {
        return Err(Error::Argument(format!(
            "expected {} database bits, got {}",
            layout.input.len,
            bits.len()
        )));
    }
    let mut c = layout.empty_circuit();
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        c.append(GateOp::x(layout.input.qubit(i)))?;
    }
    Ok(c)
}

/// Trainable U3 on neuron `index` of hidden layer `layer` (deepest = 0).
pub fn neuron_init(layout: &Layout, layer: usize, index: usize) -> Result<(Circuit, [ParamId; 3])> {
    let reg = layout
        .hidden
        .get(layer)
        .ok_or_else(|| Error::Argument(format!("no hidden layer {layer}")))?;
    if index >= reg.len {
        return Err(Error::Argument(format!(
            "layer {layer} has {} neurons, asked for {index}",
            reg.len
        )));
    }
    let q = reg.qubit(index);
    let ids = triple(&layout.qubit_label(q));
    let [t, p, l] = symbols(&ids);
    let mut c = layout.empty_circuit();
    c.append(GateOp::U3 {
        target: q,
        params: [t, p, l],
    })?;
    Ok((c, ids))
}

/// Parameter identifiers of the synapse `control -> target`.
pub fn synapse_ids(layout: &Layout, control: usize, target: usize) -> [ParamId; 3] {
    triple(&format!(
        "{}>{}",
        layout.qubit_label(control),
        layout.qubit_label(target)
    ))
}

pub fn entangle_synapse(
    layout: &Layout,
    control: usize,
    target: usize,
    ids: &[ParamId; 3],
    mode: SynapseMode,
) -> Result<Circuit> {
    if control == target {
        return Err(Error::Argument(format!(
            "synapse control and target are both qubit {control}"
        )));
    }
    let params = symbols(ids);
    let mut c = layout.empty_circuit();
    match mode {
        SynapseMode::PaperLiteral => {
            c.append(GateOp::U3 {
                target: control,
                params,
            })?;
            c.append(GateOp::cx(control, target))?;
        }
        SynapseMode::NullConsistent => {
            c.append(GateOp::CU3 {
                control,
                target,
                params,
            })?;
        }
    }
    Ok(c)
}

/// Dense synapses from every `controls` qubit to every `targets` qubit, control-major.
fn dense(layout: &Layout, controls: &[usize], targets: &[usize], mode: SynapseMode) -> Result<Circuit> {
    let mut c = layout.empty_circuit();
    for &ctl in controls {
        for &tgt in targets {
            let ids = synapse_ids(layout, ctl, tgt);
            c.extend(&entangle_synapse(layout, ctl, tgt, &ids, mode)?)?;
        }
    }
    Ok(c)
}

/// Synapses from hidden layer `deeper` (controls) into layer `deeper + 1` (targets).
pub fn neural_entangler(layout: &Layout, deeper: usize, mode: SynapseMode) -> Result<Circuit> {
    if deeper + 1 >= layout.hidden.len() {
        return Err(Error::Argument(format!(
            "hidden layer {deeper} has no shallower neighbour"
        )));
    }
    dense(
        layout,
        &layout.hidden[deeper].qubits(),
        &layout.hidden[deeper + 1].qubits(),
        mode,
    )
}

/// Last hidden layer (controls) into the output register.
pub fn oracle_generator(layout: &Layout, mode: SynapseMode) -> Result<Circuit> {
    let last = layout.hidden.last().expect("at least one hidden layer");
    dense(layout, &last.qubits(), &layout.output.qubits(), mode)
}

/// Output register (controls) into the input register.
pub fn oracularizer(layout: &Layout, mode: SynapseMode) -> Result<Circuit> {
    dense(layout, &layout.output.qubits(), &layout.input.qubits(), mode)
}

/// Writes the checker state onto the oracle qubit, which is expected in |->.
pub fn oracle_flagging(layout: &Layout, mode: FlagMode, source: FlagSource) -> Result<Circuit> {
    let sources = match source {
        FlagSource::Input => layout.input.qubits(),
        FlagSource::Output => layout.output.qubits(),
    };
    let mut c = layout.empty_circuit();
    match mode {
        FlagMode::Parity => {
            for q in sources {
                c.append(GateOp::cx(q, layout.oracle))?;
            }
        }
        FlagMode::Conjunction => {
            for op in multi_controlled_x(&sources, layout.oracle) {
                c.append(op)?;
            }
        }
    }
    Ok(c)
}

/// `2|s⟩⟨s| - I` over the chosen register.
pub fn register_diffuser(layout: &Layout, target: DiffuserTarget) -> Result<Circuit> {
    let reg = match target {
        DiffuserTarget::Output => &layout.output,
        DiffuserTarget::Input => &layout.input,
    };
    let mut c = layout.empty_circuit();
    c.extend_mapped(&grover::diffuser(reg.len)?, &reg.qubits())?;
    Ok(c)
}
