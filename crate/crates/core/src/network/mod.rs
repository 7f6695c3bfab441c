//! Builder for the inductive Grover oracular network.
//!
//! Qubit layout, in order: `input` (N channels), `output` (N channels), one
//! register per hidden layer from `hidden1` (adjacent to the output) to
//! `hidden{L}` (deepest), and a single `oracle` qubit.

mod fragments;

use std::collections::BTreeMap;

use crate::circuit::{Circuit, GateOp, ParamBindings, ParamId, Register};
use crate::error::{Error, Result};
use crate::model::{ExecutionMode, VariationalModel};
use crate::statevector::DEFAULT_MAX_QUBITS;

pub use fragments::{
    encode_input, entangle_synapse, neural_entangler, neuron_init, oracle_flagging,
    oracle_generator, oracularizer, register_diffuser,
};

/// Topology: `N` database channels and hidden layer widths listed deepest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkShape {
    n_database: usize,
    hidden_widths: Vec<usize>,
}

impl NetworkShape {
    pub fn new(n_database: usize, hidden_widths: Vec<usize>) -> Result<Self> {
        if n_database == 0 {
            return Err(Error::Argument("database needs at least one channel".into()));
        }
        if hidden_widths.is_empty() {
            return Err(Error::Argument("network needs at least one hidden layer".into()));
        }
        if hidden_widths.contains(&0) {
            return Err(Error::Argument("hidden layer widths must be >= 1".into()));
        }
        Ok(NetworkShape {
            n_database,
            hidden_widths,
        })
    }

    pub fn n_database(&self) -> usize {
        self.n_database
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.hidden_widths
    }

    pub fn depth(&self) -> usize {
        self.hidden_widths.len()
    }

    pub fn qubit_budget(&self) -> usize {
        qubit_budget(self)
    }
}

/// `2N + Σ widths + 1`.
pub fn qubit_budget(shape: &NetworkShape) -> usize {
    2 * shape.n_database + shape.hidden_widths.iter().sum::<usize>() + 1
}

/// Realisation of an entangle synapse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SynapseMode {
    /// Trainable U3 on the control followed by a bare CX.
    PaperLiteral,
    /// Controlled-U3; zero parameters give the identity.
    #[default]
    NullConsistent,
}

/// How the checker state is written onto the oracle qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlagMode {
    /// CX from every source qubit: kickback on odd-weight patterns.
    #[default]
    Parity,
    /// Multi-controlled X: kickback only on the all-ones pattern.
    Conjunction,
}

/// Register the amplitude-amplification diffuser acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffuserTarget {
    #[default]
    Output,
    Input,
}

/// Register whose state is flagged onto the oracle qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlagSource {
    #[default]
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkOptions {
    pub synapse_mode: SynapseMode,
    pub flag_mode: FlagMode,
    /// Hadamard the output register before the search loop.
    pub superpose_output: bool,
    pub diffuser_target: DiffuserTarget,
    pub flag_source: FlagSource,
    /// Fixed activation fragments keyed by hidden layer index (deepest = 0).
    /// Each fragment spans that layer's width and is applied after the weights.
    pub activations: BTreeMap<usize, Circuit>,
    pub max_qubits: usize,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions {
            synapse_mode: SynapseMode::default(),
            flag_mode: FlagMode::default(),
            superpose_output: true,
            diffuser_target: DiffuserTarget::default(),
            flag_source: FlagSource::default(),
            activations: BTreeMap::new(),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl NetworkOptions {
    pub fn with_modes(synapse_mode: SynapseMode, flag_mode: FlagMode) -> Self {
        NetworkOptions {
            synapse_mode,
            flag_mode,
            ..Default::default()
        }
    }
}

/// Register placement of a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub input: Register,
    pub output: Register,
    /// Indexed like `hidden_widths`: deepest first.
    pub hidden: Vec<Register>,
    pub oracle: usize,
    pub num_qubits: usize,
    names: Vec<(String, usize)>,
}

impl Layout {
    pub fn new(shape: &NetworkShape) -> Self {
        let n = shape.n_database;
        let depth = shape.depth();
        let mut names = vec![("input".to_string(), n), ("output".to_string(), n)];
        // hidden1 sits next to the output; it is the last entry of `hidden_widths`.
        for k in 1..=depth {
            names.push((format!("hidden{k}"), shape.hidden_widths[depth - k]));
        }
        names.push(("oracle".to_string(), 1));

        let mut start = 0;
        let mut regs = Vec::new();
        for (name, len) in &names {
            regs.push(Register {
                name: name.clone(),
                start,
                len: *len,
            });
            start += len;
        }
        let input = regs[0].clone();
        let output = regs[1].clone();
        let mut hidden: Vec<Register> = regs[2..2 + depth].to_vec();
        hidden.reverse();
        Layout {
            input,
            output,
            hidden,
            oracle: start - 1,
            num_qubits: start,
            names,
        }
    }

    /// Empty circuit carrying this layout's registers.
    pub fn empty_circuit(&self) -> Circuit {
        let layout: Vec<(&str, usize)> = self.names.iter().map(|(n, l)| (n.as_str(), *l)).collect();
        Circuit::with_registers(&layout).expect("layout registers are valid")
    }

    /// `register[offset]` label of a flat qubit index.
    pub fn qubit_label(&self, q: usize) -> String {
        let regs = std::iter::once(&self.input)
            .chain(std::iter::once(&self.output))
            .chain(self.hidden.iter());
        for r in regs {
            if q >= r.start && q < r.start + r.len {
                return format!("{}[{}]", r.name, q - r.start);
            }
        }
        if q == self.oracle {
            return "oracle[0]".to_string();
        }
        format!("q{q}")
    }

    pub fn hidden_qubits(&self) -> Vec<usize> {
        self.hidden.iter().flat_map(|r| r.qubits()).collect()
    }
}

/// Number of amplitude-amplification rounds: `ceil(sqrt(N))`, at least 1.
pub fn grover_repetitions(n_database: usize) -> usize {
    let mut r = 1;
    while r * r < n_database {
        r += 1;
    }
    r
}

/// A built network: frozen circuit plus its partitioned parameter inventory.
#[derive(Clone, Debug)]
pub struct IGOQNN {
    shape: NetworkShape,
    options: NetworkOptions,
    layout: Layout,
    circuit: Circuit,
    neuron_params: Vec<ParamId>,
    synapse_params: Vec<ParamId>,
    repetitions: usize,
    model: VariationalModel,
}

impl IGOQNN {
    pub fn build(shape: &NetworkShape, synapse_mode: SynapseMode, flag_mode: FlagMode) -> Result<Self> {
        Self::build_with(shape, NetworkOptions::with_modes(synapse_mode, flag_mode))
    }

    pub fn build_with(shape: &NetworkShape, options: NetworkOptions) -> Result<Self> {
        let budget = shape.qubit_budget();
        if budget > options.max_qubits {
            return Err(Error::Capacity(format!(
                "network needs {budget} qubits, cap is {}",
                options.max_qubits
            )));
        }
        for (&layer, frag) in &options.activations {
            let width = *shape.hidden_widths.get(layer).ok_or_else(|| {
                Error::Argument(format!("activation for missing hidden layer {layer}"))
            })?;
            if frag.num_qubits() != width || !frag.is_literal() {
                return Err(Error::Argument(format!(
                    "activation for layer {layer} must be a literal {width}-qubit fragment"
                )));
            }
        }

        let layout = Layout::new(shape);
        let mode = options.synapse_mode;
        let mut circuit = layout.empty_circuit();

        // Superposition of hidden neurons, output register and the oracle qubit in |->.
        for q in layout.hidden_qubits() {
            circuit.append(GateOp::h(q))?;
        }
        if options.superpose_output {
            for q in layout.output.qubits() {
                circuit.append(GateOp::h(q))?;
            }
        }
        circuit.append(GateOp::x(layout.oracle))?;
        circuit.append(GateOp::h(layout.oracle))?;

        // Weight initialisation and activations.
        let mut weights = layout.empty_circuit();
        let mut neuron_params = Vec::new();
        for (layer, reg) in layout.hidden.iter().enumerate() {
            for index in 0..reg.len {
                let (frag, ids) = neuron_init(&layout, layer, index)?;
                weights.extend(&frag)?;
                neuron_params.extend(ids);
            }
        }
        for (layer, frag) in &options.activations {
            weights.extend_mapped(frag, &layout.hidden[*layer].qubits())?;
        }
        circuit.extend(&weights)?;

        // Neural entanglement, deepest pair first.
        let mut entangler = layout.empty_circuit();
        for layer in 0..shape.depth().saturating_sub(1) {
            entangler.extend(&neural_entangler(&layout, layer, mode)?)?;
        }
        circuit.extend(&entangler)?;

        let generator = oracle_generator(&layout, mode)?;
        let oracularize = oracularizer(&layout, mode)?;
        let flag = oracle_flagging(&layout, options.flag_mode, options.flag_source)?;
        let diffuse = register_diffuser(&layout, options.diffuser_target)?;
        let repetitions = grover_repetitions(shape.n_database);
        for _ in 0..repetitions {
            circuit.extend(&generator)?;
            circuit.extend(&oracularize)?;
            circuit.extend(&flag)?;
            circuit.extend(&oracularize.inverse())?;
            circuit.extend(&generator.inverse())?;
            circuit.extend(&diffuse)?;
        }

        // Uncompute entanglement and weights.
        circuit.extend(&entangler.inverse())?;
        circuit.extend(&weights.inverse())?;
        circuit.measure("hits", &layout.output.qubits())?;

        let neuron_set: std::collections::HashSet<&ParamId> = neuron_params.iter().collect();
        let synapse_params: Vec<ParamId> = circuit
            .parameters()
            .into_iter()
            .filter(|p| !neuron_set.contains(p))
            .collect();
        let model = VariationalModel::new(
            &circuit,
            layout.input.qubits(),
            layout.output.qubits(),
            &synapse_params,
        )?;

        Ok(IGOQNN {
            shape: shape.clone(),
            options,
            layout,
            circuit,
            neuron_params,
            synapse_params,
            repetitions,
            model,
        })
    }

    pub fn shape(&self) -> &NetworkShape {
        &self.shape
    }

    pub fn options(&self) -> &NetworkOptions {
        &self.options
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// Full inventory in circuit order (neurons first).
    pub fn parameters(&self) -> &[ParamId] {
        self.model.params()
    }

    pub fn neuron_params(&self) -> &[ParamId] {
        &self.neuron_params
    }

    /// The L1-regularised set.
    pub fn synapse_params(&self) -> &[ParamId] {
        &self.synapse_params
    }

    pub fn model(&self) -> &VariationalModel {
        &self.model
    }

    /// Bindings with every parameter set to `value`.
    pub fn constant_bindings(&self, value: f64) -> ParamBindings {
        self.parameters().iter().map(|p| (p.clone(), value)).collect()
    }

    /// Output-qubit hit probabilities for one database input (exact mode).
    pub fn propagate(&self, bindings: &ParamBindings, database_bits: &[bool]) -> Result<Vec<f64>> {
        let values = bindings.values_for(self.parameters())?;
        self.model.marginals(&values, database_bits)
    }

    /// Like [`Self::propagate`], optionally estimating marginals from shots.
    pub fn propagate_with(
        &self,
        bindings: &ParamBindings,
        database_bits: &[bool],
        mode: ExecutionMode,
        seed: u64,
    ) -> Result<Vec<f64>> {
        let values = bindings.values_for(self.parameters())?;
        match mode {
            ExecutionMode::Exact => self.model.marginals(&values, database_bits),
            ExecutionMode::Shots { shots } => {
                use rand::SeedableRng;
                let state = self.model.final_state(&values, database_bits)?;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                self.model.sampled_marginals(&state, shots, &mut rng)
            }
        }
    }

    /// Bound circuit as OpenQASM 2.0.
    pub fn export_qasm(&self, bindings: &ParamBindings) -> Result<String> {
        self.circuit.export_qasm(Some(bindings))
    }
}
