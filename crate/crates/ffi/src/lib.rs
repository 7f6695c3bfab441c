//! C ABI over the `igoqnn` network builder, simulator and trainer.
//!
//! Every entry point returns an [`IgoqnnStatus`]. On failure a message is
//! kept per thread and read with [`igoqnn_last_error_message`]. Results are
//! written through caller-provided out pointers, which are left untouched on
//! failure. Parameter vectors follow the network's parameter order,
//! see [`igoqnn_network_param_label`]. Bit vectors hold one byte per channel
//! (0 or 1), channel 0 first.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use igoqnn::grover::{grover_search, MarkedSet};
use igoqnn::training::{self, LossConfig, LossKind, TrainingExample};
use igoqnn::{Error, FlagMode, NetworkShape, ParamBindings, SynapseMode, IGOQNN};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IgoqnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Index = 4,
    Construction = 5,
    UnboundParameter = 6,
    Parse = 7,
    Config = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IgoqnnSynapseMode {
    NullConsistent = 0,
    PaperLiteral = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IgoqnnFlagMode {
    Parity = 0,
    Conjunction = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IgoqnnLossKind {
    Bce = 0,
    L2 = 1,
}

/// Opaque built network.
pub struct IgoqnnNetwork {
    inner: IGOQNN,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(IgoqnnStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Capacity(_) => IgoqnnStatus::Capacity,
            Error::Index(_) => IgoqnnStatus::Index,
            Error::Argument(_) => IgoqnnStatus::InvalidArgument,
            Error::Construction(_) => IgoqnnStatus::Construction,
            Error::UnboundParameter(_) => IgoqnnStatus::UnboundParameter,
            Error::Parse { .. } => IgoqnnStatus::Parse,
            Error::Config(_) => IgoqnnStatus::Config,
            Error::Io(_) => IgoqnnStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(IgoqnnStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IgoqnnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IgoqnnStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IgoqnnStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or a live handle.
unsafe fn network<'a>(p: *const IgoqnnNetwork) -> Result<&'a IGOQNN, Failure> {
    p.as_ref().map(|n| &n.inner).ok_or_else(|| null("network"))
}

fn bits(bytes: &[u8], what: &str) -> Result<Vec<bool>, Failure> {
    bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Failure(IgoqnnStatus::InvalidArgument, format!("`{what}` holds {b}, expected 0 or 1"))),
        })
        .collect()
}

fn bindings(net: &IGOQNN, values: &[f64]) -> Result<ParamBindings, Failure> {
    Ok(ParamBindings::from_values(net.parameters(), values)?)
}

fn owned_string(text: String) -> Result<*mut c_char, Failure> {
    CString::new(text)
        .map(CString::into_raw)
        .map_err(|_| Failure(IgoqnnStatus::InvalidArgument, "string contains NUL".into()))
}

/// Message of the last failure on this thread, or null. Valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn igoqnn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Qubits needed by a network: `2N + Σ widths + 1`.
///
/// # Safety
/// `widths` must be valid for `num_layers` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_qubit_budget(
    n_database: usize,
    widths: *const usize,
    num_layers: usize,
    out_qubits: *mut usize,
) -> IgoqnnStatus {
    guard(|| {
        let shape = NetworkShape::new(n_database, slice(widths, num_layers, "widths")?.to_vec())?;
        *out(out_qubits, "out_qubits")? = shape.qubit_budget();
        Ok(())
    })
}

/// Simulated Grover success probability. A negative `iterations` selects the optimum.
///
/// # Safety
/// `marked` must be valid for `num_marked` reads; out pointers for one write each.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_grover_success_probability(
    n_index_qubits: usize,
    marked: *const usize,
    num_marked: usize,
    iterations: i64,
    out_probability: *mut f64,
    out_iterations: *mut usize,
) -> IgoqnnStatus {
    guard(|| {
        let set = MarkedSet::new(n_index_qubits, slice(marked, num_marked, "marked")?.iter().copied())?;
        let k = usize::try_from(iterations).ok();
        let outcome = grover_search(&set, k)?;
        let p = out(out_probability, "out_probability")?;
        let it = out(out_iterations, "out_iterations")?;
        *p = outcome.success_probability;
        *it = outcome.iterations;
        Ok(())
    })
}

/// Builds a network. Release it with [`igoqnn_network_free`].
///
/// # Safety
/// `widths` must be valid for `num_layers` reads and `out_network` for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_new(
    n_database: usize,
    widths: *const usize,
    num_layers: usize,
    synapse_mode: IgoqnnSynapseMode,
    flag_mode: IgoqnnFlagMode,
    out_network: *mut *mut IgoqnnNetwork,
) -> IgoqnnStatus {
    guard(|| {
        let slot = out(out_network, "out_network")?;
        let shape = NetworkShape::new(n_database, slice(widths, num_layers, "widths")?.to_vec())?;
        let synapse = match synapse_mode {
            IgoqnnSynapseMode::NullConsistent => SynapseMode::NullConsistent,
            IgoqnnSynapseMode::PaperLiteral => SynapseMode::PaperLiteral,
        };
        let flag = match flag_mode {
            IgoqnnFlagMode::Parity => FlagMode::Parity,
            IgoqnnFlagMode::Conjunction => FlagMode::Conjunction,
        };
        let inner = IGOQNN::build(&shape, synapse, flag)?;
        *slot = Box::into_raw(Box::new(IgoqnnNetwork { inner }));
        Ok(())
    })
}

/// Destroys a network. Null is ignored.
///
/// # Safety
/// `network` must be null or a handle from [`igoqnn_network_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_free(network: *mut IgoqnnNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// # Safety
/// `network` must be a live handle and `out_qubits` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_num_qubits(
    network: *const IgoqnnNetwork,
    out_qubits: *mut usize,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        *out(out_qubits, "out_qubits")? = net.num_qubits();
        Ok(())
    })
}

/// # Safety
/// `network` must be a live handle and `out_params` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_num_params(
    network: *const IgoqnnNetwork,
    out_params: *mut usize,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        *out(out_params, "out_params")? = net.parameters().len();
        Ok(())
    })
}

/// Label of parameter `index`, such as `hidden1[0].theta`. Free with [`igoqnn_string_free`].
///
/// # Safety
/// `network` must be a live handle and `out_label` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_param_label(
    network: *const IgoqnnNetwork,
    index: usize,
    out_label: *mut *mut c_char,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        let slot = out(out_label, "out_label")?;
        let id = net.parameters().get(index).ok_or_else(|| {
            Failure(
                IgoqnnStatus::Index,
                format!("parameter {index} of {}", net.parameters().len()),
            )
        })?;
        *slot = owned_string(id.label().to_string())?;
        Ok(())
    })
}

/// Exact output marginals `P(output[i] = 1)` for one database pattern.
///
/// `out_marginals` must hold `N` entries; `capacity` is its length.
///
/// # Safety
/// Each pointer must be valid for its stated length.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_propagate(
    network: *const IgoqnnNetwork,
    values: *const f64,
    num_values: usize,
    database: *const u8,
    num_bits: usize,
    out_marginals: *mut f64,
    capacity: usize,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        let b = bindings(net, slice(values, num_values, "values")?)?;
        let db = bits(slice(database, num_bits, "database")?, "database")?;
        let m = net.propagate(&b, &db)?;
        if capacity < m.len() {
            return Err(Failure(
                IgoqnnStatus::BufferTooSmall,
                format!("need {} marginals, capacity {capacity}", m.len()),
            ));
        }
        if out_marginals.is_null() {
            return Err(null("out_marginals"));
        }
        std::slice::from_raw_parts_mut(out_marginals, m.len()).copy_from_slice(&m);
        Ok(())
    })
}

/// OpenQASM 2.0 text of the bound circuit. Free with [`igoqnn_string_free`].
///
/// # Safety
/// `values` must be valid for `num_values` reads and `out_text` for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_export_qasm(
    network: *const IgoqnnNetwork,
    values: *const f64,
    num_values: usize,
    out_text: *mut *mut c_char,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        let slot = out(out_text, "out_text")?;
        let b = bindings(net, slice(values, num_values, "values")?)?;
        *slot = owned_string(net.export_qasm(&b)?)?;
        Ok(())
    })
}

/// Loss settings for [`igoqnn_network_loss`] and [`igoqnn_network_gradient`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IgoqnnLossOptions {
    pub kind: IgoqnnLossKind,
    pub l1_strength: f64,
    pub epsilon_clip: f64,
}

/// BCE, no L1 penalty, clip 1e-7.
#[no_mangle]
pub extern "C" fn igoqnn_loss_options_default() -> IgoqnnLossOptions {
    let d = LossConfig::default();
    IgoqnnLossOptions {
        kind: IgoqnnLossKind::Bce,
        l1_strength: d.l1_strength,
        epsilon_clip: d.epsilon_clip,
    }
}

fn loss_config(o: &IgoqnnLossOptions) -> LossConfig {
    LossConfig {
        kind: match o.kind {
            IgoqnnLossKind::Bce => LossKind::Bce,
            IgoqnnLossKind::L2 => LossKind::L2,
        },
        l1_strength: o.l1_strength,
        epsilon_clip: o.epsilon_clip,
    }
}

/// `num_examples` rows of `N` bytes each, for databases and hits alike.
unsafe fn examples(
    net: &IGOQNN,
    databases: *const u8,
    hits: *const u8,
    num_examples: usize,
) -> Result<Vec<TrainingExample>, Failure> {
    let n = net.shape().n_database();
    let total = num_examples
        .checked_mul(n)
        .ok_or_else(|| Failure(IgoqnnStatus::InvalidArgument, "example count overflows".into()))?;
    let d = bits(slice(databases, total, "databases")?, "databases")?;
    let h = bits(slice(hits, total, "hits")?, "hits")?;
    if num_examples == 0 {
        return Err(Failure(IgoqnnStatus::InvalidArgument, "no examples".into()));
    }
    d.chunks(n)
        .zip(h.chunks(n))
        .map(|(d, h)| Ok(TrainingExample::new(d.to_vec(), h.to_vec())?))
        .collect()
}

/// Mean batch loss plus the L1 term.
///
/// # Safety
/// Array pointers must be valid for their stated lengths; `out_loss` for one write.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_loss(
    network: *const IgoqnnNetwork,
    values: *const f64,
    num_values: usize,
    databases: *const u8,
    hits: *const u8,
    num_examples: usize,
    options: IgoqnnLossOptions,
    out_loss: *mut f64,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        let b = bindings(net, slice(values, num_values, "values")?)?;
        let batch = examples(net, databases, hits, num_examples)?;
        let loss = training::batch_loss(net, &b, &batch, &loss_config(&options))?;
        *out(out_loss, "out_loss")? = loss;
        Ok(())
    })
}

/// Parameter-shift gradient of [`igoqnn_network_loss`], in parameter order.
///
/// # Safety
/// Array pointers must be valid for their stated lengths; `out_gradient` for `num_values` writes.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_network_gradient(
    network: *const IgoqnnNetwork,
    values: *const f64,
    num_values: usize,
    databases: *const u8,
    hits: *const u8,
    num_examples: usize,
    options: IgoqnnLossOptions,
    out_gradient: *mut f64,
) -> IgoqnnStatus {
    guard(|| {
        let net = self::network(network)?;
        let b = bindings(net, slice(values, num_values, "values")?)?;
        let batch = examples(net, databases, hits, num_examples)?;
        let grad = training::grad_param_shift(net, &b, &batch, &loss_config(&options))?;
        let g = grad.values_for(net.parameters())?;
        if out_gradient.is_null() {
            return Err(null("out_gradient"));
        }
        std::slice::from_raw_parts_mut(out_gradient, g.len()).copy_from_slice(&g);
        Ok(())
    })
}

/// Reads a NUL-terminated string argument.
///
/// # Safety
/// `s` must be null or NUL-terminated.
unsafe fn text_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(IgoqnnStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

/// Parses OpenQASM text in the exported subset and reports its size.
///
/// # Safety
/// `text` must be NUL-terminated; out pointers valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn igoqnn_qasm_inspect(
    text: *const c_char,
    out_qubits: *mut usize,
    out_gates: *mut usize,
) -> IgoqnnStatus {
    guard(|| {
        let circuit = igoqnn::harness::read_qasm(text_arg(text, "text")?)?;
        let q = out(out_qubits, "out_qubits")?;
        let g = out(out_gates, "out_gates")?;
        *q = circuit.num_qubits();
        *g = circuit.len();
        Ok(())
    })
}
