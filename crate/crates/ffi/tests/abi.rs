use std::ffi::{CStr, CString};
use std::ptr;

use igoqnn_ffi::*;

fn last_error() -> String {
    let p = igoqnn_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Net(*mut IgoqnnNetwork);

impl Net {
    fn new(n: usize, widths: &[usize]) -> Net {
        let mut p = ptr::null_mut();
        let s = unsafe {
            igoqnn_network_new(
                n,
                widths.as_ptr(),
                widths.len(),
                IgoqnnSynapseMode::NullConsistent,
                IgoqnnFlagMode::Parity,
                &mut p,
            )
        };
        assert_eq!(s, IgoqnnStatus::Ok);
        Net(p)
    }

    fn num_params(&self) -> usize {
        let mut k = 0;
        assert_eq!(unsafe { igoqnn_network_num_params(self.0, &mut k) }, IgoqnnStatus::Ok);
        k
    }
}

impl Drop for Net {
    fn drop(&mut self) {
        unsafe { igoqnn_network_free(self.0) }
    }
}

#[test]
fn qubit_budgets() {
    let mut q = 0;
    assert_eq!(unsafe { igoqnn_qubit_budget(2, [4, 4].as_ptr(), 2, &mut q) }, IgoqnnStatus::Ok);
    assert_eq!(q, 13);
    assert_eq!(unsafe { igoqnn_qubit_budget(1, [1].as_ptr(), 1, &mut q) }, IgoqnnStatus::Ok);
    assert_eq!(q, 4);
    q = 99;
    assert_eq!(unsafe { igoqnn_qubit_budget(0, [1].as_ptr(), 1, &mut q) }, IgoqnnStatus::InvalidArgument);
    assert_eq!(q, 99);
    assert!(last_error().contains("channel"));
    assert_eq!(unsafe { igoqnn_qubit_budget(1, ptr::null(), 1, &mut q) }, IgoqnnStatus::NullPointer);
}

#[test]
fn grover_probability() {
    let (mut p, mut k) = (0.0, 0);
    let s = unsafe { igoqnn_grover_success_probability(3, [5].as_ptr(), 1, 2, &mut p, &mut k) };
    assert_eq!(s, IgoqnnStatus::Ok);
    assert_eq!(k, 2);
    assert!((p - (5.0 * (1.0f64 / 8.0).sqrt().asin()).sin().powi(2)).abs() < 1e-12);
    let s = unsafe { igoqnn_grover_success_probability(2, [2].as_ptr(), 1, -1, &mut p, &mut k) };
    assert_eq!(s, IgoqnnStatus::Ok);
    assert_eq!(k, 1);
    assert!((p - 1.0).abs() < 1e-12);
    let s = unsafe { igoqnn_grover_success_probability(3, ptr::null(), 0, 1, &mut p, &mut k) };
    assert_eq!(s, IgoqnnStatus::InvalidArgument);
}

#[test]
fn network_handle_round_trip() {
    let net = Net::new(1, &[1]);
    let mut q = 0;
    assert_eq!(unsafe { igoqnn_network_num_qubits(net.0, &mut q) }, IgoqnnStatus::Ok);
    assert_eq!(q, 4);
    let k = net.num_params();
    assert!(k > 0);

    let mut label = ptr::null_mut();
    assert_eq!(unsafe { igoqnn_network_param_label(net.0, 0, &mut label) }, IgoqnnStatus::Ok);
    assert!(!unsafe { CStr::from_ptr(label) }.to_bytes().is_empty());
    unsafe { igoqnn_string_free(label) };
    assert_eq!(unsafe { igoqnn_network_param_label(net.0, k, &mut label) }, IgoqnnStatus::Index);

    let values = vec![0.0; k];
    let mut m = [f64::NAN; 1];
    let s = unsafe { igoqnn_network_propagate(net.0, values.as_ptr(), k, [1u8].as_ptr(), 1, m.as_mut_ptr(), 1) };
    assert_eq!(s, IgoqnnStatus::Ok);
    assert!((m[0] - 0.5).abs() < 1e-12);
    let s = unsafe { igoqnn_network_propagate(net.0, values.as_ptr(), k, [1u8].as_ptr(), 1, m.as_mut_ptr(), 0) };
    assert_eq!(s, IgoqnnStatus::BufferTooSmall);
    let s = unsafe { igoqnn_network_propagate(net.0, values.as_ptr(), k, [2u8].as_ptr(), 1, m.as_mut_ptr(), 1) };
    assert_eq!(s, IgoqnnStatus::InvalidArgument);
    let s = unsafe { igoqnn_network_propagate(net.0, values.as_ptr(), k - 1, [1u8].as_ptr(), 1, m.as_mut_ptr(), 1) };
    assert_ne!(s, IgoqnnStatus::Ok);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { igoqnn_network_export_qasm(net.0, values.as_ptr(), k, &mut text) }, IgoqnnStatus::Ok);
    let (mut qubits, mut gates) = (0, 0);
    assert_eq!(unsafe { igoqnn_qasm_inspect(text, &mut qubits, &mut gates) }, IgoqnnStatus::Ok);
    assert_eq!(qubits, 4);
    assert!(gates > 0);
    unsafe { igoqnn_string_free(text) };

    let bad = CString::new("OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n").unwrap();
    assert_eq!(unsafe { igoqnn_qasm_inspect(bad.as_ptr(), &mut qubits, &mut gates) }, IgoqnnStatus::Parse);
    assert!(last_error().contains("line 3"));
}

#[test]
fn loss_and_gradient() {
    let net = Net::new(1, &[1]);
    let k = net.num_params();
    let values: Vec<f64> = (0..k).map(|i| 0.3 * ((i * 7 % 5) as f64 - 2.0)).collect();
    let db = [0u8, 1];
    let hits = [1u8, 0];
    let opts = igoqnn_loss_options_default();
    let mut loss = 0.0;
    let s = unsafe { igoqnn_network_loss(net.0, values.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 2, opts, &mut loss) };
    assert_eq!(s, IgoqnnStatus::Ok);
    let mut grad = vec![0.0; k];
    let s = unsafe {
        igoqnn_network_gradient(net.0, values.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 2, opts, grad.as_mut_ptr())
    };
    assert_eq!(s, IgoqnnStatus::Ok);
    let h = 1e-5;
    for i in 0..k {
        let mut up = values.clone();
        let mut dn = values.clone();
        up[i] += h;
        dn[i] -= h;
        let (mut lu, mut ld) = (0.0, 0.0);
        unsafe {
            igoqnn_network_loss(net.0, up.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 2, opts, &mut lu);
            igoqnn_network_loss(net.0, dn.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 2, opts, &mut ld);
        }
        let fd = (lu - ld) / (2.0 * h);
        assert!((fd - grad[i]).abs() < 1e-7 * (1.0 + fd.abs()), "param {i}: {fd} vs {}", grad[i]);
    }
    let s = unsafe { igoqnn_network_loss(net.0, values.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 0, opts, &mut loss) };
    assert_eq!(s, IgoqnnStatus::InvalidArgument);
    let bad = IgoqnnLossOptions { epsilon_clip: 0.7, ..opts };
    let s = unsafe { igoqnn_network_loss(net.0, values.as_ptr(), k, db.as_ptr(), hits.as_ptr(), 2, bad, &mut loss) };
    assert_ne!(s, IgoqnnStatus::Ok);
}

#[test]
fn null_handles_are_rejected() {
    let mut k = 0;
    assert_eq!(unsafe { igoqnn_network_num_params(ptr::null(), &mut k) }, IgoqnnStatus::NullPointer);
    assert!(last_error().contains("network"));
    unsafe {
        igoqnn_network_free(ptr::null_mut());
        igoqnn_string_free(ptr::null_mut());
    }
}
