//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the amplitude index (qubit 0 is the least
//! significant bit). Bitstrings are rendered most-significant qubit first.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default upper bound on the number of simulated qubits (2^24 amplitudes, 256 MiB).
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Unitary2([[one, zero], [zero, one]])
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Unitary2([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Unitary2([[zero, one], [one, zero]])
    }

    /// `u3(θ, φ, λ) = [[cos(θ/2), -e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Unitary2([
            [
                Complex64::new(c, 0.0),
                -Complex64::from_polar(s, lambda),
            ],
            [
                Complex64::from_polar(s, phi),
                Complex64::from_polar(c, phi + lambda),
            ],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Unitary2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Unitary2) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Unitary2(out)
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.mul(&self.adjoint());
        let id = Unitary2::identity();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }
}

/// Raw amplitude kernels. They assume operands were validated by the caller.
///
/// On x86-64 the rotation kernels are also compiled for AVX2 and selected at
/// run time; no operation is contracted, so both paths round identically.
pub mod kernel {
    use super::Unitary2;
    use num_complex::Complex64;

    #[cfg(target_arch = "x86_64")]
    mod wide {
        use super::{Complex64, Unitary2};

        #[target_feature(enable = "avx2")]
        pub unsafe fn one_qubit(amps: &mut [Complex64], u: &Unitary2, target: usize) {
            super::one_qubit(amps, u, target)
        }

        #[target_feature(enable = "avx2")]
        pub unsafe fn controlled(amps: &mut [Complex64], u: &Unitary2, control: usize, target: usize) {
            super::controlled(amps, u, control, target)
        }
    }

    #[inline]
    fn has_avx2() -> bool {
        #[cfg(target_arch = "x86_64")]
        {
            std::is_x86_feature_detected!("avx2")
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            false
        }
    }

    pub fn apply_1q(amps: &mut [Complex64], u: &Unitary2, target: usize) {
        #[cfg(target_arch = "x86_64")]
        if has_avx2() {
            // SAFETY: the required CPU feature was detected at run time.
            return unsafe { wide::one_qubit(amps, u, target) };
        }
        one_qubit(amps, u, target)
    }

    pub fn apply_controlled_1q(amps: &mut [Complex64], u: &Unitary2, control: usize, target: usize) {
        #[cfg(target_arch = "x86_64")]
        if has_avx2() {
            // SAFETY: the required CPU feature was detected at run time.
            return unsafe { wide::controlled(amps, u, control, target) };
        }
        controlled(amps, u, control, target)
    }

    #[inline(always)]
    fn rotate_pairs(lo: &mut [Complex64], hi: &mut [Complex64], u: &Unitary2) {
        let [[u00, u01], [u10, u11]] = u.0;
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (xr, xi, yr, yi) = (a.re, a.im, b.re, b.im);
            a.re = u00.re * xr - u00.im * xi + u01.re * yr - u01.im * yi;
            a.im = u00.re * xi + u00.im * xr + u01.re * yi + u01.im * yr;
            b.re = u10.re * xr - u10.im * xi + u11.re * yr - u11.im * yi;
            b.im = u10.re * xi + u10.im * xr + u11.re * yi + u11.im * yr;
        }
    }

    #[inline(always)]
    fn one_qubit(amps: &mut [Complex64], u: &Unitary2, target: usize) {
        let stride = 1usize << target;
        for chunk in amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            rotate_pairs(lo, hi, u);
        }
    }

    pub fn apply_x(amps: &mut [Complex64], target: usize) {
        let stride = 1usize << target;
        for chunk in amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
    }

    /// Visits every (target=0, target=1) amplitude pair whose control bit is set.
    #[inline(always)]
    fn for_controlled_pairs(
        amps: &mut [Complex64],
        control: usize,
        target: usize,
        mut f: impl FnMut(&mut [Complex64], &mut [Complex64]),
    ) {
        let cstride = 1usize << control;
        let tstride = 1usize << target;
        if control > target {
            for block in amps.chunks_exact_mut(cstride << 1) {
                for chunk in block[cstride..].chunks_exact_mut(tstride << 1) {
                    let (lo, hi) = chunk.split_at_mut(tstride);
                    f(lo, hi);
                }
            }
        } else {
            for chunk in amps.chunks_exact_mut(tstride << 1) {
                let (lo, hi) = chunk.split_at_mut(tstride);
                for (lo_c, hi_c) in lo
                    .chunks_exact_mut(cstride << 1)
                    .zip(hi.chunks_exact_mut(cstride << 1))
                {
                    f(&mut lo_c[cstride..], &mut hi_c[cstride..]);
                }
            }
        }
    }

    #[inline(always)]
    fn controlled(amps: &mut [Complex64], u: &Unitary2, control: usize, target: usize) {
        for_controlled_pairs(amps, control, target, |lo, hi| rotate_pairs(lo, hi, u));
    }

    pub fn apply_cx(amps: &mut [Complex64], control: usize, target: usize) {
        for_controlled_pairs(amps, control, target, |lo, hi| lo.swap_with_slice(hi));
    }
}

/// Dense `2^n` amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits, bounded by [`DEFAULT_MAX_QUBITS`].
    pub fn new_zero_state(num_qubits: usize) -> Result<Self> {
        Self::new_zero_state_with_cap(num_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn new_zero_state_with_cap(num_qubits: usize, max_qubits: usize) -> Result<Self> {
        Self::basis_state_with_cap(num_qubits, 0, max_qubits)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_state_with_cap(num_qubits, index, DEFAULT_MAX_QUBITS)
    }

    fn basis_state_with_cap(num_qubits: usize, index: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > max_qubits {
            return Err(Error::Capacity(format!(
                "{num_qubits} qubits requested, supported range is 1..={max_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Index(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps explicit amplitudes; the length must be a power of two and the norm one.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity(format!("{num_qubits} qubits")));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Argument(format!("state norm² is {norm}, expected 1")));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_width(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`; insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_same_width(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Argument(format!(
                "qubit count mismatch: {} vs {}",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Index(format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, u: &Unitary2, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        kernel::apply_1q(&mut self.amplitudes, u, target);
        Ok(())
    }

    /// Applies `u` to `target` on the subspace where `control` is 1.
    pub fn apply_controlled_1q(&mut self, u: &Unitary2, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Argument(format!(
                "control and target are both qubit {control}"
            )));
        }
        kernel::apply_controlled_1q(&mut self.amplitudes, u, control, target);
        Ok(())
    }

    /// Probability that qubit `q` measures 1.
    pub fn marginal_prob_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        Ok(marginal_one(&self.amplitudes, q))
    }

    /// Joint outcome distribution of `qubits`; entry `k` has bit `i` equal to the outcome of `qubits[i]`.
    pub fn joint_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut dist = vec![0.0; 1usize << qubits.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &q)| acc | (((idx >> q) & 1) << i));
            dist[key] += p;
        }
        Ok(dist)
    }

    /// Samples `shots` full-register outcomes as basis indices.
    pub fn sample_indices(&self, shots: usize, seed: u64) -> Result<Vec<usize>> {
        if shots == 0 {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        let probs = self.probabilities();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(sample_from(&probs, shots, &mut rng))
    }

    /// Samples `shots` outcomes and tallies them by bitstring (most significant qubit first).
    pub fn sample_bitstrings(&self, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        let mut counts = BTreeMap::new();
        for idx in self.sample_indices(shots, seed)? {
            *counts.entry(index_to_bitstring(idx, self.num_qubits)).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

pub(crate) fn marginal_one(amps: &[Complex64], q: usize) -> f64 {
    let stride = 1usize << q;
    amps.chunks_exact(stride << 1)
        .map(|chunk| chunk[stride..].iter().map(|a| a.norm_sqr()).sum::<f64>())
        .sum()
}

/// Draws `shots` indices from an (unnormalised) discrete distribution.
pub(crate) fn sample_from(probs: &[f64], shots: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut total = 0.0;
    for p in probs {
        total += p;
        cumulative.push(total);
    }
    let last_live = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..shots)
        .map(|_| {
            let r = rng.gen::<f64>() * total;
            cumulative.partition_point(|&c| c <= r).min(last_live)
        })
        .collect()
}

/// Renders `index` as `width` bits, most significant first.
pub fn index_to_bitstring(index: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}
