//! The circuit tensor: a running 2^n x 2^n contraction of the target's
//! adjoint with the circuit's gates, supporting gate application and removal
//! on either side and environment-matrix extraction.
//!
//! Internally the tensor holds the matrix product
//! `E(g_p) · … · E(g_1) · V†` right after initialization, where `E(g)` is
//! the expanded gate and `V` the target. Because the full trace is cyclic,
//! `trace_all` equals `Tr(V† U)` for the circuit unitary `U` in application
//! order, and it stays correct as sweeps peel gates off one end and reinsert
//! them on the other.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::linalg::{
    apply_local_left, apply_local_right, partial_trace_env, ComplexMatrix, LinalgError,
};

#[derive(Debug, Clone)]
pub struct CircuitTensor {
    num_qubits: usize,
    data: ComplexMatrix,
    /// Gates currently contracted on each side; diagnostic only.
    left_applied: isize,
    right_applied: isize,
}

impl CircuitTensor {
    /// Builds the tensor for `target` and a circuit at its current gate
    /// values: the target's adjoint with every gate applied on the left in
    /// application order.
    pub fn init(target: &ComplexMatrix, circuit: &Circuit) -> Result<Self, LinalgError> {
        let n = target.qubit_count()?;
        if circuit.num_qubits != n {
            return Err(LinalgError::DimensionMismatch {
                op: "init_circuit_tensor",
                lhs: (target.rows(), target.cols()),
                rhs: (circuit.dim(), circuit.dim()),
            });
        }
        let mut ct = CircuitTensor {
            num_qubits: n,
            data: target.dagger(),
            left_applied: 0,
            right_applied: 0,
        };
        for g in &circuit.gates {
            ct.apply_left(&g.unitary(), &g.location, false)?;
        }
        Ok(ct)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn applied_counts(&self) -> (isize, isize) {
        (self.left_applied, self.right_applied)
    }

    /// Contracts `u` (or its inverse) onto the tensor's right legs:
    /// `ct <- ct · E(u or u†)`.
    pub fn apply_right(
        &mut self,
        u: &ComplexMatrix,
        location: &[usize],
        inverse: bool,
    ) -> Result<(), LinalgError> {
        apply_local_right(&mut self.data, u, location, self.num_qubits, inverse)?;
        self.right_applied += if inverse { -1 } else { 1 };
        Ok(())
    }

    /// Contracts `u` (or its inverse) onto the tensor's left legs:
    /// `ct <- E(u or u†) · ct`.
    pub fn apply_left(
        &mut self,
        u: &ComplexMatrix,
        location: &[usize],
        inverse: bool,
    ) -> Result<(), LinalgError> {
        apply_local_left(&mut self.data, u, location, self.num_qubits, inverse)?;
        self.left_applied += if inverse { -1 } else { 1 };
        Ok(())
    }

    /// Environment matrix of the gate slot at `location`: the partial trace
    /// of the tensor over all other qubits, oriented so that
    /// `Tr(env · u) == trace_all(ct with u applied)` for every gate-sized u.
    /// The gate itself must already have been removed from the tensor.
    pub fn calc_env_mat(&self, location: &[usize]) -> Result<ComplexMatrix, LinalgError> {
        partial_trace_env(&self.data, location, self.num_qubits)
    }

    /// Full trace of the tensor, `Tr(V† U)` for the currently applied gates.
    pub fn trace_all(&self) -> Complex64 {
        self.data.trace()
    }

    /// Rebuilds the tensor from scratch, clearing accumulated rounding
    /// drift from inverse-application pairs.
    pub fn reset(&mut self, target: &ComplexMatrix, circuit: &Circuit) -> Result<(), LinalgError> {
        *self = CircuitTensor::init(target, circuit)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{expand_to_n_qubits, Circuit, GateKind, LocatedGate};
    use crate::linalg::{haar_unitary, hs_inner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_circuit(n: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
        let mut c = Circuit::new(n);
        for _ in 0..gates {
            match rng.gen_range(0..3) {
                0 => c
                    .push(LocatedGate::u3(
                        rng.gen_range(0..n),
                        rng.gen_range(-PI..PI),
                        rng.gen_range(-PI..PI),
                        rng.gen_range(-PI..PI),
                    ))
                    .unwrap(),
                1 => {
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n);
                    while b == a {
                        b = rng.gen_range(0..n);
                    }
                    c.push(LocatedGate::cnot(a, b).unwrap()).unwrap();
                }
                _ => {
                    let q = rng.gen_range(0..n);
                    c.push(
                        LocatedGate::new(
                            GateKind::variable_unitary(haar_unitary(2, rng)).unwrap(),
                            vec![q],
                            vec![],
                        )
                        .unwrap(),
                    )
                    .unwrap();
                }
            }
        }
        c
    }

    #[test]
    fn identity_target_empty_circuit() {
        let n = 2;
        let ct = CircuitTensor::init(&ComplexMatrix::identity(4), &Circuit::new(n)).unwrap();
        assert!((ct.trace_all() - Complex64::new(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn perfect_overlap_has_full_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let c = random_circuit(3, 10, &mut rng);
        let target = c.unitary().unwrap();
        let ct = CircuitTensor::init(&target, &c).unwrap();
        assert!((ct.trace_all().norm() - 8.0).abs() < 1e-8);
    }

    #[test]
    fn init_matches_hs_inner_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 10, &mut rng);
        let ct = CircuitTensor::init(&target, &c).unwrap();
        let oracle = hs_inner(&target, &c.unitary().unwrap()).unwrap();
        assert!((ct.trace_all() - oracle).norm() < 1e-8);
    }

    #[test]
    fn init_rejects_dimension_mismatch() {
        let target = ComplexMatrix::identity(4);
        let c = Circuit::new(3);
        assert!(CircuitTensor::init(&target, &c).is_err());
    }

    #[test]
    fn apply_then_inverse_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 6, &mut rng);
        let ct0 = CircuitTensor::init(&target, &c).unwrap();
        let mut ct = ct0.clone();
        let u = haar_unitary(4, &mut rng);
        ct.apply_right(&u, &[0, 2], false).unwrap();
        ct.apply_right(&u, &[0, 2], true).unwrap();
        assert!(ct.data().max_abs_diff(ct0.data()) < 1e-10);
        ct.apply_left(&u, &[1, 0], false).unwrap();
        ct.apply_left(&u, &[1, 0], true).unwrap();
        assert!(ct.data().max_abs_diff(ct0.data()) < 1e-10);
        assert_eq!(ct.applied_counts(), ct0.applied_counts());
    }

    #[test]
    fn identity_gate_is_a_no_op() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let target = haar_unitary(8, &mut rng);
        let ct0 = CircuitTensor::init(&target, &Circuit::new(3)).unwrap();
        let mut ct = ct0.clone();
        ct.apply_right(&ComplexMatrix::identity(2), &[1], false).unwrap();
        ct.apply_left(&ComplexMatrix::identity(4), &[2, 0], false).unwrap();
        assert!(ct.data().max_abs_diff(ct0.data()) < 1e-15);
    }

    #[test]
    fn random_application_sequence_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let target = haar_unitary(8, &mut rng);
        let mut ct = CircuitTensor::init(&target, &Circuit::new(3)).unwrap();
        let mut dense = target.dagger();
        for step in 0..8 {
            let m = 1 + (step % 2);
            let mut loc: Vec<usize> = (0..3).collect();
            // deterministic shuffle
            for i in (1..loc.len()).rev() {
                loc.swap(i, rng.gen_range(0..=i));
            }
            loc.truncate(m);
            let u = haar_unitary(1 << m, &mut rng);
            let expanded = expand_to_n_qubits(&u, &loc, 3).unwrap();
            if step % 2 == 0 {
                ct.apply_right(&u, &loc, false).unwrap();
                dense = dense.matmul(&expanded).unwrap();
            } else {
                ct.apply_left(&u, &loc, true).unwrap();
                dense = expanded.dagger().matmul(&dense).unwrap();
            }
        }
        assert!(ct.data().max_abs_diff(&dense) < 1e-9);
    }

    #[test]
    fn env_of_whole_register_gate_is_target_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let target = haar_unitary(4, &mut rng);
        // single gate covering all qubits, removed again: env must satisfy
        // Tr(env·u) = Tr(V†·u) for any u
        let ct = CircuitTensor::init(&target, &Circuit::new(2)).unwrap();
        let env = ct.calc_env_mat(&[0, 1]).unwrap();
        for _ in 0..20 {
            let u = haar_unitary(4, &mut rng);
            let lhs = env.matmul(&u).unwrap().trace();
            let rhs = target.dagger().matmul(&u).unwrap().trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn env_of_identity_tensor_counts_traced_qubits() {
        let ct = CircuitTensor::init(&ComplexMatrix::identity(4), &Circuit::new(2)).unwrap();
        let env = ct.calc_env_mat(&[0]).unwrap();
        let expected = ComplexMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
        assert!(env.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn env_contract_reproduces_full_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 9, &mut rng);
        let full = CircuitTensor::init(&target, &c).unwrap().trace_all();
        // remove each gate in turn from a fresh tensor and check the contract
        for k in 0..c.gates.len() {
            let mut ct = CircuitTensor::init(&target, &c).unwrap();
            // peel gates k+1..p off the left (they were applied after gate k)
            for g in c.gates[k + 1..].iter().rev() {
                ct.apply_left(&g.unitary(), &g.location, true).unwrap();
            }
            // now gate k is the leftmost factor; remove it
            let gk = &c.gates[k];
            ct.apply_left(&gk.unitary(), &gk.location, true).unwrap();
            // reinsert the later gates on the right so the slot contract holds
            for g in c.gates[k + 1..].iter() {
                ct.apply_right(&g.unitary(), &g.location, false).unwrap();
            }
            let env = ct.calc_env_mat(&gk.location).unwrap();
            let via_env = env.matmul(&gk.unitary()).unwrap().trace();
            assert!(
                (via_env - full).norm() < 1e-9,
                "gate {k}: {via_env} vs {full}"
            );
        }
    }

    #[test]
    fn env_is_linear_in_the_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 7, &mut rng);
        let ct = CircuitTensor::init(&target, &c).unwrap();
        let env = ct.calc_env_mat(&[1]).unwrap();
        for _ in 0..5 {
            let u = haar_unitary(2, &mut rng);
            let v = haar_unitary(2, &mut rng);
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let combo = u.scale(a).add(&v.scale(b)).unwrap();
            let lhs = env.matmul(&combo).unwrap().trace();
            let rhs = a * env.matmul(&u).unwrap().trace() + b * env.matmul(&v).unwrap().trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn disjoint_left_right_applications_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let target = haar_unitary(16, &mut rng);
        let ct0 = CircuitTensor::init(&target, &Circuit::new(4)).unwrap();
        let u = haar_unitary(4, &mut rng);
        let v = haar_unitary(2, &mut rng);
        let mut a = ct0.clone();
        a.apply_left(&u, &[0, 1], false).unwrap();
        a.apply_right(&v, &[3], false).unwrap();
        let mut b = ct0.clone();
        b.apply_right(&v, &[3], false).unwrap();
        b.apply_left(&u, &[0, 1], false).unwrap();
        assert!(a.data().max_abs_diff(b.data()) < 1e-10);
    }

    #[test]
    fn reset_immediately_after_init_is_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 8, &mut rng);
        let ct = CircuitTensor::init(&target, &c).unwrap();
        let mut ct2 = ct.clone();
        ct2.reset(&target, &c).unwrap();
        assert!(ct.data().max_abs_diff(ct2.data()) < 1e-12);
    }

    #[test]
    fn reset_clears_accumulated_drift() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let target = haar_unitary(8, &mut rng);
        let c = random_circuit(3, 8, &mut rng);
        let clean = CircuitTensor::init(&target, &c).unwrap();
        let mut drifted = clean.clone();
        let u = haar_unitary(4, &mut rng);
        for _ in 0..200 {
            drifted.apply_right(&u, &[0, 2], false).unwrap();
            drifted.apply_right(&u, &[0, 2], true).unwrap();
        }
        assert!(drifted.data().max_abs_diff(clean.data()) < 1e-8);
        for _ in 0..10_000 {
            drifted.apply_left(&u, &[1, 2], false).unwrap();
            drifted.apply_left(&u, &[1, 2], true).unwrap();
        }
        let drift = drifted.data().max_abs_diff(clean.data());
        drifted.reset(&target, &c).unwrap();
        let after = drifted.data().max_abs_diff(clean.data());
        assert!(after < 1e-10, "reset must restore agreement (drift was {drift:.3e})");
    }
}
