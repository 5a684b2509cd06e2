use num_complex::Complex64;
use serde::Serialize;

use super::CircuitError;
use crate::linalg::{apply_local_left, ComplexMatrix, LinalgError, LocalIndexer};

const UNITARY_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The supported gate kinds.
///
/// `ConstantUnitary` is a fixed matrix; `VariableUnitary` is a gate whose
/// optimization state is its full unitary matrix rather than rotation angles.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    U3,
    Rz,
    Cnot,
    ConstantUnitary(ComplexMatrix),
    VariableUnitary(ComplexMatrix),
}

impl GateKind {
    pub fn param_count(&self) -> usize {
        match self {
            GateKind::U3 => 3,
            GateKind::Rz => 1,
            GateKind::Cnot | GateKind::ConstantUnitary(_) | GateKind::VariableUnitary(_) => 0,
        }
    }

    pub fn arity(&self) -> Result<usize, CircuitError> {
        match self {
            GateKind::U3 | GateKind::Rz => Ok(1),
            GateKind::Cnot => Ok(2),
            GateKind::ConstantUnitary(m) | GateKind::VariableUnitary(m) => {
                m.qubit_count().map_err(CircuitError::from)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::U3 => "u3",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cx",
            GateKind::ConstantUnitary(_) => "constant",
            GateKind::VariableUnitary(_) => "variable",
        }
    }

    /// Validating constructor for a fixed-matrix gate.
    pub fn constant_unitary(m: ComplexMatrix) -> Result<GateKind, CircuitError> {
        check_gate_matrix(&m)?;
        Ok(GateKind::ConstantUnitary(m))
    }

    /// Validating constructor for a matrix-valued optimizable gate.
    pub fn variable_unitary(m: ComplexMatrix) -> Result<GateKind, CircuitError> {
        check_gate_matrix(&m)?;
        Ok(GateKind::VariableUnitary(m))
    }
}

fn check_gate_matrix(m: &ComplexMatrix) -> Result<(), CircuitError> {
    m.qubit_count()?;
    let err = m.unitarity_error();
    if err > UNITARY_TOL {
        return Err(CircuitError::BadGateMatrix(format!(
            "matrix fails the unitarity check (max |M†M - I| = {err:.3e})"
        )));
    }
    Ok(())
}

/// A gate placed on specific qubits. `location[0]` holds the most
/// significant bit of the gate-local basis index; for CNOT that is the
/// control qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedGate {
    pub kind: GateKind,
    pub location: Vec<usize>,
    pub params: Vec<f64>,
}

impl LocatedGate {
    pub fn new(kind: GateKind, location: Vec<usize>, params: Vec<f64>) -> Result<Self, CircuitError> {
        if params.len() != kind.param_count() {
            return Err(CircuitError::WrongParamCount {
                kind: kind.name(),
                expected: kind.param_count(),
                got: params.len(),
            });
        }
        let arity = kind.arity()?;
        if location.len() != arity {
            return Err(CircuitError::BadLocation(format!(
                "{} acts on {arity} qubits, location has {}",
                kind.name(),
                location.len()
            )));
        }
        let mut sorted = location.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != location.len() {
            return Err(CircuitError::BadLocation("repeated qubit index".into()));
        }
        Ok(LocatedGate { kind, location, params })
    }

    pub fn u3(qubit: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        LocatedGate::new(GateKind::U3, vec![qubit], vec![theta, phi, lambda]).unwrap()
    }

    pub fn rz(qubit: usize, theta: f64) -> Self {
        LocatedGate::new(GateKind::Rz, vec![qubit], vec![theta]).unwrap()
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self, CircuitError> {
        LocatedGate::new(GateKind::Cnot, vec![control, target], vec![])
    }

    pub fn arity(&self) -> usize {
        self.location.len()
    }

    /// The gate's matrix on its own qubits.
    ///
    /// U3(θ,φ,λ) = [[cos(θ/2), -e^{iλ} sin(θ/2)],
    ///              [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]];
    /// RZ(θ) = diag(1, e^{iθ}); CNOT flips the target when the control
    /// (the more significant local bit) is set.
    pub fn unitary(&self) -> ComplexMatrix {
        match &self.kind {
            GateKind::U3 => {
                let (t, p, l) = (self.params[0], self.params[1], self.params[2]);
                let (ct, st) = ((t / 2.0).cos(), (t / 2.0).sin());
                ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![
                        c(ct, 0.0),
                        -Complex64::from_polar(st, l),
                        Complex64::from_polar(st, p),
                        Complex64::from_polar(ct, p + l),
                    ],
                )
                .unwrap()
            }
            GateKind::Rz => {
                let t = self.params[0];
                ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, t)],
                )
                .unwrap()
            }
            GateKind::Cnot => ComplexMatrix::from_pairs(
                4,
                4,
                &[
                    (1.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (1.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (1.0, 0.0),
                    (0.0, 0.0),
                    (0.0, 0.0),
                    (1.0, 0.0),
                    (0.0, 0.0),
                ],
            )
            .unwrap(),
            GateKind::ConstantUnitary(m) | GateKind::VariableUnitary(m) => m.clone(),
        }
    }

    /// Element-wise analytic derivative of the gate matrix with respect to
    /// each of its parameters, in parameter order.
    pub fn gradients(&self) -> Result<Vec<ComplexMatrix>, CircuitError> {
        match &self.kind {
            GateKind::U3 => {
                let (t, p, l) = (self.params[0], self.params[1], self.params[2]);
                let (ct, st) = ((t / 2.0).cos(), (t / 2.0).sin());
                let eip = Complex64::from_polar(1.0, p);
                let eil = Complex64::from_polar(1.0, l);
                let eipl = Complex64::from_polar(1.0, p + l);
                let i = c(0.0, 1.0);
                let d_theta = ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![
                        c(-st / 2.0, 0.0),
                        -eil * (ct / 2.0),
                        eip * (ct / 2.0),
                        -eipl * (st / 2.0),
                    ],
                )
                .unwrap();
                let d_phi = ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![c(0.0, 0.0), c(0.0, 0.0), i * eip * st, i * eipl * ct],
                )
                .unwrap();
                let d_lambda = ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![c(0.0, 0.0), -i * eil * st, c(0.0, 0.0), i * eipl * ct],
                )
                .unwrap();
                Ok(vec![d_theta, d_phi, d_lambda])
            }
            GateKind::Rz => {
                let t = self.params[0];
                Ok(vec![ComplexMatrix::from_vec(
                    2,
                    2,
                    vec![
                        c(0.0, 0.0),
                        c(0.0, 0.0),
                        c(0.0, 0.0),
                        c(0.0, 1.0) * Complex64::from_polar(1.0, t),
                    ],
                )
                .unwrap()])
            }
            other => Err(CircuitError::NotParameterized(other.name())),
        }
    }
}

/// Ordered list of located gates over `num_qubits` qubits; the gate at
/// index 0 is applied first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<LocatedGate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits > 0, "circuit needs at least one qubit");
        Circuit { num_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: LocatedGate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.location.iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::BadLocation(format!(
                "qubit {q} out of range for a {}-qubit circuit",
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    /// Total number of real parameters across all gates.
    pub fn param_count(&self) -> usize {
        self.gates.iter().map(|g| g.kind.param_count()).sum()
    }

    /// Flattened parameter vector: gate order, then per-gate parameter order.
    pub fn params(&self) -> Vec<f64> {
        self.gates.iter().flat_map(|g| g.params.iter().copied()).collect()
    }

    /// Copy of the circuit with parameters replaced from a flat vector.
    pub fn with_params(&self, values: &[f64]) -> Result<Circuit, CircuitError> {
        if values.len() != self.param_count() {
            return Err(CircuitError::WrongParamCount {
                kind: "circuit",
                expected: self.param_count(),
                got: values.len(),
            });
        }
        let mut out = self.clone();
        let mut offset = 0;
        for g in &mut out.gates {
            let k = g.kind.param_count();
            g.params.copy_from_slice(&values[offset..offset + k]);
            offset += k;
        }
        Ok(out)
    }

    /// Dense unitary of the whole circuit: the expanded gate matrices
    /// multiplied with the last-applied gate leftmost.
    pub fn unitary(&self) -> Result<ComplexMatrix, CircuitError> {
        let mut u = ComplexMatrix::identity(self.dim());
        for g in &self.gates {
            apply_local_left(&mut u, &g.unitary(), &g.location, self.num_qubits, false)?;
        }
        Ok(u)
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            match g.kind {
                GateKind::U3 => counts.u3 += 1,
                GateKind::Rz => counts.rz += 1,
                GateKind::Cnot => counts.cnot += 1,
                _ => counts.other += 1,
            }
        }
        counts
    }

    /// True if any gate is a matrix-valued (constant or variable) gate.
    pub fn has_matrix_gates(&self) -> bool {
        self.gates.iter().any(|g| {
            matches!(
                g.kind,
                GateKind::ConstantUnitary(_) | GateKind::VariableUnitary(_)
            )
        })
    }
}

/// Per-kind gate totals used in reports.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub u3: u64,
    pub cnot: u64,
    pub rz: u64,
    pub other: u64,
}

impl GateCounts {
    pub fn total(&self) -> u64 {
        self.u3 + self.cnot + self.rz + self.other
    }
}

/// Embeds a gate-sized unitary into the full register: acts as `u` on
/// `location` and as identity elsewhere.
pub fn expand_to_n_qubits(
    u: &ComplexMatrix,
    location: &[usize],
    n: usize,
) -> Result<ComplexMatrix, CircuitError> {
    let dim_loc = 1usize << location.len();
    if u.rows() != dim_loc || u.cols() != dim_loc {
        return Err(CircuitError::BadGateMatrix(format!(
            "expected {dim_loc}x{dim_loc} matrix for {} qubits, got {}x{}",
            location.len(),
            u.rows(),
            u.cols()
        )));
    }
    let idx = LocalIndexer::new(location, n).map_err(|_| {
        CircuitError::BadLocation(format!("location {location:?} out of range for n={n}"))
    })?;
    let mut out = ComplexMatrix::zeros(1 << n, 1 << n);
    for (i, &ib) in idx.loc_bits.iter().enumerate() {
        for (j, &jb) in idx.loc_bits.iter().enumerate() {
            let v = u.get(i, j);
            if v != c(0.0, 0.0) {
                for &rest in &idx.rest_bits {
                    out.set(ib | rest, jb | rest, v);
                }
            }
        }
    }
    Ok(out)
}

/// U3 angles plus the leftover global phase of a 2x2 unitary:
/// `u = e^{i·global_phase} · U3(theta, phi, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U3Angles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub global_phase: f64,
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % std::f64::consts::TAU;
    if y <= -std::f64::consts::PI {
        y += std::f64::consts::TAU;
    } else if y > std::f64::consts::PI {
        y -= std::f64::consts::TAU;
    }
    y
}

/// Extracts U3 angles from a 2x2 unitary, with `theta` in [0, π] and
/// `phi`, `lambda` in (-π, π].
pub fn unitary_to_u3(u: &ComplexMatrix) -> Result<U3Angles, CircuitError> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(CircuitError::BadGateMatrix(format!(
            "expected 2x2 matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(CircuitError::Linalg(LinalgError::NotUnitary { max_err: err }));
    }
    let a = u.get(0, 0);
    let b = u.get(0, 1);
    let cc = u.get(1, 0);
    let d = u.get(1, 1);

    let cos_half = a.norm().min(1.0);
    let sin_half = cc.norm().min(1.0);
    let theta = 2.0 * sin_half.atan2(cos_half);

    let (global_phase, phi, lambda);
    if cos_half >= sin_half {
        // phase anchored on the (0,0) entry
        global_phase = a.arg();
        if sin_half > 1e-12 {
            phi = wrap_angle(cc.arg() - global_phase);
            lambda = wrap_angle((-b).arg() - global_phase);
        } else {
            // near-diagonal: only φ+λ is determined, put it all in λ
            phi = 0.0;
            lambda = wrap_angle(d.arg() - global_phase);
        }
    } else {
        // θ near π: anchor on the (1,0) entry and put the remainder in λ
        global_phase = cc.arg();
        phi = 0.0;
        lambda = wrap_angle((-b).arg() - global_phase);
    }
    Ok(U3Angles { theta, phi, lambda, global_phase })
}
