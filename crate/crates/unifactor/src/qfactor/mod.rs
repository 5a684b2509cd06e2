//! The tensor-sweep instantiation optimizer: two-sided sweeps with exact
//! local gate updates, termination machinery, and parallel multistarts.

mod update;

pub use update::optimize_gate;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Circuit, CircuitError, GateKind};
use crate::linalg::{haar_unitary, hs_inner, ComplexMatrix, LinalgError};
use crate::tensor::CircuitTensor;

#[derive(Debug, Clone, PartialEq)]
pub enum QfactorError {
    BadHyperParams(String),
    /// optimize_gate called on a gate kind the sweep should have skipped.
    NotOptimizable(&'static str),
    Linalg(LinalgError),
    Circuit(CircuitError),
}

impl fmt::Display for QfactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QfactorError::BadHyperParams(msg) => write!(f, "bad hyperparameters: {msg}"),
            QfactorError::NotOptimizable(kind) => {
                write!(f, "gate kind '{kind}' has no local update")
            }
            QfactorError::Linalg(e) => write!(f, "{e}"),
            QfactorError::Circuit(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for QfactorError {}

impl From<LinalgError> for QfactorError {
    fn from(e: LinalgError) -> Self {
        QfactorError::Linalg(e)
    }
}

impl From<CircuitError> for QfactorError {
    fn from(e: CircuitError) -> Self {
        QfactorError::Circuit(e)
    }
}

// ---------------------------------------------------------------------------
// Distance functions
// ---------------------------------------------------------------------------

fn overlap_trace(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64, QfactorError> {
    if !u.is_square() || !v.is_square() {
        return Err(LinalgError::NotSquare { rows: u.rows(), cols: u.cols() }.into());
    }
    // Tr(V† U)
    Ok(hs_inner(v, u)?)
}

/// `1 - |Tr(V† U)| / N`; zero iff U equals V up to a global phase.
pub fn distance_delta(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, QfactorError> {
    let t = overlap_trace(u, v)?;
    Ok(1.0 - t.norm() / u.rows() as f64)
}

/// `1 - Re Tr(V† U) / N`; phase sensitive, range [0, 2].
pub fn distance_delta_f(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, QfactorError> {
    let t = overlap_trace(u, v)?;
    Ok(1.0 - t.re / u.rows() as f64)
}

/// `sqrt(1 - |Tr(V† U)|² / N²)`.
pub fn distance_delta_p(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, QfactorError> {
    let t = overlap_trace(u, v)?;
    let x = t.norm() / u.rows() as f64;
    Ok((1.0 - x * x).max(0.0).sqrt())
}

/// Squared Frobenius distance between unitaries via the trace identity
/// `‖U - V‖² = 2^{n+1} (1 - Re Tr(V† U) / 2^n)`.
pub fn frob_cost(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64, QfactorError> {
    let t = overlap_trace(u, v)?;
    let nf = u.rows() as f64;
    Ok(2.0 * nf * (1.0 - t.re / nf))
}

// ---------------------------------------------------------------------------
// Hyperparameters and results
// ---------------------------------------------------------------------------

/// Knobs controlling termination, the update policy, and randomization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperParams {
    /// Stop as soon as the phase-invariant distance drops to this value.
    pub dist_tol: f64,
    /// Absolute slack of the short plateau test.
    pub diff_tol_a: f64,
    /// Relative slack of the short plateau test.
    pub diff_tol_r: f64,
    /// Window length of the long plateau test.
    pub long_diff_count: usize,
    /// Required fractional cost decrease over the window.
    pub long_diff_r: f64,
    /// Iterations to complete before any non-budget termination.
    pub min_iter: u64,
    /// Hard iteration cap.
    pub max_iter: u64,
    /// Rebuild the circuit tensor every this many iterations.
    pub reset_iter: u64,
    /// Number of independent random starts.
    pub multistarts: usize,
    /// Base seed for start initialization; drawn from entropy when absent.
    pub seed: Option<u64>,
    /// Retention of the old gate value in each update, in [0, 1].
    pub beta: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            dist_tol: 1e-10,
            diff_tol_a: 0.0,
            diff_tol_r: 1e-5,
            long_diff_count: 100,
            long_diff_r: 0.1,
            min_iter: 0,
            max_iter: 100_000,
            reset_iter: 40,
            multistarts: 8,
            seed: None,
            beta: 0.0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), QfactorError> {
        if !(self.dist_tol > 0.0) {
            return Err(QfactorError::BadHyperParams("dist_tol must be positive".into()));
        }
        if self.max_iter < self.min_iter {
            return Err(QfactorError::BadHyperParams("max_iter must be >= min_iter".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(QfactorError::BadHyperParams("beta must lie in [0, 1]".into()));
        }
        if self.reset_iter == 0 {
            return Err(QfactorError::BadHyperParams("reset_iter must be positive".into()));
        }
        if self.multistarts == 0 {
            return Err(QfactorError::BadHyperParams("multistarts must be positive".into()));
        }
        if self.long_diff_count == 0 {
            return Err(QfactorError::BadHyperParams("long_diff_count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    DistTol,
    PlateauShort,
    PlateauLong,
    MaxIter,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::DistTol => "DistTol",
            Termination::PlateauShort => "PlateauShort",
            Termination::PlateauLong => "PlateauLong",
            Termination::MaxIter => "MaxIter",
        })
    }
}

/// Outcome of one instantiation run.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantiationResult {
    /// The circuit with its optimized gate values.
    pub final_gates: Circuit,
    /// Phase-invariant distance of the final circuit to the target.
    pub distance_delta: f64,
    /// Frobenius distance `‖U - V‖` of the final circuit to the target.
    pub distance_frob: f64,
    pub iterations: u64,
    pub termination: Termination,
    /// Phase-invariant distance after each iteration.
    pub cost_trace: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

fn optimizable(kind: &GateKind) -> bool {
    matches!(kind, GateKind::U3 | GateKind::Rz | GateKind::VariableUnitary(_))
}

/// One optimizer iteration: a backward pass (last-applied gate first,
/// removed from the tensor's left end, reinserted on the right) followed by
/// a forward pass in the opposite direction. Every optimizable gate is
/// replaced by the exact maximizer of its local overlap, so with beta = 0
/// the real part of `Tr(V† U)` never decreases across the sweep.
pub fn two_sided_sweep(
    ct: &mut CircuitTensor,
    circuit: &mut Circuit,
    beta: f64,
) -> Result<(), QfactorError> {
    for k in (0..circuit.gates.len()).rev() {
        let u_old = circuit.gates[k].unitary();
        let location = circuit.gates[k].location.clone();
        ct.apply_left(&u_old, &location, true)?;
        let u_new = if optimizable(&circuit.gates[k].kind) {
            let env = ct.calc_env_mat(&location)?;
            let g_new = optimize_gate(&circuit.gates[k], &env, beta)?;
            let u = g_new.unitary();
            circuit.gates[k] = g_new;
            u
        } else {
            u_old
        };
        ct.apply_right(&u_new, &location, false)?;
    }
    for k in 0..circuit.gates.len() {
        let u_old = circuit.gates[k].unitary();
        let location = circuit.gates[k].location.clone();
        ct.apply_right(&u_old, &location, true)?;
        let u_new = if optimizable(&circuit.gates[k].kind) {
            let env = ct.calc_env_mat(&location)?;
            let g_new = optimize_gate(&circuit.gates[k], &env, beta)?;
            let u = g_new.unitary();
            circuit.gates[k] = g_new;
            u
        } else {
            u_old
        };
        ct.apply_left(&u_new, &location, false)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Instantiation loop
// ---------------------------------------------------------------------------

/// Cooperative stop conditions checked between iterations.
pub(crate) struct RunControl<'a> {
    pub winner: Option<(&'a AtomicUsize, usize)>,
    pub deadline: Option<Instant>,
}

impl RunControl<'_> {
    fn cancelled(&self) -> bool {
        match self.winner {
            Some((winner, index)) => winner.load(Ordering::Relaxed) < index,
            None => false,
        }
    }

    fn deadline_passed(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

pub(crate) enum RunError {
    /// A sibling start already succeeded; this run's result is discarded.
    Aborted,
    Fail(QfactorError),
}

impl From<QfactorError> for RunError {
    fn from(e: QfactorError) -> Self {
        RunError::Fail(e)
    }
}

impl From<LinalgError> for RunError {
    fn from(e: LinalgError) -> Self {
        RunError::Fail(e.into())
    }
}

pub(crate) fn run_instantiate(
    circuit: &Circuit,
    target: &ComplexMatrix,
    hyper: &HyperParams,
    control: Option<&RunControl<'_>>,
) -> Result<InstantiationResult, RunError> {
    hyper.validate()?;
    let n = target.qubit_count().map_err(QfactorError::from)?;
    if circuit.num_qubits != n {
        return Err(QfactorError::Linalg(LinalgError::DimensionMismatch {
            op: "instantiate",
            lhs: (target.rows(), target.cols()),
            rhs: (circuit.dim(), circuit.dim()),
        })
        .into());
    }
    let nf = (1u64 << n) as f64;

    let mut work = circuit.clone();
    let mut ct = CircuitTensor::init(target, &work)?;
    let mut cost_trace: Vec<f64> = Vec::new();
    let mut termination = None;
    let mut iterations = 0;

    for it in 1..=hyper.max_iter {
        iterations = it;
        two_sided_sweep(&mut ct, &mut work, hyper.beta)?;
        let delta = 1.0 - ct.trace_all().norm() / nf;
        cost_trace.push(delta);

        if it >= hyper.min_iter {
            if delta <= hyper.dist_tol {
                termination = Some(Termination::DistTol);
                break;
            }
            let i = cost_trace.len();
            if i >= 2 {
                let prev = cost_trace[i - 2];
                if (delta - prev).abs() <= hyper.diff_tol_a + hyper.diff_tol_r * delta.abs() {
                    termination = Some(Termination::PlateauShort);
                    break;
                }
            }
            if i > hyper.long_diff_count {
                let old = cost_trace[i - 1 - hyper.long_diff_count];
                if old - delta < hyper.long_diff_r * old {
                    termination = Some(Termination::PlateauLong);
                    break;
                }
            }
        }

        if let Some(ctl) = control {
            if ctl.cancelled() {
                return Err(RunError::Aborted);
            }
            if ctl.deadline_passed() {
                termination = Some(Termination::MaxIter);
                break;
            }
        }
        if it % hyper.reset_iter == 0 {
            ct.reset(target, &work)?;
        }
    }

    // Distances recomputed from the final gate values so they stay
    // consistent with `final_gates` independent of tensor drift.
    let t = CircuitTensor::init(target, &work)?.trace_all();
    Ok(InstantiationResult {
        final_gates: work,
        distance_delta: 1.0 - t.norm() / nf,
        distance_frob: (2.0 * nf - 2.0 * t.re).max(0.0).sqrt(),
        iterations,
        termination: termination.unwrap_or(Termination::MaxIter),
        cost_trace,
    })
}

/// Runs the sweep loop from the circuit's current gate values until one of
/// the termination conditions fires.
pub fn qfactor_instantiate(
    circuit: &Circuit,
    target: &ComplexMatrix,
    hyper: &HyperParams,
) -> Result<InstantiationResult, QfactorError> {
    match run_instantiate(circuit, target, hyper, None) {
        Ok(res) => Ok(res),
        Err(RunError::Fail(e)) => Err(e),
        Err(RunError::Aborted) => unreachable!("no control attached"),
    }
}

/// Fresh random gate values for every optimizable gate, deterministic per
/// seed: Haar unitaries for matrix-valued gates, uniform (-π, π) angles for
/// U3 and RZ.
pub fn random_init(circuit: &Circuit, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = circuit.clone();
    for g in &mut out.gates {
        match &mut g.kind {
            GateKind::VariableUnitary(m) => {
                let dim = m.rows();
                *m = haar_unitary(dim, &mut rng);
            }
            GateKind::U3 | GateKind::Rz => {
                for p in &mut g.params {
                    *p = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                }
            }
            GateKind::Cnot | GateKind::ConstantUnitary(_) => {}
        }
    }
    out
}

/// Execution options for multistart runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExecOpts {
    /// Cooperative wall-clock cutoff checked between iterations.
    pub deadline: Option<Instant>,
    /// Run starts sequentially even in a parallel build.
    pub force_serial: bool,
}

/// Runs `hyper.multistarts` independent instantiations from seeded random
/// initializations (child seeds `s, s+1, …`) and returns the best result.
///
/// A start that reaches `DistTol` cancels all higher-indexed starts;
/// lower-indexed starts always run to completion, so the chosen result is
/// the lowest-indexed success regardless of scheduling, and repeated runs
/// with the same seed are bitwise identical. Plateau-only termination
/// requires every start to have plateaued.
pub fn multistart_instantiate(
    circuit: &Circuit,
    target: &ComplexMatrix,
    hyper: &HyperParams,
) -> Result<InstantiationResult, QfactorError> {
    multistart_instantiate_with(circuit, target, hyper, ExecOpts::default())
}

pub fn multistart_instantiate_with(
    circuit: &Circuit,
    target: &ComplexMatrix,
    hyper: &HyperParams,
    opts: ExecOpts,
) -> Result<InstantiationResult, QfactorError> {
    hyper.validate()?;
    let seed0 = hyper.seed.unwrap_or_else(rand::random);
    let winner = AtomicUsize::new(usize::MAX);
    let outcomes = crate::exec::run_indexed(hyper.multistarts, !opts.force_serial, |i| {
        let init = random_init(circuit, seed0.wrapping_add(i as u64));
        let control = RunControl {
            winner: Some((&winner, i)),
            deadline: opts.deadline,
        };
        match run_instantiate(&init, target, hyper, Some(&control)) {
            Ok(res) => {
                if res.termination == Termination::DistTol {
                    winner.fetch_min(i, Ordering::Relaxed);
                }
                Ok(Some(res))
            }
            Err(RunError::Aborted) => Ok(None),
            Err(RunError::Fail(e)) => Err(e),
        }
    });
    let mut results: Vec<Option<InstantiationResult>> = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        results.push(o?);
    }
    let w = winner.load(Ordering::Relaxed);
    if w != usize::MAX {
        return Ok(results[w].take().expect("winning start always completes"));
    }
    let best = results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.distance_delta.partial_cmp(&b.distance_delta).unwrap())
        .expect("at least one start");
    Ok(best)
}
