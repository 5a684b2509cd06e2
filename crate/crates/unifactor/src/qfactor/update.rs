//! Exact local gate updates: each replaces one gate by a maximizer of
//! `Re Tr(env · u)` over the gate's reachable set, with optional retention
//! of the old value through the beta blend
//! `env_eff = (1 - beta) · env + beta · u_old†`.

use num_complex::Complex64;

use super::QfactorError;
use crate::circuit::{GateKind, LocatedGate};
use crate::linalg::{polar_unitary_of_adjoint, ComplexMatrix};

/// Returns the gate with its value replaced by the exact maximizer of the
/// local overlap against `env`. CNOT and constant gates have no update and
/// are rejected; the sweep skips them instead of calling this.
pub fn optimize_gate(
    gate: &LocatedGate,
    env: &ComplexMatrix,
    beta: f64,
) -> Result<LocatedGate, QfactorError> {
    let dim = 1usize << gate.arity();
    if env.rows() != dim || env.cols() != dim {
        return Err(QfactorError::Linalg(
            crate::linalg::LinalgError::DimensionMismatch {
                op: "optimize_gate",
                lhs: (env.rows(), env.cols()),
                rhs: (dim, dim),
            },
        ));
    }
    if beta >= 1.0 {
        // full retention of the old value
        return Ok(gate.clone());
    }
    let env_eff = if beta > 0.0 {
        env.scale(Complex64::new(1.0 - beta, 0.0))
            .add(&gate.unitary().dagger().scale(Complex64::new(beta, 0.0)))
            .map_err(QfactorError::Linalg)?
    } else {
        env.clone()
    };

    let mut out = gate.clone();
    match &gate.kind {
        GateKind::VariableUnitary(_) => {
            let u_new = polar_unitary_of_adjoint(&env_eff)?;
            out.kind = GateKind::VariableUnitary(u_new);
        }
        GateKind::U3 => {
            let (theta, phi, lambda) = best_u3_angles(&env_eff);
            out.params = vec![theta, phi, lambda];
        }
        GateKind::Rz => {
            // Re Tr(env · RZ(θ)) = Re env00 + Re(env11) cos θ - Im(env11) sin θ
            let d = env_eff.get(1, 1);
            out.params = vec![(-d.im).atan2(d.re)];
        }
        GateKind::Cnot => return Err(QfactorError::NotOptimizable("cx")),
        GateKind::ConstantUnitary(_) => return Err(QfactorError::NotOptimizable("constant")),
    }
    Ok(out)
}

/// Exact maximizer of `Re Tr(env · U3(θ, φ, λ))` over all angles.
///
/// A U3 matrix is any 2x2 unitary whose (0,0) entry is real:
/// `[[r, b], [-conj(b) e^{iχ}, r e^{iχ}]]` with real `r`, `|b|² = 1 - r²`,
/// and free χ. For fixed χ the optimum over `r` and the phase of `b` is
/// closed-form, leaving the one-dimensional concentration
///
///   G(χ) = (Re a + Re(d e^{iχ}))² + |b|² + |c|² − 2 Re(b c e^{iχ})
///
/// over the matrix entries a, b, c, d of env; the best χ is found on a
/// grid and polished by golden-section. The attained objective value is
/// `sqrt(G(χ*))`, the unrestricted-unitary optimum adjusted for the
/// phase constraint on the (0,0) entry.
fn best_u3_angles(env: &ComplexMatrix) -> (f64, f64, f64) {
    let a = env.get(0, 0);
    let b = env.get(0, 1);
    let c = env.get(1, 0);
    let d = env.get(1, 1);
    let bc = b * c;
    let b2c2 = b.norm_sqr() + c.norm_sqr();

    let g = |chi: f64| -> f64 {
        let e = Complex64::from_polar(1.0, chi);
        let axis = a.re + (d * e).re;
        axis * axis + b2c2 - 2.0 * (bc * e).re
    };

    const GRID: usize = 64;
    let step = std::f64::consts::TAU / GRID as f64;
    let mut best_chi = 0.0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..GRID {
        let chi = -std::f64::consts::PI + i as f64 * step;
        let v = g(chi);
        if v > best_val {
            best_val = v;
            best_chi = chi;
        }
    }
    let chi = golden_max(&g, best_chi - step, best_chi + step);

    let e = Complex64::from_polar(1.0, chi);
    let axis = a.re + (d * e).re;
    let m = c - b.conj() * e.conj();
    let radius = axis.hypot(m.norm());
    if radius < 1e-300 {
        // objective is flat; return the identity gate
        return (0.0, 0.0, 0.0);
    }
    let r = axis / radius;
    let s = m.norm() / radius;
    let theta = 2.0 * s.atan2(r);
    if s > 1e-16 {
        let b_u = m.conj() * (s / m.norm());
        let lambda = crate::circuit::wrap_angle((-b_u).arg());
        let phi = crate::circuit::wrap_angle(chi - lambda);
        (theta, phi, lambda)
    } else {
        (theta, chi, 0.0)
    }
}

/// Golden-section maximization of a smooth function on [lo, hi].
fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}
