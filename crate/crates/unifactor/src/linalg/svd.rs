//! One-sided Jacobi SVD for dense complex square matrices.
//!
//! Orthogonalizes the working columns by unitary plane rotations accumulated
//! into `V`; on convergence the column norms are the singular values and the
//! normalized columns form `U`, giving `M = U diag(S) V†` with `S` sorted
//! descending. Matrices here are small (gate environments, at most 2^4 per
//! side in practice), so the cubic per-sweep cost is irrelevant next to the
//! accuracy of the rotations.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 64;
const ORTHO_TOL: f64 = 1e-14;

/// Factorization `m = u · diag(singular_values) · v†`.
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Singular value decomposition of a square complex matrix.
///
/// Singular values come back non-negative and sorted descending; `u` and `v`
/// are unitary, with null-space columns of a rank-deficient input completed
/// deterministically from the standard basis.
pub fn complex_svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();

    // Columns of the working copy; rotations act on column pairs.
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| m.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    app += a[p][i].norm_sqr();
                    aqq += a[q][i].norm_sqr();
                    apq += a[p][i].conj() * a[q][i];
                }
                let off = apq.norm();
                if off <= ORTHO_TOL * (app * aqq).sqrt() || off == 0.0 {
                    continue;
                }
                // Unitary rotation zeroing the (p, q) entry of the column
                // Gram matrix [[app, apq], [conj(apq), aqq]].
                let phase = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for i in 0..n {
                    let ap = a[p][i];
                    let aq = a[q][i];
                    a[p][i] = cs * ap - sn * phase.conj() * aq;
                    a[q][i] = sn * phase * ap + cs * aq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = cs * vp - sn * phase.conj() * vq;
                    v[q][i] = sn * phase * vp + cs * vq;
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut singular_values = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &j in &order {
        singular_values.push(norms[j]);
        v_cols.push(v[j].clone());
        if norms[j] > 1e-300 {
            u_cols.push(a[j].iter().map(|&x| x / norms[j]).collect());
        } else {
            u_cols.push(vec![Complex64::new(0.0, 0.0); n]); // filled below
        }
    }
    complete_null_columns(&mut u_cols, &singular_values);

    Ok(Svd {
        u: ComplexMatrix::from_fn(n, n, |i, j| u_cols[j][i]),
        singular_values,
        v: ComplexMatrix::from_fn(n, n, |i, j| v_cols[j][i]),
    })
}

/// Replaces zero columns of `u` with a deterministic orthonormal completion
/// drawn from the standard basis.
fn complete_null_columns(u_cols: &mut [Vec<Complex64>], sv: &[f64]) {
    let n = u_cols.len();
    for j in 0..n {
        if sv[j] > 1e-300 {
            continue;
        }
        let mut filled = false;
        for basis in 0..n {
            let mut cand = vec![Complex64::new(0.0, 0.0); n];
            cand[basis] = Complex64::new(1.0, 0.0);
            for (k, col) in u_cols.iter().enumerate() {
                if k == j || (sv[k] <= 1e-300 && k > j) {
                    continue; // only project against already-fixed columns
                }
                let proj: Complex64 = col.iter().zip(&cand).map(|(&a, &b)| a.conj() * b).sum();
                for i in 0..n {
                    let c = col[i];
                    cand[i] -= proj * c;
                }
            }
            let norm: f64 = cand.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                for x in &mut cand {
                    *x /= norm;
                }
                u_cols[j] = cand;
                filled = true;
                break;
            }
        }
        debug_assert!(filled, "null-space completion must always succeed");
    }
}

/// The unitary maximizing `Re Tr(env · u)`: with `env = X D Y†` it is
/// `Y X†`, attaining the value `Σ_j D_j`.
pub fn polar_unitary_of_adjoint(env: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let svd = complex_svd(env)?;
    svd.v.matmul(&svd.u.dagger())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, hs_inner};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(svd: &Svd) -> ComplexMatrix {
        let n = svd.singular_values.len();
        let d = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(svd.singular_values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        svd.u.matmul(&d).unwrap().matmul(&svd.v.dagger()).unwrap()
    }

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_svd() {
        let i2 = ComplexMatrix::identity(2);
        let svd = complex_svd(&i2).unwrap();
        assert!((svd.singular_values[0] - 1.0).abs() < 1e-14);
        assert!((svd.singular_values[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&svd).max_abs_diff(&i2) < 1e-12);
    }

    #[test]
    fn rank_deficient_diagonal() {
        let m = ComplexMatrix::from_pairs(2, 2, &[(3.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)])
            .unwrap();
        let svd = complex_svd(&m).unwrap();
        assert!((svd.singular_values[0] - 3.0).abs() < 1e-13);
        assert!(svd.singular_values[1].abs() < 1e-13);
        assert!(reconstruct(&svd).max_abs_diff(&m) < 1e-12);
        assert!(svd.u.is_unitary(1e-9));
        assert!(svd.v.is_unitary(1e-9));
    }

    #[test]
    fn random_eight_by_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(8, &mut rng);
        let svd = complex_svd(&m).unwrap();
        assert!(reconstruct(&svd).max_abs_diff(&m) < 1e-11);
        assert!(svd.u.is_unitary(1e-9));
        assert!(svd.v.is_unitary(1e-9));
        for w in svd.singular_values.windows(2) {
            assert!(w[0] >= w[1]);
            assert!(w[1] >= 0.0);
        }
    }

    #[test]
    fn polar_identity_and_unitary_env() {
        let i2 = ComplexMatrix::identity(2);
        assert!(polar_unitary_of_adjoint(&i2).unwrap().max_abs_diff(&i2) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = haar_unitary(4, &mut rng);
        let u = polar_unitary_of_adjoint(&w).unwrap();
        assert!(u.max_abs_diff(&w.dagger()) < 1e-11);
    }

    #[test]
    fn polar_beats_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let env = random_matrix(4, &mut rng);
        let u_new = polar_unitary_of_adjoint(&env).unwrap();
        let best = env.matmul(&u_new).unwrap().trace().re;
        let sum_sv: f64 = complex_svd(&env).unwrap().singular_values.iter().sum();
        assert!((best - sum_sv).abs() < 1e-10);
        for _ in 0..1000 {
            let u = haar_unitary(4, &mut rng);
            let val = env.matmul(&u).unwrap().trace().re;
            assert!(best >= val - 1e-10);
        }
    }

    #[test]
    fn polar_attains_singular_value_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2usize, 4, 8] {
            for _ in 0..20 {
                let m = random_matrix(n, &mut rng);
                let u = polar_unitary_of_adjoint(&m).unwrap();
                assert!(u.is_unitary(1e-9));
                let val = m.matmul(&u).unwrap().trace().re;
                let sum_sv: f64 = complex_svd(&m).unwrap().singular_values.iter().sum();
                assert!((val - sum_sv).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(complex_svd(&m), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix_gets_completed_basis() {
        let z = ComplexMatrix::zeros(3, 3);
        let svd = complex_svd(&z).unwrap();
        assert!(svd.u.is_unitary(1e-12));
        assert!(svd.v.is_unitary(1e-12));
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(140))]
        #[test]
        fn svd_reconstruction_and_unitarity(seed in 0u64..5000, dim_pick in 0usize..4) {
            let dim = [2usize, 4, 8, 16][dim_pick];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(dim, &mut rng);
            let svd = complex_svd(&m).unwrap();
            prop_assert!(reconstruct(&svd).max_abs_diff(&m) <= 1e-9);
            prop_assert!(svd.u.unitarity_error() <= 1e-9);
            prop_assert!(svd.v.unitarity_error() <= 1e-9);
            // hs_inner sanity on the factors: Tr(U†U) = dim
            let t = hs_inner(&svd.u, &svd.u).unwrap();
            prop_assert!((t.re - dim as f64).abs() < 1e-9);
        }
    }
}
