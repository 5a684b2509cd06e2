//! Local gate contraction on full-register matrices without materializing
//! the 2^n expansion of a gate.
//!
//! Bit convention, fixed globally: qubit 0 is the most significant bit of a
//! basis-state index, and `location[0]` is the most significant bit of a
//! gate-local index.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Precomputed index scatter tables for one gate location on `n` qubits.
pub struct LocalIndexer {
    /// 2^m entries: local index -> its bits placed at the location qubits.
    pub loc_bits: Vec<usize>,
    /// 2^(n-m) entries: rest index -> its bits placed at the other qubits.
    pub rest_bits: Vec<usize>,
}

impl LocalIndexer {
    pub fn new(location: &[usize], n: usize) -> Result<Self, LinalgError> {
        let m = location.len();
        assert!(m <= n);
        let mut seen = vec![false; n];
        for &q in location {
            if q >= n || seen[q] {
                return Err(LinalgError::DimensionMismatch {
                    op: "local index",
                    lhs: (q, 0),
                    rhs: (n, 0),
                });
            }
            seen[q] = true;
        }
        let rest_qubits: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();

        let mut loc_bits = vec![0usize; 1 << m];
        for (i, slot) in loc_bits.iter_mut().enumerate() {
            let mut bits = 0usize;
            for (t, &q) in location.iter().enumerate() {
                if (i >> (m - 1 - t)) & 1 == 1 {
                    bits |= 1 << (n - 1 - q);
                }
            }
            *slot = bits;
        }
        let r = n - m;
        let mut rest_bits = vec![0usize; 1 << r];
        for (i, slot) in rest_bits.iter_mut().enumerate() {
            let mut bits = 0usize;
            for (s, &q) in rest_qubits.iter().enumerate() {
                if (i >> (r - 1 - s)) & 1 == 1 {
                    bits |= 1 << (n - 1 - q);
                }
            }
            *slot = bits;
        }
        Ok(LocalIndexer { loc_bits, rest_bits })
    }
}

fn gate_entry(u: &ComplexMatrix, i: usize, j: usize, adjoint: bool) -> Complex64 {
    if adjoint {
        u.get(j, i).conj()
    } else {
        u.get(i, j)
    }
}

/// In-place `m <- E(u) · m` where `E(u)` is the gate (or its adjoint)
/// embedded at `location`; touches each entry of `m` once.
pub fn apply_local_left(
    m: &mut ComplexMatrix,
    u: &ComplexMatrix,
    location: &[usize],
    n: usize,
    adjoint: bool,
) -> Result<(), LinalgError> {
    check_gate_shape(m, u, location, n)?;
    let idx = LocalIndexer::new(location, n)?;
    let dim_loc = idx.loc_bits.len();
    let full = m.cols();
    let mut old = vec![Complex64::new(0.0, 0.0); dim_loc];
    for col in 0..full {
        for &rest in &idx.rest_bits {
            for (x, &lb) in idx.loc_bits.iter().enumerate() {
                old[x] = m.get(lb | rest, col);
            }
            for (i, &lb) in idx.loc_bits.iter().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for (x, &v) in old.iter().enumerate() {
                    s += gate_entry(u, i, x, adjoint) * v;
                }
                m.set(lb | rest, col, s);
            }
        }
    }
    Ok(())
}

/// In-place `m <- m · E(u)`.
pub fn apply_local_right(
    m: &mut ComplexMatrix,
    u: &ComplexMatrix,
    location: &[usize],
    n: usize,
    adjoint: bool,
) -> Result<(), LinalgError> {
    check_gate_shape(m, u, location, n)?;
    let idx = LocalIndexer::new(location, n)?;
    let dim_loc = idx.loc_bits.len();
    let full = m.rows();
    let mut old = vec![Complex64::new(0.0, 0.0); dim_loc];
    for row in 0..full {
        for &rest in &idx.rest_bits {
            for (x, &lb) in idx.loc_bits.iter().enumerate() {
                old[x] = m.get(row, lb | rest);
            }
            for (j, &lb) in idx.loc_bits.iter().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for (x, &v) in old.iter().enumerate() {
                    s += v * gate_entry(u, x, j, adjoint);
                }
                m.set(row, lb | rest, s);
            }
        }
    }
    Ok(())
}

/// Partial trace of `m` over every qubit outside `location`, pairing the
/// row and column bits of each traced qubit.
///
/// The result `E` satisfies `Tr(E · u) == Tr(m · E(u))` for every gate-sized
/// `u` placed at `location`.
pub fn partial_trace_env(
    m: &ComplexMatrix,
    location: &[usize],
    n: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if m.rows() != (1 << n) || m.cols() != (1 << n) {
        return Err(LinalgError::DimensionMismatch {
            op: "partial_trace_env",
            lhs: (m.rows(), m.cols()),
            rhs: (1 << n, 1 << n),
        });
    }
    let idx = LocalIndexer::new(location, n)?;
    let dim_loc = idx.loc_bits.len();
    let mut env = ComplexMatrix::zeros(dim_loc, dim_loc);
    for (i, &ib) in idx.loc_bits.iter().enumerate() {
        for (j, &jb) in idx.loc_bits.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for &rest in &idx.rest_bits {
                s += m.get(ib | rest, jb | rest);
            }
            env.set(i, j, s);
        }
    }
    Ok(env)
}

fn check_gate_shape(
    m: &ComplexMatrix,
    u: &ComplexMatrix,
    location: &[usize],
    n: usize,
) -> Result<(), LinalgError> {
    let dim_loc = 1usize << location.len();
    if u.rows() != dim_loc || u.cols() != dim_loc {
        return Err(LinalgError::DimensionMismatch {
            op: "local gate",
            lhs: (u.rows(), u.cols()),
            rhs: (dim_loc, dim_loc),
        });
    }
    if m.rows() != (1 << n) || m.cols() != (1 << n) {
        return Err(LinalgError::DimensionMismatch {
            op: "local gate target",
            lhs: (m.rows(), m.cols()),
            rhs: (1 << n, 1 << n),
        });
    }
    Ok(())
}
