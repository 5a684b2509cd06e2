use num_complex::Complex64;
use rand::Rng;

use super::LinalgError;

/// Dense square-or-rectangular matrix of complex doubles, row-major.
///
/// The storage layout is interleaved `(re, im)` pairs in row-major order,
/// which is also the canonical layout for file I/O and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                op: "from_vec",
                lhs: (rows, cols),
                rhs: (data.len(), 1),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Convenience constructor from row-major `(re, im)` pairs.
    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(f64, f64)]) -> Result<Self, LinalgError> {
        Self::from_vec(
            rows,
            cols,
            pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Standard complex matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                lhs: (self.rows, self.cols),
                rhs: (other.rows, other.cols),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                let row_o = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in row_o.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * out.cols + (j * other.cols + l)] =
                            a * other.data[k * other.cols + l];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "add",
                lhs: (self.rows, self.cols),
                rhs: (other.rows, other.cols),
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Max-norm of `M†M - I`; zero for a perfect unitary.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                // (M†M)[i][j] = Σ_k conj(M[k][i]) M[k][j]
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                if i == j {
                    s -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Number of qubits if the matrix is a 2^n x 2^n square, else an error.
    pub fn qubit_count(&self) -> Result<usize, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.rows.is_power_of_two() {
            return Err(LinalgError::NotPowerOfTwo { dim: self.rows });
        }
        Ok(self.rows.trailing_zeros() as usize)
    }
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(LinalgError::DimensionMismatch {
            op: "hs_inner",
            lhs: (a.rows, a.cols),
            rhs: (b.rows, b.cols),
        });
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| x.conj() * y)
        .sum())
}

/// Haar-distributed random unitary: modified Gram-Schmidt on a complex
/// Gaussian matrix. The positive-diagonal R of MGS makes the result Haar.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    use rand_distr_normal::sample_standard_normal;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(sample_standard_normal(rng), sample_standard_normal(rng)))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for i in 0..j {
            let proj: Complex64 = cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(&a, &b)| a.conj() * b)
                .sum();
            for k in 0..dim {
                let c = cols[i][k];
                cols[j][k] -= proj * c;
            }
        }
        let norm: f64 = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

// Box-Muller standard normal; keeps the RNG stream identical across rand
// versions so seeded outputs stay reproducible.
mod rand_distr_normal {
    use rand::Rng;

    pub fn sample_standard_normal(rng: &mut impl Rng) -> f64 {
        loop {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u.ln()).sqrt();
            let x = r * v.cos();
            if x.is_finite() {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn matmul_identity_and_involution() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.matmul(&i2).unwrap(), i2);
        let x = ComplexMatrix::from_pairs(2, 2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
            .unwrap();
        assert!(x.matmul(&x).unwrap().max_abs_diff(&i2) < 1e-15);
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(4, 4, &mut rng);
        let b = random_matrix(4, 4, &mut rng);
        let prod = a.matmul(&b).unwrap();
        // naive triple loop, written independently of matmul's loop order
        for i in 0..4 {
            for j in 0..4 {
                let mut s = c(0.0, 0.0);
                for k in 0..4 {
                    s += a.get(i, k) * b.get(k, j);
                }
                assert!((prod.get(i, j) - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            a.matmul(&b),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dagger_diagonal_and_hermitian() {
        let d = ComplexMatrix::from_pairs(2, 2, &[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])
            .unwrap();
        let dd = d.dagger();
        assert_eq!(dd.get(0, 0), c(0.0, -1.0));
        assert_eq!(dd.get(1, 1), c(1.0, 0.0));
        // Hermitian fixed point
        let h = ComplexMatrix::from_pairs(2, 2, &[(2.0, 0.0), (1.0, -3.0), (1.0, 3.0), (-1.0, 0.0)])
            .unwrap();
        assert!(h.dagger().max_abs_diff(&h) == 0.0);
    }

    #[test]
    fn dagger_matches_index_swap_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(3, 5, &mut rng);
        let ad = a.dagger();
        assert_eq!(ad.rows(), 5);
        assert_eq!(ad.cols(), 3);
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(ad.get(j, i), a.get(i, j).conj());
            }
        }
        assert_eq!(ad.dagger(), a);
    }

    #[test]
    fn hs_inner_identity_trace_and_orthogonal_paulis() {
        for n in [2usize, 4, 8] {
            let i = ComplexMatrix::identity(n);
            let v = hs_inner(&i, &i).unwrap();
            assert!((v - c(n as f64, 0.0)).norm() < 1e-12);
        }
        let x = ComplexMatrix::from_pairs(2, 2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
            .unwrap();
        let z = ComplexMatrix::from_pairs(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
            .unwrap();
        assert!(hs_inner(&x, &z).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hs_inner_matches_element_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(4, 4, &mut rng);
        let b = random_matrix(4, 4, &mut rng);
        let v = hs_inner(&a, &b).unwrap();
        let mut s = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                s += a.get(i, j).conj() * b.get(i, j);
            }
        }
        assert!((v - s).norm() < 1e-13);
        // hs_inner(a, a) is real and equals the squared Frobenius norm
        let aa = hs_inner(&a, &a).unwrap();
        assert!(aa.im.abs() < 1e-13);
        assert!((aa.re - a.frobenius_norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn hs_inner_phase_equality_bound() {
        // |Tr(A†B)| <= N with equality iff B = e^{iφ}A, for unitary A, B
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2usize, 4, 8] {
            let a = haar_unitary(n, &mut rng);
            let phi = rng.gen_range(-3.0..3.0);
            let b = a.scale(Complex64::from_polar(1.0, phi));
            let t = hs_inner(&a, &b).unwrap();
            assert!((t.norm() - n as f64).abs() < 1e-10);
            let b2 = haar_unitary(n, &mut rng);
            assert!(hs_inner(&a, &b2).unwrap().norm() <= n as f64 + 1e-10);
        }
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn haar_unitaries_pass_unitarity_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2usize, 4, 8, 16] {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.unitarity_error() < 1e-12, "dim {dim}");
        }
    }
}
