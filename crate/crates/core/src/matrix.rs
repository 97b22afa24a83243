//! Dense square complex matrices: the carrier type for operators in `M_{2^n}`.
//!
//! Wraps a column-major `nalgebra::DMatrix<Complex64>` and adds the pieces the
//! rest of the crate needs: Kronecker products, Hermitian eigendecomposition
//! (with a fast path for exactly-real matrices), and the JSON wire format
//! `{"dim": d, "re": [[...]], "im": [[...]]}` (row-major).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::dimension_mismatch(format!(
                "expected square matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::invalid_argument("matrix dimension must be >= 1"));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid_argument("matrix entries must be finite"));
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    /// Row-major construction from (re, im) pairs.
    pub fn from_rows(dim: usize, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::dimension_mismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let data = DMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            Complex::new(re, im)
        });
        Self::from_dmatrix(data)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self {
            data: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Column-major flattening, `vec(X)[i + j*d] = X[i, j]`.
    pub fn to_col_vec(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.data.as_slice())
    }

    pub fn from_col_vec(dim: usize, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::dimension_mismatch(format!(
                "vector of length {} does not reshape to {dim}x{dim}",
                v.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_column_slice(dim, dim, v.as_slice()))
    }

    /// Plain transpose in the computational basis (no conjugation).
    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.map(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add");
        Self {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in sub");
        Self {
            data: &self.data - &other.data,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in mul");
        Self {
            data: &self.data * &other.data,
        }
    }

    /// Kronecker product: `(a⊗b)[(i*db + k), (j*db + l)] = a[i,j] * b[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(A + A*)/2`; used to scrub rounding noise inside projection loops.
    pub fn hermitize(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()).map(|z| z * 0.5),
        }
    }

    /// `Re Tr(A B)`; the trace pairing used by cone duality arguments.
    pub fn re_trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in trace pairing");
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                let z = self.data[(i, k)] * other.data[(k, i)];
                acc += z.re;
            }
        }
        acc
    }

    fn is_exactly_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// Returns eigenvalues in ascending order and the matching eigenvectors as
    /// columns. The input is assumed Hermitian (callers validate); matrices
    /// with exactly-zero imaginary part are routed through the real symmetric
    /// solver, which is what all the large transfer/Choi matrices in this
    /// crate hit.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.dim();
        if self.is_exactly_real() {
            let real = DMatrix::from_fn(n, n, |i, j| self.data[(i, j)].re);
            let eig = nalgebra::SymmetricEigen::try_new(real, f64::EPSILON, 0)
                .ok_or(Error::EigenFailure { dim: n })?;
            let (values, perm) = sorted_order(eig.eigenvalues.as_slice());
            let vectors = DMatrix::from_fn(n, n, |i, j| {
                Complex::new(eig.eigenvectors[(i, perm[j])], 0.0)
            });
            return Ok((values, ComplexMatrix { data: vectors }));
        }
        let eig = nalgebra::SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigenFailure { dim: n })?;
        let (values, perm) = sorted_order(eig.eigenvalues.as_slice());
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, perm[j])]);
        Ok((values, ComplexMatrix { data: vectors }))
    }

    /// Eigenvalues only, ascending.
    pub fn eigh_values(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// Projection onto the PSD cone: clip negative eigenvalues to zero.
    pub fn psd_clip(&self) -> Result<Self> {
        let (values, vectors) = self.hermitize().eigh()?;
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in values.iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            let col = vectors.data.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj() * lambda;
                }
            }
        }
        let clipped = ComplexMatrix { data: out };
        Ok(clipped.hermitize())
    }
}

fn sorted_order(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    let sorted = idx.iter().map(|&k| values[k]).collect();
    (sorted, idx)
}

/// Rank-one projector `|v><v|` for a (not necessarily normalized) vector.
pub fn outer_product(v: &DVector<Complex64>) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| self.data[(i, j)].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| self.data[(i, j)].im).collect())
            .collect();
        MatrixJson { dim: d, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        matrix_from_json(raw).map_err(D::Error::custom)
    }
}

fn matrix_from_json(raw: MatrixJson) -> Result<ComplexMatrix> {
    let d = raw.dim;
    if raw.re.len() != d || raw.im.len() != d {
        return Err(Error::dimension_mismatch(format!(
            "matrix JSON declares dim {d} but has {} re rows and {} im rows",
            raw.re.len(),
            raw.im.len()
        )));
    }
    for row in raw.re.iter().chain(raw.im.iter()) {
        if row.len() != d {
            return Err(Error::dimension_mismatch(format!(
                "matrix JSON row of length {} in a dim-{d} matrix",
                row.len()
            )));
        }
    }
    let data = DMatrix::from_fn(d, d, |i, j| Complex::new(raw.re[i][j], raw.im[i][j]));
    ComplexMatrix::from_dmatrix(data)
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs)
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::mul(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        let a = ComplexMatrix::identity(2);
        let k = a.kron(&a);
        assert_eq!(k.dim(), 4);
        assert!((k.sub(&ComplexMatrix::identity(4))).frobenius_norm() == 0.0);
    }

    #[test]
    fn kron_indexing_convention() {
        let a = ComplexMatrix::from_rows(2, &[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0)]).unwrap();
        let b = ComplexMatrix::from_rows(2, &[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, -1.0)]).unwrap();
        let k = a.kron(&b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let expect = a.get(i, j) * b.get(p, q);
                        assert_eq!(k.get(i * 2 + p, j * 2 + q), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn transpose_factorizes_over_kron() {
        let s3 = ComplexMatrix::from_rows(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]).unwrap();
        let id = ComplexMatrix::identity(2);
        let lhs = s3.kron(&id).transpose();
        let rhs = s3.transpose().kron(&id);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn eigh_diagonal_real() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([3.0, -1.0, 2.0][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let (vals, _) = m.eigh().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_complex_hermitian() {
        // sigma_3 in the convention used throughout: eigenvalues -1, +1.
        let m = ComplexMatrix::from_rows(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]).unwrap();
        let (vals, vecs) = m.eigh().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        // residual check: M v = lambda v
        for k in 0..2 {
            let v = DVector::from_iterator(2, (0..2).map(|i| vecs.get(i, k)));
            let mv = m.as_dmatrix() * &v;
            let res = (&mv - v.map(|z| z * vals[k])).norm();
            assert!(res < 1e-13, "residual {res}");
        }
    }

    #[test]
    fn psd_clip_splits_signs() {
        let m = ComplexMatrix::from_rows(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-2.0, 0.0)]).unwrap();
        let p = m.psd_clip().unwrap();
        assert!((p.get(0, 0).re - 1.0).abs() < 1e-14);
        assert!(p.get(1, 1).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_rows(2, &[(1.0, 0.5), (0.0, -1.0), (0.0, 1.0), (-1.0, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"dim\":2"));
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_rejects_non_finite() {
        let s = r#"{"dim":1,"re":[[1e999]],"im":[[0.0]]}"#;
        // serde_json parses 1e999 as inf
        let r: std::result::Result<ComplexMatrix, _> = serde_json::from_str(s);
        assert!(r.is_err());
    }

    #[test]
    fn json_rejects_ragged_rows() {
        let s = r#"{"dim":2,"re":[[1.0,0.0],[0.0]],"im":[[0.0,0.0],[0.0,0.0]]}"#;
        let r: std::result::Result<ComplexMatrix, _> = serde_json::from_str(s);
        assert!(r.is_err());
    }
}
