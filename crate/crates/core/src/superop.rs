//! Linear maps on matrix algebras as transfer matrices, with Choi-matrix
//! conversion.
//!
//! Conventions, fixed once so transfer matrices reproduce bit-for-bit:
//! vectorization is column-major (`vec(X)[i + j*d] = X[i,j]`, so
//! `vec(AXB) = (B^t ⊗ A) vec(X)`), and the Choi matrix is the unnormalized
//! `C = Σ_ij E_ij ⊗ f(E_ij)`, which makes "completely positive iff Choi PSD"
//! hold with no scale factor.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{Complex64, ComplexMatrix};
use crate::spin::SpinSystem;

pub const CONVENTION: &str = "col-vec/unnormalized-choi";

/// A linear map on `M_din -> M_dout` stored as its transfer matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    din: usize,
    dout: usize,
    /// `(dout^2) x (din^2)` matrix acting on column-major vectorized inputs.
    transfer: DMatrix<Complex64>,
}

/// The Choi matrix of a map, `Σ_ij E_ij ⊗ f(E_ij)`, of size `din*dout`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub din: usize,
    pub dout: usize,
    pub matrix: ComplexMatrix,
}

impl SuperOp {
    pub fn from_transfer(din: usize, dout: usize, transfer: DMatrix<Complex64>) -> Result<Self> {
        if transfer.nrows() != dout * dout || transfer.ncols() != din * din {
            return Err(Error::dimension_mismatch(format!(
                "transfer must be {}x{}, got {}x{}",
                dout * dout,
                din * din,
                transfer.nrows(),
                transfer.ncols()
            )));
        }
        Ok(Self { din, dout, transfer })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn transfer(&self) -> &DMatrix<Complex64> {
        &self.transfer
    }

    /// Evaluate the map on a matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.din {
            return Err(Error::dimension_mismatch(format!(
                "map expects input dimension {}, got {}",
                self.din,
                x.dim()
            )));
        }
        let out = &self.transfer * x.to_col_vec();
        ComplexMatrix::from_col_vec(self.dout, &out)
    }

    /// `f ∘ g`: apply `g` first.
    pub fn compose(&self, g: &SuperOp) -> Result<SuperOp> {
        if self.din != g.dout {
            return Err(Error::dimension_mismatch(format!(
                "compose: left map takes dim {}, right map produces dim {}",
                self.din, g.dout
            )));
        }
        SuperOp::from_transfer(g.din, self.dout, &self.transfer * &g.transfer)
    }

    pub fn add(&self, g: &SuperOp) -> Result<SuperOp> {
        if self.din != g.din || self.dout != g.dout {
            return Err(Error::dimension_mismatch(
                "add: maps must share input and output dimensions".into(),
            ));
        }
        SuperOp::from_transfer(self.din, self.dout, &self.transfer + &g.transfer)
    }

    pub fn sub(&self, g: &SuperOp) -> Result<SuperOp> {
        if self.din != g.din || self.dout != g.dout {
            return Err(Error::dimension_mismatch(
                "sub: maps must share input and output dimensions".into(),
            ));
        }
        SuperOp::from_transfer(self.din, self.dout, &self.transfer - &g.transfer)
    }

    pub fn scale(&self, c: f64) -> SuperOp {
        SuperOp {
            din: self.din,
            dout: self.dout,
            transfer: self.transfer.map(|z| z * c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.transfer.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn transfer_distance(&self, g: &SuperOp) -> f64 {
        (&self.transfer - &g.transfer)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Choi matrix `C[i*dout + p, j*dout + q] = f(E_ij)[p, q]`.
    pub fn choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.din, self.dout);
        let d = din * dout;
        let m = ComplexMatrix::from_fn(d, d, |r, c| {
            let (i, p) = (r / dout, r % dout);
            let (j, q) = (c / dout, c % dout);
            self.transfer[(p + q * dout, i + j * din)]
        });
        ChoiMatrix {
            din,
            dout,
            matrix: m,
        }
    }
}

impl ChoiMatrix {
    pub fn new(din: usize, dout: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != din * dout {
            return Err(Error::dimension_mismatch(format!(
                "Choi matrix must have dimension din*dout = {}, got {}",
                din * dout,
                matrix.dim()
            )));
        }
        Ok(Self { din, dout, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Inverse of `SuperOp::choi` (an exact index permutation).
    pub fn to_superop(&self) -> SuperOp {
        let (din, dout) = (self.din, self.dout);
        let transfer = DMatrix::from_fn(dout * dout, din * din, |r, c| {
            let (p, q) = (r % dout, r / dout);
            let (i, j) = (c % din, c / din);
            self.matrix.get(i * dout + p, j * dout + q)
        });
        SuperOp {
            din,
            dout,
            transfer,
        }
    }

    /// Transpose the second tensor factor.
    pub fn partial_transpose(&self) -> ChoiMatrix {
        let (din, dout) = (self.din, self.dout);
        let d = self.dim();
        let m = ComplexMatrix::from_fn(d, d, |r, c| {
            let (i, p) = (r / dout, r % dout);
            let (j, q) = (c / dout, c % dout);
            self.matrix.get(i * dout + q, j * dout + p)
        });
        ChoiMatrix {
            din,
            dout,
            matrix: m,
        }
    }
}

/// The identity map on `M_d`.
pub fn identity_map(d: usize) -> SuperOp {
    SuperOp {
        din: d,
        dout: d,
        transfer: DMatrix::identity(d * d, d * d),
    }
}

/// The transpose map on `M_d` (transfer matrix = SWAP).
pub fn transpose_map(d: usize) -> SuperOp {
    let mut t = DMatrix::zeros(d * d, d * d);
    for p in 0..d {
        for q in 0..d {
            t[(p + q * d, q + p * d)] = Complex64::new(1.0, 0.0);
        }
    }
    SuperOp {
        din: d,
        dout: d,
        transfer: t,
    }
}

/// `AdV: x -> v* x v`.
pub fn ad(v: &ComplexMatrix) -> SuperOp {
    let d = v.dim();
    SuperOp {
        din: d,
        dout: d,
        transfer: v
            .transpose()
            .as_dmatrix()
            .kronecker(v.adjoint().as_dmatrix()),
    }
}

/// Trace-invariant projection onto the span of the spin system:
/// `P(a) = 2^{-n} Σ_k Tr(s_k a) s_k`.
///
/// The transfer matrix is `2^{-n} Σ_k vec(s_k) vec(s_k)^*`, an orthogonal
/// projection of rank `m+1` in Hilbert-Schmidt space, so idempotence and
/// trace self-duality hold exactly.
pub fn projection_p(sys: &SpinSystem) -> SuperOp {
    let d = sys.dim();
    let weight = 1.0 / d as f64;
    let mut transfer: DMatrix<Complex64> = DMatrix::zeros(d * d, d * d);
    for s in &sys.generators {
        let v: DVector<Complex64> = s.to_col_vec();
        for i in 0..d * d {
            for j in 0..d * d {
                transfer[(i, j)] += v[i] * v[j].conj() * weight;
            }
        }
    }
    SuperOp {
        din: d,
        dout: d,
        transfer,
    }
}

/// Projection onto the fixed-point set of `t ∘ AdW`:
/// `Q(x) = (x + t(W x W))/2`.
pub fn projection_q(n: usize) -> Result<SuperOp> {
    let d = 1usize << n;
    Ok(identity_map(d).add(&t_adw(n)?)?.scale(0.5))
}

/// The involution `t ∘ AdW` itself.
pub fn t_adw(n: usize) -> Result<SuperOp> {
    let w = crate::spin::build_w(n)?;
    transpose_map(w.dim()).compose(&ad(&w))
}

#[derive(Serialize, Deserialize)]
struct SuperOpJson {
    din: usize,
    dout: usize,
    convention: String,
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn matrix_fields(m: &DMatrix<Complex64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let re = (0..rows)
        .map(|i| (0..cols).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..rows)
        .map(|i| (0..cols).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

impl Serialize for SuperOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = matrix_fields(&self.transfer);
        SuperOpJson {
            din: self.din,
            dout: self.dout,
            convention: CONVENTION.to_string(),
            dim: self.transfer.nrows(),
            re,
            im,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SuperOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SuperOpJson::deserialize(deserializer)?;
        if raw.convention != CONVENTION {
            return Err(D::Error::custom(format!(
                "unsupported convention {:?}, expected {CONVENTION:?}",
                raw.convention
            )));
        }
        let rows = raw.dout * raw.dout;
        let cols = raw.din * raw.din;
        if raw.re.len() != rows || raw.im.len() != rows || raw.dim != rows {
            return Err(D::Error::custom("transfer row count mismatch"));
        }
        for row in raw.re.iter().chain(raw.im.iter()) {
            if row.len() != cols {
                return Err(D::Error::custom("transfer column count mismatch"));
            }
        }
        let transfer = DMatrix::from_fn(rows, cols, |i, j| {
            Complex64::new(raw.re[i][j], raw.im[i][j])
        });
        if transfer.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(D::Error::custom("transfer entries must be finite"));
        }
        SuperOp::from_transfer(raw.din, raw.dout, transfer).map_err(D::Error::custom)
    }
}

impl Serialize for ChoiMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ChoiJson<'a> {
            din: usize,
            dout: usize,
            convention: &'a str,
            dim: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let (re, im) = matrix_fields(self.matrix.as_dmatrix());
        ChoiJson {
            din: self.din,
            dout: self.dout,
            convention: CONVENTION,
            dim: self.matrix.dim(),
            re,
            im,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChoiMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct ChoiJson {
            din: usize,
            dout: usize,
            convention: String,
            dim: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let raw = ChoiJson::deserialize(deserializer)?;
        if raw.convention != CONVENTION {
            return Err(D::Error::custom(format!(
                "unsupported convention {:?}, expected {CONVENTION:?}",
                raw.convention
            )));
        }
        if raw.re.len() != raw.dim || raw.im.len() != raw.dim {
            return Err(D::Error::custom("Choi matrix row count mismatch"));
        }
        for row in raw.re.iter().chain(raw.im.iter()) {
            if row.len() != raw.dim {
                return Err(D::Error::custom("Choi matrix must be square"));
            }
        }
        let entries: Vec<(f64, f64)> = (0..raw.dim)
            .flat_map(|i| (0..raw.dim).map(move |j| (raw.re[i][j], raw.im[i][j])))
            .collect();
        let matrix = ComplexMatrix::from_rows(raw.dim, &entries).map_err(D::Error::custom)?;
        ChoiMatrix::new(raw.din, raw.dout, matrix).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_spin_system, build_w};

    fn fro(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn apply_matches_direct_conjugation() {
        let sys = build_spin_system(2, None).unwrap();
        let v = sys.generator(1).add(&sys.generator(3).scale(2.0));
        let f = ad(&v);
        let x = sys.generator(2).clone();
        let direct = v.adjoint().mul(&x).mul(&v);
        let via = f.apply(&x).unwrap();
        assert!(via.sub(&direct).frobenius_norm() < 1e-12);
    }

    #[test]
    fn ad_identity_is_identity_map() {
        let f = ad(&ComplexMatrix::identity(3));
        assert_eq!(f.transfer, identity_map(3).transfer);
    }

    #[test]
    fn adw_transposes_generators() {
        let sys = build_spin_system(3, None).unwrap();
        let f = ad(&sys.w);
        for k in 1..=sys.m {
            let out = f.apply(sys.generator(k)).unwrap();
            assert!(out.sub(&sys.generator(k).transpose()).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn transpose_map_is_involution() {
        let t = transpose_map(3);
        let tt = t.compose(&t).unwrap();
        assert_eq!(tt.transfer, identity_map(3).transfer);
    }

    #[test]
    fn choi_of_identity_is_max_entangled() {
        let c = identity_map(2).choi();
        // Sum of E_ij ⊗ E_ij: eigenvalues {2, 0, 0, 0}.
        let vals = c.matrix.eigh_values().unwrap();
        assert!((vals[3] - 2.0).abs() < 1e-14);
        assert!(vals[0].abs() < 1e-14 && vals[2].abs() < 1e-14);
    }

    #[test]
    fn choi_of_transpose_is_swap() {
        let c = transpose_map(2).choi();
        let mut swap = ComplexMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                swap.set(i * 2 + j, j * 2 + i, Complex64::new(1.0, 0.0));
            }
        }
        assert!(c.matrix.sub(&swap).frobenius_norm() == 0.0);
        let vals = c.matrix.eigh_values().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn choi_round_trip_is_exact() {
        let sys = build_spin_system(2, None).unwrap();
        let p = projection_p(&sys);
        let back = p.choi().to_superop();
        assert_eq!(p.transfer, back.transfer);
    }

    #[test]
    fn choi_of_ad_is_rank_one() {
        let mut rng = crate::rng::stream(11, 0x99, 0);
        let v = crate::rng::random_hermitian(&mut rng, 3);
        let c = ad(&v).choi();
        let vals = c.matrix.eigh_values().unwrap();
        let nonzero = vals.iter().filter(|x| x.abs() > 1e-10).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn partial_transpose_involution_and_swap_identity() {
        let sys = build_spin_system(2, None).unwrap();
        let c = projection_p(&sys).choi();
        let ptpt = c.partial_transpose().partial_transpose();
        assert_eq!(c.matrix, ptpt.matrix);

        // PT(choi(identity)) = SWAP.
        let pt = identity_map(2).choi().partial_transpose();
        let swap_choi = transpose_map(2).choi();
        assert!(pt.matrix.sub(&swap_choi.matrix).frobenius_norm() == 0.0);
    }

    #[test]
    fn partial_transpose_matches_choi_of_post_transpose() {
        // choi(t ∘ f) is the partial transpose of choi(f); checked for f = AdW at n=2.
        let w = build_w(2).unwrap();
        let f = ad(&w);
        let lhs = transpose_map(4).compose(&f).unwrap().choi();
        let rhs = f.choi().partial_transpose();
        assert!(lhs.matrix.sub(&rhs.matrix).frobenius_norm() <= 1e-14);
    }

    #[test]
    fn p_is_idempotent_projection_fixing_spin_factor() {
        let sys = build_spin_system(1, None).unwrap();
        let p = projection_p(&sys);
        let pp = p.compose(&p).unwrap();
        assert!(p.transfer_distance(&pp) <= 1e-14);

        // P(sigma_1) = sigma_1 and P(sigma_3) = 0 at n=1.
        let s1 = crate::spin::pauli(1).unwrap();
        let s3 = crate::spin::pauli(3).unwrap();
        assert!(p.apply(&s1).unwrap().sub(&s1).frobenius_norm() <= 1e-14);
        assert!(p.apply(&s3).unwrap().frobenius_norm() <= 1e-14);
        // P(1) = 1.
        let id = ComplexMatrix::identity(2);
        assert!(p.apply(&id).unwrap().sub(&id).frobenius_norm() <= 1e-14);
    }

    #[test]
    fn p_maps_q_to_scaled_identity() {
        for n in 1..=3 {
            let sys = build_spin_system(n, None).unwrap();
            let p = projection_p(&sys);
            let out = p.apply(&sys.q).unwrap();
            let expect = ComplexMatrix::identity(sys.dim()).scale(1.0 / sys.dim() as f64);
            assert!(out.sub(&expect).frobenius_norm() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn p_trace_invariance() {
        let sys = build_spin_system(2, None).unwrap();
        let p = projection_p(&sys);
        let mut rng = crate::rng::stream(5, 0x77, 0);
        let a = crate::rng::random_hermitian(&mut rng, 4);
        let b = sys.generator(1).add(&sys.generator(2).scale(2.0));
        let lhs = p.apply(&a).unwrap().mul(&b).trace();
        let rhs = a.mul(&b).trace();
        assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn q_fixes_generators_and_halves_q_projection() {
        for n in 2..=3 {
            let sys = build_spin_system(n, None).unwrap();
            let q_op = projection_q(n).unwrap();
            let qq = q_op.compose(&q_op).unwrap();
            assert!(q_op.transfer_distance(&qq) <= 1e-14);

            let id = ComplexMatrix::identity(sys.dim());
            assert!(q_op.apply(&id).unwrap().sub(&id).frobenius_norm() <= 1e-14);

            for k in 1..=sys.m {
                let s = sys.generator(k);
                assert!(q_op.apply(s).unwrap().sub(s).frobenius_norm() <= 1e-12);
            }

            let qproj = &sys.q;
            let out = q_op.apply(qproj).unwrap();
            let expect = qproj.add(&qproj.transpose()).scale(0.5);
            assert!(out.sub(&expect).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn p_composition_identities() {
        // P ∘ t ∘ AdW = P and P = (2^{-n+1} Q) + (P - 2^{-n+1} Q), n = 2.
        let sys = build_spin_system(2, None).unwrap();
        let p = projection_p(&sys);
        let t_adw = t_adw(2).unwrap();
        let lhs = p.compose(&t_adw).unwrap();
        assert!(lhs.transfer_distance(&p) <= 1e-13);

        let q_op = projection_q(2).unwrap();
        let alpha = q_op.scale(0.5);
        let beta = p.sub(&alpha).unwrap();
        let sum = alpha.add(&beta).unwrap();
        assert_eq!(sum.transfer, p.transfer);
    }

    #[test]
    fn hermiticity_preservation() {
        let sys = build_spin_system(2, None).unwrap();
        let maps = [
            projection_p(&sys),
            projection_q(2).unwrap(),
            transpose_map(4),
            ad(&sys.w),
        ];
        let mut rng = crate::rng::stream(9, 0x13, 2);
        let g = crate::rng::random_hermitian(&mut rng, 4);
        let x = g.add(&g.mul(&g).scale_complex(Complex64::new(0.0, 1.0))); // non-Hermitian input
        for f in &maps {
            let lhs = f.apply(&x.adjoint()).unwrap().adjoint();
            let rhs = f.apply(&x).unwrap();
            assert!(lhs.sub(&rhs).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_errors() {
        let f = identity_map(2);
        let g = identity_map(3);
        assert!(f.compose(&g).is_err());
        assert!(f.add(&g).is_err());
        assert!(f.apply(&ComplexMatrix::identity(3)).is_err());
        assert!(ChoiMatrix::new(2, 3, ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn superop_json_round_trip() {
        let sys = build_spin_system(1, None).unwrap();
        let p = projection_p(&sys);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(CONVENTION));
        let back: SuperOp = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);

        let c = p.choi();
        let s = serde_json::to_string(&c).unwrap();
        let back: ChoiMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
    }
}
