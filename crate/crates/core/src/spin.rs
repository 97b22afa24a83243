//! Spin system construction in `M_{2^n}`.
//!
//! Generators follow the tensor pattern
//! `s_{2k+1} = σ3^{⊗k} ⊗ σ1 ⊗ 1^{⊗(n-k-1)}`,
//! `s_{2k+2} = σ3^{⊗k} ⊗ σ2 ⊗ 1^{⊗(n-k-1)}`,
//! with the Pauli labels
//! `σ1 = diag(1,-1)`, `σ2` the flip, `σ3` the imaginary antidiagonal.
//! Note this labeling is not the common physics one; the transpose rule
//! `σ3^t = -σ3` below depends on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Isomorphism class of the reversible Jordan algebra fixed by `t ∘ AdW`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReversibleType {
    /// Real symmetric matrices; `W^t = W`.
    Symmetric,
    /// Self-adjoint matrices over the quaternions; `W^t = -W`.
    Quaternionic,
}

/// A spin system: `s_0 = 1` and anticommuting symmetries `s_1, ..., s_m`,
/// together with the transpose-implementing symmetry `W` and the rank-one
/// projection `q` with `Tr(q s_j) = 0` for `j >= 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpinSystem {
    pub n: usize,
    pub m: usize,
    /// `generators[k] = s_k`, with `generators[0]` the identity.
    pub generators: Vec<ComplexMatrix>,
    #[serde(rename = "W")]
    pub w: ComplexMatrix,
    pub q: ComplexMatrix,
}

/// The three Pauli matrices, indexed 1..=3.
pub fn pauli(index: usize) -> Result<ComplexMatrix> {
    let entries: &[(f64, f64); 4] = match index {
        1 => &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)],
        2 => &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
        3 => &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)],
        _ => {
            return Err(Error::invalid_argument(format!(
                "pauli index must be 1, 2 or 3, got {index}"
            )))
        }
    };
    ComplexMatrix::from_rows(2, entries)
}

/// Kronecker product (also available as `ComplexMatrix::kron`).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

fn kron_chain(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = (*it.next().expect("non-empty factor list")).clone();
    it.fold(first, |acc, f| acc.kron(f))
}

/// Sign of the transpose on the k-th generator: `s_k^t = transpose_sign(k) * s_k`.
pub fn transpose_sign(k: usize) -> Result<i32> {
    if k == 0 {
        return Err(Error::invalid_argument(
            "transpose_sign is defined for generator indices k >= 1",
        ));
    }
    if ((k - 1) / 2) % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// The symmetry implementing the transpose on the spin factor:
/// `W s_k W = s_k^t` for every generator.
pub fn build_w(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid_argument("n must be >= 1"));
    }
    let id2 = ComplexMatrix::identity(2);
    let s3 = pauli(3)?;
    let block = id2.kron(&s3); // 1 ⊗ σ3
    let half = n / 2;
    let mut w = ComplexMatrix::identity(1);
    for _ in 0..half {
        w = w.kron(&block);
    }
    if n % 2 == 1 {
        w = w.kron(&id2);
    }
    Ok(w)
}

/// `q = e_0^{⊗n}` with `e_0` the +1 spectral projection of σ3.
pub fn build_q(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid_argument("n must be >= 1"));
    }
    // e_0 = (1 + σ3)/2 = [[1/2, -i/2], [i/2, 1/2]]
    let e0 = ComplexMatrix::from_rows(
        2,
        &[(0.5, 0.0), (0.0, -0.5), (0.0, 0.5), (0.5, 0.0)],
    )?;
    let mut q = e0.clone();
    for _ in 1..n {
        q = q.kron(&e0);
    }
    Ok(q)
}

/// Whether the reversible Jordan algebra at this `n` is real-symmetric or
/// quaternionic, decided by the transpose parity of `W`.
pub fn reversible_type(n: usize) -> ReversibleType {
    // W holds n/2 sigma_3 factors; W^t = (-1)^(n/2) W.
    if (n / 2) % 2 == 1 {
        ReversibleType::Quaternionic
    } else {
        ReversibleType::Symmetric
    }
}

/// Build the spin system for `n` qubit factors with `m` generators
/// (`m = 2n` when not specified).
pub fn build_spin_system(n: usize, m: Option<usize>) -> Result<SpinSystem> {
    if n == 0 {
        return Err(Error::invalid_argument("n must be >= 1"));
    }
    let m = m.unwrap_or(2 * n);
    if m == 0 || m > 2 * n {
        return Err(Error::invalid_argument(format!(
            "m must satisfy 1 <= m <= 2n = {}, got {m}",
            2 * n
        )));
    }
    let dim = 1usize << n;
    let id2 = ComplexMatrix::identity(2);
    let sigma = [pauli(1)?, pauli(2)?, pauli(3)?];

    let mut generators = Vec::with_capacity(m + 1);
    generators.push(ComplexMatrix::identity(dim));
    for j in 1..=m {
        // j = 2k+1 -> sigma_1 slot, j = 2k+2 -> sigma_2 slot, both at position k.
        let k = (j - 1) / 2;
        let mid = if j % 2 == 1 { &sigma[0] } else { &sigma[1] };
        let mut factors: Vec<&ComplexMatrix> = Vec::with_capacity(n);
        for _ in 0..k {
            factors.push(&sigma[2]);
        }
        factors.push(mid);
        for _ in (k + 1)..n {
            factors.push(&id2);
        }
        generators.push(kron_chain(&factors));
    }

    Ok(SpinSystem {
        n,
        m,
        generators,
        w: build_w(n)?,
        q: build_q(n)?,
    })
}

impl SpinSystem {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `s_k` for `0 <= k <= m`.
    pub fn generator(&self, k: usize) -> &ComplexMatrix {
        &self.generators[k]
    }

    pub fn reversible_type(&self) -> ReversibleType {
        reversible_type(self.n)
    }

    /// Validate the defining relations, returning the largest deviation.
    pub fn max_relation_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let dim = self.dim();
        let id = ComplexMatrix::identity(dim);
        for i in 1..=self.m {
            let si = self.generator(i);
            worst = worst.max(si.hermitian_deviation());
            worst = worst.max(si.mul(si).sub(&id).frobenius_norm());
            for j in (i + 1)..=self.m {
                let sj = self.generator(j);
                let anti = si.mul(sj).add(&sj.mul(si));
                worst = worst.max(anti.frobenius_norm());
            }
        }
        worst
    }
}
