//! Pfaffians of complex skew-symmetric matrices.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Largest dimension evaluated by direct expansion along the first row.
pub const EXPANSION_MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("skew-symmetric matrix must have even dimension, got {0}")]
pub struct OddDimension(pub usize);

/// Even-dimensional skew-symmetric matrix. Only the strict upper triangle is
/// supplied; the lower triangle and zero diagonal follow by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl SkewMatrix {
    /// Builds the matrix from `upper(i, j)` for `i < j`.
    pub fn from_upper<F>(dim: usize, mut upper: F) -> Result<Self, OddDimension>
    where
        F: FnMut(usize, usize) -> C64,
    {
        if !dim.is_multiple_of(2) {
            return Err(OddDimension(dim));
        }
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v = upper(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = -v;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// `P A Pᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SkewMatrix {
        let n = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        SkewMatrix { dim: n, data }
    }
}

/// Pfaffian, by row expansion up to [`EXPANSION_MAX_DIM`] and by pivoted
/// skew-symmetric elimination above it. The empty matrix has Pfaffian 1.
pub fn pfaffian(m: &SkewMatrix) -> C64 {
    if m.dim <= EXPANSION_MAX_DIM {
        pfaffian_expansion(m)
    } else {
        pfaffian_elimination(m)
    }
}

/// `pf(A) = Σ_j (-1)^{j+1} a_{0j} pf(A with rows/cols 0, j removed)`.
pub fn pfaffian_expansion(m: &SkewMatrix) -> C64 {
    let idx: Vec<usize> = (0..m.dim).collect();
    expand(m, &idx)
}

fn expand(m: &SkewMatrix, idx: &[usize]) -> C64 {
    match idx.len() {
        0 => C64::new(1.0, 0.0),
        2 => m.get(idx[0], idx[1]),
        _ => {
            let first = idx[0];
            let rest = &idx[1..];
            let mut sub = Vec::with_capacity(rest.len() - 1);
            let mut total = C64::new(0.0, 0.0);
            for (k, &j) in rest.iter().enumerate() {
                let a = m.get(first, j);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                sub.clear();
                sub.extend(rest.iter().copied().filter(|&x| x != j));
                let term = a * expand(m, &sub);
                if k % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

/// Parlett–Reid style `L T Lᵀ` reduction with partial pivoting.
pub fn pfaffian_elimination(m: &SkewMatrix) -> C64 {
    let n = m.dim;
    let mut a = m.data.clone();
    let at = |i: usize, j: usize| i * n + j;
    let mut pf = C64::new(1.0, 0.0);

    for k in (0..n.saturating_sub(1)).step_by(2) {
        let (kp, _) = (k + 1..n)
            .map(|i| (i, a[at(i, k)].norm()))
            .fold((k + 1, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if kp != k + 1 {
            for j in 0..n {
                a.swap(at(k + 1, j), at(kp, j));
            }
            for i in 0..n {
                a.swap(at(i, k + 1), at(i, kp));
            }
            pf = -pf;
        }
        let pivot = a[at(k, k + 1)];
        if pivot == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|j| a[at(k, j)] / pivot).collect();
            let col: Vec<C64> = (k + 2..n).map(|i| a[at(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[at(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}
