//! Third-order tensors, factor triples and matrix unfoldings.
//!
//! Entry `(i, j, k)` of an I×J×K tensor is stored at `(i*J + j)*K + k`.
//! The six unfoldings place it at
//!
//! | which | matrix          | row        | column |
//! |-------|-----------------|------------|--------|
//! | 1     | (A⊙B)Cᵀ         | i·J + j    | k      |
//! | 2     | (B⊙C)Aᵀ         | j·K + k    | i      |
//! | 3     | (C⊙A)Bᵀ         | k·I + i    | j      |
//! | 4     | (A⊙C)Bᵀ         | i·K + k    | j      |
//! | 5     | (B⊙A)Cᵀ         | j·I + i    | k      |
//! | 6     | (C⊙B)Aᵀ         | k·J + j    | i      |

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{khatri_rao, Entries, LinalgError, Mat, Mode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("factor matrices have {0}, {1} and {2} columns")]
    ColumnMismatch(usize, usize, usize),
    #[error("factor matrices mix exact and float modes")]
    MixedMode,
    #[error("factor {role} has a zero column at position {col}")]
    ZeroColumn { role: Role, col: usize },
    #[error("factor matrices need at least one column")]
    Empty,
    #[error("unfolding index {0} is not in 1..=6")]
    BadUnfolding(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Position of a factor matrix in a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::A, Role::B, Role::C];

    pub fn index(self) -> usize {
        match self {
            Role::A => 0,
            Role::B => 1,
            Role::C => 2,
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Role::A => "A",
            Role::B => "B",
            Role::C => "C",
        };
        f.write_str(s)
    }
}

/// Factor matrices `A` (I×R), `B` (J×R), `C` (K×R) of a polyadic decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorTriple {
    a: Mat,
    b: Mat,
    c: Mat,
}

impl FactorTriple {
    pub fn new(a: Mat, b: Mat, c: Mat) -> Result<FactorTriple, TensorError> {
        if a.cols() != b.cols() || b.cols() != c.cols() {
            return Err(TensorError::ColumnMismatch(a.cols(), b.cols(), c.cols()));
        }
        if a.mode() != b.mode() || b.mode() != c.mode() {
            return Err(TensorError::MixedMode);
        }
        if a.cols() == 0 || a.rows() == 0 || b.rows() == 0 || c.rows() == 0 {
            return Err(TensorError::Empty);
        }
        for (role, m) in [(Role::A, &a), (Role::B, &b), (Role::C, &c)] {
            if let Some(col) = (0..m.cols()).find(|&j| m.is_zero_column(j)) {
                return Err(TensorError::ZeroColumn { role, col });
            }
        }
        Ok(FactorTriple { a, b, c })
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn c(&self) -> &Mat {
        &self.c
    }

    pub fn factor(&self, role: Role) -> &Mat {
        match role {
            Role::A => &self.a,
            Role::B => &self.b,
            Role::C => &self.c,
        }
    }

    /// Number of rank-1 terms.
    pub fn r(&self) -> usize {
        self.a.cols()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.rows(), self.b.rows(), self.c.rows())
    }

    pub fn mode(&self) -> Mode {
        self.a.mode()
    }

    pub fn to_float(&self) -> FactorTriple {
        FactorTriple { a: self.a.to_float(), b: self.b.to_float(), c: self.c.to_float() }
    }

    /// The triple with its factors placed in the order given by `roles`:
    /// the new first factor is the old `roles[0]`, and so on.
    pub fn permuted(&self, roles: [Role; 3]) -> FactorTriple {
        FactorTriple {
            a: self.factor(roles[0]).clone(),
            b: self.factor(roles[1]).clone(),
            c: self.factor(roles[2]).clone(),
        }
    }
}

/// Dense I×J×K tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    entries: Entries,
}

impl Tensor3 {
    pub fn new(dims: (usize, usize, usize), entries: Entries) -> Result<Tensor3, TensorError> {
        if entries.len() != dims.0 * dims.1 * dims.2 {
            return Err(TensorError::Shape(format!("{} entries for {:?}", entries.len(), dims)));
        }
        Ok(Tensor3 { dims, entries })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn mode(&self) -> Mode {
        self.entries.mode()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims.1 + j) * self.dims.2 + k
    }

    pub fn to_float_tensor(&self) -> Tensor3 {
        let entries = match &self.entries {
            Entries::Exact(v) => Entries::Float(v.iter().map(|q| crate::linalg::Scalar::Exact(q.clone()).to_f64()).collect()),
            Entries::Float(v) => Entries::Float(v.clone()),
        };
        Tensor3 { dims: self.dims, entries }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> crate::linalg::Scalar {
        let idx = self.index(i, j, k);
        match &self.entries {
            Entries::Exact(v) => crate::linalg::Scalar::Exact(v[idx].clone()),
            Entries::Float(v) => crate::linalg::Scalar::Float(v[idx]),
        }
    }
}

/// `t_ijk = Σ_r A[i,r] B[j,r] C[k,r]`.
pub fn from_factors(f: &FactorTriple) -> Tensor3 {
    let (ni, nj, nk) = f.dims();
    let r = f.r();
    let entries = match (f.a.entries(), f.b.entries(), f.c.entries()) {
        (Entries::Exact(a), Entries::Exact(b), Entries::Exact(c)) => {
            let mut out = vec![BigRational::zero(); ni * nj * nk];
            for i in 0..ni {
                for j in 0..nj {
                    for l in 0..r {
                        let ab = &a[i * r + l] * &b[j * r + l];
                        if ab.is_zero() {
                            continue;
                        }
                        for k in 0..nk {
                            let x = &c[k * r + l];
                            if !x.is_zero() {
                                out[(i * nj + j) * nk + k] += &ab * x;
                            }
                        }
                    }
                }
            }
            Entries::Exact(out)
        }
        (Entries::Float(a), Entries::Float(b), Entries::Float(c)) => {
            let mut out = vec![0.0; ni * nj * nk];
            for i in 0..ni {
                for j in 0..nj {
                    for l in 0..r {
                        let ab = a[i * r + l] * b[j * r + l];
                        for k in 0..nk {
                            out[(i * nj + j) * nk + k] += ab * c[k * r + l];
                        }
                    }
                }
            }
            Entries::Float(out)
        }
        _ => unreachable!("FactorTriple guarantees a single mode"),
    };
    Tensor3 { dims: (ni, nj, nk), entries }
}

/// Matrix unfolding `which` (1..=6); see the module table.
pub fn unfold(t: &Tensor3, which: usize) -> Result<Mat, TensorError> {
    let (ni, nj, nk) = t.dims;
    // (rows, cols, map from (i,j,k) to (row, col))
    let (rows, cols): (usize, usize) = match which {
        1 => (ni * nj, nk),
        2 => (nj * nk, ni),
        3 => (nk * ni, nj),
        4 => (ni * nk, nj),
        5 => (nj * ni, nk),
        6 => (nk * nj, ni),
        w => return Err(TensorError::BadUnfolding(w)),
    };
    let place = |i: usize, j: usize, k: usize| -> (usize, usize) {
        match which {
            1 => (i * nj + j, k),
            2 => (j * nk + k, i),
            3 => (k * ni + i, j),
            4 => (i * nk + k, j),
            5 => (j * ni + i, k),
            _ => (k * nj + j, i),
        }
    };
    let mut order = vec![0usize; rows * cols];
    for i in 0..ni {
        for j in 0..nj {
            for k in 0..nk {
                let (r, c) = place(i, j, k);
                order[r * cols + c] = t.index(i, j, k);
            }
        }
    }
    let entries = match &t.entries {
        Entries::Exact(v) => Entries::Exact(order.iter().map(|&x| v[x].clone()).collect()),
        Entries::Float(v) => Entries::Float(order.iter().map(|&x| v[x]).collect()),
    };
    Ok(Mat::new(rows, cols, entries)?)
}

/// The Khatri-Rao formula for unfolding `which` of `from_factors(f)`.
pub fn unfolding_formula(f: &FactorTriple, which: usize) -> Result<Mat, TensorError> {
    let (x, y, z) = match which {
        1 => (&f.a, &f.b, &f.c),
        2 => (&f.b, &f.c, &f.a),
        3 => (&f.c, &f.a, &f.b),
        4 => (&f.a, &f.c, &f.b),
        5 => (&f.b, &f.a, &f.c),
        6 => (&f.c, &f.b, &f.a),
        w => return Err(TensorError::BadUnfolding(w)),
    };
    Ok(khatri_rao(x, y)?.matmul(&z.transpose())?)
}

/// Entrywise equality; float tensors compare with an absolute max-norm
/// tolerance (default `1e-9`).
pub fn equals(t1: &Tensor3, t2: &Tensor3, tol: Option<f64>) -> Result<bool, TensorError> {
    if t1.dims != t2.dims {
        return Err(TensorError::Shape(format!("{:?} vs {:?}", t1.dims, t2.dims)));
    }
    match (&t1.entries, &t2.entries) {
        (Entries::Exact(a), Entries::Exact(b)) => {
            if let Some(t) = tol {
                return Err(LinalgError::InvalidTolerance(t).into());
            }
            Ok(a == b)
        }
        (Entries::Float(a), Entries::Float(b)) => {
            let tol = tol.unwrap_or(1e-9);
            Ok(a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol))
        }
        _ => Err(TensorError::MixedMode),
    }
}

/// Whether every frontal slice is symmetric (`t_ijk = t_jik`).
pub fn is_sfs(t: &Tensor3) -> Result<bool, TensorError> {
    let (ni, nj, nk) = t.dims;
    if ni != nj {
        return Err(TensorError::Shape(format!("frontal slices are {ni}x{nj}")));
    }
    let same = |x: usize, y: usize| match &t.entries {
        Entries::Exact(v) => v[x] == v[y],
        Entries::Float(v) => v[x] == v[y],
    };
    for i in 0..ni {
        for j in i + 1..nj {
            for k in 0..nk {
                if !same(t.index(i, j, k), t.index(j, i, k)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
