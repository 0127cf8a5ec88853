//! Dense linear algebra over exact rationals or floats: rank, kernel,
//! Kronecker and Khatri-Rao products, and compound matrices.

mod exact;
mod float;
mod mat;
mod scalar;
mod subsets;
pub mod witness;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use mat::{Entries, Mat, Vector};
pub use scalar::{Mode, Scalar};
pub use subsets::{binomial, binomial_usize, combinations, Combinations, IndexSubset};

pub(crate) use exact::IntMatrix;
pub(crate) use subsets::{subset_rank, subset_unrank};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("operands mix exact and float modes")]
    MixedMode,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("compound of order {m} is not defined for a {rows}x{cols} matrix")]
    NotDefined { m: usize, rows: usize, cols: usize },
    #[error("tolerance {0} is not allowed here (exact mode takes none, float mode needs tol >= 0)")]
    InvalidTolerance(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid numeric literal {0:?}")]
    BadLiteral(String),
    #[error("invalid subset {members:?} of 1..{n}")]
    InvalidSubset { n: usize, members: Vec<usize> },
    #[error("no {k}-subset of 1..{n} at position {pos}")]
    SubsetPositionOutOfRange { n: usize, k: usize, pos: usize },
    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub(crate) fn check_tol(mode: Mode, tol: Option<f64>) -> Result<(), LinalgError> {
    match (mode, tol) {
        (Mode::Exact, Some(t)) => Err(LinalgError::InvalidTolerance(t)),
        (Mode::Float, Some(t)) if t.is_nan() || t < 0.0 => Err(LinalgError::InvalidTolerance(t)),
        _ => Ok(()),
    }
}

/// Rank of `m`. Exact mode takes no tolerance and returns a proven rank.
pub fn rank(m: &Mat, tol: Option<f64>) -> Result<usize, LinalgError> {
    check_tol(m.mode(), tol)?;
    Ok(match m.entries() {
        Entries::Exact(q) => exact::rank(&IntMatrix::from_rationals(m.rows(), m.cols(), q)),
        Entries::Float(x) => float::rank(m.rows(), m.cols(), x, tol),
    })
}

/// Basis of the right null space. Exact vectors are primitive integer
/// vectors; float vectors have unit max-norm.
pub fn kernel_basis(m: &Mat, tol: Option<f64>) -> Result<Vec<Vector>, LinalgError> {
    check_tol(m.mode(), tol)?;
    Ok(match m.entries() {
        Entries::Exact(q) => exact::kernel(&IntMatrix::from_rationals(m.rows(), m.cols(), q))
            .into_iter()
            .map(Vector::from_rationals)
            .collect(),
        Entries::Float(x) => float::kernel(m.rows(), m.cols(), x, tol).into_iter().map(Vector::from_f64).collect(),
    })
}

pub fn has_full_column_rank(m: &Mat, tol: Option<f64>) -> Result<bool, LinalgError> {
    Ok(rank(m, tol)? == m.cols())
}

/// Whether `v` lies in the column space of `m`.
pub fn in_range_of(v: &Vector, m: &Mat, tol: Option<f64>) -> Result<bool, LinalgError> {
    if v.len() != m.rows() {
        return Err(LinalgError::Shape(format!("vector of length {} against {} rows", v.len(), m.rows())));
    }
    if v.mode() != m.mode() {
        return Err(LinalgError::MixedMode);
    }
    let ext = m.append_column(v)?;
    Ok(rank(&ext, tol)? == rank(m, tol)?)
}

/// Column-wise Kronecker product: column r is `a_r ⊗ b_r`, so entry
/// `(i * B.rows + j, r)` is `A[i, r] * B[j, r]`.
pub fn khatri_rao(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    if a.cols() != b.cols() {
        return Err(LinalgError::Shape(format!("{} vs {} columns", a.cols(), b.cols())));
    }
    let (ia, jb, r) = (a.rows(), b.rows(), a.cols());
    let entries = match (a.entries(), b.entries()) {
        (Entries::Exact(x), Entries::Exact(y)) => {
            let mut out = Vec::with_capacity(ia * jb * r);
            for i in 0..ia {
                for j in 0..jb {
                    for c in 0..r {
                        out.push(&x[i * r + c] * &y[j * r + c]);
                    }
                }
            }
            Entries::Exact(out)
        }
        (Entries::Float(x), Entries::Float(y)) => {
            let mut out = Vec::with_capacity(ia * jb * r);
            for i in 0..ia {
                for j in 0..jb {
                    for c in 0..r {
                        out.push(x[i * r + c] * y[j * r + c]);
                    }
                }
            }
            Entries::Float(out)
        }
        _ => return Err(LinalgError::MixedMode),
    };
    Mat::new(ia * jb, r, entries)
}

/// Kronecker product; entry `(i * B.rows + k, j * B.cols + l)` is `A[i,j] * B[k,l]`.
pub fn kronecker(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    if a.mode() != b.mode() {
        return Err(LinalgError::MixedMode);
    }
    let (rows, cols) = (a.rows() * b.rows(), a.cols() * b.cols());
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..a.rows() {
        for k in 0..b.rows() {
            for j in 0..a.cols() {
                for l in 0..b.cols() {
                    out.push(a.get(i, j).mul(&b.get(k, l))?);
                }
            }
        }
    }
    Mat::from_scalars(rows, cols, out)
}

/// The m-th compound matrix: entry `(S, T)` is `det M[S, T]`, with row and
/// column subsets in lexicographic order.
pub fn compound(m: &Mat, order: usize) -> Result<Mat, LinalgError> {
    let (rows, cols) = (m.rows(), m.cols());
    if order < 1 || order > rows.min(cols) {
        return Err(LinalgError::NotDefined { m: order, rows, cols });
    }
    let rs: Vec<Vec<usize>> = combinations(rows, order).collect();
    let cs: Vec<Vec<usize>> = combinations(cols, order).collect();
    let entries = match m.entries() {
        Entries::Exact(q) => {
            let im = IntMatrix::from_rationals(rows, cols, q);
            let mut out = Vec::with_capacity(rs.len() * cs.len());
            let mut buf_small = vec![0i64; order * order];
            let mut buf_big = vec![BigInt::zero(); order * order];
            for s in &rs {
                let mut scale = BigInt::one();
                for &i in s {
                    scale *= &im.scale[i];
                }
                for t in &cs {
                    let d = match &im.small {
                        Some(sm) => {
                            for (a, &i) in s.iter().enumerate() {
                                for (b, &j) in t.iter().enumerate() {
                                    buf_small[a * order + b] = sm[i * cols + j];
                                }
                            }
                            exact::det_i64(order, &buf_small)
                        }
                        None => {
                            for (a, &i) in s.iter().enumerate() {
                                for (b, &j) in t.iter().enumerate() {
                                    buf_big[a * order + b] = im.data[i * cols + j].clone();
                                }
                            }
                            exact::det_big(order, &buf_big)
                        }
                    };
                    out.push(BigRational::new(d, scale.clone()));
                }
            }
            Entries::Exact(out)
        }
        Entries::Float(x) => {
            let mut out = Vec::with_capacity(rs.len() * cs.len());
            let mut buf = vec![0.0; order * order];
            for s in &rs {
                for t in &cs {
                    for (a, &i) in s.iter().enumerate() {
                        for (b, &j) in t.iter().enumerate() {
                            buf[a * order + b] = x[i * cols + j];
                        }
                    }
                    out.push(det_f64(order, &mut buf));
                }
            }
            Entries::Float(out)
        }
    };
    Mat::new(rs.len(), cs.len(), entries)
}

/// Determinant of a square matrix.
pub fn det(m: &Mat) -> Result<Scalar, LinalgError> {
    if m.rows() != m.cols() {
        return Err(LinalgError::Shape(format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    if m.rows() == 0 {
        return Ok(Scalar::one_like(m.mode()));
    }
    Ok(compound(m, m.rows())?.get(0, 0))
}

impl Scalar {
    fn one_like(mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::int(1),
            Mode::Float => Scalar::float(1.0),
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `a`).
pub(crate) fn det_f64(n: usize, a: &mut [f64]) -> f64 {
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            d = -d;
        }
        let piv = a[c * n + c];
        d *= piv;
        for i in c + 1..n {
            let f = a[i * n + c] / piv;
            for j in c + 1..n {
                a[i * n + j] -= f * a[c * n + j];
            }
        }
    }
    d
}

/// Ranks of column subsets of one fixed matrix, with the matrix
/// converted once up front.
pub(crate) enum ColumnRanker {
    Exact(IntMatrix),
    Float { rows: usize, cols: usize, data: Vec<f64>, tol: Option<f64> },
}

impl ColumnRanker {
    pub fn new(m: &Mat, tol: Option<f64>) -> Result<ColumnRanker, LinalgError> {
        check_tol(m.mode(), tol)?;
        Ok(match m.entries() {
            Entries::Exact(q) => ColumnRanker::Exact(IntMatrix::from_rationals(m.rows(), m.cols(), q)),
            Entries::Float(x) => ColumnRanker::Float { rows: m.rows(), cols: m.cols(), data: x.clone(), tol },
        })
    }

    pub fn rank_of(&self, cols: &[usize]) -> usize {
        match self {
            ColumnRanker::Exact(im) => exact::rank(&im.select_columns(cols)),
            ColumnRanker::Float { rows, cols: n, data, tol } => {
                let sub: Vec<f64> = (0..*rows).flat_map(|i| cols.iter().map(move |&j| data[i * n + j])).collect();
                float::rank(*rows, cols.len(), &sub, *tol)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        assert_eq!(rank(&Mat::identity(5, Mode::Exact), None).unwrap(), 5);
        assert_eq!(rank(&Mat::identity(5, Mode::Float), None).unwrap(), 5);
        assert!(kernel_basis(&Mat::identity(4, Mode::Exact), None).unwrap().is_empty());
    }

    #[test]
    fn tolerance_rules() {
        let m = Mat::identity(2, Mode::Exact);
        assert_eq!(rank(&m, Some(1e-9)), Err(LinalgError::InvalidTolerance(1e-9)));
        assert!(rank(&m.to_float(), Some(-1.0)).is_err());
        assert_eq!(rank(&m.to_float(), Some(0.5)).unwrap(), 2);
        assert_eq!(rank(&m.to_float(), Some(2.0)).unwrap(), 0);
    }

    #[test]
    fn small_kernel() {
        let m = Mat::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let k = kernel_basis(&m, None).unwrap();
        assert_eq!(k.len(), 1);
        assert!(k[0].is_proportional(&Vector::from_i64(&[1, 1, -1]), 0.0));
    }

    #[test]
    fn khatri_rao_of_unit_vectors() {
        let e1 = Mat::from_rows(&[vec![1], vec![0]]);
        let e2 = Mat::from_rows(&[vec![0], vec![1]]);
        let kr = khatri_rao(&e1, &e2).unwrap();
        assert_eq!(kr, Mat::from_rows(&[vec![0], vec![1], vec![0], vec![0]]));
        assert!(khatri_rao(&e1, &Mat::identity(2, Mode::Exact)).is_err());
    }

    #[test]
    fn compound_basics() {
        let m = Mat::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]);
        assert_eq!(compound(&m, 1).unwrap(), m);
        // minors on columns {1,2}, {1,3}, {2,3}
        assert_eq!(compound(&m, 2).unwrap(), Mat::from_rows(&[vec![-3, -6, -3]]));
        assert_eq!(compound(&m, 3), Err(LinalgError::NotDefined { m: 3, rows: 2, cols: 3 }));
        assert!(compound(&m, 0).is_err());
        let f = compound(&m.to_float(), 2).unwrap();
        assert!((f.get(0, 1).to_f64() + 6.0).abs() < 1e-12);
    }

    #[test]
    fn compound_with_fractions() {
        let m = Mat::from_scalars(2, 2, vec![Scalar::ratio(1, 2), Scalar::int(1), Scalar::ratio(1, 3), Scalar::int(2)]).unwrap();
        assert_eq!(det(&m).unwrap(), Scalar::ratio(2, 3));
    }

    #[test]
    fn range_membership() {
        let m = Mat::from_rows(&[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(in_range_of(&m.column(0), &m, None).unwrap());
        assert!(!in_range_of(&Vector::from_i64(&[1, 1, -1]), &m, None).unwrap());
        assert!(in_range_of(&Vector::from_i64(&[1, 1]), &m, None).is_err());
    }

    #[test]
    fn kronecker_shape() {
        let a = Mat::from_rows(&[vec![1, 2]]);
        let b = Mat::from_rows(&[vec![0], vec![3]]);
        assert_eq!(kronecker(&a, &b).unwrap(), Mat::from_rows(&[vec![0, 0], vec![3, 6]]));
    }
}
