//! Full-column-rank tests for Khatri-Rao products of integer compound
//! matrices, the workhorse of the generic-uniqueness tables.
//!
//! The exact test streams product rows into an echelon form modulo a
//! prime and stops as soon as the rank reaches the column count; a full
//! rank modulo p is a full rank over the rationals, so `true` is a proof.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::exact::{det_i64, reduce_i64, ModEchelon, PRIMES};
use super::float;
use super::subsets::combinations;
use super::{LinalgError, Mat};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMat {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> IntMat {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        IntMat { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn to_mat(&self) -> Mat {
        Mat::from_i64(self.rows, self.cols, &self.data)
    }

    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.data.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
    }
}

/// m-th compound of an integer matrix; fails if a minor leaves i64.
pub fn compound_int(a: &IntMat, m: usize) -> Result<IntMat, LinalgError> {
    if m < 1 || m > a.rows.min(a.cols) {
        return Err(LinalgError::NotDefined { m, rows: a.rows, cols: a.cols });
    }
    let rs: Vec<Vec<usize>> = combinations(a.rows, m).collect();
    let cs: Vec<Vec<usize>> = combinations(a.cols, m).collect();
    let mut out = Vec::with_capacity(rs.len() * cs.len());
    let mut buf = vec![0i64; m * m];
    for s in &rs {
        for t in &cs {
            for (x, &i) in s.iter().enumerate() {
                for (y, &j) in t.iter().enumerate() {
                    buf[x * m + y] = a.data[i * a.cols + j];
                }
            }
            let d = det_i64(m, &buf);
            out.push(d.to_i64().ok_or_else(|| LinalgError::Overflow(format!("{m}x{m} minor {d}")))?);
        }
    }
    Ok(IntMat::new(rs.len(), cs.len(), out))
}

/// Row pairs of `ca ⊙ cb` that matter: all of them, or `s <= t` when the
/// two factors are the same matrix (rows `(s,t)` and `(t,s)` coincide).
fn row_pairs(ca: &IntMat, cb: &IntMat, symmetric: bool) -> impl Iterator<Item = (usize, usize)> {
    let nb = cb.rows;
    let na = ca.rows;
    (0..na).flat_map(move |s| (if symmetric { s } else { 0 }..nb).map(move |t| (s, t)))
}

/// Number of distinct rows that [`row_pairs`] visits.
pub fn effective_rows(rows_a: usize, rows_b: usize, symmetric: bool) -> u128 {
    if symmetric {
        let n = rows_a as u128;
        n * (n + 1) / 2
    } else {
        rows_a as u128 * rows_b as u128
    }
}

/// Exact test: does `ca ⊙ cb` have full column rank? `true` is a proof;
/// `false` means two primes both saw a rank drop.
pub fn kr_full_column_rank_exact(ca: &IntMat, cb: &IntMat, symmetric: bool) -> bool {
    assert_eq!(ca.cols, cb.cols, "column counts differ");
    let cols = ca.cols;
    if (effective_rows(ca.rows, cb.rows, symmetric)) < cols as u128 {
        return false;
    }
    for &p in PRIMES.iter().take(2) {
        let am: Vec<u64> = ca.data.iter().map(|&x| reduce_i64(x, p)).collect();
        let bm: Vec<u64> = cb.data.iter().map(|&x| reduce_i64(x, p)).collect();
        let mut ech = ModEchelon::new(p, cols);
        let mut row = vec![0u64; cols];
        for (k, (s, t)) in row_pairs(ca, cb, symmetric).enumerate() {
            for c in 0..cols {
                row[c] = am[s * cols + c] * bm[t * cols + c] % p;
            }
            ech.push(&mut row, k);
            if ech.is_full() {
                return true;
            }
        }
    }
    false
}

/// Float test with default tolerance after row and column equilibration.
/// Tries partial pivoting first and only repeats with full pivoting when a
/// pivot comes out small. Not a proof.
pub fn kr_full_column_rank_float(ca: &IntMat, cb: &IntMat, symmetric: bool) -> bool {
    assert_eq!(ca.cols, cb.cols, "column counts differ");
    let cols = ca.cols;
    let pairs: Vec<(usize, usize)> = row_pairs(ca, cb, symmetric).collect();
    if pairs.len() < cols {
        return false;
    }
    let colmax: Vec<f64> = (0..cols)
        .map(|c| {
            let ma = (0..ca.rows).map(|s| (ca.get(s, c) as f64).abs()).fold(0.0, f64::max);
            let mb = (0..cb.rows).map(|t| (cb.get(t, c) as f64).abs()).fold(0.0, f64::max);
            let v = ma * mb;
            if v == 0.0 {
                1.0
            } else {
                v
            }
        })
        .collect();
    let entry = |s: usize, t: usize, c: usize| ca.get(s, c) as f64 * cb.get(t, c) as f64 / colmax[c];
    let rowmax: Vec<f64> = pairs
        .iter()
        .map(|&(s, t)| {
            let v = (0..cols).map(|c| entry(s, t, c).abs()).fold(0.0, f64::max);
            if v == 0.0 {
                1.0
            } else {
                v
            }
        })
        .collect();
    let build = || {
        faer::Mat::from_fn(pairs.len(), cols, |i, c| {
            let (s, t) = pairs[i];
            entry(s, t, c) / rowmax[i]
        })
    };
    // rebuilt rather than cloned: the large table cells are ~2 GB
    if let Some(full) = float::full_column_rank_partial(build(), 1e3) {
        return full;
    }
    float::factor(build(), None).rank == cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{compound, khatri_rao, rank};

    fn sample() -> (IntMat, IntMat) {
        let a = IntMat::new(3, 5, vec![1, 0, 0, 1, 1, 0, 1, 0, 1, 2, 0, 0, 1, 1, 3]);
        let b = IntMat::new(3, 5, vec![1, 0, 0, 1, 1, 0, 1, 0, 1, 3, 0, 0, 1, 1, 5]);
        (a, b)
    }

    #[test]
    fn integer_compound_matches_generic() {
        let (a, _) = sample();
        for m in 1..=3 {
            assert_eq!(compound_int(&a, m).unwrap().to_mat(), compound(&a.to_mat(), m).unwrap());
        }
        assert!(compound_int(&a, 4).is_err());
    }

    #[test]
    fn streaming_agrees_with_rank() {
        let (a, b) = sample();
        let ca = compound_int(&a, 2).unwrap();
        let cb = compound_int(&b, 2).unwrap();
        let kr = khatri_rao(&ca.to_mat(), &cb.to_mat()).unwrap();
        let full = rank(&kr, None).unwrap() == kr.cols();
        assert!(!full);
        assert_eq!(kr_full_column_rank_exact(&ca, &cb, false), full);
        assert_eq!(kr_full_column_rank_float(&ca, &cb, false), full);
        let c1a = compound_int(&a, 1).unwrap();
        let c1b = compound_int(&b, 1).unwrap();
        assert!(kr_full_column_rank_exact(&c1a, &c1b, false));
        assert!(kr_full_column_rank_float(&c1a, &c1b, false));
    }

    #[test]
    fn symmetric_rows_are_deduplicated() {
        let (a, _) = sample();
        let ca = compound_int(&a, 2).unwrap();
        let kr = khatri_rao(&ca.to_mat(), &ca.to_mat()).unwrap();
        let full = rank(&kr, None).unwrap() == kr.cols();
        assert_eq!(kr_full_column_rank_exact(&ca, &ca, true), full);
        assert_eq!(effective_rows(3, 3, true), 6);
    }
}
