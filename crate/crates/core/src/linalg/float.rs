//! Floating-point rank and kernel through LU with full pivoting.

use faer::dyn_stack::{GlobalPodBuffer, PodStack};
use faer::linalg::lu::full_pivoting::compute::{lu_in_place, lu_in_place_req, FullPivLuComputeParams};
use faer::Parallelism;

/// Result of an in-place factorisation `P A Q = L U`.
pub(crate) struct FloatLu {
    pub lu: faer::Mat<f64>,
    /// `col_fwd[j]` is the original column placed at position `j`.
    pub col_fwd: Vec<usize>,
    pub rank: usize,
}

/// Factorises `a` in place and counts pivots above the threshold
/// (`tol`, or `max(rows, cols) * eps * max|U|` when `tol` is `None`).
pub(crate) fn factor(mut a: faer::Mat<f64>, tol: Option<f64>) -> FloatLu {
    let (m, n) = (a.nrows(), a.ncols());
    let mut rp = vec![0usize; m];
    let mut rpi = vec![0usize; m];
    let mut cp = vec![0usize; n];
    let mut cpi = vec![0usize; n];
    let params = FullPivLuComputeParams::default();
    let req = lu_in_place_req::<usize, f64>(m, n, Parallelism::None, params).expect("workspace size");
    let mut buf = GlobalPodBuffer::new(req);
    let col_fwd = {
        let (_, _, colp) = lu_in_place(
            a.as_mut(),
            &mut rp,
            &mut rpi,
            &mut cp,
            &mut cpi,
            Parallelism::None,
            PodStack::new(&mut buf),
            params,
        );
        colp.arrays().0.to_vec()
    };
    let size = m.min(n);
    let threshold = tol.unwrap_or_else(|| {
        let mut umax = 0.0f64;
        for j in 0..n {
            for i in 0..=j.min(size.saturating_sub(1)) {
                if i < size {
                    umax = umax.max(a.read(i, j).abs());
                }
            }
        }
        m.max(n) as f64 * f64::EPSILON * umax
    });
    // with full pivoting each pivot dominates the remaining block
    let rank = (0..size).take_while(|&k| a.read(k, k).abs() > threshold).count();
    FloatLu { lu: a, col_fwd, rank }
}

/// Quick full-column-rank test through blocked LU with partial pivoting.
/// `Some(true)` when every pivot clears `margin` times the default
/// threshold; `None` when some pivot is small and the caller should fall
/// back to [`factor`]. Expects `rows >= cols`.
pub(crate) fn full_column_rank_partial(mut a: faer::Mat<f64>, margin: f64) -> Option<bool> {
    use faer::linalg::lu::partial_pivoting::compute as pp;
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        return Some(false);
    }
    if n == 0 {
        return Some(true);
    }
    let mut perm = vec![0usize; m];
    let mut perm_inv = vec![0usize; m];
    let params = pp::PartialPivLuComputeParams::default();
    let req = pp::lu_in_place_req::<usize, f64>(m, n, Parallelism::None, params).expect("workspace size");
    let mut buf = GlobalPodBuffer::new(req);
    pp::lu_in_place(a.as_mut(), &mut perm, &mut perm_inv, Parallelism::None, PodStack::new(&mut buf), params);
    let mut umax = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            umax = umax.max(a.read(i, j).abs());
        }
    }
    let threshold = margin * m as f64 * f64::EPSILON * umax;
    if (0..n).all(|k| a.read(k, k).abs() > threshold) {
        Some(true)
    } else {
        None
    }
}

pub(crate) fn to_faer(rows: usize, cols: usize, data: &[f64]) -> faer::Mat<f64> {
    faer::Mat::from_fn(rows, cols, |i, j| data[i * cols + j])
}

pub(crate) fn rank(rows: usize, cols: usize, data: &[f64], tol: Option<f64>) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    factor(to_faer(rows, cols, data), tol).rank
}

/// Kernel basis from the leading `rank` rows of U; each vector is scaled
/// to unit max-norm.
pub(crate) fn kernel(rows: usize, cols: usize, data: &[f64], tol: Option<f64>) -> Vec<Vec<f64>> {
    if cols == 0 {
        return Vec::new();
    }
    if rows == 0 {
        return (0..cols).map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    }
    let f = factor(to_faer(rows, cols, data), tol);
    let r = f.rank;
    let u = &f.lu;
    let mut out = Vec::with_capacity(cols - r);
    for t in r..cols {
        let mut z = vec![0.0; cols];
        z[t] = 1.0;
        for i in (0..r).rev() {
            let mut s = u.read(i, t);
            for j in i + 1..r {
                s += u.read(i, j) * z[j];
            }
            z[i] = -s / u.read(i, i);
        }
        let mut v = vec![0.0; cols];
        for (j, &orig) in f.col_fwd.iter().enumerate() {
            v[orig] = z[j];
        }
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        out.push(v.into_iter().map(|x| x / scale).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_of_small_matrix() {
        let a = [1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        assert_eq!(rank(2, 3, &a, None), 2);
        let k = kernel(2, 3, &a, None);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!((v[0] - v[1]).abs() < 1e-12 && (v[0] + v[2]).abs() < 1e-12);
    }

    #[test]
    fn partial_pivoting_defers_on_deficient_input() {
        let full = to_faer(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 7.0]);
        assert_eq!(full_column_rank_partial(full, 1e3), Some(true));
        let low = to_faer(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert_eq!(full_column_rank_partial(low, 1e3), None);
        assert_eq!(full_column_rank_partial(to_faer(1, 2, &[1.0, 1.0]), 1e3), Some(false));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        // rank-2 4x5 matrix built from integer factors
        let u = [[1.0, 2.0], [0.0, 1.0], [3.0, -1.0], [2.0, 2.0]];
        let w = [[1.0, 0.0, 2.0, -1.0, 3.0], [0.0, 1.0, 1.0, 4.0, -2.0]];
        let mut a = vec![0.0; 20];
        for i in 0..4 {
            for j in 0..5 {
                a[i * 5 + j] = u[i][0] * w[0][j] + u[i][1] * w[1][j];
            }
        }
        assert_eq!(rank(4, 5, &a, None), 2);
        let k = kernel(4, 5, &a, None);
        assert_eq!(k.len(), 3);
        for v in &k {
            for i in 0..4 {
                let s: f64 = (0..5).map(|j| a[i * 5 + j] * v[j]).sum();
                assert!(s.abs() < 1e-10);
            }
        }
    }
}
