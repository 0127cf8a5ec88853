//! Exact rank and kernel over the rationals.
//!
//! Small problems use fraction-free (Bareiss) elimination, first in checked
//! i128 and then in big integers. Larger problems with i64 entries use
//! elimination modulo a 31-bit prime, which bounds the rational rank from
//! below (full rank mod p is therefore a proof of full rank), and a kernel
//! obtained by p-adic lifting whose vectors are verified by exact
//! multiplication, which bounds the rank from above.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::mat::primitive_integer;

/// Primes just below 2^31. Products of two residues fit in u64 with room
/// for one addition.
pub(crate) const PRIMES: [u64; 6] = [2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549];

/// A rational matrix with every row scaled to integers. Rank, kernel and
/// column-subset ranks are unaffected by the row scaling.
#[derive(Clone, Debug)]
pub(crate) struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
    /// Positive factor each row was multiplied by.
    pub scale: Vec<BigInt>,
    /// The same entries when they all fit in i64.
    pub small: Option<Vec<i64>>,
}

impl IntMatrix {
    pub fn from_rationals(rows: usize, cols: usize, q: &[BigRational]) -> IntMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        let mut scale = Vec::with_capacity(rows);
        for i in 0..rows {
            let row = &q[i * cols..(i + 1) * cols];
            let mut l = BigInt::one();
            for x in row {
                if !x.denom().is_one() {
                    l = l.lcm(x.denom());
                }
            }
            for x in row {
                data.push(x.numer() * (&l / x.denom()));
            }
            scale.push(l);
        }
        Self::with_scale(rows, cols, data, scale)
    }

    #[cfg(test)]
    pub fn from_i64(rows: usize, cols: usize, v: &[i64]) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: v.iter().map(|&x| BigInt::from(x)).collect(),
            scale: vec![BigInt::one(); rows],
            small: Some(v.to_vec()),
        }
    }

    fn with_scale(rows: usize, cols: usize, data: Vec<BigInt>, scale: Vec<BigInt>) -> IntMatrix {
        let small: Option<Vec<i64>> = data.iter().map(|x| x.to_i64()).collect();
        IntMatrix { rows, cols, data, scale, small }
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let data: Vec<BigInt> = (0..self.rows)
            .flat_map(|i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.data[i * self.cols + j].clone())
            .collect();
        let small = self.small.as_ref().map(|s| {
            (0..self.rows).flat_map(|i| cols.iter().map(move |&j| s[i * self.cols + j])).collect()
        });
        IntMatrix { rows: self.rows, cols: cols.len(), data, scale: self.scale.clone(), small }
    }
}

/// Row echelon form produced by fraction-free elimination.
struct Echelon {
    /// Upper rows (0..rank) of the eliminated matrix, row-major over all columns.
    upper: Vec<BigInt>,
    pivots: Vec<usize>,
    cols: usize,
    /// Sign of the row permutation; used for determinants.
    negated: bool,
}

fn bareiss_i128(rows: usize, cols: usize, src: &[i64]) -> Option<Echelon> {
    let mut a: Vec<i128> = src.iter().map(|&x| x as i128).collect();
    let mut prev: i128 = 1;
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut negated = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
            negated = !negated;
        }
        let piv = a[r * cols + c];
        for i in r + 1..rows {
            let f = a[i * cols + c];
            for j in c + 1..cols {
                let x = piv.checked_mul(a[i * cols + j])?;
                let y = f.checked_mul(a[r * cols + j])?;
                a[i * cols + j] = x.checked_sub(y)? / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    let upper = a[..r * cols].iter().map(|&x| BigInt::from(x)).collect();
    Some(Echelon { upper, pivots, cols, negated })
}

fn bareiss_big(rows: usize, cols: usize, src: &[BigInt]) -> Echelon {
    let mut a = src.to_vec();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut negated = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
            negated = !negated;
        }
        let piv = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            for j in c + 1..cols {
                let v = (&piv * &a[i * cols + j] - &f * &a[r * cols + j]) / &prev;
                a[i * cols + j] = v;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    a.truncate(r * cols);
    Echelon { upper: a, pivots, cols, negated }
}

fn echelon(m: &IntMatrix) -> Echelon {
    if let Some(s) = &m.small {
        if let Some(e) = bareiss_i128(m.rows, m.cols, s) {
            return e;
        }
    }
    bareiss_big(m.rows, m.cols, &m.data)
}

/// Kernel basis from an echelon form by back substitution.
fn echelon_kernel(e: &Echelon) -> Vec<Vec<BigRational>> {
    let n = e.cols;
    let r = e.pivots.len();
    let mut is_pivot = vec![false; n];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|&j| !is_pivot[j]) {
        let mut x = vec![BigRational::zero(); n];
        x[f] = BigRational::one();
        for i in (0..r).rev() {
            let p = e.pivots[i];
            let mut s = BigRational::zero();
            for j in p + 1..n {
                let u = &e.upper[i * n + j];
                if !u.is_zero() && !x[j].is_zero() {
                    s += &x[j] * BigRational::from_integer(u.clone());
                }
            }
            x[p] = -s / BigRational::from_integer(e.upper[i * n + p].clone());
        }
        out.push(primitive_integer(&x));
    }
    out
}

/// Determinant of a square integer matrix given row-major.
pub(crate) fn det_i64(n: usize, a: &[i64]) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let e = match bareiss_i128(n, n, a) {
        Some(e) => e,
        None => bareiss_big(n, n, &a.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()),
    };
    det_from(&e, n)
}

pub(crate) fn det_big(n: usize, a: &[BigInt]) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    det_from(&bareiss_big(n, n, a), n)
}

fn det_from(e: &Echelon, n: usize) -> BigInt {
    if e.pivots.len() < n {
        return BigInt::zero();
    }
    // the last Bareiss pivot is the determinant of the permuted matrix
    let d = e.upper[(n - 1) * n + (n - 1)].clone();
    if e.negated {
        -d
    } else {
        d
    }
}

/// Largest matrix dimension handled by plain Bareiss elimination.
const BAREISS_LIMIT: usize = 24;

pub(crate) fn rank(m: &IntMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    if m.rows.min(m.cols) <= BAREISS_LIMIT || m.small.is_none() {
        return echelon(m).pivots.len();
    }
    let small = m.small.as_ref().unwrap();
    let full = m.rows.min(m.cols);
    for &p in PRIMES.iter().take(2) {
        let ech = ModEchelon::from_rows(p, m.rows, m.cols, small);
        if ech.rank() == full {
            return full;
        }
    }
    m.cols - kernel(m).len()
}

pub(crate) fn kernel(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    if m.cols == 0 {
        return Vec::new();
    }
    if m.rows == 0 {
        return (0..m.cols)
            .map(|j| (0..m.cols).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
    }
    if m.rows.min(m.cols) > BAREISS_LIMIT {
        if let Some(small) = &m.small {
            for &p in &PRIMES {
                if let Some(k) = modular_kernel(p, m.rows, m.cols, small) {
                    return k;
                }
            }
        }
    }
    echelon_kernel(&echelon(m))
}

// ---------------------------------------------------------------------------
// arithmetic modulo p

#[inline]
pub(crate) fn reduce_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

#[inline]
fn reduce_i128(x: i128, p: u64) -> u64 {
    x.rem_euclid(p as i128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Row echelon form mod p built one row at a time. Each stored row is
/// normalised so its pivot (its first nonzero entry) equals 1.
#[derive(Clone, Debug)]
pub(crate) struct ModEchelon {
    p: u64,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    /// Caller-supplied label of each accepted row.
    origin: Vec<usize>,
}

impl ModEchelon {
    pub fn new(p: u64, cols: usize) -> Self {
        ModEchelon { p, cols, rows: Vec::new(), pivots: Vec::new(), origin: Vec::new() }
    }

    pub fn from_rows(p: u64, rows: usize, cols: usize, data: &[i64]) -> Self {
        let mut e = ModEchelon::new(p, cols);
        let mut buf = vec![0u64; cols];
        for i in 0..rows {
            if e.rank() == cols {
                break;
            }
            for j in 0..cols {
                buf[j] = reduce_i64(data[i * cols + j], p);
            }
            e.push(&mut buf, i);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Reduces `row` (entries already in `0..p`) against the stored rows and
    /// keeps it if it is independent. Returns whether the rank grew.
    pub fn push(&mut self, row: &mut [u64], origin: usize) -> bool {
        let p = self.p;
        for (k, prow) in self.rows.iter().enumerate() {
            let pc = self.pivots[k];
            let f = row[pc];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in row[pc..].iter_mut().zip(&prow[pc..]) {
                *x = (*x + nf * y) % p;
            }
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(row[pc], p);
        let mut stored = vec![0u64; self.cols];
        for j in pc..self.cols {
            stored[j] = row[j] * inv % p;
        }
        self.rows.push(stored);
        self.pivots.push(pc);
        self.origin.push(origin);
        true
    }
}

/// Kernel over Q of an integer matrix, via elimination mod `p` and p-adic
/// lifting. Returns `None` if the prime turned out to be unlucky.
fn modular_kernel(p: u64, rows: usize, cols: usize, a: &[i64]) -> Option<Vec<Vec<BigRational>>> {
    let ech = ModEchelon::from_rows(p, rows, cols, a);
    let r = ech.rank();
    let row_idx = ech.origin.clone();
    let piv_cols = ech.pivots.clone();
    let mut is_pivot = vec![false; cols];
    for &c in &piv_cols {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&j| !is_pivot[j]).collect();
    if free.is_empty() {
        return Some(Vec::new());
    }
    if r == 0 {
        // all entries vanish mod p; only trust this if they vanish over Q
        if a.iter().any(|&x| x != 0) {
            return None;
        }
        return Some(
            (0..cols)
                .map(|j| (0..cols).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
                .collect(),
        );
    }
    let sub: Vec<i64> = row_idx.iter().flat_map(|&i| piv_cols.iter().map(move |&j| a[i * cols + j])).collect();
    let rhs: Vec<i64> = row_idx.iter().flat_map(|&i| free.iter().map(move |&j| -a[i * cols + j])).collect();
    let sol = dixon_solve(p, r, &sub, free.len(), &rhs)?;
    let mut out = Vec::with_capacity(free.len());
    for (t, &f) in free.iter().enumerate() {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (k, &c) in piv_cols.iter().enumerate() {
            v[c] = sol[k * free.len() + t].clone();
        }
        let v = primitive_integer(&v);
        if !annihilates(rows, cols, a, &v) {
            return None;
        }
        out.push(v);
    }
    Some(out)
}

/// Exact check that `a · v = 0` for an integer vector `v`.
fn annihilates(rows: usize, cols: usize, a: &[i64], v: &[BigRational]) -> bool {
    let ints: Vec<(usize, BigInt)> =
        v.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(j, q)| (j, q.numer().clone())).collect();
    (0..rows).all(|i| {
        let mut s = BigInt::zero();
        for (j, x) in &ints {
            let aij = a[i * cols + j];
            if aij != 0 {
                s += x * aij;
            }
        }
        s.is_zero()
    })
}

/// Inverse of an n×n matrix mod p, or `None` if singular mod p.
fn inverse_mod(p: u64, n: usize, a: &[u64]) -> Option<Vec<u64>> {
    let w = 2 * n;
    let mut m = vec![0u64; n * w];
    for i in 0..n {
        m[i * w..i * w + n].copy_from_slice(&a[i * n..(i + 1) * n]);
        m[i * w + n + i] = 1;
    }
    for c in 0..n {
        let piv = (c..n).find(|&i| m[i * w + c] != 0)?;
        if piv != c {
            for j in 0..w {
                m.swap(piv * w + j, c * w + j);
            }
        }
        let inv = inv_mod(m[c * w + c], p);
        for j in 0..w {
            m[c * w + j] = m[c * w + j] * inv % p;
        }
        let pivot_row: Vec<u64> = m[c * w..(c + 1) * w].to_vec();
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = m[i * w + c];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in m[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                *x = (*x + nf * y) % p;
            }
        }
    }
    Some((0..n).flat_map(|i| m[i * w + n..(i + 1) * w].to_vec()).collect())
}

/// Solves `A X = B` over Q for nonsingular `A` (n×n) and `B` (n×k), both
/// integer, by Dixon's p-adic lifting. Entries are recovered by rational
/// reconstruction; the caller verifies the result.
fn dixon_solve(p: u64, n: usize, a: &[i64], k: usize, b: &[i64]) -> Option<Vec<BigRational>> {
    let amax = a.iter().chain(b).map(|&x| (x as f64).abs()).fold(1.0, f64::max);
    if (n as f64 + 1.0) * amax * p as f64 > 1e37 {
        // residual updates would overflow i128
        return None;
    }
    let amod: Vec<u64> = a.iter().map(|&x| reduce_i64(x, p)).collect();
    let ainv = inverse_mod(p, n, &amod)?;

    // Hadamard-type bounds (log2) for determinant and Cramer numerators.
    let col_norm = |j: usize| -> f64 {
        let s: f64 = (0..n).map(|i| (a[i * n + j] as f64).powi(2)).sum();
        0.5 * s.max(1.0).log2()
    };
    let norms: Vec<f64> = (0..n).map(col_norm).collect();
    let det_bits: f64 = norms.iter().sum();
    let min_norm = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let rhs_bits = (0..k)
        .map(|t| 0.5 * (0..n).map(|i| (b[i * k + t] as f64).powi(2)).sum::<f64>().max(1.0).log2())
        .fold(0.0, f64::max);
    let num_bits = det_bits - min_norm + rhs_bits;
    let need_bits = det_bits + num_bits + 2.0;
    let pbits = (p as f64).log2();
    let max_steps = (need_bits / pbits).ceil() as usize + 2;

    let mut resid: Vec<i128> = b.iter().map(|&x| x as i128).collect();
    let mut digits: Vec<Vec<u64>> = Vec::new();
    let mut xi = vec![0u64; n * k];
    let mut rmod = vec![0u64; n * k];
    let mut next_check = 4usize;
    let pi = p as i128;
    for step in 1..=max_steps {
        for (m, &x) in rmod.iter_mut().zip(&resid) {
            *m = reduce_i128(x, p);
        }
        // xi = ainv * rmod mod p
        for i in 0..n {
            for t in 0..k {
                let mut s: u64 = 0;
                for l in 0..n {
                    s = (s + ainv[i * n + l] * rmod[l * k + t]) % p;
                }
                xi[i * k + t] = s;
            }
        }
        // resid = (resid - A xi) / p
        for i in 0..n {
            for t in 0..k {
                let mut s: i128 = resid[i * k + t];
                for l in 0..n {
                    s -= a[i * n + l] as i128 * xi[l * k + t] as i128;
                }
                debug_assert_eq!(s % pi, 0);
                resid[i * k + t] = s / pi;
            }
        }
        digits.push(xi.clone());
        if step == next_check || step == max_steps {
            next_check *= 2;
            if let Some(sol) = reconstruct_all(p, &digits, n * k) {
                if satisfies(n, a, k, b, &sol) {
                    return Some(sol);
                }
            }
        }
    }
    None
}

fn satisfies(n: usize, a: &[i64], k: usize, b: &[i64], x: &[BigRational]) -> bool {
    (0..k).all(|t| {
        let mut den = BigInt::one();
        for i in 0..n {
            den = den.lcm(x[i * k + t].denom());
        }
        let ints: Vec<BigInt> = (0..n).map(|i| x[i * k + t].numer() * (&den / x[i * k + t].denom())).collect();
        (0..n).all(|i| {
            let mut s = BigInt::zero();
            for l in 0..n {
                s += &ints[l] * a[i * n + l];
            }
            s == &den * b[i * k + t]
        })
    })
}

/// Rational reconstruction of every entry from its p-adic digits, sharing
/// a running denominator between entries.
fn reconstruct_all(p: u64, digits: &[Vec<u64>], len: usize) -> Option<Vec<BigRational>> {
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), digits.len());
    let bound = (&modulus / 2u32).sqrt();
    let mut den = BigInt::one();
    let mut out = Vec::with_capacity(len);
    for e in 0..len {
        let mut v = BigInt::zero();
        for d in digits.iter().rev() {
            v = v * &pb + d[e];
        }
        let y = (v * &den).mod_floor(&modulus);
        let y = if y > &modulus / 2u32 { y - &modulus } else { y };
        if y.abs() <= bound {
            out.push(BigRational::new(y, den.clone()));
            continue;
        }
        let (num, d) = rational_reconstruct(&y.mod_floor(&modulus), &modulus, &bound)?;
        den *= &d;
        out.push(BigRational::new(num, den.clone()));
    }
    Some(out)
}

/// Finds n/d ≡ u (mod m) with |n| ≤ bound, 0 < d ≤ bound.
fn rational_reconstruct(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn is_prime(n: u64) -> bool {
        n > 1 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primes_are_prime() {
        assert!(PRIMES.iter().all(|&p| is_prime(p) && p < 1 << 31));
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det_i64(2, &[1, 2, 3, 4]), BigInt::from(-2));
        assert_eq!(det_i64(3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]), BigInt::from(-1));
        assert_eq!(det_i64(3, &[1, 2, 3, 2, 4, 6, 0, 1, 1]), BigInt::zero());
        assert_eq!(det_i64(0, &[]), BigInt::one());
    }

    #[test]
    fn i128_overflow_falls_back() {
        let n = 6;
        let big = i64::MAX / 3;
        let a: Vec<i64> = (0..n * n).map(|k| if k % (n + 1) == 0 { big } else { (k % 5) as i64 }).collect();
        let b: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(det_i64(n, &a), det_big(n, &b));
    }

    fn random_low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> Vec<i64> {
        let u: Vec<i64> = (0..rows * r).map(|_| rng.gen_range(-9..=9)).collect();
        let v: Vec<i64> = (0..r * cols).map(|_| rng.gen_range(-9..=9)).collect();
        let mut a = vec![0i64; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                a[i * cols + j] = (0..r).map(|l| u[i * r + l] * v[l * cols + j]).sum();
            }
        }
        a
    }

    #[test]
    fn modular_kernel_matches_bareiss() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(rows, cols, r) in &[(40, 30, 27), (30, 45, 30), (60, 60, 59), (35, 35, 10)] {
            let a = random_low_rank(&mut rng, rows, cols, r);
            let m = IntMatrix::from_i64(rows, cols, &a);
            let k = kernel(&m);
            let bareiss = echelon_kernel(&echelon(&m));
            assert_eq!(k.len(), bareiss.len());
            assert_eq!(k.len(), cols - r);
            for v in &k {
                assert!(annihilates(rows, cols, &a, v));
            }
            assert_eq!(rank(&m), r);
            assert_eq!(echelon(&m).pivots.len(), r);
        }
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
        let bound = (&m / 2u32).sqrt();
        // -7/12 mod m
        let u = (BigInt::from(-7) * modinv(&BigInt::from(12), &m)).mod_floor(&m);
        let (n, d) = rational_reconstruct(&u, &m, &bound).unwrap();
        assert_eq!((n, d), (BigInt::from(-7), BigInt::from(12)));
    }

    fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
        let e = a.extended_gcd(m);
        e.x.mod_floor(m)
    }
}
