//! Uniqueness conditions on a pair (or triple) of factor matrices:
//! k-rank, the H-profile, d̂ vectors, and deciders for (Km), (Cm), (Hm),
//! (Um) and (Wm).
//!
//! For a vector `d` of length R, `d̂ = hat_vector(d, m)` lists the products
//! `d_{i1}⋯d_{im}` over m-subsets in lexicographic order. (Um) asks that
//! `(C_m(A) ⊙ C_m(B)) d̂ = 0` force `ω(d) ≤ m − 1`; (Wm) asks the same only
//! for `d ∈ range(Cᵀ)`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::witness::{compound_int, kr_full_column_rank_exact, IntMat};
use crate::linalg::{
    binomial, binomial_usize, check_tol, combinations, compound, in_range_of, kernel_basis, khatri_rao, rank, subset_rank,
    subset_unrank, ColumnRanker, IntMatrix, LinalgError, Mat, Mode, Scalar, Vector,
};

/// Largest R for which the exhaustive H-profile is computed.
pub const H_PROFILE_MAX_R: usize = 14;
/// Largest R for the exhaustive support-pattern search behind (Um)/(Wm).
pub const SUPPORT_SEARCH_MAX_R: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
            Verdict::NotApplicable => "n/a",
        };
        f.write_str(s)
    }
}

/// Verdict of one condition. A witness is only ever attached to `Fails`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vector>,
    pub detail: String,
}

impl ConditionOutcome {
    pub fn holds(detail: impl Into<String>) -> Self {
        ConditionOutcome { verdict: Verdict::Holds, witness: None, detail: detail.into() }
    }

    pub fn fails(detail: impl Into<String>) -> Self {
        ConditionOutcome { verdict: Verdict::Fails, witness: None, detail: detail.into() }
    }

    pub fn fails_with(witness: Vector, detail: impl Into<String>) -> Self {
        ConditionOutcome { verdict: Verdict::Fails, witness: Some(witness), detail: detail.into() }
    }

    pub fn unknown(detail: impl Into<String>) -> Self {
        ConditionOutcome { verdict: Verdict::Unknown, witness: None, detail: detail.into() }
    }

    pub fn not_applicable(detail: impl Into<String>) -> Self {
        ConditionOutcome { verdict: Verdict::NotApplicable, witness: None, detail: detail.into() }
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }
}

/// `values[δ-1] = min over δ-column subsets S of r(A_S) + r(B_S) − δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HProfile {
    pub values: Vec<i64>,
}

impl HProfile {
    /// H(δ) for 1 ≤ δ ≤ R.
    pub fn at(&self, delta: usize) -> i64 {
        self.values[delta - 1]
    }
}

fn same_cols(a: &Mat, b: &Mat, tol: Option<f64>) -> Result<usize, LinalgError> {
    check_tol(a.mode(), tol)?;
    if a.cols() != b.cols() {
        return Err(LinalgError::Shape(format!("{} vs {} columns", a.cols(), b.cols())));
    }
    if a.mode() != b.mode() {
        return Err(LinalgError::MixedMode);
    }
    Ok(a.cols())
}

/// Largest k such that every k columns are independent; 0 with a zero column.
pub fn krank(m: &Mat, tol: Option<f64>) -> Result<usize, LinalgError> {
    let n = m.cols();
    let ranker = ColumnRanker::new(m, tol)?;
    if (0..n).any(|j| ranker.rank_of(&[j]) == 0) {
        return Ok(0);
    }
    let top = m.rows().min(n);
    for k in 2..=top {
        if combinations(n, k).any(|s| ranker.rank_of(&s) < k) {
            return Ok(k - 1);
        }
    }
    Ok(top)
}

pub fn h_profile(a: &Mat, b: &Mat, tol: Option<f64>) -> Result<HProfile, LinalgError> {
    let r = same_cols(a, b, tol)?;
    let ra = ColumnRanker::new(a, tol)?;
    let rb = ColumnRanker::new(b, tol)?;
    let values = (1..=r)
        .map(|delta| {
            combinations(r, delta)
                .map(|s| (ra.rank_of(&s) + rb.rank_of(&s)) as i64 - delta as i64)
                .min()
                .unwrap_or(0)
        })
        .collect();
    Ok(HProfile { values })
}

fn one(mode: Mode) -> Scalar {
    match mode {
        Mode::Exact => Scalar::int(1),
        Mode::Float => Scalar::float(1.0),
    }
}

/// Products `Π_{i∈S} d_i` over the m-subsets S of `1..=R`, lexicographic.
pub fn hat_vector(d: &Vector, m: usize) -> Result<Vector, LinalgError> {
    let r = d.len();
    if m < 1 || m > r {
        return Err(LinalgError::NotDefined { m, rows: 1, cols: r });
    }
    let ds = d.to_scalars();
    let mut out = Vec::with_capacity(binomial_usize(r, m));
    for s in combinations(r, m) {
        let mut p = one(d.mode());
        for &i in &s {
            p = p.mul(&ds[i])?;
        }
        out.push(p);
    }
    Vector::from_scalars(out)
}

/// Float entries below `1e-8 * max|v|` count as zero.
fn zero_threshold(v: &Vector) -> f64 {
    match v.mode() {
        Mode::Exact => 0.0,
        Mode::Float => 1e-8 * v.max_abs(),
    }
}

fn nonzero_at(v: &Vector, i: usize, thr: f64) -> bool {
    match v.mode() {
        Mode::Exact => !v.is_zero_at(i),
        Mode::Float => v.get(i).to_f64().abs() > thr,
    }
}

/// A `d` with `ω(d) ≥ m` and `hat_vector(d, m)` proportional to `v`, if any.
pub fn reconstruct_from_hat(v: &Vector, m: usize, r: usize) -> Option<Vector> {
    if m < 1 || m > r || v.len() != binomial_usize(r, m) {
        return None;
    }
    let thr = zero_threshold(v);
    let nz = v.support(thr);
    if nz.is_empty() {
        return None;
    }
    let mut in_t = vec![false; r];
    for &p in &nz {
        for i in subset_unrank(r, m, p) {
            in_t[i] = true;
        }
    }
    let t: Vec<usize> = (0..r).filter(|&i| in_t[i]).collect();
    // every m-subset of T must be present
    if binomial_usize(t.len(), m) != nz.len() {
        return None;
    }
    let mode = v.mode();
    let mut d = vec![Scalar::zero(mode); r];
    if t.len() == m {
        for &i in &t {
            d[i] = one(mode);
        }
    } else {
        let t0 = t[0];
        d[t0] = one(mode);
        for &b in &t[1..] {
            let s: Vec<usize> = t.iter().copied().filter(|&x| x != t0 && x != b).take(m - 1).collect();
            let mut with_b = s.clone();
            with_b.push(b);
            with_b.sort_unstable();
            let mut with_0 = s;
            with_0.push(t0);
            with_0.sort_unstable();
            d[b] = v.get(subset_rank(r, &with_b)).div(&v.get(subset_rank(r, &with_0))).ok()?;
        }
    }
    let d = Vector::from_scalars(d).ok()?;
    let h = hat_vector(&d, m).ok()?;
    h.is_proportional(v, 1e-7).then_some(d)
}

pub fn check_k(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<ConditionOutcome, LinalgError> {
    let r = same_cols(a, b, tol)?;
    if m < 1 {
        return Ok(ConditionOutcome::not_applicable("m < 1"));
    }
    let (ra, rb) = (rank(a, tol)?, rank(b, tol)?);
    let (ka, kb) = (krank(a, tol)?, krank(b, tol)?);
    let detail = format!("r_A={ra} k_A={ka} r_B={rb} k_B={kb} R={r} m={m}");
    let holds = (ra + kb >= r + m && ka >= m) || (rb + ka >= r + m && kb >= m);
    Ok(if holds { ConditionOutcome::holds(detail) } else { ConditionOutcome::fails(detail) })
}

fn compound_undefined(a: &Mat, b: &Mat, m: usize) -> Option<ConditionOutcome> {
    let r = a.cols();
    if m < 1 || m > r || m > a.rows() || m > b.rows() {
        Some(ConditionOutcome::not_applicable(format!(
            "C_{m} undefined for {}x{r} and {}x{r}",
            a.rows(),
            b.rows()
        )))
    } else {
        None
    }
}

/// `C_m(A) ⊙ C_m(B)`.
pub fn compound_product(a: &Mat, b: &Mat, m: usize) -> Result<Mat, LinalgError> {
    khatri_rao(&compound(a, m)?, &compound(b, m)?)
}

/// Integer full-column-rank test that streams product rows modulo a prime;
/// `Some(true)` is a proof, anything else means "not shown".
fn streamed_full_rank(a: &Mat, b: &Mat, m: usize) -> Option<bool> {
    let to_int = |x: &Mat| -> Option<IntMat> {
        let im = IntMatrix::from_rationals(x.rows(), x.cols(), x.exact()?);
        Some(IntMat::new(x.rows(), x.cols(), im.small?))
    };
    let ca = compound_int(&to_int(a)?, m).ok()?;
    let cb = compound_int(&to_int(b)?, m).ok()?;
    Some(kr_full_column_rank_exact(&ca, &cb, false))
}

/// Kernel basis of `C_m(A) ⊙ C_m(B)` (empty when it has full column rank).
fn compound_kernel(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<Vec<Vector>, LinalgError> {
    if a.mode() == Mode::Exact && tol.is_none() && streamed_full_rank(a, b, m) == Some(true) {
        return Ok(Vec::new());
    }
    kernel_basis(&compound_product(a, b, m)?, tol)
}

pub fn check_c(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<ConditionOutcome, LinalgError> {
    let r = same_cols(a, b, tol)?;
    if let Some(na) = compound_undefined(a, b, m) {
        return Ok(na);
    }
    let cols = binomial(r, m);
    let rows = binomial(a.rows(), m) * binomial(b.rows(), m);
    if rows < cols {
        return Ok(ConditionOutcome::fails(format!("{rows} rows < {cols} columns")));
    }
    let ker = compound_kernel(a, b, m, tol)?;
    Ok(if ker.is_empty() {
        ConditionOutcome::holds(format!("{rows}x{cols} product has full column rank"))
    } else {
        ConditionOutcome::fails(format!("{rows}x{cols} product has kernel dimension {}", ker.len()))
    })
}

pub fn check_h(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<ConditionOutcome, LinalgError> {
    let r = same_cols(a, b, tol)?;
    if m < 1 {
        return Ok(ConditionOutcome::not_applicable("m < 1"));
    }
    if r > H_PROFILE_MAX_R {
        return Ok(ConditionOutcome::unknown(format!("R={r} exceeds the H-profile limit {H_PROFILE_MAX_R}")));
    }
    let h = h_profile(a, b, tol)?;
    for delta in 1..=r {
        let need = delta.min(m) as i64;
        if h.at(delta) < need {
            return Ok(ConditionOutcome::fails(format!("H({delta})={} < {need}; H={:?}", h.at(delta), h.values)));
        }
    }
    Ok(ConditionOutcome::holds(format!("H={:?}", h.values)))
}

/// Vectors d with `ω(d) ≥ m` and `d̂` in the kernel, grouped by support.
#[derive(Clone, Debug, PartialEq)]
enum Finding {
    /// The witnesses with this support are exactly the nonzero multiples of d.
    Unique(Vector),
    /// Every vector whose support is exactly this m-set is a witness.
    AnySupport(Vec<usize>),
    /// Some witnesses with this support; `d` is one of them.
    Family(Vec<usize>, Vector),
}

impl Finding {
    fn example(&self, r: usize, mode: Mode) -> Vector {
        match self {
            Finding::Unique(d) | Finding::Family(_, d) => d.clone(),
            Finding::AnySupport(t) => {
                let s: Vec<Scalar> =
                    (0..r).map(|i| if t.contains(&i) { one(mode) } else { Scalar::zero(mode) }).collect();
                Vector::from_scalars(s).expect("single mode")
            }
        }
    }
}

struct UAnalysis {
    outcome: ConditionOutcome,
    findings: Vec<Finding>,
    /// Every witness is covered by `findings`.
    complete: bool,
}

fn support_of(v: &Vector) -> Vec<usize> {
    v.support(zero_threshold(v))
}

fn classify(d: Vector, m: usize) -> Finding {
    let t = support_of(&d);
    if t.len() == m {
        Finding::AnySupport(t)
    } else {
        Finding::Unique(d)
    }
}

fn analyze_u(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<UAnalysis, LinalgError> {
    let r = same_cols(a, b, tol)?;
    if let Some(na) = compound_undefined(a, b, m) {
        return Ok(UAnalysis { outcome: na, findings: Vec::new(), complete: true });
    }
    let ker = compound_kernel(a, b, m, tol)?;
    if ker.is_empty() {
        return Ok(UAnalysis {
            outcome: ConditionOutcome::holds(format!("(C{m}) holds")),
            findings: Vec::new(),
            complete: true,
        });
    }
    let dim = ker.len();
    let (findings, complete) = if dim == 1 {
        (reconstruct_from_hat(&ker[0], m, r).map(|d| classify(d, m)).into_iter().collect(), true)
    } else if a.mode() == Mode::Exact && r <= SUPPORT_SEARCH_MAX_R {
        let basis: Vec<Vec<BigRational>> = ker.iter().map(|v| v.exact().expect("exact kernel").to_vec()).collect();
        support_search(&basis, r, m)
    } else {
        let found = ker
            .iter()
            .filter_map(|v| reconstruct_from_hat(v, m, r))
            .map(|d| Finding::Family(support_of(&d), d))
            .collect();
        (found, false)
    };
    let outcome = if let Some(f) = findings.first() {
        let d = f.example(r, a.mode());
        ConditionOutcome::fails_with(d, format!("kernel dimension {dim}; {} witness support(s)", findings.len()))
    } else if complete {
        ConditionOutcome::holds(format!("kernel dimension {dim}, no kernel vector has the form d̂ with ω(d) ≥ {m}"))
    } else if r <= H_PROFILE_MAX_R && check_h(a, b, m, tol)?.is_holds() {
        ConditionOutcome::holds(format!("(H{m}) holds"))
    } else {
        ConditionOutcome::unknown(format!("kernel dimension {dim}; no witness among basis vectors"))
    };
    Ok(UAnalysis { outcome, findings, complete })
}

fn combine(basis: &[Vec<BigRational>], coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut w = vec![BigRational::zero(); basis[0].len()];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (x, y) in w.iter_mut().zip(b) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
    }
    w
}

/// A combination `Σ x^j b_j` that is nonzero on every coordinate in
/// `coords`, assuming no coordinate vanishes on all of `basis`.
fn full_support_combination(basis: &[Vec<BigRational>], coords: &[usize]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    // each coordinate is a nonzero polynomial in x of degree < k
    let tries = coords.len() * k.saturating_sub(1) + 1;
    for x in 1..=tries as i64 {
        let xr = BigRational::from_integer(x.into());
        let mut c = BigRational::from_integer(1.into());
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push(c.clone());
            c *= &xr;
        }
        let w = combine(basis, &coeffs);
        if coords.iter().all(|&i| !w[i].is_zero()) {
            return Some(w);
        }
    }
    None
}

/// Exact kernel of a small rational matrix given by rows.
fn small_kernel(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    if rows.is_empty() {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|i| BigRational::from_integer(if i == j { 1 } else { 0 }.into()))
                    .collect()
            })
            .collect();
    }
    let data: Vec<BigRational> = rows.iter().flatten().cloned().collect();
    let m = Mat::from_rationals(rows.len(), cols, data).expect("shape");
    kernel_basis(&m, None)
        .expect("exact kernel")
        .into_iter()
        .map(|v| v.exact().expect("exact").to_vec())
        .collect()
}

/// Enumerates candidate supports T. For each, K_T is the part of the
/// kernel whose nonzeros sit on m-subsets of T.
fn support_search(basis: &[Vec<BigRational>], r: usize, m: usize) -> (Vec<Finding>, bool) {
    let len = basis[0].len();
    let masks: Vec<u32> = (0..len).map(|p| subset_unrank(r, m, p).iter().fold(0u32, |acc, &i| acc | 1 << i)).collect();
    let live: Vec<usize> = (0..len).filter(|&p| basis.iter().any(|b| !b[p].is_zero())).collect();
    let mut findings = Vec::new();
    let mut complete = true;
    for size in m..=r {
        for t in combinations(r, size) {
            let tmask = t.iter().fold(0u32, |acc, &i| acc | 1 << i);
            let outside: Vec<Vec<BigRational>> = live
                .iter()
                .filter(|&&p| masks[p] & !tmask != 0)
                .map(|&p| basis.iter().map(|b| b[p].clone()).collect())
                .collect();
            let z = small_kernel(&outside, basis.len());
            if z.is_empty() {
                continue;
            }
            let kt: Vec<Vec<BigRational>> = z.iter().map(|c| combine(basis, c)).collect();
            let inside: Vec<usize> = (0..len).filter(|&p| masks[p] & !tmask == 0).collect();
            if inside.iter().any(|&p| kt.iter().all(|w| w[p].is_zero())) {
                continue;
            }
            let as_vec = |w: &Vec<BigRational>| Vector::from_rationals(w.clone());
            if kt.len() == 1 {
                if let Some(d) = reconstruct_from_hat(&as_vec(&kt[0]), m, r) {
                    findings.push(if size == m { Finding::AnySupport(t) } else { Finding::Unique(d) });
                }
                continue;
            }
            let w = full_support_combination(&kt, &inside).expect("no coordinate vanishes identically");
            if size == m + 1 {
                // hat(d)[T∖t] = (Π d) / d_t, so d_t = 1 / w[T∖t] reproduces w
                let mut d = vec![BigRational::zero(); r];
                for &i in &t {
                    let rest: Vec<usize> = t.iter().copied().filter(|&x| x != i).collect();
                    d[i] = w[subset_rank(r, &rest)].recip();
                }
                findings.push(Finding::Family(t, Vector::from_rationals(d)));
                continue;
            }
            let found = kt
                .iter()
                .chain(std::iter::once(&w))
                .find_map(|v| reconstruct_from_hat(&as_vec(v), m, r).filter(|d| support_of(d).len() == size));
            match found {
                Some(d) => findings.push(Finding::Family(t, d)),
                None => complete = false,
            }
        }
    }
    (findings, complete)
}

pub fn check_u(a: &Mat, b: &Mat, m: usize, tol: Option<f64>) -> Result<ConditionOutcome, LinalgError> {
    Ok(analyze_u(a, b, m, tol)?.outcome)
}

/// A vector in `range(ct)` whose support is exactly `t`, if one exists.
fn range_vector_with_support(ct: &Mat, t: &[usize], tol: Option<f64>) -> Result<Option<Vector>, LinalgError> {
    let outside: Vec<usize> = (0..ct.rows()).filter(|i| !t.contains(i)).collect();
    let z = if outside.is_empty() {
        (0..ct.cols()).map(|j| Mat::identity(ct.cols(), ct.mode()).column(j)).collect()
    } else {
        kernel_basis(&ct.select_rows(&outside), tol)?
    };
    if z.is_empty() {
        return Ok(None);
    }
    let ys: Vec<Vector> = z.iter().map(|c| ct.mul_vec(c)).collect::<Result<_, _>>()?;
    Ok(match ct.mode() {
        Mode::Exact => {
            let basis: Vec<Vec<BigRational>> = ys.iter().map(|y| y.exact().expect("exact").to_vec()).collect();
            if t.iter().any(|&i| basis.iter().all(|y| y[i].is_zero())) {
                None
            } else {
                full_support_combination(&basis, t).map(Vector::from_rationals)
            }
        }
        Mode::Float => {
            // generic combination; accept it if it is clearly nonzero on t
            let n = ct.rows();
            let mut w = vec![0.0; n];
            for (j, y) in ys.iter().enumerate() {
                let c = 1.0 + 0.618 * j as f64;
                for (i, x) in w.iter_mut().enumerate() {
                    *x += c * y.get(i).to_f64();
                }
            }
            let v = Vector::from_f64(w);
            let thr = zero_threshold(&v);
            t.iter().all(|&i| nonzero_at(&v, i, thr)).then_some(v)
        }
    })
}

pub fn check_w(a: &Mat, b: &Mat, c: &Mat, m: usize, tol: Option<f64>) -> Result<ConditionOutcome, LinalgError> {
    same_cols(a, b, tol)?;
    same_cols(a, c, tol)?;
    let an = analyze_u(a, b, m, tol)?;
    match an.outcome.verdict {
        Verdict::Holds => return Ok(ConditionOutcome::holds(format!("(U{m}) holds"))),
        Verdict::NotApplicable => return Ok(an.outcome),
        _ => {}
    }
    let ct = c.transpose();
    let mut undecided = !an.complete;
    for f in &an.findings {
        match f {
            Finding::Unique(d) => {
                if in_range_of(d, &ct, tol)? {
                    return Ok(ConditionOutcome::fails_with(d.clone(), "witness lies in range(Cᵀ)"));
                }
            }
            Finding::AnySupport(t) => {
                if let Some(y) = range_vector_with_support(&ct, t, tol)? {
                    return Ok(ConditionOutcome::fails_with(y, format!("range(Cᵀ) has a vector with support {t:?}")));
                }
            }
            Finding::Family(_, d) => {
                if in_range_of(d, &ct, tol)? {
                    return Ok(ConditionOutcome::fails_with(d.clone(), "witness lies in range(Cᵀ)"));
                }
                undecided = true;
            }
        }
    }
    Ok(if undecided {
        ConditionOutcome::unknown("(U) witnesses found, none shown to lie in range(Cᵀ)")
    } else {
        ConditionOutcome::holds(format!("no (U{m}) witness lies in range(Cᵀ)"))
    })
}

/// For column r of M: which x give `Mᵀx` exactly one nonzero entry, in
/// position r. Such x exist iff column r is outside the span of the others.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    /// 0-based column index.
    pub column: usize,
    /// Dimension of the space of x orthogonal to every other column.
    pub kernel_dim: usize,
    pub in_span_of_others: bool,
    pub nonempty: bool,
    /// The unique direction when `kernel_dim` is 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vector>,
}

pub fn one_nonzero_directions(m: &Mat, tol: Option<f64>) -> Result<Vec<DirectionReport>, LinalgError> {
    let n = m.cols();
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != col).collect();
        let ker = if others.is_empty() {
            (0..m.rows()).map(|j| Mat::identity(m.rows(), m.mode()).column(j)).collect()
        } else {
            kernel_basis(&m.select_columns(&others).transpose(), tol)?
        };
        let mc = m.column(col);
        let mut hits = false;
        for x in &ker {
            let dot = Mat::from_scalars(1, x.len(), x.to_scalars())?.mul_vec(&mc)?;
            let thr = match dot.mode() {
                Mode::Exact => 0.0,
                Mode::Float => 1e-8 * mc.max_abs().max(1.0),
            };
            if nonzero_at(&dot, 0, thr) {
                hits = true;
            }
        }
        out.push(DirectionReport {
            column: col,
            kernel_dim: ker.len(),
            in_span_of_others: !hits,
            nonempty: hits,
            direction: if ker.len() == 1 { ker.into_iter().next() } else { None },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn cube4() -> (Mat, Mat, Mat) {
        (
            m(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 1], &[0, 0, 1, 0, 1], &[0, 0, 0, 1, 0]]),
            m(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 1], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 1]]),
            m(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 1], &[0, 0, 0, 1, 1]]),
        )
    }

    fn pair35() -> (Mat, Mat) {
        (
            m(&[&[1, 0, 0, 1, 1], &[0, 1, 0, 1, 2], &[0, 0, 1, 1, 3]]),
            m(&[&[1, 0, 0, 1, 1], &[0, 1, 0, 1, 3], &[0, 0, 1, 1, 5]]),
        )
    }

    #[test]
    fn krank_small_cases() {
        assert_eq!(krank(&Mat::identity(4, Mode::Exact), None).unwrap(), 4);
        let a = m(&[&[1, 0, 1, 1], &[0, 1, 1, 2]]);
        let b = m(&[&[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 0, 0, 1]]);
        let c = m(&[&[6, -6, -3, -2], &[12, -24, -8, -6], &[2, 6, -3, -6]]);
        assert_eq!(krank(&a, None).unwrap(), 2);
        assert_eq!(krank(&b, None).unwrap(), 3);
        assert_eq!(krank(&c, None).unwrap(), 3);
        assert_eq!(krank(&m(&[&[1, 0], &[2, 0]]), None).unwrap(), 0);
        assert_eq!(krank(&m(&[&[1, 2], &[2, 4]]), None).unwrap(), 1);
        let (a, b, c) = cube4();
        for x in [&a, &b, &c] {
            assert_eq!(krank(x, None).unwrap(), 3);
            assert_eq!(rank(x, None).unwrap(), 4);
        }
    }

    #[test]
    fn h_profile_cube() {
        let (a, b, c) = cube4();
        let want: Vec<i64> = (1..=5).map(|d: i64| d.min(3)).collect();
        for (x, y) in [(&a, &b), (&b, &c), (&c, &a)] {
            assert_eq!(h_profile(x, y, None).unwrap().values, want);
            assert!(check_h(x, y, 3, None).unwrap().is_holds());
            assert!(check_c(x, y, 3, None).unwrap().is_holds());
            assert!(check_k(x, y, 3, None).unwrap().is_fails());
        }
        let id = Mat::identity(5, Mode::Exact);
        assert_eq!(h_profile(&id, &id, None).unwrap().values, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn hat_vector_products() {
        let d = Vector::from_i64(&[1, 2, 3]);
        assert_eq!(hat_vector(&d, 2).unwrap(), Vector::from_i64(&[2, 3, 6]));
        assert_eq!(hat_vector(&d, 3).unwrap(), Vector::from_i64(&[6]));
        assert!(hat_vector(&Vector::from_i64(&[0, 5, 0, 0]), 2).unwrap().is_zero());
        assert!(hat_vector(&d, 4).is_err());
    }

    #[test]
    fn reconstruct_cases() {
        let ones = Vector::from_i64(&[1, 1, 1, 1, 1, 1]);
        let d = reconstruct_from_hat(&ones, 2, 4).unwrap();
        assert!(d.is_proportional(&Vector::from_i64(&[1, 1, 1, 1]), 0.0));
        let d = reconstruct_from_hat(&Vector::from_i64(&[1, 0, 0]), 2, 3).unwrap();
        assert_eq!(d, Vector::from_i64(&[1, 1, 0]));
        let d = reconstruct_from_hat(&Vector::from_i64(&[1, 0, 0, 0, 0, 0]), 2, 4).unwrap();
        assert_eq!(d, Vector::from_i64(&[1, 1, 0, 0]));
        assert!(reconstruct_from_hat(&Vector::from_i64(&[1, 1, 0, 0, 0, 0]), 2, 4).is_none());
        let v = Vector::from_i64(&[0, 0, -4, 0, 0, 2, 0, -4, 0, -1]);
        assert!(reconstruct_from_hat(&v, 2, 5).is_none());
        let d = Vector::from_i64(&[2, 0, -3, 5, 1]);
        let back = reconstruct_from_hat(&hat_vector(&d, 3).unwrap(), 3, 5).unwrap();
        assert!(back.is_proportional(&d, 0.0));
    }

    #[test]
    fn pair_with_one_dimensional_kernel() {
        let (a, b) = pair35();
        let p = compound_product(&a, &b, 2).unwrap();
        let reference = m(&[
            &[1, 0, 1, 6, 0, 1, 1, 0, 0, 2],
            &[0, 0, 1, 10, 0, 0, 0, 0, 0, 4],
            &[0, 0, 0, 0, 0, -1, -5, 0, 0, 2],
            &[0, 0, 1, 9, 0, 0, 0, 0, 0, 4],
            &[0, 1, 1, 15, 0, 0, 0, 1, 1, 8],
            &[0, 0, 0, 0, 0, 0, 0, 1, 3, 4],
            &[0, 0, 0, 0, 0, -1, -3, 0, 0, 2],
            &[0, 0, 0, 0, 0, 0, 0, 1, 2, 4],
            &[0, 0, 0, 0, 1, 1, 15, 1, 6, 2],
        ]);
        assert_eq!(p, reference);
        let ker = kernel_basis(&p, None).unwrap();
        assert_eq!(ker.len(), 1);
        assert!(ker[0].is_proportional(&Vector::from_i64(&[0, 0, -4, 0, 0, 2, 0, -4, 0, 1]), 0.0));
        assert!(check_c(&a, &b, 2, None).unwrap().is_fails());
        assert!(check_u(&a, &b, 2, None).unwrap().is_holds());
    }

    #[test]
    fn k_condition_on_five_cube() {
        let mut a = Mat::identity(5, Mode::Exact).append_column(&Vector::from_i64(&[1, 1, 1, 1, 0])).unwrap();
        let b = Mat::identity(5, Mode::Exact).append_column(&Vector::from_i64(&[1, 1, 1, 0, 1])).unwrap();
        assert!(check_k(&a, &b, 3, None).unwrap().is_holds());
        assert_eq!(check_k(&a, &b, 0, None).unwrap().verdict, Verdict::NotApplicable);
        a = a.to_float();
        assert!(check_k(&a, &b.to_float(), 3, None).unwrap().is_holds());
    }

    #[test]
    fn u_fails_and_w_depends_on_c() {
        // a1 ∥ a2, so any d supported on {1,2} is a witness for m = 2
        let a = m(&[&[1, 2, 0], &[1, 2, 0], &[0, 0, 1]]);
        let b = Mat::identity(3, Mode::Exact);
        let u = check_u(&a, &b, 2, None).unwrap();
        assert!(u.is_fails());
        let d = u.witness.clone().unwrap();
        let p = compound_product(&a, &b, 2).unwrap();
        assert!(p.mul_vec(&hat_vector(&d, 2).unwrap()).unwrap().is_zero());
        let c_in = m(&[&[0, 0, 1], &[1, 1, 1]]);
        let w = check_w(&a, &b, &c_in, 2, None).unwrap();
        assert!(w.is_fails());
        assert_eq!(support_of(&w.witness.unwrap()), vec![0, 1]);
        let c_out = m(&[&[1, 0, 0], &[0, 0, 1]]);
        assert!(check_w(&a, &b, &c_out, 2, None).unwrap().is_holds());
    }

    #[test]
    fn two_dimensional_kernel_is_searched() {
        let a = m(&[&[1, 2, 0], &[1, 2, 1]]);
        let b = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let u = check_u(&a, &b, 2, None).unwrap();
        assert!(u.is_fails());
        let an = analyze_u(&a, &b, 2, None).unwrap();
        assert!(an.complete);
        assert_eq!(an.findings.len(), 2);
        for f in &an.findings {
            let d = f.example(3, Mode::Exact);
            let p = compound_product(&a, &b, 2).unwrap();
            assert!(p.mul_vec(&hat_vector(&d, 2).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn not_applicable_when_compound_undefined() {
        let (a, b) = pair35();
        assert_eq!(check_c(&a, &b, 4, None).unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(check_u(&a, &b, 0, None).unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(check_w(&a, &b, &Mat::identity(5, Mode::Exact), 6, None).unwrap().verdict, Verdict::NotApplicable);
        assert!(check_c(&a, &b, 2, Some(1e-9)).is_err());
    }

    #[test]
    fn directions_of_identity() {
        let rep = one_nonzero_directions(&Mat::identity(3, Mode::Exact), None).unwrap();
        for (r, x) in rep.iter().enumerate() {
            assert!(x.nonempty);
            let mut e = vec![0; 3];
            e[r] = 1;
            assert_eq!(x.direction.clone().unwrap(), Vector::from_i64(&e));
        }
        let rep = one_nonzero_directions(&m(&[&[1, 1, 0], &[0, 0, 1]]), None).unwrap();
        assert!(!rep[0].nonempty && !rep[1].nonempty && rep[2].nonempty);
    }
}
