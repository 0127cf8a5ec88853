//! Generic uniqueness from single witnesses.
//!
//! A sampled pair `(X, Y)` for which `C_m(X) ⊙ C_m(Y)` has full column rank
//! proves that the rank is full for almost every pair, so one exact success
//! settles a whole dimension class. Failures prove nothing and are reported
//! as "no witness found".

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{check_u, check_w, compound_product, reconstruct_from_hat, Verdict};
use crate::linalg::witness::{compound_int, effective_rows, kr_full_column_rank_exact, kr_full_column_rank_float, IntMat};
use crate::linalg::{binomial, kernel_basis, rank, LinalgError, Mat, Mode};
use crate::tensor::{FactorTriple, Role};

/// Samples are nonzero integers in `[-SAMPLE_RANGE, SAMPLE_RANGE]`.
pub const SAMPLE_RANGE: i64 = 20;
/// Exact tests run while `expected rows read * cols` stays below this.
pub const EXACT_ENTRY_LIMIT: u128 = 6_000_000;
/// Largest float matrix (entries) we are willing to allocate.
pub const FLOAT_ENTRY_LIMIT: u128 = 300_000_000;
pub const DEFAULT_TRIALS: usize = 3;

#[derive(Debug, Error)]
pub enum GenericError {
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("invalid sampler setup: {0}")]
    InvalidKinds(String),
    #[error("{rows} x {cols} compound product ({entries} entries) is outside the {limit} guard")]
    Guard { rows: u128, cols: u128, entries: u128, limit: &'static str },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenericMode {
    Exact,
    Float,
    /// Exact inside the guard, float beyond it.
    Auto,
}

impl fmt::Display for GenericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenericMode::Exact => "exact",
            GenericMode::Float => "float",
            GenericMode::Auto => "auto",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Zero,
    Fixed(i64),
}

/// Per-entry pattern for a structured factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mask {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Mask, GenericError> {
        if cells.len() != rows * cols {
            return Err(GenericError::InvalidMask(format!("{} cells for a {rows} x {cols} pattern", cells.len())));
        }
        for j in 0..cols {
            let forced_zero = (0..rows).all(|i| matches!(cells[i * cols + j], Cell::Zero | Cell::Fixed(0)));
            if forced_zero {
                return Err(GenericError::InvalidMask(format!("column {j} is forced to zero")));
            }
        }
        Ok(Mask { rows, cols, cells })
    }

    /// `[I_n | v]` where `v` is free except for a zero at `zero_row`.
    pub fn perturbed_identity(n: usize, zero_row: usize) -> Result<Mask, GenericError> {
        if zero_row >= n {
            return Err(GenericError::InvalidMask(format!("zero row {zero_row} outside 0..{n}")));
        }
        let cols = n + 1;
        let mut cells = vec![Cell::Fixed(0); n * cols];
        for i in 0..n {
            cells[i * cols + i] = Cell::Fixed(1);
            cells[i * cols + n] = if i == zero_row { Cell::Zero } else { Cell::Free };
        }
        Mask::new(n, cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplerKind {
    Dense,
    /// Copy of the factor in the given role (symmetric slices when A = B).
    Sfs(Role),
    Toeplitz,
    Hankel,
    Masked(Mask),
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a sub-task, independent of evaluation order.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(seed), |h, &p| splitmix(h ^ p))
}

fn nonzero(rng: &mut ChaCha8Rng) -> i64 {
    let x = rng.gen_range(1..=2 * SAMPLE_RANGE);
    if x <= SAMPLE_RANGE {
        x - SAMPLE_RANGE - 1
    } else {
        x - SAMPLE_RANGE
    }
}

fn sample_int(kind: &SamplerKind, rows: usize, cols: usize, seed: u64) -> Result<IntMat, GenericError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = match kind {
        SamplerKind::Dense | SamplerKind::Sfs(_) => (0..rows * cols).map(|_| nonzero(&mut rng)).collect(),
        SamplerKind::Toeplitz => {
            let g: Vec<i64> = (0..rows + cols - 1).map(|_| nonzero(&mut rng)).collect();
            (0..rows * cols).map(|p| g[p / cols + cols - 1 - p % cols]).collect()
        }
        SamplerKind::Hankel => {
            let g: Vec<i64> = (0..rows + cols - 1).map(|_| nonzero(&mut rng)).collect();
            (0..rows * cols).map(|p| g[p / cols + p % cols]).collect()
        }
        SamplerKind::Masked(mask) => {
            if mask.rows != rows || mask.cols != cols {
                return Err(GenericError::InvalidMask(format!(
                    "{} x {} pattern for a {rows} x {cols} factor",
                    mask.rows, mask.cols
                )));
            }
            mask.cells
                .iter()
                .map(|c| match c {
                    Cell::Free => nonzero(&mut rng),
                    Cell::Zero => 0,
                    Cell::Fixed(v) => *v,
                })
                .collect()
        }
    };
    Ok(IntMat::new(rows, cols, data))
}

/// Deterministic integer sample, returned as an exact matrix. `Sfs` draws
/// like `Dense` here; the copy happens in [`sample_factors`].
pub fn sample_matrix(kind: &SamplerKind, rows: usize, cols: usize, seed: u64) -> Result<Mat, GenericError> {
    Ok(sample_int(kind, rows, cols, seed)?.to_mat())
}

fn sample_ints(dims: [usize; 3], r: usize, kinds: &[SamplerKind; 3], seed: u64) -> Result<[IntMat; 3], GenericError> {
    let mut out: [Option<IntMat>; 3] = [None, None, None];
    for role in Role::ALL {
        let x = role.index();
        if !matches!(kinds[x], SamplerKind::Sfs(_)) {
            out[x] = Some(sample_int(&kinds[x], dims[x], r, derive_seed(seed, &[x as u64]))?);
        }
    }
    for role in Role::ALL {
        let x = role.index();
        if let SamplerKind::Sfs(src) = kinds[x] {
            let s = src.index();
            if matches!(kinds[s], SamplerKind::Sfs(_)) || dims[s] != dims[x] {
                return Err(GenericError::InvalidKinds(format!("{role} cannot copy {src}")));
            }
            out[x] = out[s].clone();
        }
    }
    let [a, b, c] = out;
    Ok([a.unwrap(), b.unwrap(), c.unwrap()])
}

/// The factor triple a verdict's seed refers to.
pub fn sample_factors(dims: [usize; 3], r: usize, kinds: &[SamplerKind; 3], seed: u64) -> Result<FactorTriple, GenericError> {
    let [a, b, c] = sample_ints(dims, r, kinds, seed)?;
    FactorTriple::new(a.to_mat(), b.to_mat(), c.to_mat())
        .map_err(|e| GenericError::InvalidKinds(e.to_string()))
}

/// Which sufficient condition a witness satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenericCondition {
    /// `C_{m_C}(A) ⊙ C_{m_C}(B)`
    First,
    /// `C_{m_A}(B) ⊙ C_{m_A}(C)`
    Second,
    /// `C_{m_B}(C) ⊙ C_{m_B}(A)`
    Third,
    /// `C_{m_C}(A) ⊙ C_{m_C}(A)`, symmetric slices
    SfsSquare,
    /// `C_{m_A}(A) ⊙ C_{m_A}(C)`, symmetric slices
    SfsMixed,
}

impl fmt::Display for GenericCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenericCondition::First => "i",
            GenericCondition::Second => "ii",
            GenericCondition::Third => "iii",
            GenericCondition::SfsSquare => "sfs-aa",
            GenericCondition::SfsMixed => "sfs-ac",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericVerdict {
    pub r: usize,
    pub condition: GenericCondition,
    pub m: usize,
    /// Seed for [`sample_factors`] that reproduces the witness.
    pub seed: u64,
    /// `false` means the full rank was seen in floating point only.
    pub exact: bool,
    pub rows: u128,
    pub cols: u128,
}

/// One compound Khatri-Rao product to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub condition: GenericCondition,
    pub m: usize,
    pub left: Role,
    pub right: Role,
    pub rows: u128,
    pub cols: u128,
    /// Reason the probe cannot succeed, if any.
    pub skipped: Option<&'static str>,
}

impl Probe {
    fn symmetric(&self) -> bool {
        self.left == self.right
    }

    fn build(condition: GenericCondition, m: usize, pair: (Role, Role), dims: [usize; 3], r: usize) -> Probe {
        let (x, y) = (dims[pair.0.index()], dims[pair.1.index()]);
        let mut p = Probe { condition, m, left: pair.0, right: pair.1, rows: 0, cols: 0, skipped: None };
        if m > r || m > x || m > y {
            p.skipped = Some("compound not defined");
            return p;
        }
        p.rows = effective_rows(binomial(x, m) as usize, binomial(y, m) as usize, pair.0 == pair.1);
        p.cols = binomial(r, m);
        if p.cols > p.rows {
            p.skipped = Some("more columns than rows");
        }
        p
    }
}

fn order(dim: usize, r: usize) -> usize {
    r - dim.min(r) + 2
}

/// The three rotations, in the order they are tried.
pub fn cpd_probes(dims: [usize; 3], r: usize) -> Vec<Probe> {
    let [i, j, k] = dims;
    vec![
        Probe::build(GenericCondition::First, order(k, r), (Role::A, Role::B), dims, r),
        Probe::build(GenericCondition::Second, order(i, r), (Role::B, Role::C), dims, r),
        Probe::build(GenericCondition::Third, order(j, r), (Role::C, Role::A), dims, r),
    ]
}

pub fn sfs_probes(i: usize, k: usize, r: usize) -> Vec<Probe> {
    let dims = [i, i, k];
    vec![
        Probe::build(GenericCondition::SfsSquare, order(k, r), (Role::A, Role::A), dims, r),
        Probe::build(GenericCondition::SfsMixed, order(i, r), (Role::A, Role::C), dims, r),
    ]
}

fn guard_entries(p: &Probe) -> u128 {
    p.rows.min(4 * p.cols) * p.cols
}

/// Full-column-rank test of one probe on one sample. Returns the verdict
/// and whether it was exact.
fn run_probe(p: &Probe, f: &[IntMat; 3], mode: GenericMode) -> Result<(bool, bool), GenericError> {
    let exact = match mode {
        GenericMode::Float => false,
        GenericMode::Exact | GenericMode::Auto => {
            let ok = guard_entries(p) <= EXACT_ENTRY_LIMIT;
            if !ok && mode == GenericMode::Exact {
                return Err(GenericError::Guard {
                    rows: p.rows,
                    cols: p.cols,
                    entries: guard_entries(p),
                    limit: "exact",
                });
            }
            ok
        }
    };
    let cx = compound_int(&f[p.left.index()], p.m)?;
    let cy = if p.symmetric() { cx.clone() } else { compound_int(&f[p.right.index()], p.m)? };
    if exact {
        return Ok((kr_full_column_rank_exact(&cx, &cy, p.symmetric()), true));
    }
    // a strided subset of rows first: full rank there is full rank overall
    if p.rows > 2 * p.cols {
        let want = 2 * p.cols as usize;
        let (sx, sy) = strided_rows(&cx, &cy, p.symmetric(), want);
        if kr_full_column_rank_float(&sx, &sy, false) {
            return Ok((true, false));
        }
    }
    if p.rows * p.cols > FLOAT_ENTRY_LIMIT {
        return Err(GenericError::Guard { rows: p.rows, cols: p.cols, entries: p.rows * p.cols, limit: "float" });
    }
    Ok((kr_full_column_rank_float(&cx, &cy, p.symmetric()), false))
}

/// About `want` evenly spread rows of `cx ⊙ cy`, as `P ⊙ 1` with `P`
/// holding the row products.
fn strided_rows(cx: &IntMat, cy: &IntMat, symmetric: bool, want: usize) -> (IntMat, IntMat) {
    let pairs: Vec<(usize, usize)> = (0..cx.rows)
        .flat_map(|s| (if symmetric { s } else { 0 }..cy.rows).map(move |t| (s, t)))
        .collect();
    let step = (pairs.len() / want).max(1);
    let cols = cx.cols;
    let mut data = Vec::with_capacity(want * cols);
    let mut n = 0;
    for &(s, t) in pairs.iter().step_by(step) {
        data.extend((0..cols).map(|c| cx.get(s, c) * cy.get(t, c)));
        n += 1;
    }
    (IntMat::new(n, cols, data), IntMat::new(1, cols, vec![1; cols]))
}

fn search(
    probes: &[Probe],
    dims: [usize; 3],
    r: usize,
    kinds: &[SamplerKind; 3],
    trials: usize,
    seed: u64,
    mode: GenericMode,
) -> Result<Option<GenericVerdict>, GenericError> {
    let cell = derive_seed(seed, &[dims[0] as u64, dims[1] as u64, dims[2] as u64, r as u64]);
    let live: Vec<&Probe> = probes.iter().filter(|p| p.skipped.is_none()).collect();
    if live.is_empty() {
        return Ok(None);
    }
    let samples: Vec<(u64, [IntMat; 3])> = (0..trials as u64)
        .map(|t| {
            let s = derive_seed(cell, &[t]);
            sample_ints(dims, r, kinds, s).map(|f| (s, f))
        })
        .collect::<Result<_, _>>()?;
    for p in live {
        for (s, f) in &samples {
            let (full, exact) = run_probe(p, f, mode)?;
            if full {
                return Ok(Some(GenericVerdict {
                    r,
                    condition: p.condition,
                    m: p.m,
                    seed: *s,
                    exact,
                    rows: p.rows,
                    cols: p.cols,
                }));
            }
        }
    }
    Ok(None)
}

/// First rotation whose compound product reaches full column rank on one
/// of `trials` samples. `None` means no witness was found.
pub fn generic_unique_cpd(
    dims: [usize; 3],
    r: usize,
    kinds: &[SamplerKind; 3],
    trials: usize,
    seed: u64,
    mode: GenericMode,
) -> Result<Option<GenericVerdict>, GenericError> {
    if r == 0 {
        return Ok(None);
    }
    search(&cpd_probes(dims, r), dims, r, kinds, trials, seed, mode)
}

/// Largest R up to `I + J + K` with a witness, scanning every R.
pub fn max_generic_rank(
    dims: [usize; 3],
    kinds: &[SamplerKind; 3],
    trials: usize,
    seed: u64,
    mode: GenericMode,
) -> Result<Option<GenericVerdict>, GenericError> {
    max_success(dims.iter().sum(), |r| generic_unique_cpd(dims, r, kinds, trials, seed, mode))
}

pub fn generic_unique_sfs(
    i: usize,
    k: usize,
    r: usize,
    trials: usize,
    seed: u64,
    mode: GenericMode,
) -> Result<Option<GenericVerdict>, GenericError> {
    if r == 0 {
        return Ok(None);
    }
    let kinds = [SamplerKind::Dense, SamplerKind::Sfs(Role::A), SamplerKind::Dense];
    search(&sfs_probes(i, k, r), [i, i, k], r, &kinds, trials, seed, mode)
}

/// Largest R with `min(I,R) + min(J,R) + min(K,R) >= 2R + 2`, or 0.
pub fn kruskal_generic_bound(i: usize, j: usize, k: usize) -> usize {
    (1..=i + j + k).filter(|&r| i.min(r) + j.min(r) + k.min(r) >= 2 * r + 2).max().unwrap_or(0)
}

/// Largest `R <= K` with `C(I,2) C(J,2) >= C(R,2)`.
pub fn order_two_bound(i: usize, j: usize, k: usize) -> usize {
    let rows = binomial(i, 2) * binomial(j, 2);
    (1..=k).filter(|&r| binomial(r, 2) <= rows).max().unwrap_or(0)
}

/// Closed-form comparison bounds; `None` where the bound does not apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgBounds {
    pub strassen: Option<usize>,
    pub chiantini_ottaviani: Option<usize>,
    pub fcr: Option<usize>,
    pub cubic: Option<usize>,
}

const CUBIC: [usize; 9] = [2, 3, 5, 9, 13, 18, 22, 27, 32];

pub fn ag_bounds(i: usize, j: usize, k: usize) -> AgBounds {
    let mut d = [i, j, k];
    d.sort_unstable();
    let [i, j, k] = d;
    let strassen = if i >= 3 && k % 2 == 1 && k - 1 <= (i - 1) * (j - 1) {
        (i * j * k / (i + j + k - 2)).checked_sub(k).filter(|&b| b > 0)
    } else {
        None
    };
    let log2 = |x: usize| usize::BITS as usize - 1 - x.leading_zeros() as usize;
    let chiantini_ottaviani = (i >= 2).then(|| 1usize << (log2(i) + log2(j) - 2));
    let fcr = (i >= 2).then(|| ((i - 1) * (j - 1)).min(k));
    let cubic = (i == j && j == k && (2..=10).contains(&i)).then(|| CUBIC[i - 2]);
    AgBounds { strassen, chiantini_ottaviani, fcr, cubic }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOptions {
    /// I values, or a filter on I for the umwm rows.
    pub i_range: (usize, usize),
    /// K values for [`TableKind::Three`].
    pub k_range: (usize, usize),
    pub trials: usize,
    pub seed: u64,
    pub mode: GenericMode,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { i_range: (4, 7), k_range: (2, 33), trials: DEFAULT_TRIALS, seed: 1, mode: GenericMode::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// `I x I x (2I-1)`: largest certified R for each compound order m.
    Two,
    /// `I x I x K`: largest certified R for unconstrained and symmetric-slice
    /// CPDs, next to the Kruskal bound.
    Three,
    /// Kernel dimension, (Um) and (Wm) on fixed sampled rows.
    UmWm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table2Cell {
    pub i: usize,
    pub m: usize,
    pub r: usize,
    pub verdict: Option<GenericVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table3Cell {
    pub i: usize,
    pub k: usize,
    pub left: Option<GenericVerdict>,
    pub middle: Option<GenericVerdict>,
    pub right: usize,
    pub order_two: usize,
}

impl Table3Cell {
    pub fn left_r(&self) -> usize {
        self.left.as_ref().map_or(0, |v| v.r)
    }

    pub fn middle_r(&self) -> usize {
        self.middle.as_ref().map_or(0, |v| v.r)
    }

    /// Beyond both the Kruskal bound and the order-two bound.
    pub fn left_is_new(&self) -> bool {
        self.left_r() > self.right && self.left_r() > self.order_two
    }

    pub fn middle_is_new(&self) -> bool {
        self.middle_r() > self.right && self.middle_r() > self.order_two
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UmWmRow {
    pub dims: [usize; 3],
    pub r: usize,
    pub m: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub u: Verdict,
    pub w: Verdict,
    /// The lone kernel vector has the `d̂` pattern.
    pub reconstructed: bool,
    pub exact: bool,
    pub seed: u64,
}

/// The five listed `(I, J, K, R, m)` rows.
pub const UMWM_ROWS: [(usize, usize, usize, usize, usize); 5] =
    [(4, 5, 6, 7, 3), (4, 6, 14, 14, 2), (5, 7, 7, 9, 4), (6, 9, 8, 11, 5), (7, 7, 7, 10, 5)];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "table", rename_all = "lowercase")]
pub enum Table {
    Two { seed: u64, trials: usize, cells: Vec<Table2Cell> },
    Three { seed: u64, trials: usize, cells: Vec<Table3Cell> },
    UmWm { seed: u64, rows: Vec<UmWmRow> },
}

fn check_range(name: &str, (lo, hi): (usize, usize)) -> Result<(), GenericError> {
    if lo == 0 || lo > hi {
        return Err(GenericError::InvalidKinds(format!("empty or invalid {name} range {lo}..{hi}")));
    }
    Ok(())
}

pub fn table2_cells(i: usize) -> Vec<(usize, usize)> {
    let k = 2 * i - 1;
    (2..)
        .map(|m| (m, k - 2 + m))
        .take_while(|&(m, r)| m <= i && binomial(r, m) <= binomial(i, m) * binomial(i, m))
        .collect()
}

fn max_success(
    top: usize,
    mut probe: impl FnMut(usize) -> Result<Option<GenericVerdict>, GenericError>,
) -> Result<Option<GenericVerdict>, GenericError> {
    // every R is probed: success at R says nothing about R + 1
    let mut best = None;
    for r in 1..=top {
        if let Some(v) = probe(r)? {
            best = Some(v);
        }
    }
    Ok(best)
}

pub fn make_table(which: TableKind, opts: &TableOptions) -> Result<Table, GenericError> {
    check_range("I", opts.i_range)?;
    let (lo, hi) = opts.i_range;
    let dense = [SamplerKind::Dense, SamplerKind::Dense, SamplerKind::Dense];
    match which {
        TableKind::Two => {
            let mut cells = Vec::new();
            for i in lo.max(2)..=hi {
                for (m, r) in table2_cells(i) {
                    let verdict = generic_unique_cpd([i, i, 2 * i - 1], r, &dense, opts.trials, opts.seed, opts.mode)?;
                    cells.push(Table2Cell { i, m, r, verdict });
                }
            }
            Ok(Table::Two { seed: opts.seed, trials: opts.trials, cells })
        }
        TableKind::Three => {
            check_range("K", opts.k_range)?;
            let mut cells = Vec::new();
            for i in lo..=hi {
                for k in opts.k_range.0..=opts.k_range.1 {
                    let top = 2 * i + k;
                    let left = max_success(top, |r| generic_unique_cpd([i, i, k], r, &dense, opts.trials, opts.seed, opts.mode))?;
                    let middle = max_success(top, |r| generic_unique_sfs(i, k, r, opts.trials, opts.seed, opts.mode))?;
                    cells.push(Table3Cell {
                        i,
                        k,
                        left,
                        middle,
                        right: kruskal_generic_bound(i, i, k),
                        order_two: order_two_bound(i, i, k),
                    });
                }
            }
            Ok(Table::Three { seed: opts.seed, trials: opts.trials, cells })
        }
        TableKind::UmWm => {
            let rows = UMWM_ROWS
                .iter()
                .filter(|row| (lo..=hi).contains(&row.0))
                .map(|&(i, j, k, r, m)| umwm_row([i, j, k], r, m, opts.seed, opts.mode))
                .collect::<Result<_, _>>()?;
            Ok(Table::UmWm { seed: opts.seed, rows })
        }
    }
}

/// Kernel dimension, (Um) and (Wm) for one sampled triple.
pub fn umwm_row(dims: [usize; 3], r: usize, m: usize, seed: u64, mode: GenericMode) -> Result<UmWmRow, GenericError> {
    let s = derive_seed(seed, &[dims[0] as u64, dims[1] as u64, dims[2] as u64, r as u64]);
    let dense = [SamplerKind::Dense, SamplerKind::Dense, SamplerKind::Dense];
    let f = sample_factors(dims, r, &dense, s)?;
    let rows = (binomial(dims[0], m) * binomial(dims[1], m)) as usize;
    let cols = binomial(r, m) as usize;
    let exact = match mode {
        GenericMode::Float => false,
        GenericMode::Exact => true,
        GenericMode::Auto => (rows.min(4 * cols) * cols) as u128 <= EXACT_ENTRY_LIMIT,
    };
    let (a, b, c) = if exact {
        (f.a().clone(), f.b().clone(), f.c().clone())
    } else {
        (f.a().to_float(), f.b().to_float(), f.c().to_float())
    };
    let p = compound_product(&a, &b, m)?;
    let rk = rank(&p, None)?;
    let kernel = kernel_basis(&p, None)?;
    let reconstructed = kernel.len() == 1 && reconstruct_from_hat(&kernel[0], m, r).is_some();
    let u = check_u(&a, &b, m, None)?.verdict;
    let w = check_w(&a, &b, &c, m, None)?.verdict;
    debug_assert_eq!(p.mode(), if exact { Mode::Exact } else { Mode::Float });
    Ok(UmWmRow { dims, r, m, rows, cols, rank: rk, kernel_dim: kernel.len(), u, w, reconstructed, exact, seed: s })
}

fn mode_label(v: &Option<GenericVerdict>) -> &'static str {
    match v {
        Some(v) if v.exact => "exact",
        Some(_) => "float",
        None => "-",
    }
}

fn seed_label(v: &Option<GenericVerdict>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |v| v.seed.to_string())
}

fn cond_label(v: &Option<GenericVerdict>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |v| v.condition.to_string())
}

impl Table {
    /// One row per cell: `I,J,K,R,verdict,condition,mode,seed`, after a
    /// `#` provenance line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Table::Two { seed, trials, cells } => {
                out += &format!("# I x I x (2I-1) cells, seed {seed}, trials {trials}\n");
                out += "I,J,K,R,verdict,condition,mode,seed\n";
                for c in cells {
                    let verdict = if c.verdict.is_some() { "unique" } else { "no-witness" };
                    out += &format!(
                        "{},{},{},{},{},{},{},{}\n",
                        c.i,
                        c.i,
                        2 * c.i - 1,
                        c.r,
                        verdict,
                        cond_label(&c.verdict),
                        mode_label(&c.verdict),
                        seed_label(&c.verdict)
                    );
                }
            }
            Table::Three { seed, trials, cells } => {
                out += &format!("# I x I x K max rank: cpd, sfs, kruskal bound; seed {seed}, trials {trials}\n");
                out += "I,J,K,R,verdict,condition,mode,seed\n";
                for c in cells {
                    for (label, v) in [("cpd", &c.left), ("sfs", &c.middle)] {
                        out += &format!(
                            "{},{},{},{},{},{},{},{}\n",
                            c.i,
                            c.i,
                            c.k,
                            v.as_ref().map_or(0, |v| v.r),
                            label,
                            cond_label(v),
                            mode_label(v),
                            seed_label(v)
                        );
                    }
                    out += &format!("{},{},{},{},kruskal,bound,-,-\n", c.i, c.i, c.k, c.right);
                }
            }
            Table::UmWm { seed, rows } => {
                out += &format!("# compound kernel rows (U, W), seed {seed}\n");
                out += "I,J,K,R,verdict,condition,mode,seed\n";
                for row in rows {
                    out += &format!(
                        "{},{},{},{},U{}={},W{}={},{},{}\n",
                        row.dims[0],
                        row.dims[1],
                        row.dims[2],
                        row.r,
                        row.m,
                        row.u,
                        row.m,
                        row.w,
                        if row.exact { "exact" } else { "float" },
                        row.seed
                    );
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Table::Two { seed, trials, cells } => {
                out += &format!("I x I x (2I-1), largest R per m  (seed {seed}, trials {trials}; f = float)\n");
                let mut i_values: Vec<usize> = cells.iter().map(|c| c.i).collect();
                i_values.dedup();
                out += &format!("{:<12}", "dims");
                let max_m = cells.iter().map(|c| c.m).max().unwrap_or(2);
                for m in 2..=max_m {
                    out += &format!("{:>7}", format!("m={m}"));
                }
                out += "\n";
                for i in i_values {
                    out += &format!("{:<12}", format!("{i}x{i}x{}", 2 * i - 1));
                    for m in 2..=max_m {
                        let cell = cells.iter().find(|c| c.i == i && c.m == m);
                        let s = match cell {
                            Some(Table2Cell { r, verdict: Some(v), .. }) => format!("{r}{}", if v.exact { "" } else { "f" }),
                            Some(Table2Cell { verdict: None, .. }) => "none".to_string(),
                            None => String::new(),
                        };
                        out += &format!("{s:>7}");
                    }
                    out += "\n";
                }
            }
            Table::Three { seed, trials, cells } => {
                out += &format!("I x I x K: cpd, sfs, kruskal  (seed {seed}, trials {trials}; * beyond known bounds)\n");
                let mut i_values: Vec<usize> = cells.iter().map(|c| c.i).collect();
                i_values.sort_unstable();
                i_values.dedup();
                let mut k_values: Vec<usize> = cells.iter().map(|c| c.k).collect();
                k_values.sort_unstable();
                k_values.dedup();
                out += &format!("{:>4}", "K");
                for i in &i_values {
                    out += &format!("{:>16}", format!("I={i}"));
                }
                out += "\n";
                for k in k_values {
                    out += &format!("{k:>4}");
                    for &i in &i_values {
                        let s = cells.iter().find(|c| c.i == i && c.k == k).map_or(String::new(), |c| {
                            let star = |b: bool| if b { "*" } else { "" };
                            format!(
                                "{}{}, {}{}, {}",
                                c.left_r(),
                                star(c.left_is_new()),
                                c.middle_r(),
                                star(c.middle_is_new()),
                                c.right
                            )
                        });
                        out += &format!("{s:>16}");
                    }
                    out += "\n";
                }
            }
            Table::UmWm { seed, rows } => {
                out += &format!("compound kernels  (seed {seed})\n");
                out += &format!(
                    "{:<10}{:>4}{:>4}{:>12}{:>7}{:>8}{:>14}{:>14}{:>7}\n",
                    "dims", "R", "m", "size", "rank", "kernel", "(Um)", "(Wm)", "mode"
                );
                for row in rows {
                    out += &format!(
                        "{:<10}{:>4}{:>4}{:>12}{:>7}{:>8}{:>14}{:>14}{:>7}\n",
                        format!("{}x{}x{}", row.dims[0], row.dims[1], row.dims[2]),
                        row.r,
                        row.m,
                        format!("{}x{}", row.rows, row.cols),
                        row.rank,
                        row.kernel_dim,
                        row.u.to_string(),
                        row.w.to_string(),
                        if row.exact { "exact" } else { "float" }
                    );
                }
            }
        }
        out
    }
}
