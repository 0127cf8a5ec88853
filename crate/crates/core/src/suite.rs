//! Built-in regression suite over worked examples with known answers.
//! Each example returns named checks; the CLI prints them and exits
//! nonzero on any failure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certify::{certify, certify_sfs, check_common_one, CertifyError, CertifyOptions, RuleId, Tier};
use crate::conditions::{
    check_c, check_u, check_w, compound_product, h_profile, krank, one_nonzero_directions, reconstruct_from_hat,
};
use crate::generic::{derive_seed, sample_factors, sample_matrix, GenericError, Mask, SamplerKind};
use crate::linalg::{has_full_column_rank, kernel_basis, khatri_rao, rank, LinalgError, Mat, Mode, Vector};
use crate::tensor::{equals, from_factors, is_sfs, FactorTriple, Role, TensorError};

pub const EXAMPLES: [&str; 9] = [
    "sharpness",
    "three-by-five",
    "four-cube",
    "five-cube",
    "five-five-eight",
    "seven-seven-ten",
    "identity-slab",
    "alpha-family",
    "masked-perturbation",
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown example '{0}'")]
    Unknown(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Generic(#[from] GenericError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub example: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Parameter of the alpha-family; any nonzero value.
    pub alpha: BigRational,
    /// Perturb one sharpness-family entry, as a negative control.
    pub tamper: bool,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { alpha: BigRational::one(), tamper: false, seed: 1 }
    }
}

struct Log {
    example: &'static str,
    checks: Vec<Check>,
}

impl Log {
    fn new(example: &'static str) -> Log {
        Log { example, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { example: self.example, name: name.into(), passed, detail: detail.into() });
    }
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_mat(rows: &[&[i64]]) -> Mat {
    Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn rat_mat(rows: &[&[BigRational]]) -> Result<Mat, LinalgError> {
    let cols = rows.first().map_or(0, |r| r.len());
    Mat::from_rationals(rows.len(), cols, rows.iter().flat_map(|r| r.iter().cloned()).collect())
}

fn diag(d: &[BigRational]) -> Result<Mat, LinalgError> {
    let n = d.len();
    let mut data = vec![BigRational::zero(); n * n];
    for (i, x) in d.iter().enumerate() {
        data[i * n + i] = x.clone();
    }
    Mat::from_rationals(n, n, data)
}

fn columns_proportional(x: &Mat, y: &Mat) -> bool {
    x.rows() == y.rows() && x.cols() == y.cols() && (0..x.cols()).all(|j| x.column(j).is_proportional(&y.column(j), 0.0))
}

/// Three-term and four-term factorizations of the same 2 x 3 x 3 tensor.
pub fn sharpness_triples() -> (FactorTriple, FactorTriple) {
    let three = FactorTriple::new(
        int_mat(&[&[1, 1, 1], &[-1, -2, 3]]),
        int_mat(&[&[6, 12, 2], &[3, 4, -1], &[4, 6, -4]]),
        Mat::identity(3, Mode::Exact),
    )
    .expect("shapes agree");
    let four = FactorTriple::new(
        int_mat(&[&[1, 0, 1, 1], &[0, 1, 1, 2]]),
        int_mat(&[&[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 0, 0, 1]]),
        int_mat(&[&[6, -6, -3, -2], &[12, -24, -8, -6], &[2, 6, -3, -6]]),
    )
    .expect("shapes agree");
    (three, four)
}

/// Two-parameter alternative `(B̄, C̄)` for the four-term PD, as usually
/// stated; it needs the first factor rescaled by [`sharpness_scaling`].
pub fn sharpness_family(alpha: &BigRational, beta: &BigRational) -> Result<(Mat, Mat), LinalgError> {
    let bhat = int_mat(&[&[6, 12, 2], &[3, 4, -1], &[4, 6, -4]]);
    let right = rat_mat(&[
        &[q(1, 1), q(1, 1), q(1, 1), q(1, 1)],
        &[q(1, 1), q(2, 1), q(4, 3), q(3, 2)],
        &[q(1, 1), q(-3, 1), q(3, 1), q(9, 1)],
    ])?;
    let n = rat_mat(&[
        &[q(6, 1), q(-6, 1), q(-3, 1), q(-2, 1)],
        &[q(-24, 5), q(48, 5), q(16, 5), q(12, 5)],
        &[q(2, 15), q(2, 5), q(-1, 5), q(-2, 5)],
    ])?;
    let b = bhat.matmul(&diag(&[q(1, 1), alpha.clone(), beta.clone()])?)?.matmul(&right)?;
    let c = diag(&[q(1, 1), alpha.recip(), beta.recip()])?.matmul(&n)?;
    Ok((b, c))
}

/// Column scaling of A under which the family reproduces the tensor.
pub fn sharpness_scaling() -> [BigRational; 4] {
    [q(3, 4), q(-1, 4), q(3, 2), q(-1, 2)]
}

fn sharpness(opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("sharpness");
    let (three, four) = sharpness_triples();
    let t = from_factors(&four);
    log.check("three-term and four-term tensors agree", equals(&from_factors(&three), &t, None)?, "exact");
    let cert = certify(&three, None, CertifyOptions::default())?;
    let k: usize = cert.computed.kranks.iter().sum();
    log.check(
        "Kruskal fires on the three-term triple",
        cert.fired_rule(RuleId::Kruskal) && cert.conclusion == Tier::UniqueCpd,
        format!("k-sum {k} vs 2R+2 = 8"),
    );
    let c = check_common_one(&four, Role::C, None)?;
    let b = check_common_one(&four, Role::B, None)?;
    let a = check_common_one(&four, Role::A, None)?;
    log.check(
        "one-common-factor inequality: holds for C and B, fails for A",
        c.is_holds() && b.is_holds() && a.is_fails(),
        a.detail.clone(),
    );
    let scaled_a = four.a().matmul(&diag(&sharpness_scaling())?)?;
    let points = [(q(1, 1), q(1, 1)), (q(2, 1), q(-3, 1)), (q(-2, 5), q(1, 15))];
    for (al, be) in &points {
        let (mut bb, cb) = sharpness_family(al, be)?;
        if opts.tamper {
            let x = bb.get(0, 0).add(&crate::linalg::Scalar::int(1))?;
            bb.set(0, 0, x)?;
        }
        let alt = FactorTriple::new(scaled_a.clone(), bb, cb)?;
        log.check(
            format!("family at alpha={al}, beta={be} gives the same tensor"),
            equals(&from_factors(&alt), &t, None)?,
            "first factor A diag(3/4, -1/4, 3/2, -1/2)",
        );
    }
    let (bb, cb) = sharpness_family(&q(-2, 5), &q(1, 15))?;
    log.check(
        "columns proportional to B and C at alpha=-2/5, beta=1/15",
        columns_proportional(&bb, four.b()) && columns_proportional(&cb, four.c()),
        "exact",
    );
    let (bb, _) = sharpness_family(&q(1, 1), &q(1, 1))?;
    log.check("columns not proportional to B at alpha=beta=1", !columns_proportional(&bb, four.b()), "exact");
    let (bb, cb) = sharpness_family(&q(1, 1), &q(1, 1))?;
    let literal = FactorTriple::new(four.a().clone(), bb, cb)?;
    log.check(
        "family with an unscaled first factor gives a different tensor",
        !equals(&from_factors(&literal), &t, None)?,
        "alpha = beta = 1"
    );
    Ok(log.checks)
}

pub fn pair35() -> (Mat, Mat) {
    (
        int_mat(&[&[1, 0, 0, 1, 1], &[0, 1, 0, 1, 2], &[0, 0, 1, 1, 3]]),
        int_mat(&[&[1, 0, 0, 1, 1], &[0, 1, 0, 1, 3], &[0, 0, 1, 1, 5]]),
    )
}

/// Reference 9 x 10 matrix `C_2(A) ⊙ C_2(B)` of the 3 x 5 pair.
pub fn pair35_product() -> Mat {
    int_mat(&[
        &[1, 0, 1, 6, 0, 1, 1, 0, 0, 2],
        &[0, 0, 1, 10, 0, 0, 0, 0, 0, 4],
        &[0, 0, 0, 0, 0, -1, -5, 0, 0, 2],
        &[0, 0, 1, 9, 0, 0, 0, 0, 0, 4],
        &[0, 1, 1, 15, 0, 0, 0, 1, 1, 8],
        &[0, 0, 0, 0, 0, 0, 0, 1, 3, 4],
        &[0, 0, 0, 0, 0, -1, -3, 0, 0, 2],
        &[0, 0, 0, 0, 0, 0, 0, 1, 2, 4],
        &[0, 0, 0, 0, 1, 1, 15, 1, 6, 2],
    ])
}

fn three_by_five() -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("three-by-five");
    let (a, b) = pair35();
    let p = compound_product(&a, &b, 2)?;
    log.check("C_2(A) ⊙ C_2(B) equals the reference matrix", p == pair35_product(), "9 x 10");
    let ker = kernel_basis(&p, None)?;
    let want = Vector::from_i64(&[0, 0, -4, 0, 0, 2, 0, -4, 0, 1]);
    log.check(
        "kernel is one-dimensional, spanned by (0,0,-4,0,0,2,0,-4,0,1)",
        ker.len() == 1 && ker[0].is_proportional(&want, 0.0),
        "last entry +1, not -1",
    );
    let flipped = Vector::from_i64(&[0, 0, -4, 0, 0, 2, 0, -4, 0, -1]);
    let image = p.mul_vec(&flipped)?;
    log.check("the vector with last entry -1 is not in the kernel", !image.is_zero(), format!("image {image}"));
    log.check("(U2) holds", check_u(&a, &b, 2, None)?.is_holds(), "");
    let f = FactorTriple::new(a, b, Mat::identity(5, Mode::Exact))?;
    let cert = certify(&f, None, CertifyOptions::default())?;
    log.check(
        "one-factor rule fires, unique CPD",
        cert.fired_rule(RuleId::OneFactorPath) && cert.conclusion == Tier::UniqueCpd,
        format!("m = {:?}", cert.computed.m),
    );
    log.check(
        "two-of-three does not fire (fourth compounds of 3 x 5 undefined)",
        !cert.fired_rule(RuleId::TwoOfThreeU),
        "",
    );
    Ok(log.checks)
}

pub fn cube4() -> FactorTriple {
    FactorTriple::new(
        int_mat(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 1], &[0, 0, 1, 0, 1], &[0, 0, 0, 1, 0]]),
        int_mat(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 1], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 1]]),
        int_mat(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 1], &[0, 0, 0, 1, 1]]),
    )
    .expect("shapes agree")
}

const PAIRS: [(Role, Role); 3] = [(Role::A, Role::B), (Role::B, Role::C), (Role::C, Role::A)];

fn four_cube() -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("four-cube");
    let f = cube4();
    for (x, y) in PAIRS {
        let p = compound_product(f.factor(x), f.factor(y), 3)?;
        log.check(
            format!("C_3({x}) ⊙ C_3({y}) has full column rank"),
            (p.rows(), p.cols()) == (16, 10) && has_full_column_rank(&p, None)?,
            format!("{} x {}", p.rows(), p.cols()),
        );
        let h = h_profile(f.factor(x), f.factor(y), None)?;
        let want: Vec<i64> = (1..=5).map(|d: i64| d.min(3)).collect();
        log.check(format!("H_{x}{y}(d) = min(d, 3)"), h.values == want, format!("{:?}", h.values));
    }
    let cert = certify(&f, None, CertifyOptions::default())?;
    log.check(
        "Kruskal and two-k do not fire",
        !cert.fired_rule(RuleId::Kruskal) && !cert.fired_rule(RuleId::TwoK),
        "",
    );
    log.check(
        "two-of-three fires, unique CPD",
        cert.fired_rule(RuleId::TwoOfThreeU) && cert.conclusion == Tier::UniqueCpd,
        "",
    );
    log.check("one-factor rule does not fire", !cert.fired_rule(RuleId::OneFactorPath), "3 + 3 < 6");
    Ok(log.checks)
}

/// `[I_5 | v]` with the starred entries set to `star`.
pub fn cube5(star: i64) -> FactorTriple {
    let build = |zero: usize| {
        let mut rows = vec![vec![0i64; 6]; 5];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1;
            row[5] = if i == zero { 0 } else { star };
        }
        Mat::from_rows(&rows)
    };
    FactorTriple::new(build(4), build(3), build(2)).expect("shapes agree")
}

fn five_cube() -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("five-cube");
    let f = cube5(1);
    let kr: Vec<usize> = Role::ALL.iter().map(|&r| krank(f.factor(r), None)).collect::<Result<_, _>>()?;
    log.check("k-ranks are 4", kr == [4, 4, 4], format!("{kr:?}"));
    let cert = certify(&f, None, CertifyOptions::default())?;
    log.check("two-k fires", cert.fired_rule(RuleId::TwoK) && cert.conclusion == Tier::UniqueCpd, "");
    log.check("Kruskal does not fire", !cert.fired_rule(RuleId::Kruskal), "12 < 14");
    Ok(log.checks)
}

fn vandermonde(nodes: impl Iterator<Item = i64>, rows: usize) -> Vec<Vec<i64>> {
    let nodes: Vec<i64> = nodes.collect();
    (0..rows).map(|p| nodes.iter().map(|&x| x.pow(p as u32)).collect()).collect()
}

/// 5 x 5 x 8 triple: `A = [Â; e_1ᵀ]`, `B = [B̂; e_8ᵀ]`, `C = I_8` with
/// Vandermonde `Â` (nodes 1..8) and `B̂` (nodes -1..-8).
pub fn five_five_eight() -> FactorTriple {
    let mut a = vandermonde(1..=8, 4);
    let mut e1 = vec![0; 8];
    e1[0] = 1;
    a.push(e1);
    let mut b = vandermonde((1..=8).map(|x| -x), 4);
    let mut e8 = vec![0; 8];
    e8[7] = 1;
    b.push(e8);
    FactorTriple::new(Mat::from_rows(&a), Mat::from_rows(&b), Mat::identity(8, Mode::Exact)).expect("shapes agree")
}

fn five_five_eight_checks() -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("five-five-eight");
    let f = five_five_eight();
    let kh = [krank(&f.a().select_rows(&[0, 1, 2, 3]), None)?, krank(&f.b().select_rows(&[0, 1, 2, 3]), None)?];
    log.check("Â and B̂ have k-rank 4", kh == [4, 4], format!("{kh:?}"));
    let h = h_profile(f.a(), f.b(), None)?;
    log.check("H_AB = (1,2,3,4,3,2,2,2)", h.values == [1, 2, 3, 4, 3, 2, 2, 2], format!("{:?}", h.values));
    let hbc = h_profile(f.b(), f.c(), None)?;
    log.check("H_BC(5) = 4", hbc.at(5) == 4, format!("{:?}", hbc.values));
    log.check("one-common-factor inequality holds for C", check_common_one(&f, Role::C, None)?.is_holds(), "");
    let cert = certify(&f, None, CertifyOptions::default())?;
    log.check(
        "one-factor rule fires, unique CPD",
        cert.fired_rule(RuleId::OneFactorPath) && cert.conclusion == Tier::UniqueCpd,
        "",
    );
    log.check("two-of-three does not fire", !cert.fired_rule(RuleId::TwoOfThreeU), "");
    Ok(log.checks)
}

fn seven_seven_ten(opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("seven-seven-ten");
    let s = derive_seed(opts.seed, &[7, 7, 10]);
    let a = sample_matrix(&SamplerKind::Dense, 7, 10, derive_seed(s, &[0]))?;
    let b = sample_matrix(&SamplerKind::Dense, 7, 10, derive_seed(s, &[1]))?;
    let c = sample_matrix(&SamplerKind::Dense, 7, 10, derive_seed(s, &[2]))?;
    log.check("A ⊙ B has full column rank", has_full_column_rank(&khatri_rao(&a, &b)?, None)?, "");
    let p = compound_product(&a, &b, 5)?;
    let ker = kernel_basis(&p, None)?;
    log.check(
        "C_5(A) ⊙ C_5(B) has a one-dimensional kernel",
        (p.rows(), p.cols(), ker.len()) == (441, 252, 1),
        format!("{} x {}, kernel {}", p.rows(), p.cols(), ker.len()),
    );
    log.check(
        "kernel vector has the d̂ pattern",
        ker.len() == 1 && reconstruct_from_hat(&ker[0], 5, 10).is_some(),
        "",
    );
    log.check("(U5) does not hold", check_u(&a, &b, 5, None)?.is_fails(), "");
    let kc = krank(&c, None)?;
    log.check("(W5) holds for a sampled C with k_C >= 5", check_w(&a, &b, &c, 5, None)?.is_holds() && kc >= 5, format!("k_C = {kc}"));
    Ok(log.checks)
}

fn identity_slab() -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("identity-slab");
    let x = int_mat(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
    // inverse transpose of x, computed by hand: x⁻¹ = ½ [[1,-1,1],[1,1,-1],[-1,1,1]]
    let xit = rat_mat(&[
        &[q(1, 2), q(1, 2), q(-1, 2)],
        &[q(-1, 2), q(1, 2), q(1, 2)],
        &[q(1, 2), q(-1, 2), q(1, 2)],
    ])?;
    let e = int_mat(&[&[1, 1, 1], &[1, 1, 1]]);
    let f = FactorTriple::new(x, xit, e.clone())?;
    let t = from_factors(&f);
    let id = Mat::identity(3, Mode::Exact);
    let stacked = from_factors(&FactorTriple::new(id.clone(), id.clone(), e.clone())?);
    log.check("(X, X⁻ᵀ, E) gives the identity stacked twice", equals(&t, &stacked, None)?, "");
    log.check("tensor has symmetric slices", is_sfs(&t)?, "");
    let cert = certify(&f, None, CertifyOptions::default())?;
    log.check("necessary condition violated", cert.conclusion == Tier::NecessaryViolated, "k_E = 1");
    let sfs = certify_sfs(&id, &e, None, CertifyOptions::default())?;
    log.check("SFS certificate does not claim uniqueness", sfs.conclusion != Tier::UniqueCpd, sfs.conclusion.to_string());
    Ok(log.checks)
}

pub fn alpha_family(alpha: &BigRational) -> Result<FactorTriple, LinalgError> {
    let z = BigRational::zero;
    let o = BigRational::one;
    let a = rat_mat(&[
        &[z(), alpha.clone(), z(), z(), z()],
        &[o(), z(), o(), z(), z()],
        &[o(), z(), z(), o(), z()],
        &[z(), z(), z(), z(), o()],
    ])?;
    let b = int_mat(&[&[0, 1, 0, 0, 0], &[1, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[1, 0, 0, 0, 1]]);
    let c = int_mat(&[&[1, 1, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[1, 0, 0, 0, 1]]);
    Ok(FactorTriple::new(a, b, c).expect("shapes agree"))
}

/// Directions `x` (up to scale) for which `Mᵀx` has a single nonzero.
pub fn direction_set(m: &Mat) -> Result<Vec<Vector>, LinalgError> {
    let mut out: Vec<Vector> = Vec::new();
    for r in one_nonzero_directions(m, None)? {
        if let (true, Some(d)) = (r.nonempty, r.direction) {
            if !out.iter().any(|v| v.is_proportional(&d, 0.0)) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] = 1;
    Vector::from_i64(&v)
}

fn same_directions(got: &[Vector], want: &[Vector]) -> bool {
    got.len() == want.len() && want.iter().all(|w| got.iter().any(|g| g.is_proportional(w, 0.0)))
}

fn alpha_checks(opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("alpha-family");
    if opts.alpha.is_zero() {
        log.check("alpha is nonzero", false, "alpha = 0");
        return Ok(log.checks);
    }
    let f = alpha_family(&opts.alpha)?;
    for (x, y) in PAIRS {
        let kr = khatri_rao(f.factor(x), f.factor(y))?;
        log.check(format!("{x} ⊙ {y} has full column rank"), has_full_column_rank(&kr, None)?, "");
    }
    for (x, y) in PAIRS {
        log.check(
            format!("C_2({x}) ⊙ C_2({y}) has full column rank"),
            check_c(f.factor(x), f.factor(y), 2, None)?.is_holds(),
            "",
        );
    }
    let want = [[0, 3], [0, 2], [1, 2]];
    for (role, idx) in Role::ALL.into_iter().zip(want) {
        let got = direction_set(f.factor(role))?;
        let expect: Vec<Vector> = idx.iter().map(|&i| unit(4, i)).collect();
        log.check(
            format!("single-nonzero directions of {role} are e{} and e{}", idx[0] + 1, idx[1] + 1),
            same_directions(&got, &expect),
            format!("{} found", got.len()),
        );
    }
    for (x, y, z) in [(Role::A, Role::B, Role::C), (Role::B, Role::C, Role::A), (Role::C, Role::A, Role::B)] {
        let w = check_w(f.factor(x), f.factor(y), f.factor(z), 3, None)?;
        log.check(format!("(W3) fails for ({x},{y},{z})"), w.is_fails(), w.verdict.to_string());
    }
    let keep = [0, 2, 3, 4];
    log.check(
        "C_2 product of the four remaining columns has full column rank",
        check_c(&f.a().select_columns(&keep), &f.b().select_columns(&keep), 2, None)?.is_holds()
            && rank(&f.c().select_columns(&keep), None)? == 4,
        "",
    );
    Ok(log.checks)
}

/// Masks for `[I_4 | v]` with the fourth, third and second entry of the
/// perturbation zero in A, B and C.
pub fn masked_kinds() -> Result<[SamplerKind; 3], GenericError> {
    Ok([
        SamplerKind::Masked(Mask::perturbed_identity(4, 3)?),
        SamplerKind::Masked(Mask::perturbed_identity(4, 2)?),
        SamplerKind::Masked(Mask::perturbed_identity(4, 1)?),
    ])
}

fn masked(opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut log = Log::new("masked-perturbation");
    let kinds = masked_kinds()?;
    for t in 0..5u64 {
        let s = derive_seed(opts.seed, &[t]);
        let f = sample_factors([4, 4, 4], 5, &kinds, s)?;
        let ab = check_c(f.a(), f.b(), 3, None)?.is_holds();
        let bc = check_c(f.b(), f.c(), 3, None)?.is_holds();
        let kr: Vec<usize> = Role::ALL.iter().map(|&r| krank(f.factor(r), None)).collect::<Result<_, _>>()?;
        log.check(
            format!("sample {t}: (C3) holds for (A,B) and (B,C)"),
            ab && bc,
            format!("seed {s}, k-ranks {kr:?}"),
        );
    }
    Ok(log.checks)
}

pub fn run_example(name: &str, opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    match name {
        "sharpness" => sharpness(opts),
        "three-by-five" => three_by_five(),
        "four-cube" => four_cube(),
        "five-cube" => five_cube(),
        "five-five-eight" => five_five_eight_checks(),
        "seven-seven-ten" => seven_seven_ten(opts),
        "identity-slab" => identity_slab(),
        "alpha-family" => alpha_checks(opts),
        "masked-perturbation" => masked(opts),
        other => Err(SuiteError::Unknown(other.to_string())),
    }
}

pub fn run_all(opts: &SuiteOptions) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for name in EXAMPLES {
        out.extend(run_example(name, opts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failures(checks: &[Check]) -> Vec<String> {
        checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.example, c.name)).collect()
    }

    #[test]
    fn cheap_examples_pass() {
        let opts = SuiteOptions::default();
        for name in EXAMPLES.iter().filter(|&&n| n != "seven-seven-ten") {
            let checks = run_example(name, &opts).unwrap();
            assert!(!checks.is_empty());
            assert!(failures(&checks).is_empty(), "{:?}", failures(&checks));
        }
    }

    #[test]
    fn tamper_breaks_the_family() {
        let opts = SuiteOptions { tamper: true, ..SuiteOptions::default() };
        let bad = failures(&run_example("sharpness", &opts).unwrap());
        assert_eq!(bad.len(), 3, "{bad:?}");
    }

    #[test]
    fn alpha_family_for_other_alphas() {
        for alpha in [q(2, 3), q(-5, 1), q(1, 7)] {
            let opts = SuiteOptions { alpha, ..SuiteOptions::default() };
            assert!(failures(&run_example("alpha-family", &opts).unwrap()).is_empty());
        }
        let zero = SuiteOptions { alpha: q(0, 1), ..SuiteOptions::default() };
        assert!(!failures(&run_example("alpha-family", &zero).unwrap()).is_empty());
    }

    #[test]
    fn unknown_example() {
        assert!(matches!(run_example("nope", &SuiteOptions::default()), Err(SuiteError::Unknown(_))));
    }
}
