//! Uniqueness certificates for a factor triple.
//!
//! `certify` evaluates the necessary conditions and every sufficient rule
//! over all role assignments, records each condition it looked at, and
//! reports the strongest conclusion reached.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{check_c, check_u, check_w, krank, ConditionOutcome, Verdict};
use crate::linalg::{has_full_column_rank, khatri_rao, rank, LinalgError, Mat, Mode};
use crate::tensor::{FactorTriple, Role, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    K,
    C,
    H,
    U,
    W,
    /// `X ⊙ Y` has full column rank.
    C1,
    /// `min(k_A, k_B, k_C) ≥ 2`.
    MinKRank,
    /// `k_A + k_B + k_C ≥ 2R + 2`.
    KruskalSum,
    /// `k_X + r_Y + r_Z ≥ 2R + 2` and `min(r_Z + k_Y, k_Z + r_Y) ≥ R + 2`.
    TwoK,
    /// `max(min(k_X, k_Y − 1), min(k_X − 1, k_Y)) + k_Z ≥ R + 1`, Z the common factor.
    CommonOne,
    /// Two-common-factor inequality with Y the free factor.
    CommonTwo,
    /// `min(k_X, k_Y) ≥ m − 1`, which carries (Wm) down to (W1).
    WChain,
    /// `k_A + k_C ≥ R + 2` for a symmetric triple (A, A, C).
    SfsKSum,
    /// `k_A + max(min(k_C − 1, k_A), min(k_C, k_A − 1)) ≥ R + 1`.
    SfsMixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub condition: Condition,
    pub roles: Vec<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub outcome: ConditionOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    Kruskal,
    TwoK,
    TwoOfThreeU,
    OneFactorPath,
    ThirdFactor,
    SfsKSumCompound,
    SfsMixedCompound,
    SfsBothCompound,
    SfsViaCpd,
}

/// Conclusion tiers, strongest first: UniqueCpd, NecessaryViolated,
/// ThirdFactorUnique, Inconclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    UniqueCpd,
    /// If the rank of the tensor is R, its CPD is not unique.
    NecessaryViolated,
    ThirdFactorUnique(Role),
    Inconclusive,
}

impl Tier {
    fn strength(self) -> u8 {
        match self {
            Tier::UniqueCpd => 3,
            Tier::NecessaryViolated => 2,
            Tier::ThirdFactorUnique(_) => 1,
            Tier::Inconclusive => 0,
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tier::UniqueCpd => f.write_str("unique CPD"),
            Tier::NecessaryViolated => f.write_str("necessary condition violated"),
            Tier::ThirdFactorUnique(r) => write!(f, "factor {r} unique"),
            Tier::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiredRule {
    pub rule: RuleId,
    /// Role assignment (X, Y, Z) the rule was applied under.
    pub roles: Vec<Role>,
    pub conclusion: Tier,
    /// Indices into `Certificate::conditions`, all `Holds`.
    pub premises: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub dims: [usize; 3],
    pub r: usize,
    pub mode: Mode,
    /// The triple is (A, A, C) from a symmetric-frontal-slice tensor.
    pub symmetric: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Computed {
    pub ranks: [usize; 3],
    pub kranks: [usize; 3],
    /// `m_X = R − r_X + 2`.
    pub m: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub inputs: InputSummary,
    pub computed: Computed,
    pub conditions: Vec<ConditionEntry>,
    pub fired: Vec<FiredRule>,
    pub conclusion: Tier,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn entry(&self, condition: Condition, roles: &[Role], order: Option<usize>) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|e| e.condition == condition && e.roles == roles && e.order == order)
    }

    pub fn fired_rule(&self, rule: RuleId) -> bool {
        self.fired.iter().any(|f| f.rule == rule)
    }
}

/// Which role assignments the role-dependent rules try.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleMode {
    #[default]
    All,
    /// Only C plays the third (distinguished) role.
    Fixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub roles: RoleMode,
}

/// Cyclic rotations (X, Y, Z).
const ROTATIONS: [[Role; 3]; 3] = [[Role::A, Role::B, Role::C], [Role::B, Role::C, Role::A], [Role::C, Role::A, Role::B]];

fn from_bool(holds: bool, detail: String) -> ConditionOutcome {
    if holds {
        ConditionOutcome::holds(detail)
    } else {
        ConditionOutcome::fails(detail)
    }
}

/// `max(min(x, y − 1), min(x − 1, y))`.
fn pair_term(x: usize, y: usize) -> usize {
    (x.min(y.saturating_sub(1))).max(x.saturating_sub(1).min(y))
}

struct Ctx<'a> {
    f: &'a FactorTriple,
    tol: Option<f64>,
    r: usize,
    ranks: [usize; 3],
    kranks: [usize; 3],
    table: Vec<ConditionEntry>,
}

impl<'a> Ctx<'a> {
    fn new(f: &'a FactorTriple, tol: Option<f64>) -> Result<Self, CertifyError> {
        let mut ranks = [0; 3];
        let mut kranks = [0; 3];
        for role in Role::ALL {
            ranks[role.index()] = rank(f.factor(role), tol)?;
            kranks[role.index()] = krank(f.factor(role), tol)?;
        }
        Ok(Ctx { f, tol, r: f.r(), ranks, kranks, table: Vec::new() })
    }

    fn k(&self, x: Role) -> usize {
        self.kranks[x.index()]
    }

    fn rk(&self, x: Role) -> usize {
        self.ranks[x.index()]
    }

    fn m(&self, x: Role) -> usize {
        self.r - self.rk(x) + 2
    }

    fn mat(&self, x: Role) -> &Mat {
        self.f.factor(x)
    }

    /// Evaluates a condition once and returns its table index.
    fn eval(
        &mut self,
        condition: Condition,
        roles: &[Role],
        order: Option<usize>,
        run: impl FnOnce(&Self) -> Result<ConditionOutcome, CertifyError>,
    ) -> Result<usize, CertifyError> {
        if let Some(i) =
            self.table.iter().position(|e| e.condition == condition && e.roles == roles && e.order == order)
        {
            return Ok(i);
        }
        let outcome = run(self)?;
        self.table.push(ConditionEntry { condition, roles: roles.to_vec(), order, outcome });
        Ok(self.table.len() - 1)
    }

    fn holds(&self, i: usize) -> bool {
        self.table[i].outcome.is_holds()
    }

    fn c1(&mut self, x: Role, y: Role) -> Result<usize, CertifyError> {
        self.eval(Condition::C1, &[x, y], None, |c| {
            let full = has_full_column_rank(&khatri_rao(c.mat(x), c.mat(y))?, c.tol)?;
            Ok(from_bool(full, format!("{x}⊙{y} {} full column rank", if full { "has" } else { "lacks" })))
        })
    }

    fn u(&mut self, x: Role, y: Role, m: usize) -> Result<usize, CertifyError> {
        self.eval(Condition::U, &[x, y], Some(m), |c| Ok(check_u(c.mat(x), c.mat(y), m, c.tol)?))
    }

    fn w(&mut self, x: Role, y: Role, z: Role, m: usize) -> Result<usize, CertifyError> {
        self.eval(Condition::W, &[x, y, z], Some(m), |c| Ok(check_w(c.mat(x), c.mat(y), c.mat(z), m, c.tol)?))
    }

    fn w_chain(&mut self, x: Role, y: Role, m: usize) -> Result<usize, CertifyError> {
        self.eval(Condition::WChain, &[x, y], Some(m), |c| {
            let lo = c.k(x).min(c.k(y));
            Ok(from_bool(lo + 1 >= m, format!("min(k_{x}, k_{y}) = {lo}, m − 1 = {}", m - 1)))
        })
    }

    fn common_one(&mut self, x: Role, y: Role, z: Role) -> Result<usize, CertifyError> {
        self.eval(Condition::CommonOne, &[x, y, z], None, |c| {
            let lhs = pair_term(c.k(x), c.k(y)) + c.k(z);
            Ok(from_bool(lhs > c.r, format!("{lhs} vs R+1 = {}", c.r + 1)))
        })
    }

    fn fire(&self, fired: &mut Vec<FiredRule>, rule: RuleId, roles: &[Role], conclusion: Tier, premises: Vec<usize>) {
        debug_assert!(premises.iter().all(|&i| self.holds(i)));
        fired.push(FiredRule { rule, roles: roles.to_vec(), conclusion, premises });
    }
}

fn roles_for(mode: RoleMode) -> &'static [[Role; 3]] {
    match mode {
        RoleMode::All => &ROTATIONS,
        RoleMode::Fixed => &ROTATIONS[..1],
    }
}

/// Necessary-condition entries: the k-rank bound, (C1) and (U2) for the
/// three pairs.
fn necessary(ctx: &mut Ctx) -> Result<Vec<usize>, CertifyError> {
    let mut out = Vec::new();
    out.push(ctx.eval(Condition::MinKRank, &Role::ALL, None, |c| {
        let lo = c.kranks.iter().min().copied().unwrap_or(0);
        Ok(from_bool(lo >= 2, format!("k = {:?}", c.kranks)))
    })?);
    for [x, y, _] in ROTATIONS {
        out.push(ctx.c1(x, y)?);
    }
    for [x, y, _] in ROTATIONS {
        out.push(ctx.u(x, y, 2)?);
    }
    Ok(out)
}

fn rule_kruskal(ctx: &mut Ctx, fired: &mut Vec<FiredRule>) -> Result<(), CertifyError> {
    let i = ctx.eval(Condition::KruskalSum, &Role::ALL, None, |c| {
        let s: usize = c.kranks.iter().sum();
        Ok(from_bool(s >= 2 * c.r + 2, format!("k-sum {s} vs 2R+2 = {}", 2 * c.r + 2)))
    })?;
    if ctx.holds(i) {
        ctx.fire(fired, RuleId::Kruskal, &Role::ALL, Tier::UniqueCpd, vec![i]);
    }
    Ok(())
}

fn rule_two_k(ctx: &mut Ctx, fired: &mut Vec<FiredRule>, mode: RoleMode) -> Result<(), CertifyError> {
    for &[x, y, z] in roles_for(mode) {
        let i = ctx.eval(Condition::TwoK, &[x, y, z], None, |c| {
            let s = c.k(x) + c.rk(y) + c.rk(z);
            let t = (c.rk(z) + c.k(y)).min(c.k(z) + c.rk(y));
            let ok = s >= 2 * c.r + 2 && t >= c.r + 2;
            Ok(from_bool(ok, format!("k_{x}+r_{y}+r_{z} = {s} vs {}; min(r_{z}+k_{y}, k_{z}+r_{y}) = {t} vs {}", 2 * c.r + 2, c.r + 2)))
        })?;
        if ctx.holds(i) {
            ctx.fire(fired, RuleId::TwoK, &[x, y, z], Tier::UniqueCpd, vec![i]);
        }
    }
    Ok(())
}

fn rule_two_of_three_u(ctx: &mut Ctx, fired: &mut Vec<FiredRule>) -> Result<(), CertifyError> {
    // (U m_X) on the other two factors makes X unique
    let mut holding = Vec::new();
    for [x, y, z] in ROTATIONS {
        let m = ctx.m(x);
        let i = ctx.u(y, z, m)?;
        if ctx.holds(i) {
            holding.push(i);
        }
    }
    if holding.len() >= 2 {
        ctx.fire(fired, RuleId::TwoOfThreeU, &Role::ALL, Tier::UniqueCpd, holding);
    }
    Ok(())
}

fn rule_one_factor(ctx: &mut Ctx, fired: &mut Vec<FiredRule>, mode: RoleMode) -> Result<(), CertifyError> {
    for &[_, _, z] in roles_for(mode) {
        // z is the distinguished third factor, x and y the other two in cyclic order
        let [x, y] = match z {
            Role::C => [Role::A, Role::B],
            Role::A => [Role::B, Role::C],
            Role::B => [Role::C, Role::A],
        };
        let m = ctx.m(z);
        let c1 = ctx.c1(x, y)?;
        let w = ctx.w(x, y, z, m)?;
        let chain = ctx.w_chain(x, y, m)?;
        if !(ctx.holds(c1) && ctx.holds(w) && ctx.holds(chain)) {
            continue;
        }
        ctx.fire(fired, RuleId::ThirdFactor, &[x, y, z], Tier::ThirdFactorUnique(z), vec![c1, w, chain]);
        let e = ctx.common_one(x, y, z)?;
        if ctx.holds(e) {
            ctx.fire(fired, RuleId::OneFactorPath, &[x, y, z], Tier::UniqueCpd, vec![e, c1, w, chain]);
        }
    }
    Ok(())
}

fn conclude(ctx: &Ctx, fired: &[FiredRule], nec: &[usize]) -> Tier {
    let mut tier = fired.iter().map(|f| f.conclusion).max_by_key(|t| t.strength()).unwrap_or(Tier::Inconclusive);
    let violated = nec.iter().any(|&i| ctx.table[i].outcome.is_fails());
    if violated && tier.strength() < Tier::NecessaryViolated.strength() {
        tier = Tier::NecessaryViolated;
    }
    tier
}

fn finish(mut ctx: Ctx, fired: Vec<FiredRule>, nec: Vec<usize>, symmetric: bool) -> Certificate {
    let conclusion = conclude(&ctx, &fired, &nec);
    let mut notes = Vec::new();
    if conclusion == Tier::UniqueCpd {
        for &i in &nec {
            let e = &mut ctx.table[i];
            match e.outcome.verdict {
                Verdict::Unknown => {
                    e.outcome = ConditionOutcome::holds(format!("implied by uniqueness; {}", e.outcome.detail));
                }
                Verdict::Fails => notes.push(format!("necessary {:?} {:?} fails alongside a uniqueness rule", e.condition, e.roles)),
                _ => {}
            }
        }
    }
    if conclusion == Tier::NecessaryViolated {
        notes.push("not unique, provided the tensor rank equals R".to_string());
    }
    let (ni, nj, nk) = ctx.f.dims();
    let m = [ctx.m(Role::A), ctx.m(Role::B), ctx.m(Role::C)];
    Certificate {
        inputs: InputSummary { dims: [ni, nj, nk], r: ctx.r, mode: ctx.f.mode(), symmetric },
        computed: Computed { ranks: ctx.ranks, kranks: ctx.kranks, m },
        conditions: ctx.table,
        fired,
        conclusion,
        notes,
    }
}

pub fn certify(f: &FactorTriple, tol: Option<f64>, options: CertifyOptions) -> Result<Certificate, CertifyError> {
    let mut ctx = Ctx::new(f, tol)?;
    let (nec, fired) = run_rules(&mut ctx, options)?;
    Ok(finish(ctx, fired, nec, false))
}

fn run_rules(ctx: &mut Ctx, options: CertifyOptions) -> Result<(Vec<usize>, Vec<FiredRule>), CertifyError> {
    let nec = necessary(ctx)?;
    let mut fired = Vec::new();
    rule_kruskal(ctx, &mut fired)?;
    rule_two_k(ctx, &mut fired, options.roles)?;
    rule_two_of_three_u(ctx, &mut fired)?;
    rule_one_factor(ctx, &mut fired, options.roles)?;
    Ok((nec, fired))
}

/// Necessary-condition report on its own: (k-rank bound, (C1) per pair,
/// (U2) per pair).
pub fn necessary_conditions(f: &FactorTriple, tol: Option<f64>) -> Result<Vec<ConditionEntry>, CertifyError> {
    let mut ctx = Ctx::new(f, tol)?;
    let idx = necessary(&mut ctx)?;
    Ok(idx.into_iter().map(|i| ctx.table[i].clone()).collect())
}

/// One-common-factor inequality with `common` as the shared factor.
pub fn check_common_one(f: &FactorTriple, common: Role, tol: Option<f64>) -> Result<ConditionOutcome, CertifyError> {
    let ctx = Ctx::new(f, tol)?;
    let [x, y] = others(common);
    let lhs = pair_term(ctx.k(x), ctx.k(y)) + ctx.k(common);
    Ok(from_bool(lhs > ctx.r, format!("{lhs} vs R+1 = {}", ctx.r + 1)))
}

/// Two-common-factor inequality; `free` is the factor not shared.
pub fn check_common_two(f: &FactorTriple, free: Role, tol: Option<f64>) -> Result<ConditionOutcome, CertifyError> {
    let ctx = Ctx::new(f, tol)?;
    let [p, q] = others(free);
    let mut parts = Vec::new();
    let mut ok = false;
    for (z, x) in [(q, p), (p, q)] {
        let lhs = pair_term(ctx.k(x), ctx.k(free)) + ctx.rk(z);
        let line = ctx.k(z) >= 2 && lhs > ctx.r;
        parts.push(format!("k_{z}={} and {lhs} vs {}", ctx.k(z), ctx.r + 1));
        ok |= line;
    }
    Ok(from_bool(ok, parts.join("; ")))
}

fn others(role: Role) -> [Role; 2] {
    match role {
        Role::A => [Role::B, Role::C],
        Role::B => [Role::A, Role::C],
        Role::C => [Role::A, Role::B],
    }
}

/// Certificate for the symmetric-frontal-slice tensor `[A, A, C]`. Every
/// conclusion goes through uniqueness of the unconstrained CPD.
pub fn certify_sfs(a: &Mat, c: &Mat, tol: Option<f64>, options: CertifyOptions) -> Result<Certificate, CertifyError> {
    let f = FactorTriple::new(a.clone(), a.clone(), c.clone())?;
    let mut ctx = Ctx::new(&f, tol)?;
    let (nec, mut fired) = run_rules(&mut ctx, options)?;
    let base: Vec<usize> = fired.iter().filter(|r| r.conclusion == Tier::UniqueCpd).flat_map(|r| r.premises.clone()).collect();

    let (ka, kc, r) = (ctx.k(Role::A), ctx.k(Role::C), ctx.r);
    let (ma, mc) = (ctx.m(Role::A), ctx.m(Role::C));
    let ksum = ctx.eval(Condition::SfsKSum, &[Role::A, Role::C], None, |_| {
        Ok(from_bool(ka + kc >= r + 2, format!("k_A+k_C = {} vs R+2 = {}", ka + kc, r + 2)))
    })?;
    let mixed = ctx.eval(Condition::SfsMixed, &[Role::A, Role::C], None, |_| {
        let lhs = ka + pair_term(kc, ka);
        Ok(from_bool(lhs > r, format!("{lhs} vs R+1 = {}", r + 1)))
    })?;
    let caa = ctx.eval(Condition::C, &[Role::A, Role::A], Some(mc), |c| Ok(check_c(c.mat(Role::A), c.mat(Role::A), mc, c.tol)?))?;
    let cac = ctx.eval(Condition::C, &[Role::A, Role::C], Some(ma), |c| Ok(check_c(c.mat(Role::A), c.mat(Role::C), ma, c.tol)?))?;
    let sfs_roles = [Role::A, Role::A, Role::C];
    if ctx.holds(ksum) && ctx.holds(caa) {
        ctx.fire(&mut fired, RuleId::SfsKSumCompound, &sfs_roles, Tier::UniqueCpd, vec![ksum, caa]);
    }
    if ctx.holds(mixed) && ctx.holds(cac) {
        ctx.fire(&mut fired, RuleId::SfsMixedCompound, &sfs_roles, Tier::UniqueCpd, vec![mixed, cac]);
    }
    if ctx.holds(caa) && ctx.holds(cac) {
        ctx.fire(&mut fired, RuleId::SfsBothCompound, &sfs_roles, Tier::UniqueCpd, vec![cac, caa]);
    }
    if !base.is_empty() {
        let mut p = base;
        p.sort_unstable();
        p.dedup();
        ctx.fire(&mut fired, RuleId::SfsViaCpd, &sfs_roles, Tier::UniqueCpd, p);
    }
    Ok(finish(ctx, fired, nec, true))
}
