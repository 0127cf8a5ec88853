//! Randomized invariants on small exact instances, shared by the
//! property and acceptance targets.

use cpdcert::certify::{certify, CertifyOptions, Tier};
use cpdcert::conditions::{
    check_c, check_h, check_k, check_u, check_w, compound_product, hat_vector, krank, reconstruct_from_hat,
    ConditionOutcome, Verdict,
};
use cpdcert::linalg::{binomial_usize, compound, det, rank, Mat, Vector};
use cpdcert::tensor::{from_factors, unfold, unfolding_formula, FactorTriple, Role};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Fixed-seed runner, so a failure reproduces from the case count alone.
fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn to_mat(rows: usize, cols: usize, v: &[i64]) -> Mat {
    Mat::from_rows(&v.chunks(cols).take(rows).map(|c| c.to_vec()).collect::<Vec<_>>())
}

/// Small entries with plenty of zeros, so rank drops are common.
fn entries(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => Just(1i64), 1 => -2i64..=2], n)
}

/// Factor matrices may not have zero columns.
fn fill_zero_columns(rows: usize, cols: usize, v: &mut [i64]) {
    for j in 0..cols {
        if (0..rows).all(|i| v[i * cols + j] == 0) {
            v[(j % rows) * cols + j] = 1;
        }
    }
}

fn factor_entries(rows: usize, cols: usize) -> impl Strategy<Value = Vec<i64>> {
    entries(rows * cols).prop_map(move |mut v| {
        fill_zero_columns(rows, cols, &mut v);
        v
    })
}

fn mat(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    factor_entries(rows, cols).prop_map(move |v| to_mat(rows, cols, &v))
}

/// (A, B, C) with dims in `2..=max_dim` and R in `2..=max_r`.
fn triple(max_dim: usize, max_r: usize) -> impl Strategy<Value = FactorTriple> {
    (2..=max_dim, 2..=max_dim, 2..=max_dim, 2..=max_r).prop_flat_map(|(i, j, k, r)| {
        (mat(i, r), mat(j, r), mat(k, r)).prop_map(|(a, b, c)| FactorTriple::new(a, b, c).unwrap())
    })
}

fn not_fails(o: &ConditionOutcome) -> bool {
    o.verdict != Verdict::Fails
}

struct Orders {
    k: Vec<ConditionOutcome>,
    c: Vec<ConditionOutcome>,
    h: Vec<ConditionOutcome>,
    u: Vec<ConditionOutcome>,
    w: Vec<ConditionOutcome>,
}

fn orders(f: &FactorTriple, top: usize) -> Orders {
    let (a, b, c) = (f.a(), f.b(), f.c());
    let all = |g: &dyn Fn(usize) -> ConditionOutcome| (1..=top).map(g).collect::<Vec<_>>();
    Orders {
        k: all(&|m| check_k(a, b, m, None).unwrap()),
        c: all(&|m| check_c(a, b, m, None).unwrap()),
        h: all(&|m| check_h(a, b, m, None).unwrap()),
        u: all(&|m| check_u(a, b, m, None).unwrap()),
        w: all(&|m| check_w(a, b, c, m, None).unwrap()),
    }
}

pub fn implication_lattice(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&triple(5, 7), |f| {
            let (i, j, _) = f.dims();
            let top = i.min(j).min(f.r());
            let o = orders(&f, top);
            let kmin = krank(f.a(), None).unwrap().min(krank(f.b(), None).unwrap());
            for m in 0..top {
                if o.k[m].is_holds() {
                    prop_assert!(not_fails(&o.c[m]) && not_fails(&o.h[m]), "K{} holds", m + 1);
                }
                if o.c[m].is_holds() || o.h[m].is_holds() {
                    prop_assert!(not_fails(&o.u[m]), "C/H{} holds, U fails", m + 1);
                }
                if o.u[m].is_holds() {
                    prop_assert!(not_fails(&o.w[m]), "U{} holds, W fails", m + 1);
                }
                for lower in 0..m {
                    for (name, col) in [("K", &o.k), ("C", &o.c), ("H", &o.h), ("U", &o.u)] {
                        if col[m].is_holds() {
                            prop_assert!(not_fails(&col[lower]), "{}{} holds, {}{} fails", name, m + 1, name, lower + 1);
                        }
                    }
                    // order m + 1 carries down once min(k_A, k_B) >= m
                    if o.w[m].is_holds() && kmin >= m {
                        prop_assert!(not_fails(&o.w[lower]), "W{} holds, W{} fails", m + 1, lower + 1);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn u_forces_k_ranks(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(triple(6, 8), 1usize..=6), |(f, m)| {
            let (i, j, _) = f.dims();
            prop_assume!(m <= i.min(j).min(f.r()));
            if check_u(f.a(), f.b(), m, None).unwrap().is_holds() {
                let (ka, kb) = (krank(f.a(), None).unwrap(), krank(f.b(), None).unwrap());
                prop_assert!(ka.min(kb) >= m, "U{} with k-ranks {} {}", m, ka, kb);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn binet_cauchy_order_two(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(2usize..=5, 2usize..=5, 2usize..=5, 2usize..=5) .prop_flat_map(|(p, q, s, t)| (mat(p, q), mat(q, s), mat(s, t))), |(x, y, z)| {
            let lhs = compound(&x.matmul(&y).unwrap().matmul(&z).unwrap(), 2).unwrap();
            let rhs = compound(&x, 2).unwrap().matmul(&compound(&y, 2).unwrap()).unwrap().matmul(&compound(&z, 2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn compound_shape(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&((1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| mat(r, c)), 1usize..=6), |(a, k)| {
            let (r, c) = (a.rows(), a.cols());
            match compound(&a, k) {
                Ok(m) => {
                    prop_assert!(k <= r.min(c));
                    prop_assert_eq!((m.rows(), m.cols()), (binomial_usize(r, k), binomial_usize(c, k)));
                    if k == 1 {
                        prop_assert_eq!(&m, &a);
                    }
                    if r == c && k == r {
                        prop_assert_eq!(m.get(0, 0), det(&a).unwrap());
                    }
                }
                Err(_) => prop_assert!(k > r.min(c)),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn compound_product_shape(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(triple(5, 7), 1usize..=5), |(f, m)| {
            let (i, j, _) = f.dims();
            let r = f.r();
            match compound_product(f.a(), f.b(), m) {
                Ok(p) => prop_assert_eq!(
                    (p.rows(), p.cols()),
                    (binomial_usize(i, m) * binomial_usize(j, m), binomial_usize(r, m))
                ),
                Err(_) => prop_assert!(m > i.min(j).min(r)),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn hat_round_trip(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&((2usize..=8).prop_flat_map(entries), 1usize..=8), |(d, m)| {
            let r = d.len();
            prop_assume!(m <= r);
            let dv = Vector::from_i64(&d);
            let weight = d.iter().filter(|&&x| x != 0).count();
            let h = hat_vector(&dv, m).unwrap();
            prop_assert_eq!(h.len(), binomial_usize(r, m));
            match reconstruct_from_hat(&h, m, r) {
                None => prop_assert!(weight < m),
                Some(back) => {
                    prop_assert!(weight >= m);
                    prop_assert!(hat_vector(&back, m).unwrap().is_proportional(&h, 0.0));
                    if weight > m {
                        prop_assert!(back.is_proportional(&dv, 0.0));
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn six_unfoldings(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(1usize..=4, 1usize..=4, 1usize..=4, 1usize..=5).prop_flat_map(|(i, j, k, r)| { (Just((i, j, k, r)), factor_entries(i, r), factor_entries(j, r), factor_entries(k, r)) }), |(dims, a, b, c)| {
            let (ni, nj, nk, r) = dims;
            let f = FactorTriple::new(to_mat(ni, r, &a), to_mat(nj, r, &b), to_mat(nk, r, &c)).unwrap();
            let t = from_factors(&f);
            // plain triple sum as the oracle
            let entry = |i: usize, j: usize, k: usize| -> i64 { (0..r).map(|p| a[i * r + p] * b[j * r + p] * c[k * r + p]).sum() };
            for which in 1..=6 {
                let u = unfold(&t, which).unwrap();
                prop_assert_eq!(&u, &unfolding_formula(&f, which).unwrap());
                for i in 0..ni {
                    for j in 0..nj {
                        for k in 0..nk {
                            let (row, col) = match which {
                                1 => (i * nj + j, k),
                                2 => (j * nk + k, i),
                                3 => (k * ni + i, j),
                                4 => (i * nk + k, j),
                                5 => (j * ni + i, k),
                                _ => (k * nj + j, i),
                            };
                            prop_assert_eq!(u.get(row, col), cpdcert::linalg::Scalar::int(entry(i, j, k)));
                        }
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn role_permutation_invariance(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(triple(5, 6), 0usize..6), |(f, which)| {
            let perms = [
                [Role::A, Role::B, Role::C],
                [Role::A, Role::C, Role::B],
                [Role::B, Role::A, Role::C],
                [Role::B, Role::C, Role::A],
                [Role::C, Role::A, Role::B],
                [Role::C, Role::B, Role::A],
            ];
            let p = perms[which];
            let g = f.permuted(p);
            let base = certify(&f, None, CertifyOptions::default()).unwrap().conclusion;
            let moved = certify(&g, None, CertifyOptions::default()).unwrap().conclusion;
            let expect = match base {
                // the old role `x` now sits at the position where p names it
                Tier::ThirdFactorUnique(x) => {
                    let pos = p.iter().position(|&q| q == x).unwrap();
                    Tier::ThirdFactorUnique(Role::ALL[pos])
                }
                t => t,
            };
            prop_assert_eq!(moved, expect);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn exact_and_float_rank_agree(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(1usize..=12, 1usize..=12, 1usize..=12).prop_flat_map(|(r, k, c)| { (prop::collection::vec(-9i64..=9, r * k).prop_map(move |v| to_mat(r, k, &v)), prop::collection::vec(-9i64..=9, k * c).prop_map(move |v| to_mat(k, c, &v))) }), |(x, y)| {
            // products of random factors are rank deficient whenever the inner size is small
            let m = x.matmul(&y).unwrap();
            prop_assert_eq!(rank(&m, None).unwrap(), rank(&m.to_float(), None).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: [(&str, Property); 9] = [
    ("implication_lattice", implication_lattice),
    ("u_forces_k_ranks", u_forces_k_ranks),
    ("binet_cauchy_order_two", binet_cauchy_order_two),
    ("compound_shape", compound_shape),
    ("compound_product_shape", compound_product_shape),
    ("hat_round_trip", hat_round_trip),
    ("six_unfoldings", six_unfoldings),
    ("role_permutation_invariance", role_permutation_invariance),
    ("exact_and_float_rank_agree", exact_and_float_rank_agree),
];
