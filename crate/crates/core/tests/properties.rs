mod support;

use support::props;

const CASES: u32 = 256;

#[test]
fn implication_lattice() {
    props::implication_lattice(CASES).unwrap();
}

#[test]
fn u_forces_k_ranks() {
    props::u_forces_k_ranks(CASES).unwrap();
}

#[test]
fn binet_cauchy_order_two() {
    props::binet_cauchy_order_two(CASES).unwrap();
}

#[test]
fn compound_shape() {
    props::compound_shape(CASES).unwrap();
}

#[test]
fn compound_product_shape() {
    props::compound_product_shape(CASES).unwrap();
}

#[test]
fn hat_round_trip() {
    props::hat_round_trip(CASES).unwrap();
}

#[test]
fn six_unfoldings() {
    props::six_unfoldings(CASES).unwrap();
}

#[test]
fn role_permutation_invariance() {
    props::role_permutation_invariance(CASES).unwrap();
}

#[test]
fn exact_and_float_rank_agree() {
    props::exact_and_float_rank_agree(CASES).unwrap();
}
