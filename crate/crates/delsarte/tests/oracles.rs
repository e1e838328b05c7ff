//! Cross-validation of the production code paths against independent
//! brute-force oracles.
//!
//! The character oracle closes the subgroup generated by the rows of the
//! scaled inverse matrix inside all of `(Z/d)^4` and filters by coordinate
//! sum — no Hermite or Smith machinery involved.  The group oracle infers
//! invariant factors from element-order counting over a fundamental
//! domain — no Smith machinery either.  Agreement on every fixture and on
//! a seeded random corpus is the strongest internal evidence that the
//! lattice code is right.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use delsarte::characters::{character_set, oracle_character_set, DEFAULT_CHARACTER_CAP};
use delsarte::group::{cokernel, group_structure_by_counting};
use delsarte::mat::IntMat;
use delsarte::poly::DelsartePolynomial;
use delsarte::weights::derive_weight_system;
use delsarte::{elliptic_family, fermat, named_example};

const ORACLE_D_BOUND: u64 = 40;
const COUNTING_BOUND: u64 = 200_000;

fn check_character_oracle(p: &DelsartePolynomial, label: &str) {
    let ws = derive_weight_system(p).unwrap();
    let cs = character_set(p, &ws, DEFAULT_CHARACTER_CAP).unwrap();
    let mut fast: Vec<[u64; 4]> = cs.elements().to_vec();
    fast.sort_unstable();
    let slow = oracle_character_set(p, &ws, ORACLE_D_BOUND).unwrap();
    assert_eq!(fast, slow, "character sets disagree for {label}");
}

fn check_group_oracle(m: &IntMat, label: &str) {
    let fast = cokernel(m).unwrap();
    let slow = group_structure_by_counting(m, COUNTING_BOUND).unwrap();
    assert_eq!(fast, slow, "group structures disagree for {label}");
}

#[test]
fn named_examples_match_character_oracle() {
    for id in ["X12", "X30", "X36"] {
        check_character_oracle(&named_example(id).unwrap(), id);
    }
}

#[test]
fn fermat_surfaces_match_character_oracle() {
    for d in 1..=10u64 {
        check_character_oracle(&fermat(d).unwrap(), &format!("fermat {d}"));
    }
}

#[test]
fn family_members_match_character_oracle() {
    // s = 1 has d = 36; larger s exceed the oracle's d bound.
    let inst = elliptic_family(1).unwrap();
    check_character_oracle(&inst.polynomial, "family s = 1");
}

#[test]
fn fixture_groups_match_counting_oracle() {
    for id in ["X119", "X12", "X30", "X36"] {
        let p = named_example(id).unwrap();
        let a = p.matrix().clone();
        check_group_oracle(&a, &format!("{id} coker A"));
        let ones = vec![BigInt::from(1); 4];
        check_group_oracle(&a.augment_col(&ones), &format!("{id} coker [A|1]"));
    }
}

#[test]
fn random_corpus_matches_both_oracles() {
    // Seeded rejection sampling: exponent matrices with entries in 0..=3
    // that define a valid weight system with small Fermat degree.  The
    // acceptance bar is 50 accepted instances; the draw cap keeps a
    // regression from looping forever.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0901);
    let mut accepted = 0u32;
    let mut draws = 0u64;
    while accepted < 50 {
        draws += 1;
        assert!(draws < 2_000_000, "rejection sampling stalled");
        let rows: [[i64; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..=3)));
        let Ok(p) = DelsartePolynomial::from_matrix(IntMat::from_i64s(rows)) else {
            continue;
        };
        let Ok(ws) = derive_weight_system(&p) else {
            continue;
        };
        let Some(d) = num_traits::ToPrimitive::to_u64(&ws.d) else {
            continue;
        };
        if d > 12 {
            continue;
        }
        accepted += 1;
        let label = format!("random #{accepted} ({rows:?})");
        check_character_oracle(&p, &label);
        check_group_oracle(p.matrix(), &label);
    }
}
