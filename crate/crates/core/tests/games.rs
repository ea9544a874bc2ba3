use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use relcommit::exact::{self, Rational};
use relcommit::games::*;
use relcommit::gf::{binary_preset, FieldSpec, FieldTables};

fn solvable_fields() -> Vec<Arc<FieldSpec>> {
    vec![
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(3).unwrap(),
        binary_preset(2).unwrap(),
        FieldSpec::prime(5).unwrap(),
        FieldSpec::prime(7).unwrap(),
        binary_preset(3).unwrap(),
    ]
}

/// Alice distributions: uniform, then mass p on x = 1 with the rest uniform.
fn distributions(q: usize) -> Vec<InputDistribution> {
    let mut out = vec![InputDistribution::uniform(q)];
    for (n, d) in [(1, 4), (1, 2), (3, 4), (1, 1)] {
        out.push(InputDistribution::point_heavy(q, 1, exact::ratio(n, d)).unwrap());
    }
    out
}

/// Enumerates every (f, g) pair; independent of the pointwise-optimal search.
fn naive_value(spec: &GameSpec) -> Rational {
    let q = spec.order();
    let total = q.pow(q as u32);
    let table = |mut i: usize| {
        let mut t = vec![0; q];
        for v in t.iter_mut() {
            *v = i % q;
            i /= q;
        }
        t
    };
    let mut best = Rational::zero();
    for fi in 0..total {
        for gi in 0..total {
            let s = DeterministicStrategy { f: table(fi), g: table(gi) };
            let v = strategy_value(spec, &s).unwrap();
            if v > best {
                best = v;
            }
        }
    }
    best
}

#[test]
fn smart_solver_matches_naive_enumeration() {
    for field in [FieldSpec::prime(2).unwrap(), FieldSpec::prime(3).unwrap()] {
        let q = field.order_u64().unwrap() as usize;
        for alice in distributions(q) {
            let spec = GameSpec::chsh_p(&field, alice).unwrap();
            assert_eq!(classical_value_exact(&spec, 1).unwrap().value, naive_value(&spec));
        }
    }
}

#[test]
fn chsh2_closed_form_grid() {
    let field = FieldSpec::prime(2).unwrap();
    let grid = [(1, 2), (3, 5), (2, 3), (5, 7), (3, 4), (4, 5), (7, 8), (9, 10), (99, 100), (1, 1)];
    for (n, d) in grid {
        let p = exact::ratio(n, d);
        let alice = InputDistribution::new(vec![p.clone(), Rational::one() - &p]).unwrap();
        let spec = GameSpec::chsh_p(&field, alice).unwrap();
        let expected = (Rational::one() + &p) / exact::int(2);
        assert_eq!(classical_value_exact(&spec, 1).unwrap().value, expected);
        assert_eq!(naive_value(&spec), expected);
    }
}

#[test]
fn frozen_values_for_larger_fields() {
    let cases = [(FieldSpec::prime(7).unwrap(), exact::ratio(19, 49)), (binary_preset(3).unwrap(), exact::ratio(3, 8))];
    for (field, expected) in cases {
        let spec = GameSpec::chsh(&field).unwrap();
        let sol = classical_value_exact(&spec, 4).unwrap();
        assert_eq!(sol.value, expected);
        assert_eq!(strategy_value(&spec, &sol.strategy).unwrap(), expected);
    }
}

#[test]
fn worker_count_does_not_change_the_result() {
    for field in [FieldSpec::prime(5).unwrap(), binary_preset(2).unwrap()] {
        let q = field.order_u64().unwrap() as usize;
        for alice in distributions(q) {
            let spec = GameSpec::chsh_p(&field, alice).unwrap();
            let one = classical_value_exact(&spec, 1).unwrap();
            let four = classical_value_exact(&spec, 4).unwrap();
            assert_eq!(one, four);
        }
    }
}

#[test]
fn value_bounded_below_by_one_over_q() {
    for field in solvable_fields().into_iter().take(4) {
        let q = field.order_u64().unwrap() as usize;
        for alice in distributions(q) {
            let spec = GameSpec::chsh_p(&field, alice).unwrap();
            let v = classical_value_exact(&spec, 2).unwrap().value;
            assert!(v >= exact::ratio(1, q as i64) && v <= Rational::one());
        }
    }
}

#[test]
fn value_bound_on_every_solved_instance() {
    let start = Instant::now();
    for field in solvable_fields() {
        let q = field.order_u64().unwrap() as usize;
        for alice in distributions(q) {
            let spec = GameSpec::chsh_p(&field, alice).unwrap();
            let sol = classical_value_exact(&spec, 4).unwrap();
            let p = spec.alice().max_prob();
            assert!(lemma1_holds(&sol.value, &p, q as u64), "q={q} p={p}");
            let report = lemma1_chain_check(&spec, &sol.strategy);
            match report {
                Ok(r) => assert!(r.all_hold(), "q={q} p={p}: {r:?}"),
                Err(GameError::SingleSupport) => assert!(p.is_one()),
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(start.elapsed().as_secs() < 600);
}

#[test]
fn non_signaling_identity_for_random_strategies() {
    let mut rng = ChaCha20Rng::seed_from_u64(31);
    for field in solvable_fields() {
        let tables = FieldTables::new(&field).unwrap();
        let q = tables.order();
        for alice in distributions(q).into_iter().take(4) {
            for _ in 0..100 {
                let f: Vec<usize> = (0..q).map(|_| rng.random_range(0..q)).collect();
                let r = guessing_reduction(&tables, &f, &alice).unwrap();
                assert_eq!(r.mean, exact::ratio(1, q as i64));
                assert!(r.success.iter().sum::<Rational>().is_one());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_chain_holds_for_arbitrary_strategies(
        f in prop::collection::vec(0usize..5, 5),
        g in prop::collection::vec(0usize..5, 5),
        heavy in 1u32..=5,
    ) {
        let field = FieldSpec::prime(5).unwrap();
        let alice = InputDistribution::point_heavy(5, 2, exact::ratio(heavy as i64, 5)).unwrap();
        let spec = GameSpec::chsh_p(&field, alice).unwrap();
        let strategy = DeterministicStrategy { f, g };
        let value = strategy_value(&spec, &strategy).unwrap();
        let best = classical_value_exact(&spec, 1).unwrap().value;
        prop_assert!(value <= best);
        if heavy < 5 {
            let report = lemma1_chain_check(&spec, &strategy).unwrap();
            prop_assert!(report.all_hold());
            prop_assert_eq!(report.value, value);
        }
    }
}
