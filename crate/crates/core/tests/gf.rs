use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use relcommit::gf::{binary_preset, is_irreducible, FieldSpec, FieldTables};

fn fields() -> Vec<Arc<FieldSpec>> {
    vec![
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(3).unwrap(),
        FieldSpec::prime(65521).unwrap(),
        FieldSpec::with_default_modulus(3, 4).unwrap(),
        FieldSpec::with_default_modulus(7, 3).unwrap(),
        binary_preset(8).unwrap(),
        binary_preset(16).unwrap(),
        binary_preset(128).unwrap(),
        binary_preset(340).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(which in 0usize..9, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let field = &fields()[which];
        let draw = |s: u64| field.random_element(&mut ChaCha20Rng::seed_from_u64(s));
        let (a, b, c) = (draw(s1), draw(s2), draw(s3));
        let zero = field.zero();
        let one = field.one();
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert_eq!(&a + &(-&a), zero.clone());
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if a.is_zero() {
            prop_assert!(a.inv().is_err());
        } else {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
            prop_assert_eq!(&(&b * &a).checked_div(&a).unwrap(), &b);
        }
    }

    #[test]
    fn encodings_round_trip(which in 0usize..9, seed in any::<u64>()) {
        let field = &fields()[which];
        let a = field.random_element(&mut ChaCha20Rng::seed_from_u64(seed));
        let bytes = a.to_bytes();
        prop_assert_eq!(bytes.len(), field.byte_len());
        prop_assert_eq!(field.from_bytes(&bytes).unwrap(), a.clone());
        prop_assert_eq!(field.from_hex(&a.to_hex()).unwrap(), a.clone());
        prop_assert_eq!(field.from_index(&a.to_index()).unwrap(), a);
    }

    #[test]
    fn frobenius_fixes_the_field(which in 0usize..9, seed in any::<u64>()) {
        let field = &fields()[which];
        let a = field.random_element(&mut ChaCha20Rng::seed_from_u64(seed));
        prop_assert_eq!(a.pow(&field.order()), a);
    }
}

#[test]
fn multiplicative_group_order() {
    // a^(q-1) = 1 for every nonzero a
    for field in fields().into_iter().take(5) {
        let q1 = field.order() - BigUint::from(1u8);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = field.random_element(&mut rng);
            if !a.is_zero() {
                assert!(a.pow(&q1).is_one(), "{field}");
            }
        }
    }
}

#[test]
fn tables_agree_with_polynomial_arithmetic() {
    for field in [FieldSpec::prime(7).unwrap(), FieldSpec::with_default_modulus(3, 2).unwrap(), binary_preset(4).unwrap()] {
        let t = FieldTables::new(&field).unwrap();
        let q = t.order();
        for x in 0..q {
            for y in 0..q {
                let (ex, ey) = (t.element(x), t.element(y));
                assert_eq!(t.element(t.add(x, y)), &ex + &ey);
                assert_eq!(t.element(t.mul(x, y)), &ex * &ey);
                assert_eq!(t.element(t.sub(x, y)), &ex - &ey);
            }
        }
    }
}

#[test]
fn presets_are_irreducible() {
    for n in [2usize, 3, 8, 16, 32, 64, 128] {
        let field = binary_preset(n).unwrap();
        assert!(is_irreducible(2, field.modulus()).unwrap(), "degree {n}");
    }
}

#[test]
fn mixed_fields_are_rejected() {
    let a = FieldSpec::prime(3).unwrap().one();
    let b = FieldSpec::prime(5).unwrap().one();
    assert!(a.checked_add(&b).is_err());
    assert!(a.checked_mul(&b).is_err());
}
