//! Shipped moduli for binary fields.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{poly, FieldSpec, GfError};

/// Exponents of the nonzero terms of each preset modulus x^n + ... + 1.
const BINARY_PRESETS: &[(usize, &[usize])] = &[
    (1, &[1]),
    (2, &[0, 1, 2]),
    (3, &[0, 1, 3]),
    (4, &[0, 1, 4]),
    (5, &[0, 2, 5]),
    (6, &[0, 1, 6]),
    (7, &[0, 1, 7]),
    (8, &[0, 1, 3, 4, 8]),
    (9, &[0, 1, 9]),
    (10, &[0, 3, 10]),
    (11, &[0, 2, 11]),
    (12, &[0, 3, 12]),
    (13, &[0, 1, 3, 4, 13]),
    (14, &[0, 5, 14]),
    (15, &[0, 1, 15]),
    (16, &[0, 1, 3, 5, 16]),
    (32, &[0, 2, 3, 7, 32]),
    (64, &[0, 1, 3, 4, 64]),
    (128, &[0, 1, 2, 7, 128]),
    (170, &[0, 11, 170]),
    (340, &[0, 45, 340]),
];

pub const BINARY_PRESET_DEGREES: [usize; 21] =
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 32, 64, 128, 170, 340];

pub fn preset_degrees() -> impl Iterator<Item = usize> {
    BINARY_PRESETS.iter().map(|&(n, _)| n)
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<FieldSpec>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FieldSpec>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// GF(2^n) with the shipped modulus. Irreducibility is re-verified the first
/// time each preset is loaded.
pub fn binary_preset(n: usize) -> Result<Arc<FieldSpec>, GfError> {
    if let Some(spec) = cache().lock().expect("preset cache poisoned").get(&n) {
        return Ok(Arc::clone(spec));
    }
    let (_, terms) = BINARY_PRESETS.iter().find(|&&(d, _)| d == n).ok_or(GfError::NoPreset(n))?;
    let mut modulus = vec![0u64; n + 1];
    for &t in terms.iter() {
        modulus[t] = 1;
    }
    let spec = FieldSpec::new(2, n, modulus)?;
    cache().lock().expect("preset cache poisoned").insert(n, Arc::clone(&spec));
    Ok(spec)
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over F_p, ordered by the coefficient vector read from x^(n-1) down.
pub(crate) fn smallest_irreducible(p: u64, n: usize) -> Result<Vec<u64>, GfError> {
    if !poly::is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let candidates = (p as u128).checked_pow(n as u32).filter(|&c| c <= 1 << 24);
    let count = candidates.ok_or_else(|| GfError::OrderTooLarge(format!("{p}^{n} for modulus search")))?;
    for idx in 0..count {
        let mut m = vec![0u64; n + 1];
        m[n] = 1;
        let mut rest = idx;
        for c in m[..n].iter_mut() {
            *c = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        if poly::is_irreducible(p, &m)? {
            return Ok(m);
        }
    }
    Err(GfError::Reducible(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive trial division by every monic polynomial of degree
    /// 1..=n/2 over F_2, independent of Rabin's test.
    fn trial_division_irreducible(m: u64) -> bool {
        let deg = 63 - m.leading_zeros();
        let rem = |mut a: u64, b: u64| {
            let db = 63 - b.leading_zeros();
            while a != 0 && 63 - a.leading_zeros() >= db {
                a ^= b << ((63 - a.leading_zeros()) - db);
            }
            a
        };
        (1..=deg / 2).all(|d| ((1u64 << d)..(1u64 << (d + 1))).all(|f| rem(m, f) != 0))
    }

    #[test]
    fn small_presets_pass_trial_division() {
        for n in 1..=16usize {
            let spec = binary_preset(n).unwrap();
            let m = spec.modulus().iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i));
            assert!(trial_division_irreducible(m), "degree {n}");
        }
    }

    #[test]
    fn aes_modulus_is_the_degree_eight_preset() {
        let spec = binary_preset(8).unwrap();
        assert_eq!(spec.modulus(), &[1, 1, 0, 1, 1, 0, 0, 0, 1]);
        assert!(trial_division_irreducible(0x11b));
    }

    #[test]
    fn trial_division_agrees_with_rabin() {
        for m in 2u64..(1 << 11) {
            let coeffs: Vec<u64> = (0..=(63 - m.leading_zeros())).map(|i| (m >> i) & 1).collect();
            assert_eq!(poly::is_irreducible(2, &coeffs).unwrap(), trial_division_irreducible(m), "{m:#b}");
        }
    }

    #[test]
    fn every_preset_loads() {
        for n in preset_degrees() {
            assert_eq!(binary_preset(n).unwrap().degree(), n);
        }
        assert_eq!(binary_preset(17), Err(GfError::NoPreset(17)));
        assert_eq!(preset_degrees().collect::<Vec<_>>(), BINARY_PRESET_DEGREES.to_vec());
    }

    #[test]
    fn default_modulus_search() {
        assert_eq!(smallest_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
    }
}
