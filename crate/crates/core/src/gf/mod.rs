//! Exact arithmetic in the Galois field F_q, q = p^n.
//!
//! Elements use a polynomial basis over F_p and are always held fully
//! reduced, so equality and the byte encoding are canonical. A
//! [`FieldSpec`] is shared behind an [`Arc`]; elements carry a handle to the
//! spec that produced them and mixing specs is reported as
//! [`GfError::SpecMismatch`].

mod poly;
mod presets;
mod tables;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use poly::is_irreducible;
pub use presets::{binary_preset, preset_degrees, BINARY_PRESET_DEGREES};
pub use tables::{FieldTables, MAX_TABLE_ORDER};

/// Largest supported characteristic; keeps residue products inside `u64`.
pub const MAX_CHARACTERISTIC: u64 = u32::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("operands belong to different fields")]
    SpecMismatch,
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported maximum")]
    CharacteristicTooLarge(u64),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("modulus has degree {got}, expected {expected}")]
    WrongDegree { expected: usize, got: usize },
    #[error("modulus is reducible over F_{0}")]
    Reducible(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("expected {expected} coefficients, got {got}")]
    WrongCoefficientCount { expected: usize, got: usize },
    #[error("residue {value} out of range for characteristic {p}")]
    ResidueOutOfRange { value: u64, p: u64 },
    #[error("non-zero padding bits in encoding")]
    NonCanonicalPadding,
    #[error("field order exceeds {0}")]
    OrderTooLarge(String),
    #[error("no preset modulus for GF(2^{0})")]
    NoPreset(usize),
    #[error("invalid hex encoding: {0}")]
    Hex(String),
}

/// Description of F_{p^n}: a prime characteristic and a monic irreducible
/// modulus of degree n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    characteristic: u64,
    degree: usize,
    /// Coefficients of the modulus, constant term first; length `degree + 1`.
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Builds and validates a field specification.
    pub fn new(characteristic: u64, degree: usize, modulus: Vec<u64>) -> Result<Arc<Self>, GfError> {
        let spec = Self::checked_shape(characteristic, degree, modulus)?;
        if !is_irreducible(characteristic, &spec.modulus)? {
            return Err(GfError::Reducible(characteristic));
        }
        Ok(Arc::new(spec))
    }

    fn checked_shape(characteristic: u64, degree: usize, modulus: Vec<u64>) -> Result<Self, GfError> {
        if characteristic > MAX_CHARACTERISTIC {
            return Err(GfError::CharacteristicTooLarge(characteristic));
        }
        if !poly::is_prime(characteristic) {
            return Err(GfError::NotPrime(characteristic));
        }
        if let Some(&v) = modulus.iter().find(|&&c| c >= characteristic) {
            return Err(GfError::ResidueOutOfRange { value: v, p: characteristic });
        }
        let got = poly::degree(&modulus).unwrap_or(0);
        if modulus.len() != degree + 1 || got != degree {
            return Err(GfError::WrongDegree { expected: degree, got });
        }
        if modulus[degree] != 1 {
            return Err(GfError::NotMonic);
        }
        if degree == 0 {
            return Err(GfError::WrongDegree { expected: 1, got: 0 });
        }
        Ok(Self { characteristic, degree, modulus })
    }

    /// The prime field F_p, modulus `x`.
    pub fn prime(p: u64) -> Result<Arc<Self>, GfError> {
        Self::new(p, 1, vec![0, 1])
    }

    /// F_{p^n} with a default modulus: the preset table for `p = 2`, otherwise
    /// the lexicographically smallest monic irreducible polynomial (small
    /// degrees only).
    pub fn with_default_modulus(p: u64, n: usize) -> Result<Arc<Self>, GfError> {
        if n == 1 {
            return Self::prime(p);
        }
        if p == 2 {
            if let Ok(spec) = binary_preset(n) {
                return Ok(spec);
            }
        }
        presets::smallest_irreducible(p, n).and_then(|m| Self::new(p, n, m))
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field order q = p^n.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.characteristic).pow(self.degree as u32)
    }

    /// Field order when it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    /// Bits per residue in the canonical encoding: ceil(log2 p).
    pub fn residue_bits(&self) -> usize {
        (64 - (self.characteristic - 1).leading_zeros()) as usize
    }

    /// Canonical encoded length in bytes.
    pub fn byte_len(&self) -> usize {
        (self.degree * self.residue_bits()).div_ceil(8)
    }

    /// ceil(log2 q), the number of random bits drawn per sampling attempt.
    pub fn sample_bits(&self) -> u64 {
        (self.order() - 1u32).bits()
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { spec: Arc::clone(self), coeffs: vec![0; self.degree] }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    /// Embeds an integer through the prime subfield (`n mod p`).
    pub fn from_u64(self: &Arc<Self>, n: u64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = n % self.characteristic;
        e
    }

    /// Embeds a bit as the field's 0 or 1.
    pub fn from_bit(self: &Arc<Self>, bit: bool) -> FieldElement {
        if bit {
            self.one()
        } else {
            self.zero()
        }
    }

    /// Builds an element from residues (constant term first).
    pub fn element(self: &Arc<Self>, coeffs: Vec<u64>) -> Result<FieldElement, GfError> {
        if coeffs.len() != self.degree {
            return Err(GfError::WrongCoefficientCount { expected: self.degree, got: coeffs.len() });
        }
        if let Some(&v) = coeffs.iter().find(|&&c| c >= self.characteristic) {
            return Err(GfError::ResidueOutOfRange { value: v, p: self.characteristic });
        }
        Ok(FieldElement { spec: Arc::clone(self), coeffs })
    }

    /// Element whose residues are the base-p digits of `index`
    /// (least significant digit is the constant term).
    pub fn from_index(self: &Arc<Self>, index: &BigUint) -> Result<FieldElement, GfError> {
        if *index >= self.order() {
            return Err(GfError::OrderTooLarge(index.to_string()));
        }
        let mut coeffs = vec![0u64; self.degree];
        if self.characteristic == 2 {
            for (i, c) in coeffs.iter_mut().enumerate() {
                *c = index.bit(i as u64) as u64;
            }
        } else {
            let mut rest = index.clone();
            let p = BigUint::from(self.characteristic);
            for c in coeffs.iter_mut() {
                *c = (&rest % &p).to_u64().unwrap_or(0);
                rest /= &p;
            }
        }
        Ok(FieldElement { spec: Arc::clone(self), coeffs })
    }

    pub fn from_index_u64(self: &Arc<Self>, index: u64) -> Result<FieldElement, GfError> {
        self.from_index(&BigUint::from(index))
    }

    /// Decodes the canonical byte encoding.
    pub fn from_bytes(self: &Arc<Self>, bytes: &[u8]) -> Result<FieldElement, GfError> {
        let expected = self.byte_len();
        if bytes.len() != expected {
            return Err(GfError::WrongLength { expected, got: bytes.len() });
        }
        let w = self.residue_bits();
        let bit = |i: usize| (bytes[i / 8] >> (i % 8)) & 1;
        let mut coeffs = Vec::with_capacity(self.degree);
        for c in 0..self.degree {
            let mut v = 0u64;
            for k in 0..w {
                v = (v << 1) | bit(c * w + k) as u64;
            }
            if v >= self.characteristic {
                return Err(GfError::ResidueOutOfRange { value: v, p: self.characteristic });
            }
            coeffs.push(v);
        }
        if (self.degree * w..expected * 8).any(|i| bit(i) != 0) {
            return Err(GfError::NonCanonicalPadding);
        }
        Ok(FieldElement { spec: Arc::clone(self), coeffs })
    }

    pub fn from_hex(self: &Arc<Self>, s: &str) -> Result<FieldElement, GfError> {
        let bytes = hex::decode(s).map_err(|e| GfError::Hex(e.to_string()))?;
        self.from_bytes(&bytes)
    }

    /// Uniform sample by rejection over ceil(log2 q)-bit draws.
    ///
    /// Bits are taken least-significant first from successive `next_u64`
    /// words; the candidate is the integer they form, read as an element
    /// index. For `p = 2` no draw is ever rejected.
    pub fn random_element<R: RngCore + ?Sized>(self: &Arc<Self>, rng: &mut R) -> FieldElement {
        let bits = self.sample_bits();
        let order = self.order();
        let words = bits.div_ceil(64) as usize;
        loop {
            let mut bytes = Vec::with_capacity(words * 8);
            for _ in 0..words {
                bytes.extend_from_slice(&rng.next_u64().to_le_bytes());
            }
            let mut candidate = BigUint::from_bytes_le(&bytes);
            if !bits.is_multiple_of(64) {
                candidate &= (BigUint::one() << bits) - 1u32;
            }
            if candidate < order {
                return self.from_index(&candidate).expect("candidate below order");
            }
        }
    }

    /// Iterates over all field elements in index order. Intended for small q.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.order_u64().expect("field too large to enumerate");
        (0..q).map(move |i| self.from_index_u64(i).expect("index below order"))
    }
}

/// Serialized form of a [`FieldSpec`]: characteristic, degree and the
/// modulus coefficients (constant term first). A missing modulus selects
/// the default one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub characteristic: u64,
    #[serde(default = "one_usize")]
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one_usize() -> usize {
    1
}

impl FieldConfig {
    pub fn build(&self) -> Result<Arc<FieldSpec>, GfError> {
        match &self.modulus {
            Some(m) => FieldSpec::new(self.characteristic, self.degree, m.clone()),
            None => FieldSpec::with_default_modulus(self.characteristic, self.degree),
        }
    }
}

impl From<&FieldSpec> for FieldConfig {
    fn from(spec: &FieldSpec) -> Self {
        Self {
            characteristic: spec.characteristic,
            degree: spec.degree,
            modulus: Some(spec.modulus.clone()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "GF({})", self.characteristic)
        } else {
            write!(f, "GF({}^{})", self.characteristic, self.degree)
        }
    }
}

/// An element of F_q in canonical form.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_spec(&self.spec, &other.spec)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.spec, self.to_hex())
    }
}

fn same_spec(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElement {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<(), GfError> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(GfError::SpecMismatch)
        }
    }

    fn with_coeffs(&self, coeffs: Vec<u64>) -> Self {
        Self { spec: Arc::clone(&self.spec), coeffs }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        let p = self.spec.characteristic;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| (a + b) % p).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        let p = self.spec.characteristic;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| (a + p - b) % p).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.characteristic;
        self.with_coeffs(self.coeffs.iter().map(|&a| (p - a) % p).collect())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        let p = self.spec.characteristic;
        let prod = poly::mul_mod(&self.coeffs, &other.coeffs, &self.spec.modulus, p);
        Ok(self.with_coeffs(self.pad(prod)))
    }

    pub fn inv(&self) -> Result<Self, GfError> {
        if self.is_zero() {
            return Err(GfError::ZeroInverse);
        }
        let p = self.spec.characteristic;
        let inv = poly::inv_mod(&self.coeffs, &self.spec.modulus, p).ok_or(GfError::ZeroInverse)?;
        Ok(self.with_coeffs(self.pad(inv)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, GfError> {
        self.checked_mul(&other.inv()?)
    }

    /// `self^exp` by square-and-multiply.
    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut acc = self.spec.one();
        for i in (0..exp.bits()).rev() {
            acc = &acc * &acc;
            if exp.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    fn pad(&self, mut v: Vec<u64>) -> Vec<u64> {
        v.resize(self.spec.degree, 0);
        v
    }

    /// Base-p index of this element (inverse of [`FieldSpec::from_index`]).
    pub fn to_index(&self) -> BigUint {
        let p = BigUint::from(self.spec.characteristic);
        self.coeffs.iter().rev().fold(BigUint::zero(), |acc, &c| acc * &p + c)
    }

    pub fn to_index_u64(&self) -> Option<u64> {
        self.to_index().to_u64()
    }

    /// Canonical byte encoding: residues constant term first, each as a
    /// ceil(log2 p)-bit big-endian field, the resulting bit stream packed
    /// little-endian within bytes with zero padding in the final byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let w = self.spec.residue_bits();
        let mut out = vec![0u8; self.spec.byte_len()];
        for (c, &v) in self.coeffs.iter().enumerate() {
            for k in 0..w {
                let bit = (v >> (w - 1 - k)) & 1;
                let pos = c * w + k;
                out[pos / 8] |= (bit as u8) << (pos % 8);
            }
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch in addition")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs).expect("field mismatch in subtraction")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch in multiplication")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf256() -> Arc<FieldSpec> {
        binary_preset(8).unwrap()
    }

    fn byte(spec: &Arc<FieldSpec>, b: u8) -> FieldElement {
        spec.from_index_u64(b as u64).unwrap()
    }

    /// Shift-and-reduce multiplication in GF(2^8) with the AES modulus,
    /// independent of the polynomial-remainder path.
    fn peasant_mul(mut a: u8, mut b: u8) -> u8 {
        let mut r = 0u8;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            let carry = a & 0x80 != 0;
            a <<= 1;
            if carry {
                a ^= 0x1b;
            }
            b >>= 1;
        }
        r
    }

    #[test]
    fn addition_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert!((&f2.one() + &f2.one()).is_zero());
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(&f3.from_u64(2) + &f3.from_u64(2), f3.from_u64(1));
        let g = gf256();
        assert_eq!(&byte(&g, 0x57) + &byte(&g, 0x83), byte(&g, 0xd4));
    }

    #[test]
    fn multiplication_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(&f3.from_u64(2) * &f3.from_u64(2), f3.from_u64(1));
        let g = gf256();
        assert_eq!(peasant_mul(0x53, 0xca), 0x01);
        assert_eq!(&byte(&g, 0x53) * &byte(&g, 0xca), byte(&g, 0x01));
        let u = byte(&g, 0x9e);
        assert_eq!(&u * &g.one(), u);
    }

    #[test]
    fn multiplication_matches_peasant_oracle_exhaustively() {
        let g = gf256();
        let elems: Vec<_> = g.elements().collect();
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                let got = &elems[a as usize] * &elems[b as usize];
                assert_eq!(got.to_index_u64(), Some(peasant_mul(a, b) as u64));
            }
        }
    }

    #[test]
    fn inversion_and_subtraction() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(f3.from_u64(2).inv().unwrap(), f3.from_u64(2));
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.from_u64(3).inv().unwrap(), f5.from_u64(2));
        let f2 = FieldSpec::prime(2).unwrap();
        assert!((&f2.one() - &f2.one()).is_zero());
        assert_eq!(f5.zero().inv(), Err(GfError::ZeroInverse));
    }

    #[test]
    fn characteristic_two_sub_is_add() {
        let g = gf256();
        for (a, b) in [(0x12u8, 0xf0u8), (0xff, 0x01), (0x80, 0x80)] {
            assert_eq!(&byte(&g, a) - &byte(&g, b), &byte(&g, a) + &byte(&g, b));
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let f3 = FieldSpec::prime(3).unwrap();
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f3.one().checked_add(&f5.one()), Err(GfError::SpecMismatch));
        assert_eq!(f3.one().checked_mul(&f5.one()), Err(GfError::SpecMismatch));
    }

    #[test]
    fn encoding_examples() {
        let g = gf256();
        assert_eq!(byte(&g, 0xd4).to_bytes(), vec![0xd4]);
        let big = binary_preset(340).unwrap();
        assert_eq!(big.byte_len(), 43);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..20 {
            let e = big.random_element(&mut rng);
            let bytes = e.to_bytes();
            assert_eq!(bytes.len(), 43);
            assert_eq!(bytes[42] & 0xf0, 0);
            assert_eq!(big.from_bytes(&bytes).unwrap(), e);
        }
    }

    #[test]
    fn odd_characteristic_encoding() {
        // GF(3): 2-bit residues, big-endian within the residue
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(f3.from_u64(2).to_bytes(), vec![0b01]);
        assert_eq!(f3.from_u64(1).to_bytes(), vec![0b10]);
        assert_eq!(
            f3.from_bytes(&[0b11]),
            Err(GfError::ResidueOutOfRange { value: 3, p: 3 })
        );
        assert_eq!(f3.from_bytes(&[0b100]), Err(GfError::NonCanonicalPadding));
        assert_eq!(f3.from_bytes(&[0, 0]), Err(GfError::WrongLength { expected: 1, got: 2 }));
    }

    #[test]
    fn spec_validation() {
        assert_eq!(FieldSpec::new(4, 1, vec![0, 1]), Err(GfError::NotPrime(4)));
        assert_eq!(FieldSpec::new(2, 2, vec![1, 0, 1]), Err(GfError::Reducible(2)));
        assert_eq!(FieldSpec::new(3, 2, vec![1, 0, 2]), Err(GfError::NotMonic));
        assert!(matches!(FieldSpec::new(2, 3, vec![1, 1, 1]), Err(GfError::WrongDegree { .. })));
        let f9 = FieldSpec::with_default_modulus(3, 2).unwrap();
        assert_eq!(f9.order_u64(), Some(9));
    }

    #[test]
    fn frobenius_identity() {
        for spec in [
            FieldSpec::prime(7).unwrap(),
            binary_preset(8).unwrap(),
            FieldSpec::with_default_modulus(3, 3).unwrap(),
            binary_preset(64).unwrap(),
        ] {
            let q = spec.order();
            let mut rng = ChaCha20Rng::seed_from_u64(11);
            for _ in 0..16 {
                let u = spec.random_element(&mut rng);
                assert_eq!(u.pow(&q), u);
            }
        }
    }

    #[test]
    fn inverse_exhaustive_small_fields() {
        for n in 1..=10 {
            let spec = binary_preset(n).unwrap();
            for u in spec.elements().skip(1) {
                assert!((&u * &u.inv().unwrap()).is_one());
            }
        }
        let f27 = FieldSpec::with_default_modulus(3, 3).unwrap();
        for u in f27.elements().skip(1) {
            assert!((&u * &u.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn serialization_exhaustive_up_to_2_16() {
        let spec = binary_preset(16).unwrap();
        let mut seen = std::collections::HashSet::new();
        for u in spec.elements() {
            let b = u.to_bytes();
            assert_eq!(spec.from_bytes(&b).unwrap(), u);
            assert!(seen.insert(b));
        }
        let f81 = FieldSpec::with_default_modulus(3, 4).unwrap();
        for u in f81.elements() {
            assert_eq!(f81.from_bytes(&u.to_bytes()).unwrap(), u);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = binary_preset(8).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            (0..32).map(|_| spec.random_element(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn binary_sampling_frequency() {
        let f2 = FieldSpec::prime(2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let n = 10_000f64;
        let ones = (0..10_000).filter(|_| f2.random_element(&mut rng).is_one()).count() as f64;
        let sigma = (n * 0.25).sqrt();
        assert!((ones - n / 2.0).abs() <= 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn chi_square_gf256() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let spec = binary_preset(8).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let mut bins = [0u64; 256];
        let draws = 100_000u64;
        for _ in 0..draws {
            bins[spec.random_element(&mut rng).to_index_u64().unwrap() as usize] += 1;
        }
        let expected = draws as f64 / 256.0;
        let stat: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        let critical = ChiSquared::new(255.0).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "chi-square {stat} >= {critical}");
    }

    #[test]
    fn rejection_sampling_odd_order_stays_in_range() {
        let f5 = FieldSpec::prime(5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut counts = [0u32; 5];
        for _ in 0..5000 {
            counts[f5.random_element(&mut rng).to_index_u64().unwrap() as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c > 800));
    }
}
