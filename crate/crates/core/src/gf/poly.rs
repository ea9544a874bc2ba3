//! Dense polynomials over the prime field F_p.
//!
//! Coefficients are stored constant term first. All routines keep results
//! trimmed (no trailing zero coefficients); the zero polynomial is the
//! empty vector.

use super::GfError;

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn degree(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

#[inline]
pub(crate) fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod_p(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_p(acc, base, p);
        }
        base = mul_mod_p(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue via Fermat's little theorem.
pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod_p(a, p - 2, p)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push((x + p - y) % p);
    }
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    if p == 2 {
        for (i, &x) in a.iter().enumerate() {
            if x == 1 {
                for (o, &y) in out[i..].iter_mut().zip(b) {
                    *o ^= y;
                }
            }
        }
    } else {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o = (*o + mul_mod_p(x, y, p)) % p;
            }
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    divrem(a, m, p).1
}

/// Polynomial long division; `m` must be nonzero.
pub(crate) fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = inv_mod_p(m[dm], p);
    let mut r: Vec<u64> = a.to_vec();
    trim(&mut r);
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut quot = vec![0u64; r.len() - dm];
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - dm;
        quot[shift] = c;
        for (i, &mc) in m[..=dm].iter().enumerate() {
            let t = mul_mod_p(c, mc, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn monic_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let li = inv_mod_p(x[d], p);
        for c in x.iter_mut() {
            *c = mul_mod_p(*c, li, p);
        }
    }
    x
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, or `None`
/// when `gcd(a, m) != 1`.
pub(crate) fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    trim(&mut r0);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is the gcd up to a unit
    if degree(&r0) != Some(0) {
        return None;
    }
    let unit_inv = inv_mod_p(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&c| mul_mod_p(c, unit_inv, p)).collect();
    out = rem(&out, m, p);
    Some(out)
}

/// `base^(p)` modulo `m` (one Frobenius step).
fn frobenius(base: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        e >>= 1;
        if e > 0 {
            b = mul_mod(&b, &b, m, p);
        }
    }
    acc
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
///
/// A monic `f` of degree `n` is irreducible iff `x^(p^n) = x (mod f)` and
/// `gcd(x^(p^(n/r)) - x, f) = 1` for every prime `r | n`. The test is
/// deterministic.
pub fn is_irreducible(p: u64, poly: &[u64]) -> Result<bool, GfError> {
    let mut f = poly.to_vec();
    trim(&mut f);
    let n = match degree(&f) {
        Some(n) => n,
        None => return Err(GfError::NotMonic),
    };
    if f[n] != 1 {
        return Err(GfError::NotMonic);
    }
    if n == 0 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    let x = vec![0u64, 1];
    let divisors = prime_divisors(n);
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(x.clone());
    for i in 0..n {
        let next = frobenius(&powers[i], &f, p);
        powers.push(next);
    }
    if powers[n] != x {
        return Ok(false);
    }
    for r in divisors {
        let h = sub(&powers[n / r], &x, p);
        let g = monic_gcd(&f, &h, p);
        if g != [1] {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binary_cases() {
        assert!(is_irreducible(2, &[1, 1, 1]).unwrap());
        assert!(!is_irreducible(2, &[1, 0, 1]).unwrap());
        assert!(is_irreducible(2, &[1, 1, 0, 1, 1, 0, 0, 0, 1]).unwrap());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(!is_irreducible(2, &[1, 0, 1, 0, 1]).unwrap());
    }

    #[test]
    fn odd_characteristic() {
        // x^2 + 1 over F_3 is irreducible, over F_5 it is not (2^2 = -1)
        assert!(is_irreducible(3, &[1, 0, 1]).unwrap());
        assert!(!is_irreducible(5, &[1, 0, 1]).unwrap());
        assert!(is_irreducible(7, &[0, 1]).unwrap());
    }

    #[test]
    fn non_monic_rejected() {
        assert_eq!(is_irreducible(3, &[1, 0, 2]), Err(GfError::NotMonic));
        assert_eq!(is_irreducible(3, &[]), Err(GfError::NotMonic));
    }

    #[test]
    fn inverse_mod_matches_product() {
        let m = [1, 1, 0, 1, 1, 0, 0, 0, 1];
        let a = [1, 1, 0, 0, 1, 0, 1];
        let inv = inv_mod(&a, &m, 2).unwrap();
        assert_eq!(mul_mod(&a, &inv, &m, 2), vec![1]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
