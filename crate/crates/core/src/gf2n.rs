//! Arithmetic in `GF(2^n)` for `n <= 24`, polynomial basis, and brute-force
//! point counting on the affine Suzuki model.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SuzukiParams;

pub const MAX_DEGREE: u32 = 24;

/// Carry-less product of two binary polynomials of degree < 32.
fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u64, modulus: u64) -> u64 {
    let dm = degree(modulus);
    while a != 0 && degree(a) >= dm {
        a ^= modulus << (degree(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `x^(2^n) = x mod f` and `gcd(x^(2^(n/p)) - x, f) = 1` for
/// every prime `p | n`.
pub fn is_irreducible(modulus: u64) -> bool {
    let n = degree(modulus);
    if n < 1 {
        return false;
    }
    let n = n as u32;
    let x = poly_rem(0b10, modulus);
    // frob[k] = x^(2^k) mod f
    let mut frob = Vec::with_capacity(n as usize + 1);
    frob.push(x);
    for k in 1..=n as usize {
        let prev = frob[k - 1];
        frob.push(poly_rem(clmul(prev, prev), modulus));
    }
    if frob[n as usize] != x {
        return false;
    }
    prime_factors(n).into_iter().all(|p| {
        let h = frob[(n / p) as usize] ^ x;
        poly_gcd(modulus, h) == 1
    })
}

/// `GF(2^n)` defined by an irreducible modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    n: u32,
    /// Bit `i` is the coefficient of `x^i`; bit `n` is set.
    modulus: u64,
}

/// An element of some `GF(2^n)`, tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    bits: u32,
    modulus: u64,
}

impl FieldElement {
    pub fn bits(&self) -> u32 {
        self.bits
    }
}

impl FieldSpec {
    /// The field with the smallest irreducible modulus of degree `n`, where
    /// polynomials are ordered by their integer value (bit `i` = coefficient of `x^i`).
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&n) {
            return Err(Error::DegreeOutOfRange(n));
        }
        let modulus = ((1u64 << n)..(1u64 << (n + 1)))
            .find(|&f| is_irreducible(f))
            .expect("an irreducible polynomial exists in every degree");
        Ok(Self { n, modulus })
    }

    pub fn with_modulus(modulus: u64) -> Result<Self> {
        let n = degree(modulus);
        if n < 1 || n as u32 > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(n.max(0) as u32));
        }
        if !is_irreducible(modulus) {
            return Err(Error::Internal(format!("modulus {modulus:#b} is reducible")));
        }
        Ok(Self { n: n as u32, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1u64 << self.n
    }

    pub fn element(&self, bits: u64) -> FieldElement {
        FieldElement {
            bits: poly_rem(bits, self.modulus) as u32,
            modulus: self.modulus,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if a.modulus != self.modulus {
            return Err(Error::FieldMismatch {
                left: self.n,
                right: degree(a.modulus) as u32,
            });
        }
        Ok(())
    }

    // Unchecked arithmetic on canonical representatives.

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        poly_rem(clmul(a as u64, b as u64), self.modulus) as u32
    }

    #[inline]
    pub fn square_raw(&self, a: u32) -> u32 {
        self.mul_raw(a, a)
    }

    /// `a^(2^k)`.
    #[inline]
    pub fn frobenius_raw(&self, mut a: u32, k: u32) -> u32 {
        for _ in 0..k {
            a = self.square_raw(a);
        }
        a
    }

    pub fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.square_raw(base);
            e >>= 1;
        }
        acc
    }

    // Checked arithmetic.

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(FieldElement {
            bits: a.bits ^ b.bits,
            modulus: self.modulus,
        })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        self.check(&b)?;
        Ok(FieldElement {
            bits: self.mul_raw(a.bits, b.bits),
            modulus: self.modulus,
        })
    }

    pub fn square(&self, a: FieldElement) -> Result<FieldElement> {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement> {
        self.check(&a)?;
        Ok(FieldElement {
            bits: self.pow_raw(a.bits, e),
            modulus: self.modulus,
        })
    }

    /// The unique square root `a^(2^(n-1))`.
    pub fn sqrt(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(&a)?;
        Ok(FieldElement {
            bits: self.frobenius_raw(a.bits, self.n - 1),
            modulus: self.modulus,
        })
    }
}

pub fn field(n: u32) -> Result<FieldSpec> {
    FieldSpec::new(n)
}

/// Number of points of `S_m` over `F_{q^k}`: affine solutions `(y, z)` of
/// `z^q + z = y^q0 (y^q + y)` plus the single point at infinity.
///
/// The affine count is exact: a histogram of `z -> z^q + z` over the whole
/// field is looked up once per `y`.
pub fn point_count_naive(m: u32, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let p = SuzukiParams::new(m)?;
    let bits = (2 * m + 1).saturating_mul(k);
    if bits > MAX_DEGREE {
        return Err(Error::FieldTooLarge { bits });
    }
    let f = FieldSpec::new(bits)?;
    let log_q = 2 * m + 1;
    let size = f.order() as usize;
    let mut hist = vec![0u32; size];
    for z in 0..size as u32 {
        let lhs = f.frobenius_raw(z, log_q) ^ z;
        hist[lhs as usize] += 1;
    }
    let affine: u64 = (0..size as u32)
        .into_par_iter()
        .map(|y| {
            let yq = f.frobenius_raw(y, log_q);
            let rhs = f.mul_raw(f.frobenius_raw(y, m), yq ^ y);
            hist[rhs as usize] as u64
        })
        .sum();
    debug_assert_eq!(p.q.pow(k), f.order());
    Ok(affine + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Irreducibility by trial division by every polynomial of degree <= n/2.
    fn irreducible_by_trial_division(f: u64) -> bool {
        let n = degree(f);
        (2u64..(1u64 << (n / 2 + 1))).all(|d| degree(d) > n / 2 || poly_rem(f, d) != 0)
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for f in 2u64..(1 << 11) {
            assert_eq!(is_irreducible(f), irreducible_by_trial_division(f), "f = {f:#b}");
        }
    }

    #[test]
    fn smallest_moduli() {
        assert_eq!(field(1).unwrap().modulus(), 0b10);
        assert_eq!(field(3).unwrap().modulus(), 0b1011);
        // first irreducible by trial division
        for n in 1..=12 {
            let expected = ((1u64 << n)..(1u64 << (n + 1)))
                .find(|&f| irreducible_by_trial_division(f))
                .unwrap();
            assert_eq!(field(n).unwrap().modulus(), expected);
        }
        assert_eq!(field(0), Err(Error::DegreeOutOfRange(0)));
        assert_eq!(field(25), Err(Error::DegreeOutOfRange(25)));
    }

    #[test]
    fn field_axioms_on_random_samples() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [3u32, 12, 24] {
            let f = field(n).unwrap();
            for _ in 0..1000 {
                let a = f.element(rng.gen_range(0..f.order()));
                let b = f.element(rng.gen_range(0..f.order()));
                assert_eq!(f.add(a, a).unwrap(), f.zero());
                assert_eq!(f.pow(a, f.order()).unwrap(), a);
                assert_eq!(f.sqrt(f.square(a).unwrap()).unwrap(), a);
                assert_eq!(f.square(f.sqrt(a).unwrap()).unwrap(), a);
                assert_eq!(f.pow(a, 2).unwrap(), f.mul(a, a).unwrap());
                assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                if a != f.zero() {
                    assert_eq!(f.pow(a, f.order() - 1).unwrap(), f.one());
                }
            }
        }
    }

    #[test]
    fn mismatched_fields_rejected() {
        let f3 = field(3).unwrap();
        let f4 = field(4).unwrap();
        let a = f3.one();
        let b = f4.one();
        assert_eq!(f3.add(a, b), Err(Error::FieldMismatch { left: 3, right: 4 }));
        assert!(f4.sqrt(a).is_err());
    }

    #[test]
    fn small_point_counts() {
        assert_eq!(point_count_naive(1, 1).unwrap(), 65);
        assert_eq!(point_count_naive(1, 2).unwrap(), 65);
        assert_eq!(point_count_naive(2, 1).unwrap(), 1025);
        assert_eq!(point_count_naive(2, 5), Err(Error::FieldTooLarge { bits: 25 }));
    }

    #[test]
    fn point_count_by_pairs_m1() {
        // pair enumeration without the histogram
        let f = field(3).unwrap();
        let mut n = 1u64;
        for y in 0..8u32 {
            let rhs = f.mul_raw(f.pow_raw(y, 2), f.pow_raw(y, 8) ^ y);
            for z in 0..8u32 {
                if f.pow_raw(z, 8) ^ z == rhs {
                    n += 1;
                }
            }
        }
        assert_eq!(n, 65);
    }
}
