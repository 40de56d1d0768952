//! Derived constants of the Suzuki curve `S_m : z^q + z = y^q0 (y^q + y)`,
//! closed formulas, the Weierstrass semigroup count at the point at infinity,
//! and point counts from the L-polynomial `(1 + 2 q0 t + q t^2)^g`.

use crate::error::{Error, Result};

/// All derived constants of `S_m`.
///
/// `q = 2^(2m+1)`, `q0 = 2^m`, genus `g = q0 (q - 1)`. The pole orders at the
/// unique point at infinity of `y, z, h1, h2` are `q, q + q0, q + 2 q0` and
/// `q + 2 q0 + 1`; they generate the Weierstrass semigroup there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuzukiParams {
    pub m: u32,
    pub q0: u64,
    pub q: u64,
    pub g: u64,
    pub vy: u64,
    pub vz: u64,
    pub vh1: u64,
    pub vh2: u64,
}

fn bits_of(v: u128) -> u32 {
    128 - v.leading_zeros()
}

fn narrow(what: &'static str, v: u128) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow {
        what,
        required_bits: bits_of(v),
    })
}

impl SuzukiParams {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroM);
        }
        // q0 * q needs 3m + 1 bits; anything beyond u64 is rejected up front.
        let needed = 3 * m + 2;
        if needed > 64 {
            return Err(Error::Overflow {
                what: "genus 2g - 2",
                required_bits: needed,
            });
        }
        let q0 = 1u64 << m;
        let q = 1u64 << (2 * m + 1);
        let g = q0 * (q - 1);
        Ok(Self {
            m,
            q0,
            q,
            g,
            vy: q,
            vz: q + q0,
            vh1: q + 2 * q0,
            vh2: q + 2 * q0 + 1,
        })
    }

    /// Generators of the Weierstrass semigroup at infinity.
    pub fn sg_generators(&self) -> [u64; 4] {
        [self.vy, self.vz, self.vh1, self.vh2]
    }

    /// Degree `2g - 2` of the canonical divisor `(dy) = (2g - 2) P_inf`.
    pub fn canonical_degree(&self) -> u64 {
        2 * self.g - 2
    }

    /// Pole order at infinity of `y^a z^b h1^c h2^d`.
    pub fn pole_order(&self, a: u64, b: u64, c: u64, d: u64) -> u64 {
        a * self.vy + b * self.vz + c * self.vh1 + d * self.vh2
    }
}

pub fn make_params(m: u32) -> Result<SuzukiParams> {
    SuzukiParams::new(m)
}

/// Closed formula `a(m) = q0 (q0 + 1)(2 q0 + 1) / 6`.
pub fn a_number_formula(m: u32) -> Result<u64> {
    let p = SuzukiParams::new(m)?;
    let q0 = p.q0 as u128;
    let num = q0
        .checked_mul(q0 + 1)
        .and_then(|v| v.checked_mul(2 * q0 + 1))
        .ok_or(Error::Overflow {
            what: "a-number formula",
            required_bits: 3 * m + 3,
        })?;
    narrow("a-number formula", num / 6)
}

/// `nu_g = q0 (10 q0 + 7)(q0 - 1) / 6`, the rank of the Cartier operator.
pub fn nu_g_formula(m: u32) -> Result<u64> {
    let p = SuzukiParams::new(m)?;
    let q0 = p.q0 as u128;
    let num = q0
        .checked_mul(10 * q0 + 7)
        .and_then(|v| v.checked_mul(q0 - 1))
        .ok_or(Error::Overflow {
            what: "nu_g formula",
            required_bits: 3 * m + 5,
        })?;
    narrow("nu_g formula", num / 6)
}

/// Number of lattice points `(a, c, d) >= 0` with `a + c + d <= q0 - 1`, plus
/// those with `a + c + d <= q0 - 2`, counted by enumeration.
pub fn lattice_count(m: u32) -> Result<u64> {
    let p = SuzukiParams::new(m)?;
    let mut total = 0u64;
    for bound in [p.q0 - 1, p.q0 - 2] {
        for a in 0..=bound {
            for c in 0..=bound - a {
                // d ranges over 0..=bound - a - c
                total = total.checked_add(bound - a - c + 1).ok_or(Error::Overflow {
                    what: "lattice count",
                    required_bits: 65,
                })?;
            }
        }
    }
    Ok(total)
}

/// Elements of `<q, q+q0, q+2q0, q+2q0+1>` in `[0, 2g - 2]`.
pub fn semigroup_count(m: u32) -> Result<u64> {
    let p = SuzukiParams::new(m)?;
    Ok(semigroup_members(&p).iter().filter(|&&x| x).count() as u64)
}

/// Reachability table of the semigroup on `[0, 2g - 2]`.
pub fn semigroup_members(p: &SuzukiParams) -> Vec<bool> {
    let len = p.canonical_degree() as usize + 1;
    let mut reach = vec![false; len];
    reach[0] = true;
    let gens = p.sg_generators();
    for n in 1..len {
        reach[n] = gens.iter().any(|&s| {
            let s = s as usize;
            s <= n && reach[n - s]
        });
    }
    reach
}

/// Power sums of the inverse roots of `1 + 2 q0 t + q t^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaData {
    pub linear_coeff: i128,
    pub norm: i128,
    pub multiplicity: u64,
    /// `power_sums[k] = s_k`, starting from `s_0 = 2`.
    pub power_sums: Vec<i128>,
}

impl ZetaData {
    pub fn new(p: &SuzukiParams, k_max: u32) -> Result<Self> {
        let linear_coeff = 2 * p.q0 as i128;
        let norm = p.q as i128;
        let mut power_sums = vec![2i128, -linear_coeff];
        for k in 2..=k_max as usize {
            let next = linear_coeff
                .checked_mul(power_sums[k - 1])
                .and_then(|a| norm.checked_mul(power_sums[k - 2]).and_then(|b| a.checked_add(b)))
                .and_then(|v| v.checked_neg())
                .ok_or(Error::Overflow {
                    what: "zeta power sum",
                    required_bits: 129,
                })?;
            power_sums.push(next);
        }
        power_sums.truncate(k_max as usize + 1);
        Ok(Self {
            linear_coeff,
            norm,
            multiplicity: p.g,
            power_sums,
        })
    }
}

fn q_pow(p: &SuzukiParams, k: u32) -> Result<i128> {
    (p.q as i128).checked_pow(k).ok_or(Error::Overflow {
        what: "q^k",
        required_bits: (2 * p.m + 1) * k + 2,
    })
}

/// `#S_m(F_{q^k}) = q^k + 1 - g s_k`.
pub fn point_count_zeta(m: u32, k: u32) -> Result<i128> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let p = SuzukiParams::new(m)?;
    let zeta = ZetaData::new(&p, k)?;
    let s_k = zeta.power_sums[k as usize];
    let of = Error::Overflow {
        what: "zeta point count",
        required_bits: 129,
    };
    q_pow(&p, k)?
        .checked_add(1)
        .and_then(|v| v.checked_sub((p.g as i128).checked_mul(s_k)?))
        .ok_or(of)
}

/// True iff the point count over `F_{q^k}` meets the Hasse-Weil upper bound.
/// For odd `k` the bound `q^(k/2)` is irrational and never met.
pub fn is_maximal_over(m: u32, k: u32) -> Result<bool> {
    let n = point_count_zeta(m, k)?;
    if k % 2 == 1 {
        return Ok(false);
    }
    let p = SuzukiParams::new(m)?;
    let half = q_pow(&p, k / 2)?;
    let full = q_pow(&p, k)?;
    let bound = (2 * p.g as i128)
        .checked_mul(half)
        .and_then(|b| b.checked_add(full + 1))
        .ok_or(Error::Overflow {
            what: "Hasse-Weil bound",
            required_bits: 129,
        })?;
    Ok(n == bound)
}

/// `|N_k - q^k - 1| <= 2 g q^(k/2)`, compared as `(N_k - q^k - 1)^2 <= 4 g^2 q^k`.
pub fn within_hasse_weil(m: u32, k: u32) -> Result<bool> {
    let n = point_count_zeta(m, k)?;
    let p = SuzukiParams::new(m)?;
    let full = q_pow(&p, k)?;
    let of = || Error::Overflow {
        what: "Hasse-Weil window",
        required_bits: 129,
    };
    let dev = n.checked_sub(full + 1).ok_or_else(of)?;
    let lhs = dev.checked_mul(dev).ok_or_else(of)?;
    let g = p.g as i128;
    let rhs = g
        .checked_mul(g)
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_mul(full))
        .ok_or_else(of)?;
    Ok(lhs <= rhs)
}

/// `1/6 < a/g < 1/6 + 1/2^(m+1)`, by integer cross-multiplication.
pub fn ratio_bounds_hold(m: u32) -> Result<bool> {
    let p = SuzukiParams::new(m)?;
    let a = a_number_formula(m)? as u128;
    let g = p.g as u128;
    let two_m1 = 1u128 << (m + 1);
    let lower = 6 * a > g;
    // a / g < (2^(m+1) + 6) / (6 * 2^(m+1))
    let upper = a
        .checked_mul(6 * two_m1)
        .zip(g.checked_mul(two_m1 + 6))
        .map(|(l, r)| l < r)
        .ok_or(Error::Overflow {
            what: "ratio bound",
            required_bits: 129,
        })?;
    Ok(lower && upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_small_m() {
        let p = make_params(1).unwrap();
        assert_eq!((p.q0, p.q, p.g), (2, 8, 14));
        assert_eq!((p.vy, p.vz, p.vh1, p.vh2), (8, 10, 12, 13));
        let p = make_params(2).unwrap();
        assert_eq!((p.q0, p.q, p.g), (4, 32, 124));
    }

    #[test]
    fn params_invariants() {
        for m in 1..=20 {
            let p = make_params(m).unwrap();
            assert_eq!(p.q, 2 * p.q0 * p.q0);
            assert_eq!(p.g, p.q0 * (p.q - 1));
            let gcd = p.sg_generators().iter().fold(0u64, |acc, &x| {
                let (mut a, mut b) = (acc, x);
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                a
            });
            assert_eq!(gcd, 1);
        }
    }

    #[test]
    fn params_rejects_bad_m() {
        assert_eq!(make_params(0), Err(Error::ZeroM));
        match make_params(21) {
            Err(Error::Overflow { required_bits, .. }) => assert!(required_bits > 64),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn closed_formulas() {
        assert_eq!(a_number_formula(1).unwrap(), 5);
        assert_eq!(a_number_formula(2).unwrap(), 30);
        assert_eq!(a_number_formula(3).unwrap(), 204);
        assert_eq!(nu_g_formula(1).unwrap(), 9);
        assert_eq!(nu_g_formula(2).unwrap(), 94);
        for m in 1..=10 {
            let g = make_params(m).unwrap().g;
            assert_eq!(nu_g_formula(m).unwrap() + a_number_formula(m).unwrap(), g);
            assert_eq!(lattice_count(m).unwrap(), a_number_formula(m).unwrap());
            assert!(ratio_bounds_hold(m).unwrap(), "m={m}");
        }
    }

    #[test]
    fn lattice_count_against_triple_enumeration() {
        for m in 1..=5 {
            let q0 = 1i64 << m;
            let mut n = 0u64;
            for bound in [q0 - 1, q0 - 2] {
                for a in 0..q0 {
                    for c in 0..q0 {
                        for d in 0..q0 {
                            if a + c + d <= bound {
                                n += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(lattice_count(m as u32).unwrap(), n);
        }
        assert_eq!(lattice_count(1).unwrap(), 5);
    }

    #[test]
    fn semigroup_m1_members() {
        let p = make_params(1).unwrap();
        let members: Vec<usize> = semigroup_members(&p)
            .iter()
            .enumerate()
            .filter_map(|(i, &r)| r.then_some(i))
            .collect();
        assert_eq!(members, vec![0, 8, 10, 12, 13, 16, 18, 20, 21, 22, 23, 24, 25, 26]);
        for m in 1..=4 {
            assert_eq!(semigroup_count(m).unwrap(), make_params(m).unwrap().g);
        }
    }

    #[test]
    fn zeta_point_counts() {
        assert_eq!(point_count_zeta(1, 1).unwrap(), 65);
        assert_eq!(point_count_zeta(1, 2).unwrap(), 65);
        assert_eq!(point_count_zeta(1, 4).unwrap(), 5889);
        assert_eq!(point_count_zeta(2, 1).unwrap(), 1025);
        assert_eq!(point_count_zeta(1, 0), Err(Error::ZeroK));
        let z = ZetaData::new(&make_params(1).unwrap(), 4).unwrap();
        assert_eq!(z.power_sums, vec![2, -4, 0, 32, -128]);
    }

    #[test]
    fn maximality() {
        assert!(is_maximal_over(1, 4).unwrap());
        assert!(!is_maximal_over(1, 2).unwrap());
        assert!(!is_maximal_over(1, 1).unwrap());
        assert!(is_maximal_over(2, 4).unwrap());
        for m in 1..=3 {
            for k in 1..=4 {
                assert!(within_hasse_weil(m, k).unwrap());
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(point_count_zeta(10, 40), Err(Error::Overflow { .. })));
    }
}
