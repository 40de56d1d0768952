//! The coordinate ring `GF(2)[y, z] / (z^q + z + y^(q0+q) + y^(q0+1))` of the
//! affine Suzuki model, and the Cartier operator computed from its definition.
//!
//! A canonical element has every z-exponent below `q`; the monomials
//! `y^i z^j` with `j < q` form a GF(2)-basis of the ring, so two canonical
//! polynomials are equal as functions iff their term sets are equal.

use std::fmt;

use crate::params::SuzukiParams;

/// Exponent pair `(i, j)` of `y^i z^j`.
pub type PlaneTerm = (u32, u32);

#[inline]
fn add_exp(a: u32, b: u32) -> u32 {
    a.checked_add(b).expect("plane exponent overflow")
}

/// Sorts and cancels repeated terms in pairs.
fn xor_normalize(mut terms: Vec<PlaneTerm>) -> Vec<PlaneTerm> {
    terms.sort_unstable();
    let mut out = Vec::with_capacity(terms.len());
    let mut idx = 0;
    while idx < terms.len() {
        let t = terms[idx];
        let mut run = 1;
        while idx + run < terms.len() && terms[idx + run] == t {
            run += 1;
        }
        if run % 2 == 1 {
            out.push(t);
        }
        idx += run;
    }
    out
}

/// A polynomial in `y, z` over GF(2), stored as a sorted set of exponent pairs.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PlanePoly {
    terms: Vec<PlaneTerm>,
}

impl fmt::Debug for PlanePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|&(i, j)| match (i, j) {
                (0, 0) => "1".to_string(),
                (i, 0) => format!("y^{i}"),
                (0, j) => format!("z^{j}"),
                (i, j) => format!("y^{i}*z^{j}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PlanePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(i: u32, j: u32) -> Self {
        Self { terms: vec![(i, j)] }
    }

    /// Sum of the given terms; repeated terms cancel in pairs.
    pub fn from_terms<I: IntoIterator<Item = PlaneTerm>>(terms: I) -> Self {
        Self {
            terms: xor_normalize(terms.into_iter().collect()),
        }
    }

    pub fn terms(&self) -> &[PlaneTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// True iff every z-exponent is below `q`.
    pub fn is_canonical(&self, p: &SuzukiParams) -> bool {
        self.terms.iter().all(|&(_, j)| (j as u64) < p.q)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut x, mut y) = (0, 0);
        while x < self.terms.len() && y < other.terms.len() {
            let (s, o) = (self.terms[x], other.terms[y]);
            match s.cmp(&o) {
                std::cmp::Ordering::Less => {
                    out.push(s);
                    x += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(o);
                    y += 1;
                }
                std::cmp::Ordering::Equal => {
                    x += 1;
                    y += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[x..]);
        out.extend_from_slice(&other.terms[y..]);
        Self { terms: out }
    }

    /// Multiplies by `y^i z^j` without reducing.
    pub fn shift(&self, i: u32, j: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(a, b)| (add_exp(a, i), add_exp(b, j)))
                .collect(),
        }
    }

    /// Product in `GF(2)[y, z]`, without curve reduction.
    pub fn mul_unreduced(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &(a, b) in &self.terms {
            for &(c, d) in &other.terms {
                out.push((add_exp(a, c), add_exp(b, d)));
            }
        }
        Self::from_terms(out)
    }

    /// Frobenius in characteristic 2: every exponent doubles, no reduction.
    pub fn frobenius_unreduced(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(i, j)| (add_exp(i, i), add_exp(j, j)))
                .collect(),
        }
    }
}

/// Pole order at infinity of the monomial `y^i z^j`.
pub fn term_weight(p: &SuzukiParams, (i, j): PlaneTerm) -> u64 {
    i as u64 * p.vy + j as u64 * p.vz
}

/// Rewrites every `z^q` factor as `z + y^(q0+q) + y^(q0+1)` until all
/// z-exponents are below `q`. Each rewrite lowers the z-degree of the term it
/// touches, so the loop terminates.
pub fn curve_reduce(p: &SuzukiParams, f: &PlanePoly) -> PlanePoly {
    let q = p.q as u32;
    let q0 = p.q0 as u32;
    let mut out = Vec::with_capacity(f.len());
    let mut pending: Vec<PlaneTerm> = Vec::new();
    for &t in f.terms() {
        if t.1 >= q {
            pending.push(t);
        } else {
            out.push(t);
        }
    }
    if pending.is_empty() {
        return f.clone();
    }
    while let Some((i, j)) = pending.pop() {
        let r = j - q;
        for t in [(i, r + 1), (add_exp(i, q0 + q), r), (add_exp(i, q0 + 1), r)] {
            if t.1 >= q {
                pending.push(t);
            } else {
                out.push(t);
            }
        }
    }
    PlanePoly::from_terms(out)
}

/// Canonical product.
pub fn mul(p: &SuzukiParams, f: &PlanePoly, g: &PlanePoly) -> PlanePoly {
    curve_reduce(p, &f.mul_unreduced(g))
}

/// Canonical square.
pub fn square(p: &SuzukiParams, f: &PlanePoly) -> PlanePoly {
    curve_reduce(p, &f.frobenius_unreduced())
}

pub fn pow(p: &SuzukiParams, f: &PlanePoly, mut e: u64) -> PlanePoly {
    let mut acc = PlanePoly::one();
    let mut base = f.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(p, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = square(p, &base);
        }
    }
    acc
}

/// `h1 = z^(2 q0) + y^(2 q0 + 1)`.
pub fn h1(p: &SuzukiParams) -> PlanePoly {
    let q0 = p.q0 as u32;
    PlanePoly::from_terms([(0, 2 * q0), (2 * q0 + 1, 0)])
}

/// `h2 = z^(2 q0) y + h1^(2 q0)`, reduced.
pub fn h2(p: &SuzukiParams) -> PlanePoly {
    let q0 = p.q0 as u32;
    let mut h1_pow = h1(p);
    for _ in 0..p.m + 1 {
        h1_pow = square(p, &h1_pow);
    }
    PlanePoly::monomial(1, 2 * q0).add(&h1_pow)
}

/// Maps structured monomials `y^a z^b h1^c h2^d` into the plane ring.
/// Powers of `h1` and `h2` below `q0` are tabulated once.
#[derive(Debug, Clone)]
pub struct Embedder {
    params: SuzukiParams,
    h1_pows: Vec<PlanePoly>,
    h2_pows: Vec<PlanePoly>,
}

impl Embedder {
    pub fn new(p: &SuzukiParams) -> Self {
        let table = |base: PlanePoly| {
            let mut pows = vec![PlanePoly::one()];
            for k in 1..p.q0 as usize {
                let next = mul(p, &pows[k - 1], &base);
                pows.push(next);
            }
            pows
        };
        Self {
            params: *p,
            h1_pows: table(h1(p)),
            h2_pows: table(h2(p)),
        }
    }

    pub fn params(&self) -> &SuzukiParams {
        &self.params
    }

    fn power(&self, tab: &[PlanePoly], e: u32) -> PlanePoly {
        match tab.get(e as usize) {
            Some(f) => f.clone(),
            None => {
                // e = hi * q0 + lo, (h^q0)^hi via m Frobenius steps each
                let q0 = self.params.q0 as u32;
                let mut big = tab[1].clone();
                for _ in 0..self.params.m {
                    big = square(&self.params, &big);
                }
                let hi = pow(&self.params, &big, (e / q0) as u64);
                mul(&self.params, &hi, &tab[(e % q0) as usize])
            }
        }
    }

    pub fn embed(&self, a: u32, b: u32, c: u32, d: u32) -> PlanePoly {
        let p = &self.params;
        let hc = self.power(&self.h1_pows, c);
        let hd = self.power(&self.h2_pows, d);
        let mut f = mul(p, &hc, &hd);
        if b > 0 {
            f = curve_reduce(p, &f.shift(0, b));
        }
        if a > 0 {
            f = f.shift(a, 0);
        }
        f
    }
}

/// Canonical image of `y^a z^b h1^c h2^d`.
pub fn embed_monomial(p: &SuzukiParams, a: u32, b: u32, c: u32, d: u32) -> PlanePoly {
    Embedder::new(p).embed(a, b, c, d)
}

/// Step one of the oracle: every term with odd z-exponent has one factor `z`
/// replaced by `z^q + y^(q0+q) + y^(q0+1)`. Afterwards all z-exponents are even
/// and at most `2q - 2`. The result is deliberately not curve-reduced: doing
/// so would turn `z^q` back into `z` and restore the odd exponents.
pub fn expand_odd_z(p: &SuzukiParams, f: &PlanePoly) -> PlanePoly {
    let q = p.q as u32;
    let q0 = p.q0 as u32;
    let mut out = Vec::with_capacity(3 * f.len());
    for &(i, j) in f.terms() {
        if j % 2 == 1 {
            out.push((i, j - 1 + q));
            out.push((add_exp(i, q0 + q), j - 1));
            out.push((add_exp(i, q0 + 1), j - 1));
        } else {
            out.push((i, j));
        }
    }
    PlanePoly::from_terms(out)
}

/// The Cartier operator on `f dy`: returns `h` with `C(f dy) = h dy`.
///
/// After [`expand_odd_z`], `f = A^2 + B^2 y` where `B` collects the terms with
/// odd y-exponent, and `C((A^2 + B^2 y) dy) = B dy`.
pub fn cartier_oracle(p: &SuzukiParams, f: &PlanePoly) -> PlanePoly {
    debug_assert!(f.is_canonical(p));
    let expanded = expand_odd_z(p, f);
    let odd: Vec<PlaneTerm> = expanded
        .terms()
        .iter()
        .filter(|&&(i, _)| i % 2 == 1)
        .map(|&(i, j)| ((i - 1) / 2, j / 2))
        .collect();
    PlanePoly::from_terms(odd)
}

/// Checks `C(f^2 g dy) = f C(g dy)` and `C((f + g) dy) = C(f dy) + C(g dy)`.
pub fn semilinearity_check(p: &SuzukiParams, f: &PlanePoly, g: &PlanePoly) -> bool {
    let f2g = mul(p, &square(p, f), g);
    let lhs = cartier_oracle(p, &f2g);
    let rhs = mul(p, f, &cartier_oracle(p, g));
    let additive = cartier_oracle(p, &f.add(g)) == cartier_oracle(p, f).add(&cartier_oracle(p, g));
    lhs == rhs && additive
}
