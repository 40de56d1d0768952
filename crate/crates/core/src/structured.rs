//! Monomials `y^a z^b h1^c h2^d`, the rewriting relations
//!
//! ```text
//! z^2 = y h1 + h2,   h1^q0 = z + y^(q0+1),   h2^q0 = h1 + z y^q0
//! ```
//!
//! the basis of regular differentials `{ y^a z^b h1^c h2^d dy }`, and the
//! table-driven Cartier operator with its matrix.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2la::{BitMatrix, BitVector};
use crate::params::SuzukiParams;
use crate::planepoly::{cartier_oracle, term_weight, Embedder, PlanePoly};

/// Exponents of `y^a z^b h1^c h2^d`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("y", self.a), ("z", self.b), ("h1", self.c), ("h2", self.d)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl Monomial {
    pub const fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self { a, b, c, d }
    }

    pub fn pole_order(&self, p: &SuzukiParams) -> u64 {
        p.pole_order(self.a as u64, self.b as u64, self.c as u64, self.d as u64)
    }

    /// `b <= 1`, `c, d <= q0 - 1`.
    pub fn is_normal(&self, p: &SuzukiParams) -> bool {
        self.b <= 1 && (self.c as u64) < p.q0 && (self.d as u64) < p.q0
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let add = |x: u32, y: u32| x.checked_add(y).expect("monomial exponent overflow");
        Monomial::new(add(self.a, o.a), add(self.b, o.b), add(self.c, o.c), add(self.d, o.d))
    }

    /// Splits into `(e, r)` with `self = e^2 * r` and every exponent of `r` in `{0, 1}`.
    pub fn split_square(&self) -> (Monomial, Monomial) {
        (
            Monomial::new(self.a / 2, self.b / 2, self.c / 2, self.d / 2),
            Monomial::new(self.a % 2, self.b % 2, self.c % 2, self.d % 2),
        )
    }

    /// Position of a residue monomial in the 16-entry table: `a + 2b + 4c + 8d`.
    fn residue_index(&self) -> usize {
        debug_assert!(self.a <= 1 && self.b <= 1 && self.c <= 1 && self.d <= 1);
        (self.a + 2 * self.b + 4 * self.c + 8 * self.d) as usize
    }

    pub fn embed(&self, e: &Embedder) -> PlanePoly {
        e.embed(self.a, self.b, self.c, self.d)
    }
}

/// A GF(2)-combination of monomials, kept sorted with no repeats.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct StructuredPoly {
    terms: Vec<Monomial>,
}

impl fmt::Debug for StructuredPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for StructuredPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl StructuredPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial) -> Self {
        Self { terms: vec![m] }
    }

    /// Sum of the given monomials; repeats cancel in pairs.
    pub fn from_terms<I: IntoIterator<Item = Monomial>>(terms: I) -> Self {
        let mut set = BTreeSet::new();
        for t in terms {
            if !set.remove(&t) {
                set.insert(t);
            }
        }
        Self {
            terms: set.into_iter().collect(),
        }
    }

    pub fn terms(&self) -> &[Monomial] {
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

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).copied())
    }

    /// Multiplication by a monomial is injective on monomials, so no cancellation.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let mut terms: Vec<Monomial> = self.terms.iter().map(|t| t.mul(m)).collect();
        terms.sort_unstable();
        Self { terms }
    }

    pub fn is_normal(&self, p: &SuzukiParams) -> bool {
        self.terms.iter().all(|t| t.is_normal(p))
    }

    pub fn max_pole_order(&self, p: &SuzukiParams) -> Option<u64> {
        self.terms.iter().map(|t| t.pole_order(p)).max()
    }

    /// Image in the plane ring.
    pub fn embed(&self, e: &Embedder) -> PlanePoly {
        self.terms.iter().fold(PlanePoly::zero(), |acc, t| acc.add(&t.embed(e)))
    }
}

/// Which relation a monomial violates, in rewriting priority order.
fn violation(p: &SuzukiParams, m: &Monomial) -> Option<u8> {
    if m.d as u64 >= p.q0 {
        Some(0)
    } else if m.c as u64 >= p.q0 {
        Some(1)
    } else if m.b >= 2 {
        Some(2)
    } else {
        None
    }
}

/// Rewrites into normal form using the three relations.
///
/// Each step replaces one monomial by two whose pole orders do not exceed the
/// original: the branch with equal pole order lowers `(d, 2b + c)`
/// lexicographically and the other branch lowers the pole order.
pub fn normalize(p: &SuzukiParams, poly: &StructuredPoly) -> Result<StructuredPoly> {
    let q0 = p.q0 as u32;
    let cap = 64 * p.q0 as usize * poly.len().max(1);
    let mut terms: HashSet<Monomial> = HashSet::with_capacity(poly.len());
    let mut pending: BTreeSet<(u8, Monomial)> = BTreeSet::new();
    let toggle = |terms: &mut HashSet<Monomial>, pending: &mut BTreeSet<(u8, Monomial)>, m: Monomial| {
        let class = violation(p, &m);
        if terms.remove(&m) {
            if let Some(cl) = class {
                pending.remove(&(cl, m));
            }
        } else {
            terms.insert(m);
            if let Some(cl) = class {
                pending.insert((cl, m));
            }
        }
    };
    for &t in poly.terms() {
        toggle(&mut terms, &mut pending, t);
    }
    let mut steps = 0usize;
    while let Some((class, m)) = pending.pop_first() {
        steps += 1;
        if steps > cap {
            return Err(Error::Internal(format!("normalization exceeded {cap} rewrites")));
        }
        terms.remove(&m);
        let [first, second] = match class {
            0 => {
                let r = Monomial { d: m.d - q0, ..m };
                [
                    Monomial { c: r.c + 1, ..r },
                    Monomial {
                        a: r.a + q0,
                        b: r.b + 1,
                        ..r
                    },
                ]
            }
            1 => {
                let r = Monomial { c: m.c - q0, ..m };
                [Monomial { b: r.b + 1, ..r }, Monomial { a: r.a + q0 + 1, ..r }]
            }
            _ => {
                let r = Monomial { b: m.b - 2, ..m };
                [
                    Monomial {
                        a: r.a + 1,
                        c: r.c + 1,
                        ..r
                    },
                    Monomial { d: r.d + 1, ..r },
                ]
            }
        };
        toggle(&mut terms, &mut pending, first);
        toggle(&mut terms, &mut pending, second);
    }
    let mut out: Vec<Monomial> = terms.into_iter().collect();
    out.sort_unstable();
    Ok(StructuredPoly { terms: out })
}

/// Normal-form monomials ordered by increasing pole order.
#[derive(Debug, Clone)]
pub struct Basis {
    params: SuzukiParams,
    elements: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Basis {
    /// All normal-form monomials with pole order at most `bound`. Their pole
    /// orders are pairwise distinct and run through the semigroup up to `bound`.
    pub fn up_to(p: &SuzukiParams, bound: u64) -> Result<Self> {
        let q0 = p.q0 as u32;
        let mut elements = Vec::new();
        for b in 0..=1u32 {
            for c in 0..q0 {
                for d in 0..q0 {
                    let mut a = 0u32;
                    while p.pole_order(a as u64, b as u64, c as u64, d as u64) <= bound {
                        elements.push(Monomial::new(a, b, c, d));
                        a += 1;
                    }
                }
            }
        }
        elements.sort_by_key(|m| m.pole_order(p));
        if elements.windows(2).any(|w| w[0].pole_order(p) == w[1].pole_order(p)) {
            return Err(Error::Internal("two basis monomials share a pole order".into()));
        }
        let index = elements.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self {
            params: *p,
            elements,
            index,
        })
    }

    pub fn params(&self) -> &SuzukiParams {
        &self.params
    }

    pub fn elements(&self) -> &[Monomial] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, i: usize) -> Monomial {
        self.elements[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn pole_orders(&self) -> Vec<u64> {
        self.elements.iter().map(|m| m.pole_order(&self.params)).collect()
    }

    /// Coordinates of a normal-form poly whose monomials are all basis elements.
    pub fn coords_of(&self, f: &StructuredPoly) -> Result<BitVector> {
        let mut v = BitVector::zeros(self.len());
        for t in f.terms() {
            let i = self.index_of(t).ok_or_else(|| {
                Error::NotRegular(format!(
                    "{t} (pole order {}) is not a basis element",
                    t.pole_order(&self.params)
                ))
            })?;
            v.flip(i);
        }
        Ok(v)
    }

    pub fn poly_of(&self, v: &BitVector) -> StructuredPoly {
        StructuredPoly::from_terms(v.iter_ones().map(|i| self.elements[i]))
    }
}

/// The basis of regular differentials `y^a z^b h1^c h2^d dy`: normal-form
/// monomials with pole order at most `2g - 2`. Exactly `g` of them.
pub fn enumerate_basis(p: &SuzukiParams) -> Result<Basis> {
    let basis = Basis::up_to(p, p.canonical_degree())?;
    if basis.len() as u64 != p.g {
        return Err(Error::Internal(format!(
            "basis has {} elements, genus is {}",
            basis.len(),
            p.g
        )));
    }
    Ok(basis)
}

/// Sort key for plane monomials: pole weight first, then z-degree.
type TermKey = (u64, u32);

fn keys_desc(p: &SuzukiParams, f: &PlanePoly) -> Vec<TermKey> {
    let mut keys: Vec<TermKey> = f.terms().iter().map(|&t| (term_weight(p, t), t.1)).collect();
    keys.sort_unstable_by(|x, y| y.cmp(x));
    keys
}

/// Symmetric difference of two strictly descending sequences.
fn xor_desc<T: Ord + Copy>(x: &[T], y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Greater => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

#[derive(Debug, Clone)]
struct EchelonRow {
    terms: Vec<TermKey>,
    /// Basis indices (descending) whose embeddings sum to `terms`.
    combo: Vec<u32>,
}

/// Change of representation from plane polynomials to basis coordinates.
///
/// Built once per basis by sparse elimination on the embedded basis images,
/// pivoting on the leading plane monomial (largest pole weight, then largest
/// z-degree). Afterwards every query is a read-only top-reduction.
#[derive(Debug, Clone)]
pub struct PlaneSolver {
    params: SuzukiParams,
    basis: Basis,
    rows: HashMap<TermKey, EchelonRow>,
}

impl PlaneSolver {
    pub fn new(basis: &Basis, embedder: &Embedder) -> Result<Self> {
        let p = *basis.params();
        let images: Vec<Vec<TermKey>> = basis
            .elements()
            .par_iter()
            .map(|m| keys_desc(&p, &m.embed(embedder)))
            .collect();
        let mut rows: HashMap<TermKey, EchelonRow> = HashMap::with_capacity(basis.len());
        for (k, terms) in images.into_iter().enumerate() {
            let mut row = EchelonRow {
                terms,
                combo: vec![k as u32],
            };
            loop {
                let Some(lead) = row.terms.first().copied() else {
                    return Err(Error::Internal(format!(
                        "embedded basis element {} is linearly dependent on earlier ones",
                        basis.get(k)
                    )));
                };
                match rows.get(&lead) {
                    Some(pivot) => {
                        row.terms = xor_desc(&row.terms, &pivot.terms);
                        row.combo = xor_desc(&row.combo, &pivot.combo);
                    }
                    None => {
                        rows.insert(lead, row);
                        break;
                    }
                }
            }
        }
        Ok(Self {
            params: p,
            basis: basis.clone(),
            rows,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// The unique `v` with `sum_j v_j embed(basis[j]) = f`.
    pub fn coords(&self, f: &PlanePoly) -> Result<BitVector> {
        let mut terms = keys_desc(&self.params, f);
        let mut combo: Vec<u32> = Vec::new();
        while let Some(&lead) = terms.first() {
            let pivot = self.rows.get(&lead).ok_or_else(|| {
                Error::NotRegular(format!(
                    "plane monomial of weight {} and z-degree {} is outside the span of {} basis images",
                    lead.0,
                    lead.1,
                    self.basis.len()
                ))
            })?;
            terms = xor_desc(&terms, &pivot.terms);
            combo = xor_desc(&combo, &pivot.combo);
        }
        Ok(BitVector::from_ones(
            self.basis.len(),
            combo.into_iter().map(|i| i as usize),
        ))
    }

    /// Same as [`coords`](Self::coords), returned as a normal-form poly.
    pub fn lift(&self, f: &PlanePoly) -> Result<StructuredPoly> {
        Ok(self.basis.poly_of(&self.coords(f)?))
    }
}

/// Coordinates of `f` in `basis`. Builds a fresh solver; reuse a
/// [`PlaneSolver`] when converting many polynomials.
pub fn to_basis_coords(p: &SuzukiParams, basis: &Basis, f: &PlanePoly) -> Result<BitVector> {
    debug_assert_eq!(basis.params(), p);
    PlaneSolver::new(basis, &Embedder::new(p))?.coords(f)
}

/// The sixteen residue monomials `y^a z^b h1^c h2^d`, `a, b, c, d in {0, 1}`.
pub fn residues() -> impl Iterator<Item = Monomial> {
    (0..16u32).map(|i| Monomial::new(i & 1, (i >> 1) & 1, (i >> 2) & 1, (i >> 3) & 1))
}

/// `C(r dy)` for the sixteen residue monomials `r`, in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartierTable {
    images: Vec<StructuredPoly>,
}

impl CartierTable {
    pub fn image(&self, residue: &Monomial) -> &StructuredPoly {
        &self.images[residue.residue_index()]
    }

    pub fn rows(&self) -> impl Iterator<Item = (Monomial, &StructuredPoly)> {
        residues().map(move |r| (r, self.image(&r)))
    }
}

/// Largest pole order `C(r dy)` can have for a residue `r`: if `r dy` has
/// valuation `v` at infinity then `C(r dy)` has valuation at least `ceil((v - 1) / 2)`.
fn table_pole_bound(p: &SuzukiParams) -> u64 {
    let k = p.canonical_degree() as i64;
    residues()
        .map(|r| {
            let v = k - r.pole_order(p) as i64;
            let min_val = -((1 - v).div_euclid(2));
            (k - min_val) as u64
        })
        .max()
        .unwrap()
}

/// Computes each row by applying the definition-level Cartier operator to
/// the plane image of the residue, then solving for its coordinates against
/// all normal-form monomials up to the pole bound.
pub fn cartier_table(p: &SuzukiParams) -> Result<CartierTable> {
    let embedder = Embedder::new(p);
    let extended = Basis::up_to(p, table_pole_bound(p))?;
    let solver = PlaneSolver::new(&extended, &embedder)?;
    let images = residues()
        .map(|r| {
            let img = cartier_oracle(p, &r.embed(&embedder));
            solver
                .lift(&img)
                .map_err(|e| Error::Internal(format!("lifting C({r} dy): {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CartierTable { images })
}

/// `C(e^2 r dy) = e C(r dy)`, normalized.
pub fn cartier_structured(p: &SuzukiParams, table: &CartierTable, element: &Monomial) -> Result<StructuredPoly> {
    let (even, residue) = element.split_square();
    let image = normalize(p, &table.image(&residue).mul_monomial(&even))?;
    let bound = p.canonical_degree();
    if let Some(bad) = image.terms().iter().find(|t| t.pole_order(p) > bound) {
        return Err(Error::Internal(format!(
            "C({element} dy) contains {bad} with pole order {} > 2g - 2 = {bound}",
            bad.pole_order(p)
        )));
    }
    Ok(image)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CartierPath {
    /// Residue table plus the square-splitting rule.
    Structured,
    /// Definition-level operator on plane images, solved back into the basis.
    Oracle,
}

/// The matrix of `C` on the basis: column `j` holds the coordinates of
/// `C(basis[j])`.
pub fn build_cartier_matrix(p: &SuzukiParams, basis: &Basis, path: CartierPath) -> Result<BitMatrix> {
    let columns: Vec<BitVector> = match path {
        CartierPath::Structured => {
            let table = cartier_table(p)?;
            basis
                .elements()
                .par_iter()
                .map(|m| cartier_structured(p, &table, m).and_then(|img| basis.coords_of(&img)))
                .collect::<Result<_>>()?
        }
        CartierPath::Oracle => {
            let embedder = Embedder::new(p);
            let solver = PlaneSolver::new(basis, &embedder)?;
            basis
                .elements()
                .par_iter()
                .map(|m| solver.coords(&cartier_oracle(p, &m.embed(&embedder))))
                .collect::<Result<_>>()?
        }
    };
    Ok(BitMatrix::from_columns(basis.len(), &columns))
}
