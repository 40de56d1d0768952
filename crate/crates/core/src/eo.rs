//! a-number, rank profiles and the Ekedahl-Oort final-type constraints they
//! force.
//!
//! A final type is a sequence `nu_1, ..., nu_g` with `nu_0 = 0` and
//! `nu_i <= nu_(i+1) <= nu_i + 1`. From the rank profile `r_k = rank(M^k)`
//! (with `r_0 = g`) the values `nu_(r_k) = r_(k+1)` are fixed by taking the
//! images of `C^k` as members of a final filtration, and `nu_1 = 0` because
//! the 2-rank is zero. The remaining values are whatever the step condition
//! leaves open.
//!
//! The rule `nu_(r_k) = r_(k+1)` is exact for the genus 14 case; for larger
//! genus it assumes one final filtration contains every `im C^k`, which is not
//! established in general.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
pub use crate::f2la::RankProfile;
use crate::f2la::{BitMatrix, BitVector};
use crate::params::{a_number_formula, SuzukiParams};

/// `g - rank(M)` for the `g x g` Cartier matrix.
pub fn a_number_from_matrix(m: &BitMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "Cartier matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.cols() - m.rank())
}

/// Checks that the profile is strictly decreasing to zero with `a >= 1`.
pub fn validate_profile(rp: &RankProfile) -> Result<()> {
    if rp.nilpotency.is_none() || rp.ranks.last() != Some(&0) {
        return Err(Error::InconsistentProfile(format!(
            "ranks {:?} never reach 0",
            rp.ranks
        )));
    }
    let mut prev = rp.g;
    for (k, &r) in rp.ranks.iter().enumerate() {
        if r >= prev {
            return Err(Error::InconsistentProfile(format!(
                "rank of M^{} is {r}, not below the previous {prev}",
                k + 1
            )));
        }
        prev = r;
    }
    if rp.nilpotency != Some(rp.ranks.len()) {
        return Err(Error::InconsistentProfile(
            "nilpotency index disagrees with the ranks".into(),
        ));
    }
    Ok(())
}

/// Fixed and forced values of `nu_1..nu_g`, with the interval each free
/// value may take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalTypeConstraints {
    pub g: usize,
    /// Values pinned by the rank profile before propagation.
    pub anchors: BTreeMap<usize, usize>,
    /// Every index whose value is determined (anchors plus forced values).
    pub fixed: BTreeMap<usize, usize>,
    /// `lower[i - 1] <= nu_i <= upper[i - 1]`.
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

impl FinalTypeConstraints {
    /// Indices still free after propagation.
    pub fn free_gaps(&self) -> usize {
        self.lower.iter().zip(&self.upper).filter(|(l, u)| l != u).count()
    }

    /// Builds constraints from explicit anchors, propagating the step
    /// condition in both directions.
    pub fn from_anchors(g: usize, anchors: BTreeMap<usize, usize>) -> Result<Self> {
        let mut lower = vec![0usize; g + 1];
        let mut upper: Vec<usize> = (0..=g).collect();
        for (&i, &v) in &anchors {
            if i == 0 || i > g {
                return Err(Error::InconsistentProfile(format!("index {i} outside 1..={g}")));
            }
            lower[i] = lower[i].max(v);
            upper[i] = upper[i].min(v);
        }
        for i in 1..=g {
            lower[i] = lower[i].max(lower[i - 1]);
            upper[i] = upper[i].min(upper[i - 1] + 1);
        }
        for i in (0..g).rev() {
            lower[i] = lower[i].max(lower[i + 1].saturating_sub(1));
            upper[i] = upper[i].min(upper[i + 1]);
        }
        if let Some(i) = (0..=g).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InconsistentProfile(format!(
                "nu_{i} would need to lie in [{}, {}]",
                lower[i], upper[i]
            )));
        }
        let fixed = (1..=g)
            .filter(|&i| lower[i] == upper[i])
            .map(|i| (i, lower[i]))
            .collect();
        Ok(Self {
            g,
            anchors,
            fixed,
            lower: lower[1..].to_vec(),
            upper: upper[1..].to_vec(),
        })
    }

    /// Number of compatible final types, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        // ways[v] = number of prefixes ending at value v
        let mut ways: BTreeMap<usize, u128> = BTreeMap::from([(0, 1)]);
        for i in 0..self.g {
            let mut next = BTreeMap::new();
            for (&v, &w) in &ways {
                for nv in [v, v + 1] {
                    if (self.lower[i]..=self.upper[i]).contains(&nv) {
                        let e = next.entry(nv).or_insert(0u128);
                        *e = e.saturating_add(w);
                    }
                }
            }
            ways = next;
        }
        ways.values().fold(0u128, |a, &b| a.saturating_add(b))
    }
}

/// Anchors `nu_1 = 0` and `nu_(r_k) = r_(k+1)`, then propagates.
pub fn derive_constraints(rp: &RankProfile) -> Result<FinalTypeConstraints> {
    validate_profile(rp)?;
    let g = rp.g;
    let mut anchors = BTreeMap::new();
    if g >= 1 {
        anchors.insert(1, 0);
    }
    let mut prev = g;
    for &r in &rp.ranks {
        if prev >= 1 {
            if let Some(old) = anchors.insert(prev, r) {
                if old != r {
                    return Err(Error::InconsistentProfile(format!(
                        "nu_{prev} pinned to both {old} and {r}"
                    )));
                }
            }
        }
        prev = r;
    }
    FinalTypeConstraints::from_anchors(g, anchors)
}

pub const DEFAULT_CAP: usize = 1_000_000;

/// Every sequence `nu_1..nu_g` meeting the constraints, in lexicographic
/// order. Fails with [`Error::CapExceeded`] before enumerating if there are
/// more than `cap`.
pub fn enumerate_compatible_final_types(fc: &FinalTypeConstraints, cap: usize) -> Result<Vec<Vec<usize>>> {
    let total = fc.count();
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            cap,
            free_gaps: fc.free_gaps(),
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut current = Vec::with_capacity(fc.g);
    extend(fc, &mut current, 0, &mut out);
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

fn extend(fc: &FinalTypeConstraints, current: &mut Vec<usize>, prev: usize, out: &mut Vec<Vec<usize>>) {
    let i = current.len();
    if i == fc.g {
        out.push(current.clone());
        return;
    }
    for v in [prev, prev + 1] {
        if (fc.lower[i]..=fc.upper[i]).contains(&v) {
            current.push(v);
            extend(fc, current, v, out);
            current.pop();
        }
    }
}

/// Upper bound on the number of principally polarized factors of a
/// Jacobian with 2-rank 0 and the given a-number: each factor contributes at
/// least 1 to the a-number.
pub fn decomposition_bound(a_number: usize) -> Result<usize> {
    if a_number == 0 {
        return Err(Error::InconsistentProfile(
            "a-number of a 2-rank 0 Jacobian is at least 1".into(),
        ));
    }
    Ok(a_number)
}

/// `a(m) = g`? Never true for the Suzuki curves.
pub fn superspecial_check(m: u32) -> Result<bool> {
    let p = SuzukiParams::new(m)?;
    Ok(a_number_formula(m)? == p.g)
}

/// True iff `v` (basis coordinates of a form) lies in the image of `C`.
pub fn image_contains(cartier: &BitMatrix, v: &BitVector) -> Result<bool> {
    cartier.column_space_contains(v)
}
