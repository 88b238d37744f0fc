//! Finite posets given by covering relations.
//!
//! Elements are stored in declaration order and addressed by index. The strict
//! order is kept as one bitmask per element (`below[a]` holds every `b` with
//! `a ≻ b`), which caps posets at [`MAX_ELEMENTS`] elements.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ELEMENTS: usize = 128;

/// Outcome of comparing two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Relation {
    pub fn reverse(self) -> Relation {
        match self {
            Relation::Greater => Relation::Less,
            Relation::Less => Relation::Greater,
            r => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    /// Reduced cover pairs `(upper, lower)`, sorted.
    covers: Vec<(usize, usize)>,
    below: Vec<u128>,
    lex_order: Vec<usize>,
}

impl Poset {
    /// Builds a poset from element identifiers and `(a, b)` pairs meaning `a ≻ b`.
    ///
    /// Redundant pairs implied by transitivity are dropped.
    pub fn new<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyPoset);
        }
        if elements.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements(elements.len(), MAX_ELEMENTS));
        }
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            let e = e.as_ref().to_string();
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::DuplicateElement(e));
            }
            names.push(e);
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownElement(s.to_string()));
        let mut pairs = Vec::with_capacity(covers.len());
        for (a, b) in covers {
            pairs.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Self::from_indexed(names, index, &pairs)
    }

    pub(crate) fn from_indexed(
        elements: Vec<String>,
        index: HashMap<String, usize>,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let n = elements.len();
        let mut succ = vec![0u128; n];
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::CycleDetected(elements[a].clone()));
            }
            succ[a] |= 1 << b;
        }
        // Transitive closure by repeated propagation; n ≤ 128 keeps this cheap.
        let mut below = succ.clone();
        loop {
            let mut changed = false;
            for a in 0..n {
                let mut acc = below[a];
                for b in bits(below[a]) {
                    acc |= below[b];
                }
                if acc != below[a] {
                    below[a] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(a) = (0..n).find(|&a| below[a] & (1 << a) != 0) {
            return Err(Error::CycleDetected(elements[a].clone()));
        }
        let mut covers: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(a, b)| !bits(below[a]).any(|c| c != b && below[c] & (1 << b) != 0))
            .collect();
        covers.sort_unstable();
        covers.dedup();
        let mut lex_order: Vec<usize> = (0..n).collect();
        lex_order.sort_by(|&x, &y| elements[x].cmp(&elements[y]));
        Ok(Poset { elements, index, covers, below, lex_order })
    }

    /// A totally ordered poset `ids[0] ≻ ids[1] ≻ …`.
    pub fn chain<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        let covers: Vec<(&str, &str)> = ids.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let elems: Vec<&str> = ids.iter().map(|s| s.as_ref()).collect();
        Poset::new(&elems, &covers)
    }

    pub fn antichain<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        let elems: Vec<&str> = ids.iter().map(|s| s.as_ref()).collect();
        Poset::new(&elems, &[])
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    /// Reduced cover pairs `(upper, lower)` by index.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_names(&self) -> Vec<(String, String)> {
        self.covers.iter().map(|&(a, b)| (self.elements[a].clone(), self.elements[b].clone())).collect()
    }

    /// Element indices sorted by identifier.
    pub fn lex_order(&self) -> &[usize] {
        &self.lex_order
    }

    pub fn full_mask(&self) -> u128 {
        if self.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.len()) - 1
        }
    }

    /// Bitmask of the elements strictly below `a`.
    pub fn below_mask(&self, a: usize) -> u128 {
        self.below[a]
    }

    pub fn greater(&self, a: usize, b: usize) -> bool {
        self.below[a] & (1 << b) != 0
    }

    pub fn compare(&self, a: usize, b: usize) -> Relation {
        if a == b {
            Relation::Equal
        } else if self.greater(a, b) {
            Relation::Greater
        } else if self.greater(b, a) {
            Relation::Less
        } else {
            Relation::Incomparable
        }
    }

    pub fn order_query(&self, a: &str, b: &str) -> Result<Relation> {
        Ok(self.compare(self.index_of(a)?, self.index_of(b)?))
    }

    /// True when the poset is a single chain.
    pub fn is_chain(&self) -> bool {
        (0..self.len()).all(|a| (0..a).all(|b| self.compare(a, b) != Relation::Incomparable))
    }

    /// For a chain, element indices from the top down.
    pub fn chain_order(&self) -> Option<Vec<usize>> {
        if !self.is_chain() {
            return None;
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(self.below[a].count_ones()));
        Some(order)
    }

    pub fn mask_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<u128> {
        let mut mask = 0u128;
        for id in ids {
            mask |= 1 << self.index_of(id.as_ref())?;
        }
        Ok(mask)
    }

    pub fn mask_is_ideal(&self, mask: u128) -> bool {
        bits(mask).all(|x| self.below[x] & !mask == 0)
    }

    pub fn is_ideal<S: AsRef<str>>(&self, subset: &[S]) -> Result<bool> {
        Ok(self.mask_is_ideal(self.mask_of(subset)?))
    }

    pub fn ideal<S: AsRef<str>>(&self, members: &[S]) -> Result<FiniteIdeal> {
        let mask = self.mask_of(members)?;
        if !self.mask_is_ideal(mask) {
            return Err(Error::InvalidInput(format!(
                "{{{}}} is not downward closed",
                members.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(FiniteIdeal { mask })
    }

    pub fn down_closure(&self, mask: u128) -> FiniteIdeal {
        let mut out = mask;
        for x in bits(mask) {
            out |= self.below[x];
        }
        FiniteIdeal { mask: out }
    }

    pub fn full_ideal(&self) -> FiniteIdeal {
        FiniteIdeal { mask: self.full_mask() }
    }

    /// Elements outside `mask` whose lower set lies inside it.
    pub fn addable(&self, mask: u128) -> u128 {
        let mut out = 0;
        for x in bits(self.full_mask() & !mask) {
            if self.below[x] & !mask == 0 {
                out |= 1 << x;
            }
        }
        out
    }

    /// Members of `mask` with no member above them.
    pub fn removable(&self, mask: u128) -> u128 {
        let mut out = 0;
        for x in bits(mask) {
            if !bits(mask).any(|y| self.greater(y, x)) {
                out |= 1 << x;
            }
        }
        out
    }

    /// Exact number of linear extensions of the subposet induced by `ideal`.
    ///
    /// Forward dynamic programming over the ideals of the induced subposet.
    pub fn linear_extension_count(&self, ideal: &FiniteIdeal) -> BigUint {
        let target = ideal.mask;
        let mut level: HashMap<u128, BigUint> = HashMap::from([(0u128, BigUint::one())]);
        for _ in 0..target.count_ones() {
            let mut next: HashMap<u128, BigUint> = HashMap::with_capacity(level.len() * 2);
            for (mask, count) in &level {
                for x in bits(self.addable(*mask) & target) {
                    *next.entry(mask | (1 << x)).or_default() += count;
                }
            }
            level = next;
        }
        level.remove(&target).unwrap_or_default()
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements: {}", self.elements.join(" "))?;
        for &(a, b) in &self.covers {
            writeln!(f, "{} > {}", self.elements[a], self.elements[b])?;
        }
        Ok(())
    }
}

/// Iterates the set bits of a mask in increasing order.
pub(crate) fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A downward-closed subset of a [`Poset`], stored as a membership mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteIdeal {
    mask: u128,
}

impl FiniteIdeal {
    pub const EMPTY: FiniteIdeal = FiniteIdeal { mask: 0 };

    pub(crate) fn from_mask_unchecked(mask: u128) -> Self {
        FiniteIdeal { mask }
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask & (1 << i) != 0
    }

    /// Member identifiers in lexicographic order.
    pub fn members(&self, poset: &Poset) -> Vec<String> {
        let mut v: Vec<String> = bits(self.mask).map(|i| poset.name(i).to_string()).collect();
        v.sort();
        v
    }
}

/// One frequency as given by the user: a decimal or an exact fraction.
#[derive(Debug, Clone, PartialEq)]
pub enum Frequency {
    Decimal(f64),
    Rational(i64, i64),
}

impl Frequency {
    pub fn value(&self) -> f64 {
        match *self {
            Frequency::Decimal(x) => x,
            Frequency::Rational(p, q) => p as f64 / q as f64,
        }
    }

    fn exact(&self) -> Option<BigRational> {
        match *self {
            Frequency::Rational(p, q) if q != 0 => Some(BigRational::new(BigInt::from(p), BigInt::from(q))),
            _ => None,
        }
    }
}

impl From<f64> for Frequency {
    fn from(x: f64) -> Self {
        Frequency::Decimal(x)
    }
}

pub const SUM_TOLERANCE: f64 = 1e-12;

/// Validated frequencies on the elements of a poset.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    poset: Poset,
    freqs: Vec<f64>,
}

impl Spectrum {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Frequencies indexed like `poset().elements()`.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn freq(&self, id: &str) -> Result<f64> {
        Ok(self.freqs[self.poset.index_of(id)?])
    }

    /// Element indices by decreasing frequency.
    pub fn by_decreasing_frequency(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.freqs.len()).collect();
        order.sort_by(|&a, &b| self.freqs[b].total_cmp(&self.freqs[a]));
        order
    }

    /// Ratio `λ_b / λ_a` for every cover `a ≻ b`, in cover order.
    pub fn cover_ratios(&self) -> Vec<f64> {
        self.poset.covers().iter().map(|&(a, b)| self.freqs[b] / self.freqs[a]).collect()
    }

    /// Smallest gap `λ_a − λ_b` over covers, `None` without covers.
    pub fn min_cover_gap(&self) -> Option<f64> {
        self.poset.covers().iter().map(|&(a, b)| self.freqs[a] - self.freqs[b]).min_by(f64::total_cmp)
    }
}

/// Checks positivity, normalization, distinctness and order agreement.
///
/// When every entry is an exact fraction the sum and distinctness are checked
/// exactly; otherwise the sum must be within [`SUM_TOLERANCE`] of 1.
pub fn validate_spectrum<F: Into<Frequency> + Clone>(poset: &Poset, freqs: &HashMap<String, F>) -> Result<Spectrum> {
    let mut given = Vec::with_capacity(poset.len());
    for id in poset.elements() {
        let f: Frequency = freqs.get(id).cloned().ok_or_else(|| Error::MissingFrequency(id.clone()))?.into();
        given.push(f);
    }
    for id in freqs.keys() {
        poset.index_of(id)?;
    }
    for (i, f) in given.iter().enumerate() {
        let ok = match f.exact() {
            Some(r) => r.is_positive(),
            None => matches!(f, Frequency::Decimal(_)) && f.value() > 0.0 && f.value().is_finite(),
        };
        if !ok {
            return Err(Error::NonpositiveFrequency(poset.name(i).to_string()));
        }
    }
    let exact: Option<Vec<BigRational>> = given.iter().map(Frequency::exact).collect();
    let values: Vec<f64> = given.iter().map(Frequency::value).collect();
    match &exact {
        Some(ex) => {
            let sum = ex.iter().fold(BigRational::zero(), |acc, r| acc + r);
            if !sum.is_one() {
                return Err(Error::SumMismatch(values.iter().sum()));
            }
        }
        None => {
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::SumMismatch(sum));
            }
        }
    }
    let n = poset.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let equal = match &exact {
                Some(ex) => ex[a] == ex[b],
                None => values[a] == values[b],
            };
            if equal {
                return Err(Error::DegenerateSpectrum(poset.name(a).into(), poset.name(b).into()));
            }
        }
    }
    for &(a, b) in poset.covers() {
        let bigger = match &exact {
            Some(ex) => ex[a] > ex[b],
            None => values[a] > values[b],
        };
        if !bigger {
            return Err(Error::OrderViolation(poset.name(a).into(), poset.name(b).into()));
        }
    }
    Ok(Spectrum { poset: poset.clone(), freqs: values })
}

/// Convenience wrapper taking `(id, value)` pairs.
pub fn spectrum_from_pairs(poset: &Poset, pairs: &[(&str, f64)]) -> Result<Spectrum> {
    let map: HashMap<String, f64> = pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    validate_spectrum(poset, &map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_poset() -> Poset {
        Poset::new(&["m", "x", "y"], &[("x", "m"), ("y", "m")]).unwrap()
    }

    #[test]
    fn two_chain() {
        let p = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        assert_eq!(p.order_query("a", "b").unwrap(), Relation::Greater);
        assert_eq!(p.order_query("b", "a").unwrap(), Relation::Less);
        assert_eq!(p.order_query("a", "a").unwrap(), Relation::Equal);
    }

    #[test]
    fn transitive_reduction() {
        let p = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert_eq!(p.cover_names(), vec![("a".to_string(), "b".to_string()), ("b".into(), "c".into())]);
        assert_eq!(p.order_query("a", "c").unwrap(), Relation::Greater);
    }

    #[test]
    fn cycles_and_unknowns() {
        assert!(matches!(Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]), Err(Error::CycleDetected(_))));
        assert!(matches!(Poset::new(&["a"], &[("a", "a")]), Err(Error::CycleDetected(_))));
        assert_eq!(Poset::new(&["a"], &[("a", "z")]), Err(Error::UnknownElement("z".into())));
        assert_eq!(Poset::new(&["a", "a"], &[]), Err(Error::DuplicateElement("a".into())));
        assert_eq!(Poset::new::<&str>(&[], &[]), Err(Error::EmptyPoset));
        let p = v_poset();
        assert_eq!(p.order_query("x", "q"), Err(Error::UnknownElement("q".into())));
    }

    #[test]
    fn v_poset_queries() {
        let p = v_poset();
        assert_eq!(p.order_query("x", "y").unwrap(), Relation::Incomparable);
        assert!(p.is_ideal(&["m", "x"]).unwrap());
        assert!(!p.is_ideal(&["x"]).unwrap());
        assert!(p.is_ideal::<&str>(&[]).unwrap());
        assert_eq!(p.linear_extension_count(&p.full_ideal()), BigUint::from(2u32));
    }

    #[test]
    fn chain_ideals() {
        let p = Poset::chain(&["a", "b"]).unwrap();
        assert!(p.is_ideal(&["b"]).unwrap());
        assert!(!p.is_ideal(&["a"]).unwrap());
    }

    #[test]
    fn extension_counts() {
        let chain = Poset::chain(&["a", "b", "c"]).unwrap();
        assert_eq!(chain.linear_extension_count(&chain.full_ideal()), BigUint::from(1u32));
        let anti = Poset::antichain(&["a", "b", "c"]).unwrap();
        assert_eq!(anti.linear_extension_count(&anti.full_ideal()), BigUint::from(6u32));
        assert_eq!(anti.linear_extension_count(&FiniteIdeal::EMPTY), BigUint::from(1u32));
    }

    #[test]
    fn spectrum_checks() {
        let p = Poset::chain(&["a", "b"]).unwrap();
        let s = spectrum_from_pairs(&p, &[("a", 0.7), ("b", 0.3)]).unwrap();
        assert_eq!(s.freq("a").unwrap(), 0.7);
        assert_eq!(
            spectrum_from_pairs(&p, &[("a", 0.3), ("b", 0.7)]),
            Err(Error::OrderViolation("a".into(), "b".into()))
        );
        assert_eq!(
            spectrum_from_pairs(&p, &[("a", 0.5), ("b", 0.5)]),
            Err(Error::DegenerateSpectrum("a".into(), "b".into()))
        );
        assert!(matches!(spectrum_from_pairs(&p, &[("a", 0.7), ("b", 0.31)]), Err(Error::SumMismatch(_))));
        assert_eq!(
            spectrum_from_pairs(&p, &[("a", 1.0), ("b", 0.0)]),
            Err(Error::NonpositiveFrequency("b".into()))
        );
        assert_eq!(spectrum_from_pairs(&p, &[("a", 1.0)]), Err(Error::MissingFrequency("b".into())));
    }

    #[test]
    fn exact_rational_spectrum() {
        let p = Poset::chain(&["a", "b", "c"]).unwrap();
        let map: HashMap<String, Frequency> = [
            ("a".to_string(), Frequency::Rational(1, 2)),
            ("b".to_string(), Frequency::Rational(1, 3)),
            ("c".to_string(), Frequency::Rational(1, 6)),
        ]
        .into();
        let s = validate_spectrum(&p, &map).unwrap();
        assert!((s.freqs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mut bad = map.clone();
        bad.insert("c".into(), Frequency::Rational(1, 7));
        assert!(matches!(validate_spectrum(&p, &bad), Err(Error::SumMismatch(_))));
    }
}
