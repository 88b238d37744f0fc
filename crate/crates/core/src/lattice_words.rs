//! Finite lattice words over a poset alphabet.
//!
//! A word is a lattice word (weak convention) when after every prefix and for
//! every cover `a ≻ b` the letter `a` has occurred at least as often as `b`.
//! The content after each prefix is then an order-monotone count vector, i.e.
//! an ideal of the chain bundle `{(p, i) : i < counts[p]}`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal_graph::PosetProvider;
use crate::poset::{Poset, Relation};

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;
pub const DEFAULT_FIBER_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `count_a ≥ count_b` after every prefix, for every cover `a ≻ b`.
    #[default]
    Weak,
    /// Two-element chains only: `count_a > count_b` after every nonempty prefix.
    Strict2,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Convention::Weak),
            "strict2" => Ok(Convention::Strict2),
            other => Err(Error::InvalidInput(format!("unknown convention `{other}`"))),
        }
    }
}

/// Occurrence counts per poset element, indexed like `poset.elements()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountVector(pub Vec<u32>);

impl CountVector {
    pub fn zero(poset: &Poset) -> Self {
        CountVector(vec![0; poset.len()])
    }

    pub fn of_word(poset: &Poset, letters: &[usize]) -> Self {
        let mut c = Self::zero(poset);
        for &x in letters {
            c.0[x] += 1;
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn is_monotone(&self, poset: &Poset) -> bool {
        poset.covers().iter().all(|&(a, b)| self.0[a] >= self.0[b])
    }

    pub fn plus(&self, x: usize) -> Self {
        let mut c = self.clone();
        c.0[x] += 1;
        c
    }

    /// Differences `counts[a] − counts[b]` along the covers of `poset`.
    pub fn cover_gaps(&self, poset: &Poset) -> Vec<i64> {
        poset.covers().iter().map(|&(a, b)| self.0[a] as i64 - self.0[b] as i64).collect()
    }

    /// From `(identifier, count)` pairs; missing identifiers count zero.
    pub fn from_pairs(poset: &Poset, pairs: &[(&str, u32)]) -> Result<Self> {
        let mut c = Self::zero(poset);
        for &(id, n) in pairs {
            c.0[poset.index_of(id)?] = n;
        }
        Ok(c)
    }

    pub fn label(&self, poset: &Poset) -> String {
        let parts: Vec<String> = (0..poset.len()).map(|i| format!("{}:{}", poset.name(i), self.0[i])).collect();
        format!("[{}]", parts.join(","))
    }
}

/// A word known to satisfy the lattice condition under `convention`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeWord {
    letters: Vec<usize>,
    convention: Convention,
}

impl LatticeWord {
    pub fn new(poset: &Poset, letters: Vec<usize>, convention: Convention) -> Result<Self> {
        if letters.iter().any(|&x| x >= poset.len()) {
            return Err(Error::InvalidInput("letter index out of range".into()));
        }
        if !is_lattice(&letters, poset, convention)? {
            return Err(Error::NotLattice(render_word(poset, &letters)));
        }
        Ok(LatticeWord { letters, convention })
    }

    pub fn parse(poset: &Poset, text: &str, convention: Convention) -> Result<Self> {
        Self::new(poset, parse_word(poset, text)?, convention)
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn content(&self, poset: &Poset) -> CountVector {
        CountVector::of_word(poset, &self.letters)
    }
}

/// Whitespace-separated element identifiers.
pub fn parse_word(poset: &Poset, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace().map(|t| poset.index_of(t)).collect()
}

pub fn render_word(poset: &Poset, letters: &[usize]) -> String {
    letters.iter().map(|&x| poset.name(x)).collect::<Vec<_>>().join(" ")
}

fn strict2_pair(poset: &Poset) -> Result<(usize, usize)> {
    match poset.covers() {
        [(a, b)] if poset.len() == 2 => Ok((*a, *b)),
        _ => Err(Error::ConventionUnsupported(format!(
            "strict2 needs a two-element chain, poset has {} elements and {} covers",
            poset.len(),
            poset.covers().len()
        ))),
    }
}

/// Incremental lattice check along a word.
struct Checker<'a> {
    poset: &'a Poset,
    convention: Convention,
    counts: Vec<u32>,
}

impl<'a> Checker<'a> {
    fn new(poset: &'a Poset, convention: Convention) -> Result<Self> {
        if convention == Convention::Strict2 {
            strict2_pair(poset)?;
        }
        Ok(Checker { poset, convention, counts: vec![0; poset.len()] })
    }

    fn admits(&self, x: usize) -> bool {
        match self.convention {
            Convention::Weak => self
                .poset
                .covers()
                .iter()
                .all(|&(a, b)| b != x || self.counts[a] > self.counts[b]),
            Convention::Strict2 => {
                let (a, b) = self.poset.covers()[0];
                let (ca, cb) = (self.counts[a] + (x == a) as u32, self.counts[b] + (x == b) as u32);
                ca > cb
            }
        }
    }

    fn push(&mut self, x: usize) {
        self.counts[x] += 1;
    }

    fn pop(&mut self, x: usize) {
        self.counts[x] -= 1;
    }
}

pub fn is_lattice(letters: &[usize], poset: &Poset, convention: Convention) -> Result<bool> {
    let mut checker = Checker::new(poset, convention)?;
    for &x in letters {
        if !checker.admits(x) {
            return Ok(false);
        }
        checker.push(x);
    }
    Ok(true)
}

/// All lattice words of length `n`, lexicographic by element identifier.
pub fn enumerate_lattice_words(poset: &Poset, n: usize, convention: Convention) -> Result<Vec<Vec<usize>>> {
    enumerate_lattice_words_capped(poset, n, convention, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_lattice_words_capped(
    poset: &Poset,
    n: usize,
    convention: Convention,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut checker = Checker::new(poset, convention)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fn rec(
        checker: &mut Checker<'_>,
        prefix: &mut Vec<usize>,
        n: usize,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if prefix.len() == n {
            if out.len() >= cap {
                return Err(Error::ResourceBound(format!("more than {cap} lattice words")));
            }
            out.push(prefix.clone());
            return Ok(());
        }
        for &x in checker.poset.lex_order() {
            if checker.admits(x) {
                checker.push(x);
                prefix.push(x);
                rec(checker, prefix, n, out, cap)?;
                prefix.pop();
                checker.pop(x);
            }
        }
        Ok(())
    }
    rec(&mut checker, &mut prefix, n, &mut out, cap)?;
    Ok(out)
}

/// The chain bundle of a poset: elements `(p, i)`, with `(p, i) ≻ (p, i − 1)`
/// and `(b, i) ≻ (a, i)` whenever `a ≻ b`. Its finite ideals are exactly the
/// order-monotone count vectors, and its paths are the weak lattice words.
#[derive(Debug, Clone)]
pub struct ChainBundle<'a> {
    poset: &'a Poset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BundleCell {
    pub element: usize,
    pub position: u32,
}

impl<'a> ChainBundle<'a> {
    pub fn new(poset: &'a Poset) -> Self {
        ChainBundle { poset }
    }

    pub fn poset(&self) -> &Poset {
        self.poset
    }

    /// The letter that leads from `from` to the one-larger ideal `to`.
    pub fn step_letter(&self, from: &CountVector, to: &CountVector) -> Option<usize> {
        let mut diff = (0..self.poset.len()).filter(|&i| to.0[i] != from.0[i]);
        let x = diff.next()?;
        (diff.next().is_none() && to.0[x] == from.0[x] + 1).then_some(x)
    }

    /// The word read off a path that starts just after the empty ideal.
    pub fn path_word(&self, path: &[CountVector]) -> Option<Vec<usize>> {
        let mut prev = CountVector::zero(self.poset);
        let mut word = Vec::with_capacity(path.len());
        for c in path {
            word.push(self.step_letter(&prev, c)?);
            prev = c.clone();
        }
        Some(word)
    }
}

impl PosetProvider for ChainBundle<'_> {
    type Element = BundleCell;
    type Ideal = CountVector;

    fn empty(&self) -> CountVector {
        CountVector::zero(self.poset)
    }

    fn ideal_size(&self, ideal: &CountVector) -> usize {
        ideal.total() as usize
    }

    fn addable(&self, ideal: &CountVector) -> Vec<BundleCell> {
        self.poset
            .lex_order()
            .iter()
            .copied()
            .filter(|&x| self.poset.covers().iter().all(|&(a, b)| b != x || ideal.0[a] > ideal.0[b]))
            .map(|x| BundleCell { element: x, position: ideal.0[x] })
            .collect()
    }

    fn removable(&self, ideal: &CountVector) -> Vec<BundleCell> {
        self.poset
            .lex_order()
            .iter()
            .copied()
            .filter(|&x| ideal.0[x] > 0)
            .filter(|&x| self.poset.covers().iter().all(|&(a, b)| a != x || ideal.0[a] > ideal.0[b]))
            .map(|x| BundleCell { element: x, position: ideal.0[x] - 1 })
            .collect()
    }

    fn insert(&self, ideal: &CountVector, x: &BundleCell) -> CountVector {
        ideal.plus(x.element)
    }

    fn remove(&self, ideal: &CountVector, x: &BundleCell) -> CountVector {
        let mut c = ideal.clone();
        c.0[x.element] -= 1;
        c
    }

    fn compare(&self, a: &BundleCell, b: &BundleCell) -> Relation {
        if a == b {
            return Relation::Equal;
        }
        // (p, i) ≥ (q, j) iff j ≤ i and q ⪰ p.
        let ge = |x: &BundleCell, y: &BundleCell| {
            y.position <= x.position && matches!(self.poset.compare(y.element, x.element), Relation::Greater | Relation::Equal)
        };
        if ge(a, b) {
            Relation::Greater
        } else if ge(b, a) {
            Relation::Less
        } else {
            Relation::Incomparable
        }
    }

    fn vertex_id(&self, ideal: &CountVector) -> String {
        ideal.label(self.poset)
    }
}

/// The path of contents traced by a weak lattice word.
pub fn word_to_tableau(poset: &Poset, letters: &[usize]) -> Result<Vec<CountVector>> {
    if !is_lattice(letters, poset, Convention::Weak)? {
        return Err(Error::NotLattice(render_word(poset, letters)));
    }
    let mut c = CountVector::zero(poset);
    Ok(letters
        .iter()
        .map(|&x| {
            c.0[x] += 1;
            c.clone()
        })
        .collect())
}

/// Running count vectors of a lattice word, i.e. the Weyl-chamber walk.
pub fn walk_trace(poset: &Poset, word: &LatticeWord) -> Result<Vec<CountVector>> {
    if !is_lattice(word.letters(), poset, word.convention())? {
        return Err(Error::NotLattice(render_word(poset, word.letters())));
    }
    let mut c = CountVector::zero(poset);
    Ok(word
        .letters()
        .iter()
        .map(|&x| {
            c.0[x] += 1;
            c.clone()
        })
        .collect())
}

/// CSV with a `step` column followed by one column per element.
pub fn trace_csv(poset: &Poset, trace: &[CountVector]) -> String {
    let mut out = String::from("step");
    for e in poset.elements() {
        out.push(',');
        out.push_str(e);
    }
    out.push('\n');
    for (k, c) in trace.iter().enumerate() {
        let _ = write!(out, "{}", k + 1);
        for v in &c.0 {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Class of a word in the finite-permutation (de Finetti) partition at a cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DeFinettiClassKey {
    pub cut: usize,
    /// Sorted letters of the first `cut` positions.
    pub content: Vec<usize>,
    pub tail: Vec<usize>,
}

pub fn definetti_key(letters: &[usize], cut: usize) -> Result<DeFinettiClassKey> {
    if cut > letters.len() {
        return Err(Error::InvalidInput(format!("cut {cut} beyond word length {}", letters.len())));
    }
    let mut content = letters[..cut].to_vec();
    content.sort_unstable();
    Ok(DeFinettiClassKey { cut, content, tail: letters[cut..].to_vec() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberStats {
    pub all_arrangements: BigUint,
    pub lattice_arrangements: BigUint,
}

pub fn multinomial(content: &CountVector) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &c in &content.0 {
        for k in 1..=c as u64 {
            total += 1;
            acc = acc * BigUint::from(total) / BigUint::from(k);
        }
    }
    acc
}

pub fn fiber_statistics(poset: &Poset, content: &CountVector) -> Result<FiberStats> {
    fiber_statistics_capped(poset, content, DEFAULT_FIBER_CAP)
}

/// Counts all orderings of a content and the lattice ones among them, by
/// direct enumeration of distinct arrangements.
pub fn fiber_statistics_capped(poset: &Poset, content: &CountVector, cap: u64) -> Result<FiberStats> {
    if content.0.len() != poset.len() {
        return Err(Error::DimensionMismatch { expected: poset.len(), got: content.0.len() });
    }
    let all = multinomial(content);
    if all.to_u64().is_none_or(|v| v > cap) {
        return Err(Error::ResourceBound(format!("{all} arrangements exceed cap {cap}")));
    }
    let mut remaining = content.0.clone();
    let mut checker = Checker::new(poset, Convention::Weak)?;
    fn rec(checker: &mut Checker<'_>, remaining: &mut [u32], left: u64) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for x in 0..remaining.len() {
            if remaining[x] > 0 && checker.admits(x) {
                remaining[x] -= 1;
                checker.push(x);
                total += rec(checker, remaining, left - 1);
                checker.pop(x);
                remaining[x] += 1;
            }
        }
        total
    }
    let lattice = rec(&mut checker, &mut remaining, content.total());
    Ok(FiberStats { all_arrangements: all, lattice_arrangements: BigUint::from(lattice) })
}
