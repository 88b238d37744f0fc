//! Ideals of `ℤ₊^d`: finite diagrams, irreducible one-dimensional ideals,
//! their unions, the poset of chains of an irreducible ideal and the
//! embedding of lattice words as multidimensional tableaux.
//!
//! Axes are numbered from 1. An irreducible ideal with axis `i` and base `ν`
//! holds every point whose coordinates other than the `i`-th form a cell of
//! the `(d−1)`-dimensional diagram `ν`. In `ℤ₊²` with `(row, column)` cells,
//! the first `t` rows are the irreducible ideal with axis 2 and base
//! `{0, …, t−1}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal_graph::PosetProvider;
use crate::lattice_words::{is_lattice, render_word, Convention};
use crate::poset::{validate_spectrum, Poset, Relation, Spectrum, SUM_TOLERANCE};

pub const MAX_DIMENSION: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint(pub Vec<u32>);

impl GridPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn componentwise_le(&self, other: &GridPoint) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The point with the `axis`-th coordinate (1-based) removed.
    pub fn drop_axis(&self, axis: usize) -> GridPoint {
        let mut c = self.0.clone();
        c.remove(axis - 1);
        GridPoint(c)
    }

    /// The point with `value` inserted as the `axis`-th coordinate.
    pub fn with_axis(&self, axis: usize, value: u32) -> GridPoint {
        let mut c = self.0.clone();
        c.insert(axis - 1, value);
        GridPoint(c)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite downward-closed set of grid points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiDiagram {
    pub d: usize,
    pub cells: BTreeSet<GridPoint>,
}

impl MultiDiagram {
    pub fn empty(d: usize) -> Self {
        MultiDiagram { d, cells: BTreeSet::new() }
    }

    /// Validates dimensions and downward closure.
    pub fn new(d: usize, cells: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let diagram = MultiDiagram { d, cells: cells.into_iter().map(GridPoint).collect() };
        diagram.validate()?;
        Ok(diagram)
    }

    /// A two-dimensional diagram from row lengths, cells `(row, column)`.
    pub fn from_rows(rows: &[u32]) -> Result<Self> {
        Self::new(2, rows.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| vec![r as u32, c])))
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.cells {
            if c.dim() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: c.dim() });
            }
        }
        if !self.is_downward_closed() {
            return Err(Error::InvalidDiagram("cells are not downward closed".into()));
        }
        Ok(())
    }

    pub fn is_downward_closed(&self) -> bool {
        self.cells.iter().all(|c| {
            (0..self.d).all(|k| {
                c.0[k] == 0 || {
                    let mut p = c.clone();
                    p.0[k] -= 1;
                    self.cells.contains(&p)
                }
            })
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        self.cells.contains(p)
    }

    /// Row lengths of a two-dimensional diagram.
    pub fn rows(&self) -> Option<Vec<u32>> {
        if self.d != 2 {
            return None;
        }
        let mut rows: Vec<u32> = Vec::new();
        for c in &self.cells {
            let r = c.0[0] as usize;
            if rows.len() <= r {
                rows.resize(r + 1, 0);
            }
            rows[r] += 1;
        }
        Some(rows)
    }
}

/// Lazy provider for the poset `ℤ₊^d` with componentwise order.
#[derive(Debug, Clone, Copy)]
pub struct GridProvider {
    d: usize,
}

pub fn grid_provider(d: usize) -> Result<GridProvider> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::DimensionCap(d, MAX_DIMENSION));
    }
    Ok(GridProvider { d })
}

impl GridProvider {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_ideal(&self, diagram: &MultiDiagram) -> bool {
        diagram.d == self.d && diagram.cells.iter().all(|c| c.dim() == self.d) && diagram.is_downward_closed()
    }
}

impl PosetProvider for GridProvider {
    type Element = GridPoint;
    type Ideal = MultiDiagram;

    fn empty(&self) -> MultiDiagram {
        MultiDiagram::empty(self.d)
    }

    fn ideal_size(&self, ideal: &MultiDiagram) -> usize {
        ideal.len()
    }

    fn addable(&self, ideal: &MultiDiagram) -> Vec<GridPoint> {
        if ideal.is_empty() {
            return vec![GridPoint(vec![0; self.d])];
        }
        let mut out = BTreeSet::new();
        for c in &ideal.cells {
            for k in 0..self.d {
                let mut p = c.clone();
                p.0[k] += 1;
                if ideal.contains(&p) || out.contains(&p) {
                    continue;
                }
                let supported = (0..self.d).all(|j| {
                    p.0[j] == 0 || {
                        let mut q = p.clone();
                        q.0[j] -= 1;
                        ideal.contains(&q)
                    }
                });
                if supported {
                    out.insert(p);
                }
            }
        }
        out.into_iter().collect()
    }

    fn removable(&self, ideal: &MultiDiagram) -> Vec<GridPoint> {
        ideal
            .cells
            .iter()
            .filter(|c| {
                (0..self.d).all(|k| {
                    let mut p = (*c).clone();
                    p.0[k] += 1;
                    !ideal.contains(&p)
                })
            })
            .cloned()
            .collect()
    }

    fn insert(&self, ideal: &MultiDiagram, x: &GridPoint) -> MultiDiagram {
        let mut next = ideal.clone();
        next.cells.insert(x.clone());
        next
    }

    fn remove(&self, ideal: &MultiDiagram, x: &GridPoint) -> MultiDiagram {
        let mut next = ideal.clone();
        next.cells.remove(x);
        next
    }

    fn compare(&self, a: &GridPoint, b: &GridPoint) -> Relation {
        match (a == b, b.componentwise_le(a), a.componentwise_le(b)) {
            (true, _, _) => Relation::Equal,
            (_, true, _) => Relation::Greater,
            (_, _, true) => Relation::Less,
            _ => Relation::Incomparable,
        }
    }

    fn vertex_id(&self, ideal: &MultiDiagram) -> String {
        match ideal.rows() {
            Some(rows) => {
                let parts: Vec<String> = rows.iter().map(u32::to_string).collect();
                format!("({})", parts.join(","))
            }
            None => {
                let parts: Vec<String> = ideal.cells.iter().map(GridPoint::to_string).collect();
                format!("{{{}}}", parts.join(","))
            }
        }
    }
}

/// One free axis over a `(d−1)`-dimensional base diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibleIdeal {
    pub axis: usize,
    pub base: MultiDiagram,
}

impl IrreducibleIdeal {
    pub fn new(axis: usize, base: MultiDiagram) -> Result<Self> {
        let ideal = IrreducibleIdeal { axis, base };
        ideal.validate()?;
        Ok(ideal)
    }

    pub fn dim(&self) -> usize {
        self.base.d + 1
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d > MAX_DIMENSION {
            return Err(Error::DimensionCap(d, MAX_DIMENSION));
        }
        if self.axis == 0 || self.axis > d {
            return Err(Error::InvalidInput(format!("axis {} outside 1..={d}", self.axis)));
        }
        self.base.validate()
    }

    pub fn contains(&self, point: &GridPoint) -> Result<bool> {
        if point.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: point.dim() });
        }
        Ok(self.base.contains(&point.drop_axis(self.axis)))
    }

    /// Bound on the `k`-th coordinate (0-based) of members, `None` on the axis.
    fn coordinate_bound(&self, k: usize) -> Option<u32> {
        if k + 1 == self.axis {
            return None;
        }
        let j = if k + 1 < self.axis { k } else { k - 1 };
        Some(self.base.cells.iter().map(|c| c.0[j] + 1).max().unwrap_or(0))
    }
}

pub fn irreducible_membership(ideal: &IrreducibleIdeal, point: &GridPoint) -> Result<bool> {
    ideal.contains(point)
}

/// A union of irreducible ideals with pairwise distinct axes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneDimMinimalIdeal {
    pub d: usize,
    pub components: Vec<IrreducibleIdeal>,
}

impl OneDimMinimalIdeal {
    pub fn new(d: usize, components: Vec<IrreducibleIdeal>) -> Result<Self> {
        let ideal = OneDimMinimalIdeal { d, components };
        ideal.validate()?;
        Ok(ideal)
    }

    /// `ℤ₊²` ideal of the first `rows` rows and first `columns` columns.
    pub fn rows_columns(rows: u32, columns: u32) -> Result<Self> {
        let line = |t: u32| MultiDiagram::new(1, (0..t).map(|i| vec![i]));
        let mut components = Vec::new();
        if rows > 0 {
            components.push(IrreducibleIdeal::new(2, line(rows)?)?);
        }
        if columns > 0 {
            components.push(IrreducibleIdeal::new(1, line(columns)?)?);
        }
        Self::new(2, components)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIMENSION {
            return Err(Error::DimensionCap(self.d, MAX_DIMENSION));
        }
        if self.components.is_empty() {
            return Err(Error::InvalidInput("a one-dimensional ideal needs at least one component".into()));
        }
        let mut axes = BTreeSet::new();
        for c in &self.components {
            c.validate()?;
            if c.dim() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: c.dim() });
            }
            if !axes.insert(c.axis) {
                return Err(Error::InfiniteIntersection(c.axis));
            }
        }
        Ok(())
    }

    pub fn contains(&self, point: &GridPoint) -> Result<bool> {
        for c in &self.components {
            if c.contains(point)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn max_base_coordinate(&self) -> u32 {
        self.components.iter().flat_map(|c| c.base.cells.iter().flat_map(|p| p.0.iter().copied())).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairIntersection {
    pub first: usize,
    pub second: usize,
    pub diagram: MultiDiagram,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub components: Vec<IrreducibleIdeal>,
    pub pairwise_intersections: Vec<PairIntersection>,
    pub all_finite: bool,
}

/// Points of the box `[0, bounds)` in lexicographic order.
fn box_points(bounds: &[u32]) -> Vec<GridPoint> {
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..b).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(GridPoint).collect()
}

/// Components and their explicit, finite pairwise intersections.
pub fn decompose(ideal: &OneDimMinimalIdeal) -> Result<Decomposition> {
    ideal.validate()?;
    let mut pairs = Vec::new();
    for i in 0..ideal.components.len() {
        for j in (i + 1)..ideal.components.len() {
            let (a, b) = (&ideal.components[i], &ideal.components[j]);
            // Distinct axes bound every coordinate by at least one side.
            let bounds: Vec<u32> = (0..ideal.d)
                .map(|k| match (a.coordinate_bound(k), b.coordinate_bound(k)) {
                    (Some(x), Some(y)) => Ok(x.min(y)),
                    (Some(x), None) | (None, Some(x)) => Ok(x),
                    (None, None) => Err(Error::InfiniteIntersection(k + 1)),
                })
                .collect::<Result<_>>()?;
            let mut cells = BTreeSet::new();
            for p in box_points(&bounds) {
                if a.contains(&p)? && b.contains(&p)? {
                    cells.insert(p);
                }
            }
            let diagram = MultiDiagram { d: ideal.d, cells };
            diagram.validate()?;
            pairs.push(PairIntersection { first: i, second: j, diagram });
        }
    }
    Ok(Decomposition { components: ideal.components.clone(), pairwise_intersections: pairs, all_finite: true })
}

/// Inclusion order between two one-dimensional ideals.
///
/// Membership of `x` in an irreducible component only asks whether the
/// non-axis coordinates of `x` form a base cell. With `M` one more than the
/// largest coordinate of any base cell, clamping every coordinate of `x` to
/// `M` changes no membership answer, since coordinates `≥ M` miss every base
/// either way. Comparing on `{0, …, M}^d` therefore decides inclusion.
pub fn min1_compare(a: &OneDimMinimalIdeal, b: &OneDimMinimalIdeal) -> Result<Relation> {
    a.validate()?;
    b.validate()?;
    if a.d != b.d {
        return Err(Error::DimensionMismatch { expected: a.d, got: b.d });
    }
    let m = a.max_base_coordinate().max(b.max_base_coordinate()) + 1;
    let (mut a_in_b, mut b_in_a) = (true, true);
    for p in box_points(&vec![m + 1; a.d]) {
        let (x, y) = (a.contains(&p)?, b.contains(&p)?);
        a_in_b &= !x || y;
        b_in_a &= !y || x;
    }
    Ok(match (a_in_b, b_in_a) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::Less,
        (false, true) => Relation::Greater,
        (false, false) => Relation::Incomparable,
    })
}

/// Element label of the chain through a base cell.
pub fn chain_label(cell: &GridPoint) -> String {
    cell.to_string()
}

/// The poset of chains of an irreducible ideal: one element per base cell,
/// with `u ≻ v` whenever `v` covers `u` in the base (the chain over `u` must
/// stay at least as long as the chain over `v`). For `d = 2` this is a chain.
pub fn chains_of(ideal: &IrreducibleIdeal) -> Result<Poset> {
    ideal.validate()?;
    if ideal.base.is_empty() {
        return Err(Error::InvalidInput("irreducible ideal with an empty base has no chains".into()));
    }
    let cells: Vec<&GridPoint> = ideal.base.cells.iter().collect();
    let labels: Vec<String> = cells.iter().map(|c| chain_label(c)).collect();
    let mut covers = Vec::new();
    for u in &cells {
        for k in 0..ideal.base.d {
            let mut v = (*u).clone();
            v.0[k] += 1;
            if ideal.base.contains(&v) {
                covers.push((chain_label(u), chain_label(&v)));
            }
        }
    }
    Poset::new(&labels, &covers)
}

/// Base cell of a chain label.
fn cell_of(ideal: &IrreducibleIdeal, label: &str) -> Result<GridPoint> {
    ideal
        .base
        .cells
        .iter()
        .find(|c| chain_label(c) == label)
        .cloned()
        .ok_or_else(|| Error::UnknownElement(label.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReduction {
    pub component: usize,
    pub poset: String,
    /// Frequencies as given, keyed by chain label.
    pub raw: Vec<(String, f64)>,
    /// Frequencies renormalized within the component.
    pub normalized: Vec<(String, f64)>,
    #[serde(skip)]
    pub chain_poset: Poset,
    #[serde(skip)]
    pub spectrum: Spectrum,
}

/// Key of a chain in a multi-component frequency map: `"<component>:<label>"`.
pub fn chain_key(component: usize, label: &str) -> String {
    format!("{component}:{label}")
}

/// Splits chain frequencies by component and renormalizes each part.
pub fn reduce_to_chain_poset(
    ideal: &OneDimMinimalIdeal,
    frequencies: &HashMap<String, f64>,
) -> Result<Vec<ComponentReduction>> {
    ideal.validate()?;
    let mut known = BTreeSet::new();
    let mut per_component = Vec::new();
    for (k, comp) in ideal.components.iter().enumerate() {
        let poset = chains_of(comp)?;
        let mut raw = Vec::new();
        for label in poset.elements() {
            let key = chain_key(k, label);
            let f = *frequencies.get(&key).ok_or_else(|| Error::MissingFrequency(key.clone()))?;
            if !(f > 0.0) {
                return Err(Error::NonpositiveFrequency(key));
            }
            raw.push((label.clone(), f));
            known.insert(key);
        }
        per_component.push((poset, raw));
    }
    if let Some(extra) = frequencies.keys().find(|k| !known.contains(*k)) {
        return Err(Error::UnknownElement(extra.clone()));
    }
    let total: f64 = frequencies.values().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::SumMismatch(total));
    }
    per_component
        .into_iter()
        .enumerate()
        .map(|(k, (poset, raw))| {
            let mass: f64 = raw.iter().map(|(_, f)| f).sum();
            let normalized: HashMap<String, f64> = raw.iter().map(|(l, f)| (l.clone(), f / mass)).collect();
            let spectrum = renormalized_spectrum(&poset, &normalized)?;
            let normalized = poset.elements().iter().cloned().zip(spectrum.freqs().iter().copied()).collect();
            Ok(ComponentReduction { component: k, poset: poset.to_string(), raw, normalized, chain_poset: poset, spectrum })
        })
        .collect()
}

/// Validation after renormalization, absorbing the rounding of the division.
fn renormalized_spectrum(poset: &Poset, freqs: &HashMap<String, f64>) -> Result<Spectrum> {
    let sum: f64 = freqs.values().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::SumMismatch(sum));
    }
    validate_spectrum(poset, freqs)
}

/// Embeds a lattice word over `chains_of(component)` as a growing sequence of
/// diagrams in `ℤ₊^d`: the `k`-th occurrence of chain `u` adds the point over
/// base cell `u` at axis coordinate `k − 1`.
pub fn tableau_embed(component: &IrreducibleIdeal, chains: &Poset, letters: &[usize]) -> Result<Vec<MultiDiagram>> {
    if !is_lattice(letters, chains, Convention::Weak)? {
        return Err(Error::NotLattice(render_word(chains, letters)));
    }
    let cells: Vec<GridPoint> =
        chains.elements().iter().map(|l| cell_of(component, l)).collect::<Result<_>>()?;
    let mut counts = vec![0u32; chains.len()];
    let mut diagram = MultiDiagram::empty(component.dim());
    let mut out = Vec::with_capacity(letters.len());
    for &x in letters {
        diagram.cells.insert(cells[x].with_axis(component.axis, counts[x]));
        counts[x] += 1;
        out.push(diagram.clone());
    }
    Ok(out)
}

/// Reads back the chain word of a path of diagrams inside a component.
pub fn pullback_path(component: &IrreducibleIdeal, chains: &Poset, path: &[MultiDiagram]) -> Result<Vec<usize>> {
    let mut prev = MultiDiagram::empty(component.dim());
    let mut word = Vec::with_capacity(path.len());
    let mut counts = vec![0u32; chains.len()];
    for d in path {
        let added: Vec<&GridPoint> = d.cells.difference(&prev.cells).collect();
        if added.len() != 1 || d.len() != prev.len() + 1 {
            return Err(Error::InvalidInput("path must grow by one cell per step".into()));
        }
        let p = added[0];
        if !component.contains(p)? {
            return Err(Error::InvalidInput(format!("cell {p} lies outside the component")));
        }
        let x = chains.index_of(&chain_label(&p.drop_axis(component.axis)))?;
        if p.0[component.axis - 1] != counts[x] {
            return Err(Error::InvalidInput(format!("cell {p} skips positions on its chain")));
        }
        counts[x] += 1;
        word.push(x);
        prev = d.clone();
    }
    if !is_lattice(&word, chains, Convention::Weak)? {
        return Err(Error::NotLattice(render_word(chains, &word)));
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal_graph::successors;

    fn pt(c: &[u32]) -> GridPoint {
        GridPoint(c.to_vec())
    }

    #[test]
    fn grid_successors() {
        let g = grid_provider(2).unwrap();
        let d = MultiDiagram::from_rows(&[2, 1]).unwrap();
        assert_eq!(g.addable(&d), vec![pt(&[0, 2]), pt(&[1, 1]), pt(&[2, 0])]);
        let ids: Vec<String> = successors(&g, &d).iter().map(|s| g.vertex_id(s)).collect();
        assert_eq!(ids, vec!["(3,1)", "(2,2)", "(2,1,1)"]);
        assert_eq!(successors(&g, &g.empty()).len(), 1);
        let g1 = grid_provider(1).unwrap();
        let line = MultiDiagram::new(1, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(successors(&g1, &line).len(), 1);
        let g3 = grid_provider(3).unwrap();
        let origin = MultiDiagram::new(3, vec![vec![0, 0, 0]]).unwrap();
        assert_eq!(g3.addable(&origin).len(), 3);
        assert!(matches!(grid_provider(7), Err(Error::DimensionCap(7, 6))));
        assert!(matches!(grid_provider(0), Err(Error::DimensionCap(0, 6))));
    }

    #[test]
    fn membership_rule() {
        let rows = IrreducibleIdeal::new(1, MultiDiagram::new(1, vec![vec![0], vec![1]]).unwrap()).unwrap();
        assert!(rows.contains(&pt(&[7, 1])).unwrap());
        assert!(!rows.contains(&pt(&[7, 2])).unwrap());
        assert!(matches!(rows.contains(&pt(&[1, 1, 1])), Err(Error::DimensionMismatch { .. })));
        let v = MultiDiagram::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let comp = IrreducibleIdeal::new(3, v).unwrap();
        assert!(comp.contains(&pt(&[0, 1, 5])).unwrap());
        assert!(!comp.contains(&pt(&[1, 1, 5])).unwrap());
        let empty = IrreducibleIdeal::new(1, MultiDiagram::empty(1)).unwrap();
        assert!(!empty.contains(&pt(&[0, 0])).unwrap());
    }

    #[test]
    fn chain_posets() {
        let rows = IrreducibleIdeal::new(2, MultiDiagram::new(1, vec![vec![0], vec![1], vec![2]]).unwrap()).unwrap();
        let p = chains_of(&rows).unwrap();
        assert!(p.is_chain() && p.len() == 3);
        assert_eq!(p.order_query("(0)", "(2)").unwrap(), Relation::Greater);
        let v = MultiDiagram::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let p = chains_of(&IrreducibleIdeal::new(3, v).unwrap()).unwrap();
        assert_eq!(p.covers().len(), 2);
        assert_eq!(p.order_query("(1,0)", "(0,1)").unwrap(), Relation::Incomparable);
        assert_eq!(p.order_query("(0,0)", "(1,0)").unwrap(), Relation::Greater);
        let single = IrreducibleIdeal::new(2, MultiDiagram::new(1, vec![vec![0]]).unwrap()).unwrap();
        assert_eq!(chains_of(&single).unwrap().len(), 1);
    }

    #[test]
    fn rows_and_columns_intersect_in_rectangle() {
        let ideal = OneDimMinimalIdeal::rows_columns(2, 3).unwrap();
        let dec = decompose(&ideal).unwrap();
        assert!(dec.all_finite);
        assert_eq!(dec.pairwise_intersections.len(), 1);
        assert_eq!(dec.pairwise_intersections[0].diagram.len(), 6);
        let single = OneDimMinimalIdeal::rows_columns(2, 0).unwrap();
        assert!(decompose(&single).unwrap().pairwise_intersections.is_empty());
    }

    #[test]
    fn three_dimensional_rays_meet_at_origin() {
        let base = MultiDiagram::new(2, vec![vec![0, 0]]).unwrap();
        let ideal = OneDimMinimalIdeal::new(
            3,
            vec![IrreducibleIdeal::new(1, base.clone()).unwrap(), IrreducibleIdeal::new(2, base).unwrap()],
        )
        .unwrap();
        let dec = decompose(&ideal).unwrap();
        assert_eq!(dec.pairwise_intersections[0].diagram.cells, BTreeSet::from([pt(&[0, 0, 0])]));
    }

    #[test]
    fn repeated_axis_is_rejected() {
        let base = MultiDiagram::new(1, vec![vec![0]]).unwrap();
        let raw = OneDimMinimalIdeal {
            d: 2,
            components: vec![IrreducibleIdeal::new(1, base.clone()).unwrap(), IrreducibleIdeal::new(1, base).unwrap()],
        };
        assert_eq!(decompose(&raw).unwrap_err(), Error::InfiniteIntersection(1));
    }

    #[test]
    fn inclusion_order() {
        let rc = |a, b| OneDimMinimalIdeal::rows_columns(a, b).unwrap();
        assert_eq!(min1_compare(&rc(1, 0), &rc(2, 0)).unwrap(), Relation::Less);
        assert_eq!(min1_compare(&rc(1, 2), &rc(2, 1)).unwrap(), Relation::Incomparable);
        assert_eq!(min1_compare(&rc(2, 2), &rc(2, 2)).unwrap(), Relation::Equal);
        assert_eq!(min1_compare(&rc(3, 1), &rc(2, 1)).unwrap(), Relation::Greater);
    }

    #[test]
    fn reductions() {
        let rows = OneDimMinimalIdeal::rows_columns(2, 0).unwrap();
        let f = HashMap::from([(chain_key(0, "(0)"), 0.7), (chain_key(0, "(1)"), 0.3)]);
        let red = reduce_to_chain_poset(&rows, &f).unwrap();
        assert_eq!(red.len(), 1);
        assert!(red[0].chain_poset.is_chain());
        assert_eq!(red[0].spectrum.freqs(), &[0.7, 0.3]);

        let rc = OneDimMinimalIdeal::rows_columns(1, 1).unwrap();
        let f = HashMap::from([(chain_key(0, "(0)"), 0.5), (chain_key(1, "(0)"), 0.5)]);
        let red = reduce_to_chain_poset(&rc, &f).unwrap();
        assert_eq!(red.len(), 2);
        assert!(red.iter().all(|r| r.spectrum.freqs() == [1.0]));

        let v = MultiDiagram::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let comp = OneDimMinimalIdeal::new(3, vec![IrreducibleIdeal::new(3, v).unwrap()]).unwrap();
        let bad = HashMap::from([
            (chain_key(0, "(0,0)"), 0.2),
            (chain_key(0, "(1,0)"), 0.5),
            (chain_key(0, "(0,1)"), 0.3),
        ]);
        assert!(matches!(reduce_to_chain_poset(&comp, &bad), Err(Error::OrderViolation(_, _))));
    }

    #[test]
    fn embeddings() {
        let rows = IrreducibleIdeal::new(2, MultiDiagram::new(1, vec![vec![0], vec![1]]).unwrap()).unwrap();
        let chains = chains_of(&rows).unwrap();
        let word = crate::lattice_words::parse_word(&chains, "(0) (0) (1)").unwrap();
        let path = tableau_embed(&rows, &chains, &word).unwrap();
        let rowlens: Vec<Vec<u32>> = path.iter().map(|d| d.rows().unwrap()).collect();
        assert_eq!(rowlens, vec![vec![1], vec![2], vec![2, 1]]);
        assert_eq!(pullback_path(&rows, &chains, &path).unwrap(), word);
        assert_eq!(tableau_embed(&rows, &chains, &word[..1]).unwrap()[0].cells, BTreeSet::from([pt(&[0, 0])]));

        let v = MultiDiagram::new(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let comp = IrreducibleIdeal::new(3, v).unwrap();
        let chains = chains_of(&comp).unwrap();
        let word = crate::lattice_words::parse_word(&chains, "(0,0) (1,0)").unwrap();
        let path = tableau_embed(&comp, &chains, &word).unwrap();
        assert_eq!(path[1].cells, BTreeSet::from([pt(&[0, 0, 0]), pt(&[1, 0, 0])]));
        assert!(grid_provider(3).unwrap().is_ideal(&path[1]));
        let bad = crate::lattice_words::parse_word(&chains, "(1,0)").unwrap();
        assert!(matches!(tableau_embed(&comp, &chains, &bad), Err(Error::NotLattice(_))));
    }
}
