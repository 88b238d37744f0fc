//! The graded graph of finite ideals: successors, levels, exact path counts
//! and the uniform-conditional check used to test centrality.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::poset::{FiniteIdeal, Poset, Relation};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;
pub const DEFAULT_MEMO_CAP: usize = 10_000_000;

/// Access to a (possibly infinite) poset through its finite ideals.
///
/// `addable` must return the minimal elements of the complement of an ideal in
/// canonical order; it is finite for every finite ideal.
pub trait PosetProvider {
    type Element: Clone + Ord + fmt::Debug;
    type Ideal: Clone + Eq + Hash + fmt::Debug;

    fn empty(&self) -> Self::Ideal;
    fn ideal_size(&self, ideal: &Self::Ideal) -> usize;
    fn addable(&self, ideal: &Self::Ideal) -> Vec<Self::Element>;
    /// Maximal elements of the ideal.
    fn removable(&self, ideal: &Self::Ideal) -> Vec<Self::Element>;
    fn insert(&self, ideal: &Self::Ideal, x: &Self::Element) -> Self::Ideal;
    fn remove(&self, ideal: &Self::Ideal, x: &Self::Element) -> Self::Ideal;
    fn compare(&self, a: &Self::Element, b: &Self::Element) -> Relation;
    /// Canonical text form of an ideal, used as vertex identity in exports.
    fn vertex_id(&self, ideal: &Self::Ideal) -> String;
}

impl PosetProvider for Poset {
    type Element = usize;
    type Ideal = FiniteIdeal;

    fn empty(&self) -> FiniteIdeal {
        FiniteIdeal::EMPTY
    }

    fn ideal_size(&self, ideal: &FiniteIdeal) -> usize {
        ideal.len()
    }

    fn addable(&self, ideal: &FiniteIdeal) -> Vec<usize> {
        let add = Poset::addable(self, ideal.mask());
        self.lex_order().iter().copied().filter(|&i| add & (1 << i) != 0).collect()
    }

    fn removable(&self, ideal: &FiniteIdeal) -> Vec<usize> {
        let rem = Poset::removable(self, ideal.mask());
        self.lex_order().iter().copied().filter(|&i| rem & (1 << i) != 0).collect()
    }

    fn insert(&self, ideal: &FiniteIdeal, x: &usize) -> FiniteIdeal {
        FiniteIdeal::from_mask_unchecked(ideal.mask() | (1 << x))
    }

    fn remove(&self, ideal: &FiniteIdeal, x: &usize) -> FiniteIdeal {
        FiniteIdeal::from_mask_unchecked(ideal.mask() & !(1 << x))
    }

    fn compare(&self, a: &usize, b: &usize) -> Relation {
        Poset::compare(self, *a, *b)
    }

    fn vertex_id(&self, ideal: &FiniteIdeal) -> String {
        format!("{{{}}}", ideal.members(self).join(","))
    }
}

/// All one-element extensions of `ideal`, in canonical order.
pub fn successors<P: PosetProvider>(provider: &P, ideal: &P::Ideal) -> Vec<P::Ideal> {
    provider.addable(ideal).iter().map(|x| provider.insert(ideal, x)).collect()
}

/// Levels `0..=depth` of the ideal graph, with edges between consecutive levels.
#[derive(Debug, Clone)]
pub struct GradedGraph<I> {
    pub levels: Vec<Vec<I>>,
    /// `edges[n]` joins vertex indices of level `n` to level `n + 1`.
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl<I> GradedGraph<I> {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Number of paths from the root to every vertex, by forward propagation.
    pub fn forward_path_counts(&self) -> Vec<Vec<BigUint>> {
        let mut out: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for (n, edges) in self.edges.iter().enumerate() {
            let mut next = vec![BigUint::zero(); self.levels[n + 1].len()];
            for &(u, v) in edges {
                next[v] += &out[n][u];
            }
            out.push(next);
        }
        out
    }
}

pub fn build_levels<P: PosetProvider>(provider: &P, depth: usize) -> Result<GradedGraph<P::Ideal>> {
    build_levels_capped(provider, depth, DEFAULT_VERTEX_CAP)
}

/// Breadth-first construction; vertices are deduplicated by ideal equality.
pub fn build_levels_capped<P: PosetProvider>(
    provider: &P,
    depth: usize,
    vertex_cap: usize,
) -> Result<GradedGraph<P::Ideal>> {
    let mut levels = vec![vec![provider.empty()]];
    let mut edges = Vec::new();
    let mut total = 1usize;
    for _ in 0..depth {
        let current = levels.last().expect("level 0 exists");
        let mut index: HashMap<P::Ideal, usize> = HashMap::new();
        let mut next = Vec::new();
        let mut level_edges = Vec::new();
        for (u, ideal) in current.iter().enumerate() {
            for succ in successors(provider, ideal) {
                let v = match index.get(&succ) {
                    Some(&v) => v,
                    None => {
                        total += 1;
                        if total > vertex_cap {
                            return Err(Error::ResourceBound(format!("more than {vertex_cap} vertices")));
                        }
                        index.insert(succ.clone(), next.len());
                        next.push(succ);
                        next.len() - 1
                    }
                };
                level_edges.push((u, v));
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
        edges.push(level_edges);
    }
    Ok(GradedGraph { levels, edges })
}

/// Edge-list export: one `level n: <u> -> <v>` line per edge.
pub fn export_edge_list<P: PosetProvider>(provider: &P, graph: &GradedGraph<P::Ideal>) -> String {
    let mut out = String::new();
    for (n, edges) in graph.edges.iter().enumerate() {
        for &(u, v) in edges {
            let _ = writeln!(
                out,
                "level {n}: {} -> {}",
                provider.vertex_id(&graph.levels[n][u]),
                provider.vertex_id(&graph.levels[n + 1][v])
            );
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexExport {
    pub level: usize,
    pub id: String,
    pub paths: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphExport {
    pub level_sizes: Vec<usize>,
    pub vertices: Vec<VertexExport>,
    pub edges: Vec<(String, String)>,
}

/// JSON-ready export with vertex identities and path counts.
pub fn export_json<P: PosetProvider>(provider: &P, graph: &GradedGraph<P::Ideal>) -> GraphExport {
    let counts = graph.forward_path_counts();
    let vertices = graph
        .levels
        .iter()
        .enumerate()
        .flat_map(|(n, level)| {
            let counts = &counts[n];
            level.iter().enumerate().map(move |(i, v)| VertexExport {
                level: n,
                id: provider.vertex_id(v),
                paths: counts[i].to_string(),
            })
        })
        .collect();
    let edges = graph
        .edges
        .iter()
        .enumerate()
        .flat_map(|(n, e)| {
            e.iter().map(move |&(u, v)| {
                (provider.vertex_id(&graph.levels[n][u]), provider.vertex_id(&graph.levels[n + 1][v]))
            })
        })
        .collect();
    GraphExport { level_sizes: graph.level_sizes(), vertices, edges }
}

/// Memoized path counting from the empty ideal.
///
/// The memo lives in the counter; share one counter per worker.
pub struct PathCounter<'a, P: PosetProvider> {
    provider: &'a P,
    memo: HashMap<P::Ideal, BigUint>,
    memo_cap: usize,
}

impl<'a, P: PosetProvider> PathCounter<'a, P> {
    pub fn new(provider: &'a P) -> Self {
        Self::with_cap(provider, DEFAULT_MEMO_CAP)
    }

    pub fn with_cap(provider: &'a P, memo_cap: usize) -> Self {
        PathCounter { provider, memo: HashMap::new(), memo_cap }
    }

    /// `dim(I) = Σ dim(I ∖ {m})` over maximal elements `m` of `I`.
    pub fn count(&mut self, ideal: &P::Ideal) -> Result<BigUint> {
        if self.provider.ideal_size(ideal) == 0 {
            return Ok(BigUint::one());
        }
        if let Some(c) = self.memo.get(ideal) {
            return Ok(c.clone());
        }
        let mut total = BigUint::zero();
        for m in self.provider.removable(ideal) {
            let smaller = self.provider.remove(ideal, &m);
            total += self.count(&smaller)?;
        }
        if self.memo.len() >= self.memo_cap {
            return Err(Error::ResourceBound(format!("more than {} memo entries", self.memo_cap)));
        }
        self.memo.insert(ideal.clone(), total.clone());
        Ok(total)
    }
}

pub fn count_paths<P: PosetProvider>(provider: &P, ideal: &P::Ideal) -> Result<BigUint> {
    PathCounter::new(provider).count(ideal)
}

/// `n!` over the product of hook lengths of a Young diagram.
pub fn hook_length_count(rows: &[usize]) -> Result<BigUint> {
    if rows.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidDiagram(format!("{rows:?} is not weakly decreasing")));
    }
    let rows: Vec<usize> = rows.iter().copied().filter(|&r| r > 0).collect();
    let n: usize = rows.iter().sum();
    let col_len = |j: usize| rows.iter().take_while(|&&r| r > j).count();
    let mut hooks = BigUint::one();
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..r {
            hooks *= BigUint::from((r - j - 1) + (col_len(j) - i - 1) + 1);
        }
    }
    let fact = (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k));
    Ok(fact / hooks)
}

/// All paths from the empty ideal to `vertex`, each listed without the
/// empty ideal and ending at `vertex`.
pub fn paths_to<P: PosetProvider>(provider: &P, vertex: &P::Ideal, cap: usize) -> Result<Vec<Vec<P::Ideal>>> {
    let mut out = Vec::new();
    let mut stack = vec![vertex.clone()];
    collect_paths(provider, &mut stack, &mut out, cap)?;
    Ok(out)
}

fn collect_paths<P: PosetProvider>(
    provider: &P,
    stack: &mut Vec<P::Ideal>,
    out: &mut Vec<Vec<P::Ideal>>,
    cap: usize,
) -> Result<()> {
    let top = stack.last().expect("nonempty stack").clone();
    if provider.ideal_size(&top) == 0 {
        if out.len() >= cap {
            return Err(Error::ResourceBound(format!("more than {cap} paths")));
        }
        out.push(stack[..stack.len() - 1].iter().rev().cloned().collect());
        return Ok(());
    }
    for m in provider.removable(&top) {
        stack.push(provider.remove(&top, &m));
        collect_paths(provider, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub vertex: String,
    pub path_count: usize,
    /// Smallest and largest path probability brackets seen (by midpoint).
    pub min_bracket: Bracket,
    pub max_bracket: Bracket,
    /// Largest lower end and smallest upper end across all paths.
    pub max_lower: f64,
    pub min_upper: f64,
    /// True when all brackets pairwise overlap.
    pub uniform_not_refuted: bool,
}

/// Checks that a path measure is uniform on the paths into `vertex`.
///
/// Brackets pairwise overlap exactly when the largest lower end does not
/// exceed the smallest upper end.
pub fn check_uniform_conditional<P, F>(provider: &P, vertex: &P::Ideal, prob: F, cap: usize) -> Result<UniformityReport>
where
    P: PosetProvider,
    F: Fn(&[P::Ideal]) -> Result<Bracket>,
{
    let paths = paths_to(provider, vertex, cap)?;
    let brackets = paths.iter().map(|p| prob(p)).collect::<Result<Vec<_>>>()?;
    let by_mid = |a: &&Bracket, b: &&Bracket| a.mid().total_cmp(&b.mid());
    let min_bracket = *brackets.iter().min_by(by_mid).expect("at least one path");
    let max_bracket = *brackets.iter().max_by(by_mid).expect("at least one path");
    let max_lower = brackets.iter().map(|b| b.lo).fold(f64::NEG_INFINITY, f64::max);
    let min_upper = brackets.iter().map(|b| b.hi).fold(f64::INFINITY, f64::min);
    Ok(UniformityReport {
        vertex: provider.vertex_id(vertex),
        path_count: paths.len(),
        min_bracket,
        max_bracket,
        max_lower,
        min_upper,
        uniform_not_refuted: max_lower <= min_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hook_lengths() {
        assert_eq!(hook_length_count(&[1]).unwrap(), BigUint::from(1u32));
        assert_eq!(hook_length_count(&[2, 2]).unwrap(), BigUint::from(2u32));
        assert_eq!(hook_length_count(&[4]).unwrap(), BigUint::from(1u32));
        assert_eq!(hook_length_count(&[2, 1]).unwrap(), BigUint::from(2u32));
        assert_eq!(hook_length_count(&[3, 2]).unwrap(), BigUint::from(5u32));
        assert_eq!(hook_length_count(&[]).unwrap(), BigUint::from(1u32));
        assert!(hook_length_count(&[1, 2]).is_err());
    }

    #[test]
    fn two_chain_graph() {
        let p = Poset::chain(&["a", "b"]).unwrap();
        let g = build_levels(&p, 2).unwrap();
        assert_eq!(g.level_sizes(), vec![1, 1, 1]);
        let b = p.ideal(&["b"]).unwrap();
        let succ = successors(&p, &b);
        assert_eq!(succ, vec![p.full_ideal()]);
        assert_eq!(p.vertex_id(&succ[0]), "{a,b}");
    }

    #[test]
    fn resource_bound() {
        let p = Poset::antichain(&["a", "b", "c", "d"]).unwrap();
        assert!(matches!(build_levels_capped(&p, 4, 5), Err(Error::ResourceBound(_))));
        let mut counter = PathCounter::with_cap(&p, 2);
        assert!(matches!(counter.count(&p.full_ideal()), Err(Error::ResourceBound(_))));
    }

    #[test]
    fn edge_list_format() {
        let p = Poset::chain(&["a", "b"]).unwrap();
        let g = build_levels(&p, 2).unwrap();
        assert_eq!(export_edge_list(&p, &g), "level 0: {} -> {b}\nlevel 1: {b} -> {a,b}\n");
        let json = export_json(&p, &g);
        assert_eq!(json.vertices.len(), 3);
        assert_eq!(json.vertices[2].paths, "1");
    }
}
