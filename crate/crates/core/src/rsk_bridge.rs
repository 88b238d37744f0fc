//! Row-insertion RSK and the comparison of RSK shape paths of Bernoulli words
//! with the restricted Bernoulli measure on the Young graph.
//!
//! Letters are `1..=k`; letter `i` stands for the chain element with the
//! `i`-th largest frequency, and row `i` of a shape counts that element.
//! The comparison is empirical: it reports distances, it does not assert that
//! the two path distributions coincide.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::central_measure::{
    empirical, kernel_solver, sample_central_htransform, stream_rng, total_variation, tv_envelope, KernelConfig, CHUNK,
};
use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::lattice_words::{enumerate_lattice_words_capped, Convention};
use crate::poset::Spectrum;

/// Sequence of partitions starting at the empty shape.
pub type ShapePath = Vec<Vec<u32>>;

pub const DEFAULT_MAX_N: usize = 8;
pub const ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TableauPair {
    pub p_tab: Vec<Vec<u32>>,
    pub q_tab: Vec<Vec<u32>>,
    pub shape_path: ShapePath,
}

impl TableauPair {
    pub fn shape(&self) -> Vec<u32> {
        self.p_tab.iter().map(|r| r.len() as u32).collect()
    }
}

/// Classical row insertion; records the shape after every letter.
pub fn rsk_insert(word: &[u32]) -> TableauPair {
    let mut p: Vec<Vec<u32>> = Vec::new();
    let mut q: Vec<Vec<u32>> = Vec::new();
    let mut path = vec![Vec::new()];
    for (step, &letter) in word.iter().enumerate() {
        let mut x = letter;
        let mut row = 0;
        loop {
            if row == p.len() {
                p.push(vec![x]);
                q.push(vec![step as u32 + 1]);
                break;
            }
            let r = &mut p[row];
            let pos = r.partition_point(|&y| y <= x);
            if pos == r.len() {
                r.push(x);
                q[row].push(step as u32 + 1);
                break;
            }
            x = std::mem::replace(&mut r[pos], x);
            row += 1;
        }
        path.push(p.iter().map(|r| r.len() as u32).collect());
    }
    TableauPair { p_tab: p, q_tab: q, shape_path: path }
}

/// Final shape only, without keeping the path.
pub fn rsk_shape(word: &[u32]) -> Vec<u32> {
    let mut p: Vec<Vec<u32>> = Vec::new();
    for &letter in word {
        let mut x = letter;
        let mut row = 0;
        loop {
            if row == p.len() {
                p.push(vec![x]);
                break;
            }
            let r = &mut p[row];
            let pos = r.partition_point(|&y| y <= x);
            if pos == r.len() {
                r.push(x);
                break;
            }
            x = std::mem::replace(&mut r[pos], x);
            row += 1;
        }
    }
    p.iter().map(|r| r.len() as u32).collect()
}

pub fn render_path(path: &[Vec<u32>]) -> String {
    path.iter()
        .map(|s| {
            if s.is_empty() {
                "∅".to_string()
            } else {
                let parts: Vec<String> = s.iter().map(u32::to_string).collect();
                format!("({})", parts.join(","))
            }
        })
        .collect::<Vec<_>>()
        .join(" > ")
}

/// Letter weights in alphabet order: letter `i + 1` has the `i`-th largest frequency.
fn letter_weights(spectrum: &Spectrum) -> Result<Vec<f64>> {
    if !spectrum.poset().is_chain() {
        return Err(Error::InvalidInput("the RSK comparison needs a chain poset".into()));
    }
    Ok(spectrum.by_decreasing_frequency().into_iter().map(|i| spectrum.freqs()[i]).collect())
}

/// Shape path of a lattice word over a chain: row `i` counts the `i`-th element from the top.
fn lattice_word_path(rank: &[usize], letters: &[usize]) -> ShapePath {
    let mut rows = vec![0u32; rank.len()];
    let mut path = vec![Vec::new()];
    for &x in letters {
        rows[rank[x]] += 1;
        path.push(rows.iter().copied().filter(|&r| r > 0).collect());
    }
    path
}

fn chain_ranks(spectrum: &Spectrum) -> Result<Vec<usize>> {
    let order = spectrum
        .poset()
        .chain_order()
        .ok_or_else(|| Error::InvalidInput("the RSK comparison needs a chain poset".into()))?;
    let mut rank = vec![0; order.len()];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    Ok(rank)
}

/// Shape-path counts of RSK applied to `samples` i.i.d. words of length `n`.
pub fn project_bernoulli(spectrum: &Spectrum, n: usize, samples: usize, seed: u64) -> Result<BTreeMap<ShapePath, u64>> {
    let weights = letter_weights(spectrum)?;
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let parts: Vec<BTreeMap<ShapePath, u64>> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, chunk as u64);
            let mut hist = BTreeMap::new();
            let mut word = vec![0u32; n];
            for _ in 0..CHUNK.min(samples - chunk * CHUNK) {
                for w in word.iter_mut() {
                    *w = dist.sample(&mut rng) as u32 + 1;
                }
                *hist.entry(rsk_insert(&word).shape_path).or_default() += 1;
            }
            hist
        })
        .collect();
    let mut total = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *total.entry(k).or_default() += c;
        }
    }
    Ok(total)
}

/// Exact RSK shape-path distribution by enumerating all `k^n` words.
pub fn exact_rsk_distribution(spectrum: &Spectrum, n: usize) -> Result<BTreeMap<ShapePath, f64>> {
    let weights = letter_weights(spectrum)?;
    let k = weights.len();
    let total = (k as u64).checked_pow(n as u32).filter(|&t| t <= ENUMERATION_CAP);
    let Some(total) = total else {
        return Err(Error::ResourceBound(format!("{k}^{n} words exceed the enumeration cap {ENUMERATION_CAP}")));
    };
    let mut dist = BTreeMap::new();
    let mut word = vec![0u32; n];
    for code in 0..total {
        let mut c = code;
        let mut p = 1.0;
        for w in word.iter_mut().rev() {
            let letter = (c % k as u64) as usize;
            c /= k as u64;
            *w = letter as u32 + 1;
            p *= weights[letter];
        }
        *dist.entry(rsk_insert(&word).shape_path).or_insert(0.0) += p;
    }
    Ok(dist)
}

/// Exact path brackets of the restricted Bernoulli measure at level `n`.
pub fn exact_central_distribution(
    spectrum: &Spectrum,
    n: usize,
    config: &KernelConfig,
) -> Result<BTreeMap<ShapePath, Bracket>> {
    let rank = chain_ranks(spectrum)?;
    let solver = kernel_solver(spectrum, config)?;
    let words = enumerate_lattice_words_capped(spectrum.poset(), n, Convention::Weak, ENUMERATION_CAP as usize)?;
    words
        .into_iter()
        .map(|w| Ok((lattice_word_path(&rank, &w), solver.cylinder_probability(&w)?)))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RskConfig {
    pub max_n: usize,
    pub kernel: KernelConfig,
}

impl Default for RskConfig {
    fn default() -> Self {
        RskConfig { max_n: DEFAULT_MAX_N, kernel: KernelConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathRow {
    pub path: String,
    pub rsk_count: u64,
    pub central_count: u64,
    pub rsk_exact: f64,
    pub central_exact: Bracket,
}

#[derive(Debug, Clone, Serialize)]
pub struct RskComparison {
    pub n: usize,
    pub samples: usize,
    pub rsk_seed: u64,
    pub central_seed: u64,
    pub tv_distance: f64,
    pub envelope: f64,
    pub pass: bool,
    /// Total variation between the exact distributions (bracket midpoints).
    pub exact_tv: f64,
    pub paths: Vec<PathRow>,
}

/// RSK paths of Bernoulli words against central paths, same spectrum on both sides.
pub fn compare_to_central(
    spectrum: &Spectrum,
    n: usize,
    samples: usize,
    seed: u64,
    config: &RskConfig,
) -> Result<RskComparison> {
    compare_spectra(spectrum, spectrum, n, samples, seed, config)
}

/// As [`compare_to_central`], with separate spectra for the RSK and central sides.
pub fn compare_spectra(
    rsk_spectrum: &Spectrum,
    central_spectrum: &Spectrum,
    n: usize,
    samples: usize,
    seed: u64,
    config: &RskConfig,
) -> Result<RskComparison> {
    if n > config.max_n {
        return Err(Error::ResourceBound(format!("n = {n} above the comparison cap {}", config.max_n)));
    }
    if rsk_spectrum.poset().len() != central_spectrum.poset().len() {
        return Err(Error::DimensionMismatch { expected: central_spectrum.poset().len(), got: rsk_spectrum.poset().len() });
    }
    let rsk_exact = exact_rsk_distribution(rsk_spectrum, n)?;
    let central_exact = exact_central_distribution(central_spectrum, n, &config.kernel)?;

    let rsk_seed = seed;
    let central_seed = seed.wrapping_add(1);
    let rsk_counts = project_bernoulli(rsk_spectrum, n, samples, rsk_seed)?;
    let rank = chain_ranks(central_spectrum)?;
    let solver = kernel_solver(central_spectrum, &config.kernel)?;
    let sample = sample_central_htransform(&solver, n, samples, central_seed, &config.kernel)?;
    let mut central_counts: BTreeMap<ShapePath, u64> = BTreeMap::new();
    for w in &sample.words {
        *central_counts.entry(lattice_word_path(&rank, w)).or_default() += 1;
    }

    let normalize = |m: &BTreeMap<ShapePath, u64>| -> BTreeMap<ShapePath, f64> {
        m.iter().map(|(k, &c)| (k.clone(), c as f64 / samples.max(1) as f64)).collect()
    };
    let p = normalize(&rsk_counts);
    let q = normalize(&central_counts);
    let tv = total_variation(&p, &q);
    let envelope = tv_envelope(&p, samples, &q, samples);

    let central_mid: BTreeMap<ShapePath, f64> = central_exact.iter().map(|(k, b)| (k.clone(), b.mid())).collect();
    let exact_tv = total_variation(&rsk_exact, &central_mid);

    let mut keys: Vec<&ShapePath> = rsk_exact.keys().chain(central_exact.keys()).collect();
    keys.sort();
    keys.dedup();
    let paths = keys
        .into_iter()
        .map(|k| PathRow {
            path: render_path(k),
            rsk_count: rsk_counts.get(k).copied().unwrap_or(0),
            central_count: central_counts.get(k).copied().unwrap_or(0),
            rsk_exact: rsk_exact.get(k).copied().unwrap_or(0.0),
            central_exact: central_exact.get(k).copied().unwrap_or(Bracket::point(0.0)),
        })
        .collect();

    Ok(RskComparison {
        n,
        samples,
        rsk_seed,
        central_seed,
        tv_distance: tv,
        envelope,
        pass: tv <= envelope,
        exact_tv,
        paths,
    })
}

/// Empirical distribution of final RSK shapes, mainly for diagnostics.
pub fn shape_distribution(paths: &BTreeMap<ShapePath, u64>) -> BTreeMap<Vec<u32>, f64> {
    empirical(paths.iter().flat_map(|(k, &c)| std::iter::repeat_n(k.last().cloned().unwrap_or_default(), c as usize)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{spectrum_from_pairs, Poset};

    fn spec(freqs: &[(&str, f64)]) -> Spectrum {
        let names: Vec<&str> = freqs.iter().map(|p| p.0).collect();
        spectrum_from_pairs(&Poset::chain(&names).unwrap(), freqs).unwrap()
    }

    #[test]
    fn insertion_examples() {
        let t = rsk_insert(&[1, 2]);
        assert_eq!(t.p_tab, vec![vec![1, 2]]);
        assert_eq!(t.shape_path, vec![vec![], vec![1], vec![2]]);
        let t = rsk_insert(&[2, 1]);
        assert_eq!(t.p_tab, vec![vec![1], vec![2]]);
        assert_eq!(t.q_tab, vec![vec![1], vec![2]]);
        assert_eq!(t.shape_path, vec![vec![], vec![1], vec![1, 1]]);
        assert_eq!(rsk_insert(&[]), TableauPair { shape_path: vec![vec![]], ..Default::default() });
        assert_eq!(rsk_shape(&[2, 1, 1, 2]), rsk_insert(&[2, 1, 1, 2]).shape());
    }

    #[test]
    fn exact_two_letter_paths() {
        let s = spec(&[("a", 0.7), ("b", 0.3)]);
        let rsk = exact_rsk_distribution(&s, 2).unwrap();
        assert!((rsk[&vec![vec![], vec![1], vec![2]]] - 0.79).abs() < 1e-12);
        assert!((rsk[&vec![vec![], vec![1], vec![1, 1]]] - 0.21).abs() < 1e-12);
        let central = exact_central_distribution(&s, 2, &KernelConfig::default()).unwrap();
        for (k, v) in &rsk {
            assert!(central[k].lo - 1e-9 <= *v && *v <= central[k].hi + 1e-9, "{k:?}");
        }
    }

    #[test]
    fn one_letter_alphabet_is_degenerate() {
        let s = spec(&[("a", 1.0)]);
        let r = compare_to_central(&s, 4, 2000, 3, &RskConfig::default()).unwrap();
        assert_eq!(r.paths.len(), 1);
        assert_eq!(r.tv_distance, 0.0);
    }

    #[test]
    fn above_cap_is_resource_error() {
        let s = spec(&[("a", 0.7), ("b", 0.3)]);
        let err = compare_to_central(&s, 9, 10, 0, &RskConfig::default()).unwrap_err();
        assert!(err.is_resource());
    }
}
