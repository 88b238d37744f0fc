//! Centrality checks: exact bracket overlap over paths into each vertex and
//! chi-square uniformity of sampled orderings within content bins.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::Result;
use crate::ideal_graph::{check_uniform_conditional, UniformityReport};
use crate::interval::Bracket;
use crate::lattice_words::{enumerate_lattice_words, ChainBundle, Convention, CountVector};
use crate::poset::Spectrum;

use super::sampling::{
    kernel_solver, sample_central_htransform, sample_central_rejection, GreedyKernel, KernelConfig, RejectionConfig,
    SamplerKind,
};
use super::survival::SurvivalSolver;

/// p-value threshold for the uniformity tests.
pub const P_THRESHOLD: f64 = 1e-3;
/// Bins whose expected count per ordering falls below this are not tested.
pub const MIN_EXPECTED: f64 = 5.0;
pub const PATH_CAP: usize = 1_000_000;

/// Path measure under test: the central measure or the greedy control.
pub enum MeasureUnderTest<'a> {
    Central(&'a SurvivalSolver),
    Greedy(&'a GreedyKernel),
}

impl MeasureUnderTest<'_> {
    pub fn word_probability(&self, letters: &[usize]) -> Result<Bracket> {
        match self {
            MeasureUnderTest::Central(s) => s.cylinder_probability(letters),
            MeasureUnderTest::Greedy(g) => Ok(g.word_probability(letters)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiSquareResult {
    pub content: String,
    pub orderings: usize,
    pub observed: u64,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplerUniformity {
    pub sampler: SamplerKind,
    pub seed: u64,
    pub samples: usize,
    pub bins: Vec<ChiSquareResult>,
    /// Bins with a single ordering or too few expected counts.
    pub skipped_bins: usize,
    pub min_p_value: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralityReport {
    pub n: usize,
    pub exact: Vec<UniformityReport>,
    pub exact_pass: bool,
    pub statistical: Vec<SamplerUniformity>,
    pub statistical_pass: bool,
}

/// Lattice words of length `n` grouped by content, in enumeration order.
pub fn words_by_content(spectrum: &Spectrum, n: usize) -> Result<BTreeMap<CountVector, Vec<Vec<usize>>>> {
    let poset = spectrum.poset();
    let mut bins: BTreeMap<CountVector, Vec<Vec<usize>>> = BTreeMap::new();
    for w in enumerate_lattice_words(poset, n, Convention::Weak)? {
        bins.entry(CountVector::of_word(poset, &w)).or_default().push(w);
    }
    Ok(bins)
}

/// Overlap check of path probabilities into every vertex at level `n`.
pub fn exact_centrality(spectrum: &Spectrum, n: usize, measure: &MeasureUnderTest<'_>) -> Result<Vec<UniformityReport>> {
    let poset = spectrum.poset();
    let bundle = ChainBundle::new(poset);
    words_by_content(spectrum, n)?
        .keys()
        .map(|content| {
            check_uniform_conditional(
                &bundle,
                content,
                |path| {
                    let word = bundle.path_word(path).expect("graph paths step by one letter");
                    measure.word_probability(&word)
                },
                PATH_CAP,
            )
        })
        .collect()
}

/// Pearson chi-square against the uniform distribution over `counts`.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, usize, f64) {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k < 2 || total == 0 {
        return (0.0, 0, 1.0);
    }
    let expected = total as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    (stat, k - 1, dist.sf(stat))
}

/// Bins sampled words by content and tests uniformity over the orderings.
pub fn content_uniformity(
    spectrum: &Spectrum,
    sampler: SamplerKind,
    seed: u64,
    words: &[Vec<usize>],
    bins: &BTreeMap<CountVector, Vec<Vec<usize>>>,
) -> SamplerUniformity {
    let poset = spectrum.poset();
    let mut slot: HashMap<&[usize], (usize, usize)> = HashMap::new();
    for (b, (_, ws)) in bins.iter().enumerate() {
        for (i, w) in ws.iter().enumerate() {
            slot.insert(w.as_slice(), (b, i));
        }
    }
    let mut counts: Vec<Vec<u64>> = bins.values().map(|ws| vec![0; ws.len()]).collect();
    for w in words {
        if let Some(&(b, i)) = slot.get(w.as_slice()) {
            counts[b][i] += 1;
        }
    }
    let mut results = Vec::new();
    let mut skipped = 0;
    for ((content, ws), c) in bins.iter().zip(&counts) {
        let observed: u64 = c.iter().sum();
        if ws.len() < 2 || (observed as f64 / ws.len() as f64) < MIN_EXPECTED {
            skipped += 1;
            continue;
        }
        let (statistic, dof, p_value) = chi_square_uniform(c);
        results.push(ChiSquareResult {
            content: content.label(poset),
            orderings: ws.len(),
            observed,
            statistic,
            dof,
            p_value,
        });
    }
    let min_p = results.iter().map(|r| r.p_value).min_by(f64::total_cmp);
    SamplerUniformity {
        sampler,
        seed,
        samples: words.len(),
        pass: min_p.is_none_or(|p| p > P_THRESHOLD),
        bins: results,
        skipped_bins: skipped,
        min_p_value: min_p,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub rejection: RejectionConfig,
    pub kernel: KernelConfig,
    /// Replace the central measure by the greedy control with this bias.
    pub inject_greedy: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { rejection: RejectionConfig::default(), kernel: KernelConfig::default(), inject_greedy: None }
    }
}

/// Exact and statistical centrality at level `n`.
pub fn verify_centrality(
    spectrum: &Spectrum,
    n: usize,
    samples: usize,
    seed: u64,
    config: &VerifyConfig,
) -> Result<CentralityReport> {
    let bins = words_by_content(spectrum, n)?;
    let (exact, statistical) = match config.inject_greedy {
        Some(bias) => {
            let kernel = GreedyKernel::new(spectrum, bias);
            let exact = exact_centrality(spectrum, n, &MeasureUnderTest::Greedy(&kernel))?;
            let rep = kernel.sample(n, samples, seed);
            (exact, vec![content_uniformity(spectrum, SamplerKind::Greedy, seed, &rep.words, &bins)])
        }
        None => {
            let solver = kernel_solver(spectrum, &config.kernel)?;
            let exact = exact_centrality(spectrum, n, &MeasureUnderTest::Central(&solver))?;
            let rej = sample_central_rejection(spectrum, n, samples, seed, &config.rejection)?;
            let htr = sample_central_htransform(&solver, n, samples, seed.wrapping_add(1), &config.kernel)?;
            let stats = vec![
                content_uniformity(spectrum, SamplerKind::Rejection, rej.seed, &rej.words, &bins),
                content_uniformity(spectrum, SamplerKind::Htransform, htr.seed, &htr.words, &bins),
            ];
            (exact, stats)
        }
    };
    Ok(CentralityReport {
        n,
        exact_pass: exact.iter().all(|r| r.uniform_not_refuted),
        statistical_pass: statistical.iter().all(|s| s.pass),
        exact,
        statistical,
    })
}

/// Empirical distribution of words (or any keys), normalized.
pub fn empirical<K: Ord + Clone>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, f64> {
    let mut counts: BTreeMap<K, u64> = BTreeMap::new();
    let mut total = 0u64;
    for k in items {
        *counts.entry(k).or_default() += 1;
        total += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / total.max(1) as f64)).collect()
}

/// Total-variation distance between two finite distributions.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &a) in p {
        sum += (a - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &b) in q {
        if !p.contains_key(k) {
            sum += b;
        }
    }
    0.5 * sum
}

/// Half the sum of per-cell 3σ deviations of a difference of two
/// independent multinomial frequency vectors, from pooled frequencies.
pub fn tv_envelope<K: Ord>(p: &BTreeMap<K, f64>, n1: usize, q: &BTreeMap<K, f64>, n2: usize) -> f64 {
    let scale = 1.0 / n1 as f64 + 1.0 / n2 as f64;
    let pooled = |a: f64, b: f64| (a * n1 as f64 + b * n2 as f64) / (n1 + n2) as f64;
    let mut sum = 0.0;
    for (k, &a) in p {
        let m = pooled(a, q.get(k).copied().unwrap_or(0.0));
        sum += 3.0 * (m * (1.0 - m) * scale).sqrt();
    }
    for (k, &b) in q {
        if !p.contains_key(k) {
            let m = pooled(0.0, b);
            sum += 3.0 * (m * (1.0 - m) * scale).sqrt();
        }
    }
    0.5 * sum
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub length: usize,
    pub samples: usize,
    pub tv_distance: f64,
    pub envelope: f64,
    pub pass: bool,
}

/// Total variation between length-`len` word distributions of the two samplers.
pub fn sampler_agreement(
    spectrum: &Spectrum,
    len: usize,
    samples: usize,
    seed: u64,
    config: &VerifyConfig,
) -> Result<AgreementReport> {
    let solver = kernel_solver(spectrum, &config.kernel)?;
    let rej = sample_central_rejection(spectrum, len, samples, seed, &config.rejection)?;
    let htr = sample_central_htransform(&solver, len, samples, seed.wrapping_add(1), &config.kernel)?;
    let p = empirical(rej.words);
    let q = empirical(htr.words);
    let tv = total_variation(&p, &q);
    let envelope = tv_envelope(&p, samples, &q, samples);
    Ok(AgreementReport { length: len, samples, tv_distance: tv, envelope, pass: tv <= envelope })
}

/// Exact probability mass of all lattice words with a given content:
/// the number of lattice orderings times the probability of any one.
pub fn content_mass(solver: &SurvivalSolver, content: &CountVector, lattice_orderings: u64) -> Result<Bracket> {
    Ok(solver.content_word_probability(content)?.scale(lattice_orderings as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{spectrum_from_pairs, Poset};

    fn chain2() -> Spectrum {
        let p = Poset::chain(&["a", "b"]).unwrap();
        spectrum_from_pairs(&p, &[("a", 0.7), ("b", 0.3)]).unwrap()
    }

    #[test]
    fn chi_square_basics() {
        let (stat, dof, p) = chi_square_uniform(&[50, 50]);
        assert_eq!((stat, dof), (0.0, 1));
        assert!((p - 1.0).abs() < 1e-12);
        let (_, _, p) = chi_square_uniform(&[100, 0]);
        assert!(p < 1e-10);
    }

    #[test]
    fn tv_of_identical_is_zero() {
        let p = empirical(vec![1, 2, 2, 3]);
        assert_eq!(total_variation(&p, &p), 0.0);
        let q = empirical(vec![4]);
        assert_eq!(total_variation(&p, &q), 1.0);
    }

    #[test]
    fn exact_check_passes_for_central_and_fails_for_greedy() {
        let s = chain2();
        let solver = kernel_solver(&s, &KernelConfig::default()).unwrap();
        let reps = exact_centrality(&s, 3, &MeasureUnderTest::Central(&solver)).unwrap();
        assert!(reps.iter().all(|r| r.uniform_not_refuted));
        let g = GreedyKernel::new(&s, 0.8);
        let reps = exact_centrality(&s, 3, &MeasureUnderTest::Greedy(&g)).unwrap();
        assert!(reps.iter().any(|r| !r.uniform_not_refuted));
    }

    #[test]
    fn level_one_is_trivial() {
        let s = chain2();
        let rep = verify_centrality(&s, 1, 2000, 11, &VerifyConfig::default()).unwrap();
        assert!(rep.exact_pass && rep.statistical_pass);
        assert_eq!(rep.exact.len(), 1);
    }
}
