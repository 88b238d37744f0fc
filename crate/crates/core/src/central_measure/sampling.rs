//! Transition kernels, exact cylinder probabilities and the two samplers of
//! the restricted Bernoulli measure.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::lattice_words::{is_lattice, render_word, Convention, CountVector};
use crate::poset::{Poset, Spectrum};

use super::survival::{SurvivalConfig, SurvivalSolver};

/// Words per randomness stream; fixed so results do not depend on threads.
pub const CHUNK: usize = 1024;

/// Independent generator number `stream` derived from one seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Next-letter probabilities from one state.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionRow {
    pub state: CountVector,
    /// Indexed like the poset elements; invalid letters are exactly zero.
    pub probs: Vec<Bracket>,
}

impl TransitionRow {
    pub fn max_width(&self) -> f64 {
        self.probs.iter().map(Bracket::width).fold(0.0, f64::max)
    }

    /// Bracket sums of the valid letters.
    pub fn total(&self) -> Bracket {
        self.probs.iter().copied().sum()
    }
}

impl SurvivalSolver {
    /// `P(p | state) = λ_p h(state + e_p) / h(state)`.
    pub fn transition_row(&self, state: &CountVector) -> Result<TransitionRow> {
        let spectrum = self.spectrum();
        let poset = spectrum.poset();
        if !state.is_monotone(poset) {
            return Err(Error::NotLattice(state.label(poset)));
        }
        let here = self.bracket(state);
        if here.lo <= 0.0 {
            return Err(Error::VanishingSurvival(state.label(poset)));
        }
        let mut probs = vec![Bracket::ZERO; poset.len()];
        let mut valid = Vec::new();
        for (p, prob) in probs.iter_mut().enumerate() {
            let next = state.plus(p);
            if next.is_monotone(poset) {
                *prob = (self.bracket(&next).scale(spectrum.freqs()[p]) / here).clamp_unit();
                valid.push(p);
            }
        }
        if let [only] = valid[..] {
            probs[only] = Bracket::ONE;
        } else {
            let lo_sum: f64 = valid.iter().map(|&p| probs[p].lo).sum();
            for &p in &valid {
                let cap = (1.0 - (lo_sum - probs[p].lo)) * (1.0 + 16.0 * f64::EPSILON);
                probs[p].hi = probs[p].hi.min(cap).max(probs[p].lo);
            }
        }
        Ok(TransitionRow { state: state.clone(), probs })
    }

    /// `μ_Λ` of the cylinder of a weak lattice word:
    /// `Π λ^{content} · h(content) / h(0)`.
    ///
    /// Depends on the word only through its content.
    pub fn cylinder_probability(&self, letters: &[usize]) -> Result<Bracket> {
        let poset = self.spectrum().poset();
        if !is_lattice(letters, poset, Convention::Weak)? {
            return Err(Error::NotLattice(render_word(poset, letters)));
        }
        self.content_word_probability(&CountVector::of_word(poset, letters))
    }

    /// Probability of any single lattice word with the given content.
    pub fn content_word_probability(&self, content: &CountVector) -> Result<Bracket> {
        let spectrum = self.spectrum();
        let poset = spectrum.poset();
        let start = self.bracket(&CountVector::zero(poset));
        if start.lo <= 0.0 {
            return Err(Error::VanishingSurvival(CountVector::zero(poset).label(poset)));
        }
        let weight: f64 = content.0.iter().zip(spectrum.freqs()).map(|(&c, &l)| l.powi(c as i32)).product();
        Ok(self.bracket(content).scale(weight) / start)
    }
}

pub fn transition_row(state: &CountVector, spectrum: &Spectrum, target_width: f64) -> Result<TransitionRow> {
    SurvivalSolver::new(spectrum, &SurvivalConfig::with_width(target_width))?.transition_row(state)
}

pub fn cylinder_probability(letters: &[usize], spectrum: &Spectrum, target_width: f64) -> Result<Bracket> {
    SurvivalSolver::new(spectrum, &SurvivalConfig::with_width(target_width))?.cylinder_probability(letters)
}

fn pick<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Rejection,
    Htransform,
    Greedy,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rejection" => Ok(SamplerKind::Rejection),
            "htransform" => Ok(SamplerKind::Htransform),
            other => Err(Error::InvalidInput(format!("unknown sampler `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralSampleReport {
    pub sampler: SamplerKind,
    pub seed: u64,
    pub n: usize,
    pub words: Vec<Vec<usize>>,
    /// Draws attempted (rejection) or words produced.
    pub attempts: u64,
    pub accept_rate: f64,
    /// Hoeffding tail bound on failure after the guard horizon (rejection only).
    pub tail_bound: Option<f64>,
    /// Per-step maximum transition bracket width (h-transform only).
    pub bracket_widths: Vec<f64>,
}

/// Markov sampler driven by the Doob transform of the survival function.
pub struct HTransformSampler<'a> {
    solver: &'a SurvivalSolver,
}

impl<'a> HTransformSampler<'a> {
    pub fn new(solver: &'a SurvivalSolver) -> Self {
        HTransformSampler { solver }
    }

    /// One word of length `n`; step widths are folded into `widths`.
    pub fn sample_word<R: Rng>(&self, n: usize, rng: &mut R, widths: &mut [f64]) -> Result<Vec<usize>> {
        let poset = self.solver.spectrum().poset();
        let mut state = CountVector::zero(poset);
        let mut word = Vec::with_capacity(n);
        let mut mids = vec![0.0; poset.len()];
        for width in widths.iter_mut().take(n) {
            let row = self.solver.transition_row(&state)?;
            *width = width.max(row.max_width());
            for (m, b) in mids.iter_mut().zip(&row.probs) {
                *m = b.mid();
            }
            let x = pick(rng, &mids);
            state.0[x] += 1;
            word.push(x);
        }
        Ok(word)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelConfig {
    /// Largest transition bracket width the sampler accepts.
    pub kernel_tolerance: f64,
    pub max_horizon: u32,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { kernel_tolerance: 1e-6, max_horizon: SurvivalConfig::default().max_horizon }
    }
}

/// Builds a solver whose transition brackets stay below `kernel_tolerance`.
///
/// Survival is smallest at zero gaps, so a survival width of
/// `tol · h(0) / 4` bounds every ratio bracket by about `tol / 2`.
pub fn kernel_solver(spectrum: &Spectrum, config: &KernelConfig) -> Result<SurvivalSolver> {
    let survival = |width: f64| SurvivalConfig { max_horizon: config.max_horizon, ..SurvivalConfig::with_width(width) };
    let coarse = SurvivalSolver::new(spectrum, &survival(1e-2))?;
    let h0 = coarse.bracket(&CountVector::zero(spectrum.poset())).lo;
    if h0 <= 0.0 {
        return Err(Error::VanishingSurvival(CountVector::zero(spectrum.poset()).label(spectrum.poset())));
    }
    SurvivalSolver::new(spectrum, &survival(config.kernel_tolerance * h0 / 4.0))
}

/// `samples` words of length `n` from the h-transform kernel.
pub fn sample_central_htransform(
    solver: &SurvivalSolver,
    n: usize,
    samples: usize,
    seed: u64,
    config: &KernelConfig,
) -> Result<CentralSampleReport> {
    let sampler = HTransformSampler::new(solver);
    let chunks: Vec<(Vec<Vec<usize>>, Vec<f64>)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, chunk as u64);
            let count = CHUNK.min(samples - chunk * CHUNK);
            let mut widths = vec![0.0; n];
            let words = (0..count).map(|_| sampler.sample_word(n, &mut rng, &mut widths)).collect::<Result<Vec<_>>>()?;
            Ok((words, widths))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut words = Vec::with_capacity(samples);
    let mut widths = vec![0.0f64; n];
    for (w, cw) in chunks {
        words.extend(w);
        for (a, b) in widths.iter_mut().zip(cw) {
            *a = a.max(b);
        }
    }
    if let Some(&worst) = widths.iter().max_by(|a, b| a.total_cmp(b)) {
        if worst > config.kernel_tolerance {
            return Err(Error::HorizonCap(format!(
                "transition width {worst:e} above kernel tolerance {:e}",
                config.kernel_tolerance
            )));
        }
    }
    Ok(CentralSampleReport {
        sampler: SamplerKind::Htransform,
        seed,
        n,
        words,
        attempts: samples as u64,
        accept_rate: 1.0,
        tail_bound: None,
        bracket_widths: widths,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct RejectionConfig {
    pub guard: usize,
    pub acceptance_floor: f64,
}

impl Default for RejectionConfig {
    fn default() -> Self {
        RejectionConfig { guard: 200, acceptance_floor: 1e-3 }
    }
}

/// Hoeffding tail `Σ exp(−G g²/2) / (1 − exp(−g²/2))` over covers: bounds the
/// probability that a word surviving `G` more letters fails later.
pub fn hoeffding_tail(spectrum: &Spectrum, guard: usize) -> f64 {
    let poset = spectrum.poset();
    poset
        .covers()
        .iter()
        .map(|&(a, b)| {
            let g = spectrum.freqs()[a] - spectrum.freqs()[b];
            let q = (-g * g / 2.0).exp();
            q.powi(guard as i32) / (1.0 - q)
        })
        .sum::<f64>()
        .min(1.0)
}

/// Draws one i.i.d. word of length `len`, stopping at the first violation.
fn draw_lattice<R: Rng>(poset: &Poset, dist: &WeightedIndex<f64>, len: usize, rng: &mut R, out: &mut Vec<usize>) -> bool {
    out.clear();
    let mut counts = vec![0u32; poset.len()];
    for _ in 0..len {
        let x = dist.sample(rng);
        if poset.covers().iter().any(|&(a, b)| b == x && counts[a] <= counts[b]) {
            return false;
        }
        counts[x] += 1;
        out.push(x);
    }
    true
}

/// Counts how many of `draws` i.i.d. words of length `len` are lattice words.
pub fn rejection_acceptance(spectrum: &Spectrum, len: usize, draws: u64, seed: u64) -> Result<u64> {
    let dist = WeightedIndex::new(spectrum.freqs()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let poset = spectrum.poset();
    let chunk = CHUNK as u64 * 16;
    let accepted: u64 = (0..draws.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut buf = Vec::with_capacity(len);
            let count = chunk.min(draws - c * chunk);
            (0..count).filter(|_| draw_lattice(poset, &dist, len, &mut rng, &mut buf)).count() as u64
        })
        .sum();
    Ok(accepted)
}

/// Accepted i.i.d. words of length `n + guard`, truncated to `n`.
pub fn sample_central_rejection(
    spectrum: &Spectrum,
    n: usize,
    samples: usize,
    seed: u64,
    config: &RejectionConfig,
) -> Result<CentralSampleReport> {
    let dist = WeightedIndex::new(spectrum.freqs()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let poset = spectrum.poset();
    let len = n + config.guard;
    let floor = config.acceptance_floor;
    let chunks: Vec<(Vec<Vec<usize>>, u64)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, chunk as u64);
            let want = CHUNK.min(samples - chunk * CHUNK);
            let budget = ((want as f64 / floor) * 2.0) as u64 + 1000;
            let mut words = Vec::with_capacity(want);
            let mut buf = Vec::with_capacity(len);
            let mut attempts = 0u64;
            while words.len() < want {
                if attempts >= budget {
                    let rate = words.len() as f64 / attempts as f64;
                    return Err(Error::AcceptanceTooLow { rate, floor });
                }
                attempts += 1;
                if draw_lattice(poset, &dist, len, &mut rng, &mut buf) {
                    words.push(buf[..n].to_vec());
                }
            }
            Ok((words, attempts))
        })
        .collect::<Result<Vec<_>>>()?;
    let attempts: u64 = chunks.iter().map(|c| c.1).sum();
    let words: Vec<Vec<usize>> = chunks.into_iter().flat_map(|c| c.0).collect();
    let accept_rate = if attempts == 0 { 1.0 } else { words.len() as f64 / attempts as f64 };
    if accept_rate < floor {
        return Err(Error::AcceptanceTooLow { rate: accept_rate, floor });
    }
    Ok(CentralSampleReport {
        sampler: SamplerKind::Rejection,
        seed,
        n,
        words,
        attempts,
        accept_rate,
        tail_bound: Some(hoeffding_tail(spectrum, config.guard)),
        bracket_widths: Vec::new(),
    })
}

/// A deliberately non-central kernel: the highest-frequency valid letter is
/// taken with probability `bias`, the other valid letters share the rest.
#[derive(Debug, Clone)]
pub struct GreedyKernel {
    spectrum: Spectrum,
    bias: f64,
}

impl GreedyKernel {
    pub fn new(spectrum: &Spectrum, bias: f64) -> Self {
        GreedyKernel { spectrum: spectrum.clone(), bias }
    }

    pub fn row(&self, state: &CountVector) -> Vec<f64> {
        let poset = self.spectrum.poset();
        let valid: Vec<usize> = (0..poset.len()).filter(|&p| state.plus(p).is_monotone(poset)).collect();
        let mut probs = vec![0.0; poset.len()];
        let Some(&top) = valid.iter().max_by(|&&a, &&b| self.spectrum.freqs()[a].total_cmp(&self.spectrum.freqs()[b]))
        else {
            return probs;
        };
        if valid.len() == 1 {
            probs[top] = 1.0;
            return probs;
        }
        let rest = (1.0 - self.bias) / (valid.len() - 1) as f64;
        for &p in &valid {
            probs[p] = if p == top { self.bias } else { rest };
        }
        probs
    }

    pub fn word_probability(&self, letters: &[usize]) -> Bracket {
        let poset = self.spectrum.poset();
        let mut state = CountVector::zero(poset);
        let mut prob = Bracket::ONE;
        for &x in letters {
            prob = prob * Bracket::around(self.row(&state)[x]);
            state.0[x] += 1;
        }
        prob
    }

    pub fn sample(&self, n: usize, samples: usize, seed: u64) -> CentralSampleReport {
        let poset = self.spectrum.poset();
        let words: Vec<Vec<usize>> = (0..samples.div_ceil(CHUNK))
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let mut rng = stream_rng(seed, chunk as u64);
                let count = CHUNK.min(samples - chunk * CHUNK);
                (0..count)
                    .map(|_| {
                        let mut state = CountVector::zero(poset);
                        (0..n)
                            .map(|_| {
                                let x = pick(&mut rng, &self.row(&state));
                                state.0[x] += 1;
                                x
                            })
                            .collect()
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        CentralSampleReport {
            sampler: SamplerKind::Greedy,
            seed,
            n,
            words,
            attempts: samples as u64,
            accept_rate: 1.0,
            tail_bound: None,
            bracket_widths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyEstimate {
    pub element: String,
    pub estimate: f64,
    /// Binomial 3σ radius.
    pub radius: f64,
}

/// Pooled letter frequencies with binomial 3σ radii.
pub fn estimate_spectrum(poset: &Poset, words: &[Vec<usize>]) -> Result<Vec<FrequencyEstimate>> {
    let total: usize = words.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(Error::InvalidInput("no letters to estimate from".into()));
    }
    let mut counts = vec![0u64; poset.len()];
    for w in words {
        for &x in w {
            counts[x] += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let p = c as f64 / total as f64;
            FrequencyEstimate {
                element: poset.name(i).to_string(),
                estimate: p,
                radius: 3.0 * (p * (1.0 - p) / total as f64).sqrt(),
            }
        })
        .collect())
}
