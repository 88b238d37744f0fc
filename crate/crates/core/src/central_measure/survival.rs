//! Certified enclosures of the survival function `h`.
//!
//! `h(c)` is the probability that an i.i.d.(Λ) continuation of a lattice word
//! with content `c` keeps the lattice property forever. It depends on `c` only
//! through the gaps `D = c_a − c_b` along the covers `a ≻ b`, and it is
//! nondecreasing in each gap: survival of cover `i` is the event
//! `min_t S_i(t) ≥ −D_i` for increments `S_i` fixed by the future letters.
//!
//! For a single cover the answer is the gambler's-ruin value
//! `1 − r^{D+1}` with `r = λ_b / λ_a`. For a set `T` of covers, and any
//! subset `E ⊆ T`,
//!
//! ```text
//! h_{T∖E}(D) − Σ_{i∈E} r_i^{D_i+1}  ≤  h_T(D)  ≤  h_{T∖E}(D)
//! ```
//!
//! which gives closed-form starting bounds and exact exit values for a box
//! `0 ≤ D_i ≤ horizon`. Inside the box the harmonic equation
//! `h(D) = Σ_p λ_p h(D + δ_p)` is iterated monotonically from both sides;
//! every iterate is a valid bracket, so stopping early only costs width.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Bracket;
use crate::lattice_words::CountVector;
use crate::poset::Spectrum;

/// Relative widening applied to every computed bound.
const SAFETY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalBracket {
    pub lower: f64,
    pub upper: f64,
    /// Gap cap of the value-iteration box that produced the bracket.
    pub horizon: u32,
}

impl SurvivalBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn as_bracket(&self) -> Bracket {
        Bracket::new(self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SurvivalConfig {
    pub target_width: f64,
    pub max_horizon: u32,
    /// Cap on states of any single value-iteration box.
    pub max_states: usize,
    pub max_sweeps: usize,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        SurvivalConfig { target_width: 1e-6, max_horizon: 4096, max_states: 1 << 21, max_sweeps: 200_000 }
    }
}

impl SurvivalConfig {
    pub fn with_width(target_width: f64) -> Self {
        SurvivalConfig { target_width, ..Default::default() }
    }
}

fn widen(lo: f64, hi: f64) -> Bracket {
    Bracket { lo: (lo * (1.0 - SAFETY)).max(0.0), hi: (hi * (1.0 + SAFETY)).min(1.0) }
}

/// Value-iteration table over the gap box of one cover subset.
#[derive(Debug, Clone)]
struct GapTable {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

enum Step {
    Internal(usize),
    Fixed(Bracket),
}

/// Survival brackets for every state of one spectrum.
///
/// Immutable after construction, so one solver can be shared across sampling
/// workers.
#[derive(Debug, Clone)]
pub struct SurvivalSolver {
    spectrum: Spectrum,
    ratios: Vec<f64>,
    horizon: u32,
    tables: HashMap<u64, GapTable>,
    max_table_width: f64,
}

impl SurvivalSolver {
    /// Picks the smallest horizon whose brackets are all narrower than
    /// `config.target_width`, doubling until `config.max_horizon`.
    pub fn new(spectrum: &Spectrum, config: &SurvivalConfig) -> Result<Self> {
        if !(config.target_width > 0.0) {
            return Err(Error::InvalidInput(format!("target width {} must be positive", config.target_width)));
        }
        let ratios = spectrum.cover_ratios();
        if ratios.iter().any(|&r| !(r < 1.0)) {
            let (a, b) = spectrum.poset().covers()[ratios.iter().position(|&r| !(r < 1.0)).unwrap()];
            return Err(Error::DegenerateSpectrum(spectrum.poset().name(a).into(), spectrum.poset().name(b).into()));
        }
        let covers = ratios.len();
        let r_max = ratios.iter().copied().fold(0.0, f64::max);
        // Exit widths are about `covers · r_max^{K+2}`; start where that is a
        // quarter of the target.
        let mut horizon = 1u32;
        if covers >= 2 {
            let need = (config.target_width / (4.0 * covers as f64)).ln() / r_max.ln() - 2.0;
            horizon = need.ceil().max(1.0) as u32;
        }
        loop {
            if horizon > config.max_horizon {
                return Err(Error::HorizonCap(format!(
                    "gap horizon {horizon} above cap {} for width {}",
                    config.max_horizon, config.target_width
                )));
            }
            let solver = Self::with_horizon(spectrum, horizon, config)?;
            if solver.max_table_width <= config.target_width {
                return Ok(solver);
            }
            horizon = horizon.saturating_mul(2);
        }
    }

    /// Builds the tables for a fixed gap horizon.
    pub fn with_horizon(spectrum: &Spectrum, horizon: u32, config: &SurvivalConfig) -> Result<Self> {
        let ratios = spectrum.cover_ratios();
        let covers = ratios.len();
        if covers > 16 {
            return Err(Error::HorizonCap(format!("{covers} covers is beyond the gap-box solver")));
        }
        let mut solver = SurvivalSolver {
            spectrum: spectrum.clone(),
            ratios,
            horizon,
            tables: HashMap::new(),
            max_table_width: 0.0,
        };
        let mut masks: Vec<u64> = (0..(1u64 << covers)).filter(|m| m.count_ones() >= 2).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in masks {
            let table = solver.build_table(mask, config)?;
            let width = table.lo.iter().zip(&table.hi).map(|(l, h)| h - l).fold(0.0, f64::max);
            solver.max_table_width = solver.max_table_width.max(width);
            solver.tables.insert(mask, table);
        }
        Ok(solver)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Widest bracket over all value-iteration states.
    pub fn max_table_width(&self) -> f64 {
        self.max_table_width
    }

    fn cover_tail(&self, cover: usize, gap: i64) -> f64 {
        self.ratios[cover].powi((gap + 1) as i32)
    }

    /// Bracket of `h_T` at gaps listed in the ascending cover order of `mask`.
    fn subset_bracket(&self, mask: u64, gaps: &[i64]) -> Bracket {
        if gaps.iter().any(|&g| g < 0) {
            return Bracket::ZERO;
        }
        let covers: Vec<usize> = mask_bits(mask).collect();
        match covers.len() {
            0 => Bracket::ONE,
            1 => {
                let v = 1.0 - self.cover_tail(covers[0], gaps[0]);
                widen(v, v)
            }
            _ => {
                let k = self.horizon as i64;
                let exceeded: u64 = covers
                    .iter()
                    .zip(gaps)
                    .filter(|(_, &g)| g > k)
                    .fold(0, |m, (&c, _)| m | (1 << c));
                if exceeded == 0 {
                    let table = &self.tables[&mask];
                    let idx = box_index(gaps, self.horizon);
                    return Bracket { lo: table.lo[idx], hi: table.hi[idx] };
                }
                let rest = mask & !exceeded;
                let rest_gaps: Vec<i64> =
                    covers.iter().zip(gaps).filter(|(c, _)| rest & (1 << **c) != 0).map(|(_, &g)| g).collect();
                let tail: f64 = covers
                    .iter()
                    .zip(gaps)
                    .filter(|(c, _)| exceeded & (1 << **c) != 0)
                    .map(|(&c, &g)| self.cover_tail(c, g))
                    .sum();
                let sub = self.subset_bracket(rest, &rest_gaps);
                widen((sub.lo - tail).max(0.0), sub.hi)
            }
        }
    }

    /// Starting bounds from dropping one cover at a time.
    fn initial_bounds(&self, mask: u64, gaps: &[i64]) -> (f64, f64) {
        let covers: Vec<usize> = mask_bits(mask).collect();
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for (i, &c) in covers.iter().enumerate() {
            let mut rest_gaps = gaps.to_vec();
            rest_gaps.remove(i);
            let sub = self.subset_bracket(mask & !(1 << c), &rest_gaps);
            lo = lo.max(sub.lo - self.cover_tail(c, gaps[i]));
            hi = hi.min(sub.hi);
        }
        let b = widen(lo.max(0.0), hi);
        (b.lo, b.hi)
    }

    fn build_table(&self, mask: u64, config: &SurvivalConfig) -> Result<GapTable> {
        let covers: Vec<usize> = mask_bits(mask).collect();
        let dims = covers.len();
        let side = self.horizon as usize + 1;
        let size = side
            .checked_pow(dims as u32)
            .filter(|&s| s <= config.max_states)
            .ok_or_else(|| Error::HorizonCap(format!("{side}^{dims} gap states above cap {}", config.max_states)))?;
        let poset = self.spectrum.poset();
        let all_covers = poset.covers();
        let deltas: Vec<(f64, Vec<i64>)> = (0..poset.len())
            .map(|p| {
                let delta = covers
                    .iter()
                    .map(|&c| {
                        let (a, b) = all_covers[c];
                        (p == a) as i64 - (p == b) as i64
                    })
                    .collect();
                (self.spectrum.freqs()[p], delta)
            })
            .collect();

        let mut lo = vec![0.0; size];
        let mut hi = vec![1.0; size];
        let mut internal: Vec<Vec<(f64, usize)>> = Vec::with_capacity(size);
        let mut fixed: Vec<(f64, f64, f64)> = Vec::with_capacity(size);
        let mut gaps = vec![0i64; dims];
        let mut next = vec![0i64; dims];
        for idx in 0..size {
            box_decode(idx, side, &mut gaps);
            let (l0, h0) = self.initial_bounds(mask, &gaps);
            lo[idx] = l0;
            hi[idx] = h0;
            let mut inner = Vec::new();
            let (mut self_w, mut f_lo, mut f_hi) = (0.0, 0.0, 0.0);
            for (w, delta) in &deltas {
                for d in 0..dims {
                    next[d] = gaps[d] + delta[d];
                }
                match self.classify(mask, &next) {
                    Some(Step::Internal(j)) if j == idx => self_w += w,
                    Some(Step::Internal(j)) => inner.push((*w, j)),
                    Some(Step::Fixed(b)) => {
                        f_lo += w * b.lo;
                        f_hi += w * b.hi;
                    }
                    None => {}
                }
            }
            internal.push(inner);
            fixed.push((self_w, f_lo, f_hi));
        }

        // Gauss–Seidel from large gaps down, where the drift carries mass.
        let round_lo = 1.0 - 64.0 * f64::EPSILON;
        let round_hi = 1.0 + 64.0 * f64::EPSILON;
        for _ in 0..config.max_sweeps {
            let mut change = 0.0f64;
            let mut width = 0.0f64;
            for idx in (0..size).rev() {
                let (self_w, f_lo, f_hi) = fixed[idx];
                let denom = 1.0 - self_w;
                let (mut s_lo, mut s_hi) = (f_lo, f_hi);
                for &(w, j) in &internal[idx] {
                    s_lo += w * lo[j];
                    s_hi += w * hi[j];
                }
                let new_lo = (s_lo / denom * round_lo).max(lo[idx]);
                let new_hi = (s_hi / denom * round_hi).min(hi[idx]);
                change = change.max(new_lo - lo[idx]).max(hi[idx] - new_hi);
                lo[idx] = new_lo;
                hi[idx] = new_hi;
                width = width.max(new_hi - new_lo);
            }
            if width <= 0.5 * config.target_width || change < 1e-16 {
                break;
            }
        }
        Ok(GapTable { lo, hi })
    }

    fn classify(&self, mask: u64, gaps: &[i64]) -> Option<Step> {
        if gaps.iter().any(|&g| g < 0) {
            None
        } else if gaps.iter().any(|&g| g > self.horizon as i64) {
            Some(Step::Fixed(self.subset_bracket(mask, gaps)))
        } else {
            Some(Step::Internal(box_index(gaps, self.horizon)))
        }
    }

    /// Bracket of `h` at a vector of gaps along all covers (in cover order).
    pub fn gaps_bracket(&self, gaps: &[i64]) -> Bracket {
        let full = if self.ratios.is_empty() { 0 } else { (1u64 << self.ratios.len()) - 1 };
        self.subset_bracket(full, gaps)
    }

    pub fn bracket(&self, state: &CountVector) -> Bracket {
        self.gaps_bracket(&state.cover_gaps(self.spectrum.poset()))
    }

    pub fn survival(&self, state: &CountVector) -> SurvivalBracket {
        let b = self.bracket(state);
        SurvivalBracket { lower: b.lo, upper: b.hi, horizon: self.horizon }
    }
}

fn mask_bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

fn box_index(gaps: &[i64], horizon: u32) -> usize {
    let side = horizon as usize + 1;
    gaps.iter().rev().fold(0, |acc, &g| acc * side + g as usize)
}

fn box_decode(mut idx: usize, side: usize, out: &mut [i64]) {
    for g in out.iter_mut() {
        *g = (idx % side) as i64;
        idx /= side;
    }
}

/// Survival bracket of width at most `target_width`.
pub fn survival(state: &CountVector, spectrum: &Spectrum, target_width: f64) -> Result<SurvivalBracket> {
    if !state.is_monotone(spectrum.poset()) {
        return Err(Error::NotLattice(state.label(spectrum.poset())));
    }
    let mut config = SurvivalConfig::with_width(target_width);
    loop {
        let solver = SurvivalSolver::new(spectrum, &config)?;
        let b = solver.survival(state);
        if b.width() <= target_width {
            return Ok(b);
        }
        if solver.horizon() >= config.max_horizon {
            return Err(Error::HorizonCap(format!("width {} above target {target_width}", b.width())));
        }
        config.target_width *= 0.25;
    }
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
    fn gamblers_ruin_two_chain() {
        let s = chain2();
        let b = survival(&CountVector(vec![0, 0]), &s, 1e-6).unwrap();
        assert!(b.width() <= 1e-6);
        assert!(b.contains(4.0 / 7.0), "{b:?}");
        let b = survival(&CountVector(vec![1, 0]), &s, 1e-6).unwrap();
        assert!(b.contains(40.0 / 49.0), "{b:?}");
    }

    #[test]
    fn one_element_poset() {
        let p = Poset::antichain(&["a"]).unwrap();
        let s = spectrum_from_pairs(&p, &[("a", 1.0)]).unwrap();
        let b = survival(&CountVector(vec![5]), &s, 1e-9).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn rejects_non_monotone_state() {
        let s = chain2();
        assert!(matches!(survival(&CountVector(vec![0, 1]), &s, 1e-6), Err(Error::NotLattice(_))));
    }

    #[test]
    fn box_indexing_roundtrip() {
        let mut out = vec![0; 3];
        for idx in 0..64 {
            box_decode(idx, 4, &mut out);
            assert_eq!(box_index(&out, 3), idx);
        }
    }
}
