use std::collections::HashMap;

use proptest::prelude::*;

use central_numberings::central_measure::{
    exact_centrality, rejection_acceptance, GreedyKernel, MeasureUnderTest, SurvivalConfig, SurvivalSolver,
};
use central_numberings::lattice_words::{enumerate_lattice_words, Convention, CountVector};
use central_numberings::poset::spectrum_from_pairs;
use central_numberings::{Poset, Spectrum};

fn chain(freqs: &[f64]) -> Spectrum {
    let names: Vec<String> = (0..freqs.len()).map(|i| format!("c{i}")).collect();
    let p = Poset::chain(&names).unwrap();
    let pairs: Vec<(&str, f64)> = names.iter().map(|s| s.as_str()).zip(freqs.iter().copied()).collect();
    spectrum_from_pairs(&p, &pairs).unwrap()
}

fn solver(s: &Spectrum, width: f64) -> SurvivalSolver {
    SurvivalSolver::new(s, &SurvivalConfig::with_width(width)).unwrap()
}

/// Survival of a chain in closed form: `det[(λ_j/λ_i)^{c_i + k − i}]`,
/// the alternating sum that vanishes on the chamber walls.
fn chain_survival(freqs: &[f64], counts: &[u32]) -> f64 {
    let k = freqs.len();
    let m: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| (freqs[j] / freqs[i]).powi((counts[i] as usize + k - 1 - i) as i32)).collect())
        .collect();
    determinant(m)
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for j in c..n {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// Probability that `steps` i.i.d. letters from `counts` keep the lattice property.
fn finite_horizon_survival(s: &Spectrum, counts: &[u32], steps: usize) -> f64 {
    let p = s.poset();
    let ok = |c: &[u32]| p.covers().iter().all(|&(a, b)| c[a] >= c[b]);
    let mut layer: HashMap<Vec<u32>, f64> = HashMap::from([(counts.to_vec(), 1.0)]);
    for _ in 0..steps {
        let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
        for (c, w) in layer {
            for (x, &l) in s.freqs().iter().enumerate() {
                let mut d = c.clone();
                d[x] += 1;
                if ok(&d) {
                    *next.entry(d).or_default() += w * l;
                }
            }
        }
        layer = next;
    }
    layer.values().sum()
}

#[test]
fn chain_brackets_contain_closed_forms() {
    let s = chain(&[0.7, 0.3]);
    let h = solver(&s, 1e-9);
    for d in 0..20u32 {
        let exact = chain_survival(&[0.7, 0.3], &[d, 0]);
        assert!((exact - (1.0 - (3.0f64 / 7.0).powi(d as i32 + 1))).abs() < 1e-14);
        assert!(h.survival(&CountVector(vec![d, 0])).contains(exact), "gap {d}");
    }
    let freqs = [0.5, 0.3, 0.2];
    let h = solver(&chain(&freqs), 1e-8);
    let zero = chain_survival(&freqs, &[0, 0, 0]);
    assert!((zero - 0.08).abs() < 1e-14);
    for c in [[0, 0, 0], [1, 0, 0], [1, 1, 0], [3, 1, 0], [5, 5, 2], [12, 4, 1]] {
        let b = h.survival(&CountVector(c.to_vec()));
        let exact = chain_survival(&freqs, &c);
        assert!(b.contains(exact), "{c:?}: {b:?} vs {exact}");
        assert!(b.width() <= 1e-8);
    }
    let freqs = [0.4, 0.3, 0.2, 0.1];
    let h = solver(&chain(&freqs), 1e-5);
    for c in [[0, 0, 0, 0], [2, 1, 1, 0], [4, 2, 1, 1]] {
        assert!(h.survival(&CountVector(c.to_vec())).contains(chain_survival(&freqs, &c)), "{c:?}");
    }
}

#[test]
fn brackets_agree_with_finite_horizon_survival() {
    // h_N decreases to h; the tail beyond N steps is negligible at these gaps.
    let s = chain(&[0.7, 0.3]);
    let b = solver(&s, 1e-9).survival(&CountVector(vec![0, 0]));
    let h_n = finite_horizon_survival(&s, &[0, 0], 400);
    assert!(b.lower <= h_n + 1e-12 && h_n - b.upper < 1e-9, "{b:?} vs {h_n}");

    let p = Poset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
    let s = spectrum_from_pairs(&p, &[("a", 0.6), ("b", 0.25), ("c", 0.15)]).unwrap();
    let b = solver(&s, 1e-7).survival(&CountVector(vec![0, 0, 0]));
    let h_n = finite_horizon_survival(&s, &[0, 0, 0], 160);
    assert!(b.lower <= h_n + 1e-12 && h_n - b.upper < 1e-6, "{b:?} vs {h_n}");
}

#[test]
fn finite_horizon_rejection_rate_matches_dp() {
    let s = chain(&[0.7, 0.3]);
    let draws = 100_000u64;
    for n in [1usize, 4, 10] {
        let exact = finite_horizon_survival(&s, &[0, 0], n);
        let rate = rejection_acceptance(&s, n, draws, 11).unwrap() as f64 / draws as f64;
        let sigma = (exact * (1.0 - exact) / draws as f64).sqrt();
        assert!((rate - exact).abs() <= 3.0 * sigma + 1e-12, "n={n}: {rate} vs {exact}");
    }
    let one = spectrum_from_pairs(&Poset::chain(&["a"]).unwrap(), &[("a", 1.0)]).unwrap();
    assert_eq!(rejection_acceptance(&one, 50, 1000, 0).unwrap(), 1000);
}

fn random_poset(n: usize, edges: &[bool]) -> Poset {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut covers = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if edges[k] {
                covers.push((names[i].clone(), names[j].clone()));
            }
            k += 1;
        }
    }
    Poset::new(&names, &covers).unwrap()
}

/// Posets of at most four elements with frequencies decreasing along the
/// index order (a linear extension), every cover gap at least 0.1.
fn spectrum_strategy() -> impl Strategy<Value = Spectrum> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (prop::collection::vec(prop::bool::weighted(0.5), n * (n - 1) / 2), prop::collection::vec(1u32..100, n))
        })
        .prop_filter_map("cover gap below 0.1", |(edges, raw)| {
            let n = raw.len();
            let p = random_poset(n, &edges);
            let mut w: Vec<f64> = raw.iter().map(|&x| x as f64).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            let total: f64 = w.iter().sum();
            let mut f: Vec<f64> = w.iter().map(|x| x / total).collect();
            let head: f64 = f[1..].iter().sum();
            f[0] = 1.0 - head;
            let distinct = (1..n).all(|i| f[i - 1] > f[i]);
            let gaps_ok = p.covers().iter().all(|&(a, b)| f[a] - f[b] >= 0.1);
            if !(distinct && gaps_ok) {
                return None;
            }
            let pairs: Vec<(&str, f64)> = p.elements().iter().map(|s| s.as_str()).zip(f.iter().copied()).collect();
            spectrum_from_pairs(&p, &pairs).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn survival_is_positive(s in spectrum_strategy()) {
        let h = solver(&s, 1e-3);
        prop_assert!(h.survival(&CountVector::zero(s.poset())).lower > 0.0);
    }

    #[test]
    fn survival_is_harmonic(s in spectrum_strategy(), steps in prop::collection::vec(0usize..4, 0..6)) {
        let h = solver(&s, 1e-4);
        let p = s.poset();
        let mut c = CountVector::zero(p);
        for x in steps {
            let next = c.plus(x % p.len());
            if next.is_monotone(p) {
                c = next;
            }
        }
        let here = h.bracket(&c);
        let (mut lo, mut hi) = (0.0, 0.0);
        for (x, &l) in s.freqs().iter().enumerate() {
            let next = c.plus(x);
            if next.is_monotone(p) {
                let b = h.bracket(&next);
                lo += l * b.lo;
                hi += l * b.hi;
            }
        }
        prop_assert!(here.lo <= hi + 1e-12 && lo <= here.hi + 1e-12, "{:?} vs [{lo}, {hi}]", here);
    }

    #[test]
    fn cylinder_probability_depends_only_on_content(s in spectrum_strategy(), n in 1usize..=5) {
        let h = solver(&s, 1e-8);
        for r in exact_centrality(&s, n, &MeasureUnderTest::Central(&h)).unwrap() {
            prop_assert!(r.uniform_not_refuted, "{}", r.vertex);
        }
    }
}

#[test]
fn transition_rows_sum_to_one() {
    let s = chain(&[0.5, 0.3, 0.2]);
    let h = solver(&s, 1e-9);
    for w in enumerate_lattice_words(s.poset(), 5, Convention::Weak).unwrap() {
        let row = h.transition_row(&CountVector::of_word(s.poset(), &w)).unwrap();
        assert!(row.total().contains(1.0), "{row:?}");
    }
}

#[test]
fn greedy_control_is_not_central() {
    for freqs in [&[0.7, 0.3][..], &[0.5, 0.3, 0.2][..]] {
        let s = chain(freqs);
        let g = GreedyKernel::new(&s, 0.9);
        let reports = exact_centrality(&s, 6, &MeasureUnderTest::Greedy(&g)).unwrap();
        assert!(reports.iter().any(|r| !r.uniform_not_refuted));
    }
}
