//! Batch commands over the `central-numberings` library.
//!
//! Every command returns a report string and an exit code: 0 when all checks
//! pass, 1 when a check fails, 2 for invalid input and 3 when a resource cap
//! is hit. Reports are deterministic for a fixed configuration and seed.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use central_numberings::central_measure::{
    estimate_spectrum, kernel_solver, sample_central_htransform, sample_central_rejection, sampler_agreement,
    verify_centrality, CentralSampleReport, HTransformSampler, KernelConfig, RejectionConfig, SamplerKind,
    VerifyConfig,
};
use central_numberings::central_measure::stream_rng;
use central_numberings::ideal_graph::{count_paths, PosetProvider};
use central_numberings::io::{parse_frequency_map, parse_zd, read_poset, read_spectrum, read_text, ZdInput};
use central_numberings::lattice_words::{
    enumerate_lattice_words, parse_word, render_word, trace_csv, walk_trace, Convention, LatticeWord,
};
use central_numberings::rsk_bridge::{compare_spectra, RskConfig};
use central_numberings::zd_lattice::{chains_of, decompose, grid_provider, reduce_to_chain_poset, tableau_embed};
use central_numberings::{Error, Poset, Result, Spectrum, VERSION};

/// Words listed in enumeration reports before only the count is kept.
pub const LIST_LIMIT: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "cnum", version, about = "Central measures on numberings of poset ideals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate lattice words of a given length.
    Enumerate(RunArgs),
    /// Sample words from the central measure of a spectrum.
    Sample(RunArgs),
    /// Exact and statistical centrality checks.
    Verify(RunArgs),
    /// Decompositions, chain posets and embeddings of ℤ₊^d ideals.
    Zd(RunArgs),
    /// RSK shape paths of Bernoulli words against the central measure.
    Rsk(RunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Poset file: an `elements:` line and `a > b` cover lines.
    #[arg(long)]
    pub poset: Option<PathBuf>,
    /// JSON ℤ₊^d input: an irreducible ideal, a minimal ideal or a finite diagram.
    #[arg(long)]
    pub diagram: Option<PathBuf>,
    /// Frequencies, one `identifier value` per line (decimal or `p/q`).
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Spectrum of the RSK side of `rsk`; defaults to `--spectrum`.
    #[arg(long)]
    pub control_spectrum: Option<PathBuf>,
    /// Word length.
    #[arg(long, default_value_t = 6, allow_negative_numbers = true)]
    pub n: i64,
    /// Number of sampled words.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Look-ahead steps of the rejection sampler.
    #[arg(long, default_value_t = 200)]
    pub guard: usize,
    /// Largest survival horizon the solver may use.
    #[arg(long, default_value_t = 4096)]
    pub horizon: u32,
    /// Largest transition bracket width of the h-transform kernel.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Lattice convention: `weak` or `strict2`.
    #[arg(long, default_value = "weak")]
    pub convention: String,
    /// `htransform` or `rejection`.
    #[arg(long, default_value = "htransform")]
    pub sampler: String,
    /// Word for `zd` embeddings, whitespace-separated identifiers.
    #[arg(long)]
    pub word: Option<String>,
    /// Length of the single long word used for frequency estimates in `verify`.
    #[arg(long, default_value_t = 100_000)]
    pub long_word: usize,
    /// CSV walk trace of the first sampled word.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report path; not part of the recorded configuration.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_greedy: Option<f64>,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub exit: u8,
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_resource() {
        3
    } else {
        2
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Enumerate(a) => enumerate(a),
        Command::Sample(a) => sample(a),
        Command::Verify(a) => verify(a),
        Command::Zd(a) => zd(a),
        Command::Rsk(a) => rsk(a),
    }
}

/// Runs a command and writes its report to `--out` or stdout.
pub fn main_with(cli: &Cli) -> u8 {
    let out = match &cli.command {
        Command::Enumerate(a) | Command::Sample(a) | Command::Verify(a) | Command::Zd(a) | Command::Rsk(a) => {
            a.out.clone()
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &outcome.report)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))),
                // A closed pipe is not a failure of the run.
                None => {
                    let _ = std::io::stdout().lock().write_all(outcome.report.as_bytes());
                    Ok(())
                }
            };
            match written {
                Ok(()) => outcome.exit,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code(&e)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::InvalidInput(format!("--{flag} is required")))
}

fn length(a: &RunArgs) -> Result<usize> {
    usize::try_from(a.n).map_err(|_| Error::InvalidInput(format!("--n must be non-negative, got {}", a.n)))
}

fn load_spectrum(a: &RunArgs) -> Result<(Poset, Spectrum)> {
    let poset = read_poset(required(&a.poset, "poset")?)?;
    let spectrum = read_spectrum(&poset, required(&a.spectrum, "spectrum")?)?;
    Ok((poset, spectrum))
}

fn kernel(a: &RunArgs) -> Result<KernelConfig> {
    if !(a.tolerance > 0.0 && a.tolerance < 1.0) {
        return Err(Error::InvalidInput(format!("--tolerance must lie in (0, 1), got {}", a.tolerance)));
    }
    Ok(KernelConfig { kernel_tolerance: a.tolerance, max_horizon: a.horizon })
}

fn rejection(a: &RunArgs) -> RejectionConfig {
    RejectionConfig { guard: a.guard, ..Default::default() }
}

fn header(command: &str, a: &RunArgs) -> Value {
    json!({ "command": command, "version": VERSION, "config": a })
}

fn document(mut head: Value, body: Value) -> String {
    if let (Value::Object(h), Value::Object(b)) = (&mut head, body) {
        h.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&head).expect("reports serialize");
    s.push('\n');
    s
}

fn enumerate(a: &RunArgs) -> Result<Outcome> {
    let n = length(a)?;
    let convention: Convention = a.convention.parse()?;
    let poset = read_poset(required(&a.poset, "poset")?)?;
    let words = enumerate_lattice_words(&poset, n, convention)?;
    let listed: Option<Vec<String>> =
        (words.len() <= LIST_LIMIT).then(|| words.iter().map(|w| render_word(&poset, w)).collect());
    let body = json!({ "n": n, "count": words.len(), "words": listed });
    Ok(Outcome { report: document(header("enumerate", a), body), exit: 0 })
}

fn draw(a: &RunArgs, spectrum: &Spectrum, n: usize) -> Result<CentralSampleReport> {
    match a.sampler.parse::<SamplerKind>()? {
        SamplerKind::Rejection => sample_central_rejection(spectrum, n, a.samples, a.seed, &rejection(a)),
        _ => {
            let k = kernel(a)?;
            let solver = kernel_solver(spectrum, &k)?;
            sample_central_htransform(&solver, n, a.samples, a.seed, &k)
        }
    }
}

/// JSON lines: a header with the run summary, then one line per word.
fn sample(a: &RunArgs) -> Result<Outcome> {
    let n = length(a)?;
    let (poset, spectrum) = load_spectrum(a)?;
    let rep = draw(a, &spectrum, n)?;
    if let (Some(path), Some(first)) = (&a.trace, rep.words.first()) {
        let word = LatticeWord::new(&poset, first.clone(), Convention::Weak)?;
        let csv = trace_csv(&poset, &walk_trace(&poset, &word)?);
        std::fs::write(path, csv).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    let head = json!({
        "command": "sample",
        "version": VERSION,
        "config": a,
        "sampler": rep.sampler,
        "seed": rep.seed,
        "n": rep.n,
        "samples": rep.words.len(),
        "attempts": rep.attempts,
        "accept_rate": rep.accept_rate,
        "tail_bound": rep.tail_bound,
        "bracket_widths": rep.bracket_widths,
    });
    let mut out = serde_json::to_string(&head).expect("reports serialize");
    out.push('\n');
    for w in &rep.words {
        let ids: Vec<&str> = w.iter().map(|&x| poset.name(x)).collect();
        let line = json!({ "sampler": rep.sampler, "seed": rep.seed, "word": ids, "accept_rate": rep.accept_rate });
        out.push_str(&serde_json::to_string(&line).expect("reports serialize"));
        out.push('\n');
    }
    Ok(Outcome { report: out, exit: 0 })
}

fn verify(a: &RunArgs) -> Result<Outcome> {
    let n = length(a)?;
    let (poset, spectrum) = load_spectrum(a)?;
    let config = VerifyConfig { rejection: rejection(a), kernel: kernel(a)?, inject_greedy: a.inject_greedy };
    let centrality = verify_centrality(&spectrum, n, a.samples, a.seed, &config)?;
    let (frequencies, agreement) = if a.inject_greedy.is_some() {
        (None, None)
    } else {
        let solver = kernel_solver(&spectrum, &config.kernel)?;
        let mut widths = vec![0.0; a.long_word];
        let mut rng = stream_rng(a.seed.wrapping_add(2), 0);
        let word = HTransformSampler::new(&solver).sample_word(a.long_word, &mut rng, &mut widths)?;
        let estimates = if word.is_empty() { Vec::new() } else { estimate_spectrum(&poset, &[word])? };
        let agreement = if n > 0 {
            Some(sampler_agreement(&spectrum, n.min(5), a.samples, a.seed.wrapping_add(3), &config)?)
        } else {
            None
        };
        (Some(estimates), agreement)
    };
    let body = json!({
        "n": n,
        "exact_pass": centrality.exact_pass,
        "statistical_pass": centrality.statistical_pass,
        "centrality": centrality,
        "frequencies": frequencies,
        "agreement": agreement,
    });
    let exit = if centrality.exact_pass { 0 } else { 1 };
    Ok(Outcome { report: document(header("verify", a), body), exit })
}

fn zd(a: &RunArgs) -> Result<Outcome> {
    let input = parse_zd(&read_text(required(&a.diagram, "diagram")?)?)?;
    let body = match input {
        ZdInput::Ideal(ideal) => {
            let dec = decompose(&ideal)?;
            let chains = ideal
                .components
                .iter()
                .map(|c| {
                    let p = chains_of(c)?;
                    Ok(json!({ "axis": c.axis, "elements": p.len(), "covers": p.covers().len(), "poset": p.to_string() }))
                })
                .collect::<Result<Vec<_>>>()?;
            let reduction = match &a.spectrum {
                Some(path) => {
                    let freqs: HashMap<String, f64> =
                        parse_frequency_map(&read_text(path)?)?.into_iter().map(|(k, f)| (k, f.value())).collect();
                    Some(reduce_to_chain_poset(&ideal, &freqs)?)
                }
                None => None,
            };
            json!({ "kind": "ideal", "decomposition": dec, "chains": chains, "reduction": reduction })
        }
        ZdInput::Component(component) => {
            let p = chains_of(&component)?;
            let embedding = match &a.word {
                Some(text) => {
                    let letters = parse_word(&p, text)?;
                    let path = tableau_embed(&component, &p, &letters)?;
                    Some(path.into_iter().map(|d| d.cells).collect::<Vec<_>>())
                }
                None => None,
            };
            json!({
                "kind": "component",
                "chains": { "elements": p.len(), "covers": p.covers().len(), "poset": p.to_string() },
                "embedding": embedding,
            })
        }
        ZdInput::Diagram(diagram) => {
            let grid = grid_provider(diagram.d)?;
            let paths = count_paths(&grid, &diagram)?;
            json!({
                "kind": "diagram",
                "vertex": grid.vertex_id(&diagram),
                "cells": diagram.len(),
                "path_count": paths.to_string(),
                "addable": grid.addable(&diagram),
            })
        }
    };
    Ok(Outcome { report: document(header("zd", a), body), exit: 0 })
}

fn rsk(a: &RunArgs) -> Result<Outcome> {
    let n = length(a)?;
    let (poset, central) = load_spectrum(a)?;
    let control = match &a.control_spectrum {
        Some(path) => Some(read_spectrum(&poset, path)?),
        None => None,
    };
    let config = RskConfig { kernel: kernel(a)?, ..Default::default() };
    let report = compare_spectra(control.as_ref().unwrap_or(&central), &central, n, a.samples, a.seed, &config)?;
    let exit = if report.pass { 0 } else { 1 };
    let body = json!({ "comparison": report });
    Ok(Outcome { report: document(header("rsk", a), body), exit })
}
