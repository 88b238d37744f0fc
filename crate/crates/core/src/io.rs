//! Text and JSON input formats.
//!
//! Poset files hold one `elements: a b c` line followed by cover lines
//! `a > b`; spectrum files hold `a 0.7` or `a 7/10` lines. `#` starts a
//! comment in both.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::poset::{validate_spectrum, Frequency, Poset, Spectrum};
use crate::zd_lattice::{IrreducibleIdeal, MultiDiagram, OneDimMinimalIdeal};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    let mut elements: Option<Vec<String>> = None;
    let mut covers = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("elements:") {
            if elements.is_some() {
                return Err(parse_err(no, "repeated `elements:` line"));
            }
            elements = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some((a, b)) = line.split_once('>') {
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() || a.contains(char::is_whitespace) || b.contains(char::is_whitespace) {
                return Err(parse_err(no, format!("malformed cover `{line}`")));
            }
            if elements.is_none() {
                return Err(parse_err(no, "cover before `elements:` line"));
            }
            covers.push((a.to_string(), b.to_string()));
        } else {
            return Err(parse_err(no, format!("unrecognized line `{line}`")));
        }
    }
    let elements = elements.ok_or_else(|| parse_err(0, "missing `elements:` line"))?;
    Poset::new(&elements, &covers)
}

pub fn parse_frequency(token: &str) -> Option<Frequency> {
    match token.split_once('/') {
        Some((p, q)) => Some(Frequency::Rational(p.trim().parse().ok()?, q.trim().parse().ok()?)),
        None => token.parse::<f64>().ok().map(Frequency::Decimal),
    }
}

/// Identifier/frequency pairs, without reference to a poset.
pub fn parse_frequency_map(text: &str) -> Result<HashMap<String, Frequency>> {
    let mut map = HashMap::new();
    for (no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let (Some(id), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(no, format!("expected `<element> <frequency>`, got `{line}`")));
        };
        let f = parse_frequency(value).ok_or_else(|| parse_err(no, format!("bad frequency `{value}`")))?;
        if map.insert(id.to_string(), f).is_some() {
            return Err(parse_err(no, format!("repeated element `{id}`")));
        }
    }
    Ok(map)
}

pub fn parse_spectrum(poset: &Poset, text: &str) -> Result<Spectrum> {
    validate_spectrum(poset, &parse_frequency_map(text)?)
}

/// Any of the `ℤ₊^d` JSON inputs.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ZdInput {
    Ideal(OneDimMinimalIdeal),
    Component(IrreducibleIdeal),
    Diagram(MultiDiagram),
}

pub fn parse_zd(text: &str) -> Result<ZdInput> {
    let input: ZdInput = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    match &input {
        ZdInput::Ideal(i) => i.validate()?,
        ZdInput::Component(c) => c.validate()?,
        ZdInput::Diagram(d) => d.validate()?,
    }
    Ok(input)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn read_poset(path: &Path) -> Result<Poset> {
    parse_poset(&read_text(path)?)
}

pub fn read_spectrum(poset: &Poset, path: &Path) -> Result<Spectrum> {
    parse_spectrum(poset, &read_text(path)?)
}
