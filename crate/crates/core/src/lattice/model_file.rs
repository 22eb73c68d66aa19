//! Line-oriented model files.
//!
//! ```text
//! # comment
//! L 3
//! N0 1
//! label free chain
//! V <x> <i> <j> <re> <im>          onsite entry, i <= j, conjugate implied
//! T <x> <x'> <i> <j> <re> <im>     hopping entry, x < x'
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use super::{Block, ModelError, ModelSpec, ONSITE_HERMITIAN_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, reason: reason.into() }
}

struct Fields<'a> {
    line: usize,
    it: std::str::SplitWhitespace<'a>,
}

impl Fields<'_> {
    fn index(&mut self, name: &str) -> Result<usize, ParseError> {
        let tok = self.it.next().ok_or_else(|| syntax(self.line, format!("missing {name}")))?;
        tok.parse().map_err(|_| syntax(self.line, format!("{name} is not a nonnegative integer: {tok:?}")))
    }

    fn real(&mut self, name: &str) -> Result<f64, ParseError> {
        let tok = self.it.next().ok_or_else(|| syntax(self.line, format!("missing {name}")))?;
        let v: f64 = tok.parse().map_err(|_| syntax(self.line, format!("{name} is not a number: {tok:?}")))?;
        if !v.is_finite() {
            return Err(syntax(self.line, format!("{name} is not finite")));
        }
        Ok(v)
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.it.next() {
            Some(tok) => Err(syntax(self.line, format!("unexpected trailing token {tok:?}"))),
            None => Ok(()),
        }
    }
}

/// Parses a model file. Errors carry the 1-based line number.
pub fn parse_model(text: &str) -> Result<ModelSpec, ParseError> {
    let mut sites: Option<(usize, usize)> = None;
    let mut internal: Option<(usize, usize)> = None;
    let mut label = String::new();
    // (line, x, i, j, value)
    let mut onsite_entries = Vec::new();
    // (line, x, x', i, j, value)
    let mut hopping_entries = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let key = it.next().unwrap_or_default();
        if key == "label" {
            label = trimmed["label".len()..].trim().to_string();
            continue;
        }
        let mut f = Fields { line, it };
        match key {
            "L" => {
                if sites.is_some() {
                    return Err(syntax(line, "L given twice"));
                }
                sites = Some((f.index("L")?, line));
                f.finish()?;
            }
            "N0" => {
                if internal.is_some() {
                    return Err(syntax(line, "N0 given twice"));
                }
                internal = Some((f.index("N0")?, line));
                f.finish()?;
            }
            "V" => {
                let (x, i, j) = (f.index("x")?, f.index("i")?, f.index("j")?);
                let v = Complex64::new(f.real("re")?, f.real("im")?);
                f.finish()?;
                if i > j {
                    return Err(syntax(line, format!("onsite entry needs i <= j, got i={i}, j={j}")));
                }
                onsite_entries.push((line, x, i, j, v));
            }
            "T" => {
                let (x, x2, i, j) = (f.index("x")?, f.index("x'")?, f.index("i")?, f.index("j")?);
                let v = Complex64::new(f.real("re")?, f.real("im")?);
                f.finish()?;
                if x >= x2 {
                    return Err(syntax(line, format!("hopping entry needs x < x', got x={x}, x'={x2}")));
                }
                hopping_entries.push((line, x, x2, i, j, v));
            }
            other => return Err(syntax(line, format!("unknown record type {other:?}"))),
        }
    }

    let (l, l_line) = sites.ok_or_else(|| syntax(0, "missing L header"))?;
    let (n0, n0_line) = internal.ok_or_else(|| syntax(0, "missing N0 header"))?;
    if l == 0 {
        return Err(syntax(l_line, "L must be positive"));
    }
    if n0 == 0 {
        return Err(syntax(n0_line, "N0 must be positive"));
    }
    let check = |line: usize, x: usize, i: usize, j: usize| -> Result<(), ParseError> {
        if !(1..=l).contains(&x) {
            return Err(syntax(line, format!("site {x} out of range 1..={l}")));
        }
        for v in [i, j] {
            if !(1..=n0).contains(&v) {
                return Err(syntax(line, format!("internal index {v} out of range 1..={n0}")));
            }
        }
        Ok(())
    };

    let mut seen = HashSet::new();
    let mut onsite: BTreeMap<usize, Block> = BTreeMap::new();
    for (line, x, i, j, v) in onsite_entries {
        check(line, x, i, j)?;
        if !seen.insert(('V', x, 0, i, j)) {
            return Err(syntax(line, format!("duplicate onsite entry ({x}, {i}, {j})")));
        }
        let block = onsite.entry(x).or_insert_with(|| Block::zeros(n0));
        if i == j {
            if v.im.abs() > ONSITE_HERMITIAN_TOL {
                return Err(syntax(line, format!("diagonal onsite entry has imaginary part {:e}", v.im)));
            }
            block.set(i - 1, i - 1, Complex64::new(v.re, 0.0));
        } else {
            block.set(i - 1, j - 1, v);
            block.set(j - 1, i - 1, v.conj());
        }
    }
    let mut hopping: BTreeMap<(usize, usize), Block> = BTreeMap::new();
    for (line, x, x2, i, j, v) in hopping_entries {
        check(line, x, i, j)?;
        check(line, x2, i, j)?;
        if !seen.insert(('T', x, x2, i, j)) {
            return Err(syntax(line, format!("duplicate hopping entry ({x}, {x2}, {i}, {j})")));
        }
        hopping.entry((x, x2)).or_insert_with(|| Block::zeros(n0)).set(i - 1, j - 1, v);
    }

    let mut builder = ModelSpec::builder(l, n0).label(label);
    for (x, b) in onsite {
        builder = builder.onsite(x, b);
    }
    for ((x, x2), b) in hopping {
        builder = builder.hopping(x, x2, b);
    }
    Ok(builder.build()?)
}

/// Serializes a model; nonzero entries only, floats in round-trip form.
pub fn write_model(spec: &ModelSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "L {}", spec.sites());
    let _ = writeln!(out, "N0 {}", spec.internal_dim());
    if !spec.label().is_empty() {
        let _ = writeln!(out, "label {}", spec.label().replace('\n', " "));
    }
    let n0 = spec.internal_dim();
    for (x, b) in spec.onsite_blocks() {
        for i in 0..n0 {
            for j in i..n0 {
                let v = b.get(i, j);
                if v != Complex64::default() {
                    let _ = writeln!(out, "V {x} {} {} {} {}", i + 1, j + 1, v.re, v.im);
                }
            }
        }
    }
    for (x, x2, b) in spec.hoppings() {
        for i in 0..n0 {
            for j in 0..n0 {
                let v = b.get(i, j);
                if v != Complex64::default() {
                    let _ = writeln!(out, "T {x} {x2} {} {} {} {}", i + 1, j + 1, v.re, v.im);
                }
            }
        }
    }
    out
}
