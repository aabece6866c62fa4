//! Plain-text exchange formats.
//!
//! Lattice: first line `n`, then one `lower upper` cover pair per line.
//! Function: `lattice <path>` header, then `element value` lines.
//! Distribution: first line `n`, then `mask probability` lines (decimal masks).
//!
//! Blank lines and `#` comments are ignored everywhere.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{bfs_from_bottom, FiniteLattice};
use crate::randset::{RandomSubset, VoidFunctional};
use crate::scalar::{Rational, Scalar};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

pub fn parse_lattice(text: &str) -> Result<FiniteLattice> {
    let mut lines = content_lines(text);
    let (first, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing element count"))?;
    if header.len() != 1 {
        return Err(parse_err(first, "first line must hold only the element count"));
    }
    let n: usize = field(first, header[0], "element count")?;
    let mut pairs = Vec::new();
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(parse_err(line, "expected 'lower upper'"));
        }
        let lo: usize = field(line, toks[0], "element")?;
        let hi: usize = field(line, toks[1], "element")?;
        if lo >= n || hi >= n {
            return Err(parse_err(line, format!("element out of range for n = {n}")));
        }
        pairs.push((lo, hi));
    }
    FiniteLattice::from_covers(n, &pairs)
}

/// Cover pairs in breadth-first order from the bottom.
pub fn write_lattice(l: &FiniteLattice) -> String {
    let mut out = format!("{}\n", l.len());
    for x in bfs_from_bottom(l) {
        for y in l.covers(x) {
            let _ = writeln!(out, "{x} {y}");
        }
    }
    out
}

/// Parsed function file: optional lattice reference and `(element, value)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFile<S> {
    pub lattice: Option<String>,
    pub entries: Vec<(usize, S)>,
}

pub fn parse_function<S: Scalar>(text: &str) -> Result<FunctionFile<S>> {
    let mut lattice = None;
    let mut entries = Vec::new();
    for (line, toks) in content_lines(text) {
        if toks[0] == "lattice" {
            if toks.len() != 2 {
                return Err(parse_err(line, "expected 'lattice <path>'"));
            }
            if lattice.is_some() || !entries.is_empty() {
                return Err(parse_err(line, "lattice header must come first"));
            }
            lattice = Some(toks[1].to_string());
            continue;
        }
        if toks.len() != 2 {
            return Err(parse_err(line, "expected 'element value'"));
        }
        let x: usize = field(line, toks[0], "element")?;
        let v = S::parse_scalar(toks[1])
            .ok_or_else(|| parse_err(line, format!("invalid value '{}'", toks[1])))?;
        entries.push((x, v));
    }
    Ok(FunctionFile { lattice, entries })
}

impl<S: Scalar> FunctionFile<S> {
    /// Values indexed by element; every element must appear exactly once.
    pub fn values(&self, n: usize) -> Result<Vec<S>> {
        let mut values: Vec<Option<S>> = vec![None; n];
        for (i, (x, v)) in self.entries.iter().enumerate() {
            let slot = values.get_mut(*x).ok_or(Error::IndexOutOfRange { index: *x, len: n })?;
            if slot.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "element {x} listed twice (entry {})",
                    i + 1
                )));
            }
            *slot = Some(v.clone());
        }
        values
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| Error::InvalidArgument(format!("element {x} has no value"))))
            .collect()
    }
}

pub fn write_function<S: Scalar>(lattice_path: Option<&str>, values: &[S]) -> String {
    let mut out = String::new();
    if let Some(p) = lattice_path {
        let _ = writeln!(out, "lattice {p}");
    }
    for (x, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{x} {v}");
    }
    out
}

pub fn parse_distribution<S: Scalar>(text: &str) -> Result<RandomSubset<S>> {
    let mut lines = content_lines(text);
    let (first, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing ground-set size"))?;
    if header.len() != 1 {
        return Err(parse_err(first, "first line must hold only n"));
    }
    let n: u32 = field(first, header[0], "ground-set size")?;
    let mut masses = Vec::new();
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(parse_err(line, "expected 'mask probability'"));
        }
        let mask: u32 = field(line, toks[0], "mask")?;
        if n < 32 && mask >> n != 0 {
            return Err(parse_err(line, format!("mask {mask} is not a subset of [{n}]")));
        }
        let p = S::parse_scalar(toks[1])
            .ok_or_else(|| parse_err(line, format!("invalid probability '{}'", toks[1])))?;
        masses.push((mask, p));
    }
    RandomSubset::from_masses(n, &masses)
}

/// Nonzero masses only.
pub fn write_distribution<S: Scalar>(x: &RandomSubset<S>) -> String {
    let mut out = format!("{}\n", x.n());
    for (mask, p) in x.support() {
        let _ = writeln!(out, "{mask} {p}");
    }
    out
}

/// Void functional file: first line `n`, then `mask value` for all `2^n` masks.
pub fn parse_void<S: Scalar>(text: &str) -> Result<VoidFunctional<S>> {
    let mut lines = content_lines(text);
    let (first, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing ground-set size"))?;
    if header.len() != 1 {
        return Err(parse_err(first, "first line must hold only n"));
    }
    let n: u32 = field(first, header[0], "ground-set size")?;
    if n > crate::subsets::MAX_GROUND_SET {
        return Err(parse_err(first, format!("n = {n} exceeds {}", crate::subsets::MAX_GROUND_SET)));
    }
    let mut values: Vec<Option<S>> = vec![None; 1 << n];
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(parse_err(line, "expected 'mask value'"));
        }
        let mask: usize = field(line, toks[0], "mask")?;
        let slot = values
            .get_mut(mask)
            .ok_or_else(|| parse_err(line, format!("mask {mask} is not a subset of [{n}]")))?;
        if slot.is_some() {
            return Err(parse_err(line, format!("mask {mask} listed twice")));
        }
        *slot = Some(
            S::parse_scalar(toks[1]).ok_or_else(|| parse_err(line, format!("invalid value '{}'", toks[1])))?,
        );
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::InvalidArgument(format!("mask {k} has no value"))))
        .collect::<Result<Vec<_>>>()?;
    VoidFunctional::new(n, values)
}

pub fn write_void<S: Scalar>(v: &VoidFunctional<S>) -> String {
    let mut out = format!("{}\n", v.n());
    for (mask, value) in v.values().iter().enumerate() {
        let _ = writeln!(out, "{mask} {value}");
    }
    out
}

/// Named distributions: `uniform-singleton:N`, `singleton:p1,p2,...`,
/// `empty:N`, `two-point:M`.
pub fn parse_dist_spec(spec: &str) -> Result<RandomSubset<Rational>> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("distribution spec '{spec}' needs 'kind:argument'")))?;
    let int = |s: &str| -> Result<u32> {
        s.parse()
            .map_err(|_| Error::InvalidArgument(format!("'{s}' is not a positive integer")))
    };
    match kind {
        "uniform-singleton" => RandomSubset::uniform_singleton(int(arg)?),
        "empty" => RandomSubset::empty(int(arg)?),
        "two-point" => crate::randset::two_point(int(arg)?),
        "singleton" => {
            let p = arg
                .split(',')
                .map(|t| {
                    Rational::parse_scalar(t)
                        .ok_or_else(|| Error::InvalidArgument(format!("invalid probability '{t}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            RandomSubset::singleton_set(&p)
        }
        _ => Err(Error::InvalidArgument(format!("unknown distribution kind '{kind}'"))),
    }
}
