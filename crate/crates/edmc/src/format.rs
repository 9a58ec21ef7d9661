//! Line-oriented instance files.
//!
//! ```text
//! 4 2
//! 0 1 1.25 *
//! 1 0 1.25 *
//! 1.25 1.25 0 1
//! * * 1 0
//! #meta
//! generator masked n=4 d=2 mask=chordal
//! seed 7
//! point 1 0 0
//! ```
//!
//! `*` marks an unspecified entry. Metadata lines are `key value...`; point,
//! clique and seed lines are interpreted, everything else is kept verbatim.
//! Indices in the file are 1-based.

use std::fmt::Write as _;
use std::path::Path;

use edmc_core::matrix::squared_distance;
use edmc_core::{MatrixError, PartialMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("entry ({i}, {j}) differs from entry ({j}, {i})")]
    Asymmetry { i: usize, j: usize },
    #[error("entry ({i}, {j}) is negative")]
    NegativeEntry { i: usize, j: usize },
    #[error("diagonal entry ({i}, {i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("metadata points disagree with entry ({i}, {j})")]
    MetadataMismatch { i: usize, j: usize },
    #[error("{0}")]
    Io(String),
}

/// Parsed metadata block.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub generator: Option<String>,
    pub seed: Option<u64>,
    /// Ground-truth points, 0-based; all present or all absent.
    pub points: Vec<Vec<f64>>,
    /// Clique cover, 0-based indices.
    pub cliques: Vec<Vec<usize>>,
    /// Other lines in file order.
    pub extra: Vec<String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        self.generator.is_none()
            && self.seed.is_none()
            && self.points.is_empty()
            && self.cliques.is_empty()
            && self.extra.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub matrix: PartialMatrix,
    pub d: usize,
    pub meta: Metadata,
}

impl Instance {
    pub fn new(matrix: PartialMatrix, d: usize) -> Self {
        Instance {
            matrix,
            d,
            meta: Metadata::default(),
        }
    }

    /// Drops the metadata; this is what solver code paths receive.
    pub fn redacted(self) -> (PartialMatrix, usize) {
        (self.matrix, self.d)
    }
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their 1-based starting column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_f64(tok: &str, line: usize, col: usize) -> Result<f64, FormatError> {
    let v: f64 = tok.parse().map_err(|_| {
        parse_err(
            line,
            col,
            format!("expected a number or '*', found '{tok}'"),
        )
    })?;
    if !v.is_finite() {
        return Err(parse_err(line, col, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn parse_index(tok: &str, n: usize, line: usize, col: usize) -> Result<usize, FormatError> {
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, col, format!("expected an index, found '{tok}'")))?;
    if i == 0 || i > n {
        return Err(parse_err(line, col, format!("index {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

fn next_content<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Option<(usize, &'a str)> {
    lines.find(|(_, l)| !l.trim().is_empty())
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (hline, header) = next_content(&mut lines).ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let htoks = tokens(header);
    if htoks.len() != 2 {
        return Err(parse_err(hline, 1, "header must be 'n d'"));
    }
    let n: usize = htoks[0]
        .1
        .parse()
        .map_err(|_| parse_err(hline, htoks[0].0, "n must be a nonnegative integer"))?;
    let d: usize = htoks[1]
        .1
        .parse()
        .map_err(|_| parse_err(hline, htoks[1].0, "d must be a nonnegative integer"))?;
    let mut grid = Vec::with_capacity(n * n);
    let mut last_line = hline;
    for r in 0..n {
        let (no, row) = next_content(&mut lines)
            .ok_or_else(|| parse_err(last_line + 1, 1, format!("missing matrix row {}", r + 1)))?;
        last_line = no;
        let toks = tokens(row);
        if toks.len() != n {
            return Err(parse_err(
                no,
                toks.get(n).map(|t| t.0).unwrap_or(row.len() + 1),
                format!("expected {n} fields, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            grid.push(if tok == "*" {
                None
            } else {
                Some(parse_f64(tok, no, col)?)
            });
        }
    }
    let matrix = PartialMatrix::from_grid(n, grid).map_err(|e| match e {
        MatrixError::Asymmetric { i, j } => FormatError::Asymmetry { i: i + 1, j: j + 1 },
        MatrixError::NegativeEntry { i, j } => FormatError::NegativeEntry { i: i + 1, j: j + 1 },
        MatrixError::NonzeroDiagonal { i } => FormatError::NonzeroDiagonal { i: i + 1 },
        other => FormatError::Parse {
            line: hline,
            col: 1,
            msg: other.to_string(),
        },
    })?;
    let mut meta = Metadata::default();
    let mut points: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut in_meta = false;
    for (no, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        if !in_meta {
            if l.trim() == "#meta" {
                in_meta = true;
                continue;
            }
            return Err(parse_err(no, 1, "unexpected content after the matrix"));
        }
        let toks = tokens(l);
        match toks[0].1 {
            "point" => {
                let (icol, itok) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(no, l.len() + 1, "point needs an index"))?;
                let i = parse_index(itok, n, no, icol)?;
                let coords = toks[2..]
                    .iter()
                    .map(|&(c, t)| parse_f64(t, no, c))
                    .collect::<Result<Vec<f64>, _>>()?;
                if coords.len() != d {
                    return Err(parse_err(
                        no,
                        1,
                        format!("point has {} coordinates, expected {d}", coords.len()),
                    ));
                }
                points[i] = Some(coords);
            }
            "clique" => {
                let c = toks[1..]
                    .iter()
                    .map(|&(c, t)| parse_index(t, n, no, c))
                    .collect::<Result<Vec<usize>, _>>()?;
                meta.cliques.push(c);
            }
            "seed" => {
                let (c, t) = *toks
                    .get(1)
                    .ok_or_else(|| parse_err(no, l.len() + 1, "seed needs a value"))?;
                meta.seed = Some(
                    t.parse()
                        .map_err(|_| parse_err(no, c, "seed must be an unsigned integer"))?,
                );
            }
            "generator" => meta.generator = Some(l.trim()["generator".len()..].trim().to_string()),
            _ => meta.extra.push(l.trim().to_string()),
        }
    }
    let given = points.iter().filter(|p| p.is_some()).count();
    if given > 0 {
        if given < n {
            return Err(parse_err(
                last_line,
                1,
                format!("metadata lists {given} of {n} points"),
            ));
        }
        meta.points = points.into_iter().map(Option::unwrap).collect();
        check_points(&matrix, &meta.points)?;
    }
    Ok(Instance { matrix, d, meta })
}

/// The metadata points must reproduce every specified entry.
fn check_points(m: &PartialMatrix, points: &[Vec<f64>]) -> Result<(), FormatError> {
    let scale = m.max_entry().max(1.0);
    let n = m.order();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(v) = m.get(i, j) {
                if (squared_distance(&points[i], &points[j]) - v).abs() > 1e-12 * scale {
                    return Err(FormatError::MetadataMismatch { i: i + 1, j: j + 1 });
                }
            }
        }
    }
    Ok(())
}

/// Shortest of the plain and exponent renderings; both round-trip exactly.
pub fn format_number(v: f64) -> String {
    let plain = format!("{v}");
    let sci = format!("{v:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let n = inst.matrix.order();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", n, inst.d);
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| match inst.matrix.get(i, j) {
                Some(v) => format_number(v),
                None => "*".to_string(),
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let meta = &inst.meta;
    if !meta.is_empty() {
        out.push_str("#meta\n");
        if let Some(g) = &meta.generator {
            let _ = writeln!(out, "generator {g}");
        }
        if let Some(s) = meta.seed {
            let _ = writeln!(out, "seed {s}");
        }
        for (i, p) in meta.points.iter().enumerate() {
            let coords: Vec<String> = p.iter().map(|&x| format_number(x)).collect();
            if coords.is_empty() {
                let _ = writeln!(out, "point {}", i + 1);
            } else {
                let _ = writeln!(out, "point {} {}", i + 1, coords.join(" "));
            }
        }
        for c in &meta.cliques {
            let idx: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(out, "clique {}", idx.join(" "));
        }
        for e in &meta.extra {
            let _ = writeln!(out, "{e}");
        }
    }
    out
}

pub fn load_instance(path: &Path) -> Result<Instance, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FormatError::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

/// Matrix and dimension only; ground truth never reaches the caller.
pub fn load_redacted(path: &Path) -> Result<(PartialMatrix, usize), FormatError> {
    load_instance(path).map(Instance::redacted)
}

pub fn save_instance(path: &Path, inst: &Instance) -> Result<(), FormatError> {
    std::fs::write(path, serialize_instance(inst))
        .map_err(|e| FormatError::Io(format!("{}: {e}", path.display())))
}

/// Clique cover file: one clique per line, 1-based indices.
pub fn parse_cover(text: &str, n: usize) -> Result<Vec<Vec<usize>>, FormatError> {
    let mut out = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let toks = tokens(l);
        if toks.is_empty() || toks[0].1.starts_with('#') {
            continue;
        }
        out.push(
            toks.iter()
                .map(|&(c, t)| parse_index(t, n, k + 1, c))
                .collect::<Result<Vec<usize>, _>>()?,
        );
    }
    Ok(out)
}
