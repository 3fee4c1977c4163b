//! Text formats for coverage and kill matrices.
//!
//! TSV: the first line is `<tests> <columns>`, then one line per test of the
//! form `<name>\t<i1> <i2> ...` with 0-based column indices (the list may be
//! empty). JSON: `{"units": m, "tests": [{"name": .., "covers": [..]}]}` for
//! coverage and `{"faults": k, "tests": [{"name": .., "kills": [..]}]}` for
//! kills.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CoverageMatrix, KillMatrix};
use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    #[default]
    Tsv,
    Json,
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(MatrixFormat::Tsv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

struct RawMatrix {
    names: Vec<String>,
    width: usize,
    lists: Vec<Vec<usize>>,
}

fn parse_tsv<R: BufRead>(source: R, column: &str) -> Result<RawMatrix> {
    let mut lines = source.lines().enumerate().map(|(i, l)| {
        l.map(|l| (i + 1, l))
            .map_err(|e| Error::parse(Location::Line(i + 1), e.to_string()))
    });
    let (_, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(Location::Line(1), "missing header"))?;
    let dims: Vec<_> = header.split_whitespace().map(str::parse::<usize>).collect();
    let (n, width) = match dims.as_slice() {
        [Ok(n), Ok(w)] if *n > 0 && *w > 0 => (*n, *w),
        _ => {
            return Err(Error::parse(
                Location::Line(1),
                format!("malformed header {header:?}, expected `<tests> <{column}s>` with positive counts"),
            ))
        }
    };

    let mut names = Vec::with_capacity(n);
    let mut lists = Vec::with_capacity(n);
    let mut seen = HashMap::with_capacity(n);
    for item in lines {
        let (lineno, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        if names.len() == n {
            return Err(Error::parse(
                Location::Line(lineno),
                format!("more rows than the {n} declared in the header"),
            ));
        }
        let (name, rest) = line.split_once('\t').unwrap_or((line.as_str(), ""));
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::parse(
                Location::Line(lineno),
                format!("malformed test name {name:?}"),
            ));
        }
        if let Some(first) = seen.insert(name.to_string(), lineno) {
            return Err(Error::parse(
                Location::Line(lineno),
                format!("duplicate test name `{name}` (first seen on line {first})"),
            ));
        }
        let mut list = Vec::new();
        for tok in rest.split_whitespace() {
            let idx: usize = tok.parse().map_err(|_| {
                Error::parse(Location::Line(lineno), format!("malformed {column} index {tok:?}"))
            })?;
            if idx >= width {
                return Err(Error::parse(
                    Location::Line(lineno),
                    format!("{column} index out of range: {idx} >= {width}"),
                ));
            }
            list.push(idx);
        }
        names.push(name.to_string());
        lists.push(list);
    }
    if names.len() != n {
        return Err(Error::parse(
            Location::Line(names.len() + 2),
            format!("header declares {n} rows but found {}", names.len()),
        ));
    }
    Ok(RawMatrix {
        names,
        width,
        lists,
    })
}

fn check_json(names: &[&str], lists: &[&[usize]], width: usize, column: &str) -> Result<()> {
    let mut seen = HashMap::new();
    for (e, (name, list)) in names.iter().zip(lists).enumerate() {
        if let Some(first) = seen.insert(*name, e) {
            return Err(Error::parse(
                Location::Entry(e),
                format!("duplicate test name `{name}` (first at tests[{first}])"),
            ));
        }
        if let Some(&idx) = list.iter().find(|&&i| i >= width) {
            return Err(Error::parse(
                Location::Entry(e),
                format!("{column} index out of range: {idx} >= {width}"),
            ));
        }
    }
    Ok(())
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(
        Location::Json {
            line: e.line(),
            column: e.column(),
        },
        e.to_string(),
    )
}

#[derive(Serialize, Deserialize)]
struct CoverageDoc {
    units: usize,
    tests: Vec<CoverageEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoverageEntry {
    name: String,
    #[serde(default)]
    covers: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct KillDoc {
    faults: usize,
    tests: Vec<KillEntry>,
}

#[derive(Serialize, Deserialize)]
struct KillEntry {
    name: String,
    #[serde(default)]
    kills: Vec<usize>,
}

pub fn parse_coverage<R: BufRead>(source: R, format: MatrixFormat) -> Result<CoverageMatrix> {
    match format {
        MatrixFormat::Tsv => {
            let raw = parse_tsv(source, "unit")?;
            CoverageMatrix::new(raw.names, raw.width, raw.lists)
        }
        MatrixFormat::Json => {
            let doc: CoverageDoc = serde_json::from_reader(source).map_err(json_error)?;
            let names: Vec<&str> = doc.tests.iter().map(|t| t.name.as_str()).collect();
            let lists: Vec<&[usize]> = doc.tests.iter().map(|t| t.covers.as_slice()).collect();
            check_json(&names, &lists, doc.units, "unit")?;
            let (names, lists) = doc.tests.into_iter().map(|t| (t.name, t.covers)).unzip();
            CoverageMatrix::new(names, doc.units, lists)
        }
    }
}

pub fn parse_kill<R: BufRead>(source: R, format: MatrixFormat) -> Result<KillMatrix> {
    match format {
        MatrixFormat::Tsv => {
            let raw = parse_tsv(source, "fault")?;
            KillMatrix::new(raw.names, raw.width, raw.lists)
        }
        MatrixFormat::Json => {
            let doc: KillDoc = serde_json::from_reader(source).map_err(json_error)?;
            let names: Vec<&str> = doc.tests.iter().map(|t| t.name.as_str()).collect();
            let lists: Vec<&[usize]> = doc.tests.iter().map(|t| t.kills.as_slice()).collect();
            check_json(&names, &lists, doc.faults, "fault")?;
            let (names, lists) = doc.tests.into_iter().map(|t| (t.name, t.kills)).unzip();
            KillMatrix::new(names, doc.faults, lists)
        }
    }
}

fn write_tsv<W: Write>(
    out: &mut W,
    names: &[String],
    width: usize,
    rows: &[super::BitRow],
) -> std::io::Result<()> {
    writeln!(out, "{} {}", names.len(), width)?;
    for (name, row) in names.iter().zip(rows) {
        let cols: Vec<String> = row.ones().map(|i| i.to_string()).collect();
        writeln!(out, "{name}\t{}", cols.join(" "))?;
    }
    Ok(())
}

pub fn write_coverage<W: Write>(
    out: &mut W,
    matrix: &CoverageMatrix,
    format: MatrixFormat,
) -> std::io::Result<()> {
    match format {
        MatrixFormat::Tsv => write_tsv(out, matrix.test_names(), matrix.unit_count(), matrix.rows()),
        MatrixFormat::Json => {
            let doc = CoverageDoc {
                units: matrix.unit_count(),
                tests: matrix
                    .test_names()
                    .iter()
                    .zip(matrix.rows())
                    .map(|(n, r)| CoverageEntry {
                        name: n.clone(),
                        covers: r.ones().collect(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)
        }
    }
}

pub fn write_kill<W: Write>(
    out: &mut W,
    matrix: &KillMatrix,
    format: MatrixFormat,
) -> std::io::Result<()> {
    match format {
        MatrixFormat::Tsv => write_tsv(out, matrix.test_names(), matrix.fault_count(), matrix.rows()),
        MatrixFormat::Json => {
            let doc = KillDoc {
                faults: matrix.fault_count(),
                tests: matrix
                    .test_names()
                    .iter()
                    .zip(matrix.rows())
                    .map(|(n, r)| KillEntry {
                        name: n.clone(),
                        kills: r.ones().collect(),
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)
        }
    }
}
