use std::collections::BTreeMap;
use std::io::BufRead;

use super::{BitRow, CoverageMatrix};
use crate::error::{Error, Location, Result};

/// Partition of test indices into named groups, e.g. test methods into
/// their test classes. Iteration is ordered by group name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    groups: BTreeMap<String, Vec<usize>>,
}

impl GroupMap {
    /// Validates that `groups` partitions `0..test_count`.
    pub fn new(groups: BTreeMap<String, Vec<usize>>, test_count: usize) -> Result<Self> {
        let mut owner: Vec<Option<&str>> = vec![None; test_count];
        for (name, members) in &groups {
            if members.is_empty() {
                return Err(Error::InvalidGroups(format!("group `{name}` is empty")));
            }
            for &t in members {
                let slot = owner.get_mut(t).ok_or_else(|| {
                    Error::InvalidGroups(format!(
                        "group `{name}` references unknown test index {t} (suite has {test_count})"
                    ))
                })?;
                if let Some(prev) = slot.replace(name) {
                    return Err(Error::InvalidGroups(format!(
                        "test {t} appears in both `{prev}` and `{name}`"
                    )));
                }
            }
        }
        if let Some(t) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidGroups(format!("test {t} belongs to no group")));
        }
        Ok(GroupMap { groups })
    }

    /// One group per test, named after the test.
    pub fn singletons(matrix: &CoverageMatrix) -> Self {
        let groups = matrix
            .test_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), vec![i]))
            .collect();
        GroupMap { groups }
    }

    /// Reads `<group>\t<test> <test> ...` lines, resolving names against `matrix`.
    pub fn parse_tsv<R: BufRead>(source: R, matrix: &CoverageMatrix) -> Result<Self> {
        let mut groups = BTreeMap::new();
        for (i, line) in source.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(Location::Line(lineno), e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (name, rest) = line.split_once('\t').unwrap_or((line.as_str(), ""));
            let name = name.trim();
            let members = rest
                .split_whitespace()
                .map(|test| {
                    matrix.index_of(test).ok_or_else(|| {
                        Error::parse(Location::Line(lineno), format!("unknown test `{test}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if groups.insert(name.to_string(), members).is_some() {
                return Err(Error::parse(
                    Location::Line(lineno),
                    format!("duplicate group `{name}`"),
                ));
            }
        }
        GroupMap::new(groups, matrix.test_count())
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// Collapses each group to one row holding the OR of its members' rows.
pub fn aggregate_rows(matrix: &CoverageMatrix, groups: &GroupMap) -> Result<CoverageMatrix> {
    let m = matrix.unit_count();
    let mut names = Vec::with_capacity(groups.len());
    let mut rows = Vec::with_capacity(groups.len());
    for (name, members) in groups.iter() {
        let mut row = BitRow::new(m);
        for &t in members {
            if t >= matrix.test_count() {
                return Err(Error::InvalidGroups(format!(
                    "group `{name}` references unknown test index {t}"
                )));
            }
            row.or_assign(matrix.row(t));
        }
        names.push(name.to_string());
        rows.push(row);
    }
    CoverageMatrix::from_rows(names, m, rows)
}
