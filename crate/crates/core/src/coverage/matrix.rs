use std::collections::HashSet;

use super::BitRow;
use crate::error::{Error, Result};

fn check_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::InvalidMatrix("matrix needs at least one test".into()));
    }
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidMatrix(format!(
                "test name {name:?} must be non-empty and contain no whitespace"
            )));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::InvalidMatrix(format!("duplicate test name `{name}`")));
        }
    }
    Ok(())
}

fn build_rows(width: usize, lists: Vec<Vec<usize>>, what: &str) -> Result<Vec<BitRow>> {
    lists
        .into_iter()
        .enumerate()
        .map(|(t, list)| {
            if let Some(&bad) = list.iter().find(|&&i| i >= width) {
                return Err(Error::InvalidMatrix(format!(
                    "test {t}: {what} index {bad} out of range (width {width})"
                )));
            }
            Ok(BitRow::from_indices(width, list))
        })
        .collect()
}

/// Tests × code units. Row `i` bit `j` is set iff test `i` covers unit `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    test_names: Vec<String>,
    unit_count: usize,
    rows: Vec<BitRow>,
}

impl CoverageMatrix {
    /// Builds a matrix from per-test lists of covered unit indices.
    pub fn new(test_names: Vec<String>, unit_count: usize, covers: Vec<Vec<usize>>) -> Result<Self> {
        if covers.len() != test_names.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} names but {} rows",
                test_names.len(),
                covers.len()
            )));
        }
        let rows = build_rows(unit_count, covers, "unit")?;
        Self::from_rows(test_names, unit_count, rows)
    }

    pub fn from_rows(test_names: Vec<String>, unit_count: usize, rows: Vec<BitRow>) -> Result<Self> {
        check_names(&test_names)?;
        if unit_count == 0 {
            return Err(Error::InvalidMatrix("unit count must be positive".into()));
        }
        if rows.len() != test_names.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} names but {} rows",
                test_names.len(),
                rows.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.width() != unit_count) {
            return Err(Error::InvalidMatrix(format!(
                "row {bad} has width {} instead of {unit_count}",
                rows[bad].width()
            )));
        }
        Ok(CoverageMatrix {
            test_names,
            unit_count,
            rows,
        })
    }

    /// Names tests `t0, t1, ...`.
    pub fn with_default_names(unit_count: usize, covers: Vec<Vec<usize>>) -> Result<Self> {
        let names = (0..covers.len()).map(|i| format!("t{i}")).collect();
        Self::new(names, unit_count, covers)
    }

    pub fn test_count(&self) -> usize {
        self.rows.len()
    }

    pub fn unit_count(&self) -> usize {
        self.unit_count
    }

    pub fn test_names(&self) -> &[String] {
        &self.test_names
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn row(&self, test: usize) -> &BitRow {
        &self.rows[test]
    }

    pub fn covers(&self, test: usize, unit: usize) -> bool {
        self.rows[test].get(unit)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.test_names.iter().position(|n| n == name)
    }

    /// Union of every row.
    pub fn union(&self) -> BitRow {
        let mut all = BitRow::new(self.unit_count);
        for r in &self.rows {
            all.or_assign(r);
        }
        all
    }
}

/// Tests × detected faults. Every fault column has at least one killer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KillMatrix {
    test_names: Vec<String>,
    fault_count: usize,
    rows: Vec<BitRow>,
}

impl KillMatrix {
    pub fn new(test_names: Vec<String>, fault_count: usize, kills: Vec<Vec<usize>>) -> Result<Self> {
        check_names(&test_names)?;
        if fault_count == 0 {
            return Err(Error::InvalidMatrix("fault count must be positive".into()));
        }
        if kills.len() != test_names.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} names but {} rows",
                test_names.len(),
                kills.len()
            )));
        }
        let rows = build_rows(fault_count, kills, "fault")?;
        let mut detected = BitRow::new(fault_count);
        for r in &rows {
            detected.or_assign(r);
        }
        if let Some(fault) = (0..fault_count).find(|&f| !detected.get(f)) {
            return Err(Error::UndetectedFault { fault });
        }
        Ok(KillMatrix {
            test_names,
            fault_count,
            rows,
        })
    }

    pub fn test_count(&self) -> usize {
        self.rows.len()
    }

    pub fn fault_count(&self) -> usize {
        self.fault_count
    }

    pub fn test_names(&self) -> &[String] {
        &self.test_names
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn kills(&self, test: usize, fault: usize) -> bool {
        self.rows[test].get(fault)
    }

    /// Tests that kill `fault`, ascending.
    pub fn killers(&self, fault: usize) -> Vec<usize> {
        (0..self.rows.len()).filter(|&t| self.rows[t].get(fault)).collect()
    }
}
