//! Strength-k combinatorial test suites over binary input qubits.
//!
//! A [`ValueSchema`] fixes `k` of the `width` input slots to given bits; a
//! [`TestSuite`] of strength `k` contains, for every such schema, at least one
//! row agreeing with it. [`generate`] builds suites in parameter order
//! (IPOG), [`verify_coverage`] checks them exhaustively.

mod ipog;

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

pub use ipog::generate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error("strength {k} out of range for width {width} (need 1 <= k <= width)")]
    Strength { k: usize, width: usize },
    #[error("row `{row}` has width {found}, expected {expected}")]
    RowWidth {
        row: String,
        expected: usize,
        found: usize,
    },
    #[error("row `{0}` contains characters other than 0 and 1")]
    RowCharacters(String),
    #[error("seeds line {line}: {source}")]
    SeedLine {
        line: usize,
        #[source]
        source: Box<CoveringError>,
    },
}

/// Partial assignment fixing `values[j]` at slot `positions[j]`; other slots are don't-care.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueSchema {
    pub width: usize,
    pub positions: Vec<usize>,
    pub values: Vec<bool>,
}

impl ValueSchema {
    pub fn strength(&self) -> usize {
        self.positions.len()
    }

    fn from_index(width: usize, positions: &[usize], value_index: usize) -> Self {
        let k = positions.len();
        ValueSchema {
            width,
            positions: positions.to_vec(),
            values: (0..k)
                .map(|j| (value_index >> (k - 1 - j)) & 1 == 1)
                .collect(),
        }
    }
}

impl fmt::Display for ValueSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut slots = vec!["-"; self.width];
        for (&p, &v) in self.positions.iter().zip(&self.values) {
            if p < self.width {
                slots[p] = if v { "1" } else { "0" };
            }
        }
        write!(f, "({})", slots.join(","))
    }
}

/// Rows of a combinatorial suite. The first `seeded_prefix` rows are the user's seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSuite {
    pub strength: usize,
    pub width: usize,
    pub rows: Vec<String>,
    pub seeded_prefix: usize,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn seeds(&self) -> &[String] {
        &self.rows[..self.seeded_prefix]
    }

    /// CSV with header `q<i0>,q<i1>,...` and one line per row, one column per input qubit.
    pub fn to_csv(&self, input_qubits: &[usize]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = input_qubits.iter().map(|q| format!("q{q}")).collect();
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.chars().map(|c| c.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

/// Every strength-`k` schema over `width` slots, ordered by positions then values.
pub fn enumerate_schemas(
    width: usize,
    k: usize,
) -> Result<impl Iterator<Item = ValueSchema>, CoveringError> {
    check_strength(width, k)?;
    Ok((0..width).combinations(k).flat_map(move |positions| {
        (0..1usize << k).map(move |v| ValueSchema::from_index(width, &positions, v))
    }))
}

pub(crate) fn check_strength(width: usize, k: usize) -> Result<(), CoveringError> {
    if k == 0 || k > width {
        return Err(CoveringError::Strength { k, width });
    }
    Ok(())
}

pub(crate) fn check_row(row: &str, width: usize) -> Result<(), CoveringError> {
    if !crate::sim::is_bitstring(row) {
        return Err(CoveringError::RowCharacters(row.to_string()));
    }
    if row.len() != width {
        return Err(CoveringError::RowWidth {
            row: row.to_string(),
            expected: width,
            found: row.len(),
        });
    }
    Ok(())
}

/// Whether `row` agrees with `s` at every fixed position.
pub fn covers(row: &str, s: &ValueSchema) -> Result<bool, CoveringError> {
    check_row(row, s.width)?;
    let bytes = row.as_bytes();
    Ok(s.positions
        .iter()
        .zip(&s.values)
        .all(|(&p, &v)| (bytes[p] == b'1') == v))
}

/// Strength-`k` schemas no row of `t` covers, in enumeration order.
pub fn verify_coverage(t: &TestSuite, k: usize) -> Vec<ValueSchema> {
    if k == 0 || k > t.width {
        return Vec::new();
    }
    let rows: Vec<&[u8]> = t.rows.iter().map(|r| r.as_bytes()).collect();
    let combos: Vec<Vec<usize>> = (0..t.width).combinations(k).collect();
    combos
        .par_iter()
        .flat_map_iter(|positions| {
            let mut seen = vec![false; 1 << k];
            for row in &rows {
                let idx = positions
                    .iter()
                    .fold(0usize, |acc, &p| (acc << 1) | usize::from(row[p] == b'1'));
                seen[idx] = true;
            }
            seen.into_iter()
                .enumerate()
                .filter(|(_, s)| !s)
                .map(|(v, _)| ValueSchema::from_index(t.width, positions, v))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Reads a seeding-rows file: one bitstring per line, `#` starts a comment.
pub fn parse_seed_rows(text: &str, width: usize) -> Result<Vec<String>, CoveringError> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        check_row(content, width).map_err(|e| CoveringError::SeedLine {
            line: n + 1,
            source: Box::new(e),
        })?;
        rows.push(content.to_string());
    }
    Ok(rows)
}
