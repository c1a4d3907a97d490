use itertools::Itertools;

use super::{check_row, check_strength, CoveringError, TestSuite};

type Row = Vec<Option<bool>>;

/// Tracks which value tuples of each `(k-1)`-subset of earlier columns,
/// extended by the current column, are already covered.
struct ColumnCoverage {
    column: usize,
    combos: Vec<Vec<usize>>,
    values: usize,
    covered: Vec<bool>,
}

impl ColumnCoverage {
    fn new(column: usize, k: usize) -> Self {
        let combos: Vec<Vec<usize>> = (0..column).combinations(k - 1).collect();
        let values = 1usize << k;
        ColumnCoverage {
            column,
            covered: vec![false; combos.len() * values],
            combos,
            values,
        }
    }

    /// Value index of `row` on combo `ci` with `last` in the current column,
    /// or `None` when a combo slot is still don't-care.
    fn index(&self, ci: usize, row: &Row, last: bool) -> Option<usize> {
        let mut idx = 0usize;
        for &p in &self.combos[ci] {
            idx = (idx << 1) | usize::from(row[p]?);
        }
        Some(ci * self.values + ((idx << 1) | usize::from(last)))
    }

    fn gain(&self, row: &Row, last: bool) -> usize {
        (0..self.combos.len())
            .filter_map(|ci| self.index(ci, row, last))
            .filter(|&i| !self.covered[i])
            .count()
    }

    fn mark(&mut self, row: &Row) {
        let Some(last) = row[self.column] else {
            return;
        };
        for ci in 0..self.combos.len() {
            if let Some(i) = self.index(ci, row, last) {
                self.covered[i] = true;
            }
        }
    }

    /// Schema behind flat index `i`: (positions incl. current column, bits).
    fn schema(&self, i: usize) -> (Vec<usize>, Vec<bool>) {
        let (ci, v) = (i / self.values, i % self.values);
        let mut positions = self.combos[ci].clone();
        positions.push(self.column);
        let k = positions.len();
        let bits = (0..k).map(|j| (v >> (k - 1 - j)) & 1 == 1).collect();
        (positions, bits)
    }
}

fn compatible(row: &Row, positions: &[usize], bits: &[bool]) -> bool {
    positions
        .iter()
        .zip(bits)
        .all(|(&p, &b)| row[p].is_none_or(|v| v == b))
}

/// Builds a strength-`k` suite over `width` binary slots containing `seeds`
/// as its leading rows.
///
/// Rows for the first `k` columns are the exhaustive assignments not already
/// supplied by a seed. Each further column is added horizontally (every
/// generated row takes the bit covering the most new schemas, ties going to
/// 0, and stays don't-care when neither bit helps) and then vertically
/// (each schema still missing is merged into the first compatible generated
/// row, or appended as a new row). Remaining don't-cares become 0 and
/// duplicate rows are dropped, keeping the earliest.
pub fn generate(width: usize, k: usize, seeds: &[String]) -> Result<TestSuite, CoveringError> {
    check_strength(width, k)?;
    let mut seed_rows: Vec<&str> = Vec::with_capacity(seeds.len());
    for s in seeds {
        check_row(s, width)?;
        if !seed_rows.contains(&s.as_str()) {
            seed_rows.push(s);
        }
    }
    let n_seeds = seed_rows.len();

    let mut rows: Vec<Row> = seed_rows
        .iter()
        .map(|s| s.bytes().map(|b| Some(b == b'1')).collect())
        .collect();

    let mut seeded_heads = vec![false; 1 << k];
    for row in &rows {
        let head = row[..k].iter().fold(0usize, |acc, v| {
            (acc << 1) | usize::from(v.unwrap_or(false))
        });
        seeded_heads[head] = true;
    }
    for (head, _) in seeded_heads.iter().enumerate().filter(|(_, s)| !**s) {
        let mut row: Row = vec![None; width];
        for (j, slot) in row.iter_mut().take(k).enumerate() {
            *slot = Some((head >> (k - 1 - j)) & 1 == 1);
        }
        rows.push(row);
    }

    for column in k..width {
        let mut cov = ColumnCoverage::new(column, k);
        for row in &rows[..n_seeds] {
            cov.mark(row);
        }

        for r in n_seeds..rows.len() {
            let (g0, g1) = (cov.gain(&rows[r], false), cov.gain(&rows[r], true));
            if g0 == 0 && g1 == 0 {
                continue;
            }
            rows[r][column] = Some(g1 > g0);
            cov.mark(&rows[r]);
        }

        for i in 0..cov.covered.len() {
            if cov.covered[i] {
                continue;
            }
            let (positions, bits) = cov.schema(i);
            let slot = (n_seeds..rows.len()).find(|&r| compatible(&rows[r], &positions, &bits));
            let r = slot.unwrap_or_else(|| {
                rows.push(vec![None; width]);
                rows.len() - 1
            });
            for (&p, &b) in positions.iter().zip(&bits) {
                rows[r][p] = Some(b);
            }
            cov.mark(&rows[r]);
        }
    }

    let mut out: Vec<String> = Vec::with_capacity(rows.len());
    for row in rows {
        let s: String = row
            .into_iter()
            .map(|v| if v.unwrap_or(false) { '1' } else { '0' })
            .collect();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(TestSuite {
        strength: k,
        width,
        rows: out,
        seeded_prefix: n_seeds,
    })
}
