use std::cmp::Ordering;
use std::fmt;

use crate::error::{MolrError, Result};
use crate::rect::{check_order, first_pair_repeat, Rectangle};

/// An ordered set of `t` pairwise orthogonal k×n Latin rectangles.
///
/// Cells are stored row-major across members: row 0 of every member, then
/// row 1 of every member, and so on. With this layout the row-by-row
/// lexicographic order on tuples is plain slice order on `cells`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    t: usize,
    k: usize,
    n: usize,
    cells: Vec<u8>,
}

impl Tuple {
    pub fn new(members: Vec<Rectangle>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| MolrError::Shape("a tuple needs at least one member".into()))?;
        let (k, n) = (first.k(), first.n());
        if members.iter().any(|m| m.k() != k || m.n() != n) {
            return Err(MolrError::Shape("members have different shapes".into()));
        }
        let t = members.len();
        let mut cells = Vec::with_capacity(t * k * n);
        for r in 0..k {
            for m in &members {
                cells.extend_from_slice(m.row(r));
            }
        }
        Self::from_cells(t, k, n, cells)
    }

    /// Fully validates the cell array (layout `[row][member][col]`).
    pub fn from_cells(t: usize, k: usize, n: usize, cells: Vec<u8>) -> Result<Self> {
        check_order(n)?;
        if t == 0 || k == 0 || k > n || cells.len() != t * k * n {
            return Err(MolrError::Shape(format!(
                "{} cells cannot form {t} members of shape {k}x{n}",
                cells.len()
            )));
        }
        let tuple = Self { t, k, n, cells };
        tuple.validate()?;
        Ok(tuple)
    }

    pub(crate) fn from_cells_unchecked(t: usize, k: usize, n: usize, cells: Vec<u8>) -> Self {
        debug_assert_eq!(cells.len(), t * k * n);
        Self { t, k, n, cells }
    }

    /// The 1×n tuple whose rows are all the identity.
    pub fn identity(t: usize, n: usize) -> Self {
        let row: Vec<u8> = (0..n as u8).collect();
        Self::from_cells_unchecked(t, 1, n, row.repeat(t))
    }

    fn validate(&self) -> Result<()> {
        let members: Vec<Rectangle> = (0..self.t).map(|s| self.member(s)).collect();
        for (s, m) in members.iter().enumerate() {
            Rectangle::from_cells(m.k(), m.n(), m.cells().to_vec()).map_err(|e| match e {
                MolrError::NotLatin { row, col, symbol, .. } => MolrError::NotLatin {
                    member: s,
                    row,
                    col,
                    symbol,
                },
                other => other,
            })?;
        }
        for a in 0..self.t {
            for b in a + 1..self.t {
                if let Some((row, col, x, y)) = first_pair_repeat(&members[a], &members[b]) {
                    return Err(MolrError::NotOrthogonal {
                        first: a,
                        second: b,
                        row,
                        col,
                        x,
                        y,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, r: usize, s: usize) -> &[u8] {
        let start = (r * self.t + s) * self.n;
        &self.cells[start..start + self.n]
    }

    /// All member rows at row index `r`, concatenated.
    pub fn row_block(&self, r: usize) -> &[u8] {
        let w = self.t * self.n;
        &self.cells[r * w..(r + 1) * w]
    }

    pub fn get(&self, s: usize, r: usize, c: usize) -> u8 {
        self.cells[(r * self.t + s) * self.n + c]
    }

    pub fn member(&self, s: usize) -> Rectangle {
        let mut cells = Vec::with_capacity(self.k * self.n);
        for r in 0..self.k {
            cells.extend_from_slice(self.row(r, s));
        }
        Rectangle::from_cells_unchecked(self.k, self.n, cells)
    }

    pub fn members(&self) -> Vec<Rectangle> {
        (0..self.t).map(|s| self.member(s)).collect()
    }

    /// The first `k` rows.
    pub fn prefix(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.k);
        Self::from_cells_unchecked(self.t, k, self.n, self.cells[..k * self.t * self.n].to_vec())
    }

    /// Appends one row per member without validation.
    pub fn with_row(&self, rows: &[&[u8]]) -> Self {
        assert_eq!(rows.len(), self.t);
        let mut cells = Vec::with_capacity((self.k + 1) * self.t * self.n);
        cells.extend_from_slice(&self.cells);
        for r in rows {
            cells.extend_from_slice(r);
        }
        Self::from_cells_unchecked(self.t, self.k + 1, self.n, cells)
    }

    /// Selects members in the given order (may drop or repeat none-checked).
    pub fn select_members(&self, order: &[usize]) -> Self {
        let mut cells = Vec::with_capacity(order.len() * self.k * self.n);
        for r in 0..self.k {
            for &s in order {
                cells.extend_from_slice(self.row(r, s));
            }
        }
        Self::from_cells_unchecked(order.len(), self.k, self.n, cells)
    }

    /// Appends a member without validation.
    pub fn with_member(&self, m: &Rectangle) -> Self {
        assert_eq!((m.k(), m.n()), (self.k, self.n));
        let mut cells = Vec::with_capacity((self.t + 1) * self.k * self.n);
        for r in 0..self.k {
            cells.extend_from_slice(self.row_block(r));
            cells.extend_from_slice(m.row(r));
        }
        Self::from_cells_unchecked(self.t + 1, self.k, self.n, cells)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.t, self.k, self.n)
    }
}

impl Ord for Tuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shape()
            .cmp(&other.shape())
            .then_with(|| self.cells.cmp(&other.cells))
    }
}

impl PartialOrd for Tuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tuple({})", crate::io::format_tuple(self))
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::format_tuple(self))
    }
}

/// Row-major lexicographic comparison of same-shape tuples.
pub fn triple_lex_cmp(a: &Tuple, b: &Tuple) -> Result<Ordering> {
    if a.shape() != b.shape() {
        return Err(MolrError::Shape(format!(
            "cannot compare {:?} with {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.cells.cmp(&b.cells))
}

/// First rows identity, second rows strictly decreasing across members, and
/// rows 2..k of the first member strictly decreasing.
pub fn is_normalized(tuple: &Tuple) -> bool {
    let (t, k) = (tuple.t, tuple.k);
    if !(0..t).all(|s| tuple.row(0, s).iter().enumerate().all(|(i, &x)| i == x as usize)) {
        return false;
    }
    if k >= 2 && !(1..t).all(|s| tuple.row(1, s - 1) > tuple.row(1, s)) {
        return false;
    }
    (2..k).all(|r| tuple.row(r - 1, 0) > tuple.row(r, 0))
}

/// Used ordered symbol pairs, one n×n bit table per unordered member pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairUsage {
    t: usize,
    n: usize,
    tables: Vec<u64>,
}

impl PairUsage {
    pub fn empty(t: usize, n: usize) -> Self {
        Self {
            t,
            n,
            tables: vec![0; t * t.saturating_sub(1) / 2 * n],
        }
    }

    pub fn from_tuple(tuple: &Tuple) -> Self {
        let mut usage = Self::empty(tuple.t, tuple.n);
        for r in 0..tuple.k {
            let rows: Vec<&[u8]> = (0..tuple.t).map(|s| tuple.row(r, s)).collect();
            usage.add_row(&rows);
        }
        usage
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b && b < self.t);
        a * (2 * self.t - a - 1) / 2 + (b - a - 1)
    }

    /// Bitmask of `y` with `(x, y)` used between members `a < b`.
    #[inline]
    pub fn used(&self, a: usize, b: usize, x: u8) -> u64 {
        self.tables[self.pair_index(a, b) * self.n + x as usize]
    }

    /// True iff placing `row_a` and `row_b` in members `a < b` reuses no pair.
    #[inline]
    pub fn compatible(&self, a: usize, b: usize, row_a: &[u8], row_b: &[u8]) -> bool {
        let base = self.pair_index(a, b) * self.n;
        row_a
            .iter()
            .zip(row_b)
            .all(|(&x, &y)| self.tables[base + x as usize] & (1 << y) == 0)
    }

    pub fn add_row(&mut self, rows: &[&[u8]]) {
        self.toggle_row(rows, true);
    }

    pub fn remove_row(&mut self, rows: &[&[u8]]) {
        self.toggle_row(rows, false);
    }

    fn toggle_row(&mut self, rows: &[&[u8]], set: bool) {
        assert_eq!(rows.len(), self.t);
        for a in 0..self.t {
            for b in a + 1..self.t {
                let base = self.pair_index(a, b) * self.n;
                for (&x, &y) in rows[a].iter().zip(rows[b]) {
                    let word = &mut self.tables[base + x as usize];
                    if set {
                        *word |= 1 << y;
                    } else {
                        *word &= !(1 << y);
                    }
                }
            }
        }
    }

    pub fn popcount(&self, a: usize, b: usize) -> u32 {
        let base = self.pair_index(a, b) * self.n;
        self.tables[base..base + self.n]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_tuple;

    const APPENDIX_A: &str = "0123,3210,2301,1032|0123,2301,1032,3210|0123,1032,3210,2301";

    #[test]
    fn lex_on_swapped_members() {
        let a = parse_tuple(APPENDIX_A).unwrap();
        let swapped = a.select_members(&[0, 2, 1]);
        assert_eq!(triple_lex_cmp(&a, &a).unwrap(), Ordering::Equal);
        assert_eq!(triple_lex_cmp(&a, &swapped).unwrap(), Ordering::Greater);
    }

    #[test]
    fn lex_decided_by_last_row() {
        let a = parse_tuple(APPENDIX_A).unwrap();
        let mut cells = a.cells().to_vec();
        let last = cells.len() - 4;
        cells[last..].copy_from_slice(&[2, 3, 1, 0]);
        let b = Tuple::from_cells_unchecked(3, 4, 4, cells);
        // 2301 vs 2310
        assert_eq!(triple_lex_cmp(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(triple_lex_cmp(&b, &a).unwrap(), Ordering::Greater);
        assert!(triple_lex_cmp(&a, &a.prefix(2)).is_err());
    }

    #[test]
    fn normalization_examples() {
        let a = parse_tuple(APPENDIX_A).unwrap();
        assert!(is_normalized(&a));
        assert!(!is_normalized(&a.select_members(&[2, 1, 0])));
        let mut cells = Vec::new();
        for r in [0, 2, 1, 3] {
            cells.extend_from_slice(a.row_block(r));
        }
        let rows_swapped = Tuple::from_cells(3, 4, 4, cells).unwrap();
        assert!(!is_normalized(&rows_swapped));
    }

    #[test]
    fn pair_usage_counts() {
        let a = parse_tuple(APPENDIX_A).unwrap();
        let usage = PairUsage::from_tuple(&a);
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(usage.popcount(x, y), 16);
        }
        let mut inc = PairUsage::from_tuple(&a.prefix(3));
        let last: Vec<&[u8]> = (0..3).map(|s| a.row(3, s)).collect();
        inc.add_row(&last);
        assert_eq!(inc, usage);
        inc.remove_row(&last);
        assert_eq!(inc, PairUsage::from_tuple(&a.prefix(3)));
    }

    #[test]
    fn constructor_rejects_non_orthogonal() {
        let err = parse_tuple("0123,1032|0123,1032").unwrap_err();
        assert!(matches!(err, MolrError::NotOrthogonal { first: 0, second: 1, .. }));
    }
}
