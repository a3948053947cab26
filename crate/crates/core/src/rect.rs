use std::fmt;

use crate::error::{MolrError, Result};
use crate::perm::{is_permutation, Permutation};

/// A k×n Latin rectangle stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rectangle {
    k: usize,
    n: usize,
    cells: Vec<u8>,
}

impl Rectangle {
    pub fn new(rows: Vec<Permutation>) -> Result<Self> {
        let n = rows.first().map(Permutation::len).ok_or_else(|| {
            MolrError::Shape("a rectangle needs at least one row".into())
        })?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(MolrError::Shape("rows have different lengths".into()));
        }
        let cells = rows.iter().flat_map(|r| r.images().iter().copied()).collect();
        Self::from_cells(rows.len(), n, cells)
    }

    /// Validates shape, rows and the Latin condition.
    pub fn from_cells(k: usize, n: usize, cells: Vec<u8>) -> Result<Self> {
        check_order(n)?;
        if k == 0 || k > n || cells.len() != k * n {
            return Err(MolrError::Shape(format!(
                "{} cells cannot form a {k}x{n} rectangle",
                cells.len()
            )));
        }
        for r in 0..k {
            let row = &cells[r * n..(r + 1) * n];
            if !is_permutation(row) {
                return Err(MolrError::NotAPermutation {
                    n,
                    detail: format!("row {r}"),
                });
            }
        }
        if let Some((row, col, symbol)) = first_column_repeat(k, n, &cells) {
            return Err(MolrError::NotLatin {
                member: 0,
                row,
                col,
                symbol,
            });
        }
        Ok(Self { k, n, cells })
    }

    pub(crate) fn from_cells_unchecked(k: usize, n: usize, cells: Vec<u8>) -> Self {
        debug_assert_eq!(cells.len(), k * n);
        Self { k, n, cells }
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

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks_exact(self.n)
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    /// Bitmask of symbols present in column `c`.
    pub fn column_mask(&self, c: usize) -> u64 {
        self.rows().fold(0, |m, row| m | 1 << row[c])
    }

    pub fn is_latin(&self) -> bool {
        is_latin(&self.rows().collect::<Vec<_>>())
    }

    /// Appends `row` without validation.
    pub fn with_row(&self, row: &[u8]) -> Self {
        let mut cells = self.cells.clone();
        cells.extend_from_slice(row);
        Self::from_cells_unchecked(self.k + 1, self.n, cells)
    }

    /// Applies `f` to every symbol.
    pub fn map_symbols(&self, f: impl Fn(u8) -> u8) -> Self {
        Self::from_cells_unchecked(self.k, self.n, self.cells.iter().map(|&x| f(x)).collect())
    }
}

impl fmt::Debug for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rectangle({})", crate::io::format_rectangle(self))
    }
}

pub(crate) fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > crate::MAX_ORDER {
        return Err(MolrError::OrderOutOfRange(n));
    }
    Ok(())
}

fn first_column_repeat(k: usize, n: usize, cells: &[u8]) -> Option<(usize, usize, u8)> {
    for c in 0..n {
        let mut seen = 0u64;
        for r in 0..k {
            let x = cells[r * n + c];
            if seen & (1 << x) != 0 {
                return Some((r, c, x));
            }
            seen |= 1 << x;
        }
    }
    None
}

/// True iff every row is a permutation of `0..n` and no column repeats a symbol.
pub fn is_latin(rows: &[&[u8]]) -> bool {
    let Some(n) = rows.first().map(|r| r.len()) else {
        return false;
    };
    if n == 0 || n > 64 || rows.len() > n {
        return false;
    }
    if rows.iter().any(|r| r.len() != n || !is_permutation(r)) {
        return false;
    }
    let cells: Vec<u8> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    first_column_repeat(rows.len(), n, &cells).is_none()
}

/// True iff all ordered symbol pairs `(a[r][c], b[r][c])` are distinct.
pub fn are_orthogonal(a: &Rectangle, b: &Rectangle) -> Result<bool> {
    if a.k != b.k || a.n != b.n {
        return Err(MolrError::Shape(format!(
            "{}x{} vs {}x{}",
            a.k, a.n, b.k, b.n
        )));
    }
    Ok(first_pair_repeat(a, b).is_none())
}

pub(crate) fn first_pair_repeat(a: &Rectangle, b: &Rectangle) -> Option<(usize, usize, u8, u8)> {
    let n = a.n;
    let mut used = vec![0u64; n];
    for r in 0..a.k {
        for c in 0..n {
            let (x, y) = (a.get(r, c), b.get(r, c));
            if used[x as usize] & (1 << y) != 0 {
                return Some((r, c, x, y));
            }
            used[x as usize] |= 1 << y;
        }
    }
    None
}
