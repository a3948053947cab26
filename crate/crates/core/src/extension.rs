//! One-row extensions of tuples of orthogonal Latin rectangles.

use std::ops::ControlFlow;

use crate::error::{MolrError, Result};
use crate::perm::Permutation;
use crate::rect::Rectangle;
use crate::tuple::{PairUsage, Tuple};

/// One new row per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowTriple {
    pub rows: Vec<Permutation>,
}

impl RowTriple {
    pub fn append_to(&self, tuple: &Tuple) -> Tuple {
        let rows: Vec<&[u8]> = self.rows.iter().map(Permutation::images).collect();
        tuple.with_row(&rows)
    }
}

/// Which extensions to visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionFilter {
    All,
    /// Only extensions of a normalized tuple that are themselves normalized.
    Normalized,
}

/// Flat list of candidate rows, each of length `n`, in descending lexicographic order.
#[derive(Clone, Debug)]
pub(crate) struct RowList {
    n: usize,
    rows: Vec<u8>,
}

impl RowList {
    pub(crate) fn len(&self) -> usize {
        self.rows.len() / self.n.max(1)
    }

    pub(crate) fn get(&self, i: usize) -> &[u8] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }
}

/// Rows that keep a rectangle with the given column masks Latin, descending.
pub(crate) fn candidates_for_masks(n: usize, column_masks: &[u64]) -> RowList {
    fn go(c: usize, n: usize, masks: &[u64], used: u64, row: &mut [u8], out: &mut Vec<u8>) {
        if c == n {
            out.extend_from_slice(row);
            return;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut avail = full & !masks[c] & !used;
        while avail != 0 {
            let x = 63 - avail.leading_zeros() as u64;
            avail &= !(1 << x);
            row[c] = x as u8;
            go(c + 1, n, masks, used | 1 << x, row, out);
        }
    }
    let mut out = Vec::new();
    let mut row = vec![0u8; n];
    go(0, n, column_masks, 0, &mut row, &mut out);
    RowList { n, rows: out }
}

fn column_masks(rect: &Rectangle) -> Vec<u64> {
    (0..rect.n()).map(|c| rect.column_mask(c)).collect()
}

/// All permutations that can be appended to `rect` as a new row, descending.
pub fn candidate_rows(rect: &Rectangle) -> Result<Vec<Permutation>> {
    if rect.k() >= rect.n() {
        return Err(MolrError::Complete {
            k: rect.k(),
            n: rect.n(),
        });
    }
    let list = candidates_for_masks(rect.n(), &column_masks(rect));
    Ok((0..list.len())
        .map(|i| Permutation::from_vec_unchecked(list.get(i).to_vec()))
        .collect())
}

/// Every row tuple that extends `tuple` to a valid tuple with one more row.
/// Order is descending per member, nested with member 0 outermost.
pub fn extend_tuple(tuple: &Tuple) -> Result<Vec<RowTriple>> {
    let mut out = Vec::new();
    let _ = for_each_extension(tuple, ExtensionFilter::All, |rows| {
        out.push(RowTriple {
            rows: rows
                .iter()
                .map(|r| Permutation::from_vec_unchecked(r.to_vec()))
                .collect(),
        });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Visits extensions in the order of [`extend_tuple`]; `visit` may stop early.
pub fn for_each_extension<F>(tuple: &Tuple, filter: ExtensionFilter, visit: F) -> Result<ControlFlow<()>>
where
    F: FnMut(&[&[u8]]) -> ControlFlow<()>,
{
    for_each_extension_in(tuple, filter, None, visit)
}

/// Number of rows member 0 may take in an extension under `filter`.
pub(crate) fn first_member_choices(tuple: &Tuple, filter: ExtensionFilter) -> Result<usize> {
    let (_, k, n) = tuple.shape();
    if k >= n {
        return Err(MolrError::Complete { k, n });
    }
    let list = candidates_for_masks(n, &column_masks(&tuple.member(0)));
    Ok(match filter {
        ExtensionFilter::Normalized if k >= 2 => {
            let last = tuple.row(k - 1, 0);
            (0..list.len()).filter(|&i| list.get(i) < last).count()
        }
        _ => list.len(),
    })
}

/// As [`for_each_extension`], restricted to the member-0 rows whose
/// positions (in the filtered descending list) fall in `part`.
pub(crate) fn for_each_extension_in<F>(
    tuple: &Tuple,
    filter: ExtensionFilter,
    part: Option<std::ops::Range<usize>>,
    mut visit: F,
) -> Result<ControlFlow<()>>
where
    F: FnMut(&[&[u8]]) -> ControlFlow<()>,
{
    let (t, k, n) = tuple.shape();
    if k >= n {
        return Err(MolrError::Complete { k, n });
    }
    let usage = PairUsage::from_tuple(tuple);
    let lists: Vec<RowList> = (0..t)
        .map(|s| candidates_for_masks(n, &column_masks(&tuple.member(s))))
        .collect();

    let mut first: Vec<u32> = (0..lists[0].len() as u32).collect();
    if filter == ExtensionFilter::Normalized && k >= 2 {
        let last = tuple.row(k - 1, 0);
        first.retain(|&i| lists[0].get(i as usize) < last);
    }
    if let Some(part) = part {
        let end = part.end.min(first.len());
        first = first[part.start.min(end)..end].to_vec();
    }
    let mut search = Search {
        t,
        lists: &lists,
        usage: &usage,
        adjacent_decreasing: filter == ExtensionFilter::Normalized && k == 1,
        levels: vec![vec![Vec::new(); t]; t],
        chosen: vec![0; t],
    };
    search.levels[0][0] = first;
    for (level, list) in search.levels[0].iter_mut().zip(&lists).skip(1) {
        *level = (0..list.len() as u32).collect();
    }
    Ok(search.descend(0, &mut visit))
}

struct Search<'a> {
    t: usize,
    lists: &'a [RowList],
    usage: &'a PairUsage,
    adjacent_decreasing: bool,
    /// `levels[d][u]`: indices into `lists[u]` still compatible at depth `d`.
    levels: Vec<Vec<Vec<u32>>>,
    chosen: Vec<u32>,
}

impl Search<'_> {
    fn descend<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[&[u8]]) -> ControlFlow<()>,
    {
        let current = std::mem::take(&mut self.levels[depth][depth]);
        let mut result = ControlFlow::Continue(());
        for &idx in &current {
            self.chosen[depth] = idx;
            if depth + 1 == self.t {
                let rows: Vec<&[u8]> = (0..self.t)
                    .map(|s| self.lists[s].get(self.chosen[s] as usize))
                    .collect();
                if visit(&rows).is_break() {
                    result = ControlFlow::Break(());
                    break;
                }
                continue;
            }
            let x = self.lists[depth].get(idx as usize);
            let mut dead = false;
            for u in depth + 1..self.t {
                let mut next = std::mem::take(&mut self.levels[depth + 1][u]);
                next.clear();
                let list = &self.lists[u];
                let bound = (self.adjacent_decreasing && u == depth + 1).then_some(x);
                for &j in &self.levels[depth][u] {
                    let y = list.get(j as usize);
                    if bound.is_some_and(|b| y >= b) {
                        continue;
                    }
                    if self.usage.compatible(depth, u, x, y) {
                        next.push(j);
                    }
                }
                dead |= next.is_empty();
                self.levels[depth + 1][u] = next;
                if dead {
                    break;
                }
            }
            if dead {
                continue;
            }
            if self.descend(depth + 1, visit).is_break() {
                result = ControlFlow::Break(());
                break;
            }
        }
        self.levels[depth][depth] = current;
        result
    }
}

/// Whether a tuple admits another row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Maximality {
    Extendable,
    Maximal,
    /// k = n: nothing can be added, trivially.
    Complete,
}

pub fn maximality(tuple: &Tuple) -> Maximality {
    if tuple.k() >= tuple.n() {
        return Maximality::Complete;
    }
    let found = for_each_extension(tuple, ExtensionFilter::All, |_| ControlFlow::Break(()))
        .expect("k < n checked above");
    if found.is_break() {
        Maximality::Extendable
    } else {
        Maximality::Maximal
    }
}

/// True iff no row can be added (including the complete case k = n).
pub fn is_maximal(tuple: &Tuple) -> bool {
    maximality(tuple) != Maximality::Extendable
}

/// Columns in which every member can receive a next-row symbol at once,
/// respecting column-Latin constraints and all used symbol pairs.
pub fn open_positions(tuple: &Tuple) -> Result<Vec<usize>> {
    let (t, k, n) = tuple.shape();
    if k >= n {
        return Err(MolrError::Complete { k, n });
    }
    let usage = PairUsage::from_tuple(tuple);
    let members = tuple.members();
    let full = (1u64 << n) - 1;
    let open = (0..n)
        .filter(|&c| {
            let avail: Vec<u64> = members.iter().map(|m| full & !m.column_mask(c)).collect();
            let mut picked = vec![0u8; t];
            fillable(0, &avail, &usage, &mut picked)
        })
        .collect();
    Ok(open)
}

fn fillable(s: usize, avail: &[u64], usage: &PairUsage, picked: &mut [u8]) -> bool {
    if s == avail.len() {
        return true;
    }
    let mut bits = avail[s];
    while bits != 0 {
        let x = bits.trailing_zeros() as u8;
        bits &= bits - 1;
        if (0..s).all(|a| usage.used(a, s, picked[a]) & (1 << x) == 0) {
            picked[s] = x;
            if fillable(s + 1, avail, usage, picked) {
                return true;
            }
        }
    }
    false
}
