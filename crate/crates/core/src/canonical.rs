//! Canonical representatives under isotopism, autotopism group orders and
//! normalized-orbit sizes.
//!
//! A transform `(d, i, sigma)` permutes columns by `sigma`, relabels symbols
//! so that row `i` of every member becomes the identity, moves row `i` to the
//! top and sorts the remaining rows in decreasing order of member `d`. It is
//! valid only when member `d` then holds the strictly largest second row; the
//! other members follow in decreasing order of their second rows. Every valid
//! transform yields a normalized isotope, and every normalized isotope arises
//! this way, so the canonical representative is the largest valid output.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{MolrError, Result};
use crate::perm::{next_permutation, Permutation};
use crate::tuple::{is_normalized, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    /// Member placed first.
    pub d: usize,
    /// Row promoted to the top.
    pub i: usize,
    /// Output column `c` takes input column `sigma(c)`.
    pub sigma: Permutation,
}

/// Applies one transform directly, step by step. `None` when member `d`
/// does not hold the largest second row.
pub fn transform(tuple: &Tuple, tr: &Transform) -> Result<Option<Tuple>> {
    let (t, k, n) = tuple.shape();
    if tr.d >= t || tr.i >= k || tr.sigma.len() != n {
        return Err(MolrError::Shape(format!(
            "transform (d={}, i={}, |sigma|={}) out of range for shape {:?}",
            tr.d,
            tr.i,
            tr.sigma.len(),
            tuple.shape()
        )));
    }
    if k < 2 {
        return Err(MolrError::TooFewRows { min: 2, got: k });
    }
    // columns, then symbols: rows[s][r]
    let mut rows: Vec<Vec<Vec<u8>>> = (0..t)
        .map(|s| {
            (0..k)
                .map(|r| {
                    let src = tuple.row(r, s);
                    tr.sigma.images().iter().map(|&c| src[c as usize]).collect()
                })
                .collect()
        })
        .collect();
    for member in rows.iter_mut() {
        let mut relabel = vec![0u8; n];
        for (c, &x) in member[tr.i].iter().enumerate() {
            relabel[x as usize] = c as u8;
        }
        for row in member.iter_mut() {
            for x in row.iter_mut() {
                *x = relabel[*x as usize];
            }
        }
    }
    let mut row_order: Vec<usize> = (0..k).filter(|&r| r != tr.i).collect();
    row_order.sort_by(|&a, &b| rows[tr.d][b].cmp(&rows[tr.d][a]));
    row_order.insert(0, tr.i);
    let second = row_order[1];
    for s in 0..t {
        if s != tr.d {
            match rows[tr.d][second].cmp(&rows[s][second]) {
                Ordering::Greater => {}
                Ordering::Less => return Ok(None),
                Ordering::Equal => panic!("two members share a second row in a valid tuple"),
            }
        }
    }
    let mut member_order: Vec<usize> = (0..t).filter(|&s| s != tr.d).collect();
    member_order.sort_by(|&a, &b| rows[b][second].cmp(&rows[a][second]));
    member_order.insert(0, tr.d);
    let mut cells = Vec::with_capacity(t * k * n);
    for &r in &row_order {
        for &s in &member_order {
            cells.extend_from_slice(&rows[s][r]);
        }
    }
    Ok(Some(Tuple::from_cells_unchecked(t, k, n, cells)))
}

/// Reusable state for scanning every transform of one tuple.
pub(crate) struct Scanner {
    t: usize,
    k: usize,
    n: usize,
    /// `base[((s * k) + i) * k + j]` is the row `inv(row_i) ∘ row_j` of member `s`;
    /// under column permutation `sigma` the transformed row is its conjugate.
    base: Vec<u8>,
    sigma: Vec<u8>,
    sigma_inv: Vec<u8>,
    /// Transformed rows for the current `(i, sigma)`: `[s][j]`.
    conj: Vec<u8>,
    row_order: Vec<usize>,
    member_order: Vec<usize>,
    out: Vec<u8>,
}

/// A valid transform output, materialized on demand.
pub(crate) struct Candidate<'s> {
    scanner: &'s mut Scanner,
    d: usize,
    i: usize,
    second: usize,
    built: bool,
}

impl Scanner {
    pub(crate) fn new(tuple: &Tuple) -> Result<Self> {
        let (t, k, n) = tuple.shape();
        if k < 2 {
            return Err(MolrError::TooFewRows { min: 2, got: k });
        }
        let mut base = vec![0u8; t * k * k * n];
        let mut inv = vec![0u8; n];
        for s in 0..t {
            for i in 0..k {
                for (c, &x) in tuple.row(i, s).iter().enumerate() {
                    inv[x as usize] = c as u8;
                }
                for j in 0..k {
                    let dst = ((s * k + i) * k + j) * n;
                    for (c, &x) in tuple.row(j, s).iter().enumerate() {
                        base[dst + c] = inv[x as usize];
                    }
                }
            }
        }
        Ok(Self {
            t,
            k,
            n,
            base,
            sigma: vec![0; n],
            sigma_inv: vec![0; n],
            conj: vec![0; t * k * n],
            row_order: Vec::with_capacity(k),
            member_order: Vec::with_capacity(t),
            out: vec![0; t * k * n],
        })
    }

    #[inline]
    fn conj_row(&self, s: usize, j: usize) -> &[u8] {
        let start = (s * self.k + j) * self.n;
        &self.conj[start..start + self.n]
    }

    /// Visits every valid transform in order of `i`, then `sigma` (ascending
    /// lexicographic), then `d`.
    pub(crate) fn scan<F>(&mut self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&mut Candidate<'_>) -> ControlFlow<()>,
    {
        let (t, k, n) = (self.t, self.k, self.n);
        for i in 0..k {
            for (c, x) in self.sigma.iter_mut().enumerate() {
                *x = c as u8;
            }
            loop {
                for (c, &x) in self.sigma.iter().enumerate() {
                    self.sigma_inv[x as usize] = c as u8;
                }
                for s in 0..t {
                    for j in 0..k {
                        if j == i {
                            continue;
                        }
                        let src = ((s * k + i) * k + j) * n;
                        let dst = (s * k + j) * n;
                        for c in 0..n {
                            let g = self.base[src + self.sigma[c] as usize];
                            self.conj[dst + c] = self.sigma_inv[g as usize];
                        }
                    }
                }
                for d in 0..t {
                    let mut second = usize::MAX;
                    for j in 0..k {
                        if j != i && (second == usize::MAX || self.conj_row(d, j) > self.conj_row(d, second)) {
                            second = j;
                        }
                    }
                    let head = self.conj_row(d, second);
                    let wins = (0..t).filter(|&s| s != d).all(|s| {
                        let other = self.conj_row(s, second);
                        assert!(head != other, "two members share a second row in a valid tuple");
                        head > other
                    });
                    if !wins {
                        continue;
                    }
                    let mut cand = Candidate {
                        scanner: self,
                        d,
                        i,
                        second,
                        built: false,
                    };
                    if visit(&mut cand).is_break() {
                        return ControlFlow::Break(());
                    }
                }
                if !next_permutation(&mut self.sigma) {
                    break;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

impl Candidate<'_> {
    /// Second row of the leading member.
    pub(crate) fn head(&self) -> &[u8] {
        self.scanner.conj_row(self.d, self.second)
    }

    pub(crate) fn transform(&self) -> Transform {
        Transform {
            d: self.d,
            i: self.i,
            sigma: Permutation::from_vec_unchecked(self.scanner.sigma.clone()),
        }
    }

    pub(crate) fn cells(&mut self) -> &[u8] {
        if !self.built {
            self.build();
        }
        &self.scanner.out
    }

    fn build(&mut self) {
        let sc = &mut *self.scanner;
        let (t, k, n) = (sc.t, sc.k, sc.n);
        let d = self.d;
        let mut rows = std::mem::take(&mut sc.row_order);
        rows.clear();
        rows.extend((0..k).filter(|&j| j != self.i));
        // rows of one member are distinct, so the order is strict
        rows.sort_unstable_by(|&a, &b| sc.conj_row(d, b).cmp(sc.conj_row(d, a)));
        let mut members = std::mem::take(&mut sc.member_order);
        members.clear();
        members.extend((0..t).filter(|&s| s != d));
        let second = self.second;
        members.sort_unstable_by(|&a, &b| sc.conj_row(b, second).cmp(sc.conj_row(a, second)));
        members.insert(0, d);
        for s in 0..t {
            for c in 0..n {
                sc.out[s * n + c] = c as u8;
            }
        }
        let mut pos = t * n;
        for &j in &rows {
            for &s in &members {
                let start = (s * k + j) * n;
                sc.out[pos..pos + n].copy_from_slice(&sc.conj[start..start + n]);
                pos += n;
            }
        }
        sc.row_order = rows;
        sc.member_order = members;
        self.built = true;
    }

    /// Compares the output with a normalized tuple of the same shape, building
    /// the full output only when the leading second rows tie.
    pub(crate) fn cmp_normalized(&mut self, target: &[u8]) -> Ordering {
        let (t, n) = (self.scanner.t, self.scanner.n);
        let target_head = &target[t * n..t * n + n];
        match self.head().cmp(target_head) {
            Ordering::Equal => self.cells()[t * n..].cmp(&target[t * n..]),
            other => other,
        }
    }
}

/// Every valid transform together with its output.
pub fn enumerate_transforms(tuple: &Tuple) -> Result<Vec<(Transform, Tuple)>> {
    let (t, k, n) = tuple.shape();
    let mut scanner = Scanner::new(tuple)?;
    let mut out = Vec::new();
    let _ = scanner.scan(|cand| {
        let tr = cand.transform();
        let cells = cand.cells().to_vec();
        out.push((tr, Tuple::from_cells_unchecked(t, k, n, cells)));
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// The lexicographically largest normalized isotope.
pub fn canonicalize(tuple: &Tuple) -> Tuple {
    let (t, k, n) = tuple.shape();
    if k == 1 {
        return Tuple::identity(t, n);
    }
    let mut scanner = Scanner::new(tuple).expect("k >= 2");
    let mut best: Option<Vec<u8>> = None;
    let _ = scanner.scan(|cand| {
        let better = match &best {
            None => true,
            Some(b) => cand.cmp_normalized(b) == Ordering::Greater,
        };
        if better {
            best = Some(cand.cells().to_vec());
        }
        ControlFlow::Continue(())
    });
    Tuple::from_cells_unchecked(t, k, n, best.expect("at least one transform is valid"))
}

/// True iff `tuple` is normalized and no valid transform output exceeds it.
pub fn is_canonical(tuple: &Tuple) -> bool {
    if !is_normalized(tuple) {
        return false;
    }
    if tuple.k() == 1 {
        return true;
    }
    let mut scanner = Scanner::new(tuple).expect("k >= 2");
    let target = tuple.cells();
    scanner
        .scan(|cand| {
            if cand.cmp_normalized(target) == Ordering::Greater {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .is_continue()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanStats {
    /// Valid transforms.
    pub valid_count: u64,
    /// Valid transforms whose output is the tuple itself.
    pub aut_order: u64,
}

/// Full transform scan of a normalized tuple.
pub fn scan_stats(tuple: &Tuple) -> Result<ScanStats> {
    if !is_normalized(tuple) {
        return Err(MolrError::NotNormalized);
    }
    let mut scanner = Scanner::new(tuple)?;
    let target = tuple.cells();
    let mut stats = ScanStats {
        valid_count: 0,
        aut_order: 0,
    };
    let _ = scanner.scan(|cand| {
        stats.valid_count += 1;
        if cand.cmp_normalized(target) == Ordering::Equal {
            stats.aut_order += 1;
        }
        ControlFlow::Continue(())
    });
    Ok(stats)
}

/// Order of the autotopism group of a normalized tuple.
pub fn autotopism_order(tuple: &Tuple) -> Result<u64> {
    Ok(scan_stats(tuple)?.aut_order)
}

/// Number of distinct normalized tuples isotopic to the canonical `tuple`.
pub fn class_size(tuple: &Tuple) -> Result<u64> {
    Ok(CanonicalRecord::from_canonical(tuple.clone())?.class_size)
}

/// A canonical representative with its orbit data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalRecord {
    pub triple: Tuple,
    pub aut_order: u64,
    pub valid_count: u64,
    pub class_size: u64,
}

impl CanonicalRecord {
    /// Builds the record for a tuple already in canonical form.
    pub fn from_canonical(triple: Tuple) -> Result<Self> {
        let stats = scan_stats(&triple)?;
        assert!(stats.aut_order > 0, "a canonical tuple is fixed by the trivial transform");
        assert_eq!(
            stats.valid_count % stats.aut_order,
            0,
            "orbit count {} is not divisible by autotopism order {}",
            stats.valid_count,
            stats.aut_order
        );
        Ok(Self {
            class_size: stats.valid_count / stats.aut_order,
            aut_order: stats.aut_order,
            valid_count: stats.valid_count,
            triple,
        })
    }
}

/// Canonicalizes every input, removes duplicates and sorts descending.
pub fn dedup_canonical<I>(items: I) -> Vec<CanonicalRecord>
where
    I: IntoIterator<Item = Tuple>,
{
    let items: Vec<Tuple> = items.into_iter().collect();
    let mut canon: Vec<Tuple> = items.par_iter().map(canonicalize).collect();
    canon.sort_unstable_by(|a, b| b.cmp(a));
    canon.dedup();
    canon
        .into_par_iter()
        .map(|t| CanonicalRecord::from_canonical(t).expect("canonical forms are normalized"))
        .collect()
}
