//! Breadth-first census over the number of rows for a fixed order.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::canonical::{canonicalize, is_canonical, CanonicalRecord};
use crate::error::{MolrError, Result};
use crate::extension::{first_member_choices, for_each_extension_in, maximality, ExtensionFilter, Maximality};
use crate::spill::ExternalSorter;
use crate::tuple::{is_normalized, Tuple};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PipelineMode {
    /// Drop classes with trivial autotopism group before extending further.
    pub stepwise_symmetric: bool,
}

/// How extensions of a level are reduced to class representatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    /// Keep normalized extensions that pass the early-exit canonicity test.
    #[default]
    CanonicalExtensions,
    /// Canonicalize every extension with a full scan, then deduplicate.
    FullCanonicalize,
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub n: usize,
    pub k_max: usize,
    pub mode: PipelineMode,
    pub reduction: Reduction,
    /// Stop after this many extension triples have been generated.
    pub budget: Option<u64>,
    /// Children kept in memory per level before spilling sorted runs.
    pub memory_records: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl CensusConfig {
    pub fn new(n: usize, k_max: usize) -> Self {
        Self {
            n,
            k_max,
            mode: PipelineMode::default(),
            reduction: Reduction::default(),
            budget: None,
            memory_records: 4_000_000,
            jobs: None,
        }
    }

    pub fn stepwise(mut self) -> Self {
        self.mode.stepwise_symmetric = true;
        self
    }
}

/// A class representative within a census level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub record: CanonicalRecord,
    /// Settled when the next level is generated, or by a direct test at k_max.
    pub maximality: Maximality,
    /// Index of the generating class in the previous level.
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub k: usize,
    pub classes: Vec<ClassRecord>,
    /// Extensions that become normalized once rows 2..k are sorted.
    pub normalized_total: u64,
    /// Extensions that are normalized as generated.
    pub normalized_generated: u64,
    /// All extension tuples visited while producing this level.
    pub extensions_generated: u64,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub n: usize,
    pub k_max: usize,
    pub mode: PipelineMode,
    /// Levels for k = 2, 3, ... in order.
    pub levels: Vec<Level>,
    /// Set when the generation budget ran out while building level `k`.
    pub exhausted_at: Option<usize>,
}

/// Per-(k, n) aggregate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub n: usize,
    pub k: usize,
    /// Normalized triples produced by extending the previous level's
    /// representatives and re-sorting rows.
    pub normalized_total: u64,
    pub normalized_generated: u64,
    /// Distinct normalized triples over all classes (sum of class sizes).
    pub normalized_orbit: u64,
    pub classes: u64,
    /// `None` for k = n.
    pub maximal: Option<u64>,
    pub trivial_aut: u64,
    pub aut_histogram: BTreeMap<u64, u64>,
    /// Classes with an extension chain to the largest k reached.
    pub extends_to_top: Vec<Tuple>,
}

pub fn aut_histogram<'a>(records: impl IntoIterator<Item = &'a CanonicalRecord>) -> BTreeMap<u64, u64> {
    let mut hist = BTreeMap::new();
    for r in records {
        *hist.entry(r.aut_order).or_insert(0) += 1;
    }
    hist
}

/// Maximal classes among `records`; `None` when the level is complete (k = n).
pub fn count_maximal(records: &[ClassRecord]) -> Option<u64> {
    if records.iter().any(|r| r.maximality == Maximality::Complete) {
        return None;
    }
    Some(
        records
            .iter()
            .filter(|r| r.maximality == Maximality::Maximal)
            .count() as u64,
    )
}

struct Expansion {
    children: Vec<Tuple>,
    generated: u64,
    sortable: u64,
    normalized: u64,
    extendable: bool,
}

struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn take(&self) -> bool {
        let used = self.used.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        match self.limit {
            Some(limit) if used > limit => {
                self.exhausted.store(true, AtomicOrdering::Relaxed);
                false
            }
            _ => true,
        }
    }
}

fn expand(
    parent: &Tuple,
    part: Option<std::ops::Range<usize>>,
    reduction: Reduction,
    budget: &Budget,
) -> Expansion {
    let mut exp = Expansion {
        children: Vec::new(),
        generated: 0,
        sortable: 0,
        normalized: 0,
        extendable: false,
    };
    // From the 1-row seed, member order is not fixed yet; only the
    // normalized second rows are worth visiting.
    let filter = seed_filter(parent);
    match reduction {
        Reduction::CanonicalExtensions => {
            let _ = for_each_extension_in(parent, filter, part.clone(), |rows| {
                if !budget.take() {
                    return ControlFlow::Break(());
                }
                exp.generated += 1;
                if !sortable(parent, rows) {
                    return ControlFlow::Continue(());
                }
                exp.sortable += 1;
                let child = parent.with_row(rows);
                if is_normalized(&child) {
                    exp.normalized += 1;
                    if is_canonical(&child) {
                        exp.children.push(child);
                    }
                }
                ControlFlow::Continue(())
            })
            .expect("parents have k < n");
            exp.extendable = exp.generated > 0;
        }
        Reduction::FullCanonicalize => {
            let _ = for_each_extension_in(parent, filter, part.clone(), |rows| {
                if !budget.take() {
                    return ControlFlow::Break(());
                }
                exp.generated += 1;
                if sortable(parent, rows) {
                    exp.sortable += 1;
                }
                let child = parent.with_row(rows);
                if is_normalized(&child) {
                    exp.normalized += 1;
                }
                exp.children.push(canonicalize(&child));
                ControlFlow::Continue(())
            })
            .expect("parents have k < n");
            exp.children.sort_unstable_by(|a, b| b.cmp(a));
            exp.children.dedup();
            exp.extendable = exp.generated > 0;
        }
    }
    exp
}

/// Whether appending `rows` to the normalized `parent` and re-sorting rows
/// 2..k by the first member gives a normalized triple.
fn sortable(parent: &Tuple, rows: &[&[u8]]) -> bool {
    let k = parent.shape().1;
    if k == 1 {
        return rows.windows(2).all(|w| w[0] > w[1]);
    }
    // The new row only disturbs S2 if it becomes the second row.
    rows[0] < parent.row(1, 0) || rows.windows(2).all(|w| w[0] > w[1])
}

fn seed_filter(parent: &Tuple) -> ExtensionFilter {
    if parent.k() == 1 {
        ExtensionFilter::Normalized
    } else {
        ExtensionFilter::All
    }
}

/// Work items `(parent index, member-0 row range)`. A lone parent is split by
/// its first member's row so the level still runs in parallel.
fn work_items(parents: &[Tuple]) -> Vec<(usize, Option<std::ops::Range<usize>>)> {
    if parents.len() == 1 {
        let choices = first_member_choices(&parents[0], seed_filter(&parents[0])).unwrap_or(0);
        if choices > 1 {
            return (0..choices).map(|i| (0, Some(i..i + 1))).collect();
        }
    }
    (0..parents.len()).map(|i| (i, None)).collect()
}

impl Expansion {
    fn absorb(&mut self, other: Expansion) {
        self.children.extend(other.children);
        self.generated += other.generated;
        self.sortable += other.sortable;
        self.normalized += other.normalized;
        self.extendable |= other.extendable;
    }
}

fn sort_key(t: &Tuple) -> Vec<u8> {
    t.cells().iter().map(|&x| crate::io::symbol_char(x) as u8).collect()
}

fn key_to_tuple(key: &[u8], t: usize, k: usize, n: usize) -> Tuple {
    let cells = key
        .iter()
        .map(|&b| if b.is_ascii_digit() { b - b'0' } else { b - b'a' + 10 })
        .collect();
    Tuple::from_cells_unchecked(t, k, n, cells)
}

pub fn run_census(config: &CensusConfig) -> Result<Census> {
    match config.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| MolrError::Input(e.to_string()))?;
            pool.install(|| run_census_inner(config))
        }
        None => run_census_inner(config),
    }
}

fn run_census_inner(config: &CensusConfig) -> Result<Census> {
    let (n, k_max) = (config.n, config.k_max);
    crate::rect::check_order(n)?;
    if k_max < 2 || k_max > n {
        return Err(MolrError::Input(format!("need 2 <= k_max <= n, got k_max={k_max}, n={n}")));
    }
    let t = 3;
    let budget = Budget {
        limit: config.budget,
        used: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
    };
    let mut census = Census {
        n,
        k_max,
        mode: config.mode,
        levels: Vec::new(),
        exhausted_at: None,
    };
    let mut parents: Vec<Tuple> = vec![Tuple::identity(t, n)];
    for k in 2..=k_max {
        let pieces: Vec<(usize, Expansion)> = work_items(&parents)
            .into_par_iter()
            .with_max_len(1)
            .map(|(pi, part)| (pi, expand(&parents[pi], part, config.reduction, &budget)))
            .collect();
        let mut expansions: Vec<Expansion> = Vec::with_capacity(parents.len());
        for (pi, piece) in pieces {
            if pi == expansions.len() {
                expansions.push(piece);
            } else {
                expansions[pi].absorb(piece);
            }
        }
        if budget.exhausted.load(AtomicOrdering::Relaxed) {
            // The last complete level was never extended; test it directly.
            if let Some(prev) = census.levels.last_mut() {
                prev.classes
                    .par_iter_mut()
                    .for_each(|c| c.maximality = maximality(&c.record.triple));
            }
            census.exhausted_at = Some(k);
            return Ok(census);
        }
        if let Some(prev) = census.levels.last_mut() {
            for (class, exp) in prev.classes.iter_mut().zip(&expansions) {
                class.maximality = if exp.extendable {
                    Maximality::Extendable
                } else {
                    Maximality::Maximal
                };
            }
        }
        let mut sorter = ExternalSorter::new(config.memory_records);
        let mut normalized_total = 0;
        let mut normalized_generated = 0;
        let mut extensions_generated = 0;
        for (pi, exp) in expansions.into_iter().enumerate() {
            normalized_total += exp.sortable;
            normalized_generated += exp.normalized;
            extensions_generated += exp.generated;
            for child in exp.children {
                sorter.push(sort_key(&child), pi as u64)?;
            }
        }
        let merged = sorter.finish()?;
        let mut classes: Vec<ClassRecord> = merged
            .par_iter()
            .map(|(key, parent)| {
                let triple = key_to_tuple(key, t, k, n);
                let record = CanonicalRecord::from_canonical(triple).expect("representatives are normalized");
                let maximality = if k == n {
                    Maximality::Complete
                } else if k == k_max {
                    maximality(&record.triple)
                } else {
                    Maximality::Maximal
                };
                ClassRecord {
                    record,
                    maximality,
                    parent: Some(*parent as usize),
                }
            })
            .collect();
        if config.mode.stepwise_symmetric {
            classes.retain(|c| c.record.aut_order > 1);
        }
        parents = classes.iter().map(|c| c.record.triple.clone()).collect();
        census.levels.push(Level {
            k,
            classes,
            normalized_total,
            normalized_generated,
            extensions_generated,
        });
    }
    Ok(census)
}

impl Census {
    /// Rebuilds a census from representative lists for k = 2, 3, ...
    ///
    /// Each representative's generating class is its (k-1)-row prefix, which
    /// must be present in the previous list. Generation counters are zero.
    pub fn from_representatives(n: usize, reps: Vec<Vec<Tuple>>) -> Result<Census> {
        let mut levels: Vec<Level> = Vec::with_capacity(reps.len());
        for (li, list) in reps.into_iter().enumerate() {
            let k = li + 2;
            if k > n {
                return Err(MolrError::Input(format!("representatives with k={k} exceed n={n}")));
            }
            let classes = list
                .into_par_iter()
                .map(|triple| {
                    if triple.shape() != (3, k, n) {
                        return Err(MolrError::Shape(format!(
                            "expected a triple of {k}x{n} rectangles, got {triple}"
                        )));
                    }
                    let parent = match levels.last() {
                        None => 0,
                        Some(prev) => {
                            let prefix = triple.prefix(k - 1);
                            prev.classes
                                .binary_search_by(|c| prefix.cmp(&c.record.triple))
                                .map_err(|_| {
                                    MolrError::Input(format!(
                                        "prefix of {triple} is not among the {}x{n} representatives",
                                        k - 1
                                    ))
                                })?
                        }
                    };
                    if !is_canonical(&triple) {
                        return Err(MolrError::Input(format!("{triple} is not canonical")));
                    }
                    let maximality = maximality(&triple);
                    Ok(ClassRecord {
                        record: CanonicalRecord::from_canonical(triple)?,
                        maximality,
                        parent: Some(parent),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if !classes.windows(2).all(|w| w[0].record.triple > w[1].record.triple) {
                return Err(MolrError::Input(format!(
                    "{k}x{n} representatives are not strictly descending"
                )));
            }
            levels.push(Level {
                k,
                classes,
                normalized_total: 0,
                normalized_generated: 0,
                extensions_generated: 0,
            });
        }
        Ok(Census {
            n,
            k_max: levels.last().map_or(2, |l| l.k),
            mode: PipelineMode::default(),
            levels,
            exhausted_at: None,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.exhausted_at.is_none()
    }

    pub fn level(&self, k: usize) -> Option<&Level> {
        self.levels.iter().find(|l| l.k == k)
    }

    /// Largest k with at least one class.
    pub fn top_k(&self) -> Option<usize> {
        self.levels.iter().rev().find(|l| !l.classes.is_empty()).map(|l| l.k)
    }

    /// Per level, which classes have an extension chain to a class at `top_k`.
    pub fn marks(&self) -> Vec<Vec<bool>> {
        let mut marks: Vec<Vec<bool>> = self.levels.iter().map(|l| vec![false; l.classes.len()]).collect();
        let Some(top) = self.top_k() else {
            return marks;
        };
        let top_idx = self.levels.iter().position(|l| l.k == top).unwrap();
        marks[top_idx].iter_mut().for_each(|m| *m = true);
        for li in (1..=top_idx).rev() {
            for (ci, class) in self.levels[li].classes.iter().enumerate() {
                if marks[li][ci] {
                    if let Some(p) = class.parent {
                        marks[li - 1][p] = true;
                    }
                }
            }
        }
        marks
    }

    pub fn rows(&self) -> Vec<CensusRow> {
        let marks = self.marks();
        self.levels
            .iter()
            .zip(marks)
            .map(|(level, mark)| {
                let hist = aut_histogram(level.classes.iter().map(|c| &c.record));
                CensusRow {
                    n: self.n,
                    k: level.k,
                    normalized_total: level.normalized_total,
                    normalized_generated: level.normalized_generated,
                    normalized_orbit: level.classes.iter().map(|c| c.record.class_size).sum(),
                    classes: level.classes.len() as u64,
                    maximal: if level.k == self.n {
                        None
                    } else {
                        count_maximal(&level.classes)
                    },
                    trivial_aut: hist.get(&1).copied().unwrap_or(0),
                    aut_histogram: hist,
                    extends_to_top: level
                        .classes
                        .iter()
                        .zip(mark)
                        .filter(|(_, m)| *m)
                        .map(|(c, _)| c.record.triple.clone())
                        .collect(),
                }
            })
            .collect()
    }
}

/// Autotopism orders along the generation chain of one top-level class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineageChain {
    /// 1-based, in descending order of the top-level representatives.
    pub case: usize,
    pub top: Tuple,
    /// Orders for k = 2, ..., top k.
    pub orders: Vec<u64>,
}

pub fn lineage(census: &Census) -> Result<Vec<LineageChain>> {
    if !census.is_complete() {
        return Err(MolrError::Input("lineage needs a complete census".into()));
    }
    let Some(top) = census.top_k() else {
        return Ok(Vec::new());
    };
    let top_idx = census.levels.iter().position(|l| l.k == top).unwrap();
    Ok(census.levels[top_idx]
        .classes
        .iter()
        .enumerate()
        .map(|(ci, class)| {
            let mut orders = vec![class.record.aut_order];
            let mut cur = class.parent;
            for li in (0..top_idx).rev() {
                let p = cur.expect("every generated class has a parent");
                let pc = &census.levels[li].classes[p];
                orders.push(pc.record.aut_order);
                cur = pc.parent;
            }
            orders.reverse();
            LineageChain {
                case: ci + 1,
                top: class.record.triple.clone(),
                orders,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_tuple;

    #[test]
    fn histogram_and_maximal_counts() {
        let c = run_census(&CensusConfig::new(4, 2)).unwrap();
        let recs = &c.levels[0].classes;
        let hist = aut_histogram(recs.iter().map(|r| &r.record));
        assert_eq!(hist, BTreeMap::from([(16, 1), (48, 1)]));
        assert_eq!(count_maximal(recs), Some(1));
        let square = crate::fixtures::fixture("appendix_A").unwrap()[0].clone();
        let complete = ClassRecord {
            maximality: maximality(&square),
            record: CanonicalRecord::from_canonical(square).unwrap(),
            parent: None,
        };
        assert_eq!(count_maximal(&[complete]), None);
    }

    #[test]
    fn sortable_extensions() {
        let p = parse_tuple("01234,43120|01234,34012|01234,20341").unwrap();
        // Below the second row: only S3 is affected, and sorting fixes it.
        assert!(sortable(&p, &[&[1, 0, 3, 4, 2], &[4, 3, 0, 2, 1], &[3, 4, 1, 0, 2]]));
        // Above it: becomes the second row, so members must stay in order.
        assert!(!sortable(&p, &[&[4, 3, 2, 0, 1], &[1, 0, 3, 4, 2], &[4, 3, 1, 2, 0]]));
        assert!(sortable(&p, &[&[4, 3, 2, 0, 1], &[4, 3, 1, 2, 0], &[1, 0, 3, 4, 2]]));
    }

    #[test]
    fn seed_is_split_per_first_row() {
        let seed = Tuple::identity(3, 5);
        assert_eq!(work_items(std::slice::from_ref(&seed)).len(), 44);
        let two = vec![seed.clone(), seed];
        assert_eq!(work_items(&two).len(), 2);
    }
}
