//! Column-intersection balance, orthogonal complements and juxtaposition.

use crate::error::{MolrError, Result};
use crate::rect::{check_order, Rectangle};
use crate::tuple::Tuple;

/// Sizes of the symbol-set intersections of all column pairs `c1 < c2`,
/// in lexicographic pair order.
pub fn column_intersections(rect: &Rectangle) -> Vec<u32> {
    let n = rect.n();
    let masks: Vec<u64> = (0..n).map(|c| rect.column_mask(c)).collect();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push((masks[a] & masks[b]).count_ones());
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    /// Constant column intersection; only for proper Youden rectangles.
    pub lambda_cc: Option<u32>,
    /// Minimum column intersection, when positive.
    pub lambda_cc_p: Option<u32>,
    pub min_intersection: u32,
    pub max_intersection: u32,
    /// False for k = n, where every pair of columns trivially shares all symbols.
    pub applicable: bool,
}

impl BalanceReport {
    pub fn is_youden(&self) -> bool {
        self.lambda_cc.is_some()
    }
}

pub fn balance_report(rect: &Rectangle) -> BalanceReport {
    let (k, n) = (rect.k() as u32, rect.n() as u32);
    let xs = column_intersections(rect);
    let min = xs.iter().copied().min().unwrap_or(0);
    let max = xs.iter().copied().max().unwrap_or(0);
    // Every symbol sits in k columns and so in k(k-1)/2 column pairs.
    let total: u32 = xs.iter().sum();
    assert_eq!(total, n * k * (k - 1) / 2, "column intersection sum identity");
    if k == n {
        return BalanceReport {
            lambda_cc: None,
            lambda_cc_p: None,
            min_intersection: min,
            max_intersection: max,
            applicable: false,
        };
    }
    let lambda_cc = if min > 0 && min == max {
        assert_eq!(
            min * (n - 1),
            k * (k - 1),
            "constant intersection must equal k(k-1)/(n-1)"
        );
        Some(min)
    } else {
        None
    };
    BalanceReport {
        lambda_cc,
        lambda_cc_p: (min > 0).then_some(min),
        min_intersection: min,
        max_intersection: max,
        applicable: true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleBalance {
    pub members: Vec<BalanceReport>,
    /// Per-member `lambda_cc_p` in nondecreasing order (`None` first).
    pub params: Vec<Option<u32>>,
    pub all_partially_balanced: bool,
    pub all_youden: bool,
    pub applicable: bool,
}

pub fn classify_tuple(tuple: &Tuple) -> TupleBalance {
    let members: Vec<BalanceReport> = tuple.members().iter().map(balance_report).collect();
    let mut params: Vec<Option<u32>> = members.iter().map(|b| b.lambda_cc_p).collect();
    params.sort();
    let applicable = tuple.k() < tuple.n();
    TupleBalance {
        all_partially_balanced: applicable && params.iter().all(Option::is_some),
        all_youden: applicable && members.iter().all(BalanceReport::is_youden),
        applicable,
        members,
        params,
    }
}

/// Places `b` to the right of `a`, renaming `b`'s symbols by adding a.n().
pub fn juxtapose(a: &Tuple, b: &Tuple) -> Result<Tuple> {
    if a.t() != b.t() || a.k() != b.k() {
        return Err(MolrError::Shape(format!(
            "cannot juxtapose {}x{}x{} with {}x{}x{}",
            a.t(),
            a.k(),
            a.n(),
            b.t(),
            b.k(),
            b.n()
        )));
    }
    let (t, k, n1) = a.shape();
    let n = n1 + b.n();
    check_order(n)?;
    let mut cells = Vec::with_capacity(t * k * n);
    for r in 0..k {
        for s in 0..t {
            cells.extend_from_slice(a.row(r, s));
            cells.extend(b.row(r, s).iter().map(|&x| x + n1 as u8));
        }
    }
    Tuple::from_cells(t, k, n, cells)
}

/// Cell-by-cell search for rectangles orthogonal to every member of a tuple.
struct ComplementSearch<'a> {
    tuple: &'a Tuple,
    k: usize,
    n: usize,
    cells: Vec<u8>,
    col_used: Vec<u64>,
    row_used: u64,
    /// pair_used[s * n + x]: symbols already paired with `x` of member s.
    pair_used: Vec<u64>,
}

impl<'a> ComplementSearch<'a> {
    fn new(tuple: &'a Tuple) -> Self {
        let (t, k, n) = tuple.shape();
        let mut search = Self {
            tuple,
            k,
            n,
            cells: vec![0; k * n],
            col_used: vec![0; n],
            row_used: 0,
            pair_used: vec![0; t * n],
        };
        // First row fixed to the identity; relabeling symbols keeps orthogonality.
        for c in 0..n {
            search.place(0, c, c as u8);
        }
        search
    }

    fn place(&mut self, r: usize, c: usize, y: u8) {
        self.cells[r * self.n + c] = y;
        self.col_used[c] |= 1 << y;
        for s in 0..self.tuple.t() {
            self.pair_used[s * self.n + self.tuple.get(s, r, c) as usize] |= 1 << y;
        }
    }

    fn unplace(&mut self, r: usize, c: usize, y: u8) {
        self.col_used[c] &= !(1 << y);
        for s in 0..self.tuple.t() {
            self.pair_used[s * self.n + self.tuple.get(s, r, c) as usize] &= !(1 << y);
        }
    }

    fn run(&mut self, pos: usize, out: &mut impl FnMut(&[u8]) -> bool) -> bool {
        if pos == self.k * self.n {
            return out(&self.cells);
        }
        let (r, c) = (pos / self.n, pos % self.n);
        if c == 0 {
            self.row_used = 0;
        }
        let full = (1u64 << self.n) - 1;
        let mut free = full & !self.row_used & !self.col_used[c];
        for s in 0..self.tuple.t() {
            free &= !self.pair_used[s * self.n + self.tuple.get(s, r, c) as usize];
        }
        while free != 0 {
            let y = 63 - free.leading_zeros() as u8;
            free &= !(1 << y);
            self.place(r, c, y);
            self.row_used |= 1 << y;
            let go_on = self.run(pos + 1, out);
            self.row_used &= !(1 << y);
            self.unplace(r, c, y);
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn for_each_reduced_complement(tuple: &Tuple, mut visit: impl FnMut(&[u8]) -> bool) {
    let mut search = ComplementSearch::new(tuple);
    search.run(tuple.n(), &mut visit);
}

/// Orthogonal complements whose first row is the identity, descending.
pub fn reduced_complements(tuple: &Tuple) -> Vec<Rectangle> {
    let (_, k, n) = tuple.shape();
    let mut out = Vec::new();
    for_each_reduced_complement(tuple, |cells| {
        out.push(Rectangle::from_cells_unchecked(k, n, cells.to_vec()));
        true
    });
    out
}

/// Every k×n Latin rectangle orthogonal to all members, in descending order.
pub fn orthogonal_complements(tuple: &Tuple) -> Vec<Rectangle> {
    let reduced = reduced_complements(tuple);
    let n = tuple.n();
    let mut out = Vec::with_capacity(reduced.len());
    let mut relabel: Vec<u8> = (0..n as u8).collect();
    loop {
        out.extend(reduced.iter().map(|r| r.map_symbols(|x| relabel[x as usize])));
        if !crate::perm::next_permutation(&mut relabel) {
            break;
        }
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// The search was exhaustive (or hit the n-1 bound): `best` is maximum.
    Certified,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct YoudenSearch {
    pub best: Tuple,
    pub outcome: SearchOutcome,
    /// Complement rectangles tried.
    pub nodes: u64,
    /// Number of members of the best tuple after each improvement.
    pub trace: Vec<usize>,
}

/// Depth-first search for the largest tuple obtained by adding orthogonal
/// rectangles to `seed`, optionally only Youden ones.
///
/// Added members are taken with identity first row and in strictly
/// decreasing order, so each set of additions is visited once.
pub fn max_youden_tuple(seed: &Tuple, require_youden: bool, budget: Option<u64>) -> YoudenSearch {
    assert!(seed.t() <= member_bound(seed), "more than n-1 mutually orthogonal rectangles");
    let mut state = YoudenSearch {
        best: seed.clone(),
        outcome: SearchOutcome::Certified,
        nodes: 0,
        trace: vec![seed.t()],
    };
    youden_dfs(seed, None, require_youden, budget, &mut state);
    state
}

/// At most n-1 pairwise orthogonal k×n Latin rectangles exist for k ≥ 2.
fn member_bound(tuple: &Tuple) -> usize {
    if tuple.k() >= 2 {
        tuple.n() - 1
    } else {
        usize::MAX
    }
}

fn youden_dfs(
    tuple: &Tuple,
    below: Option<&[u8]>,
    require_youden: bool,
    budget: Option<u64>,
    state: &mut YoudenSearch,
) -> bool {
    let bound = member_bound(tuple);
    if tuple.t() > state.best.t() {
        state.best = tuple.clone();
        state.trace.push(tuple.t());
    }
    if state.best.t() >= bound {
        return false;
    }
    assert!(tuple.t() < bound, "more than n-1 mutually orthogonal rectangles");
    let (_, k, n) = tuple.shape();
    let mut children = Vec::new();
    for_each_reduced_complement(tuple, |cells| {
        if below.is_some_and(|b| cells >= b) {
            return true;
        }
        let rect = Rectangle::from_cells_unchecked(k, n, cells.to_vec());
        if !require_youden || balance_report(&rect).is_youden() {
            children.push(rect);
        }
        true
    });
    for rect in children {
        state.nodes += 1;
        if budget.is_some_and(|b| state.nodes > b) {
            state.outcome = SearchOutcome::BudgetExhausted;
            return false;
        }
        let next = tuple.with_member(&rect);
        if !youden_dfs(&next, Some(rect.cells()), require_youden, budget, state) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_tuple;
    use crate::rect::are_orthogonal;

    const APPENDIX_A: &str = "0123,3210,2301,1032|0123,2301,1032,3210|0123,1032,3210,2301";

    fn rect(rows: &[&str]) -> Rectangle {
        let n = rows[0].len();
        let cells = rows
            .iter()
            .flat_map(|r| r.bytes().map(|b| b - b'0'))
            .collect();
        Rectangle::from_cells(rows.len(), n, cells).unwrap()
    }

    fn brute_intersections(r: &Rectangle) -> Vec<u32> {
        let n = r.n();
        let mut out = vec![];
        for a in 0..n {
            for b in a + 1..n {
                let mut count = 0;
                for x in 0..r.k() {
                    for y in 0..r.k() {
                        if r.get(x, a) == r.get(y, b) {
                            count += 1;
                        }
                    }
                }
                out.push(count);
            }
        }
        out
    }

    #[test]
    fn intersections_match_pairwise_count() {
        let r = rect(&["01234", "43120"]);
        assert_eq!(column_intersections(&r), brute_intersections(&r));
        let r = rect(&["012345", "543210", "451032", "325401", "204153"]);
        assert_eq!(column_intersections(&r), vec![4; 15]);
    }

    #[test]
    fn single_row_has_no_common_symbols() {
        let r = rect(&["0123"]);
        assert!(column_intersections(&r).iter().all(|&x| x == 0));
        let b = balance_report(&r);
        assert_eq!(b.lambda_cc_p, None);
        assert_eq!(b.lambda_cc, None);
    }

    #[test]
    fn three_by_five_is_only_partially_balanced() {
        let r = rect(&["01234", "43120", "34012"]);
        let b = balance_report(&r);
        assert_eq!(b.lambda_cc, None);
        assert_eq!(b.lambda_cc_p, Some(1));
    }

    #[test]
    fn squares_are_not_applicable() {
        let t = parse_tuple(APPENDIX_A).unwrap();
        let c = classify_tuple(&t);
        assert!(!c.applicable && !c.all_youden);
        assert!(c.members.iter().all(|m| m.min_intersection == 4 && m.lambda_cc.is_none()));
    }

    #[test]
    fn juxtapose_rejects_shape_mismatch() {
        let a = parse_tuple(APPENDIX_A).unwrap();
        let b = a.prefix(2);
        assert!(juxtapose(&a, &b).is_err());
    }

    #[test]
    fn pair_completes_to_the_third_square() {
        let t = parse_tuple(APPENDIX_A).unwrap();
        let pair = t.select_members(&[0, 1]);
        let comps = orthogonal_complements(&pair);
        assert!(comps.contains(&t.member(2)));
        assert!(comps.windows(2).all(|w| w[0] > w[1]));
        for c in &comps {
            assert!(are_orthogonal(c, &t.member(0)).unwrap());
            assert!(are_orthogonal(c, &t.member(1)).unwrap());
        }
        assert!(orthogonal_complements(&t).is_empty());
    }

    #[test]
    fn complements_match_brute_force() {
        // All 2x4 Latin rectangles, filtered by orthogonality.
        let t = parse_tuple("0123,1032|0123,2301").unwrap();
        let mut rows: Vec<Vec<u8>> = vec![];
        let mut p: Vec<u8> = (0..4).collect();
        loop {
            rows.push(p.clone());
            if !crate::perm::next_permutation(&mut p) {
                break;
            }
        }
        let mut expected = vec![];
        for a in &rows {
            for b in &rows {
                let cells: Vec<u8> = a.iter().chain(b).copied().collect();
                if let Ok(r) = Rectangle::from_cells(2, 4, cells) {
                    if (0..2).all(|s| are_orthogonal(&r, &t.member(s)).unwrap()) {
                        expected.push(r);
                    }
                }
            }
        }
        expected.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(orthogonal_complements(&t), expected);
    }

    #[test]
    fn search_reaches_the_bound_for_order_four() {
        let t = parse_tuple(APPENDIX_A).unwrap().select_members(&[0]);
        let s = max_youden_tuple(&t, false, None);
        assert_eq!(s.outcome, SearchOutcome::Certified);
        assert_eq!(s.best.t(), 3);
        assert!(s.best.is_valid());
    }

    #[test]
    fn search_recovers_a_removed_youden_member() {
        let e2 = &crate::fixtures::fixture("appendix_E2").unwrap()[0];
        let seed = e2.select_members(&[0, 1, 2, 3, 4]);
        let s = max_youden_tuple(&seed, true, None);
        assert_eq!(s.outcome, SearchOutcome::Certified);
        assert_eq!(s.best.t(), 6);
        assert!(s.best.is_valid());
        assert!(classify_tuple(&s.best).all_youden);
    }

    #[test]
    fn budget_is_reported() {
        let t = parse_tuple("01234,12340").unwrap();
        let s = max_youden_tuple(&t, false, Some(1));
        assert_eq!(s.outcome, SearchOutcome::BudgetExhausted);
    }
}
