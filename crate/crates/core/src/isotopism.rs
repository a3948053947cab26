use crate::error::{MolrError, Result};
use crate::perm::Permutation;
use crate::tuple::Tuple;

/// An element of the isotopism group acting on t-tuples of k×n rectangles.
///
/// Output cell `(s, r, c)` is `symbol_perms[s]` applied to input cell
/// `(rect_perm(s), row_perm(r), col_perm(c))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isotopism {
    pub rect_perm: Permutation,
    pub row_perm: Permutation,
    pub col_perm: Permutation,
    pub symbol_perms: Vec<Permutation>,
}

impl Isotopism {
    pub fn identity(t: usize, k: usize, n: usize) -> Self {
        Self {
            rect_perm: Permutation::identity(t),
            row_perm: Permutation::identity(k),
            col_perm: Permutation::identity(n),
            symbol_perms: vec![Permutation::identity(n); t],
        }
    }

    pub fn t(&self) -> usize {
        self.rect_perm.len()
    }

    /// The isotopism `self ∘ first`: applying it equals applying `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Self {
        assert_eq!(self.t(), first.t());
        Self {
            rect_perm: first.rect_perm.compose(&self.rect_perm),
            row_perm: first.row_perm.compose(&self.row_perm),
            col_perm: first.col_perm.compose(&self.col_perm),
            symbol_perms: (0..self.t())
                .map(|s| self.symbol_perms[s].compose(&first.symbol_perms[self.rect_perm.apply(s)]))
                .collect(),
        }
    }
}

pub fn apply_isotopism(g: &Isotopism, tuple: &Tuple) -> Result<Tuple> {
    let (t, k, n) = tuple.shape();
    if g.t() != t
        || g.symbol_perms.len() != t
        || g.row_perm.len() != k
        || g.col_perm.len() != n
        || g.symbol_perms.iter().any(|p| p.len() != n)
    {
        return Err(MolrError::Shape(format!(
            "isotopism does not act on {t} members of shape {k}x{n}"
        )));
    }
    let mut cells = Vec::with_capacity(t * k * n);
    for r in 0..k {
        let src_r = g.row_perm.apply(r);
        for s in 0..t {
            let src_s = g.rect_perm.apply(s);
            let src = tuple.row(src_r, src_s);
            let sym = g.symbol_perms[s].images();
            cells.extend(g.col_perm.images().iter().map(|&c| sym[src[c as usize] as usize]));
        }
    }
    Ok(Tuple::from_cells_unchecked(t, k, n, cells))
}
