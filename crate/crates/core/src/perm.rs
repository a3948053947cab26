use std::cmp::Ordering;
use std::fmt;

use crate::error::{MolrError, Result};

/// A bijection on `0..n`, stored by images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n > 64 {
            return Err(MolrError::OrderOutOfRange(n));
        }
        let mut seen = 0u64;
        for (pos, &x) in images.iter().enumerate() {
            if x as usize >= n {
                return Err(MolrError::NotAPermutation {
                    n,
                    detail: format!("image {x} at position {pos} is out of range"),
                });
            }
            if seen & (1 << x) != 0 {
                return Err(MolrError::NotAPermutation {
                    n,
                    detail: format!("image {x} repeats at position {pos}"),
                });
            }
            seen |= 1 << x;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_vec_unchecked(images: Vec<u8>) -> Self {
        debug_assert!(Self::new(images.clone()).is_ok());
        Self { images }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Self { images: inv }
    }

    /// `self.compose(other)` maps `x` to `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Self {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn is_derangement(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i != x as usize)
    }

    /// Rearranges `self` into the next permutation in lexicographic order.
    /// Returns false (leaving the identity) after the last one.
    pub fn advance(&mut self) -> bool {
        next_permutation(&mut self.images)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation(")?;
        for &x in &self.images {
            write!(f, "{}", crate::io::symbol_char(x))?;
        }
        write!(f, ")")
    }
}

/// Lexicographic comparison by first differing position.
pub fn perm_lex_cmp(a: &Permutation, b: &Permutation) -> Ordering {
    assert_eq!(a.len(), b.len(), "comparing permutations of different degree");
    a.images.cmp(&b.images)
}

/// Lexicographic successor in place; wraps to ascending order and returns false at the end.
pub fn next_permutation(xs: &mut [u8]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = n - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

pub(crate) fn is_permutation(xs: &[u8]) -> bool {
    let n = xs.len();
    let mut seen = 0u64;
    for &x in xs {
        if x as usize >= n || seen & (1 << x) != 0 {
            return false;
        }
        seen |= 1 << x;
    }
    true
}
