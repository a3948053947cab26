//! Enumeration and classification of tuples of mutually orthogonal Latin
//! rectangles (MOLR) up to isotopism.

pub mod canonical;
pub mod census;
pub mod cli;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod isotopism;
pub mod perm;
pub mod rect;
pub mod spill;
pub mod tuple;
pub mod youden;

pub use canonical::{
    autotopism_order, canonicalize, class_size, dedup_canonical, enumerate_transforms,
    is_canonical, scan_stats, transform, CanonicalRecord, ScanStats, Transform,
};
pub use error::{MolrError, Result};
pub use extension::{
    candidate_rows, extend_tuple, is_maximal, maximality, open_positions, Maximality, RowTriple,
};
pub use io::{format_tuple, parse_tuple};
pub use isotopism::{apply_isotopism, Isotopism};
pub use perm::{perm_lex_cmp, Permutation};
pub use rect::{are_orthogonal, is_latin, Rectangle};
pub use tuple::{is_normalized, triple_lex_cmp, PairUsage, Tuple};
pub use youden::{
    balance_report, classify_tuple, column_intersections, juxtapose, max_youden_tuple,
    orthogonal_complements, BalanceReport, TupleBalance,
};

/// Largest supported order; one character per symbol in the line format.
pub const MAX_ORDER: usize = 35;
