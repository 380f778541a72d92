//! Chain specification files (TOML).
//!
//! ```toml
//! [group]
//! family = "lattice"          # or "heisenberg"
//! rank = 1
//! finite = "Z2"               # Z<n>, S<n>, A<n>; or `degree` + `permutations`
//! action = [[[-1]]]           # per finite generator; or "trivial" / "permutation"
//!
//! [chain]
//! kind = "parametric"         # or "explicit" with [[chain.level]] tables
//! levels = 4
//!
//! [chain.template]
//! lattice = [["2^i"]]         # rows; the columns span the lattice
//! finite = ["e", "t"]
//!
//! [analysis]
//! depth = 4
//! kernel = ["b"]
//! ```

mod document;
mod element;
mod expr;
mod run;

pub use document::{
    parse_spec, ActionSpec, AnalysisSpec, ChainKind, ChainSpec, ChainSpecDocument, FiniteSpec, GroupSpec, LevelSpec,
    SpecError, SpecErrorKind, REPORT_KINDS,
};
pub use element::parse_element;
pub use expr::{Expr, ExprError};
pub use run::Overrides;
