//! Decision procedures for the equational theory of a process algebra with
//! parallel composition, left merge and communication merge.

pub mod axioms;
pub mod decider;
pub mod decomposition;
pub mod generate;
pub mod normalize;
pub mod oracle;
pub mod semantics;
pub mod syntax;

pub use decider::{decide, refute_by_search, Valuation, Verdict};
pub use semantics::{bisimilar, canonicalize, CanonicalProcess, CommFunction, Semantics};
pub use syntax::{parse, parse_equation, parse_term, Alphabet, Equation, ProcessTerm};
