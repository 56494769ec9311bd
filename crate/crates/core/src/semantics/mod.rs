//! Communication functions, the operational semantics, canonical forms and
//! bisimilarity.

mod bisim;
mod canonical;
mod comm;
mod engine;
mod sos;

use thiserror::Error;

pub use bisim::{distinguish, Experiment};
pub use canonical::{branching_degree, depth, CanonicalProcess};
pub use comm::{validate_comm, CommFunction, CommKind, CommViolation, TableError};
pub use engine::{sort_by_id, Branches, Semantics};
pub use sos::transitions;

use crate::syntax::{Label, ProcessTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("term is not closed: variable `{0}` occurs free")]
    OpenTerm(crate::syntax::Variable),
    #[error("brancher index must be at least 1")]
    ZeroBrancher,
}

/// Result of a bisimilarity check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Bisimilarity {
    Bisimilar,
    /// The experiment holds for the first process and fails for the second.
    Distinguished(Experiment),
}

impl Bisimilarity {
    pub fn holds(&self) -> bool {
        matches!(self, Bisimilarity::Bisimilar)
    }
}

pub fn canonicalize(p: &ProcessTerm, c: &CommFunction) -> Result<CanonicalProcess, SemanticsError> {
    Semantics::new(c.clone()).canonicalize(p)
}

pub fn bisimilar(
    p: &ProcessTerm,
    q: &ProcessTerm,
    c: &CommFunction,
) -> Result<Bisimilarity, SemanticsError> {
    let mut sem = Semantics::new(c.clone());
    let p = sem.canonicalize(p)?;
    let q = sem.canonicalize(q)?;
    Ok(compare(&p, &q))
}

pub fn compare(p: &CanonicalProcess, q: &CanonicalProcess) -> Bisimilarity {
    match distinguish(p, q) {
        None => Bisimilarity::Bisimilar,
        Some(e) => Bisimilarity::Distinguished(e),
    }
}

/// `tau^k.0`.
pub fn tau_chain(k: usize) -> ProcessTerm {
    (0..k).fold(ProcessTerm::Nil, |p, _| ProcessTerm::tau(p))
}

/// `B_i = tau.0 + tau.tau.0 + ... + tau^i.0`, left-folded.
pub fn brancher(i: usize) -> Result<ProcessTerm, SemanticsError> {
    if i == 0 {
        return Err(SemanticsError::ZeroBrancher);
    }
    Ok(ProcessTerm::sum_of((1..=i).map(tau_chain)))
}

/// Canonical form of `B_i`, built directly rather than through a term.
pub fn brancher_canonical(i: usize) -> Result<CanonicalProcess, SemanticsError> {
    if i == 0 {
        return Err(SemanticsError::ZeroBrancher);
    }
    let mut chains = vec![CanonicalProcess::nil()];
    for _ in 0..i {
        let last = chains.last().expect("nonempty").clone();
        chains.push(CanonicalProcess::from_branches(vec![(Label::Tau, last)]));
    }
    Ok(CanonicalProcess::from_branches(
        chains[..i]
            .iter()
            .map(|p| (Label::Tau, p.clone()))
            .collect(),
    ))
}
