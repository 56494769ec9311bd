//! Parallel primality and unique parallel decomposition of closed processes.
//!
//! If `p ~ q || r` then `q` is reachable from `p` along transitions that each
//! lower the depth by exactly one (follow a longest run of `r`), and so is `r`.
//! Candidate factors are therefore drawn from these depth-tight residuals,
//! which makes the search exact; the bound only caps its size.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::oracle::SearchBound;
use crate::semantics::{CanonicalProcess, CommFunction, Semantics};

/// A multiset of parallel primes, sorted.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PrimeDecomposition {
    pub factors: Vec<CanonicalProcess>,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum DecompositionError {
    #[error("{candidates} candidate factors exceed the bound of {cap}")]
    BoundExceeded { candidates: usize, cap: usize },
}

/// Factor search for one communication function, memoising results.
pub struct Decomposer {
    sem: Semantics,
    cap: usize,
    factor_memo: FxHashMap<u64, Option<(CanonicalProcess, CanonicalProcess)>>,
}

impl Decomposer {
    pub fn new(c: &CommFunction, bound: &SearchBound) -> Self {
        Decomposer {
            sem: Semantics::new(c.clone()),
            cap: bound.max_universe,
            factor_memo: FxHashMap::default(),
        }
    }

    pub fn semantics(&mut self) -> &mut Semantics {
        &mut self.sem
    }

    /// Residuals of `p` reachable through depth-decreasing-by-one steps,
    /// with depth strictly between 0 and `depth(p)`.
    fn candidates(
        &self,
        p: &CanonicalProcess,
    ) -> Result<Vec<CanonicalProcess>, DecompositionError> {
        let mut seen: FxHashSet<u64> = FxHashSet::default();
        let mut frontier = vec![p.clone()];
        let mut out = Vec::new();
        while let Some(s) = frontier.pop() {
            for (_, t) in s.branches() {
                if t.depth() + 1 == s.depth() && !t.is_nil() && seen.insert(t.id()) {
                    out.push(t.clone());
                    frontier.push(t.clone());
                    if out.len() > self.cap {
                        return Err(DecompositionError::BoundExceeded {
                            candidates: out.len(),
                            cap: self.cap,
                        });
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// All `(q, r)` with `q || r ~ p`, both nonzero, `q` ranging in the
    /// structural order (smallest depth first).
    pub fn splits(
        &mut self,
        p: &CanonicalProcess,
    ) -> Result<Vec<(CanonicalProcess, CanonicalProcess)>, DecompositionError> {
        let cands = self.candidates(p)?;
        let bdeg = p.branching_degree();
        let mut by_depth: FxHashMap<usize, Vec<&CanonicalProcess>> = FxHashMap::default();
        for c in cands.iter().filter(|c| c.branching_degree() <= bdeg) {
            by_depth.entry(c.depth()).or_default().push(c);
        }
        let mut out = Vec::new();
        for q in cands.iter().filter(|c| c.branching_degree() <= bdeg) {
            let Some(rs) = by_depth.get(&(p.depth() - q.depth())) else {
                continue;
            };
            for r in rs {
                if self.sem.par(q, r) == *p {
                    out.push((q.clone(), (*r).clone()));
                }
            }
        }
        Ok(out)
    }

    /// A split with a factor of least depth, which is then prime.
    fn least_split(
        &mut self,
        p: &CanonicalProcess,
    ) -> Result<Option<(CanonicalProcess, CanonicalProcess)>, DecompositionError> {
        if let Some(hit) = self.factor_memo.get(&p.id()) {
            return Ok(hit.clone());
        }
        let cands = self.candidates(p)?;
        let bdeg = p.branching_degree();
        let mut found = None;
        'outer: for q in cands
            .iter()
            .filter(|c| c.branching_degree() <= bdeg && 2 * c.depth() <= p.depth())
        {
            for r in cands
                .iter()
                .filter(|r| r.depth() + q.depth() == p.depth() && r.branching_degree() <= bdeg)
            {
                if self.sem.par(q, r) == *p {
                    found = Some((q.clone(), r.clone()));
                    break 'outer;
                }
            }
        }
        self.factor_memo.insert(p.id(), found.clone());
        Ok(found)
    }

    pub fn is_parallel_prime(&mut self, p: &CanonicalProcess) -> Result<bool, DecompositionError> {
        Ok(!p.is_nil() && self.least_split(p)?.is_none())
    }

    /// Greedy decomposition: split off a least-depth factor and recurse.
    pub fn decompose(
        &mut self,
        p: &CanonicalProcess,
    ) -> Result<PrimeDecomposition, DecompositionError> {
        let mut factors = Vec::new();
        let mut rest = p.clone();
        while !rest.is_nil() {
            match self.least_split(&rest)? {
                Some((q, r)) => {
                    factors.push(q);
                    rest = r;
                }
                None => {
                    factors.push(rest);
                    break;
                }
            }
        }
        factors.sort();
        Ok(PrimeDecomposition { factors })
    }

    /// Every multiset of primes whose parallel composition is `p`, found by
    /// exhaustive splitting.
    pub fn all_factorizations(
        &mut self,
        p: &CanonicalProcess,
    ) -> Result<BTreeSet<Vec<CanonicalProcess>>, DecompositionError> {
        let mut out = BTreeSet::new();
        if p.is_nil() {
            out.insert(Vec::new());
            return Ok(out);
        }
        let splits = self.splits(p)?;
        if splits.is_empty() {
            out.insert(vec![p.clone()]);
            return Ok(out);
        }
        for (q, r) in splits {
            if !self.is_parallel_prime(&q)? {
                continue;
            }
            for mut rest in self.all_factorizations(&r)? {
                rest.push(q.clone());
                rest.sort();
                out.insert(rest);
            }
        }
        Ok(out)
    }

    /// Number of prime factors with branching degree above `w`.
    pub fn type_count(
        &mut self,
        p: &CanonicalProcess,
        w: usize,
    ) -> Result<usize, DecompositionError> {
        Ok(self
            .decompose(p)?
            .factors
            .iter()
            .filter(|f| f.branching_degree() > w)
            .count())
    }
}

pub fn is_parallel_prime(
    p: &CanonicalProcess,
    c: &CommFunction,
    bound: &SearchBound,
) -> Result<bool, DecompositionError> {
    Decomposer::new(c, bound).is_parallel_prime(p)
}

pub fn parallel_decompose(
    p: &CanonicalProcess,
    c: &CommFunction,
    bound: &SearchBound,
) -> Result<PrimeDecomposition, DecompositionError> {
    Decomposer::new(c, bound).decompose(p)
}

pub fn type_count(
    p: &CanonicalProcess,
    w: usize,
    c: &CommFunction,
    bound: &SearchBound,
) -> Result<usize, DecompositionError> {
    Decomposer::new(c, bound).type_count(p, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{brancher_canonical, canonicalize};
    use crate::syntax::{parse_term, Alphabet};

    fn canon(s: &str, c: &CommFunction) -> CanonicalProcess {
        canonicalize(
            &parse_term(s, &Alphabet::parse("a,~a,b,~b").unwrap()).unwrap(),
            c,
        )
        .unwrap()
    }

    #[test]
    fn primes() {
        let c = CommFunction::trivial();
        let b = SearchBound::default();
        assert!(is_parallel_prime(&canon("a.0", &c), &c, &b).unwrap());
        assert!(is_parallel_prime(&brancher_canonical(2).unwrap(), &c, &b).unwrap());
        assert!(!is_parallel_prime(&canon("a.0 || b.0", &c), &c, &b).unwrap());
        assert!(!is_parallel_prime(&canon("0", &c), &c, &b).unwrap());
        assert!(!is_parallel_prime(&canon("tau.tau.0", &c), &c, &b).unwrap());
    }

    #[test]
    fn decompositions() {
        let ccs = CommFunction::ccs();
        let b = SearchBound::default();
        assert!(parallel_decompose(&canon("0", &ccs), &ccs, &b)
            .unwrap()
            .factors
            .is_empty());
        let b2 = brancher_canonical(2).unwrap();
        assert_eq!(parallel_decompose(&b2, &ccs, &b).unwrap().factors, vec![b2]);
        let d = parallel_decompose(&canon("a.0 || ~a.0", &ccs), &ccs, &b).unwrap();
        assert_eq!(d.factors, vec![canon("a.0", &ccs), canon("~a.0", &ccs)]);
    }

    #[test]
    fn type_counts() {
        let c = CommFunction::trivial();
        let b = SearchBound::default();
        let w = 2;
        assert_eq!(type_count(&canon("0", &c), w, &c, &b), Ok(0));
        let b3 = brancher_canonical(w + 1).unwrap();
        assert_eq!(type_count(&b3, w, &c, &b), Ok(1));
        let b4 = brancher_canonical(w + 2).unwrap();
        let mut sem = Semantics::new(c.clone());
        let both = sem.par(&b3, &b4);
        assert_eq!(type_count(&both, w, &c, &b), Ok(2));
    }

    #[test]
    fn bound_is_enforced() {
        let c = CommFunction::trivial();
        let tight = SearchBound {
            max_universe: 1,
            ..SearchBound::default()
        };
        assert!(matches!(
            parallel_decompose(&canon("a.0 || b.0 || a.0", &c), &c, &tight),
            Err(DecompositionError::BoundExceeded { .. })
        ));
    }
}
