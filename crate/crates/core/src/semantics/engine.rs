use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::{CanonicalProcess, CommFunction, SemanticsError};
use crate::syntax::{BinOp, Label, ProcessTerm, Variable};

pub type Branches = Vec<(Label, CanonicalProcess)>;

/// Memo entries kept before a cache is dropped wholesale.
const MEMO_LIMIT: usize = 1 << 22;

/// The operators of the algebra, lifted to canonical processes, with
/// per-context memoisation.
pub struct Semantics {
    comm: CommFunction,
    nil: CanonicalProcess,
    binary: FxHashMap<(BinOp, u64, u64), CanonicalProcess>,
    prefix: FxHashMap<(Label, u64), CanonicalProcess>,
}

/// Sorts a branch list by `(label, id)` and removes duplicates. Two such lists
/// are equal iff the processes they denote are bisimilar.
pub fn sort_by_id(branches: &mut Branches) {
    branches.sort_unstable_by(|(l1, p1), (l2, p2)| l1.cmp(l2).then(p1.id().cmp(&p2.id())));
    branches.dedup();
}

impl Semantics {
    pub fn new(comm: CommFunction) -> Self {
        Semantics {
            comm,
            nil: CanonicalProcess::nil(),
            binary: FxHashMap::default(),
            prefix: FxHashMap::default(),
        }
    }

    pub fn comm(&self) -> &CommFunction {
        &self.comm
    }

    pub fn nil(&self) -> CanonicalProcess {
        self.nil.clone()
    }

    pub fn prefix(&mut self, label: &Label, p: &CanonicalProcess) -> CanonicalProcess {
        if let Some(r) = self.prefix.get(&(label.clone(), p.id())) {
            return r.clone();
        }
        let r = CanonicalProcess::from_branches(vec![(label.clone(), p.clone())]);
        if self.prefix.len() >= MEMO_LIMIT {
            self.prefix.clear();
        }
        self.prefix.insert((label.clone(), p.id()), r.clone());
        r
    }

    fn memo(
        &self,
        op: BinOp,
        p: &CanonicalProcess,
        q: &CanonicalProcess,
    ) -> Option<CanonicalProcess> {
        self.binary.get(&(op, p.id(), q.id())).cloned()
    }

    fn remember(
        &mut self,
        op: BinOp,
        p: &CanonicalProcess,
        q: &CanonicalProcess,
        r: &CanonicalProcess,
    ) {
        if self.binary.len() >= MEMO_LIMIT {
            self.binary.clear();
        }
        self.binary.insert((op, p.id(), q.id()), r.clone());
    }

    pub fn binary(
        &mut self,
        op: BinOp,
        p: &CanonicalProcess,
        q: &CanonicalProcess,
    ) -> CanonicalProcess {
        match op {
            BinOp::Sum => self.sum(p, q),
            BinOp::LMerge => self.lmerge(p, q),
            BinOp::CMerge => self.cmerge(p, q),
            BinOp::Par => self.par(p, q),
        }
    }

    /// Root branches of `p op q`, sorted by [`sort_by_id`], without interning the root.
    pub fn binary_branches(
        &mut self,
        op: BinOp,
        p: &CanonicalProcess,
        q: &CanonicalProcess,
    ) -> Branches {
        let mut out = Branches::new();
        match op {
            BinOp::Sum => {
                out.extend_from_slice(p.branches());
                out.extend_from_slice(q.branches());
            }
            BinOp::LMerge => self.push_lmerge(p, q, &mut out),
            BinOp::CMerge => self.push_cmerge(p, q, &mut out),
            BinOp::Par => {
                self.push_lmerge(p, q, &mut out);
                self.push_rmerge(p, q, &mut out);
                self.push_cmerge(p, q, &mut out);
            }
        }
        sort_by_id(&mut out);
        out
    }

    fn push_lmerge(&mut self, p: &CanonicalProcess, q: &CanonicalProcess, out: &mut Branches) {
        for (l, p1) in p.branches() {
            let t = self.par(p1, q);
            out.push((l.clone(), t));
        }
    }

    fn push_rmerge(&mut self, p: &CanonicalProcess, q: &CanonicalProcess, out: &mut Branches) {
        for (l, q1) in q.branches() {
            let t = self.par(p, q1);
            out.push((l.clone(), t));
        }
    }

    fn push_cmerge(&mut self, p: &CanonicalProcess, q: &CanonicalProcess, out: &mut Branches) {
        for (l1, p1) in p.branches() {
            let Label::Act(a) = l1 else { continue };
            for (l2, q1) in q.branches() {
                let Label::Act(b) = l2 else { continue };
                if let Some(c) = self.comm.gamma(a, b) {
                    let t = self.par(p1, q1);
                    out.push((c, t));
                }
            }
        }
    }

    pub fn sum(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> CanonicalProcess {
        if q.is_nil() || p == q {
            return p.clone();
        }
        if p.is_nil() {
            return q.clone();
        }
        let (p, q) = if p.id() <= q.id() { (p, q) } else { (q, p) };
        if let Some(r) = self.memo(BinOp::Sum, p, q) {
            return r;
        }
        let r = CanonicalProcess::from_branches(
            p.branches().iter().chain(q.branches()).cloned().collect(),
        );
        self.remember(BinOp::Sum, p, q, &r);
        r
    }

    pub fn lmerge(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> CanonicalProcess {
        if p.is_nil() {
            return self.nil();
        }
        if q.is_nil() {
            return p.clone();
        }
        if let Some(r) = self.memo(BinOp::LMerge, p, q) {
            return r;
        }
        let mut out = Branches::new();
        self.push_lmerge(p, q, &mut out);
        let r = CanonicalProcess::from_branches(out);
        self.remember(BinOp::LMerge, p, q, &r);
        r
    }

    pub fn cmerge(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> CanonicalProcess {
        if p.is_nil() || q.is_nil() {
            return self.nil();
        }
        let (p, q) = if p.id() <= q.id() { (p, q) } else { (q, p) };
        if let Some(r) = self.memo(BinOp::CMerge, p, q) {
            return r;
        }
        let mut out = Branches::new();
        self.push_cmerge(p, q, &mut out);
        let r = CanonicalProcess::from_branches(out);
        self.remember(BinOp::CMerge, p, q, &r);
        r
    }

    pub fn par(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> CanonicalProcess {
        if p.is_nil() {
            return q.clone();
        }
        if q.is_nil() {
            return p.clone();
        }
        let (p, q) = if p.id() <= q.id() { (p, q) } else { (q, p) };
        if let Some(r) = self.memo(BinOp::Par, p, q) {
            return r;
        }
        let mut out = Branches::new();
        self.push_lmerge(p, q, &mut out);
        self.push_rmerge(p, q, &mut out);
        self.push_cmerge(p, q, &mut out);
        let r = CanonicalProcess::from_branches(out);
        self.remember(BinOp::Par, p, q, &r);
        r
    }

    /// The class of a closed term.
    pub fn canonicalize(&mut self, term: &ProcessTerm) -> Result<CanonicalProcess, SemanticsError> {
        self.evaluate(term, &BTreeMap::new())
    }

    /// The class of `term` with its variables interpreted by `valuation`.
    pub fn evaluate(
        &mut self,
        term: &ProcessTerm,
        valuation: &BTreeMap<Variable, CanonicalProcess>,
    ) -> Result<CanonicalProcess, SemanticsError> {
        Ok(match term {
            ProcessTerm::Nil => self.nil(),
            ProcessTerm::Var(v) => valuation
                .get(v)
                .cloned()
                .ok_or_else(|| SemanticsError::OpenTerm(v.clone()))?,
            ProcessTerm::Prefix(l, p) => {
                let p = self.evaluate(p, valuation)?;
                self.prefix(l, &p)
            }
            _ => {
                let (op, p, q) = term.as_binary().expect("binary constructor");
                let p = self.evaluate(p, valuation)?;
                let q = self.evaluate(q, valuation)?;
                self.binary(op, &p, &q)
            }
        })
    }

    pub fn bisimilar(&mut self, p: &ProcessTerm, q: &ProcessTerm) -> Result<bool, SemanticsError> {
        Ok(self.canonicalize(p)? == self.canonicalize(q)?)
    }
}
