//! Shared strategies and a naive reference semantics for the property tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use procalg::semantics::CommFunction;
use procalg::syntax::{ActionName, Label, ProcessTerm};
use proptest::prelude::*;

pub fn label() -> impl Strategy<Value = Label> {
    prop_oneof![
        Just(Label::Tau),
        Just(Label::act("a")),
        Just(Label::Act(ActionName::new("a").co())),
        Just(Label::act("b")),
    ]
}

fn grow(leaf: BoxedStrategy<ProcessTerm>, depth: u32, size: u32) -> BoxedStrategy<ProcessTerm> {
    leaf.prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            (label(), inner.clone()).prop_map(|(l, p)| ProcessTerm::prefix(l, p)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| ProcessTerm::sum(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| ProcessTerm::lmerge(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| ProcessTerm::cmerge(p, q)),
            (inner.clone(), inner).prop_map(|(p, q)| ProcessTerm::par(p, q)),
        ]
    })
    .boxed()
}

/// Closed terms of modest size.
pub fn closed_term() -> BoxedStrategy<ProcessTerm> {
    grow(Just(ProcessTerm::Nil).boxed(), 4, 10)
}

/// Terms over the variables `x`, `y`, `z`.
pub fn open_term() -> BoxedStrategy<ProcessTerm> {
    let leaf = prop_oneof![
        Just(ProcessTerm::Nil),
        Just(ProcessTerm::var("x")),
        Just(ProcessTerm::var("y")),
        Just(ProcessTerm::var("z")),
    ]
    .boxed();
    grow(leaf, 4, 12)
}

pub fn comm() -> impl Strategy<Value = CommFunction> {
    prop_oneof![Just(CommFunction::trivial()), Just(CommFunction::ccs())]
}

/// Structural operational semantics written directly from the rules, over
/// terms rather than canonical processes.
pub fn steps(p: &ProcessTerm, c: &CommFunction) -> BTreeSet<(Label, ProcessTerm)> {
    match p {
        ProcessTerm::Nil => BTreeSet::new(),
        ProcessTerm::Var(v) => panic!("open term: {v}"),
        ProcessTerm::Prefix(l, q) => BTreeSet::from([(l.clone(), (**q).clone())]),
        ProcessTerm::Sum(q, r) => steps(q, c).into_iter().chain(steps(r, c)).collect(),
        ProcessTerm::LMerge(q, r) => steps(q, c)
            .into_iter()
            .map(|(l, q1)| (l, ProcessTerm::par(q1, (**r).clone())))
            .collect(),
        ProcessTerm::CMerge(q, r) => {
            let mut out = BTreeSet::new();
            for (l1, q1) in steps(q, c) {
                for (l2, r1) in steps(r, c) {
                    if let (Label::Act(a), Label::Act(b)) = (&l1, &l2) {
                        if let Some(g) = c.gamma(a, b) {
                            out.insert((g, ProcessTerm::par(q1.clone(), r1)));
                        }
                    }
                }
            }
            out
        }
        ProcessTerm::Par(q, r) => {
            let mut out = steps(&ProcessTerm::LMerge(q.clone(), r.clone()), c);
            out.extend(
                steps(&ProcessTerm::LMerge(r.clone(), q.clone()), c)
                    .into_iter()
                    .map(|(l, t)| match t {
                        ProcessTerm::Par(r1, q1) => (l, ProcessTerm::Par(q1, r1)),
                        other => unreachable!("{other}"),
                    }),
            );
            out.extend(steps(&ProcessTerm::CMerge(q.clone(), r.clone()), c));
            out
        }
    }
}

/// Bisimilarity of closed terms by direct recursion over the finite,
/// acyclic transition graphs.
pub struct NaiveBisim<'c> {
    comm: &'c CommFunction,
    memo: HashMap<(ProcessTerm, ProcessTerm), bool>,
    moves: HashMap<ProcessTerm, Vec<(Label, ProcessTerm)>>,
}

impl<'c> NaiveBisim<'c> {
    pub fn new(comm: &'c CommFunction) -> Self {
        NaiveBisim {
            comm,
            memo: HashMap::new(),
            moves: HashMap::new(),
        }
    }

    fn moves(&mut self, p: &ProcessTerm) -> Vec<(Label, ProcessTerm)> {
        if let Some(m) = self.moves.get(p) {
            return m.clone();
        }
        let m: Vec<_> = steps(p, self.comm).into_iter().collect();
        self.moves.insert(p.clone(), m.clone());
        m
    }

    pub fn bisimilar(&mut self, p: &ProcessTerm, q: &ProcessTerm) -> bool {
        if p == q {
            return true;
        }
        let key = (p.clone(), q.clone());
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let (mp, mq) = (self.moves(p), self.moves(q));
        let ok = mp
            .iter()
            .all(|(l, p1)| mq.iter().any(|(m, q1)| l == m && self.bisimilar(p1, q1)))
            && mq
                .iter()
                .all(|(m, q1)| mp.iter().any(|(l, p1)| l == m && self.bisimilar(p1, q1)));
        self.memo.insert(key, ok);
        ok
    }

    /// Longest run.
    pub fn depth(&mut self, p: &ProcessTerm) -> usize {
        self.moves(p)
            .iter()
            .map(|(_, q)| 1 + self.depth(q))
            .max()
            .unwrap_or(0)
    }
}
