use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::CanonicalProcess;
use crate::syntax::Label;

/// A modal formula telling two processes apart: the first satisfies it, the
/// second does not.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", content = "args", rename_all = "lowercase")]
pub enum Experiment {
    True,
    Diamond(Label, Box<Experiment>),
    Not(Box<Experiment>),
    And(Vec<Experiment>),
}

impl Experiment {
    /// Does `p` satisfy the formula.
    pub fn holds(&self, p: &CanonicalProcess) -> bool {
        match self {
            Experiment::True => true,
            Experiment::Diamond(l, f) => p.branches().iter().any(|(m, q)| m == l && f.holds(q)),
            Experiment::Not(f) => !f.holds(p),
            Experiment::And(fs) => fs.iter().all(|f| f.holds(p)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Experiment::True => 1,
            Experiment::Diamond(_, f) | Experiment::Not(f) => 1 + f.size(),
            Experiment::And(fs) => 1 + fs.iter().map(Experiment::size).sum::<usize>(),
        }
    }

    fn negate(self) -> Self {
        match self {
            Experiment::Not(f) => *f,
            f => Experiment::Not(Box::new(f)),
        }
    }

    fn diamond(l: &Label, mut parts: Vec<Experiment>) -> Self {
        let mut seen = Vec::with_capacity(parts.len());
        parts.retain(|f| {
            let fresh = !seen.contains(f);
            if fresh {
                seen.push(f.clone());
            }
            fresh
        });
        let inner = match parts.len() {
            0 => Experiment::True,
            1 => parts.pop().expect("one part"),
            _ => Experiment::And(parts),
        };
        Experiment::Diamond(l.clone(), Box::new(inner))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Experiment::True => f.write_str("true"),
            Experiment::Diamond(l, g) => match **g {
                Experiment::And(_) => write!(f, "<{l}>({g})"),
                _ => write!(f, "<{l}>{g}"),
            },
            Experiment::Not(g) => match **g {
                Experiment::And(_) => write!(f, "!({g})"),
                _ => write!(f, "!{g}"),
            },
            Experiment::And(gs) => {
                let parts: Vec<String> = gs
                    .iter()
                    .map(|g| match g {
                        Experiment::And(_) => format!("({g})"),
                        _ => g.to_string(),
                    })
                    .collect();
                f.write_str(&parts.join(" & "))
            }
        }
    }
}

/// A formula satisfied by `p` and not by `q`, or `None` when they are bisimilar.
/// Unanswerable moves are preferred, then a longest run when the depths
/// differ, then the smallest formula found by a memoised search.
pub fn distinguish(p: &CanonicalProcess, q: &CanonicalProcess) -> Option<Experiment> {
    Distinguisher::default().run(p, q)
}

/// A run of `p` of maximal length, as nested diamonds.
fn longest_run(p: &CanonicalProcess) -> Experiment {
    match p
        .branches()
        .iter()
        .find(|(_, r)| r.depth() + 1 == p.depth())
    {
        Some((l, r)) => Experiment::diamond(l, vec![longest_run(r)]),
        None => Experiment::True,
    }
}

#[derive(Default)]
struct Distinguisher {
    memo: FxHashMap<(u64, u64), Option<Experiment>>,
}

impl Distinguisher {
    fn run(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> Option<Experiment> {
        if p == q {
            return None;
        }
        if let Some(hit) = self.memo.get(&(p.id(), q.id())) {
            return hit.clone();
        }
        let found = self.search(p, q);
        self.memo.insert((p.id(), q.id()), found.clone());
        found
    }

    fn search(&mut self, p: &CanonicalProcess, q: &CanonicalProcess) -> Option<Experiment> {
        let has = |r: &CanonicalProcess, l: &Label| r.branches().iter().any(|(m, _)| m == l);
        for (l, _) in p.branches() {
            if !has(q, l) {
                return Some(Experiment::diamond(l, vec![]));
            }
        }
        for (l, _) in q.branches() {
            if !has(p, l) {
                return Some(Experiment::diamond(l, vec![]).negate());
            }
        }
        if p.depth() > q.depth() {
            return Some(longest_run(p));
        }
        if q.depth() > p.depth() {
            return Some(longest_run(q).negate());
        }
        let mut best: Option<Experiment> = None;
        for (flip, (a, b)) in [(false, (p, q)), (true, (q, p))] {
            for (l, a1) in a.branches() {
                let answers: Vec<&CanonicalProcess> = b
                    .branches()
                    .iter()
                    .filter(|(m, _)| m == l)
                    .map(|(_, r)| r)
                    .collect();
                if answers.contains(&a1) {
                    continue;
                }
                let parts = answers
                    .iter()
                    .map(|r| self.run(a1, r).expect("distinct states"))
                    .collect();
                let f = Experiment::diamond(l, parts);
                let f = if flip { f.negate() } else { f };
                if best.as_ref().is_none_or(|b| f.size() < b.size()) {
                    best = Some(f);
                }
            }
        }
        best
    }
}
