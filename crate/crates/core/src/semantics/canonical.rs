use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, LazyLock, Mutex, Weak};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::syntax::{Label, ProcessTerm};

/// One bisimilarity class of closed terms, represented as its finite set of
/// `(label, class)` branches. Values are hash-consed, so two canonical
/// processes are equal exactly when they share a node.
#[derive(Clone)]
pub struct CanonicalProcess(Arc<Node>);

struct Node {
    id: u64,
    depth: u32,
    branches: Box<[(Label, CanonicalProcess)]>,
}

type Key = Box<[(Label, u64)]>;

struct Table {
    map: FxHashMap<Key, Weak<Node>>,
    sweep_at: usize,
}

static TABLE: LazyLock<Mutex<Table>> = LazyLock::new(|| {
    Mutex::new(Table {
        map: FxHashMap::default(),
        sweep_at: 1 << 16,
    })
});
static NEXT_ID: AtomicU64 = AtomicU64::new(0);

impl CanonicalProcess {
    /// Interns a branch set. Duplicates are removed and the order is fixed here.
    pub fn from_branches(mut branches: Vec<(Label, CanonicalProcess)>) -> Self {
        branches.sort();
        branches.dedup();
        let key: Key = branches.iter().map(|(l, p)| (l.clone(), p.id())).collect();
        let mut table = TABLE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(node) = table.map.get(&key).and_then(Weak::upgrade) {
            return CanonicalProcess(node);
        }
        let depth = branches
            .iter()
            .map(|(_, p)| p.depth() + 1)
            .max()
            .unwrap_or(0) as u32;
        let node = Arc::new(Node {
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
            depth,
            branches: branches.into_boxed_slice(),
        });
        table.map.insert(key, Arc::downgrade(&node));
        if table.map.len() >= table.sweep_at {
            table.map.retain(|_, w| w.strong_count() > 0);
            table.sweep_at = (table.map.len() * 2).max(1 << 16);
        }
        CanonicalProcess(node)
    }

    pub fn nil() -> Self {
        Self::from_branches(Vec::new())
    }

    /// Identity of the node; stable for the lifetime of the value, never reused.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn branches(&self) -> &[(Label, CanonicalProcess)] {
        &self.0.branches
    }

    pub fn is_nil(&self) -> bool {
        self.0.branches.is_empty()
    }

    /// Length of the longest transition sequence.
    pub fn depth(&self) -> usize {
        self.0.depth as usize
    }

    /// Number of distinct outgoing `(label, target)` pairs.
    pub fn branching_degree(&self) -> usize {
        self.0.branches.len()
    }

    /// A representative term: the sum of the prefixed branch representatives.
    pub fn to_term(&self) -> ProcessTerm {
        ProcessTerm::sum_of(
            self.branches()
                .iter()
                .map(|(l, p)| ProcessTerm::prefix(l.clone(), p.to_term())),
        )
    }

    /// All states reachable from `self`, in breadth-first discovery order,
    /// `self` first.
    pub fn reachable(&self) -> Vec<CanonicalProcess> {
        let mut index: FxHashMap<u64, usize> = FxHashMap::default();
        let mut states = vec![self.clone()];
        index.insert(self.id(), 0);
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(p) = queue.pop_front() {
            for (_, q) in p.branches() {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(q.id()) {
                    e.insert(states.len());
                    states.push(q.clone());
                    queue.push_back(q.clone());
                }
            }
        }
        states
    }

    /// The transition graph as `(source, label, target)` with states numbered
    /// by breadth-first discovery order from `self` (state 0).
    pub fn lts(&self) -> Vec<(usize, Label, usize)> {
        let states = self.reachable();
        let index: FxHashMap<u64, usize> = states
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id(), i))
            .collect();
        let mut edges = Vec::new();
        for (i, p) in states.iter().enumerate() {
            for (l, q) in p.branches() {
                edges.push((i, l.clone(), index[&q.id()]));
            }
        }
        edges
    }
}

pub fn depth(p: &CanonicalProcess) -> usize {
    p.depth()
}

pub fn branching_degree(p: &CanonicalProcess) -> usize {
    p.branching_degree()
}

impl PartialEq for CanonicalProcess {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for CanonicalProcess {}

impl Hash for CanonicalProcess {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

/// Structural order: depth, then number of branches, then branches
/// lexicographically. Independent of allocation order, so it is reproducible.
impl Ord for CanonicalProcess {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0.id == other.0.id {
            return Ordering::Equal;
        }
        self.0
            .depth
            .cmp(&other.0.depth)
            .then_with(|| self.0.branches.len().cmp(&other.0.branches.len()))
            .then_with(|| self.0.branches.iter().cmp(other.0.branches.iter()))
    }
}

impl PartialOrd for CanonicalProcess {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

impl fmt::Debug for CanonicalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}[{}]", self.id(), self)
    }
}

impl Serialize for CanonicalProcess {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
