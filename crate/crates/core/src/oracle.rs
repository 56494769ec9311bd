//! Brute-force semantic testing over a bounded universe of closed processes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::axioms::AxiomId;
use crate::decider::Valuation;
use crate::semantics::{
    sort_by_id, Branches, CanonicalProcess, CommFunction, CommKind, Experiment, Semantics,
    SemanticsError,
};
use crate::syntax::{Alphabet, BinOp, Equation, Label, ProcessTerm, Variable};

/// Limits for enumerating closed processes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SearchBound {
    pub max_depth: usize,
    pub max_fanout: usize,
    pub alphabet: Alphabet,
    /// Hard cap on the number of enumerated processes.
    pub max_universe: usize,
    /// Instantiation spaces up to this size are searched exhaustively;
    /// larger ones are sampled.
    pub max_instances: u64,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            max_depth: 2,
            max_fanout: 2,
            alphabet: Alphabet::pair("a"),
            max_universe: 5000,
            max_instances: 20_000_000,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum OracleError {
    #[error("invalid search bound: {0}")]
    Bound(String),
    #[error("counterexample failed re-verification")]
    Unverified,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl SearchBound {
    pub fn validate(&self, c: &CommFunction) -> Result<(), OracleError> {
        if self.max_depth == 0
            || self.max_fanout == 0
            || self.max_universe == 0
            || self.max_instances == 0
        {
            return Err(OracleError::Bound("all limits must be positive".into()));
        }
        if c.kind() == CommKind::Ccs && !self.alphabet.is_bar_closed() {
            return Err(OracleError::Bound(format!(
                "alphabet {{{}}} is not closed under co-naming",
                self.alphabet
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct SearchStats {
    pub instances: u64,
    pub exhaustive: bool,
    pub universe: usize,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let how = if self.exhaustive {
            "exhaustive"
        } else {
            "sampled"
        };
        write!(
            f,
            "{} instances ({how}) over {} processes",
            self.instances, self.universe
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SampleOutcome {
    NoCounterexample(SearchStats),
    /// `experiment` holds for the left-hand side and fails for the right.
    Counterexample {
        valuation: Valuation,
        experiment: Experiment,
        stats: SearchStats,
    },
}

impl SampleOutcome {
    pub fn counterexample(&self) -> Option<&Valuation> {
        match self {
            SampleOutcome::NoCounterexample(_) => None,
            SampleOutcome::Counterexample { valuation, .. } => Some(valuation),
        }
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            SampleOutcome::NoCounterexample(s) | SampleOutcome::Counterexample { stats: s, .. } => {
                *s
            }
        }
    }
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>, limit: usize) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        if out.len() >= limit {
            return;
        }
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All canonical processes of depth at most `max_depth` whose states have at
/// most `max_fanout` branches over `tau` and the alphabet, in the structural
/// order. Truncated at `max_universe`.
pub fn universe(bound: &SearchBound) -> Vec<CanonicalProcess> {
    let labels = bound.alphabet.labels();
    let mut level = vec![CanonicalProcess::nil()];
    let mut truncated = false;
    for _ in 0..bound.max_depth {
        let options: Vec<(Label, CanonicalProcess)> = labels
            .iter()
            .flat_map(|l| level.iter().map(move |p| (l.clone(), p.clone())))
            .collect();
        let mut subsets = Vec::new();
        for size in 0..=bound.max_fanout {
            combinations(options.len(), size, &mut subsets, bound.max_universe);
        }
        truncated |= subsets.len() >= bound.max_universe;
        level = subsets
            .iter()
            .map(|s| {
                CanonicalProcess::from_branches(s.iter().map(|&i| options[i].clone()).collect())
            })
            .collect();
        level.sort();
        level.dedup();
    }
    if truncated {
        log::warn!("universe truncated at {} processes", bound.max_universe);
    }
    level
}

#[derive(Clone, Debug)]
enum Node {
    Nil,
    Var(usize),
    Prefix(Label, usize),
    Bin(BinOp, usize, usize),
}

/// A term flattened in post-order, each node tagged with the highest
/// variable index it depends on, so that nested enumeration only recomputes
/// what changed.
struct Compiled {
    nodes: Vec<Node>,
    level: Vec<Option<usize>>,
    root: usize,
    /// `todo[i]`: non-root nodes to recompute when variable `i` changes.
    todo: Vec<Vec<usize>>,
}

impl Compiled {
    fn new(t: &ProcessTerm, vars: &[Variable]) -> Self {
        let mut c = Compiled {
            nodes: Vec::new(),
            level: Vec::new(),
            root: 0,
            todo: Vec::new(),
        };
        c.root = c.push(t, vars);
        c.todo = (0..vars.len())
            .map(|from| {
                (0..c.nodes.len())
                    .filter(|&i| i != c.root && c.level[i].is_some_and(|l| l >= from))
                    .collect()
            })
            .collect();
        c
    }

    fn push(&mut self, t: &ProcessTerm, vars: &[Variable]) -> usize {
        let (node, level) = match t {
            ProcessTerm::Nil => (Node::Nil, None),
            ProcessTerm::Var(v) => {
                let i = vars.iter().position(|w| w == v).expect("variable listed");
                (Node::Var(i), Some(i))
            }
            ProcessTerm::Prefix(l, p) => {
                let c = self.push(p, vars);
                (Node::Prefix(l.clone(), c), self.level[c])
            }
            _ => {
                let (op, p, q) = t.as_binary().expect("binary constructor");
                let a = self.push(p, vars);
                let b = self.push(q, vars);
                (Node::Bin(op, a, b), self.level[a].max(self.level[b]))
            }
        };
        self.nodes.push(node);
        self.level.push(level);
        self.nodes.len() - 1
    }

    fn eval_node(
        &self,
        i: usize,
        vals: &[Option<CanonicalProcess>],
        env: &[CanonicalProcess],
        sem: &mut Semantics,
    ) -> CanonicalProcess {
        let get = |j: usize| vals[j].as_ref().expect("child evaluated");
        match &self.nodes[i] {
            Node::Nil => sem.nil(),
            Node::Var(v) => env[*v].clone(),
            Node::Prefix(l, c) => sem.prefix(l, get(*c)),
            Node::Bin(op, a, b) => sem.binary(*op, get(*a), get(*b)),
        }
    }

    fn init(&self, sem: &mut Semantics) -> Vec<Option<CanonicalProcess>> {
        let mut vals = vec![None; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if self.level[i].is_none() && i != self.root {
                vals[i] = Some(self.eval_node(i, &vals, &[], sem));
            }
        }
        vals
    }

    fn refresh(
        &self,
        from: usize,
        vals: &mut [Option<CanonicalProcess>],
        env: &[CanonicalProcess],
        sem: &mut Semantics,
    ) {
        for &i in &self.todo[from] {
            vals[i] = Some(self.eval_node(i, vals, env, sem));
        }
    }

    fn root_branches(
        &self,
        vals: &[Option<CanonicalProcess>],
        env: &[CanonicalProcess],
        sem: &mut Semantics,
    ) -> Branches {
        let get = |j: usize| vals[j].as_ref().expect("child evaluated");
        match &self.nodes[self.root] {
            Node::Nil => Branches::new(),
            Node::Var(v) => {
                let mut b = env[*v].branches().to_vec();
                sort_by_id(&mut b);
                b
            }
            Node::Prefix(l, c) => vec![(l.clone(), get(*c).clone())],
            Node::Bin(op, a, b) => sem.binary_branches(*op, get(*a), get(*b)),
        }
    }
}

/// Looks for closed instances of `eq` over `universe` whose sides are not
/// bisimilar. Exhaustive when the instance space has at most `max_instances`
/// elements (first counterexample in lexicographic order, first variable
/// outermost); otherwise `sample` uniformly drawn instances.
pub fn search_instances(
    eq: &Equation,
    sem: &mut Semantics,
    universe: &[CanonicalProcess],
    max_instances: u64,
    sample: usize,
    seed: u64,
) -> Result<SampleOutcome, OracleError> {
    let vars = eq.vars_in_order();
    let k = vars.len();
    let u = universe.len();
    let lhs = Compiled::new(&eq.lhs, &vars);
    let rhs = Compiled::new(&eq.rhs, &vars);
    let mut lv = lhs.init(sem);
    let mut rv = rhs.init(sem);
    let space = (u as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let exhaustive = space <= max_instances as u128;
    let total = if exhaustive {
        space as u64
    } else {
        sample as u64
    };
    let stats = |instances| SearchStats {
        instances,
        exhaustive,
        universe: u,
    };
    if k > 0 && u == 0 {
        return Ok(SampleOutcome::NoCounterexample(stats(0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0usize; k];
    let mut env: Vec<CanonicalProcess> = vec![CanonicalProcess::nil(); k];
    let mut from = 0;
    for n in 0..total {
        if !exhaustive {
            idx.iter_mut().for_each(|i| *i = rng.gen_range(0..u));
            from = 0;
        }
        for i in from..k {
            env[i] = universe[idx[i]].clone();
        }
        if k > 0 {
            lhs.refresh(from, &mut lv, &env, sem);
            rhs.refresh(from, &mut rv, &env, sem);
        }
        if lhs.root_branches(&lv, &env, sem) != rhs.root_branches(&rv, &env, sem) {
            let valuation = Valuation {
                assignment: vars
                    .iter()
                    .cloned()
                    .zip(env.iter().map(CanonicalProcess::to_term))
                    .collect(),
            };
            let experiment =
                crate::decider::separate(eq, &valuation, sem)?.ok_or(OracleError::Unverified)?;
            return Ok(SampleOutcome::Counterexample {
                valuation,
                experiment,
                stats: stats(n + 1),
            });
        }
        if exhaustive {
            let Some(i) = (0..k).rev().find(|&i| idx[i] + 1 < u) else {
                break;
            };
            idx[i] += 1;
            idx[i + 1..].iter_mut().for_each(|j| *j = 0);
            from = i;
        }
    }
    Ok(SampleOutcome::NoCounterexample(stats(total)))
}

/// Checks `eq` on closed instances drawn from the bounded universe.
pub fn check_equation_sampled(
    eq: &Equation,
    c: &CommFunction,
    bound: &SearchBound,
    sample: usize,
    seed: u64,
) -> Result<SampleOutcome, OracleError> {
    bound.validate(c)?;
    let universe = universe(bound);
    let mut sem = Semantics::new(c.clone());
    search_instances(eq, &mut sem, &universe, bound.max_instances, sample, seed)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SweepRecord {
    pub law: String,
    pub comm: String,
    pub equation: String,
    pub instances: u64,
    pub exhaustive: bool,
    pub expected_valid: bool,
    pub counterexample: Option<Valuation>,
}

impl SweepRecord {
    pub fn as_expected(&self) -> bool {
        self.expected_valid == self.counterexample.is_none()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SweepReport {
    pub universe: usize,
    pub records: Vec<SweepRecord>,
}

impl SweepReport {
    pub fn all_as_expected(&self) -> bool {
        self.records.iter().all(SweepRecord::as_expected)
    }

    pub fn find(&self, law: &str, comm: &str) -> Option<&SweepRecord> {
        self.records.iter().find(|r| r.law == law && r.comm == comm)
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe: {} processes", self.universe)?;
        for r in &self.records {
            let status = match (&r.counterexample, r.as_expected()) {
                (None, true) => "pass".to_string(),
                (Some(v), true) => format!("refuted as expected by {v}"),
                (None, false) => "UNEXPECTED PASS".to_string(),
                (Some(v), false) => format!("VIOLATED by {v}"),
            };
            let how = if r.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            };
            writeln!(
                f,
                "{:<10} {:<5} {:>9} {:<10} {}",
                r.law, r.comm, r.instances, how, status
            )?;
        }
        Ok(())
    }
}

/// Checks every law of the catalogue on closed instances, under the trivial
/// and the CCS communication functions. `F` is expected to fail under CCS
/// whenever the alphabet has a communicating pair; everything else must hold.
/// Laws whose instance space exceeds the bound are sampled.
pub fn axiom_soundness_sweep(
    bound: &SearchBound,
    sample: usize,
    seed: u64,
) -> Result<SweepReport, OracleError> {
    let universe = universe(bound);
    let mut records = Vec::new();
    for (name, c) in [
        ("none", CommFunction::trivial()),
        ("ccs", CommFunction::ccs()),
    ] {
        bound.validate(&c)?;
        let mut laws = AxiomId::table(&bound.alphabet, &c);
        laws.extend(AxiomId::derived());
        laws.extend([AxiomId::F, AxiomId::H]);
        let communicates = bound
            .alphabet
            .iter()
            .any(|a| bound.alphabet.iter().any(|b| c.gamma(a, b).is_some()));
        let mut sem = Semantics::new(c.clone());
        for law in laws {
            let (lhs, rhs) = law
                .sides(&c)
                .expect("catalogue instances satisfy their side conditions");
            let eq = Equation::new(lhs, rhs);
            let outcome =
                search_instances(&eq, &mut sem, &universe, bound.max_instances, sample, seed)?;
            let stats = outcome.stats();
            log::info!("{law} under {name}: {stats}");
            records.push(SweepRecord {
                law: law.to_string(),
                comm: name.to_string(),
                equation: eq.to_string(),
                instances: stats.instances,
                exhaustive: stats.exhaustive,
                expected_valid: !(law == AxiomId::F && communicates),
                counterexample: outcome.counterexample().cloned(),
            });
        }
    }
    Ok(SweepReport {
        universe: universe.len(),
        records,
    })
}
