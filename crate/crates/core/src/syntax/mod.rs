//! Abstract syntax of process terms and the purely syntactic measures on them.

mod parse;
mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse, parse_equation, parse_term, ParseError, ParseErrorKind, Parsed};

/// An observable action `a` or its co-name `~a`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionName {
    name: Arc<str>,
    barred: bool,
}

impl ActionName {
    /// An unbarred action. `name` must be a plain identifier other than `tau`.
    pub fn new(name: &str) -> Self {
        debug_assert!(
            is_identifier(name) && name != "tau",
            "invalid action name {name:?}"
        );
        ActionName {
            name: Arc::from(name),
            barred: false,
        }
    }

    /// Parses `a` or `~a`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let (barred, ident) = match text.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        if !is_identifier(ident) || ident == "tau" {
            return None;
        }
        Some(ActionName {
            name: Arc::from(ident),
            barred,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_barred(&self) -> bool {
        self.barred
    }

    /// The co-name; `co(co(a)) == a` and `co(a) != a`.
    pub fn co(&self) -> Self {
        ActionName {
            name: self.name.clone(),
            barred: !self.barred,
        }
    }
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "~{}", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

impl Serialize for ActionName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ActionName::parse(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid action {text:?}")))
    }
}

/// Transition label: the silent action or an observable one. `Tau` sorts first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Tau,
    Act(ActionName),
}

impl Label {
    pub fn act(name: &str) -> Self {
        Label::Act(ActionName::new(name))
    }

    pub fn action(&self) -> Option<&ActionName> {
        match self {
            Label::Tau => None,
            Label::Act(a) => Some(a),
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        if text.trim() == "tau" {
            Some(Label::Tau)
        } else {
            ActionName::parse(text).map(Label::Act)
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("tau"),
            Label::Act(a) => a.fmt(f),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Self {
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// The set of declared observable actions. Identifiers naming a declared action
/// (barred or not) are parsed as actions, everything else as a variable.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Alphabet(BTreeSet<ActionName>);

impl Alphabet {
    pub fn new(actions: impl IntoIterator<Item = ActionName>) -> Self {
        Alphabet(actions.into_iter().collect())
    }

    /// Parses a comma separated list such as `a,~a,b`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut set = BTreeSet::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let action =
                ActionName::parse(part).ok_or_else(|| format!("invalid action name `{part}`"))?;
            set.insert(action);
        }
        Ok(Alphabet(set))
    }

    /// `{a, ~a}`.
    pub fn pair(name: &str) -> Self {
        let a = ActionName::new(name);
        Alphabet::new([a.co(), a])
    }

    pub fn contains(&self, a: &ActionName) -> bool {
        self.0.contains(a)
    }

    pub fn declares_identifier(&self, ident: &str) -> bool {
        self.0.iter().any(|a| a.name() == ident)
    }

    pub fn is_bar_closed(&self) -> bool {
        self.0.iter().all(|a| self.0.contains(&a.co()))
    }

    pub fn bar_closure(&self) -> Self {
        Alphabet(self.0.iter().flat_map(|a| [a.clone(), a.co()]).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionName> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, a: ActionName) {
        self.0.insert(a);
    }

    /// Labels `tau` followed by the actions in order.
    pub fn labels(&self) -> Vec<Label> {
        std::iter::once(Label::Tau)
            .chain(self.0.iter().cloned().map(Label::Act))
            .collect()
    }

    /// Smallest unbarred name, used when some bar pair has to be picked.
    pub fn first_pair(&self) -> Option<ActionName> {
        self.0
            .iter()
            .next()
            .map(|a| if a.is_barred() { a.co() } else { a.clone() })
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Alphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl FromIterator<ActionName> for Alphabet {
    fn from_iter<I: IntoIterator<Item = ActionName>>(iter: I) -> Self {
        Alphabet(iter.into_iter().collect())
    }
}

pub type Term = Arc<ProcessTerm>;

/// Process terms over the seven constructors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ProcessTerm {
    Nil,
    Var(Variable),
    Prefix(Label, Term),
    Sum(Term, Term),
    LMerge(Term, Term),
    CMerge(Term, Term),
    Par(Term, Term),
}

/// Binary operator tags, shared by several modules.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum BinOp {
    Sum,
    LMerge,
    CMerge,
    Par,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Sum => "+",
            BinOp::LMerge => "|_",
            BinOp::CMerge => "|",
            BinOp::Par => "||",
        }
    }
}

impl ProcessTerm {
    pub fn var(name: &str) -> Self {
        ProcessTerm::Var(Variable::new(name))
    }

    pub fn prefix(label: Label, p: impl Into<Term>) -> Self {
        ProcessTerm::Prefix(label, p.into())
    }

    pub fn tau(p: impl Into<Term>) -> Self {
        ProcessTerm::Prefix(Label::Tau, p.into())
    }

    pub fn act(name: &str, p: impl Into<Term>) -> Self {
        ProcessTerm::Prefix(Label::act(name), p.into())
    }

    pub fn sum(p: impl Into<Term>, q: impl Into<Term>) -> Self {
        ProcessTerm::Sum(p.into(), q.into())
    }

    pub fn lmerge(p: impl Into<Term>, q: impl Into<Term>) -> Self {
        ProcessTerm::LMerge(p.into(), q.into())
    }

    pub fn cmerge(p: impl Into<Term>, q: impl Into<Term>) -> Self {
        ProcessTerm::CMerge(p.into(), q.into())
    }

    pub fn par(p: impl Into<Term>, q: impl Into<Term>) -> Self {
        ProcessTerm::Par(p.into(), q.into())
    }

    pub fn binary(op: BinOp, p: impl Into<Term>, q: impl Into<Term>) -> Self {
        match op {
            BinOp::Sum => ProcessTerm::Sum(p.into(), q.into()),
            BinOp::LMerge => ProcessTerm::LMerge(p.into(), q.into()),
            BinOp::CMerge => ProcessTerm::CMerge(p.into(), q.into()),
            BinOp::Par => ProcessTerm::Par(p.into(), q.into()),
        }
    }

    pub fn as_binary(&self) -> Option<(BinOp, &Term, &Term)> {
        match self {
            ProcessTerm::Sum(p, q) => Some((BinOp::Sum, p, q)),
            ProcessTerm::LMerge(p, q) => Some((BinOp::LMerge, p, q)),
            ProcessTerm::CMerge(p, q) => Some((BinOp::CMerge, p, q)),
            ProcessTerm::Par(p, q) => Some((BinOp::Par, p, q)),
            _ => None,
        }
    }

    /// Left-folded summation; the empty sum is `0`.
    pub fn sum_of<I>(terms: I) -> ProcessTerm
    where
        I: IntoIterator,
        I::Item: Into<Term>,
    {
        let mut iter = terms.into_iter();
        let Some(first) = iter.next() else {
            return ProcessTerm::Nil;
        };
        let mut acc: Term = first.into();
        for t in iter {
            acc = Arc::new(ProcessTerm::Sum(acc, t.into()));
        }
        Arc::unwrap_or_clone(acc)
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, ProcessTerm::Nil)
    }

    /// Not `0` and not an alternative composition.
    pub fn is_simple(&self) -> bool {
        !matches!(self, ProcessTerm::Nil | ProcessTerm::Sum(..))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            ProcessTerm::Nil => true,
            ProcessTerm::Var(_) => false,
            ProcessTerm::Prefix(_, p) => p.is_closed(),
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => p.is_closed() && q.is_closed(),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            ProcessTerm::Nil | ProcessTerm::Var(_) => vec![],
            ProcessTerm::Prefix(_, p) => vec![p],
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => vec![p, q],
        }
    }

    /// Height: `0` has height 0, a variable 1, a prefix adds 1, a sum takes the
    /// maximum and each of the three merges adds the heights of its operands.
    pub fn height(&self) -> usize {
        match self {
            ProcessTerm::Nil => 0,
            ProcessTerm::Var(_) => 1,
            ProcessTerm::Prefix(_, p) => p.height() + 1,
            ProcessTerm::Sum(p, q) => p.height().max(q.height()),
            ProcessTerm::LMerge(p, q) | ProcessTerm::CMerge(p, q) | ProcessTerm::Par(p, q) => {
                p.height() + q.height()
            }
        }
    }

    /// Number of symbols; every constructor and every leaf counts once.
    pub fn length(&self) -> usize {
        match self {
            ProcessTerm::Nil | ProcessTerm::Var(_) => 1,
            ProcessTerm::Prefix(_, p) => 1 + p.length(),
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => 1 + p.length() + q.length(),
        }
    }

    pub fn measure(&self) -> (usize, usize) {
        (self.height(), self.length())
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Variables in order of first occurrence, left to right.
    pub fn vars_in_order(&self) -> Vec<Variable> {
        let mut out: Vec<Variable> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Variable)) {
        match self {
            ProcessTerm::Nil => {}
            ProcessTerm::Var(v) => f(v),
            ProcessTerm::Prefix(_, p) => p.visit_vars(f),
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => {
                p.visit_vars(f);
                q.visit_vars(f);
            }
        }
    }

    /// Observable actions occurring in prefixes.
    pub fn actions(&self) -> BTreeSet<ActionName> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<ActionName>) {
        match self {
            ProcessTerm::Nil | ProcessTerm::Var(_) => {}
            ProcessTerm::Prefix(l, p) => {
                if let Label::Act(a) = l {
                    out.insert(a.clone());
                }
                p.collect_actions(out);
            }
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => {
                p.collect_actions(out);
                q.collect_actions(out);
            }
        }
    }

    /// Flattens alternative compositions and drops `0` summands.
    pub fn syntactic_summands(&self) -> Vec<Term> {
        fn go(t: &Term, out: &mut Vec<Term>) {
            match &**t {
                ProcessTerm::Nil => {}
                ProcessTerm::Sum(p, q) => {
                    go(p, out);
                    go(q, out);
                }
                _ => out.push(t.clone()),
            }
        }
        let mut out = Vec::new();
        go(&Arc::new(self.clone()), &mut out);
        out
    }

    /// Homomorphic replacement of variables.
    pub fn substitute(
        &self,
        sigma: &BTreeMap<Variable, ProcessTerm>,
    ) -> Result<ProcessTerm, SubstError> {
        Ok(match self {
            ProcessTerm::Nil => ProcessTerm::Nil,
            ProcessTerm::Var(v) => sigma
                .get(v)
                .cloned()
                .ok_or_else(|| SubstError::Unmapped(v.clone()))?,
            ProcessTerm::Prefix(l, p) => {
                ProcessTerm::Prefix(l.clone(), Arc::new(p.substitute(sigma)?))
            }
            ProcessTerm::Sum(p, q)
            | ProcessTerm::LMerge(p, q)
            | ProcessTerm::CMerge(p, q)
            | ProcessTerm::Par(p, q) => {
                let (op, _, _) = self.as_binary().expect("binary");
                ProcessTerm::binary(op, p.substitute(sigma)?, q.substitute(sigma)?)
            }
        })
    }

    pub fn subterm_at(&self, position: &Position) -> Option<&ProcessTerm> {
        let mut cur = self;
        for &i in &position.0 {
            cur = cur.children().get(i).map(|t| &***t)?;
        }
        Some(cur)
    }

    /// Copy of `self` with the subterm at `position` replaced.
    pub fn replace_at(&self, position: &Position, replacement: ProcessTerm) -> Option<ProcessTerm> {
        fn go(t: &ProcessTerm, path: &[usize], replacement: ProcessTerm) -> Option<ProcessTerm> {
            let Some((&i, rest)) = path.split_first() else {
                return Some(replacement);
            };
            match t {
                ProcessTerm::Prefix(l, p) if i == 0 => Some(ProcessTerm::Prefix(
                    l.clone(),
                    Arc::new(go(p, rest, replacement)?),
                )),
                _ => {
                    let (op, p, q) = t.as_binary()?;
                    match i {
                        0 => Some(ProcessTerm::binary(
                            op,
                            go(p, rest, replacement)?,
                            q.clone(),
                        )),
                        1 => Some(ProcessTerm::binary(
                            op,
                            p.clone(),
                            go(q, rest, replacement)?,
                        )),
                        _ => None,
                    }
                }
            }
        }
        go(self, &position.0, replacement)
    }
}

impl Serialize for ProcessTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<Variable> for ProcessTerm {
    fn from(v: Variable) -> Self {
        ProcessTerm::Var(v)
    }
}

/// `(height(p), length(p)) < (height(q), length(q))` lexicographically.
pub fn measure_less(p: &ProcessTerm, q: &ProcessTerm) -> bool {
    p.measure() < q.measure()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("no image for free variable `{0}`")]
    Unmapped(Variable),
}

/// Child-index path into a term; index 0 is the first operand, a prefix has one child.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn join(&self, path: &[usize]) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(path);
        Position(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text == "root" || text.is_empty() {
            return Some(Position::root());
        }
        text.split('.')
            .map(|s| s.parse::<usize>().ok())
            .collect::<Option<Vec<_>>>()
            .map(Position)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

/// A process equation `P = Q`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Equation {
    pub lhs: ProcessTerm,
    pub rhs: ProcessTerm,
}

impl Equation {
    pub fn new(lhs: ProcessTerm, rhs: ProcessTerm) -> Self {
        Equation { lhs, rhs }
    }

    /// Variables by first occurrence in `P = Q`, left to right.
    pub fn vars_in_order(&self) -> Vec<Variable> {
        let mut vars = self.lhs.vars_in_order();
        for v in self.rhs.vars_in_order() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars
    }

    pub fn is_closed(&self) -> bool {
        self.lhs.is_closed() && self.rhs.is_closed()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}
