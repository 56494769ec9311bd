use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{ActionName, Label};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CommKind {
    Trivial,
    Ccs,
    Custom,
}

/// A partial binary function on actions governing synchronisation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CommFunction {
    kind: CommKind,
    table: BTreeMap<(ActionName, ActionName), Label>,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum CommViolation {
    #[error("not commutative at ({0}, {1})")]
    NotCommutative(ActionName, ActionName),
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(ActionName, ActionName, ActionName),
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

impl CommFunction {
    pub fn trivial() -> Self {
        CommFunction {
            kind: CommKind::Trivial,
            table: BTreeMap::new(),
        }
    }

    pub fn ccs() -> Self {
        CommFunction {
            kind: CommKind::Ccs,
            table: BTreeMap::new(),
        }
    }

    /// A table taken verbatim; see [`validate_comm`].
    pub fn custom(entries: impl IntoIterator<Item = ((ActionName, ActionName), Label)>) -> Self {
        CommFunction {
            kind: CommKind::Custom,
            table: entries.into_iter().collect(),
        }
    }

    /// Parses lines `a b -> c` or `a b -> tau` (with `#` comments), closes the
    /// table under symmetry and validates the result.
    pub fn parse_table(text: &str) -> Result<Self, TableError> {
        let mut table = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TableError {
                line: i + 1,
                message,
            };
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| err("expected `a b -> c`".into()))?;
            let names: Vec<&str> = lhs.split_whitespace().collect();
            let [a, b] = names[..] else {
                return Err(err("expected exactly two actions before `->`".into()));
            };
            let a = ActionName::parse(a).ok_or_else(|| err(format!("invalid action `{a}`")))?;
            let b = ActionName::parse(b).ok_or_else(|| err(format!("invalid action `{b}`")))?;
            let c = Label::parse(rhs.trim())
                .ok_or_else(|| err(format!("invalid result `{}`", rhs.trim())))?;
            for key in [(a.clone(), b.clone()), (b.clone(), a.clone())] {
                if let Some(prev) = table.insert(key, c.clone()) {
                    if prev != c {
                        return Err(err(format!("conflicting results for ({a}, {b})")));
                    }
                }
            }
        }
        let f = CommFunction::custom(table);
        validate_comm(&f).map_err(|v| TableError {
            line: 0,
            message: v.to_string(),
        })?;
        Ok(f)
    }

    pub fn kind(&self) -> CommKind {
        self.kind
    }

    /// `γ(a, b)`, or `None` where undefined.
    pub fn gamma(&self, a: &ActionName, b: &ActionName) -> Option<Label> {
        match self.kind {
            CommKind::Trivial => None,
            CommKind::Ccs => (a.co() == *b).then_some(Label::Tau),
            CommKind::Custom => self.table.get(&(a.clone(), b.clone())).cloned(),
        }
    }

    pub fn table(&self) -> &BTreeMap<(ActionName, ActionName), Label> {
        &self.table
    }

    /// Actions mentioned by a custom table.
    pub fn mentioned_actions(&self) -> BTreeSet<ActionName> {
        let mut out = BTreeSet::new();
        for ((a, b), c) in &self.table {
            out.insert(a.clone());
            out.insert(b.clone());
            if let Label::Act(c) = c {
                out.insert(c.clone());
            }
        }
        out
    }
}

impl fmt::Display for CommFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CommKind::Trivial => f.write_str("none"),
            CommKind::Ccs => f.write_str("ccs"),
            CommKind::Custom => {
                let parts: Vec<String> = self
                    .table
                    .iter()
                    .map(|((a, b), c)| format!("{a} {b} -> {c}"))
                    .collect();
                write!(f, "table[{}]", parts.join("; "))
            }
        }
    }
}

fn compose(c: &CommFunction, l: Option<Label>, r: &ActionName) -> Option<Label> {
    match l? {
        Label::Act(a) => c.gamma(&a, r),
        Label::Tau => None,
    }
}

fn compose_right(c: &CommFunction, l: &ActionName, r: Option<Label>) -> Option<Label> {
    match r? {
        Label::Act(b) => c.gamma(l, &b),
        Label::Tau => None,
    }
}

/// Checks commutativity and Kleene associativity; a `tau` intermediate result
/// makes the composite undefined.
pub fn validate_comm(c: &CommFunction) -> Result<(), CommViolation> {
    if c.kind != CommKind::Custom {
        return Ok(());
    }
    for ((a, b), l) in &c.table {
        if c.gamma(b, a).as_ref() != Some(l) {
            return Err(CommViolation::NotCommutative(a.clone(), b.clone()));
        }
    }
    let acts: Vec<ActionName> = c.mentioned_actions().into_iter().collect();
    for a in &acts {
        for b in &acts {
            for d in &acts {
                let left = compose(c, c.gamma(a, b), d);
                let right = compose_right(c, a, c.gamma(b, d));
                if left != right {
                    return Err(CommViolation::NotAssociative(
                        a.clone(),
                        b.clone(),
                        d.clone(),
                    ));
                }
            }
        }
    }
    Ok(())
}
