//! The axiom catalogue, single rewrite steps and derivation traces.

mod trace_file;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::CommFunction;
use crate::syntax::{ActionName, Alphabet, Label, Position, ProcessTerm, Variable};

pub use trace_file::{format_trace, parse_trace, TraceParseError};

/// Axioms and registered derived laws. Parameterised schemas carry their
/// action parameters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    A4,
    L1,
    L2(Label),
    L3,
    L4,
    L5,
    C1,
    C2(ActionName, ActionName),
    C3(ActionName, ActionName),
    C4,
    C5,
    C6,
    C7,
    P1,
    F,
    H,
    DC8,
    DC9,
    DP2,
    DP3,
    DP4,
}

/// Which equational theory a derivation is carried out in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
pub enum Mode {
    Plain,
    F,
    H,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::F => "F",
            Mode::H => "H",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LeftToRight => "L",
            Direction::RightToLeft => "R",
        })
    }
}

pub type Binding = BTreeMap<Variable, ProcessTerm>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteStep {
    pub axiom: AxiomId,
    pub position: Position,
    pub direction: Direction,
    pub binding: Binding,
}

impl RewriteStep {
    pub fn new(axiom: AxiomId, position: Position, direction: Direction, binding: Binding) -> Self {
        RewriteStep {
            axiom,
            position,
            direction,
            binding,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivationTrace {
    pub start: ProcessTerm,
    pub steps: Vec<RewriteStep>,
    pub end: ProcessTerm,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum StepError {
    #[error("position {0} does not exist")]
    InvalidPosition(Position),
    #[error("subterm `{subterm}` does not match `{pattern}`")]
    PatternMismatch {
        subterm: ProcessTerm,
        pattern: ProcessTerm,
    },
    #[error("side condition of {0} violated")]
    SideCondition(AxiomId),
    #[error("{0} is not admissible in {1} mode")]
    NotAdmissible(AxiomId, Mode),
    #[error("variable `{0}` of the axiom is not bound")]
    Unbound(Variable),
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TraceError {
    /// Steps are numbered from 1.
    #[error("step {step}: {error}")]
    Step { step: usize, error: StepError },
    #[error("derivation ends in `{reached}`, not the declared `{declared}`")]
    EndMismatch {
        reached: ProcessTerm,
        declared: ProcessTerm,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum AxiomError {
    #[error("{0} has no registered trace")]
    NoTrace(AxiomId),
}

fn v(name: &str) -> ProcessTerm {
    ProcessTerm::var(name)
}

fn x() -> ProcessTerm {
    v("x")
}
fn y() -> ProcessTerm {
    v("y")
}
fn z() -> ProcessTerm {
    v("z")
}
fn u() -> ProcessTerm {
    v("u")
}

use ProcessTerm as T;

impl AxiomId {
    /// The axioms of the base table, with parameterised schemas instantiated
    /// over the alphabet; `C2`/`C3` instances follow the definedness of `c`.
    pub fn table(alphabet: &Alphabet, c: &CommFunction) -> Vec<AxiomId> {
        use AxiomId::*;
        let mut out = vec![A1, A2, A3, A4, L1];
        out.extend(alphabet.labels().into_iter().map(L2));
        out.extend([L3, L4, L5, C1]);
        for a in alphabet.iter() {
            for b in alphabet.iter() {
                out.push(match c.gamma(a, b) {
                    Some(_) => C2(a.clone(), b.clone()),
                    None => C3(a.clone(), b.clone()),
                });
            }
        }
        out.extend([C4, C5, C6, C7, P1]);
        out
    }

    pub fn derived() -> Vec<AxiomId> {
        vec![
            AxiomId::DC8,
            AxiomId::DC9,
            AxiomId::DP2,
            AxiomId::DP3,
            AxiomId::DP4,
        ]
    }

    pub fn is_derived(&self) -> bool {
        matches!(
            self,
            AxiomId::DC8 | AxiomId::DC9 | AxiomId::DP2 | AxiomId::DP3 | AxiomId::DP4
        )
    }

    /// The law's two sides, verbatim. Fails when the side condition of a
    /// `C2`/`C3` instance does not hold under `c`.
    pub fn sides(&self, c: &CommFunction) -> Result<(ProcessTerm, ProcessTerm), StepError> {
        use AxiomId::*;
        Ok(match self {
            A1 => (T::sum(x(), y()), T::sum(y(), x())),
            A2 => (T::sum(T::sum(x(), y()), z()), T::sum(x(), T::sum(y(), z()))),
            A3 => (T::sum(x(), x()), x()),
            A4 => (T::sum(x(), T::Nil), x()),
            L1 => (T::lmerge(T::Nil, x()), T::Nil),
            L2(l) => (
                T::lmerge(T::prefix(l.clone(), x()), y()),
                T::prefix(l.clone(), T::par(x(), y())),
            ),
            L3 => (
                T::lmerge(T::sum(x(), y()), z()),
                T::sum(T::lmerge(x(), z()), T::lmerge(y(), z())),
            ),
            L4 => (
                T::lmerge(T::lmerge(x(), y()), z()),
                T::lmerge(x(), T::par(y(), z())),
            ),
            L5 => (T::lmerge(x(), T::Nil), x()),
            C1 => (T::cmerge(T::Nil, x()), T::Nil),
            C2(a, b) => {
                let g = c
                    .gamma(a, b)
                    .ok_or_else(|| StepError::SideCondition(self.clone()))?;
                let lhs = T::cmerge(
                    T::prefix(Label::Act(a.clone()), x()),
                    T::prefix(Label::Act(b.clone()), y()),
                );
                (lhs, T::prefix(g, T::par(x(), y())))
            }
            C3(a, b) => {
                if c.gamma(a, b).is_some() {
                    return Err(StepError::SideCondition(self.clone()));
                }
                let lhs = T::cmerge(
                    T::prefix(Label::Act(a.clone()), x()),
                    T::prefix(Label::Act(b.clone()), y()),
                );
                (lhs, T::Nil)
            }
            C4 => (
                T::cmerge(T::sum(x(), y()), z()),
                T::sum(T::cmerge(x(), z()), T::cmerge(y(), z())),
            ),
            C5 => (T::cmerge(x(), y()), T::cmerge(y(), x())),
            C6 => (
                T::cmerge(T::cmerge(x(), y()), z()),
                T::cmerge(x(), T::cmerge(y(), z())),
            ),
            C7 => (
                T::cmerge(T::lmerge(x(), y()), z()),
                T::lmerge(T::cmerge(x(), z()), y()),
            ),
            P1 => (
                T::par(x(), y()),
                T::sum(
                    T::sum(T::lmerge(x(), y()), T::lmerge(y(), x())),
                    T::cmerge(x(), y()),
                ),
            ),
            F => (T::cmerge(x(), y()), T::Nil),
            H => (T::cmerge(T::cmerge(x(), y()), z()), T::Nil),
            DC8 => (
                T::cmerge(T::lmerge(x(), y()), T::lmerge(z(), u())),
                T::lmerge(T::cmerge(x(), z()), T::par(y(), u())),
            ),
            DC9 => (T::cmerge(T::tau(x()), y()), T::Nil),
            DP2 => (T::par(T::par(x(), y()), z()), T::par(x(), T::par(y(), z()))),
            DP3 => (T::par(x(), y()), T::par(y(), x())),
            DP4 => (T::par(x(), T::Nil), x()),
        })
    }

    pub fn admissible(&self, mode: Mode) -> bool {
        match self {
            AxiomId::F => mode == Mode::F,
            AxiomId::H | AxiomId::DC9 => mode == Mode::H,
            _ => true,
        }
    }

    /// Parses `A1`, `L2[tau]`, `C2[a,~a]`, `D-C8`.
    pub fn parse(text: &str) -> Option<Self> {
        use AxiomId::*;
        let text = text.trim();
        let (head, params) = match text.split_once('[') {
            Some((h, rest)) => (h, Some(rest.strip_suffix(']')?)),
            None => (text, None),
        };
        let pair = |p: &str| -> Option<(ActionName, ActionName)> {
            let (a, b) = p.split_once(',')?;
            Some((ActionName::parse(a)?, ActionName::parse(b)?))
        };
        Some(match (head, params) {
            ("L2", Some(p)) => L2(Label::parse(p)?),
            ("C2", Some(p)) => {
                let (a, b) = pair(p)?;
                C2(a, b)
            }
            ("C3", Some(p)) => {
                let (a, b) = pair(p)?;
                C3(a, b)
            }
            (_, Some(_)) => return None,
            (h, None) => match h {
                "A1" => A1,
                "A2" => A2,
                "A3" => A3,
                "A4" => A4,
                "L1" => L1,
                "L3" => L3,
                "L4" => L4,
                "L5" => L5,
                "C1" => C1,
                "C4" => C4,
                "C5" => C5,
                "C6" => C6,
                "C7" => C7,
                "P1" => P1,
                "F" => F,
                "H" => H,
                "D-C8" => DC8,
                "D-C9" => DC9,
                "D-P2" => DP2,
                "D-P3" => DP3,
                "D-P4" => DP4,
                _ => return None,
            },
        })
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AxiomId::*;
        match self {
            L2(l) => write!(f, "L2[{l}]"),
            C2(a, b) => write!(f, "C2[{a},{b}]"),
            C3(a, b) => write!(f, "C3[{a},{b}]"),
            DC8 => f.write_str("D-C8"),
            DC9 => f.write_str("D-C9"),
            DP2 => f.write_str("D-P2"),
            DP3 => f.write_str("D-P3"),
            DP4 => f.write_str("D-P4"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl Serialize for AxiomId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One-way pattern matching, extending `binding` consistently.
pub fn match_pattern(pattern: &ProcessTerm, term: &ProcessTerm, binding: &mut Binding) -> bool {
    match (pattern, term) {
        (ProcessTerm::Var(v), _) => match binding.get(v) {
            Some(bound) => bound == term,
            None => {
                binding.insert(v.clone(), term.clone());
                true
            }
        },
        (ProcessTerm::Nil, ProcessTerm::Nil) => true,
        (ProcessTerm::Prefix(l1, p), ProcessTerm::Prefix(l2, q)) => {
            l1 == l2 && match_pattern(p, q, binding)
        }
        _ => match (pattern.as_binary(), term.as_binary()) {
            (Some((o1, p1, p2)), Some((o2, q1, q2))) => {
                o1 == o2 && match_pattern(p1, q1, binding) && match_pattern(p2, q2, binding)
            }
            _ => false,
        },
    }
}

/// Applies one step to `source`: the subterm at the step's position must be an
/// instance of the source side under (an extension of) the binding, and is
/// replaced by the corresponding instance of the other side.
pub fn match_axiom(
    source: &ProcessTerm,
    step: &RewriteStep,
    c: &CommFunction,
) -> Result<ProcessTerm, StepError> {
    instantiate(source, step, c).map(|(t, _)| t)
}

/// As [`match_axiom`], also returning the completed binding.
pub fn instantiate(
    source: &ProcessTerm,
    step: &RewriteStep,
    c: &CommFunction,
) -> Result<(ProcessTerm, Binding), StepError> {
    let sub = source
        .subterm_at(&step.position)
        .ok_or_else(|| StepError::InvalidPosition(step.position.clone()))?;
    let (lhs, rhs) = step.axiom.sides(c)?;
    let (from, to) = match step.direction {
        Direction::LeftToRight => (lhs, rhs),
        Direction::RightToLeft => (rhs, lhs),
    };
    let mut binding = step.binding.clone();
    if !match_pattern(&from, sub, &mut binding) {
        return Err(StepError::PatternMismatch {
            subterm: sub.clone(),
            pattern: from,
        });
    }
    let replacement = to
        .substitute(&binding)
        .map_err(|crate::syntax::SubstError::Unmapped(v)| StepError::Unbound(v))?;
    Ok((
        source
            .replace_at(&step.position, replacement)
            .expect("position checked above"),
        binding,
    ))
}

/// Checks that every step chains, is admissible in `mode`, and that the last
/// step reaches the declared end.
pub fn verify_trace(
    trace: &DerivationTrace,
    c: &CommFunction,
    mode: Mode,
) -> Result<(), TraceError> {
    let mut cur = trace.start.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let fail = |error| TraceError::Step { step: i + 1, error };
        if !step.axiom.admissible(mode) {
            return Err(fail(StepError::NotAdmissible(step.axiom.clone(), mode)));
        }
        cur = match_axiom(&cur, step, c).map_err(fail)?;
    }
    if cur != trace.end {
        return Err(TraceError::EndMismatch {
            reached: cur,
            declared: trace.end.clone(),
        });
    }
    Ok(())
}

fn bind(pairs: &[(&str, ProcessTerm)]) -> Binding {
    pairs
        .iter()
        .map(|(n, t)| (Variable::new(n), t.clone()))
        .collect()
}

/// Stored derivations of the derived laws `D-C8` and `D-C9` in their general
/// form. The `D-C9` derivation uses the pair `a`, `~a`.
pub fn registered_trace(id: &AxiomId) -> Result<DerivationTrace, AxiomError> {
    use Direction::*;
    let root = Position::root;
    let at = |p: &[usize]| Position(p.to_vec());
    let steps = match id {
        AxiomId::DC8 => {
            let xy = T::lmerge(x(), y());
            vec![
                RewriteStep::new(
                    AxiomId::C5,
                    root(),
                    LeftToRight,
                    bind(&[("x", xy.clone()), ("y", T::lmerge(z(), u()))]),
                ),
                RewriteStep::new(
                    AxiomId::C7,
                    root(),
                    LeftToRight,
                    bind(&[("x", z()), ("y", u()), ("z", xy.clone())]),
                ),
                RewriteStep::new(
                    AxiomId::C5,
                    at(&[0]),
                    LeftToRight,
                    bind(&[("x", z()), ("y", xy)]),
                ),
                RewriteStep::new(
                    AxiomId::C7,
                    at(&[0]),
                    LeftToRight,
                    bind(&[("x", x()), ("y", y()), ("z", z())]),
                ),
                RewriteStep::new(
                    AxiomId::L4,
                    root(),
                    LeftToRight,
                    bind(&[("x", T::cmerge(x(), z())), ("y", y()), ("z", u())]),
                ),
            ]
        }
        AxiomId::DC9 => {
            let a = ActionName::new("a");
            vec![
                RewriteStep::new(AxiomId::DP4, at(&[0, 0]), RightToLeft, bind(&[("x", x())])),
                RewriteStep::new(
                    AxiomId::C2(a.clone(), a.co()),
                    at(&[0]),
                    RightToLeft,
                    bind(&[("x", x()), ("y", T::Nil)]),
                ),
                RewriteStep::new(
                    AxiomId::H,
                    root(),
                    LeftToRight,
                    bind(&[
                        ("x", T::act("a", x())),
                        ("y", T::prefix(Label::Act(a.co()), T::Nil)),
                        ("z", y()),
                    ]),
                ),
            ]
        }
        other => return Err(AxiomError::NoTrace(other.clone())),
    };
    let (start, end) = id
        .sides(&CommFunction::ccs())
        .expect("derived laws carry no side condition");
    Ok(DerivationTrace { start, steps, end })
}
