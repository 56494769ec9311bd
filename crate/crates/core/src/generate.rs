//! Seeded generators for terms, normal forms and equations, used by the
//! property tests, the acceptance suite and the benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::axioms::{instantiate, AxiomId, Direction, Mode, RewriteStep};
use crate::normalize::NormalMode;
use crate::semantics::CommFunction;
use crate::syntax::{Alphabet, BinOp, Equation, Label, Position, ProcessTerm, Variable};

/// Shape of generated terms. Every node counts as one constructor.
#[derive(Clone, Debug)]
pub struct TermShape {
    pub max_constructors: usize,
    pub vars: Vec<Variable>,
    pub labels: Vec<Label>,
}

impl TermShape {
    /// Variables `x, y, z, u, v, w` (first `nvars`), labels `tau` plus the alphabet.
    pub fn new(max_constructors: usize, nvars: usize, alphabet: &Alphabet) -> Self {
        let vars = ["x", "y", "z", "u", "v", "w"]
            .iter()
            .take(nvars)
            .map(|n| Variable::new(n))
            .collect();
        TermShape {
            max_constructors,
            vars,
            labels: alphabet.labels(),
        }
    }
}

const OPS: [BinOp; 4] = [BinOp::Sum, BinOp::LMerge, BinOp::CMerge, BinOp::Par];

fn leaf<R: Rng>(rng: &mut R, shape: &TermShape) -> ProcessTerm {
    if shape.vars.is_empty() || rng.gen_bool(0.3) {
        ProcessTerm::Nil
    } else {
        ProcessTerm::Var(shape.vars.choose(rng).unwrap().clone())
    }
}

fn term_of_size<R: Rng>(rng: &mut R, shape: &TermShape, size: usize) -> ProcessTerm {
    if size <= 1 {
        return leaf(rng, shape);
    }
    if size == 2 || rng.gen_bool(0.3) {
        let l = shape.labels.choose(rng).unwrap().clone();
        return ProcessTerm::prefix(l, term_of_size(rng, shape, size - 1));
    }
    let left = rng.gen_range(1..size - 1);
    let op = *OPS.choose(rng).unwrap();
    ProcessTerm::binary(
        op,
        term_of_size(rng, shape, left),
        term_of_size(rng, shape, size - 1 - left),
    )
}

/// A term with between 1 and `max_constructors` nodes.
pub fn random_term<R: Rng>(rng: &mut R, shape: &TermShape) -> ProcessTerm {
    let size = rng.gen_range(1..=shape.max_constructors.max(1));
    term_of_size(rng, shape, size)
}

pub fn random_equation<R: Rng>(rng: &mut R, shape: &TermShape) -> Equation {
    Equation::new(random_term(rng, shape), random_term(rng, shape))
}

pub fn node_count(t: &ProcessTerm) -> usize {
    1 + t.children().iter().map(|c| node_count(c)).sum::<usize>()
}

/// A member of the F- or H-normal-form grammar with roughly `size` nodes.
pub fn random_normal_form<R: Rng>(
    rng: &mut R,
    mode: NormalMode,
    shape: &TermShape,
    size: usize,
) -> ProcessTerm {
    if size <= 1 || shape.vars.is_empty() && size <= 2 {
        return ProcessTerm::Nil;
    }
    let acts: Vec<&Label> = shape
        .labels
        .iter()
        .filter(|l| l.action().is_some())
        .collect();
    let pick = rng.gen_range(0..if mode == NormalMode::H { 5 } else { 3 });
    let var = |rng: &mut R| ProcessTerm::Var(shape.vars.choose(rng).unwrap().clone());
    match pick {
        0 if size >= 3 => {
            let left = rng.gen_range(1..size - 1);
            ProcessTerm::sum(
                random_normal_form(rng, mode, shape, left),
                random_normal_form(rng, mode, shape, size - 1 - left),
            )
        }
        2 if !shape.vars.is_empty() => {
            let head = var(rng);
            ProcessTerm::lmerge(
                head,
                random_normal_form(rng, mode, shape, size.saturating_sub(2)),
            )
        }
        3 if !shape.vars.is_empty() && !acts.is_empty() => {
            let a = acts.choose(rng).unwrap();
            let head = ProcessTerm::cmerge(
                var(rng),
                ProcessTerm::prefix((*a).clone(), ProcessTerm::Nil),
            );
            ProcessTerm::lmerge(
                head,
                random_normal_form(rng, mode, shape, size.saturating_sub(4)),
            )
        }
        4 if !shape.vars.is_empty() => {
            let head = ProcessTerm::cmerge(var(rng), var(rng));
            ProcessTerm::lmerge(
                head,
                random_normal_form(rng, mode, shape, size.saturating_sub(4)),
            )
        }
        _ => {
            let l = shape.labels.choose(rng).unwrap().clone();
            ProcessTerm::prefix(l, random_normal_form(rng, mode, shape, size - 1))
        }
    }
}

/// A normal form equal to `n` modulo AC and idempotence of `+`: summands are
/// shuffled, re-associated and possibly duplicated at every level, and in
/// H-mode `x | y` heads may be flipped.
pub fn ac_variant<R: Rng>(rng: &mut R, n: &ProcessTerm) -> ProcessTerm {
    match n {
        ProcessTerm::Sum(..) => {
            let mut items: Vec<ProcessTerm> = n
                .syntactic_summands()
                .iter()
                .map(|s| ac_variant(rng, s))
                .collect();
            if items.is_empty() {
                return ProcessTerm::Nil;
            }
            if rng.gen_bool(0.3) {
                let dup = items.choose(rng).unwrap().clone();
                items.push(dup);
            }
            items.shuffle(rng);
            associate(rng, items)
        }
        ProcessTerm::Prefix(l, p) => ProcessTerm::prefix(l.clone(), ac_variant(rng, p)),
        ProcessTerm::LMerge(h, p) => {
            let head = match &**h {
                ProcessTerm::CMerge(x, y)
                    if matches!(**x, ProcessTerm::Var(_))
                        && matches!(**y, ProcessTerm::Var(_))
                        && rng.gen_bool(0.5) =>
                {
                    ProcessTerm::cmerge(y.clone(), x.clone())
                }
                _ => (**h).clone(),
            };
            ProcessTerm::lmerge(head, ac_variant(rng, p))
        }
        other => other.clone(),
    }
}

fn associate<R: Rng>(rng: &mut R, mut items: Vec<ProcessTerm>) -> ProcessTerm {
    if items.len() == 1 {
        return items.pop().unwrap();
    }
    let cut = rng.gen_range(1..items.len());
    let right = items.split_off(cut);
    ProcessTerm::sum(associate(rng, items), associate(rng, right))
}

fn positions(t: &ProcessTerm, here: Position, out: &mut Vec<Position>) {
    for (i, c) in t.children().iter().enumerate() {
        positions(c, here.child(i), out);
    }
    out.push(here);
}

/// Applies up to `steps` random axiom instances admissible in `mode`; the
/// result is provably equal to `t`. Variables the target side introduces are
/// bound to random terms over `shape`.
pub fn random_rewrite<R: Rng>(
    rng: &mut R,
    t: &ProcessTerm,
    c: &CommFunction,
    mode: Mode,
    alphabet: &Alphabet,
    shape: &TermShape,
    steps: usize,
) -> ProcessTerm {
    let mut laws: Vec<AxiomId> = AxiomId::table(alphabet, c);
    laws.extend(AxiomId::derived());
    laws.push(AxiomId::F);
    laws.push(AxiomId::H);
    laws.retain(|a| a.admissible(mode) && a.sides(c).is_ok());
    let mut small = shape.clone();
    small.max_constructors = 3;
    let mut cur = t.clone();
    for _ in 0..steps {
        let mut ps = Vec::new();
        positions(&cur, Position::root(), &mut ps);
        for _ in 0..20 {
            let pos = ps.choose(rng).unwrap().clone();
            let axiom = laws.choose(rng).unwrap().clone();
            let direction = if rng.gen_bool(0.5) {
                Direction::LeftToRight
            } else {
                Direction::RightToLeft
            };
            let (lhs, rhs) = axiom.sides(c).expect("filtered above");
            let (from, to) = if direction == Direction::LeftToRight {
                (lhs, rhs)
            } else {
                (rhs, lhs)
            };
            let bound = from.free_vars();
            let binding = to
                .free_vars()
                .into_iter()
                .filter(|v| !bound.contains(v))
                .map(|v| (v, random_term(rng, &small)))
                .collect();
            if let Ok((next, _)) =
                instantiate(&cur, &RewriteStep::new(axiom, pos, direction, binding), c)
            {
                cur = next;
                break;
            }
        }
    }
    cur
}

/// The actions of an alphabet as labels, for convenience.
pub fn action_labels(alphabet: &Alphabet) -> Vec<Label> {
    alphabet.iter().cloned().map(Label::Act).collect()
}
