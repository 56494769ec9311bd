//! Rewriting terms to F- and H-normal forms with a derivation trace, normal
//! form widths, and equality modulo associativity, commutativity and
//! idempotence of `+`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::axioms::{instantiate, AxiomId, Binding, DerivationTrace, Direction, Mode, RewriteStep};
use crate::semantics::{CommFunction, CommKind};
use crate::syntax::{measure_less, Alphabet, Label, Position, ProcessTerm, Term};

/// The two normal-form grammars.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
pub enum NormalMode {
    F,
    H,
}

impl NormalMode {
    pub fn theory(self) -> Mode {
        match self {
            NormalMode::F => Mode::F,
            NormalMode::H => Mode::H,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalForm {
    pub term: ProcessTerm,
    pub mode: NormalMode,
    /// Width; for H-normal forms relative to `n`.
    pub width: usize,
    /// Size of the action set the H-width refers to; 0 for F.
    pub n: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum NormalizeError {
    #[error("H-normal forms are defined for the CCS communication function only")]
    NotCcs,
    #[error("`{0}` is not a normal form")]
    NotInGrammar(ProcessTerm),
}

fn is_var(t: &ProcessTerm) -> bool {
    matches!(t, ProcessTerm::Var(_))
}

/// `x | a.0` with `a` observable.
fn is_action_head(t: &ProcessTerm) -> bool {
    match t {
        ProcessTerm::CMerge(x, a) => {
            is_var(x) && matches!(&**a, ProcessTerm::Prefix(Label::Act(_), z) if z.is_nil())
        }
        _ => false,
    }
}

/// `x | y`.
fn is_pair_head(t: &ProcessTerm) -> bool {
    matches!(t, ProcessTerm::CMerge(x, y) if is_var(x) && is_var(y))
}

fn in_grammar(t: &ProcessTerm, mode: NormalMode) -> bool {
    match t {
        ProcessTerm::Nil => true,
        ProcessTerm::Sum(p, q) => in_grammar(p, mode) && in_grammar(q, mode),
        ProcessTerm::Prefix(_, p) => in_grammar(p, mode),
        ProcessTerm::LMerge(h, p) => {
            let head_ok =
                is_var(h) || (mode == NormalMode::H && (is_action_head(h) || is_pair_head(h)));
            head_ok && in_grammar(p, mode)
        }
        _ => false,
    }
}

pub fn is_f_normal(t: &ProcessTerm) -> bool {
    in_grammar(t, NormalMode::F)
}

pub fn is_h_normal(t: &ProcessTerm) -> bool {
    in_grammar(t, NormalMode::H)
}

pub fn fwidth(t: &ProcessTerm) -> Result<usize, NormalizeError> {
    let bad = || NormalizeError::NotInGrammar(t.clone());
    Ok(match t {
        ProcessTerm::Nil => 0,
        ProcessTerm::Sum(p, q) => fwidth(p)? + fwidth(q)?,
        ProcessTerm::Prefix(_, p) => fwidth(p)?.max(1),
        ProcessTerm::LMerge(h, p) if is_var(h) => fwidth(p)?.max(1),
        _ => return Err(bad()),
    })
}

pub fn hwidth(t: &ProcessTerm, n: usize) -> Result<usize, NormalizeError> {
    let bad = || NormalizeError::NotInGrammar(t.clone());
    Ok(match t {
        ProcessTerm::Nil => 0,
        ProcessTerm::Sum(p, q) => hwidth(p, n)? + hwidth(q, n)?,
        ProcessTerm::Prefix(_, p) => hwidth(p, n)?.max(1),
        ProcessTerm::LMerge(h, p) if is_var(h) || is_pair_head(h) => hwidth(p, n)?.max(n),
        ProcessTerm::LMerge(h, p) if is_action_head(h) => hwidth(p, n)?.max(1),
        _ => return Err(bad()),
    })
}

/// Number of initial transitions the distinguishing valuation can give `t`
/// at most: 1 per prefix or `x | a` head, one per action for variable and
/// `x | y` heads in H-mode, summed over summands.
fn root_bound(t: &ProcessTerm, mode: NormalMode, n: usize) -> usize {
    match t {
        ProcessTerm::Nil => 0,
        ProcessTerm::Sum(p, q) => root_bound(p, mode, n) + root_bound(q, mode, n),
        ProcessTerm::LMerge(h, _) if mode == NormalMode::H && (is_var(h) || is_pair_head(h)) => n,
        _ => 1,
    }
}

/// The largest [`root_bound`] over `t` and every normal form nested in it.
/// This bounds the branching degree of each image the distinction argument
/// inspects and never exceeds the width, so it serves as a smaller `W`.
pub fn branching_bound(
    t: &ProcessTerm,
    mode: NormalMode,
    n: usize,
) -> Result<usize, NormalizeError> {
    if !in_grammar(t, mode) {
        return Err(NormalizeError::NotInGrammar(t.clone()));
    }
    fn go(t: &ProcessTerm, mode: NormalMode, n: usize) -> usize {
        let inner = match t {
            ProcessTerm::Sum(p, q) => go(p, mode, n).max(go(q, mode, n)),
            ProcessTerm::Prefix(_, p) | ProcessTerm::LMerge(_, p) => go(p, mode, n),
            _ => 0,
        };
        inner.max(root_bound(t, mode, n))
    }
    Ok(go(t, mode, n))
}

/// The least bar-closed action set containing the actions of the terms,
/// or `fallback` when that would be empty.
pub fn closure_actions<'a>(
    terms: impl IntoIterator<Item = &'a ProcessTerm>,
    fallback: &Alphabet,
) -> Alphabet {
    let mut set = Alphabet::default();
    for t in terms {
        for a in t.actions() {
            set.insert(a);
        }
    }
    if set.is_empty() {
        fallback.bar_closure()
    } else {
        set.bar_closure()
    }
}

pub fn ac_canon(t: &ProcessTerm, mode: NormalMode) -> ProcessTerm {
    match t {
        ProcessTerm::Sum(..) => {
            let mut items: Vec<ProcessTerm> = t
                .syntactic_summands()
                .iter()
                .map(|s| ac_canon(s, mode))
                .collect();
            items.sort();
            items.dedup();
            ProcessTerm::sum_of(items)
        }
        ProcessTerm::Prefix(l, p) => ProcessTerm::prefix(l.clone(), ac_canon(p, mode)),
        ProcessTerm::LMerge(h, p) => {
            let head = match &**h {
                ProcessTerm::CMerge(x, y) if mode == NormalMode::H && is_pair_head(h) && y < x => {
                    ProcessTerm::CMerge(y.clone(), x.clone())
                }
                _ => (**h).clone(),
            };
            ProcessTerm::lmerge(head, ac_canon(p, mode))
        }
        other => other.clone(),
    }
}

/// Equality of normal forms modulo A1-A4, and in H-mode also the
/// orientation of `x | y` heads.
pub fn ac_equal(
    n1: &ProcessTerm,
    n2: &ProcessTerm,
    mode: NormalMode,
) -> Result<bool, NormalizeError> {
    for n in [n1, n2] {
        if !in_grammar(n, mode) {
            return Err(NormalizeError::NotInGrammar(n.clone()));
        }
    }
    Ok(ac_canon(n1, mode) == ac_canon(n2, mode))
}

/// Path of item `i` in a left-folded sum of `n` items.
fn sum_pos(i: usize, n: usize) -> Vec<usize> {
    if i == 0 {
        vec![0; n - 1]
    } else {
        let mut v = vec![0; n - 1 - i];
        v.push(1);
        v
    }
}

fn fold(items: &[Term]) -> ProcessTerm {
    ProcessTerm::sum_of(items.iter().cloned())
}

struct Run<'a> {
    comm: &'a CommFunction,
    mode: NormalMode,
    steps: Vec<RewriteStep>,
}

use Direction::{LeftToRight as L, RightToLeft as R};
use ProcessTerm as T;

impl Run<'_> {
    /// Applies `axiom` to `local`, the subterm at `pos`, and records the step.
    fn rw(
        &mut self,
        local: &ProcessTerm,
        pos: &Position,
        axiom: AxiomId,
        dir: Direction,
    ) -> ProcessTerm {
        let probe = RewriteStep::new(axiom.clone(), Position::root(), dir, Binding::new());
        let (out, binding) = instantiate(local, &probe, self.comm).unwrap_or_else(|e| {
            panic!("normalizer emitted an inapplicable {axiom} step on `{local}`: {e}")
        });
        self.steps
            .push(RewriteStep::new(axiom, pos.clone(), dir, binding));
        out
    }

    fn norm_below(&mut self, p: &ProcessTerm, at: &Position, bound: &ProcessTerm) -> ProcessTerm {
        assert!(
            measure_less(p, bound),
            "normalization measure did not decrease: `{p}` vs `{bound}`"
        );
        self.norm(p, at)
    }

    fn norm(&mut self, p: &ProcessTerm, at: &Position) -> ProcessTerm {
        match p {
            T::Nil => T::Nil,
            T::Var(_) => self.rw(p, at, AxiomId::L5, R),
            T::Prefix(l, q) => T::prefix(l.clone(), self.norm_below(q, &at.child(0), p)),
            T::Sum(q, r) => {
                let nq = self.norm_below(q, &at.child(0), p);
                let nr = self.norm_below(r, &at.child(1), p);
                T::sum(nq, nr)
            }
            T::LMerge(q, r) => self.lmerge_case(q, r, at, p),
            T::CMerge(q, r) => match self.mode {
                NormalMode::F => self.rw(p, at, AxiomId::F, L),
                NormalMode::H => self.cmerge_case(q, r, at, p),
            },
            T::Par(q, r) => self.par_case(q, r, at, p),
        }
    }

    fn par_case(&mut self, q: &Term, r: &Term, at: &Position, p: &ProcessTerm) -> ProcessTerm {
        if r.is_nil() {
            let q = self.rw(p, at, AxiomId::DP4, L);
            return self.norm_below(&q, at, p);
        }
        if q.is_nil() {
            let swapped = self.rw(p, at, AxiomId::DP3, L);
            let r = self.rw(&swapped, at, AxiomId::DP4, L);
            return self.norm_below(&r, at, p);
        }
        let expanded = self.rw(p, at, AxiomId::P1, L);
        match self.mode {
            NormalMode::F => {
                let T::Sum(merges, sync) = &expanded else {
                    unreachable!("P1 yields a sum")
                };
                self.rw(sync, &at.child(1), AxiomId::F, L);
                self.rw(
                    &T::Sum(merges.clone(), Arc::new(T::Nil)),
                    at,
                    AxiomId::A4,
                    L,
                );
                let left = self.lmerge_case(q, r, &at.child(0), p);
                let right = self.lmerge_case(r, q, &at.child(1), p);
                T::sum(left, right)
            }
            NormalMode::H => {
                let left = self.lmerge_case(q, r, &at.join(&[0, 0]), p);
                let right = self.lmerge_case(r, q, &at.join(&[0, 1]), p);
                let sync = self.cmerge_case(q, r, &at.child(1), p);
                T::sum(T::sum(left, right), sync)
            }
        }
    }

    /// Rewrites the normal form `t` at `pos` into a left-folded sum of its
    /// simple summands without `0`s, returning the summands.
    fn flatten(&mut self, t: &ProcessTerm, pos: &Position) -> Vec<Term> {
        match t {
            T::Nil => vec![],
            T::Sum(a, b) => {
                let la = self.flatten(a, &pos.child(0));
                let lb = self.flatten(b, &pos.child(1));
                if lb.is_empty() {
                    self.rw(&T::sum(fold(&la), T::Nil), pos, AxiomId::A4, L);
                    return la;
                }
                if la.is_empty() {
                    let swapped = self.rw(&T::sum(T::Nil, fold(&lb)), pos, AxiomId::A1, L);
                    self.rw(&swapped, pos, AxiomId::A4, L);
                    return lb;
                }
                self.append(&la, &lb, pos);
                la.into_iter().chain(lb).collect()
            }
            _ => vec![Arc::new(t.clone())],
        }
    }

    /// `fold(la) + fold(lb)` at `pos` becomes `fold(la ++ lb)`.
    fn append(&mut self, la: &[Term], lb: &[Term], pos: &Position) {
        if lb.len() <= 1 {
            return;
        }
        let k = lb.len() - 1;
        let local = T::sum(fold(la), T::sum(fold(&lb[..k]), lb[k].clone()));
        self.rw(&local, pos, AxiomId::A2, R);
        self.append(la, &lb[..k], &pos.child(0));
    }

    fn lmerge_case(
        &mut self,
        q: &Term,
        r: &Term,
        at: &Position,
        bound: &ProcessTerm,
    ) -> ProcessTerm {
        let nq = self.norm_below(q, &at.child(0), bound);
        let items = self.flatten(&nq, &at.child(0));
        let n = items.len();
        if n == 0 {
            return self.rw(&T::lmerge(T::Nil, r.clone()), at, AxiomId::L1, L);
        }
        for k in (1..n).rev() {
            let local = T::lmerge(fold(&items[..=k]), r.clone());
            self.rw(&local, &at.join(&vec![0; n - 1 - k]), AxiomId::L3, L);
        }
        let mut results = Vec::with_capacity(n);
        for (i, s) in items.iter().enumerate() {
            let pos = at.join(&sum_pos(i, n));
            let local = T::LMerge(s.clone(), r.clone());
            results.push(match &**s {
                T::Prefix(l, s1) => {
                    self.rw(&local, &pos, AxiomId::L2(l.clone()), L);
                    let m = self.norm_below(&T::Par(s1.clone(), r.clone()), &pos.child(0), bound);
                    T::prefix(l.clone(), m)
                }
                T::LMerge(h, s1) => {
                    self.rw(&local, &pos, AxiomId::L4, L);
                    let m = self.norm_below(&T::Par(s1.clone(), r.clone()), &pos.child(1), bound);
                    T::LMerge(h.clone(), Arc::new(m))
                }
                other => unreachable!("`{other}` is not a simple normal form"),
            });
        }
        T::sum_of(results)
    }

    fn cmerge_case(
        &mut self,
        q: &Term,
        r: &Term,
        at: &Position,
        bound: &ProcessTerm,
    ) -> ProcessTerm {
        let nq = self.norm_below(q, &at.child(0), bound);
        let ss = self.flatten(&nq, &at.child(0));
        let nr = self.norm_below(r, &at.child(1), bound);
        let ts = self.flatten(&nr, &at.child(1));
        let (m, n) = (ss.len(), ts.len());
        let ft = fold(&ts);
        if m == 0 {
            return self.rw(&T::cmerge(T::Nil, ft), at, AxiomId::C1, L);
        }
        if n == 0 {
            let swapped = self.rw(&T::cmerge(fold(&ss), T::Nil), at, AxiomId::C5, L);
            return self.rw(&swapped, at, AxiomId::C1, L);
        }
        for k in (1..m).rev() {
            let local = T::cmerge(fold(&ss[..=k]), ft.clone());
            self.rw(&local, &at.join(&vec![0; m - 1 - k]), AxiomId::C4, L);
        }
        let mut rows = Vec::with_capacity(m);
        for (i, s) in ss.iter().enumerate() {
            let pos_i = at.join(&sum_pos(i, m));
            let mut row = Vec::with_capacity(n);
            if n > 1 {
                self.rw(&T::cmerge(s.clone(), ft.clone()), &pos_i, AxiomId::C5, L);
                for k in (1..n).rev() {
                    let local = T::cmerge(fold(&ts[..=k]), s.clone());
                    self.rw(&local, &pos_i.join(&vec![0; n - 1 - k]), AxiomId::C4, L);
                }
                for (j, t) in ts.iter().enumerate() {
                    self.rw(
                        &T::cmerge(t.clone(), s.clone()),
                        &pos_i.join(&sum_pos(j, n)),
                        AxiomId::C5,
                        L,
                    );
                }
            }
            for (j, t) in ts.iter().enumerate() {
                let pos = if n > 1 {
                    pos_i.join(&sum_pos(j, n))
                } else {
                    pos_i.clone()
                };
                row.push(self.pair_case(s, t, &pos, bound));
            }
            rows.push(T::sum_of(row));
        }
        let total = T::sum_of(rows);
        let items = self.flatten(&total, at);
        fold(&items)
    }

    /// `s | t` for simple H-normal forms `s`, `t`.
    fn pair_case(
        &mut self,
        s: &Term,
        t: &Term,
        pos: &Position,
        bound: &ProcessTerm,
    ) -> ProcessTerm {
        let local = T::CMerge(s.clone(), t.clone());
        match (&**s, &**t) {
            (T::Prefix(Label::Tau, _), _) => self.rw(&local, pos, AxiomId::DC9, L),
            (_, T::Prefix(Label::Tau, _)) => {
                let swapped = self.rw(&local, pos, AxiomId::C5, L);
                self.rw(&swapped, pos, AxiomId::DC9, L)
            }
            (T::LMerge(h, _), _) if matches!(**h, T::CMerge(..)) => {
                self.kill_sync_head(&local, pos)
            }
            (_, T::LMerge(h, _)) if matches!(**h, T::CMerge(..)) => {
                let swapped = self.rw(&local, pos, AxiomId::C5, L);
                self.kill_sync_head(&swapped, pos)
            }
            (T::Prefix(Label::Act(a), s1), T::Prefix(Label::Act(b), t1)) => {
                if self.comm.gamma(a, b).is_none() {
                    return self.rw(&local, pos, AxiomId::C3(a.clone(), b.clone()), L);
                }
                let out = self.rw(&local, pos, AxiomId::C2(a.clone(), b.clone()), L);
                let T::Prefix(g, _) = out else {
                    unreachable!("C2 yields a prefix")
                };
                let m = self.norm_below(&T::Par(s1.clone(), t1.clone()), &pos.child(0), bound);
                T::prefix(g, m)
            }
            (T::Prefix(..), T::LMerge(..)) => self.action_meets_var(s, t, pos, bound),
            (T::LMerge(..), T::Prefix(..)) => {
                self.rw(&local, pos, AxiomId::C5, L);
                self.action_meets_var(t, s, pos, bound)
            }
            (T::LMerge(x, s1), T::LMerge(y, t1)) => {
                debug_assert!(is_var(x) && is_var(y));
                self.rw(&local, pos, AxiomId::DC8, L);
                let m = self.norm_below(&T::Par(s1.clone(), t1.clone()), &pos.child(1), bound);
                T::lmerge(T::CMerge(x.clone(), y.clone()), m)
            }
            _ => unreachable!("`{local}` is not a pair of simple H-normal forms"),
        }
    }

    /// `((x|h) |_ s) | t` becomes `0` by C7, H and L1.
    fn kill_sync_head(&mut self, local: &ProcessTerm, pos: &Position) -> ProcessTerm {
        let moved = self.rw(local, pos, AxiomId::C7, L);
        let T::LMerge(head, rest) = &moved else {
            unreachable!("C7 yields a left merge")
        };
        self.rw(head, &pos.child(0), AxiomId::H, L);
        self.rw(
            &T::LMerge(Arc::new(T::Nil), rest.clone()),
            pos,
            AxiomId::L1,
            L,
        )
    }

    /// `a.s1 | (x |_ t1)` becomes `(x | a.0) |_ N` with `N` normal for `s1 || t1`.
    fn action_meets_var(
        &mut self,
        s: &Term,
        t: &Term,
        pos: &Position,
        bound: &ProcessTerm,
    ) -> ProcessTerm {
        let (T::Prefix(a, s1), T::LMerge(x, t1)) = (&**s, &**t) else {
            unreachable!()
        };
        let padded = self.rw(s1, &pos.join(&[0, 0]), AxiomId::DP4, R);
        let swapped = self.rw(&padded, &pos.join(&[0, 0]), AxiomId::DP3, L);
        let split = self.rw(
            &T::Prefix(a.clone(), Arc::new(swapped)),
            &pos.child(0),
            AxiomId::L2(a.clone()),
            R,
        );
        let merged = self.rw(&T::CMerge(Arc::new(split), t.clone()), pos, AxiomId::DC8, L);
        let T::LMerge(head, _) = &merged else {
            unreachable!("D-C8 yields a left merge")
        };
        let head = self.rw(head, &pos.child(0), AxiomId::C5, L);
        let m = self.norm_below(&T::Par(s1.clone(), t1.clone()), &pos.child(1), bound);
        debug_assert!(matches!(&head, T::CMerge(y, _) if y == x));
        T::lmerge(head, m)
    }
}

fn run(p: &ProcessTerm, comm: &CommFunction, mode: NormalMode) -> (ProcessTerm, DerivationTrace) {
    let mut r = Run {
        comm,
        mode,
        steps: Vec::new(),
    };
    let n = r.norm(p, &Position::root());
    debug_assert!(
        in_grammar(&n, mode),
        "`{n}` escaped the normal-form grammar"
    );
    debug_assert!(n.height() <= p.height());
    let trace = DerivationTrace {
        start: p.clone(),
        steps: r.steps,
        end: n.clone(),
    };
    (n, trace)
}

/// F-normal form of `p` with its derivation from `p`.
pub fn f_normalize(p: &ProcessTerm) -> (NormalForm, DerivationTrace) {
    let (term, trace) = run(p, &CommFunction::trivial(), NormalMode::F);
    let width = fwidth(&term).expect("F-normal");
    (
        NormalForm {
            term,
            mode: NormalMode::F,
            width,
            n: 0,
        },
        trace,
    )
}

/// H-normal form of `p` under the CCS communication function. The width is
/// taken relative to the least bar-closed action set of the result (one pair
/// if it has no actions).
pub fn h_normalize(
    p: &ProcessTerm,
    c: &CommFunction,
) -> Result<(NormalForm, DerivationTrace), NormalizeError> {
    if c.kind() != CommKind::Ccs {
        return Err(NormalizeError::NotCcs);
    }
    let (term, trace) = run(p, c, NormalMode::H);
    let n = closure_actions([&term], &Alphabet::pair("a")).len();
    let width = hwidth(&term, n).expect("H-normal");
    Ok((
        NormalForm {
            term,
            mode: NormalMode::H,
            width,
            n,
        },
        trace,
    ))
}
