use std::collections::BTreeSet;
use std::sync::Arc;

use super::{CommFunction, SemanticsError};
use crate::syntax::{Label, ProcessTerm, Term};

/// Direct reading of the transition rules on closed terms: prefix, both sum
/// rules, left merge, communication merge, and the three parallel rules.
pub fn transitions(
    p: &ProcessTerm,
    c: &CommFunction,
) -> Result<BTreeSet<(Label, ProcessTerm)>, SemanticsError> {
    if let Some(v) = p.free_vars().into_iter().next() {
        return Err(SemanticsError::OpenTerm(v));
    }
    Ok(steps(p, c).into_iter().collect())
}

fn steps(p: &ProcessTerm, c: &CommFunction) -> Vec<(Label, ProcessTerm)> {
    match p {
        ProcessTerm::Nil | ProcessTerm::Var(_) => vec![],
        ProcessTerm::Prefix(l, q) => vec![(l.clone(), (**q).clone())],
        ProcessTerm::Sum(q, r) => {
            let mut out = steps(q, c);
            out.extend(steps(r, c));
            out
        }
        ProcessTerm::LMerge(q, r) => left(q, r, c),
        ProcessTerm::CMerge(q, r) => sync(q, r, c),
        ProcessTerm::Par(q, r) => {
            let mut out = left(q, r, c);
            for (l, r1) in steps(r, c) {
                out.push((l, ProcessTerm::Par(q.clone(), Arc::new(r1))));
            }
            out.extend(sync(q, r, c));
            out
        }
    }
}

fn left(q: &Term, r: &Term, c: &CommFunction) -> Vec<(Label, ProcessTerm)> {
    steps(q, c)
        .into_iter()
        .map(|(l, q1)| (l, ProcessTerm::Par(Arc::new(q1), r.clone())))
        .collect()
}

fn sync(q: &Term, r: &Term, c: &CommFunction) -> Vec<(Label, ProcessTerm)> {
    let rs = steps(r, c);
    let mut out = Vec::new();
    for (l1, q1) in steps(q, c) {
        let Label::Act(a) = &l1 else { continue };
        for (l2, r1) in &rs {
            let Label::Act(b) = l2 else { continue };
            if let Some(g) = c.gamma(a, b) {
                out.push((g, ProcessTerm::par(q1.clone(), r1.clone())));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Alphabet};

    fn t(s: &str) -> ProcessTerm {
        parse_term(s, &Alphabet::parse("a,~a,b,~b").unwrap()).unwrap()
    }

    #[test]
    fn prefix_rule() {
        let ts = transitions(&t("a.0"), &CommFunction::trivial()).unwrap();
        assert_eq!(
            ts.into_iter().collect::<Vec<_>>(),
            vec![(Label::act("a"), ProcessTerm::Nil)]
        );
    }

    #[test]
    fn parallel_rules() {
        let ts = transitions(&t("a.0 || ~a.0"), &CommFunction::ccs()).unwrap();
        let expected: BTreeSet<_> = [
            (Label::act("a"), t("0 || ~a.0")),
            (
                Label::Act(crate::syntax::ActionName::new("a").co()),
                t("a.0 || 0"),
            ),
            (Label::Tau, t("0 || 0")),
        ]
        .into_iter()
        .collect();
        assert_eq!(ts, expected);
    }

    #[test]
    fn trivial_communication_blocks() {
        assert!(transitions(&t("a.0 | b.0"), &CommFunction::trivial())
            .unwrap()
            .is_empty());
        assert!(transitions(&t("x"), &CommFunction::trivial()).is_err());
    }
}
