mod common;

use common::{closed_term, open_term};
use procalg::semantics::{canonicalize, CommFunction};
use procalg::syntax::{measure_less, parse_term, Alphabet, ProcessTerm};
use proptest::prelude::*;

fn alphabet() -> Alphabet {
    Alphabet::parse("a,~a,b,~b").unwrap()
}

/// Height computed from the defining clauses.
fn height(t: &ProcessTerm) -> usize {
    match t {
        ProcessTerm::Nil => 0,
        ProcessTerm::Var(_) => 1,
        ProcessTerm::Prefix(_, p) => 1 + height(p),
        ProcessTerm::Sum(p, q) => height(p).max(height(q)),
        ProcessTerm::LMerge(p, q) | ProcessTerm::CMerge(p, q) | ProcessTerm::Par(p, q) => {
            height(p) + height(q)
        }
    }
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(p in open_term()) {
        let text = p.to_string();
        prop_assert_eq!(parse_term(&text, &alphabet()).unwrap(), p, "{}", text);
    }

    #[test]
    fn height_follows_the_clauses(p in open_term()) {
        prop_assert_eq!(p.height(), height(&p));
    }

    #[test]
    fn measure_is_a_strict_order(p in open_term(), q in open_term(), r in open_term()) {
        prop_assert!(!measure_less(&p, &p));
        prop_assert!(!(measure_less(&p, &q) && measure_less(&q, &p)));
        if measure_less(&p, &q) && measure_less(&q, &r) {
            prop_assert!(measure_less(&p, &r));
        }
    }

    #[test]
    fn summands_are_simple_and_fold_back(p in open_term()) {
        let parts = p.syntactic_summands();
        for s in &parts {
            prop_assert!(s.is_simple() && !s.is_nil(), "{}", s);
            prop_assert!(s.height() <= p.height());
        }
        let folded = ProcessTerm::sum_of(parts.iter().cloned());
        prop_assert_eq!(folded.syntactic_summands(), parts);
    }

    #[test]
    fn summand_fold_is_bisimilar(p in closed_term()) {
        let folded = ProcessTerm::sum_of(p.syntactic_summands());
        let c = CommFunction::ccs();
        prop_assert_eq!(canonicalize(&folded, &c).unwrap(), canonicalize(&p, &c).unwrap());
    }
}
