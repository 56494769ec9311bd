mod common;

use std::collections::BTreeMap;

use common::open_term;
use procalg::axioms::{match_axiom, verify_trace, DerivationTrace, Mode};
use procalg::decider::distinction;
use procalg::generate::{ac_variant, random_normal_form, TermShape};
use procalg::normalize::{
    ac_equal, branching_bound, f_normalize, fwidth, h_normalize, hwidth, is_f_normal, is_h_normal,
    NormalMode,
};
use procalg::oracle::{universe, SearchBound};
use procalg::semantics::{CommFunction, Semantics};
use procalg::syntax::{Alphabet, ProcessTerm, Variable};
use proptest::prelude::*;
use proptest::sample::select;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_universe() -> Vec<ProcessTerm> {
    let bound = SearchBound {
        max_depth: 2,
        max_fanout: 1,
        ..SearchBound::default()
    };
    universe(&bound).iter().map(|p| p.to_term()).collect()
}

fn closing() -> impl Strategy<Value = BTreeMap<Variable, ProcessTerm>> {
    let u = small_universe();
    (select(u.clone()), select(u.clone()), select(u)).prop_map(|(x, y, z)| {
        BTreeMap::from([
            (Variable::new("x"), x),
            (Variable::new("y"), y),
            (Variable::new("z"), z),
        ])
    })
}

/// Every intermediate term of the trace has the same closed instance as its start.
fn trace_is_sound(
    trace: &DerivationTrace,
    c: &CommFunction,
    sigma: &BTreeMap<Variable, ProcessTerm>,
) -> bool {
    let mut sem = Semantics::new(c.clone());
    let start = sem
        .canonicalize(&trace.start.substitute(sigma).unwrap())
        .unwrap();
    let mut cur = trace.start.clone();
    for step in &trace.steps {
        cur = match_axiom(&cur, step, c).unwrap();
        if sem.canonicalize(&cur.substitute(sigma).unwrap()).unwrap() != start {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn f_normal_forms(p in open_term(), sigma in closing()) {
        let c = CommFunction::trivial();
        let (n, trace) = f_normalize(&p);
        prop_assert!(is_f_normal(&n.term));
        prop_assert!(n.term.height() <= p.height());
        prop_assert_eq!(verify_trace(&trace, &c, Mode::F), Ok(()));
        prop_assert!(trace_is_sound(&trace, &c, &sigma));
        let mut sem = Semantics::new(c);
        prop_assert_eq!(
            sem.canonicalize(&p.substitute(&sigma).unwrap()).unwrap(),
            sem.canonicalize(&n.term.substitute(&sigma).unwrap()).unwrap()
        );
    }

    #[test]
    fn h_normal_forms(p in open_term(), sigma in closing()) {
        let c = CommFunction::ccs();
        let (n, trace) = h_normalize(&p, &c).unwrap();
        prop_assert!(is_h_normal(&n.term));
        prop_assert!(n.term.height() <= p.height());
        prop_assert_eq!(verify_trace(&trace, &c, Mode::H), Ok(()));
        prop_assert!(trace_is_sound(&trace, &c, &sigma));
        let mut sem = Semantics::new(c);
        prop_assert_eq!(
            sem.canonicalize(&p.substitute(&sigma).unwrap()).unwrap(),
            sem.canonicalize(&n.term.substitute(&sigma).unwrap()).unwrap()
        );
    }

    #[test]
    fn ac_equality_is_an_equivalence_and_sound(seed in any::<u64>(), sigma in closing()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = TermShape::new(10, 3, &Alphabet::pair("a"));
        for mode in [NormalMode::F, NormalMode::H] {
            let n = random_normal_form(&mut rng, mode, &shape, 9);
            let v1 = ac_variant(&mut rng, &n);
            let v2 = ac_variant(&mut rng, &v1);
            let other = random_normal_form(&mut rng, mode, &shape, 9);
            prop_assert!(ac_equal(&n, &n, mode).unwrap());
            prop_assert!(ac_equal(&n, &v1, mode).unwrap() && ac_equal(&v1, &n, mode).unwrap());
            prop_assert!(ac_equal(&n, &v2, mode).unwrap());
            prop_assert_eq!(ac_equal(&n, &other, mode).unwrap(), ac_equal(&other, &n, mode).unwrap());
            let c = if mode == NormalMode::F { CommFunction::trivial() } else { CommFunction::ccs() };
            let mut sem = Semantics::new(c);
            prop_assert_eq!(
                sem.canonicalize(&n.substitute(&sigma).unwrap()).unwrap(),
                sem.canonicalize(&v2.substitute(&sigma).unwrap()).unwrap()
            );
            let (bisimilar, ac) = distinction(&n, &other, mode, &Alphabet::pair("a")).unwrap();
            prop_assert_eq!(bisimilar, ac, "{} vs {}", n, other);
        }
    }

    #[test]
    fn widths_bound_branching(seed in any::<u64>()) {
        use procalg::decider::{distinguishing_valuation_f, distinguishing_valuation_h};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = TermShape::new(10, 2, &Alphabet::pair("a"));
        let actions: Vec<_> = Alphabet::pair("a").iter().cloned().collect();
        for mode in [NormalMode::F, NormalMode::H] {
            let n = random_normal_form(&mut rng, mode, &shape, 10);
            let vars = n.vars_in_order();
            let (width, bound, valuation, c) = match mode {
                NormalMode::F => {
                    let b = branching_bound(&n, mode, 0).unwrap();
                    (fwidth(&n).unwrap(), b, distinguishing_valuation_f(&vars, b), CommFunction::trivial())
                }
                NormalMode::H => {
                    let b = branching_bound(&n, mode, 2).unwrap();
                    (hwidth(&n, 2).unwrap(), b, distinguishing_valuation_h(&vars, b, &actions).unwrap(), CommFunction::ccs())
                }
            };
            prop_assert!(bound <= width);
            let mut sem = Semantics::new(c);
            let images = valuation.canonical(&mut sem).unwrap();
            let image = sem.evaluate(&n, &images).unwrap();
            prop_assert!(image.branching_degree() <= bound, "{}: {} > {}", n, image.branching_degree(), bound);
        }
    }
}
