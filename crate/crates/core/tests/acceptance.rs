//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use procalg::axioms::{registered_trace, verify_trace, AxiomId, Direction, Mode};
use procalg::decider::{
    decide_detailed, distinction, refute_by_search, separate, DecideError, Verdict,
};
use procalg::decomposition::Decomposer;
use procalg::generate::{
    ac_variant, random_equation, random_normal_form, random_rewrite, TermShape,
};
use procalg::normalize::{f_normalize, h_normalize, is_f_normal, is_h_normal, NormalMode};
use procalg::oracle::{axiom_soundness_sweep, universe, SearchBound};
use procalg::semantics::{brancher_canonical, CommFunction, Semantics};
use procalg::syntax::{parse_equation, Alphabet, Equation, Position};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;
const SWEEP_LIMIT: Duration = Duration::from_secs(300);
const NORMALIZE_LIMIT: Duration = Duration::from_secs(300);
const LEMMA_LIMIT: Duration = Duration::from_secs(600);
const ORACLE_LIMIT: Duration = Duration::from_secs(600);
const DECIDE_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    check(spent <= limit, || {
        format!("took {spent:?}, limit {limit:?}")
    })
}

fn alphabet() -> Alphabet {
    Alphabet::parse("a,~a,b,~b").unwrap()
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let report =
        axiom_soundness_sweep(&SearchBound::default(), 0, SEED).map_err(|e| e.to_string())?;
    within(start, SWEEP_LIMIT)?;
    let bad: Vec<_> = report
        .records
        .iter()
        .filter(|r| !r.as_expected())
        .map(|r| format!("{} under {}", r.law, r.comm))
        .collect();
    check(bad.is_empty(), || format!("unexpected outcomes: {bad:?}"))?;
    let table: BTreeSet<String> =
        AxiomId::table(&SearchBound::default().alphabet, &CommFunction::trivial())
            .iter()
            .chain(AxiomId::table(&SearchBound::default().alphabet, &CommFunction::ccs()).iter())
            .map(ToString::to_string)
            .collect();
    for r in &report.records {
        if table.contains(&r.law) {
            check(r.exhaustive, || {
                format!("{} under {} was not exhaustive", r.law, r.comm)
            })?;
        }
    }
    let f_none = report.find("F", "none").ok_or("no F record")?;
    let f_ccs = report.find("F", "ccs").ok_or("no F record")?;
    let h_ccs = report.find("H", "ccs").ok_or("no H record")?;
    check(f_none.counterexample.is_none(), || {
        "F refuted under none".into()
    })?;
    check(h_ccs.counterexample.is_none(), || {
        "H refuted under ccs".into()
    })?;
    let witness = f_ccs
        .counterexample
        .as_ref()
        .ok_or("F not refuted under ccs")?;
    let mut sem = Semantics::new(CommFunction::ccs());
    let (l, r) = AxiomId::F.sides(&CommFunction::ccs()).unwrap();
    let refuted = separate(&Equation::new(l, r), witness, &mut sem).map_err(|e| e.to_string())?;
    check(refuted.is_some(), || "F witness does not separate".into())?;
    Ok(format!(
        "{} records over {} processes, F refuted under ccs by {witness}, {:.1?}",
        report.records.len(),
        report.universe,
        start.elapsed()
    ))
}

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = TermShape::new(12, 3, &alphabet());
    let ccs = CommFunction::ccs();
    let trivial = CommFunction::trivial();
    let count = 500;
    for _ in 0..count {
        let p = procalg::generate::random_term(&mut rng, &shape);
        let (nf, trace) = f_normalize(&p);
        check(is_f_normal(&nf.term), || {
            format!("{p}: {} is not F-normal", nf.term)
        })?;
        check(nf.term.height() <= p.height(), || {
            format!("{p}: height grew")
        })?;
        verify_trace(&trace, &trivial, Mode::F).map_err(|e| format!("{p}: F trace: {e}"))?;
        let (nh, trace) = h_normalize(&p, &ccs).map_err(|e| e.to_string())?;
        check(is_h_normal(&nh.term), || {
            format!("{p}: {} is not H-normal", nh.term)
        })?;
        check(nh.term.height() <= p.height(), || {
            format!("{p}: height grew")
        })?;
        verify_trace(&trace, &ccs, Mode::H).map_err(|e| format!("{p}: H trace: {e}"))?;
    }
    within(start, NORMALIZE_LIMIT)?;
    Ok(format!(
        "{count} terms, both procedures, {:.1?}",
        start.elapsed()
    ))
}

fn registered_traces() -> Outcome {
    use AxiomId::*;
    let expect = |id: AxiomId, axioms: Vec<AxiomId>, dirs: Vec<Direction>| -> Result<(), String> {
        let trace = registered_trace(&id).map_err(|e| e.to_string())?;
        let got: Vec<AxiomId> = trace.steps.iter().map(|s| s.axiom.clone()).collect();
        check(got == axioms, || format!("{id}: steps {got:?}"))?;
        let got: Vec<Direction> = trace.steps.iter().map(|s| s.direction).collect();
        check(got == dirs, || format!("{id}: directions {got:?}"))?;
        verify_trace(&trace, &CommFunction::ccs(), Mode::H).map_err(|e| format!("{id}: {e}"))
    };
    use Direction::*;
    expect(DC8, vec![C5, C7, C5, C7, L4], vec![LeftToRight; 5])?;
    let a = procalg::syntax::ActionName::new("a");
    expect(
        DC9,
        vec![DP4, C2(a.clone(), a.co()), H],
        vec![RightToLeft, RightToLeft, LeftToRight],
    )?;
    let c8 = registered_trace(&DC8).unwrap();
    check(c8.steps[2].position == Position(vec![0]), || {
        "C8 step 3 position".into()
    })?;
    Ok("D-C8 in 5 steps, D-C9 in 3 steps".into())
}

fn brancher_lemma() -> Outcome {
    let b: Vec<_> = (1..=8).map(|i| brancher_canonical(i).unwrap()).collect();
    for (i, bi) in b.iter().enumerate() {
        let i = i + 1;
        check(bi.branching_degree() == i, || {
            format!("bdeg(B_{i}) = {}", bi.branching_degree())
        })?;
        check(bi.depth() == i, || format!("depth(B_{i}) = {}", bi.depth()))?;
    }
    let mut dec = Decomposer::new(&CommFunction::trivial(), &SearchBound::default());
    for (i, bi) in b.iter().enumerate().take(4) {
        check(
            dec.is_parallel_prime(bi).map_err(|e| e.to_string())?,
            || format!("B_{} not prime", i + 1),
        )?;
    }
    for k in 0..8 {
        for l in 0..8 {
            check((b[k] == b[l]) == (k == l), || {
                format!("B_{} vs B_{}", k + 1, l + 1)
            })?;
        }
    }
    Ok("B_1..B_8 degree and depth, B_1..B_4 prime, pairwise distinct".into())
}

fn composition_lemmas() -> Outcome {
    let start = Instant::now();
    let bound = SearchBound::default();
    let u = universe(&bound);
    let mut summary = Vec::new();
    for (name, c) in [
        ("none", CommFunction::trivial()),
        ("ccs", CommFunction::ccs()),
    ] {
        let mut dec = Decomposer::new(&c, &bound);
        let sem = dec.semantics();
        let mut pairs = 0u64;
        for r in &u {
            let mut images = BTreeSet::new();
            for p in &u {
                let pr = sem.par(p, r);
                pairs += 1;
                check(pr.depth() == p.depth() + r.depth(), || {
                    format!("{name}: depth({p} || {r})")
                })?;
                check(
                    pr.branching_degree() >= p.branching_degree().max(r.branching_degree()),
                    || format!("{name}: bdeg({p} || {r})"),
                )?;
                images.insert(pr.id());
            }
            check(images.len() == u.len(), || {
                format!("{name}: cancellation fails for {r}")
            })?;
        }
        for p in &u {
            let all = dec.all_factorizations(p).map_err(|e| e.to_string())?;
            check(all.len() == 1, || {
                format!("{name}: {p} has {} factorizations", all.len())
            })?;
            let greedy = dec.decompose(p).map_err(|e| e.to_string())?;
            check(all.contains(&greedy.factors), || {
                format!("{name}: greedy decomposition of {p} not found")
            })?;
        }
        summary.push(format!(
            "{name}: {pairs} pairs, {} triples",
            pairs * u.len() as u64
        ));
    }
    within(start, LEMMA_LIMIT)?;
    Ok(format!(
        "{} processes; {}; {:.1?}",
        u.len(),
        summary.join("; "),
        start.elapsed()
    ))
}

fn distinction_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let shape = TermShape::new(10, 3, &Alphabet::pair("a"));
    let mut pairs = 0;
    let mut equal = 0;
    for mode in [NormalMode::F, NormalMode::H] {
        for i in 0..150 {
            let n1 = random_normal_form(&mut rng, mode, &shape, 9);
            let n2 = if i % 3 == 0 {
                ac_variant(&mut rng, &n1)
            } else {
                random_normal_form(&mut rng, mode, &shape, 9)
            };
            let (bisimilar, ac) =
                distinction(&n1, &n2, mode, &Alphabet::pair("a")).map_err(|e| e.to_string())?;
            check(bisimilar == ac, || {
                format!("{mode:?}: {n1} vs {n2}: bisimilar {bisimilar}, ac {ac}")
            })?;
            pairs += 1;
            equal += usize::from(ac);
        }
    }
    Ok(format!(
        "{pairs} normal-form pairs ({equal} equal), every decide call checked as well"
    ))
}

fn decider_vs_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let alpha = Alphabet::pair("a");
    let shape = TermShape::new(10, 2, &alpha);
    let bound = SearchBound::default();
    let mut counts = Vec::new();
    for (name, c, mode) in [
        ("none", CommFunction::trivial(), Mode::F),
        ("ccs", CommFunction::ccs(), Mode::H),
    ] {
        let (mut valid, mut invalid) = (0, 0);
        for i in 0..300 {
            let eq = if i % 2 == 0 {
                random_equation(&mut rng, &shape)
            } else {
                let lhs = procalg::generate::random_term(&mut rng, &shape);
                let rhs = random_rewrite(&mut rng, &lhs, &c, mode, &alpha, &shape, 3);
                Equation::new(lhs, rhs)
            };
            let d = decide_detailed(&eq, &c, &alpha).map_err(|e| format!("{name}: {eq}: {e}"))?;
            let mut sem = Semantics::new(c.clone());
            match &d.verdict {
                Verdict::Valid => {
                    valid += 1;
                    let refuted =
                        refute_by_search(&eq, &c, &bound, 0, SEED).map_err(|e| e.to_string())?;
                    check(!refuted.is_invalid(), || {
                        format!("{name}: {eq} decided valid but refuted: {refuted:?}")
                    })?;
                }
                Verdict::Invalid { witness, .. } => {
                    invalid += 1;
                    let sep = separate(&eq, witness, &mut sem).map_err(|e| e.to_string())?;
                    check(sep.is_some(), || {
                        format!("{name}: {eq}: witness {witness} does not separate")
                    })?;
                }
                Verdict::Unknown { .. } => {
                    return Err(format!("{name}: {eq}: decider returned unknown"))
                }
            }
            if i % 2 == 1 {
                check(d.verdict.is_valid(), || {
                    format!("{name}: rewrite-derived {eq} decided invalid")
                })?;
            }
        }
        counts.push(format!("{name}: {valid} valid, {invalid} invalid"));
    }
    within(start, ORACLE_LIMIT)?;
    Ok(format!("{}; {:.1?}", counts.join("; "), start.elapsed()))
}

fn golden_suite() -> Outcome {
    let both = [
        "x || y = y || x",
        "(x || y) || z = x || (y || z)",
        "x || 0 = x",
        "(x |_ y) |_ z = x |_ (y || z)",
        "(x |_ y) | (z |_ u) = (x | z) |_ (y || u)",
    ];
    let mut cases: Vec<(&str, &str, bool)> = Vec::new();
    for e in both {
        cases.push((e, "none", true));
        cases.push((e, "ccs", true));
    }
    cases.extend([
        ("x | y = 0", "none", true),
        ("x | y = 0", "ccs", false),
        ("x | (y | z) = 0", "ccs", true),
        ("x || y = x |_ y", "none", false),
        ("x || y = x |_ y", "ccs", false),
    ]);
    let mut slowest = Duration::ZERO;
    for (text, comm, expect_valid) in &cases {
        let c = if *comm == "ccs" {
            CommFunction::ccs()
        } else {
            CommFunction::trivial()
        };
        let eq = parse_equation(text, &alphabet()).unwrap();
        let start = Instant::now();
        let d = decide_detailed(&eq, &c, &alphabet())
            .map_err(|e: DecideError| format!("{text} under {comm}: {e}"))?;
        let spent = start.elapsed();
        slowest = slowest.max(spent);
        check(d.verdict.is_valid() == *expect_valid, || {
            format!("{text} under {comm}: {:?}", d.verdict)
        })?;
        check(spent <= DECIDE_LIMIT, || {
            format!("{text} under {comm} took {spent:?}")
        })?;
    }
    Ok(format!("{} decisions, slowest {slowest:.1?}", cases.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("axiom soundness sweep", soundness_sweep),
        ("normalization", normalization),
        ("registered traces", registered_traces),
        ("brancher lemma", brancher_lemma),
        ("parallel-composition lemmas", composition_lemmas),
        ("decider self-consistency", distinction_fuzz),
        ("decider vs oracle", decider_vs_oracle),
        ("golden equation suite", golden_suite),
    ];
    // Optional arguments select criteria by number.
    let only: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (mut ran, mut failed) = (0, 0);
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
