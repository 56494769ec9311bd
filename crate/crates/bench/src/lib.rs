//! Benchmark workloads.

use procalg::normalize::{f_normalize, h_normalize};
use procalg::syntax::{parse_equation, parse_term, Alphabet, Equation, ProcessTerm};
use procalg::CommFunction;

/// Equations timed by the decide benchmark, as (text, comm name).
pub const EQUATIONS: &[(&str, &str)] = &[
    ("x || y = y || x", "none"),
    ("(x || y) || z = x || (y || z)", "none"),
    ("(x |_ y) |_ z = x |_ (y || z)", "none"),
    ("x || y = x |_ y", "none"),
    ("x || y = y || x", "ccs"),
    ("(x |_ y) | (z |_ u) = (x | z) |_ (y || u)", "ccs"),
    ("x | (y | z) = 0", "ccs"),
    ("x || y = x |_ y", "ccs"),
];

/// Closed terms timed by the canonicalization benchmark.
pub const CLOSED: &[&str] = &[
    "(a.0 + b.0) || (~a.0 + ~b.0) || a.b.0",
    "a.(b.0 || c.0) || ~a.~b.0 || d.0",
    "(a.0 || a.0 || a.0) |_ (b.0 + c.d.0)",
];

pub fn alphabet() -> Alphabet {
    Alphabet::parse("a,~a,b,~b,c,~c,d,~d").expect("valid alphabet")
}

pub fn comm(name: &str) -> CommFunction {
    match name {
        "ccs" => CommFunction::ccs(),
        _ => CommFunction::trivial(),
    }
}

pub fn equations() -> Vec<(String, Equation, CommFunction)> {
    EQUATIONS
        .iter()
        .map(|(text, c)| {
            (
                format!("{text} [{c}]"),
                parse_equation(text, &alphabet()).expect("valid equation"),
                comm(c),
            )
        })
        .collect()
}

pub fn closed_terms() -> Vec<ProcessTerm> {
    CLOSED
        .iter()
        .map(|t| parse_term(t, &alphabet()).expect("valid term"))
        .collect()
}

/// Normalizes an equation's sides under the procedure that matches `c`.
pub fn normalize_both(eq: &Equation, c: &CommFunction) -> usize {
    [&eq.lhs, &eq.rhs]
        .into_iter()
        .map(|t| match c.kind() {
            procalg::semantics::CommKind::Ccs => {
                h_normalize(t, c).expect("normalizes").1.steps.len()
            }
            _ => f_normalize(t).1.steps.len(),
        })
        .sum()
}
