//! Text rendering of witnesses with brancher processes abbreviated.

use std::collections::BTreeSet;

use procalg::decider::Valuation;
use procalg::semantics::tau_chain;
use procalg::syntax::{ProcessTerm, Variable};

/// `k` if `t` is literally the brancher `B(k)`, `k >= 2`.
fn brancher_index(t: &ProcessTerm) -> Option<usize> {
    if !matches!(t, ProcessTerm::Sum(..)) {
        return None;
    }
    let parts = t.syntactic_summands();
    let ok = parts
        .iter()
        .enumerate()
        .all(|(i, p)| **p == tau_chain(i + 1));
    ok.then_some(parts.len())
}

fn abbreviate(t: &ProcessTerm, seen: &mut BTreeSet<usize>) -> ProcessTerm {
    if let Some(k) = brancher_index(t) {
        seen.insert(k);
        return ProcessTerm::Var(Variable::new(&format!("B({k})")));
    }
    match t {
        ProcessTerm::Prefix(l, p) => ProcessTerm::prefix(l.clone(), abbreviate(p, seen)),
        _ => match t.as_binary() {
            Some((op, p, q)) => ProcessTerm::binary(op, abbreviate(p, seen), abbreviate(q, seen)),
            None => t.clone(),
        },
    }
}

/// The valuation with every brancher written `B(k)`, and a legend line for
/// the abbreviations used (empty if none).
pub fn render_valuation(v: &Valuation) -> (String, String) {
    let mut seen = BTreeSet::new();
    let parts: Vec<String> = v
        .assignment
        .iter()
        .map(|(x, t)| format!("{x} := {}", abbreviate(t, &mut seen)))
        .collect();
    let legend = if seen.is_empty() {
        String::new()
    } else {
        let ks: Vec<String> = seen.iter().map(|k| format!("B({k})")).collect();
        format!(
            "where B(k) = tau.0 + tau.tau.0 + ... + tau^k.0, for {}",
            ks.join(", ")
        )
    };
    (parts.join(", "), legend)
}
