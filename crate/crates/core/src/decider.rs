//! Decision procedures for validity of open equations, with distinguishing
//! valuations and a search-based refuter for other communication functions.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::normalize::{
    ac_equal, branching_bound, closure_actions, f_normalize, h_normalize, NormalForm, NormalMode,
};
use crate::oracle::{check_equation_sampled, SampleOutcome, SearchBound, SearchStats};
use crate::semantics::{
    brancher, distinguish, validate_comm, CanonicalProcess, CommFunction, CommKind, CommViolation,
    Experiment, Semantics, SemanticsError,
};
use crate::syntax::{ActionName, Alphabet, Equation, Label, ProcessTerm, Variable};

/// Closed terms assigned to variables, in first-occurrence order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Valuation {
    pub assignment: Vec<(Variable, ProcessTerm)>,
}

impl Valuation {
    pub fn get(&self, v: &Variable) -> Option<&ProcessTerm> {
        self.assignment.iter().find(|(w, _)| w == v).map(|(_, t)| t)
    }

    pub fn as_map(&self) -> BTreeMap<Variable, ProcessTerm> {
        self.assignment.iter().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Canonical images of the variables.
    pub fn canonical(
        &self,
        sem: &mut Semantics,
    ) -> Result<BTreeMap<Variable, CanonicalProcess>, SemanticsError> {
        self.assignment
            .iter()
            .map(|(v, t)| Ok((v.clone(), sem.canonicalize(t)?)))
            .collect()
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.assignment.iter().map(|(v, t)| (v, t)))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(v, t)| format!("{v} := {t}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    /// `experiment` holds for the left-hand side under `witness` and fails for
    /// the right-hand side.
    Invalid {
        witness: Valuation,
        experiment: Experiment,
    },
    Unknown {
        searched: SearchStats,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum DecideError {
    #[error("the decision procedure covers the trivial and CCS communication functions only")]
    UnsupportedComm,
    #[error("distinguishing valuation needs a nonempty bar-closed action set")]
    BadActions,
    #[error("semantic check disagrees with syntactic comparison of the normal forms `{lhs}` and `{rhs}`")]
    Inconsistent { lhs: ProcessTerm, rhs: ProcessTerm },
    #[error("witness failed re-verification")]
    WitnessRejected,
    #[error(transparent)]
    Normalize(#[from] crate::normalize::NormalizeError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Comm(#[from] CommViolation),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

/// The intermediate data of a decision, for auditing.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub lhs: NormalForm,
    pub rhs: NormalForm,
    /// The bound `W` the valuation is built from: the larger branching bound
    /// of the two normal forms, which never exceeds their widths.
    pub width: usize,
    /// The action set the H-valuation is built over; empty in F-mode.
    pub actions: Vec<ActionName>,
    pub valuation: Valuation,
}

/// `x_k := tau.B_(W+1+k)`.
pub fn distinguishing_valuation_f(vars: &[Variable], width: usize) -> Valuation {
    let assignment = vars
        .iter()
        .enumerate()
        .map(|(k, v)| {
            (
                v.clone(),
                ProcessTerm::tau(brancher(width + 1 + k).expect("index is positive")),
            )
        })
        .collect();
    Valuation { assignment }
}

fn is_prime(m: usize) -> bool {
    m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
}

/// Successive primes greater than `lower`.
pub fn primes_above(lower: usize) -> impl Iterator<Item = usize> {
    (lower + 1..).filter(|&m| is_prime(m))
}

/// `x := a_1.B_(1*nu) + ... + a_n.B_(n*nu)` with `nu` running over the
/// successive primes above `max(n, W)`.
pub fn distinguishing_valuation_h(
    vars: &[Variable],
    width: usize,
    actions: &[ActionName],
) -> Result<Valuation, DecideError> {
    let set: Alphabet = actions.iter().cloned().collect();
    if actions.is_empty() || !set.is_bar_closed() || set.len() != actions.len() {
        return Err(DecideError::BadActions);
    }
    let n = actions.len();
    let assignment = vars
        .iter()
        .zip(primes_above(n.max(width)))
        .map(|(v, nu)| {
            let image = ProcessTerm::sum_of(actions.iter().enumerate().map(|(i, a)| {
                ProcessTerm::prefix(
                    Label::Act(a.clone()),
                    brancher((i + 1) * nu).expect("index is positive"),
                )
            }));
            (v.clone(), image)
        })
        .collect();
    Ok(Valuation { assignment })
}

/// Evaluates both sides under `valuation`; returns an experiment telling
/// them apart, or `None` if they are bisimilar.
pub fn separate(
    eq: &Equation,
    valuation: &Valuation,
    sem: &mut Semantics,
) -> Result<Option<Experiment>, SemanticsError> {
    let images = valuation.canonical(sem)?;
    let p = sem.evaluate(&eq.lhs, &images)?;
    let q = sem.evaluate(&eq.rhs, &images)?;
    Ok(distinguish(&p, &q))
}

/// Decides validity of `eq` under the trivial or CCS communication function.
pub fn decide(eq: &Equation, c: &CommFunction) -> Result<Verdict, DecideError> {
    decide_detailed(eq, c, &Alphabet::pair("a")).map(|d| d.verdict)
}

/// Widths, action set and distinguishing valuation for a pair of normal forms.
fn valuation_for(
    n1: &NormalForm,
    n2: &NormalForm,
    vars: &[Variable],
    fallback: &Alphabet,
) -> Result<(usize, Vec<ActionName>, Valuation), DecideError> {
    match n1.mode {
        NormalMode::F => {
            let width = branching_bound(&n1.term, NormalMode::F, 0)?.max(branching_bound(
                &n2.term,
                NormalMode::F,
                0,
            )?);
            Ok((width, Vec::new(), distinguishing_valuation_f(vars, width)))
        }
        NormalMode::H => {
            let pair = fallback
                .first_pair()
                .unwrap_or_else(|| ActionName::new("a"));
            let fallback = Alphabet::pair(pair.name());
            let actions: Vec<ActionName> = closure_actions([&n1.term, &n2.term], &fallback)
                .iter()
                .cloned()
                .collect();
            let n = actions.len();
            let width = branching_bound(&n1.term, NormalMode::H, n)?.max(branching_bound(
                &n2.term,
                NormalMode::H,
                n,
            )?);
            let valuation = distinguishing_valuation_h(vars, width, &actions)?;
            Ok((width, actions, valuation))
        }
    }
}

/// Both sides of the distinction theorem for two normal forms: whether
/// their images under the distinguishing valuation are bisimilar, and
/// whether they are equal modulo AC. The two must agree.
pub fn distinction(
    n1: &ProcessTerm,
    n2: &ProcessTerm,
    mode: NormalMode,
    fallback: &Alphabet,
) -> Result<(bool, bool), DecideError> {
    let c = match mode {
        NormalMode::F => CommFunction::trivial(),
        NormalMode::H => CommFunction::ccs(),
    };
    let wrap = |t: &ProcessTerm| NormalForm {
        term: t.clone(),
        mode,
        width: 0,
        n: 0,
    };
    let vars = Equation::new(n1.clone(), n2.clone()).vars_in_order();
    let (_, _, valuation) = valuation_for(&wrap(n1), &wrap(n2), &vars, fallback)?;
    let mut sem = Semantics::new(c);
    let images = valuation.canonical(&mut sem)?;
    let bisimilar = sem.evaluate(n1, &images)? == sem.evaluate(n2, &images)?;
    Ok((bisimilar, ac_equal(n1, n2, mode)?))
}

/// As [`decide`], reporting normal forms, width and valuation. `fallback`
/// supplies the action pair used when the normal forms mention no actions.
pub fn decide_detailed(
    eq: &Equation,
    c: &CommFunction,
    fallback: &Alphabet,
) -> Result<Decision, DecideError> {
    let vars = eq.vars_in_order();
    let (lhs, rhs) = match c.kind() {
        CommKind::Trivial => (f_normalize(&eq.lhs).0, f_normalize(&eq.rhs).0),
        CommKind::Ccs => (h_normalize(&eq.lhs, c)?.0, h_normalize(&eq.rhs, c)?.0),
        CommKind::Custom => return Err(DecideError::UnsupportedComm),
    };
    let (width, actions, valuation) = valuation_for(&lhs, &rhs, &vars, fallback)?;
    let mut sem = Semantics::new(c.clone());
    let images = valuation.canonical(&mut sem)?;
    let n1 = sem.evaluate(&lhs.term, &images)?;
    let n2 = sem.evaluate(&rhs.term, &images)?;
    let bisimilar = n1 == n2;
    if bisimilar != ac_equal(&lhs.term, &rhs.term, lhs.mode)? {
        return Err(DecideError::Inconsistent {
            lhs: lhs.term.clone(),
            rhs: rhs.term.clone(),
        });
    }
    let verdict = if bisimilar {
        Verdict::Valid
    } else {
        let experiment = separate(eq, &valuation, &mut sem)?.ok_or(DecideError::WitnessRejected)?;
        Verdict::Invalid {
            witness: valuation.clone(),
            experiment,
        }
    };
    Ok(Decision {
        verdict,
        lhs,
        rhs,
        width,
        actions,
        valuation,
    })
}

/// Searches closed instances over the bounded universe for a counterexample.
/// Sound for every communication function, but only refutes.
pub fn refute_by_search(
    eq: &Equation,
    c: &CommFunction,
    bound: &SearchBound,
    sample: usize,
    seed: u64,
) -> Result<Verdict, DecideError> {
    validate_comm(c)?;
    Ok(match check_equation_sampled(eq, c, bound, sample, seed)? {
        SampleOutcome::NoCounterexample(stats) => Verdict::Unknown { searched: stats },
        SampleOutcome::Counterexample {
            valuation,
            experiment,
            ..
        } => Verdict::Invalid {
            witness: valuation,
            experiment,
        },
    })
}
