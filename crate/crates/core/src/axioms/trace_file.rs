use std::fmt::Write as _;

use thiserror::Error;

use super::{AxiomId, Binding, DerivationTrace, Direction, RewriteStep};
use crate::syntax::{is_identifier, parse_term, Alphabet, Position, Variable};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

/// Renders a trace in the line-oriented trace file format.
pub fn format_trace(trace: &DerivationTrace) -> String {
    let mut out = format!("start: {}\n", trace.start);
    for s in &trace.steps {
        write!(out, "step: {} {} at {}", s.axiom, s.direction, s.position)
            .expect("write to string");
        if !s.binding.is_empty() {
            let parts: Vec<String> = s.binding.iter().map(|(v, t)| format!("{v}={t}")).collect();
            write!(out, " with {}", parts.join(", ")).expect("write to string");
        }
        out.push('\n');
    }
    writeln!(out, "end: {}", trace.end).expect("write to string");
    out
}

/// Parses the trace file format. Blank lines and `#` comments are ignored.
pub fn parse_trace(text: &str, alphabet: &Alphabet) -> Result<DerivationTrace, TraceParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let term = |line: usize, s: &str| {
        parse_term(s, alphabet).map_err(|e| TraceParseError {
            line,
            message: e.to_string(),
        })
    };
    let Some((&(first_no, first), rest)) = lines.split_first() else {
        return Err(TraceParseError {
            line: 1,
            message: "empty trace".into(),
        });
    };
    let Some((&(last_no, last), middle)) = rest.split_last() else {
        return Err(TraceParseError {
            line: first_no,
            message: "missing `end:` line".into(),
        });
    };
    let start = first
        .strip_prefix("start:")
        .ok_or_else(|| TraceParseError {
            line: first_no,
            message: "expected `start:`".into(),
        })?;
    let end = last.strip_prefix("end:").ok_or_else(|| TraceParseError {
        line: last_no,
        message: "expected `end:`".into(),
    })?;
    let mut steps = Vec::new();
    for &(no, line) in middle {
        let err = |message: String| TraceParseError { line: no, message };
        let body = line
            .strip_prefix("step:")
            .ok_or_else(|| err("expected `step:`".into()))?
            .trim();
        let (head, with) = match body.split_once(" with ") {
            Some((h, w)) => (h, Some(w)),
            None => (body, None),
        };
        let words: Vec<&str> = head.split_whitespace().collect();
        let [axiom, dir, "at", pos] = words[..] else {
            return Err(err("expected `step: <AXIOM> <L|R> at <path>`".into()));
        };
        let axiom = AxiomId::parse(axiom).ok_or_else(|| err(format!("unknown axiom `{axiom}`")))?;
        let direction = match dir {
            "L" => Direction::LeftToRight,
            "R" => Direction::RightToLeft,
            other => return Err(err(format!("direction must be L or R, found `{other}`"))),
        };
        let position = Position::parse(pos).ok_or_else(|| err(format!("invalid path `{pos}`")))?;
        let mut binding = Binding::new();
        for part in with.into_iter().flat_map(|w| w.split(',')) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| err(format!("expected `var=term` in `{part}`")))?;
            let name = name.trim();
            if !is_identifier(name) {
                return Err(err(format!("invalid variable `{name}`")));
            }
            binding.insert(Variable::new(name), term(no, value)?);
        }
        steps.push(RewriteStep {
            axiom,
            position,
            direction,
            binding,
        });
    }
    Ok(DerivationTrace {
        start: term(first_no, start)?,
        steps,
        end: term(last_no, end)?,
    })
}
