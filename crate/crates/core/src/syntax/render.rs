use std::fmt;

use super::{BinOp, ProcessTerm};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    PrefixBody,
    Left(BinOp),
    Right(BinOp),
}

fn needs_parens(t: &ProcessTerm, slot: Slot) -> bool {
    let op = match t.as_binary() {
        Some((op, _, _)) => op,
        None => return false,
    };
    match slot {
        Slot::Top => false,
        Slot::PrefixBody => true,
        Slot::Left(BinOp::Sum) => false,
        Slot::Right(BinOp::Sum) => op == BinOp::Sum,
        Slot::Left(parent) => op == BinOp::Sum || op != parent,
        Slot::Right(_) => true,
    }
}

fn write_term(t: &ProcessTerm, slot: Slot, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parens = needs_parens(t, slot);
    if parens {
        f.write_str("(")?;
    }
    match t {
        ProcessTerm::Nil => f.write_str("0")?,
        ProcessTerm::Var(v) => write!(f, "{v}")?,
        ProcessTerm::Prefix(l, p) => {
            write!(f, "{l}.")?;
            write_term(p, Slot::PrefixBody, f)?;
        }
        _ => {
            let (op, p, q) = t.as_binary().expect("binary constructor");
            write_term(p, Slot::Left(op), f)?;
            write!(f, " {} ", op.symbol())?;
            write_term(q, Slot::Right(op), f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

/// Minimal-parentheses rendering; reparses to the same tree.
impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, Slot::Top, f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_term, Alphabet};

    fn roundtrip(s: &str) -> String {
        parse_term(s, &Alphabet::parse("a,~a,b").unwrap())
            .unwrap()
            .to_string()
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip("((a.0) + (x))"), "a.0 + x");
        assert_eq!(roundtrip("x + (y + z)"), "x + (y + z)");
        assert_eq!(roundtrip("(x |_ y) |_ z"), "x |_ y |_ z");
        assert_eq!(roundtrip("x |_ (y |_ z)"), "x |_ (y |_ z)");
        assert_eq!(roundtrip("(x | y) |_ z"), "(x | y) |_ z");
        assert_eq!(roundtrip("a.(x + y) || ~a.0"), "a.(x + y) || ~a.0");
        assert_eq!(roundtrip("tau.a.(x || y)"), "tau.a.(x || y)");
        assert_eq!(roundtrip("(x + y) | z"), "(x + y) | z");
    }
}
