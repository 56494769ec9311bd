use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{is_identifier, ActionName, Alphabet, BinOp, Equation, Label, ProcessTerm, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Term(ProcessTerm),
    Equation(Equation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownAction(String),
    NameClash(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownAction(a) => write!(f, "unknown action `{a}`"),
            ParseErrorKind::NameClash(a) => {
                write!(
                    f,
                    "`{a}` is a declared action but is used here as a variable"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Ident(String),
    Tilde,
    Dot,
    Plus,
    Op(BinOp),
    LParen,
    RParen,
    Eq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Zero => f.write_str("`0`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Op(op) => write!(f, "`{}`", op.symbol()),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while matches!(self.chars.peek(), Some(&c) if c != '\n') {
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let err = |m: String| ParseError {
                line,
                column,
                kind: ParseErrorKind::Syntax(m),
            };
            let Some(c) = self.bump() else {
                out.push((Tok::End, line, column));
                return Ok(out);
            };
            let tok = match c {
                '0' => {
                    if matches!(self.chars.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                        return Err(err("identifiers must start with a letter".into()));
                    }
                    Tok::Zero
                }
                '~' => {
                    if self.chars.peek() == Some(&'~') {
                        return Err(err("double co-name `~~` is not allowed".into()));
                    }
                    Tok::Tilde
                }
                '.' => Tok::Dot,
                '+' => Tok::Plus,
                '=' => Tok::Eq,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '|' => match self.chars.peek() {
                    Some('|') => {
                        self.bump();
                        Tok::Op(BinOp::Par)
                    }
                    Some('_') => {
                        self.bump();
                        Tok::Op(BinOp::LMerge)
                    }
                    _ => Tok::Op(BinOp::CMerge),
                },
                c if c.is_ascii_alphabetic() => {
                    let mut s = String::from(c);
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    debug_assert!(is_identifier(&s));
                    Tok::Ident(s)
                }
                other => return Err(err(format!("unexpected character `{other}`"))),
            };
            out.push((tok, line, column));
        }
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (_, line, column) = self.toks[self.pos];
        ParseError { line, column, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn sum(&mut self) -> Result<ProcessTerm, ParseError> {
        let mut acc = self.merge()?;
        while *self.peek() == Tok::Plus {
            self.next();
            let rhs = self.merge()?;
            acc = ProcessTerm::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn merge(&mut self) -> Result<ProcessTerm, ParseError> {
        let mut acc = self.unary()?;
        let mut chain: Option<BinOp> = None;
        while let Tok::Op(op) = *self.peek() {
            if let Some(prev) = chain {
                if prev != op {
                    return Err(self.syntax(format!(
                        "`{}` and `{}` do not associate; add parentheses",
                        prev.symbol(),
                        op.symbol()
                    )));
                }
            }
            chain = Some(op);
            self.next();
            let rhs = self.unary()?;
            acc = ProcessTerm::binary(op, acc, rhs);
        }
        Ok(acc)
    }

    fn action(&self, name: &str, barred: bool) -> Result<ActionName, ParseError> {
        let a = ActionName::new(name);
        let a = if barred { a.co() } else { a };
        if self.alphabet.contains(&a) {
            Ok(a)
        } else {
            Err(self.error(ParseErrorKind::UnknownAction(a.to_string())))
        }
    }

    fn prefix_body(&mut self, label: Label) -> Result<ProcessTerm, ParseError> {
        self.expect(Tok::Dot)?;
        let body = self.unary()?;
        Ok(ProcessTerm::Prefix(label, Arc::new(body)))
    }

    fn unary(&mut self) -> Result<ProcessTerm, ParseError> {
        match self.peek().clone() {
            Tok::Zero => {
                self.next();
                Ok(ProcessTerm::Nil)
            }
            Tok::LParen => {
                self.next();
                let t = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Tilde => {
                self.next();
                let Tok::Ident(name) = self.peek().clone() else {
                    return Err(self.syntax(format!(
                        "expected action name after `~`, found {}",
                        self.peek()
                    )));
                };
                if name == "tau" {
                    return Err(self.syntax("`tau` has no co-name"));
                }
                let a = self.action(&name, true)?;
                self.next();
                self.prefix_body(Label::Act(a))
            }
            Tok::Ident(name) if name == "tau" => {
                self.next();
                self.prefix_body(Label::Tau)
            }
            Tok::Ident(name) => {
                let declared = self.alphabet.declares_identifier(&name);
                if *self.peek2() == Tok::Dot {
                    if !declared {
                        return Err(self.error(ParseErrorKind::UnknownAction(name)));
                    }
                    let a = self.action(&name, false)?;
                    self.next();
                    self.prefix_body(Label::Act(a))
                } else if declared {
                    Err(self.error(ParseErrorKind::NameClash(name)))
                } else {
                    self.next();
                    Ok(ProcessTerm::Var(Variable::new(&name)))
                }
            }
            other => Err(self.syntax(format!("expected a term, found {other}"))),
        }
    }
}

/// Parses a term or an equation `P = Q`. Identifiers naming declared actions
/// are actions; all other identifiers are variables.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Parsed, ParseError> {
    let toks = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    }
    .tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
    };
    let lhs = p.sum()?;
    let out = if *p.peek() == Tok::Eq {
        p.next();
        let rhs = p.sum()?;
        Parsed::Equation(Equation::new(lhs, rhs))
    } else {
        Parsed::Term(lhs)
    };
    if *p.peek() != Tok::End {
        return Err(p.syntax(format!("unexpected {}", p.peek())));
    }
    Ok(out)
}

pub fn parse_term(text: &str, alphabet: &Alphabet) -> Result<ProcessTerm, ParseError> {
    match parse(text, alphabet)? {
        Parsed::Term(t) => Ok(t),
        Parsed::Equation(_) => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Syntax("expected a term, found an equation".into()),
        }),
    }
}

pub fn parse_equation(text: &str, alphabet: &Alphabet) -> Result<Equation, ParseError> {
    match parse(text, alphabet)? {
        Parsed::Equation(e) => Ok(e),
        Parsed::Term(_) => Err(ParseError {
            line: 1,
            column: text.trim_end().chars().count() + 1,
            kind: ParseErrorKind::Syntax("expected `=`".into()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::parse("a,~a,b,~b").unwrap()
    }

    fn t(s: &str) -> ProcessTerm {
        parse_term(s, &ab()).unwrap()
    }

    #[test]
    fn precedence() {
        let expected = ProcessTerm::sum(
            ProcessTerm::act("a", ProcessTerm::Nil),
            ProcessTerm::lmerge(
                ProcessTerm::act("b", ProcessTerm::var("x")),
                ProcessTerm::var("y"),
            ),
        );
        assert_eq!(t("a.0 + b.x |_ y"), expected);
        let nested = ProcessTerm::par(
            ProcessTerm::cmerge(
                ProcessTerm::act("a", ProcessTerm::var("x")),
                ProcessTerm::var("y"),
            ),
            ProcessTerm::Nil,
        );
        assert_eq!(t("(a.x | y) || 0"), nested);
    }

    #[test]
    fn left_associative() {
        let x = || ProcessTerm::var("x");
        assert_eq!(
            t("x || x || x"),
            ProcessTerm::par(ProcessTerm::par(x(), x()), x())
        );
        assert_eq!(
            t("x + x + x"),
            ProcessTerm::sum(ProcessTerm::sum(x(), x()), x())
        );
    }

    #[test]
    fn mixed_merges_rejected() {
        let e = parse("x || y | z", &ab()).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((e.line, e.column), (1, 8));
        assert!(parse("x || (y | z)", &ab()).is_ok());
    }

    #[test]
    fn co_names() {
        assert_eq!(
            t("~a.0"),
            ProcessTerm::Prefix(
                Label::Act(ActionName::new("a").co()),
                Arc::new(ProcessTerm::Nil)
            )
        );
        assert!(matches!(
            parse("~~a.0", &ab()).unwrap_err().kind,
            ParseErrorKind::Syntax(_)
        ));
        assert!(matches!(
            parse("~c.0", &ab()).unwrap_err().kind,
            ParseErrorKind::UnknownAction(_)
        ));
    }

    #[test]
    fn identifier_disambiguation() {
        assert!(matches!(
            parse("c.0", &ab()).unwrap_err().kind,
            ParseErrorKind::UnknownAction(_)
        ));
        assert!(matches!(
            parse("a + x", &ab()).unwrap_err().kind,
            ParseErrorKind::NameClash(_)
        ));
        assert_eq!(t("c"), ProcessTerm::var("c"));
        assert!(parse("tau", &ab()).is_err());
    }

    #[test]
    fn equations_and_comments() {
        let e = parse("x + 0 = x # A4\n", &ab()).unwrap();
        assert_eq!(e, Parsed::Equation(Equation::new(t("x + 0"), t("x"))));
        assert!(parse_equation("x + 0", &ab()).is_err());
        assert!(parse_term("x = x", &ab()).is_err());
        assert!(parse("x = y = z", &ab()).is_err());
    }

    #[test]
    fn error_positions() {
        let e = parse("a.0 +\n  )", &ab()).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.to_string().starts_with("2:3:"));
    }
}
