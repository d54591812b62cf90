//! Text parser for the epistemic language:
//!
//! ```text
//! φ ::= "true" | "false" | IDENT | "!" φ | φ "&" φ | φ "|" φ | φ "->" φ
//!     | "K[" IDENT "]" φ | "C" φ | "(" φ ")"
//! ```
//!
//! Precedence `!` > `&` > `|` > `->` with right-associative `->`; `K[i]` and
//! `C` bind like `!`. Dynamic modalities are not part of the textual grammar;
//! they only arise programmatically.

use crate::error::{ParseError, Result};
use crate::formula::Formula;
use crate::sig::Signature;

/// Nesting bound for parsed formulas; evaluation recurses on structure, so
/// unbounded input nesting would otherwise exhaust the stack.
const MAX_NESTING: u32 = 256;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    True,
    False,
    Ident(String),
    Knows(String),
    Common,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
}

#[derive(Debug)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1u32;
    let mut col = 1u32;
    while let Some((_, c)) = chars.next() {
        let (tline, tcol) = (line, col);
        let advance = |n: u32, col: &mut u32| *col += n;
        match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => advance(1, &mut col),
            '(' => {
                toks.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
                advance(1, &mut col);
            }
            ')' => {
                toks.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
                advance(1, &mut col);
            }
            '!' => {
                toks.push(Spanned { tok: Tok::Bang, line: tline, col: tcol });
                advance(1, &mut col);
            }
            '&' => {
                toks.push(Spanned { tok: Tok::Amp, line: tline, col: tcol });
                advance(1, &mut col);
            }
            '|' => {
                toks.push(Spanned { tok: Tok::Pipe, line: tline, col: tcol });
                advance(1, &mut col);
            }
            '-' => match chars.next() {
                Some((_, '>')) => {
                    toks.push(Spanned { tok: Tok::Arrow, line: tline, col: tcol });
                    advance(2, &mut col);
                }
                _ => return Err(ParseError::new(tline, tcol, "expected `->` after `-`")),
            },
            c if is_ident_start(c) => {
                let mut ident = String::new();
                ident.push(c);
                advance(1, &mut col);
                while let Some(&(_, nc)) = chars.peek() {
                    if is_ident_start(nc) {
                        ident.push(nc);
                        chars.next();
                        advance(1, &mut col);
                    } else if nc == '-' {
                        // A hyphen continues an identifier only when followed
                        // by another identifier character; otherwise it starts
                        // an arrow.
                        let mut ahead = chars.clone();
                        ahead.next();
                        match ahead.peek() {
                            Some(&(_, c2)) if is_ident_start(c2) => {
                                ident.push('-');
                                ident.push(c2);
                                chars.next();
                                chars.next();
                                advance(2, &mut col);
                            }
                            _ => break,
                        }
                    } else {
                        break;
                    }
                }
                let tok = match ident.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "C" => Tok::Common,
                    "K" if matches!(chars.peek(), Some(&(_, '['))) => {
                        chars.next();
                        advance(1, &mut col);
                        let mut agent = String::new();
                        let mut closed = false;
                        for (_, ac) in chars.by_ref() {
                            advance(1, &mut col);
                            if ac == ']' {
                                closed = true;
                                break;
                            }
                            if !ac.is_whitespace() {
                                agent.push(ac);
                            }
                        }
                        if !closed {
                            return Err(ParseError::new(tline, tcol, "unclosed `K[`"));
                        }
                        if agent.is_empty() {
                            return Err(ParseError::new(tline, tcol, "empty agent in `K[]`"));
                        }
                        Tok::Knows(agent)
                    }
                    _ => Tok::Ident(ident),
                };
                toks.push(Spanned { tok, line: tline, col: tcol });
            }
            other => {
                return Err(ParseError::new(tline, tcol, format!("unexpected character `{other}`")))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
    end_line: u32,
    end_col: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.end_line, self.end_col),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, msg)
    }

    // Lowest precedence: right-associative implication.
    fn implies(&mut self, depth: u32) -> Result<Formula, ParseError> {
        let lhs = self.or(depth)?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.bump();
            let rhs = self.implies(self.check_depth(depth)?)?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self, depth: u32) -> Result<Formula, ParseError> {
        let mut f = self.and(depth)?;
        while matches!(self.peek(), Some(Tok::Pipe)) {
            self.bump();
            let rhs = self.and(self.check_depth(depth)?)?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn and(&mut self, depth: u32) -> Result<Formula, ParseError> {
        let mut f = self.unary(depth)?;
        while matches!(self.peek(), Some(Tok::Amp)) {
            self.bump();
            let rhs = self.unary(self.check_depth(depth)?)?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn check_depth(&self, depth: u32) -> Result<u32, ParseError> {
        if depth >= MAX_NESTING {
            Err(self.err(format!("formula nested deeper than {MAX_NESTING}")))
        } else {
            Ok(depth + 1)
        }
    }

    fn unary(&mut self, depth: u32) -> Result<Formula, ParseError> {
        let depth = self.check_depth(depth)?;
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::not(self.unary(depth)?))
            }
            Some(Tok::Common) => {
                self.bump();
                Ok(Formula::common(self.unary(depth)?))
            }
            Some(Tok::Knows(_)) => {
                let (line, col) = self.here();
                let Some(Tok::Knows(agent)) = self.bump() else { unreachable!() };
                let id = self
                    .sig
                    .agent(&agent)
                    .ok_or_else(|| ParseError::new(line, col, format!("unknown agent `{agent}`")))?;
                Ok(Formula::knows(id, self.unary(depth)?))
            }
            _ => self.primary(depth),
        }
    }

    fn primary(&mut self, depth: u32) -> Result<Formula, ParseError> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Tok::True) => Ok(Formula::Top),
            Some(Tok::False) => Ok(Formula::Bot),
            Some(Tok::Ident(name)) => {
                let p = self
                    .sig
                    .prop(&name)
                    .ok_or_else(|| {
                        ParseError::new(line, col, format!("unknown proposition `{name}`"))
                    })?;
                Ok(Formula::Atom(p))
            }
            Some(Tok::LParen) => {
                let f = self.implies(self.check_depth(depth)?)?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(f),
                    _ => Err(ParseError::new(line, col, "unclosed `(`")),
                }
            }
            Some(other) => Err(ParseError::new(line, col, format!("unexpected token {other:?}"))),
            None => Err(ParseError::new(line, col, "unexpected end of formula")),
        }
    }
}

/// Parses a formula against a signature, resolving all identifiers.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let (end_line, end_col) = text.lines().enumerate().last().map_or((1, 1), |(i, l)| {
        (i as u32 + 1, l.chars().count() as u32 + 1)
    });
    let mut p = Parser { toks, pos: 0, sig, end_line, end_col };
    let f = p.implies(0)?;
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula as F;
    use crate::sig::Signature;

    fn sig() -> std::sync::Arc<Signature> {
        Signature::new(["anne", "bob"], ["m", "h"]).unwrap()
    }

    #[test]
    fn knows_binds_tighter_than_and() {
        let sig = sig();
        let f = parse_formula("K[anne] m & !K[bob] m", &sig).unwrap();
        let anne = sig.agent("anne").unwrap();
        let bob = sig.agent("bob").unwrap();
        let m = sig.prop("m").unwrap();
        assert_eq!(
            f,
            F::and(F::knows(anne, F::Atom(m)), F::not(F::knows(bob, F::Atom(m))))
        );
    }

    #[test]
    fn common_over_disjunction() {
        let sig = sig();
        let f = parse_formula("C (h | !h)", &sig).unwrap();
        let h = sig.prop("h").unwrap();
        assert_eq!(f, F::common(F::or(F::Atom(h), F::not(F::Atom(h)))));
    }

    #[test]
    fn arrow_right_associative() {
        let sig = sig();
        let f = parse_formula("m -> h -> m", &sig).unwrap();
        let m = sig.prop("m").unwrap();
        let h = sig.prop("h").unwrap();
        assert_eq!(
            f,
            F::implies(F::Atom(m), F::implies(F::Atom(h), F::Atom(m)))
        );
    }

    #[test]
    fn precedence_chain() {
        let sig = sig();
        // ! > & > | > ->
        let f = parse_formula("!m & h | m -> h", &sig).unwrap();
        let m = sig.prop("m").unwrap();
        let h = sig.prop("h").unwrap();
        assert_eq!(
            f,
            F::implies(
                F::or(F::and(F::not(F::Atom(m)), F::Atom(h)), F::Atom(m)),
                F::Atom(h)
            )
        );
    }

    #[test]
    fn error_carries_position() {
        let sig = sig();
        let err = parse_formula("m & unknown", &sig).unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        assert!(err.msg.contains("unknown"));
        let err = parse_formula("m &", &sig).unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn hyphen_idents_and_arrows_coexist() {
        let sig = Signature::new(["1", "2"], ["at-1", "for-1"]).unwrap();
        let f = parse_formula("for-1 -> at-1", &sig).unwrap();
        let at = sig.prop("at-1").unwrap();
        let fo = sig.prop("for-1").unwrap();
        assert_eq!(f, F::implies(F::Atom(fo), F::Atom(at)));
    }

    #[test]
    fn rejects_runaway_nesting() {
        let sig = sig();
        let text = format!("{}m", "!".repeat(4000));
        assert!(parse_formula(&text, &sig).is_err());
    }
}
