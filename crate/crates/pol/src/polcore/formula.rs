//! POL formulas: atoms, boolean connectives, knowledge, and the
//! observation box `[pi]`.
//!
//! Concrete syntax: `T`, atom tokens (`m_a`), `!f`, `f & g`, `f | g`,
//! `K(a, f)`, `[pi] f` with `pi` in the observation-expression syntax.
//! `!` binds tighter than `&`, which binds tighter than `|`; `K` and
//! `[...]` are prefix operators at the same level as `!`.

use std::collections::BTreeSet;
use std::fmt;

use crate::obslang::{self, ActionSymbol, ObsError, ObsExpr};

use super::{Agent, Prop};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Atom(Prop),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Knows(Agent, Box<Formula>),
    Box(ObsExpr, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Prop::new(name))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// Material implication, encoded as `!l | r`.
    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::or(Formula::not(l), r)
    }

    /// Biconditional, encoded as a conjunction of two implications.
    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(
            Formula::implies(l.clone(), r.clone()),
            Formula::implies(r, l),
        )
    }

    pub fn knows(agent: Agent, f: Formula) -> Self {
        Formula::Knows(agent, Box::new(f))
    }

    pub fn boxed(pi: ObsExpr, f: Formula) -> Self {
        Formula::Box(pi, Box::new(f))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: or 0, and 1, unary 2.
        fn go(e: &Formula, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match e {
                Formula::Or(_, _) => 0,
                Formula::And(_, _) => 1,
                _ => 2,
            };
            let parens = prec < parent;
            if parens {
                write!(f, "(")?;
            }
            match e {
                Formula::Top => write!(f, "T")?,
                Formula::Atom(p) => write!(f, "{p}")?,
                Formula::Not(inner) => {
                    write!(f, "!")?;
                    go(inner, 2, f)?;
                }
                Formula::And(l, r) => {
                    go(l, 1, f)?;
                    write!(f, " & ")?;
                    go(r, 1, f)?;
                }
                Formula::Or(l, r) => {
                    go(l, 0, f)?;
                    write!(f, " | ")?;
                    go(r, 0, f)?;
                }
                Formula::Knows(a, inner) => {
                    write!(f, "K({a}, ")?;
                    go(inner, 0, f)?;
                    write!(f, ")")?;
                }
                Formula::Box(pi, inner) => {
                    write!(f, "[{pi}] ")?;
                    go(inner, 2, f)?;
                }
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// Parses a formula; observation expressions inside `[...]` are resolved
/// against `alphabet`.
pub fn parse_formula(text: &str, alphabet: &BTreeSet<ActionSymbol>) -> Result<Formula, ObsError> {
    let mut p = FormulaParser { text, pos: 0, alphabet };
    let f = p.or_level()?;
    p.skip_ws();
    if p.pos < p.text.len() {
        return Err(ObsError::Syntax {
            offset: p.pos,
            message: format!("unexpected `{}`", &p.text[p.pos..p.pos + 1]),
        });
    }
    Ok(f)
}

struct FormulaParser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a BTreeSet<ActionSymbol>,
}

impl<'a> FormulaParser<'a> {
    fn skip_ws(&mut self) {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> Result<(), ObsError> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += found.len_utf8();
                Ok(())
            }
            found => Err(ObsError::Syntax {
                offset: self.pos,
                message: format!(
                    "expected `{c}`, found {}",
                    found.map_or("end of input".to_string(), |f| format!("`{f}`"))
                ),
            }),
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ObsError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        while end < bytes.len() {
            let c = bytes[end] as char;
            if c.is_ascii_alphanumeric() || c == '_' {
                end += 1;
            } else {
                break;
            }
        }
        if end == start {
            return Err(ObsError::Syntax {
                offset: start,
                message: "expected identifier".to_string(),
            });
        }
        self.pos = end;
        Ok((self.text[start..end].to_string(), start))
    }

    fn or_level(&mut self) -> Result<Formula, ObsError> {
        let mut lhs = self.and_level()?;
        while self.peek() == Some('|') {
            self.eat('|')?;
            let rhs = self.and_level()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_level(&mut self) -> Result<Formula, ObsError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some('&') {
            self.eat('&')?;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ObsError> {
        match self.peek() {
            Some('!') => {
                self.eat('!')?;
                Ok(Formula::not(self.unary()?))
            }
            Some('(') => {
                self.eat('(')?;
                let inner = self.or_level()?;
                self.eat(')')?;
                Ok(inner)
            }
            Some('[') => {
                self.eat('[')?;
                let start = self.pos;
                let close = self.text[self.pos..].find(']').ok_or(ObsError::Syntax {
                    offset: start,
                    message: "unterminated `[`".to_string(),
                })? + self.pos;
                let pi = obslang::parse_obs(&self.text[start..close], self.alphabet).map_err(
                    |e| match e {
                        ObsError::Syntax { offset, message } => {
                            ObsError::Syntax { offset: offset + start, message }
                        }
                        ObsError::UnknownSymbol { offset, token } => {
                            ObsError::UnknownSymbol { offset: offset + start, token }
                        }
                        other => other,
                    },
                )?;
                self.pos = close + 1;
                Ok(Formula::boxed(pi, self.unary()?))
            }
            Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                let (name, offset) = self.ident()?;
                match name.as_str() {
                    "T" => Ok(Formula::Top),
                    "K" => {
                        self.eat('(')?;
                        let (agent, _) = self.ident()?;
                        self.eat(',')?;
                        let body = self.or_level()?;
                        self.eat(')')?;
                        Ok(Formula::knows(Agent::new(&agent), body))
                    }
                    _ if name.chars().next().map_or(false, |c| c.is_ascii_digit()) => {
                        Err(ObsError::Syntax {
                            offset,
                            message: format!("atom `{name}` may not start with a digit"),
                        })
                    }
                    _ => Ok(Formula::atom(&name)),
                }
            }
            found => Err(ObsError::Syntax {
                offset: self.pos,
                message: format!(
                    "expected formula, found {}",
                    found.map_or("end of input".to_string(), |f| format!("`{f}`"))
                ),
            }),
        }
    }
}
