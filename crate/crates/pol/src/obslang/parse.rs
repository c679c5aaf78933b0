//! Concrete syntax for observation expressions.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor (';' factor)*
//! factor := base ('*' | '^' NUMBER)*
//! base   := '0' | '1' | IDENT ('@' IDENT)? | '(' expr ')'
//! ```
//!
//! `0` is the empty language, `1` the empty word. Identifiers start with a
//! letter or `_` and continue with `[A-Za-z0-9_]`. `e^n` expands to `n`
//! copies of `e` joined by `;` (`e^0` is `1`). Every identifier must name a
//! symbol of the supplied alphabet.

use std::collections::BTreeSet;

use super::{ActionSymbol, ObsError, ObsExpr};

/// Parses `text` against the grammar above, resolving identifiers in
/// `alphabet`. Offsets in errors are byte positions into `text`.
pub fn parse_obs(text: &str, alphabet: &BTreeSet<ActionSymbol>) -> Result<ObsExpr, ObsError> {
    let mut parser = Parser { lexer: Lexer::new(text), alphabet };
    let expr = parser.expr()?;
    match parser.lexer.peek()? {
        (Token::End, _) => Ok(expr),
        (tok, offset) => Err(ObsError::Syntax {
            offset,
            message: format!("unexpected {}", tok.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    Number(usize),
    Plus,
    Semi,
    Star,
    Caret,
    At,
    LParen,
    RParen,
    End,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Number(n) => format!("number `{n}`"),
            Token::Plus => "`+`".into(),
            Token::Semi => "`;`".into(),
            Token::Star => "`*`".into(),
            Token::Caret => "`^`".into(),
            Token::At => "`@`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

pub(crate) struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    peeked: Option<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0, peeked: None }
    }

    pub(crate) fn peek(&mut self) -> Result<(Token, usize), ObsError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(self.peeked.clone().unwrap())
    }

    pub(crate) fn next(&mut self) -> Result<(Token, usize), ObsError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn lex(&mut self) -> Result<(Token, usize), ObsError> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= bytes.len() {
            return Ok((Token::End, start));
        }
        let c = bytes[self.pos] as char;
        let tok = match c {
            '+' => Token::Plus,
            ';' => Token::Semi,
            '*' => Token::Star,
            '^' => Token::Caret,
            '@' => Token::At,
            '(' => Token::LParen,
            ')' => Token::RParen,
            _ if c.is_ascii_digit() => {
                let mut end = self.pos;
                while end < bytes.len() && (bytes[end] as char).is_ascii_digit() {
                    end += 1;
                }
                let n: usize = self.text[self.pos..end].parse().map_err(|_| ObsError::Syntax {
                    offset: start,
                    message: "number out of range".into(),
                })?;
                self.pos = end;
                return Ok((Token::Number(n), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = self.pos;
                while end < bytes.len() {
                    let c = bytes[end] as char;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end += 1;
                    } else {
                        break;
                    }
                }
                let ident = self.text[self.pos..end].to_string();
                self.pos = end;
                return Ok((Token::Ident(ident), start));
            }
            other => {
                return Err(ObsError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    alphabet: &'a BTreeSet<ActionSymbol>,
}

impl<'a> Parser<'a> {
    fn expr(&mut self) -> Result<ObsExpr, ObsError> {
        let mut lhs = self.term()?;
        while matches!(self.lexer.peek()?, (Token::Plus, _)) {
            self.lexer.next()?;
            let rhs = self.term()?;
            lhs = ObsExpr::union(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ObsExpr, ObsError> {
        let mut lhs = self.factor()?;
        while matches!(self.lexer.peek()?, (Token::Semi, _)) {
            self.lexer.next()?;
            let rhs = self.factor()?;
            lhs = ObsExpr::concat(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ObsExpr, ObsError> {
        let mut base = self.base()?;
        loop {
            match self.lexer.peek()? {
                (Token::Star, _) => {
                    self.lexer.next()?;
                    base = ObsExpr::star(base);
                }
                (Token::Caret, _) => {
                    self.lexer.next()?;
                    match self.lexer.next()? {
                        (Token::Number(n), _) => base = repeat_expr(&base, n),
                        (tok, offset) => {
                            return Err(ObsError::Syntax {
                                offset,
                                message: format!("expected number after `^`, found {}", tok.describe()),
                            })
                        }
                    }
                }
                _ => return Ok(base),
            }
        }
    }

    fn base(&mut self) -> Result<ObsExpr, ObsError> {
        match self.lexer.next()? {
            (Token::Number(0), _) => Ok(ObsExpr::Empty),
            (Token::Number(1), _) => Ok(ObsExpr::Epsilon),
            (Token::Number(n), offset) => Err(ObsError::Syntax {
                offset,
                message: format!("expected expression, found number `{n}`"),
            }),
            (Token::Ident(name), offset) => {
                let sym = if matches!(self.lexer.peek()?, (Token::At, _)) {
                    self.lexer.next()?;
                    match self.lexer.next()? {
                        (Token::Ident(tag), _) => {
                            ActionSymbol::with_session(&name, &tag).map_err(|_| ObsError::Syntax {
                                offset,
                                message: format!("invalid symbol `{name}@{tag}`"),
                            })?
                        }
                        (tok, offset) => {
                            return Err(ObsError::Syntax {
                                offset,
                                message: format!("expected session tag after `@`, found {}", tok.describe()),
                            })
                        }
                    }
                } else {
                    ActionSymbol::new(&name).map_err(|_| ObsError::Syntax {
                        offset,
                        message: format!("invalid symbol `{name}`"),
                    })?
                };
                if !self.alphabet.contains(&sym) {
                    return Err(ObsError::UnknownSymbol { offset, token: sym.to_string() });
                }
                Ok(ObsExpr::Atom(sym))
            }
            (Token::LParen, _) => {
                let inner = self.expr()?;
                match self.lexer.next()? {
                    (Token::RParen, _) => Ok(inner),
                    (tok, offset) => Err(ObsError::Syntax {
                        offset,
                        message: format!("expected `)`, found {}", tok.describe()),
                    }),
                }
            }
            (tok, offset) => Err(ObsError::Syntax {
                offset,
                message: format!("expected expression, found {}", tok.describe()),
            }),
        }
    }
}

fn repeat_expr(base: &ObsExpr, n: usize) -> ObsExpr {
    let mut expr = ObsExpr::Epsilon;
    for _ in 0..n {
        expr = match expr {
            ObsExpr::Epsilon => base.clone(),
            e => ObsExpr::concat(e, base.clone()),
        };
    }
    expr
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> BTreeSet<ActionSymbol> {
        [
            ActionSymbol::new("QF").unwrap(),
            ActionSymbol::new("A").unwrap(),
            ActionSymbol::with_session("QF", "s1").unwrap(),
        ]
        .into_iter()
        .collect()
    }

    fn qf() -> ActionSymbol {
        ActionSymbol::new("QF").unwrap()
    }

    #[test]
    fn parses_concatenation() {
        let e = parse_obs("QF;QF", &alphabet()).unwrap();
        assert_eq!(e, ObsExpr::concat(ObsExpr::atom(qf()), ObsExpr::atom(qf())));
    }

    #[test]
    fn parses_star_over_union_with_epsilon() {
        let e = parse_obs("(QF + 1)*", &alphabet()).unwrap();
        assert_eq!(
            e,
            ObsExpr::star(ObsExpr::union(ObsExpr::atom(qf()), ObsExpr::Epsilon))
        );
    }

    #[test]
    fn reports_offset_of_stray_paren() {
        match parse_obs("QF;)", &alphabet()) {
            Err(ObsError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_symbols_outside_the_alphabet() {
        match parse_obs("QF;B", &alphabet()) {
            Err(ObsError::UnknownSymbol { offset, token }) => {
                assert_eq!(offset, 3);
                assert_eq!(token, "B");
            }
            other => panic!("expected unknown symbol, got {other:?}"),
        }
    }

    #[test]
    fn precedence_semi_binds_tighter_than_plus() {
        let e = parse_obs("QF;QF + A", &alphabet()).unwrap();
        let a = ActionSymbol::new("A").unwrap();
        assert_eq!(
            e,
            ObsExpr::union(
                ObsExpr::concat(ObsExpr::atom(qf()), ObsExpr::atom(qf())),
                ObsExpr::atom(a)
            )
        );
    }

    #[test]
    fn star_binds_tightest() {
        let e = parse_obs("QF;A*", &alphabet()).unwrap();
        let a = ActionSymbol::new("A").unwrap();
        assert_eq!(
            e,
            ObsExpr::concat(ObsExpr::atom(qf()), ObsExpr::star(ObsExpr::atom(a)))
        );
    }

    #[test]
    fn power_expands_to_concatenation() {
        let e = parse_obs("QF^3", &alphabet()).unwrap();
        assert_eq!(e, ObsExpr::power(qf(), 3));
        assert_eq!(parse_obs("QF^0", &alphabet()).unwrap(), ObsExpr::Epsilon);
        let e = parse_obs("(QF;A)^2", &alphabet()).unwrap();
        assert!(e.language_contains(
            &["QF", "A", "QF", "A"]
                .iter()
                .map(|s| ActionSymbol::new(s).unwrap())
                .collect()
        ));
    }

    #[test]
    fn session_tagged_symbols_parse() {
        let e = parse_obs("QF@s1", &alphabet()).unwrap();
        assert_eq!(e, ObsExpr::atom(ActionSymbol::with_session("QF", "s1").unwrap()));
        assert!(matches!(
            parse_obs("QF@s2", &alphabet()),
            Err(ObsError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn constants_parse() {
        assert_eq!(parse_obs("0", &alphabet()).unwrap(), ObsExpr::Empty);
        assert_eq!(parse_obs("1", &alphabet()).unwrap(), ObsExpr::Epsilon);
        assert!(matches!(
            parse_obs("2", &alphabet()),
            Err(ObsError::Syntax { offset: 0, .. })
        ));
    }

    #[test]
    fn print_parse_round_trip_up_to_canonical_form() {
        let inputs = ["QF;QF", "(QF + 1)*", "QF^2 + A;QF*", "0 + QF", "(QF;A)*;QF"];
        for input in inputs {
            let parsed = parse_obs(input, &alphabet()).unwrap();
            let reparsed = parse_obs(&parsed.to_string(), &alphabet()).unwrap();
            assert_eq!(parsed.canonicalize(), reparsed.canonicalize(), "input `{input}`");
        }
    }
}
