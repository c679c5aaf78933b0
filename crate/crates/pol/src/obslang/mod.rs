//! Observation expressions and their language semantics.
//!
//! An observation expression is a regular expression over a finite action
//! alphabet. The engine never builds automata: membership, emptiness of
//! residuals, and language equality are all computed through symbol
//! derivatives kept in a canonical form so that derivative closures stay
//! finite.

mod parse;

pub use parse::parse_obs;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

/// Longest word length `enumerate_words` will materialize.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObsError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{token}` at offset {offset}")]
    UnknownSymbol { offset: usize, token: String },
    #[error("word enumeration limit exceeded: requested {requested}, limit {limit}")]
    EnumerationLimit { requested: usize, limit: usize },
    #[error("invalid action symbol `{0}`")]
    InvalidSymbol(String),
}

fn is_ident(tok: &str) -> bool {
    !tok.is_empty() && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// One action of the alphabet, optionally tagged with the session it
/// belongs to (`QF@s2`). Two symbols are equal iff both name and tag match.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSymbol {
    name: String,
    session: Option<String>,
}

impl ActionSymbol {
    pub fn new(name: &str) -> Result<Self, ObsError> {
        if !is_ident(name) {
            return Err(ObsError::InvalidSymbol(name.to_string()));
        }
        Ok(ActionSymbol { name: name.to_string(), session: None })
    }

    pub fn with_session(name: &str, session: &str) -> Result<Self, ObsError> {
        if !is_ident(name) || !is_ident(session) {
            return Err(ObsError::InvalidSymbol(format!("{name}@{session}")));
        }
        Ok(ActionSymbol { name: name.to_string(), session: Some(session.to_string()) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn session(&self) -> Option<&str> {
        self.session.as_deref()
    }
}

impl fmt::Display for ActionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.session {
            Some(s) => write!(f, "{}@{}", self.name, s),
            None => write!(f, "{}", self.name),
        }
    }
}

/// A finite observation string; the empty word is the unit of concatenation.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsWord(pub Vec<ActionSymbol>);

impl ObsWord {
    pub fn empty() -> Self {
        ObsWord(Vec::new())
    }

    pub fn single(sym: ActionSymbol) -> Self {
        ObsWord(vec![sym])
    }

    /// `sym` repeated `n` times.
    pub fn repeated(sym: ActionSymbol, n: usize) -> Self {
        ObsWord(vec![sym; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[ActionSymbol] {
        &self.0
    }

    pub fn concat(&self, other: &ObsWord) -> ObsWord {
        let mut syms = self.0.clone();
        syms.extend(other.0.iter().cloned());
        ObsWord(syms)
    }
}

impl fmt::Display for ObsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromIterator<ActionSymbol> for ObsWord {
    fn from_iter<I: IntoIterator<Item = ActionSymbol>>(iter: I) -> Self {
        ObsWord(iter.into_iter().collect())
    }
}

/// Observation expression over an action alphabet.
///
/// `Empty` denotes the empty language (written `0`; the empty action of
/// the logic), `Epsilon` the language containing only the empty word
/// (written `1`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObsExpr {
    Empty,
    Epsilon,
    Atom(ActionSymbol),
    Concat(Box<ObsExpr>, Box<ObsExpr>),
    Union(Box<ObsExpr>, Box<ObsExpr>),
    Star(Box<ObsExpr>),
}

impl ObsExpr {
    pub fn atom(sym: ActionSymbol) -> Self {
        ObsExpr::Atom(sym)
    }

    pub fn concat(lhs: ObsExpr, rhs: ObsExpr) -> Self {
        ObsExpr::Concat(Box::new(lhs), Box::new(rhs))
    }

    pub fn union(lhs: ObsExpr, rhs: ObsExpr) -> Self {
        ObsExpr::Union(Box::new(lhs), Box::new(rhs))
    }

    pub fn star(inner: ObsExpr) -> Self {
        ObsExpr::Star(Box::new(inner))
    }

    /// `sym` concatenated `n` times; `n = 0` gives `Epsilon`.
    pub fn power(sym: ActionSymbol, n: usize) -> Self {
        let mut expr = ObsExpr::Epsilon;
        for _ in 0..n {
            expr = match expr {
                ObsExpr::Epsilon => ObsExpr::Atom(sym.clone()),
                e => ObsExpr::concat(e, ObsExpr::Atom(sym.clone())),
            };
        }
        expr
    }

    /// Does the language contain the empty word?
    pub fn nullable(&self) -> bool {
        match self {
            ObsExpr::Empty => false,
            ObsExpr::Epsilon => true,
            ObsExpr::Atom(_) => false,
            ObsExpr::Concat(l, r) => l.nullable() && r.nullable(),
            ObsExpr::Union(l, r) => l.nullable() || r.nullable(),
            ObsExpr::Star(_) => true,
        }
    }

    /// Structural emptiness test: true iff the language is empty.
    pub fn is_empty_language(&self) -> bool {
        match self {
            ObsExpr::Empty => true,
            ObsExpr::Epsilon | ObsExpr::Atom(_) | ObsExpr::Star(_) => false,
            ObsExpr::Concat(l, r) => l.is_empty_language() || r.is_empty_language(),
            ObsExpr::Union(l, r) => l.is_empty_language() && r.is_empty_language(),
        }
    }

    /// Symbols occurring in the expression.
    pub fn atoms(&self) -> BTreeSet<ActionSymbol> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<ActionSymbol>) {
        match self {
            ObsExpr::Empty | ObsExpr::Epsilon => {}
            ObsExpr::Atom(a) => {
                out.insert(a.clone());
            }
            ObsExpr::Concat(l, r) | ObsExpr::Union(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            ObsExpr::Star(e) => e.collect_atoms(out),
        }
    }

    /// The derivative by one symbol: an expression for
    /// `{ w | sym.w  in  L(self) }`, returned in canonical form.
    pub fn derivative(&self, sym: &ActionSymbol) -> ObsExpr {
        match self {
            ObsExpr::Empty | ObsExpr::Epsilon => ObsExpr::Empty,
            ObsExpr::Atom(a) => {
                if a == sym {
                    ObsExpr::Epsilon
                } else {
                    ObsExpr::Empty
                }
            }
            ObsExpr::Concat(l, r) => {
                let left = canon_concat(l.derivative(sym), r.as_ref().clone());
                if l.nullable() {
                    canon_union(left, r.derivative(sym))
                } else {
                    left
                }
            }
            ObsExpr::Union(l, r) => canon_union(l.derivative(sym), r.derivative(sym)),
            ObsExpr::Star(e) => canon_concat(e.derivative(sym), self.clone()),
        }
    }

    /// Residuation by a word: fold of [`ObsExpr::derivative`] over its
    /// symbols. The result's language is `{ w | word.w  in  L(self) }`.
    pub fn residual(&self, word: &ObsWord) -> ObsExpr {
        let mut expr = self.canonicalize();
        for sym in word.symbols() {
            expr = expr.derivative(sym);
        }
        expr
    }

    /// Membership test by iterated derivatives and a final nullability check.
    pub fn language_contains(&self, word: &ObsWord) -> bool {
        self.residual(word).nullable()
    }

    /// Is `word` a prefix of some member of the language?
    pub fn in_init(&self, word: &ObsWord) -> bool {
        !self.residual(word).is_empty_language()
    }

    /// Rewrites to the canonical similarity form: unit and absorption laws
    /// for `+`/`;`, union flattened, sorted and deduplicated, and nested
    /// stars collapsed. The language is preserved.
    pub fn canonicalize(&self) -> ObsExpr {
        match self {
            ObsExpr::Empty => ObsExpr::Empty,
            ObsExpr::Epsilon => ObsExpr::Epsilon,
            ObsExpr::Atom(a) => ObsExpr::Atom(a.clone()),
            ObsExpr::Concat(l, r) => canon_concat(l.canonicalize(), r.canonicalize()),
            ObsExpr::Union(l, r) => canon_union(l.canonicalize(), r.canonicalize()),
            ObsExpr::Star(e) => canon_star(e.canonicalize()),
        }
    }

    /// Exactly the members of the language with length at most `max_len`,
    /// computed by direct recursion on the language clauses (no derivatives
    /// involved, so this can serve as an independent oracle).
    pub fn enumerate_words(&self, max_len: usize) -> Result<BTreeSet<ObsWord>, ObsError> {
        if max_len > ENUMERATION_LIMIT {
            return Err(ObsError::EnumerationLimit { requested: max_len, limit: ENUMERATION_LIMIT });
        }
        Ok(self.enumerate_unchecked(max_len))
    }

    fn enumerate_unchecked(&self, max_len: usize) -> BTreeSet<ObsWord> {
        match self {
            ObsExpr::Empty => BTreeSet::new(),
            ObsExpr::Epsilon => [ObsWord::empty()].into_iter().collect(),
            ObsExpr::Atom(a) => {
                if max_len >= 1 {
                    [ObsWord::single(a.clone())].into_iter().collect()
                } else {
                    BTreeSet::new()
                }
            }
            ObsExpr::Concat(l, r) => {
                let left = l.enumerate_unchecked(max_len);
                let mut out = BTreeSet::new();
                for v in &left {
                    for w in r.enumerate_unchecked(max_len - v.len()) {
                        out.insert(v.concat(&w));
                    }
                }
                out
            }
            ObsExpr::Union(l, r) => {
                let mut out = l.enumerate_unchecked(max_len);
                out.extend(r.enumerate_unchecked(max_len));
                out
            }
            ObsExpr::Star(e) => {
                // Fixpoint of prefixing with one more block; the length
                // cutoff makes it terminate even for nullable bodies.
                let blocks = e.enumerate_unchecked(max_len);
                let mut out: BTreeSet<ObsWord> = [ObsWord::empty()].into_iter().collect();
                loop {
                    let mut grew = false;
                    let snapshot: Vec<ObsWord> = out.iter().cloned().collect();
                    for v in &snapshot {
                        for b in &blocks {
                            if v.len() + b.len() <= max_len {
                                grew |= out.insert(v.concat(b));
                            }
                        }
                    }
                    if !grew {
                        return out;
                    }
                }
            }
        }
    }

    /// Language equality, decided by a bisimulation over paired derivative
    /// closures of canonical forms.
    pub fn language_equal(&self, other: &ObsExpr) -> bool {
        let mut seen: HashSet<(ObsExpr, ObsExpr)> = HashSet::new();
        let mut stack = vec![(self.canonicalize(), other.canonicalize())];
        while let Some((a, b)) = stack.pop() {
            if a == b || !seen.insert((a.clone(), b.clone())) {
                continue;
            }
            if a.nullable() != b.nullable() {
                return false;
            }
            let mut alphabet = a.atoms();
            alphabet.extend(b.atoms());
            for sym in &alphabet {
                stack.push((a.derivative(sym), b.derivative(sym)));
            }
        }
        true
    }
}

impl fmt::Display for ObsExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: union 0, concat 1, star 2.
        fn go(e: &ObsExpr, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match e {
                ObsExpr::Union(_, _) => 0,
                ObsExpr::Concat(_, _) => 1,
                _ => 2,
            };
            let parens = prec < parent;
            if parens {
                write!(f, "(")?;
            }
            match e {
                ObsExpr::Empty => write!(f, "0")?,
                ObsExpr::Epsilon => write!(f, "1")?,
                ObsExpr::Atom(a) => write!(f, "{a}")?,
                ObsExpr::Concat(l, r) => {
                    go(l, 1, f)?;
                    write!(f, ";")?;
                    go(r, 1, f)?;
                }
                ObsExpr::Union(l, r) => {
                    go(l, 0, f)?;
                    write!(f, " + ")?;
                    go(r, 0, f)?;
                }
                ObsExpr::Star(inner) => {
                    go(inner, 2, f)?;
                    write!(f, "*")?;
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

fn canon_concat(l: ObsExpr, r: ObsExpr) -> ObsExpr {
    match (l, r) {
        (ObsExpr::Empty, _) | (_, ObsExpr::Empty) => ObsExpr::Empty,
        (ObsExpr::Epsilon, r) => r,
        (l, ObsExpr::Epsilon) => l,
        (l, r) => ObsExpr::concat(l, r),
    }
}

fn canon_union(l: ObsExpr, r: ObsExpr) -> ObsExpr {
    let mut leaves = BTreeSet::new();
    collect_union_leaves(l, &mut leaves);
    collect_union_leaves(r, &mut leaves);
    let mut iter = leaves.into_iter().rev();
    match iter.next() {
        None => ObsExpr::Empty,
        Some(last) => iter.fold(last, |acc, e| ObsExpr::union(e, acc)),
    }
}

fn collect_union_leaves(e: ObsExpr, out: &mut BTreeSet<ObsExpr>) {
    match e {
        ObsExpr::Empty => {}
        ObsExpr::Union(l, r) => {
            collect_union_leaves(*l, out);
            collect_union_leaves(*r, out);
        }
        other => {
            out.insert(other);
        }
    }
}

fn canon_star(e: ObsExpr) -> ObsExpr {
    match e {
        s @ ObsExpr::Star(_) => s,
        other => ObsExpr::star(other),
    }
}
