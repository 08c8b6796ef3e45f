//! Recursive-descent parser for the HyperLTL concrete syntax.
//!
//! Grammar (quantifiers bind weakest, `U`/`W` and `->`/`<->` associate to
//! the right, `!`/`X`/`F`/`G` bind tightest):
//!
//! ```text
//! formula := quant* body ;  quant := ("forall"|"exists") IDENT "." ;
//! body := iff ; iff := impl ("<->" impl)* ; impl := or ("->" or)* ;
//! or := and ("|" and)* ; and := unt ("&" unt)* ;
//! unt := un (("U"|"W") unt)? ; un := ("!"|"X"|"F"|"G") un | atom ;
//! atom := "true" | "false" | IDENT "@" IDENT | "(" body ")"
//! ```
//!
//! `U`, `W`, `X`, `F`, `G`, `true`, `false`, `forall`, and `exists` are
//! keywords and cannot be used as proposition or trace variable names.
//! `false` normalizes to `!true`.

use super::{
    FormulaError, HyperFormula, LtlBody, Prop, Quantifier, QuantifierPrefix, TraceVar,
};

/// Position-annotated parse failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unbound trace variable `{var}` at offset {offset}")]
    UnboundVariable { var: String, offset: usize },
    #[error("duplicate trace variable `{var}` at offset {offset}")]
    DuplicateVariable { var: String, offset: usize },
    #[error("{source} (at offset {offset})")]
    Name {
        source: FormulaError,
        offset: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Forall,
    Exists,
    True,
    False,
    Until,
    WeakUntil,
    Next,
    Eventually,
    Globally,
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    LParen,
    RParen,
    Dot,
    At,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            Tok::Forall => "`forall`".to_string(),
            Tok::Exists => "`exists`".to_string(),
            Tok::True => "`true`".to_string(),
            Tok::False => "`false`".to_string(),
            Tok::Until => "`U`".to_string(),
            Tok::WeakUntil => "`W`".to_string(),
            Tok::Next => "`X`".to_string(),
            Tok::Eventually => "`F`".to_string(),
            Tok::Globally => "`G`".to_string(),
            Tok::Bang => "`!`".to_string(),
            Tok::Amp => "`&`".to_string(),
            Tok::Pipe => "`|`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Iff => "`<->`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::At => "`@`".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            '@' => {
                i += 1;
                Tok::At
            }
            '!' => {
                i += 1;
                Tok::Bang
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '|' => {
                i += 1;
                Tok::Pipe
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(ParseError::Syntax {
                        offset: start,
                        expected: "`->`".to_string(),
                        found: format!("`{c}`"),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 3;
                    Tok::Iff
                } else {
                    return Err(ParseError::Syntax {
                        offset: start,
                        expected: "`<->`".to_string(),
                        found: format!("`{c}`"),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_ascii_alphanumeric() || d == '_' {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[i..j];
                i = j;
                match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "U" => Tok::Until,
                    "W" => Tok::WeakUntil,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Globally,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "a token".to_string(),
                    found: format!("`{other}`"),
                })
            }
        };
        toks.push((tok, start));
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    prefix: Vec<(Quantifier, TraceVar)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Ident(s) => Ok((s, offset)),
            other => Err(ParseError::Syntax {
                offset,
                expected: what.to_string(),
                found: other.describe(),
            }),
        }
    }

    fn formula(&mut self) -> Result<HyperFormula, ParseError> {
        loop {
            let kind = match self.peek() {
                Tok::Forall => Quantifier::Forall,
                Tok::Exists => Quantifier::Exists,
                _ => break,
            };
            self.bump();
            let (name, offset) = self.ident("a trace variable")?;
            let var = TraceVar::new(&name).map_err(|source| ParseError::Name { source, offset })?;
            if self.prefix.iter().any(|(_, v)| *v == var) {
                return Err(ParseError::DuplicateVariable { var: name, offset });
            }
            self.expect(Tok::Dot)?;
            self.prefix.push((kind, var));
        }
        if self.prefix.is_empty() {
            return Err(self.unexpected("`forall` or `exists`"));
        }
        let body = self.iff()?;
        self.expect(Tok::Eof)?;
        let prefix = QuantifierPrefix::new(std::mem::take(&mut self.prefix)).expect("checked");
        Ok(HyperFormula { prefix, body })
    }

    fn iff(&mut self) -> Result<LtlBody, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            Ok(LtlBody::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<LtlBody, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(LtlBody::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<LtlBody, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = LtlBody::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<LtlBody, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.until()?;
            lhs = LtlBody::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlBody, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                let rhs = self.until()?;
                Ok(LtlBody::until(lhs, rhs))
            }
            Tok::WeakUntil => {
                self.bump();
                let rhs = self.until()?;
                Ok(LtlBody::weak_until(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<LtlBody, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(LtlBody::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(LtlBody::next(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(LtlBody::eventually(self.unary()?))
            }
            Tok::Globally => {
                self.bump();
                Ok(LtlBody::globally(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<LtlBody, ParseError> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(LtlBody::True)
            }
            Tok::False => {
                self.bump();
                Ok(LtlBody::not(LtlBody::True))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) => {
                let (prop_name, prop_offset) = self.ident("a proposition")?;
                let prop = Prop::new(&prop_name).map_err(|source| ParseError::Name {
                    source,
                    offset: prop_offset,
                })?;
                self.expect(Tok::At)?;
                let (var_name, var_offset) = self.ident("a trace variable")?;
                let var = TraceVar::new(&var_name).map_err(|source| ParseError::Name {
                    source,
                    offset: var_offset,
                })?;
                if !self.prefix.iter().any(|(_, v)| *v == var) {
                    return Err(ParseError::UnboundVariable {
                        var: var_name,
                        offset: var_offset,
                    });
                }
                Ok(LtlBody::Atom(prop, var))
            }
            _ => Err(self.unexpected("`true`, `false`, `(`, or a proposition")),
        }
    }
}

/// Parses the concrete syntax into a closed [`HyperFormula`].
pub fn parse_formula(text: &str) -> Result<HyperFormula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        prefix: Vec::new(),
    };
    parser.formula()
}
