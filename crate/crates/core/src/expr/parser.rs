//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? integer ('^' exponent)? | '(' '-'? integer ')'
//! atom     := number | 'i' | identifier | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `-x^2` is `-(x^2)`; chained exponents associate to the right.

use std::fmt;

use thiserror::Error;

use super::{Expr, IMAGINARY_UNIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnknownToken(char),
    Unexpected { found: String, expected: String },
    BadNumber(String),
    NonIntegerExponent(String),
    UnknownFunction(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyInput => write!(f, "empty input"),
            Self::UnknownToken(c) => write!(f, "unknown token '{c}'"),
            Self::Unexpected { found, expected } => {
                write!(f, "unexpected {found}, expected {expected}")
            }
            Self::BadNumber(s) => write!(f, "malformed number '{s}'"),
            Self::NonIntegerExponent(s) => write!(f, "exponent must be an integer, got '{s}'"),
            Self::UnknownFunction(s) => write!(f, "unknown function '{s}'"),
        }
    }
}

/// Syntax error with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(s) => format!("number '{s}'"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        let tok = if let Some(t) = single {
            i += 1;
            t
        } else if c.is_ascii_digit() || c == '.' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Number(chars[begin..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[begin..i].iter().collect())
        } else {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::UnknownToken(c),
            });
        };
        column += match &tok {
            Tok::Number(s) | Tok::Ident(s) => s.chars().count(),
            _ => 1,
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::Unexpected {
            found: self.peek().describe(),
            expected: expected.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::mul(vec![acc, rhs]);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::div(acc, rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let n = self.exponent()?;
            return Ok(Expr::pow(base, n));
        }
        Ok(base)
    }

    fn integer_literal(&mut self, negative: bool) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Number(s) => {
                let value: i64 = s
                    .parse()
                    .map_err(|_| self.error_here(ParseErrorKind::NonIntegerExponent(s.clone())))?;
                self.bump();
                Ok(if negative { -value } else { value })
            }
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let (start_line, start_col) = (self.toks[self.pos].line, self.toks[self.pos].column);
        let value = if *self.peek() == Tok::LParen {
            self.bump();
            let negative = *self.peek() == Tok::Minus;
            if negative {
                self.bump();
            }
            let v = self.integer_literal(negative)?;
            self.expect(Tok::RParen)?;
            v
        } else {
            let negative = *self.peek() == Tok::Minus;
            if negative {
                self.bump();
            }
            let base = self.integer_literal(negative)?;
            if *self.peek() == Tok::Caret {
                self.bump();
                let upper = self.exponent()?;
                let upper = u32::try_from(upper).map_err(|_| ParseError {
                    line: start_line,
                    column: start_col,
                    kind: ParseErrorKind::NonIntegerExponent(format!("{base}^{upper}")),
                })?;
                base.checked_pow(upper).unwrap_or(i64::MAX)
            } else {
                base
            }
        };
        i32::try_from(value).map_err(|_| ParseError {
            line: start_line,
            column: start_col,
            kind: ParseErrorKind::NonIntegerExponent(value.to_string()),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Number(s) => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| self.error_here(ParseErrorKind::BadNumber(s.clone())))?;
                self.bump();
                Ok(Expr::real(v))
            }
            Tok::Ident(name) => {
                let here = self.pos;
                self.bump();
                if name == IMAGINARY_UNIT {
                    return Ok(Expr::imaginary_unit());
                }
                if *self.peek() == Tok::LParen {
                    if name != "sqrt" {
                        self.pos = here;
                        return Err(self.error_here(ParseErrorKind::UnknownFunction(name)));
                    }
                    self.bump();
                    let inner = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::sqrt(inner));
                }
                if name == "sqrt" {
                    return Err(self.unexpected("'(' after sqrt"));
                }
                Ok(Expr::var(&name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("an operand")),
        }
    }
}

/// Parses a single expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.len() == 1 {
        return Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::EmptyInput,
        });
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
