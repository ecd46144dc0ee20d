//! Expression syntax.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' sum (',' sum)* ')' | '(' sum ')'
//! ```

use std::fmt;
use std::ops::Range;

use num_rational::BigRational;
use tss_core::constants::parse_rational;

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Number(BigRational),
    /// `x`, `e` or `lN`.
    Name(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// A node with the byte range it was parsed from.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Range<usize>,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(q) => write!(f, "{q}"),
            ExprKind::Name(n) => f.write_str(n),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExprKind::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigRational),
    Name(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(q) => write!(f, "number {q}"),
            Token::Name(n) => write!(f, "name {n:?}"),
            Token::Op(c) => write!(f, "'{c}'"),
            Token::LParen => f.write_str("'('"),
            Token::RParen => f.write_str("')'"),
            Token::Comma => f.write_str("','"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, Range<usize>)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let token = if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            let q = parse_rational(lit).ok_or_else(|| SyntaxError {
                offset: start,
                message: format!("malformed number {lit:?}"),
            })?;
            Token::Number(q)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Token::Name(text[start..i].to_string())
        } else {
            i += c.len_utf8().max(1);
            match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                _ => {
                    let ch = text[start..].chars().next().unwrap();
                    return Err(SyntaxError { offset: start, message: format!("unexpected character {ch:?}") });
                }
            }
        };
        out.push((token, start..i));
    }
    out.push((Token::End, text.len()..text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, Range<usize>)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Range<usize> {
        self.tokens[self.pos].1.clone()
    }

    fn bump(&mut self) -> (Token, Range<usize>) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        SyntaxError {
            offset: self.span().start,
            message: format!("expected {wanted}, found {}", self.peek()),
        }
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        let span = a.span.start..b.span.end;
        Expr { kind: ExprKind::Binary(op, Box::new(a), Box::new(b)), span }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.product()?;
        loop {
            let op = match self.peek() {
                Token::Op('+') => BinOp::Add,
                Token::Op('-') => BinOp::Sub,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.product()?;
            acc = Self::binary(op, acc, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Op('*') => BinOp::Mul,
                Token::Op('/') => BinOp::Div,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.unary()?;
            acc = Self::binary(op, acc, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if *self.peek() == Token::Op('-') {
            let (_, span) = self.bump();
            let inner = self.unary()?;
            let span = span.start..inner.span.end;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if *self.peek() != Token::Op('^') {
            return Ok(base);
        }
        self.bump();
        let exponent = self.unary()?;
        Ok(Self::binary(BinOp::Pow, base, exponent))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let span = self.span();
        match self.peek().clone() {
            Token::Number(q) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Number(q), span })
            }
            Token::Name(name) => {
                self.bump();
                if *self.peek() != Token::LParen {
                    return Ok(Expr { kind: ExprKind::Name(name), span });
                }
                self.bump();
                let mut args = vec![self.sum()?];
                while *self.peek() == Token::Comma {
                    self.bump();
                    args.push(self.sum()?);
                }
                if *self.peek() != Token::RParen {
                    return Err(self.unexpected("',' or ')'"));
                }
                let (_, close) = self.bump();
                Ok(Expr { kind: ExprKind::Call(name, args), span: span.start..close.end })
            }
            Token::LParen => {
                self.bump();
                let mut inner = self.sum()?;
                if *self.peek() != Token::RParen {
                    return Err(self.unexpected("')'"));
                }
                let (_, close) = self.bump();
                inner.span = span.start..close.end;
                Ok(inner)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let e = p.sum()?;
    if *p.peek() != Token::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
