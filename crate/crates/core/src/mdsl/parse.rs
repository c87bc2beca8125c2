use std::fmt;

use thiserror::Error;

use super::Expr;

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    Lexical(String),
    UnexpectedToken { found: String, expected: String },
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, found: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Lexical(msg) => write!(f, "lexical error: {msg}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected {found}, expected {expected}")
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::Arity { name, expected, found } => {
                write!(f, "`{name}` takes {expected} argument(s), got {found}")
            }
        }
    }
}

/// A parse failure at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Imag(v) => format!("imaginary literal {v}i"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let err = |msg: String| ParseError { kind: ParseErrorKind::Lexical(msg), line: tl, col: tc };
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| err(format!("malformed number `{text}`")))?;
            if !value.is_finite() {
                return Err(err(format!("number `{text}` is out of range")));
            }
            let imaginary = i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|d| d.is_alphanumeric());
            if imaginary {
                i += 1;
            }
            col += i - start;
            out.push(Spanned { tok: if imaginary { Tok::Imag(value) } else { Tok::Num(value) }, line: tl, col: tc });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        if "+-*/^(),".contains(c) {
            out.push(Spanned { tok: Tok::Op(c), line: tl, col: tc });
            col += 1;
            i += 1;
            continue;
        }
        return Err(err(format!("unexpected character `{c}`")));
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

/// Sums, differences and negations of literals collapse into one literal.
fn fold(e: Expr) -> Expr {
    let lit = |re: f64, im: f64| Expr::Lit { re: re + 0.0, im: im + 0.0 };
    match e {
        Expr::Neg(a) => match *a {
            Expr::Lit { re, im } => lit(-re, -im),
            a => Expr::Neg(Box::new(a)),
        },
        Expr::Add(a, b) => match (*a, *b) {
            (Expr::Lit { re: ar, im: ai }, Expr::Lit { re: br, im: bi }) => lit(ar + br, ai + bi),
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        },
        Expr::Sub(a, b) => match (*a, *b) {
            (Expr::Lit { re: ar, im: ai }, Expr::Lit { re: br, im: bi }) => lit(ar - br, ai - bi),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        },
        e => e,
    }
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = self.peek();
        ParseError { kind, line: t.line, col: t.col }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::UnexpectedToken {
            found: self.peek().tok.describe(),
            expected: expected.to_string(),
        })
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op(c @ ('+' | '-')) => c,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = fold(if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            });
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op(c @ ('*' | '/')) => c,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.power()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.unary()?;
        while self.peek().tok == Tok::Op('^') {
            self.bump();
            let t = self.peek().clone();
            match t.tok {
                Tok::Num(v) if v.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&v) => {
                    self.bump();
                    base = Expr::Pow(Box::new(base), v as u32);
                }
                _ => return Err(self.unexpected("a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(fold(Expr::Neg(Box::new(inner))));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::lit(v, 0.0))
            }
            Tok::Imag(v) => {
                self.bump();
                Ok(Expr::lit(0.0, v))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name, t.line, t.col)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn identifier(&mut self, name: String, line: usize, col: usize) -> Result<Expr, ParseError> {
        if name == "i" {
            return Ok(Expr::lit(0.0, 1.0));
        }
        if let Some(idx) = name.strip_prefix('z') {
            if let Ok(k) = idx.parse::<usize>() {
                if k >= 1 && !idx.starts_with('0') {
                    return Ok(Expr::Var(k));
                }
            }
        }
        let build: fn(Box<Expr>) -> Expr = match name.as_str() {
            "exp" => Expr::Exp,
            "log" => Expr::Log,
            "conj" => Expr::Conj,
            _ => return Err(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), line, col }),
        };
        self.expect_op('(')?;
        let mut args = Vec::new();
        if self.peek().tok != Tok::Op(')') {
            args.push(self.expr()?);
            while self.peek().tok == Tok::Op(',') {
                self.bump();
                args.push(self.expr()?);
            }
        }
        self.expect_op(')')?;
        if args.len() != 1 {
            return Err(ParseError { kind: ParseErrorKind::Arity { name, expected: 1, found: args.len() }, line, col });
        }
        Ok(build(Box::new(args.pop().unwrap())))
    }
}

/// Parses a complete expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_at(src, 1, 1)
}

/// Parses with positions reported relative to `line`/`col`, for
/// expressions embedded in a larger file.
pub fn parse_at(src: &str, line: usize, col: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src, line, col)?, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
