//! A small expression language for metric entries.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := power (('*' | '/') power)*
//! power   := unary ('^' INT)*
//! unary   := '-' unary | primary
//! primary := NUMBER | NUMBER 'i' | 'i' | 'z'INDEX | NAME '(' expr ')' | '(' expr ')'
//! ```
//!
//! `NAME` is one of `exp`, `log`, `conj`. Sums, differences and negations of
//! literals are folded while parsing, so `3+2i` is a single complex literal.

mod eval;
mod parse;
mod spec;

pub use eval::{eval_expr, EvalContext, EvalError};
pub use parse::{parse, parse_at, ParseError, ParseErrorKind};
pub use spec::{load_gauge, load_metric, parse_metric_file, LoadError, MetricSpec, SpecError};

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Lit { re: f64, im: f64 },
    /// 1-based coordinate index.
    Var(usize),
    Conj(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

impl Expr {
    pub fn lit(re: f64, im: f64) -> Expr {
        Expr::Lit { re, im }
    }

    /// Largest variable index used, 0 for constants.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Lit { .. } => 0,
            Expr::Var(i) => *i,
            Expr::Conj(a) | Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Neg(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Lit { re, im } => write_literal(f, *re, *im),
            Expr::Var(i) => write!(f, "z{i}"),
            Expr::Conj(a) => write!(f, "conj({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 4)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "{}", if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)
            }
            Expr::Pow(a, k) => {
                a.write_at(f, 3)?;
                write!(f, "^{k}")
            }
        }
    }
}

/// Nonnegative reals and nonnegative imaginaries print bare; anything else
/// is parenthesized so it reparses to the same literal.
fn write_literal(f: &mut fmt::Formatter<'_>, re: f64, im: f64) -> fmt::Result {
    let bare_real = im == 0.0 && !im.is_sign_negative() && !re.is_sign_negative();
    let bare_imag = re == 0.0 && !re.is_sign_negative() && !im.is_sign_negative();
    if bare_real {
        write!(f, "{re:?}")
    } else if bare_imag {
        write!(f, "{im:?}i")
    } else if im == 0.0 && !im.is_sign_negative() {
        write!(f, "(-{:?})", -re)
    } else {
        let re_part = if re.is_sign_negative() { format!("-{:?}", -re) } else { format!("{re:?}") };
        if im.is_sign_negative() {
            write!(f, "({re_part}-{:?}i)", -im)
        } else {
            write!(f, "({re_part}+{im:?}i)")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
