use thiserror::Error;

use crate::wjet::{Jet, JetError, Kind, C64};

use super::Expr;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("variable z{index} is outside dimension {n}")]
    UnknownVariable { index: usize, n: usize },
    #[error("base point has {got} coordinates, dimension is {n}")]
    BasePoint { n: usize, got: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Dimension, jet order and base point shared by every entry of a metric.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalContext {
    pub n: usize,
    pub order: u32,
    pub base: Vec<C64>,
}

impl EvalContext {
    pub fn at_origin(n: usize, order: u32) -> Self {
        EvalContext { n, order, base: vec![C64::new(0.0, 0.0); n] }
    }
}

/// Jet of `e` at the base point, truncated to the context's order.
pub fn eval_expr(e: &Expr, ctx: &EvalContext) -> Result<Jet, EvalError> {
    if ctx.base.len() != ctx.n {
        return Err(EvalError::BasePoint { n: ctx.n, got: ctx.base.len() });
    }
    Ok(eval(e, ctx)?.truncate(ctx.order))
}

fn eval(e: &Expr, ctx: &EvalContext) -> Result<Jet, EvalError> {
    Ok(match e {
        Expr::Lit { re, im } => Jet::constant(ctx.n, C64::new(*re, *im)),
        Expr::Var(i) => {
            if *i == 0 || *i > ctx.n {
                return Err(EvalError::UnknownVariable { index: *i, n: ctx.n });
            }
            Jet::var(*i, Kind::Holomorphic, ctx.base[*i - 1], ctx.n, ctx.order)?
        }
        Expr::Conj(a) => eval(a, ctx)?.conj(),
        Expr::Neg(a) => -eval(a, ctx)?,
        Expr::Add(a, b) => eval(a, ctx)?.try_add(&eval(b, ctx)?)?,
        Expr::Sub(a, b) => eval(a, ctx)?.try_sub(&eval(b, ctx)?)?,
        Expr::Mul(a, b) => eval(a, ctx)?.try_mul(&eval(b, ctx)?)?,
        Expr::Div(a, b) => {
            let denom = eval(b, ctx)?.truncate(ctx.order).inverse()?;
            eval(a, ctx)?.try_mul(&denom)?
        }
        Expr::Pow(a, k) => eval(a, ctx)?.truncate(ctx.order).powi(*k),
        Expr::Exp(a) => eval(a, ctx)?.truncate(ctx.order).exp(),
        Expr::Log(a) => eval(a, ctx)?.truncate(ctx.order).log()?,
    })
}
