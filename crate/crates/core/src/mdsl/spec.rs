use std::collections::BTreeMap;

use thiserror::Error;

use crate::cholesky::{validate_gauge, JetMatrix, Metric, MetricError};
use crate::wjet::{Jet, C64, MAX_DIM, MAX_ORDER};

use super::{eval_expr, parse_at, EvalContext, EvalError, Expr, ParseError};

/// Contents of a metric file. Entry keys are 0-based `(i, j)` with `i <= j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub n: usize,
    pub r: usize,
    pub order: u32,
    pub base: Vec<C64>,
    pub entries: BTreeMap<(usize, usize), Expr>,
    /// Optional holomorphic upper-triangular gauge `g`.
    pub gauge: BTreeMap<(usize, usize), Expr>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpecError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("missing header `{0}`")]
    MissingHeader(&'static str),
    #[error("missing diagonal entry h[{0}][{0}]")]
    MissingDiagonal(usize),
}

impl SpecError {
    /// 1-based position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            SpecError::Parse(e) => Some((e.line, e.col)),
            SpecError::Syntax { line, col, .. } => Some((*line, *col)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LoadError {
    #[error("entry ({i}, {j}): {source}")]
    Eval { i: usize, j: usize, source: EvalError },
    #[error("diagonal entry h[{i}][{i}] has non-real value {value} at the base point")]
    NonRealDiagonal { i: usize, value: C64 },
    #[error("missing diagonal entry h[{0}][{0}]")]
    MissingDiagonal(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> SpecError {
    SpecError::Syntax { line, col, msg: msg.into() }
}

/// Parses `h[i][j]` / `g[i][j]` (1-based) into the matrix name and 0-based
/// indices.
fn entry_key(key: &str) -> Option<(char, usize, usize)> {
    let mut chars = key.chars();
    let name = chars.next()?;
    if name != 'h' && name != 'g' {
        return None;
    }
    let rest = chars.as_str().strip_prefix('[')?;
    let (i, rest) = rest.split_once(']')?;
    let rest = rest.trim_start().strip_prefix('[')?;
    let (j, rest) = rest.split_once(']')?;
    if !rest.trim().is_empty() {
        return None;
    }
    let i: usize = i.trim().parse().ok()?;
    let j: usize = j.trim().parse().ok()?;
    (i >= 1 && j >= 1).then(|| (name, i - 1, j - 1))
}

fn parse_literal(src: &str, line: usize, col: usize) -> Result<C64, SpecError> {
    match parse_at(src, line, col)? {
        Expr::Lit { re, im } => Ok(C64::new(re, im)),
        _ => Err(syntax(line, col, "expected a complex constant such as 1-2i")),
    }
}

/// Parses the line-oriented metric format:
///
/// ```text
/// dim = 2
/// rank = 2
/// order = 4
/// base = (0, 0)        # optional, defaults to the origin
/// h[1][1] = 1
/// h[1][2] = conj(z1)
/// h[2][2] = z1*conj(z1) + exp(z1*conj(z1))
/// ```
pub fn parse_metric_file(text: &str) -> Result<MetricSpec, SpecError> {
    let mut n = None;
    let mut r = None;
    let mut order = None;
    let mut base: Option<(Vec<C64>, usize)> = None;
    let mut entries = BTreeMap::new();
    let mut gauge = BTreeMap::new();
    let mut located: Vec<(char, usize, usize, usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let key_col = content.chars().take_while(|c| c.is_whitespace()).count() + 1;
        let Some((key, value)) = content.split_once('=') else {
            return Err(syntax(line, key_col, "expected `name = value`"));
        };
        let value_offset = key.chars().count() + 1;
        let value_col = value_offset + value.chars().take_while(|c| c.is_whitespace()).count() + 1;
        let key = key.trim();
        let value_trim = value.trim();
        let header_int = |what: &str| -> Result<usize, SpecError> {
            value_trim.parse::<usize>().map_err(|_| syntax(line, value_col, format!("{what} must be a positive integer")))
        };
        match key {
            "dim" | "rank" | "order" => {
                let slot = match key {
                    "dim" => &mut n,
                    "rank" => &mut r,
                    _ => &mut order,
                };
                if slot.is_some() {
                    return Err(syntax(line, key_col, format!("duplicate header `{key}`")));
                }
                let v = header_int(key)?;
                let ok = match key {
                    "dim" => (1..=MAX_DIM).contains(&v),
                    "rank" => v >= 1,
                    _ => v <= MAX_ORDER as usize,
                };
                if !ok {
                    return Err(syntax(line, value_col, format!("{key} = {v} is out of range")));
                }
                *slot = Some(v);
            }
            "base" => {
                if base.is_some() {
                    return Err(syntax(line, key_col, "duplicate header `base`"));
                }
                let inner = value_trim
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| syntax(line, value_col, "base must look like (c1, ..., cn)"))?;
                let mut coords = Vec::new();
                let mut col = value_col + 1;
                for piece in inner.split(',') {
                    let lead = piece.chars().take_while(|c| c.is_whitespace()).count();
                    coords.push(parse_literal(piece.trim(), line, col + lead)?);
                    col += piece.chars().count() + 1;
                }
                base = Some((coords, line));
            }
            _ => {
                let Some((name, i, j)) = entry_key(key) else {
                    return Err(syntax(line, key_col, format!("unknown key `{key}`")));
                };
                if i > j {
                    return Err(syntax(line, key_col, "only entries with i <= j may be given"));
                }
                let expr = parse_at(value, line, value_offset + 1)?;
                let target = if name == 'h' { &mut entries } else { &mut gauge };
                if target.insert((i, j), expr).is_some() {
                    return Err(syntax(line, key_col, format!("duplicate entry {key}")));
                }
                located.push((name, i, j, line, key_col));
            }
        }
    }

    let n = n.ok_or(SpecError::MissingHeader("dim"))?;
    let r = r.ok_or(SpecError::MissingHeader("rank"))?;
    let order = order.ok_or(SpecError::MissingHeader("order"))? as u32;
    let base = match base {
        Some((coords, line)) => {
            if coords.len() != n {
                return Err(syntax(line, 1, format!("base has {} coordinates, dim is {n}", coords.len())));
            }
            coords
        }
        None => vec![C64::new(0.0, 0.0); n],
    };
    for (name, i, j, line, col) in located {
        if j >= r {
            return Err(syntax(line, col, format!("{name}[{}][{}] is outside rank {r}", i + 1, j + 1)));
        }
        let e = if name == 'h' { &entries[&(i, j)] } else { &gauge[&(i, j)] };
        if e.max_var() > n {
            return Err(syntax(line, col, format!("z{} is outside dim {n}", e.max_var())));
        }
    }
    if let Some(i) = (0..r).find(|i| !entries.contains_key(&(*i, *i))) {
        return Err(SpecError::MissingDiagonal(i + 1));
    }
    Ok(MetricSpec { n, r, order, base, entries, gauge })
}

impl MetricSpec {
    fn context(&self) -> EvalContext {
        EvalContext { n: self.n, order: self.order, base: self.base.clone() }
    }
}

/// Evaluates every entry, mirrors the lower triangle by conjugation and
/// validates the result.
pub fn load_metric(spec: &MetricSpec) -> Result<Metric, LoadError> {
    let ctx = spec.context();
    let mut upper = Vec::with_capacity(spec.r * (spec.r + 1) / 2);
    for i in 0..spec.r {
        for j in i..spec.r {
            let jet = match spec.entries.get(&(i, j)) {
                Some(e) => eval_expr(e, &ctx).map_err(|source| LoadError::Eval { i: i + 1, j: j + 1, source })?,
                None if i == j => return Err(LoadError::MissingDiagonal(i + 1)),
                None => Jet::zero(spec.n).truncate(spec.order),
            };
            if i == j {
                let c0 = jet.constant_term();
                if c0.im.abs() > 1e-12 * c0.norm().max(1.0) {
                    return Err(LoadError::NonRealDiagonal { i: i + 1, value: c0 });
                }
            }
            upper.push(jet);
        }
    }
    Ok(Metric::from_upper(spec.r, upper)?)
}

/// The gauge `g`, if the file declares one. Unlisted diagonal entries are 1,
/// unlisted off-diagonal entries 0.
pub fn load_gauge(spec: &MetricSpec) -> Result<Option<JetMatrix>, LoadError> {
    if spec.gauge.is_empty() {
        return Ok(None);
    }
    let ctx = spec.context();
    let mut g = JetMatrix::identity(spec.n, spec.r).truncate(spec.order);
    for (&(i, j), e) in &spec.gauge {
        let jet = eval_expr(e, &ctx).map_err(|source| LoadError::Eval { i: i + 1, j: j + 1, source })?;
        g.set(i, j, jet);
    }
    validate_gauge(&g)?;
    Ok(Some(g))
}
