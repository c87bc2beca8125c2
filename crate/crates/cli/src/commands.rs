use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chern_core::chern::{bc2, bc3, ch, cocycle_check, cs_decomposition, orders, physical_factor, ChernError, MAX_CS_DEGREE};
use chern_core::cholesky::{decompose, JetMatrix, Metric, MetricError};
use chern_core::exterior::{Basis, Form};
use chern_core::mdsl::{load_gauge, load_metric, parse_metric_file, LoadError, MetricSpec, SpecError};
use chern_core::wjet::{Jet, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Spec { path: PathBuf, source: SpecError },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("configuration error: {what} needs jet order >= {required}, the metric has order {available}; set `order = {required}` or higher")]
    InsufficientOrder { what: String, required: u32, available: u32 },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Chern(ChernError),
}

impl CliError {
    fn from_chern(what: &str, e: ChernError) -> Self {
        match e {
            ChernError::InsufficientJetOrder { required, available } => {
                CliError::InsufficientOrder { what: what.to_string(), required, available }
            }
            other => CliError::Chern(other),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Chern(e.into())
    }
}

/// What `eval` computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalTarget {
    Ch(usize),
    Bc(usize),
    Cs(usize),
    /// Transition law of `bc₂` under the file's gauge `g`.
    Cocycle,
}

impl EvalTarget {
    /// Power of `√−1/2π` restored by `--physical`: `p` for a `(p,p)`-form, `k`
    /// for the Chern-Simons form whose `d` is `ch_k`.
    pub fn physical_power(self) -> u32 {
        match self {
            EvalTarget::Ch(k) | EvalTarget::Cs(k) => k as u32,
            EvalTarget::Bc(k) => k as u32 - 1,
            EvalTarget::Cocycle => 0,
        }
    }

    pub fn required_order(self) -> u32 {
        match self {
            EvalTarget::Ch(_) | EvalTarget::Cs(_) => orders::CURVATURE,
            EvalTarget::Bc(2) => orders::FRAME,
            EvalTarget::Bc(_) => orders::CURVATURE,
            EvalTarget::Cocycle => orders::COCYCLE,
        }
    }
}

impl FromStr for EvalTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "cocycle" {
            return Ok(EvalTarget::Cocycle);
        }
        let bad = || format!("invalid target `{s}` (expected ch:K, bc:2, bc:3, cs:K or cocycle)");
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        match kind {
            "ch" if k >= 1 => Ok(EvalTarget::Ch(k)),
            "bc" if k == 2 || k == 3 => Ok(EvalTarget::Bc(k)),
            "cs" if (1..=MAX_CS_DEGREE).contains(&k) => Ok(EvalTarget::Cs(k)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for EvalTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalTarget::Ch(k) => write!(f, "ch:{k}"),
            EvalTarget::Bc(k) => write!(f, "bc:{k}"),
            EvalTarget::Cs(k) => write!(f, "cs:{k}"),
            EvalTarget::Cocycle => write!(f, "cocycle"),
        }
    }
}

pub fn read_spec(path: &Path) -> Result<MetricSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_metric_file(&text).map_err(|source| CliError::Spec { path: path.into(), source })
}

pub fn load_metric_file(path: &Path) -> Result<(MetricSpec, Metric), CliError> {
    let spec = read_spec(path)?;
    let metric = load_metric(&spec).map_err(|source| CliError::Load { path: path.into(), source })?;
    Ok((spec, metric))
}

fn format_c64(c: C64) -> String {
    format!("{:.16e} {:+.16e}i", c.re, c.im)
}

fn format_basis(b: Basis) -> String {
    let mut parts: Vec<String> = b.hol_indices().iter().map(|i| format!("dz{}", i + 1)).collect();
    parts.extend(b.anti_indices().iter().map(|i| format!("dzb{}", i + 1)));
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("^")
    }
}

fn format_monomial(jet: &Jet, idx: chern_core::wjet::MultiIndex) -> String {
    let mut parts = Vec::new();
    for i in 0..jet.n() {
        match idx.alpha(i) {
            0 => {}
            1 => parts.push(format!("z{}", i + 1)),
            e => parts.push(format!("z{}^{e}", i + 1)),
        }
    }
    for i in 0..jet.n() {
        match idx.beta(i) {
            0 => {}
            1 => parts.push(format!("zb{}", i + 1)),
            e => parts.push(format!("zb{}^{e}", i + 1)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// One line per basis element and jet coefficient: `<form basis> <monomial> <re> <im>i`.
pub fn format_form(out: &mut String, form: &Form) {
    if form.is_zero() {
        writeln!(out, "0").unwrap();
    }
    for (basis, jet) in form.terms() {
        for (idx, c) in jet.terms() {
            writeln!(out, "{:<16} {:<20} {}", format_basis(*basis), format_monomial(jet, *idx), format_c64(*c)).unwrap();
        }
    }
}

pub fn eval_metric(metric: &Metric, spec: Option<&MetricSpec>, target: EvalTarget, physical: bool) -> Result<String, CliError> {
    let required = target.required_order();
    if metric.order() < required {
        return Err(CliError::InsufficientOrder { what: target.to_string(), required, available: metric.order() });
    }
    let what = target.to_string();
    let wrap = |e| CliError::from_chern(&what, e);
    let mut out = String::new();
    let factor = if physical { physical_factor(target.physical_power()) } else { C64::new(1.0, 0.0) };
    let units = if physical { "physical units" } else { "normalized units, sqrt(-1)/2pi = 1" };
    writeln!(out, "# {target} ({units})").unwrap();
    match target {
        EvalTarget::Ch(k) => format_form(&mut out, &ch(metric, k).map_err(wrap)?.scale(factor)),
        EvalTarget::Bc(k) => {
            let res = if k == 2 { bc2(metric) } else { bc3(metric) }.map_err(wrap)?;
            format_form(&mut out, &res.bc.scale(factor));
            for (name, form) in &res.intermediates {
                writeln!(out, "# {name}").unwrap();
                format_form(&mut out, form);
            }
        }
        EvalTarget::Cs(k) => {
            let cs = cs_decomposition(metric, k).map_err(wrap)?;
            format_form(&mut out, &cs.cs.scale(factor));
            for (l, w) in cs.omegas.iter().enumerate() {
                writeln!(out, "# omega_{}{}", k + l, k - l - 1).unwrap();
                format_form(&mut out, &w.scale(factor));
            }
        }
        EvalTarget::Cocycle => {
            let g = spec
                .map(load_gauge)
                .transpose()
                .map_err(|e| CliError::Config(e.to_string()))?
                .flatten()
                .ok_or_else(|| CliError::Config("target cocycle needs gauge entries g[i][j] in the metric file".into()))?;
            let rep = cocycle_check(metric, &g).map_err(wrap)?;
            write!(out, "{rep}").unwrap();
        }
    }
    Ok(out)
}

pub fn cmd_eval(path: &Path, target: EvalTarget, physical: bool) -> Result<String, CliError> {
    let (spec, metric) = load_metric_file(path)?;
    eval_metric(&metric, Some(&spec), target, physical)
}

fn format_jet_matrix(out: &mut String, name: &str, m: &JetMatrix) {
    for i in 0..m.rank() {
        for j in 0..m.rank() {
            let jet = m.get(i, j);
            writeln!(out, "{name}[{}][{}]", i + 1, j + 1).unwrap();
            if jet.is_zero() {
                writeln!(out, "  0").unwrap();
            }
            for (idx, c) in jet.terms() {
                writeln!(out, "  {:<20} {}", format_monomial(jet, *idx), format_c64(*c)).unwrap();
            }
        }
    }
}

/// The factors `a` (diagonal) and `b` (unit upper-triangular) of `h = b*ab`.
pub fn decompose_metric(metric: &Metric) -> Result<String, CliError> {
    let f = decompose(metric)?;
    let mut out = String::new();
    writeln!(out, "# h = b* a b").unwrap();
    for (i, a) in f.a.iter().enumerate() {
        writeln!(out, "a[{}]", i + 1).unwrap();
        for (idx, c) in a.terms() {
            writeln!(out, "  {:<20} {}", format_monomial(a, *idx), format_c64(*c)).unwrap();
        }
    }
    format_jet_matrix(&mut out, "b", &f.b);
    Ok(out)
}

pub fn cmd_decompose(path: &Path) -> Result<String, CliError> {
    let (_, metric) = load_metric_file(path)?;
    decompose_metric(&metric)
}
