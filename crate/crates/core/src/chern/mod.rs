//! Chern character forms, the `(p,q)` pieces of the Chern–Simons forms, and
//! the explicit Bott–Chern forms in Cholesky coordinates.
//!
//! Everything is in units where `√−1/2π = 1`; `physical_factor` converts on
//! export.

mod bott;
mod descent;
mod residual;
mod structure;

pub use bott::{
    ascent_check, bc2, bc3, bottchern_check, cocycle_check, cocycle_form, omega11_alternate, positivity_check,
    positivity_matrix, BottChernResult,
};
pub use descent::descent_check;
pub use residual::{Check, Residual, ResidualReport, ABSOLUTE_TOLERANCE, SCALE_FLOOR};
pub use structure::{structural_check, trace_counterexample};

use thiserror::Error;

use crate::cholesky::{connection, ConnectionForms, Metric, MetricError};
use crate::exterior::{Form, FormError, MatrixForm};
use crate::wjet::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChernError {
    #[error("insufficient jet order: need {required}, have {available}")]
    InsufficientJetOrder { required: u32, available: u32 },
    #[error("degree k = {k} not supported (allowed: {allowed})")]
    UnsupportedDegree { k: usize, allowed: &'static str },
    #[error("{name} has support outside bidegree ({p},{q})")]
    DegreeViolation { name: String, p: u32, q: u32 },
    #[error("convention violation: {0}")]
    ConventionViolation(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Jet orders each computation consumes from the metric.
pub mod orders {
    /// Curvature `∂̄(h⁻¹∂h)`.
    pub const CURVATURE: u32 = 2;
    /// First-order Cholesky pieces.
    pub const FRAME: u32 = 1;
    pub const DESCENT: u32 = CURVATURE + 1;
    pub const ASCENT_K2: u32 = FRAME + 2;
    pub const ASCENT_K3: u32 = CURVATURE + 2;
    pub const COCYCLE: u32 = FRAME + 2;

    /// Order needed to check `∂̄∂(k!·bc_k) = k!·ch_k`.
    pub fn bottchern(k: usize) -> u32 {
        match k {
            1 => 2,
            2 => FRAME + 2,
            _ => CURVATURE + 2,
        }
    }
}

pub(crate) fn require_order(metric: &Metric, required: u32) -> Result<(), ChernError> {
    if metric.order() < required {
        return Err(ChernError::InsufficientJetOrder { required, available: metric.order() });
    }
    Ok(())
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn tr(m: &MatrixForm) -> Form {
    m.trace()
}

pub(crate) fn ensure_bidegree(name: &str, form: &Form, p: u32, q: u32) -> Result<(), ChernError> {
    if form.is_homogeneous_of(p, q) {
        Ok(())
    } else {
        Err(ChernError::DegreeViolation { name: name.to_string(), p, q })
    }
}

/// `ch_k = (1/k!) Tr Θ^k`, a `(k,k)`-form.
pub fn ch(metric: &Metric, k: usize) -> Result<Form, ChernError> {
    require_order(metric, orders::CURVATURE)?;
    if k == 0 {
        return Err(ChernError::UnsupportedDegree { k, allowed: "k >= 1" });
    }
    let conn = connection(metric)?;
    Ok(ch_from(&conn, k))
}

pub(crate) fn ch_from(conn: &ConnectionForms, k: usize) -> Form {
    tr(&conn.curvature.pow(k as u32)).scale_real(1.0 / factorial(k))
}

/// Sums of all words of length `len` in the letters `Θ` and `θ²`, grouped by
/// the number of `θ²` letters. Words sharing a prefix share its product.
fn word_sums(conn: &ConnectionForms, len: usize) -> Vec<MatrixForm> {
    let n = conn.n();
    let r = conn.rank();
    let theta_sq = &conn.connection * &conn.connection;
    let mut sums = vec![MatrixForm::identity(n, r)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(sums.len() + 1);
        for l in 0..=sums.len() {
            let with_curv = sums.get(l).map(|s| s * &conn.curvature);
            let with_sq = if l > 0 { Some(&sums[l - 1] * &theta_sq) } else { None };
            next.push(match (with_curv, with_sq) {
                (Some(a), Some(b)) => &a + &b,
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            });
        }
        sums = next;
    }
    sums
}

/// Coefficients `a_0..a_{k−1}` of `F_k(t) = Tr θ(Θ + tθ²)^{k−1}`.
pub fn f_poly_coeffs(conn: &ConnectionForms, k: usize) -> Vec<Form> {
    assert!(k >= 1, "k must be positive");
    word_sums(conn, k - 1).iter().map(|w| tr(&(&conn.connection * w))).collect()
}

/// Coefficients `b_0..b_k` of `G_k(t) = Tr (Θ + tθ²)^k`.
pub fn g_poly_coeffs(conn: &ConnectionForms, k: usize) -> Vec<Form> {
    word_sums(conn, k).iter().map(tr).collect()
}

fn shifted_curvature(conn: &ConnectionForms, t: f64) -> MatrixForm {
    let theta_sq = &conn.connection * &conn.connection;
    &conn.curvature + &theta_sq.scale_real(t)
}

/// `F_k(t)` by direct matrix powers.
pub fn f_poly_eval(conn: &ConnectionForms, k: usize, t: f64) -> Form {
    tr(&(&conn.connection * &shifted_curvature(conn, t).pow(k as u32 - 1)))
}

/// `G_k(t)` by direct matrix powers.
pub fn g_poly_eval(conn: &ConnectionForms, k: usize, t: f64) -> Form {
    tr(&shifted_curvature(conn, t).pow(k as u32))
}

/// `Σ c_l t^l`.
pub fn poly_at(coeffs: &[Form], t: f64) -> Form {
    let n = coeffs.first().map_or(0, Form::n);
    coeffs.iter().rev().fold(Form::zero(n), |acc, c| &acc.scale_real(t) + c)
}

pub const MAX_CS_DEGREE: usize = 5;

#[derive(Clone, Debug)]
pub struct CsDecomposition {
    pub k: usize,
    pub a_coeffs: Vec<Form>,
    /// `omegas[l]` is the `(k+l, k−l−1)` piece.
    pub omegas: Vec<Form>,
    pub cs: Form,
    /// `ω_{2k−1,0}` against `k!(k−1)!/(2k−1)! · Tr θ^{2k−1}`.
    pub top_check: Residual,
}

impl CsDecomposition {
    pub fn omega(&self, p: u32, q: u32) -> Option<&Form> {
        let k = self.k as u32;
        if p + q + 1 != 2 * k || p < k {
            return None;
        }
        self.omegas.get((p - k) as usize)
    }

    pub fn top(&self) -> &Form {
        self.omegas.last().expect("k >= 1")
    }
}

pub fn cs_decomposition(metric: &Metric, k: usize) -> Result<CsDecomposition, ChernError> {
    require_order(metric, orders::CURVATURE)?;
    let conn = connection(metric)?;
    cs_from(&conn, k)
}

pub(crate) fn cs_from(conn: &ConnectionForms, k: usize) -> Result<CsDecomposition, ChernError> {
    if k == 0 || k > MAX_CS_DEGREE {
        return Err(ChernError::UnsupportedDegree { k, allowed: "1..=5" });
    }
    let a_coeffs = f_poly_coeffs(conn, k);
    let mut omegas = Vec::with_capacity(k);
    let mut cs = Form::zero(conn.n());
    for (l, a) in a_coeffs.iter().enumerate() {
        let w = a.scale_real(factorial(k) * factorial(l) / factorial(k + l));
        ensure_bidegree(&format!("omega[{l}]"), &w, (k + l) as u32, (k - l - 1) as u32)?;
        let signed = if l % 2 == 0 { w.clone() } else { -&w };
        cs = &cs + &signed;
        omegas.push(w);
    }
    cs = cs.scale_real(1.0 / factorial(k));
    let top_formula = tr(&conn.connection.pow(2 * k as u32 - 1))
        .scale_real(factorial(k) * factorial(k - 1) / factorial(2 * k - 1));
    let top_check = Residual::between(omegas.last().unwrap(), &top_formula, 0.0);
    Ok(CsDecomposition { k, a_coeffs, omegas, cs, top_check })
}

/// `(√−1/2π)^power`, the factor taking normalized units to physical ones.
pub fn physical_factor(power: u32) -> C64 {
    C64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI)).powu(power)
}
