use nalgebra::DMatrix;

use crate::cholesky::{
    connection, decompose, frame_forms, gauge_transform, split_gauge, ConnectionForms, FrameForms, JetMatrix,
    Metric,
};
use crate::exterior::{Basis, Form, MatrixForm};
use crate::wjet::{Jet, C64};

use super::{orders, require_order, tr, ChernError, Residual, ResidualReport};

#[derive(Clone, Debug)]
pub struct BottChernResult {
    pub k: usize,
    /// `(k−1,k−1)`-form with `∂̄∂ bc = ch_k`.
    pub bc: Form,
    /// Named forms met on the way (`omega_20`, `omega_40`, ...).
    pub intermediates: Vec<(String, Form)>,
}

impl BottChernResult {
    pub fn intermediate(&self, name: &str) -> Option<&Form> {
        self.intermediates.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

#[derive(Clone, Copy)]
struct Pieces<'a> {
    t1: &'a MatrixForm,
    t1b: &'a MatrixForm,
    t2: &'a MatrixForm,
    t2b: &'a MatrixForm,
}

impl<'a> From<&'a FrameForms> for Pieces<'a> {
    fn from(f: &'a FrameForms) -> Self {
        Pieces { t1: &f.upper, t1b: &f.upper_bar, t2: &f.lower, t2b: &f.lower_bar }
    }
}

impl<'a> From<&'a ConnectionForms> for Pieces<'a> {
    fn from(c: &'a ConnectionForms) -> Self {
        Pieces { t1: &c.upper, t1b: &c.upper_bar, t2: &c.lower, t2b: &c.lower_bar }
    }
}

fn omega11(p: &Pieces) -> Form {
    tr(&(&(p.t2 * p.t1b).scale_real(2.0) + &(p.t2 * p.t2b)))
}

fn omega11_alt(p: &Pieces) -> Form {
    let theta = p.t1 + p.t2;
    let theta_bar = p.t1b + p.t2b;
    tr(&(&(&theta * &theta_bar) - &(&(p.t1b * p.t2) - &(p.t2b * p.t1))))
}

/// `ω₁,₁ = Tr(θθ̄ − (θ̄₁θ₂ − θ̄₂θ₁))`, the form of `2·bc₂` before simplifying.
pub fn omega11_alternate(metric: &Metric) -> Result<Form, ChernError> {
    require_order(metric, orders::FRAME)?;
    let fr = frame_forms(metric)?;
    Ok(omega11_alt(&Pieces::from(&fr)))
}

/// `bc₂ = ½ Tr(2θ₂θ̄₁ + θ₂θ̄₂)`.
pub fn bc2(metric: &Metric) -> Result<BottChernResult, ChernError> {
    require_order(metric, orders::FRAME)?;
    let fr = frame_forms(metric)?;
    let p = Pieces::from(&fr);
    let w11 = omega11(&p);
    let w20 = tr(&(p.t1 * p.t2));
    Ok(BottChernResult {
        k: 2,
        bc: w11.scale_real(0.5),
        intermediates: vec![("omega_20".into(), w20), ("omega_11".into(), w11)],
    })
}

fn omega_40(p: &Pieces) -> Form {
    let (t1, t2) = (p.t1, p.t2);
    let t1sq = t1 * t1;
    let t12 = t1 * t2;
    let sum = &(&(&(&t1sq * t1) * t2) + &(&(t1 * &(t2 * t2)) * t2)) + &(&t12 * &t12).scale_real(0.5);
    tr(&sum).scale_real(0.5)
}

/// `I₁ = θ³ − θθ₂θ₁ − θ₁θ₂θ` and `I₂ = −θ³ + θθ₁θ₂ + θ₂θ₁θ`.
fn i_matrices(p: &Pieces, th: &MatrixForm) -> (MatrixForm, MatrixForm) {
    let th3 = &(th * th) * th;
    let i1 = &(&th3 - &(&(th * p.t2) * p.t1)) - &(&(p.t1 * p.t2) * th);
    let i2 = &(&(&(th * p.t1) * p.t2) + &(&(p.t2 * p.t1) * th)) - &th3;
    (i1, i2)
}

fn omega_31(p: &Pieces, th: &MatrixForm, thb: &MatrixForm) -> Form {
    let (i1, i2) = i_matrices(p, th);
    let th3 = &(th * th) * th;
    tr(&(&(&(&th3 * thb) + &(&i1 * p.t1b)) + &(&i2 * p.t2b))).scale_real(0.5)
}

fn omega_31_alt(p: &Pieces, th: &MatrixForm) -> Form {
    let Pieces { t1, t1b, t2, t2b } = *p;
    let th3 = &(th * th) * th;
    let t12 = t1 * t2;
    let t21 = t2 * t1;
    let t1sq = t1 * t1;
    let t2sq = t2 * t2;
    let first = &(&(t1 * &t2sq) + &(&t12 * t1).scale_real(2.0)) + &(&t2sq * t1);
    let second = &(&(&t1sq * t2) + &(&t21 * t2).scale_real(2.0)) + &(t2 * &t1sq);
    tr(&(&(&(&th3 * t1b).scale_real(2.0) - &(&first * t1b)) + &(&second * t2b))).scale_real(0.5)
}

/// `ω₂,₂ = 6·bc₃`.
fn omega_22(conn: &ConnectionForms) -> Form {
    let Pieces { t1, t1b, t2, t2b } = Pieces::from(conn);
    let th = &conn.frame;
    let thb = &conn.frame_bar;
    let t12 = t1 * t2;
    let t21 = t2 * t1;
    let sq = &(t1 * t1) + &(t2 * t2);
    let thth = th * thb;
    let bt = &conn.connection;
    let btb = &conn.connection_bar;
    let curv = &conn.curvature;
    let mut inner = &(&(bt * curv) * btb) - &(&(btb * curv) * bt);
    inner = &inner - &(&thth * &thth).scale_real(0.5);
    inner = &inner + &(&(&sq + &t12) * &(t1b * t2b));
    inner = &inner - &(&(&sq + &t21) * &(t2b * t1b));
    inner = &inner - &(&(&t21 - &t12) * &(&(t1b * t1b) + &(t2b * t2b)));
    inner = &inner - &(&(&(t2 * t1b) * t2) * t2b);
    inner = &inner + &(&(&(t1 * t1b) * t1) * t2b);
    inner = &inner - &(&(&(t2 * t1b) * t1) * t1b);
    inner = &inner + &(&(&(t2 * t2b) * t1) * t2b);
    let a = t1 * t2b;
    let b = t2 * t1b;
    inner = &inner + &(&(&a * &a) - &(&b * &b)).scale_real(0.5);
    tr(&inner).scale_real(0.5)
}

/// `bc₃ = (1/12) Tr(θΘθ̄ − θ̄Θθ − ½(θθ̄)² + ...)` in Cholesky coordinates.
pub fn bc3(metric: &Metric) -> Result<BottChernResult, ChernError> {
    require_order(metric, orders::CURVATURE)?;
    let conn = connection(metric)?;
    let p = Pieces::from(&conn);
    Ok(BottChernResult {
        k: 3,
        bc: omega_22(&conn).scale_real(1.0 / 6.0),
        intermediates: vec![
            ("omega_40".into(), omega_40(&p)),
            ("omega_31".into(), omega_31(&p, &conn.frame, &conn.frame_bar)),
            ("omega_31_alt".into(), omega_31_alt(&p, &conn.frame)),
        ],
    })
}

fn dbar_del(f: &Form) -> Result<Form, ChernError> {
    Ok(f.del()?.delbar()?)
}

fn max_scale(forms: &[&Form]) -> f64 {
    forms.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
}

/// Residuals of the ascent equations for `k = 2` or `k = 3`.
pub fn ascent_check(metric: &Metric, k: usize) -> Result<ResidualReport, ChernError> {
    match k {
        2 => ascent_k2(metric),
        3 => ascent_k3(metric),
        _ => Err(ChernError::UnsupportedDegree { k, allowed: "2 or 3" }),
    }
}

fn ascent_k2(metric: &Metric) -> Result<ResidualReport, ChernError> {
    require_order(metric, orders::ASCENT_K2)?;
    let metric = metric.truncate(orders::ASCENT_K2);
    let conn = connection(&metric)?;
    let p = Pieces::from(&conn);
    let bt = &conn.connection;
    let w30 = tr(&(&(bt * bt) * bt)).scale_real(1.0 / 3.0);
    let w21 = tr(&(bt * &conn.curvature));
    let w20 = tr(&(p.t1 * p.t2));
    let w11 = omega11(&p);
    let w11_alt = omega11_alt(&p);
    let w22 = tr(&(&conn.curvature * &conn.curvature));
    let scale = max_scale(&[&w30, &w21, &w20, &w11, &w22]);

    let mut rep = ResidualReport::new();
    rep.push("omega_30 = del omega_20", Residual::between(&w30, &w20.del()?, scale));
    rep.push(
        "omega_21 + dbar omega_20 = del omega_11",
        Residual::between(&(&w21 + &w20.delbar()?), &w11.del()?, scale),
    );
    rep.push("omega_11 expressions agree", Residual::between(&w11, &w11_alt, scale));
    rep.push("dbar del omega_11 = omega_22", Residual::between(&dbar_del(&w11)?, &w22, scale));
    Ok(rep)
}

fn ascent_k3(metric: &Metric) -> Result<ResidualReport, ChernError> {
    require_order(metric, orders::ASCENT_K3)?;
    let metric = metric.truncate(orders::ASCENT_K3);
    let full = connection(&metric)?;
    // ω₂,₂ is differentiated twice, ω₄,₀, ω₃,₁ and I₁, I₂ once
    let conn2 = full.truncate(2);
    let conn1 = full.truncate(1);
    let conn0 = full.truncate(0);
    let p1 = Pieces::from(&conn1);
    let w40 = omega_40(&p1);
    let w31 = omega_31(&p1, &conn1.frame, &conn1.frame_bar);
    let w31_alt = omega_31_alt(&p1, &conn1.frame);
    let w22 = omega_22(&conn2);

    let bt = &conn0.connection;
    let curv = &conn0.curvature;
    let bt2 = bt * bt;
    let bt3 = &bt2 * bt;
    let w50 = tr(&(&bt3 * &bt2)).scale_real(0.1);
    let w41 = tr(&(&bt3 * curv)).scale_real(0.5);
    let w32 = tr(&(&(bt * curv) * curv));
    let w33 = tr(&curv.pow(3));
    let scale = max_scale(&[&w50, &w41, &w32, &w33, &w40, &w31, &w22]);

    let mut rep = ResidualReport::new();
    rep.push("omega_50 = del omega_40", Residual::between(&w50, &w40.del()?, scale));
    rep.push(
        "omega_41 + dbar omega_40 = del omega_31",
        Residual::between(&(&w41 + &w40.delbar()?), &w31.del()?, scale),
    );
    rep.push(
        "omega_32 + dbar omega_31 = del omega_22",
        Residual::between(&(&w32 + &w31.delbar()?), &w22.del()?, scale),
    );
    rep.push("omega_31 expressions agree", Residual::between(&w31, &w31_alt, scale));
    rep.push("dbar del omega_22 = omega_33", Residual::between(&dbar_del(&w22)?, &w33, scale));

    let (i1, i2) = i_matrices(&p1, &conn1.frame);
    let th = &conn0.frame;
    let th4 = (th * th).pow(2);
    let i_scale = i1.max_abs().max(i2.max_abs()).max(th4.max_abs());
    let (t1, t2) = (&conn0.upper, &conn0.lower);
    let (i1_0, i2_0) = (i1.map(|f| f.truncate(0)), i2.map(|f| f.truncate(0)));
    let lhs1 = &(&i1.del()? - &(&i1_0 * t1)) - &(t1 * &i1_0);
    let lhs2 = &(&i2.del()? + &(&i2_0 * t2)) + &(t2 * &i2_0);
    rep.push("del I1 - I1 theta1 - theta1 I1 = -theta^4", Residual::between_matrices(&lhs1, &-&th4, i_scale));
    rep.push("del I2 + I2 theta2 + theta2 I2 = -theta^4", Residual::between_matrices(&lhs2, &-&th4, i_scale));
    Ok(rep)
}

/// `∂̄∂(k!·bc_k)` against `k!·ch_k = Tr Θ^k`, relative to the latter.
pub fn bottchern_check(metric: &Metric, k: usize) -> Result<Residual, ChernError> {
    if !(1..=3).contains(&k) {
        return Err(ChernError::UnsupportedDegree { k, allowed: "1..=3" });
    }
    let required = orders::bottchern(k);
    require_order(metric, required)?;
    let metric = metric.truncate(required);
    let potential = match k {
        1 => Form::scalar(metric.log_det()?),
        2 => bc2(&metric)?.bc.scale_real(2.0),
        _ => bc3(&metric)?.bc.scale_real(6.0),
    };
    let conn = connection(&metric)?;
    let target = tr(&conn.curvature.pow(k as u32));
    let lhs = dbar_del(&potential)?;
    let r = Residual::between(&lhs, &target, 0.0);
    Ok(Residual { abs: r.abs, scale: target.truncate(lhs.order()).max_abs() })
}

/// Coefficients `M_ab` of `ω₁,₁ = Σ M_ab dz_a∧dz̄_b` at the base point.
pub fn positivity_matrix(metric: &Metric) -> Result<DMatrix<C64>, ChernError> {
    let w11 = bc2(metric)?.bc.scale_real(2.0);
    let n = metric.n();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        w11.coeff(Basis::new(&[a], &[b])).map_or(C64::new(0.0, 0.0), Jet::constant_term)
    }))
}

/// Smallest eigenvalue of the Hermitian matrix `M` representing `√−1 ω₁,₁`.
pub fn positivity_check(metric: &Metric) -> Result<f64, ChernError> {
    let m = positivity_matrix(metric)?;
    let size = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let skew = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if skew > 1e-10 * size {
        return Err(ChernError::ConventionViolation(format!(
            "coefficient matrix of omega_11 is not Hermitian (skew part {skew:.3e})"
        )));
    }
    let herm = (&m + m.adjoint()).scale(0.5);
    Ok(herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

fn dlog(f: &Jet, bar: bool) -> Result<Form, ChernError> {
    let s = Form::scalar(f.clone());
    let d = if bar { s.delbar()? } else { s.del()? };
    Ok(d.mul_jet(&f.inverse().map_err(crate::cholesky::MetricError::from)?))
}

/// `c_αβ = Tr{A∧Ā + A∧a⁻¹∂̄a + a⁻¹∂a∧Ā}` with `A = a_g⁻¹∂a_g` and `a` the
/// diagonal Cholesky factor of `h`.
pub fn cocycle_form(metric: &Metric, g: &JetMatrix) -> Result<Form, ChernError> {
    let (a_g, _) = split_gauge(g)?;
    let a = decompose(metric)?.a;
    let mut c = Form::zero(metric.n());
    for (ag, ai) in a_g.iter().zip(&a) {
        let big_a = dlog(ag, false)?;
        let big_a_bar = big_a.conj();
        c = &c + &(&big_a * &big_a_bar);
        c = &c + &(&big_a * &dlog(ai, true)?);
        c = &c + &(&dlog(ai, false)? * &big_a_bar);
    }
    Ok(c)
}

/// Residuals of the transition law for `bc₂` under `h ↦ g*hg`.
pub fn cocycle_check(metric: &Metric, g: &JetMatrix) -> Result<ResidualReport, ChernError> {
    require_order(metric, orders::COCYCLE)?;
    let metric = metric.truncate(orders::COCYCLE);
    let g = g.truncate(orders::COCYCLE);
    let (_, unipotent) = split_gauge(&g)?;

    let before = bc2(&metric)?.bc;
    let after = bc2(&gauge_transform(&metric, &g)?)?.bc;
    let diff = &after - &before;
    let c = cocycle_form(&metric, &g)?;
    let scale = max_scale(&[&before, &after, &c]);

    let mut rep = ResidualReport::new();
    rep.push("bc2(g*hg) - bc2(h) = c_ab", Residual::between(&diff, &c, scale));
    rep.push("bc2(g*hg) - bc2(h) = c_ab/2", Residual::between(&diff, &c.scale_real(0.5), scale));
    rep.push("dbar del c_ab = 0", Residual::of_zero(&dbar_del(&c)?, scale));
    let invariant = bc2(&gauge_transform(&metric, &unipotent)?)?.bc;
    rep.push("unipotent gauge leaves bc2 invariant", Residual::between(&invariant, &before, scale));
    Ok(rep)
}
