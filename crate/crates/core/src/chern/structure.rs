use crate::cholesky::{connection, ConnectionForms, Metric};
use crate::exterior::{Form, MatrixForm};

use super::{orders, require_order, tr, ChernError, Residual, ResidualReport};

const MAX_TRACE_DEGREE: u32 = 5;

fn pow_mixed(x: &MatrixForm, l: u32, y: &MatrixForm, m: u32) -> MatrixForm {
    &x.pow(l) * &y.pow(m)
}

/// `Σ ∂log aᵢ ∧ ∂̄log aᵢ`, the diagonal part of `Tr θ₂θ̄₂`.
fn diagonal_log_form(conn: &ConnectionForms) -> Result<Form, ChernError> {
    let mut out = Form::zero(conn.n());
    for a in &conn.factors.a {
        let inv = a.inverse().map_err(crate::cholesky::MetricError::from)?;
        let s = Form::scalar(a.clone());
        out = &out + &(&s.del()?.mul_jet(&inv) * &s.delbar()?.mul_jet(&inv));
    }
    Ok(out)
}

/// The pair `(l₂, l̄₂) = (1,1)` of the trace identity: the residual of
/// `Tr θ₂θ̄₂ = 0` next to the residual of `Tr θ₂θ̄₂ = Σ ∂log aᵢ∧∂̄log aᵢ`.
pub fn trace_counterexample(metric: &Metric) -> Result<(Residual, Residual), ChernError> {
    require_order(metric, orders::CURVATURE)?;
    let conn = connection(&metric.truncate(orders::CURVATURE))?;
    let t = tr(&(&conn.lower * &conn.lower_bar));
    let diag = diagonal_log_form(&conn)?;
    let scale = conn.scale();
    Ok((Residual::of_zero(&t, scale), Residual::between(&t, &diag, scale)))
}

/// Residuals of the first-order identities among `θ, Θ, θ̄` and the
/// Cholesky pieces `θ₁, θ₂, θ̄₁, θ̄₂`.
pub fn structural_check(metric: &Metric) -> Result<ResidualReport, ChernError> {
    require_order(metric, orders::DESCENT)?;
    let metric = metric.truncate(orders::DESCENT);
    let conn = connection(&metric)?;
    let s = conn.scale();
    let bt = &conn.connection;
    let btb = &conn.connection_bar;
    let curv = &conn.curvature;
    let (t1, t1b, t2, t2b) = (&conn.upper, &conn.upper_bar, &conn.lower, &conn.lower_bar);
    let m = |lhs: &MatrixForm, rhs: &MatrixForm| Residual::between_matrices(lhs, rhs, s);
    let mut rep = ResidualReport::new();

    let bt2 = bt * bt;
    rep.push("del theta = -theta^2", m(&bt.del()?, &-&bt2));
    let h = metric.matrix().to_forms();
    let h_inv = metric.matrix().inverse()?.to_forms();
    let expanded = &(&h_inv * &h.del()?.delbar()?) - &(btb * bt);
    rep.push("dbar theta = Theta", m(&bt.delbar()?, &expanded));
    rep.push("del Theta = [Theta, theta]", m(&curv.del()?, &curv.commutator(bt)?));
    rep.push("dbar Theta = 0", m(&curv.delbar()?, &MatrixForm::zero(conn.n(), conn.rank())));

    for j in 1..=2u32 {
        let cj = curv.pow(j);
        rep.push(format!("del Theta^{j} = [Theta^{j}, theta]"), m(&cj.del()?, &cj.commutator(bt)?));
        let prod = bt * &cj;
        rep.push(format!("del(theta Theta^{j}) = -theta Theta^{j} theta"), m(&prod.del()?, &-&(&prod * bt)));
    }

    rep.push("del theta^2 = 0", m(&bt2.del()?, &MatrixForm::zero(conn.n(), conn.rank())));
    rep.push("dbar theta^2 = [Theta, theta]", m(&bt2.delbar()?, &curv.commutator(bt)?));

    rep.push("theta = b^-1 (theta1 + theta2) b", m(bt, &conn.to_metric_frame(&(t1 + t2))));
    let th = &conn.frame;
    let inner = &(&th.delbar()? - &(t1b * th)) - &(th * t1b);
    rep.push("Theta = b^-1 (dbar th - th1b th - th th1b) b", m(curv, &conn.to_metric_frame(&inner)));
    rep.push("thetabar = b^-1 (theta1b + theta2b) b", m(btb, &conn.to_metric_frame(&(t1b + t2b))));

    rep.push("del theta1 = theta1^2", m(&t1.del()?, &(t1 * t1)));
    rep.push("del theta2 = -theta2^2", m(&t2.del()?, &-&(t2 * t2)));
    rep.push("dbar theta1b = theta1b^2", m(&t1b.delbar()?, &(t1b * t1b)));
    rep.push("dbar theta2b = -theta2b^2", m(&t2b.delbar()?, &-&(t2b * t2b)));
    let rhs1 = &(&-&t1b.del()? + &(t1 * t1b)) + &(t1b * t1);
    rep.push("dbar theta1 = -del theta1b + theta1 theta1b + theta1b theta1", m(&t1.delbar()?, &rhs1));
    let rhs2 = &(&-&t2b.del()? - &(t2 * t2b)) - &(t2b * t2);
    rep.push("dbar theta2 = -del theta2b - theta2 theta2b - theta2b theta2", m(&t2.delbar()?, &rhs2));

    for l in 0..=MAX_TRACE_DEGREE {
        for lb in 0..=MAX_TRACE_DEGREE - l {
            if l + lb > 0 {
                let t = tr(&pow_mixed(t1, l, t1b, lb));
                rep.push(format!("trace: Tr theta1^{l} theta1b^{lb} = 0"), Residual::of_zero(&t, s));
            }
            if l + lb > 1 {
                let t = tr(&pow_mixed(t2, l, t2b, lb));
                rep.push(format!("trace: Tr theta2^{l} theta2b^{lb} = 0"), Residual::of_zero(&t, s));
            }
        }
    }

    rep.push("dbar thetabar = -thetabar^2", m(&btb.delbar()?, &-&(btb * btb)));
    let alt = &(&-&btb.del()? - &(bt * btb)) - &(btb * bt);
    rep.push("Theta = -del thetabar - theta thetabar - thetabar theta", m(curv, &alt));

    let a = conn.factors.a_matrix().to_forms();
    let a_inv_jets = conn.factors.a.iter().map(|x| x.inverse()).collect::<Result<Vec<_>, _>>()
        .map_err(crate::cholesky::MetricError::from)?;
    let a_inv = MatrixForm::diagonal(&a_inv_jets);
    let rel = &(&(&a_inv * &t1b.conj_transpose()) * &a) + &(&a_inv * &a.del()?);
    rep.push("theta2 = a^-1 (theta1b)^* a + a^-1 del a", m(t2, &rel));
    Ok(rep)
}
