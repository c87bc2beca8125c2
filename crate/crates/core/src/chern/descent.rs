use crate::cholesky::{connection, ConnectionForms, Metric};
use crate::exterior::{Form, MatrixForm};

use super::{
    cs_from, f_poly_eval, factorial, g_poly_coeffs, g_poly_eval, orders, poly_at,
    require_order, tr, ChernError, Residual, ResidualReport,
};

const T_VALUES: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];

/// `ω_{k+1,k−2}` from the symmetrized word formula
/// `1/(k+1) Tr θ Σ_i Θ^i θ² Θ^{k−2−i}`.
pub(crate) fn next_descent_form(conn: &ConnectionForms, k: usize) -> Form {
    let theta_sq = &conn.connection * &conn.connection;
    let mut sum = MatrixForm::zero(conn.n(), conn.rank());
    for i in 0..=(k - 2) {
        let term = &(&conn.curvature.pow(i as u32) * &theta_sq) * &conn.curvature.pow((k - 2 - i) as u32);
        sum = &sum + &term;
    }
    tr(&(&conn.connection * &sum)).scale_real(1.0 / (k as f64 + 1.0))
}

/// Residuals of the descent chain for `ch_k` and the identities used to
/// solve it.
pub fn descent_check(metric: &Metric, k: usize) -> Result<ResidualReport, ChernError> {
    require_order(metric, orders::DESCENT)?;
    let metric = metric.truncate(orders::DESCENT);
    // Quantities that are differentiated once more live on the order-1
    // truncation; everything only compared lives on order 0.
    let full = connection(&metric)?;
    let conn = full.truncate(1);
    let conn0 = full.truncate(0);
    let dec = cs_from(&conn, k)?;
    let curv_k = conn.curvature.pow(k as u32);
    let omega_kk = tr(&curv_k).truncate(0);
    let scale = dec
        .omegas
        .iter()
        .chain(dec.a_coeffs.iter())
        .map(Form::max_abs)
        .fold(omega_kk.max_abs(), f64::max);

    let mut rep = ResidualReport::new();
    let w = &dec.omegas;
    rep.push("omega_kk = dbar omega_{k,k-1}", Residual::between(&omega_kk, &w[0].delbar()?, scale));
    for l in 0..k.saturating_sub(1) {
        rep.push(
            format!("del omega_{{{},{}}} = dbar omega_{{{},{}}}", k + l, k - l - 1, k + l + 1, k - l - 2),
            Residual::between(&w[l].del()?, &w[l + 1].delbar()?, scale),
        );
    }
    rep.push("del omega_{2k-1,0} = 0", Residual::of_zero(&w[k - 1].del()?, scale));
    rep.push("top omega_{2k-1,0} formula", Residual { scale: dec.top_check.scale.max(scale), ..dec.top_check });

    for t in T_VALUES {
        let mut sum = Form::zero(conn.n());
        for (l, wl) in w.iter().enumerate() {
            sum = &sum + &wl.scale_real(t.powi(l as i32));
        }
        let lhs = &sum.delbar()? - &sum.del()?.scale_real(t);
        rep.push(format!("generating identity t={t}"), Residual::between(&lhs, &omega_kk, scale));

        let f = f_poly_eval(&conn, k, t);
        let g = g_poly_eval(&conn0, k, t);
        let lhs = &f.delbar()? - &f.del()?.scale_real(t);
        rep.push(format!("F_k/G_k relation t={t}"), Residual::between(&lhs, &g, scale.max(g.max_abs())));
    }
    for t in [0.0, 1.0, 2.0, 3.0] {
        rep.push(
            format!("F_k expansion t={t}"),
            Residual::between(&f_poly_eval(&conn0, k, t), &poly_at(&dec.a_coeffs, t), scale),
        );
    }

    let theta_sq = &conn0.connection * &conn0.connection;
    let trace_rhs = tr(&(&theta_sq * &conn0.curvature.pow(k as u32 - 1)));
    rep.push("del omega_{k,k-1} = Tr theta^2 Theta^{k-1}", Residual::between(&w[0].del()?, &trace_rhs, scale));
    if k >= 2 {
        let next = next_descent_form(&conn, k);
        rep.push("dbar omega_{k+1,k-2} = Tr theta^2 Theta^{k-1}", Residual::between(&next.delbar()?, &trace_rhs, scale));
        rep.push("omega_{k+1,k-2} word formula", Residual::between(&next, &w[1], scale));
    }

    let a = &dec.a_coeffs;
    for l in 1..k {
        let rhs = a[l - 1].del()?.scale_real((k + l) as f64 / l as f64);
        rep.push(format!("dbar a_{l} = (k+l)/l del a_{}", l - 1), Residual::between(&a[l].delbar()?, &rhs, scale));
    }

    let b = g_poly_coeffs(&conn0, k);
    rep.push("G_k(0) = omega_kk", Residual::between(&b[0], &omega_kk, scale));
    for l in 1..=k {
        let lhs = b[l].scale_real(l as f64);
        let rhs = a[l - 1].del()?.scale_real(k as f64);
        rep.push(format!("dG/dt coefficient t^{}", l - 1), Residual::between(&lhs, &rhs, scale));
    }

    let cs_d = dec.cs.scale_real(factorial(k)).d()?;
    rep.push("d(k! cs_k) = omega_kk", Residual::between(&cs_d, &omega_kk, scale));
    let ch_k = tr(&curv_k).scale_real(1.0 / factorial(k));
    rep.push("d ch_k = 0", Residual::of_zero(&ch_k.d()?, scale / factorial(k)));
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    rep.push("conj omega_kk = (-1)^k omega_kk", Residual::between(&omega_kk.conj(), &omega_kk.scale_real(sign), scale));

    if k == 1 {
        let log_det = Form::scalar(metric.log_det()?);
        let tr_theta = tr(&conn.connection);
        rep.push("Tr theta = del log det h", Residual::between(&tr_theta, &log_det.del()?, scale));
        rep.push("omega_11 = dbar Tr theta", Residual::between(&omega_kk, &tr_theta.delbar()?, scale));
    }
    Ok(rep)
}
