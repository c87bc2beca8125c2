//! Hermitian jet-valued metrics, their factorization `h = b* a b`
//! (`b` unit upper-triangular, `a` positive diagonal) and the connection and
//! curvature forms built from them.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{FormError, MatrixForm};
use crate::wjet::{Jet, JetError, C64};

/// Relative tolerance for the Hermitian symmetry check of user-supplied
/// matrices.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("expected {expected} entries for a rank-{r} matrix, got {got}")]
    Shape { r: usize, expected: usize, got: usize },
    #[error("entries have inconsistent dimensions")]
    DimensionMismatch,
    #[error("metric is not Hermitian at entry ({i}, {j})")]
    NotHermitian { i: usize, j: usize },
    #[error("metric is not positive definite at the base point (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("pivot {index} has nonpositive constant term {value}")]
    NonPositivePivot { index: usize, value: C64 },
    #[error("gauge matrix entry ({i}, {j}) depends on z̄")]
    NonHolomorphicGauge { i: usize, j: usize },
    #[error("gauge matrix entry ({i}, {j}) below the diagonal is nonzero")]
    NotUpperTriangular { i: usize, j: usize },
    #[error("matrix is singular at the base point")]
    Singular,
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Square matrix of jets, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix {
    r: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn new(r: usize, entries: Vec<Jet>) -> Result<Self, MetricError> {
        if entries.len() != r * r || r == 0 {
            return Err(MetricError::Shape { r, expected: r * r, got: entries.len() });
        }
        let n = entries[0].n();
        if entries.iter().any(|e| e.n() != n) {
            return Err(MetricError::DimensionMismatch);
        }
        Ok(JetMatrix { r, entries })
    }

    pub fn identity(n: usize, r: usize) -> Self {
        let entries = (0..r * r)
            .map(|k| if k / r == k % r { Jet::one(n) } else { Jet::zero(n) })
            .collect();
        JetMatrix { r, entries }
    }

    pub fn diagonal(diag: Vec<Jet>) -> Self {
        let r = diag.len();
        let n = diag[0].n();
        let mut m = JetMatrix::identity(n, r);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * r + i] = d;
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.entries[0].n()
    }

    pub fn order(&self) -> u32 {
        self.entries.iter().map(Jet::order).min().unwrap()
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Jet) {
        self.entries[i * self.r + j] = value;
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn truncate(&self, order: u32) -> JetMatrix {
        JetMatrix { r: self.r, entries: self.entries.iter().map(|e| e.truncate(order)).collect() }
    }

    pub fn mul(&self, other: &JetMatrix) -> JetMatrix {
        let r = self.r;
        let n = self.n();
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = Jet::zero(n);
                for k in 0..r {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                entries.push(acc);
            }
        }
        JetMatrix { r, entries }
    }

    /// Entrywise jet conjugation followed by transposition.
    pub fn conj_transpose(&self) -> JetMatrix {
        let r = self.r;
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                entries.push(self.get(j, i).conj());
            }
        }
        JetMatrix { r, entries }
    }

    /// Values at the base point.
    pub fn base_values(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.r, self.r, |i, j| self.get(i, j).constant_term())
    }

    /// Gauss-Jordan inverse with partial pivoting on the constant terms.
    pub fn inverse(&self) -> Result<JetMatrix, MetricError> {
        let r = self.r;
        let n = self.n();
        let mut a = self.entries.clone();
        let mut inv = JetMatrix::identity(n, r).entries;
        for col in 0..r {
            let pivot_row = (col..r)
                .max_by(|&x, &y| {
                    a[x * r + col]
                        .constant_term()
                        .norm()
                        .total_cmp(&a[y * r + col].constant_term().norm())
                })
                .unwrap();
            if a[pivot_row * r + col].constant_term().norm() == 0.0 {
                return Err(MetricError::Singular);
            }
            if pivot_row != col {
                for k in 0..r {
                    a.swap(pivot_row * r + k, col * r + k);
                    inv.swap(pivot_row * r + k, col * r + k);
                }
            }
            let p = a[col * r + col].inverse()?;
            for k in 0..r {
                a[col * r + k] = &a[col * r + k] * &p;
                inv[col * r + k] = &inv[col * r + k] * &p;
            }
            for row in 0..r {
                if row == col {
                    continue;
                }
                let factor = a[row * r + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for k in 0..r {
                    a[row * r + k] = &a[row * r + k] - &(&factor * &a[col * r + k]);
                    inv[row * r + k] = &inv[row * r + k] - &(&factor * &inv[col * r + k]);
                }
            }
        }
        Ok(JetMatrix { r, entries: inv })
    }

    /// The matrix as 0-forms.
    pub fn to_forms(&self) -> MatrixForm {
        MatrixForm::from_jets(self.r, self.entries.clone()).expect("shape checked on construction")
    }

    /// Largest coefficient modulus over all entries.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Jet::max_abs).fold(0.0, f64::max)
    }
}

/// Hermitian metric on the trivial rank-`r` bundle over a polydisk in `C^n`,
/// positive definite at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    h: JetMatrix,
}

fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

impl Metric {
    /// Validates Hermitian symmetry (to a relative 1e-12) and positive
    /// definiteness at the base point.
    pub fn new(h: JetMatrix) -> Result<Self, MetricError> {
        let r = h.rank();
        let scale = h.max_abs().max(1.0);
        for i in 0..r {
            for j in i..r {
                let diff = h.get(j, i) - &h.get(i, j).conj();
                if diff.max_abs() > HERMITIAN_TOL * scale {
                    return Err(MetricError::NotHermitian { i, j });
                }
            }
        }
        let min_eigenvalue = min_hermitian_eigenvalue(&h.base_values());
        if !(min_eigenvalue > 0.0) {
            return Err(MetricError::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Metric { h })
    }

    /// Builds a metric from its upper triangle (row-major `i <= j`), deriving
    /// the lower triangle by jet conjugation and projecting the diagonal onto
    /// real functions, so the result is exactly Hermitian.
    pub fn from_upper(r: usize, upper: Vec<Jet>) -> Result<Self, MetricError> {
        let expected = r * (r + 1) / 2;
        if upper.len() != expected || r == 0 {
            return Err(MetricError::Shape { r, expected, got: upper.len() });
        }
        let n = upper[0].n();
        let mut h = JetMatrix::identity(n, r);
        let mut it = upper.into_iter();
        for i in 0..r {
            for j in i..r {
                let v = it.next().unwrap();
                if v.n() != n {
                    return Err(MetricError::DimensionMismatch);
                }
                if i != j {
                    h.set(j, i, v.conj());
                    h.set(i, j, v);
                } else {
                    // keep rounding-level imaginary parts from breaking exact symmetry
                    let vc = v.conj();
                    if (&v - &vc).max_abs() > HERMITIAN_TOL * v.max_abs().max(1.0) {
                        return Err(MetricError::NotHermitian { i, j });
                    }
                    h.set(i, i, (&v + &vc).scale_real(0.5));
                }
            }
        }
        Metric::new(h)
    }

    pub fn matrix(&self) -> &JetMatrix {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.h.rank()
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn order(&self) -> u32 {
        self.h.order()
    }

    pub fn truncate(&self, order: u32) -> Metric {
        Metric { h: self.h.truncate(order) }
    }

    /// Smallest eigenvalue of the metric at the base point.
    pub fn min_base_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.h.base_values())
    }

    /// `log det h`, computed from the Cholesky pivots.
    pub fn log_det(&self) -> Result<Jet, MetricError> {
        let f = decompose(self)?;
        let mut acc = Jet::zero(self.n());
        for a in &f.a {
            acc = &acc + &a.log()?;
        }
        Ok(acc)
    }
}

/// `h = b* a b` with `b` unit upper-triangular and `a` diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactors {
    /// Diagonal pivots.
    pub a: Vec<Jet>,
    /// Unit upper-triangular factor.
    pub b: JetMatrix,
    /// `c = b* a`, lower-triangular.
    pub c: JetMatrix,
}

impl CholeskyFactors {
    /// `b* a b`.
    pub fn reconstruct(&self) -> JetMatrix {
        self.c.mul(&self.b)
    }

    pub fn a_matrix(&self) -> JetMatrix {
        JetMatrix::diagonal(self.a.clone())
    }
}

/// Square-root-free factorization `h = b* a b`, column by column in jet
/// arithmetic.
pub fn decompose(metric: &Metric) -> Result<CholeskyFactors, MetricError> {
    let h = &metric.h;
    let r = h.rank();
    let n = h.n();
    let mut b = JetMatrix::identity(n, r);
    let mut a: Vec<Jet> = Vec::with_capacity(r);
    // conj(b_ki) * a_k, cached per (k, i)
    let mut weighted = vec![Jet::zero(n); r * r];
    for i in 0..r {
        let mut pivot = h.get(i, i).clone();
        for k in 0..i {
            pivot = &pivot - &(&weighted[k * r + i] * b.get(k, i));
        }
        let value = pivot.constant_term();
        if !(value.re > 0.0) {
            return Err(MetricError::NonPositivePivot { index: i, value });
        }
        let pivot_inv = pivot.inverse()?;
        for j in i + 1..r {
            let mut s = h.get(i, j).clone();
            for k in 0..i {
                s = &s - &(&weighted[k * r + i] * b.get(k, j));
            }
            b.set(i, j, &s * &pivot_inv);
        }
        for j in i + 1..r {
            weighted[i * r + j] = &b.get(i, j).conj() * &pivot;
        }
        a.push(pivot);
    }
    let c = b.conj_transpose().mul(&JetMatrix::diagonal(a.clone()));
    Ok(CholeskyFactors { a, b, c })
}

/// Connection and curvature forms of a metric, in the given holomorphic frame
/// and in the frame adapted to the factorization.
///
/// With `h = b* a b`, `c = b* a`:
/// * `connection = h⁻¹∂h`, `connection_bar = h⁻¹∂̄h`, `curvature = ∂̄(h⁻¹∂h)`;
/// * `upper = ∂b·b⁻¹`, `upper_bar = ∂̄b·b⁻¹` (θ₁, θ̄₁; strictly upper-triangular);
/// * `lower = c⁻¹∂c`, `lower_bar = c⁻¹∂̄c` (θ₂, θ̄₂; lower-triangular);
/// * `frame = upper + lower = b·connection·b⁻¹`, likewise `frame_bar`.
#[derive(Clone, Debug)]
pub struct ConnectionForms {
    pub connection: MatrixForm,
    pub connection_bar: MatrixForm,
    pub curvature: MatrixForm,
    pub upper: MatrixForm,
    pub upper_bar: MatrixForm,
    pub lower: MatrixForm,
    pub lower_bar: MatrixForm,
    pub frame: MatrixForm,
    pub frame_bar: MatrixForm,
    pub factors: CholeskyFactors,
    b: MatrixForm,
    b_inv: MatrixForm,
}

impl ConnectionForms {
    /// `b⁻¹ X b`, taking a frame-level form to the given holomorphic frame.
    pub fn to_metric_frame(&self, x: &MatrixForm) -> MatrixForm {
        &(&self.b_inv * x) * &self.b
    }

    /// `∂̄` of the frame-level connection, `∂̄θ`.
    pub fn frame_curvature(&self) -> Result<MatrixForm, FormError> {
        self.frame.delbar()
    }

    /// The factor `b` as matrix of 0-forms.
    pub fn b(&self) -> &MatrixForm {
        &self.b
    }

    pub fn b_inv(&self) -> &MatrixForm {
        &self.b_inv
    }

    pub fn n(&self) -> usize {
        self.connection.n()
    }

    pub fn rank(&self) -> usize {
        self.connection.rank()
    }

    /// Every form truncated to at most `order`; identities that need one
    /// further derivative are checked on the order-1 truncation.
    pub fn truncate(&self, order: u32) -> ConnectionForms {
        let t = |m: &MatrixForm| m.map(|f| f.truncate(order));
        ConnectionForms {
            connection: t(&self.connection),
            connection_bar: t(&self.connection_bar),
            curvature: t(&self.curvature),
            upper: t(&self.upper),
            upper_bar: t(&self.upper_bar),
            lower: t(&self.lower),
            lower_bar: t(&self.lower_bar),
            frame: t(&self.frame),
            frame_bar: t(&self.frame_bar),
            factors: self.factors.clone(),
            b: t(&self.b),
            b_inv: t(&self.b_inv),
        }
    }

    /// Largest coefficient among the first-order forms and the curvature.
    pub fn scale(&self) -> f64 {
        [&self.connection, &self.connection_bar, &self.curvature, &self.upper, &self.lower, &self.upper_bar, &self.lower_bar]
            .iter()
            .map(|m| m.max_abs())
            .fold(0.0, f64::max)
    }
}

/// The triangular pieces `θ₁, θ̄₁, θ₂, θ̄₂` alone; they need one order of the
/// metric jets.
#[derive(Clone, Debug)]
pub struct FrameForms {
    pub upper: MatrixForm,
    pub upper_bar: MatrixForm,
    pub lower: MatrixForm,
    pub lower_bar: MatrixForm,
    pub factors: CholeskyFactors,
    pub b: MatrixForm,
    pub b_inv: MatrixForm,
}

pub fn frame_forms(metric: &Metric) -> Result<FrameForms, MetricError> {
    if metric.order() < 1 {
        return Err(MetricError::Jet(JetError::InsufficientJetOrder));
    }
    let factors = decompose(metric)?;
    let b = factors.b.to_forms();
    let b_inv = factors.b.inverse()?.to_forms();
    let c = factors.c.to_forms();
    let c_inv = factors.c.inverse()?.to_forms();
    Ok(FrameForms {
        upper: &b.del()? * &b_inv,
        upper_bar: &b.delbar()? * &b_inv,
        lower: &c_inv * &c.del()?,
        lower_bar: &c_inv * &c.delbar()?,
        factors,
        b,
        b_inv,
    })
}

/// Computes every connection form of `metric`. The curvature consumes two
/// orders of the metric jets, the first-order forms one.
pub fn connection(metric: &Metric) -> Result<ConnectionForms, MetricError> {
    if metric.order() < 2 {
        return Err(MetricError::Jet(JetError::InsufficientJetOrder));
    }
    let h = metric.matrix();
    let h_inv = h.inverse()?.to_forms();
    let h_forms = h.to_forms();
    let connection = &h_inv * &h_forms.del()?;
    let connection_bar = &h_inv * &h_forms.delbar()?;
    let curvature = connection.delbar()?;

    let FrameForms { upper, upper_bar, lower, lower_bar, factors, b, b_inv } = frame_forms(metric)?;
    let frame = &upper + &lower;
    let frame_bar = &upper_bar + &lower_bar;
    Ok(ConnectionForms {
        connection,
        connection_bar,
        curvature,
        upper,
        upper_bar,
        lower,
        lower_bar,
        frame,
        frame_bar,
        factors,
        b,
        b_inv,
    })
}

/// `g* h g` for a holomorphic upper-triangular `g` invertible at the base
/// point.
pub fn gauge_transform(metric: &Metric, g: &JetMatrix) -> Result<Metric, MetricError> {
    let r = metric.rank();
    if g.rank() != r {
        return Err(MetricError::Shape { r, expected: r * r, got: g.rank() * g.rank() });
    }
    if g.n() != metric.n() {
        return Err(MetricError::DimensionMismatch);
    }
    validate_gauge(g)?;
    let product = g.conj_transpose().mul(metric.matrix()).mul(g);
    let mut upper = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in i..r {
            upper.push(product.get(i, j).clone());
        }
    }
    Metric::from_upper(r, upper)
}

/// Checks that `g` is upper-triangular, holomorphic and invertible at the
/// base point.
pub fn validate_gauge(g: &JetMatrix) -> Result<(), MetricError> {
    let r = g.rank();
    for i in 0..r {
        for j in 0..r {
            let e = g.get(i, j);
            if i > j && !e.is_zero() {
                return Err(MetricError::NotUpperTriangular { i, j });
            }
            if !e.is_holomorphic() {
                return Err(MetricError::NonHolomorphicGauge { i, j });
            }
        }
        if g.get(i, i).constant_term().norm() == 0.0 {
            return Err(MetricError::Singular);
        }
    }
    Ok(())
}

/// Splits an upper-triangular `g` as `g = a_g b_g` with `a_g` its diagonal
/// and `b_g` unipotent.
pub fn split_gauge(g: &JetMatrix) -> Result<(Vec<Jet>, JetMatrix), MetricError> {
    validate_gauge(g)?;
    let r = g.rank();
    let diag: Vec<Jet> = (0..r).map(|i| g.get(i, i).clone()).collect();
    let mut unipotent = JetMatrix::identity(g.n(), r);
    for i in 0..r {
        let inv = diag[i].inverse()?;
        for j in i + 1..r {
            unipotent.set(i, j, &inv * g.get(i, j));
        }
    }
    Ok((diag, unipotent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Basis, Form};
    use crate::wjet::{Kind, MultiIndex};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn var(i: usize, kind: Kind, n: usize, order: u32) -> Jet {
        Jet::var(i, kind, c(0.0, 0.0), n, order).unwrap()
    }

    fn sigma_f_metric(n: usize, order: u32) -> (Jet, Jet, Metric) {
        let z1 = var(1, Kind::Holomorphic, n, order);
        let zb1 = var(1, Kind::Antiholomorphic, n, order);
        let sigma = &z1 * &zb1;
        let f = z1.clone();
        let h12 = f.conj();
        let h22 = &(&f * &f.conj()) + &sigma.exp();
        let m = Metric::from_upper(2, vec![Jet::one(n).truncate(order), h12, h22]).unwrap();
        (sigma, f, m)
    }

    #[test]
    fn diagonal_metric_factors_trivially() {
        let n = 2;
        let d1 = &Jet::constant(n, c(2.0, 0.0)) + &(&var(1, Kind::Holomorphic, n, 3) * &var(1, Kind::Antiholomorphic, n, 3));
        let d2 = Jet::constant(n, c(3.0, 0.0)).truncate(3);
        let m = Metric::from_upper(2, vec![d1.clone(), Jet::zero(n), d2.clone()]).unwrap();
        let f = decompose(&m).unwrap();
        assert_eq!(f.a, vec![d1, d2]);
        assert!(f.b.get(0, 1).is_zero() && f.b.get(1, 0).is_zero());
        assert_eq!(f.b.get(0, 0), &Jet::one(n));
        assert_eq!(f.b.get(1, 1), &Jet::one(n));
    }

    #[test]
    fn sigma_f_example_factors() {
        let (sigma, f, m) = sigma_f_metric(1, 3);
        let fac = decompose(&m).unwrap();
        assert!((&fac.a[0] - &Jet::one(1)).max_abs() < 1e-15);
        assert!((&fac.a[1] - &sigma.exp()).max_abs() < 1e-14);
        assert!((fac.b.get(0, 1) - &f.conj()).max_abs() < 1e-15);
        assert!(fac.b.get(1, 0).is_zero());
        assert_eq!(fac.b.get(1, 1), &Jet::one(1));
        let rec = fac.reconstruct();
        for (x, y) in rec.entries().iter().zip(m.matrix().entries()) {
            assert!((x - y).max_abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_positive_and_non_hermitian() {
        let n = 1;
        let neg = Metric::from_upper(1, vec![Jet::constant(n, c(-1.0, 0.0))]);
        assert!(matches!(neg, Err(MetricError::NotPositiveDefinite { .. })));
        let z = var(1, Kind::Holomorphic, n, 2);
        let h = JetMatrix::new(2, vec![Jet::one(n), z.clone(), z, Jet::one(n)]).unwrap();
        assert_eq!(Metric::new(h), Err(MetricError::NotHermitian { i: 0, j: 1 }));
    }

    #[test]
    fn identity_metric_has_flat_connection() {
        let m = Metric::new(JetMatrix::identity(2, 2).truncate(3)).unwrap();
        let conn = connection(&m).unwrap();
        assert!(conn.connection.is_zero());
        assert!(conn.curvature.is_zero());
        assert!(conn.upper.is_zero() && conn.lower.is_zero());
    }

    #[test]
    fn rank_one_gaussian_metric() {
        // h = exp(z z̄): θ = z̄ dz, Θ = -dz∧dz̄
        let n = 1;
        let h = (&var(1, Kind::Holomorphic, n, 4) * &var(1, Kind::Antiholomorphic, n, 4)).exp();
        let m = Metric::from_upper(1, vec![h]).unwrap();
        let conn = connection(&m).unwrap();
        let theta = conn.connection.get(0, 0);
        assert_eq!(theta.num_terms(), 1);
        let coeff = theta.coeff(Basis::new(&[0], &[])).unwrap();
        assert!((coeff - &var(1, Kind::Antiholomorphic, n, 3)).max_abs() < 1e-14);
        let curv = conn.curvature.get(0, 0);
        let expected = Form::monomial(Basis::new(&[0], &[0]), Jet::constant(n, c(-1.0, 0.0)));
        assert!((curv - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn diagonal_metric_has_no_unipotent_part() {
        let n = 2;
        let d = (&var(2, Kind::Holomorphic, n, 3) * &var(1, Kind::Antiholomorphic, n, 3)
            + &var(1, Kind::Holomorphic, n, 3) * &var(2, Kind::Antiholomorphic, n, 3))
            .scale_real(0.25)
            .exp();
        let m = Metric::from_upper(2, vec![d.clone(), Jet::zero(n), Jet::one(n).truncate(3)]).unwrap();
        let conn = connection(&m).unwrap();
        assert!(conn.upper.is_zero());
        let expected = Form::scalar(d.inverse().unwrap()) * Form::scalar(d).del().unwrap();
        assert!((conn.lower.get(0, 0) - &expected).max_abs() < 1e-14);
        assert!(conn.lower.get(1, 1).is_zero());
    }

    #[test]
    fn gauge_by_constant_diagonal() {
        let (_, _, m) = sigma_f_metric(1, 3);
        let g = JetMatrix::diagonal(vec![Jet::constant(1, c(2.0, 0.0)), Jet::one(1)]);
        let t = gauge_transform(&m, &g).unwrap();
        let h = m.matrix();
        assert!((t.matrix().get(0, 0) - &h.get(0, 0).scale_real(4.0)).max_abs() < 1e-15);
        assert!((t.matrix().get(0, 1) - &h.get(0, 1).scale_real(2.0)).max_abs() < 1e-15);
        assert!((t.matrix().get(1, 1) - h.get(1, 1)).max_abs() < 1e-15);
        let id = gauge_transform(&m, &JetMatrix::identity(1, 2)).unwrap();
        assert_eq!(id.matrix(), m.matrix());
    }

    #[test]
    fn gauge_validation() {
        let n = 1;
        let zb = var(1, Kind::Antiholomorphic, n, 2);
        let lower = JetMatrix::new(2, vec![Jet::one(n), Jet::zero(n), zb.clone(), Jet::one(n)]).unwrap();
        assert_eq!(validate_gauge(&lower), Err(MetricError::NotUpperTriangular { i: 1, j: 0 }));
        let anti = JetMatrix::new(2, vec![Jet::one(n), zb, Jet::zero(n), Jet::one(n)]).unwrap();
        assert_eq!(validate_gauge(&anti), Err(MetricError::NonHolomorphicGauge { i: 0, j: 1 }));
        let singular = JetMatrix::diagonal(vec![var(1, Kind::Holomorphic, n, 2), Jet::one(n)]);
        assert_eq!(validate_gauge(&singular), Err(MetricError::Singular));
    }

    #[test]
    fn jet_matrix_inverse() {
        let n = 1;
        let z = var(1, Kind::Holomorphic, n, 3);
        let zb = var(1, Kind::Antiholomorphic, n, 3);
        let m = JetMatrix::new(2, vec![z.clone(), Jet::one(n), &Jet::one(n) + &zb, z]).unwrap();
        let inv = m.inverse().unwrap();
        let p = m.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { Jet::one(n) } else { Jet::zero(n) };
                assert!((p.get(i, j) - &expect).max_abs() < 1e-14, "{i}{j}");
            }
        }
        assert_eq!(p.order(), 3);
        let _ = MultiIndex::ONE;
    }
}
