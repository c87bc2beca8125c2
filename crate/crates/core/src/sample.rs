//! Seeded random metrics `h = L* L + I` and holomorphic triangular gauges.
//!
//! Entries of `L` are polynomials in `(z, z̄)` around the base point with
//! coefficients drawn uniformly from the closed unit disk by a ChaCha8
//! generator, so draws are identical on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cholesky::{JetMatrix, Metric};
use crate::wjet::{Jet, MultiIndex, C64, MAX_ORDER};

/// Default total degree of the entries of `L`.
pub const DEFAULT_DEGREE: u32 = 2;

/// A random metric together with the exact polynomial factor it came from.
#[derive(Clone, Debug)]
pub struct MetricSample {
    pub metric: Metric,
    /// Row-major entries of `L` as exact polynomials.
    pub factor: Vec<Jet>,
}

impl MetricSample {
    /// Evaluates `h = L* L + I` at displacement `dz` from the base point.
    pub fn eval(&self, dz: &[C64]) -> DMatrix<C64> {
        let r = self.metric.rank();
        let l = DMatrix::from_fn(r, r, |i, j| self.factor[i * r + j].eval_displacement(dz));
        l.adjoint() * &l + DMatrix::identity(r, r)
    }
}

pub(crate) fn unit_disk(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let x: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let y: f64 = 2.0 * rng.random::<f64>() - 1.0;
        if x * x + y * y <= 1.0 {
            return C64::new(x, y);
        }
    }
}

/// All exponent pairs in `2n` variables with total degree `<= degree`, in a
/// fixed order.
fn monomials(n: usize, degree: u32, holomorphic_only: bool) -> Vec<MultiIndex> {
    let slots = if holomorphic_only { n } else { 2 * n };
    let mut out = Vec::new();
    let mut exps = vec![0u32; slots];
    fn rec(pos: usize, left: u32, exps: &mut Vec<u32>, n: usize, out: &mut Vec<MultiIndex>) {
        if pos == exps.len() {
            let (alpha, beta) = exps.split_at(n.min(exps.len()));
            out.push(MultiIndex::new(alpha, beta));
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(pos + 1, left - e, exps, n, out);
        }
        exps[pos] = 0;
    }
    rec(0, degree, &mut exps, n, &mut out);
    out.sort();
    out
}

fn random_polynomial(rng: &mut ChaCha8Rng, n: usize, degree: u32, holomorphic_only: bool) -> Jet {
    let terms: Vec<(MultiIndex, C64)> = monomials(n, degree, holomorphic_only)
        .into_iter()
        .map(|m| (m, unit_disk(rng)))
        .collect();
    // a polynomial is its own Taylor expansion to any order
    Jet::from_terms(n, MAX_ORDER, terms).expect("degree within limits")
}

/// Random metric with entries of `L` of total degree `<= degree`, truncated
/// to jets of the given order.
pub fn random_metric_sample(seed: u64, r: usize, n: usize, order: u32, degree: u32) -> MetricSample {
    assert!(r >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factor: Vec<Jet> = (0..r * r).map(|_| random_polynomial(&mut rng, n, degree, false)).collect();
    let l = JetMatrix::new(r, factor.iter().map(|j| j.truncate(order)).collect()).expect("square");
    let lstar_l = l.conj_transpose().mul(&l);
    let mut upper = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in i..r {
            let mut e = lstar_l.get(i, j).truncate(order);
            if i == j {
                e = &e + &Jet::one(n);
            }
            upper.push(e);
        }
    }
    let metric = Metric::from_upper(r, upper).expect("L*L + I is Hermitian and positive definite");
    MetricSample { metric, factor }
}

/// Random metric `L* L + I` with quadratic entries in `L`.
pub fn random_metric(seed: u64, r: usize, n: usize, order: u32) -> Metric {
    random_metric_sample(seed, r, n, order, DEFAULT_DEGREE).metric
}

/// Random holomorphic upper-triangular matrix whose diagonal stays away from
/// zero at the base point. With `unipotent` the diagonal is exactly one.
pub fn random_gauge(seed: u64, r: usize, n: usize, order: u32, unipotent: bool) -> JetMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = JetMatrix::identity(n, r);
    for i in 0..r {
        for j in i..r {
            if i == j {
                if unipotent {
                    g.set(i, j, Jet::one(n).truncate(order));
                } else {
                    let mut p = random_polynomial(&mut rng, n, DEFAULT_DEGREE, true).scale_real(0.5);
                    // push the base value out to modulus 1 + |c0|
                    let c0 = p.constant_term();
                    let target = if c0.norm() < 1e-12 { C64::new(1.0, 0.0) } else { c0 * ((1.0 + c0.norm()) / c0.norm()) };
                    p = &p + &Jet::constant(n, target - c0);
                    g.set(i, j, p.truncate(order));
                }
            } else {
                g.set(i, j, random_polynomial(&mut rng, n, DEFAULT_DEGREE, true).truncate(order));
            }
        }
    }
    g
}
