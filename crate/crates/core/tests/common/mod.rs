#![allow(dead_code)]

use chern_core::exterior::{Basis, Form, MatrixForm};
use chern_core::wjet::{Jet, MultiIndex, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn coeff(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Dense random jet: every monomial of degree `<= order` gets a coefficient.
pub fn jet(rng: &mut ChaCha8Rng, n: usize, order: u32) -> Jet {
    let mut terms = Vec::new();
    let mut exps = vec![0u32; 2 * n];
    loop {
        let deg: u32 = exps.iter().sum();
        if deg <= order {
            terms.push((MultiIndex::new(&exps[..n], &exps[n..]), coeff(rng)));
        }
        let mut i = 0;
        loop {
            if i == exps.len() {
                return Jet::from_terms(n, order, terms).unwrap();
            }
            exps[i] += 1;
            if exps[i] <= order {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Random subset of `0..n` as a sorted index list.
fn subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        all.swap(i, j);
    }
    let mut s = all[..size].to_vec();
    s.sort();
    s
}

/// Random form of pure degree `(p, q)` with a few terms.
pub fn form(rng: &mut ChaCha8Rng, n: usize, order: u32, p: usize, q: usize) -> Form {
    let mut f = Form::zero_with_order(n, order);
    for _ in 0..3 {
        let basis = Basis::new(&subset(rng, n, p), &subset(rng, n, q));
        f = &f + &Form::monomial(basis, jet(rng, n, order));
    }
    f
}

/// Random mixed-degree form.
pub fn mixed_form(rng: &mut ChaCha8Rng, n: usize, order: u32) -> Form {
    let mut f = Form::zero_with_order(n, order);
    for _ in 0..4 {
        let p = rng.random_range(0..=n.min(2));
        let q = rng.random_range(0..=n.min(2));
        f = &f + &form(rng, n, order, p, q);
    }
    f
}

pub fn matrix_form(rng: &mut ChaCha8Rng, n: usize, r: usize, order: u32, p: usize, q: usize) -> MatrixForm {
    let entries = (0..r * r).map(|_| form(rng, n, order, p, q)).collect();
    MatrixForm::from_entries(n, r, entries).unwrap()
}

pub fn jet_diff(a: &Jet, b: &Jet) -> f64 {
    (a - b).max_abs()
}

pub fn form_diff(a: &Form, b: &Form) -> f64 {
    (a - b).max_abs()
}

pub fn matrix_diff(a: &MatrixForm, b: &MatrixForm) -> f64 {
    (a - b).max_abs()
}

use chern_core::cholesky::Metric;
use chern_core::wjet::Kind;

pub fn var(n: usize, i: usize, kind: Kind, order: u32) -> Jet {
    Jet::var(i, kind, c(0.0, 0.0), n, order).unwrap()
}

/// Real `σ` and complex `f` on `C²` behind the sigma,f metric.
pub fn sigma_and_f(order: u32, holomorphic_f: bool) -> (Jet, Jet) {
    let n = 2;
    let z1 = var(n, 1, Kind::Holomorphic, order);
    let z2 = var(n, 2, Kind::Holomorphic, order);
    let w1 = z1.conj();
    let w2 = z2.conj();
    let cross = &(&z1 * &w2) + &(&z2 * &w1);
    let sigma = &(&(&z1 * &w1) + &(&z2 * &w2).scale_real(0.5)) + &cross.scale_real(0.25);
    let mut f = &(&z1 + &(&z2 * &z2).scale_real(0.5)) + &(&z1 * &z2).scale(c(0.3, -0.2));
    if !holomorphic_f {
        f = &f + &(&w1 * &z2).scale_real(0.4);
    }
    (sigma, f)
}

/// `h = [[1, f̄], [f, |f|² + e^σ]]`, i.e. `a = diag(1, e^σ)`, `b = [[1, f̄], [0, 1]]`.
pub fn sigma_f_metric(sigma: &Jet, f: &Jet) -> Metric {
    let fb = f.conj();
    let h22 = &(f * &fb) + &sigma.exp();
    Metric::from_upper(2, vec![Jet::one(2), fb, h22]).unwrap()
}

/// `h = exp(z₁ z̄₁)` on `C¹`.
pub fn gaussian_metric(order: u32) -> Metric {
    let z = var(1, 1, Kind::Holomorphic, order);
    Metric::from_upper(1, vec![(&z * &z.conj()).exp()]).unwrap()
}
