mod common;

use chern_core::exterior::{Basis, Form, MatrixForm};
use chern_core::wjet::{Jet, Kind};
use common::*;
use proptest::prelude::*;

fn z(n: usize, i: usize, kind: Kind, order: u32) -> Jet {
    Jet::var(i, kind, c(0.0, 0.0), n, order).unwrap()
}

#[test]
fn wedge_signs() {
    let (dz1, dz2) = (Form::dz(2, 0), Form::dz(2, 1));
    assert!((&dz1 * &dz1).is_zero());
    assert_eq!(&dz2 * &dz1, -(&dz1 * &dz2));
    assert_eq!((&dz1 * &dz2).coeff(Basis::new(&[0, 1], &[])), Some(&Jet::one(2)));
    let dzb1 = Form::dzbar(2, 0);
    assert_eq!((&dzb1 * &dz2).coeff(Basis::new(&[1], &[0])), Some(&-Jet::one(2)));
}

#[test]
fn del_and_delbar_examples() {
    let n = 1;
    let zz = &z(n, 1, Kind::Holomorphic, 3) * &z(n, 1, Kind::Antiholomorphic, 3);
    let d = Form::scalar(zz).del().unwrap();
    assert_eq!(d, Form::monomial(Basis::new(&[0], &[]), z(n, 1, Kind::Antiholomorphic, 2)));

    let f = Form::monomial(Basis::new(&[0], &[]), z(n, 1, Kind::Antiholomorphic, 3));
    let db = f.delbar().unwrap();
    assert_eq!(db.coeff(Basis::new(&[0], &[0])).unwrap().constant_term(), c(-1.0, 0.0));
    assert_eq!(db.num_terms(), 1);
}

#[test]
fn trace_examples() {
    assert_eq!(MatrixForm::identity(2, 3).trace(), Form::scalar(Jet::constant(2, c(3.0, 0.0))));
    let mut g = rng(1);
    let mut upper = MatrixForm::zero(2, 3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        upper.set(i, j, form(&mut g, 2, 2, 1, 1));
    }
    assert!(upper.trace().is_zero());
}

#[test]
fn extract_and_commutator_examples() {
    let f = &Form::dz(1, 0) + &Form::dzbar(1, 0);
    assert_eq!(f.extract_degree(1, 0), Form::dz(1, 0));
    let mut g = rng(2);
    let a = MatrixForm::from_entries(3, 1, vec![form(&mut g, 3, 2, 1, 0)]).unwrap();
    let sq = &a * &a;
    assert!(matrix_diff(&a.commutator(&a).unwrap(), &sq.scale_real(2.0)) < 1e-14);
    // an odd scalar form squares to zero
    assert!(sq.max_abs() < 1e-14);
}

/// Slot of each basis differential in canonical order: dz_0..dz_{n-1}, then dz̄.
fn slots(b: Basis, n: usize) -> Vec<usize> {
    let mut v = b.hol_indices();
    v.extend(b.anti_indices().into_iter().map(|i| n + i));
    v
}

/// Brute-force wedge: concatenate differentials and count inversions.
fn wedge_oracle(a: &Form, b: &Form) -> Form {
    let n = a.n();
    let mut out = Form::zero(n);
    for (ba, ca) in a.terms() {
        for (bb, cb) in b.terms() {
            let seq: Vec<usize> = slots(*ba, n).into_iter().chain(slots(*bb, n)).collect();
            let mut sorted = seq.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() < seq.len() {
                continue;
            }
            let inversions = (0..seq.len()).flat_map(|i| (i + 1..seq.len()).map(move |j| (i, j))).filter(|&(i, j)| seq[i] > seq[j]).count();
            let hol: Vec<usize> = sorted.iter().filter(|&&s| s < n).copied().collect();
            let anti: Vec<usize> = sorted.iter().filter(|&&s| s >= n).map(|s| s - n).collect();
            let coeff = (ca * cb).scale_real(if inversions % 2 == 0 { 1.0 } else { -1.0 });
            out = &out + &Form::monomial(Basis::new(&hol, &anti), coeff);
        }
    }
    out
}

fn scalar_form_degree(f: &Form) -> u32 {
    f.degrees().iter().map(|(p, q)| p + q).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wedge_matches_component_expansion(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = mixed_form(&mut g, 3, 2);
        let b = mixed_form(&mut g, 3, 2);
        prop_assert!(form_diff(&(&a * &b), &wedge_oracle(&a, &b)) < 1e-13);
    }

    #[test]
    fn matrix_wedge_matches_component_expansion(seed in any::<u64>()) {
        let mut g = rng(seed);
        let p = (0..4).map(|_| &form(&mut g, 3, 2, 1, 0) + &form(&mut g, 3, 2, 0, 1)).collect();
        let q = (0..4).map(|_| &form(&mut g, 3, 2, 1, 0) + &form(&mut g, 3, 2, 0, 1)).collect();
        let a = MatrixForm::from_entries(3, 2, p).unwrap();
        let b = MatrixForm::from_entries(3, 2, q).unwrap();
        let ab = &a * &b;
        for i in 0..2 {
            for j in 0..2 {
                let expect = &wedge_oracle(a.get(i, 0), b.get(0, j)) + &wedge_oracle(a.get(i, 1), b.get(1, j));
                prop_assert!(form_diff(ab.get(i, j), &expect) < 1e-13);
            }
        }
    }

    #[test]
    fn differentials_square_to_zero(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = MatrixForm::from_entries(3, 2, (0..4).map(|_| mixed_form(&mut g, 3, 3)).collect()).unwrap();
        let s = a.max_abs();
        prop_assert!(a.del().unwrap().del().unwrap().max_abs() <= 1e-12 * s);
        prop_assert!(a.delbar().unwrap().delbar().unwrap().max_abs() <= 1e-12 * s);
        let mixed = &a.del().unwrap().delbar().unwrap() + &a.delbar().unwrap().del().unwrap();
        prop_assert!(mixed.max_abs() <= 1e-12 * s);
        prop_assert!(a.d().unwrap().d().unwrap().max_abs() <= 1e-12 * s);
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let mut g = rng(seed);
        let a = matrix_form(&mut g, 3, 2, 3, p, q);
        let b = matrix_form(&mut g, 3, 2, 3, 1, 1);
        let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
        let s = a.max_abs() * b.max_abs();
        let lhs = (&a * &b).del().unwrap();
        let rhs = &(&a.del().unwrap() * &b) + &(&a * &b.del().unwrap()).scale_real(sign);
        prop_assert!(matrix_diff(&lhs, &rhs) <= 1e-12 * s);
        let lhs = (&a * &b).delbar().unwrap();
        let rhs = &(&a.delbar().unwrap() * &b) + &(&a * &b.delbar().unwrap()).scale_real(sign);
        prop_assert!(matrix_diff(&lhs, &rhs) <= 1e-12 * s);
    }

    #[test]
    fn graded_trace_cyclicity(seed in any::<u64>(), p in 0usize..3, q in 0usize..3, p2 in 0usize..2, q2 in 0usize..3) {
        let mut g = rng(seed);
        let a = matrix_form(&mut g, 3, 3, 2, p, q);
        let b = matrix_form(&mut g, 3, 3, 2, p2, q2);
        let sign = if ((p + q) * (p2 + q2)) % 2 == 0 { 1.0 } else { -1.0 };
        let diff = &(&a * &b).trace() - &(&b * &a).trace().scale_real(sign);
        prop_assert!(diff.max_abs() <= 1e-12 * a.max_abs() * b.max_abs());
    }

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>()) {
        let f = mixed_form(&mut rng(seed), 3, 2);
        prop_assert_eq!(f.conj().conj(), f.clone());
        // conjugation swaps the bidegree
        for (p, q) in f.conj().degrees() {
            prop_assert!(f.degrees().contains(&(q, p)));
        }
    }

    #[test]
    fn forms_of_top_degree_annihilate(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = form(&mut g, 2, 2, 2, 1);
        let b = form(&mut g, 2, 2, 1, 1);
        prop_assert!((&a * &b).is_zero());
        prop_assert_eq!(scalar_form_degree(&a), 3);
    }
}
