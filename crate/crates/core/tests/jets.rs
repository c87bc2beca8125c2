mod common;

use chern_core::wjet::{Jet, JetError, Kind, MultiIndex, C64, UNBOUNDED};
use common::{c, jet, jet_diff, rng};
use proptest::prelude::*;

const KINDS: [Kind; 2] = [Kind::Holomorphic, Kind::Antiholomorphic];

#[test]
fn derivative_of_monomial() {
    let z1 = Jet::var(1, Kind::Holomorphic, c(0.0, 0.0), 2, 4).unwrap();
    let zb2 = Jet::var(2, Kind::Antiholomorphic, c(0.0, 0.0), 2, 4).unwrap();
    let f = &(&z1 * &z1) * &zb2;
    let d = f.derive(0, Kind::Holomorphic).unwrap();
    assert_eq!(d.terms(), &[(MultiIndex::new(&[1, 0], &[0, 1]), c(2.0, 0.0))]);
    assert_eq!(d.order(), 3);
}

#[test]
fn derivative_of_constant_vanishes() {
    let k = Jet::constant(3, c(2.0, -1.0));
    for kind in KINDS {
        assert!(k.derive(1, kind).unwrap().is_zero());
    }
    assert_eq!(k.order(), UNBOUNDED);
}

#[test]
fn order_zero_cannot_be_differentiated() {
    let j = Jet::var(1, Kind::Holomorphic, c(1.0, 0.0), 1, 0).unwrap();
    assert_eq!(j.derive(0, Kind::Holomorphic), Err(JetError::InsufficientJetOrder));
}

#[test]
fn mixed_orders_meet_at_the_minimum() {
    let mut g = rng(5);
    let a = jet(&mut g, 2, 4);
    let b = jet(&mut g, 2, 2);
    assert_eq!((&a * &b).order(), 2);
    assert_eq!((&a + &b).order(), 2);
    assert_eq!((&a + &Jet::one(2)).order(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz(seed in any::<u64>(), i in 0usize..2, hol in any::<bool>()) {
        let mut g = rng(seed);
        let (a, b) = (jet(&mut g, 2, 3), jet(&mut g, 2, 3));
        let kind = if hol { Kind::Holomorphic } else { Kind::Antiholomorphic };
        let lhs = (&a * &b).derive(i, kind).unwrap();
        let rhs = &(&a.derive(i, kind).unwrap() * &b) + &(&a * &b.derive(i, kind).unwrap());
        prop_assert!(jet_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn product_is_commutative_and_associative(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (a, b, d) = (jet(&mut g, 2, 3), jet(&mut g, 2, 3), jet(&mut g, 2, 3));
        prop_assert!(jet_diff(&(&a * &b), &(&b * &a)) < 1e-13);
        prop_assert!(jet_diff(&(&(&a * &b) * &d), &(&a * &(&b * &d))) < 1e-12);
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = &jet(&mut g, 2, 3) + &Jet::constant(2, c(2.0, 0.5));
        let inv = a.inverse().unwrap();
        let one = Jet::one(2);
        prop_assert!(jet_diff(&(&a * &inv), &one) < 1e-12);
        prop_assert!(jet_diff(&(&inv * &a), &one) < 1e-12);
    }

    #[test]
    fn exp_and_log_are_inverse(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = &jet(&mut g, 2, 3).scale_real(0.3) + &Jet::constant(2, c(1.5, 0.2));
        let back = a.log().unwrap().exp();
        prop_assert!(jet_diff(&back, &a) <= 1e-12 * a.max_abs());
        let b = jet(&mut g, 2, 3).scale_real(0.3);
        let back = b.exp().log().unwrap();
        prop_assert!(jet_diff(&back, &b) <= 1e-12 * b.max_abs().max(1.0));
    }

    #[test]
    fn derivative_chains_respect_order(order in 0u32..5, steps in proptest::collection::vec((0usize..2, any::<bool>()), 0..7)) {
        let mut j = Jet::var(1, Kind::Holomorphic, c(0.5, 0.0), 2, order).unwrap();
        let mut ok = true;
        for (i, hol) in &steps {
            let kind = if *hol { Kind::Holomorphic } else { Kind::Antiholomorphic };
            match j.derive(*i, kind) {
                Ok(d) => j = d,
                Err(JetError::InsufficientJetOrder) => { ok = false; break; }
                Err(e) => panic!("{e}"),
            }
        }
        prop_assert_eq!(ok, steps.len() as u32 <= order);
    }

    #[test]
    fn mixed_partials_commute(seed in any::<u64>(), i in 0usize..3, j in 0usize..3, ki in 0usize..2, kj in 0usize..2) {
        let a = jet(&mut rng(seed), 3, 3);
        let one = a.derive(i, KINDS[ki]).unwrap().derive(j, KINDS[kj]).unwrap();
        let other = a.derive(j, KINDS[kj]).unwrap().derive(i, KINDS[ki]).unwrap();
        prop_assert_eq!(one, other);
    }

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>()) {
        let a = jet(&mut rng(seed), 2, 3);
        prop_assert_eq!(a.conj().conj(), a);
    }
}

#[test]
fn evaluation_matches_series() {
    // 1/(1 - z1) at order 3, evaluated at small displacement
    let z = Jet::var(1, Kind::Holomorphic, c(0.0, 0.0), 1, 3).unwrap();
    let g = (&Jet::one(1) - &z).inverse().unwrap();
    let dz = [C64::new(0.1, 0.0)];
    assert!((g.eval_displacement(&dz) - c(1.111, 0.0)).norm() < 1e-12);
}
