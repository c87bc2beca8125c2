mod common;

use chern_core::mdsl::*;
use chern_core::wjet::{Kind, C64};
use common::c;
use proptest::prelude::*;

const CORPUS: &str = include_str!("data/expressions.txt");

fn corpus() -> impl Iterator<Item = &'static str> {
    CORPUS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[test]
fn corpus_round_trips() {
    assert!(corpus().count() >= 30);
    for src in corpus() {
        let ast = parse(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = ast.to_string();
        assert_eq!(parse(&printed).unwrap(), ast, "{src} printed as {printed}");
    }
}

#[test]
fn grammar_examples() {
    let e = parse("exp(z1*conj(z1))").unwrap();
    let v = Box::new(Expr::Var(1));
    assert_eq!(e, Expr::Exp(Box::new(Expr::Mul(v.clone(), Box::new(Expr::Conj(v))))));
    let e = parse("z1^2 - (3+2i)*conj(z2)").unwrap();
    let rhs = Expr::Mul(Box::new(Expr::lit(3.0, 2.0)), Box::new(Expr::Conj(Box::new(Expr::Var(2)))));
    assert_eq!(e, Expr::Sub(Box::new(Expr::Pow(Box::new(Expr::Var(1)), 2)), Box::new(rhs)));
    // unary minus binds tighter than ^
    assert_eq!(parse("-z1^2").unwrap(), Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::Var(1)))), 2));
}

#[test]
fn errors_are_positioned() {
    let cases: [(&str, usize); 10] = [
        ("1 + ", 5),
        ("z1 * ", 6),
        ("(z1", 4),
        ("z1)", 3),
        ("foo(z1)", 1),
        ("exp(z1, z2)", 1),
        ("z0", 1),
        ("2 $ 3", 3),
        ("z1^z2", 4),
        ("conj()", 1),
    ];
    for (src, col) in cases {
        let err = parse(src).unwrap_err();
        assert_eq!((err.line, err.col), (1, col), "{src}: {err}");
        assert!(err.to_string().starts_with(&format!("1:{col}:")), "{err}");
    }
    assert!(matches!(parse("foo(z1)").unwrap_err().kind, ParseErrorKind::UnknownIdentifier(_)));
    assert!(matches!(parse("exp(z1, z2)").unwrap_err().kind, ParseErrorKind::Arity { .. }));
    assert!(matches!(parse("2 $ 3").unwrap_err().kind, ParseErrorKind::Lexical(_)));
    assert!(matches!(parse("(z1").unwrap_err().kind, ParseErrorKind::UnexpectedToken { .. }));
}

#[test]
fn evaluation_examples() {
    let ctx = EvalContext::at_origin(1, 2);
    let j = eval_expr(&parse("z1*conj(z1)").unwrap(), &ctx).unwrap();
    assert_eq!(j.terms().len(), 1);
    assert_eq!(j.coeff(chern_core::wjet::MultiIndex::new(&[1], &[1])), c(1.0, 0.0));
    let geo = eval_expr(&parse("1/(1 - z1)").unwrap(), &ctx).unwrap();
    for k in 0..=2 {
        assert_eq!(geo.coeff(chern_core::wjet::MultiIndex::new(&[k], &[])), c(1.0, 0.0));
    }
    let ctx = EvalContext::at_origin(1, 3);
    let e = eval_expr(&parse("exp(z1)").unwrap(), &ctx).unwrap();
    for (k, f) in [1.0, 1.0, 2.0, 6.0].iter().enumerate() {
        assert!((e.coeff(chern_core::wjet::MultiIndex::new(&[k as u32], &[])) - c(1.0 / f, 0.0)).norm() < 1e-15);
    }
    let err = eval_expr(&parse("z3").unwrap(), &ctx).unwrap_err();
    assert_eq!(err, EvalError::UnknownVariable { index: 3, n: 1 });
    assert!(eval_expr(&parse("1/z1").unwrap(), &ctx).is_err());
    assert!(eval_expr(&parse("log(-1 + z1)").unwrap(), &ctx).is_err());
}

#[test]
fn example_files_load() {
    let spec = parse_metric_file(include_str!("../../../data/sigma_f.metric")).unwrap();
    let m = load_metric(&spec).unwrap();
    assert_eq!((m.rank(), m.n(), m.order()), (2, 2, 4));
    let spec = parse_metric_file(include_str!("../../../data/gauge.metric")).unwrap();
    assert!(load_gauge(&spec).unwrap().is_some());
    let spec = parse_metric_file(include_str!("../../../data/diagonal.metric")).unwrap();
    load_metric(&spec).unwrap();
    let spec = parse_metric_file(include_str!("../../../data/gaussian.metric")).unwrap();
    load_metric(&spec).unwrap();
}

/// Direct recursive evaluation of the function at a point.
fn value(e: &Expr, z: &[C64]) -> C64 {
    match e {
        Expr::Lit { re, im } => c(*re, *im),
        Expr::Var(i) => z[i - 1],
        Expr::Conj(a) => value(a, z).conj(),
        Expr::Neg(a) => -value(a, z),
        Expr::Add(a, b) => value(a, z) + value(b, z),
        Expr::Sub(a, b) => value(a, z) - value(b, z),
        Expr::Mul(a, b) => value(a, z) * value(b, z),
        Expr::Div(a, b) => value(a, z) / value(b, z),
        Expr::Pow(a, k) => value(a, z).powu(*k),
        Expr::Exp(a) => value(a, z).exp(),
        Expr::Log(a) => value(a, z).ln(),
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1usize..=2).prop_map(Expr::Var),
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Expr::lit(re, im)),
        (0.0f64..2.0).prop_map(|re| Expr::lit(re, 0.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Conj(b(a))),
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), 0u32..4).prop_map(move |(x, k)| Expr::Pow(b(x), k)),
            inner.clone().prop_map(move |a| Expr::Exp(b(a))),
            inner.prop_map(move |a| Expr::Log(b(a))),
        ]
    })
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_round_trips(e in arb_expr()) {
        // parsing folds literal arithmetic, so compare from the first reparse on
        let once = parse(&e.to_string()).unwrap();
        prop_assert_eq!(parse(&once.to_string()).unwrap(), once.clone());
        let ctx = EvalContext { n: 2, order: 2, base: vec![c(0.3, 0.1), c(-0.2, 0.4)] };
        if let (Ok(a), Ok(b)) = (eval_expr(&e, &ctx), eval_expr(&once, &ctx)) {
            prop_assert!(close(a.constant_term(), b.constant_term(), 1e-12));
        }
    }

    #[test]
    fn evaluation_matches_pointwise_oracle(e in arb_expr(), x in -0.8f64..0.8, y in -0.8f64..0.8, u in -0.8f64..0.8) {
        let base = vec![c(x, y), c(u, -x)];
        let exact = value(&e, &base);
        prop_assume!(exact.is_finite() && exact.norm() < 1e6);
        let ctx = EvalContext { n: 2, order: 1, base: base.clone() };
        let Ok(jet) = eval_expr(&e, &ctx) else { return Ok(()) };
        prop_assert!(close(jet.constant_term(), exact, 1e-9), "{} vs {}", jet.constant_term(), exact);

        // Wirtinger derivatives against central differences of the oracle
        let h = 1e-6;
        let shifted = |dx: f64, dy: f64| {
            let mut p = base.clone();
            p[0] += c(dx, dy);
            value(&e, &p)
        };
        let fx = (shifted(h, 0.0) - shifted(-h, 0.0)) / (2.0 * h);
        let fy = (shifted(0.0, h) - shifted(0.0, -h)) / (2.0 * h);
        let dz = (fx - fy * c(0.0, 1.0)) * 0.5;
        let dzb = (fx + fy * c(0.0, 1.0)) * 0.5;
        let scale = exact.norm().max(dz.norm()).max(dzb.norm()).max(1.0);
        prop_assume!(scale < 1e3);
        let jd = jet.derive(0, Kind::Holomorphic).unwrap().constant_term();
        let jdb = jet.derive(0, Kind::Antiholomorphic).unwrap().constant_term();
        prop_assert!((jd - dz).norm() <= 1e-5 * scale, "{jd} vs {dz}");
        prop_assert!((jdb - dzb).norm() <= 1e-5 * scale, "{jdb} vs {dzb}");
    }

    #[test]
    fn double_conjugation_is_identity(e in arb_expr()) {
        let ctx = EvalContext { n: 2, order: 3, base: vec![c(0.1, 0.2), c(0.0, -0.3)] };
        let twice = Expr::Conj(Box::new(Expr::Conj(Box::new(e.clone()))));
        prop_assert_eq!(eval_expr(&twice, &ctx).ok(), eval_expr(&e, &ctx).ok());
    }
}
