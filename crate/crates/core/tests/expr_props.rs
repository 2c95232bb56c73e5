use proptest::prelude::*;
use walker_core::expr::{
    canonicalize, is_zero_symbolic, parse, render, Coord, Expr, NumericPoint, Param, Symbol, ZeroTest, ZeroVerdict,
};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::x()),
        Just(Expr::t()),
        Just(Expr::param(Param::C(1))),
        Just(Expr::param(Param::C(2))),
        (1i64..5).prop_map(Expr::int),
        (1i64..4, 2i64..5).prop_map(|(n, d)| Expr::frac(n, d)),
    ]
}

/// Expressions that stay positive on the box `[0.5, 2]^n`.
fn positive() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), -2i64..4).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| a.sqrt()),
            inner.clone().prop_map(|a| Expr::exp(&(a / Expr::int(4)))),
            inner.clone().prop_map(|a| (Expr::one() + a).ln() + Expr::one()),
            inner.clone().prop_map(|a| a.atan() + Expr::int(2)),
        ]
    })
}

fn smooth() -> impl Strategy<Value = Expr> {
    (positive(), positive(), positive()).prop_map(|(a, b, c)| a - b * c)
}

fn box_point(x: f64, t: f64, c1: f64, c2: f64) -> NumericPoint {
    NumericPoint::new().with(Coord::X, x).with(Coord::T, t).with(Param::C(1), c1).with(Param::C(2), c2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_render(e in smooth()) {
        let text = render(&e);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "text {}", text);
    }

    #[test]
    fn normal_form_ignores_order(terms in prop::collection::vec(positive(), 1..6), seed in any::<u64>()) {
        let direct = Expr::add_all(terms.clone());
        let mut shuffled = terms.clone();
        let n = shuffled.len();
        for i in 0..n {
            let j = (seed as usize).wrapping_add(i * 7) % n;
            shuffled.swap(i, j);
        }
        let nested = shuffled.iter().rev().fold(Expr::zero(), |acc, t| t.clone() + acc);
        prop_assert_eq!(&direct, &nested);
        let p1 = Expr::mul_all(terms.clone());
        let p2 = shuffled.iter().fold(Expr::one(), |acc, t| acc * t);
        prop_assert_eq!(p1, p2);
    }

    #[test]
    fn mixed_partials_commute(e in smooth()) {
        let xt = e.diff(Coord::X).diff(Coord::T);
        let tx = e.diff(Coord::T).diff(Coord::X);
        if xt != tx {
            prop_assert_eq!(canonicalize(&(xt - tx)), Some(Expr::zero()));
        }
    }

    #[test]
    fn derivative_matches_central_difference(
        e in smooth(),
        x in 0.6f64..1.9, t in 0.6f64..1.9, c1 in 0.5f64..2.0, c2 in 0.5f64..2.0,
    ) {
        let d = e.diff(Coord::X);
        let h = 1e-5;
        let p = box_point(x, t, c1, c2);
        let (Ok(exact), Ok(hi), Ok(lo)) = (
            d.eval(&p),
            e.eval(&box_point(x + h, t, c1, c2)),
            e.eval(&box_point(x - h, t, c1, c2)),
        ) else {
            return Ok(());
        };
        let fd = (hi - lo) / (2.0 * h);
        let scale = exact.abs().max(hi.abs()).max(1.0);
        prop_assert!((fd - exact).abs() <= 1e-6 * scale, "fd {} exact {} for {}", fd, exact, e);
    }

    #[test]
    fn symbolic_zero_is_sound(e in smooth(), f in smooth()) {
        let diff = e.clone() * f.clone() - f * e.clone();
        prop_assert_eq!(is_zero_symbolic(&diff), Some(true));
        let g = e.clone() - e.clone().sqrt().powi(2);
        if is_zero_symbolic(&g) == Some(true) {
            let v = ZeroTest { numeric_only: true, ..ZeroTest::default() }.run(&g);
            prop_assert!(!matches!(v, ZeroVerdict::NonZero(_)));
        }
    }
}

#[test]
fn sign_symbols_sample_plus_minus_one() {
    let e = parse("eps*x").unwrap();
    let syms = e.free_symbols();
    assert!(syms.contains(&Symbol::Param(Param::Eps)));
    assert_eq!(ZeroTest::default().run(&parse("eps^2 - 1").unwrap()), ZeroVerdict::ZeroSymbolic);
}
