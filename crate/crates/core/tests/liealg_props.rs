use num_rational::BigRational;
use proptest::prelude::*;
use walker_core::catalog::builtin;
use walker_core::expr::{is_zero_symbolic, Expr, Rational};
use walker_core::jets::{jet_symbols, prolong2};
use walker_core::liealg::{
    adjoint_numeric, generators, subalgebra_closed, AdConvention, CoeffVector, StructureConstants, Subalgebra, DIM,
};

fn rat(n: i64) -> Rational {
    BigRational::from_integer(n.into())
}

fn vector() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(-3i64..4, DIM).prop_map(|v| v.into_iter().map(rat).collect())
}

fn mat_mul(a: &[[f64; DIM]; DIM], b: &[[f64; DIM]; DIM]) -> [[f64; DIM]; DIM] {
    let mut out = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = (0..DIM).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn two_dim() -> Vec<Subalgebra> {
    builtin().iter().filter(|e| e.id.starts_with("twodim.")).filter_map(|e| e.subalgebra()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_on_random_elements(u in vector(), v in vector(), w in vector()) {
        let sc = StructureConstants::standard();
        let (u, v, w) = (CoeffVector::from_rationals(&u), CoeffVector::from_rationals(&v), CoeffVector::from_rationals(&w));
        let sum = sc.bracket(&u, &sc.bracket(&v, &w))
            .add(&sc.bracket(&v, &sc.bracket(&w, &u)))
            .add(&sc.bracket(&w, &sc.bracket(&u, &v)));
        for e in sum.0.iter() {
            prop_assert_eq!(is_zero_symbolic(e), Some(true));
        }
    }

    #[test]
    fn adjoint_group_law(i in 1usize..=DIM, s in -2.0f64..2.0, s2 in -2.0f64..2.0) {
        let sc = StructureConstants::standard();
        for conv in [AdConvention::Plus, AdConvention::Minus] {
            let lhs = mat_mul(&adjoint_numeric(sc, i, s, conv), &adjoint_numeric(sc, i, s2, conv));
            let rhs = adjoint_numeric(sc, i, s + s2, conv);
            for r in 0..DIM {
                for c in 0..DIM {
                    let scale = rhs[r][c].abs().max(1.0);
                    prop_assert!((lhs[r][c] - rhs[r][c]).abs() < 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn closure_survives_change_of_basis(
        idx in 0usize..54,
        m in ((-3i64..4), (-3i64..4), (-3i64..4), (-3i64..4)).prop_filter("invertible", |(p, q, r, s)| p * s != q * r),
    ) {
        let sc = StructureConstants::standard();
        let h = &two_dim()[idx];
        let (p, q, r, s) = m;
        let combine = |a: i64, b: i64| h.gens[0].scale(&Expr::int(a)).add(&h.gens[1].scale(&Expr::int(b)));
        let mut k = Subalgebra::new(format!("{}'", h.name), vec![combine(p, q), combine(r, s)]);
        k.params = h.params.clone();
        prop_assert!(subalgebra_closed(&k, sc).closed, "{} recombined by {:?}", h, m);
    }

    #[test]
    fn prolongation_is_linear(i in 0usize..DIM, j in 0usize..DIM, a in -3i64..4, b in -3i64..4) {
        let g = generators();
        let (ea, eb) = (Expr::int(a), Expr::int(b));
        let combined = prolong2(&g[i].scale(&ea).add(&g[j].scale(&eb)));
        let (pi, pj) = (prolong2(&g[i]), prolong2(&g[j]));
        for s in jet_symbols() {
            let diff = combined.coeff(&s) - (&ea * pi.coeff(&s) + &eb * pj.coeff(&s));
            prop_assert_eq!(is_zero_symbolic(&diff), Some(true), "coefficient of {}", s);
        }
    }
}

#[test]
fn every_two_dimensional_entry_closes() {
    let sc = StructureConstants::standard();
    let all = two_dim();
    assert_eq!(all.len(), 54);
    for h in &all {
        let c = subalgebra_closed(h, sc);
        assert!(c.closed, "{}: {:?}", h.name, c.reason);
    }
}
