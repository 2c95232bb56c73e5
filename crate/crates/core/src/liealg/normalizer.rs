use num_traits::Zero;

use super::{StructureConstants, DIM};
use crate::expr::Rational;
use crate::linalg;

/// Solutions of `[x, Y] = lambda*x + mu*Y` for one eigenvalue `mu` of `ad_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizerBranch {
    pub mu: Rational,
    /// Kernel basis; each entry is `(Y, lambda)`.
    pub solutions: Vec<(Vec<Rational>, Rational)>,
    /// Dimension of the span of `x` and every solution `Y`, minus one.
    pub new_directions: usize,
}

/// For `mu` outside the spectrum of `ad_x` the only solutions are multiples
/// of `x`, so one branch per rational eigenvalue covers everything.
pub fn normalizer_solve(sc: &StructureConstants, x: &[Rational]) -> Vec<NormalizerBranch> {
    let ad = sc.ad_of(x);
    let roots = linalg::rational_roots(&linalg::char_poly(&ad));
    let mut out = Vec::new();
    for mu in roots {
        // unknowns (Y_1..Y_7, lambda)
        let mut m = linalg::zeros(DIM, DIM + 1);
        for i in 0..DIM {
            for k in 0..DIM {
                m[i][k] = ad[i][k].clone();
            }
            m[i][i] -= &mu;
            m[i][DIM] = -x[i].clone();
        }
        let ker = linalg::kernel(&m, DIM + 1);
        let solutions: Vec<(Vec<Rational>, Rational)> =
            ker.into_iter().map(|v| (v[..DIM].to_vec(), v[DIM].clone())).collect();
        let mut span: Vec<Vec<Rational>> = vec![x.to_vec()];
        span.extend(solutions.iter().map(|(y, _)| y.clone()));
        let new_directions = linalg::rank(&span) - 1;
        out.push(NormalizerBranch { mu, solutions, new_directions });
    }
    out
}

/// Residual of `[x, y] - lambda*x - mu*y`; all zero for a solution.
pub fn normalizer_residual(
    sc: &StructureConstants,
    x: &[Rational],
    y: &[Rational],
    lambda: &Rational,
    mu: &Rational,
) -> Vec<Rational> {
    let ad = sc.ad_of(x);
    (0..DIM)
        .map(|i| {
            let mut r = Rational::zero();
            for k in 0..DIM {
                r += &ad[i][k] * &y[k];
            }
            r - lambda * &x[i] - mu * &y[i]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn unit(i: usize) -> Vec<Rational> {
        (1..=DIM).map(|k| rat(if k == i { 1 } else { 0 })).collect()
    }

    #[test]
    fn central_element() {
        let sc = StructureConstants::standard();
        let b = normalizer_solve(sc, &unit(7));
        assert_eq!(b.len(), 1);
        assert!(b[0].mu.is_zero());
        assert_eq!(b[0].new_directions, 6);
        assert!(b[0].solutions.iter().all(|(_, l)| l.is_zero()));
    }

    #[test]
    fn self_solution() {
        let sc = StructureConstants::standard();
        for i in 1..=DIM {
            let x = unit(i);
            let r = normalizer_residual(sc, &x, &x, &rat(0), &rat(0));
            assert!(r.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn translation_excludes_x4() {
        let sc = StructureConstants::standard();
        for br in normalizer_solve(sc, &unit(1)) {
            for (y, l) in &br.solutions {
                assert!(y[3].is_zero());
                assert!(normalizer_residual(sc, &unit(1), y, l, &br.mu).iter().all(Zero::is_zero));
            }
        }
    }
}
