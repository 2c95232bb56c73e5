use nalgebra::SMatrix;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{CoeffVector, StructureConstants, DIM};
use crate::expr::{rat, Expr, Rational};
use crate::linalg::{self, RatMatrix};

/// Sign in `Ad(exp(sX)) = exp(sign * s * ad_X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdConvention {
    /// `Y - s[X, Y] + s^2/2 [X, [X, Y]] - ...`
    Minus,
    /// `Y + s[X, Y] + ...`
    Plus,
}

impl AdConvention {
    pub fn sign(self) -> i64 {
        match self {
            AdConvention::Minus => -1,
            AdConvention::Plus => 1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            AdConvention::Minus => AdConvention::Plus,
            AdConvention::Plus => AdConvention::Minus,
        }
    }
}

/// Square matrix with symbolic entries acting on coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointMatrix(pub Vec<Vec<Expr>>);

impl AdjointMatrix {
    pub fn identity() -> Self {
        AdjointMatrix(
            (0..DIM).map(|i| (0..DIM).map(|k| if i == k { Expr::one() } else { Expr::zero() }).collect()).collect(),
        )
    }

    pub fn apply(&self, v: &CoeffVector) -> CoeffVector {
        CoeffVector(std::array::from_fn(|i| {
            Expr::add_all((0..DIM).filter(|&k| !self.0[i][k].is_zero_literal()).map(|k| &self.0[i][k] * &v.0[k]))
        }))
    }

    pub fn mul(&self, o: &AdjointMatrix) -> AdjointMatrix {
        AdjointMatrix(
            (0..DIM)
                .map(|i| (0..DIM).map(|k| Expr::add_all((0..DIM).map(|j| &self.0[i][j] * &o.0[j][k]))).collect())
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> AdjointMatrix {
        AdjointMatrix(self.0.iter().map(|r| r.iter().map(&f).collect()).collect())
    }
}

fn scaled(m: &RatMatrix, k: &Rational) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| x * k).collect()).collect()
}

fn shift(m: &RatMatrix, mu: &Rational) -> RatMatrix {
    let mut out = m.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= mu;
    }
    out
}

fn mat_pow(m: &RatMatrix, k: usize) -> RatMatrix {
    let mut out = linalg::identity(m.len());
    for _ in 0..k {
        out = linalg::mat_mul(&out, m);
    }
    out
}

/// `exp(s * m)` for a rational matrix whose eigenvalues are all rational.
/// Built from the generalized eigenspace projectors, so entries are
/// polynomials in `s` times `exp(mu * s)`.
pub fn exp_rational(m: &RatMatrix, s: &Expr) -> Option<AdjointMatrix> {
    let n = m.len();
    let cp = linalg::char_poly(m);
    let roots = linalg::rational_roots(&cp);
    // generalized eigenspaces
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut blocks = Vec::new();
    for mu in &roots {
        let space = linalg::kernel(&mat_pow(&shift(m, mu), n), n);
        blocks.push((mu.clone(), basis.len(), space.len()));
        basis.extend(space);
    }
    if basis.len() != n {
        return None;
    }
    // columns of the change of basis
    let b: RatMatrix = (0..n).map(|i| basis.iter().map(|v| v[i].clone()).collect()).collect();
    let binv = linalg::inverse(&b)?;
    let mut out = vec![vec![Expr::zero(); n]; n];
    for (mu, start, dim) in blocks {
        let mut sel = linalg::zeros(n, n);
        for (d, row) in sel.iter_mut().enumerate().skip(start).take(dim) {
            row[d] = Rational::one();
        }
        let proj = linalg::mat_mul(&linalg::mat_mul(&b, &sel), &binv);
        let nil = linalg::mat_mul(&shift(m, &mu), &proj);
        let growth = if mu.is_zero() { Expr::one() } else { Expr::exp(&(Expr::num(mu.clone()) * s)) };
        let mut term = proj;
        let mut fact = Rational::one();
        for k in 0..dim {
            if k > 0 {
                term = linalg::mat_mul(&nil, &term);
                fact *= rat(k as i64);
            }
            if term.iter().all(|r| r.iter().all(Zero::is_zero)) {
                break;
            }
            let sk = if k == 0 { Expr::one() } else { s.powi(k as i64) };
            for i in 0..n {
                for j in 0..n {
                    if !term[i][j].is_zero() {
                        let c = Expr::num(&term[i][j] / &fact);
                        let prev = std::mem::replace(&mut out[i][j], Expr::zero());
                        out[i][j] = prev + c * &sk * &growth;
                    }
                }
            }
        }
    }
    Some(AdjointMatrix(out))
}

/// `Ad(exp(s X_i))` in the basis; `i` counted from one.
pub fn adjoint_matrix(sc: &StructureConstants, i: usize, s: &Expr, conv: AdConvention) -> AdjointMatrix {
    let m = scaled(&sc.ad_matrix(i), &rat(conv.sign()));
    exp_rational(&m, s).expect("ad spectrum of a basis element is rational")
}

/// Floating-point `Ad(exp(s X_i))` through the matrix exponential.
pub fn adjoint_numeric(sc: &StructureConstants, i: usize, s: f64, conv: AdConvention) -> [[f64; DIM]; DIM] {
    let ad = sc.ad_matrix(i);
    let k = conv.sign() as f64 * s;
    let m = SMatrix::<f64, DIM, DIM>::from_fn(|r, c| ad[r][c].to_f64().unwrap_or(f64::NAN) * k);
    let e = m.exp();
    std::array::from_fn(|r| std::array::from_fn(|c| e[(r, c)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero_symbolic, parse, Bindings, NumericPoint, Param, Symbol};

    fn sc() -> &'static StructureConstants {
        StructureConstants::standard()
    }

    #[test]
    fn translation_acts_on_scaling() {
        let s = Expr::param(Param::S);
        let a = adjoint_matrix(sc(), 1, &s, AdConvention::Minus);
        let y = a.apply(&CoeffVector::basis(3));
        assert_eq!(y, CoeffVector::parse("X3 - s*X1").unwrap());
        let num = adjoint_numeric(sc(), 1, 0.7, AdConvention::Minus);
        assert!((num[0][2] + 0.7).abs() < 1e-12);
        assert!((num[2][2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_at_zero() {
        for i in 1..=DIM {
            for conv in [AdConvention::Minus, AdConvention::Plus] {
                let a = adjoint_matrix(sc(), i, &Expr::zero(), conv);
                assert_eq!(a, AdjointMatrix::identity(), "X{i}");
            }
        }
    }

    #[test]
    fn exact_matches_numeric() {
        let s = Expr::param(Param::S);
        for i in 1..=DIM {
            let a = adjoint_matrix(sc(), i, &s, AdConvention::Plus);
            let n = adjoint_numeric(sc(), i, 0.37, AdConvention::Plus);
            let p = NumericPoint::new().with(Param::S, 0.37);
            for r in 0..DIM {
                for c in 0..DIM {
                    let v = a.0[r][c].eval(&p).unwrap();
                    assert!((v - n[r][c]).abs() < 1e-10, "X{i} ({r},{c}) {v} vs {}", n[r][c]);
                }
            }
        }
    }

    #[test]
    fn exact_group_law() {
        let (s, sp) = (Expr::param(Param::S), Expr::param(Param::Sp));
        for i in 1..=DIM {
            let lhs = adjoint_matrix(sc(), i, &s, AdConvention::Minus).mul(&adjoint_matrix(
                sc(),
                i,
                &sp,
                AdConvention::Minus,
            ));
            let rhs = adjoint_matrix(sc(), i, &(&s + &sp), AdConvention::Minus);
            for r in 0..DIM {
                for c in 0..DIM {
                    assert_eq!(is_zero_symbolic(&(&lhs.0[r][c] - &rhs.0[r][c])), Some(true), "X{i}");
                }
            }
        }
    }

    #[test]
    fn derivative_at_zero_is_ad() {
        let s = Expr::param(Param::S);
        for i in 1..=DIM {
            let a = adjoint_matrix(sc(), i, &s, AdConvention::Minus);
            let d = a.map(|e| e.partial(&Symbol::Param(Param::S)).subs(&Bindings::new().with(Param::S, Expr::zero())));
            let ad = sc().ad_matrix(i);
            for r in 0..DIM {
                for c in 0..DIM {
                    assert_eq!(d.0[r][c], Expr::num(-ad[r][c].clone()));
                }
            }
        }
    }

    #[test]
    fn scaling_has_exponential_entries() {
        let a = adjoint_matrix(sc(), 3, &Expr::param(Param::S), AdConvention::Plus);
        assert_eq!(a.0[0][0], parse("exp(-s)").unwrap());
    }
}
