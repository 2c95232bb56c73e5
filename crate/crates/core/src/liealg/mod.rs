//! The seven-dimensional symmetry algebra of the reduced Walker system.

mod adjoint;
mod normalizer;
mod replay;
mod subalgebra;

use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{parse_generator, Expr, FuncSym, Monomial, ParseError, RatCtx, Rational, Symbol};
use crate::linalg::{self, RatMatrix};

pub use adjoint::{adjoint_matrix, adjoint_numeric, AdConvention, AdjointMatrix};
pub use normalizer::{normalizer_residual, normalizer_solve, NormalizerBranch};
pub use replay::{replay_all, select_convention, ReplayCase, ReplayOutcome};
pub use subalgebra::{subalgebra_closed, Closure, ClosureWitness, ParamDomain, Subalgebra};

pub const DIM: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("bracket [X{0}, X{1}] leaves the span of the basis")]
    NotClosed(usize, usize),
    #[error("vector field is not a combination of the basis")]
    NotInSpan,
    #[error("generator text: {0}")]
    Parse(#[from] ParseError),
    #[error("generator text is not linear in X1..X7")]
    NotLinear,
    #[error("generator index {0} out of range 1..7")]
    BadIndex(usize),
}

/// Coordinates of the total space, in field-component order.
pub fn total_space() -> [Symbol; 5] {
    [Symbol::x(), Symbol::t(), Symbol::Func(FuncSym::a()), Symbol::Func(FuncSym::b()), Symbol::Func(FuncSym::c())]
}

/// A vector field on `(x, t, a, b, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: [Expr; 5],
}

impl VectorField {
    pub fn new(coeffs: [Expr; 5]) -> Self {
        VectorField { coeffs }
    }

    pub fn zero() -> Self {
        VectorField { coeffs: std::array::from_fn(|_| Expr::zero()) }
    }

    pub fn xi_x(&self) -> &Expr {
        &self.coeffs[0]
    }
    pub fn xi_t(&self) -> &Expr {
        &self.coeffs[1]
    }
    /// Components along the dependent variables `a, b, c`.
    pub fn phi(&self) -> [&Expr; 3] {
        [&self.coeffs[2], &self.coeffs[3], &self.coeffs[4]]
    }

    /// Derivation applied to a function on the total space.
    pub fn apply(&self, f: &Expr) -> Expr {
        let syms = total_space();
        Expr::add_all(
            self.coeffs.iter().zip(syms.iter()).filter(|(c, _)| !c.is_zero_literal()).map(|(c, s)| c * f.partial(s)),
        )
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        VectorField { coeffs: std::array::from_fn(|i| k * &self.coeffs[i]) }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField { coeffs: std::array::from_fn(|i| &self.coeffs[i] + &o.coeffs[i]) }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero_literal)
    }

    /// Combination `sum_i v_i X_i` of the basis fields.
    pub fn from_coeffs(v: &CoeffVector) -> VectorField {
        let g = generators();
        let mut acc = VectorField::zero();
        for (i, c) in v.0.iter().enumerate() {
            if !c.is_zero_literal() {
                acc = acc.add(&g[i].scale(c));
            }
        }
        acc
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "t", "a", "b", "c"];
        let mut first = true;
        for (c, n) in self.coeffs.iter().zip(names) {
            if c.is_zero_literal() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one_literal() {
                write!(f, "d_{n}")?;
            } else {
                write!(f, "({c})*d_{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[v, w]^i = v(w^i) - w(v^i)`.
pub fn bracket(v: &VectorField, w: &VectorField) -> VectorField {
    VectorField { coeffs: std::array::from_fn(|i| v.apply(&w.coeffs[i]) - w.apply(&v.coeffs[i])) }
}

/// The basis fields `X1..X7`.
pub fn generators() -> [VectorField; DIM] {
    let z = Expr::zero;
    let (x, t, a, b, c) = (Expr::x(), Expr::t(), Expr::a(), Expr::b(), Expr::c());
    let two = Expr::int(2);
    [
        VectorField::new([Expr::one(), z(), z(), z(), z()]),
        VectorField::new([z(), Expr::one(), z(), z(), z()]),
        VectorField::new([x.clone(), z(), z(), -(&two * &b), -c.clone()]),
        VectorField::new([z(), x, z(), &two * &c, a.clone()]),
        VectorField::new([t.clone(), z(), &two * &c, z(), b.clone()]),
        VectorField::new([z(), t, z(), &two * &b, c.clone()]),
        VectorField::new([z(), z(), a, b, c]),
    ]
}

/// Coordinates in the basis `X1..X7`; entries may involve parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffVector(pub [Expr; DIM]);

impl CoeffVector {
    pub fn zero() -> Self {
        CoeffVector(std::array::from_fn(|_| Expr::zero()))
    }

    /// Basis vector `X_i`, `i` counted from one.
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i - 1] = Expr::one();
        v
    }

    pub fn from_rationals(r: &[Rational]) -> Self {
        CoeffVector(std::array::from_fn(|i| Expr::num(r[i].clone())))
    }

    pub fn as_rationals(&self) -> Option<Vec<Rational>> {
        self.0.iter().map(|e| e.as_num().cloned()).collect()
    }

    pub fn parse(text: &str) -> Result<Self, LieError> {
        let e = parse_generator(text)?;
        let mut v = Self::zero();
        let mut rest = e.clone();
        for i in 0..DIM {
            let s = Symbol::Basis(i as u8 + 1);
            let c = e.partial(&s);
            if c.free_symbols().iter().any(|s| matches!(s, Symbol::Basis(_))) {
                return Err(LieError::NotLinear);
            }
            rest = rest - &c * Expr::sym(s);
            v.0[i] = c;
        }
        if !rest.is_zero_literal() {
            return Err(LieError::NotLinear);
        }
        Ok(v)
    }

    pub fn add(&self, o: &CoeffVector) -> CoeffVector {
        CoeffVector(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn scale(&self, k: &Expr) -> CoeffVector {
        CoeffVector(std::array::from_fn(|i| k * &self.0[i]))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> CoeffVector {
        CoeffVector(std::array::from_fn(|i| f(&self.0[i])))
    }

    pub fn is_zero_literal(&self) -> bool {
        self.0.iter().all(Expr::is_zero_literal)
    }

    /// The combination as generator text, e.g. `X1 + alpha*X6`.
    pub fn to_expr(&self) -> Expr {
        Expr::add_all(self.0.iter().enumerate().map(|(i, c)| c * Expr::sym(Symbol::Basis(i as u8 + 1))))
    }
}

impl fmt::Display for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// `C^i_{jk}` with `[X_j, X_k] = sum_i C^i_{jk} X_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    table: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    /// Decompose every bracket of the basis by exact linear solve over the
    /// polynomial coefficients of the field components.
    pub fn compute(basis: &[VectorField; DIM]) -> Result<Self, LieError> {
        let mut table = vec![vec![vec![Rational::zero(); DIM]; DIM]; DIM];
        for j in 0..DIM {
            for k in 0..DIM {
                let b = bracket(&basis[j], &basis[k]);
                table[j][k] = decompose(basis, &b).map_err(|_| LieError::NotClosed(j + 1, k + 1))?;
            }
        }
        Ok(StructureConstants { table })
    }

    /// Constants of the standard basis, computed once.
    pub fn standard() -> &'static StructureConstants {
        static CELL: OnceLock<StructureConstants> = OnceLock::new();
        CELL.get_or_init(|| Self::compute(&generators()).expect("basis closes"))
    }

    /// `C^i_{jk}` with indices counted from one.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[j - 1][k - 1][i - 1]
    }

    /// Coefficients of `[X_j, X_k]`, indices from one.
    pub fn bracket_coeffs(&self, j: usize, k: usize) -> &[Rational] {
        &self.table[j - 1][k - 1]
    }

    /// Matrix of `Y -> [X_j, Y]` in the basis.
    pub fn ad_matrix(&self, j: usize) -> RatMatrix {
        let mut m = linalg::zeros(DIM, DIM);
        for (k, col) in self.table[j - 1].iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                m[i][k] = c.clone();
            }
        }
        m
    }

    /// Matrix of `Y -> [v, Y]` for a rational combination `v`.
    pub fn ad_of(&self, v: &[Rational]) -> RatMatrix {
        let mut m = linalg::zeros(DIM, DIM);
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let a = self.ad_matrix(j + 1);
            for i in 0..DIM {
                for k in 0..DIM {
                    m[i][k] += vj * &a[i][k];
                }
            }
        }
        m
    }

    /// Bracket of coefficient vectors, symbolic in their entries.
    pub fn bracket(&self, u: &CoeffVector, v: &CoeffVector) -> CoeffVector {
        let mut out: Vec<Vec<Expr>> = vec![Vec::new(); DIM];
        for j in 0..DIM {
            if u.0[j].is_zero_literal() {
                continue;
            }
            for k in 0..DIM {
                if v.0[k].is_zero_literal() {
                    continue;
                }
                let uv = &u.0[j] * &v.0[k];
                for (i, c) in self.table[j][k].iter().enumerate() {
                    if !c.is_zero() {
                        out[i].push(Expr::num(c.clone()) * &uv);
                    }
                }
            }
        }
        CoeffVector(std::array::from_fn(|i| Expr::add_all(std::mem::take(&mut out[i]))))
    }

    /// Largest violation of antisymmetry and Jacobi over all index triples;
    /// both are exact, so anything nonzero is a failure.
    pub fn jacobi_failures(&self) -> Vec<(usize, usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                for k in (j + 1)..DIM {
                    let mut total = vec![Rational::zero(); DIM];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        // [X_a, [X_b, X_c]]
                        let inner = &self.table[b][c];
                        for (m, coeff) in inner.iter().enumerate() {
                            if coeff.is_zero() {
                                continue;
                            }
                            for (n, outer) in self.table[a][m].iter().enumerate() {
                                total[n] += coeff * outer;
                            }
                        }
                    }
                    if total.iter().any(|c| !c.is_zero()) {
                        bad.push((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        bad
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..DIM).all(|j| (0..DIM).all(|k| (0..DIM).all(|i| self.table[j][k][i] == -self.table[k][j][i].clone())))
    }
}

/// Exact coordinates of a field in the basis.
pub fn decompose(basis: &[VectorField; DIM], v: &VectorField) -> Result<Vec<Rational>, LieError> {
    let mut ctx = RatCtx::new();
    // one equation per (component, monomial)
    let mut rows: Vec<(usize, Monomial)> = Vec::new();
    let mut columns: Vec<Vec<((usize, Monomial), Rational)>> = Vec::new();
    for f in basis.iter().chain(std::iter::once(v)) {
        let mut col = Vec::new();
        for (comp, e) in f.coeffs.iter().enumerate() {
            let r = ctx.convert(e).ok_or(LieError::NotInSpan)?;
            let terms = r.polynomial_terms().ok_or(LieError::NotInSpan)?;
            for (m, c) in terms {
                let key = (comp, m);
                if !rows.contains(&key) {
                    rows.push(key.clone());
                }
                col.push((key, c));
            }
        }
        columns.push(col);
    }
    let mut m = linalg::zeros(rows.len(), DIM);
    let mut rhs = vec![Rational::zero(); rows.len()];
    for (j, col) in columns.iter().enumerate() {
        for (key, c) in col {
            let r = rows.iter().position(|k| k == key).expect("row registered");
            if j < DIM {
                m[r][j] = c.clone();
            } else {
                rhs[r] = c.clone();
            }
        }
    }
    linalg::solve(&m, &rhs).ok_or(LieError::NotInSpan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn sc() -> &'static StructureConstants {
        StructureConstants::standard()
    }

    fn coeffs(j: usize, k: usize) -> Vec<i64> {
        sc().bracket_coeffs(j, k).iter().map(|r| r.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn sample_brackets() {
        let g = generators();
        assert!(bracket(&g[0], &g[6]).is_zero_literal());
        assert_eq!(bracket(&g[0], &g[3]), g[1]);
        assert_eq!(bracket(&g[2], &g[3]), g[3]);
    }

    #[test]
    fn bracket_table() {
        assert_eq!(coeffs(1, 4), vec![0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(coeffs(4, 5), vec![0, 0, 1, 0, 0, -1, 2]);
        assert_eq!(coeffs(3, 5), vec![0, 0, 0, 0, -1, 0, 0]);
        for j in 1..=DIM {
            assert!(sc().bracket_coeffs(j, j).iter().all(Zero::is_zero));
            assert!(sc().bracket_coeffs(7, j).iter().all(Zero::is_zero));
        }
        assert_eq!(*sc().get(2, 1, 4), Rational::from_integer(1.into()));
    }

    #[test]
    fn table_matches_direct_brackets() {
        let g = generators();
        for j in 1..=DIM {
            for k in 1..=DIM {
                let direct = bracket(&g[j - 1], &g[k - 1]);
                let via = VectorField::from_coeffs(&CoeffVector::from_rationals(sc().bracket_coeffs(j, k)));
                assert_eq!(direct, via, "[X{j}, X{k}]");
            }
        }
    }

    #[test]
    fn jacobi_and_antisymmetry() {
        assert!(sc().jacobi_failures().is_empty());
        assert!(sc().is_antisymmetric());
    }

    #[test]
    fn decomposition_rejects_outside_fields() {
        let g = generators();
        let xdx = VectorField::new([Expr::x(), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()]);
        assert!(decompose(&g, &xdx).is_err());
    }

    #[test]
    fn generator_text() {
        let v = CoeffVector::parse("eps*X2 + X5").unwrap();
        assert_eq!(v.0[1], parse("eps").unwrap());
        assert!(v.0[4].is_one_literal());
        assert!(CoeffVector::parse("X1*X2").is_err());
        assert!(CoeffVector::parse("X1 + x").is_err());
        let w = CoeffVector::parse("X3 + 2*X6 - X7").unwrap();
        assert_eq!(CoeffVector::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn symbolic_bracket_agrees() {
        let u = CoeffVector::parse("X1").unwrap();
        let v = CoeffVector::parse("X3 + alpha*X6 + beta*X7").unwrap();
        assert_eq!(sc().bracket(&u, &v), CoeffVector::basis(1));
    }
}
