//! Partially invariant solutions: invariants, rank and defect, ansatz
//! substitution, reduced-system checks and reducibility.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{
    canonicalize, is_zero_symbolic, sample_point, Bindings, Coord, Expr, FuncSym, NumericPoint, Param, Symbol,
    ZeroTest, ZeroVerdict,
};
use crate::jets::PdeSystem;
use crate::liealg::{total_space, Subalgebra, VectorField};
use crate::linalg::numeric_rank;
use crate::sampling::rng_for;

/// Number of dependent variables.
pub const Q: usize = 3;
/// Number of independent variables.
pub const P: usize = 2;
pub const RANK_SAMPLES: usize = 20;
pub const RANK_CUTOFF: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PisError {
    #[error("rank varies across sample points: {0:?}")]
    UnstableRank(Vec<usize>),
    #[error("no admissible sample point for {0}")]
    NoSample(String),
    #[error("defect {delta} outside 0..={bound}")]
    DefectBound { delta: usize, bound: usize },
}

/// `a, b, c` as functions of `(x, t)` and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionTriple {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
}

impl SolutionTriple {
    pub fn new(a: Expr, b: Expr, c: Expr) -> Self {
        SolutionTriple { a, b, c }
    }

    pub fn bindings(&self) -> Bindings {
        Bindings::new()
            .with(FuncSym::a(), self.a.clone())
            .with(FuncSym::b(), self.b.clone())
            .with(FuncSym::c(), self.c.clone())
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn params(&self) -> BTreeSet<Param> {
        self.components()
            .iter()
            .flat_map(|e| e.free_symbols())
            .filter_map(|s| match s {
                Symbol::Param(p) => Some(p),
                _ => None,
            })
            .collect()
    }
}

/// Invariants split by whether they involve dependent variables.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    pub members: Vec<Expr>,
}

fn is_dependent_symbol(s: &Symbol) -> bool {
    matches!(s, Symbol::Func(f) if f.name().is_dependent())
}

impl InvariantSet {
    pub fn new(members: Vec<Expr>) -> Self {
        InvariantSet { members }
    }

    /// Members depending on the independent variables only.
    pub fn independent_type(&self) -> Vec<&Expr> {
        self.members.iter().filter(|e| !e.free_symbols().iter().any(is_dependent_symbol)).collect()
    }

    /// Members involving `a, b, c`.
    pub fn mixed_type(&self) -> Vec<&Expr> {
        self.members.iter().filter(|e| e.free_symbols().iter().any(is_dependent_symbol)).collect()
    }
}

/// Seeded points for the symbols of a set of expressions where every
/// expression evaluates to a finite value.
fn admissible_points(exprs: &[Expr], seed: u64, name: &str, n: usize) -> Result<Vec<NumericPoint>, PisError> {
    let mut syms = BTreeSet::new();
    for e in exprs {
        syms.extend(e.free_symbols());
    }
    let mut rng = rng_for(seed, name);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        if tries > 50 * n {
            return Err(PisError::NoSample(name.to_string()));
        }
        let p = sample_point(&syms, &mut rng, 0.5, 2.0);
        if exprs.iter().all(|e| e.eval(&p).is_ok()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Rank of a matrix of expressions, sampled at random points; the rank must
/// agree at every point.
pub fn sampled_rank(rows: &[Vec<Expr>], seed: u64, name: &str) -> Result<usize, PisError> {
    if rows.is_empty() {
        return Ok(0);
    }
    let flat: Vec<Expr> = rows.iter().flatten().cloned().collect();
    let pts = admissible_points(&flat, seed, name, RANK_SAMPLES)?;
    let mut ranks = Vec::new();
    for p in &pts {
        let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|e| e.eval(p).unwrap_or(f64::NAN)).collect()).collect();
        ranks.push(numeric_rank(&m, RANK_CUTOFF));
    }
    let first = ranks[0];
    if ranks.iter().all(|r| *r == first) {
        Ok(first)
    } else {
        Err(PisError::UnstableRank(ranks))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    /// `(generator, invariant)` pairs, counted from one, that fail.
    pub failures: Vec<(usize, usize)>,
    pub jacobian_rank: usize,
    pub independent: bool,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.independent
    }
}

/// Every generator annihilates every member, and the members are
/// functionally independent.
pub fn invariant_check(h: &Subalgebra, inv: &InvariantSet, seed: u64) -> Result<InvariantReport, PisError> {
    let test = ZeroTest::with_seed(seed);
    let mut failures = Vec::new();
    for (gi, g) in h.gens.iter().enumerate() {
        let field = VectorField::from_coeffs(g);
        for (ii, i) in inv.members.iter().enumerate() {
            if !test.run(&field.apply(i)).is_zero() {
                failures.push((gi + 1, ii + 1));
            }
        }
    }
    let vars = total_space();
    let jac: Vec<Vec<Expr>> = inv.members.iter().map(|i| vars.iter().map(|v| i.partial(v)).collect()).collect();
    let jacobian_rank = sampled_rank(&jac, seed, "invariants/jacobian")?;
    Ok(InvariantReport { failures, jacobian_rank, independent: jacobian_rank == inv.members.len() })
}

/// Rank of the invariants' Jacobian with respect to `a, b, c`, and the
/// defect `q - rank` it forces.
pub fn invariant_rank(inv: &InvariantSet, seed: u64) -> Result<(usize, usize), PisError> {
    let deps = [Symbol::Func(FuncSym::a()), Symbol::Func(FuncSym::b()), Symbol::Func(FuncSym::c())];
    let jac: Vec<Vec<Expr>> = inv.members.iter().map(|i| deps.iter().map(|d| i.partial(d)).collect()).collect();
    let r = sampled_rank(&jac, seed, "invariants/rank")?;
    Ok((r, Q - r))
}

/// Substitute an ansatz for `a, b, c` into every equation.
pub fn ansatz_substitute(ansatz: &Bindings, sys: &PdeSystem) -> Vec<Expr> {
    sys.residuals.iter().map(|r| r.subs(ansatz)).collect()
}

/// Zero verdict for each residual of a system on a solution triple.
pub fn verify_triple(sys: &PdeSystem, s: &SolutionTriple, test: &ZeroTest) -> Vec<ZeroVerdict> {
    let b = s.bindings();
    sys.residuals
        .iter()
        .map(|r| match r.substitute(&b) {
            Ok(e) => test.run(&e),
            Err(err) => ZeroVerdict::Undetermined(err.to_string()),
        })
        .collect()
}

/// One family of reduced unknowns, e.g. `f(t), g(t)` with the arbitrary `a`.
#[derive(Clone, Debug)]
pub struct ReducedFamily {
    pub bindings: Bindings,
}

impl ReducedFamily {
    /// `f` and `g` of the invariant variable, together with `a`.
    pub fn new(var: Coord, f: Expr, g: Expr, a: Expr) -> Self {
        let fs = FuncSym::reduced(crate::expr::FuncName::F, var);
        let gs = FuncSym::reduced(crate::expr::FuncName::G, var);
        ReducedFamily { bindings: Bindings::new().with(fs, f).with(gs, g).with(FuncSym::a(), a) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedVerdicts {
    /// Label per residual, e.g. `zero (symbolic)`.
    pub equations: Vec<String>,
    pub consistency: Vec<String>,
    /// Inequations that vanish identically on the family.
    pub degenerate_inequations: Vec<usize>,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Check a reduced family against the reduced equations and their
/// consistency conditions; the inequations must not vanish identically.
pub fn verify_reduced_family(
    fam: &ReducedFamily,
    reduced: &[Expr],
    consistency: &[Expr],
    inequations: &[Expr],
    test: &ZeroTest,
) -> ReducedVerdicts {
    let mut witness = None;
    let mut passed = true;
    let mut judge = |e: &Expr| -> String {
        let v = match e.substitute(&fam.bindings) {
            Ok(s) => test.run(&s),
            Err(err) => ZeroVerdict::Undetermined(err.to_string()),
        };
        if !v.is_zero() {
            passed = false;
            if witness.is_none() {
                if let ZeroVerdict::NonZero(w) = &v {
                    witness = Some(format!("{} at {}", w.value, w.point));
                }
            }
        }
        v.label().to_string()
    };
    let equations = reduced.iter().map(&mut judge).collect();
    let consistency = consistency.iter().map(&mut judge).collect();
    let degenerate_inequations = inequations
        .iter()
        .enumerate()
        .filter(|(_, e)| e.substitute(&fam.bindings).map(|s| test.run(&s).is_zero()).unwrap_or(true))
        .map(|(i, _)| i + 1)
        .collect();
    ReducedVerdicts { equations, consistency, degenerate_inequations, passed, witness }
}

/// `Q^alpha = phi^alpha - xi^x u^alpha_x - xi^t u^alpha_t` on a solution,
/// one row per generator.
pub fn characteristic_matrix(h: &Subalgebra, s: &SolutionTriple) -> Vec<[Expr; 3]> {
    let b = s.bindings();
    h.gens
        .iter()
        .map(|g| {
            let v = VectorField::from_coeffs(g);
            let xi_x = v.xi_x().subs(&b);
            let xi_t = v.xi_t().subs(&b);
            let phi = v.phi();
            std::array::from_fn(|k| {
                let u = s.components()[k];
                phi[k].subs(&b) - &xi_x * u.diff(Coord::X) - &xi_t * u.diff(Coord::T)
            })
        })
        .collect()
}

/// Rank of the characteristic matrix on the solution.
pub fn defect(h: &Subalgebra, s: &SolutionTriple, seed: u64) -> Result<usize, PisError> {
    let rows: Vec<Vec<Expr>> = characteristic_matrix(h, s).into_iter().map(|r| r.to_vec()).collect();
    let delta = sampled_rank(&rows, seed, "defect")?;
    let bound = h.gens.len().min(Q);
    if delta > bound {
        return Err(PisError::DefectBound { delta, bound });
    }
    Ok(delta)
}

/// Directions `(alpha : beta)` of the pencil `alpha*g1 + beta*g2` leaving the
/// solution invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Reducibility {
    /// No one-parameter subgroup leaves the solution invariant.
    NonReducible,
    /// Invariant along these directions, rendered as `alpha : beta`.
    Directions(Vec<String>),
    /// Every direction of the pencil.
    WholePencil,
}

fn vanishes(e: &Expr, test: &ZeroTest) -> bool {
    is_zero_symbolic(e) == Some(true) || test.run(e).is_zero()
}

/// An `x, t`-independent expression in a shorter form: pin `x` and `t` to a
/// small value, keep the result when it provably agrees.
fn simplest_constant(r: Expr, test: &ZeroTest) -> Expr {
    let full = canonicalize(&r).unwrap_or_else(|| r.clone());
    for v in [0, 1] {
        let pin = Bindings::new().with(Coord::X, Expr::int(v)).with(Coord::T, Expr::int(v));
        let Ok(pinned) = r.substitute(&pin) else { continue };
        let pinned = canonicalize(&pinned).unwrap_or(pinned);
        if pinned.size() < full.size() && vanishes(&(&r - &pinned), test) {
            return pinned;
        }
    }
    full
}

/// Decide which one-parameter subgroups of a two-dimensional subalgebra
/// leave the solution invariant.
pub fn reducibility_scan(h: &Subalgebra, s: &SolutionTriple, seed: u64) -> Reducibility {
    let test = ZeroTest::with_seed(seed);
    let q = characteristic_matrix(h, s);
    if q.len() != 2 {
        return Reducibility::NonReducible;
    }
    let zero1 = q[0].iter().all(|e| vanishes(e, &test));
    let zero2 = q[1].iter().all(|e| vanishes(e, &test));
    match (zero1, zero2) {
        (true, true) => return Reducibility::WholePencil,
        (true, false) => return Reducibility::Directions(vec!["1 : 0".into()]),
        (false, true) => return Reducibility::Directions(vec!["0 : 1".into()]),
        _ => {}
    }
    // alpha = r * beta with r = -Q2_k / Q1_k for a component with Q1_k != 0
    let Some(k) = (0..3).find(|&k| !vanishes(&q[0][k], &test)) else {
        return Reducibility::NonReducible;
    };
    let Ok(r) = (-q[1][k].clone()).checked_div(&q[0][k]) else {
        return Reducibility::NonReducible;
    };
    let constant = [Coord::X, Coord::T].iter().all(|c| vanishes(&r.diff(*c), &test));
    if !constant {
        return Reducibility::NonReducible;
    }
    let r = simplest_constant(r, &test);
    let all = (0..3).all(|j| vanishes(&(&r * &q[0][j] + &q[1][j]), &test));
    if all {
        Reducibility::Directions(vec![format!("{r} : 1")])
    } else {
        Reducibility::NonReducible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jets::reduced_system;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn inv(items: &[&str]) -> InvariantSet {
        InvariantSet::new(items.iter().map(|s| e(s)).collect())
    }

    fn sub(gens: &[&str]) -> Subalgebra {
        Subalgebra::parse("h", gens).unwrap()
    }

    #[test]
    fn scaling_translation_invariants() {
        let r = invariant_check(&sub(&["X1", "X7"]), &inv(&["t", "b/a", "c/a"]), 42).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(invariant_rank(&inv(&["t", "b/a", "c/a"]), 42).unwrap(), (2, 1));
        let r2 = invariant_check(&sub(&["X2", "X7"]), &inv(&["x", "b/a", "c/a"]), 42).unwrap();
        assert!(r2.passed());
        let bad = invariant_check(&sub(&["X1", "X7"]), &inv(&["x", "b/a"]), 42).unwrap();
        assert_eq!(bad.failures, vec![(1, 1)]);
    }

    #[test]
    fn constant_is_dependent() {
        let r = invariant_check(&sub(&["X1", "X7"]), &inv(&["1"]), 42).unwrap();
        assert!(r.failures.is_empty());
        assert!(!r.independent);
    }

    #[test]
    fn ranks() {
        assert_eq!(invariant_rank(&inv(&["a", "b", "c"]), 1).unwrap(), (3, 0));
        assert_eq!(invariant_rank(&inv(&["t", "(c^2 - b*a)/b^2", "(b*x - c*t)/b"]), 1).unwrap(), (2, 1));
        let s = inv(&["t", "b/a", "c/a"]);
        assert_eq!(s.independent_type().len(), 1);
        assert_eq!(s.mixed_type().len(), 2);
    }

    #[test]
    fn zero_ansatz() {
        let b = Bindings::new()
            .with(FuncSym::a(), Expr::zero())
            .with(FuncSym::b(), Expr::zero())
            .with(FuncSym::c(), Expr::zero());
        assert!(ansatz_substitute(&b, &reduced_system()).iter().all(Expr::is_zero_literal));
    }

    #[test]
    fn characteristics() {
        let h = sub(&["X1", "X7"]);
        let s = SolutionTriple::new(e("c1"), e("c1*(c4 + c3*t)"), e("c1*c2"));
        let q = characteristic_matrix(&h, &s);
        assert!(q[0].iter().all(Expr::is_zero_literal));
        assert_eq!(q[1][1], s.b);
        assert_eq!(defect(&h, &s, 42).unwrap(), 1);
        assert_eq!(reducibility_scan(&h, &s, 42), Reducibility::Directions(vec!["1 : 0".into()]));
    }

    #[test]
    fn invariant_solution_has_zero_defect() {
        let h = sub(&["X1", "X2"]);
        let s = SolutionTriple::new(e("c1"), e("c2"), e("c3"));
        assert_eq!(defect(&h, &s, 3).unwrap(), 0);
        assert_eq!(reducibility_scan(&h, &s, 3), Reducibility::WholePencil);
    }

    #[test]
    fn generic_triple_is_not_reducible() {
        let h = sub(&["X1", "X7"]);
        let s = SolutionTriple::new(e("x^2 + t"), e("x*t"), e("exp(x)"));
        assert_eq!(reducibility_scan(&h, &s, 3), Reducibility::NonReducible);
    }
}
