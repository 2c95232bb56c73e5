//! Walker metrics in coordinates `(x, t, y, z)`, their curvature, and the
//! Einstein condition.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::expr::{Coord, EvalOptions, Expr, FuncName, FuncSym, NumericPoint, Symbol};
use crate::jets::{full_system, PdeSystem};
use crate::sampling::rng_for;

pub const COORDS: [Coord; 4] = [Coord::X, Coord::T, Coord::Y, Coord::Z];

/// Symmetric 4x4 matrix of expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric4 {
    pub g: [[Expr; 4]; 4],
}

fn zero4() -> [[Expr; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()))
}

/// `2(dx dy + dt dz) + a dy^2 + b dz^2 + 2c dy dz`.
pub fn build_metric(a: &Expr, b: &Expr, c: &Expr) -> Metric4 {
    let mut g = zero4();
    g[0][2] = Expr::one();
    g[2][0] = Expr::one();
    g[1][3] = Expr::one();
    g[3][1] = Expr::one();
    g[2][2] = a.clone();
    g[3][3] = b.clone();
    g[2][3] = c.clone();
    g[3][2] = c.clone();
    Metric4 { g }
}

/// Metric with `a, b, c` abstract functions of all four coordinates.
pub fn abstract_metric() -> Metric4 {
    build_metric(&Expr::a(), &Expr::b(), &Expr::c())
}

impl Metric4 {
    pub fn a(&self) -> &Expr {
        &self.g[2][2]
    }
    pub fn b(&self) -> &Expr {
        &self.g[3][3]
    }
    pub fn c(&self) -> &Expr {
        &self.g[2][3]
    }

    /// Closed-form inverse of the Walker form.
    pub fn inverse(&self) -> Metric4 {
        let (a, b, c) = (self.a(), self.b(), self.c());
        let mut h = zero4();
        h[0][0] = -a.clone();
        h[0][1] = -c.clone();
        h[1][0] = -c.clone();
        h[1][1] = -b.clone();
        h[0][2] = Expr::one();
        h[2][0] = Expr::one();
        h[1][3] = Expr::one();
        h[3][1] = Expr::one();
        Metric4 { g: h }
    }

    pub fn mul(&self, o: &Metric4) -> [[Expr; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|k| Expr::add_all((0..4).map(|j| &self.g[i][j] * &o.g[j][k]))))
    }

    /// Determinant by cofactor expansion.
    pub fn det(&self) -> Expr {
        fn minor(m: &[Vec<Expr>]) -> Expr {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut terms = Vec::new();
            for (j, e) in m[0].iter().enumerate() {
                if e.is_zero_literal() {
                    continue;
                }
                let sub: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let sign = if j % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                terms.push(sign * e * minor(&sub));
            }
            Expr::add_all(terms)
        }
        minor(&self.g.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Line element, e.g. `ds^2 = 2(dx dy + dt dz) + (x^2) dy^2 + ...`.
    pub fn line_element(&self) -> String {
        let mut s = String::from("ds^2 = 2(dx dy + dt dz)");
        for (e, tail, twice) in [(self.a(), "dy^2", false), (self.b(), "dz^2", false), (self.c(), "dy dz", true)] {
            if e.is_zero_literal() {
                continue;
            }
            let k = if twice { "2" } else { "" };
            s.push_str(&format!(" + {k}({e}) {tail}"));
        }
        s
    }

    pub fn latex(&self) -> String {
        let mut s = String::from("g = 2(dx\\circ dy + dt\\circ dz)");
        for (e, tail, twice) in
            [(self.a(), "dy\\circ dy", false), (self.b(), "dz\\circ dz", false), (self.c(), "dy\\circ dz", true)]
        {
            if e.is_zero_literal() {
                continue;
            }
            let k = if twice { "2" } else { "" };
            s.push_str(&format!(" + {k}\\left({}\\right){tail}", latex_expr(e)));
        }
        s
    }

    /// Rendered entries, row by row.
    pub fn json_matrix(&self) -> Vec<Vec<String>> {
        self.g.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }
}

fn latex_expr(e: &Expr) -> String {
    e.to_string().replace('*', " ").replace("sqrt", "\\sqrt").replace("ln", "\\ln").replace("exp", "\\exp")
}

impl fmt::Display for Metric4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line_element())
    }
}

/// Christoffel symbols, Ricci tensor and scalar curvature.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    /// `christoffel[k][i][j]` is `Gamma^k_{ij}`.
    pub christoffel: Vec<Vec<Vec<Expr>>>,
    pub ricci: [[Expr; 4]; 4],
    pub scalar: Expr,
}

pub fn ricci(g: &Metric4) -> CurvatureBundle {
    let inv = g.inverse();
    // dg[l][i][j] = d_l g_ij
    let dg: Vec<Vec<Vec<Expr>>> =
        COORDS.iter().map(|c| (0..4).map(|i| (0..4).map(|j| g.g[i][j].diff(*c)).collect()).collect()).collect();
    let mut gamma = vec![vec![vec![Expr::zero(); 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut terms = Vec::new();
                for l in 0..4 {
                    if inv.g[k][l].is_zero_literal() {
                        continue;
                    }
                    let inner = &dg[i][j][l] + &dg[j][i][l] - &dg[l][i][j];
                    if !inner.is_zero_literal() {
                        terms.push(&inv.g[k][l] * inner);
                    }
                }
                let v = Expr::frac(1, 2) * Expr::add_all(terms);
                gamma[k][i][j] = v.clone();
                gamma[k][j][i] = v;
            }
        }
    }
    let mut ric = zero4();
    for i in 0..4 {
        for j in i..4 {
            let mut terms = Vec::new();
            for k in 0..4 {
                terms.push(gamma[k][i][j].diff(COORDS[k]));
                terms.push(-gamma[k][i][k].diff(COORDS[j]));
                for l in 0..4 {
                    terms.push(&gamma[k][k][l] * &gamma[l][i][j]);
                    terms.push(-(&gamma[k][j][l] * &gamma[l][i][k]));
                }
            }
            let v = Expr::add_all(terms);
            ric[i][j] = v.clone();
            ric[j][i] = v;
        }
    }
    let scalar =
        Expr::add_all((0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| &inv.g[i][j] * &ric[i][j]));
    CurvatureBundle { christoffel: gamma, ricci: ric, scalar }
}

/// Upper-triangle index pairs in the order `xx, xt, xy, xz, tt, ty, tz, yy, yz, zz`.
pub fn component_pairs() -> Vec<(usize, usize)> {
    (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect()
}

pub fn component_name(i: usize, j: usize) -> String {
    format!("E_{}{}", COORDS[i].name(), COORDS[j].name())
}

/// `R_ij - (tau/4) g_ij` on the upper triangle.
pub fn einstein_residual(g: &Metric4) -> Vec<Expr> {
    let cb = ricci(g);
    let quarter = Expr::frac(1, 4) * &cb.scalar;
    component_pairs().into_iter().map(|(i, j)| &cb.ricci[i][j] - &quarter * &g.g[i][j]).collect()
}

/// Jet coordinates of `a, b, c` in four variables through order two.
pub fn full_jet_symbols() -> Vec<Symbol> {
    let mut out = Vec::new();
    for name in [FuncName::A, FuncName::B, FuncName::C] {
        let base = FuncSym::dependent(name);
        out.push(Symbol::Func(base.clone()));
        for c in COORDS {
            out.push(Symbol::Func(base.derive(c).expect("derivable")));
        }
        for (i, ci) in COORDS.iter().enumerate() {
            for cj in &COORDS[i..] {
                out.push(Symbol::Func(base.derive_all(&[*ci, *cj]).expect("derivable")));
            }
        }
    }
    out
}

/// Empirical relation `E = sum k * w * eq_m` for one component, with weights
/// `w` drawn from `1, a, b, c`.
#[derive(Clone, Debug, Serialize)]
pub struct Correspondence {
    pub component: String,
    /// `(term, coefficient)` for the nonzero coefficients, e.g. `("a*eq1", 0.25)`.
    pub terms: Vec<(String, f64)>,
    pub fit_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    /// Largest `|E|` at jets satisfying the full system.
    pub on_shell_max: f64,
    /// Smallest `max |E|` over generic jets.
    pub off_shell_min: f64,
    pub on_shell_ok: bool,
    pub off_shell_ok: bool,
    pub correspondence: Vec<Correspondence>,
    pub counterexample: Option<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.on_shell_ok && self.off_shell_ok
    }
}

pub const ON_SHELL_TOL: f64 = 1e-9;
pub const OFF_SHELL_MIN: f64 = 1e-4;

/// Leading derivative per equation of the full system, in solving order.
fn full_leading() -> Vec<(usize, Symbol)> {
    let f = |s: &str| crate::expr::parse(s).expect("jet symbol").as_symbol().expect("symbol").clone();
    vec![(0, f("a_11")), (1, f("c_11")), (2, f("c_22")), (4, f("c_12")), (3, f("a_22")), (5, f("b_11"))]
}

fn solve_leading(sys: &PdeSystem, p: &mut NumericPoint) -> bool {
    for (eq, sym) in full_leading() {
        let r = &sys.residuals[eq];
        p.set(sym.clone(), 0.0);
        let Ok(r0) = r.eval(p) else { return false };
        p.set(sym.clone(), 1.0);
        let Ok(r1) = r.eval(p) else { return false };
        let pivot = r1 - r0;
        if pivot.abs() < 1e-3 {
            return false;
        }
        p.set(sym, -r0 / pivot);
    }
    true
}

fn random_jet(rng: &mut impl Rng) -> NumericPoint {
    let mut p = NumericPoint::new();
    for s in full_jet_symbols() {
        p.set(s, rng.random_range(0.5..2.0));
    }
    p
}

/// Compare the Einstein condition of the abstract metric with the full system
/// at random jets, on and off the solution set.
pub fn equivalence_probe(seed: u64, n: usize) -> EquivalenceReport {
    let sys = full_system();
    let e = einstein_residual(&abstract_metric());
    let names: Vec<String> = component_pairs().into_iter().map(|(i, j)| component_name(i, j)).collect();
    let mut rng = rng_for(seed, "equivalence");
    let mut on_shell_max = 0.0f64;
    let mut off_shell_min = f64::INFINITY;
    let mut counterexample = None;
    let mut design: Vec<Vec<f64>> = Vec::new();
    let mut targets: Vec<Vec<f64>> = Vec::new();
    let eval = |x: &Expr, p: &NumericPoint| x.eval_with(p, EvalOptions::default()).map(|s| s.value).unwrap_or(f64::NAN);
    let mut done = 0;
    let mut attempts = 0;
    while done < n && attempts < 100 * n {
        attempts += 1;
        let mut p = random_jet(&mut rng);
        let off = p.clone();
        if !solve_leading(&sys, &mut p) {
            continue;
        }
        done += 1;
        let on_vals: Vec<f64> = e.iter().map(|x| eval(x, &p)).collect();
        let m = on_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if (m >= ON_SHELL_TOL || m.is_nan()) && counterexample.is_none() {
            counterexample = Some(format!("{p}"));
        }
        on_shell_max = on_shell_max.max(if m.is_nan() { f64::INFINITY } else { m });
        let off_vals: Vec<f64> = e.iter().map(|x| eval(x, &off)).collect();
        off_shell_min = off_shell_min.min(off_vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let eqs: Vec<f64> = sys.residuals.iter().map(|r| eval(r, &off)).collect();
        let weights = [1.0, eval(&Expr::a(), &off), eval(&Expr::b(), &off), eval(&Expr::c(), &off)];
        design.push(weights.iter().flat_map(|w| eqs.iter().map(move |q| w * q)).collect());
        targets.push(off_vals);
    }
    let correspondence = fit_correspondence(&names, &design, &targets);
    EquivalenceReport {
        samples: done,
        on_shell_max,
        off_shell_min,
        on_shell_ok: done == n && on_shell_max < ON_SHELL_TOL,
        off_shell_ok: done == n && off_shell_min > OFF_SHELL_MIN,
        correspondence,
        counterexample,
    }
}

fn regressor_label(col: usize, equations: usize) -> String {
    let w = ["", "a*", "b*", "c*"][col / equations];
    format!("{w}eq{}", col % equations + 1)
}

/// Least-squares fit of each component against weighted equation residuals.
fn fit_correspondence(names: &[String], design: &[Vec<f64>], targets: &[Vec<f64>]) -> Vec<Correspondence> {
    let rows = design.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = design[0].len();
    let a = DMatrix::from_fn(rows, cols, |r, c| design[r][c]);
    let svd = a.clone().svd(true, true);
    names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let b = DVector::from_fn(rows, |r, _| targets[r][k]);
            let x = svd.solve(&b, 1e-10).unwrap_or_else(|_| DVector::zeros(cols));
            let resid = (&a * &x - &b).amax() / b.amax().max(1.0);
            let terms = (0..cols)
                .filter(|&c| x[c].abs() > 1e-9)
                .map(|c| (regressor_label(c, cols / 4), (x[c] * 1e9).round() / 1e9))
                .collect();
            Correspondence { component: name.clone(), terms, fit_residual: resid }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, is_zero_symbolic, parse};

    #[test]
    fn walker_form_and_inverse() {
        let g = abstract_metric();
        assert_eq!(is_zero_symbolic(&(g.det() - Expr::one())), Some(true));
        let prod = g.mul(&g.inverse());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { Expr::one() } else { Expr::zero() };
                assert_eq!(is_zero_symbolic(&(&prod[i][j] - want)), Some(true));
            }
        }
        let flat = build_metric(&Expr::zero(), &Expr::zero(), &Expr::zero());
        assert_eq!(flat.inverse(), flat);
        assert_eq!(g.a(), &Expr::a());
    }

    #[test]
    fn flat_and_constant_metrics() {
        for (a, b, c) in [("0", "0", "0"), ("3", "-2", "1/2")] {
            let g = build_metric(&parse(a).unwrap(), &parse(b).unwrap(), &parse(c).unwrap());
            let cb = ricci(&g);
            for r in cb.ricci.iter().flatten() {
                assert!(r.is_zero_literal());
            }
            assert!(einstein_residual(&g).iter().all(Expr::is_zero_literal));
        }
    }

    #[test]
    fn scalar_curvature_of_abstract_metric() {
        let cb = ricci(&abstract_metric());
        let want = parse("a_11 + b_22 + 2*c_12").unwrap();
        assert_eq!(is_zero_symbolic(&(&cb.scalar - want)), Some(true));
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(cb.christoffel[k][i][j], cb.christoffel[k][j][i]);
                }
            }
        }
    }

    #[test]
    fn non_solution_is_not_einstein() {
        let g = build_metric(&parse("x^2").unwrap(), &Expr::t(), &Expr::zero());
        let e = einstein_residual(&g);
        assert!(e.iter().any(|c| !is_zero(c).is_zero()));
    }

    #[test]
    fn probe_agrees_both_ways() {
        let r = equivalence_probe(42, 40);
        assert!(r.passed(), "{r:?}");
        let xy = r.correspondence.iter().find(|c| c.component == "E_xy").unwrap();
        assert_eq!(xy.terms, vec![("eq1".to_string(), 0.25)]);
        assert!(r.correspondence.iter().all(|c| c.fit_residual < 1e-8), "{:?}", r.correspondence);
    }

    #[test]
    fn emission_formats() {
        let g = build_metric(&parse("x^2").unwrap(), &Expr::zero(), &Expr::t());
        assert_eq!(g.line_element(), "ds^2 = 2(dx dy + dt dz) + (x^2) dy^2 + 2(t) dy dz");
        assert_eq!(g.json_matrix()[2][2], "x^2");
        assert!(g.latex().contains("dy\\circ dz"));
    }
}
