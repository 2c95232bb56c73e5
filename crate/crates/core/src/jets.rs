//! Second-order jets over `(x, t) -> (a, b, c)`, prolongation of vector
//! fields, and on-shell symmetry checks.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Coord, EvalOptions, Expr, FuncName, FuncSym, NumericPoint, Symbol};
use crate::liealg::VectorField;
use crate::sampling::rng_for;

const DEPENDENT: [FuncName; 3] = [FuncName::A, FuncName::B, FuncName::C];
const INDEPENDENT: [Coord; 2] = [Coord::X, Coord::T];

/// Residual expressions of a differential system, each equal to zero.
#[derive(Clone, Debug)]
pub struct PdeSystem {
    pub name: &'static str,
    pub residuals: Vec<Expr>,
}

fn system(name: &'static str, lines: &[&str]) -> PdeSystem {
    PdeSystem { name, residuals: lines.iter().map(|l| parse(l).expect("system text parses")).collect() }
}

/// The six equations for `a, b, c` depending on `(x, t)` only.
pub fn reduced_system() -> PdeSystem {
    system(
        "reduced",
        &[
            "a_11 - b_22",
            "b_12 + c_11",
            "a_12 + c_22",
            "a_1*c_2 + a_2*b_2 - a_2*c_1 - c_2^2 + 2*c*a_12 + b*a_22 - a*c_12",
            "a_2*b_1 - c_1*c_2 + c*a_11 - a*c_11 - c*c_12 - b*c_22",
            "a_1*b_1 - b_1*c_2 + b_2*c_1 - c_1^2 + a*b_11 + 2*c*b_12 - b*c_12",
        ],
    )
}

/// The six equations in all four coordinates.
pub fn full_system() -> PdeSystem {
    system(
        "full",
        &[
            "a_11 - b_22",
            "b_12 + c_11",
            "a_12 + c_22",
            "a_1*c_2 + a_2*b_2 - a_2*c_1 - c_2^2 + 2*c*a_12 + b*a_22 - 2*a_24 - a*c_12 + 2*c_23",
            "a_2*b_1 - c_1*c_2 + c*a_11 - a_14 - b_23 - a*c_11 - c*c_12 + c_13 - b*c_22 + c_24",
            "a_1*b_1 - b_1*c_2 + b_2*c_1 - c_1^2 + a*b_11 + 2*c*b_12 - 2*b_13 - b*c_12 + 2*c_14",
        ],
    )
}

/// Dependent-variable symbols with derivative index (sorted), order at most two.
pub fn dependent_jets() -> Vec<FuncSym> {
    let mut out = Vec::new();
    for name in DEPENDENT {
        let base = FuncSym::dependent(name);
        out.push(base.clone());
        for ci in INDEPENDENT {
            out.push(base.derive(ci).expect("derivable"));
        }
        for (i, ci) in INDEPENDENT.iter().enumerate() {
            for cj in &INDEPENDENT[i..] {
                out.push(base.derive_all(&[*ci, *cj]).expect("derivable"));
            }
        }
    }
    out
}

/// All twenty jet coordinates: `x, t`, then each dependent variable with its
/// first and second derivatives.
pub fn jet_symbols() -> Vec<Symbol> {
    let mut out = vec![Symbol::x(), Symbol::t()];
    out.extend(dependent_jets().into_iter().map(Symbol::Func));
    out
}

/// A point of the second-order jet space.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub point: NumericPoint,
}

impl JetPoint {
    pub fn get(&self, s: &Symbol) -> f64 {
        self.point.get(s).unwrap_or(0.0)
    }

    pub fn values(&self) -> Vec<f64> {
        jet_symbols().iter().map(|s| self.get(s)).collect()
    }
}

/// Prolonged coefficient for every jet coordinate.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub coeffs: BTreeMap<Symbol, Expr>,
}

impl Prolongation {
    pub fn coeff(&self, s: &Symbol) -> Expr {
        self.coeffs.get(s).cloned().unwrap_or_else(Expr::zero)
    }

    /// `pr v (F)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add_all(self.coeffs.iter().filter(|(_, c)| !c.is_zero_literal()).map(|(s, c)| c * f.partial(s)))
    }
}

/// Second prolongation by the total-derivative recursion
/// `phi^{J,i} = D_i phi^J - sum_k (D_i xi^k) u_{J,k}`.
pub fn prolong2(v: &VectorField) -> Prolongation {
    let xi = [v.xi_x().clone(), v.xi_t().clone()];
    let mut coeffs = BTreeMap::new();
    coeffs.insert(Symbol::x(), xi[0].clone());
    coeffs.insert(Symbol::t(), xi[1].clone());
    for (name, phi) in DEPENDENT.iter().zip(v.phi()) {
        let base = FuncSym::dependent(*name);
        coeffs.insert(Symbol::Func(base.clone()), phi.clone());
        let mut first = Vec::new();
        for ci in INDEPENDENT {
            let c = lift(phi, &base, &xi, ci);
            let sym = base.derive(ci).expect("derivable");
            coeffs.insert(Symbol::Func(sym.clone()), c.clone());
            first.push((ci, sym, c));
        }
        for (ci, sym, c) in &first {
            for cj in INDEPENDENT {
                if cj.index() < ci.index() {
                    continue;
                }
                let second = sym.derive(cj).expect("derivable");
                coeffs.insert(Symbol::Func(second), lift(c, sym, &xi, cj));
            }
        }
    }
    Prolongation { coeffs }
}

fn lift(phi: &Expr, jet: &FuncSym, xi: &[Expr; 2], along: Coord) -> Expr {
    let mut out = phi.diff(along);
    for (k, ck) in INDEPENDENT.iter().enumerate() {
        let d = xi[k].diff(along);
        if !d.is_zero_literal() {
            let u = Expr::func(jet.derive(*ck).expect("derivable"));
            out = out - d * u;
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("no admissible on-shell point after {0} attempts")]
    Exhausted(usize),
    #[error("pivot {pivot:e} too small for {symbol}")]
    SmallPivot { symbol: String, pivot: f64 },
}

/// Equation index and the second derivative it is solved for, in solving order.
fn leading() -> Vec<(usize, Symbol)> {
    let f = |s: &str| match parse(s).expect("jet symbol").as_symbol() {
        Some(sym) => sym.clone(),
        None => unreachable!("jet symbol"),
    };
    vec![(0, f("a_11")), (1, f("c_11")), (2, f("c_22")), (4, f("c_12")), (3, f("a_22")), (5, f("b_11"))]
}

const PIVOT_GUARD: f64 = 1e-3;
const MAX_ATTEMPTS: usize = 100;

/// Fill in the six leading second derivatives so the reduced system holds.
/// Every residual is linear in its leading derivative.
pub fn complete_on_shell(free: &NumericPoint) -> Result<JetPoint, JetError> {
    let sys = reduced_system();
    let mut p = free.clone();
    for (eq, sym) in leading() {
        let r = &sys.residuals[eq];
        p.set(sym.clone(), 0.0);
        let r0 = r.eval(&p).map_err(|_| JetError::Exhausted(1))?;
        p.set(sym.clone(), 1.0);
        let r1 = r.eval(&p).map_err(|_| JetError::Exhausted(1))?;
        let pivot = r1 - r0;
        if pivot.abs() < PIVOT_GUARD {
            return Err(JetError::SmallPivot { symbol: sym.to_string(), pivot });
        }
        p.set(sym, -r0 / pivot);
    }
    Ok(JetPoint { point: p })
}

/// Random on-shell jet; free coordinates uniform on `[0.5, 2]`.
pub fn on_shell_sample(seed: u64, name: &str) -> Result<JetPoint, JetError> {
    let mut rng = rng_for(seed, name);
    let lead: Vec<Symbol> = leading().into_iter().map(|(_, s)| s).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut p = NumericPoint::new();
        for s in jet_symbols() {
            if !lead.contains(&s) {
                p.set(s, rng.random_range(0.5..2.0));
            }
        }
        if let Ok(j) = complete_on_shell(&p) {
            return Ok(j);
        }
    }
    Err(JetError::Exhausted(MAX_ATTEMPTS))
}

pub fn on_shell_samples(seed: u64, n: usize) -> Result<Vec<JetPoint>, JetError> {
    (0..n).map(|i| on_shell_sample(seed, &format!("jet/{i}"))).collect()
}

/// Residuals of a system at a jet, each scaled by its largest summand.
pub fn residuals_at(sys: &PdeSystem, j: &JetPoint) -> Vec<f64> {
    sys.residuals
        .iter()
        .map(|r| match r.eval_with(&j.point, EvalOptions::default()) {
            Ok(s) if s.scale > 0.0 => s.value.abs() / s.scale.max(1.0),
            Ok(s) => s.value.abs(),
            Err(_) => f64::NAN,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryFailure {
    pub equation: usize,
    pub sample: usize,
    pub relative: f64,
    pub point: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub field: String,
    pub samples: usize,
    /// Largest relative residual per equation.
    pub max_relative: Vec<f64>,
    pub passed: bool,
    pub worst: Option<SymmetryFailure>,
}

pub const SYMMETRY_TOL: f64 = 1e-8;

/// Evaluate `pr^2 v (Delta)` for every equation at on-shell points.
pub fn symmetry_check(v: &VectorField, sys: &PdeSystem, points: &[JetPoint]) -> SymmetryReport {
    let pr = prolong2(v);
    let actions: Vec<Expr> = sys.residuals.iter().map(|r| pr.apply(r)).collect();
    let mut max_relative = vec![0.0f64; actions.len()];
    let mut worst: Option<SymmetryFailure> = None;
    for (k, j) in points.iter().enumerate() {
        for (e, act) in actions.iter().enumerate() {
            let rel = match act.eval_with(&j.point, EvalOptions::default()) {
                Ok(s) if s.scale > 0.0 => s.value.abs() / s.scale,
                Ok(_) => 0.0,
                Err(_) => f64::INFINITY,
            };
            if rel > max_relative[e] || rel.is_nan() {
                max_relative[e] = rel;
            }
            if worst.as_ref().is_none_or(|w| rel > w.relative) && rel > 0.0 {
                worst = Some(SymmetryFailure { equation: e + 1, sample: k, relative: rel, point: j.point.to_string() });
            }
        }
    }
    let passed = max_relative.iter().all(|r| *r < SYMMETRY_TOL);
    SymmetryReport { field: v.to_string(), samples: points.len(), max_relative, passed, worst }
}

/// Non-symmetry used as a negative control: `x d_x`.
pub fn negative_control() -> VectorField {
    VectorField::new([Expr::x(), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::generators;

    fn sym(s: &str) -> Symbol {
        parse(s).unwrap().as_symbol().unwrap().clone()
    }

    #[test]
    fn twenty_coordinates() {
        let s = jet_symbols();
        assert_eq!(s.len(), 20);
        let names: Vec<String> = s.iter().map(ToString::to_string).collect();
        assert!(names.contains(&"b_12".to_string()));
        assert!(!names.contains(&"b_21".to_string()));
    }

    #[test]
    fn translation_lifts_trivially() {
        let pr = prolong2(&generators()[0]);
        for s in jet_symbols() {
            if s != Symbol::x() {
                assert!(pr.coeff(&s).is_zero_literal(), "{s}");
            }
        }
    }

    #[test]
    fn scaling_lifts_linearly() {
        let pr = prolong2(&generators()[6]);
        assert_eq!(pr.coeff(&sym("a_11")), parse("a_11").unwrap());
        let pr5 = prolong2(&generators()[4]);
        assert_eq!(pr5.coeff(&sym("a_1")), parse("2*c_1").unwrap());
        assert_eq!(pr5.coeff(&sym("a_2")), parse("2*c_2 - a_1").unwrap());
    }

    #[test]
    fn prolongation_is_linear() {
        let g = generators();
        let combo = g[2].add(&g[4].scale(&Expr::int(3)));
        let lhs = prolong2(&combo);
        let (p3, p5) = (prolong2(&g[2]), prolong2(&g[4]));
        for s in jet_symbols() {
            assert_eq!(lhs.coeff(&s), p3.coeff(&s) + Expr::int(3) * p5.coeff(&s), "{s}");
        }
    }

    #[test]
    fn samples_are_on_shell() {
        let pts = on_shell_samples(42, 100).unwrap();
        let sys = reduced_system();
        for p in &pts {
            assert!(residuals_at(&sys, p).iter().all(|r| *r < 1e-12));
        }
        let mut firsts: Vec<u64> = pts.iter().map(|p| p.get(&Symbol::x()).to_bits()).collect();
        firsts.sort();
        firsts.dedup();
        assert_eq!(firsts.len(), 100);
    }

    #[test]
    fn zero_jet_is_on_shell() {
        let mut p = NumericPoint::new();
        for s in jet_symbols() {
            p.set(s, 0.0);
        }
        for s in ["a", "b", "c"] {
            p.set(sym(s), 1.0);
        }
        p.set(Symbol::x(), 0.7).set(Symbol::t(), 1.3);
        let j = complete_on_shell(&p).unwrap();
        for (_, s) in leading() {
            assert_eq!(j.get(&s), 0.0);
        }
    }

    #[test]
    fn generators_are_symmetries() {
        let pts = on_shell_samples(7, 20).unwrap();
        let sys = reduced_system();
        for (i, g) in generators().iter().enumerate() {
            let r = symmetry_check(g, &sys, &pts);
            assert!(r.passed, "X{}: {:?}", i + 1, r.max_relative);
        }
        let bad = symmetry_check(&negative_control(), &sys, &pts);
        assert!(!bad.passed);
        assert!(bad.max_relative.iter().any(|r| *r > 1e-3));
    }
}
