use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CoeffVector, StructureConstants, DIM};
use crate::expr::{canonicalize, is_zero_symbolic, Bindings, Expr, Param};

/// Range of a symbolic parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamDomain {
    Real,
    /// `+-1`, rewritten through its square.
    Sign,
    /// `{0, 1, -1}`, checked case by case.
    Ternary,
}

/// Span of one or two coefficient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Subalgebra {
    pub name: String,
    pub gens: Vec<CoeffVector>,
    pub params: Vec<(Param, ParamDomain)>,
}

impl Subalgebra {
    pub fn new(name: impl Into<String>, gens: Vec<CoeffVector>) -> Self {
        let mut params = Vec::new();
        for g in &gens {
            for e in &g.0 {
                for s in e.free_symbols() {
                    if let crate::expr::Symbol::Param(p) = s {
                        if !params.iter().any(|(q, _)| *q == p) {
                            let dom = match p {
                                Param::Eps | Param::EpsP => ParamDomain::Sign,
                                Param::Epz => ParamDomain::Ternary,
                                _ => ParamDomain::Real,
                            };
                            params.push((p, dom));
                        }
                    }
                }
            }
        }
        params.sort_by_key(|(p, _)| *p);
        Subalgebra { name: name.into(), gens, params }
    }

    pub fn parse(name: impl Into<String>, gens: &[&str]) -> Result<Self, super::LieError> {
        let gens = gens.iter().map(|g| CoeffVector::parse(g)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(name, gens))
    }

    /// Values substituted for ternary parameters, one list per case.
    fn cases(&self) -> Vec<(String, Bindings)> {
        let mut cases = vec![(String::new(), Bindings::new())];
        for (p, dom) in &self.params {
            if *dom != ParamDomain::Ternary {
                continue;
            }
            let mut next = Vec::new();
            for (label, b) in &cases {
                for v in [0i64, 1, -1] {
                    let l = if label.is_empty() {
                        format!("{}={v}", p.name())
                    } else {
                        format!("{label}, {}={v}", p.name())
                    };
                    next.push((l, b.clone().with(*p, Expr::int(v))));
                }
            }
            cases = next;
        }
        cases
    }
}

impl fmt::Display for Subalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(ToString::to_string).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// `[g1, g2] = lambda*g1 + mu*g2` in one parameter case.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureWitness {
    pub case: String,
    pub lambda: Expr,
    pub mu: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Closure {
    pub closed: bool,
    pub witnesses: Vec<ClosureWitness>,
    /// Why closure failed, when it did.
    pub reason: Option<String>,
}

fn simplify(e: Expr) -> Expr {
    canonicalize(&e).unwrap_or(e)
}

fn is_zero(e: &Expr) -> bool {
    is_zero_symbolic(e) == Some(true)
}

/// Exact closure check, symbolic in the parameters.
pub fn subalgebra_closed(h: &Subalgebra, sc: &StructureConstants) -> Closure {
    match h.gens.len() {
        1 => {
            return Closure {
                closed: !h.gens[0].0.iter().all(is_zero),
                witnesses: vec![ClosureWitness { case: String::new(), lambda: Expr::zero(), mu: Expr::zero() }],
                reason: None,
            }
        }
        2 => {}
        n => {
            return Closure { closed: false, witnesses: Vec::new(), reason: Some(format!("{n} generators")) };
        }
    }
    let mut witnesses = Vec::new();
    for (case, bind) in h.cases() {
        let g1 = h.gens[0].map(|e| e.subs(&bind));
        let g2 = h.gens[1].map(|e| e.subs(&bind));
        match close_pair(&g1, &g2, sc) {
            Ok((lambda, mu)) => witnesses.push(ClosureWitness { case, lambda, mu }),
            Err(why) => {
                let reason = if case.is_empty() { why } else { format!("{case}: {why}") };
                return Closure { closed: false, witnesses, reason: Some(reason) };
            }
        }
    }
    Closure { closed: true, witnesses, reason: None }
}

fn close_pair(g1: &CoeffVector, g2: &CoeffVector, sc: &StructureConstants) -> Result<(Expr, Expr), String> {
    let br = sc.bracket(g1, g2);
    let mut minor = None;
    'search: for i in 0..DIM {
        for j in (i + 1)..DIM {
            let det = &g1.0[i] * &g2.0[j] - &g1.0[j] * &g2.0[i];
            if !is_zero(&det) {
                minor = Some((i, j, det));
                break 'search;
            }
        }
    }
    let (i, j, det) = minor.ok_or_else(|| "generators are linearly dependent".to_string())?;
    let lambda = simplify((&br.0[i] * &g2.0[j] - &br.0[j] * &g2.0[i]) / &det);
    let mu = simplify((&g1.0[i] * &br.0[j] - &g1.0[j] * &br.0[i]) / &det);
    for k in 0..DIM {
        let r = &br.0[k] - &lambda * &g1.0[k] - &mu * &g2.0[k];
        if !is_zero(&r) {
            return Err(format!("bracket {} leaves the span (component X{})", br, k + 1));
        }
    }
    Ok((lambda, mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(gens: &[&str]) -> Closure {
        subalgebra_closed(&Subalgebra::parse("h", gens).unwrap(), StructureConstants::standard())
    }

    #[test]
    fn translation_with_scaling() {
        let c = closed(&["X1", "X3 + alpha*X6 + beta*X7"]);
        assert!(c.closed);
        assert!(c.witnesses[0].lambda.is_one_literal());
        assert!(c.witnesses[0].mu.is_zero_literal());
    }

    #[test]
    fn open_pair() {
        let c = closed(&["X1", "X4"]);
        assert!(!c.closed);
        assert!(c.reason.unwrap().contains("X2"));
    }

    #[test]
    fn sign_parameters() {
        let c = closed(&["X3 + eps*X4", "eps*X5 + X6 - 2*X7"]);
        assert!(c.closed, "{:?}", c.reason);
        assert_eq!(c.witnesses[0].lambda, Expr::one());
        assert_eq!(c.witnesses[0].mu, Expr::int(-1));
    }

    #[test]
    fn ternary_split() {
        let c = closed(&["X2", "X1 + epz*X4 + beta*X7"]);
        assert!(c.closed);
        assert_eq!(c.witnesses.len(), 3);
        assert!(closed(&["X2", "X4"]).closed);
    }

    #[test]
    fn dependent_generators() {
        let c = closed(&["X1", "2*X1"]);
        assert!(!c.closed);
    }
}
