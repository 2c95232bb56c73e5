use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::{Expr, Node, Rational, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value bound for `{0}`")]
    Unbound(Symbol),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Floating values for the free symbols of an expression.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericPoint {
    values: BTreeMap<Symbol, f64>,
}

impl NumericPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: impl Into<Symbol>, v: f64) -> &mut Self {
        self.values.insert(s.into(), v);
        self
    }

    pub fn with(mut self, s: impl Into<Symbol>, v: f64) -> Self {
        self.values.insert(s.into(), v);
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &f64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl std::fmt::Display for NumericPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Smallest admissible magnitude of a denominator and smallest admissible
    /// log/root argument.
    pub guard: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { guard: 1e-12 }
    }
}

/// Value together with the largest magnitude of any summand met on the way,
/// which is the natural scale for judging cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub scale: f64,
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Expr {
    pub fn eval(&self, p: &NumericPoint) -> Result<f64, EvalError> {
        self.eval_with(p, EvalOptions::default()).map(|s| s.value)
    }

    pub fn eval_with(&self, p: &NumericPoint, opts: EvalOptions) -> Result<Scaled, EvalError> {
        let mut ev = Evaluator { p, opts, memo: HashMap::new(), scale: 0.0 };
        let value = ev.go(self)?;
        if !value.is_finite() {
            return Err(EvalError::Domain("non-finite value".into()));
        }
        Ok(Scaled { value, scale: ev.scale.max(value.abs()) })
    }
}

struct Evaluator<'a> {
    p: &'a NumericPoint,
    opts: EvalOptions,
    memo: HashMap<*const Node, f64>,
    scale: f64,
}

impl Evaluator<'_> {
    fn go(&mut self, e: &Expr) -> Result<f64, EvalError> {
        let key = e.node() as *const Node;
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let v = match e.node() {
            Node::Num(r) => rational_to_f64(r),
            Node::Sym(s) => self.p.get(s).ok_or_else(|| EvalError::Unbound(s.clone()))?,
            Node::Sum(ts) => {
                let mut acc = 0.0;
                for t in ts {
                    let v = self.go(t)?;
                    self.scale = self.scale.max(v.abs());
                    acc += v;
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = 1.0;
                for f in fs {
                    acc *= self.go(f)?;
                }
                acc
            }
            Node::Pow(b, q) => {
                let base = self.go(b)?;
                self.power(base, q)?
            }
            Node::Ln(u) => {
                let x = self.go(u)?;
                if x <= self.opts.guard {
                    return Err(EvalError::Domain(format!("ln of {x}")));
                }
                x.ln()
            }
            Node::Exp(u) => self.go(u)?.exp(),
            Node::Atan(u) => self.go(u)?.atan(),
        };
        if !v.is_finite() {
            return Err(EvalError::Domain("non-finite value".into()));
        }
        self.memo.insert(key, v);
        Ok(v)
    }

    fn power(&self, base: f64, q: &Rational) -> Result<f64, EvalError> {
        if q.is_negative() && base.abs() < self.opts.guard {
            return Err(EvalError::Domain(format!("division by {base}")));
        }
        if q.is_integer() {
            let n = q.to_integer().to_i32().ok_or_else(|| EvalError::Domain("huge exponent".into()))?;
            return Ok(base.powi(n));
        }
        let num = q.numer().to_i64().unwrap_or(0);
        let den = q.denom().to_i64().unwrap_or(2);
        if base <= self.opts.guard {
            if base < -self.opts.guard && den % 2 == 1 {
                let mag = (-base).powf(num as f64 / den as f64);
                return Ok(if num % 2 == 0 { mag } else { -mag });
            }
            return Err(EvalError::Domain(format!("root of {base}")));
        }
        Ok(base.powf(rational_to_f64(q)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn point(pairs: &[(&str, f64)]) -> NumericPoint {
        let mut p = NumericPoint::new();
        for (name, v) in pairs {
            let s = parse(name).unwrap().as_symbol().unwrap().clone();
            p.set(s, *v);
        }
        p
    }

    #[test]
    fn quotient() {
        let p = point(&[("a", 2.0), ("b", 6.0)]);
        assert_eq!(parse("b/a").unwrap().eval(&p).unwrap(), 3.0);
        let p = point(&[("a", 2.0), ("b", 8.0)]);
        assert_eq!(parse("-b/a^2").unwrap().eval(&p).unwrap(), -2.0);
    }

    #[test]
    fn table_entry_value() {
        let e = parse("4*(t+c1)/(c2*x+c3)^2").unwrap();
        let p = point(&[("x", 1.0), ("t", 1.0), ("c1", 0.0), ("c2", 1.0), ("c3", 1.0)]);
        assert_eq!(e.eval(&p).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        let p = point(&[("x", 0.0)]);
        assert!(matches!(parse("ln(x)").unwrap().eval(&p), Err(EvalError::Domain(_))));
        assert!(matches!(parse("1/x").unwrap().eval(&p), Err(EvalError::Domain(_))));
        assert!(matches!(parse("t").unwrap().eval(&p), Err(EvalError::Unbound(_))));
        let p = point(&[("x", -8.0)]);
        assert!((parse("x^(1/3)").unwrap().eval(&p).unwrap() + 2.0).abs() < 1e-12);
        assert!(parse("sqrt(x)").unwrap().eval(&p).is_err());
    }

    #[test]
    fn scale_tracks_cancellation() {
        let p = point(&[("x", 1e6)]);
        let s = parse("(x + 1) - x").unwrap();
        // normalization already cancels this one
        assert_eq!(s.eval(&p).unwrap(), 1.0);
        let e = parse("ln(x^2) - 2*ln(x)").unwrap();
        let r = e.eval_with(&p, EvalOptions::default()).unwrap();
        assert!(r.scale > 27.0);
    }
}
