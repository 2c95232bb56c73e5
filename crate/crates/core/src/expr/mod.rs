//! Symbolic expression kernel.
//!
//! Every [`Expr`] is kept in a normal form by its constructors: sums and
//! products are flattened and sorted under the derived total order, like
//! terms and like bases are merged, and rational constants are folded. Two
//! expressions that differ only by commuting or reassociating their terms
//! therefore compare equal structurally.
//!
//! Coefficient arithmetic is exact ([`Rational`]); floating point only
//! appears in [`eval`].

mod diff;
pub mod eval;
pub mod parse;
mod ratfn;
mod render;
pub use render::render;
mod subs;
mod symbol;
pub mod zero;

use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use eval::{EvalError, EvalOptions, NumericPoint, Scaled};
pub use parse::{parse, parse_generator, ParseError};
pub use ratfn::{canonicalize, Monomial, RatCtx, RatFn};
pub use subs::Bindings;
pub use symbol::{Coord, FuncName, FuncSym, Param, Symbol};
pub use zero::{is_zero, is_zero_symbolic, sample_point, sample_symbol, Witness, ZeroTest, ZeroVerdict};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("0^0 is undefined")]
    ZeroToZero,
    #[error("division by zero")]
    DivisionByZero,
}

/// Node kinds. Variant order participates in the canonical ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Pow(Expr, Rational),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
    Ln(Expr),
    Exp(Expr),
    Atan(Expr),
}

/// Immutable, shareable expression handle.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl std::hash::Hash for Expr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn rat2(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow::pow(r.clone(), e as usize)
    } else {
        num_traits::pow::pow(r.recip(), (-e) as usize)
    }
}

pub(crate) fn int_value(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

impl Expr {
    fn raw(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: Rational) -> Expr {
        Expr::raw(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(rat2(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::raw(Node::Sym(s))
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::sym(Symbol::Coord(c))
    }

    pub fn param(p: Param) -> Expr {
        Expr::sym(Symbol::Param(p))
    }

    pub fn func(f: FuncSym) -> Expr {
        Expr::sym(Symbol::Func(f))
    }

    pub fn x() -> Expr {
        Expr::coord(Coord::X)
    }
    pub fn t() -> Expr {
        Expr::coord(Coord::T)
    }
    pub fn a() -> Expr {
        Expr::func(FuncSym::a())
    }
    pub fn b() -> Expr {
        Expr::func(FuncSym::b())
    }
    pub fn c() -> Expr {
        Expr::func(FuncSym::c())
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    /// Normalized sum.
    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut acc = SumAcc::default();
        for t in terms {
            acc.push(&t, &Rational::one());
        }
        acc.finish()
    }

    /// Normalized product.
    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        Self::try_mul_all(factors).expect("product with a zero reciprocal")
    }

    pub fn try_mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Result<Expr, ExprError> {
        let mut acc = MulAcc::new();
        for f in factors {
            acc.push(&f, 1)?;
        }
        Ok(acc.finish())
    }

    /// `self^e`, panicking on `0^0` or a zero reciprocal.
    pub fn pow(&self, e: Rational) -> Expr {
        self.try_pow(e).expect("invalid power")
    }

    pub fn powi(&self, e: i64) -> Expr {
        self.pow(rat(e))
    }

    pub fn try_pow(&self, e: Rational) -> Result<Expr, ExprError> {
        if e.is_zero() {
            if self.is_zero_literal() {
                return Err(ExprError::ZeroToZero);
            }
            return Ok(Expr::one());
        }
        if e.is_one() {
            return Ok(self.clone());
        }
        if let Some(n) = int_value(&e) {
            let mut acc = MulAcc::new();
            acc.push(self, n)?;
            return Ok(acc.finish());
        }
        match self.node() {
            Node::Num(r) => {
                if r.is_zero() {
                    return if e.is_negative() { Err(ExprError::DivisionByZero) } else { Ok(Expr::zero()) };
                }
                if r.is_one() {
                    return Ok(Expr::one());
                }
                if let Some(root) = exact_root(r, &e) {
                    return Ok(Expr::num(root));
                }
                // keep the exponent's fractional part on the base and fold the
                // integer part into a coefficient
                let (whole, part) = split_exponent(&e);
                let coeff = rat_pow(r, whole);
                if part.is_zero() {
                    return Ok(Expr::num(coeff));
                }
                Ok(Expr::mul_all([Expr::num(coeff), Expr::raw(Node::Pow(self.clone(), part))]))
            }
            Node::Exp(u) => Ok(Expr::exp(&(Expr::num(e) * u))),
            Node::Pow(b, p) => b.try_pow(p * e),
            Node::Sum(_) => {
                let (c, prim) = sum_content(self);
                if c.is_one() || c.is_negative() {
                    return Ok(Expr::raw(Node::Pow(self.clone(), e)));
                }
                Ok(Expr::mul_all([Expr::num(c).try_pow(e.clone())?, Expr::raw(Node::Pow(prim, e))]))
            }
            Node::Product(fs) => {
                let (coeff, _) = self.split_coeff();
                if coeff.is_negative() {
                    return Ok(Expr::raw(Node::Pow(self.clone(), e)));
                }
                let parts: Result<Vec<Expr>, ExprError> = fs.iter().map(|f| f.try_pow(e.clone())).collect();
                Expr::try_mul_all(parts?)
            }
            _ => Ok(Expr::raw(Node::Pow(self.clone(), e))),
        }
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(rat2(1, 2))
    }

    pub fn ln(&self) -> Expr {
        match self.node() {
            Node::Num(r) if r.is_one() => Expr::zero(),
            Node::Exp(u) => u.clone(),
            _ => Expr::raw(Node::Ln(self.clone())),
        }
    }

    /// `exp(arg)`; integer multiples of logarithms in `arg` are pulled out
    /// as powers, so `exp(s - ln(u)) = exp(s)/u`.
    pub fn exp(arg: &Expr) -> Expr {
        if arg.is_zero_literal() {
            return Expr::one();
        }
        let mut powers = Vec::new();
        let mut rest = Vec::new();
        for term in arg.terms() {
            match log_multiple(&term) {
                Some((k, u)) => powers.push(u.pow(k)),
                None => rest.push(term),
            }
        }
        if powers.is_empty() {
            return Expr::raw(Node::Exp(arg.clone()));
        }
        let rest = Expr::add_all(rest);
        if !rest.is_zero_literal() {
            powers.push(Expr::raw(Node::Exp(rest)));
        }
        Expr::mul_all(powers)
    }

    pub fn atan(&self) -> Expr {
        if self.is_zero_literal() {
            return Expr::zero();
        }
        Expr::raw(Node::Atan(self.clone()))
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        let inv = rhs.try_pow(rat(-1))?;
        Expr::try_mul_all([self.clone(), inv])
    }

    /// Split into rational coefficient and the remaining non-numeric term.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Num(r) => (r.clone(), Expr::one()),
            Node::Product(fs) => {
                if let Node::Num(c) = fs[0].node() {
                    let rest = if fs.len() == 2 { fs[1].clone() } else { Expr::raw(Node::Product(fs[1..].to_vec())) };
                    (c.clone(), rest)
                } else {
                    (Rational::one(), self.clone())
                }
            }
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Top-level summands (a non-sum is its own single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Sum(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Immediate children, used by generic traversals.
    pub fn children(&self) -> Vec<Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => Vec::new(),
            Node::Pow(b, _) => vec![b.clone()],
            Node::Product(v) | Node::Sum(v) => v.clone(),
            Node::Ln(u) | Node::Exp(u) | Node::Atan(u) => vec![u.clone()],
        }
    }

    pub fn free_symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        if let Node::Sym(s) = self.node() {
            out.insert(s.clone());
        }
        for c in self.children() {
            c.collect_symbols(out);
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        match self.node() {
            Node::Sym(t) => t == s,
            _ => self.children().iter().any(|c| c.contains(s)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Expr::size).sum::<usize>()
    }
}

/// Split a sum as `c * s` where the first term of `s` has coefficient one.
fn sum_content(e: &Expr) -> (Rational, Expr) {
    let Node::Sum(ts) = e.node() else {
        return (Rational::one(), e.clone());
    };
    // lead with the smallest monomial so rescaling never changes the choice
    let (c, _) = ts.iter().map(Expr::split_coeff).min_by(|a, b| a.1.cmp(&b.1)).expect("nonempty sum");
    if c.is_one() {
        return (c, e.clone());
    }
    let inv = c.recip();
    let mut acc = SumAcc::default();
    for t in ts {
        acc.push(t, &inv);
    }
    (c, acc.finish())
}

/// `k*ln(u)` with integer `k`.
fn log_multiple(term: &Expr) -> Option<(Rational, Expr)> {
    match term.node() {
        Node::Ln(u) => Some((Rational::one(), u.clone())),
        Node::Product(fs) if fs.len() == 2 => match (fs[0].node(), fs[1].node()) {
            (Node::Num(k), Node::Ln(u)) if k.is_integer() => Some((k.clone(), u.clone())),
            _ => None,
        },
        _ => None,
    }
}

fn split_exponent(e: &Rational) -> (i64, Rational) {
    let whole = e.floor();
    let part = e - &whole;
    (whole.to_integer().to_i64().unwrap_or(0), part)
}

/// Exact rational root `r^e` when it exists (e.g. `4^(1/2) = 2`).
fn exact_root(r: &Rational, e: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let q = e.denom().to_u32()?;
    let p = e.numer().to_i64()?;
    let n = int_root(r.numer(), q)?;
    let d = int_root(r.denom(), q)?;
    Some(rat_pow(&Rational::new(n, d), p))
}

fn int_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    if num_traits::pow::pow(r.clone(), q as usize) == *n {
        Some(r)
    } else {
        None
    }
}

#[derive(Default)]
struct SumAcc {
    constant: Rational,
    terms: BTreeMap<Expr, Rational>,
}

impl SumAcc {
    fn push(&mut self, e: &Expr, scale: &Rational) {
        match e.node() {
            Node::Num(r) => self.constant += scale * r,
            Node::Sum(ts) => {
                for t in ts {
                    self.push(t, scale);
                }
            }
            _ => {
                let (c, rest) = e.split_coeff();
                let slot = self.terms.entry(rest).or_insert_with(Rational::zero);
                *slot += scale * c;
            }
        }
    }

    fn finish(self) -> Expr {
        let mut out: Vec<Expr> = Vec::with_capacity(self.terms.len() + 1);
        if !self.constant.is_zero() {
            out.push(Expr::num(self.constant));
        }
        for (rest, c) in self.terms {
            if c.is_zero() {
                continue;
            }
            out.push(with_coeff(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::raw(Node::Sum(out))
            }
        }
    }
}

/// Reattach a coefficient to a coefficient-free term.
fn with_coeff(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest.node() {
        Node::Product(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::num(c));
            v.extend(fs.iter().cloned());
            Expr::raw(Node::Product(v))
        }
        Node::Num(r) => Expr::num(c * r),
        _ => Expr::raw(Node::Product(vec![Expr::num(c), rest])),
    }
}

struct MulAcc {
    coeff: Rational,
    bases: BTreeMap<Expr, Rational>,
    exp_args: Vec<Expr>,
}

impl MulAcc {
    fn new() -> Self {
        MulAcc { coeff: Rational::one(), bases: BTreeMap::new(), exp_args: Vec::new() }
    }

    fn push(&mut self, e: &Expr, n: i64) -> Result<(), ExprError> {
        if n == 0 {
            if e.is_zero_literal() {
                return Err(ExprError::ZeroToZero);
            }
            return Ok(());
        }
        match e.node() {
            Node::Num(r) => {
                if r.is_zero() && n < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                self.coeff *= rat_pow(r, n);
            }
            Node::Product(fs) => {
                for f in fs {
                    self.push(f, n)?;
                }
            }
            Node::Pow(b, p) => self.add_base(b.clone(), p * rat(n)),
            Node::Exp(u) => self.exp_args.push(Expr::int(n) * u),
            Node::Sum(_) => {
                let (c, prim) = sum_content(e);
                self.coeff *= rat_pow(&c, n);
                self.add_base(prim, rat(n));
            }
            _ => self.add_base(e.clone(), rat(n)),
        }
        Ok(())
    }

    fn add_base(&mut self, base: Expr, p: Rational) {
        let slot = self.bases.entry(base).or_insert_with(Rational::zero);
        *slot += p;
    }

    fn finish(mut self) -> Expr {
        if self.coeff.is_zero() {
            return Expr::zero();
        }
        while !self.exp_args.is_empty() {
            let arg = Expr::add_all(std::mem::take(&mut self.exp_args));
            let e = Expr::exp(&arg);
            match e.node() {
                Node::Exp(_) => self.add_base(e, Rational::one()),
                _ => self.push(&e, 1).expect("collapsed exponential"),
            }
        }
        // merged exponents can turn a product base back into an integer power
        let spill: Vec<(Expr, Rational)> = self
            .bases
            .iter()
            .filter(|(b, p)| matches!(b.node(), Node::Product(_)) && p.is_integer() && !p.is_zero())
            .map(|(b, p)| (b.clone(), p.clone()))
            .collect();
        if !spill.is_empty() {
            for (b, p) in &spill {
                self.bases.remove(b);
                self.push(b, int_value(p).expect("small exponent")).expect("product base");
            }
            return self.finish();
        }
        let mut factors: Vec<Expr> = Vec::with_capacity(self.bases.len());
        for (base, mut p) in std::mem::take(&mut self.bases) {
            if let Node::Sym(Symbol::Param(q)) = base.node() {
                if q.is_sign() && p.is_integer() {
                    p = Rational::from_integer(p.to_integer().mod_floor(&BigInt::from(2)));
                }
            }
            if p.is_zero() {
                continue;
            }
            if let Node::Num(r) = base.node() {
                let (whole, part) = split_exponent(&p);
                self.coeff *= rat_pow(r, whole);
                if part.is_zero() {
                    continue;
                }
                p = part;
            }
            if p.is_one() {
                factors.push(base);
            } else {
                factors.push(Expr::raw(Node::Pow(base, p)));
            }
        }
        if self.coeff.is_zero() {
            return Expr::zero();
        }
        if factors.is_empty() {
            return Expr::num(self.coeff);
        }
        factors.sort();
        if factors.len() == 1 {
            let f = factors.pop().unwrap();
            if self.coeff.is_one() {
                return f;
            }
            if let Node::Sum(ts) = f.node() {
                // distribute a bare numeric coefficient over a sum
                let mut acc = SumAcc::default();
                for t in ts {
                    acc.push(t, &self.coeff);
                }
                return acc.finish();
            }
            return Expr::raw(Node::Product(vec![Expr::num(self.coeff), f]));
        }
        if !self.coeff.is_one() {
            factors.insert(0, Expr::num(self.coeff));
        }
        Expr::raw(Node::Product(factors))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Param> for Expr {
    fn from(p: Param) -> Expr {
        Expr::param(p)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Expr {
        Expr::coord(c)
    }
}

impl From<FuncSym> for Expr {
    fn from(f: FuncSym) -> Expr {
        Expr::func(f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(&self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(&self, rhs)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(self, &rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(self, rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Expr, b: &Expr| Expr::add_all([a.clone(), b.clone()]));
binop!(Sub, sub, |a: &Expr, b: &Expr| Expr::add_all([a.clone(), -b]));
binop!(Mul, mul, |a: &Expr, b: &Expr| Expr::mul_all([a.clone(), b.clone()]));
binop!(Div, div, |a: &Expr, b: &Expr| a.checked_div(b).expect("division by zero"));

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all([Expr::int(-1), self.clone()])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add_all(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul_all(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: u8) -> Expr {
        Expr::param(Param::C(i))
    }

    #[test]
    fn additive_and_multiplicative_identities_fold() {
        let e = Expr::zero() * Expr::x() + Expr::t();
        assert_eq!(e, Expr::t());
        assert_eq!(Expr::one() * Expr::a(), Expr::a());
    }

    #[test]
    fn like_terms_merge() {
        let x = Expr::x();
        let e = &x + &x + Expr::int(2) * &x - Expr::int(4) * &x;
        assert!(e.is_zero_literal());
        let p = &x * &x * x.powi(-2);
        assert!(p.is_one_literal());
    }

    #[test]
    fn sums_commute_and_reassociate() {
        let (x, t) = (Expr::x(), Expr::t());
        let e1 = (&x + &t) + c(1);
        let e2 = c(1) + (&t + &x);
        assert_eq!(e1, e2);
        let p1 = (&x * &t) * c(2);
        let p2 = &t * (c(2) * &x);
        assert_eq!(p1, p2);
    }

    #[test]
    fn zero_to_zero_is_rejected() {
        assert_eq!(Expr::zero().try_pow(rat(0)), Err(ExprError::ZeroToZero));
        assert_eq!(Expr::zero().try_pow(rat(-2)), Err(ExprError::DivisionByZero));
        assert!(Expr::zero().try_pow(rat2(1, 2)).unwrap().is_zero_literal());
    }

    #[test]
    fn sign_parameters_square_to_one() {
        let eps = Expr::param(Param::Eps);
        assert!((&eps * &eps).is_one_literal());
        assert_eq!(eps.powi(3), eps);
        assert_eq!(eps.powi(-1), eps);
    }

    #[test]
    fn exponentials_merge_and_collapse_logs() {
        let s = Expr::param(Param::S);
        let sp = Expr::param(Param::Sp);
        let lhs = Expr::exp(&s) * Expr::exp(&sp);
        assert_eq!(lhs, Expr::exp(&(&s + &sp)));
        let b5 = Expr::param(Param::B(5));
        let e = &b5 * Expr::exp(&(-b5.ln()));
        assert!(e.is_one_literal());
    }

    #[test]
    fn numeric_roots() {
        assert_eq!(Expr::int(4).sqrt(), Expr::int(2));
        let s3 = Expr::int(3).sqrt();
        assert!(matches!(s3.node(), Node::Pow(..)));
        assert_eq!(&s3 * &s3, Expr::int(3));
    }

    #[test]
    fn coefficient_distributes_over_sum() {
        let e = Expr::int(2) * (Expr::x() + Expr::one());
        assert_eq!(e, Expr::int(2) * Expr::x() + Expr::int(2));
    }
}
