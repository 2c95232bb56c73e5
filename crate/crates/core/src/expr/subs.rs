use std::collections::{BTreeMap, HashMap};

use super::{Expr, ExprError, FuncSym, Node, Symbol};

/// Symbol replacements. A binding for an underived function symbol also
/// rewrites every derivative of it as the matching derivative of the bound
/// expression.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    map: BTreeMap<Symbol, Expr>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, s: Symbol, e: Expr) -> &mut Self {
        self.map.insert(s, e);
        self
    }

    pub fn with(mut self, s: impl Into<Symbol>, e: Expr) -> Self {
        self.map.insert(s.into(), e);
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<&Expr> {
        self.map.get(s)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.map.iter()
    }

    fn lookup(&self, s: &Symbol, derived: &mut HashMap<FuncSym, Expr>) -> Option<Expr> {
        if let Some(e) = self.map.get(s) {
            return Some(e.clone());
        }
        let Symbol::Func(f) = s else { return None };
        if f.order() == 0 {
            return None;
        }
        let base = self.map.get(&Symbol::Func(f.base()))?;
        if let Some(e) = derived.get(f) {
            return Some(e.clone());
        }
        let e = base.diff_all(f.index());
        derived.insert(f.clone(), e.clone());
        Some(e)
    }
}

impl From<FuncSym> for Symbol {
    fn from(f: FuncSym) -> Symbol {
        Symbol::Func(f)
    }
}

impl From<super::Param> for Symbol {
    fn from(p: super::Param) -> Symbol {
        Symbol::Param(p)
    }
}

impl From<super::Coord> for Symbol {
    fn from(c: super::Coord) -> Symbol {
        Symbol::Coord(c)
    }
}

impl Expr {
    /// Replace bound symbols and renormalize.
    pub fn substitute(&self, b: &Bindings) -> Result<Expr, ExprError> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        let mut memo = HashMap::new();
        let mut derived = HashMap::new();
        subst(self, b, &mut memo, &mut derived)
    }

    /// Substitution that panics on a division by zero.
    pub fn subs(&self, b: &Bindings) -> Expr {
        self.substitute(b).expect("substitution produced a division by zero")
    }
}

fn subst(
    e: &Expr,
    b: &Bindings,
    memo: &mut HashMap<*const Node, Expr>,
    derived: &mut HashMap<FuncSym, Expr>,
) -> Result<Expr, ExprError> {
    let key = e.node() as *const Node;
    if let Some(r) = memo.get(&key) {
        return Ok(r.clone());
    }
    let r = match e.node() {
        Node::Num(_) => e.clone(),
        Node::Sym(s) => b.lookup(s, derived).unwrap_or_else(|| e.clone()),
        Node::Sum(ts) => {
            let v: Result<Vec<Expr>, ExprError> = ts.iter().map(|t| subst(t, b, memo, derived)).collect();
            Expr::add_all(v?)
        }
        Node::Product(fs) => {
            let v: Result<Vec<Expr>, ExprError> = fs.iter().map(|t| subst(t, b, memo, derived)).collect();
            Expr::try_mul_all(v?)?
        }
        Node::Pow(base, p) => subst(base, b, memo, derived)?.try_pow(p.clone())?,
        Node::Ln(u) => subst(u, b, memo, derived)?.ln(),
        Node::Exp(u) => Expr::exp(&subst(u, b, memo, derived)?),
        Node::Atan(u) => subst(u, b, memo, derived)?.atan(),
    };
    memo.insert(key, r.clone());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn derivatives_follow_the_binding() {
        let f = parse("f(t)").unwrap();
        let b = Bindings::new().with(FuncSym::b(), Expr::a() * f);
        let e = parse("b_2").unwrap().subs(&b);
        assert_eq!(e, parse("a_2*f(t) + a*f_2(t)").unwrap());
    }

    #[test]
    fn identity_binding() {
        let e = parse("a_11 - b_22 + c*a_12").unwrap();
        let b = Bindings::new().with(FuncSym::a(), Expr::a());
        assert_eq!(e.subs(&b), e);
    }

    #[test]
    fn off_plane_derivatives_vanish() {
        let b = Bindings::new().with(FuncSym::a(), parse("x^2*t").unwrap());
        assert!(parse("a_3 + a_24").unwrap().subs(&b).is_zero_literal());
    }

    #[test]
    fn zero_denominator_is_reported() {
        let b = Bindings::new().with(Param::C(1), Expr::zero());
        assert_eq!(parse("x/c1").unwrap().substitute(&b), Err(ExprError::DivisionByZero));
    }
}
