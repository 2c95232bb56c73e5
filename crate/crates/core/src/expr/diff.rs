use std::collections::HashMap;

use super::{Coord, Expr, Node, Symbol};

/// What a derivative is taken with respect to.
#[derive(Clone, Copy)]
enum Var<'a> {
    /// Total derivative along a coordinate: function symbols gain an index.
    Coord(Coord),
    /// Plain partial derivative treating every other symbol as independent.
    Symbol(&'a Symbol),
}

impl Expr {
    /// Derivative with respect to a coordinate. Function symbols that depend
    /// on the coordinate gain it in their index (`diff(a_1, t) = a_12`).
    pub fn diff(&self, c: Coord) -> Expr {
        let mut memo = HashMap::new();
        derive(self, Var::Coord(c), &mut memo)
    }

    /// Iterated derivative along a multi-index.
    pub fn diff_all(&self, idx: &[Coord]) -> Expr {
        idx.iter().fold(self.clone(), |e, c| e.diff(*c))
    }

    /// Partial derivative with respect to a single symbol, every other symbol
    /// (including derivative symbols such as `a_1`) held fixed.
    pub fn partial(&self, s: &Symbol) -> Expr {
        if !self.contains(s) {
            return Expr::zero();
        }
        let mut memo = HashMap::new();
        derive(self, Var::Symbol(s), &mut memo)
    }
}

fn derive(e: &Expr, v: Var<'_>, memo: &mut HashMap<*const Node, Expr>) -> Expr {
    let key = e.node() as *const Node;
    if let Some(d) = memo.get(&key) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => match v {
            Var::Symbol(t) => {
                if s == t {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Var::Coord(c) => match s {
                Symbol::Coord(k) if *k == c => Expr::one(),
                Symbol::Func(f) => match f.derive(c) {
                    Some(g) => Expr::func(g),
                    None => Expr::zero(),
                },
                _ => Expr::zero(),
            },
        },
        Node::Sum(ts) => Expr::add_all(ts.iter().map(|t| derive(t, v, memo))),
        Node::Product(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let df = derive(f, v, memo);
                if df.is_zero_literal() {
                    continue;
                }
                let mut parts: Vec<Expr> = Vec::with_capacity(fs.len());
                parts.push(df);
                parts.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()));
                terms.push(Expr::mul_all(parts));
            }
            Expr::add_all(terms)
        }
        Node::Pow(b, p) => {
            let db = derive(b, v, memo);
            if db.is_zero_literal() {
                Expr::zero()
            } else {
                let one = <super::Rational as num_traits::One>::one();
                Expr::mul_all([Expr::num(p.clone()), b.pow(p - &one), db])
            }
        }
        Node::Ln(u) => {
            let du = derive(u, v, memo);
            if du.is_zero_literal() {
                Expr::zero()
            } else {
                du / u
            }
        }
        Node::Exp(u) => {
            let du = derive(u, v, memo);
            du * e
        }
        Node::Atan(u) => {
            let du = derive(u, v, memo);
            if du.is_zero_literal() {
                Expr::zero()
            } else {
                du / (Expr::one() + u.powi(2))
            }
        }
    };
    memo.insert(key, d.clone());
    d
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn index_is_appended() {
        let a1 = parse("a_1").unwrap();
        assert_eq!(a1.diff(Coord::T), parse("a_12").unwrap());
    }

    #[test]
    fn constants_vanish() {
        let e = parse("c1*t + c2").unwrap();
        assert!(e.diff(Coord::X).is_zero_literal());
    }

    #[test]
    fn quotient_rule() {
        let e = parse("4*(t+c1)/(c2*x+c3)^2").unwrap();
        let expected = parse("-8*c2*(t+c1)/(c2*x+c3)^3").unwrap();
        assert_eq!(e.diff(Coord::X), expected);
    }

    #[test]
    fn transcendental_chain_rule() {
        let e = parse("ln(t + c2)").unwrap();
        assert_eq!(e.diff(Coord::T), parse("1/(t + c2)").unwrap());
        let e = parse("exp(c1*t)").unwrap();
        assert_eq!(e.diff(Coord::T), parse("c1*exp(c1*t)").unwrap());
        let e = parse("atan(2*x)").unwrap();
        assert_eq!(e.diff(Coord::X), parse("2/(1 + 4*x^2)").unwrap());
        let e = parse("sqrt(x)").unwrap();
        assert_eq!(e.diff(Coord::X), parse("1/(2*sqrt(x))").unwrap());
    }

    #[test]
    fn partial_holds_other_symbols_fixed() {
        let e = parse("a*b_1 + a_1^2").unwrap();
        let a1 = Symbol::Func(FuncSym::a().derive(Coord::X).unwrap());
        assert_eq!(e.partial(&a1), parse("2*a_1").unwrap());
        assert_eq!(e.partial(&Symbol::Func(FuncSym::a())), parse("b_1").unwrap());
    }

    #[test]
    fn reduced_function_derivative() {
        let e = parse("a*f(t)").unwrap();
        assert_eq!(e.diff(Coord::T), parse("a_2*f(t) + a*f_2(t)").unwrap());
        assert_eq!(e.diff(Coord::X), parse("a_1*f(t)").unwrap());
    }
}
