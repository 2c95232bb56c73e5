use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Node, Rational};

// Binding strength of the rendered top-level operator.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Canonical text form; `parse(render(e)) == e`.
pub fn render(e: &Expr) -> String {
    render_prec(e).0
}

fn wrap(s: (String, u8), min: u8) -> String {
    if s.1 < min {
        format!("({})", s.0)
    } else {
        s.0
    }
}

fn render_rational(r: &Rational) -> (String, u8) {
    if r.is_integer() {
        let s = r.numer().to_string();
        let p = if r.is_negative() { UNARY } else { ATOM };
        (s, p)
    } else {
        let s = format!("{}/{}", r.numer(), r.denom());
        (s, PRODUCT)
    }
}

fn render_prec(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Num(r) => render_rational(r),
        Node::Sym(s) => (s.to_string(), ATOM),
        Node::Sum(ts) => render_sum(ts),
        Node::Product(_) | Node::Pow(..) => render_product(e),
        Node::Ln(u) => (format!("ln({})", render(u)), ATOM),
        Node::Exp(u) => (format!("exp({})", render(u)), ATOM),
        Node::Atan(u) => (format!("atan({})", render(u)), ATOM),
    }
}

fn render_sum(ts: &[Expr]) -> (String, u8) {
    // constants read best at the end
    let mut order: Vec<&Expr> = ts.iter().filter(|t| t.as_num().is_none()).collect();
    order.extend(ts.iter().filter(|t| t.as_num().is_some()));
    let mut out = String::new();
    for (i, t) in order.iter().enumerate() {
        let (c, rest) = t.split_coeff();
        let negative = c.is_negative();
        let shown = if negative && i > 0 { Expr::num(-c) * rest } else { (*t).clone() };
        let body = wrap(render_prec(&shown), if i == 0 { UNARY } else { PRODUCT });
        if i == 0 {
            out.push_str(&body);
        } else if negative {
            out.push_str(" - ");
            out.push_str(&body);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    (out, SUM)
}

/// Render a power factor with a positive exponent.
fn render_power(base: &Expr, p: &Rational) -> (String, u8) {
    if p.is_one() {
        return render_prec(base);
    }
    if *p == Rational::new(1.into(), 2.into()) {
        return (format!("sqrt({})", render(base)), ATOM);
    }
    let b = wrap(render_prec(base), ATOM);
    let exp = if p.is_integer() { p.to_string() } else { format!("({})", p) };
    (format!("{b}^{exp}"), POWER)
}

fn render_product(e: &Expr) -> (String, u8) {
    let (coeff, rest) = e.split_coeff();
    let factors = match rest.node() {
        Node::Product(fs) => fs.clone(),
        _ => vec![rest.clone()],
    };
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in &factors {
        match f.node() {
            Node::Pow(b, p) if p.is_negative() => {
                den.push(wrap(render_power(b, &-p), POWER));
            }
            Node::Pow(b, p) => num.push(wrap(render_power(b, p), POWER)),
            _ => num.push(wrap(render_prec(f), POWER)),
        }
    }
    let negative = coeff.is_negative();
    let mag = coeff.abs();
    let top = mag.numer().clone();
    let bottom = mag.denom().clone();
    if !top.is_one() || num.is_empty() {
        num.insert(0, top.to_string());
    }
    if !bottom.is_one() {
        den.insert(0, bottom.to_string());
    }
    let mut s = num.join("*");
    match den.len() {
        0 => {}
        1 => {
            s.push('/');
            s.push_str(&den[0]);
        }
        _ => {
            s.push_str("/(");
            s.push_str(&den.join("*"));
            s.push(')');
        }
    }
    if negative {
        return (format!("-{s}"), UNARY);
    }
    let single = den.is_empty() && num.len() == 1;
    let prec = if single {
        // a lone power factor keeps its own strength
        match factors.as_slice() {
            [f] => match f.node() {
                Node::Pow(b, p) => render_power(b, p).1,
                _ => render_prec(f).1,
            },
            _ => PRODUCT,
        }
    } else {
        PRODUCT
    };
    (s, prec)
}
