//! Canonical rational-function form used for symbolic zero testing.
//!
//! An expression is mapped to `N / D` where `N` is a Laurent polynomial over
//! atoms and `D` a product of powers of primitive polynomials. Atoms are
//! symbols and opaque kernels (`ln`, `exp`, `atan`, fractional roots) whose
//! arguments are themselves brought to canonical form first. The map is
//! sound: distinct atoms are treated as independent, so an empty numerator
//! proves the expression is zero, while a nonempty one proves nothing.

use std::collections::{BTreeMap, HashMap};

/// Exponent vector of a monomial as `(atom index, power)` pairs.
pub type Monomial = Vec<(u32, i32)>;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{int_value, Expr, Node, Rational, Symbol};

/// Abort threshold on the number of terms of any intermediate polynomial.
const MAX_TERMS: usize = 20_000;

type Mono = Vec<(u32, i32)>;
type Poly = BTreeMap<Mono, Rational>;

#[derive(Clone, Debug)]
enum AtomKind {
    Plain,
    /// Square is one.
    Sign,
    /// `base^(1/q)`; exponents are kept in `0..q`.
    Root {
        base: RatFn,
        q: i32,
    },
}

#[derive(Clone, Debug)]
struct Atom {
    expr: Expr,
    kind: AtomKind,
}

/// `num / prod(den_i ^ k_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

/// Atom table shared by every `RatFn` built from one context.
#[derive(Default)]
pub struct RatCtx {
    atoms: Vec<Atom>,
    index: HashMap<Expr, u32>,
    memo: HashMap<*const Node, RatFn>,
    // keeps memo keys alive
    pinned: Vec<Expr>,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn poly_const(c: Rational) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(Vec::new(), c);
    }
    p
}

fn poly_add_into(acc: &mut Poly, p: &Poly, scale: &Rational) {
    for (m, c) in p {
        let slot = acc.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c * scale;
        if slot.is_zero() {
            acc.remove(m);
        }
    }
}

impl RatCtx {
    pub fn new() -> Self {
        Self::default()
    }

    fn too_big(p: &Poly) -> bool {
        p.len() > MAX_TERMS
    }

    fn normalize_mono(&self, m: Mono) -> (Mono, Vec<(RatFn, i32)>) {
        // sign atoms reduce mod 2, roots mod q; roots spill powers of their base
        let mut out = Vec::with_capacity(m.len());
        let mut spill = Vec::new();
        for (a, e) in m {
            match &self.atoms[a as usize].kind {
                AtomKind::Plain => out.push((a, e)),
                AtomKind::Sign => {
                    if e.rem_euclid(2) == 1 {
                        out.push((a, 1));
                    }
                }
                AtomKind::Root { base, q } => {
                    let r = e.rem_euclid(*q);
                    let k = e.div_euclid(*q);
                    if r != 0 {
                        out.push((a, r));
                    }
                    if k != 0 {
                        spill.push((base.clone(), k));
                    }
                }
            }
        }
        (out, spill)
    }

    fn poly_mul(&self, a: &Poly, b: &Poly) -> Option<Poly> {
        let mut out = Poly::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m = mono_mul(ma, mb);
                let slot = out.entry(m).or_insert_with(Rational::zero);
                *slot += ca * cb;
            }
            if Self::too_big(&out) {
                return None;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Some(out)
    }

    fn poly_pow(&self, p: &Poly, n: u32) -> Option<Poly> {
        let mut acc = poly_const(Rational::one());
        for _ in 0..n {
            acc = self.poly_mul(&acc, p)?;
        }
        Some(acc)
    }

    fn constant(c: Rational) -> RatFn {
        RatFn { num: poly_const(c), den: BTreeMap::new() }
    }

    fn atom_fn(&self, id: u32) -> RatFn {
        let mut num = Poly::new();
        num.insert(vec![(id, 1)], Rational::one());
        RatFn { num, den: BTreeMap::new() }
    }

    fn intern(&mut self, expr: Expr, kind: AtomKind) -> u32 {
        if let Some(id) = self.index.get(&expr) {
            return *id;
        }
        let id = self.atoms.len() as u32;
        self.atoms.push(Atom { expr: expr.clone(), kind });
        self.index.insert(expr, id);
        id
    }

    /// Expand `prod(den^k)` into a single polynomial.
    fn expand_den(&self, den: &BTreeMap<Poly, u32>, skip: &BTreeMap<Poly, u32>) -> Option<Poly> {
        let mut acc = poly_const(Rational::one());
        for (p, k) in den {
            let have = skip.get(p).copied().unwrap_or(0);
            if *k > have {
                let pk = self.poly_pow(p, k - have)?;
                acc = self.poly_mul(&acc, &pk)?;
            }
        }
        Some(acc)
    }

    pub fn add(&self, a: &RatFn, b: &RatFn) -> Option<RatFn> {
        if a.num.is_empty() {
            return Some(b.clone());
        }
        if b.num.is_empty() {
            return Some(a.clone());
        }
        if a.den == b.den {
            let mut num = a.num.clone();
            poly_add_into(&mut num, &b.num, &Rational::one());
            return Some(RatFn { num, den: a.den.clone() });
        }
        let mut den = a.den.clone();
        for (p, k) in &b.den {
            let slot = den.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(*k);
        }
        let fa = self.expand_den(&den, &a.den)?;
        let fb = self.expand_den(&den, &b.den)?;
        let mut num = self.poly_mul(&a.num, &fa)?;
        let nb = self.poly_mul(&b.num, &fb)?;
        poly_add_into(&mut num, &nb, &Rational::one());
        if Self::too_big(&num) {
            return None;
        }
        Some(RatFn { num, den })
    }

    pub fn mul(&self, a: &RatFn, b: &RatFn) -> Option<RatFn> {
        if a.num.is_empty() || b.num.is_empty() {
            return Some(Self::constant(Rational::zero()));
        }
        let num = self.poly_mul(&a.num, &b.num)?;
        let mut den = a.den.clone();
        for (p, k) in &b.den {
            *den.entry(p.clone()).or_insert(0) += k;
        }
        self.reduce(RatFn { num, den })
    }

    fn scale(a: &RatFn, c: &Rational) -> RatFn {
        if c.is_zero() {
            return Self::constant(Rational::zero());
        }
        let num = a.num.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        RatFn { num, den: a.den.clone() }
    }

    /// Apply sign and root reductions to every numerator monomial.
    fn reduce(&self, r: RatFn) -> Option<RatFn> {
        let needs = r.num.keys().any(|m| {
            m.iter().any(|(a, e)| match &self.atoms[*a as usize].kind {
                AtomKind::Plain => false,
                AtomKind::Sign => *e != 1,
                AtomKind::Root { q, .. } => *e < 0 || e >= q,
            })
        });
        if !needs {
            return Some(r);
        }
        let mut plain = Poly::new();
        let mut spilled: Vec<RatFn> = Vec::new();
        for (m, c) in r.num {
            let (m, spill) = self.normalize_mono(m);
            if spill.is_empty() {
                let slot = plain.entry(m).or_insert_with(Rational::zero);
                *slot += c;
            } else {
                let mut term = RatFn { num: BTreeMap::from([(m, c)]), den: BTreeMap::new() };
                for (base, k) in spill {
                    let f = self.pow_int(&base, k)?;
                    term = self.mul(&term, &f)?;
                }
                spilled.push(term);
            }
        }
        plain.retain(|_, c| !c.is_zero());
        let mut acc = RatFn { num: plain, den: BTreeMap::new() };
        for t in spilled {
            acc = self.add(&acc, &t)?;
        }
        let mut den = r.den;
        for (p, k) in acc.den {
            *den.entry(p).or_insert(0) += k;
        }
        Some(RatFn { num: acc.num, den })
    }

    pub fn inverse(&self, a: &RatFn) -> Option<RatFn> {
        if a.num.is_empty() {
            return None;
        }
        let new_num = self.expand_den(&a.den, &BTreeMap::new())?;
        // split the old numerator into coefficient * monomial * primitive part:
        // the monomial takes the least exponent of each atom
        let mut atoms: Vec<u32> = a.num.keys().flat_map(|m| m.iter().map(|(v, _)| *v)).collect();
        atoms.sort_unstable();
        atoms.dedup();
        let mut cmono: Mono = Vec::new();
        for v in atoms {
            let mut lo = i32::MAX;
            for m in a.num.keys() {
                let e = m.iter().find(|(w, _)| *w == v).map(|(_, e)| *e).unwrap_or(0);
                lo = lo.min(e);
            }
            if lo != 0 {
                cmono.push((v, lo));
            }
        }
        let inv_c: Mono = cmono.iter().map(|(v, e)| (*v, -e)).collect();
        let mut prim = Poly::new();
        for (m, c) in &a.num {
            prim.insert(mono_mul(m, &inv_c), c.clone());
        }
        let lead = prim.values().next_back().expect("nonempty").clone();
        for c in prim.values_mut() {
            *c /= &lead;
        }
        let mut num = self.poly_mul(&new_num, &BTreeMap::from([(inv_c, lead.recip())]))?;
        num.retain(|_, c| !c.is_zero());
        let mut den = BTreeMap::new();
        if !(prim.len() == 1 && prim.keys().next().map(|m| m.is_empty()).unwrap_or(false)) {
            den.insert(prim, 1u32);
        }
        self.reduce(RatFn { num, den })
    }

    pub fn pow_int(&self, a: &RatFn, n: i32) -> Option<RatFn> {
        if n < 0 {
            let inv = self.inverse(a)?;
            return self.pow_int(&inv, -n);
        }
        let mut acc = Self::constant(Rational::one());
        let mut base = a.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Some(acc)
    }

    /// Canonical expression for a rational function (numerator expanded).
    pub fn to_expr(&self, r: &RatFn) -> Expr {
        let num = self.poly_expr(&r.num);
        let mut parts = vec![num];
        for (p, k) in &r.den {
            parts.push(self.poly_expr(p).powi(-(*k as i64)));
        }
        Expr::mul_all(parts)
    }

    fn poly_expr(&self, p: &Poly) -> Expr {
        Expr::add_all(p.iter().map(|(m, c)| {
            let mut parts = vec![Expr::num(c.clone())];
            for (a, e) in m {
                parts.push(self.atoms[*a as usize].expr.powi(*e as i64));
            }
            Expr::mul_all(parts)
        }))
    }

    fn canonical_arg(&mut self, u: &Expr) -> Option<Expr> {
        let r = self.convert(u)?;
        Some(self.to_expr(&r))
    }

    /// Map an expression to canonical form; `None` when the size budget is
    /// exceeded or a denominator is identically zero.
    pub fn convert(&mut self, e: &Expr) -> Option<RatFn> {
        let key = e.node() as *const Node;
        if let Some(r) = self.memo.get(&key) {
            return Some(r.clone());
        }
        let r = match e.node() {
            Node::Num(c) => Self::constant(c.clone()),
            Node::Sym(s) => {
                let kind = match s {
                    Symbol::Param(p) if p.is_sign() => AtomKind::Sign,
                    _ => AtomKind::Plain,
                };
                let id = self.intern(e.clone(), kind);
                self.atom_fn(id)
            }
            Node::Sum(ts) => {
                let mut acc = Self::constant(Rational::zero());
                for t in ts {
                    let r = self.convert(t)?;
                    acc = self.add(&acc, &r)?;
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = Self::constant(Rational::one());
                for f in fs {
                    let r = self.convert(f)?;
                    acc = self.mul(&acc, &r)?;
                }
                acc
            }
            Node::Pow(b, p) => {
                if let Some(n) = int_value(p) {
                    let base = self.convert(b)?;
                    self.pow_int(&base, i32::try_from(n).ok()?)?
                } else {
                    let q = p.denom().to_i32()?;
                    let n = p.numer().to_i64()?;
                    let base = self.convert(b)?;
                    let canon = self.to_expr(&base);
                    let root = Expr::raw(Node::Pow(canon, Rational::new(BigInt::one(), BigInt::from(q))));
                    let id = self.intern(root, AtomKind::Root { base, q });
                    let mono =
                        RatFn { num: BTreeMap::from([(vec![(id, n as i32)], Rational::one())]), den: BTreeMap::new() };
                    self.reduce(mono)?
                }
            }
            Node::Ln(u) => {
                let arg = self.canonical_arg(u)?;
                let id = self.intern(Expr::raw(Node::Ln(arg)), AtomKind::Plain);
                self.atom_fn(id)
            }
            Node::Atan(u) => {
                let arg = self.canonical_arg(u)?;
                let id = self.intern(Expr::raw(Node::Atan(arg)), AtomKind::Plain);
                self.atom_fn(id)
            }
            Node::Exp(u) => {
                let ur = self.convert(u)?;
                // exp(k*w) = exp(w)^k for an integer leading coefficient k
                let lead = ur.num.values().next_back().cloned().unwrap_or_else(Rational::one);
                let k = if lead.is_integer() && !lead.is_zero() { lead } else { Rational::one() };
                let w = Self::scale(&ur, &k.recip());
                let arg = self.to_expr(&w);
                let id = self.intern(Expr::raw(Node::Exp(arg)), AtomKind::Plain);
                let kk = k.to_integer().to_i32()?;
                RatFn { num: BTreeMap::from([(vec![(id, kk)], Rational::one())]), den: BTreeMap::new() }
            }
        };
        self.pinned.push(e.clone());
        self.memo.insert(key, r.clone());
        Some(r)
    }
}

impl RatFn {
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn numerator_terms(&self) -> usize {
        self.num.len()
    }

    /// Monomials and coefficients when the denominator is trivial.
    pub fn polynomial_terms(&self) -> Option<Vec<(Monomial, Rational)>> {
        if !self.den.is_empty() {
            return None;
        }
        Some(self.num.iter().map(|(m, c)| (m.clone(), c.clone())).collect())
    }
}

/// Bring an expression to canonical rational form and back; `None` if the
/// size budget is exceeded.
pub fn canonicalize(e: &Expr) -> Option<Expr> {
    let mut ctx = RatCtx::new();
    let r = ctx.convert(e)?;
    Some(ctx.to_expr(&r))
}
