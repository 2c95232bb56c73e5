//! Recursive-descent parser for the expression grammar.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
//! associative). Exponents must fold to a rational constant.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use super::{Coord, Expr, ExprError, FuncName, FuncSym, Param, Rational, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{token}` at byte {offset}")]
    UnknownIdentifier { offset: usize, token: String },
    #[error("bad derivative index in `{token}` at byte {offset}")]
    BadIndex { offset: usize, token: String },
    #[error("exponent at byte {offset} is not a rational constant")]
    NonRationalExponent { offset: usize },
    #[error("{source} at byte {offset}")]
    Domain {
        offset: usize,
        #[source]
        source: ExprError,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::BadIndex { offset, .. }
            | ParseError::NonRationalExponent { offset }
            | ParseError::Domain { offset, .. } => *offset,
        }
    }
}

/// Parse an expression over coordinates, parameters and function symbols.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, false).run()
}

/// Parse generator text such as `eps*X2 + X5`; basis names `X1..X7` are allowed.
pub fn parse_generator(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, true).run()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    basis: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, basis: bool) -> Self {
        Parser { src, pos: 0, tok: Tok::End, tok_start: 0, basis }
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        if self.tok == Tok::End {
            return Err(self.syntax("empty expression"));
        }
        let e = self.sum()?;
        if self.tok != Tok::End {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(e)
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.tok_start, message: message.to_string() }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let ch = bytes[self.pos];
        if ch.is_ascii_digit() || ch == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let mut frac_digits = 0usize;
            if self.pos < bytes.len() && bytes[self.pos] == b'.' {
                self.pos += 1;
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                    frac_digits += 1;
                }
            }
            let text: String = self.src[start..self.pos].chars().filter(|c| *c != '.').collect();
            if text.is_empty() {
                return Err(self.syntax("malformed number"));
            }
            let n: BigInt = text.parse().map_err(|_| self.syntax("malformed number"))?;
            let d = num_traits::pow::pow(BigInt::from(10), frac_digits);
            self.tok = Tok::Num(Rational::new(n, d));
            return Ok(());
        }
        if ch.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
            return Ok(());
        }
        if b"+-*/^()".contains(&ch) {
            self.pos += 1;
            self.tok = Tok::Op(ch as char);
            return Ok(());
        }
        let c = self.src[self.pos..].chars().next().unwrap_or('?');
        Err(ParseError::Syntax { offset: self.pos, message: format!("unexpected character `{c}`") })
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.tok != Tok::Op(op) {
            return Err(self.syntax(&format!("expected `{op}`")));
        }
        self.advance()
    }

    fn domain(&self, offset: usize, r: Result<Expr, ExprError>) -> Result<Expr, ParseError> {
        r.map_err(|source| ParseError::Domain { offset, source })
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.product()?];
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.advance()?;
                    terms.push(self.product()?);
                }
                Tok::Op('-') => {
                    self.advance()?;
                    terms.push(-self.product()?);
                }
                _ => break,
            }
        }
        Ok(Expr::add_all(terms))
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.advance()?;
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    let at = self.tok_start;
                    self.advance()?;
                    let rhs = self.unary()?;
                    acc = self.domain(at, acc.checked_div(&rhs))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(-self.unary()?);
        }
        if self.tok == Tok::Op('+') {
            self.advance()?;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        let at = self.tok_start;
        self.advance()?;
        let exp_at = self.tok_start;
        let exponent = self.unary()?;
        let Some(r) = exponent.as_num() else {
            return Err(ParseError::NonRationalExponent { offset: exp_at });
        };
        self.domain(at, base.try_pow(r.clone()))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(r) => {
                self.advance()?;
                Ok(Expr::num(r))
            }
            Tok::Op('(') => {
                self.advance()?;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.tok_start;
                self.advance()?;
                self.identifier(&name, at)
            }
            Tok::End => Err(self.syntax("unexpected end of input")),
            Tok::Op(c) => Err(self.syntax(&format!("unexpected `{c}`"))),
        }
    }

    fn call_arg(&mut self) -> Result<Expr, ParseError> {
        self.expect('(')?;
        let e = self.sum()?;
        self.expect(')')?;
        Ok(e)
    }

    fn identifier(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        match name {
            "ln" => {
                let u = self.call_arg()?;
                return Ok(u.ln());
            }
            "exp" => {
                let u = self.call_arg()?;
                return Ok(Expr::exp(&u));
            }
            "atan" => {
                let u = self.call_arg()?;
                return Ok(u.atan());
            }
            "sqrt" => {
                let u = self.call_arg()?;
                return self.domain(at, u.try_pow(Rational::new(BigInt::one(), BigInt::from(2))));
            }
            _ => {}
        }
        for c in Coord::ALL {
            if c.name() == name {
                return Ok(Expr::coord(c));
            }
        }
        if let Some(p) = Param::from_name(name) {
            return Ok(Expr::param(p));
        }
        if self.basis {
            if let Some(rest) = name.strip_prefix('X') {
                if let Ok(i) = rest.parse::<u8>() {
                    if (1..=7).contains(&i) && rest.len() == 1 {
                        return Ok(Expr::sym(Symbol::Basis(i)));
                    }
                }
            }
        }
        let (head, index) = match name.split_once('_') {
            Some((h, i)) => (h, Some(i)),
            None => (name, None),
        };
        let fname = match head {
            "a" => FuncName::A,
            "b" => FuncName::B,
            "c" => FuncName::C,
            "f" => FuncName::F,
            "g" => FuncName::G,
            _ => return Err(ParseError::UnknownIdentifier { offset: at, token: name.to_string() }),
        };
        let mut coords = Vec::new();
        if let Some(idx) = index {
            if idx.is_empty() {
                return Err(ParseError::BadIndex { offset: at, token: name.to_string() });
            }
            for ch in idx.bytes() {
                let c = (ch as char)
                    .to_digit(10)
                    .and_then(|d| Coord::from_index(d as u8))
                    .ok_or_else(|| ParseError::BadIndex { offset: at, token: name.to_string() })?;
                coords.push(c);
            }
        }
        let base = if fname.is_dependent() {
            FuncSym::dependent(fname)
        } else {
            // reduced unknowns carry their argument: f(t), g_1(x)
            let arg_at = self.tok_start;
            let arg = self.call_arg()?;
            let coord = match arg.as_symbol() {
                Some(Symbol::Coord(c)) => *c,
                _ => {
                    return Err(ParseError::Syntax {
                        offset: arg_at,
                        message: "reduced function argument must be a coordinate".into(),
                    })
                }
            };
            FuncSym::reduced(fname, coord)
        };
        let sym =
            base.derive_all(&coords).ok_or_else(|| ParseError::BadIndex { offset: at, token: name.to_string() })?;
        Ok(Expr::func(sym))
    }
}

/// Parse and require that the value is a rational constant.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let e = parse(text)?;
    e.as_num().cloned().ok_or(ParseError::NonRationalExponent { offset: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn sum_of_function_symbols() {
        let e = parse("a_12 + c_22").unwrap();
        let a12 = Expr::func(FuncSym::a().derive_all(&[Coord::X, Coord::T]).unwrap());
        let c22 = Expr::func(FuncSym::c().derive_all(&[Coord::T, Coord::T]).unwrap());
        assert_eq!(e, a12 + c22);
    }

    #[test]
    fn identities_fold_during_parse() {
        assert_eq!(parse("0*x + t").unwrap(), Expr::t());
    }

    #[test]
    fn power_has_canonical_base() {
        let e = parse("(c2*x+c3)^3").unwrap();
        let f = parse("(c3 + x*c2)^3").unwrap();
        assert_eq!(e, f);
        assert!(matches!(e.node(), Node::Pow(..)));
    }

    #[test]
    fn indices_are_sorted() {
        assert_eq!(parse("a_21").unwrap(), parse("a_12").unwrap());
    }

    #[test]
    fn precedence_rules() {
        assert_eq!(parse("-x^2").unwrap(), -(Expr::x().powi(2)));
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("x^-1").unwrap(), Expr::x().powi(-1));
        assert_eq!(parse("3/4").unwrap(), Expr::frac(3, 4));
        assert_eq!(parse("1 - x - t").unwrap(), Expr::one() - Expr::x() - Expr::t());
    }

    #[test]
    fn errors_carry_offsets() {
        let err = parse("x + a_5").unwrap_err();
        assert_eq!(err.offset(), 4);
        assert!(err.to_string().contains("a_5"));
        assert!(matches!(parse("x + q"), Err(ParseError::UnknownIdentifier { offset: 4, .. })));
        assert!(matches!(parse("x ^ t"), Err(ParseError::NonRationalExponent { offset: 4 })));
        assert!(matches!(parse("(x"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(parse("0^0").is_err());
        assert!(parse("X1").is_err());
        assert!(parse_generator("X1 + 2*X6").is_ok());
    }

    #[test]
    fn reduced_functions() {
        let e = parse("f_2(t)").unwrap();
        assert_eq!(e.to_string(), "f_2(t)");
        assert!(parse("f_1(t)").is_err());
        assert!(parse("f(a)").is_err());
    }
}
