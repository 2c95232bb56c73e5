use std::fmt;

/// Independent coordinate. The derivative index of a coordinate is its
/// position in `(x, t, y, z)` counted from one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    X,
    T,
    Y,
    Z,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::T, Coord::Y, Coord::Z];

    pub fn index(self) -> u8 {
        match self {
            Coord::X => 1,
            Coord::T => 2,
            Coord::Y => 3,
            Coord::Z => 4,
        }
    }

    pub fn from_index(i: u8) -> Option<Coord> {
        match i {
            1 => Some(Coord::X),
            2 => Some(Coord::T),
            3 => Some(Coord::Y),
            4 => Some(Coord::Z),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::T => "t",
            Coord::Y => "y",
            Coord::Z => "z",
        }
    }

    fn bit(self) -> u8 {
        1 << (self.index() - 1)
    }
}

/// Free constants: integration constants `c1..c9`, algebra coefficients
/// `b1..b9`, and the named parameters of the subalgebra lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    C(u8),
    B(u8),
    Alpha,
    Beta,
    Gamma,
    /// Sign parameter, `eps^2 = 1`.
    Eps,
    /// Second sign parameter, `epsp^2 = 1`.
    EpsP,
    /// Ternary parameter taking values in `{0, 1, -1}`; handled by case split.
    Epz,
    /// Group parameter of a one-parameter subgroup.
    S,
    Sp,
    Lambda,
    Mu,
}

impl Param {
    /// Parameters whose square is identically one.
    pub fn is_sign(self) -> bool {
        matches!(self, Param::Eps | Param::EpsP)
    }

    pub fn name(self) -> String {
        match self {
            Param::C(i) => format!("c{i}"),
            Param::B(i) => format!("b{i}"),
            Param::Alpha => "alpha".into(),
            Param::Beta => "beta".into(),
            Param::Gamma => "gamma".into(),
            Param::Eps => "eps".into(),
            Param::EpsP => "epsp".into(),
            Param::Epz => "epz".into(),
            Param::S => "s".into(),
            Param::Sp => "sp".into(),
            Param::Lambda => "lambda".into(),
            Param::Mu => "mu".into(),
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        let p = match name {
            "alpha" => Param::Alpha,
            "beta" => Param::Beta,
            "gamma" => Param::Gamma,
            "eps" => Param::Eps,
            "epsp" => Param::EpsP,
            "epz" => Param::Epz,
            "s" => Param::S,
            "sp" => Param::Sp,
            "lambda" => Param::Lambda,
            "mu" => Param::Mu,
            _ => {
                let (head, digits) = name.split_at(1);
                if digits.len() != 1 {
                    return None;
                }
                let d = digits.as_bytes()[0];
                if !(b'1'..=b'9').contains(&d) {
                    return None;
                }
                let i = d - b'0';
                match head {
                    "c" => Param::C(i),
                    "b" => Param::B(i),
                    _ => return None,
                }
            }
        };
        Some(p)
    }
}

/// Names of opaque functions. `a, b, c` are the metric functions of
/// `(x, t, y, z)`; `f, g` are reduced unknowns of a single invariant variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncName {
    A,
    B,
    C,
    F,
    G,
}

impl FuncName {
    pub fn letter(self) -> char {
        match self {
            FuncName::A => 'a',
            FuncName::B => 'b',
            FuncName::C => 'c',
            FuncName::F => 'f',
            FuncName::G => 'g',
        }
    }

    pub fn is_dependent(self) -> bool {
        matches!(self, FuncName::A | FuncName::B | FuncName::C)
    }
}

/// An opaque function with a sorted derivative multi-index, e.g. `a_12`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncSym {
    name: FuncName,
    args: u8,
    index: Vec<Coord>,
}

impl FuncSym {
    /// One of the dependent functions `a, b, c`, depending on all four coordinates.
    pub fn dependent(name: FuncName) -> FuncSym {
        FuncSym { name, args: 0b1111, index: Vec::new() }
    }

    /// A reduced unknown depending on one coordinate only.
    pub fn reduced(name: FuncName, arg: Coord) -> FuncSym {
        FuncSym { name, args: arg.bit(), index: Vec::new() }
    }

    pub fn a() -> FuncSym {
        Self::dependent(FuncName::A)
    }
    pub fn b() -> FuncSym {
        Self::dependent(FuncName::B)
    }
    pub fn c() -> FuncSym {
        Self::dependent(FuncName::C)
    }

    pub fn name(&self) -> FuncName {
        self.name
    }

    pub fn index(&self) -> &[Coord] {
        &self.index
    }

    pub fn order(&self) -> usize {
        self.index.len()
    }

    pub fn depends_on(&self, c: Coord) -> bool {
        self.args & c.bit() != 0
    }

    /// Single argument of a reduced function.
    pub fn reduced_arg(&self) -> Option<Coord> {
        if self.args == 0b1111 {
            return None;
        }
        Coord::ALL.into_iter().find(|c| self.depends_on(*c))
    }

    /// The underived function with the same name and arguments.
    pub fn base(&self) -> FuncSym {
        FuncSym { name: self.name, args: self.args, index: Vec::new() }
    }

    /// Derivative with respect to `c`; `None` when the function does not
    /// depend on `c`.
    pub fn derive(&self, c: Coord) -> Option<FuncSym> {
        if !self.depends_on(c) {
            return None;
        }
        let mut index = self.index.clone();
        let pos = index.partition_point(|k| *k <= c);
        index.insert(pos, c);
        Some(FuncSym { name: self.name, args: self.args, index })
    }

    /// Derivative along a whole multi-index.
    pub fn derive_all(&self, idx: &[Coord]) -> Option<FuncSym> {
        let mut f = self.clone();
        for c in idx {
            f = f.derive(*c)?;
        }
        Some(f)
    }

    /// Build `name_J` for the given (unsorted) index list.
    pub fn with_index(name: FuncName, args_from: &FuncSym, idx: &[Coord]) -> Option<FuncSym> {
        FuncSym { name, args: args_from.args, index: Vec::new() }.derive_all(idx)
    }
}

impl fmt::Display for FuncSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name.letter())?;
        if !self.index.is_empty() {
            write!(f, "_")?;
            for c in &self.index {
                write!(f, "{}", c.index())?;
            }
        }
        if let Some(arg) = self.reduced_arg() {
            write!(f, "({})", arg.name())?;
        }
        Ok(())
    }
}

/// Any atomic symbol an expression can mention.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Param(Param),
    Coord(Coord),
    Func(FuncSym),
    /// Basis element `X1..X7` of the symmetry algebra; only produced by the
    /// generator-text parser.
    Basis(u8),
}

impl Symbol {
    pub fn x() -> Symbol {
        Symbol::Coord(Coord::X)
    }
    pub fn t() -> Symbol {
        Symbol::Coord(Coord::T)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Param(p) => write!(f, "{}", p.name()),
            Symbol::Coord(c) => write!(f, "{}", c.name()),
            Symbol::Func(s) => write!(f, "{s}"),
            Symbol::Basis(i) => write!(f, "X{i}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_index_is_sorted() {
        let a2 = FuncSym::a().derive(Coord::T).unwrap();
        let a12 = a2.derive(Coord::X).unwrap();
        assert_eq!(a12.to_string(), "a_12");
        assert_eq!(FuncSym::a().derive_all(&[Coord::X, Coord::T]).unwrap(), a12);
    }

    #[test]
    fn reduced_function_ignores_other_coordinates() {
        let f = FuncSym::reduced(FuncName::F, Coord::T);
        assert!(f.derive(Coord::X).is_none());
        assert_eq!(f.derive(Coord::T).unwrap().to_string(), "f_2(t)");
    }

    #[test]
    fn param_names_round_trip() {
        for p in [Param::C(3), Param::B(7), Param::Alpha, Param::EpsP, Param::Epz, Param::Mu] {
            assert_eq!(Param::from_name(&p.name()), Some(p));
        }
        assert_eq!(Param::from_name("c0"), None);
        assert_eq!(Param::from_name("c10"), None);
    }
}
