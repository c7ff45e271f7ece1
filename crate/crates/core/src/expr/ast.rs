use std::fmt;

use num_complex::Complex64;

use crate::superqubit::Level;

/// Numeric literal as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Number {
    Decimal(String),
    I,
    Sqrt(String),
}

impl Number {
    pub fn value(&self) -> Complex64 {
        match self {
            Number::Decimal(s) => Complex64::new(parse_decimal(s), 0.0),
            Number::I => Complex64::new(0.0, 1.0),
            Number::Sqrt(s) => Complex64::new(parse_decimal(s).sqrt(), 0.0),
        }
    }
}

fn parse_decimal(s: &str) -> f64 {
    s.parse().expect("lexer only produces valid decimals")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KetLabel {
    /// `|01.⟩`: one symbol per (super)qubit.
    Levels(Vec<Level>),
    /// `|B⟩`, `|F2⟩`: squbit internal ket with an optional label.
    Sector { fermionic: bool, label: u32 },
}

impl KetLabel {
    pub fn has_bullet(&self) -> bool {
        matches!(self, KetLabel::Levels(l) if l.contains(&Level::Bullet))
    }
}

/// Generator symbols: `e3` = η₃, `x3` = ξ₃, `xb3` = ξ̄₃, `t3` = θ₃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenSym {
    Eta(u32),
    Xi(u32),
    XiBar(u32),
    Theta(u32),
}

impl GenSym {
    pub fn name(&self) -> String {
        match self {
            GenSym::Eta(k) => format!("e{k}"),
            GenSym::Xi(k) => format!("x{k}"),
            GenSym::XiBar(k) => format!("xb{k}"),
            GenSym::Theta(k) => format!("t{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MulOp {
    Mul(StateExpr),
    Div(Number),
}

/// Parsed state expression. Operator chains are stored flat, so tree depth
/// only grows with explicit parentheses and unary minus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateExpr {
    Num(Number),
    Ket(KetLabel),
    Gen(GenSym),
    Sum(Box<StateExpr>, Vec<(AddOp, StateExpr)>),
    Product(Box<StateExpr>, Vec<MulOp>),
    Neg(Box<StateExpr>),
}

impl StateExpr {
    /// Calls `f` on every node, parents first.
    pub fn visit(&self, f: &mut impl FnMut(&StateExpr)) {
        f(self);
        match self {
            StateExpr::Sum(first, rest) => {
                first.visit(f);
                for (_, e) in rest {
                    e.visit(f);
                }
            }
            StateExpr::Product(first, rest) => {
                first.visit(f);
                for op in rest {
                    if let MulOp::Mul(e) = op {
                        e.visit(f);
                    }
                }
            }
            StateExpr::Neg(a) => a.visit(f),
            StateExpr::Num(_) | StateExpr::Ket(_) | StateExpr::Gen(_) => {}
        }
    }

    fn is_compound(&self) -> bool {
        matches!(self, StateExpr::Sum(..) | StateExpr::Product(..))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Decimal(s) => write!(f, "{s}"),
            Number::I => write!(f, "i"),
            Number::Sqrt(s) => write!(f, "sqrt({s})"),
        }
    }
}

impl fmt::Display for KetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        match self {
            KetLabel::Levels(levels) => {
                for l in levels {
                    write!(f, "{}", l.symbol())?;
                }
            }
            KetLabel::Sector { fermionic, label } => {
                write!(f, "{}", if *fermionic { 'F' } else { 'B' })?;
                if *label != 0 {
                    write!(f, "{label}")?;
                }
            }
        }
        write!(f, ">")
    }
}

struct Paren<'a>(&'a StateExpr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Pretty-printer; the output parses back to the same tree.
impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateExpr::Num(n) => write!(f, "{n}"),
            StateExpr::Ket(k) => write!(f, "{k}"),
            StateExpr::Gen(g) => write!(f, "{}", g.name()),
            StateExpr::Sum(first, rest) => {
                write!(f, "{}", Paren(first, matches!(**first, StateExpr::Sum(..))))?;
                for (op, e) in rest {
                    let sym = if *op == AddOp::Add { '+' } else { '-' };
                    write!(f, " {sym} {}", Paren(e, matches!(e, StateExpr::Sum(..))))?;
                }
                Ok(())
            }
            StateExpr::Product(first, rest) => {
                write!(f, "{}", Paren(first, first.is_compound()))?;
                for op in rest {
                    match op {
                        MulOp::Mul(e) => write!(f, " * {}", Paren(e, e.is_compound()))?,
                        MulOp::Div(n) => write!(f, " / {n}")?,
                    }
                }
                Ok(())
            }
            StateExpr::Neg(a) => write!(f, "-{}", Paren(a, a.is_compound())),
        }
    }
}
