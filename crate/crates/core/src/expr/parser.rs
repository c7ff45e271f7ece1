//! Recursive-descent parser for state expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor | '/' number)*
//! factor := number | ket | gen | '(' expr ')' | '-' factor
//! number := decimal | 'i' | 'sqrt' '(' decimal ')'
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use crate::error::{Error, Result};
use crate::superqubit::Level;

use super::ast::{AddOp, GenSym, KetLabel, MulOp, Number, StateExpr};

/// Nesting limit for parentheses and unary minus.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Decimal(String),
    I,
    Sqrt,
    Ket(KetLabel),
    Gen(GenSym),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Invalid(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Decimal(s) => format!("number {s}"),
            Tok::I => "'i'".into(),
            Tok::Sqrt => "'sqrt'".into(),
            Tok::Ket(k) => format!("ket {k}"),
            Tok::Gen(g) => format!("generator {}", g.name()),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Invalid(c) => format!("{c:?}"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            let (line, column) = (self.line, self.column);
            let Some(&c) = self.chars.peek() else {
                out.push(Spanned {
                    tok: Tok::End,
                    line,
                    column,
                });
                return Ok(out);
            };
            let tok = match c {
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                '#' => {
                    self.take_while(|c| c != '\n');
                    continue;
                }
                '0'..='9' => self.number(line, column)?,
                '|' => {
                    self.bump();
                    self.ket(line, column)?
                }
                c if c.is_ascii_alphabetic() => self.word(line, column)?,
                _ => {
                    self.bump();
                    match c {
                        '+' => Tok::Plus,
                        '-' | '−' => Tok::Minus,
                        '*' | '·' => Tok::Star,
                        '/' => Tok::Slash,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        other => Tok::Invalid(other),
                    }
                }
            };
            out.push(Spanned { tok, line, column });
        }
    }

    fn number(&mut self, line: usize, column: usize) -> Result<Tok> {
        let mut s = self.take_while(|c| c.is_ascii_digit());
        if self.chars.peek() == Some(&'.') {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            // Exponents clash with `e<k>` generators; keep the grammar plain.
            return Err(parse_error(
                self.line,
                self.column,
                format!("exponent notation is not supported after {s}"),
                &["'*'", "'+'", "'-'", "'/'", "')'", "end of input"],
            ));
        }
        if s.parse::<f64>().map_or(true, |v| !v.is_finite()) {
            return Err(parse_error(
                line,
                column,
                format!("number {s} is out of range"),
                &["decimal"],
            ));
        }
        Ok(Tok::Decimal(s))
    }

    fn ket(&mut self, line: usize, column: usize) -> Result<Tok> {
        let first = self.chars.peek().copied();
        if let Some(s @ ('B' | 'F')) = first {
            self.bump();
            let digits = self.take_while(|c| c.is_ascii_digit());
            let label = if digits.is_empty() {
                0
            } else {
                digits
                    .parse()
                    .map_err(|_| parse_error(line, column, format!("ket label {digits} is too large"), &["digit"]))?
            };
            self.close_ket(&["digit", "'>'"])?;
            return Ok(Tok::Ket(KetLabel::Sector {
                fermionic: s == 'F',
                label,
            }));
        }
        let mut levels = Vec::new();
        while let Some(l) = self.chars.peek().copied().and_then(Level::from_symbol) {
            self.bump();
            levels.push(l);
        }
        if levels.is_empty() {
            self.close_ket(&["'0'", "'1'", "'.'", "'B'", "'F'"])?;
            return Err(parse_error(
                line,
                column,
                "empty ket",
                &["'0'", "'1'", "'.'", "'B'", "'F'"],
            ));
        }
        self.close_ket(&["'0'", "'1'", "'.'", "'>'"])?;
        Ok(Tok::Ket(KetLabel::Levels(levels)))
    }

    fn close_ket(&mut self, expected: &[&str]) -> Result<()> {
        match self.chars.peek() {
            Some('>' | '⟩') => {
                self.bump();
                Ok(())
            }
            Some(&c) => Err(parse_error(
                self.line,
                self.column,
                format!("unexpected {c:?} inside ket"),
                expected,
            )),
            None => Err(parse_error(self.line, self.column, "unterminated ket", expected)),
        }
    }

    fn word(&mut self, line: usize, column: usize) -> Result<Tok> {
        let letters = self.take_while(|c| c.is_ascii_alphabetic());
        let digits = self.take_while(|c| c.is_ascii_digit());
        let unknown = || {
            parse_error(
                line,
                column,
                format!("unknown identifier {letters}{digits}"),
                &["'i'", "'sqrt'", "e<k>", "x<k>", "xb<k>", "t<k>"],
            )
        };
        if digits.is_empty() {
            return match letters.as_str() {
                "i" => Ok(Tok::I),
                "sqrt" => Ok(Tok::Sqrt),
                _ => Err(unknown()),
            };
        }
        let k: u32 = match digits.parse() {
            Ok(k) if (1..=64).contains(&k) => k,
            _ => {
                return Err(parse_error(
                    line,
                    column,
                    format!("generator index {digits} outside 1..=64"),
                    &["index in 1..=64"],
                ))
            }
        };
        let gen = match letters.as_str() {
            "e" => GenSym::Eta(k),
            "x" => GenSym::Xi(k),
            "xb" => GenSym::XiBar(k),
            "t" => GenSym::Theta(k),
            _ => return Err(unknown()),
        };
        Ok(Tok::Gen(gen))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    depth: usize,
}

const FACTOR_START: &[&str] = &["number", "'i'", "'sqrt'", "ket", "generator", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Error {
        let s = &self.toks[self.pos];
        parse_error(s.line, s.column, format!("unexpected {}", s.tok.describe()), expected)
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let s = &self.toks[self.pos];
            return Err(parse_error(
                s.line,
                s.column,
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                &[],
            ));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<StateExpr> {
        let first = self.term()?;
        let mut rest = Vec::new();
        loop {
            let op = match self.peek() {
                Tok::Plus => AddOp::Add,
                Tok::Minus => AddOp::Sub,
                _ => break,
            };
            self.advance();
            rest.push((op, self.term()?));
        }
        Ok(if rest.is_empty() {
            first
        } else {
            StateExpr::Sum(Box::new(first), rest)
        })
    }

    fn term(&mut self) -> Result<StateExpr> {
        let first = self.factor()?;
        let mut rest = Vec::new();
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    rest.push(MulOp::Mul(self.factor()?));
                }
                Tok::Slash => {
                    self.advance();
                    rest.push(MulOp::Div(self.number()?));
                }
                _ => break,
            }
        }
        Ok(if rest.is_empty() {
            first
        } else {
            StateExpr::Product(Box::new(first), rest)
        })
    }

    fn factor(&mut self) -> Result<StateExpr> {
        match self.peek().clone() {
            Tok::Decimal(_) | Tok::I | Tok::Sqrt => Ok(StateExpr::Num(self.number()?)),
            Tok::Ket(k) => {
                self.advance();
                Ok(StateExpr::Ket(k))
            }
            Tok::Gen(g) => {
                self.advance();
                Ok(StateExpr::Gen(g))
            }
            Tok::LParen => {
                self.advance();
                self.enter()?;
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["'+'", "'-'", "'*'", "'/'", "')'"]));
                }
                self.advance();
                self.depth -= 1;
                Ok(e)
            }
            Tok::Minus => {
                self.advance();
                self.enter()?;
                let e = self.factor()?;
                self.depth -= 1;
                Ok(StateExpr::Neg(Box::new(e)))
            }
            _ => Err(self.unexpected(FACTOR_START)),
        }
    }

    fn number(&mut self) -> Result<Number> {
        match self.peek().clone() {
            Tok::Decimal(s) => {
                self.advance();
                Ok(Number::Decimal(s))
            }
            Tok::I => {
                self.advance();
                Ok(Number::I)
            }
            Tok::Sqrt => {
                self.advance();
                if *self.peek() != Tok::LParen {
                    return Err(self.unexpected(&["'('"]));
                }
                self.advance();
                let Tok::Decimal(s) = self.peek().clone() else {
                    return Err(self.unexpected(&["number"]));
                };
                self.advance();
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["')'"]));
                }
                self.advance();
                Ok(Number::Sqrt(s))
            }
            _ => Err(self.unexpected(&["number", "'i'", "'sqrt'"])),
        }
    }
}

/// Parses a state expression and checks that its kets agree in arity.
pub fn parse(src: &str) -> Result<StateExpr> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'/'", "end of input"]));
    }
    check_arity(&e)?;
    Ok(e)
}

fn check_arity(e: &StateExpr) -> Result<()> {
    let mut first: Option<KetLabel> = None;
    let mut err = None;
    e.visit(&mut |node| {
        let StateExpr::Ket(k) = node else { return };
        if err.is_some() {
            return;
        }
        match (&first, k) {
            (None, _) => first = Some(k.clone()),
            (Some(KetLabel::Levels(a)), KetLabel::Levels(b)) if a.len() != b.len() => {
                err = Some(Error::Arity(format!(
                    "ket {k} has {} levels but {} has {}",
                    b.len(),
                    first.as_ref().unwrap(),
                    a.len()
                )));
            }
            (Some(KetLabel::Levels(_)), KetLabel::Sector { .. })
            | (Some(KetLabel::Sector { .. }), KetLabel::Levels(_)) => {
                err = Some(Error::Arity(format!(
                    "ket {k} mixes squbit and qubit kets with {}",
                    first.as_ref().unwrap()
                )));
            }
            _ => {}
        }
    });
    err.map_or(Ok(()), Err)
}
