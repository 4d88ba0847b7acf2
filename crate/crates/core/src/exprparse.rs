//! Text syntax for potentials `q(x)`.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;          (* right-associative *)
//! atom    = number | "x" | func "(" expr ")" | "(" expr ")" ;
//! func    = "abs" | "ln" | "sqrt" | "sin" | "cos" | "exp" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::{Error, Real, Result};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    fn apply(self, v: Real) -> Real {
        match self {
            Func::Abs => v.abs(),
            Func::Ln => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

/// Expression tree. Literals keep their source spelling for printing.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number {
        value: Real,
        text: String,
    },
    Var,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

impl Expr {
    pub fn number(value: Real) -> Expr {
        Expr::Number {
            value,
            text: alloc::format!("{value}"),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary {
                op: BinOp::Add | BinOp::Sub,
                ..
            } => 1,
            Expr::Binary {
                op: BinOp::Mul | BinOp::Div,
                ..
            } => 2,
            Expr::Neg(_) => 3,
            Expr::Binary { op: BinOp::Pow, .. } => 4,
            _ => 5,
        }
    }

    /// Evaluates at `x`; any non-finite intermediate is reported with the
    /// innermost subexpression that produced it.
    pub fn evaluate(&self, x: Real) -> Result<Real> {
        let v = match self {
            Expr::Number { value, .. } => *value,
            Expr::Var => x,
            Expr::Neg(e) => -e.evaluate(x)?,
            Expr::Binary { op, lhs, rhs } => {
                let (a, b) = (lhs.evaluate(x)?, rhs.evaluate(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call { func, arg } => func.apply(arg.evaluate(x)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                x,
                subexpression: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Number { text, .. } => f.write_str(text),
            Expr::Var => f.write_str("x"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                child(f, e, e.precedence() < 3)
            }
            Expr::Binary {
                op: BinOp::Pow,
                lhs,
                rhs,
            } => {
                child(f, lhs, lhs.precedence() < 5)?;
                f.write_str("^")?;
                child(f, rhs, rhs.precedence() < 3)
            }
            Expr::Binary { op, lhs, rhs } => {
                let prec = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    _ => " / ",
                };
                child(f, lhs, lhs.precedence() < prec)?;
                f.write_str(sym)?;
                child(f, rhs, rhs.precedence() <= prec)
            }
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Num(Real, &'a str),
    Ident(&'a str),
    Sym(u8),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok<'a>)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(start) else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            let digits = |end: &mut usize| {
                let from = *end;
                while *end < bytes.len() && bytes[*end].is_ascii_digit() {
                    *end += 1;
                }
                *end > from
            };
            let mut any = digits(&mut end);
            if end < bytes.len() && bytes[end] == b'.' {
                end += 1;
                any |= digits(&mut end);
            }
            if !any {
                return Err(Error::Syntax {
                    offset: start,
                    expected: "digits".to_string(),
                });
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut exp = end + 1;
                if exp < bytes.len() && (bytes[exp] == b'+' || bytes[exp] == b'-') {
                    exp += 1;
                }
                if digits(&mut exp) {
                    end = exp;
                }
            }
            let text = &self.src[start..end];
            let value = text.parse::<Real>().map_err(|_| Error::Syntax {
                offset: start,
                expected: "number".to_string(),
            })?;
            self.pos = end;
            return Ok((start, Tok::Num(value, text)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((start, Tok::Ident(&self.src[start..end])));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((start, Tok::Sym(c)));
        }
        Err(Error::Syntax {
            offset: start,
            expected: "number, `x`, function, `(` or operator".to_string(),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    offset: usize,
    tok: Tok<'a>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<()> {
        let (offset, tok) = self.lexer.next()?;
        self.offset = offset;
        self.tok = tok;
        Ok(())
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset,
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, sym: u8) -> Result<()> {
        if self.tok == Tok::Sym(sym) {
            self.advance()
        } else {
            self.fail(&alloc::format!("`{}`", sym as char))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("shallower nesting");
        }
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym(b'+') => BinOp::Add,
                Tok::Sym(b'-') => BinOp::Sub,
                _ => break,
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Sym(b'*') => BinOp::Mul,
                Tok::Sym(b'/') => BinOp::Div,
                _ => break,
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Tok::Sym(b'-') {
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return self.fail("shallower nesting");
            }
            self.advance()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.tok == Tok::Sym(b'^') {
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return self.fail("shallower nesting");
            }
            self.advance()?;
            let exponent = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Tok::Num(value, text) => {
                self.advance()?;
                Ok(Expr::Number {
                    value,
                    text: text.to_string(),
                })
            }
            Tok::Ident("x") => {
                self.advance()?;
                Ok(Expr::Var)
            }
            Tok::Ident(name) => {
                let Some(func) = Func::from_name(name) else {
                    return Err(Error::UnknownIdentifier {
                        offset: self.offset,
                        name: name.to_string(),
                    });
                };
                self.advance()?;
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call {
                    func,
                    arg: Box::new(arg),
                })
            }
            Tok::Sym(b'(') => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            _ => self.fail("number, `x`, function or `(`"),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser {
        lexer: Lexer { src: text, pos: 0 },
        offset: 0,
        tok: Tok::End,
        depth: 0,
    };
    parser.advance()?;
    let e = parser.expr()?;
    if parser.tok != Tok::End {
        return parser.fail("operator or end of input");
    }
    Ok(e)
}
