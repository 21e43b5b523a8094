//! Arithmetic expressions in the radial variable `r`, used for user-defined
//! coefficient functions in model files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names: `r`, the model parameters `d` and `beta`, constants `pi` and `e`.
//! Functions: `sqrt`, `exp`, `ln`, `abs`.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    R,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Abs,
}

impl Expr {
    /// Parses `src`, substituting named constants from `vars` (plus `pi`, `e`).
    pub fn parse(src: &str, vars: &HashMap<&str, f64>) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e.fold())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::R => r,
            Expr::Neg(a) => -a.eval(r),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(r), b.eval(r));
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    Op::Pow => pow(x, y),
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(r);
                match f {
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Abs => x.abs(),
                }
            }
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn depends_on_r(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::R => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_r(),
            Expr::Bin(_, a, b) => a.depends_on_r() || b.depends_on_r(),
        }
    }

    fn fold(self) -> Expr {
        if self.depends_on_r() {
            match self {
                Expr::Neg(a) => Expr::Neg(Box::new(a.fold())),
                Expr::Bin(op, a, b) => Expr::Bin(op, Box::new(a.fold()), Box::new(b.fold())),
                Expr::Call(f, a) => Expr::Call(f, Box::new(a.fold())),
                e => e,
            }
        } else {
            Expr::Num(self.eval(0.0))
        }
    }
}

fn pow(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= i32::MAX as f64 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a HashMap<&'a str, f64>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Expr {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { Op::Add } else { Op::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { Op::Mul } else { Op::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Num).map_err(|_| Error::Expr {
            pos: start,
            msg: format!("bad number `{text}`"),
        })
    }

    fn name(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match name {
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "abs" => Some(Func::Abs),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        match name {
            "r" => Ok(Expr::R),
            "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            "e" => Ok(Expr::Num(std::f64::consts::E)),
            _ => self.vars.get(name).map(|v| Expr::Num(*v)).ok_or(Error::Expr {
                pos: start,
                msg: format!("unknown name `{name}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Expr> {
        let vars = HashMap::from([("d", 3.0), ("beta", 2.0)]);
        Expr::parse(s, &vars)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1 + 2 * 3").unwrap().as_constant(), Some(7.0));
        assert_eq!(parse("2 ^ 3 ^ 2").unwrap().as_constant(), Some(512.0));
        assert_eq!(parse("-2 ^ 2").unwrap().as_constant(), Some(-4.0));
        assert_eq!(parse("8 / 4 / 2").unwrap().as_constant(), Some(1.0));
        assert_eq!(parse("1 - 2 - 3").unwrap().as_constant(), Some(-4.0));
    }

    #[test]
    fn dunkel_hanggi_drift() {
        let e = parse("1 - d / beta * (1 + r^2)^(-1/2)").unwrap();
        let r: f64 = 1.7;
        let want = 1.0 - 1.5 / (1.0 + r * r).sqrt();
        assert!((e.eval(r) - want).abs() < 1e-15);
    }

    #[test]
    fn functions_and_constants() {
        let e = parse("sqrt(2*sqrt(1+r^2)) + exp(-r) + ln(e) + abs(-pi)").unwrap();
        let r: f64 = 0.5;
        let want = (2.0 * (1.0 + r * r).sqrt()).sqrt() + (-r).exp() + 1.0 + std::f64::consts::PI;
        assert!((e.eval(r) - want).abs() < 1e-14);
        assert_eq!(parse("1.5e-1").unwrap().as_constant(), Some(0.15));
    }

    #[test]
    fn errors_carry_position() {
        assert!(matches!(parse("1 +"), Err(Error::Expr { .. })));
        assert!(matches!(parse("foo(r)"), Err(Error::Expr { pos: 0, .. })));
        assert!(matches!(parse("(r"), Err(Error::Expr { .. })));
        assert!(matches!(parse("r r"), Err(Error::Expr { pos: 2, .. })));
    }
}
