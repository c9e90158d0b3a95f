//! Real-valued expressions in one integration variable.
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := unary (('*'|'/') unary)*
//! unary   := '-' unary | power
//! power   := primary ['^' unary]
//! primary := number | name | name '(' sum ')' | '(' sum ')'
//! ```
//!
//! Names are the closed-form atoms, the variable `t`, and `dl` / `du`, the
//! distances `t - lower` and `upper - t` supplied by the quadrature (these
//! avoid cancellation at the endpoints). Functions: `sin cos tan asin acos
//! atan sinh cosh exp ln sqrt abs Li2 Li3`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::closed_form::Atom;
use crate::complex::ComplexValue;
use crate::error::{Error, Result};
use crate::numeric::{PrecisionContext, Real};
use crate::polylog::polylog;
use crate::quad::{Abscissa, IntegrandSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    T,
    FromLower,
    ToUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Sinh,
    Cosh,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Li2,
    Li3,
}

impl Func {
    const ALL: [(&'static str, Func); 14] = [
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("tan", Func::Tan),
        ("asin", Func::Asin),
        ("acos", Func::Acos),
        ("atan", Func::Atan),
        ("sinh", Func::Sinh),
        ("cosh", Func::Cosh),
        ("exp", Func::Exp),
        ("ln", Func::Ln),
        ("sqrt", Func::Sqrt),
        ("abs", Func::Abs),
        ("Li2", Func::Li2),
        ("Li3", Func::Li3),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone)]
enum Node {
    Num(Rational),
    Const(Atom),
    Var(Var),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression; displays as its source text.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Arc<Node>,
    source: String,
}

struct Env<'a> {
    ctx: &'a PrecisionContext,
    consts: &'a [(Atom, Real)],
    at: Option<&'a Abscissa>,
}

impl Node {
    fn uses_variable(&self) -> bool {
        match self {
            Node::Var(_) => true,
            Node::Num(_) | Node::Const(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.uses_variable(),
            Node::Bin(_, a, b) | Node::Pow(a, b) => a.uses_variable() || b.uses_variable(),
        }
    }

    fn atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Node::Const(a) => {
                if !out.contains(a) {
                    out.push(*a)
                }
            }
            Node::Num(_) | Node::Var(_) => {}
            Node::Neg(a) | Node::Call(_, a) => a.atoms(out),
            Node::Bin(_, a, b) | Node::Pow(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    fn eval(&self, env: &Env) -> Real {
        let bits = env.ctx.bits();
        match self {
            Node::Num(q) => Float::with_val(bits, q),
            Node::Const(a) => env
                .consts
                .iter()
                .find(|(b, _)| b == a)
                .map(|(_, v)| v.clone())
                .expect("constants bound before evaluation"),
            Node::Var(v) => {
                let at = env.at.expect("variable bound");
                match v {
                    Var::T => at.t.clone(),
                    Var::FromLower => at.from_lower.clone(),
                    Var::ToUpper => at.to_upper.clone(),
                }
            }
            Node::Neg(a) => -a.eval(env),
            Node::Bin(op, a, b) => {
                let x = a.eval(env);
                let y = b.eval(env);
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                }
            }
            Node::Pow(a, b) => {
                let x = a.eval(env);
                if let Node::Num(q) = b.as_ref() {
                    if *q.denom() == 1 {
                        if let Some(e) = q.numer().to_i32() {
                            return x.pow(e);
                        }
                    }
                }
                x.pow(b.eval(env))
            }
            Node::Call(f, a) => {
                let x = a.eval(env);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Asin => x.asin(),
                    Func::Acos => x.acos(),
                    Func::Atan => x.atan(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                    Func::Li2 | Func::Li3 => {
                        let s = if *f == Func::Li2 { 2 } else { 3 };
                        match polylog(s, &ComplexValue::from_real(x), env.ctx) {
                            Ok(v) => v.re,
                            Err(_) => Float::with_val(bits, rug::float::Special::Nan),
                        }
                    }
                }
            }
        }
    }
}

impl Expr {
    /// True if the expression mentions `t`, `dl` or `du`.
    pub fn uses_variable(&self) -> bool {
        self.root.uses_variable()
    }

    fn bind(&self, ctx: &PrecisionContext) -> Vec<(Atom, Real)> {
        let mut atoms = Vec::new();
        self.root.atoms(&mut atoms);
        atoms.into_iter().map(|a| (a, a.value(ctx))).collect()
    }

    /// Value of a constant expression.
    pub fn eval_constant(&self, ctx: &PrecisionContext) -> Result<Real> {
        if self.uses_variable() {
            return Err(Error::Domain(format!(
                "`{}` depends on the integration variable",
                self.source
            )));
        }
        let consts = self.bind(ctx);
        let v = self.root.eval(&Env {
            ctx,
            consts: &consts,
            at: None,
        });
        if !v.is_finite() {
            return Err(Error::Domain(format!("`{}` is not finite", self.source)));
        }
        Ok(v)
    }

    /// Builds a quadrature integrand on `[lower, upper]`.
    pub fn integrand(
        &self,
        lower: &Expr,
        upper: &Expr,
        ctx: &PrecisionContext,
    ) -> Result<IntegrandSpec> {
        let a = lower.eval_constant(ctx)?;
        let b = upper.eval_constant(ctx)?;
        let consts = self.bind(ctx);
        let root = self.root.clone();
        let ctx = *ctx;
        IntegrandSpec::new(a, b, move |at: &Abscissa| {
            root.eval(&Env {
                ctx: &ctx,
                consts: &consts,
                at: Some(at),
            })
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

struct Parser<'a> {
    src: &'a [u8],
    offsets: Vec<usize>,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let pos = self
            .offsets
            .get(self.pos)
            .copied()
            .unwrap_or_else(|| self.offsets.last().map_or(0, |p| p + 1));
        Err(Error::ExprSyntax {
            pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut acc = if self.eat(b'-') {
            Node::Neg(Box::new(self.product()?))
        } else {
            self.eat(b'+');
            self.product()?
        };
        loop {
            let op = if self.eat(b'+') {
                Op::Add
            } else if self.eat(b'-') {
                Op::Sub
            } else {
                return Ok(acc);
            };
            acc = Node::Bin(op, Box::new(acc), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut acc = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                Op::Mul
            } else if self.eat(b'/') {
                Op::Div
            } else {
                return Ok(acc);
            };
            acc = Node::Bin(op, Box::new(acc), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.eat(b'^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let int = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let mut q = Rational::from(int.parse::<Integer>().expect("digits"));
        if self.eat(b'.') {
            let fs = self.pos;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            if fs == self.pos {
                return self.err("expected digits after `.`");
            }
            let frac = std::str::from_utf8(&self.src[fs..self.pos]).expect("ascii");
            let scale = Integer::from(10).pow((self.pos - fs) as u32);
            q += Rational::from((frac.parse::<Integer>().expect("digits"), scale));
        }
        Ok(Node::Num(q))
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'0'..=b'9') => self.number(),
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if self.peek() == Some(b'(') {
                    let Some(&(_, f)) = Func::ALL.iter().find(|(n, _)| *n == name) else {
                        self.pos = start;
                        return self.err(format!("unknown function `{name}`"));
                    };
                    self.pos += 1;
                    let arg = self.sum()?;
                    if !self.eat(b')') {
                        return self.err("expected `)`");
                    }
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name {
                    "t" => Ok(Node::Var(Var::T)),
                    "dl" => Ok(Node::Var(Var::FromLower)),
                    "du" => Ok(Node::Var(Var::ToUpper)),
                    _ => match Atom::from_name(name) {
                        Some(a) => Ok(Node::Const(a)),
                        None => {
                            self.pos = start;
                            self.err(format!("unknown name `{name}`"))
                        }
                    },
                }
            }
            _ => self.err("expected a number, a name or `(`"),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut src = Vec::new();
        let mut offsets = Vec::new();
        for (i, b) in text.bytes().enumerate() {
            if !b.is_ascii_whitespace() {
                src.push(b);
                offsets.push(i);
            }
        }
        let mut p = Parser {
            src: &src,
            offsets,
            pos: 0,
        };
        if src.is_empty() {
            return p.err("empty expression");
        }
        let root = p.sum()?;
        if p.pos != src.len() {
            return p.err("unexpected trailing input");
        }
        Ok(Expr {
            root: Arc::new(root),
            source: text.trim().to_string(),
        })
    }
}
