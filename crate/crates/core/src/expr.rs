//! Small expression language for boundary data and closed-form test maps.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos tan exp ln sqrt sinh cosh abs re im conj`.
//! Constants: `pi`, `i`.
//!
//! Variables depend on the scheme the expression is compiled for. Real
//! coordinates are `x0, x1, ...` with `x`, `y` as aliases for the first two,
//! and `z = x + i y` on two-dimensional sources. Complex coordinates are
//! `z1, z2, ...` with `z` an alias for `z1`.
//!
//! Everything is evaluated in complex arithmetic. Integer powers of real
//! numbers go through `f64::powi`, so real polynomials evaluate exactly as
//! they would in plain `f64` code.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("expression `{src}`, at {pos}: {msg}")]
pub struct ExprError {
    pub src: String,
    pub pos: usize,
    pub msg: String,
}

/// Which variable names an expression may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vars {
    /// `d` real coordinates.
    Real(usize),
    /// `n` complex coordinates.
    Complex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Abs,
    Re,
    Im,
    Conj,
}

impl Func {
    fn parse(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "abs" => Func::Abs,
            "re" => Func::Re,
            "im" => Func::Im,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        let real = z.im == 0.0;
        match self {
            Func::Sin if real => z.re.sin().into(),
            Func::Cos if real => z.re.cos().into(),
            Func::Tan if real => z.re.tan().into(),
            Func::Exp if real => z.re.exp().into(),
            Func::Sinh if real => z.re.sinh().into(),
            Func::Cosh if real => z.re.cosh().into(),
            Func::Sqrt if real && z.re >= 0.0 => z.re.sqrt().into(),
            Func::Ln if real && z.re > 0.0 => z.re.ln().into(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Tan => z.tan(),
            Func::Exp => z.exp(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Sqrt => z.sqrt(),
            Func::Ln => z.ln(),
            Func::Abs => z.norm().into(),
            Func::Re => z.re.into(),
            Func::Im => z.im.into(),
            Func::Conj => z.conj(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    I,
    RealVar(usize),
    /// `x0 + i x1`.
    PlaneZ,
    ComplexVar(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A compiled expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    src: String,
    vars: Vars,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let err = |pos, msg: &str| ExprError { src: src.to_string(), pos, msg: msg.to_string() };
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let v: f64 = src[start..i].parse().map_err(|_| err(start, "malformed number"))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(i, &format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    at: usize,
    vars: Vars,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        let pos = self.toks.get(self.at).map(|t| t.0).unwrap_or(self.src.len());
        ExprError { src: self.src.to_string(), pos, msg: msg.into() }
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.at) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.peek_op() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.at += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.at += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Node::Mul(lhs.into(), rhs.into()) } else { Node::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek_op() {
            Some('-') => {
                self.at += 1;
                Ok(Node::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.at += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let Some((_, tok)) = self.toks.get(self.at).cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        match tok {
            Tok::Num(v) => {
                self.at += 1;
                Ok(Node::Num(v))
            }
            Tok::Op('(') => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(self.err(format!("unexpected `{c}`"))),
            Tok::Name(name) => {
                if self.toks.get(self.at + 1).map(|t| &t.1) == Some(&Tok::Op('(')) {
                    let f = Func::parse(&name).ok_or_else(|| self.err(format!("unknown function `{name}`")))?;
                    self.at += 2;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Node::Call(f, arg.into()));
                }
                let node = self.variable(&name)?;
                self.at += 1;
                Ok(node)
            }
        }
    }

    fn variable(&self, name: &str) -> Result<Node, ExprError> {
        match name {
            "pi" => return Ok(Node::Num(std::f64::consts::PI)),
            "i" => return Ok(Node::I),
            _ => {}
        }
        let index = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
        let node = match self.vars {
            Vars::Real(d) => match name {
                "x" => Some((Node::RealVar(0), 1)),
                "y" => Some((Node::RealVar(1), 2)),
                "z" if d == 2 => Some((Node::PlaneZ, 2)),
                _ => index("x").map(|k| (Node::RealVar(k), k + 1)),
            }
            .filter(|&(_, need)| need <= d)
            .map(|p| p.0),
            Vars::Complex(n) => match name {
                "z" => Some(1),
                _ => index("z"),
            }
            .filter(|&k| k >= 1 && k <= n)
            .map(|k| Node::ComplexVar(k - 1)),
        };
        node.ok_or_else(|| self.err(format!("unknown variable `{name}`")))
    }
}

impl Expr {
    pub fn parse(src: &str, vars: Vars) -> Result<Expr, ExprError> {
        let toks = tokenize(src)?;
        let mut p = Parser { src, toks, at: 0, vars };
        let root = p.expr()?;
        if p.at != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Expr { src: src.to_string(), vars, root })
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    /// Evaluates with real coordinates. Panics on a complex-variable
    /// expression; see [`Expr::eval_complex`].
    pub fn eval_at_real(&self, x: &[f64]) -> Complex64 {
        assert!(matches!(self.vars, Vars::Real(_)), "real evaluation of a complex-variable expression");
        eval(&self.root, &Env::Real(x))
    }

    /// Real-valued evaluation; NaN when the value has a non-zero imaginary part.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        let v = self.eval_at_real(x);
        if v.im == 0.0 {
            v.re
        } else {
            f64::NAN
        }
    }

    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        assert!(matches!(self.vars, Vars::Complex(_)), "complex evaluation of a real-variable expression");
        eval(&self.root, &Env::Complex(z))
    }
}

enum Env<'a> {
    Real(&'a [f64]),
    Complex(&'a [Complex64]),
}

fn eval(node: &Node, env: &Env) -> Complex64 {
    match node {
        Node::Num(v) => (*v).into(),
        Node::I => Complex64::i(),
        Node::RealVar(k) => match env {
            Env::Real(x) => x[*k].into(),
            Env::Complex(_) => unreachable!("scheme checked at parse time"),
        },
        Node::PlaneZ => match env {
            Env::Real(x) => Complex64::new(x[0], x[1]),
            Env::Complex(_) => unreachable!("scheme checked at parse time"),
        },
        Node::ComplexVar(k) => match env {
            Env::Complex(z) => z[*k],
            Env::Real(_) => unreachable!("scheme checked at parse time"),
        },
        Node::Neg(a) => -eval(a, env),
        Node::Add(a, b) => eval(a, env) + eval(b, env),
        Node::Sub(a, b) => eval(a, env) - eval(b, env),
        Node::Mul(a, b) => mul(eval(a, env), eval(b, env)),
        Node::Div(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            if a.im == 0.0 && b.im == 0.0 {
                (a.re / b.re).into()
            } else {
                a / b
            }
        }
        Node::Pow(a, b) => pow(eval(a, env), eval(b, env)),
        Node::Call(f, a) => f.apply(eval(a, env)),
    }
}

fn mul(a: Complex64, b: Complex64) -> Complex64 {
    if a.im == 0.0 && b.im == 0.0 {
        (a.re * b.re).into()
    } else {
        a * b
    }
}

fn pow(base: Complex64, e: Complex64) -> Complex64 {
    let int_exp = e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0;
    if int_exp {
        let n = e.re as i32;
        if base.im == 0.0 {
            return base.re.powi(n).into();
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        return if n < 0 { acc.inv() } else { acc };
    }
    if base.im == 0.0 && e.im == 0.0 && base.re >= 0.0 {
        return base.re.powf(e.re).into();
    }
    base.powc(e)
}
