use std::collections::BTreeSet;
use std::fmt;
use std::ops;

use num_complex::Complex64;

use crate::funcspace::is_finite;

/// Independent variables an expression may reference.
///
/// Component indices are zero-based; the text form is one-based (`q1`, `v1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    Q(usize),
    V(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => f.write_str("t"),
            Var::Q(k) => write!(f, "q{}", k + 1),
            Var::V(k) => write!(f, "v{}", k + 1),
        }
    }
}

/// Built-in functions. `conj` is accepted in text but only needed for the
/// derivative of `abs2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs2,
    Conj,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt, Func::Abs2, Func::Conj];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs2 => "abs2",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub(crate) fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Ln => z.ln(),
            Func::Sqrt => z.sqrt(),
            Func::Abs2 => Complex64::new(z.norm_sqr(), 0.0),
            Func::Conj => z.conj(),
        }
    }
}

/// Expression tree.
///
/// Trees produced by the parser keep the textual structure. Trees produced
/// by differentiation, or by the arithmetic operators implemented on
/// `Expr`, are constant-folded and have `0`/`1` identities removed.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Param(String),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant real exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Expr {
    pub fn constant(z: Complex64) -> Expr {
        Expr::Const(z)
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex64::new(x, 0.0))
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(z) if *z == ZERO)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(z) if *z == ONE)
    }

    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(z) => Some(*z),
            _ => None,
        }
    }

    /// Folded `self ^ exponent`.
    pub fn powf(self, exponent: f64) -> Expr {
        if exponent == 1.0 {
            return self;
        }
        if exponent == 0.0 {
            return Expr::Const(ONE);
        }
        if let Some(z) = self.as_const() {
            let r = if exponent.fract() == 0.0 { z.powi(exponent as i32) } else { z.powf(exponent) };
            if is_finite(r) && !(z == ZERO && exponent < 0.0) {
                return Expr::Const(r);
            }
        }
        Expr::Pow(Box::new(self), exponent)
    }

    /// Folded function application.
    pub fn call(func: Func, arg: Expr) -> Expr {
        if let Some(z) = arg.as_const() {
            let r = func.apply(z);
            let singular = matches!(func, Func::Ln) && z == ZERO;
            if is_finite(r) && !singular {
                return Expr::Const(r);
            }
        }
        Expr::Call(func, Box::new(arg))
    }

    /// Variables referenced anywhere in the tree.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                out.insert(*v);
            }
        });
        out
    }

    /// Parameter names referenced anywhere in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Param(p) = e {
                out.insert(p.clone());
            }
        });
        out
    }

    fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Param(_) | Expr::Var(_) => {}
            Expr::Neg(x) | Expr::Pow(x, _) | Expr::Call(_, x) => x.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(z) if !is_plain_real(*z) && *z != Complex64::i() => 0,
            _ => 5,
        }
    }
}

fn is_plain_real(z: Complex64) -> bool {
    z.im == 0.0 && z.re.is_sign_positive()
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a + b),
            (Some(a), _) if a == ZERO => rhs,
            (_, Some(b)) if b == ZERO => self,
            _ => Expr::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a - b),
            (Some(a), _) if a == ZERO => -rhs,
            (_, Some(b)) if b == ZERO => self,
            _ => Expr::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a * b),
            (Some(a), _) | (_, Some(a)) if a == ZERO => Expr::Const(ZERO),
            (Some(a), _) if a == ONE => rhs,
            (_, Some(b)) if b == ONE => self,
            (Some(a), None) => match rhs {
                Expr::Mul(inner, x) if inner.as_const().is_some() => Expr::Const(a * inner.as_const().unwrap()) * *x,
                _ => Expr::Mul(Box::new(self), Box::new(rhs)),
            },
            (None, Some(_)) => rhs * self,
            (None, None) => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != ZERO => Expr::Const(a / b),
            (_, Some(b)) if b == ONE => self,
            (Some(a), _) if a == ZERO && !rhs.is_zero() => Expr::Const(ZERO),
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(z) => Expr::Const(-z),
            Expr::Neg(x) => *x,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::real(x)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Expr {
        Expr::Var(v)
    }
}

/// Prints in the grammar accepted by [`parse`](super::parse). Parsed trees
/// round-trip: `parse(print(parse(s))) == parse(s)`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(z) => write_const(f, *z),
            Expr::Param(p) => f.write_str(p),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(x) => {
                f.write_str("-")?;
                write_child(f, x, 3, false)
            }
            Expr::Add(a, b) => write_binary(f, a, " + ", b, 1),
            Expr::Sub(a, b) => write_binary(f, a, " - ", b, 1),
            Expr::Mul(a, b) => write_binary(f, a, "*", b, 2),
            Expr::Div(a, b) => write_binary(f, a, "/", b, 2),
            Expr::Pow(x, e) => {
                write_child(f, x, 5, false)?;
                write!(f, "^{e}")
            }
            Expr::Call(func, x) => write!(f, "{}({x})", func.name()),
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    if is_plain_real(z) {
        write!(f, "{}", z.re)
    } else if z == Complex64::i() {
        f.write_str("i")
    } else if z.im == 0.0 {
        write!(f, "(-{})", -z.re)
    } else if z.re == 0.0 {
        write!(f, "({}*i)", z.im)
    } else {
        write!(f, "({} + {}*i)", z.re, z.im)
    }
}

fn write_binary(f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, prec: u8) -> fmt::Result {
    write_child(f, a, prec, false)?;
    f.write_str(op)?;
    write_child(f, b, prec, true)
}

/// Writes `child`, parenthesised when it binds looser than `min` (or equally
/// loose on the right of a left-associative operator).
fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min: u8, right: bool) -> fmt::Result {
    let p = child.precedence();
    let needs_parens = p < min || (right && p == min && min < 3);
    if needs_parens && p != 0 {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}
