//! Analytic scalar expressions over chart coordinates `x1..xn` and tangent
//! coordinates `y1..yn`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* exponent must be constant *)
//! primary = number | "pi" | variable | func "(" expr ")" | "(" expr ")" ;
//! variable = ("x" | "y") digit { digit } ;   (* 1-based index <= n *)
//! func    = "sqrt" | "sin" | "cos" | "exp" | "log" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```

mod eval;
mod parse;

pub use eval::{eval, eval_jet, EvalContext, EvalError, Scalar, Seed, Vars};
pub use parse::{parse_expression, ParseError, ParseErrorKind};

use std::fmt;

/// A coordinate variable with a zero-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Y(i) => write!(f, "y{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree. Exponents of `Pow` are constants folded at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Largest coordinate dimension referenced, as a 1-based count.
    pub fn max_index(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(Var::X(i)) | Expr::Var(Var::Y(i)) => i + 1,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.max_index(),
            Expr::Binary(_, a, b) => a.max_index().max(b.max_index()),
        }
    }

    /// True when no `y` variable occurs.
    pub fn is_y_free(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(Var::X(_)) => true,
            Expr::Var(Var::Y(_)) => false,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.is_y_free(),
            Expr::Binary(_, a, b) => a.is_y_free() && b.is_y_free(),
        }
    }

    fn has_vars(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.has_vars(),
            Expr::Binary(_, a, b) => a.has_vars() || b.has_vars(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) if *v < 0.0 => write!(f, "(-{})", -v),
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(e, p) if *p < 0.0 => write!(f, "({e}^(-{}))", -p),
            Expr::Pow(e, p) => write!(f, "({e}^{p})"),
        }
    }
}
