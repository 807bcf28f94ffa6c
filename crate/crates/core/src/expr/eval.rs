use std::sync::Arc;

use thiserror::Error;

use super::{BinOp, Expr, Func, Var};
use crate::jet::{Jet, JetSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {func} of {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid evaluation context: {0}")]
    Context(String),
}

/// Number types the expression evaluator can run on.
pub trait Scalar: Clone {
    /// Whether values carry derivatives (functions must then be smooth at the point).
    const DIFFERENTIABLE: bool;

    fn value(&self) -> f64;
    fn lift(&self, c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powi(&self, e: i32) -> Self;
}

impl Scalar for f64 {
    const DIFFERENTIABLE: bool = false;
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> f64 {
        c
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn div(&self, o: &f64) -> f64 {
        self / o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn sin(&self) -> f64 {
        f64::sin(*self)
    }
    fn cos(&self) -> f64 {
        f64::cos(*self)
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn powi(&self, e: i32) -> f64 {
        f64::powi(*self, e)
    }
}

impl Scalar for Jet {
    const DIFFERENTIABLE: bool = true;
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn lift(&self, c: f64) -> Jet {
        self.constant_like(c)
    }
    fn add(&self, o: &Jet) -> Jet {
        self + o
    }
    fn sub(&self, o: &Jet) -> Jet {
        self - o
    }
    fn mul(&self, o: &Jet) -> Jet {
        self * o
    }
    fn div(&self, o: &Jet) -> Jet {
        self / o
    }
    fn neg(&self) -> Jet {
        -self
    }
    fn sqrt(&self) -> Jet {
        Jet::sqrt(self)
    }
    fn sin(&self) -> Jet {
        Jet::sin(self)
    }
    fn cos(&self) -> Jet {
        Jet::cos(self)
    }
    fn exp(&self) -> Jet {
        Jet::exp(self)
    }
    fn ln(&self) -> Jet {
        Jet::ln(self)
    }
    fn powi(&self, e: i32) -> Jet {
        Jet::powi(self, e)
    }
}

/// Values bound to `x1..xn` and `y1..yn`.
#[derive(Debug, Clone)]
pub struct Vars<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> Vars<S> {
    fn get(&self, v: Var) -> &S {
        match v {
            Var::X(i) => &self.x[i],
            Var::Y(i) => &self.y[i],
        }
    }
}

/// Which coordinate carries a jet seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub Var);

#[derive(Debug, Clone)]
pub struct EvalContext {
    pub n: usize,
    pub order: usize,
    pub seeds: Vec<Seed>,
}

impl EvalContext {
    /// Seeds all `2n` coordinates: `x` first, then `y`.
    pub fn full(n: usize, order: usize) -> EvalContext {
        let seeds = (0..n)
            .map(|i| Seed(Var::X(i)))
            .chain((0..n).map(|i| Seed(Var::Y(i))))
            .collect();
        EvalContext { n, order, seeds }
    }

    pub fn with_seeds(n: usize, order: usize, seeds: Vec<Seed>) -> Result<EvalContext, EvalError> {
        let ctx = EvalContext { n, order, seeds };
        ctx.validate()?;
        Ok(ctx)
    }

    fn validate(&self) -> Result<(), EvalError> {
        if self.seeds.len() > 2 * self.n {
            return Err(EvalError::Context(format!(
                "{} seeds exceed 2n = {}",
                self.seeds.len(),
                2 * self.n
            )));
        }
        for (i, s) in self.seeds.iter().enumerate() {
            let idx = match s.0 {
                Var::X(i) | Var::Y(i) => i,
            };
            if idx >= self.n {
                return Err(EvalError::Context(format!("seed {} out of range", s.0)));
            }
            if self.seeds[..i].contains(s) {
                return Err(EvalError::Context(format!("seed {} repeated", s.0)));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Arc<JetSpace> {
        JetSpace::shared(self.seeds.len(), self.order)
    }

    /// Binds the coordinates of a point to jets, seeding the configured variables.
    pub fn bind(&self, x: &[f64], y: &[f64]) -> Result<Vars<Jet>, EvalError> {
        self.validate()?;
        if x.len() != self.n || y.len() != self.n {
            return Err(EvalError::DimensionMismatch {
                expected: self.n,
                got: x.len().max(y.len()),
            });
        }
        let space = self.space();
        let seed_of = |v: Var| self.seeds.iter().position(|s| s.0 == v);
        let make = |v: Var, value: f64| match seed_of(v) {
            Some(k) => Jet::variable(&space, self.order, value, k),
            None => Jet::constant(&space, self.order, value),
        };
        Ok(Vars {
            x: (0..self.n).map(|i| make(Var::X(i), x[i])).collect(),
            y: (0..self.n).map(|i| make(Var::Y(i), y[i])).collect(),
        })
    }
}

/// Evaluates `expr` at the bound variables.
pub fn eval<S: Scalar>(expr: &Expr, vars: &Vars<S>) -> Result<S, EvalError> {
    let proto = vars
        .x
        .first()
        .or(vars.y.first())
        .ok_or_else(|| EvalError::Context("no variables bound".into()))?;
    eval_inner(expr, vars, proto)
}

fn eval_inner<S: Scalar>(expr: &Expr, vars: &Vars<S>, proto: &S) -> Result<S, EvalError> {
    Ok(match expr {
        Expr::Const(c) => proto.lift(*c),
        Expr::Var(v) => vars.get(*v).clone(),
        Expr::Neg(e) => eval_inner(e, vars, proto)?.neg(),
        Expr::Binary(op, a, b) => {
            let a = eval_inner(a, vars, proto)?;
            let b = eval_inner(b, vars, proto)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    a.div(&b)
                }
            }
        }
        Expr::Call(func, e) => {
            let a = eval_inner(e, vars, proto)?;
            let v = a.value();
            match func {
                Func::Sqrt => {
                    if v < 0.0 || (S::DIFFERENTIABLE && v == 0.0) {
                        return Err(EvalError::Domain { func: "sqrt", arg: v });
                    }
                    a.sqrt()
                }
                Func::Log => {
                    if v <= 0.0 {
                        return Err(EvalError::Domain { func: "log", arg: v });
                    }
                    a.ln()
                }
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
            }
        }
        Expr::Pow(e, p) => {
            let a = eval_inner(e, vars, proto)?;
            let v = a.value();
            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                if *p < 0.0 && v == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.powi(*p as i32)
            } else {
                // non-integer powers lower to exp(p * log(base))
                if v <= 0.0 {
                    return Err(EvalError::Domain { func: "pow", arg: v });
                }
                a.ln().mul(&a.lift(*p)).exp()
            }
        }
    })
}

/// Evaluates `expr` as a jet at `(x, y)` under `ctx`.
pub fn eval_jet(expr: &Expr, x: &[f64], y: &[f64], ctx: &EvalContext) -> Result<Jet, EvalError> {
    let vars = ctx.bind(x, y)?;
    eval(expr, &vars)
}

/// Folds a variable-free expression.
pub(crate) fn eval_constant(expr: &Expr) -> Result<f64, EvalError> {
    let vars = Vars {
        x: vec![0.0],
        y: vec![0.0],
    };
    eval(expr, &vars)
}
