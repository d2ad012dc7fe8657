//! Forward-mode first derivatives over the four chart coordinates.
//!
//! Every field in the catalog is a closed-form [`Expr`] built from constants,
//! coordinates, the four arithmetic operations and `exp`/`sin`/`cos`. An
//! expression evaluates either to a plain `f64` or to a [`Jet1`] carrying the
//! exact gradient with respect to `u¹..u⁴`. A central finite-difference
//! gradient is provided as an independent oracle.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

/// Number of chart coordinates.
pub const DIM: usize = 4;

/// Denominators smaller than this in magnitude are treated as singular.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("singular denominator {value:e} at u = {point:?}")]
    SingularDenominator { value: f64, point: [f64; DIM] },
    #[error("non-finite value at u = {point:?}")]
    NonFinite { point: [f64; DIM] },
}

/// A point `(u¹, u², u³, u⁴)` of the coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint(pub [f64; DIM]);

impl ChartPoint {
    pub const ORIGIN: ChartPoint = ChartPoint([0.0; DIM]);

    pub fn new(u: [f64; DIM]) -> Self {
        ChartPoint(u)
    }

    pub fn coords(&self) -> [f64; DIM] {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// The point shifted by `delta` along coordinate `axis`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Self {
        let mut u = self.0;
        u[axis] += delta;
        ChartPoint(u)
    }
}

impl From<[f64; DIM]> for ChartPoint {
    fn from(u: [f64; DIM]) -> Self {
        ChartPoint(u)
    }
}

/// A value together with its gradient `∂/∂u^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; DIM],
}

impl Jet1 {
    pub const ZERO: Jet1 = Jet1 {
        value: 0.0,
        grad: [0.0; DIM],
    };

    pub fn constant(value: f64) -> Self {
        Jet1 {
            value,
            grad: [0.0; DIM],
        }
    }

    /// The coordinate function `u^axis` evaluated at `value`.
    pub fn coordinate(axis: usize, value: f64) -> Self {
        let mut grad = [0.0; DIM];
        grad[axis] = 1.0;
        Jet1 { value, grad }
    }

    /// Derivative along the vector `v`: `v^i ∂_i f`.
    pub fn directional(&self, v: &[f64; DIM]) -> f64 {
        self.grad.iter().zip(v).map(|(g, x)| g * x).sum()
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    fn chain(self, value: f64, slope: f64) -> Self {
        Jet1 {
            value,
            grad: self.grad.map(|g| g * slope),
        }
    }

    fn zip(self, other: Jet1, value: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut grad = [0.0; DIM];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = f(self.grad[i], other.grad[i]);
        }
        Jet1 { value, grad }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        self.zip(rhs, self.value + rhs.value, |a, b| a + b)
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        self.zip(rhs, self.value - rhs.value, |a, b| a - b)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Jet1) -> Jet1 {
        let (a, b) = (self.value, rhs.value);
        self.zip(rhs, a * b, |da, db| da * b + a * db)
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: Jet1) -> Jet1 {
        let (a, b) = (self.value, rhs.value);
        let b2 = b * b;
        self.zip(rhs, a / b, |da, db| (da * b - a * db) / b2)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 {
            value: -self.value,
            grad: self.grad.map(|g| -g),
        }
    }
}

impl Add<f64> for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: f64) -> Jet1 {
        Jet1 {
            value: self.value + rhs,
            grad: self.grad,
        }
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: f64) -> Jet1 {
        Jet1 {
            value: self.value * rhs,
            grad: self.grad.map(|g| g * rhs),
        }
    }
}

impl std::iter::Sum for Jet1 {
    fn sum<I: Iterator<Item = Jet1>>(iter: I) -> Jet1 {
        iter.fold(Jet1::ZERO, |acc, x| acc + x)
    }
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Coord(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
}

/// A closed-form scalar field on the chart.
///
/// Cheap to clone (shared tree) and safe to evaluate from many threads.
/// Constructors fold constants and drop trivial zeros/ones so that the
/// sparse catalog matrices stay small.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    /// The coordinate `u^(axis+1)`.
    pub fn coord(axis: usize) -> Expr {
        assert!(axis < DIM, "coordinate index {axis} out of range");
        Expr(Arc::new(Node::Coord(axis)))
    }

    /// `[u¹, u², u³, u⁴]`.
    pub fn coords() -> [Expr; DIM] {
        [0, 1, 2, 3].map(Expr::coord)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.exp()),
            None => Expr(Arc::new(Node::Exp(self.clone()))),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Expr(Arc::new(Node::Sin(self.clone()))),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Expr(Arc::new(Node::Cos(self.clone()))),
        }
    }

    pub fn powi(&self, n: u32) -> Expr {
        match n {
            0 => Expr::one(),
            _ => (1..n).fold(self.clone(), |acc, _| &acc * self),
        }
    }

    fn add_impl(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), None) => b.clone(),
            (None, Some(0.0)) => a.clone(),
            _ => Expr(Arc::new(Node::Add(a.clone(), b.clone()))),
        }
    }

    fn sub_impl(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (Some(0.0), None) => Expr::neg_impl(b),
            (None, Some(0.0)) => a.clone(),
            _ => Expr(Arc::new(Node::Sub(a.clone(), b.clone()))),
        }
    }

    fn mul_impl(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::zero(),
            (Some(1.0), None) => b.clone(),
            (None, Some(1.0)) => a.clone(),
            (Some(-1.0), None) => Expr::neg_impl(b),
            (None, Some(-1.0)) => Expr::neg_impl(a),
            _ => Expr(Arc::new(Node::Mul(a.clone(), b.clone()))),
        }
    }

    fn div_impl(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(0.0), _) => Expr::zero(),
            (None, Some(1.0)) => a.clone(),
            _ => Expr(Arc::new(Node::Div(a.clone(), b.clone()))),
        }
    }

    fn neg_impl(a: &Expr) -> Expr {
        match (a.as_const(), &*a.0) {
            (Some(x), _) => Expr::constant(-x),
            (None, Node::Neg(inner)) => inner.clone(),
            _ => Expr(Arc::new(Node::Neg(a.clone()))),
        }
    }

    /// Plain evaluation at `u`.
    pub fn eval(&self, u: &ChartPoint) -> Result<f64, DomainError> {
        let v = self.eval_raw(u)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainError::NonFinite { point: u.0 })
        }
    }

    /// Value and exact gradient at `u`.
    pub fn jet(&self, u: &ChartPoint) -> Result<Jet1, DomainError> {
        let j = self.jet_raw(u)?;
        if j.value.is_finite() && j.grad.iter().all(|g| g.is_finite()) {
            Ok(j)
        } else {
            Err(DomainError::NonFinite { point: u.0 })
        }
    }

    fn eval_raw(&self, u: &ChartPoint) -> Result<f64, DomainError> {
        Ok(match &*self.0 {
            Node::Const(c) => *c,
            Node::Coord(i) => u.0[*i],
            Node::Add(a, b) => a.eval_raw(u)? + b.eval_raw(u)?,
            Node::Sub(a, b) => a.eval_raw(u)? - b.eval_raw(u)?,
            Node::Mul(a, b) => a.eval_raw(u)? * b.eval_raw(u)?,
            Node::Div(a, b) => {
                let d = b.eval_raw(u)?;
                check_denominator(d, u)?;
                a.eval_raw(u)? / d
            }
            Node::Neg(a) => -a.eval_raw(u)?,
            Node::Exp(a) => a.eval_raw(u)?.exp(),
            Node::Sin(a) => a.eval_raw(u)?.sin(),
            Node::Cos(a) => a.eval_raw(u)?.cos(),
        })
    }

    fn jet_raw(&self, u: &ChartPoint) -> Result<Jet1, DomainError> {
        Ok(match &*self.0 {
            Node::Const(c) => Jet1::constant(*c),
            Node::Coord(i) => Jet1::coordinate(*i, u.0[*i]),
            Node::Add(a, b) => a.jet_raw(u)? + b.jet_raw(u)?,
            Node::Sub(a, b) => a.jet_raw(u)? - b.jet_raw(u)?,
            Node::Mul(a, b) => a.jet_raw(u)? * b.jet_raw(u)?,
            Node::Div(a, b) => {
                let d = b.jet_raw(u)?;
                check_denominator(d.value, u)?;
                a.jet_raw(u)? / d
            }
            Node::Neg(a) => -a.jet_raw(u)?,
            Node::Exp(a) => a.jet_raw(u)?.exp(),
            Node::Sin(a) => a.jet_raw(u)?.sin(),
            Node::Cos(a) => a.jet_raw(u)?.cos(),
        })
    }
}

fn check_denominator(d: f64, u: &ChartPoint) -> Result<(), DomainError> {
    if d.abs() < SINGULAR_DENOMINATOR {
        Err(DomainError::SingularDenominator {
            value: d,
            point: u.0,
        })
    } else {
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(i) => write!(f, "u{}", i + 1),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Div(a, b) => write!(f, "{a}/{b}"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$imp(&self, &rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$imp(&self, rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$imp(self, &rhs)
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$imp(self, rhs)
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$imp(&self, &Expr::constant(rhs))
            }
        }
        impl $trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$imp(self, &Expr::constant(rhs))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$imp(&Expr::constant(self), &rhs)
            }
        }
        impl $trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$imp(&Expr::constant(self), rhs)
            }
        }
    };
}

expr_binop!(Add, add, add_impl);
expr_binop!(Sub, sub, sub_impl);
expr_binop!(Mul, mul, mul_impl);
expr_binop!(Div, div, div_impl);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg_impl(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg_impl(self)
    }
}

pub fn exp(e: impl Into<ExprArg>) -> Expr {
    e.into().0.exp()
}

pub fn sin(e: impl Into<ExprArg>) -> Expr {
    e.into().0.sin()
}

pub fn cos(e: impl Into<ExprArg>) -> Expr {
    e.into().0.cos()
}

/// Argument adapter so the free functions accept `Expr`, `&Expr` or `f64`.
pub struct ExprArg(Expr);

impl From<Expr> for ExprArg {
    fn from(e: Expr) -> Self {
        ExprArg(e)
    }
}

impl From<&Expr> for ExprArg {
    fn from(e: &Expr) -> Self {
        ExprArg(e.clone())
    }
}

impl From<f64> for ExprArg {
    fn from(c: f64) -> Self {
        ExprArg(Expr::constant(c))
    }
}

/// Value and exact gradient of `f` at `u`.
pub fn eval_jet(f: &Expr, u: &ChartPoint) -> Result<Jet1, DomainError> {
    f.jet(u)
}

/// Central-difference gradient `(f(u + h e_i) − f(u − h e_i)) / 2h`.
pub fn finite_diff_gradient(f: &Expr, u: &ChartPoint, h: f64) -> Result<[f64; DIM], DomainError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = [0.0; DIM];
    for (i, g) in grad.iter_mut().enumerate() {
        let fp = f.eval(&u.shifted(i, h))?;
        let fm = f.eval(&u.shifted(i, -h))?;
        *g = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

/// Mixed absolute/relative agreement `|a − b| ≤ atol + rtol·|b|`, componentwise.
pub fn gradients_agree(a: &[f64; DIM], b: &[f64; DIM], atol: f64, rtol: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= atol + rtol * y.abs())
}
