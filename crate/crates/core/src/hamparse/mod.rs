//! Scalar expressions of time `t` for user-defined model coefficients.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right associative *)
//! primary = number | "t" | "pi" | ident | func "(" expr ")" | "(" expr ")" ;
//! func    = "sin" | "cos" | "exp" | "sqrt" | "tanh" | "cosh" | "sinh" | "log" ;
//! number  = ( digits [ "." [ digits ] ] | "." digits ) [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! Any identifier other than `t`, `pi` and the function names is a named
//! parameter, bound to a value with [`Expr::bind`] before evaluation.
//! Implicit multiplication is not accepted: `2t` is a syntax error.

mod parser;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("expression `{expr}` evaluated to a non-finite value at t = {t}")]
    NonFiniteResult { expr: String, t: f64 },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            BinOp::Pow => a.powf(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Tanh,
    Cosh,
    Sinh,
    Log,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "cosh" => Func::Cosh,
            "sinh" => Func::Sinh,
            "log" => Func::Log,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Cosh => "cosh",
            Func::Sinh => "sinh",
            Func::Log => "log",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Sqrt => x.sqrt(),
            Func::Tanh => x.tanh(),
            Func::Cosh => x.cosh(),
            Func::Sinh => x.sinh(),
            Func::Log => x.ln(),
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The time variable `t`.
    Time,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at time `t` with parameters looked up in `params`.
    ///
    /// Every intermediate value must be finite.
    pub fn eval(&self, t: f64, params: &HashMap<String, f64>) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Time => t,
            Expr::Param(name) => *params
                .get(name)
                .ok_or_else(|| EvalError::UnboundParameter(name.clone()))?,
            Expr::Neg(inner) => -inner.eval(t, params)?,
            Expr::Binary(op, a, b) => op.apply(a.eval(t, params)?, b.eval(t, params)?),
            Expr::Call(f, arg) => f.apply(arg.eval(t, params)?),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFiniteResult {
                expr: self.to_string(),
                t,
            })
        }
    }

    /// Names of all parameters referenced, sorted and deduplicated.
    pub fn parameters(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param(name) => out.push(name.clone()),
                Expr::Neg(a) | Expr::Call(_, a) => walk(a, out),
                Expr::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Const(_) | Expr::Time => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Substitutes every parameter and folds constant subtrees.
    pub fn bind(&self, params: &HashMap<String, f64>) -> Result<BoundExpr, EvalError> {
        for name in self.parameters() {
            if !params.contains_key(&name) {
                return Err(EvalError::UnboundParameter(name));
            }
        }
        let tree = self.substitute(params).fold();
        Ok(BoundExpr { tree })
    }

    fn substitute(&self, params: &HashMap<String, f64>) -> Expr {
        match self {
            Expr::Param(name) => Expr::Const(params[name]),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(params))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(params))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.substitute(params)),
                Box::new(b.substitute(params)),
            ),
            other => other.clone(),
        }
    }

    /// True when `t` appears anywhere in the tree.
    pub fn depends_on_time(&self) -> bool {
        match self {
            Expr::Time => true,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_time(),
            Expr::Binary(_, a, b) => a.depends_on_time() || b.depends_on_time(),
        }
    }

    /// Symbolic `d/dt`. Parameters count as constants.
    pub fn derivative(&self) -> Expr {
        use Expr::Const;
        fn bx(e: Expr) -> Box<Expr> {
            Box::new(e)
        }
        fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
            match (op, &a, &b) {
                (BinOp::Mul, Const(z), _) | (BinOp::Mul, _, Const(z)) if *z == 0.0 => Const(0.0),
                (BinOp::Mul, Const(o), _) if *o == 1.0 => b,
                (BinOp::Mul, _, Const(o)) if *o == 1.0 => a,
                (BinOp::Add, Const(z), _) if *z == 0.0 => b,
                (BinOp::Add | BinOp::Sub, _, Const(z)) if *z == 0.0 => a,
                (BinOp::Div, Const(z), _) if *z == 0.0 => Const(0.0),
                _ => Expr::Binary(op, bx(a), bx(b)),
            }
        }
        fn call(f: Func, a: &Expr) -> Expr {
            Expr::Call(f, bx(a.clone()))
        }
        match self {
            Const(_) | Expr::Param(_) => Const(0.0),
            Expr::Time => Const(1.0),
            Expr::Neg(a) => match a.derivative() {
                Const(0.0) => Const(0.0),
                d => Expr::Neg(bx(d)),
            },
            Expr::Binary(op, a, b) => {
                let (da, db) = (a.derivative(), b.derivative());
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add | BinOp::Sub => match (*op, &da) {
                        (BinOp::Sub, Const(z)) if *z == 0.0 => match db {
                            Const(0.0) => Const(0.0),
                            d => Expr::Neg(bx(d)),
                        },
                        _ => bin(*op, da, db),
                    },
                    BinOp::Mul => bin(
                        BinOp::Add,
                        bin(BinOp::Mul, da, b.clone()),
                        bin(BinOp::Mul, a, db),
                    ),
                    BinOp::Div => bin(
                        BinOp::Div,
                        bin(
                            BinOp::Sub,
                            bin(BinOp::Mul, da, b.clone()),
                            bin(BinOp::Mul, a, db),
                        ),
                        bin(BinOp::Pow, b, Const(2.0)),
                    ),
                    BinOp::Pow if !b.depends_on_time() => {
                        let lowered = bin(BinOp::Pow, a, bin(BinOp::Sub, b.clone(), Const(1.0)));
                        bin(BinOp::Mul, bin(BinOp::Mul, b, lowered), da)
                    }
                    // a^b (b' ln a + b a'/a)
                    BinOp::Pow => {
                        let power = Expr::Binary(BinOp::Pow, bx(a.clone()), bx(b.clone()));
                        let rate = bin(
                            BinOp::Add,
                            bin(BinOp::Mul, db, call(Func::Log, &a)),
                            bin(BinOp::Div, bin(BinOp::Mul, b, da), a),
                        );
                        bin(BinOp::Mul, power, rate)
                    }
                }
            }
            Expr::Call(f, a) => {
                let da = a.derivative();
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => Expr::Neg(bx(call(Func::Sin, a))),
                    Func::Exp => call(Func::Exp, a),
                    Func::Sqrt => bin(BinOp::Div, Const(0.5), call(Func::Sqrt, a)),
                    Func::Tanh => bin(
                        BinOp::Sub,
                        Const(1.0),
                        bin(BinOp::Pow, call(Func::Tanh, a), Const(2.0)),
                    ),
                    Func::Cosh => call(Func::Sinh, a),
                    Func::Sinh => call(Func::Cosh, a),
                    Func::Log => bin(BinOp::Div, Const(1.0), (**a).clone()),
                };
                bin(BinOp::Mul, outer, da)
            }
        }
    }

    /// Constant folding. Subtrees whose value would be non-finite are left
    /// unfolded so the error surfaces at evaluation time.
    pub fn fold(self) -> Expr {
        let folded = match self {
            Expr::Neg(a) => Expr::Neg(Box::new(a.fold())),
            Expr::Call(f, a) => Expr::Call(f, Box::new(a.fold())),
            Expr::Binary(op, a, b) => Expr::Binary(op, Box::new(a.fold()), Box::new(b.fold())),
            other => return other,
        };
        let value = match &folded {
            Expr::Neg(a) => match **a {
                Expr::Const(c) => Some(-c),
                _ => None,
            },
            Expr::Call(f, a) => match **a {
                Expr::Const(c) => Some(f.apply(c)),
                _ => None,
            },
            Expr::Binary(op, a, b) => match (&**a, &**b) {
                (Expr::Const(x), Expr::Const(y)) => Some(op.apply(*x, *y)),
                _ => None,
            },
            _ => None,
        };
        match value {
            Some(v) if v.is_finite() => Expr::Const(v),
            _ => folded,
        }
    }
}

/// Fully parenthesized rendering that re-parses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Time => write!(f, "t"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// An expression with all parameters substituted; only `t` remains free.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundExpr {
    tree: Expr,
}

impl BoundExpr {
    pub fn constant(value: f64) -> Self {
        BoundExpr {
            tree: Expr::Const(value),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.tree.eval(t, &HashMap::new())
    }

    pub fn tree(&self) -> &Expr {
        &self.tree
    }

    /// Symbolic time derivative, constant-folded.
    pub fn derivative(&self) -> BoundExpr {
        BoundExpr {
            tree: self.tree.derivative().fold(),
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tree.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluates_examples() {
        let p = params(&[("w", 2.0)]);
        let v = parse("cos(w*t)")
            .unwrap()
            .eval(std::f64::consts::PI, &p)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let p = params(&[("m0", 1.0), ("gamma", 0.6)]);
        let v = parse("m0*exp(gamma*t)").unwrap().eval(1.0, &p).unwrap();
        assert!((v - 1.822_118_800_390_509).abs() < 1e-14);

        assert_eq!(parse("2^3^2").unwrap().eval(0.0, &p).unwrap(), 512.0);
    }

    #[test]
    fn domain_error_is_non_finite() {
        let e = parse("sqrt(t-1)").unwrap();
        assert!(matches!(
            e.eval(0.0, &HashMap::new()),
            Err(EvalError::NonFiniteResult { .. })
        ));
    }

    #[test]
    fn unbound_parameter() {
        let e = parse("a*t").unwrap();
        assert_eq!(
            e.eval(1.0, &HashMap::new()),
            Err(EvalError::UnboundParameter("a".into()))
        );
        assert!(matches!(
            e.bind(&HashMap::new()),
            Err(EvalError::UnboundParameter(_))
        ));
    }

    #[test]
    fn bind_folds_constants() {
        let e = parse("w0^2 + 0*t").unwrap();
        let b = e.bind(&params(&[("w0", 3.0)])).unwrap();
        assert_eq!(b.eval(7.0).unwrap(), 9.0);
        match b.tree() {
            Expr::Binary(BinOp::Add, lhs, _) => assert_eq!(**lhs, Expr::Const(9.0)),
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn folding_keeps_domain_errors() {
        let b = parse("sqrt(0-1)").unwrap().bind(&HashMap::new()).unwrap();
        assert!(b.eval(0.0).is_err());
    }

    #[test]
    fn display_of_negative_constant_reparses() {
        let b = parse("-2*t").unwrap().bind(&HashMap::new()).unwrap();
        let again = parse(&b.to_string()).unwrap();
        assert_eq!(again.eval(1.5, &HashMap::new()).unwrap(), -3.0);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let p = params(&[("a", 0.7), ("w0", 1.3)]);
        for src in [
            "3",
            "t",
            "a*t^2",
            "-t^3 + 2*t",
            "t - a",
            "1/(1 + t^2)",
            "sqrt(1 + t)",
            "exp(-a*t)*cos(w0*t)",
            "tanh(t)",
            "log(2 + sin(t))",
            "sinh(t)*cosh(t)",
            "t^t",
            "2^t",
            "(1+t)^-0.5",
            "-(w0*t)",
            "a - sin(t)",
        ] {
            let e = parse(src).unwrap();
            let d = e.derivative();
            for t in [0.3, 0.9, 1.7] {
                let h = 1e-5;
                let fd = (e.eval(t + h, &p).unwrap() - e.eval(t - h, &p).unwrap()) / (2.0 * h);
                let exact = d.eval(t, &p).unwrap();
                assert!(
                    (exact - fd).abs() < 1e-8 * fd.abs().max(1.0),
                    "{src} at {t}: {exact} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn bound_derivative_is_exact_for_exponential_mass() {
        let m = parse("m0*exp(gamma*t)")
            .unwrap()
            .bind(&params(&[("m0", 2.0), ("gamma", 0.6)]))
            .unwrap();
        let dm = m.derivative();
        for t in [0.0, 1.0, 5.0] {
            assert!((dm.eval(t).unwrap() - 1.2 * (0.6 * t).exp()).abs() < 1e-13 * (0.6 * t).exp());
        }
        assert_eq!(
            parse("w0^2")
                .unwrap()
                .bind(&params(&[("w0", 1.0)]))
                .unwrap()
                .derivative()
                .tree(),
            &Expr::Const(0.0)
        );
    }
}
