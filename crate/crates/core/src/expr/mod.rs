//! Arithmetic expressions for user-supplied profiles `h(r)` and heights
//! `f(x_1, y_1, ...)`, evaluated in `f64` or with exact first derivatives
//! through [`Dual`] numbers.

mod dual;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use dual::{Dual, Scalar};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

/// Slack allowed outside the domains of `sqrt` and `acos` before an error is
/// raised; values inside the slack are clamped onto the domain.
pub const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("illegal character {ch:?} at offset {position}")]
    IllegalCharacter { ch: char, position: usize },
    #[error("malformed number at offset {position}")]
    MalformedNumber { position: usize },
    #[error("unexpected token {found:?} at offset {position}")]
    UnexpectedToken { found: String, position: usize },
    #[error("unexpected end of input at offset {position}")]
    UnexpectedEnd { position: usize },
    #[error("unbalanced parenthesis at offset {position}")]
    UnbalancedParen { position: usize },
    #[error("unknown function {name:?} at offset {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("{name} takes {expected} argument(s), got {found} (offset {position})")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        position: usize,
    },
    #[error("unbound variable {name:?} at offset {position}")]
    UnboundVariable { name: String, position: usize },
    #[error("domain error in {what} at offset {position}")]
    DomainError { what: String, position: usize },
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::IllegalCharacter { position, .. }
            | ExprError::MalformedNumber { position }
            | ExprError::UnexpectedToken { position, .. }
            | ExprError::UnexpectedEnd { position }
            | ExprError::UnbalancedParen { position }
            | ExprError::UnknownFunction { position, .. }
            | ExprError::ArityMismatch { position, .. }
            | ExprError::UnboundVariable { position, .. }
            | ExprError::DomainError { position, .. } => *position,
        }
    }
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
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Acos,
    Abs,
    Exp,
    Ln,
    Pow,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "acos" => Func::Acos,
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Acos => "acos",
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

/// Expression tree. Source offsets are kept for error reporting and ignored
/// by `PartialEq`.
#[derive(Debug, Clone)]
pub enum Ast {
    Const(f64),
    Var {
        name: String,
        pos: usize,
    },
    Neg(Box<Ast>),
    Binary {
        op: BinOp,
        lhs: Box<Ast>,
        rhs: Box<Ast>,
        pos: usize,
    },
    Call {
        func: Func,
        args: Vec<Ast>,
        pos: usize,
    },
}

impl PartialEq for Ast {
    fn eq(&self, other: &Ast) -> bool {
        match (self, other) {
            (Ast::Const(a), Ast::Const(b)) => a == b,
            (Ast::Var { name: a, .. }, Ast::Var { name: b, .. }) => a == b,
            (Ast::Neg(a), Ast::Neg(b)) => a == b,
            (
                Ast::Binary { op: o1, lhs: l1, rhs: r1, .. },
                Ast::Binary { op: o2, lhs: l2, rhs: r2, .. },
            ) => o1 == o2 && l1 == l2 && r1 == r2,
            (Ast::Call { func: f1, args: a1, .. }, Ast::Call { func: f2, args: a2, .. }) => {
                f1 == f2 && a1 == a2
            }
            _ => false,
        }
    }
}

impl Ast {
    fn binary(op: BinOp, lhs: Ast, rhs: Ast, pos: usize) -> Ast {
        Ast::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            pos,
        }
    }

    /// Free variables with the offset of their first occurrence.
    pub fn variables(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Ast::Const(_) => {}
            Ast::Var { name, pos } => {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), *pos));
                }
            }
            Ast::Neg(a) => a.collect_vars(out),
            Ast::Binary { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Ast::Call { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Fails with `UnboundVariable` on the first variable outside `allowed`.
    pub fn check_variables(&self, allowed: &[&str]) -> Result<(), ExprError> {
        for (name, position) in self.variables() {
            if name != "pi" && !allowed.contains(&name.as_str()) {
                return Err(ExprError::UnboundVariable { name, position });
            }
        }
        Ok(())
    }
}

/// Fully parenthesized, so the output reparses to the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Const(v) => write!(f, "{v:?}"),
            Ast::Var { name, .. } => f.write_str(name),
            Ast::Neg(a) => write!(f, "(-{a})"),
            Ast::Binary { op, lhs, rhs, .. } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Ast::Call { func, args, .. } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse_str(src: &str) -> Result<Ast, ExprError> {
    parse(&tokenize(src)?)
}

/// Variable values. `pi` is always bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    vars: Vec<(String, f64)>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.vars.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.vars.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or(if name == "pi" { Some(std::f64::consts::PI) } else { None })
    }
}

pub fn eval(ast: &Ast, bindings: &Bindings) -> Result<f64, ExprError> {
    eval_generic::<f64>(ast, &|name| bindings.get(name).map(f64::from_f64))
}

/// Value and derivative with respect to `var`.
pub fn eval_dual(ast: &Ast, var: &str, bindings: &Bindings) -> Result<Dual, ExprError> {
    eval_generic::<Dual>(ast, &|name| {
        bindings.get(name).map(|v| {
            if name == var {
                Dual::variable(v)
            } else {
                Dual::constant(v)
            }
        })
    })
}

fn domain(what: &str, position: usize) -> ExprError {
    ExprError::DomainError {
        what: what.to_string(),
        position,
    }
}

fn eval_generic<T: Scalar>(ast: &Ast, lookup: &dyn Fn(&str) -> Option<T>) -> Result<T, ExprError> {
    let out = match ast {
        Ast::Const(v) => T::from_f64(*v),
        Ast::Var { name, pos } => lookup(name).ok_or_else(|| ExprError::UnboundVariable {
            name: name.clone(),
            position: *pos,
        })?,
        Ast::Neg(a) => -eval_generic(a, lookup)?,
        Ast::Binary { op, lhs, rhs, pos } => {
            let a = eval_generic(lhs, lookup)?;
            let b = eval_generic(rhs, lookup)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value() == 0.0 {
                        return Err(domain("division by zero", *pos));
                    }
                    a / b
                }
                BinOp::Pow => power(a, b, *pos)?,
            }
        }
        Ast::Call { func, args, pos } => {
            let a = eval_generic(&args[0], lookup)?;
            let v = a.value();
            match func {
                Func::Sqrt => {
                    if v < -DOMAIN_SLACK {
                        return Err(domain("sqrt of a negative number", *pos));
                    }
                    if v < 0.0 {
                        T::from_f64(0.0).sqrt()
                    } else {
                        a.sqrt()
                    }
                }
                Func::Acos => {
                    if v.abs() > 1.0 + DOMAIN_SLACK {
                        return Err(domain("acos outside [-1, 1]", *pos));
                    }
                    if v > 1.0 {
                        T::from_f64(1.0).acos()
                    } else if v < -1.0 {
                        T::from_f64(-1.0).acos()
                    } else {
                        a.acos()
                    }
                }
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(domain("ln of a non-positive number", *pos));
                    }
                    a.ln()
                }
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Abs => a.abs(),
                Func::Exp => a.exp(),
                Func::Pow => power(a, eval_generic(&args[1], lookup)?, *pos)?,
            }
        }
    };
    if !out.is_finite() {
        return Err(domain("non-finite intermediate value", node_pos(ast)));
    }
    Ok(out)
}

fn power<T: Scalar>(base: T, exponent: T, pos: usize) -> Result<T, ExprError> {
    let (b, e) = (base.value(), exponent.value());
    if exponent.is_constant() && e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        if b == 0.0 && e < 0.0 {
            return Err(domain("zero to a negative power", pos));
        }
        return Ok(base.powi(e as i32));
    }
    if b < 0.0 {
        return Err(domain("negative base with a non-integer exponent", pos));
    }
    if b == 0.0 {
        if e > 0.0 && exponent.is_constant() {
            return Ok(T::from_f64(0.0));
        }
        return Err(domain("zero base in a variable power", pos));
    }
    Ok(base.powf(exponent))
}

fn node_pos(ast: &Ast) -> usize {
    match ast {
        Ast::Var { pos, .. } | Ast::Binary { pos, .. } | Ast::Call { pos, .. } => *pos,
        Ast::Neg(a) => node_pos(a),
        Ast::Const(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ev(src: &str, b: &Bindings) -> f64 {
        eval(&parse_str(src).unwrap(), b).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let b = Bindings::new().with("r", 2.0);
        assert_eq!(ev("2+3*4", &b), 14.0);
        assert_eq!(ev("2^3^2", &b), 512.0);
        assert_eq!(ev("-r^2", &b), -4.0);
        assert_eq!(ev("2^-1", &b), 0.5);
        assert_eq!(ev("(1 - 2 - 3) * 2 / 4", &b), -2.0);
        assert_eq!(ev("pow(r, 3) - pi + pi", &b), 8.0);
    }

    #[test]
    fn profiles_evaluate() {
        let b = Bindings::new().with("r", 0.0).with("R", 1.0);
        assert_eq!(ev("sqrt(R^2-r^2)", &b), 1.0);
        let d = eval_dual(
            &parse_str("sqrt(R^2-r^2)").unwrap(),
            "r",
            &Bindings::new().with("r", 0.6).with("R", 1.0),
        )
        .unwrap();
        assert!((d.value - 0.8).abs() < 1e-15);
        assert!((d.deriv + 0.75).abs() < 1e-15);
        let d = eval_dual(&parse_str("r^2").unwrap(), "r", &Bindings::new().with("r", 3.0)).unwrap();
        assert_eq!(d, Dual::new(9.0, 6.0));
        assert!((ev("acos(0)", &b) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn domain_edges_are_clamped_or_rejected() {
        let b = Bindings::new().with("r", 1.0);
        assert!(matches!(
            eval(&parse_str("acos(2)").unwrap(), &b),
            Err(ExprError::DomainError { position: 0, .. })
        ));
        assert_eq!(ev("acos(1 + 1e-13)", &b), 0.0);
        assert_eq!(ev("sqrt(1 - r - 1e-13)", &b), 0.0);
        assert!(eval(&parse_str("sqrt(-1)").unwrap(), &b).is_err());
        assert!(eval(&parse_str("ln(0)").unwrap(), &b).is_err());
        assert!(eval(&parse_str("1/(r-1)").unwrap(), &b).is_err());
        assert!(eval(&parse_str("(-2)^0.5").unwrap(), &b).is_err());
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(
            parse_str("sqrt(q)").unwrap().check_variables(&["r", "R"]),
            Err(ExprError::UnboundVariable {
                name: "q".into(),
                position: 5
            })
        );
        assert_eq!(
            parse_str("(r + 1"),
            Err(ExprError::UnbalancedParen { position: 0 })
        );
        assert_eq!(parse_str("r + 1)"), Err(ExprError::UnbalancedParen { position: 5 }));
        assert_eq!(parse_str("r +"), Err(ExprError::UnexpectedEnd { position: 3 }));
        assert_eq!(
            parse_str("r * * 2"),
            Err(ExprError::UnexpectedToken {
                found: "*".into(),
                position: 4
            })
        );
        assert!(matches!(
            parse_str("foo(r)"),
            Err(ExprError::UnknownFunction { position: 0, .. })
        ));
        assert!(matches!(
            parse_str("pow(r)"),
            Err(ExprError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            eval(&parse_str("r + s").unwrap(), &Bindings::new().with("r", 1.0)),
            Err(ExprError::UnboundVariable { position: 4, .. })
        ));
    }

    #[test]
    fn abs_derivative_at_kink_is_zero() {
        let d = eval_dual(&parse_str("abs(r)").unwrap(), "r", &Bindings::new().with("r", 0.0))
            .unwrap();
        assert_eq!(d, Dual::new(0.0, 0.0));
    }
}
