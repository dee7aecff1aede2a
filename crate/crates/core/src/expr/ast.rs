use std::fmt;

use super::dual::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Expression tree over variables referenced by index.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Power with an exponent folded to a constant at construction time.
    PowConst(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

/// A failed evaluation, pointing at the offending node.
#[derive(Debug)]
pub(crate) struct Fault<'a> {
    pub node: &'a Expr,
    pub reason: &'static str,
}

const MAX_INT_EXPONENT: f64 = 1_048_576.0;

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Builds `base ^ exponent`, folding variable-free exponents that
    /// evaluate to a finite number.
    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if !exponent.has_variables() {
            if let Ok(k) = exponent.eval::<f64>(&[]) {
                return Expr::PowConst(Box::new(base), k);
            }
        }
        Expr::binary(BinOp::Pow, base, exponent)
    }

    pub fn has_variables(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(e) | Expr::PowConst(e, _) | Expr::Call(_, e) => e.has_variables(),
            Expr::Binary(_, l, r) => l.has_variables() || r.has_variables(),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::PowConst(e, _) | Expr::Call(_, e) => e.max_variable(),
            Expr::Binary(_, l, r) => l.max_variable().max(r.max_variable()),
        }
    }

    /// Replaces every `Var(i)` by `replacements[i]`.
    pub fn substitute(&self, replacements: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => replacements[*i].clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(replacements))),
            Expr::Binary(op, l, r) => {
                Expr::binary(*op, l.substitute(replacements), r.substitute(replacements))
            }
            Expr::PowConst(b, k) => Expr::PowConst(Box::new(b.substitute(replacements)), *k),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.substitute(replacements))),
        }
    }

    pub(crate) fn eval<T: Scalar>(&self, vars: &[T]) -> Result<T, Fault<'_>> {
        let out = match self {
            Expr::Const(c) => T::constant(*c),
            Expr::Var(i) => vars[*i],
            Expr::Neg(e) => -e.eval(vars)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(vars)?;
                let b = r.eval(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.value() == 0.0 {
                            return Err(self.fault("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a.value() <= 0.0 {
                            return Err(self.fault("non-positive base with variable exponent"));
                        }
                        (b * a.ln()).exp()
                    }
                }
            }
            Expr::PowConst(base, k) => {
                let a = base.eval(vars)?;
                if k.fract() == 0.0 && k.abs() <= MAX_INT_EXPONENT {
                    if a.value() == 0.0 && *k < 0.0 {
                        return Err(self.fault("division by zero"));
                    }
                    a.powi(*k as i32)
                } else {
                    if a.value() < 0.0 {
                        return Err(self.fault("negative base with non-integer exponent"));
                    }
                    a.powf_const(*k)
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(vars)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Ln => {
                        if a.value() <= 0.0 {
                            return Err(self.fault("logarithm of non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.value() < 0.0 {
                            return Err(self.fault("square root of negative value"));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(self.fault("non-finite result"))
        }
    }

    fn fault(&self, reason: &'static str) -> Fault<'_> {
        Fault { node: self, reason }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
            Expr::Neg(_) => 3,
            Expr::PowConst(..) => 4,
            Expr::Binary(op, ..) => op.precedence(),
        }
    }

    /// Renders the tree with the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { expr: self, names }
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl Display<'_> {
    fn child<'b>(&'b self, e: &'b Expr) -> Display<'b> {
        Display {
            expr: e,
            names: self.names,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(e))
        } else {
            write!(f, "{}", self.child(e))
        }
    }
}

pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", format_number(-c))
                } else {
                    f.write_str(&format_number(*c))
                }
            }
            Expr::Var(i) => match self.names.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "?{i}"),
            },
            Expr::Neg(e) => {
                f.write_str("-")?;
                self.wrapped(f, e, e.precedence() <= 3)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    self.wrapped(f, l, l.precedence() <= p)?;
                    f.write_str("^")?;
                    self.wrapped(f, r, r.precedence() < 3)
                } else {
                    self.wrapped(f, l, l.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    self.wrapped(f, r, r.precedence() <= p)
                }
            }
            Expr::PowConst(b, k) => {
                self.wrapped(f, b, b.precedence() <= 4)?;
                f.write_str("^")?;
                if k.is_sign_negative() {
                    write!(f, "-{}", format_number(-k))
                } else {
                    f.write_str(&format_number(*k))
                }
            }
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), self.child(e)),
        }
    }
}
