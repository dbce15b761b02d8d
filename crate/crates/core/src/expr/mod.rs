//! Scalar expressions over named variables.
//!
//! Expressions are parsed from text (see [`parse`]) and evaluated with
//! second-order jets, so every consumer gets exact first and second
//! partial derivatives of user-supplied functions such as the conformal
//! factor of a metric or the components of an immersion.
//!
//! ```
//! use killsub::expr::Expr;
//!
//! let e = Expr::parse("sin(x)*y", &["x", "y"]).unwrap();
//! let j = e.eval_jet(&[0.0, 2.0]).unwrap();
//! assert_eq!(j.value(), 0.0);
//! assert_eq!(j.grad(), &[2.0, 0.0]);
//! assert_eq!(j.dd(0, 1), 1.0);
//! ```

mod jet;
mod parse;

use std::fmt;

use thiserror::Error;

pub use jet::{compose_jet, Jet, MAX_VARS};

/// Distance from the kink of `abs` inside which differentiation is refused.
pub const ABS_KINK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared variable `{name}` at offset {pos}")]
    UndeclaredVariable { name: String, pos: usize },
    #[error("constant exponent required for `^` at offset {pos}")]
    NonConstantExponent { pos: usize },
    #[error("domain error in {func} (argument {arg:e}) at `{subexpr}`")]
    Domain {
        func: &'static str,
        arg: f64,
        subexpr: String,
    },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("too many variables: {0} (at most {MAX_VARS})")]
    TooManyVariables(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    /// Value and first two derivatives at `x`, or `None` outside the
    /// differentiable domain.
    fn derivatives(self, x: f64) -> Option<(f64, f64, f64)> {
        match self {
            Func::Sin => Some((x.sin(), x.cos(), -x.sin())),
            Func::Cos => Some((x.cos(), -x.sin(), -x.cos())),
            Func::Tan => {
                let c = x.cos();
                if c.abs() < 1e-300 {
                    return None;
                }
                let t = x.tan();
                let sec2 = 1.0 + t * t;
                Some((t, sec2, 2.0 * t * sec2))
            }
            Func::Exp => {
                let e = x.exp();
                Some((e, e, e))
            }
            Func::Log => (x > 0.0).then(|| (x.ln(), 1.0 / x, -1.0 / (x * x))),
            Func::Sqrt => (x > 0.0).then(|| {
                let s = x.sqrt();
                (s, 0.5 / s, -0.25 / (s * x))
            }),
            Func::Abs => {
                (x.abs() >= ABS_KINK_TOL).then(|| (x.abs(), x.signum(), 0.0))
            }
        }
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

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Index into the owning expression's variable list.
    Var(usize),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
}

/// A parsed expression together with its declared variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
}

impl Expr {
    /// Parses `text` with the given variable names in scope.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Expr, ExprError> {
        if vars.len() > MAX_VARS {
            return Err(ExprError::TooManyVariables(vars.len()));
        }
        let root = parse::Parser::new(text, vars).parse()?;
        Ok(Expr {
            root,
            vars: vars.iter().map(|v| v.to_string()).collect(),
        })
    }

    /// Wraps a node built in code. Panics if a variable index is out of range.
    pub fn from_node(root: Node, vars: &[&str]) -> Expr {
        assert!(vars.len() <= MAX_VARS);
        fn check(n: &Node, nvars: usize) {
            match n {
                Node::Const(_) => {}
                Node::Var(i) => assert!(*i < nvars, "variable index {i} undeclared"),
                Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => check(a, nvars),
                Node::Binary(_, a, b) => {
                    check(a, nvars);
                    check(b, nvars);
                }
            }
        }
        check(&root, vars.len());
        Expr {
            root,
            vars: vars.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn constant(value: f64, vars: &[&str]) -> Expr {
        Expr::from_node(Node::Const(value), vars)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Rebinds the expression to a new variable list, mapping names to
    /// `renames` (old name, new name) first.
    pub fn rebind(&self, new_vars: &[&str], renames: &[(&str, &str)]) -> Result<Expr, ExprError> {
        if new_vars.len() > MAX_VARS {
            return Err(ExprError::TooManyVariables(new_vars.len()));
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for old in &self.vars {
            let name = renames
                .iter()
                .find(|(from, _)| from == old)
                .map_or(old.as_str(), |(_, to)| to);
            match new_vars.iter().position(|v| *v == name) {
                Some(i) => map.push(i),
                None if self.uses_var(map.len()) => {
                    return Err(ExprError::UndeclaredVariable {
                        name: name.to_string(),
                        pos: 0,
                    })
                }
                None => map.push(usize::MAX),
            }
        }
        fn remap(n: &Node, map: &[usize]) -> Node {
            match n {
                Node::Const(c) => Node::Const(*c),
                Node::Var(i) => Node::Var(map[*i]),
                Node::Neg(a) => Node::Neg(Box::new(remap(a, map))),
                Node::Call(f, a) => Node::Call(*f, Box::new(remap(a, map))),
                Node::Pow(a, p) => Node::Pow(Box::new(remap(a, map)), *p),
                Node::Binary(op, a, b) => {
                    Node::Binary(*op, Box::new(remap(a, map)), Box::new(remap(b, map)))
                }
            }
        }
        Ok(Expr {
            root: remap(&self.root, &map),
            vars: new_vars.iter().map(|v| v.to_string()).collect(),
        })
    }

    fn uses_var(&self, index: usize) -> bool {
        fn walk(n: &Node, index: usize) -> bool {
            match n {
                Node::Const(_) => false,
                Node::Var(i) => *i == index,
                Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => walk(a, index),
                Node::Binary(_, a, b) => walk(a, index) || walk(b, index),
            }
        }
        walk(&self.root, index)
    }

    /// Value only.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.check_arity(point.len())?;
        let inputs: Vec<Jet> = point.iter().map(|&p| Jet::constant(0, p)).collect();
        Ok(eval_node(&self.root, &inputs, &self.vars)?.value())
    }

    /// Value, gradient and Hessian with respect to the declared variables.
    pub fn eval_jet(&self, point: &[f64]) -> Result<Jet, ExprError> {
        self.check_arity(point.len())?;
        let dim = point.len();
        let inputs: Vec<Jet> = point
            .iter()
            .enumerate()
            .map(|(i, &p)| Jet::variable(dim, i, p))
            .collect();
        eval_node(&self.root, &inputs, &self.vars)
    }

    /// Evaluates with arbitrary jets substituted for the variables, i.e. the
    /// literal composition `e ∘ (inputs)`.
    pub fn eval_composed(&self, inputs: &[Jet]) -> Result<Jet, ExprError> {
        self.check_arity(inputs.len())?;
        eval_node(&self.root, inputs, &self.vars)
    }

    fn check_arity(&self, n: usize) -> Result<(), ExprError> {
        if n != self.vars.len() {
            return Err(ExprError::ArityMismatch {
                expected: self.vars.len(),
                found: n,
            });
        }
        Ok(())
    }
}

fn domain_error(func: &'static str, arg: f64, node: &Node, vars: &[String]) -> ExprError {
    ExprError::Domain {
        func,
        arg,
        subexpr: NodeDisplay { node, vars }.to_string(),
    }
}

fn eval_node(node: &Node, inputs: &[Jet], vars: &[String]) -> Result<Jet, ExprError> {
    let dim = inputs.first().map_or(0, Jet::dim);
    let out = match node {
        Node::Const(c) => Jet::constant(dim, *c),
        Node::Var(i) => inputs[*i],
        Node::Neg(a) => -eval_node(a, inputs, vars)?,
        Node::Call(f, a) => {
            let arg = eval_node(a, inputs, vars)?;
            let (v, d1, d2) = f
                .derivatives(arg.value())
                .ok_or_else(|| domain_error(f.name(), arg.value(), node, vars))?;
            arg.chain(v, d1, d2)
        }
        Node::Binary(op, a, b) => {
            let l = eval_node(a, inputs, vars)?;
            let r = eval_node(b, inputs, vars)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => l
                    .checked_div(&r)
                    .map_err(|_| domain_error("division", r.value(), node, vars))?,
            }
        }
        Node::Pow(a, p) => {
            let base = eval_node(a, inputs, vars)?;
            pow_jet(&base, *p).ok_or_else(|| domain_error("pow", base.value(), node, vars))?
        }
    };
    if !out.is_finite() {
        return Err(domain_error("overflow", out.value(), node, vars));
    }
    Ok(out)
}

fn pow_jet(base: &Jet, p: f64) -> Option<Jet> {
    let x = base.value();
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        let n = p as i32;
        if n < 0 && x == 0.0 {
            return None;
        }
        let nf = n as f64;
        let v = x.powi(n);
        let d1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * x.powi(n - 2)
        };
        Some(base.chain(v, d1, d2))
    } else {
        if x <= 0.0 {
            return None;
        }
        Some(base.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0)))
    }
}

struct NodeDisplay<'a> {
    node: &'a Node,
    vars: &'a [String],
}

impl fmt::Display for NodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |node| NodeDisplay { node, vars: self.vars };
        match self.node {
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var(i) => f.write_str(&self.vars[*i]),
            Node::Neg(a) => write!(f, "-({})", sub(a)),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
            Node::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
            Node::Pow(a, p) => write!(f, "({})^{p:?}", sub(a)),
        }
    }
}

/// Fully parenthesised; re-parsing the output gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        NodeDisplay {
            node: &self.root,
            vars: &self.vars,
        }
        .fmt(f)
    }
}
