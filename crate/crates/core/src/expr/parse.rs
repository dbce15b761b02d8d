//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := "-" factor | base ("^" ["-"] number)?
//! base   := number | "pi" | ident | "(" expr ")" | func "(" expr ")"
//! func   := "sin"|"cos"|"tan"|"exp"|"log"|"sqrt"|"abs"
//! ```

use super::{BinOp, ExprError, Func, Node};

pub(super) struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, vars: &'a [&'a str]) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            vars,
        }
    }

    pub(super) fn parse(mut self) -> Result<Node, ExprError> {
        let node = self.expr()?;
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(node)
    }

    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = {
                self.skip_ws();
                self.pos
            };
            let negative = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => {}
                _ => return Err(ExprError::NonConstantExponent { pos: start }),
            }
            let p = self.number()?;
            return Ok(Node::Pow(Box::new(base), if negative { -p } else { p }));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Node::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn ident(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(func) = Func::from_name(name) {
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Node::Call(func, Box::new(arg)));
            }
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        if name == "pi" {
            return Ok(Node::Const(std::f64::consts::PI));
        }
        if Func::from_name(name).is_some() {
            return Err(self.syntax(&format!("expected `(` after `{name}`")));
        }
        Err(ExprError::UndeclaredVariable {
            name: name.to_string(),
            pos: start,
        })
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // not an exponent after all; leave `e` for the caller to reject
                self.pos = mark;
            }
        }
        self.src[start..self.pos].parse::<f64>().map_err(|_| ExprError::Syntax {
            pos: start,
            msg: "malformed number".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Expr, ExprError, Node};

    #[test]
    fn single_variable() {
        let e = Expr::parse("x", &["x", "y"]).unwrap();
        assert_eq!(e.root(), &Node::Var(0));
    }

    #[test]
    fn trailing_operator_reports_offset() {
        match Expr::parse("1+", &["x"]) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_variable() {
        assert!(matches!(
            Expr::parse("x + z", &["x"]),
            Err(ExprError::UndeclaredVariable { pos: 4, .. })
        ));
    }

    #[test]
    fn exponent_must_be_constant() {
        assert!(matches!(
            Expr::parse("2^x", &["x"]),
            Err(ExprError::NonConstantExponent { pos: 2 })
        ));
        assert!(matches!(
            Expr::parse("x^(2)", &["x"]),
            Err(ExprError::NonConstantExponent { .. })
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = Expr::parse("-x^2", &["x"]).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
        let e = Expr::parse("2*-x", &["x"]).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -6.0);
    }

    #[test]
    fn scientific_notation_and_pi() {
        let e = Expr::parse("1.5e-3 * pi + .5E1", &[]).unwrap();
        assert!((e.eval(&[]).unwrap() - (1.5e-3 * std::f64::consts::PI + 5.0)).abs() < 1e-15);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = Expr::parse(" sin ( x ) * ( y+1 ) ", &["x", "y"]).unwrap();
        let b = Expr::parse("sin(x)*(y+1)", &["x", "y"]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn function_name_without_call_is_rejected() {
        assert!(Expr::parse("sin + 1", &["x"]).is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["1/(1+(1/4)*(x^2+y^2))", "-x^2 + exp(-(x^2+y^2)/4)", "sqrt(abs(x)) - y^-3", "1e-10*pi"] {
            let e = Expr::parse(text, &["x", "y"]).unwrap();
            let again = Expr::parse(&e.to_string(), &["x", "y"]).unwrap();
            assert_eq!(e, again, "{text} -> {e}");
        }
    }
}
