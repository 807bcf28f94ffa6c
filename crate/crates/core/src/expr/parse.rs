use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    IndexOutOfRange { name: String, dimension: usize },
    NonConstantExponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at byte offset {offset}", describe(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => format!("syntax error: {msg}"),
        ParseErrorKind::UnknownIdentifier(name) => format!("unknown identifier `{name}`"),
        ParseErrorKind::IndexOutOfRange { name, dimension } => {
            format!("variable `{name}` out of range for dimension {dimension}")
        }
        ParseErrorKind::NonConstantExponent => "exponent must be a constant".to_string(),
    }
}

/// Parses `source` as an expression over `x1..xn`, `y1..yn`.
pub fn parse_expression(source: &str, n: usize) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        src: source.as_bytes(),
        pos: 0,
        n,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, msg: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax(msg.to_string()),
            offset: self.pos,
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let exponent = self.unary()?;
        if exponent.has_vars() {
            return Err(ParseError {
                kind: ParseErrorKind::NonConstantExponent,
                offset: start,
            });
        }
        let value = super::eval::eval_constant(&exponent).map_err(|_| ParseError {
            kind: ParseErrorKind::NonConstantExponent,
            offset: start,
        })?;
        Ok(Expr::Pow(Box::new(base), value))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.syntax(&format!("unexpected character `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let src = self.src;
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < src.len() && src[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - s
        };
        let mut p = self.pos;
        let mut count = digits(&mut p);
        if p < src.len() && src[p] == b'.' {
            p += 1;
            count += digits(&mut p);
        }
        if count == 0 {
            return Err(self.syntax("malformed number"));
        }
        if p < src.len() && (src[p] == b'e' || src[p] == b'E') {
            let mut q = p + 1;
            if q < src.len() && (src[q] == b'+' || src[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) > 0 {
                p = q;
            }
        }
        let text = std::str::from_utf8(&src[start..p]).expect("ascii slice");
        let value: f64 = text.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::Syntax("malformed number".into()),
            offset: start,
        })?;
        self.pos = p;
        Ok(Expr::Const(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        if let Some(func) = Func::from_name(name) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(Expr::Const(std::f64::consts::PI));
        }
        let (head, digits) = name.split_at(1);
        if (head == "x" || head == "y") && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let index: usize = digits.parse().unwrap_or(usize::MAX);
            if index == 0 || index > self.n {
                return Err(ParseError {
                    kind: ParseErrorKind::IndexOutOfRange {
                        name: name.to_string(),
                        dimension: self.n,
                    },
                    offset: start,
                });
            }
            let var = if head == "x" {
                Var::X(index - 1)
            } else {
                Var::Y(index - 1)
            };
            return Ok(Expr::Var(var));
        }
        Err(ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            offset: start,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_randers_norm_with_sum_at_root() {
        let e = parse_expression("sqrt(y1^2+y2^2)+0.1*y1", 2).unwrap();
        match e {
            Expr::Binary(BinOp::Add, lhs, rhs) => {
                assert!(matches!(*lhs, Expr::Call(Func::Sqrt, _)));
                assert!(matches!(*rhs, Expr::Binary(BinOp::Mul, _, _)));
            }
            other => panic!("unexpected root {other:?}"),
        }
    }

    #[test]
    fn out_of_range_index() {
        let err = parse_expression("x3", 2).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::IndexOutOfRange {
                name: "x3".into(),
                dimension: 2
            }
        );
        assert_eq!(err.offset, 0);
        assert!(parse_expression("y0", 2).is_err());
    }

    #[test]
    fn truncated_call_reports_end_offset() {
        let err = parse_expression("sin(", 2).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expression("1 + tan(x1)", 2).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn exponent_must_be_constant() {
        let err = parse_expression("y1^x1", 2).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonConstantExponent);
        assert_eq!(err.offset, 3);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expression("1-2-3", 1).unwrap();
        assert_eq!(super::super::eval::eval_constant(&e).unwrap(), -4.0);
        let e = parse_expression("2*3^2", 1).unwrap();
        assert_eq!(super::super::eval::eval_constant(&e).unwrap(), 18.0);
        let e = parse_expression("-2^2", 1).unwrap();
        assert_eq!(super::super::eval::eval_constant(&e).unwrap(), -4.0);
        let e = parse_expression("2^-1", 1).unwrap();
        assert_eq!(super::super::eval::eval_constant(&e).unwrap(), 0.5);
        let e = parse_expression("1.5e1 + .5", 1).unwrap();
        assert_eq!(super::super::eval::eval_constant(&e).unwrap(), 15.5);
    }

    #[test]
    fn trailing_garbage() {
        let err = parse_expression("y1 y2", 2).unwrap_err();
        assert_eq!(err.offset, 3);
    }
}
