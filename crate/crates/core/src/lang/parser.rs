use std::collections::HashMap;
use std::fmt;

use super::ast::{DerivAxis, Expr};
use crate::series::{AnalyticFn, Axis};

/// A single parse problem, located by byte offset into the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParseDiagnostics {
    pub items: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    pub fn single(position: usize, message: impl Into<String>) -> Self {
        ParseDiagnostics {
            items: vec![Diagnostic {
                position,
                message: message.into(),
            }],
        }
    }

    /// Shifts every position by `offset`, for expressions embedded in a
    /// larger text.
    pub fn offset(mut self, offset: usize) -> Self {
        for d in &mut self.items {
            d.position += offset;
        }
        self
    }
}

impl fmt::Display for ParseDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "at {}: {}", d.position, d.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseDiagnostics {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseDiagnostics> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit
                .parse()
                .map_err(|_| ParseDiagnostics::single(start, format!("malformed number `{lit}`")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()[]".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseDiagnostics::single(i, format!("unexpected character `{c}`")));
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    constants: &'a HashMap<String, f64>,
}

type PResult<T> = Result<T, ParseDiagnostics>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseDiagnostics {
        let found = match self.peek() {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        };
        ParseDiagnostics::single(self.offset(), format!("{}, found {found}", msg.into()))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Sym('^') {
            self.bump();
            let at = self.offset();
            let exponent = self.primary()?;
            let n = fold_constant(&exponent)
                .ok_or_else(|| ParseDiagnostics::single(at, "exponent must be a constant expression"))?;
            if n < 0.0 {
                return Err(ParseDiagnostics::single(
                    at,
                    format!("negative exponent {n}: write a division instead"),
                ));
            }
            if n.fract() != 0.0 || n > u32::MAX as f64 {
                return Err(ParseDiagnostics::single(
                    at,
                    format!("exponent {n} is not a non-negative integer"),
                ));
            }
            base = Expr::PowInt(Box::new(base), n as u32);
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Number(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(at, name)
            }
            _ => Err(self.error("expected a number, name or `(`")),
        }
    }

    fn identifier(&mut self, at: usize, name: String) -> PResult<Expr> {
        if name == "D" && *self.peek() == Tok::Sym('[') {
            self.bump();
            let axis_at = self.offset();
            let axis = match self.bump() {
                Tok::Ident(s) => DerivAxis::from_suffix(&s),
                _ => None,
            }
            .ok_or_else(|| ParseDiagnostics::single(axis_at, "expected derivative axis t, x, tt, xx or tx"))?;
            self.expect(']')?;
            self.expect('(')?;
            let inner = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::Deriv(axis, Box::new(inner)));
        }
        if *self.peek() == Tok::Sym('(') {
            let func: AnalyticFn = name
                .parse()
                .map_err(|_| ParseDiagnostics::single(at, format!("unknown function `{name}`")))?;
            self.bump();
            let arg = self.expr()?;
            self.expect(')')?;
            return Ok(Expr::Func(func, Box::new(arg)));
        }
        if let Some(&value) = self.constants.get(&name) {
            return Ok(Expr::Const { name, value });
        }
        match name.as_str() {
            "t" => return Ok(Expr::Var(Axis::T)),
            "x" => return Ok(Expr::Var(Axis::X)),
            "pi" => {
                return Ok(Expr::Const {
                    name,
                    value: std::f64::consts::PI,
                })
            }
            _ => {}
        }
        if let Some((base, suffix)) = name.rsplit_once('_') {
            if let (false, Some(axis)) = (base.is_empty(), DerivAxis::from_suffix(suffix)) {
                return Ok(Expr::DerivRef {
                    name: base.to_string(),
                    axis,
                });
            }
        }
        Ok(Expr::StateRef(name))
    }
}

/// Evaluates an expression built only from numbers, constants and
/// arithmetic; `None` if it mentions variables or state.
pub fn fold_constant(e: &Expr) -> Option<f64> {
    Some(match e {
        Expr::Number(v) => *v,
        Expr::Const { value, .. } => *value,
        Expr::Neg(a) => -fold_constant(a)?,
        Expr::Add(a, b) => fold_constant(a)? + fold_constant(b)?,
        Expr::Sub(a, b) => fold_constant(a)? - fold_constant(b)?,
        Expr::Mul(a, b) => fold_constant(a)? * fold_constant(b)?,
        Expr::Div(a, b) => fold_constant(a)? / fold_constant(b)?,
        Expr::PowInt(a, n) => fold_constant(a)?.powi(*n as i32),
        Expr::Func(f, a) => f.apply(fold_constant(a)?),
        _ => return None,
    })
}

/// Parses an expression. Names found in `constants` become [`Expr::Const`];
/// `t` and `x` are the coordinates; `pi` is predefined; `name_x`-style
/// identifiers are derivative references; other names are state variables.
pub fn parse_expr(text: &str, constants: &HashMap<String, f64>) -> Result<Expr, ParseDiagnostics> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        constants,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}
