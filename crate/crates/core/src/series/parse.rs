//! Literal syntax for coefficients, field elements and series:
//! sums of products like `3*pi^2*w + (1+p)*T^2*z1`, where `pi` is the
//! uniformizer, `w` the unramified generator and `p` the prime.

use std::sync::Arc;

use super::model::AlgebraModel;
use super::series::AdicSeries;
use crate::error::{Error, Result};
use crate::linalg::Ring;
use crate::padic::{PadicContext, PadicElement, PadicNumber};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i128),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i128),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[st..i].iter().collect();
            let v = txt
                .parse::<i128>()
                .map_err(|_| Error::arg(format!("integer {txt} out of range")))?;
            out.push((Tok::Int(v), st));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[st..i].iter().collect()), st));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::arg(format!("unexpected character {c:?} at offset {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(usize::MAX, |t| t.1)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn err(&self, what: &str) -> Error {
        if self.pos >= self.toks.len() {
            Error::arg(format!("{what} at end of input"))
        } else {
            Error::arg(format!("{what} at offset {}", self.offset()))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
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

    fn term(&mut self) -> Result<Expr> {
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

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let k = match self.peek() {
                Some(Tok::Int(k)) => *k as i64,
                _ => return Err(self.err("expected an integer exponent")),
            };
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Ident(s))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr> {
        let mut p = Parser { toks: lex(s)?, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

fn constant_ident(ctx: &Arc<PadicContext>, name: &str) -> Option<PadicElement> {
    match name {
        "pi" => Some(PadicElement::pi(ctx)),
        "w" => Some(PadicElement::omega(ctx)),
        "p" => Some(PadicElement::from_int(ctx, ctx.p() as i64)),
        _ => None,
    }
}

fn to_number(ctx: &Arc<PadicContext>, e: &Expr) -> Result<PadicNumber> {
    Ok(match e {
        Expr::Int(v) => PadicElement::from_i128(ctx, *v).into(),
        Expr::Ident(s) => constant_ident(ctx, s)
            .ok_or_else(|| Error::arg(format!("unknown identifier {s:?}")))?
            .into(),
        Expr::Neg(a) => to_number(ctx, a)?.neg(),
        Expr::Add(a, b) => &to_number(ctx, a)? + &to_number(ctx, b)?,
        Expr::Sub(a, b) => &to_number(ctx, a)? - &to_number(ctx, b)?,
        Expr::Mul(a, b) => &to_number(ctx, a)? * &to_number(ctx, b)?,
        Expr::Div(a, b) => to_number(ctx, a)?.div(&to_number(ctx, b)?)?,
        Expr::Pow(a, k) => match &**a {
            // π^k is exact for any k
            Expr::Ident(s) if s == "pi" => PadicNumber::pi_pow(ctx, *k),
            _ => to_number(ctx, a)?.pow(*k)?,
        },
    })
}

/// A field element of E.
pub fn parse_number(ctx: &Arc<PadicContext>, s: &str) -> Result<PadicNumber> {
    to_number(ctx, &Expr::parse(s)?)
}

/// An integral element of E.
pub fn parse_element(ctx: &Arc<PadicContext>, s: &str) -> Result<PadicElement> {
    parse_number(ctx, s)?
        .to_integral()
        .map_err(|_| Error::arg(format!("{s:?} is not integral")))
}

fn to_series(model: &Arc<AlgebraModel>, e: &Expr) -> Result<AdicSeries> {
    let ctx = model.base();
    Ok(match e {
        Expr::Int(v) => AdicSeries::constant(model, &PadicElement::from_i128(ctx, *v)),
        Expr::Ident(s) => {
            if model.var_index(s).is_some() {
                AdicSeries::var(model, s)?
            } else {
                let c = constant_ident(ctx, s).ok_or_else(|| Error::arg(format!("unknown identifier {s:?}")))?;
                AdicSeries::constant(model, &c)
            }
        }
        Expr::Neg(a) => to_series(model, a)?.negate(),
        Expr::Add(a, b) => to_series(model, a)?.plus(&to_series(model, b)?),
        Expr::Sub(a, b) => to_series(model, a)?.minus(&to_series(model, b)?),
        Expr::Mul(a, b) => to_series(model, a)?.times(&to_series(model, b)?),
        Expr::Div(a, b) => {
            let d = to_number(ctx, b).map_err(|_| Error::arg("only division by constants is allowed in series"))?;
            let inv = d.inverse()?.to_integral()?;
            to_series(model, a)?.scale(&inv)
        }
        Expr::Pow(a, k) => {
            if *k < 0 {
                return Err(Error::arg("negative exponents are not allowed in series"));
            }
            to_series(model, a)?.pow(*k as u32)
        }
    })
}

/// A series on the given model.
pub fn parse_series(model: &Arc<AlgebraModel>, s: &str) -> Result<AdicSeries> {
    to_series(model, &Expr::parse(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        assert_eq!(parse_element(&ctx, "2 + 3*5").unwrap(), PadicElement::from_int(&ctx, 17));
        let x = parse_number(&ctx, "p^-1").unwrap();
        assert_eq!(x.valuation(), Ok(-1));
        assert!(parse_element(&ctx, "1/5").is_err());
        assert_eq!(parse_element(&ctx, "1/2").unwrap(), PadicElement::from_fraction(&ctx, 1, 2).unwrap());
        assert!(parse_element(&ctx, "2 +").is_err());
        assert!(parse_element(&ctx, "x").is_err());
    }

    #[test]
    fn series_literals() {
        let ctx = PadicContext::qp(3, 8).unwrap();
        let model = AlgebraModel::disc(&ctx, &["z"], &["T"], 4).unwrap();
        let f = parse_series(&model, "1 + T").unwrap();
        let g = parse_series(&model, "(1+T)^2 - 2*T - T^2").unwrap();
        assert_eq!(g, AdicSeries::from_int(&model, 1));
        assert_eq!(f.times(&f), parse_series(&model, "1 + 2*T + T^2").unwrap());
        let h = parse_series(&model, "pi^2*z*T^5").unwrap();
        assert!(h.is_zero_series());
    }
}
