//! Recursive-descent parser for the equation grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | ident | '(' expr ')'
//! ```
//!
//! The unknown `y` is reserved; every other identifier becomes a parameter
//! variable. `/` is only legal between integer literals.

use super::{AlgebraicFamily, MultiPoly};
use crate::error::{Error, Result};
use crate::exact::GaussRat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let n: BigInt = text[i..j].parse().expect("digits");
                toks.push((Tok::Int(n), start));
                i = j;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push((Tok::Ident(text[i..j].to_string()), start));
                i = j;
            }
            _ => {
                return Err(Error::ParseSyntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                })
            }
        }
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn peek_pos(&self) -> usize {
        self.toks[self.pos].1
    }
    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
}

/// Polynomial in `y` with `MultiPoly` coefficients, ascending powers.
#[derive(Clone, Debug)]
struct PolyY {
    c: Vec<MultiPoly>,
    vars: Vec<String>,
}

impl PolyY {
    fn constant(vars: &[String], k: GaussRat) -> Self {
        PolyY {
            c: vec![MultiPoly::constant(vars.to_vec(), k)],
            vars: vars.to_vec(),
        }
    }
    fn yvar(vars: &[String]) -> Self {
        PolyY {
            c: vec![MultiPoly::zero(vars.to_vec()), MultiPoly::one(vars.to_vec())],
            vars: vars.to_vec(),
        }
    }
    fn xvar(vars: &[String], idx: usize) -> Self {
        PolyY {
            c: vec![MultiPoly::var(vars.to_vec(), idx)],
            vars: vars.to_vec(),
        }
    }
    fn trim(mut self) -> Self {
        while self.c.len() > 1 && self.c.last().map(|p| p.is_zero()) == Some(true) {
            self.c.pop();
        }
        self
    }
    fn add(&self, o: &PolyY) -> PolyY {
        let len = self.c.len().max(o.c.len());
        let zero = MultiPoly::zero(self.vars.clone());
        let mut c = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.c.get(k).unwrap_or(&zero);
            let b = o.c.get(k).unwrap_or(&zero);
            c.push(a.add(b));
        }
        PolyY {
            c,
            vars: self.vars.clone(),
        }
        .trim()
    }
    fn neg(&self) -> PolyY {
        PolyY {
            c: self.c.iter().map(|p| p.neg()).collect(),
            vars: self.vars.clone(),
        }
    }
    fn sub(&self, o: &PolyY) -> PolyY {
        self.add(&o.neg())
    }
    fn mul(&self, o: &PolyY) -> PolyY {
        let zero = MultiPoly::zero(self.vars.clone());
        let mut c = vec![zero; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        PolyY {
            c,
            vars: self.vars.clone(),
        }
        .trim()
    }
    fn pow(&self, n: u32) -> PolyY {
        let mut acc = PolyY::constant(&self.vars, GaussRat::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

struct Parser<'a> {
    lx: Lexer,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn expr(&mut self) -> Result<PolyY> {
        let mut negate_first = false;
        if *self.lx.peek() == Tok::Minus {
            self.lx.next();
            negate_first = true;
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = acc.neg();
        }
        loop {
            match self.lx.peek() {
                Tok::Plus => {
                    self.lx.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.lx.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolyY> {
        let mut acc = self.factor()?;
        loop {
            match self.lx.peek() {
                Tok::Star => {
                    self.lx.next();
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Tok::Slash => {
                    let pos = self.lx.peek_pos();
                    return Err(Error::ParseNonPoly {
                        pos,
                        msg: "division is only allowed between integer literals".into(),
                    });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<PolyY> {
        let base = self.base()?;
        if *self.lx.peek() == Tok::Caret {
            self.lx.next();
            let (tok, pos) = self.lx.next();
            let Tok::Int(n) = tok else {
                return Err(Error::ParseSyntax {
                    pos,
                    msg: "exponent must be a nonnegative integer".into(),
                });
            };
            let e: u32 = n.try_into().map_err(|_| Error::ParseSyntax {
                pos,
                msg: "exponent too large".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<PolyY> {
        let (tok, pos) = self.lx.next();
        match tok {
            Tok::Int(n) => {
                // optional rational tail `/ int`
                if *self.lx.peek() == Tok::Slash {
                    self.lx.next();
                    let (dt, dpos) = self.lx.next();
                    match dt {
                        Tok::Int(d) => {
                            if d.is_zero() {
                                return Err(Error::ParseDivZero { pos: dpos });
                            }
                            let r = BigRational::new(n, d);
                            Ok(PolyY::constant(self.vars, GaussRat::from_real(r)))
                        }
                        Tok::Ident(_) => Err(Error::ParseNonPoly {
                            pos: dpos,
                            msg: "division by a variable".into(),
                        }),
                        _ => Err(Error::ParseSyntax {
                            pos: dpos,
                            msg: "expected integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(PolyY::constant(
                        self.vars,
                        GaussRat::from_real(BigRational::from_integer(n)),
                    ))
                }
            }
            Tok::Ident(name) => {
                if name == "y" {
                    Ok(PolyY::yvar(self.vars))
                } else {
                    let idx = self
                        .vars
                        .iter()
                        .position(|v| *v == name)
                        .expect("collected in first pass");
                    Ok(PolyY::xvar(self.vars, idx))
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (tok, pos) = self.lx.next();
                if tok != Tok::RParen {
                    return Err(Error::ParseSyntax {
                        pos,
                        msg: "expected `)`".into(),
                    });
                }
                Ok(inner)
            }
            Tok::Eof => Err(Error::ParseSyntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(Error::ParseSyntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse an equation text into an expanded [`AlgebraicFamily`].
///
/// The degree in `y` is detected automatically; parameter variables are the
/// remaining identifiers, in sorted order.
pub fn parse_family(text: &str) -> Result<AlgebraicFamily> {
    let toks = lex(text)?;
    let mut vars: Vec<String> = toks
        .iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) if s != "y" => Some(s.clone()),
            _ => None,
        })
        .collect();
    vars.sort();
    vars.dedup();

    let mut p = Parser {
        lx: Lexer { toks, pos: 0 },
        vars: &vars,
    };
    let poly = p.expr()?;
    let (tok, pos) = p.lx.next();
    if tok != Tok::Eof {
        return Err(Error::ParseSyntax {
            pos,
            msg: "trailing input".into(),
        });
    }
    let poly = poly.trim();
    if poly.c.len() < 2 {
        return Err(Error::ZeroDegreeInY);
    }
    let mut coeffs = poly.c;
    coeffs.reverse(); // descending: P_n first
    AlgebraicFamily::new(coeffs, vars)
}
