//! Recursive-descent parser for polynomial input.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' UINT)?
//! atom   := UINT | 't' | GEN | VAR | '(' expr ')'
//! VAR    := 'x' UINT
//! ```
//!
//! Integer literals reduce into GF(p), `t` is the uniformizer and `GEN` the
//! field generator symbol (`g` by default, only when e > 1). Whitespace is
//! insignificant.

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::ring::{OElem, RingCtx};

/// Largest accepted exponent literal.
pub const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Uint(String),
    T,
    Gen,
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer;

impl Lexer {
    fn tokenize(text: &str, ctx: &RingCtx, n: usize) -> Result<Vec<(Tok, usize)>> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        let gen_sym = ctx.field().generator_symbol();
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'+' => out.push((Tok::Plus, start)),
                b'-' => out.push((Tok::Minus, start)),
                b'*' => out.push((Tok::Star, start)),
                b'^' => out.push((Tok::Caret, start)),
                b'(' => out.push((Tok::LParen, start)),
                b')' => out.push((Tok::RParen, start)),
                b'0'..=b'9' => {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push((Tok::Uint(text[start..i].to_string()), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() => {
                    while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    let word = &text[start..i];
                    let tok = if word == "x" {
                        let ds = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        let idx: usize = text[ds..i].parse().unwrap_or(0);
                        if idx == 0 || idx > n {
                            return Err(Error::UnknownVariable {
                                name: text[start..i].to_string(),
                                pos: start,
                            });
                        }
                        Tok::Var(idx - 1)
                    } else if word == "t" {
                        Tok::T
                    } else if word == gen_sym && ctx.field().e() > 1 {
                        Tok::Gen
                    } else {
                        return Err(Error::UnknownVariable { name: word.to_string(), pos: start });
                    };
                    out.push((tok, start));
                    continue;
                }
                _ => {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                    })
                }
            }
            i += 1;
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ctx: &'a RingCtx,
    n: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn syntax<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<MPoly> {
        let negate = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly> {
        let is_t = self.peek() == Some(&Tok::T);
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Tok::Uint(s)) => {
                let e: u32 = s
                    .parse()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| Error::Syntax {
                        pos: self.offset(),
                        msg: format!("exponent exceeds {MAX_EXPONENT}"),
                    })?;
                self.pos += 1;
                Ok(base.pow(e))
            }
            Some(Tok::Minus) if is_t => Err(Error::NonIntegralCoefficient { pos: self.offset() }),
            Some(Tok::Minus) => self.syntax("negative exponents are not allowed"),
            _ => self.syntax("expected an unsigned exponent"),
        }
    }

    fn atom(&mut self) -> Result<MPoly> {
        let ctx = self.ctx;
        let n = self.n;
        let out = match self.peek().cloned() {
            Some(Tok::Uint(s)) => {
                let p = ctx.field().p() as u64;
                let v = s.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                MPoly::constant(ctx, n, ctx.from_int(v as i64))
            }
            Some(Tok::T) => MPoly::constant(ctx, n, ctx.t_pow(1)),
            Some(Tok::Gen) => {
                MPoly::constant(ctx, n, ctx.from_field(ctx.field().generator().unwrap()))
            }
            Some(Tok::Var(i)) => MPoly::var(ctx, n, i),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.syntax("expected `)`");
                }
                inner
            }
            Some(_) => return self.syntax("expected a number, `t`, a variable or `(`"),
            None => return self.syntax("unexpected end of input"),
        };
        self.pos += 1;
        Ok(out)
    }
}

/// Parse a polynomial in `n` variables at the context's full precision.
pub fn parse_poly(text: &str, ctx: &RingCtx, n: usize) -> Result<MPoly> {
    let toks = Lexer::tokenize(text, ctx, n)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), ctx, n };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}

/// Parse a ring element such as `1 + 2*t` (no variables).
pub fn parse_elem(text: &str, ctx: &RingCtx) -> Result<OElem> {
    Ok(parse_poly(text, ctx, 0)?.constant_term())
}
