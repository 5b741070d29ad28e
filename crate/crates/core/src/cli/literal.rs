//! Polynomial literals in `t` and `th` with integer coefficients, operators
//! `+ - * ^` and parentheses. Negative exponents are allowed only on powers
//! of `(t-th)`.

use crate::error::{Error, Result};
use crate::field_tower::Fq;
use crate::motive::TauEntry;
use crate::poly::Poly2;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    T,
    Th,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

/// Tokens with their 0-based offsets in the literal.
fn lex(s: &str) -> std::result::Result<Vec<(Tok, usize)>, (usize, String)> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let n = s[start..i].parse::<i64>().map_err(|_| (start, "integer literal too large".to_string()))?;
                out.push((Tok::Int(n), start));
                continue;
            }
            b't' => {
                if b.get(i + 1) == Some(&b'h') {
                    i += 1;
                    Tok::Th
                } else {
                    Tok::T
                }
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => return Err((start, format!("unexpected character {:?}", c as char))),
        };
        i += 1;
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'a> {
    f: &'a Fq,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.1)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> PResult<TauEntry> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<TauEntry> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> PResult<TauEntry> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> PResult<TauEntry> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let k = match self.bump() {
            Some(Tok::Int(k)) => k,
            _ => return Err((self.offset().min(self.len), "expected an integer exponent".into())),
        };
        let k = if neg { -k } else { k };
        if k >= 0 {
            let mut r = TauEntry::one(self.f);
            for _ in 0..k {
                r = r.mul(&base);
            }
            return Ok(r);
        }
        // only (t−θ)^e may be inverted
        if base.num == Poly2::one(self.f) && base.e != 0 {
            return Ok(TauEntry::jpow(self.f, base.e * k));
        }
        Err((at, "negative exponents are only allowed on (t-th)".into()))
    }

    fn atom(&mut self) -> PResult<TauEntry> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(TauEntry::from_poly(Poly2::constant(self.f, self.f.from_int(n)))),
            Some(Tok::T) => Ok(TauEntry::from_poly(Poly2::t(self.f))),
            Some(Tok::Th) => Ok(TauEntry::from_poly(Poly2::theta(self.f))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    return Err((self.offset().min(self.len), "expected ')'".into()));
                }
                Ok(e)
            }
            Some(t) => Err((at, format!("unexpected token {t:?}"))),
            None => Err((self.len, "unexpected end of literal".into())),
        }
    }
}

/// Parses a literal; errors carry the 0-based offset within `s`.
pub fn parse_literal_at(f: &Fq, s: &str) -> std::result::Result<TauEntry, (usize, String)> {
    let toks = lex(s)?;
    let mut p = Parser { f, toks, pos: 0, len: s.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err((p.offset(), "trailing input".into()));
    }
    Ok(e)
}

/// Parses a literal as an element of K[t][(t−θ)^{−1}].
pub fn parse_literal(f: &Fq, s: &str) -> Result<TauEntry> {
    parse_literal_at(f, s).map_err(|(off, msg)| Error::Parse { line: 1, col: off + 1, msg })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let f = Fq::new(3, 1).unwrap();
        assert_eq!(parse_literal(&f, "(t-th)^-1").unwrap(), TauEntry::jpow(&f, -1));
        assert_eq!(parse_literal(&f, "t - th").unwrap(), TauEntry::jpow(&f, 1));
        assert_eq!(parse_literal(&f, "4*t").unwrap(), TauEntry::from_poly(Poly2::t(&f)));
        let x = parse_literal(&f, "(th + 2*t^2)*(t-th)^-3").unwrap();
        assert_eq!(parse_literal(&f, &x.show()).unwrap(), x);
    }

    #[test]
    fn errors_carry_columns() {
        let f = Fq::new(3, 1).unwrap();
        match parse_literal(&f, "t^-1") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 2),
            e => panic!("{e:?}"),
        }
        match parse_literal(&f, "t + $") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 5),
            e => panic!("{e:?}"),
        }
    }
}
