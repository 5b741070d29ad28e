//! Univariate polynomials over F_q (used for F_q[t] and F_q[θ]).

use std::fmt;

use crate::error::{Error, Result};
use crate::field_tower::Fq;

#[derive(Clone)]
pub struct Poly {
    field: Fq,
    coeffs: Vec<u8>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.coeffs == o.coeffs
    }
}
impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show("x"))
    }
}

impl Poly {
    pub fn new(field: &Fq, mut coeffs: Vec<u8>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }
    pub fn zero(field: &Fq) -> Self {
        Poly { field: field.clone(), coeffs: vec![] }
    }
    pub fn constant(field: &Fq, c: u8) -> Self {
        Self::new(field, vec![c])
    }
    pub fn one(field: &Fq) -> Self {
        Self::constant(field, 1)
    }
    pub fn monomial(field: &Fq, c: u8, d: usize) -> Self {
        let mut v = vec![0u8; d + 1];
        v[d] = c;
        Self::new(field, v)
    }
    pub fn x(field: &Fq) -> Self {
        Self::monomial(field, 1, 1)
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }
    /// Degree with deg 0 = −∞ encoded as −1.
    pub fn degi(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }
    pub fn lc(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.field.add(self.coeff(i), o.coeff(i))).collect();
        Poly::new(&self.field, v)
    }
    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: u8) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect())
    }
    /// Multiplication by x^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0u8; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(&self.field, v)
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![0u8; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, v)
    }
    pub fn pow(&self, n: u64) -> Poly {
        let mut r = Poly::one(&self.field);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero { prec: 0 });
        }
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        let il = f.inv(d.lc())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut qv = vec![0u8; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], il);
            if c == 0 {
                continue;
            }
            qv[k - dd] = c;
            for i in 0..=dd {
                r[k - dd + i] = f.sub(r[k - dd + i], f.mul(c, d.coeffs[i]));
            }
        }
        r.truncate(dd);
        Ok((Poly::new(f, qv), Poly::new(f, r)))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()).unwrap())
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).unwrap().1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, t) with s·self + t·o = g monic.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1).unwrap();
            let s = s0.sub(&qq.mul(&s1));
            let t = t0.sub(&qq.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let il = f.inv(r0.lc()).unwrap();
        (r0.scale(il), s0.scale(il), t0.scale(il))
    }

    pub fn eval(&self, x: u8) -> u8 {
        self.coeffs.iter().rev().fold(0u8, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    pub fn show(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let cs = self.field.show(c);
                match i {
                    0 => cs,
                    1 if c == 1 => var.to_string(),
                    1 => format!("{cs}*{var}"),
                    _ if c == 1 => format!("{var}^{i}"),
                    _ => format!("{cs}*{var}^{i}"),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let f = Fq::new(5, 1).unwrap();
        let a = Poly::new(&f, vec![1, 2, 3, 4, 1]);
        let b = Poly::new(&f, vec![2, 0, 1]);
        let (qq, r) = a.divrem(&b).unwrap();
        assert_eq!(qq.mul(&b).add(&r), a);
        assert!(r.deg().unwrap_or(0) < 2);
    }

    #[test]
    fn bezout() {
        let f = Fq::new(3, 1).unwrap();
        let a = Poly::new(&f, vec![1, 0, 1]).mul(&Poly::new(&f, vec![1, 1]));
        let b = Poly::new(&f, vec![1, 1]).mul(&Poly::new(&f, vec![2, 1]));
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(g, Poly::new(&f, vec![1, 1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
