//! Polynomials in F_q[t, θ], sparse.
//!
//! t is the coefficient variable (fixed by τ) and θ the base variable
//! (τ raises it to the q-th power). j = t − θ generates the diagonal ideal.

use std::collections::BTreeMap;
use std::fmt;

use super::upoly::Poly;
use crate::field_tower::Fq;

#[derive(Clone)]
pub struct Poly2 {
    field: Fq,
    /// (t-degree, θ-degree) ↦ coefficient, zero coefficients never stored.
    terms: BTreeMap<(u32, u32), u8>,
}

impl PartialEq for Poly2 {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.terms == o.terms
    }
}
impl Eq for Poly2 {}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show())
    }
}

impl Poly2 {
    pub fn zero(field: &Fq) -> Self {
        Poly2 { field: field.clone(), terms: BTreeMap::new() }
    }
    pub fn monomial(field: &Fq, c: u8, a: u32, b: u32) -> Self {
        let mut p = Self::zero(field);
        if c != 0 {
            p.terms.insert((a, b), c);
        }
        p
    }
    pub fn constant(field: &Fq, c: u8) -> Self {
        Self::monomial(field, c, 0, 0)
    }
    pub fn one(field: &Fq) -> Self {
        Self::constant(field, 1)
    }
    pub fn t(field: &Fq) -> Self {
        Self::monomial(field, 1, 1, 0)
    }
    pub fn theta(field: &Fq) -> Self {
        Self::monomial(field, 1, 0, 1)
    }
    /// j = t − θ.
    pub fn j(field: &Fq) -> Self {
        Self::t(field).sub(&Self::theta(field))
    }
    pub fn from_terms(field: &Fq, terms: &[((u32, u32), u8)]) -> Self {
        let mut p = Self::zero(field);
        for &(k, c) in terms {
            p.add_term(k, c);
        }
        p
    }
    /// Embeds a polynomial in θ.
    pub fn from_theta_poly(p: &Poly) -> Self {
        let f = p.field();
        let mut r = Self::zero(f);
        for (i, &c) in p.coeffs().iter().enumerate() {
            r.add_term((0, i as u32), c);
        }
        r
    }
    /// Embeds a polynomial in t.
    pub fn from_t_poly(p: &Poly) -> Self {
        let f = p.field();
        let mut r = Self::zero(f);
        for (i, &c) in p.coeffs().iter().enumerate() {
            r.add_term((i as u32, 0), c);
        }
        r
    }

    fn add_term(&mut self, k: (u32, u32), c: u8) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(k).or_insert(0);
        *e = self.field.add(*e, c);
        if *e == 0 {
            self.terms.remove(&k);
        }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), u8)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }
    pub fn coeff(&self, a: u32, b: u32) -> u8 {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }
    pub fn deg_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }
    pub fn deg_theta(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }
    pub fn is_free_of_t(&self) -> bool {
        self.terms.keys().all(|k| k.0 == 0)
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (&k, &c) in &o.terms {
            r.add_term(k, c);
        }
        r
    }
    pub fn neg(&self) -> Poly2 {
        Poly2 {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&k, &c)| (k, self.field.neg(c))).collect(),
        }
    }
    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: u8) -> Poly2 {
        let mut r = Self::zero(&self.field);
        for (&k, &x) in &self.terms {
            r.add_term(k, self.field.mul(x, c));
        }
        r
    }
    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut r = Self::zero(&self.field);
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &o.terms {
                r.add_term((a1 + a2, b1 + b2), self.field.mul(c1, c2));
            }
        }
        r
    }
    pub fn pow(&self, n: u32) -> Poly2 {
        let mut r = Self::one(&self.field);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
    /// Multiplication by t^a θ^b.
    pub fn shift(&self, a: u32, b: u32) -> Poly2 {
        Poly2 {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(x, y), &c)| ((x + a, y + b), c)).collect(),
        }
    }

    /// τ: θ ↦ θ^q, t fixed.
    pub fn tau(&self) -> Poly2 {
        let q = self.field.q() as u32;
        Poly2 {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(a, b), &c)| ((a, b * q), c)).collect(),
        }
    }

    /// Coefficients in F_q[θ] of the expansion in j = t − θ (t = θ + j).
    pub fn to_j_expansion(&self) -> Vec<Poly> {
        let f = &self.field;
        let n = self.deg_t().map(|d| d as usize + 1).unwrap_or(0);
        let mut out: Vec<BTreeMap<u32, u8>> = vec![BTreeMap::new(); n];
        for (&(a, b), &c) in &self.terms {
            // t^a = Σ_i C(a,i) θ^{a−i} j^i
            for i in 0..=a {
                let bc = f.binom(a as u64, i as u64);
                if bc == 0 {
                    continue;
                }
                let e = out[i as usize].entry(b + a - i).or_insert(0);
                *e = f.add(*e, f.mul(bc, c));
            }
        }
        let mut v: Vec<Poly> = out
            .into_iter()
            .map(|m| {
                let d = m.keys().max().map(|&x| x as usize + 1).unwrap_or(0);
                let mut cs = vec![0u8; d];
                for (k, c) in m {
                    cs[k as usize] = c;
                }
                Poly::new(f, cs)
            })
            .collect();
        while v.last().map(|p| p.is_zero()) == Some(true) {
            v.pop();
        }
        v
    }

    /// Inverse of `to_j_expansion`.
    pub fn from_j_expansion(field: &Fq, coeffs: &[Poly]) -> Poly2 {
        let j = Self::j(field);
        let mut r = Self::zero(field);
        let mut jp = Self::one(field);
        for c in coeffs {
            r = r.add(&Self::from_theta_poly(c).mul(&jp));
            jp = jp.mul(&j);
        }
        r
    }

    /// Order of vanishing along t = θ (None for zero).
    pub fn j_valuation(&self) -> Option<usize> {
        self.to_j_expansion().iter().position(|p| !p.is_zero())
    }

    /// Exact division by j^k; None if not divisible.
    pub fn div_j(&self, k: usize) -> Option<Poly2> {
        let e = self.to_j_expansion();
        if e.iter().take(k).any(|p| !p.is_zero()) {
            return None;
        }
        Some(Self::from_j_expansion(&self.field, e.get(k..).unwrap_or(&[])))
    }

    /// Substitutes t = c ∈ F_q, giving a polynomial in θ.
    pub fn subst_t(&self, c: u8) -> Poly {
        let f = &self.field;
        let mut r = Poly::zero(f);
        for (&(a, b), &x) in &self.terms {
            r = r.add(&Poly::monomial(f, f.mul(x, f.pow(c, a as i64)), b as usize));
        }
        r
    }

    /// Coefficients in F_q[θ] of each power of t.
    pub fn t_coefficients(&self) -> Vec<Poly> {
        let f = &self.field;
        let n = self.deg_t().map(|d| d as usize + 1).unwrap_or(0);
        let mut out = vec![Poly::zero(f); n];
        for (&(a, b), &c) in &self.terms {
            out[a as usize] = out[a as usize].add(&Poly::monomial(f, c, b as usize));
        }
        out
    }

    /// Canonical text form in the variables `t` and `th`.
    pub fn show(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(a, b), &c)| {
                let mut factors = Vec::new();
                if c != 1 || (a == 0 && b == 0) {
                    factors.push(format!("{}", c));
                }
                match a {
                    0 => {}
                    1 => factors.push("t".into()),
                    _ => factors.push(format!("t^{a}")),
                }
                match b {
                    0 => {}
                    1 => factors.push("th".into()),
                    _ => factors.push(format!("th^{b}")),
                }
                factors.join("*")
            })
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_expansion_round_trip() {
        let f = Fq::new(3, 1).unwrap();
        let p = Poly2::from_terms(&f, &[((2, 1), 1), ((0, 3), 2), ((1, 0), 1)]);
        let e = p.to_j_expansion();
        assert_eq!(Poly2::from_j_expansion(&f, &e), p);
    }

    #[test]
    fn j_division() {
        let f = Fq::new(2, 1).unwrap();
        let j = Poly2::j(&f);
        let p = Poly2::from_terms(&f, &[((1, 1), 1), ((0, 0), 1)]);
        let pj = p.mul(&j).mul(&j);
        assert_eq!(pj.j_valuation(), Some(2));
        assert_eq!(pj.div_j(2).unwrap(), p);
        assert!(p.div_j(1).is_none());
    }

    #[test]
    fn tau_raises_theta() {
        let f = Fq::new(3, 1).unwrap();
        let p = Poly2::from_terms(&f, &[((1, 1), 1)]);
        assert_eq!(p.tau(), Poly2::from_terms(&f, &[((1, 3), 1)]));
    }
}
