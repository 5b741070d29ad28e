//! Truncated Laurent series Σ c_k π^k over F_q with precision tracking.
//!
//! The same type serves K∞ = F_q((1/θ)) (π = 1/θ) and the Kummer base
//! F_q((σ)) with σ = 1/s. Every value knows the absolute precision below
//! which its coefficients are exact, and a cap beyond which no precision
//! is ever carried.

use std::fmt;

use super::fq::Fq;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Laurent {
    field: Fq,
    start: i64,
    coeffs: Vec<u8>,
    prec: i64,
    cap: i64,
    /// The value is exactly the stored finite sum (no truncation error).
    exact: bool,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show("x"))
    }
}

impl PartialEq for Laurent {
    /// Equality of all coefficients below the smaller precision.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.sub(other).is_zero()
    }
}

impl Laurent {
    fn normalized(field: Fq, start: i64, mut coeffs: Vec<u8>, prec: i64, cap: i64, exact: bool) -> Self {
        let prec = if exact { cap } else { prec.min(cap) };
        let keep = (prec - start).clamp(0, coeffs.len() as i64) as usize;
        let exact = exact && coeffs[keep..].iter().all(|&c| c == 0);
        coeffs.truncate(keep);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|&c| c != 0).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let start = if coeffs.is_empty() { prec } else { start + lead as i64 };
        Laurent { field, start, coeffs, prec, cap, exact }
    }

    /// The zero series known to precision `prec`.
    pub fn zero(field: &Fq, prec: i64) -> Self {
        Laurent { field: field.clone(), start: prec, coeffs: vec![], prec, cap: prec, exact: false }
    }

    /// Zero with an explicit precision (exact when it reaches the cap).
    pub fn zero_with_cap(field: &Fq, prec: i64, cap: i64) -> Self {
        let p = prec.min(cap);
        Laurent { field: field.clone(), start: p, coeffs: vec![], prec: p, cap, exact: prec >= cap }
    }

    /// c·π^k, exact up to the cap.
    pub fn monomial(field: &Fq, c: u8, k: i64, cap: i64) -> Self {
        Self::from_terms(field, &[(k, c)], cap)
    }

    pub fn one(field: &Fq, cap: i64) -> Self {
        Self::monomial(field, 1, 0, cap)
    }

    /// Sum of the given terms; exact up to the cap.
    pub fn from_terms(field: &Fq, terms: &[(i64, u8)], cap: i64) -> Self {
        Self::build(field, terms, cap, cap, true)
    }

    /// Sum of the given terms, known only modulo π^prec.
    pub fn from_terms_prec(field: &Fq, terms: &[(i64, u8)], prec: i64, cap: i64) -> Self {
        Self::build(field, terms, prec, cap, false)
    }

    pub(crate) fn build(field: &Fq, terms: &[(i64, u8)], prec: i64, cap: i64, exact: bool) -> Self {
        let prec = if exact { cap } else { prec.min(cap) };
        let exact = exact && terms.iter().all(|&(k, c)| k < prec || c == 0);
        let lo = terms.iter().map(|t| t.0).filter(|&k| k < prec).min();
        let Some(lo) = lo else {
            let mut z = Self::zero_with_cap(field, prec, cap);
            z.exact = exact;
            return z;
        };
        let mut coeffs = vec![0u8; (prec - lo) as usize];
        for &(k, c) in terms {
            if k < prec {
                let i = (k - lo) as usize;
                coeffs[i] = field.add(coeffs[i], c);
            }
        }
        Self::normalized(field.clone(), lo, coeffs, prec, cap, exact)
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn cap(&self) -> i64 {
        self.cap
    }
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Apparent zero: no nonzero coefficient below the precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least exponent with a nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Valuation, or the precision for an apparent zero (a lower bound).
    pub fn val_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    /// Coefficient of π^k; zero outside the stored range. Callers must
    /// respect `prec`.
    pub fn coeff(&self, k: i64) -> u8 {
        if k < self.start || k >= self.start + self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[(k - self.start) as usize]
        }
    }

    pub fn leading(&self) -> Option<(i64, u8)> {
        self.valuation().map(|v| (v, self.coeffs[0]))
    }

    /// Nonzero terms (exponent, coefficient) in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u8)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Highest exponent carrying a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start + self.coeffs.len() as i64 - 1)
        }
    }

    /// Forgets exactness: the value is a truncation of a longer series.
    pub fn truncated(&self) -> Self {
        Laurent { exact: false, ..self.clone() }
    }

    /// Lowers the precision to `p` (never raises it).
    pub fn with_prec(&self, p: i64) -> Self {
        if self.exact && p >= self.cap {
            return self.clone();
        }
        Self::normalized(self.field.clone(), self.start, self.coeffs.clone(), p.min(self.prec), self.cap, false)
    }

    /// Changes the cap (precision is clamped to the new cap).
    pub fn with_cap(&self, cap: i64) -> Self {
        Self::normalized(self.field.clone(), self.start, self.coeffs.clone(), self.prec.min(cap), cap, self.exact)
    }

    /// Declares the value exact up to its cap (for values known to be
    /// polynomial in 1/π, such as elements of F_q[θ]).
    pub fn exact(&self) -> Self {
        Self::normalized(self.field.clone(), self.start, self.coeffs.clone(), self.cap, self.cap, true)
    }

    pub fn add(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let prec = self.prec.min(o.prec).min(cap);
        let lo = self.start.min(o.start).min(prec);
        let mut coeffs = vec![0u8; (prec - lo) as usize];
        for (k, c) in self.terms().chain(o.terms()) {
            if k < prec {
                let i = (k - lo) as usize;
                coeffs[i] = self.field.add(coeffs[i], c);
            }
        }
        Self::normalized(self.field.clone(), lo, coeffs, prec, cap, self.exact && o.exact)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        Laurent { coeffs, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Multiplication by a constant of F_q.
    pub fn scale(&self, c: u8) -> Self {
        if c == 0 {
            return Self::zero_with_cap(&self.field, self.prec, self.cap);
        }
        let coeffs = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        Laurent { coeffs, ..self.clone() }
    }

    /// Multiplication by π^k (exact, raises precision by k up to the cap).
    pub fn shift(&self, k: i64) -> Self {
        Self::normalized(self.field.clone(), self.start + k, self.coeffs.clone(), self.prec + k, self.cap, self.exact)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let va = self.val_bound();
        let vb = o.val_bound();
        let exact = self.exact && o.exact;
        let prec = match (self.exact, o.exact) {
            (true, true) => cap,
            (true, false) => o.prec + va,
            (false, true) => self.prec + vb,
            _ => (self.prec + vb).min(o.prec + va),
        }
        .min(cap);
        if (self.exact && self.is_zero()) || (o.exact && o.is_zero()) {
            return Self::zero_with_cap(&self.field, cap, cap);
        }
        if self.is_zero() || o.is_zero() {
            return Self::zero_with_cap(&self.field, prec, cap);
        }
        let lo = va + vb;
        let f = &self.field;
        if exact {
            // full product, truncated at the cap by `normalized`
            let n = self.coeffs.len() + o.coeffs.len() - 1;
            let mut out = vec![0u8; n];
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in o.coeffs.iter().enumerate() {
                    if b != 0 {
                        out[i + j] = f.add(out[i + j], f.mul(a, b));
                    }
                }
            }
            return Self::normalized(f.clone(), lo, out, cap, cap, true);
        }
        if prec <= lo {
            return Self::zero_with_cap(&self.field, prec, cap);
        }
        let n = (prec - lo) as usize;
        let mut out = vec![0u8; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(n - i) {
                if b != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Self::normalized(f.clone(), lo, out, prec, cap, false)
    }

    pub fn inv(&self) -> Result<Self> {
        let Some((v, c0)) = self.leading() else {
            return Err(Error::DivisionByZero { prec: self.prec });
        };
        let f = &self.field;
        let rel = (self.prec - v).min(self.cap + v).max(0) as usize;
        let ic = f.inv(c0)?;
        let mut b = vec![0u8; rel];
        if rel > 0 {
            b[0] = ic;
        }
        for k in 1..rel {
            let mut s = 0u8;
            for i in 1..=k.min(self.coeffs.len() - 1) {
                s = f.add(s, f.mul(self.coeffs[i], b[k - i]));
            }
            b[k] = f.neg(f.mul(ic, s));
        }
        let mono = self.exact && self.coeffs.len() == 1;
        Ok(Self::normalized(f.clone(), -v, b, -v + (self.prec - v), self.cap, mono))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// The q-power map x ↦ x^q (coefficients lie in F_q, so only exponents move).
    pub fn frob(&self) -> Self {
        self.frob_pow(1)
    }

    /// x ↦ x^{q^k}.
    pub fn frob_pow(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let m = (self.field.q() as i64).pow(k);
        let prec = if self.exact { self.cap } else { self.prec.saturating_mul(m).min(self.cap) };
        let terms: Vec<(i64, u8)> = self.terms().map(|(e, c)| (e * m, c)).collect();
        Self::build(&self.field, &terms, prec, self.cap, self.exact)
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut r = Self::one(&self.field, self.cap);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Integer power, negative exponents through `inv`.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inv()?.pow((-n) as u64))
        }
    }

    /// Part with exponents < k (exact as a finite sum).
    pub fn below(&self, k: i64) -> Self {
        let terms: Vec<(i64, u8)> = self.terms().filter(|t| t.0 < k).collect();
        Self::from_terms(&self.field, &terms, self.cap)
    }

    /// Part with exponents ≥ k, keeping the precision.
    pub fn at_or_above(&self, k: i64) -> Self {
        let terms: Vec<(i64, u8)> = self.terms().filter(|t| t.0 >= k).collect();
        Self::build(&self.field, &terms, self.prec, self.cap, self.exact)
    }

    /// Renders with the given variable name for π.
    pub fn show(&self, var: &str) -> String {
        let mut parts: Vec<String> = self
            .terms()
            .map(|(k, c)| {
                let cs = self.field.show(c);
                match k {
                    0 => cs,
                    1 => format!("{cs}*{var}"),
                    _ => format!("{cs}*{var}^{k}"),
                }
            })
            .collect();
        parts.push(format!("O({var}^{})", self.prec));
        parts.join(" + ")
    }

    /// Coefficient dump for reports: (first exponent, coefficients, precision).
    pub fn dump(&self) -> (i64, Vec<u8>, i64) {
        (self.start, self.coeffs.clone(), self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn inverse_pair() {
        let f = f3();
        let pi = Laurent::monomial(&f, 1, 1, 64);
        let th = Laurent::monomial(&f, 1, -1, 64);
        assert_eq!(pi.mul(&th), Laurent::one(&f, 64));
        assert_eq!(th.inv().unwrap(), pi);
    }

    #[test]
    fn geometric_series() {
        let f = f3();
        let a = Laurent::from_terms(&f, &[(0, 1), (1, 2)], 64); // 1 - 1/θ
        let inv = a.inv().unwrap();
        assert_eq!(inv.prec(), 64);
        for k in 0..64 {
            assert_eq!(inv.coeff(k), 1);
        }
        assert_eq!(inv.mul(&a), Laurent::one(&f, 64));
    }

    #[test]
    fn leading_term_valuation() {
        let f = f3();
        let a = Laurent::from_terms(&f, &[(-2, 1), (-1, 1)], 64); // θ² + θ
        assert_eq!(a.valuation(), Some(-2));
    }

    #[test]
    fn precision_propagation() {
        let f = f3();
        let a = Laurent::from_terms_prec(&f, &[(0, 1)], 10, 64);
        let th = Laurent::monomial(&f, 1, -3, 64);
        assert_eq!(a.mul(&th).prec(), 7);
        assert_eq!(a.frob().prec(), 30);
        let b = Laurent::from_terms_prec(&f, &[(2, 1)], 10, 64);
        assert_eq!(b.inv().unwrap().prec(), 6);
    }

    #[test]
    fn division_by_apparent_zero() {
        let f = f3();
        let z = Laurent::zero(&f, 10);
        assert!(matches!(z.inv(), Err(Error::DivisionByZero { .. })));
    }
}
