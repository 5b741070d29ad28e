//! Truncated Laurent series in j = t − θ over a coefficient field L.

use std::fmt;

use crate::error::{Error, Result};
use crate::field_tower::{Fq, Laurent};
use crate::poly::{Poly, Poly2};
use crate::tate::Coeff;

/// Precision marker of an exactly known series.
pub const EXACT: i64 = i64::MAX / 4;

/// Σ_{k ≥ v} c_k j^k, known modulo j^prec.
#[derive(Clone)]
pub struct JSeries<C: Coeff> {
    zero: C,
    v: i64,
    coeffs: Vec<C>,
    prec: i64,
    /// Relative precision used when an infinite expansion is materialized.
    nj: i64,
}

impl<C: Coeff> fmt::Debug for JSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms().map(|(k, c)| format!("({c:?})j^{k}")).collect();
        if self.prec < EXACT {
            parts.push(format!("O(j^{})", self.prec));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coeff> JSeries<C> {
    fn normalized(zero: C, v: i64, mut coeffs: Vec<C>, prec: i64, nj: i64) -> Self {
        let keep = (prec.saturating_sub(v)).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let v = if coeffs.is_empty() { prec.min(EXACT) } else { v + lead as i64 };
        JSeries { zero, v, coeffs, prec, nj }
    }

    pub fn new(zero: C, v: i64, coeffs: Vec<C>, prec: i64, nj: i64) -> Self {
        Self::normalized(zero, v, coeffs, prec, nj)
    }
    pub fn zero(zero: C, nj: i64) -> Self {
        JSeries { zero, v: EXACT, coeffs: vec![], prec: EXACT, nj }
    }
    pub fn zero_prec(zero: C, prec: i64, nj: i64) -> Self {
        JSeries { zero, v: prec, coeffs: vec![], prec, nj }
    }
    /// c·j^k, exact.
    pub fn monomial(c: C, k: i64, nj: i64) -> Self {
        let z = c.zero_like();
        Self::normalized(z, k, vec![c], EXACT, nj)
    }
    pub fn constant(c: C, nj: i64) -> Self {
        Self::monomial(c, 0, nj)
    }
    pub fn one(like: &C, nj: i64) -> Self {
        Self::monomial(like.one_like(), 0, nj)
    }
    pub fn jpow(like: &C, k: i64, nj: i64) -> Self {
        Self::monomial(like.one_like(), k, nj)
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }
    pub fn fq(&self) -> &Fq {
        self.zero.fq()
    }
    pub fn nj(&self) -> i64 {
        self.nj
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.v)
        }
    }
    /// Lower bound for the valuation (the precision when apparently zero).
    pub fn val_bound(&self) -> i64 {
        self.v
    }
    pub fn coeff(&self, k: i64) -> C {
        if k < self.v || k - self.v >= self.coeffs.len() as i64 {
            return self.zero.clone();
        }
        self.coeffs[(k - self.v) as usize].clone()
    }
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.v + i as i64, c))
    }
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.v + self.coeffs.len() as i64 - 1)
    }

    pub fn with_prec(&self, p: i64) -> Self {
        Self::normalized(self.zero.clone(), self.v, self.coeffs.clone(), p.min(self.prec), self.nj)
    }
    pub fn with_nj(&self, nj: i64) -> Self {
        JSeries { nj, ..self.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let lo = self.v.min(o.v).min(prec);
        let hi = self.top().into_iter().chain(o.top()).max().map(|t| t + 1).unwrap_or(lo).min(prec).max(lo);
        let mut cs = vec![self.zero.clone(); (hi - lo) as usize];
        for (k, c) in self.terms().chain(o.terms()) {
            if k < hi {
                let i = (k - lo) as usize;
                cs[i] = cs[i].add(c);
            }
        }
        Self::normalized(self.zero.clone(), lo, cs, prec, self.nj.max(o.nj))
    }
    pub fn neg(&self) -> Self {
        JSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), ..self.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, a: u8) -> Self {
        Self::normalized(self.zero.clone(), self.v, self.coeffs.iter().map(|c| c.scale(a)).collect(), self.prec, self.nj)
    }
    pub fn mul_coeff(&self, a: &C) -> Self {
        Self::normalized(self.zero.clone(), self.v, self.coeffs.iter().map(|c| c.mul(a)).collect(), self.prec, self.nj)
    }
    /// Multiplication by j^k.
    pub fn shift(&self, k: i64) -> Self {
        let prec = if self.is_exact() { EXACT } else { self.prec + k };
        let v = if self.coeffs.is_empty() { prec } else { self.v + k };
        JSeries { v, prec, ..self.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let nj = self.nj.max(o.nj);
        let (va, vb) = (self.v, o.v);
        let prec = match (self.is_exact(), o.is_exact()) {
            (true, true) => EXACT,
            (true, false) => o.prec.saturating_add(va),
            (false, true) => self.prec.saturating_add(vb),
            (false, false) => (self.prec + vb).min(o.prec + va),
        };
        if self.is_zero() || o.is_zero() {
            return Self::zero_prec(self.zero.clone(), prec.min(EXACT), nj);
        }
        let lo = va + vb;
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = ((prec - lo).max(0) as usize).min(full);
        let mut cs = vec![self.zero.clone(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (k, b) in o.coeffs.iter().enumerate() {
                if i + k >= len {
                    break;
                }
                if !b.is_zero() {
                    cs[i + k] = cs[i + k].add(&a.mul(b));
                }
            }
        }
        Self::normalized(self.zero.clone(), lo, cs, prec, nj)
    }

    /// Multiplicative inverse; non-monomial exact inputs are expanded to
    /// relative precision nj.
    pub fn inv(&self) -> Result<Self> {
        let v0 = self.valuation().ok_or(Error::DivisionByZero { prec: self.prec })?;
        let c0inv = self.coeffs[0].inv()?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(c0inv, -v0, self.nj));
        }
        let rel = if self.is_exact() { self.nj } else { self.prec - v0 };
        let n = rel.max(0) as usize;
        // u = Σ u_k j^k with u_0 = 1 after normalizing; b_k = −Σ_{i≥1} u_i b_{k−i}
        let u: Vec<C> = (0..n).map(|k| self.coeff(v0 + k as i64).mul(&c0inv)).collect();
        let mut b: Vec<C> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(self.zero.one_like());
                continue;
            }
            let mut acc = self.zero.clone();
            for i in 1..=k {
                if !u[i].is_zero() && !b[k - i].is_zero() {
                    acc = acc.add(&u[i].mul(&b[k - i]));
                }
            }
            b.push(acc.neg());
        }
        let b: Vec<C> = b.iter().map(|x| x.mul(&c0inv)).collect();
        Ok(Self::normalized(self.zero.clone(), -v0, b, -v0 + n as i64, self.nj))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(&self.zero, self.nj);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Part with exponents < k (exact as a finite sum when k ≤ prec).
    pub fn below(&self, k: i64) -> Self {
        let cs: Vec<C> = (self.v..k.min(self.v + self.coeffs.len() as i64)).map(|i| self.coeff(i)).collect();
        let prec = if self.prec < k { self.prec } else { EXACT };
        Self::normalized(self.zero.clone(), self.v, cs, prec, self.nj)
    }
    /// Part with exponents ≥ k, keeping the precision.
    pub fn at_or_above(&self, k: i64) -> Self {
        let lo = k.max(self.v);
        let hi = self.v + self.coeffs.len() as i64;
        let cs: Vec<C> = (lo..hi.max(lo)).map(|i| self.coeff(i)).collect();
        Self::normalized(self.zero.clone(), lo, cs, self.prec, self.nj)
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Self::normalized(self.zero.clone(), self.v, self.coeffs.iter().map(f).collect(), self.prec, self.nj)
    }
    pub fn try_map<D: Coeff>(&self, zero: D, f: impl Fn(&C) -> Result<D>) -> Result<JSeries<D>> {
        let cs: Result<Vec<D>> = self.coeffs.iter().map(f).collect();
        Ok(JSeries::normalized(zero, self.v, cs?, self.prec, self.nj))
    }

    /// Agreement of all coefficients below the smaller precision.
    pub fn approx_eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

/// Hasse derivative D^{(m)} with respect to θ of an element of K∞
/// (π = 1/θ): D^{(m)} θ^{−k} = C(−k, m) θ^{−k−m}.
pub fn hasse(c: &Laurent, m: u64) -> Laurent {
    let f = c.field();
    let terms: Vec<(i64, u8)> = c
        .terms()
        .filter_map(|(k, a)| {
            let b = binom_signed(f, -k, m);
            (b != 0).then(|| (k + m as i64, f.mul(a, b)))
        })
        .collect();
    let prec = c.prec().saturating_add(m as i64);
    Laurent::build(f, &terms, prec, c.cap().saturating_add(m as i64), c.is_exact())
}

/// C(n, m) mod p for any integer n.
pub fn binom_signed(f: &Fq, n: i64, m: u64) -> u8 {
    if n >= 0 {
        f.binom(n as u64, m)
    } else {
        // C(−a, m) = (−1)^m C(a + m − 1, m)
        let b = f.binom((-n) as u64 + m - 1, m);
        if m.is_multiple_of(2) {
            b
        } else {
            f.neg(b)
        }
    }
}

/// ν(c) = c(θ + j) for c ∈ K∞ viewed as a function of t: Σ j^m D^{(m)}c.
pub fn nu_kinf(c: &Laurent, nj: i64) -> JSeries<Laurent> {
    let cs: Vec<Laurent> = (0..nj.max(0) as u64).map(|m| hasse(c, m)).collect();
    let zero = c.zero_like();
    let prec = if c.is_zero() && c.is_exact() { EXACT } else { nj };
    JSeries::new(zero, 0, cs, prec, nj)
}

/// ν(a) = a(θ + j) for a ∈ A = F_q[t] (exact).
pub fn nu_poly(a: &Poly, cap: i64, nj: i64) -> JSeries<Laurent> {
    let f = a.field().clone();
    let p2 = Poly2::from_t_poly(a);
    theta_polys_to_jseries(&f, &p2.to_j_expansion(), 0, cap, nj)
}

/// Σ_k P_k(θ) j^{v+k} with P_k ∈ F_q[θ], as an exact j-series over K∞.
pub fn theta_polys_to_jseries(f: &Fq, ps: &[Poly], v: i64, cap: i64, nj: i64) -> JSeries<Laurent> {
    let cs: Vec<Laurent> = ps.iter().map(|p| theta_poly_to_laurent(f, p, cap)).collect();
    JSeries::new(Laurent::zero_with_cap(f, cap, cap), v, cs, EXACT, nj)
}

/// P(θ) ∈ F_q[θ] as an exact element of K∞.
pub fn theta_poly_to_laurent(f: &Fq, p: &Poly, cap: i64) -> Laurent {
    let terms: Vec<(i64, u8)> = p.coeffs().iter().enumerate().map(|(b, &c)| (-(b as i64), c)).collect();
    Laurent::from_terms(f, &terms, cap)
}

/// Rewrites an element of K∞((j)) given by θ-side coefficients in the
/// ν-adapted form Σ_k j^k ν(n_k): n_K = Σ_{k ≤ K} (−1)^{K−k} D^{(K−k)} w_k.
/// Returns n_K for K < below.
pub fn nu_coordinates(w: &JSeries<Laurent>, below: i64) -> Vec<(i64, Laurent)> {
    let Some(v) = w.valuation() else { return vec![] };
    let mut out = Vec::new();
    for kk in v..below {
        let mut acc = w.zero_coeff().clone();
        for k in v..=kk {
            let c = w.coeff(k);
            if c.is_zero() {
                continue;
            }
            let d = hasse(&c, (kk - k) as u64);
            acc = if (kk - k) % 2 == 0 { acc.add(&d) } else { acc.sub(&d) };
        }
        if w.prec() <= kk {
            acc = acc.truncated();
        }
        out.push((kk, acc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    fn l(f: &Fq, terms: &[(i64, u8)]) -> Laurent {
        Laurent::from_terms(f, terms, 40)
    }

    #[test]
    fn inverse_and_product() {
        let f = f3();
        let a = JSeries::new(l(&f, &[]), -1, vec![l(&f, &[(-1, 1)]), l(&f, &[(0, 2), (2, 1)]), l(&f, &[(1, 1)])], EXACT, 10);
        let b = a.inv().unwrap();
        let one = a.mul(&b);
        assert!(one.approx_eq(&JSeries::one(&l(&f, &[]), 10)), "{one:?}");
        assert_eq!(b.valuation(), Some(1));
    }

    #[test]
    fn nu_of_polynomial_matches_taylor() {
        // ν(t^2) = (θ + j)^2 = θ^2 + 2θ j + j^2
        let f = f3();
        let t2 = Poly::monomial(&f, 1, 2);
        let n = nu_poly(&t2, 40, 8);
        assert_eq!(n.coeff(0), l(&f, &[(-2, 1)]));
        assert_eq!(n.coeff(1), l(&f, &[(-1, 2)]));
        assert_eq!(n.coeff(2), l(&f, &[(0, 1)]));
        // the same through Hasse derivatives of θ^2 ∈ K∞
        let h = nu_kinf(&l(&f, &[(-2, 1)]), 8);
        assert!(h.approx_eq(&n));
    }

    #[test]
    fn nu_coordinates_invert_nu() {
        let f = f3();
        let c = l(&f, &[(-3, 1), (1, 2), (4, 1)]);
        // j^{-2} ν(c) has ν-coordinates (c, 0)
        let w = nu_kinf(&c, 12).shift(-2);
        let co = nu_coordinates(&w, 0);
        assert_eq!(co.len(), 2);
        assert_eq!(co[0].1, c);
        assert!(co[1].1.is_zero());
    }
}
