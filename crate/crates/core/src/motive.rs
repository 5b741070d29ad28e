//! A-motives over K = F_q(θ) for A = F_q[t], given by a τ-matrix with
//! entries in F_q[t,θ][j^{−1}], j = t − θ.

use std::fmt;

use crate::error::{Error, Result};
use crate::field_tower::{Fq, Laurent};
use crate::poly::pid::{self, RatFunc};
use crate::poly::{Poly, Poly2};
use crate::tate::{diagonal_inverse, Precision, TateSeries};

/// num·(t−θ)^e with num not divisible by j (canonical form).
#[derive(Clone, PartialEq, Eq)]
pub struct TauEntry {
    pub num: Poly2,
    pub e: i64,
}

impl fmt::Debug for TauEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show())
    }
}

impl TauEntry {
    pub fn new(num: Poly2, e: i64) -> Self {
        if num.is_zero() {
            return TauEntry { num, e: 0 };
        }
        let v = num.j_valuation().unwrap_or(0);
        let num = if v > 0 { num.div_j(v).unwrap() } else { num };
        TauEntry { num, e: e + v as i64 }
    }
    pub fn zero(field: &Fq) -> Self {
        TauEntry { num: Poly2::zero(field), e: 0 }
    }
    pub fn one(field: &Fq) -> Self {
        Self::jpow(field, 0)
    }
    pub fn jpow(field: &Fq, e: i64) -> Self {
        TauEntry { num: Poly2::one(field), e }
    }
    pub fn from_poly(p: Poly2) -> Self {
        Self::new(p, 0)
    }
    pub fn field(&self) -> &Fq {
        self.num.field()
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    /// c when the entry is c·(t−θ)^e with c ∈ F_q^×.
    pub fn constant_coeff(&self) -> Option<u8> {
        let mut it = self.num.terms();
        match (it.next(), it.next()) {
            (Some(((0, 0), c)), None) => Some(c),
            _ => None,
        }
    }
    pub fn pole_order(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            (-self.e).max(0)
        }
    }

    /// num·j^{e−k} as a polynomial, for k ≤ e.
    pub fn times_jpow(&self, k: i64) -> Option<Poly2> {
        if self.is_zero() {
            return Some(self.num.clone());
        }
        let s = self.e + k;
        if s < 0 {
            return None;
        }
        Some(self.num.mul(&Poly2::j(self.field()).pow(s as u32)))
    }

    pub fn add(&self, o: &TauEntry) -> TauEntry {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.e.min(o.e);
        let a = self.times_jpow(-m).unwrap();
        let b = o.times_jpow(-m).unwrap();
        TauEntry::new(a.add(&b), m)
    }
    pub fn neg(&self) -> TauEntry {
        TauEntry { num: self.num.neg(), e: self.e }
    }
    pub fn sub(&self, o: &TauEntry) -> TauEntry {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &TauEntry) -> TauEntry {
        TauEntry::new(self.num.mul(&o.num), self.e + o.e)
    }
    pub fn scale(&self, c: u8) -> TauEntry {
        TauEntry::new(self.num.scale(c), self.e)
    }

    /// Expansion in K∞⟨t⟩, with j^{−1} = −Σ t^k θ^{−(k+1)}.
    pub fn to_series(&self, field: &Fq, prec: Precision) -> TateSeries<Laurent> {
        let cap = prec.u;
        let zero = Laurent::zero_with_cap(field, cap, cap);
        let cs: Vec<Laurent> = self
            .num
            .t_coefficients()
            .iter()
            .map(|p| {
                let terms: Vec<(i64, u8)> =
                    p.coeffs().iter().enumerate().map(|(b, &c)| (-(b as i64), c)).collect();
                Laurent::from_terms(field, &terms, cap)
            })
            .collect();
        let num = TateSeries::new(zero.clone(), cs, prec.t);
        if self.is_zero() || self.e == 0 {
            return num;
        }
        let base = if self.e > 0 {
            TateSeries::j(field, prec)
        } else {
            diagonal_inverse(&Poly::x(field), prec).expect("t is nonconstant")
        };
        num.mul(&base.pow(self.e.unsigned_abs() as u32))
    }

    /// Canonical literal: `num`, `(t-th)^e` or `(num)*(t-th)^e`.
    pub fn show(&self) -> String {
        if self.is_zero() || self.e == 0 {
            return self.num.show();
        }
        let jp = format!("(t-th)^{}", self.e);
        if self.num == Poly2::one(self.field()) {
            jp
        } else {
            format!("({})*{}", self.num.show(), jp)
        }
    }
}

pub type TauMatrix = Vec<Vec<TauEntry>>;

/// An A-motive of rank r over K with its standard integral model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMotive {
    pub field: Fq,
    pub name: String,
    pub tau: TauMatrix,
}

fn det(m: &[Vec<TauEntry>], field: &Fq) -> TauEntry {
    let n = m.len();
    match n {
        0 => TauEntry::one(field),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = TauEntry::zero(field);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<TauEntry>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&det(&minor, field));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

impl TMotive {
    /// Validates det(τ) = c·(t−θ)^d with c ∈ K^×.
    pub fn new(field: &Fq, name: &str, tau: TauMatrix) -> Result<Self> {
        let r = tau.len();
        if r == 0 || tau.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidTau("τ-matrix must be square and nonempty".into()));
        }
        let d = det(&tau, field);
        if d.is_zero() {
            return Err(Error::InvalidTau("det τ vanishes".into()));
        }
        if !d.num.is_free_of_t() {
            return Err(Error::InvalidTau(format!("det τ = {} is not c·(t−θ)^d", d.show())));
        }
        Ok(TMotive { field: field.clone(), name: name.into(), tau })
    }

    /// A(n): τ = (t−θ)^{−n}.
    pub fn carlitz_twist(field: &Fq, n: i64) -> Self {
        TMotive { field: field.clone(), name: format!("A({n})"), tau: vec![vec![TauEntry::jpow(field, -n)]] }
    }
    pub fn unit(field: &Fq) -> Self {
        let mut m = Self::carlitz_twist(field, 0);
        m.name = "1".into();
        m
    }

    pub fn rank(&self) -> usize {
        self.tau.len()
    }
    pub fn det(&self) -> TauEntry {
        det(&self.tau, &self.field)
    }
    pub fn pole_order(&self) -> i64 {
        self.tau.iter().flatten().map(|e| e.pole_order()).max().unwrap_or(0)
    }
    pub fn is_effective(&self) -> bool {
        self.pole_order() == 0
    }

    pub fn tensor(&self, o: &TMotive) -> TMotive {
        let (r, s) = (self.rank(), o.rank());
        let mut tau = vec![vec![TauEntry::zero(&self.field); r * s]; r * s];
        for i in 0..r {
            for j in 0..r {
                for k in 0..s {
                    for l in 0..s {
                        tau[i * s + k][j * s + l] = self.tau[i][j].mul(&o.tau[k][l]);
                    }
                }
            }
        }
        TMotive { field: self.field.clone(), name: format!("{}⊗{}", self.name, o.name), tau }
    }

    pub fn direct_sum(&self, o: &TMotive) -> TMotive {
        let (r, s) = (self.rank(), o.rank());
        let mut tau = vec![vec![TauEntry::zero(&self.field); r + s]; r + s];
        for i in 0..r {
            for j in 0..r {
                tau[i][j] = self.tau[i][j].clone();
            }
        }
        for i in 0..s {
            for j in 0..s {
                tau[r + i][r + j] = o.tau[i][j].clone();
            }
        }
        TMotive { field: self.field.clone(), name: format!("{}⊕{}", self.name, o.name), tau }
    }

    /// Middle of the extension of 1 by M given by m: τ = [[τ_M, m],[0,1]].
    pub fn extension_middle(&self, m: &[TauEntry]) -> Result<TMotive> {
        let r = self.rank();
        if m.len() != r {
            return Err(Error::Precondition("extension vector has wrong length".into()));
        }
        let mut tau = vec![vec![TauEntry::zero(&self.field); r + 1]; r + 1];
        for i in 0..r {
            for j in 0..r {
                tau[i][j] = self.tau[i][j].clone();
            }
            tau[i][r] = m[i].clone();
        }
        tau[r][r] = TauEntry::one(&self.field);
        TMotive::new(&self.field, &format!("E({})", self.name), tau)
    }

    /// Diagonal entries (c_i, e_i) when τ is upper triangular with
    /// diagonal c_i·(t−θ)^{e_i}, c_i ∈ F_q^×.
    pub fn triangular_diagonal(&self) -> Option<Vec<(u8, i64)>> {
        let r = self.rank();
        let mut out = Vec::with_capacity(r);
        for i in 0..r {
            if (0..i).any(|k| !self.tau[i][k].is_zero()) {
                return None;
            }
            out.push((self.tau[i][i].constant_coeff()?, self.tau[i][i].e));
        }
        Some(out)
    }

    /// Weights of the supported triangular class (sorted).
    pub fn weights(&self) -> Result<Vec<i64>> {
        let d = self
            .triangular_diagonal()
            .ok_or_else(|| Error::UnsupportedShape("weights not computed for this τ-matrix shape".into()))?;
        let mut w: Vec<i64> = d.iter().map(|x| x.1).collect();
        w.sort();
        Ok(w)
    }

    /// Valuation at the coefficient-side infinity (uniformizer 1/t) of the
    /// i-th diagonal entry of τ_M·τ(τ_M)···τ^{k−1}(τ_M).
    pub fn tau_iterate_valuation(&self, i: usize, k: u32) -> Result<i64> {
        let q = self.field.q() as u32;
        let entry = &self.tau[i][i];
        let mut num = Poly2::one(&self.field);
        let mut den = Poly2::one(&self.field);
        for step in 0..k {
            let qs = q.pow(step);
            let twisted = Poly2::from_terms(
                &self.field,
                &entry.num.terms().map(|((a, b), c)| ((a, b * qs), c)).collect::<Vec<_>>(),
            );
            num = num.mul(&twisted);
            // τ^step(j) = t − θ^{q^step}
            let jt = Poly2::t(&self.field).sub(&Poly2::monomial(&self.field, 1, 0, qs));
            if entry.e >= 0 {
                num = num.mul(&jt.pow(entry.e as u32));
            } else {
                den = den.mul(&jt.pow((-entry.e) as u32));
            }
        }
        let dn = num.deg_t().ok_or_else(|| Error::Precondition("zero entry".into()))? as i64;
        let dd = den.deg_t().unwrap_or(0) as i64;
        Ok(dd - dn)
    }

    /// Weight oracle: −lim (1/k)·v_{1/t}(τ^k e_i), estimated from k and 2k.
    pub fn weights_by_valuation_growth(&self, k: u32) -> Result<Vec<i64>> {
        if self.triangular_diagonal().is_none() {
            return Err(Error::UnsupportedShape("weights not computed for this τ-matrix shape".into()));
        }
        let mut w = Vec::new();
        for i in 0..self.rank() {
            let a = self.tau_iterate_valuation(i, k)?;
            let b = self.tau_iterate_valuation(i, 2 * k)?;
            w.push(-(b - a) / k as i64);
        }
        w.sort();
        Ok(w)
    }

    pub fn weights_all_negative(&self) -> Result<bool> {
        Ok(self.weights()?.iter().all(|&w| w < 0))
    }
}

/// Integral model M_A ⊆ M: only the standard lattice F_q[t,θ]^r is
/// supported; it is τ-stable because every τ-entry lies in F_q[t,θ][j^{−1}].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralModel {
    pub rank: usize,
    /// Least k with τ_M(τ*M_A) ⊆ j^{−k} M_A.
    pub stability_exponent: i64,
    /// Maximality is asserted metadata, never computed.
    pub maximal_asserted: bool,
}

impl IntegralModel {
    pub fn standard(m: &TMotive) -> Self {
        IntegralModel { rank: m.rank(), stability_exponent: m.pole_order(), maximal_asserted: true }
    }
}

/// N_A = (M + τ_M(τ*M)) ∩ M_A[j^{−1}] as j^{−P}·Z with
/// Z = j^P F_q[t,θ]^r + {Σ_{k<P} ℓ_k j^k : ℓ ∈ L}.
#[derive(Clone, Debug)]
pub struct NModule {
    pub field: Fq,
    pub rank: usize,
    /// P: N_A ⊆ j^{−P} M_A.
    pub denom: i64,
    /// F_q[θ]-basis of L ⊆ F_q[θ]^{r·P}, indexed by (component, j-power).
    pub lattice: Vec<Vec<Poly>>,
    /// K-basis (reduced) of W = L ⊗ K, for membership tests.
    span: Vec<Vec<RatFunc>>,
    span_pivots: Vec<usize>,
}

/// j-expansion coefficients of z mod j^P, flattened as (component i, power k) ↦ i·P + k.
fn jet(z: &[Poly2], p: usize, field: &Fq) -> Vec<Poly> {
    let mut out = vec![Poly::zero(field); z.len() * p];
    for (i, zi) in z.iter().enumerate() {
        for (k, c) in zi.to_j_expansion().into_iter().enumerate().take(p) {
            out[i * p + k] = c;
        }
    }
    out
}

pub fn compute_na(m: &TMotive, model: &IntegralModel) -> Result<NModule> {
    let f = &m.field;
    let r = m.rank();
    if model.rank != r {
        return Err(Error::Precondition("integral model rank mismatch".into()));
    }
    let p = m.pole_order() as usize;
    // W: K-span of j^k·(j^P T)e_c mod j^P for k < P
    let mut rows: Vec<Vec<RatFunc>> = Vec::new();
    for c in 0..r {
        let col: Vec<Poly2> = (0..r).map(|i| m.tau[i][c].times_jpow(p as i64).unwrap()).collect();
        for k in 0..p {
            let shifted: Vec<Poly2> = col.iter().map(|x| x.mul(&Poly2::j(f).pow(k as u32))).collect();
            rows.push(jet(&shifted, p, f).into_iter().map(RatFunc::from_poly).collect());
        }
    }
    let dim = r * p;
    let mut span = rows.clone();
    let piv = pid::rref_rat(&mut span);
    span.truncate(piv.len());
    // L = W ∩ F_q[θ]^{dim}: kernel over F_q[θ] of the annihilator equations
    let ann = pid::kernel_rat(&span, f, dim);
    let lattice = if ann.is_empty() {
        (0..dim).map(|i| (0..dim).map(|k| if i == k { Poly::one(f) } else { Poly::zero(f) }).collect()).collect()
    } else {
        let eqs: Vec<Vec<Poly>> = ann.iter().map(|v| pid::primitive(v, f)).collect();
        pid::kernel(&eqs, f, dim)
    };
    Ok(NModule { field: f.clone(), rank: r, denom: p as i64, lattice, span, span_pivots: piv })
}

impl NModule {
    /// Is j^{−P}·z in N_A, for z ∈ F_q[t,θ]^r?
    pub fn contains_scaled(&self, z: &[Poly2]) -> bool {
        let p = self.denom as usize;
        if p == 0 {
            return true;
        }
        let v: Vec<RatFunc> = jet(z, p, &self.field).into_iter().map(RatFunc::from_poly).collect();
        let mut rem = v;
        for (row, &pc) in self.span.iter().zip(&self.span_pivots) {
            if rem[pc].is_zero() {
                continue;
            }
            let c = rem[pc].clone();
            for k in 0..rem.len() {
                rem[k] = rem[k].sub(&row[k].mul(&c));
            }
        }
        rem.iter().all(|x| x.is_zero())
    }

    /// Membership of an element given by τ-entries (each in F_q[t,θ][j^{−1}]).
    pub fn contains(&self, x: &[TauEntry]) -> bool {
        let z: Option<Vec<Poly2>> = x.iter().map(|e| e.times_jpow(self.denom)).collect();
        match z {
            Some(z) => self.contains_scaled(&z),
            None => false,
        }
    }

    /// Generators over F_q[t,θ]: the standard basis and the lifts of L.
    pub fn generators(&self) -> Vec<Vec<TauEntry>> {
        let f = &self.field;
        let p = self.denom as usize;
        let mut out = Vec::new();
        for i in 0..self.rank {
            let mut v = vec![TauEntry::zero(f); self.rank];
            v[i] = TauEntry::one(f);
            out.push(v);
        }
        for l in &self.lattice {
            let v: Vec<TauEntry> = (0..self.rank)
                .map(|i| {
                    let mut z = Poly2::zero(f);
                    for k in 0..p {
                        z = z.add(&Poly2::from_theta_poly(&l[i * p + k]).mul(&Poly2::j(f).pow(k as u32)));
                    }
                    TauEntry::new(z, -(p as i64))
                })
                .collect();
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twists_combine() {
        let f = Fq::new(3, 1).unwrap();
        let a1 = TMotive::carlitz_twist(&f, 1);
        let am1 = TMotive::carlitz_twist(&f, -1);
        assert_eq!(a1.tensor(&am1).tau, TMotive::unit(&f).tau);
        assert_eq!(a1.tensor(&TMotive::carlitz_twist(&f, 2)).tau, TMotive::carlitz_twist(&f, 3).tau);
        assert_eq!(a1.pole_order(), 1);
        assert!(am1.is_effective());
        let s = a1.direct_sum(&TMotive::unit(&f));
        assert_eq!(s.weights().unwrap(), vec![-1, 0]);
    }

    #[test]
    fn weights_match_valuation_oracle() {
        let f = Fq::new(2, 1).unwrap();
        for n in -2..=3 {
            let m = TMotive::carlitz_twist(&f, n);
            assert_eq!(m.weights().unwrap(), m.weights_by_valuation_growth(2).unwrap());
            assert_eq!(m.weights().unwrap(), vec![-n]);
        }
    }

    #[test]
    fn na_of_twists() {
        let f = Fq::new(3, 1).unwrap();
        let j = Poly2::j(&f);
        for n in 1..=3 {
            let m = TMotive::carlitz_twist(&f, n);
            let na = compute_na(&m, &IntegralModel::standard(&m)).unwrap();
            assert_eq!(na.denom, n);
            assert!(na.contains(&[TauEntry::jpow(&f, -n)]));
            assert!(!na.contains(&[TauEntry::jpow(&f, -n - 1)]));
            assert!(na.contains(&[TauEntry::new(Poly2::theta(&f).add(&j), -n)]));
        }
        let d = TMotive::carlitz_twist(&f, -2);
        let na = compute_na(&d, &IntegralModel::standard(&d)).unwrap();
        assert_eq!(na.denom, 0);
        assert!(!na.contains(&[TauEntry::jpow(&f, -1)]));
    }

    #[test]
    fn invalid_det_rejected() {
        let f = Fq::new(3, 1).unwrap();
        let bad = vec![vec![TauEntry::from_poly(Poly2::t(&f))]];
        assert!(matches!(TMotive::new(&f, "bad", bad), Err(Error::InvalidTau(_))));
    }
}
