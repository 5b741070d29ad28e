//! Truncated Tate-algebra series Σ a_i t^i with coefficients in K∞ or in a
//! finite extension L, the twist τ, the product Π and the function ω, and
//! the τ-fixed-point solver for upper-triangular τ-matrices.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field_tower::{solve_artin_schreier, Fq, LElem, Laurent, Tower};
use crate::motive::TauEntry;
use crate::poly::Poly;

/// Truncation parameters shared by all computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    /// Number of t-coefficients kept.
    pub t: usize,
    /// 1/θ-adic cap.
    pub u: i64,
    /// j-adic precision.
    pub j: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { t: 32, u: 64, j: 16 }
    }
}

/// Coefficient rings for Tate series.
pub trait Coeff: Clone + fmt::Debug {
    fn fq(&self) -> &Fq;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: u8) -> Self;
    fn frob(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    /// Known precision, in the coefficient's own uniformizer.
    fn prec(&self) -> i64;
    /// Valuation in units of 1/θ (a lower bound for tower elements whose
    /// layer monomials share a valuation class).
    fn val(&self) -> Option<Ratio<i64>>;
    /// Forgets everything at 1/θ-valuation v and beyond.
    fn truncate_val(&self, v: Ratio<i64>) -> Self;
}

impl Coeff for Laurent {
    fn fq(&self) -> &Fq {
        self.field()
    }
    fn zero_like(&self) -> Self {
        Laurent::zero_with_cap(self.field(), self.cap(), self.cap())
    }
    fn one_like(&self) -> Self {
        Laurent::one(self.field(), self.cap())
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Laurent::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Laurent::sub(self, o)
    }
    fn neg(&self) -> Self {
        Laurent::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Laurent::mul(self, o)
    }
    fn scale(&self, c: u8) -> Self {
        Laurent::scale(self, c)
    }
    fn frob(&self) -> Self {
        Laurent::frob(self)
    }
    fn inv(&self) -> Result<Self> {
        Laurent::inv(self)
    }
    fn prec(&self) -> i64 {
        Laurent::prec(self)
    }
    fn val(&self) -> Option<Ratio<i64>> {
        self.valuation().map(Ratio::from_integer)
    }
    fn truncate_val(&self, v: Ratio<i64>) -> Self {
        self.with_prec(v.floor().to_integer())
    }
}

impl Coeff for LElem {
    fn fq(&self) -> &Fq {
        self.field()
    }
    fn zero_like(&self) -> Self {
        self.tower().zero()
    }
    fn one_like(&self) -> Self {
        self.tower().one()
    }
    fn is_zero(&self) -> bool {
        LElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        LElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        LElem::sub(self, o)
    }
    fn neg(&self) -> Self {
        LElem::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        LElem::mul(self, o)
    }
    fn scale(&self, c: u8) -> Self {
        LElem::scale(self, c)
    }
    fn frob(&self) -> Self {
        LElem::frob(self)
    }
    fn inv(&self) -> Result<Self> {
        LElem::inv(self)
    }
    fn prec(&self) -> i64 {
        LElem::prec(self)
    }
    fn val(&self) -> Option<Ratio<i64>> {
        let t = self.tower();
        let q = t.q() as i64;
        self.components()
            .filter_map(|(key, v)| {
                let vs = v.valuation()?;
                let shift: i64 = key.iter().zip(t.layers()).map(|(&e, &m)| e as i64 * m).sum();
                Some(Ratio::new(vs * q - shift, q * (q - 1)))
            })
            .min()
    }
    fn truncate_val(&self, v: Ratio<i64>) -> Self {
        let q = self.tower().q() as i64;
        self.with_prec((v * (q - 1)).floor().to_integer())
    }
}

/// Σ_{i<N_t} a_i t^i, exact in t below N_t.
#[derive(Clone)]
pub struct TateSeries<C: Coeff> {
    zero: C,
    coeffs: Vec<C>,
}

impl<C: Coeff> fmt::Debug for TateSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("t^{i}: {c:?}"))
            .collect();
        write!(f, "TateSeries[{}]", nz.join(", "))
    }
}

impl<C: Coeff> TateSeries<C> {
    pub fn new(zero: C, mut coeffs: Vec<C>, nt: usize) -> Self {
        coeffs.truncate(nt);
        while coeffs.len() < nt {
            coeffs.push(zero.clone());
        }
        TateSeries { zero, coeffs }
    }
    pub fn zero(zero: C, nt: usize) -> Self {
        Self::new(zero, vec![], nt)
    }
    pub fn constant(c: C, nt: usize) -> Self {
        let z = c.zero_like();
        Self::new(z, vec![c], nt)
    }
    pub fn one(like: &C, nt: usize) -> Self {
        Self::constant(like.one_like(), nt)
    }
    /// a(t) for a ∈ F_q[t].
    pub fn from_tpoly(like: &C, p: &Poly, nt: usize) -> Self {
        let one = like.one_like();
        let cs = p.coeffs().iter().map(|&c| one.scale(c)).collect();
        Self::new(like.zero_like(), cs, nt)
    }

    pub fn nt(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeff(&self, i: usize) -> &C {
        self.coeffs.get(i).unwrap_or(&self.zero)
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    /// Minimum coefficient precision.
    pub fn prec(&self) -> i64 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(i64::MAX)
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let n = self.nt().min(o.nt());
        let cs = (0..n).map(|i| f(&self.coeffs[i], &o.coeffs[i])).collect();
        Self::new(self.zero.clone(), cs, n)
    }
    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }
    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
    pub fn scale(&self, c: u8) -> Self {
        self.map(|x| x.scale(c))
    }
    pub fn mul_coeff(&self, c: &C) -> Self {
        self.map(|x| x.mul(c))
    }
    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        TateSeries { zero: self.zero.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }
    /// Change of coefficient ring.
    pub fn convert<D: Coeff>(&self, zero: D, f: impl Fn(&C) -> D) -> TateSeries<D> {
        TateSeries { zero, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.nt().min(o.nt());
        let mut out = vec![self.zero.clone(); n];
        // zero coefficients are multiplied too: their precision matters
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (k, b) in o.coeffs.iter().enumerate().take(n - i) {
                out[i + k] = out[i + k].add(&a.mul(b));
            }
        }
        Self::new(self.zero.clone(), out, n)
    }

    /// Multiplication by t^k.
    pub fn shift_t(&self, k: usize) -> Self {
        let n = self.nt();
        let mut cs = vec![self.zero.clone(); k.min(n)];
        cs.extend(self.coeffs.iter().take(n.saturating_sub(k)).cloned());
        Self::new(self.zero.clone(), cs, n)
    }

    /// Multiplication by a ∈ F_q[t].
    pub fn mul_tpoly(&self, p: &Poly) -> Self {
        let mut out = Self::zero(self.zero.clone(), self.nt());
        for (i, &c) in p.coeffs().iter().enumerate() {
            if c != 0 {
                out = out.add(&self.shift_t(i).scale(c));
            }
        }
        out
    }

    /// τ: coefficientwise q-power.
    pub fn tau(&self) -> Self {
        TateSeries { zero: self.zero.frob(), coeffs: self.coeffs.iter().map(|c| c.frob()).collect() }
    }
    pub fn tau_pow(&self, k: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.tau();
        }
        x
    }

    /// Inverse in the power-series ring; requires an invertible constant term.
    pub fn inv(&self) -> Result<Self> {
        let n = self.nt();
        let a0i = self.coeff(0).inv()?;
        let mut b: Vec<C> = Vec::with_capacity(n);
        b.push(a0i.clone());
        for k in 1..n {
            let mut acc = self.zero.clone();
            for i in 1..=k {
                let ai = &self.coeffs[i];
                if !ai.is_zero() {
                    acc = acc.add(&ai.mul(&b[k - i]));
                }
            }
            b.push(acc.mul(&a0i).neg());
        }
        Ok(Self::new(self.zero.clone(), b, n))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one(&self.zero, self.nt());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.inv()?.pow((-n) as u32))
        }
    }

    /// Gauss valuation −log_q ‖f‖_ρ for ρ = |θ|^r: min_i (v(a_i) − i·r).
    pub fn gauss_val(&self, r: Ratio<i64>) -> Option<Ratio<i64>> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.val().map(|v| v - r * Ratio::from_integer(i as i64)))
            .min()
    }

    /// Unit test in the Tate algebra: the constant term strictly dominates.
    pub fn is_unit(&self) -> bool {
        let Some(v0) = self.coeff(0).val() else { return false };
        self.coeffs.iter().skip(1).all(|c| c.val().map(|v| v > v0).unwrap_or(true))
    }
}

impl TateSeries<Laurent> {
    /// Lifts a K∞-series into a tower.
    pub fn embed(&self, tower: &Tower) -> TateSeries<LElem> {
        self.convert(tower.zero(), |c| tower.from_kinf(c))
    }
    /// j = t − θ over K∞.
    pub fn j(field: &Fq, prec: Precision) -> Self {
        let z = Laurent::zero_with_cap(field, prec.u, prec.u);
        let cs = vec![Laurent::monomial(field, field.neg(1), -1, prec.u), Laurent::one(field, prec.u)];
        Self::new(z, cs, prec.t)
    }
}

impl TateSeries<LElem> {
    /// The series as a K∞-series when every coefficient lies in K∞.
    pub fn to_kinf(&self, nu: i64) -> Option<TateSeries<Laurent>> {
        let f = self.zero.field().clone();
        let zero = Laurent::zero_with_cap(&f, nu, nu);
        let cs: Option<Vec<Laurent>> = self.coeffs.iter().map(|c| c.to_kinf()).collect();
        Some(TateSeries { zero, coeffs: cs? })
    }
    pub fn lift(&self, tower: &Tower) -> Result<Self> {
        let cs: Result<Vec<LElem>> = self.coeffs.iter().map(|c| c.lift(tower)).collect();
        Ok(TateSeries { zero: tower.zero(), coeffs: cs? })
    }
}

/// −Σ_k a^k ⊗ a(θ)^{−(k+1)}, the inverse of a⊗1 − 1⊗a(θ) for nonconstant a.
pub fn diagonal_inverse(a: &Poly, prec: Precision) -> Result<TateSeries<Laurent>> {
    let f = a.field().clone();
    let d = a.deg().unwrap_or(0) as i64;
    if d < 1 {
        return Err(Error::Precondition("need |a(θ)| > 1".into()));
    }
    let cap = prec.u;
    let mut ath = Laurent::zero_with_cap(&f, cap, cap);
    for (i, &c) in a.coeffs().iter().enumerate() {
        ath = ath.add(&Laurent::monomial(&f, c, -(i as i64), cap));
    }
    let inv = ath.inv()?;
    let zero = Laurent::zero_with_cap(&f, cap, cap);
    let at = TateSeries::from_tpoly(&zero, a, prec.t);
    let mut sum = TateSeries::zero(zero.clone(), prec.t);
    let mut apow = TateSeries::one(&zero, prec.t);
    let mut ipow = inv.clone();
    let mut k = 0i64;
    while (k + 1) * d < cap + d {
        sum = sum.add(&apow.mul_coeff(&ipow));
        apow = apow.mul(&at);
        ipow = ipow.mul(&inv);
        k += 1;
    }
    Ok(sum.neg().map(|c| c.truncated()))
}

/// Π^n with Π = ∏_{i≥0} (1 − t/θ^{q^i}), over K∞. Factors with
/// q^i ≥ cap do not change anything below the precision and are skipped.
pub fn pi_product(field: &Fq, n: i64, prec: Precision) -> Result<TateSeries<Laurent>> {
    let m = pi_factor_count(field, prec.u);
    pi_product_partial(field, 1, m, prec)?.map(|c| c.truncated()).powi(n)
}

/// Number of factors of Π that matter at 1/θ-cap `cap`.
pub fn pi_factor_count(field: &Fq, cap: i64) -> usize {
    let q = field.q() as i64;
    let mut m = 0usize;
    let mut qi = 1i64;
    while qi < cap {
        m += 1;
        qi = qi.saturating_mul(q);
    }
    m
}

/// Π^n truncated to its first `m` factors.
pub fn pi_product_partial(field: &Fq, n: i64, m: usize, prec: Precision) -> Result<TateSeries<Laurent>> {
    let cap = prec.u;
    let zero = Laurent::zero_with_cap(field, cap, cap);
    let q = field.q() as i64;
    let mut pi = TateSeries::one(&zero, prec.t);
    let mut qi = 1i64;
    for _ in 0..m {
        let factor = TateSeries::new(
            zero.clone(),
            vec![Laurent::one(field, cap), Laurent::monomial(field, field.neg(1), qi, cap)],
            prec.t,
        );
        pi = pi.mul(&factor);
        qi = qi.saturating_mul(q);
    }
    pi.powi(n)
}

/// A series together with a uniform pole order at every point t = θ^{q^i}.
#[derive(Clone, Debug)]
pub struct Meromorphic {
    pub body: TateSeries<LElem>,
    /// Pole order recorded at each t = θ^{q^i}, i ≥ 0.
    pub pole_order: i64,
}

impl Meromorphic {
    /// Π^{pole_order}·body, which has no recorded poles.
    pub fn clear_poles(&self, prec: Precision) -> Result<TateSeries<LElem>> {
        let t = self.body.zero_coeff().tower().clone();
        let pi = pi_product(t.field(), self.pole_order, prec)?.embed(&t);
        Ok(self.body.mul(&pi))
    }
}

/// ω^n = s^n Π^{−n} over the Kummer tower; τω = u·(t−θ)ω where
/// s^{q−1} = −u·θ.
pub fn omega_power(tower: &Tower, n: i64, prec: Precision) -> Result<Meromorphic> {
    let f = tower.field();
    let sn = tower.from_base(Laurent::monomial(f, 1, -n, tower.sigma_cap()));
    let pin = pi_product(f, -n, prec)?.embed(tower);
    Ok(Meromorphic { body: pin.mul_coeff(&sn), pole_order: n.max(0) })
}

/// Result of the τ-fixed-point solver.
#[derive(Clone, Debug)]
pub struct TauSolution {
    /// Upper-triangular Ω with Ω = T·τ(Ω).
    pub omega: Vec<Vec<TateSeries<LElem>>>,
    pub tower: Tower,
}

/// Kummer unit u with u^{n_i} = c_i for every diagonal entry c_i·(t−θ)^{n_i}
/// (a diagonal ω_u^{−n_i} then solves the i-th diagonal equation).
fn kummer_unit(field: &Fq, diag: &[(u8, i64)]) -> Result<u8> {
    'outer: for u in field.elements().filter(|&u| u != 0) {
        for &(c, n) in diag {
            if field.pow(u, n) != c {
                continue 'outer;
            }
        }
        return Ok(u);
    }
    Err(Error::UnsupportedShape(
        "diagonal constants need a residue field extension".into(),
    ))
}

/// T as K∞-series matrix.
pub fn tau_series(t: &[Vec<TauEntry>], field: &Fq, prec: Precision) -> Vec<Vec<TateSeries<Laurent>>> {
    t.iter().map(|row| row.iter().map(|e| e.to_series(field, prec)).collect()).collect()
}

/// Solves Ω = T·τ(Ω) for upper-triangular T with diagonal entries
/// c_i·(t−θ)^{n_i}, c_i ∈ F_q^×.
pub fn solve_tau_fixed(t: &[Vec<TauEntry>], field: &Fq, prec: Precision) -> Result<TauSolution> {
    let r = t.len();
    let mut diag = Vec::with_capacity(r);
    for (i, row) in t.iter().enumerate() {
        if row.len() != r {
            return Err(Error::UnsupportedShape("τ-matrix is not square".into()));
        }
        for e in row.iter().take(i) {
            if !e.is_zero() {
                return Err(Error::UnsupportedShape("τ-matrix is not upper triangular".into()));
            }
        }
        let d = &row[i];
        let c = d
            .constant_coeff()
            .ok_or_else(|| Error::UnsupportedShape("diagonal entry is not c·(t−θ)^n with c ∈ F_q^×".into()))?;
        diag.push((c, d.e));
    }
    let u = kummer_unit(field, &diag)?;
    let mut tower = Tower::with_unit(field, prec.u, u)?;
    let ts = tau_series(t, field, prec);
    let zero = TateSeries::zero(tower.zero(), prec.t);
    let mut omega: Vec<Vec<TateSeries<LElem>>> = vec![vec![zero.clone(); r]; r];
    let mut omega_inv: Vec<TateSeries<LElem>> = Vec::with_capacity(r);
    for (i, &(_, n)) in diag.iter().enumerate() {
        omega[i][i] = omega_power(&tower, -n, prec)?.body;
        omega_inv.push(omega_power(&tower, n, prec)?.body);
    }
    for j in 0..r {
        for i in (0..j).rev() {
            // y − τy = ω_i^{−1} Σ_{k>i} T_ik τΩ_kj,   Ω_ij = ω_i·y
            let mut rhs = TateSeries::zero(tower.zero(), prec.t);
            for k in i + 1..=j {
                if t[i][k].is_zero() {
                    continue;
                }
                rhs = rhs.add(&ts[i][k].embed(&tower).mul(&omega[k][j].tau()));
            }
            let rhs = rhs.mul(&omega_inv[i]);
            let mut ys = Vec::with_capacity(prec.t);
            for m in 0..prec.t {
                let c = rhs.coeff(m).lift(&tower)?;
                let sol = solve_artin_schreier(&c, true)?;
                tower = sol.tower;
                ys.push(sol.x);
            }
            let ys: Result<Vec<LElem>> = ys.iter().map(|y| y.lift(&tower)).collect();
            let y = TateSeries::new(tower.zero(), ys?, prec.t);
            omega[i][j] = omega[i][i].lift(&tower)?.mul(&y);
        }
    }
    let omega = omega
        .iter()
        .map(|row| row.iter().map(|x| x.lift(&tower)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(TauSolution { omega, tower })
}

/// Ω − T·τ(Ω).
pub fn fixed_point_residual(
    t: &[Vec<TauEntry>],
    sol: &TauSolution,
    prec: Precision,
) -> Vec<Vec<TateSeries<LElem>>> {
    let f = sol.tower.field();
    let ts = tau_series(t, f, prec);
    let r = t.len();
    let tau_om: Vec<Vec<TateSeries<LElem>>> = sol.omega.iter().map(|row| row.iter().map(|x| x.tau()).collect()).collect();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut acc = sol.omega[i][j].clone();
                    for k in 0..r {
                        if !t[i][k].is_zero() {
                            acc = acc.sub(&ts[i][k].embed(&sol.tower).mul(&tau_om[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision { t: 12, u: 32, j: 8 }
    }

    #[test]
    fn omega_functional_equation() {
        for (pp, e) in [(2, 1), (3, 1), (2, 2)] {
            let f = Fq::new(pp, e).unwrap();
            let t = Tower::new(&f, p().u);
            let w = omega_power(&t, 1, p()).unwrap().body;
            let j = TateSeries::j(&f, p()).embed(&t);
            assert!(w.tau().sub(&j.mul(&w)).is_zero(), "q = {}", f.q());
        }
    }

    #[test]
    fn pi_linear_coefficient_matches_brute_force() {
        let f = Fq::new(3, 1).unwrap();
        let pr = p();
        let pi = pi_product_partial(&f, 1, 3, pr).unwrap();
        let mut want = Laurent::zero_with_cap(&f, pr.u, pr.u);
        for i in 0..3 {
            want = want.sub(&Laurent::monomial(&f, 1, 3i64.pow(i), pr.u));
        }
        assert_eq!(pi.coeff(1).clone(), want);
        assert_eq!(pi_product(&f, 0, pr).unwrap().coeff(0).clone(), Laurent::one(&f, pr.u));
    }

    #[test]
    fn pi_reindexing() {
        let f = Fq::new(2, 1).unwrap();
        let pi = pi_product(&f, 1, p()).unwrap();
        let lhs = pi.tau().mul(&TateSeries::new(
            pi.zero_coeff().clone(),
            vec![Laurent::one(&f, 32), Laurent::monomial(&f, 1, 1, 32)],
            12,
        ));
        assert!(lhs.sub(&pi).is_zero());
    }

    #[test]
    fn diagonal_inverse_is_inverse() {
        let f = Fq::new(3, 1).unwrap();
        let a = Poly::new(&f, vec![1, 1, 1]);
        let inv = diagonal_inverse(&a, p()).unwrap();
        let z = inv.zero_coeff().clone();
        let mut lhs = TateSeries::from_tpoly(&z, &a, 12);
        let ath = Laurent::from_terms(&f, &[(0, 1), (-1, 1), (-2, 1)], 32);
        lhs = lhs.sub(&TateSeries::constant(ath, 12));
        let prod = lhs.mul(&inv);
        assert!(prod.sub(&TateSeries::one(&z, 12)).is_zero());
    }

    #[test]
    fn gauss_norm_and_tau() {
        let f = Fq::new(3, 1).unwrap();
        let pi = pi_product(&f, 1, p()).unwrap();
        let x = pi.mul_coeff(&Laurent::monomial(&f, 1, -2, 32));
        let r0 = Ratio::from_integer(0);
        assert_eq!(x.tau().gauss_val(r0).unwrap(), x.gauss_val(r0).unwrap() * 3);
    }

    #[test]
    fn fixed_point_residuals_vanish() {
        use crate::motive::TMotive;
        use crate::poly::Poly2;
        let pr = Precision { t: 10, u: 32, j: 8 };
        for pp in [2, 3] {
            let f = Fq::new(pp, 1).unwrap();
            let a1 = TMotive::carlitz_twist(&f, 1);
            let mut ms = vec![TMotive::unit(&f), a1.direct_sum(&TMotive::unit(&f))];
            for n in [-2, 1, 2] {
                ms.push(TMotive::carlitz_twist(&f, n));
            }
            ms.push(a1.extension_middle(&[TauEntry::from_poly(Poly2::theta(&f))]).unwrap());
            for m in ms {
                let sol = solve_tau_fixed(&m.tau, &f, pr).unwrap();
                let res = fixed_point_residual(&m.tau, &sol, pr);
                assert!(res.iter().flatten().all(|x| x.is_zero()), "{} q={pp}", m.name);
                for i in 0..m.rank() {
                    assert!(sol.omega[i][i].is_unit());
                }
            }
        }
    }
}
