//! Expansion of Betti bases at t = θ and the Hodge–Pink realization.

use num_rational::Ratio;

use crate::betti::{betti_realize, BettiLattice};
use crate::error::{Error, Result};
use crate::field_tower::{Fq, LElem, Laurent};
use crate::hodge_pink::jseries::{nu_poly, theta_polys_to_jseries, JSeries};
use crate::hodge_pink::lattice::{mat_mul, mat_vec, upper_inverse, JCols, JVec, Lattice};
use crate::hodge_pink::structure::{GaloisCoeff, HodgePinkStructure, Ring};
use crate::motive::{TMotive, TauEntry, TauMatrix};
use crate::poly::Poly2;
use crate::tate::{Coeff, Precision, TateSeries};

/// s(θ + j) for s ∈ C⟨t⟩: the coefficient of j^m is Σ_{i≥m} C(i,m) s_i θ^{i−m}.
/// Also returns a tail estimate: the smallest 1/θ-valuation of s_i θ^i
/// over the last kept terms.
pub fn expand_at_theta<C: GaloisCoeff>(s: &TateSeries<C>, cap: i64, nj: i64) -> (JSeries<C>, Option<Ratio<i64>>) {
    let like = s.zero_coeff().clone();
    let f = like.fq().clone();
    let nt = s.nt();
    let theta_pow: Vec<C> = (0..nt).map(|e| C::from_kinf(&like, &Laurent::monomial(&f, 1, -(e as i64), cap))).collect();
    let mut cs = Vec::with_capacity(nj.max(0) as usize);
    for m in 0..nj.max(0) as usize {
        let mut acc = like.zero_like();
        for i in m..nt {
            // inexact zeros still carry their precision through θ^{i−m}
            let c = s.coeff(i);
            let b = f.binom(i as u64, m as u64);
            if b == 0 {
                continue;
            }
            acc = acc.add(&c.mul(&theta_pow[i - m]).scale(b));
        }
        cs.push(acc);
    }
    let tail = (nt.saturating_sub(3)..nt)
        .filter_map(|i| s.coeff(i).val().map(|v| v - Ratio::from_integer(i as i64)))
        .min();
    // omitted terms s_i θ^{i−m} are assumed no larger than the last kept ones
    if let Some(t) = tail {
        for (m, c) in cs.iter_mut().enumerate() {
            *c = c.truncate_val(t + Ratio::from_integer(m as i64));
        }
    }
    (JSeries::new(like, 0, cs, nj, nj), tail)
}

/// (τ^k e)(θ + j) for a τ-matrix entry e = num·(t−θ)^e, exact when e ≥ 0.
pub fn entry_j(f: &Fq, x: &TauEntry, k: u32, cap: i64, nj: i64) -> Result<JSeries<Laurent>> {
    let mut num = x.num.clone();
    for _ in 0..k {
        num = num.tau();
    }
    let n = theta_polys_to_jseries(f, &num.to_j_expansion(), 0, cap, nj);
    if x.is_zero() || x.e == 0 {
        return Ok(n);
    }
    if k == 0 {
        return Ok(n.shift(x.e));
    }
    // τ^k(t − θ) = t − θ^{q^k}, a unit at t = θ
    let mut base = Poly2::j(f);
    for _ in 0..k {
        base = base.tau();
    }
    let b = theta_polys_to_jseries(f, &base.to_j_expansion(), 0, cap, nj);
    let p = b.pow(x.e.unsigned_abs() as u32);
    let p = if x.e < 0 { p.inv()? } else { p };
    Ok(n.mul(&p))
}

/// τ^k(T)(θ + j) as columns.
pub fn matrix_j(f: &Fq, t: &TauMatrix, k: u32, cap: i64, nj: i64) -> Result<JCols<Laurent>> {
    let r = t.len();
    (0..r).map(|c| (0..r).map(|i| entry_j(f, &t[i][c], k, cap, nj)).collect()).collect()
}

pub fn identity<C: Coeff>(like: &C, r: usize, nj: i64) -> JCols<C> {
    (0..r)
        .map(|c| (0..r).map(|i| if i == c { JSeries::one(like, nj) } else { JSeries::zero(like.zero_like(), nj) }).collect())
        .collect()
}

pub fn embed_cols<C: GaloisCoeff>(m: &JCols<Laurent>, like: &C) -> JCols<C> {
    m.iter().map(|c| c.iter().map(|x| x.map_to(like)).collect()).collect()
}

/// T·τ(T)···τ^{k−1}(T) at t = θ.
pub fn twisted_product(f: &Fq, t: &TauMatrix, k: u32, cap: i64, nj: i64) -> Result<JCols<Laurent>> {
    let like = Laurent::zero_with_cap(f, cap, cap);
    let mut prod = identity(&like, t.len(), nj);
    for i in 0..k {
        prod = mat_mul(&prod, &matrix_j(f, t, i, cap, nj)?);
    }
    Ok(prod)
}

/// The matrix of γ_M: Ω(θ + j), computed as T·τ(T)···τ^{k−1}(T)·(τ^kΩ)(θ + j).
#[derive(Clone, Debug)]
pub struct Gamma {
    pub omega_j: JCols<LElem>,
    pub iterations: u32,
    pub tail: Option<Ratio<i64>>,
}

pub fn gamma_expand(b: &BettiLattice, nj: i64, iterations: u32) -> Result<Gamma> {
    if iterations == 0 {
        return Err(Error::Precondition("Ω has a pole at t = θ; at least one functional-equation step is needed".into()));
    }
    let f = b.motive.field.clone();
    let like = b.tower().zero();
    let cap = b.prec.u;
    let r = b.rank();
    let prod = embed_cols(&twisted_product(&f, &b.motive.tau, iterations, cap, nj)?, &like);
    let mut tail: Option<Ratio<i64>> = None;
    let mut cols: JCols<LElem> = Vec::with_capacity(r);
    for c in 0..r {
        let mut col = Vec::with_capacity(r);
        for i in 0..r {
            let (e, t) = expand_at_theta(&b.omega()[i][c].tau_pow(iterations), b.tower().sigma_cap(), nj);
            if let Some(t) = t {
                tail = Some(tail.map_or(t, |x: Ratio<i64>| x.min(t)));
            }
            col.push(e);
        }
        cols.push(col);
    }
    Ok(Gamma { omega_j: mat_mul(&prod, &cols), iterations, tail })
}

/// H⁺_R(M) together with the data it was computed from.
#[derive(Clone, Debug)]
pub struct HodgeRealization {
    pub betti: BettiLattice,
    pub gamma: Gamma,
    pub structure: HodgePinkStructure<LElem>,
}

pub fn hodge_realize(m: &TMotive, ring: Ring, prec: Precision) -> Result<HodgeRealization> {
    let betti = betti_realize(m, prec)?;
    realize_from_betti(betti, ring)
}

pub fn realize_from_betti(betti: BettiLattice, ring: Ring) -> Result<HodgeRealization> {
    let nj = betti.prec.j as i64;
    let gamma = gamma_expand(&betti, nj, 1)?;
    let inv = upper_inverse(&gamma.omega_j)?;
    let q = Lattice::from_generators(betti.rank(), &inv)?;
    let structure = HodgePinkStructure::new(ring, q).with_frobenius(betti.actions.clone());
    Ok(HodgeRealization { betti, gamma, structure })
}

impl HodgeRealization {
    pub fn cap(&self) -> i64 {
        self.betti.prec.u
    }
    pub fn nj(&self) -> i64 {
        self.betti.prec.j as i64
    }
    fn like(&self) -> LElem {
        self.betti.tower().zero()
    }

    /// ν(a) for a vector over A, in L[[j]].
    pub fn nu_vec(&self, a: &[crate::poly::Poly]) -> JVec<LElem> {
        let like = self.like();
        a.iter().map(|x| nu_poly(x, self.cap(), self.nj()).map_to(&like)).collect()
    }

    /// σ(Ω_j) = Ω_j·ν(A_σ) for every Galois generator.
    pub fn check_equivariance(&self) -> Result<bool> {
        let like = self.like();
        let om = &self.gamma.omega_j;
        for (g, a) in &self.betti.actions {
            let r = a.len();
            for c in 0..r {
                let col: Vec<_> = (0..r).map(|i| a[i][c].clone()).collect();
                let rhs = mat_vec(om, &self.nu_vec(&col));
                for (i, y) in rhs.iter().enumerate() {
                    let lhs = om[c][i].try_map(like.zero_like(), |x| x.galois(g))?;
                    if !lhs.approx_eq(y) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// γ_M(p) = τ_M(τ*M) ⊗ L[[j]]: the columns of Ω_j and of T(θ + j)
    /// span the same lattice.
    pub fn check_tautological(&self) -> Result<bool> {
        let m = &self.betti.motive;
        let tj = embed_cols(&matrix_j(&m.field, &m.tau, 0, self.cap(), self.nj())?, &self.like());
        let a = Lattice::from_generators(m.rank(), &self.gamma.omega_j)?;
        let b = Lattice::from_generators(m.rank(), &tj)?;
        Ok(a.same_as(&b))
    }

    /// Ω_j from one and from two functional-equation steps agree.
    pub fn check_expansion_routes(&self) -> Result<bool> {
        let g2 = gamma_expand(&self.betti, self.nj(), 2)?;
        Ok(self.gamma.omega_j.iter().flatten().zip(g2.omega_j.iter().flatten()).all(|(a, b)| a.approx_eq(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr() -> Precision {
        Precision { t: 16, u: 40, j: 8 }
    }

    #[test]
    fn twists_realize_to_shifted_lattices() {
        let f = Fq::new(3, 1).unwrap();
        for n in 1..=3i64 {
            let h = hodge_realize(&TMotive::carlitz_twist(&f, n), Ring::A, pr()).unwrap();
            assert_eq!(h.structure.q.exps(), &[n]);
            assert_eq!(h.structure.hodge_jumps().unwrap(), vec![-n]);
            assert!(h.check_tautological().unwrap());
            assert!(h.check_equivariance().unwrap());
            assert!(h.structure.check_frobenius(h.cap()).unwrap());
        }
        let u = hodge_realize(&TMotive::unit(&f), Ring::A, pr()).unwrap();
        assert_eq!(u.structure.q.exps(), &[0]);
    }

    #[test]
    fn expansion_routes_agree() {
        let f = Fq::new(2, 1).unwrap();
        let h = hodge_realize(&TMotive::carlitz_twist(&f, 1), Ring::A, pr()).unwrap();
        assert!(h.check_expansion_routes().unwrap());
    }
}
