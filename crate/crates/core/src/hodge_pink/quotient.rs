//! Canonical representatives in quotients K∞((j))^N / (Λ + R-span of ν(w_i)).
//!
//! The ring isomorphism φ: K∞((j)) → K∞((j)), Σ ν(a_k) j^k ↦ Σ a_k j^k,
//! turns ν-images of R-vectors into constant vectors, so after φ the
//! quotient is by a lattice plus an R-span of explicit vectors, which is
//! handled by Gaussian elimination on lattice-reduced coordinates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field_tower::Laurent;
use crate::tate::Coeff;

use super::jseries::{nu_coordinates, JSeries, EXACT};
use super::lattice::{JVec, Lattice};
use super::structure::Ring;

/// Finite coordinate vector: (row, j-exponent) ↦ coefficient.
pub type KVec = BTreeMap<(usize, i64), Laurent>;

/// φ(w): the ν-adapted coordinates of w as a j-series.
pub fn phi(w: &JSeries<Laurent>) -> JSeries<Laurent> {
    let Some(v) = w.valuation() else { return w.clone() };
    let nj = w.nj();
    // θ-polynomial coefficients have finitely many nonzero Hasse derivatives
    let poly_deg = w
        .terms()
        .map(|(_, c)| if c.is_exact() && c.terms().all(|(e, _)| e <= 0) { c.terms().map(|(e, _)| -e).max() } else { None })
        .try_fold(0i64, |m, d| d.map(|d| m.max(d)));
    let (upper, prec) = match (w.is_exact(), poly_deg) {
        (true, Some(d)) => (w.top().unwrap_or(v) + d + 1, EXACT),
        _ => {
            let p = w.prec().min(v + nj);
            (p, p)
        }
    };
    let coeffs: Vec<Laurent> = nu_coordinates(w, upper).into_iter().map(|(_, c)| c).collect();
    JSeries::new(w.zero_coeff().clone(), v, coeffs, prec, nj)
}

pub fn phi_vec(v: &[JSeries<Laurent>]) -> JVec<Laurent> {
    v.iter().map(phi).collect()
}

pub fn phi_lattice(l: &Lattice<Laurent>) -> Result<Lattice<Laurent>> {
    let cols: Vec<JVec<Laurent>> = l.basis().iter().map(|c| phi_vec(c)).collect();
    Lattice::from_generators(l.rank(), &cols)
}

/// Coordinates of a lattice-reduced vector; fails when a kept coefficient
/// is beyond the known precision.
pub fn to_kvec(v: &[JSeries<Laurent>]) -> Result<KVec> {
    let mut out = KVec::new();
    for (i, x) in v.iter().enumerate() {
        if !x.is_exact() {
            return Err(Error::Undetermined(format!("row {i} of a reduced vector is only known modulo j^{}", x.prec())));
        }
        for (k, c) in x.terms() {
            out.insert((i, k), c.clone());
        }
    }
    Ok(out)
}

pub fn from_kvec(k: &KVec, rows: usize, like: &Laurent, nj: i64) -> JVec<Laurent> {
    (0..rows)
        .map(|i| {
            k.range((i, i64::MIN)..=(i, i64::MAX))
                .fold(JSeries::zero(like.zero_like(), nj), |acc, ((_, e), c)| acc.add(&JSeries::monomial(c.clone(), *e, nj)))
        })
        .collect()
}

fn kv_axpy(a: &mut KVec, c: &Laurent, b: &KVec) {
    for (pos, x) in b {
        let y = c.mul(x);
        let e = a.entry(*pos).or_insert_with(|| y.zero_like());
        *e = e.sub(&y);
        if e.is_zero() {
            a.remove(pos);
        }
    }
}

/// Pivot order: highest row first, then lowest exponent.
fn leading(v: &KVec) -> Option<(usize, i64)> {
    v.keys().copied().min_by_key(|&(r, e)| (std::cmp::Reverse(r), e))
}

pub fn kvec_eq(a: &KVec, b: &KVec) -> bool {
    let mut d = a.clone();
    for (pos, x) in b {
        let e = d.entry(*pos).or_insert_with(|| x.zero_like());
        *e = e.sub(x);
    }
    d.values().all(|x| x.is_zero())
}

#[derive(Clone, Debug)]
struct Echelon {
    pivot: (usize, i64),
    vec: KVec,
    /// Expression of `vec` in the original generators.
    comb: Vec<Laurent>,
}

#[derive(Clone, Debug)]
pub struct QuotientForm {
    ring: Ring,
    lattice: Lattice<Laurent>,
    gens: Vec<KVec>,
    echelon: Vec<Echelon>,
}

impl QuotientForm {
    /// Quotient by the lattice `lattice` (already in φ-coordinates) and the
    /// R-span of the constant vectors `gens` (φ-images of ν(w_i)).
    pub fn new(ring: Ring, lattice: Lattice<Laurent>, gens: &[JVec<Laurent>]) -> Result<Self> {
        if ring == Ring::K {
            return Err(Error::UnsupportedShape("quotient normal forms over K are not implemented".into()));
        }
        let mut kept = Vec::new();
        for g in gens {
            let kv = to_kvec(&lattice.reduce(g))?;
            if !kv.is_empty() {
                kept.push(kv);
            }
        }
        let n = kept.len();
        let mut echelon: Vec<Echelon> = Vec::new();
        for (i, g) in kept.iter().enumerate() {
            let mut v = g.clone();
            let mut comb: Vec<Laurent> = (0..n).map(|k| {
                let z = g.values().next().unwrap().zero_like();
                if k == i { z.one_like() } else { z }
            }).collect();
            for e in &echelon {
                if let Some(c) = v.get(&e.pivot).cloned() {
                    kv_axpy(&mut v, &c, &e.vec);
                    for (x, y) in comb.iter_mut().zip(&e.comb) {
                        *x = x.sub(&c.mul(y));
                    }
                }
            }
            let Some(pivot) = leading(&v) else {
                if ring == Ring::A {
                    return Err(Error::UnsupportedShape("A-span of linearly dependent classes".into()));
                }
                continue;
            };
            let inv = v[&pivot].inv()?;
            for x in v.values_mut() {
                *x = x.mul(&inv);
            }
            for x in comb.iter_mut() {
                *x = x.mul(&inv);
            }
            for e in echelon.iter_mut() {
                if let Some(c) = e.vec.get(&pivot).cloned() {
                    kv_axpy(&mut e.vec, &c, &v);
                    for (x, y) in e.comb.iter_mut().zip(&comb) {
                        *x = x.sub(&c.mul(y));
                    }
                }
            }
            echelon.push(Echelon { pivot, vec: v, comb });
        }
        Ok(QuotientForm { ring, lattice, gens: kept, echelon })
    }

    pub fn lattice(&self) -> &Lattice<Laurent> {
        &self.lattice
    }

    /// Rank over K∞ of the image of the generators modulo the lattice.
    pub fn span_rank(&self) -> usize {
        self.echelon.len()
    }

    /// Canonical representative of v (given in φ-coordinates).
    pub fn normal_form(&self, v: &[JSeries<Laurent>]) -> Result<KVec> {
        let mut kv = to_kvec(&self.lattice.reduce(v))?;
        match self.ring {
            Ring::KInf => {
                for e in &self.echelon {
                    if let Some(c) = kv.get(&e.pivot).cloned() {
                        kv_axpy(&mut kv, &c, &e.vec);
                    }
                }
            }
            Ring::A => {
                let n = self.gens.len();
                let Some(z) = self.gens.first().and_then(|g| g.values().next()).map(|x| x.zero_like()) else {
                    return Ok(kv);
                };
                let mut coords = vec![z; n];
                for e in &self.echelon {
                    if let Some(x) = kv.get(&e.pivot) {
                        for (c, y) in coords.iter_mut().zip(&e.comb) {
                            *c = c.add(&x.mul(y));
                        }
                    }
                }
                for (c, g) in coords.iter().zip(&self.gens) {
                    // polynomial part in θ: exponents ≤ 0 in π = 1/θ
                    let a = c.below(1);
                    if !a.is_zero() {
                        kv_axpy(&mut kv, &a, g);
                    }
                }
            }
            Ring::K => unreachable!(),
        }
        kv.retain(|_, x| !x.is_zero());
        Ok(kv)
    }

    /// K∞-dimension of (M + Λ)/(Λ + span) for a lattice M (φ-coordinates)
    /// containing the generators, with a basis of representatives.
    pub fn finite_part(&self, m: &Lattice<Laurent>) -> Result<(usize, Vec<KVec>)> {
        let big = m.sum(&self.lattice)?;
        let pivots: Vec<(usize, i64)> = self.echelon.iter().map(|e| e.pivot).collect();
        let mut basis = Vec::new();
        for (i, col) in big.basis().iter().enumerate() {
            let (lo, hi) = (big.exps()[i], self.lattice.exps()[i]);
            for m in 0..(hi - lo) {
                if pivots.contains(&(i, lo + m)) {
                    continue;
                }
                let v: JVec<Laurent> = col.iter().map(|x| x.shift(m)).collect();
                basis.push(self.normal_form(&v)?);
            }
        }
        Ok((basis.len(), basis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;
    use crate::hodge_pink::jseries::nu_kinf;

    #[test]
    fn phi_sends_nu_to_constants() {
        let f = Fq::new(3, 1).unwrap();
        let c = Laurent::from_terms(&f, &[(-2, 1), (1, 2)], 40);
        let w = nu_kinf(&c, 10).shift(-1);
        let p = phi(&w);
        assert_eq!(p.valuation(), Some(-1));
        assert_eq!(p.coeff(-1), c);
        for k in 0..8 {
            assert!(p.coeff(k).is_zero());
        }
    }

    #[test]
    fn rank_one_twist_quotients() {
        // K∞((j)) / (j^3 K∞[[j]] + ν(R)) : j^0 is killed over K∞, only its
        // polynomial part over A
        let f = Fq::new(3, 1).unwrap();
        let like = Laurent::zero_with_cap(&f, 40, 40);
        let lat = Lattice::standard(1, &like, 12).scaled(3);
        let one = vec![JSeries::one(&like, 12)];
        let qk = QuotientForm::new(Ring::KInf, lat.clone(), std::slice::from_ref(&one)).unwrap();
        let (dim, _) = qk.finite_part(&Lattice::standard(1, &like, 12)).unwrap();
        assert_eq!(dim, 2);
        let v = vec![JSeries::monomial(Laurent::from_terms(&f, &[(-1, 1), (2, 1)], 40), 0, 12)];
        assert!(qk.normal_form(&v).unwrap().is_empty());
        let qa = QuotientForm::new(Ring::A, lat, &[one]).unwrap();
        let nf = qa.normal_form(&v).unwrap();
        assert_eq!(nf.len(), 1);
        assert_eq!(nf[&(0, 0)], Laurent::from_terms(&f, &[(2, 1)], 40));
    }
}
