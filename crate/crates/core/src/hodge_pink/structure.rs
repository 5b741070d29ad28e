//! Hodge–Pink structures (H, q_H, φ_H) with H free over R ∈ {A, K, K∞}.

use std::fmt;

use crate::error::{Error, Result};
use crate::field_tower::{GaloisElem, LElem, Laurent};
use crate::poly::pid::PMat;
use crate::tate::Coeff;

use super::jseries::{nu_poly, JSeries};
use super::lattice::{mat_vec, JCols, Lattice};

/// Coefficient ring of the underlying module H.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Ring {
    A,
    K,
    KInf,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::A => "A",
            Ring::K => "K",
            Ring::KInf => "Kinf",
        })
    }
}

/// Coefficient fields carrying a Galois action over K∞.
pub trait GaloisCoeff: Coeff {
    fn apply(&self, g: &GaloisElem) -> Result<Self>;
    fn from_kinf(like: &Self, x: &Laurent) -> Self;
}

impl GaloisCoeff for Laurent {
    fn apply(&self, _g: &GaloisElem) -> Result<Self> {
        Ok(self.clone())
    }
    fn from_kinf(_like: &Self, x: &Laurent) -> Self {
        x.clone()
    }
}

impl GaloisCoeff for LElem {
    fn apply(&self, g: &GaloisElem) -> Result<Self> {
        self.galois(g)
    }
    fn from_kinf(like: &Self, x: &Laurent) -> Self {
        like.tower().from_kinf(x)
    }
}

/// ν(a) for a matrix over A, embedded in L[[j]].
pub fn nu_matrix<C: GaloisCoeff>(like: &C, m: &PMat, cap: i64, nj: i64) -> JCols<C> {
    let r = m.len();
    (0..r)
        .map(|c| (0..r).map(|i| nu_poly(&m[i][c], cap, nj).map_to(like)).collect())
        .collect()
}

impl JSeries<Laurent> {
    /// Embeds a K∞-series into L((j)).
    pub fn map_to<C: GaloisCoeff>(&self, like: &C) -> JSeries<C> {
        self.try_map(like.zero_like(), |x| Ok(C::from_kinf(like, x))).expect("embedding is infallible")
    }
}

#[derive(Clone, Debug)]
pub struct HodgePinkStructure<C: Coeff> {
    pub ring: Ring,
    pub q: Lattice<C>,
    /// Action of generators of Gal(L/K∞) on H, as matrices over A in the
    /// fixed basis of H.
    pub frobenius: Vec<(GaloisElem, PMat)>,
}

impl<C: Coeff> HodgePinkStructure<C> {
    pub fn new(ring: Ring, q: Lattice<C>) -> Self {
        HodgePinkStructure { ring, q, frobenius: vec![] }
    }

    pub fn with_frobenius(mut self, frobenius: Vec<(GaloisElem, PMat)>) -> Self {
        self.frobenius = frobenius;
        self
    }

    /// The unit object 1 (or 1⁺): rank 1 with q = p.
    pub fn unit(ring: Ring, like: &C, nj: i64) -> Self {
        Self::new(ring, Lattice::standard(1, like, nj))
    }

    pub fn rank(&self) -> usize {
        self.q.rank()
    }

    pub fn like(&self) -> C {
        self.q.basis()[0][0].zero_coeff().clone()
    }

    pub fn nj(&self) -> i64 {
        self.q.basis()[0][0].nj()
    }

    /// The tautological lattice p_H = H ⊗ L[[j]].
    pub fn p(&self) -> Lattice<C> {
        Lattice::standard(self.rank(), &self.like(), self.nj())
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self> {
        if self.ring != o.ring {
            return Err(Error::Precondition("direct sum of structures over different rings".into()));
        }
        let (r1, r2) = (self.rank(), o.rank());
        let like = self.like();
        let nj = self.nj();
        let zero = || JSeries::zero(like.zero_like(), nj);
        let mut gens = Vec::new();
        for c in self.q.basis() {
            let mut v = c.clone();
            v.extend((0..r2).map(|_| zero()));
            gens.push(v);
        }
        for c in o.q.basis() {
            let mut v: Vec<JSeries<C>> = (0..r1).map(|_| zero()).collect();
            v.extend(c.iter().cloned());
            gens.push(v);
        }
        let q = Lattice::from_generators(r1 + r2, &gens)?;
        Ok(Self::new(self.ring, q))
    }

    /// dim_L Fil^p H_L, where Fil^p is the image of p_H ∩ j^p q_H in p_H/j p_H.
    pub fn fil_dim(&self, p: i64) -> Result<usize> {
        let pl = self.p();
        let inter = pl.intersect(&self.q.scaled(p))?;
        let span = inter.sum(&pl.scaled(1))?;
        Ok(span.exps().iter().filter(|&&e| e == 0).count())
    }

    /// (p, dim Fil^p) over a range containing every jump, decreasing in p.
    pub fn hodge_filtration(&self) -> Result<Vec<(i64, usize)>> {
        let (big, small) = self.q.bounds()?;
        (-big..=1 - small).map(|p| Ok((p, self.fil_dim(p)?))).collect()
    }

    /// Hodge weights with multiplicity: p appears dim Fil^p − dim Fil^{p+1} times.
    pub fn hodge_jumps(&self) -> Result<Vec<i64>> {
        let fil = self.hodge_filtration()?;
        let mut out = Vec::new();
        for w in fil.windows(2) {
            for _ in 0..w[0].1 - w[1].1 {
                out.push(w[0].0);
            }
        }
        Ok(out)
    }
}

impl<C: GaloisCoeff> HodgePinkStructure<C> {
    /// (φ(σ) ⊗ σ)(q) ⊆ q for every Galois generator.
    pub fn check_frobenius(&self, cap: i64) -> Result<bool> {
        let like = self.like();
        let nj = self.nj();
        for (g, a) in &self.frobenius {
            let na = nu_matrix(&like, a, cap, nj);
            for col in self.q.basis() {
                let sc: Vec<JSeries<C>> = col.iter().map(|x| x.try_map(like.zero_like(), |c| c.apply(g))).collect::<Result<_>>()?;
                if !self.q.contains(&mat_vec(&na, &sc)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;

    fn like(f: &Fq) -> Laurent {
        Laurent::zero_with_cap(f, 40, 40)
    }

    #[test]
    fn unit_and_twisted_filtrations() {
        let f = Fq::new(3, 1).unwrap();
        let one = HodgePinkStructure::unit(Ring::KInf, &like(&f), 12);
        assert_eq!(one.hodge_jumps().unwrap(), vec![0]);
        assert_eq!(one.fil_dim(0).unwrap(), 1);
        assert_eq!(one.fil_dim(1).unwrap(), 0);
        for n in [-3i64, 2, 5] {
            let h = HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like(&f), 12).scaled(n));
            assert_eq!(h.hodge_jumps().unwrap(), vec![-n]);
        }
        let a = HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like(&f), 12).scaled(2));
        let s = a.direct_sum(&one).unwrap();
        let mut j = s.hodge_jumps().unwrap();
        j.sort();
        assert_eq!(j, vec![-2, 0]);
    }
}
