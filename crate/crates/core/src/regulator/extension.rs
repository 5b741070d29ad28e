//! Extension classes of 1 by M given by m ∈ N_A, and canonical
//! representatives modulo (id − τ_M)(M_A).

use std::fmt;

use crate::error::{Error, Result};
use crate::field_tower::Fq;
use crate::linalg::{Echelon, FqVec};
use crate::motive::{NModule, TMotive, TauEntry};
use crate::poly::{Poly, Poly2};

#[derive(Clone, PartialEq, Eq)]
pub struct MotExtClass {
    pub m: Vec<TauEntry>,
    pub normalized: bool,
}

impl fmt::Debug for MotExtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show())
    }
}

impl MotExtClass {
    pub fn new(m: Vec<TauEntry>) -> Self {
        MotExtClass { m, normalized: false }
    }

    pub fn show(&self) -> String {
        let parts: Vec<String> = self.m.iter().map(|e| e.show()).collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.m.iter().zip(&o.m).map(|(a, b)| a.add(b)).collect())
    }

    /// a(t)·m for a ∈ A.
    pub fn scale_a(&self, a: &Poly) -> Self {
        let a = TauEntry::from_poly(Poly2::from_t_poly(a));
        Self::new(self.m.iter().map(|e| e.mul(&a)).collect())
    }
}

/// (id − τ_M)(x) for x ∈ M_A.
pub fn boundary(motive: &TMotive, x: &[Poly2]) -> Vec<TauEntry> {
    let r = motive.rank();
    let tx: Vec<TauEntry> = x.iter().map(|p| TauEntry::from_poly(p.tau())).collect();
    (0..r)
        .map(|i| {
            let mut acc = TauEntry::from_poly(x[i].clone());
            for k in 0..r {
                if !motive.tau[i][k].is_zero() && !tx[k].is_zero() {
                    acc = acc.sub(&motive.tau[i][k].mul(&tx[k]));
                }
            }
            acc
        })
        .collect()
}

/// Validates m ∈ N_A and builds the middle object [[τ_M, m],[0,1]].
pub fn ext_from_m(motive: &TMotive, na: &NModule, m: &[TauEntry]) -> Result<(MotExtClass, TMotive)> {
    if m.len() != motive.rank() {
        return Err(Error::Precondition("extension vector has wrong length".into()));
    }
    if !na.contains(m) {
        let parts: Vec<String> = m.iter().map(|e| e.show()).collect();
        return Err(Error::NotInNA(parts.join(", ")));
    }
    let middle = motive.extension_middle(m)?;
    Ok((MotExtClass::new(m.to_vec()), middle))
}

/// Monomial coordinates (component, t-degree, θ-degree) of j^P·m.
pub type ZKey = (usize, u32, u32);

pub fn scaled_coords(m: &[TauEntry], p: i64) -> Option<FqVec<ZKey>> {
    let mut out = FqVec::new();
    for (i, e) in m.iter().enumerate() {
        for ((a, b), c) in e.times_jpow(p)?.terms() {
            out.insert((i, a, b), c);
        }
    }
    Some(out)
}

pub fn from_scaled(f: &Fq, v: &FqVec<ZKey>, rank: usize, p: i64) -> Vec<TauEntry> {
    (0..rank)
        .map(|i| {
            let terms: Vec<((u32, u32), u8)> =
                v.range((i, 0, 0)..=(i, u32::MAX, u32::MAX)).map(|(&(_, a, b), &c)| ((a, b), c)).collect();
            TauEntry::new(Poly2::from_terms(f, &terms), -p)
        })
        .collect()
}

/// Echelon key for elimination: θ-degree dominates, then t-degree.
type EKey = (u32, u32, usize);

fn ekey(&(i, a, b): &ZKey) -> EKey {
    (b, a, i)
}

fn to_ekeys(v: &FqVec<ZKey>) -> FqVec<EKey> {
    v.iter().map(|(k, &c)| (ekey(k), c)).collect()
}

fn from_ekeys(v: &FqVec<EKey>) -> FqVec<ZKey> {
    v.iter().map(|(&(b, a, i), &c)| ((i, a, b), c)).collect()
}

/// Reduction modulo the boundaries (id − τ_M)(t^a θ^b e_i), a, b ≤ bound,
/// eliminating largest (θ-degree, t-degree) terms first.
#[derive(Clone, Debug)]
pub struct Normalizer {
    field: Fq,
    rank: usize,
    p: i64,
    bound: u32,
    echelon: Echelon<EKey>,
    top: Option<EKey>,
}

impl Normalizer {
    pub fn new(motive: &TMotive, bound: u32) -> Result<Self> {
        let f = motive.field.clone();
        let r = motive.rank();
        let p = motive.pole_order();
        let mut echelon = Echelon::new(&f);
        for a in 0..=bound {
            for b in 0..=bound {
                for i in 0..r {
                    let mut x = vec![Poly2::zero(&f); r];
                    x[i] = Poly2::monomial(&f, 1, a, b);
                    let z = scaled_coords(&boundary(motive, &x), p)
                        .ok_or_else(|| Error::InvalidTau("boundary exceeds the pole order".into()))?;
                    let _ = echelon.insert(to_ekeys(&z), FqVec::new());
                }
            }
        }
        let top = echelon.pivots().next_back().copied();
        Ok(Normalizer { field: f, rank: r, p, bound, echelon, top })
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn pole(&self) -> i64 {
        self.p
    }

    /// Dimension of the boundary span in the box.
    pub fn boundary_rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Reduced coordinates of j^P·m; the flag is false when terms beyond
    /// the reach of the boundary box remain.
    pub fn reduce_coords(&self, z: &FqVec<ZKey>) -> (FqVec<ZKey>, bool) {
        let (v, _) = self.echelon.reduce(to_ekeys(z), FqVec::new());
        let complete = match (v.keys().next_back(), self.top) {
            (Some(k), Some(t)) => *k <= t && k.1 <= self.bound + self.p as u32,
            (Some(_), None) => false,
            (None, _) => true,
        };
        (from_ekeys(&v), complete)
    }

    pub fn normalize(&self, c: &MotExtClass) -> Result<MotExtClass> {
        if c.m.len() != self.rank {
            return Err(Error::Precondition("extension vector has wrong length".into()));
        }
        let z = scaled_coords(&c.m, self.p)
            .ok_or_else(|| Error::NotInNA(format!("pole order exceeds {}", self.p)))?;
        let (v, complete) = self.reduce_coords(&z);
        Ok(MotExtClass { m: from_scaled(&self.field, &v, self.rank, self.p), normalized: complete })
    }

    /// Is the class of m a boundary from the box?
    pub fn is_boundary(&self, c: &MotExtClass) -> Result<bool> {
        Ok(self.normalize(c)?.is_zero())
    }
}

pub fn ext_normalize(motive: &TMotive, c: &MotExtClass, degree_bound: u32) -> Result<MotExtClass> {
    Normalizer::new(motive, degree_bound)?.normalize(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_reduction_step() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let c = MotExtClass::new(vec![TauEntry::new(Poly2::monomial(&f, 1, 0, 3), -1)]);
        let n = ext_normalize(&m, &c, 3).unwrap();
        assert!(n.normalized);
        let th = ext_normalize(&m, &MotExtClass::new(vec![TauEntry::from_poly(Poly2::theta(&f))]), 3).unwrap();
        assert_eq!(n, th);
        assert!(n.m[0].num.deg_theta() < Some(3));
        let x = vec![Poly2::monomial(&f, 2, 1, 2)];
        let b = MotExtClass::new(boundary(&m, &x));
        assert!(ext_normalize(&m, &b, 3).unwrap().is_zero());
    }
}
