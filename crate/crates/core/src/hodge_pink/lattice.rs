//! L[[j]]-lattices in L((j))^r in Hermite normal form.
//!
//! A lattice is stored by an upper-triangular basis whose i-th column has
//! the exact entry j^{e_i} in row i; entries above the diagonal only carry
//! exponents below the pivot exponent of their row. This form is unique,
//! so lattices compare by their bases, and it gives canonical
//! representatives of vectors modulo the lattice.

use crate::error::{Error, Result};
use crate::tate::Coeff;

use super::jseries::JSeries;

pub type JVec<C> = Vec<JSeries<C>>;

/// Matrix stored as a list of columns.
pub type JCols<C> = Vec<JVec<C>>;

#[derive(Clone, Debug)]
pub struct Lattice<C: Coeff> {
    cols: JCols<C>,
    exps: Vec<i64>,
}

pub fn vec_add<C: Coeff>(a: &[JSeries<C>], b: &[JSeries<C>]) -> JVec<C> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}
pub fn vec_sub<C: Coeff>(a: &[JSeries<C>], b: &[JSeries<C>]) -> JVec<C> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}
pub fn vec_scale<C: Coeff>(a: &[JSeries<C>], s: &JSeries<C>) -> JVec<C> {
    a.iter().map(|x| x.mul(s)).collect()
}
pub fn vec_is_zero<C: Coeff>(a: &[JSeries<C>]) -> bool {
    a.iter().all(|x| x.is_zero())
}
/// Matrix (columns) times vector.
pub fn mat_vec<C: Coeff>(m: &JCols<C>, v: &[JSeries<C>]) -> JVec<C> {
    let rows = m.first().map(|c| c.len()).unwrap_or(0);
    let z = v[0].zero_coeff().clone();
    let nj = v[0].nj();
    let mut out = vec![JSeries::zero(z, nj); rows];
    for (c, x) in m.iter().zip(v) {
        if x.is_zero() && x.is_exact() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(c) {
            *o = o.add(&y.mul(x));
        }
    }
    out
}
pub fn mat_mul<C: Coeff>(a: &JCols<C>, b: &JCols<C>) -> JCols<C> {
    b.iter().map(|c| mat_vec(a, c)).collect()
}

/// Inverse of an upper-triangular matrix (columns) with invertible diagonal.
pub fn upper_inverse<C: Coeff>(m: &JCols<C>) -> Result<JCols<C>> {
    let r = m.len();
    let z = m[0][0].zero_coeff().clone();
    let nj = m[0][0].nj();
    let dinv: Vec<JSeries<C>> = (0..r).map(|i| m[i][i].inv()).collect::<Result<_>>()?;
    let mut x: JCols<C> = vec![vec![JSeries::zero(z.clone(), nj); r]; r];
    for c in 0..r {
        for i in (0..=c).rev() {
            let mut acc = if i == c { JSeries::one(&z, nj) } else { JSeries::zero(z.clone(), nj) };
            for k in i + 1..=c {
                acc = acc.sub(&m[k][i].mul(&x[c][k]));
            }
            x[c][i] = acc.mul(&dinv[i]);
        }
    }
    Ok(x)
}

pub fn transpose<C: Coeff>(m: &JCols<C>) -> JCols<C> {
    let rows = m.first().map(|c| c.len()).unwrap_or(0);
    (0..rows).map(|i| m.iter().map(|c| c[i].clone()).collect()).collect()
}

impl<C: Coeff> Lattice<C> {
    /// The lattice generated by the given vectors (must have full rank).
    pub fn from_generators(r: usize, gens: &[JVec<C>]) -> Result<Self> {
        let mut cols: Vec<JVec<C>> = gens.iter().filter(|g| !vec_is_zero(g)).cloned().collect();
        let mut out: Vec<Option<JVec<C>>> = vec![None; r];
        let mut exps = vec![0i64; r];
        for row in (0..r).rev() {
            let best = cols
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c[row].valuation().map(|v| (v, i)))
                .min_by_key(|&(v, i)| (v, i));
            let Some((v0, bi)) = best else {
                return Err(Error::Precondition(format!("generators do not span a lattice (row {row})")));
            };
            let piv = cols.remove(bi);
            let unit = piv[row].shift(-v0).inv()?;
            let mut piv = vec_scale(&piv, &unit);
            let like = piv[row].zero_coeff().clone();
            let nj = piv[row].nj();
            piv[row] = JSeries::jpow(&like, v0, nj);
            for c in cols.iter_mut() {
                if c[row].is_zero() {
                    c[row] = JSeries::zero(like.clone(), nj);
                    continue;
                }
                let coef = c[row].shift(-v0);
                *c = vec_sub(c, &vec_scale(&piv, &coef));
                c[row] = JSeries::zero(like.clone(), nj);
            }
            cols.retain(|c| !vec_is_zero(c));
            exps[row] = v0;
            out[row] = Some(piv);
        }
        let mut cols: JCols<C> = out.into_iter().map(|c| c.unwrap()).collect();
        for k in 0..r {
            for i in 0..r {
                if i > k {
                    let like = cols[k][i].zero_coeff().clone();
                    cols[k][i] = JSeries::zero(like, cols[k][i].nj());
                }
            }
            for i in (0..k).rev() {
                let high = cols[k][i].at_or_above(exps[i]);
                if high.is_zero() {
                    cols[k][i] = cols[k][i].below(exps[i]);
                    continue;
                }
                let coef = high.shift(-exps[i]);
                let sub = vec_scale(&cols[i], &coef);
                cols[k] = vec_sub(&cols[k], &sub);
                cols[k][i] = cols[k][i].below(exps[i]);
            }
        }
        Ok(Lattice { cols, exps })
    }

    /// L[[j]]^r.
    pub fn standard(r: usize, like: &C, nj: i64) -> Self {
        let cols = (0..r)
            .map(|c| (0..r).map(|i| if i == c { JSeries::one(like, nj) } else { JSeries::zero(like.zero_like(), nj) }).collect())
            .collect();
        Lattice { cols, exps: vec![0; r] }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }
    pub fn basis(&self) -> &JCols<C> {
        &self.cols
    }
    /// Pivot exponents of the Hermite form.
    pub fn exps(&self) -> &[i64] {
        &self.exps
    }
    /// Σ e_i: the index [L[[j]]^r : Λ] as a signed length.
    pub fn volume(&self) -> i64 {
        self.exps.iter().sum()
    }

    /// j^k·Λ.
    pub fn scaled(&self, k: i64) -> Self {
        let cols = self.cols.iter().map(|c| c.iter().map(|x| x.shift(k)).collect()).collect();
        Lattice { cols, exps: self.exps.iter().map(|e| e + k).collect() }
    }

    /// Canonical representative of v modulo Λ: row i keeps exponents < e_i.
    pub fn reduce(&self, v: &[JSeries<C>]) -> JVec<C> {
        let mut v = v.to_vec();
        for i in (0..self.rank()).rev() {
            let high = v[i].at_or_above(self.exps[i]);
            if !high.is_zero() {
                let coef = high.shift(-self.exps[i]);
                v = vec_sub(&v, &vec_scale(&self.cols[i], &coef));
            }
            v[i] = v[i].below(self.exps[i]);
        }
        v
    }

    /// Coordinates of v in the basis, when v ∈ Λ.
    pub fn coordinates(&self, v: &[JSeries<C>]) -> Option<JVec<C>> {
        let r = self.rank();
        let mut v = v.to_vec();
        let like = v[0].zero_coeff().clone();
        let nj = v[0].nj();
        let mut out = vec![JSeries::zero(like, nj); r];
        for i in (0..r).rev() {
            let coef = v[i].shift(-self.exps[i]);
            if coef.valuation().is_some_and(|x| x < 0) {
                return None;
            }
            v = vec_sub(&v, &vec_scale(&self.cols[i], &coef));
            out[i] = coef;
        }
        Some(out)
    }

    pub fn contains(&self, v: &[JSeries<C>]) -> bool {
        vec_is_zero(&self.reduce(v))
    }

    pub fn contains_lattice(&self, o: &Lattice<C>) -> bool {
        o.cols.iter().all(|c| self.contains(c))
    }

    pub fn same_as(&self, o: &Lattice<C>) -> bool {
        self.contains_lattice(o) && o.contains_lattice(self)
    }

    pub fn sum(&self, o: &Lattice<C>) -> Result<Self> {
        let gens: Vec<JVec<C>> = self.cols.iter().chain(o.cols.iter()).cloned().collect();
        Self::from_generators(self.rank(), &gens)
    }

    /// Dual lattice {x : x^T·Λ ⊆ L[[j]]}, with basis (B^T)^{−1}.
    pub fn dual(&self) -> Result<Self> {
        let inv = upper_inverse(&self.cols)?;
        let dual_cols = transpose(&inv);
        Self::from_generators(self.rank(), &dual_cols)
    }

    pub fn intersect(&self, o: &Lattice<C>) -> Result<Self> {
        self.dual()?.sum(&o.dual()?)?.dual()
    }

    /// g·Λ for an invertible matrix g (columns).
    pub fn transform(&self, g: &JCols<C>) -> Result<Self> {
        Self::from_generators(self.rank(), &mat_mul(g, &self.cols))
    }

    /// Smallest M with j^M·L[[j]]^r ⊆ Λ and largest m with Λ ⊆ j^m·L[[j]]^r.
    pub fn bounds(&self) -> Result<(i64, i64)> {
        let inv = upper_inverse(&self.cols)?;
        let minv = |m: &JCols<C>| m.iter().flatten().filter_map(|x| x.valuation()).min().unwrap_or(0);
        Ok((-minv(&inv), minv(&self.cols)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::{Fq, Laurent};
    use crate::hodge_pink::jseries::EXACT;

    fn lc(f: &Fq, terms: &[(i64, u8)]) -> Laurent {
        Laurent::from_terms(f, terms, 40)
    }
    fn js(f: &Fq, v: i64, cs: &[&[(i64, u8)]]) -> JSeries<Laurent> {
        JSeries::new(lc(f, &[]), v, cs.iter().map(|t| lc(f, t)).collect(), EXACT, 12)
    }

    #[test]
    fn hermite_form_and_membership() {
        let f = Fq::new(3, 1).unwrap();
        // generators (j, 1 + θj), (0, j^2)
        let g1 = vec![js(&f, 1, &[&[(0, 1)]]), js(&f, 0, &[&[(0, 1)], &[(-1, 1)]])];
        let g2 = vec![js(&f, 0, &[]), js(&f, 2, &[&[(0, 1)]])];
        let lat = Lattice::from_generators(2, &[g1.clone(), g2]).unwrap();
        assert_eq!(lat.exps(), &[3, 0]);
        assert_eq!(lat.volume(), 3);
        assert!(lat.contains(&g1));
        let e1 = vec![js(&f, 0, &[&[(0, 1)]]), js(&f, 0, &[])];
        assert!(!lat.contains(&e1));
        let std = Lattice::standard(2, &lc(&f, &[]), 12);
        let inter = lat.intersect(&std).unwrap();
        assert!(inter.same_as(&lat));
        let s = lat.sum(&std).unwrap();
        assert!(s.same_as(&std));
    }

    #[test]
    fn dual_of_scaled_standard() {
        let f = Fq::new(2, 1).unwrap();
        let std = Lattice::standard(2, &lc(&f, &[]), 8);
        let d = std.scaled(3).dual().unwrap();
        assert_eq!(d.exps(), &[-3, -3]);
    }
}
