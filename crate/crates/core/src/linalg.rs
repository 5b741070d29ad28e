//! Sparse F_q-linear algebra: echelon bases keyed by an ordered index set.

use std::collections::BTreeMap;

use crate::field_tower::Fq;

pub type FqVec<K> = BTreeMap<K, u8>;

/// v += a·w.
pub fn axpy<K: Ord + Copy>(f: &Fq, v: &mut FqVec<K>, a: u8, w: &FqVec<K>) {
    if a == 0 {
        return;
    }
    for (k, &c) in w {
        let e = v.entry(*k).or_insert(0);
        *e = f.add(*e, f.mul(a, c));
        if *e == 0 {
            v.remove(k);
        }
    }
}

/// Echelon basis: every row has leading (largest) key equal to its pivot
/// and coefficient 1 there. Rows also track a payload vector transformed
/// alongside (for kernel bookkeeping).
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Copy, P: Ord + Copy = K> {
    field: Fq,
    rows: BTreeMap<K, (FqVec<K>, FqVec<P>)>,
}

impl<K: Ord + Copy, P: Ord + Copy> Echelon<K, P> {
    pub fn new(field: &Fq) -> Self {
        Echelon { field: field.clone(), rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis rows keyed by pivot.
    pub fn rows(&self) -> impl DoubleEndedIterator<Item = (&K, &FqVec<K>)> {
        self.rows.iter().map(|(k, (v, _))| (k, v))
    }

    pub fn pivots(&self) -> impl DoubleEndedIterator<Item = &K> {
        self.rows.keys()
    }

    /// Reduces (v, payload) against the basis, largest pivots first; the
    /// result vanishes at every pivot and is canonical modulo the span.
    pub fn reduce(&self, mut v: FqVec<K>, mut pay: FqVec<P>) -> (FqVec<K>, FqVec<P>) {
        let f = &self.field;
        while let Some((&k, &c)) = v.iter().rev().find(|(k, _)| self.rows.contains_key(k)) {
            let (rv, rp) = &self.rows[&k];
            let a = f.neg(c);
            axpy(f, &mut v, a, rv);
            axpy(f, &mut pay, a, rp);
        }
        (v, pay)
    }

    /// Adds a vector; returns false (and the reduced payload) when it was
    /// already in the span.
    pub fn insert(&mut self, v: FqVec<K>, pay: FqVec<P>) -> Result<(), FqVec<P>> {
        let (mut v, mut pay) = self.reduce(v, pay);
        let Some((&k, &c)) = v.iter().next_back() else { return Err(pay) };
        let inv = self.field.inv(c).expect("nonzero pivot");
        for x in v.values_mut() {
            *x = self.field.mul(*x, inv);
        }
        for x in pay.values_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.rows.insert(k, (v, pay));
        Ok(())
    }

    pub fn contains(&self, v: &FqVec<K>) -> bool {
        self.reduce(v.clone(), FqVec::new()).0.is_empty()
    }
}

/// Rank of a family of vectors.
pub fn rank<K: Ord + Copy>(f: &Fq, vs: impl IntoIterator<Item = FqVec<K>>) -> usize {
    let mut e: Echelon<K> = Echelon::new(f);
    for v in vs {
        let _ = e.insert(v, FqVec::new());
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_canonical_reduction() {
        let f = Fq::new(3, 1).unwrap();
        let v = |xs: &[(u32, u8)]| xs.iter().copied().collect::<FqVec<u32>>();
        let mut e: Echelon<u32> = Echelon::new(&f);
        assert!(e.insert(v(&[(0, 1), (2, 1)]), FqVec::new()).is_ok());
        assert!(e.insert(v(&[(1, 2), (2, 2)]), FqVec::new()).is_ok());
        assert!(e.insert(v(&[(0, 1), (1, 2)]), FqVec::new()).is_err());
        assert_eq!(e.rank(), 2);
        let a = e.reduce(v(&[(2, 1)]), FqVec::new()).0;
        let b = e.reduce(v(&[(0, 2)]), FqVec::new()).0;
        assert_eq!(a, b);
        assert_eq!(rank(&f, [v(&[(5, 1)]), v(&[(5, 2)])]), 1);
    }
}
