//! Comparison of rank_A Ext^{1,reg}_{A,∞}(1, M) with
//! dim_K∞ Ext^{1,ha}_∞(1⁺, H⁺(M)).
//!
//! The left side is estimated on boxes: S_d is the F_q-span of the classes
//! t^a θ^b·g (a ≤ d, b ≤ D, g running over generators of N_A) with
//! vanishing r_B-obstruction, modulo boundaries. Its dimension grows by
//! rank_A per unit of d once the box contains generators of the module.

use serde::Serialize;

use crate::betti::H1Solver;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, FqVec};
use crate::motive::{compute_na, IntegralModel, TMotive, TauEntry};
use crate::poly::Poly2;
use crate::tate::Precision;

use super::extension::{boundary, scaled_coords, ZKey};
use super::gamma::hodge_realize;
use super::plus::PlusPresentation;
use crate::hodge_pink::structure::Ring;

type ObKey = (usize, usize, i64);

/// Obstruction coordinates sort above class coordinates, so echelon rows
/// with a class pivot have vanishing obstruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Z(ZKey),
    Ob(ObKey),
}

#[derive(Clone, Debug, Serialize)]
pub struct RankDimReport {
    pub lhs: Option<usize>,
    /// (d, dim_F_q S_d).
    pub lhs_dims: Vec<(u32, usize)>,
    pub stabilized: bool,
    pub theta_bound: u32,
    /// Box elements whose obstruction was undetermined (excluded).
    pub flagged: usize,
    pub rhs: usize,
    pub plus_rank: usize,
    pub prec_t: usize,
    pub prec_u: i64,
    pub prec_j: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RankDimOptions {
    pub theta_bound: u32,
    pub max_t: u32,
}

impl Default for RankDimOptions {
    fn default() -> Self {
        RankDimOptions { theta_bound: 4, max_t: 6 }
    }
}

/// Three consecutive equal increments.
pub fn stable_increment(dims: &[(u32, usize)]) -> Option<usize> {
    let inc: Vec<i64> = dims.windows(2).map(|w| w[1].1 as i64 - w[0].1 as i64).collect();
    inc.windows(3).find(|w| w[0] == w[1] && w[1] == w[2] && w[0] >= 0).map(|w| w[0] as usize)
}

pub fn rank_dim_lhs(m: &TMotive, prec: Precision, opts: RankDimOptions) -> Result<(Vec<(u32, usize)>, usize)> {
    let f = m.field.clone();
    let r = m.rank();
    let na = compute_na(m, &IntegralModel::standard(m))?;
    let p = na.denom;
    let solver = H1Solver::new(m, prec)?;
    let gens = na.generators();
    let mut kernel: Echelon<Key> = Echelon::new(&f);
    let mut bounds: Echelon<ZKey> = Echelon::new(&f);
    let mut next_boundary_t = 0u32;
    let mut flagged = 0;
    let mut dims = Vec::new();
    for d in 0..=opts.max_t {
        for b in 0..=opts.theta_bound {
            let mono = TauEntry::from_poly(Poly2::monomial(&f, 1, d, b));
            for g in &gens {
                let x: Vec<TauEntry> = g.iter().map(|e| e.mul(&mono)).collect();
                let z = scaled_coords(&x, p).ok_or_else(|| Error::NotInNA("generator exceeds the pole order".into()))?;
                let series: Vec<_> = x.iter().map(|e| e.to_series(&f, prec)).collect();
                let (ob, determined) = solver.obstruction(&series)?;
                if !determined {
                    flagged += 1;
                    continue;
                }
                let mut v: FqVec<Key> = z.into_iter().map(|(k, c)| (Key::Z(k), c)).collect();
                v.extend(ob.into_iter().map(|(k, c)| (Key::Ob(k), c)));
                let _ = kernel.insert(v, FqVec::new());
            }
        }
        while next_boundary_t <= d + p as u32 {
            for b in 0..=opts.theta_bound {
                for i in 0..r {
                    let mut x = vec![Poly2::zero(&f); r];
                    x[i] = Poly2::monomial(&f, 1, next_boundary_t, b);
                    let z = scaled_coords(&boundary(m, &x), p).ok_or_else(|| Error::InvalidTau("boundary exceeds the pole order".into()))?;
                    let _ = bounds.insert(z, FqVec::new());
                }
            }
            next_boundary_t += 1;
        }
        let k_rows: Vec<FqVec<ZKey>> = kernel
            .rows()
            .filter_map(|(piv, v)| match piv {
                Key::Z(_) => Some(v.iter().map(|(k, &c)| match k {
                    Key::Z(z) => (*z, c),
                    Key::Ob(_) => unreachable!("class pivot rows carry no obstruction"),
                }).collect()),
                Key::Ob(_) => None,
            })
            .collect();
        let dim_k = k_rows.len();
        let mut sum = bounds.clone();
        for v in k_rows {
            let _ = sum.insert(v, FqVec::new());
        }
        let inter = bounds.rank() + dim_k - sum.rank();
        dims.push((d, dim_k - inter));
    }
    Ok((dims, flagged))
}

pub fn rank_dim_compare(m: &TMotive, prec: Precision, opts: RankDimOptions) -> Result<RankDimReport> {
    if !m.weights_all_negative()? {
        return Err(Error::Precondition(format!("weights of {} are not all negative", m.name)));
    }
    let plus = PlusPresentation::new(hodge_realize(m, Ring::KInf, prec)?)?;
    let (rhs, _) = plus.dim()?;
    let (dims, flagged) = rank_dim_lhs(m, prec, opts)?;
    let lhs = stable_increment(&dims);
    Ok(RankDimReport {
        lhs,
        stabilized: lhs.is_some(),
        lhs_dims: dims,
        theta_bound: opts.theta_bound,
        flagged,
        rhs,
        plus_rank: plus.plus_rank(),
        prec_t: prec.t,
        prec_u: prec.u,
        prec_j: prec.j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;

    #[test]
    fn unit_motive_is_rejected() {
        let f = Fq::new(3, 1).unwrap();
        let e = rank_dim_compare(&TMotive::unit(&f), Precision::default(), RankDimOptions::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn increments_stabilize() {
        assert_eq!(stable_increment(&[(0, 1), (1, 3), (2, 4), (3, 5), (4, 6)]), Some(1));
        assert_eq!(stable_increment(&[(0, 1), (1, 3), (2, 4)]), None);
    }

    #[test]
    fn first_twist_matches() {
        let f = Fq::new(3, 1).unwrap();
        let pr = Precision { t: 24, u: 48, j: 8 };
        let rep = rank_dim_compare(&TMotive::carlitz_twist(&f, 1), pr, RankDimOptions { theta_bound: 2, max_t: 4 }).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (Some(1), 1));
    }
}
