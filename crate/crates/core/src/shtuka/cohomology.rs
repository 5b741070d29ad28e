//! H⁰ and H¹ of G_M = [M⊗K∞⟨t⟩/M_A → M⊗K∞⟨t⟩/N_A] on slices, by two
//! routes:
//!
//! * route G works with the complex itself and the cokernel solver for
//!   id − τ_M on M⊗K∞⟨t⟩;
//! * route cone works with the Čech complexes of 𝓜 and 𝓝 on the cover
//!   {Spec A⊗A, Spec O∞⟨A⟩} and the long exact sequence of their cone.
//!
//! A slice is the reduction modulo t^{d+1} (exact: τ commutes with t and
//! every term is t-torsion free) together with a bound D on the θ-degree
//! of the generators used; a value is reported once it is stable over
//! three consecutive D.

use serde::Serialize;

use crate::betti::H1Solver;
use crate::error::{Error, Result};
use crate::field_tower::{Fq, Laurent};
use crate::linalg::{Echelon, FqVec};
use crate::motive::{TMotive, TauEntry};
use crate::poly::Poly2;
use crate::regulator::extension::boundary;
use crate::regulator::rankdim::stable_increment;
use crate::tate::{Precision, TateSeries};

use super::model::{degree_excess, ShtukaModel};

/// (component, t-degree, 1/θ-exponent).
pub type SKey = (usize, usize, i64);
type ObKey = (usize, usize, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Z(SKey),
    Ob(ObKey),
}

pub type SVec = Vec<TateSeries<Laurent>>;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SliceOptions {
    /// Slices d = 0..=max_d (reduction modulo t^{d+1}).
    pub max_d: u32,
    /// θ-degree bounds D = 0..=max(max_theta, P + 2) for pole order P.
    pub max_theta: u32,
    /// 1/θ-adic cap; must exceed every exponent occurring in the boxes.
    pub cap: i64,
}

impl Default for SliceOptions {
    fn default() -> Self {
        SliceOptions { max_d: 4, max_theta: 5, cap: 64 }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SliceTable {
    pub d: u32,
    /// (D, dim H⁰, dim H¹) for each θ-degree bound.
    pub by_bound: Vec<(u32, i64, i64)>,
    pub h0: Option<i64>,
    pub h1: Option<i64>,
}

fn stable3(xs: &[i64]) -> Option<i64> {
    xs.windows(3).find(|w| w[0] == w[1] && w[1] == w[2]).map(|w| w[0])
}

impl SliceTable {
    /// Stability is only judged from D ≥ from: kernel elements of id − τ_M
    /// in M_A have θ-degree up to the pole order.
    fn new(d: u32, by_bound: Vec<(u32, i64, i64)>, from: u32) -> Self {
        let h0 = stable3(&by_bound.iter().filter(|x| x.0 >= from).map(|x| x.1).collect::<Vec<_>>());
        let h1 = stable3(&by_bound.iter().filter(|x| x.0 >= from).map(|x| x.2).collect::<Vec<_>>());
        SliceTable { d, by_bound, h0, h1 }
    }
}

/// Increment over d of the stabilized slice values: the K∞-dimension of
/// the cohomology (three consecutive equal increments).
fn rank_of(tables: &[SliceTable], pick: impl Fn(&SliceTable) -> Option<i64>) -> Option<usize> {
    let dims: Option<Vec<(u32, usize)>> = tables.iter().map(|t| pick(t).map(|v| (t.d, v.max(0) as usize))).collect();
    stable_increment(&dims?)
}

#[derive(Clone, Debug, Serialize)]
pub struct GComplex {
    pub motive: String,
    pub options: SliceOptions,
    pub slices: Vec<SliceTable>,
    /// (id − τ_M)(M_A) ⊆ N_A on the generators of the box.
    pub well_defined: bool,
    /// Box elements with undetermined obstruction (excluded).
    pub flagged: usize,
    pub h0_rank: Option<usize>,
    pub h1_rank: Option<usize>,
}

impl GComplex {
    pub fn h1_stable(&self) -> bool {
        self.slices.iter().all(|s| s.h1.is_some())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub motive: String,
    pub c: i64,
    pub options: SliceOptions,
    pub slices: Vec<SliceTable>,
    pub h0_rank: Option<usize>,
    pub h1_rank: Option<usize>,
}

fn coords(v: &[TateSeries<Laurent>]) -> FqVec<SKey> {
    let mut out = FqVec::new();
    for (i, s) in v.iter().enumerate() {
        for a in 0..s.nt() {
            for (e, c) in s.coeff(a).terms() {
                out.insert((i, a, e), c);
            }
        }
    }
    out
}

fn series_of(m: &TMotive, x: &[TauEntry], prec: Precision) -> SVec {
    x.iter().map(|e| e.to_series(&m.field, prec)).collect()
}

/// c·π^k·t^a·e_i.
fn pi_monomial(f: &Fq, r: usize, i: usize, a: usize, k: i64, prec: Precision) -> SVec {
    let z = Laurent::zero_with_cap(f, prec.u, prec.u);
    (0..r)
        .map(|l| {
            let mut cs = vec![z.clone(); prec.t];
            if l == i {
                cs[a] = Laurent::monomial(f, 1, k, prec.u);
            }
            TateSeries::new(z.clone(), cs, prec.t)
        })
        .collect()
}

/// τ_M(τ*v).
pub fn tau_apply(m: &TMotive, ts: &[Vec<TateSeries<Laurent>>], v: &[TateSeries<Laurent>]) -> SVec {
    let r = m.rank();
    let tv: Vec<_> = v.iter().map(|x| x.tau()).collect();
    (0..r)
        .map(|i| {
            let mut acc = TateSeries::zero(v[0].zero_coeff().clone(), v[0].nt());
            for k in 0..r {
                if !m.tau[i][k].is_zero() {
                    acc = acc.add(&ts[i][k].mul(&tv[k]));
                }
            }
            acc
        })
        .collect()
}

fn tau_series(m: &TMotive, prec: Precision) -> Vec<Vec<TateSeries<Laurent>>> {
    m.tau.iter().map(|row| row.iter().map(|e| e.to_series(&m.field, prec)).collect()).collect()
}

fn sub(a: &[TateSeries<Laurent>], b: &[TateSeries<Laurent>]) -> SVec {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

/// t^a θ^b·g for the generators g of N_A.
fn n_box_layer(m: &TMotive, gens: &[Vec<TauEntry>], d: u32, b: u32) -> Vec<Vec<TauEntry>> {
    let f = &m.field;
    let mut out = Vec::new();
    for a in 0..=d {
        let mono = TauEntry::from_poly(Poly2::monomial(f, 1, a, b));
        for g in gens {
            out.push(g.iter().map(|e| e.mul(&mono)).collect());
        }
    }
    out
}

fn m_box_layer(m: &TMotive, d: u32, b: u32) -> Vec<Vec<Poly2>> {
    let f = &m.field;
    let r = m.rank();
    let mut out = Vec::new();
    for a in 0..=d {
        for i in 0..r {
            let mut x = vec![Poly2::zero(f); r];
            x[i] = Poly2::monomial(f, 1, a, b);
            out.push(x);
        }
    }
    out
}

fn window(m: &TMotive, opts: &SliceOptions) -> (u32, u32) {
    let p = m.pole_order().max(0) as u32;
    (p, opts.max_theta.max(p + 2))
}

fn check_cap(m: &TMotive, opts: &SliceOptions, extra: i64) -> Result<()> {
    let need = m.pole_order() + opts.max_d as i64 + extra + 2;
    if opts.cap <= need {
        return Err(Error::PrecisionExhausted(format!("slice cap {} must exceed {}", opts.cap, need)));
    }
    Ok(())
}

/// Bound on the π-exponents of πO∞-monomials that can fail to be boundaries:
/// τ(π^k) ~ π^{qk − δ}, contracting once (q − 1)k > δ.
fn contraction_bound(m: &TMotive) -> i64 {
    degree_excess(m) + 2
}

/// Route G.
pub fn g_complex(m: &TMotive, opts: SliceOptions) -> Result<GComplex> {
    let f = m.field.clone();
    let r = m.rank();
    let na = crate::motive::compute_na(m, &crate::motive::IntegralModel::standard(m))?;
    let gens = na.generators();
    let q = f.q() as i64;
    let l = contraction_bound(m);
    check_cap(m, &opts, q * l)?;
    let mut well_defined = true;
    let (from, top) = window(m, &opts);
    for b in 0..=top {
        for x in m_box_layer(m, opts.max_d, b) {
            well_defined &= na.contains(&boundary(m, &x));
        }
    }
    let mut flagged = 0;
    let mut slices = Vec::new();
    for d in 0..=opts.max_d {
        let prec = Precision { t: d as usize + 1, u: opts.cap, j: 1 };
        let solver = H1Solver::new(m, prec)?;
        let ts = tau_series(m, prec);
        let kmk = (solver.kernel_rows() * (d as usize + 1)) as i64 - solver.effect_rank() as i64;
        let mut ob_n: Echelon<ObKey> = Echelon::new(&f);
        let mut ob_np: Echelon<ObKey> = Echelon::new(&f);
        for k in 1..=l {
            for a in 0..=d as usize {
                for i in 0..r {
                    let (ob, det) = solver.obstruction(&pi_monomial(&f, r, i, a, k, prec))?;
                    if !det {
                        flagged += 1;
                        continue;
                    }
                    let _ = ob_np.insert(ob, FqVec::new());
                }
            }
        }
        let mut kernel: Echelon<Key> = Echelon::new(&f);
        let mut bnd: Echelon<SKey> = Echelon::new(&f);
        let mut m_count = 0i64;
        let mut by_bound = Vec::new();
        for b in 0..=top {
            for x in n_box_layer(m, &gens, d, b) {
                let s = series_of(m, &x, prec);
                let (ob, det) = solver.obstruction(&s)?;
                if !det {
                    flagged += 1;
                    continue;
                }
                let mut v: FqVec<Key> = coords(&s).into_iter().map(|(k, c)| (Key::Z(k), c)).collect();
                v.extend(ob.iter().map(|(k, &c)| (Key::Ob(*k), c)));
                let _ = kernel.insert(v, FqVec::new());
                let _ = ob_n.insert(ob.clone(), FqVec::new());
                let _ = ob_np.insert(ob, FqVec::new());
            }
            for x in m_box_layer(m, d, b) {
                let s: SVec = x.iter().map(|p| TauEntry::from_poly(p.clone()).to_series(&f, prec)).collect();
                let _ = bnd.insert(coords(&sub(&s, &tau_apply(m, &ts, &s))), FqVec::new());
                m_count += 1;
            }
            // classes with vanishing obstruction, modulo boundaries
            let mut sum = bnd.clone();
            for (piv, v) in kernel.rows() {
                if let Key::Z(_) = piv {
                    let z: FqVec<SKey> = v
                        .iter()
                        .map(|(k, &c)| match k {
                            Key::Z(z) => (*z, c),
                            Key::Ob(_) => unreachable!("class pivot rows carry no obstruction"),
                        })
                        .collect();
                    let _ = sum.insert(z, FqVec::new());
                }
            }
            let s_prime = (sum.rank() - bnd.rank()) as i64;
            let kma = m_count - bnd.rank() as i64;
            let h0 = kmk - kma + s_prime;
            let h1 = (ob_np.rank() - ob_n.rank()) as i64;
            by_bound.push((b, h0, h1));
        }
        slices.push(SliceTable::new(d, by_bound, from));
    }
    let h0_rank = rank_of(&slices, |t| t.h0);
    let h1_rank = rank_of(&slices, |t| t.h1);
    Ok(GComplex { motive: m.name.clone(), options: opts, slices, well_defined, flagged, h0_rank, h1_rank })
}

fn project(v: &FqVec<SKey>, lo: i64, hi: i64) -> FqVec<SKey> {
    v.iter().filter(|(k, _)| k.2 >= lo && k.2 < hi).map(|(k, &c)| (*k, c)).collect()
}

/// Route cone: H(cone(RΓ𝓜 → RΓ𝓝)) on the cover {Spec A⊗A, Spec O∞⟨A⟩}.
///
/// With Ξ = π^c·O∞⟨t⟩^r (the completion of both M_B and N_B, since j_B is
/// a unit there): H⁰𝓜 = M_A ∩ Ξ = 0, H⁰𝓝 = N_A ∩ Ξ, H¹𝓜 = V (the
/// π^1…π^{c−1} part) and H¹𝓝 = V/(image of N_A). The long exact sequence
/// gives H⁰ = H⁰𝓝 ⊕ ker φ and H¹ = coker φ with φ: H¹𝓜 → H¹𝓝.
pub fn cech_cone(model: &ShtukaModel, opts: SliceOptions) -> Result<ConeReport> {
    let m = &model.motive;
    let f = m.field.clone();
    let r = m.rank();
    let c = model.c;
    let q = f.q() as i64;
    check_cap(m, &opts, q * c)?;
    let (from, top) = window(m, &opts);
    let gens = model.na.generators();
    let mut slices = Vec::new();
    for d in 0..=opts.max_d {
        let prec = Precision { t: d as usize + 1, u: opts.cap, j: 1 };
        let ts = tau_series(m, prec);
        let mut phi = Vec::new();
        for k in 1..c {
            for a in 0..=d as usize {
                for i in 0..r {
                    let v = pi_monomial(&f, r, i, a, k, prec);
                    phi.push(project(&coords(&sub(&v, &tau_apply(m, &ts, &v))), 1, c));
                }
            }
        }
        let dim_v = ((c - 1).max(0) as usize * (d as usize + 1) * r) as i64;
        let mut span: Echelon<SKey> = Echelon::new(&f);
        let mut pv: Echelon<SKey> = Echelon::new(&f);
        let mut rn: Echelon<SKey> = Echelon::new(&f);
        let mut by_bound = Vec::new();
        for b in 0..=top {
            for x in n_box_layer(m, &gens, d, b) {
                let z = coords(&series_of(m, &x, prec));
                let _ = pv.insert(project(&z, i64::MIN, c), FqVec::new());
                let _ = rn.insert(project(&z, 1, c), FqVec::new());
                let _ = span.insert(z, FqVec::new());
            }
            let gamma = (span.rank() - pv.rank()) as i64;
            let mut with_phi = rn.clone();
            for v in &phi {
                let _ = with_phi.insert(v.clone(), FqVec::new());
            }
            let rphi = (with_phi.rank() - rn.rank()) as i64;
            let h1_n = dim_v - rn.rank() as i64;
            by_bound.push((b, gamma + dim_v - rphi, h1_n - rphi));
        }
        slices.push(SliceTable::new(d, by_bound, from));
    }
    let h0_rank = rank_of(&slices, |t| t.h0);
    let h1_rank = rank_of(&slices, |t| t.h1);
    Ok(ConeReport { motive: m.name.clone(), c, options: opts, slices, h0_rank, h1_rank })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct QuasiIsoReport {
    pub motive: String,
    /// (d, H⁰ route G, H⁰ cone, H¹ route G, H¹ cone), stabilized values.
    pub rows: Vec<(u32, Option<i64>, Option<i64>, Option<i64>, Option<i64>)>,
    pub agree: bool,
}

pub fn compare_routes(g: &GComplex, cone: &ConeReport) -> QuasiIsoReport {
    let rows: Vec<_> = g
        .slices
        .iter()
        .zip(&cone.slices)
        .map(|(a, b)| (a.d, a.h0, b.h0, a.h1, b.h1))
        .collect();
    let agree = rows.iter().all(|&(_, a, b, x, y)| a.is_some() && a == b && x.is_some() && x == y);
    QuasiIsoReport { motive: g.motive.clone(), rows, agree }
}

/// H⁰ and H¹ of the Čech complex F_q[θ] ⊕ O∞ → K∞ of the structure sheaf
/// of P¹, on boxes θ^{≤D}, π^{≤D}: (F_q[θ] ∩ O∞, K∞-box/(sum)).
pub fn structure_sheaf_cohomology(f: &Fq, bound: i64) -> (usize, usize) {
    let mut a: Echelon<i64> = Echelon::new(f);
    let mut o: Echelon<i64> = Echelon::new(f);
    for b in 0..=bound {
        let _ = a.insert([(-b, 1u8)].into_iter().collect(), FqVec::new());
        let _ = o.insert([(b, 1u8)].into_iter().collect(), FqVec::new());
    }
    let mut sum = a.clone();
    for (_, v) in o.rows() {
        let _ = sum.insert(v.clone(), FqVec::new());
    }
    let h0 = a.rank() + o.rank() - sum.rank();
    // K∞ box: π^{−bound..bound}
    let h1 = (2 * bound + 1) as usize - sum.rank();
    (h0, h1)
}

/// ψ = Σ_k τ_M^k(τ^{k*}ξ) for ξ ∈ Ξ = π^c·O∞⟨t⟩^r; returns whether
/// (id − τ_M)ψ = ξ at truncation for the monomials π^c t^a e_i, a < nt.
pub fn isomorphism_at_infinity(model: &ShtukaModel, prec: Precision) -> Result<bool> {
    let m = &model.motive;
    let f = m.field.clone();
    let r = m.rank();
    let ts = tau_series(m, prec);
    for i in 0..r {
        for a in 0..prec.t {
            let xi = pi_monomial(&f, r, i, a, model.c, prec);
            let mut term = xi.clone();
            let mut psi = xi.clone();
            let mut steps = 0;
            while !term.iter().all(|s| s.is_zero()) {
                term = tau_apply(m, &ts, &term);
                psi = psi.iter().zip(&term).map(|(x, y)| x.add(y)).collect();
                steps += 1;
                if steps > prec.u {
                    return Err(Error::PrecisionExhausted("geometric series does not terminate at the cap".into()));
                }
            }
            let res = sub(&sub(&psi, &tau_apply(m, &ts, &psi)), &xi);
            if !res.iter().all(|s| s.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motive::IntegralModel;
    use crate::shtuka::model::build_c_shtuka;

    fn small() -> SliceOptions {
        SliceOptions { max_d: 3, max_theta: 4, cap: 48 }
    }

    #[test]
    fn structure_sheaf() {
        let f = Fq::new(3, 1).unwrap();
        assert_eq!(structure_sheaf_cohomology(&f, 5), (1, 0));
    }

    #[test]
    fn first_twist_routes_agree() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let g = g_complex(&m, small()).unwrap();
        assert!(g.well_defined);
        let sm = build_c_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
        let cone = cech_cone(&sm, small()).unwrap();
        let cmp = compare_routes(&g, &cone);
        assert!(cmp.agree, "{cmp:?}\n{g:?}\n{cone:?}");
        assert_eq!(g.slices[0].h0, Some(1));
        assert!(g.slices.iter().all(|s| s.h1 == Some(0)));
    }

    #[test]
    fn unit_motive_routes_agree() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::unit(&f);
        let g = g_complex(&m, small()).unwrap();
        let sm = build_c_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
        let cone = cech_cone(&sm, small()).unwrap();
        assert!(compare_routes(&g, &cone).agree, "{g:?}\n{cone:?}");
    }

    #[test]
    fn geometric_series_at_infinity() {
        let f = Fq::new(3, 1).unwrap();
        for m in [TMotive::carlitz_twist(&f, 1), TMotive::unit(&f), TMotive::carlitz_twist(&f, -1)] {
            let sm = build_c_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
            assert!(isomorphism_at_infinity(&sm, Precision { t: 4, u: 40, j: 1 }).unwrap());
        }
    }
}
