//! Betti realization Λ_B(M) = (M ⊗ L⟨t⟩)^τ with its finite-level Galois
//! action, invariants Λ_B^+, and the cokernel test behind r_B.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

use crate::field_tower::{peel, Fq, GaloisElem, LElem, Laurent, Tower};
use crate::motive::TMotive;
use crate::poly::pid;
use crate::poly::Poly;
use crate::tate::{fixed_point_residual, solve_tau_fixed, Precision, TateSeries, TauSolution};

type LMat = Vec<Vec<TateSeries<LElem>>>;

/// Λ_B(M): the columns of Ω, and each Galois generator's action matrix
/// A_σ over F_q[t] with σ(Ω) = Ω·A_σ.
#[derive(Clone, Debug)]
pub struct BettiLattice {
    pub motive: TMotive,
    pub prec: Precision,
    pub solution: TauSolution,
    pub actions: Vec<(GaloisElem, Vec<Vec<Poly>>)>,
}

/// X with Ω·X = B for upper-triangular Ω with unit diagonal entries.
fn triangular_solve(omega: &LMat, b: &LMat, tower: &Tower, nt: usize) -> Result<LMat> {
    let r = omega.len();
    let zero = TateSeries::zero(tower.zero(), nt);
    let mut x = vec![vec![zero.clone(); r]; r];
    let inv_diag: Vec<TateSeries<LElem>> = (0..r).map(|i| omega[i][i].inv()).collect::<Result<_>>()?;
    for j in 0..r {
        for i in (0..r).rev() {
            let mut acc = b[i][j].clone();
            for k in i + 1..r {
                acc = acc.sub(&omega[i][k].mul(&x[k][j]));
            }
            x[i][j] = inv_diag[i].mul(&acc);
        }
    }
    Ok(x)
}

/// Reads an F_q[t]-polynomial off a series with F_q-constant coefficients.
fn series_to_poly(s: &TateSeries<LElem>) -> Result<Poly> {
    let f = s.zero_coeff().field().clone();
    let cs: Option<Vec<u8>> = s.coeffs().iter().map(|c| c.to_fq()).collect();
    let cs = cs.ok_or_else(|| Error::PrecisionExhausted("Galois action entry is not in F_q[t]".into()))?;
    Ok(Poly::new(&f, cs))
}

pub fn galois_matrix(omega: &LMat, tower: &Tower, g: &GaloisElem, nt: usize) -> Result<Vec<Vec<Poly>>> {
    let sigma: LMat = omega
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let cs: Result<Vec<LElem>> = x.coeffs().iter().map(|c| c.galois(g)).collect();
                    Ok(TateSeries::new(tower.zero(), cs?, nt))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let a = triangular_solve(omega, &sigma, tower, nt)?;
    a.iter().map(|row| row.iter().map(series_to_poly).collect()).collect()
}

pub fn betti_realize(m: &TMotive, prec: Precision) -> Result<BettiLattice> {
    let sol = solve_tau_fixed(&m.tau, &m.field, prec)?;
    let res = fixed_point_residual(&m.tau, &sol, prec);
    if !res.iter().flatten().all(|x| x.is_zero()) {
        return Err(Error::PrecisionExhausted("fixed-point residual does not vanish".into()));
    }
    if !(0..m.rank()).all(|i| sol.omega[i][i].is_unit()) {
        return Err(Error::Precondition("not rigid analytically trivial at this precision".into()));
    }
    let mut actions = Vec::new();
    for g in sol.tower.generators() {
        let a = galois_matrix(&sol.omega, &sol.tower, &g, prec.t)?;
        actions.push((g, a));
    }
    Ok(BettiLattice { motive: m.clone(), prec, solution: sol, actions })
}

impl BettiLattice {
    pub fn rank(&self) -> usize {
        self.motive.rank()
    }
    pub fn tower(&self) -> &Tower {
        &self.solution.tower
    }
    pub fn omega(&self) -> &LMat {
        &self.solution.omega
    }

    /// Action matrix of an arbitrary group element.
    pub fn action(&self, g: &GaloisElem) -> Result<Vec<Vec<Poly>>> {
        galois_matrix(&self.solution.omega, &self.solution.tower, g, self.prec.t)
    }

    /// σ(Ω) = Ω·A_σ entrywise for every generator.
    pub fn check_equivariance(&self) -> Result<bool> {
        let t = self.tower();
        let nt = self.prec.t;
        for (g, a) in &self.actions {
            for i in 0..self.rank() {
                for j in 0..self.rank() {
                    let cs: Vec<LElem> =
                        self.omega()[i][j].coeffs().iter().map(|c| c.galois(g)).collect::<Result<_>>()?;
                    let lhs = TateSeries::new(t.zero(), cs, nt);
                    let mut rhs = TateSeries::zero(t.zero(), nt);
                    for k in 0..self.rank() {
                        rhs = rhs.add(&self.omega()[i][k].mul_tpoly(&a[k][j]));
                    }
                    if !lhs.sub(&rhs).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// A_{σ∘τ} = A_σ·A_τ on all pairs of generators.
    pub fn check_group_action(&self) -> Result<bool> {
        let f = &self.motive.field;
        for (g1, a1) in &self.actions {
            for (g2, a2) in &self.actions {
                let comp = g1.compose(g2, self.tower());
                if self.action(&comp)? != pid::mat_mul(a1, a2, f) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A-basis of Λ_B^+ (coordinates in the Betti basis): the kernel of the
    /// stacked A_σ − 1.
    pub fn invariants(&self) -> Vec<Vec<Poly>> {
        let f = &self.motive.field;
        let r = self.rank();
        let mut stacked = Vec::new();
        for (_, a) in &self.actions {
            for i in 0..r {
                let row: Vec<Poly> =
                    (0..r).map(|j| if i == j { a[i][j].sub(&Poly::one(f)) } else { a[i][j].clone() }).collect();
                stacked.push(row);
            }
        }
        if stacked.is_empty() {
            return pid::identity(f, r);
        }
        pid::kernel(&stacked, f, r)
    }
}

/// Status of a class in the cokernel of id − τ_M on M ⊗ K∞⟨t⟩.
#[derive(Clone, Debug)]
pub enum CokerClass {
    /// ξ − τ_M(τ*ξ) = f with ξ over K∞.
    Zero { xi: Vec<TateSeries<Laurent>> },
    /// Reduced obstruction: (row, t-degree, 1/θ-exponent) ↦ coefficient.
    Nonzero { obstruction: Obstruction },
    Undetermined { reason: String },
}

impl CokerClass {
    pub fn is_zero(&self) -> bool {
        matches!(self, CokerClass::Zero { .. })
    }
    pub fn label(&self) -> &'static str {
        match self {
            CokerClass::Zero { .. } => "zero",
            CokerClass::Nonzero { .. } => "nonzero",
            CokerClass::Undetermined { .. } => "undetermined",
        }
    }
}

/// Sparse F_q-vector of stuck terms keyed by (row, t-degree, 1/θ-exponent).
pub type Obstruction = BTreeMap<(usize, usize, i64), u8>;

/// Injection of c·π^{k*} (a K∞-rational kernel element of one row's
/// coefficient equation) at (row, t-degree).
type Injection = (usize, usize, u8);

/// Peel parameters (a0, va, b0, vb) of the coefficient equation of a row
/// x − c·j^n·τx = g (after multiplying by j^{−n} when n < 0).
fn row_params(f: &Fq, c: u8, n: i64) -> (u8, i64, u8, i64) {
    let sign = |e: i64| if e % 2 == 0 { 1 } else { f.neg(1) };
    if n >= 0 {
        (1, 0, f.neg(f.mul(c, sign(n))), -n)
    } else {
        (sign(-n), n, f.neg(c), 0)
    }
}

/// Exponent k* with a0·π^{k*+va} + b0·π^{q k*+vb} = 0, if any.
fn kernel_exponent(q: i64, f: &Fq, (a0, va, b0, vb): (u8, i64, u8, i64)) -> Option<i64> {
    let cross = q * va - vb;
    (cross.rem_euclid(q - 1) == 0 && f.add(a0, b0) == 0).then(|| cross / (q - 1) - va)
}

/// F_q-linear solver for ξ − τ_M(τ*ξ) = f over K∞⟨t⟩ for triangular τ_M.
///
/// Rows are solved bottom-up and t-coefficient by t-coefficient with the
/// peel solver; stuck terms form a normal form modulo the image of one
/// coefficient equation. Rows whose equation has a K∞-rational kernel
/// contribute free parameters, whose downstream effects are spanned once
/// and reduced away, so the remaining obstruction vanishes exactly when f
/// is a boundary at this precision.
#[derive(Clone, Debug)]
pub struct H1Solver {
    motive: TMotive,
    prec: Precision,
    ts: Vec<Vec<TateSeries<Laurent>>>,
    jpows: Vec<TateSeries<Laurent>>,
    diag: Vec<(u8, i64)>,
    kernel: Vec<Option<i64>>,
    /// Echelon basis of injection effects: pivot ↦ (vector, combination).
    basis: BTreeMap<(usize, usize, i64), (Obstruction, Vec<Injection>)>,
}

struct Run {
    xi: Vec<TateSeries<Laurent>>,
    stuck: Obstruction,
    determined: bool,
}

fn axpy(v: &mut Obstruction, f: &Fq, a: u8, w: &Obstruction) {
    for (k, &c) in w {
        let e = v.entry(*k).or_insert(0);
        *e = f.add(*e, f.mul(a, c));
        if *e == 0 {
            v.remove(k);
        }
    }
}

fn comb_axpy(v: &mut Vec<Injection>, f: &Fq, a: u8, w: &[Injection]) {
    for &(r, l, c) in w {
        match v.iter_mut().find(|x| x.0 == r && x.1 == l) {
            Some(x) => x.2 = f.add(x.2, f.mul(a, c)),
            None => v.push((r, l, f.mul(a, c))),
        }
    }
    v.retain(|x| x.2 != 0);
}

impl H1Solver {
    pub fn new(m: &TMotive, prec: Precision) -> Result<Self> {
        let diag = m
            .triangular_diagonal()
            .ok_or_else(|| Error::UnsupportedShape("H¹ test needs a triangular τ-matrix".into()))?;
        let field = &m.field;
        let q = field.q() as i64;
        let ts = m.tau.iter().map(|row| row.iter().map(|e| e.to_series(field, prec)).collect()).collect();
        let j = TateSeries::j(field, prec);
        let jpows = diag.iter().map(|&(_, n)| j.pow(n.min(0).unsigned_abs() as u32)).collect();
        let kernel = diag.iter().map(|&(c, n)| kernel_exponent(q, field, row_params(field, c, n))).collect();
        let mut s = H1Solver { motive: m.clone(), prec, ts, jpows, diag, kernel, basis: BTreeMap::new() };
        let zero = vec![TateSeries::zero(Laurent::zero_with_cap(field, prec.u, prec.u), prec.t); m.rank()];
        for row in 0..m.rank() {
            if s.kernel[row].is_none() {
                continue;
            }
            for level in 0..prec.t {
                let inj = vec![(row, level, 1u8)];
                let eff = s.run(&zero, &inj).stuck;
                s.insert(eff, inj);
            }
        }
        Ok(s)
    }

    pub fn motive(&self) -> &TMotive {
        &self.motive
    }

    /// Number of independent kernel directions that affect the obstruction.
    pub fn effect_rank(&self) -> usize {
        self.basis.len()
    }

    /// Rows whose coefficient equation has a K∞-rational kernel; each
    /// contributes one free parameter per t-coefficient.
    pub fn kernel_rows(&self) -> usize {
        self.kernel.iter().filter(|k| k.is_some()).count()
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    fn insert(&mut self, v: Obstruction, comb: Vec<Injection>) {
        let f = self.motive.field.clone();
        let (mut v, mut comb) = self.reduce(v, comb);
        let Some((&pk, &pc)) = v.iter().next() else { return };
        let inv = f.inv(pc).expect("nonzero pivot");
        for c in v.values_mut() {
            *c = f.mul(*c, inv);
        }
        for x in comb.iter_mut() {
            x.2 = f.mul(x.2, inv);
        }
        self.basis.insert(pk, (v, comb));
    }

    /// Reduces v against the effect basis; comb tracks v as a combination
    /// of (input, injections).
    fn reduce(&self, mut v: Obstruction, mut comb: Vec<Injection>) -> (Obstruction, Vec<Injection>) {
        let f = &self.motive.field;
        loop {
            let Some(k) = v.keys().find(|k| self.basis.contains_key(k)).copied() else { break };
            let a = f.neg(v[&k]);
            let (bv, bc) = &self.basis[&k];
            axpy(&mut v, f, a, bv);
            comb_axpy(&mut comb, f, a, bc);
        }
        (v, comb)
    }

    fn run(&self, f: &[TateSeries<Laurent>], inj: &[Injection]) -> Run {
        let r = self.motive.rank();
        let mut xi: Vec<Option<TateSeries<Laurent>>> = vec![None; r];
        let mut stuck = Obstruction::new();
        let mut determined = true;
        for i in (0..r).rev() {
            let mut g = f[i].clone();
            for k in i + 1..r {
                if !self.motive.tau[i][k].is_zero() {
                    g = g.add(&self.ts[i][k].mul(&xi[k].as_ref().unwrap().tau()));
                }
            }
            let row_inj: Vec<(usize, u8)> = inj.iter().filter(|x| x.0 == i).map(|x| (x.1, x.2)).collect();
            let (x, st, det) = self.solve_row(i, &g, &row_inj);
            determined &= det;
            for (lvl, u, c) in st {
                stuck.insert((i, lvl, u), c);
            }
            xi[i] = Some(x);
        }
        Run { xi: xi.into_iter().map(|x| x.unwrap()).collect(), stuck, determined }
    }

    /// x − c·j^n·τx = g, coefficientwise in t.
    fn solve_row(&self, i: usize, g: &TateSeries<Laurent>, inj: &[(usize, u8)]) -> (TateSeries<Laurent>, Vec<(usize, i64, u8)>, bool) {
        let (c, n) = self.diag[i];
        let f = self.motive.field.clone();
        let nt = g.nt();
        let cap = self.prec.u;
        let (a0, va, b0, vb) = row_params(&f, c, n);
        // coef·(−θ)^e
        let mth = |e: i64, coef: u8| -> Laurent {
            let sign = if e % 2 == 0 { 1 } else { f.neg(1) };
            Laurent::monomial(&f, f.mul(coef, sign), -e, cap)
        };
        let rhs = if n < 0 { self.jpows[i].mul(g) } else { g.clone() };
        let e = n.unsigned_abs() as usize;
        let mut xs: Vec<Laurent> = Vec::with_capacity(nt);
        let mut stuck = Vec::new();
        let mut determined = true;
        for k in 0..nt {
            let mut r = rhs.coeff(k).clone();
            for l in 1..=e.min(k) {
                let b = f.binom(e as u64, l as u64);
                if b == 0 {
                    continue;
                }
                if n >= 0 {
                    // + c Σ C(n,l)(−θ)^{n−l} x_{k−l}^q
                    r = r.add(&mth(e as i64 - l as i64, f.mul(c, b)).mul(&xs[k - l].frob()));
                } else {
                    // − Σ C(m,l)(−θ)^{m−l} x_{k−l}
                    r = r.sub(&mth(e as i64 - l as i64, b).mul(&xs[k - l]));
                }
            }
            let p = peel(a0, va, b0, vb, &r);
            determined &= p.determined;
            stuck.extend(p.stuck.iter().map(|&(u, a)| (k, u, a)));
            let mut x = p.x;
            for &(_, coef) in inj.iter().filter(|x| x.0 == k) {
                let ks = self.kernel[i].expect("injection only on rows with kernel");
                x = x.add(&Laurent::monomial(&f, coef, ks, x.cap()));
            }
            xs.push(x);
        }
        (TateSeries::new(g.zero_coeff().clone(), xs, nt), stuck, determined)
    }

    /// Obstruction of f reduced modulo all kernel effects; empty iff f is
    /// a boundary at this precision. Linear in f.
    pub fn obstruction(&self, f: &[TateSeries<Laurent>]) -> Result<(Obstruction, bool)> {
        if f.len() != self.motive.rank() {
            return Err(Error::Precondition("class vector has wrong length".into()));
        }
        let run = self.run(f, &[]);
        let (v, _) = self.reduce(run.stuck, vec![]);
        Ok((v, run.determined))
    }

    pub fn classify(&self, f: &[TateSeries<Laurent>]) -> Result<CokerClass> {
        if f.len() != self.motive.rank() {
            return Err(Error::Precondition("class vector has wrong length".into()));
        }
        let run = self.run(f, &[]);
        if !run.determined {
            return Ok(CokerClass::Undetermined { reason: "precision below the crossover exponent".into() });
        }
        let (v, comb) = self.reduce(run.stuck.clone(), vec![]);
        if !v.is_empty() {
            return Ok(CokerClass::Nonzero { obstruction: v });
        }
        // stuck(f) + Σ comb·effects = 0, so injecting comb solves exactly
        let run = if comb.is_empty() { run } else { self.run(f, &comb) };
        if !run.stuck.is_empty() {
            return Ok(CokerClass::Undetermined { reason: "kernel correction left stuck terms".into() });
        }
        let xi = run.xi;
        let r = self.motive.rank();
        for i in 0..r {
            let mut lhs = xi[i].clone();
            for k in i..r {
                if !self.motive.tau[i][k].is_zero() {
                    lhs = lhs.sub(&self.ts[i][k].mul(&xi[k].tau()));
                }
            }
            if !lhs.sub(&f[i]).is_zero() {
                return Ok(CokerClass::Undetermined { reason: "certificate residual does not vanish".into() });
            }
        }
        Ok(CokerClass::Zero { xi })
    }
}

/// Tests whether f lies in (id − τ_M)(M ⊗ K∞⟨t⟩).
pub fn h1_class(m: &TMotive, f: &[TateSeries<Laurent>], prec: Precision) -> Result<CokerClass> {
    H1Solver::new(m, prec)?.classify(f)
}

/// d_H-side test for an extension of 1 by a rank-r motive: the cocycle
/// σ ↦ λ_σ (last column of the action of the middle object) is a
/// coboundary (A_σ − 1)·a with a ∈ A^r.
pub fn extension_cocycle_trivial(middle: &BettiLattice) -> Result<bool> {
    let f = &middle.motive.field;
    let r = middle.rank() - 1;
    let mut stacked = Vec::new();
    let mut rhs = Vec::new();
    for (_, a) in &middle.actions {
        for i in 0..r {
            let row: Vec<Poly> =
                (0..r).map(|j| if i == j { a[i][j].sub(&Poly::one(f)) } else { a[i][j].clone() }).collect();
            stacked.push(row);
            rhs.push(a[i][r].clone());
        }
    }
    if stacked.is_empty() {
        return Ok(true);
    }
    Ok(pid::solve(&stacked, &rhs, f, r).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;
    use crate::motive::TauEntry;
    use crate::poly::Poly2;

    fn pr() -> Precision {
        Precision { t: 8, u: 32, j: 8 }
    }

    #[test]
    fn twist_actions_and_invariants() {
        let f = Fq::new(3, 1).unwrap();
        let a1 = betti_realize(&TMotive::carlitz_twist(&f, 1), pr()).unwrap();
        assert_eq!(a1.actions[0].1[0][0], Poly::constant(&f, f.zeta()));
        assert!(a1.invariants().is_empty());
        let a2 = betti_realize(&TMotive::carlitz_twist(&f, 2), pr()).unwrap();
        assert_eq!(a2.invariants().len(), 1);
        assert!(a1.check_equivariance().unwrap());
        assert!(a1.check_group_action().unwrap());
        let u = betti_realize(&TMotive::unit(&f), pr()).unwrap();
        assert_eq!(u.invariants().len(), 1);
    }

    #[test]
    fn unit_motive_h1() {
        let f = Fq::new(2, 1).unwrap();
        let one = TMotive::unit(&f);
        let c = |k: i64| vec![TauEntry::from_poly(Poly2::monomial(&f, 1, 0, 0)).to_series(&f, pr()).map(|x| x.shift(k))];
        assert!(matches!(h1_class(&one, &c(-1), pr()).unwrap(), CokerClass::Nonzero { .. }));
        match h1_class(&one, &c(1), pr()).unwrap() {
            CokerClass::Zero { xi } => {
                let x = xi[0].coeff(0);
                for k in 0..20 {
                    let want = if k > 0 && (k as u64).is_power_of_two() { 1 } else { 0 };
                    assert_eq!(x.coeff(k), want);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extension_cocycle_matches_h1() {
        let f = Fq::new(2, 1).unwrap();
        let one = TMotive::unit(&f);
        let th = TauEntry::from_poly(Poly2::theta(&f));
        let e = one.extension_middle(std::slice::from_ref(&th)).unwrap();
        let b = betti_realize(&e, pr()).unwrap();
        assert!(!extension_cocycle_trivial(&b).unwrap());
        let f_ser = vec![th.to_series(&f, pr())];
        assert!(!h1_class(&one, &f_ser, pr()).unwrap().is_zero());
    }

    #[test]
    fn kernel_rows_are_resolved() {
        // A(q−1): the row equation has K∞-rational kernel elements, and
        // (id − τ)(x) for polynomial x must still test as a boundary
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 2);
        let s = H1Solver::new(&m, pr()).unwrap();
        let x = TauEntry::from_poly(Poly2::monomial(&f, 1, 1, 2));
        let tx = TauEntry::new(x.num.tau(), x.e);
        let b = x.sub(&m.tau[0][0].mul(&tx));
        assert!(s.classify(&[b.to_series(&f, pr())]).unwrap().is_zero());
        let g = TauEntry::new(Poly2::theta(&f), -2);
        let c1 = s.classify(&[g.to_series(&f, pr())]).unwrap();
        assert!(!matches!(c1, CokerClass::Undetermined { .. }), "{c1:?}");
    }
}
