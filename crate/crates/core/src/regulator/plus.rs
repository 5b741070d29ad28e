//! Ext¹(1⁺, H⁺(M)) over K∞, presented in M-coordinates, and the regulator.
//!
//! Multiplying by Ω_j identifies H_L((j)) with M ⊗ L((j)); there q_M
//! becomes the standard lattice Q, p_M becomes P = τ_M(τ*M) ⊗ K∞[[j]] and
//! H⁺ becomes the K∞-span of the Galois-fixed vectors Ω_j·ν(λ). All three
//! descend to K∞, so the Hodge-additive extension space is
//! (P + Q)/(H⁺ + Q), and the extension built from ξ (with ξ − τ_M(τ*ξ) = m)
//! has class −ξ(θ + j).

use num_rational::Ratio;

use crate::betti::{CokerClass, H1Solver};
use crate::error::{Error, Result};
use crate::field_tower::{LElem, Laurent};
use crate::hodge_pink::jseries::{theta_poly_to_laurent, JSeries};
use crate::hodge_pink::lattice::{mat_vec, vec_add, JCols, JVec, Lattice};
use crate::hodge_pink::quotient::{from_kvec, phi_lattice, phi_vec, KVec, QuotientForm};
use crate::hodge_pink::structure::Ring;
use crate::motive::{compute_na, IntegralModel, NModule, TMotive, TauEntry};
use crate::poly::Poly;
use crate::tate::{Coeff, Precision, TateSeries};

use super::extension::MotExtClass;
use super::gamma::{embed_cols, entry_j, expand_at_theta, hodge_realize, matrix_j, twisted_product, HodgeRealization};

fn descend(v: &JSeries<LElem>, like: &Laurent) -> Result<JSeries<Laurent>> {
    v.try_map(like.zero_like(), |x| {
        x.to_kinf().ok_or_else(|| Error::Undetermined("a Galois-fixed vector is not K∞-rational at this precision".into()))
    })
}

#[derive(Clone, Debug)]
pub struct PlusPresentation {
    pub realization: HodgeRealization,
    form: QuotientForm,
    p_phi: Lattice<Laurent>,
    like: Laurent,
    plus_rank: usize,
}

impl PlusPresentation {
    pub fn new(realization: HodgeRealization) -> Result<Self> {
        let b = &realization.betti;
        let m = &b.motive;
        let (cap, nj, r) = (realization.cap(), realization.nj(), m.rank());
        let like = Laurent::zero_with_cap(&m.field, cap, cap);
        let lambda = b.invariants();
        let mut gens = Vec::with_capacity(lambda.len());
        for l in &lambda {
            let w = mat_vec(&realization.gamma.omega_j, &realization.nu_vec(l));
            let w: JVec<Laurent> = w.iter().map(|x| descend(x, &like)).collect::<Result<_>>()?;
            gens.push(phi_vec(&w));
        }
        let form = QuotientForm::new(Ring::KInf, Lattice::standard(r, &like, nj), &gens)?;
        let tj = matrix_j(&m.field, &m.tau, 0, cap, nj)?;
        let p_phi = phi_lattice(&Lattice::from_generators(r, &tj)?)?;
        Ok(PlusPresentation { realization, form, p_phi, like, plus_rank: lambda.len() })
    }

    pub fn motive(&self) -> &TMotive {
        &self.realization.betti.motive
    }

    pub fn nj(&self) -> i64 {
        self.realization.nj()
    }

    /// rank_A Λ_B^+.
    pub fn plus_rank(&self) -> usize {
        self.plus_rank
    }

    /// dim_K∞ of the Hodge-additive extension space, with a basis of
    /// normal forms.
    pub fn dim(&self) -> Result<(usize, Vec<KVec>)> {
        self.form.finite_part(&self.p_phi)
    }

    /// Normal form of a vector of M ⊗ K∞((j)) (not yet in φ-coordinates).
    pub fn classify(&self, v: &[JSeries<Laurent>]) -> Result<KVec> {
        self.form.normal_form(&phi_vec(v))
    }

    /// Normal form of a representative already in φ-coordinates.
    pub fn renormalize(&self, v: &KVec) -> Result<KVec> {
        self.form.normal_form(&from_kvec(v, self.motive().rank(), &self.like, self.nj()))
    }

    pub fn add(&self, a: &KVec, b: &KVec) -> Result<KVec> {
        let mut s = a.clone();
        for (k, x) in b {
            let e = s.entry(*k).or_insert_with(|| x.zero_like());
            *e = e.add(x);
        }
        self.renormalize(&s)
    }

    /// a·v for a ∈ A: in φ-coordinates ν(a) acts as the constant a(θ).
    pub fn scale(&self, v: &KVec, a: &Poly) -> Result<KVec> {
        let c = theta_poly_to_laurent(a.field(), a, self.like.cap());
        let s: KVec = v.iter().map(|(k, x)| (*k, x.mul(&c))).collect();
        self.renormalize(&s)
    }

    pub fn same(&self, a: &KVec, b: &KVec) -> Result<bool> {
        let d: KVec = {
            let mut s = a.clone();
            for (k, x) in b {
                let e = s.entry(*k).or_insert_with(|| x.zero_like());
                *e = e.sub(x);
            }
            s
        };
        Ok(self.renormalize(&d)?.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct RegulatorReport {
    pub class: MotExtClass,
    /// "zero", "nonzero" or "undetermined".
    pub rb_status: &'static str,
    pub rb_detail: Option<String>,
    /// Present only when r_B vanishes.
    pub value: Option<KVec>,
    /// Functional-equation steps used to continue ξ to t = θ.
    pub steps: u32,
    pub tail: Option<Ratio<i64>>,
    pub prec: Precision,
}

impl RegulatorReport {
    pub fn value_is_zero(&self) -> Option<bool> {
        self.value.as_ref().map(|v| v.is_empty())
    }
}

/// The pipeline m ↦ (r_B(m), Reg(m)) for a fixed motive.
#[derive(Clone, Debug)]
pub struct Regulator {
    pub prec: Precision,
    pub solver: H1Solver,
    pub plus: PlusPresentation,
    pub na: NModule,
    pub max_steps: u32,
}

impl Regulator {
    pub fn new(m: &TMotive, prec: Precision) -> Result<Self> {
        let solver = H1Solver::new(m, prec)?;
        let plus = PlusPresentation::new(hodge_realize(m, Ring::KInf, prec)?)?;
        let na = compute_na(m, &IntegralModel::standard(m))?;
        Ok(Regulator { prec, solver, plus, na, max_steps: 3 })
    }

    pub fn motive(&self) -> &TMotive {
        self.plus.motive()
    }

    pub fn series(&self, c: &MotExtClass) -> Vec<TateSeries<Laurent>> {
        let f = &self.motive().field;
        c.m.iter().map(|e| e.to_series(f, self.prec)).collect()
    }

    /// ξ(θ + j) = Σ_{k<K} (T·τT···τ^{k−1}T)(τ^k m) + (T···τ^{K−1}T)(τ^K ξ),
    /// all evaluated at t = θ + j.
    pub fn continue_at_theta(&self, m: &[TauEntry], xi: &[TateSeries<Laurent>], steps: u32) -> Result<(JVec<Laurent>, Option<Ratio<i64>>)> {
        let mo = self.motive();
        let f = &mo.field;
        let (cap, nj) = (self.prec.u, self.plus.nj());
        let like = Laurent::zero_with_cap(f, cap, cap);
        let mut acc: JVec<Laurent> = vec![JSeries::zero(like.clone(), nj); mo.rank()];
        for k in 0..steps {
            let pk = twisted_product(f, &mo.tau, k, cap, nj)?;
            let mk: JVec<Laurent> = m.iter().map(|e| entry_j(f, e, k, cap, nj)).collect::<Result<_>>()?;
            acc = vec_add(&acc, &mat_vec(&pk, &mk));
        }
        let pk = twisted_product(f, &mo.tau, steps, cap, nj)?;
        let mut tail: Option<Ratio<i64>> = None;
        let mut xv = Vec::with_capacity(xi.len());
        for x in xi {
            let (e, t) = expand_at_theta(&x.tau_pow(steps), cap, nj);
            if let Some(t) = t {
                tail = Some(tail.map_or(t, |s| s.min(t)));
            }
            xv.push(e);
        }
        Ok((vec_add(&acc, &mat_vec(&pk, &xv)), tail))
    }

    /// The continuation with the best tail estimate over 1..=max_steps.
    fn best_continuation(&self, m: &[TauEntry], xi: &[TateSeries<Laurent>]) -> Result<(JVec<Laurent>, u32, Option<Ratio<i64>>)> {
        let mut best: Option<(JVec<Laurent>, u32, Option<Ratio<i64>>)> = None;
        for k in 1..=self.max_steps.max(1) {
            let (v, t) = self.continue_at_theta(m, xi, k)?;
            let better = match (&best, t) {
                (None, _) => true,
                (Some((_, _, Some(bt))), Some(t)) => t > *bt,
                (Some((_, _, Some(_))), None) => true,
                (Some((_, _, None)), _) => false,
            };
            if better {
                best = Some((v, k, t));
            }
            if t.is_none() {
                break;
            }
        }
        Ok(best.expect("at least one step"))
    }

    pub fn eval(&self, c: &MotExtClass) -> Result<RegulatorReport> {
        let mut rep = RegulatorReport {
            class: c.clone(),
            rb_status: "undetermined",
            rb_detail: None,
            value: None,
            steps: 0,
            tail: None,
            prec: self.prec,
        };
        match self.solver.classify(&self.series(c))? {
            CokerClass::Undetermined { reason } => rep.rb_detail = Some(reason),
            CokerClass::Nonzero { obstruction } => {
                rep.rb_status = "nonzero";
                rep.rb_detail = Some(format!("{} obstruction terms", obstruction.len()));
            }
            CokerClass::Zero { xi } => {
                rep.rb_status = "zero";
                let (xj, steps, tail) = self.best_continuation(&c.m, &xi)?;
                let h: JVec<Laurent> = xj.iter().map(|x| x.neg()).collect();
                match self.plus.classify(&h) {
                    Ok(v) => rep.value = Some(v),
                    Err(Error::Undetermined(s)) => {
                        rep.rb_detail = Some(format!("regulator value undetermined: {s}"));
                    }
                    Err(e) => return Err(e),
                }
                rep.steps = steps;
                rep.tail = tail;
            }
        }
        Ok(rep)
    }

    /// T(θ + j) over L, for diagnostics.
    pub fn tau_at_theta(&self) -> Result<JCols<LElem>> {
        let mo = self.motive();
        Ok(embed_cols(&matrix_j(&mo.field, &mo.tau, 0, self.prec.u, self.plus.nj())?, &self.plus.realization.betti.tower().zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;
    use crate::poly::Poly2;

    fn pr() -> Precision {
        Precision { t: 16, u: 48, j: 8 }
    }

    #[test]
    fn twist_dimensions() {
        let f = Fq::new(3, 1).unwrap();
        let want = [1usize, 1, 3, 3];
        for (n, &w) in (1..=4i64).zip(&want) {
            let p = PlusPresentation::new(hodge_realize(&TMotive::carlitz_twist(&f, n), Ring::KInf, pr()).unwrap()).unwrap();
            assert_eq!(p.dim().unwrap().0, w, "A({n})");
        }
    }

    #[test]
    fn twist_regulator_values() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let reg = Regulator::new(&m, pr()).unwrap();
        let zero = reg.eval(&MotExtClass::new(vec![TauEntry::zero(&f)])).unwrap();
        assert_eq!(zero.value_is_zero(), Some(true));
        let g = reg.eval(&MotExtClass::new(vec![TauEntry::jpow(&f, -1)])).unwrap();
        assert_eq!(g.rb_status, "zero", "{g:?}");
        assert_eq!(g.value_is_zero(), Some(false), "{g:?}");
        let x = vec![Poly2::monomial(&f, 1, 1, 1)];
        let b = reg.eval(&MotExtClass::new(super::super::extension::boundary(&m, &x))).unwrap();
        assert_eq!(b.value_is_zero(), Some(true), "{b:?}");
    }

    #[test]
    fn claimed_precision_is_honest() {
        // low-precision value must agree with a higher-precision one below its claim
        let f = Fq::new(5, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let c = MotExtClass::new(vec![TauEntry::jpow(&f, -1)]);
        let lo = Regulator::new(&m, Precision { t: 24, u: 64, j: 8 }).unwrap().eval(&c).unwrap().value.unwrap();
        let hi = Regulator::new(&m, Precision { t: 24, u: 96, j: 8 }).unwrap().eval(&c).unwrap().value.unwrap();
        for (k, x) in &lo {
            assert_eq!(x, &hi[k], "coordinate {k:?}");
        }
    }

    #[test]
    fn a_linearity_on_twists() {
        let f = Fq::new(3, 1).unwrap();
        for n in [1i64, 2] {
            let m = TMotive::carlitz_twist(&f, n);
            let reg = Regulator::new(&m, pr()).unwrap();
            let c1 = MotExtClass::new(vec![TauEntry::jpow(&f, -n)]);
            let c2 = MotExtClass::new(vec![TauEntry::new(Poly2::theta(&f).add(&Poly2::t(&f)), -n)]);
            let a = Poly::new(&f, vec![1, 2, 1]);
            let v1 = reg.eval(&c1).unwrap().value.expect("regulated");
            let v2 = reg.eval(&c2).unwrap().value.expect("regulated");
            let vs = reg.eval(&c1.add(&c2)).unwrap().value.expect("regulated");
            assert!(reg.plus.same(&vs, &reg.plus.add(&v1, &v2).unwrap()).unwrap(), "A({n}) additivity");
            let va = reg.eval(&c1.scale_a(&a)).unwrap().value.expect("regulated");
            assert!(reg.plus.same(&va, &reg.plus.scale(&v1, &a).unwrap()).unwrap(), "A({n}) scaling");
        }
    }
}
