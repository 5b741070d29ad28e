//! Extensions 0 → Y → E_f → X → 0 of Hodge–Pink structures, their classes
//! in Ext¹(X, Y) ≅ Hom_L((j))(X, Y) / (Hom_R(X, Y) + Hom(q_X, q_Y)), Baer
//! sums, pullbacks and Hodge additivity.

use crate::error::{Error, Result};
use crate::field_tower::Laurent;
use crate::tate::Coeff;

use super::jseries::JSeries;
use super::lattice::{mat_mul, upper_inverse, vec_is_zero, JCols, JVec, Lattice};
use super::quotient::{from_kvec, kvec_eq, phi_lattice, phi_vec, KVec, QuotientForm};
use super::structure::{HodgePinkStructure, Ring};

pub type Hps = HodgePinkStructure<Laurent>;

/// An extension with its middle term; coordinates of E are (Y, X).
#[derive(Clone, Debug)]
pub struct HpExtension {
    pub y: Hps,
    pub x: Hps,
    pub middle: Hps,
}

/// q_{E_f} = {(q_y + f(q_x), q_x)}; `f` is given by its r_X columns.
pub fn hp_extension_build(x: &Hps, y: &Hps, f: &JCols<Laurent>) -> Result<HpExtension> {
    let (ry, rx) = (y.rank(), x.rank());
    if f.len() != rx || f.iter().any(|c| c.len() != ry) {
        return Err(Error::UnsupportedShape(format!("f must be {ry}×{rx}")));
    }
    if x.ring != y.ring {
        return Err(Error::Precondition("X and Y over different rings".into()));
    }
    let like = y.like();
    let nj = y.nj();
    let zero = || JSeries::zero(like.zero_like(), nj);
    let mut gens: Vec<JVec<Laurent>> = Vec::new();
    for c in y.q.basis() {
        let mut v = c.clone();
        v.extend((0..rx).map(|_| zero()));
        gens.push(v);
    }
    let fx = mat_mul(f, x.q.basis());
    for (fc, xc) in fx.iter().zip(x.q.basis()) {
        let mut v = fc.clone();
        v.extend(xc.iter().cloned());
        gens.push(v);
    }
    let q = Lattice::from_generators(ry + rx, &gens)
        .map_err(|e| Error::PrecisionExhausted(format!("pole shift of f: {e}")))?;
    let middle = HodgePinkStructure::new(y.ring, q);
    let ext = HpExtension { y: y.clone(), x: x.clone(), middle };
    if !ext.is_strict()? {
        return Err(Error::NonStrict("lattice images differ from q_Y, q_X".into()));
    }
    Ok(ext)
}

impl HpExtension {
    /// q_E ∩ Y and the projection of q_E to X.
    pub fn sub_and_quotient(&self) -> Result<(Lattice<Laurent>, Lattice<Laurent>)> {
        let ry = self.y.rank();
        let cols = self.middle.q.basis();
        // the Hermite basis is upper triangular, so the first r_Y columns
        // span the part of q_E supported on Y
        let sub: Vec<JVec<Laurent>> = cols[..ry].iter().map(|c| c[..ry].to_vec()).collect();
        let quo: Vec<JVec<Laurent>> = cols.iter().map(|c| c[ry..].to_vec()).filter(|c| !vec_is_zero(c)).collect();
        Ok((Lattice::from_generators(ry, &sub)?, Lattice::from_generators(self.x.rank(), &quo)?))
    }

    /// Strictness: q_E ∩ Y = q_Y and pr(q_E) = q_X.
    pub fn is_strict(&self) -> Result<bool> {
        let (sub, quo) = self.sub_and_quotient()?;
        Ok(sub.same_as(&self.y.q) && quo.same_as(&self.x.q))
    }

    /// A classifier f̃ recovered from the lattice alone: lift a basis of
    /// q_X into q_E and read off the Y-components.
    pub fn lift(&self) -> Result<JCols<Laurent>> {
        if !self.is_strict()? {
            return Err(Error::NonStrict("cannot classify a non-strict sequence".into()));
        }
        let ry = self.y.rank();
        let cols = &self.middle.q.basis()[ry..];
        let xb: JCols<Laurent> = cols.iter().map(|c| c[ry..].to_vec()).collect();
        let yb: JCols<Laurent> = cols.iter().map(|c| c[..ry].to_vec()).collect();
        Ok(mat_mul(&yb, &upper_inverse(&xb)?))
    }

    /// Explicit Baer sum: fibre product over X followed by the pushout
    /// along the addition Y ⊕ Y → Y, computed on lattice bases.
    pub fn baer_sum(&self, o: &HpExtension) -> Result<HpExtension> {
        let ry = self.y.rank();
        let a = &self.middle.q.basis()[ry..];
        let b = &o.middle.q.basis()[ry..];
        let mut gens: Vec<JVec<Laurent>> = self.middle.q.basis()[..ry].to_vec();
        for (ca, cb) in a.iter().zip(b) {
            if ca[ry..].iter().zip(&cb[ry..]).any(|(s, t)| !s.approx_eq(t)) {
                return Err(Error::Precondition("extensions of different quotients".into()));
            }
            let mut v: JVec<Laurent> = ca[..ry].iter().zip(&cb[..ry]).map(|(s, t)| s.add(t)).collect();
            v.extend(ca[ry..].iter().cloned());
            gens.push(v);
        }
        let q = Lattice::from_generators(self.middle.rank(), &gens)?;
        let ext = HpExtension { y: self.y.clone(), x: self.x.clone(), middle: HodgePinkStructure::new(self.y.ring, q) };
        if !ext.is_strict()? {
            return Err(Error::NonStrict("Baer sum".into()));
        }
        Ok(ext)
    }

    /// Hodge additivity by Definition: the Hodge polygon of E equals that
    /// of Y ⊕ X.
    pub fn polygon_additive(&self) -> Result<bool> {
        let mut a = self.middle.hodge_jumps()?;
        let mut b = self.y.direct_sum(&self.x)?.hodge_jumps()?;
        a.sort();
        b.sort();
        Ok(a == b)
    }
}

/// A class in Ext¹(X, Y), as the canonical normal form of vec(φ(f)).
#[derive(Clone, Debug)]
pub struct HpExtClass {
    pub rep: KVec,
    pub hodge_additive: bool,
    /// The class is represented at finite Galois level (always true for
    /// classes built here).
    pub analytic_reduction: bool,
}

impl HpExtClass {
    pub fn is_zero(&self) -> bool {
        self.rep.is_empty()
    }
    pub fn same_class(&self, o: &HpExtClass) -> bool {
        kvec_eq(&self.rep, &o.rep)
    }
}

/// Ext¹(X, Y) with its quotient presentation.
#[derive(Clone, Debug)]
pub struct ExtGroup {
    pub x: Hps,
    pub y: Hps,
    form: QuotientForm,
    /// Hom(p_X, p_Y) + Hom(q_X, q_Y), in φ-coordinates.
    pink: Lattice<Laurent>,
    /// Hom(q_X, q_Y), in φ-coordinates.
    homq: Lattice<Laurent>,
}

/// vec index of the entry (a, b) of an r_Y × r_X matrix.
fn vidx(ry: usize, a: usize, b: usize) -> usize {
    b * ry + a
}

fn vectorize(f: &JCols<Laurent>) -> JVec<Laurent> {
    f.iter().flat_map(|c| c.iter().cloned()).collect()
}

impl ExtGroup {
    pub fn new(x: &Hps, y: &Hps) -> Result<Self> {
        let (ry, rx) = (y.rank(), x.rank());
        let like = y.like();
        let nj = y.nj();
        let n = ry * rx;
        let qx = phi_lattice(&x.q)?;
        let qy = phi_lattice(&y.q)?;
        let bxi = upper_inverse(qx.basis())?;
        let mut gens = Vec::new();
        for a in 0..ry {
            for b in 0..rx {
                let mut v = vec![JSeries::zero(like.zero_like(), nj); n];
                for i in 0..ry {
                    for k in 0..rx {
                        // (B_Y)_{i a} (B_X^{-1})_{b k}
                        v[vidx(ry, i, k)] = qy.basis()[a][i].mul(&bxi[k][b]);
                    }
                }
                gens.push(v);
            }
        }
        let homq = Lattice::from_generators(n, &gens)?;
        let std = Lattice::standard(n, &like, nj);
        let pink = homq.sum(&std)?;
        let units: Vec<JVec<Laurent>> = std.basis().clone();
        let form = QuotientForm::new(y.ring, homq.clone(), &units)?;
        Ok(ExtGroup { x: x.clone(), y: y.clone(), form, pink, homq })
    }

    pub fn dim(&self) -> usize {
        self.y.rank() * self.x.rank()
    }

    pub fn hom_q(&self) -> &Lattice<Laurent> {
        &self.homq
    }

    fn class_of_phi(&self, v: &[JSeries<Laurent>]) -> Result<HpExtClass> {
        let rep = self.form.normal_form(v)?;
        let hodge_additive = self.pink.contains(v);
        Ok(HpExtClass { rep, hodge_additive, analytic_reduction: true })
    }

    /// The class of E_f.
    pub fn class_of(&self, f: &JCols<Laurent>) -> Result<HpExtClass> {
        self.class_of_phi(&phi_vec(&vectorize(f)))
    }

    /// Classifies an extension from its middle lattice.
    pub fn classify(&self, e: &HpExtension) -> Result<HpExtClass> {
        self.class_of(&e.lift()?)
    }

    fn rep_vec(&self, c: &HpExtClass) -> JVec<Laurent> {
        from_kvec(&c.rep, self.dim(), &self.y.like(), self.y.nj())
    }

    pub fn baer(&self, a: &HpExtClass, b: &HpExtClass) -> Result<HpExtClass> {
        let v: JVec<Laurent> = self.rep_vec(a).iter().zip(self.rep_vec(b)).map(|(s, t)| s.add(&t)).collect();
        self.class_of_phi(&v)
    }

    /// Pullback along a·id_X for a ∈ R (an element of K∞, polynomial in θ
    /// when R = A).
    pub fn pullback(&self, c: &HpExtClass, a: &Laurent) -> Result<HpExtClass> {
        if self.y.ring == Ring::A && !a.at_or_above(1).is_zero() {
            return Err(Error::Precondition("scalar outside A".into()));
        }
        let v: JVec<Laurent> = self.rep_vec(c).iter().map(|s| s.mul_coeff(a)).collect();
        self.class_of_phi(&v)
    }

    /// Pink's criterion: f ∈ Hom(p_X, p_Y) + Hom(q_X, q_Y).
    pub fn is_hodge_additive(&self, f: &JCols<Laurent>) -> Result<bool> {
        Ok(self.pink.contains(&phi_vec(&vectorize(f))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Fq;
    use crate::hodge_pink::jseries::{nu_kinf, EXACT};

    fn setup() -> (Fq, Laurent) {
        let f = Fq::new(3, 1).unwrap();
        let like = Laurent::zero_with_cap(&f, 40, 40);
        (f, like)
    }

    #[test]
    fn j_inverse_extension_of_units() {
        let (_f, like) = setup();
        let one = HodgePinkStructure::unit(Ring::KInf, &like, 12);
        let g = ExtGroup::new(&one, &one).unwrap();
        let f = vec![vec![JSeries::jpow(&like, -1, 12)]];
        let e = hp_extension_build(&one, &one, &f).unwrap();
        let c = g.classify(&e).unwrap();
        assert!(!c.is_zero());
        assert!(!c.hodge_additive);
        assert!(!e.polygon_additive().unwrap());
        assert!(!g.is_hodge_additive(&f).unwrap());
        // f = 0 splits
        let z = vec![vec![JSeries::zero(like.clone(), 12)]];
        let e0 = hp_extension_build(&one, &one, &z).unwrap();
        assert!(g.classify(&e0).unwrap().is_zero());
        assert!(e0.polygon_additive().unwrap());
    }

    #[test]
    fn theta_class_is_additive_and_split_over_kinf() {
        let (f, like) = setup();
        let one = HodgePinkStructure::unit(Ring::KInf, &like, 12);
        let g = ExtGroup::new(&one, &one).unwrap();
        let th = vec![vec![JSeries::constant(Laurent::from_terms(&f, &[(-1, 1)], 40), 12)]];
        let c = g.class_of(&th).unwrap();
        assert!(c.hodge_additive);
        assert!(c.is_zero());
        let e = hp_extension_build(&one, &one, &th).unwrap();
        assert!(e.polygon_additive().unwrap());
    }

    #[test]
    fn baer_sum_and_pullback() {
        let (f, like) = setup();
        let x = HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like, 12).scaled(2));
        let y = HodgePinkStructure::unit(Ring::KInf, &like, 12);
        let grp = ExtGroup::new(&x, &y).unwrap();
        let c1 = Laurent::from_terms(&f, &[(1, 1)], 40);
        let c2 = Laurent::from_terms(&f, &[(0, 2), (2, 1)], 40);
        let f1 = vec![vec![JSeries::new(like.clone(), -3, vec![c1.clone(), c2.clone()], EXACT, 12)]];
        let f2 = vec![vec![JSeries::new(like.clone(), -2, vec![c2.clone(), c1.clone(), c1.clone()], EXACT, 12)]];
        let e1 = hp_extension_build(&x, &y, &f1).unwrap();
        let e2 = hp_extension_build(&x, &y, &f2).unwrap();
        let s = e1.baer_sum(&e2).unwrap();
        let via_lattice = grp.classify(&s).unwrap();
        let via_reps = grp.baer(&grp.classify(&e1).unwrap(), &grp.classify(&e2).unwrap()).unwrap();
        assert!(via_lattice.same_class(&via_reps));
        let a = Laurent::from_terms(&f, &[(-1, 1), (0, 1)], 40);
        let pb = grp.pullback(&grp.class_of(&f1).unwrap(), &a).unwrap();
        // a·f over L((j)) means ν(a)·f
        let nu_a = nu_kinf(&a, 12);
        let fa_nu = vec![vec![f1[0][0].mul(&nu_a)]];
        assert!(pb.same_class(&grp.class_of(&fa_nu).unwrap()));
    }
}
