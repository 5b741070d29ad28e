//! Finite Galois extensions L of K∞ as explicit towers.
//!
//! The base layer is L0 = K∞(s) with s^{q−1} = −u·θ, stored as Laurent
//! series in σ = 1/s (so 1/θ = −u·σ^{q−1}). Above it sit Artin–Schreier
//! layers α_i^q − α_i = c_i with c_i = σ^{−m_i} (q ∤ m_i) or c_i = 1
//! (m_i = 0, the unramified layer). An element is a sparse sum of
//! L0-coefficients times monomials ∏ α_i^{e_i} with 0 ≤ e_i < q.
//!
//! Towers only ever grow by appending layers, so an element built over a
//! tower stays valid over every extension of it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::fq::Fq;
use super::laurent::Laurent;
use super::peel::peel_artin_schreier;
use crate::error::{Error, Result};

struct TowerData {
    field: Fq,
    u: u8,
    nu: i64,
    layers: Vec<i64>,
}

#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower(q={}, u={}, layers={:?})", self.q(), self.0.u, self.0.layers)
    }
}

impl PartialEq for Tower {
    fn eq(&self, o: &Self) -> bool {
        self.0.field == o.0.field && self.0.u == o.0.u && self.0.nu == o.0.nu && self.0.layers == o.0.layers
    }
}

/// An element σ ↦ ζ^{−k}σ, α_i ↦ ζ^{k m_i}α_i + a_i of Gal(L/K∞).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisElem {
    pub k: i64,
    pub shifts: Vec<u8>,
}

impl GaloisElem {
    pub fn identity() -> Self {
        GaloisElem { k: 0, shifts: vec![] }
    }
    pub fn kummer(k: i64) -> Self {
        GaloisElem { k, shifts: vec![] }
    }
    fn shift(&self, i: usize) -> u8 {
        self.shifts.get(i).copied().unwrap_or(0)
    }
    /// The composite `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GaloisElem, tower: &Tower) -> GaloisElem {
        let f = tower.field();
        let q1 = f.q() as i64 - 1;
        let n = self.shifts.len().max(other.shifts.len());
        let shifts = (0..n)
            .map(|i| {
                let m = tower.layers().get(i).copied().unwrap_or(0);
                f.add(f.mul(f.zeta_pow(other.k * m), self.shift(i)), other.shift(i))
            })
            .collect();
        GaloisElem { k: (self.k + other.k).rem_euclid(q1.max(1)), shifts }
    }
}

impl Tower {
    /// The Kummer base with s^{q−1} = −θ and 1/θ-precision `nu`.
    pub fn new(field: &Fq, nu: i64) -> Self {
        Tower(Arc::new(TowerData { field: field.clone(), u: 1, nu, layers: vec![] }))
    }

    /// The Kummer base with s^{q−1} = −u·θ.
    pub fn with_unit(field: &Fq, nu: i64, u: u8) -> Result<Self> {
        if u == 0 {
            return Err(Error::Precondition("Kummer constant must be nonzero".into()));
        }
        Ok(Tower(Arc::new(TowerData { field: field.clone(), u, nu, layers: vec![] })))
    }

    pub fn field(&self) -> &Fq {
        &self.0.field
    }
    pub fn q(&self) -> usize {
        self.0.field.q()
    }
    pub fn u(&self) -> u8 {
        self.0.u
    }
    pub fn nu(&self) -> i64 {
        self.0.nu
    }
    pub fn layers(&self) -> &[i64] {
        &self.0.layers
    }
    /// Precision cap in σ.
    pub fn sigma_cap(&self) -> i64 {
        self.0.nu * (self.q() as i64 - 1)
    }
    /// [L : K∞].
    pub fn degree(&self) -> f64 {
        (self.q() as f64 - 1.0) * (self.q() as f64).powi(self.0.layers.len() as i32)
    }

    /// True when `self` is a prefix of `other` (same base, fewer layers).
    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.0.field == other.0.field
            && self.0.u == other.0.u
            && self.0.nu == other.0.nu
            && other.0.layers.starts_with(&self.0.layers)
    }

    /// The longer of two compatible towers.
    pub fn join(&self, other: &Tower) -> Result<Tower> {
        if self.is_prefix_of(other) {
            Ok(other.clone())
        } else if other.is_prefix_of(self) {
            Ok(self.clone())
        } else {
            Err(Error::NotInTower)
        }
    }

    pub fn layer_index(&self, m: i64) -> Option<usize> {
        self.0.layers.iter().position(|&x| x == m)
    }

    /// Appends the layer α^q − α = σ^{−m} (or = 1 when m = 0).
    pub fn adjoin(&self, m: i64) -> Result<Tower> {
        let q = self.q() as i64;
        if m < 0 || (m > 0 && m % q == 0) {
            return Err(Error::UnsupportedShape(format!("Artin–Schreier conductor {m} is not reduced")));
        }
        if m == 0 && self.field().e() > 1 {
            return Err(Error::UnsupportedShape(
                "unramified Artin–Schreier layer over a non-prime residue field".into(),
            ));
        }
        if self.layer_index(m).is_some() {
            return Ok(self.clone());
        }
        let mut layers = self.0.layers.clone();
        layers.push(m);
        Ok(Tower(Arc::new(TowerData { field: self.0.field.clone(), u: self.0.u, nu: self.0.nu, layers })))
    }

    /// Right-hand side c_i of the i-th layer as an L0 element.
    pub fn layer_constant(&self, i: usize) -> Laurent {
        let m = self.0.layers[i];
        Laurent::monomial(self.field(), 1, -m, self.sigma_cap())
    }

    /// Embeds an element of K∞ (Laurent in π = 1/θ) into L0.
    pub fn embed_kinf(&self, x: &Laurent) -> Laurent {
        let f = self.field();
        let q1 = self.q() as i64 - 1;
        let mu = f.neg(self.0.u);
        let terms: Vec<(i64, u8)> = x.terms().map(|(k, c)| (k * q1, f.mul(c, f.pow(mu, k)))).collect();
        let prec = x.prec().saturating_mul(q1);
        Laurent::build(f, &terms, prec, self.sigma_cap(), x.is_exact())
    }

    /// Inverse of `embed_kinf` on elements of K∞; None if some exponent is
    /// not a multiple of q − 1.
    pub fn to_kinf(&self, y: &Laurent) -> Option<Laurent> {
        let f = self.field();
        let q1 = self.q() as i64 - 1;
        let mu = f.neg(self.0.u);
        let mut terms = Vec::new();
        for (j, c) in y.terms() {
            if j.rem_euclid(q1) != 0 {
                return None;
            }
            let k = j / q1;
            terms.push((k, f.mul(c, f.pow(mu, -k))));
        }
        let prec = y.prec().div_euclid(q1) + if y.prec().rem_euclid(q1) == 0 { 0 } else { 1 };
        Some(Laurent::build(f, &terms, prec, self.0.nu, y.is_exact()))
    }

    /// Galois generators: the Kummer generator (when q > 2) and, for every
    /// layer, translations by an F_p-basis of F_q.
    pub fn generators(&self) -> Vec<GaloisElem> {
        let mut g = Vec::new();
        if self.q() > 2 {
            g.push(GaloisElem::kummer(1));
        }
        let basis = self.field().prime_basis();
        for i in 0..self.0.layers.len() {
            let span: Vec<u8> = if self.0.layers[i] == 0 { vec![1] } else { basis.clone() };
            for b in span {
                let mut shifts = vec![0u8; i + 1];
                shifts[i] = b;
                g.push(GaloisElem { k: 0, shifts });
            }
        }
        g
    }

    /// Every element of Gal(L/K∞), or None when the group has more than
    /// `limit` elements.
    pub fn group_elements(&self, limit: usize) -> Option<Vec<GaloisElem>> {
        let q = self.q();
        let n = self.0.layers.len();
        let size = (q - 1).checked_mul(q.checked_pow(n as u32)?)?;
        if size > limit {
            return None;
        }
        let mut out = Vec::with_capacity(size);
        for k in 0..(q - 1) as i64 {
            for idx in 0..q.pow(n as u32) {
                let mut r = idx;
                let shifts = (0..n)
                    .map(|_| {
                        let d = (r % q) as u8;
                        r /= q;
                        d
                    })
                    .collect();
                out.push(GaloisElem { k, shifts });
            }
        }
        Some(out)
    }

    pub fn zero(&self) -> LElem {
        LElem { tower: self.clone(), comps: BTreeMap::new(), floor: self.sigma_cap() }
    }
    pub fn one(&self) -> LElem {
        self.from_base(Laurent::one(self.field(), self.sigma_cap()))
    }
    pub fn from_base(&self, x: Laurent) -> LElem {
        let mut comps = BTreeMap::new();
        let floor = x.prec();
        comps.insert(vec![], x);
        LElem { tower: self.clone(), comps, floor }.pruned()
    }
    pub fn from_kinf(&self, x: &Laurent) -> LElem {
        self.from_base(self.embed_kinf(x))
    }
    pub fn from_fq(&self, c: u8) -> LElem {
        self.from_base(Laurent::monomial(self.field(), c, 0, self.sigma_cap()))
    }
    /// s = σ^{−1}.
    pub fn s(&self) -> LElem {
        self.from_base(Laurent::monomial(self.field(), 1, -1, self.sigma_cap()))
    }
    /// θ as an element of L.
    pub fn theta(&self) -> LElem {
        self.from_kinf(&Laurent::monomial(self.field(), 1, -1, self.0.nu))
    }
    /// The generator of the i-th Artin–Schreier layer.
    pub fn alpha(&self, i: usize) -> LElem {
        let mut key = vec![0u8; i + 1];
        key[i] = 1;
        let mut comps = BTreeMap::new();
        comps.insert(key, Laurent::one(self.field(), self.sigma_cap()));
        LElem { tower: self.clone(), comps, floor: self.sigma_cap() }
    }

    /// An element of trace one: Tr_{L/K∞}(β) = 1.
    pub fn trace_one(&self) -> LElem {
        let f = self.field();
        // 1/(q−1) = −1 in characteristic p
        let mut beta = self.from_fq(f.neg(1));
        for i in 0..self.0.layers.len() {
            let a = self.alpha(i);
            let mut pw = self.one();
            for _ in 0..self.q() - 1 {
                pw = pw.mul(&a);
            }
            beta = beta.mul(&pw.neg());
        }
        beta
    }
}

/// An element of L: sparse map from layer-exponent vectors (trailing zeros
/// stripped) to L0 coefficients.
#[derive(Clone)]
pub struct LElem {
    tower: Tower,
    comps: BTreeMap<Vec<u8>, Laurent>,
    /// Precision floor inherited from components that vanished.
    floor: i64,
}

impl fmt::Debug for LElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.comps.iter().map(|(k, v)| format!("[{:?}] {}", k, v.show("σ"))).collect();
        write!(f, "LElem({})", parts.join(" ; "))
    }
}

impl PartialEq for LElem {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

fn strip(mut key: Vec<u8>) -> Vec<u8> {
    while key.last() == Some(&0) {
        key.pop();
    }
    key
}

impl LElem {
    fn pruned(mut self) -> Self {
        let mut floor = self.floor;
        self.comps.retain(|_, v| {
            if v.is_zero() {
                floor = floor.min(v.prec());
                false
            } else {
                true
            }
        });
        self.floor = floor;
        self
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }
    pub fn field(&self) -> &Fq {
        self.tower.field()
    }

    /// Reinterprets the element over an extension of its tower.
    pub fn lift(&self, t: &Tower) -> Result<LElem> {
        if !self.tower.is_prefix_of(t) {
            return Err(Error::NotInTower);
        }
        Ok(LElem { tower: t.clone(), ..self.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|v| v.is_zero())
    }

    /// Minimum σ-precision over all components.
    pub fn prec(&self) -> i64 {
        self.comps.values().map(|v| v.prec()).fold(self.floor, i64::min)
    }

    /// Minimum σ-valuation over components (a lower bound on the valuation
    /// of the element for the tower's normalized absolute value is not
    /// claimed; this is a coordinate-wise quantity).
    pub fn coord_valuation(&self) -> Option<i64> {
        self.comps.values().filter_map(|v| v.valuation()).min()
    }

    pub fn base(&self) -> Laurent {
        self.comps
            .get(&vec![])
            .cloned()
            .unwrap_or_else(|| Laurent::zero_with_cap(self.field(), self.floor, self.tower.sigma_cap()))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<u8>, &Laurent)> {
        self.comps.iter()
    }

    /// True when every component along a non-trivial tower monomial vanishes.
    pub fn in_base(&self) -> bool {
        self.comps.iter().all(|(k, v)| k.is_empty() || v.is_zero())
    }

    /// The value as an element of K∞ when it lies there.
    pub fn to_kinf(&self) -> Option<Laurent> {
        if !self.in_base() {
            return None;
        }
        self.tower.to_kinf(&self.base())
    }

    /// The value as a constant of F_q when it is one (at precision).
    pub fn to_fq(&self) -> Option<u8> {
        if !self.in_base() {
            return None;
        }
        let b = self.base();
        if b.prec() <= 0 {
            return None;
        }
        if b.terms().any(|(k, _)| k != 0) {
            return None;
        }
        Some(b.coeff(0))
    }

    fn combine(&self, o: &LElem, neg: bool) -> LElem {
        let tower = self.tower.join(&o.tower).expect("incompatible towers");
        let mut comps = self.comps.clone();
        for (k, v) in &o.comps {
            let v = if neg { v.neg() } else { v.clone() };
            match comps.get_mut(k) {
                Some(x) => *x = x.add(&v),
                None => {
                    let z = Laurent::zero_with_cap(self.field(), self.floor, tower.sigma_cap());
                    comps.insert(k.clone(), z.add(&v));
                }
            }
        }
        for (k, v) in comps.iter_mut() {
            if !o.comps.contains_key(k) {
                *v = v.with_prec(o.floor);
            }
        }
        LElem { tower, comps, floor: self.floor.min(o.floor) }.pruned()
    }

    pub fn add(&self, o: &LElem) -> LElem {
        self.combine(o, false)
    }
    pub fn sub(&self, o: &LElem) -> LElem {
        self.combine(o, true)
    }
    pub fn neg(&self) -> LElem {
        LElem { comps: self.comps.iter().map(|(k, v)| (k.clone(), v.neg())).collect(), ..self.clone() }
    }
    pub fn scale(&self, c: u8) -> LElem {
        LElem { comps: self.comps.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect(), ..self.clone() }
            .pruned()
    }
    /// Multiplication by an element of L0.
    pub fn mul_base(&self, b: &Laurent) -> LElem {
        let fl = self.floor + b.val_bound();
        LElem {
            comps: self.comps.iter().map(|(k, v)| (k.clone(), v.mul(b))).collect(),
            floor: fl.min(self.tower.sigma_cap()),
            tower: self.tower.clone(),
        }
        .pruned()
    }
    /// Multiplication by σ^k.
    pub fn shift(&self, k: i64) -> LElem {
        LElem {
            comps: self.comps.iter().map(|(key, v)| (key.clone(), v.shift(k))).collect(),
            floor: (self.floor + k).min(self.tower.sigma_cap()),
            tower: self.tower.clone(),
        }
    }

    pub fn mul(&self, o: &LElem) -> LElem {
        let tower = self.tower.join(&o.tower).expect("incompatible towers");
        let cap = tower.sigma_cap();
        let mut out: BTreeMap<Vec<u8>, Laurent> = BTreeMap::new();
        let fa = self.floor + o.coord_valuation().unwrap_or(o.floor);
        let fb = o.floor + self.coord_valuation().unwrap_or(self.floor);
        let floor = fa.min(fb).min(cap);
        for (ka, va) in &self.comps {
            for (kb, vb) in &o.comps {
                let prod = va.mul(vb);
                for (key, factor) in multiply_keys(ka, kb, &tower) {
                    let term = match factor {
                        Some(c) => prod.mul(&c),
                        None => prod.clone(),
                    };
                    match out.get_mut(&key) {
                        Some(x) => *x = x.add(&term),
                        None => {
                            out.insert(key, term);
                        }
                    }
                }
            }
        }
        LElem { tower, comps: out, floor }.pruned()
    }

    /// The q-power Frobenius x ↦ x^q.
    pub fn frob(&self) -> LElem {
        let t = &self.tower;
        let cap = t.sigma_cap();
        let f = self.field();
        let q = self.tower.q() as i64;
        let mut out: BTreeMap<Vec<u8>, Laurent> = BTreeMap::new();
        for (key, v) in &self.comps {
            let base = v.frob();
            // ∏ (α_i + c_i)^{e_i}
            let mut expansion: Vec<(Vec<u8>, Laurent)> = vec![(vec![], Laurent::one(f, cap))];
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let c = t.layer_constant(i);
                let mut next = Vec::new();
                for (k0, coef) in &expansion {
                    for s in 0..=e {
                        let b = f.binom(e as u64, s as u64);
                        if b == 0 {
                            continue;
                        }
                        let mut k = k0.clone();
                        if k.len() <= i {
                            k.resize(i + 1, 0);
                        }
                        k[i] = s;
                        let cpow = c.pow((e - s) as u64).scale(b);
                        next.push((strip(k), coef.mul(&cpow)));
                    }
                }
                expansion = next;
            }
            for (k, coef) in expansion {
                let term = base.mul(&coef);
                match out.get_mut(&k) {
                    Some(x) => *x = x.add(&term),
                    None => {
                        out.insert(k, term);
                    }
                }
            }
        }
        let floor = self.floor.saturating_mul(q).min(cap);
        LElem { tower: t.clone(), comps: out, floor }.pruned()
    }

    /// x ↦ x^{q^k}.
    pub fn frob_pow(&self, k: u32) -> LElem {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.frob();
        }
        x
    }

    /// Applies a Galois element.
    pub fn galois(&self, g: &GaloisElem) -> Result<LElem> {
        let t = &self.tower;
        let f = self.field();
        let mut out: BTreeMap<Vec<u8>, Laurent> = BTreeMap::new();
        for (key, v) in &self.comps {
            // σ^j ↦ ζ^{−kj} σ^j
            let terms: Vec<(i64, u8)> = v.terms().map(|(j, c)| (j, f.mul(c, f.zeta_pow(-g.k * j)))).collect();
            let base = Laurent::build(f, &terms, v.prec(), v.cap(), v.is_exact());
            let mut expansion: Vec<(Vec<u8>, u8)> = vec![(vec![], 1)];
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i >= t.layers().len() {
                    return Err(Error::NotInTower);
                }
                let m = t.layers()[i];
                let z = f.zeta_pow(g.k * m);
                let a = g.shift(i);
                let mut next = Vec::new();
                for (k0, coef) in &expansion {
                    for s in 0..=e {
                        let b = f.binom(e as u64, s as u64);
                        let c = f.mul(f.mul(b, f.pow(z, s as i64)), f.pow(a, (e - s) as i64));
                        if c == 0 {
                            continue;
                        }
                        let mut k = k0.clone();
                        if k.len() <= i {
                            k.resize(i + 1, 0);
                        }
                        k[i] = s;
                        next.push((strip(k), f.mul(*coef, c)));
                    }
                }
                expansion = next;
            }
            for (k, c) in expansion {
                let term = base.scale(c);
                match out.get_mut(&k) {
                    Some(x) => *x = x.add(&term),
                    None => {
                        out.insert(k, term);
                    }
                }
            }
        }
        Ok(LElem { tower: t.clone(), comps: out, floor: self.floor }.pruned())
    }

    /// Inverse of an element of L0 (elements involving layer generators are
    /// not inverted here).
    pub fn inv(&self) -> Result<LElem> {
        if !self.in_base() {
            return Err(Error::UnsupportedShape("inverse of an element outside L0".into()));
        }
        Ok(self.tower.from_base(self.base().inv()?))
    }

    pub fn with_prec(&self, p: i64) -> LElem {
        LElem {
            comps: self.comps.iter().map(|(k, v)| (k.clone(), v.with_prec(p))).collect(),
            floor: self.floor.min(p),
            tower: self.tower.clone(),
        }
        .pruned()
    }
}

/// Product of two layer monomials, reduced with α^q = α + c.
/// Returns (monomial, optional L0 factor) pairs.
fn multiply_keys(a: &[u8], b: &[u8], t: &Tower) -> Vec<(Vec<u8>, Option<Laurent>)> {
    let q = t.q() as u8;
    let n = a.len().max(b.len());
    let mut out: Vec<(Vec<u8>, Option<Laurent>)> = vec![(vec![0; n], None)];
    for i in 0..n {
        let e = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
        if e < q {
            for (k, _) in out.iter_mut() {
                k[i] = e;
            }
            continue;
        }
        // α^e = α^{e−q+1} + c·α^{e−q}
        let c = t.layer_constant(i);
        let mut next = Vec::with_capacity(out.len() * 2);
        for (k, fac) in out {
            let mut k1 = k.clone();
            k1[i] = e - q + 1;
            next.push((k1, fac.clone()));
            let mut k2 = k;
            k2[i] = e - q;
            let f2 = match fac {
                Some(x) => x.mul(&c),
                None => c.clone(),
            };
            next.push((k2, Some(f2)));
        }
        out = next;
    }
    out.into_iter().map(|(k, f)| (strip(k), f)).collect()
}

/// Solution of x − x^q = c in L, possibly in an enlarged tower.
#[derive(Clone, Debug)]
pub struct AsSolution {
    pub x: LElem,
    pub tower: Tower,
}

/// Solves x − x^q = c. Without `allow_extension`, a class that needs a new
/// Artin–Schreier layer is reported as an obstruction.
pub fn solve_artin_schreier(c: &LElem, allow_extension: bool) -> Result<AsSolution> {
    let f = c.field().clone();
    let mut tower = c.tower().clone();
    let mut base_rhs = c.base();
    let mut x = tower.zero();
    for (key, b) in c.components() {
        if key.is_empty() {
            continue;
        }
        let nz: Vec<usize> = key.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, _)| i).collect();
        if nz.len() != 1 || key[nz[0]] != 1 {
            return Err(Error::UnsupportedShape(
                "Artin–Schreier right-hand side beyond linear layer terms".into(),
            ));
        }
        let i = nz[0];
        // x = y·α_i + z with y − y^q = b, z − z^q = y^q·c_i
        let p = peel_artin_schreier(b);
        if !p.determined {
            return Err(Error::PrecisionExhausted("Artin–Schreier layer coefficient".into()));
        }
        if !p.stuck.is_empty() {
            return Err(Error::UnsupportedShape("Artin–Schreier solution would be nonlinear in the tower".into()));
        }
        x = x.add(&tower.alpha(i).mul_base(&p.x));
        base_rhs = base_rhs.add(&p.x.frob().mul(&tower.layer_constant(i)));
    }
    let p = peel_artin_schreier(&base_rhs);
    if !p.determined {
        return Err(Error::PrecisionExhausted("Artin–Schreier base coefficient".into()));
    }
    x = x.add(&tower.from_base(p.x.clone()));
    let mut missing = Vec::new();
    for &(u, a) in &p.stuck {
        let m = -u;
        let idx = match tower.layer_index(m) {
            Some(i) => i,
            None if allow_extension => {
                tower = tower.adjoin(m)?;
                tower.layers().len() - 1
            }
            None => {
                missing.push((u, a));
                continue;
            }
        };
        x = x.lift(&tower)?.add(&tower.alpha(idx).scale(f.neg(a)));
    }
    if !missing.is_empty() {
        let desc: Vec<String> = missing.iter().map(|(u, a)| format!("{}·σ^{}", f.show(*a), u)).collect();
        return Err(Error::Unsolvable { obstruction: desc.join(" + ") });
    }
    let x = x.lift(&tower)?;
    Ok(AsSolution { x, tower })
}

/// Artin–Schreier over K∞ itself (π = 1/θ), never extending.
pub fn solve_artin_schreier_kinf(c: &Laurent) -> Result<Laurent> {
    let p = peel_artin_schreier(c);
    if !p.determined {
        return Err(Error::PrecisionExhausted("Artin–Schreier over K∞".into()));
    }
    if !p.stuck.is_empty() {
        let f = c.field();
        let desc: Vec<String> = p.stuck.iter().map(|(u, a)| format!("{}·θ^{}", f.show(*a), -u)).collect();
        return Err(Error::Unsolvable { obstruction: desc.join(" + ") });
    }
    Ok(p.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kummer_relation() {
        let f = Fq::new(3, 1).unwrap();
        let t = Tower::new(&f, 32);
        let s = t.s();
        let s2 = s.mul(&s);
        assert_eq!(s2, t.theta().neg());
        // τ(s) = −θ s
        assert_eq!(s.frob(), t.theta().neg().mul(&s));
    }

    #[test]
    fn kummer_conjugate() {
        let f = Fq::new(3, 1).unwrap();
        let t = Tower::new(&f, 32);
        let s = t.s();
        assert_eq!(s.galois(&GaloisElem::kummer(1)).unwrap(), s.neg());
        let th = t.theta();
        assert_eq!(th.galois(&GaloisElem::kummer(1)).unwrap(), th);
    }

    #[test]
    fn as_q2_theta_adjoins_layer() {
        let f = Fq::new(2, 1).unwrap();
        let t = Tower::new(&f, 32);
        let c = t.theta();
        assert!(matches!(solve_artin_schreier(&c, false), Err(Error::Unsolvable { .. })));
        let sol = solve_artin_schreier(&c, true).unwrap();
        assert_eq!(sol.tower.layers().len(), 1);
        let x = sol.x;
        let c = c.lift(&sol.tower).unwrap();
        assert_eq!(x.sub(&x.frob()), c);
        let other = x.add(&sol.tower.one());
        assert_eq!(other.sub(&other.frob()), c);
        let g = &sol.tower.generators()[0];
        assert_eq!(x.galois(g).unwrap(), other);
    }

    #[test]
    fn as_q2_small_rhs_stays_in_kinf() {
        let f = Fq::new(2, 1).unwrap();
        let c = Laurent::monomial(&f, 1, 2, 64);
        let x = solve_artin_schreier_kinf(&c).unwrap();
        assert_eq!(x.sub(&x.frob()), c);
    }

    #[test]
    fn group_action_composition() {
        let f = Fq::new(3, 1).unwrap();
        let t = Tower::new(&f, 24).adjoin(1).unwrap().adjoin(2).unwrap();
        let x = t.alpha(0).add(&t.alpha(1).mul(&t.s())).add(&t.theta().mul(&t.alpha(0)).mul(&t.alpha(1)));
        let g1 = GaloisElem { k: 1, shifts: vec![2, 1] };
        let g2 = GaloisElem { k: 1, shifts: vec![1, 0] };
        let lhs = x.galois(&g2).unwrap().galois(&g1).unwrap();
        let rhs = x.galois(&g1.compose(&g2, &t)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_one_element() {
        let f = Fq::new(3, 1).unwrap();
        let t = Tower::new(&f, 16).adjoin(1).unwrap();
        let beta = t.trace_one();
        let mut tr = t.zero();
        for g in t.group_elements(100).unwrap() {
            tr = tr.add(&beta.galois(&g).unwrap());
        }
        assert_eq!(tr, t.one());
    }
}
