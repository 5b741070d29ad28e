//! The mock regulator ρ for A(n) = (A[θ], c·j^{−n}), n ≥ 1.
//!
//! A class m ∈ N_A with r_B(m) = 0 is pushed through the chain:
//!
//! 1. ξ ∈ M ⊗ K∞⟨t⟩ with ξ − τξ = m (slice inclusion into the cone);
//! 2. ξ = a + o + ξ_deep by π-adic order (π^{≤0}, π^{1..c−1}, π^{≥c}),
//!    giving the Zariski cocycle n_A' = m − (id−τ)a, n_B = m − (id−τ)(a+o);
//! 3. restriction of v = n_B to the chart at ∞×∞ with coordinates
//!    s = 1/t, u = 1/θ, where δ = s − u = −su·j and X = δ^n·v is a
//!    Laurent polynomial;
//! 4. the normal form ỹ = Σ_i τ^i(v) in F_q((s))[[u]] modulo u^U, where
//!    (ι−τ) is unitriangular on u^b·F_q((s)), b ≥ c;
//! 5. Y = δ^n·ỹ = X + c·(−su)^n·ỹ(s, u^q), expanded along the diagonal
//!    s = u/(1+uj): the principal part of Y·δ^{−n} is the value.
//!
//! Truncating ỹ at u^U perturbs Y only by terms of total (s,u)-degree at
//! least (q−1)U + const, which bounds the π-precision of the value.

use std::collections::BTreeMap;

use serde::Serialize;

use super::model::{build_cxc_shtuka_from, DEntry, ShtukaModel};
use crate::betti::{betti_realize, CokerClass, H1Solver};
use crate::error::{Error, Result};
use crate::field_tower::{Fq, Laurent};
use crate::hodge_pink::jseries::JSeries;
use crate::hodge_pink::quotient::KVec;
use crate::hodge_pink::structure::Ring;
use crate::motive::{IntegralModel, TMotive, TauEntry};
use crate::poly::{Poly, Poly2};
use crate::regulator::gamma::hodge_realize;
use crate::regulator::extension::MotExtClass;
use crate::regulator::plus::{PlusPresentation, Regulator};
use crate::tate::{Precision, TateSeries};

/// Laurent polynomials in (s, u), keyed by (u-exponent, s-exponent).
type Su = BTreeMap<(i64, i64), u8>;

fn su_axpy(f: &Fq, v: &mut Su, a: u8, w: &Su) {
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

fn su_add(f: &Fq, a: &Su, b: &Su) -> Su {
    let mut r = a.clone();
    su_axpy(f, &mut r, 1, b);
    r
}

fn su_sub(f: &Fq, a: &Su, b: &Su) -> Su {
    let mut r = a.clone();
    su_axpy(f, &mut r, f.neg(1), b);
    r
}

/// Product, dropping u-exponents ≥ `u_cap` when given.
fn su_mul(f: &Fq, a: &Su, b: &Su, u_cap: Option<i64>) -> Su {
    let mut r = Su::new();
    for (&(ua, sa), &ca) in a {
        for (&(ub, sb), &cb) in b {
            if u_cap.is_some_and(|cap| ua + ub >= cap) {
                continue;
            }
            let e = r.entry((ua + ub, sa + sb)).or_insert(0);
            *e = f.add(*e, f.mul(ca, cb));
        }
    }
    r.retain(|_, c| *c != 0);
    r
}

fn su_mono(c: u8, u: i64, s: i64) -> Su {
    if c == 0 {
        Su::new()
    } else {
        Su::from([((u, s), c)])
    }
}

fn su_pow(f: &Fq, a: &Su, n: u32, u_cap: Option<i64>) -> Su {
    let mut r = su_mono(1, 0, 0);
    for _ in 0..n {
        r = su_mul(f, &r, a, u_cap);
    }
    r
}

/// u ↦ u^q (the Frobenius twist on the base side).
fn su_frob(a: &Su, q: i64) -> Su {
    a.iter().map(|(&(u, s), &c)| ((q * u, s), c)).collect()
}

fn su_trunc(a: &Su, u_cap: i64) -> Su {
    a.iter().filter(|(k, _)| k.0 < u_cap).map(|(&k, &c)| (k, c)).collect()
}

/// t^a θ^b ↦ s^{−a} u^{−b}.
fn su_of_poly2(p: &Poly2) -> Su {
    p.terms().map(|((a, b), c)| ((-(b as i64), -(a as i64)), c)).collect()
}

/// δ^n·x for x = num·j^e with n + e ≥ 0, using j = −δ/(su).
fn su_of_entry(f: &Fq, x: &TauEntry, n: i64) -> Result<Su> {
    if x.is_zero() {
        return Ok(Su::new());
    }
    if n + x.e < 0 {
        return Err(Error::NotInNA(format!("{} has a pole of order above {n} along t = θ", x.show())));
    }
    let delta = Su::from([((0, 1), 1), ((1, 0), f.neg(1))]);
    let sign = if x.e.rem_euclid(2) == 0 { 1 } else { f.neg(1) };
    let scaled = su_mul(f, &su_of_poly2(&x.num), &su_mono(sign, -x.e, -x.e), None);
    Ok(su_mul(f, &scaled, &su_pow(f, &delta, (n + x.e) as u32, None), None))
}

/// Binomial coefficient C(m, k) mod p for any integer m.
fn gbinom(f: &Fq, m: i64, k: i64) -> u8 {
    if m >= 0 {
        return f.binom(m as u64, k as u64);
    }
    let b = f.binom((-m + k - 1) as u64, k as u64);
    if k % 2 == 0 {
        b
    } else {
        f.neg(b)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MockOptions {
    pub prec: Precision,
    /// u-adic truncation of the normal form (raised to the stage if lower).
    pub u_trunc: i64,
    /// Extra truncation for the stability rerun.
    pub extra: i64,
    pub max_u: i64,
}

impl Default for MockOptions {
    fn default() -> Self {
        MockOptions { prec: Precision { t: 24, u: 64, j: 8 }, u_trunc: 10, extra: 4, max_u: 48 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ChainChecks {
    /// ξ − τξ = m at truncation.
    pub cocycle: bool,
    /// The π^{<c} part of ξ is polynomial in t.
    pub split_polynomial: bool,
    pub na_part: bool,
    pub nb_part: bool,
    /// X = δ^n·n_B has u-order ≥ c.
    pub chart_restriction: bool,
    /// v − (ỹ − τỹ) ≡ 0 mod u^U.
    pub normal_form: bool,
    /// (ι−τ) unitriangular on u^b, c ≤ b < U.
    pub injective: bool,
    /// Values at truncations U and U + extra agree to the smaller precision.
    pub stable: bool,
}

impl ChainChecks {
    pub fn all(&self) -> bool {
        self.cocycle
            && self.split_polynomial
            && self.na_part
            && self.nb_part
            && self.chart_restriction
            && self.normal_form
            && self.injective
            && self.stable
    }
}

/// ρ(m): the coefficients of j^{k−n}, k < n, of the value in
/// (M + τM)⊗K∞[[j]] / M⊗K∞[[j]].
#[derive(Clone, Debug, Serialize)]
pub struct MockValue {
    pub motive: String,
    pub class: String,
    pub k: i64,
    pub c: i64,
    /// Least t with (q−1)t > n.
    pub stage: i64,
    pub u_trunc: i64,
    #[serde(skip)]
    pub principal: Vec<Laurent>,
    pub shown: Vec<String>,
    /// π-precision of the least precise coordinate.
    pub prec: i64,
    pub checks: ChainChecks,
}

impl MockValue {
    pub fn is_zero(&self) -> bool {
        self.principal.iter().all(|z| z.is_zero())
    }

    /// Equality to the common precision.
    pub fn same(&self, o: &MockValue) -> bool {
        self.principal.len() == o.principal.len() && self.principal.iter().zip(&o.principal).all(|(a, b)| a == b)
    }
}

/// (c0, n) for τ = c0·j^{−n}.
fn twist_shape(m: &TMotive) -> Result<(u8, i64)> {
    if m.rank() != 1 {
        return Err(Error::UnsupportedShape(format!("mock regulator needs rank 1, {} has rank {}", m.name, m.rank())));
    }
    let e = &m.tau[0][0];
    let c0 = e.constant_coeff().filter(|_| e.num.deg_t() == Some(0) && e.num.deg_theta() == Some(0));
    let c0 = c0.ok_or_else(|| Error::UnsupportedShape(format!("τ = {} is not c·(t−θ)^{{−n}}", e.show())))?;
    if e.e >= 0 {
        return Err(Error::Precondition(format!("{} has weight {} ≥ 0", m.name, e.e)));
    }
    Ok((c0, -e.e))
}

pub fn mock_regulator(model: &ShtukaModel, class: &[TauEntry], opts: MockOptions) -> Result<MockValue> {
    let m = &model.motive;
    twist_shape(m)?;
    let solver = H1Solver::new(m, opts.prec)?;
    let series: Vec<TateSeries<Laurent>> = class.iter().map(|e| e.to_series(&m.field, opts.prec)).collect();
    match solver.classify(&series)? {
        CokerClass::Zero { xi } => mock_regulator_from_xi(model, class, &xi, opts),
        CokerClass::Nonzero { .. } => Err(Error::Precondition("r_B of the class does not vanish".into())),
        CokerClass::Undetermined { reason } => Err(Error::Undetermined(reason)),
    }
}

/// The chain for a given solution ξ of ξ − τξ = m.
pub fn mock_regulator_from_xi(
    model: &ShtukaModel,
    class: &[TauEntry],
    xi: &[TateSeries<Laurent>],
    opts: MockOptions,
) -> Result<MockValue> {
    let m = &model.motive;
    let (c0, n) = twist_shape(m)?;
    if model.cxc.is_none() {
        return Err(Error::Precondition("C×C model not built".into()));
    }
    if class.len() != 1 || xi.len() != 1 {
        return Err(Error::Precondition("class vector has wrong length".into()));
    }
    let q = m.field.q() as i64;
    let stage = n / (q - 1) + 1;
    let u0 = opts.u_trunc.max(stage).max(model.c + 1);
    if u0 + opts.extra > opts.max_u {
        return Err(Error::PrecisionExhausted(format!("u-truncation {} exceeds the cap {}", u0 + opts.extra, opts.max_u)));
    }
    let lo = run_chain(model, c0, n, &class[0], &xi[0], u0)?;
    let hi = run_chain(model, c0, n, &class[0], &xi[0], u0 + opts.extra)?;
    let mut checks = hi.checks.clone();
    checks.stable = lo.principal.iter().zip(&hi.principal).all(|(a, b)| a == b);
    checks.normal_form &= lo.checks.normal_form;
    checks.injective &= lo.checks.injective;
    let prec = hi.principal.iter().map(|z| z.prec()).min().unwrap_or(i64::MAX);
    Ok(MockValue {
        motive: m.name.clone(),
        class: class[0].show(),
        k: model.k,
        c: model.c,
        stage,
        u_trunc: u0 + opts.extra,
        shown: hi.principal.iter().map(|z| z.show("π")).collect(),
        principal: hi.principal,
        prec,
        checks,
    })
}

struct Run {
    principal: Vec<Laurent>,
    checks: ChainChecks,
}

fn run_chain(model: &ShtukaModel, c0: u8, n: i64, class: &TauEntry, xi: &TateSeries<Laurent>, u_cap: i64) -> Result<Run> {
    let m = &model.motive;
    let f = m.field.clone();
    let q = f.q() as i64;
    let c = model.c;
    let mut checks = ChainChecks::default();

    // 1. the cocycle identity
    let cap = xi.zero_coeff().cap();
    let tau_e = &m.tau[0][0];
    let tau_series = tau_e.to_series(&f, Precision { t: xi.nt(), u: cap, j: 0 });
    let lhs = xi.sub(&tau_series.mul(&xi.tau()));
    checks.cocycle = lhs.sub(&class.to_series(&f, Precision { t: xi.nt(), u: cap, j: 0 })).is_zero();

    // 2. π-adic split
    let nt = xi.nt();
    let mut y = Su::new();
    let mut a = Poly2::zero(&f);
    let mut smax = 0i64;
    checks.split_polynomial = true;
    for (i, z) in xi.coeffs().iter().enumerate() {
        if z.prec() < c {
            return Err(Error::Undetermined(format!("t^{i}-coefficient of ξ known only to π^{}", z.prec())));
        }
        for (beta, cf) in z.terms().filter(|&(b, _)| b < c) {
            if i + 3 >= nt {
                checks.split_polynomial = false;
            }
            y.insert((beta, -(i as i64)), cf);
            smax = smax.max(beta);
            if beta <= 0 {
                a = a.add(&Poly2::monomial(&f, cf, i as u32, (-beta) as u32));
            }
        }
    }
    let boundary = |x: &Poly2| TauEntry::from_poly(x.clone()).sub(&tau_e.mul(&TauEntry::from_poly(x.tau())));
    let na_part = class.sub(&boundary(&a));
    checks.na_part = model.na.contains(&[na_part]);
    // θ^S·(a + o) is a polynomial Yp
    let mut yp = Poly2::zero(&f);
    for (&(beta, s), &cf) in &y {
        yp = yp.add(&Poly2::monomial(&f, cf, (-s) as u32, (smax - beta) as u32));
    }
    let th = |k: i64| TauEntry::from_poly(Poly2::monomial(&f, 1, 0, k as u32));
    let nb = class
        .mul(&th(q * smax))
        .sub(&TauEntry::from_poly(yp.clone()).mul(&th((q - 1) * smax)))
        .add(&tau_e.mul(&TauEntry::from_poly(yp.tau())));
    checks.nb_part = model.in_nb(&[DEntry::new(nb, q * smax)]);

    // 3. X = δ^n·(m − y + τy)
    let neg_su_n = su_mono(if n % 2 == 0 { c0 } else { f.neg(c0) }, n, n);
    let delta = Su::from([((0, 1), 1), ((1, 0), f.neg(1))]);
    let mut x = su_of_entry(&f, class, n)?;
    x = su_sub(&f, &x, &su_mul(&f, &su_pow(&f, &delta, n as u32, None), &y, None));
    x = su_add(&f, &x, &su_mul(&f, &neg_su_n, &su_frob(&y, q), None));
    checks.chart_restriction = x.keys().all(|k| k.0 >= c);

    // 4. normal form modulo u^U
    let inv_delta: Su = (0..u_cap).map(|k| ((k, -k - 1), 1)).collect();
    let inv_delta_n = su_pow(&f, &inv_delta, n as u32, Some(u_cap));
    let tau_trunc = |w: &Su| {
        let w = su_trunc(&su_frob(w, q), u_cap);
        su_mul(&f, &su_mul(&f, &neg_su_n, &inv_delta_n, Some(u_cap)), &w, Some(u_cap))
    };
    let v = su_mul(&f, &x, &inv_delta_n, Some(u_cap));
    let mut ytil = Su::new();
    let mut w = v.clone();
    let mut steps = 0;
    while !w.is_empty() {
        ytil = su_add(&f, &ytil, &w);
        w = tau_trunc(&w);
        steps += 1;
        if steps > u_cap {
            return Err(Error::PrecisionExhausted("geometric series did not terminate".into()));
        }
    }
    checks.normal_form = su_add(&f, &su_sub(&f, &v, &ytil), &tau_trunc(&ytil)).is_empty();
    checks.injective = (c..u_cap).all(|b| {
        let e = su_mono(1, b, 0);
        let d = su_sub(&f, &e, &tau_trunc(&e));
        d.iter().next() == Some((&(b, 0), &1)) && d.keys().skip(1).all(|k| k.0 > b)
    });

    // 5. Y = X + c·(−su)^n·ỹ(s, u^q) along s = u/(1+uj)
    let yy = su_add(&f, &x, &su_mul(&f, &neg_su_n, &su_frob(&ytil, q), None));
    let m_x = x.keys().map(|k| k.0 + k.1).min().unwrap_or(0);
    let sign = if n % 2 == 0 { 1 } else { f.neg(1) };
    let zcap = 4 * q * u_cap + 8;
    let mut principal = Vec::new();
    for k in 0..n {
        let mut terms: BTreeMap<i64, u8> = BTreeMap::new();
        for (&(beta, alpha), &cf) in &yy {
            let b = gbinom(&f, n - alpha, k);
            if b == 0 {
                continue;
            }
            let e = terms.entry(alpha + beta - 2 * n + k).or_insert(0);
            *e = f.add(*e, f.mul(sign, f.mul(cf, b)));
        }
        let p_k = m_x - n + (q - 1) * u_cap + k;
        let terms: Vec<(i64, u8)> = terms.into_iter().collect();
        principal.push(Laurent::from_terms_prec(&f, &terms, p_k, zcap));
    }
    Ok(Run { principal, checks })
}

/// ν(a)·z on principal parts, ν(a) = a(θ + j).
pub fn mul_by_a(f: &Fq, a: &Poly, z: &[Laurent]) -> Vec<Laurent> {
    let n = z.len();
    let cap = z.iter().map(|x| x.cap()).max().unwrap_or(0);
    let nu: Vec<Laurent> = Poly2::from_t_poly(a)
        .to_j_expansion()
        .iter()
        .map(|p| {
            let terms: Vec<(i64, u8)> = p.coeffs().iter().enumerate().map(|(b, &c)| (-(b as i64), c)).collect();
            Laurent::from_terms(f, &terms, cap)
        })
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Laurent::zero_with_cap(f, cap, cap);
            for (mi, am) in nu.iter().enumerate().take(k + 1) {
                acc = acc.add(&am.mul(&z[k - mi]));
            }
            acc
        })
        .collect()
}

/// ρ on a K∞-rational τ-invariant (an element of Λ_B^+) with m = 0, or
/// None when Λ_B^+ = 0.
pub fn plus_kernel_value(model: &ShtukaModel, opts: MockOptions) -> Result<Option<MockValue>> {
    let m = &model.motive;
    let betti = betti_realize(m, opts.prec)?;
    let inv = betti.invariants();
    let Some(col) = inv.first() else { return Ok(None) };
    let mut lam = TateSeries::zero(betti.tower().zero(), opts.prec.t);
    for (j, p) in col.iter().enumerate() {
        lam = lam.add(&betti.omega()[0][j].mul_tpoly(p));
    }
    let lam = lam
        .to_kinf(betti.tower().nu())
        .ok_or_else(|| Error::Undetermined("Λ_B^+ element is not K∞-rational at this precision".into()))?;
    mock_regulator_from_xi(model, &[TauEntry::zero(&m.field)], &[lam], opts).map(Some)
}

/// Class of a value in the Hodge-additive extension space, i.e. modulo
/// M⊗K∞[[j]] and the image of Λ_B^+.
pub fn target_class(plus: &PlusPresentation, v: &MockValue) -> Result<KVec> {
    let cap = plus.realization.cap();
    let like = Laurent::zero_with_cap(&plus.motive().field, cap, cap);
    let n = v.principal.len() as i64;
    let cs: Vec<Laurent> = v.principal.iter().map(|z| z.with_cap(cap)).collect();
    plus.classify(&[JSeries::new(like, -n, cs, 0, plus.nj())])
}

/// How ρ compares with the analytic regulator on the same class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Both vanish in the target.
    BothZero,
    /// ρ = c·Reg ≠ 0 for this c ∈ F_q^×.
    Multiple(u8),
    Differs,
    Undetermined,
}

fn relate(plus: &PlusPresentation, rho: &KVec, reg: Option<&KVec>) -> Result<Relation> {
    let Some(reg) = reg else { return Ok(Relation::Undetermined) };
    let f = plus.motive().field.clone();
    let zero = KVec::new();
    if plus.same(rho, &zero)? && plus.same(reg, &zero)? {
        return Ok(Relation::BothZero);
    }
    for c in f.elements().filter(|&c| c != 0) {
        let scaled: KVec = reg.iter().map(|(k, x)| (*k, x.scale(c))).collect();
        if plus.same(rho, &scaled)? {
            return Ok(Relation::Multiple(c));
        }
    }
    Ok(Relation::Differs)
}

/// The sample multipliers 1, t, t+1, t², t²+t+1 of the generator j^{−n}.
pub fn sample_multipliers(f: &Fq) -> Vec<Poly> {
    [vec![1], vec![0, 1], vec![1, 1], vec![0, 0, 1], vec![1, 1, 1]]
        .into_iter()
        .map(|c| Poly::new(f, c.into_iter().map(|x| f.from_int(x)).collect()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelComparison {
    pub class: String,
    pub first: MockValue,
    pub second: MockValue,
    pub agree: bool,
    /// ρ(a·g) = a(θ+j)·ρ(g).
    pub linear: bool,
    /// ρ against the analytic regulator, in the target space.
    pub regulator: Relation,
}

#[derive(Clone, Debug, Serialize)]
pub struct MockConsistency {
    pub motive: String,
    pub target_dim: usize,
    pub generator: MockValue,
    /// The generator's class spans the target (dim 1 and class ≠ 0).
    pub spans: bool,
    /// ρ(Λ_B^+) vanishes in the target; None when Λ_B^+ = 0.
    pub kernel_vanishes: Option<bool>,
    pub samples: Vec<ModelComparison>,
    pub models_agree: bool,
    pub linear: bool,
    pub chains_ok: bool,
    pub regulator_relation: Relation,
}

/// Generator value, target dimension and the two-model comparison on the
/// sample classes a·j^{−n}. Models are built with r = θ^{−1} and θ^{−2}.
pub fn mock_consistency(m: &TMotive, opts: MockOptions) -> Result<MockConsistency> {
    let (_, n) = twist_shape(m)?;
    let f = &m.field;
    let std = IntegralModel::standard(m);
    let first = build_cxc_shtuka_from(m, &std, 1)?;
    let second = build_cxc_shtuka_from(m, &std, 2)?;
    let plus = PlusPresentation::new(hodge_realize(m, Ring::KInf, opts.prec)?)?;
    let reg = Regulator::new(m, opts.prec)?;
    let target_dim = plus.dim()?.0;
    let g = TauEntry::jpow(f, -n);
    let generator = mock_regulator(&first, std::slice::from_ref(&g), opts)?;
    let gen_class = target_class(&plus, &generator)?;
    let kernel_vanishes = match plus_kernel_value(&first, opts)? {
        Some(v) => Some(target_class(&plus, &v)?.is_empty()),
        None => None,
    };
    let mut samples = Vec::new();
    for a in sample_multipliers(f) {
        let cls = g.mul(&TauEntry::from_poly(Poly2::from_t_poly(&a)));
        let v1 = mock_regulator(&first, std::slice::from_ref(&cls), opts)?;
        let v2 = mock_regulator(&second, std::slice::from_ref(&cls), opts)?;
        let scaled = mul_by_a(f, &a, &generator.principal);
        let linear = v1.principal.iter().zip(&scaled).all(|(x, y)| x == y);
        let rv = reg.eval(&MotExtClass::new(vec![cls.clone()]))?;
        let regulator = relate(&plus, &target_class(&plus, &v1)?, rv.value.as_ref())?;
        samples.push(ModelComparison { class: cls.show(), agree: v1.same(&v2), first: v1, second: v2, linear, regulator });
    }
    Ok(MockConsistency {
        motive: m.name.clone(),
        target_dim,
        spans: target_dim == 1 && !gen_class.is_empty(),
        kernel_vanishes,
        models_agree: samples.iter().all(|s| s.agree),
        linear: samples.iter().all(|s| s.linear),
        chains_ok: generator.checks.all() && samples.iter().all(|s| s.first.checks.all() && s.second.checks.all()),
        regulator_relation: common_relation(&samples),
        generator,
        samples,
    })
}

/// The common scalar over the samples whose values do not vanish.
fn common_relation(samples: &[ModelComparison]) -> Relation {
    let rels: Vec<Relation> = samples.iter().map(|s| s.regulator).filter(|r| *r != Relation::BothZero).collect();
    match rels.first() {
        None if samples.is_empty() => Relation::Undetermined,
        None => Relation::BothZero,
        Some(&r) if rels.iter().all(|x| *x == r) => r,
        Some(_) => Relation::Differs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shtuka::model::build_cxc_shtuka;

    #[test]
    fn binomials_of_negative_arguments() {
        let f = Fq::new(5, 1).unwrap();
        // (1+x)^{−2} = 1 − 2x + 3x² − 4x³
        let got: Vec<u8> = (0..4).map(|k| gbinom(&f, -2, k)).collect();
        assert_eq!(got, vec![1, f.from_int(-2), 3, f.from_int(-4)]);
    }

    #[test]
    fn generator_of_first_twist() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let model = build_cxc_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
        let v = mock_regulator(&model, &[TauEntry::jpow(&f, -1)], MockOptions::default()).unwrap();
        assert!(v.checks.all(), "{v:?}");
        assert!(!v.is_zero(), "{v:?}");
        assert!(v.prec >= 8, "{v:?}");
    }

    #[test]
    fn consistency_on_first_twist() {
        let f = Fq::new(3, 1).unwrap();
        let rep = mock_consistency(&TMotive::carlitz_twist(&f, 1), MockOptions::default()).unwrap();
        assert!(rep.spans && rep.chains_ok && rep.linear, "{rep:?}");
        assert!(rep.models_agree, "{rep:?}");
        assert_eq!(rep.regulator_relation, Relation::Multiple(f.neg(1)));
    }

    #[test]
    fn plus_part_maps_to_zero() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 2);
        let model = build_cxc_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
        let v = plus_kernel_value(&model, MockOptions::default()).unwrap().expect("Λ⁺ ≠ 0 when (q−1) | n");
        assert!(v.checks.all());
        // nonzero principal part, but it lies in the image of Λ⁺
        assert!(!v.is_zero());
        let plus = PlusPresentation::new(hodge_realize(&m, Ring::KInf, MockOptions::default().prec).unwrap()).unwrap();
        assert!(target_class(&plus, &v).unwrap().is_empty());
    }

    #[test]
    fn truncation_stage_is_enforced() {
        let f = Fq::new(2, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, 3);
        let model = build_cxc_shtuka(&m, &IntegralModel::standard(&m)).unwrap();
        let opts = MockOptions { max_u: 5, ..MockOptions::default() };
        let e = mock_regulator(&model, &[TauEntry::jpow(&f, -3)], opts);
        assert!(matches!(e, Err(Error::PrecisionExhausted(_))), "{e:?}");
    }

    #[test]
    fn rejects_nonnegative_weight() {
        let f = Fq::new(3, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, -1);
        assert!(matches!(twist_shape(&m), Err(Error::Precondition(_))));
    }
}
