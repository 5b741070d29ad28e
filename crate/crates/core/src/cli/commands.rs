//! The pipelines behind each subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::betti::{betti_realize, h1_class};
use crate::error::{Error, Result};
use crate::hodge_pink::structure::Ring;
use crate::motive::{compute_na, IntegralModel, TMotive, TauEntry};
use crate::poly::Poly2;
use crate::regulator::{ext_from_m, ext_normalize, hodge_realize, rank_dim_compare, MotExtClass, PlusPresentation, RankDimOptions, Regulator};
use crate::shtuka::{build_c_shtuka, build_cxc_shtuka, cech_cone, compare_routes, g_complex, mock_consistency, MockOptions, SliceOptions};
use crate::tate::Precision;

use super::report::{kvec, laurent, tate, ErrorInfo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Info,
    Betti,
    Hodge,
    Ext,
    Regulator,
    Shtuka,
    Rankdim,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Betti => "betti",
            Command::Hodge => "hodge",
            Command::Ext => "ext",
            Command::Regulator => "regulator",
            Command::Shtuka => "shtuka",
            Command::Rankdim => "rankdim",
        }
    }
}

/// Effective run parameters (config values overridden by flags).
#[derive(Clone, Debug, serde::Serialize)]
pub struct RunParams {
    #[serde(skip)]
    pub prec: Precision,
    pub degree_bound: u32,
    pub seed: u64,
    /// Random sample classes for `regulator`.
    pub samples: usize,
}

/// An error tagged with the module it came from.
pub struct Failure {
    pub module: &'static str,
    pub error: Error,
}

impl Failure {
    pub fn info(&self) -> ErrorInfo {
        ErrorInfo::new(self.module, &self.error)
    }
}

fn at<T>(module: &'static str, r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|error| Failure { module, error })
}

type Out = std::result::Result<Value, Failure>;

fn shown(v: &[TauEntry]) -> Vec<String> {
    v.iter().map(|e| e.show()).collect()
}

fn info(m: &TMotive) -> Out {
    let weights = at("motive", m.weights())?;
    Ok(json!({
        "name": m.name,
        "q": m.field.q(),
        "rank": m.rank(),
        "tau": m.tau.iter().map(|r| shown(r)).collect::<Vec<_>>(),
        "det": m.det().show(),
        "pole_order": m.pole_order(),
        "effective": m.is_effective(),
        "weights": weights,
        "weights_all_negative": weights.iter().all(|&w| w < 0),
    }))
}

fn betti(m: &TMotive, p: &RunParams) -> Out {
    let b = at("betti", betti_realize(m, p.prec))?;
    let nu = b.tower().nu();
    let omega: Vec<Vec<Value>> = b
        .omega()
        .iter()
        .map(|row| row.iter().map(|x| x.to_kinf(nu).map_or(json!("not K∞-rational"), |s| tate(&s))).collect())
        .collect();
    let inv = b.invariants();
    Ok(json!({
        "rank": b.rank(),
        "tower": { "nu": nu, "layers": b.tower().layers(), "degree": b.tower().degree() },
        "basis": omega,
        "equivariant": at("betti", b.check_equivariance())?,
        "group_action": at("betti", b.check_group_action())?,
        "plus_rank": inv.len(),
        "plus_basis": inv.iter().map(|v| v.iter().map(|x| x.show("t")).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "prec_t": p.prec.t,
    }))
}

fn hodge(m: &TMotive, p: &RunParams) -> Out {
    let h = at("hodge_pink", hodge_realize(m, Ring::KInf, p.prec))?;
    let jumps = at("hodge_pink", h.structure.hodge_jumps())?;
    let checks = json!({
        "equivariant": at("hodge_pink", h.check_equivariance())?,
        "tautological": at("hodge_pink", h.check_tautological())?,
        "expansion_routes": at("hodge_pink", h.check_expansion_routes())?,
    });
    let plus = at("regulator", PlusPresentation::new(h))?;
    let (dim, basis) = at("regulator", plus.dim())?;
    Ok(json!({
        "hodge_jumps": jumps,
        "checks": checks,
        "ext_ha_plus_dim": dim,
        "ext_ha_plus_basis": basis.iter().map(kvec).collect::<Vec<_>>(),
        "plus_rank": plus.plus_rank(),
        "prec_u": p.prec.u,
        "prec_j": plus.nj(),
    }))
}

fn need_class(m: &TMotive, class: Option<&Vec<TauEntry>>) -> std::result::Result<Vec<TauEntry>, Failure> {
    class.cloned().ok_or_else(|| Failure {
        module: "cli",
        error: Error::Precondition(format!("`ext` needs a `class` entry with {} literals", m.rank())),
    })
}

fn ext(m: &TMotive, class: Option<&Vec<TauEntry>>, p: &RunParams) -> Out {
    let x = need_class(m, class)?;
    let na = at("motive", compute_na(m, &IntegralModel::standard(m)))?;
    let (c, middle) = at("regulator", ext_from_m(m, &na, &x))?;
    let norm = at("regulator", ext_normalize(m, &c, p.degree_bound))?;
    let series: Vec<_> = x.iter().map(|e| e.to_series(&m.field, p.prec)).collect();
    let rb = at("betti", h1_class(m, &series, p.prec))?;
    Ok(json!({
        "class": shown(&x),
        "middle_tau": middle.tau.iter().map(|r| shown(r)).collect::<Vec<_>>(),
        "normalized": shown(&norm.m),
        "normalized_flag": norm.normalized,
        "boundary": norm.is_zero(),
        "r_b": rb.label(),
        "degree_bound": p.degree_bound,
    }))
}

fn regulator(m: &TMotive, class: Option<&Vec<TauEntry>>, p: &RunParams) -> Out {
    let f = &m.field;
    let na = at("motive", compute_na(m, &IntegralModel::standard(m)))?;
    let mut classes: Vec<Vec<TauEntry>> = class.into_iter().cloned().collect();
    let gens = na.generators();
    if classes.is_empty() && p.samples == 0 {
        classes.extend(gens.iter().cloned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for _ in 0..p.samples {
        // Σ a_g(t,θ)·g with small random coefficients
        let mut v = vec![TauEntry::zero(f); m.rank()];
        for g in &gens {
            let mut a = Poly2::zero(f);
            for _ in 0..2 {
                let c = rng.gen_range(0..f.q()) as u8;
                a = a.add(&Poly2::monomial(f, c, rng.gen_range(0..3), rng.gen_range(0..3)));
            }
            let a = TauEntry::from_poly(a);
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi = vi.add(&gi.mul(&a));
            }
        }
        classes.push(v);
    }
    let reg = at("regulator", Regulator::new(m, p.prec))?;
    let mut rows = Vec::new();
    for c in classes {
        let r = at("regulator", reg.eval(&MotExtClass::new(c.clone())))?;
        rows.push(json!({
            "class": shown(&c),
            "r_b": r.rb_status,
            "detail": r.rb_detail,
            "value": r.value.as_ref().map(kvec),
            "steps": r.steps,
            "tail": r.tail.map(|t| t.to_string()),
        }));
    }
    Ok(json!({ "ext_ha_plus_dim": at("regulator", reg.plus.dim())?.0, "classes": rows, "seed": p.seed }))
}

fn shtuka(m: &TMotive, p: &RunParams, slices: SliceOptions) -> Out {
    let std = IntegralModel::standard(m);
    let model = at("shtuka", build_c_shtuka(m, &std))?;
    let cxc = match build_cxc_shtuka(m, &std) {
        Ok(x) => json!(x.cxc),
        Err(e) => json!({ "unavailable": ErrorInfo::new("shtuka", &e) }),
    };
    let g = at("shtuka", g_complex(m, slices))?;
    let cone = at("shtuka", cech_cone(&model, slices))?;
    let routes = compare_routes(&g, &cone);
    let mock = match mock_consistency(m, MockOptions { prec: p.prec, ..MockOptions::default() }) {
        Ok(r) => json!({
            "target_dim": r.target_dim,
            "generator": r.generator,
            "generator_principal": r.generator.principal.iter().map(laurent).collect::<Vec<_>>(),
            "spans": r.spans,
            "kernel_vanishes": r.kernel_vanishes,
            "models_agree": r.models_agree,
            "linear": r.linear,
            "chains_ok": r.chains_ok,
            "regulator_relation": r.regulator_relation,
            "samples": r.samples,
        }),
        Err(e) => json!({ "unavailable": ErrorInfo::new("shtuka", &e) }),
    };
    Ok(json!({
        "model": { "k": model.k, "c": model.c, "delta": model.delta, "checks": model.checks },
        "cxc": cxc,
        "g_complex": g,
        "cone": cone,
        "routes": routes,
        "mock_regulator": mock,
    }))
}

fn rankdim(m: &TMotive, p: &RunParams) -> Out {
    let opts = RankDimOptions { theta_bound: p.degree_bound, ..RankDimOptions::default() };
    let r = at("regulator", rank_dim_compare(m, p.prec, opts))?;
    Ok(json!(r))
}

pub fn run(cmd: Command, m: &TMotive, class: Option<&Vec<TauEntry>>, p: &RunParams, slices: SliceOptions) -> Out {
    match cmd {
        Command::Info => info(m),
        Command::Betti => betti(m, p),
        Command::Hodge => hodge(m, p),
        Command::Ext => ext(m, class, p),
        Command::Regulator => regulator(m, class, p),
        Command::Shtuka => shtuka(m, p, slices),
        Command::Rankdim => rankdim(m, p),
    }
}
