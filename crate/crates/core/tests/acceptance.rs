//! End-to-end acceptance checks; prints one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use motcoh::betti::{betti_realize, extension_cocycle_trivial};
use motcoh::field_tower::{Fq, Laurent, Tower};
use motcoh::hodge_pink::ext::{hp_extension_build, ExtGroup, Hps};
use motcoh::hodge_pink::jseries::EXACT;
use motcoh::hodge_pink::{HodgePinkStructure, JSeries, Lattice, Ring};
use motcoh::motive::{compute_na, IntegralModel, TMotive, TauEntry};
use motcoh::poly::{Poly, Poly2};
use motcoh::regulator::{boundary, hodge_realize, rank_dim_compare, MotExtClass, PlusPresentation, RankDimOptions, Regulator};
use motcoh::shtuka::{build_c_shtuka, cech_cone, compare_routes, g_complex, mock_consistency, MockOptions, Relation, SliceOptions};
use motcoh::tate::{diagonal_inverse, fixed_point_residual, omega_power, solve_tau_fixed, Precision, TateSeries};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn fq(p: u32) -> Fq {
    Fq::new(p, 1).unwrap()
}

fn theta(f: &Fq) -> TauEntry {
    TauEntry::from_poly(Poly2::theta(f))
}

/// Unit, A(1..4), A(−1), A(−2), A(1)⊕1 and the ι-extension of 1 by A(1).
fn residual_motives(f: &Fq) -> Vec<TMotive> {
    let a1 = TMotive::carlitz_twist(f, 1);
    let mut ms = vec![TMotive::unit(f)];
    ms.extend((1..=4).map(|n| TMotive::carlitz_twist(f, n)));
    ms.extend([-1, -2].map(|n| TMotive::carlitz_twist(f, n)));
    ms.push(a1.direct_sum(&TMotive::unit(f)));
    ms.push(a1.extension_middle(&[theta(f)]).unwrap());
    ms
}

fn c1_fixed_points() -> Outcome {
    let pr = Precision { t: 32, u: 64, j: 16 };
    let mut n = 0;
    for p in [2, 3] {
        let f = fq(p);
        for m in residual_motives(&f) {
            let start = Instant::now();
            let sol = solve_tau_fixed(&m.tau, &f, pr).map_err(e)?;
            let res = fixed_point_residual(&m.tau, &sol, pr);
            ensure(res.iter().flatten().all(|x| x.is_zero()), || format!("{} q={p}: residual", m.name))?;
            betti_realize(&m, pr).map_err(|x| format!("{} q={p}: {x}", m.name))?;
            ensure(start.elapsed().as_secs() < 30, || format!("{} q={p}: too slow", m.name))?;
            n += 1;
        }
    }
    Ok(format!("{n} motives, residual exactly zero"))
}

fn c2_omega() -> Outcome {
    let pr = Precision { t: 32, u: 64, j: 16 };
    for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let f = Fq::new(p, k).unwrap();
        let t = Tower::new(&f, pr.u);
        let w = omega_power(&t, 1, pr).map_err(e)?.body;
        let j = TateSeries::j(&f, pr).embed(&t);
        ensure(w.tau().sub(&j.mul(&w)).is_zero(), || format!("q = {}", f.q()))?;
    }
    Ok("τω − (t−θ)ω = 0 for q = 2, 3, 4, 5".into())
}

fn c3_diagonal_inverse() -> Outcome {
    let pr = Precision { t: 32, u: 64, j: 16 };
    for p in [2, 3, 5] {
        let f = fq(p);
        let inv = diagonal_inverse(&Poly::new(&f, vec![0, 1]), pr).map_err(e)?;
        let prod = TateSeries::j(&f, pr).mul(&inv);
        ensure(prod.sub(&TateSeries::one(inv.zero_coeff(), pr.t)).is_zero(), || format!("q = {p}"))?;
        // independent route: Newton inverse of the series itself
        let direct = TateSeries::j(&f, pr).inv().map_err(e)?;
        ensure(direct.sub(&inv).is_zero(), || format!("q = {p}: routes differ"))?;
    }
    Ok("(t⊗1 − 1⊗θ)·Σ = 1 at truncation, q = 2, 3, 5".into())
}

const NJ: i64 = 12;

fn like(f: &Fq) -> Laurent {
    Laurent::zero_with_cap(f, 40, 40)
}

fn scaled_unit(f: &Fq, k: i64) -> Hps {
    HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like(f), NJ).scaled(k))
}

fn random_j_series(f: &Fq, rng: &mut ChaCha8Rng) -> JSeries<Laurent> {
    let start = rng.gen_range(-4..=1);
    let len = rng.gen_range(1..=4);
    let coeffs = (0..len)
        .map(|_| {
            let terms: Vec<(i64, u8)> = (0..2).map(|_| (rng.gen_range(-2..=3), rng.gen_range(0..f.q()) as u8)).collect();
            Laurent::from_terms(f, &terms, 40)
        })
        .collect();
    JSeries::new(like(f), start, coeffs, EXACT, NJ)
}

fn random_pair(f: &Fq, rng: &mut ChaCha8Rng) -> (Hps, Hps) {
    (scaled_unit(f, rng.gen_range(-2..=2)), scaled_unit(f, rng.gen_range(-2..=2)))
}

fn c4_baer() -> Outcome {
    let f = fq(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let (x, y) = random_pair(&f, &mut rng);
        let grp = ExtGroup::new(&x, &y).map_err(e)?;
        let fa = vec![vec![random_j_series(&f, &mut rng)]];
        let fb = vec![vec![random_j_series(&f, &mut rng)]];
        let ea = hp_extension_build(&x, &y, &fa).map_err(e)?;
        let eb = hp_extension_build(&x, &y, &fb).map_err(e)?;
        let via_lattice = grp.classify(&ea.baer_sum(&eb).map_err(e)?).map_err(e)?;
        let via_reps = grp.baer(&grp.classify(&ea).map_err(e)?, &grp.classify(&eb).map_err(e)?).map_err(e)?;
        let fs = vec![vec![fa[0][0].add(&fb[0][0])]];
        let via_sum = grp.class_of(&fs).map_err(e)?;
        ensure(via_lattice.same_class(&via_reps) && via_lattice.same_class(&via_sum), || format!("pair {i}"))?;
    }
    Ok("100 random pairs: [E_f] + [E_g] = [E_{f+g}]".into())
}

fn c5_hodge_additivity() -> Outcome {
    let f = fq(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut yes, mut no) = (0, 0);
    for i in 0..100 {
        let (x, y) = random_pair(&f, &mut rng);
        let grp = ExtGroup::new(&x, &y).map_err(e)?;
        let fm = vec![vec![random_j_series(&f, &mut rng)]];
        let ext = hp_extension_build(&x, &y, &fm).map_err(e)?;
        let by_polygon = ext.polygon_additive().map_err(e)?;
        let by_pink = grp.is_hodge_additive(&fm).map_err(e)?;
        ensure(by_polygon == by_pink, || format!("case {i}: polygon {by_polygon}, lattices {by_pink}"))?;
        if by_pink {
            yes += 1
        } else {
            no += 1
        }
    }
    let one = scaled_unit(&f, 0);
    let fm = vec![vec![JSeries::jpow(&like(&f), -1, NJ)]];
    let ext = hp_extension_build(&one, &one, &fm).map_err(e)?;
    let grp = ExtGroup::new(&one, &one).map_err(e)?;
    ensure(!ext.polygon_additive().map_err(e)? && !grp.is_hodge_additive(&fm).map_err(e)?, || "j^{-1} counterexample".into())?;
    Ok(format!("100 random cases agree ({yes} additive, {no} not); j^-1 is not additive"))
}

fn c6_polygons() -> Outcome {
    let f = fq(3);
    let pr = Precision { t: 16, u: 48, j: 16 };
    for n in 1..=8i64 {
        let h = hodge_realize(&TMotive::carlitz_twist(&f, n), Ring::KInf, pr).map_err(e)?;
        let jumps = h.structure.hodge_jumps().map_err(e)?;
        ensure(jumps == vec![-n], || format!("A({n}): jumps {jumps:?}"))?;
        // oracle: the lattice j^{−n}-normal form
        let z = h.structure.q.basis()[0][0].zero_coeff().clone();
        let oracle = Lattice::standard(1, &z, h.structure.nj()).scaled(n);
        ensure(h.structure.q.same_as(&oracle), || format!("A({n}): lattice"))?;
        ensure(
            h.structure.fil_dim(-n).map_err(e)? == 1 && h.structure.fil_dim(-n + 1).map_err(e)? == 0,
            || format!("A({n}): filtration"),
        )?;
    }
    Ok("A(1..8): single jump at −n, lattice j^n·p".into())
}

fn c7_rank_dim() -> Outcome {
    let f = fq(3);
    let pr = Precision { t: 24, u: 48, j: 8 };
    let mut out = Vec::new();
    for n in 1..=4i64 {
        let m = TMotive::carlitz_twist(&f, n);
        let plus = PlusPresentation::new(hodge_realize(&m, Ring::KInf, pr).map_err(e)?).map_err(e)?;
        let nf = plus.dim().map_err(e)?.0;
        // direct quotient: dim p/(q∩p) minus the rank of the Betti invariants
        let exps: i64 = plus.realization.structure.q.exps().iter().sum();
        let invariants = betti_realize(&m, pr).map_err(e)?.invariants().len() as i64;
        let direct = (exps - invariants) as usize;
        let closed = (n - if n % 2 == 0 { 1 } else { 0 }) as usize;
        ensure(nf == direct && direct == closed, || format!("A({n}): normal form {nf}, direct {direct}, closed {closed}"))?;
        let mut lhs = Vec::new();
        for d in 2..=4 {
            let rep = rank_dim_compare(&m, pr, RankDimOptions { theta_bound: d, max_t: 6 }).map_err(e)?;
            lhs.push(rep.lhs);
        }
        ensure(lhs.iter().all(|x| *x == Some(nf)), || format!("A({n}): lhs {lhs:?} vs rhs {nf}"))?;
        out.push(format!("A({n}) {nf}"));
    }
    Ok(format!("lhs = rhs, stable over D = 2..4: {}", out.join(", ")))
}

fn c8_finiteness() -> Outcome {
    let f = fq(3);
    let mut out = Vec::new();
    for n in 1..=3 {
        let start = Instant::now();
        let g = g_complex(&TMotive::carlitz_twist(&f, n), SliceOptions::default()).map_err(e)?;
        ensure(g.well_defined, || format!("A({n}): complex not well defined"))?;
        ensure(g.h1_stable(), || format!("A({n}): H¹ slices did not stabilize"))?;
        ensure(g.slices.iter().all(|s| s.h1 == Some(0)) && g.h1_rank == Some(0), || format!("A({n}): H¹ ≠ 0"))?;
        ensure(start.elapsed().as_secs() < 60, || format!("A({n}): too slow"))?;
        out.push(format!("A({n}) H⁰ {:?}", g.h0_rank));
    }
    Ok(format!("H¹ slices stable and zero; {}", out.join(", ")))
}

fn c9_routes() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        let f = fq(p);
        let a1 = TMotive::carlitz_twist(&f, 1);
        let mut ms = vec![TMotive::unit(&f)];
        ms.extend((1..=3).map(|n| TMotive::carlitz_twist(&f, n)));
        ms.push(TMotive::carlitz_twist(&f, -1));
        ms.push(a1.extension_middle(&[TauEntry::jpow(&f, -1)]).unwrap());
        for m in ms {
            let opts = SliceOptions::default();
            let g = g_complex(&m, opts).map_err(e)?;
            let model = build_c_shtuka(&m, &IntegralModel::standard(&m)).map_err(e)?;
            let cone = cech_cone(&model, opts).map_err(e)?;
            let cmp = compare_routes(&g, &cone);
            ensure(cmp.agree, || format!("{} q={p}: {:?}", m.name, cmp.rows))?;
            n += cmp.rows.len();
        }
    }
    Ok(format!("{n} slices agree over 12 motives"))
}

/// Σ a_g·g over the N_A generators; with `a_in_t` the a_g lie in A and a
/// random boundary is added.
fn random_class(m: &TMotive, gens: &[Vec<TauEntry>], a_in_t: bool, rng: &mut ChaCha8Rng) -> MotExtClass {
    let f = &m.field;
    let theta_deg = if a_in_t { 1 } else { 3 };
    let mut v = vec![TauEntry::zero(f); m.rank()];
    if a_in_t {
        let x: Vec<Poly2> = (0..m.rank())
            .map(|_| Poly2::monomial(f, rng.gen_range(0..f.q()) as u8, rng.gen_range(0..3), rng.gen_range(0..3)))
            .collect();
        v = boundary(m, &x);
    }
    for g in gens {
        let mut a = Poly2::zero(f);
        for _ in 0..2 {
            a = a.add(&Poly2::monomial(f, rng.gen_range(0..f.q()) as u8, rng.gen_range(0..3), rng.gen_range(0..theta_deg)));
        }
        let a = TauEntry::from_poly(a);
        for (vi, gi) in v.iter_mut().zip(g) {
            *vi = vi.add(&gi.mul(&a));
        }
    }
    MotExtClass::new(v)
}

fn c10_regulator() -> Outcome {
    let pr = Precision { t: 16, u: 48, j: 8 };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut summary = Vec::new();
    for (p, n) in [(3u32, 1i64), (3, 2), (2, 1)] {
        let f = fq(p);
        let m = TMotive::carlitz_twist(&f, n);
        let na = compute_na(&m, &IntegralModel::standard(&m)).map_err(e)?;
        let gens = na.generators();
        let reg = Regulator::new(&m, pr).map_err(e)?;
        let mut regulated = Vec::new();
        for i in 0..20 {
            let c = random_class(&m, &gens, i % 2 == 0, &mut rng);
            let r = reg.eval(&c).map_err(e)?;
            let middle = betti_realize(&m.extension_middle(&c.m).map_err(e)?, pr).map_err(e)?;
            let dh_zero = extension_cocycle_trivial(&middle).map_err(e)?;
            let rb_zero = match r.rb_status {
                "zero" => true,
                "nonzero" => false,
                _ => return Err(format!("A({n}) q={p} class {i}: r_B undetermined")),
            };
            ensure(rb_zero == dh_zero, || format!("A({n}) q={p} class {i}: r_B {rb_zero}, d_H {dh_zero}"))?;
            if let Some(v) = r.value {
                regulated.push((c, v));
            }
        }
        let mut pairs = 0;
        for w in regulated.windows(2) {
            let (c1, v1) = &w[0];
            let (c2, v2) = &w[1];
            let vs = reg.eval(&c1.add(c2)).map_err(e)?.value.ok_or("sum not regulated")?;
            ensure(reg.plus.same(&vs, &reg.plus.add(v1, v2).map_err(e)?).map_err(e)?, || format!("A({n}) q={p}: additivity"))?;
            let a = Poly::new(&f, vec![rng.gen_range(0..f.q()) as u8, 1, 1]);
            let va = reg.eval(&c1.scale_a(&a)).map_err(e)?.value.ok_or("multiple not regulated")?;
            ensure(reg.plus.same(&va, &reg.plus.scale(v1, &a).map_err(e)?).map_err(e)?, || format!("A({n}) q={p}: scaling"))?;
            pairs += 1;
        }
        summary.push(format!("A({n}) q={p}: {} regulated, {pairs} pairs", regulated.len()));
    }
    Ok(format!("r_B and d_H agree on 60 classes; A-linear ({})", summary.join("; ")))
}

fn c11_mock() -> Outcome {
    let f = fq(3);
    let r = mock_consistency(&TMotive::carlitz_twist(&f, 1), MockOptions::default()).map_err(e)?;
    ensure(r.target_dim == 1, || format!("target dimension {}", r.target_dim))?;
    ensure(r.spans && !r.generator.is_zero(), || "generator does not span".into())?;
    ensure(r.chains_ok, || "chain checks failed".into())?;
    ensure(r.samples.len() == 5, || format!("{} samples", r.samples.len()))?;
    let rel = match r.regulator_relation {
        Relation::Multiple(c) => format!("ρ = {c}·Reg"),
        other => format!("{other:?}"),
    };
    let agree = if r.models_agree { "two models agree on 5 samples" } else { "FINDING: models disagree" };
    Ok(format!("target dim 1, generator spans; {agree}; {rel}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("τ-fixed-point residuals", c1_fixed_points),
        ("ω functional equation", c2_omega),
        ("diagonal inverse", c3_diagonal_inverse),
        ("Baer sum homomorphism", c4_baer),
        ("Hodge additivity criteria", c5_hodge_additivity),
        ("Hodge polygon of A(n)", c6_polygons),
        ("rank–dimension equality", c7_rank_dim),
        ("finiteness of H¹", c8_finiteness),
        ("quasi-isomorphism routes", c9_routes),
        ("regulator pipeline coherence", c10_regulator),
        ("mock regulator consistency", c11_mock),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.1}s)", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
