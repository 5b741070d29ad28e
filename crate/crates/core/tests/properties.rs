use proptest::prelude::*;

use motcoh::cli::{parse_config, parse_literal, print_config};
use motcoh::field_tower::{Fq, Laurent};
use motcoh::hodge_pink::ext::{hp_extension_build, ExtGroup};
use motcoh::hodge_pink::jseries::EXACT;
use motcoh::hodge_pink::{HodgePinkStructure, JSeries, Lattice, Ring};
use motcoh::motive::{IntegralModel, TMotive, TauEntry};
use motcoh::poly::Poly2;
use motcoh::shtuka::{build_c_shtuka, cech_cone, compare_routes, g_complex, SliceOptions};
use motcoh::tate::{fixed_point_residual, solve_tau_fixed, Precision};

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5)]
}

fn poly2(f: &Fq, terms: &[(u8, u32, u32)]) -> Poly2 {
    terms.iter().fold(Poly2::zero(f), |acc, &(c, a, b)| acc.add(&Poly2::monomial(f, c % f.q() as u8, a, b)))
}

fn terms() -> impl Strategy<Value = Vec<(u8, u32, u32)>> {
    prop::collection::vec((0u8..5, 0u32..3, 0u32..3), 0..4)
}

fn like(f: &Fq) -> Laurent {
    Laurent::zero_with_cap(f, 40, 40)
}

fn jseries(f: &Fq, start: i64, cs: &[Vec<(i64, u8)>]) -> JSeries<Laurent> {
    let coeffs = cs.iter().map(|t| Laurent::from_terms(f, t, 40)).collect();
    JSeries::new(like(f), start, coeffs, EXACT, 10)
}

fn jcoeffs() -> impl Strategy<Value = (i64, Vec<Vec<(i64, u8)>>)> {
    (-3i64..=1, prop::collection::vec(prop::collection::vec((-2i64..=3, 0u8..3), 0..3), 1..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn literal_round_trip(p in prime(), ts in terms(), e in -3i64..=2) {
        let f = Fq::new(p, 1).unwrap();
        let x = TauEntry::new(poly2(&f, &ts), e);
        prop_assert_eq!(parse_literal(&f, &x.show()).unwrap(), x);
    }

    #[test]
    fn config_round_trip(p in prime(), ts in terms(), n in -3i64..=3, pu in proptest::option::of(16i64..96)) {
        let f = Fq::new(p, 1).unwrap();
        let mut num = poly2(&f, &ts);
        if num.is_zero() {
            num = Poly2::constant(&f, 1);
        }
        let text = format!(
            "p = {p}\nname = X\ntau = [[\"(t-th)^{n}\", \"{}\"], [\"0\", \"1\"]]\n{}",
            TauEntry::new(num, 0).show(),
            pu.map_or(String::new(), |u| format!("prec_u = {u}\n")),
        );
        let c = parse_config(&text).unwrap();
        let again = parse_config(&print_config(&c)).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(print_config(&again), print_config(&c));
    }

    #[test]
    fn laurent_inverse(p in prime(), ts in prop::collection::vec((-3i64..6, 1u8..5), 1..5)) {
        let f = Fq::new(p, 1).unwrap();
        let ts: Vec<(i64, u8)> = ts.iter().map(|&(k, c)| (k, c % f.q() as u8)).collect();
        let x = Laurent::from_terms(&f, &ts, 40);
        prop_assume!(!x.is_zero());
        let prod = x.mul(&x.inv().unwrap());
        prop_assert!(prod.sub(&Laurent::one(&f, 40)).is_zero());
    }

    #[test]
    fn twists_have_exact_fixed_points(p in prime(), n in -3i64..=4) {
        let f = Fq::new(p, 1).unwrap();
        let pr = Precision { t: 12, u: 32, j: 8 };
        let m = TMotive::carlitz_twist(&f, n);
        let sol = solve_tau_fixed(&m.tau, &f, pr).unwrap();
        prop_assert!(fixed_point_residual(&m.tau, &sol, pr).iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn baer_sum_is_additive(a in -2i64..=2, b in -2i64..=2, x in jcoeffs(), y in jcoeffs()) {
        let f = Fq::new(3, 1).unwrap();
        let hx = HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like(&f), 10).scaled(a));
        let hy = HodgePinkStructure::new(Ring::KInf, Lattice::standard(1, &like(&f), 10).scaled(b));
        let g = ExtGroup::new(&hx, &hy).unwrap();
        let (fx, fy) = (jseries(&f, x.0, &x.1), jseries(&f, y.0, &y.1));
        let ex = hp_extension_build(&hx, &hy, &vec![vec![fx.clone()]]).unwrap();
        let ey = hp_extension_build(&hx, &hy, &vec![vec![fy.clone()]]).unwrap();
        let lhs = g.classify(&ex.baer_sum(&ey).unwrap()).unwrap();
        prop_assert!(lhs.same_class(&g.class_of(&vec![vec![fx.add(&fy)]]).unwrap()));
        // lattice criterion agrees with the polygon comparison
        prop_assert_eq!(ex.polygon_additive().unwrap(), g.is_hodge_additive(&vec![vec![fx]]).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cohomology_routes_agree(p in prop_oneof![Just(2u32), Just(3)], n in -1i64..=3) {
        let f = Fq::new(p, 1).unwrap();
        let m = TMotive::carlitz_twist(&f, n);
        let opts = SliceOptions { max_d: 2, max_theta: 4, cap: 48 };
        let g = g_complex(&m, opts).unwrap();
        let cone = cech_cone(&build_c_shtuka(&m, &IntegralModel::standard(&m)).unwrap(), opts).unwrap();
        prop_assert!(compare_routes(&g, &cone).agree);
    }
}
