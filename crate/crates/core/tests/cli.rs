use clap::Parser;
use motcoh::cli::{main_with_args, run_text, Cli};

const A1: &str = "p = 3\nname = A(1)\ntau = [[\"(t-th)^-1\"]]\nclass = [\"(t-th)^-1\"]\n";
const A2: &str = "p = 3\nname = A(2)\ntau = [[\"(t-th)^-2\"]]\n";
const UNIT: &str = "p = 3\ntau = [[\"1\"]]\n";

fn run(args: &[&str], text: &str) -> motcoh::cli::Report {
    let mut full = vec!["motcoh"];
    full.extend_from_slice(args);
    run_text(&Cli::parse_from(full), text)
}

#[test]
fn info_on_second_twist() {
    let r = run(&["info", "x"], A2);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.results["rank"], 1);
    assert_eq!(r.results["weights"][0], -2);
    assert_eq!(r.results["effective"], false);
    assert_eq!(r.version, "motcoh-report/1");
}

#[test]
fn betti_of_unit_has_invariant_line() {
    let r = run(&["betti", "x", "--prec-t", "12", "--prec-u", "32"], UNIT);
    assert_eq!(r.exit_code, 0, "{:?}", r.error);
    assert_eq!(r.results["plus_rank"], 1);
    assert_eq!(r.precision.t, 12);
}

#[test]
fn rankdim_on_first_twist() {
    let r = run(&["rankdim", "x", "--degree-bound", "2"], A1);
    assert_eq!(r.exit_code, 0, "{:?}", r.error);
    assert_eq!(r.results["lhs"], 1);
    assert_eq!(r.results["rhs"], 1);
}

#[test]
fn reports_are_deterministic() {
    for args in [&["regulator", "x", "--samples", "3", "--seed", "7"][..], &["shtuka", "x"][..], &["ext", "x"][..]] {
        let a = run(args, A1);
        let b = run(args, A1);
        assert_eq!(a.exit_code, 0, "{args:?}: {:?}", a.error);
        assert_eq!(a.comparable(), b.comparable(), "{args:?}");
    }
    let a = run(&["regulator", "x", "--samples", "3", "--seed", "7"], A1);
    let c = run(&["regulator", "x", "--samples", "3", "--seed", "8"], A1);
    assert_ne!(a.results["classes"], c.results["classes"]);
}

#[test]
fn exit_codes() {
    let bad = run(&["info", "x"], "p = 3\ntau = [[\"t^-1\"]]\n");
    assert_eq!(bad.exit_code, 2);
    let err = bad.error.unwrap();
    assert_eq!((err.module.as_str(), err.kind), ("cli", "config"));
    assert!(err.message.contains("line 2"), "{}", err.message);

    let tau = run(&["info", "x"], "p = 3\ntau = [[\"t\"]]\n");
    assert_eq!((tau.exit_code, tau.error.unwrap().module.as_str()), (2, "cli"));

    let unit = run(&["rankdim", "x"], UNIT);
    assert_eq!(unit.exit_code, 3);
    assert_eq!(unit.error.unwrap().module, "regulator");

    let no_class = run(&["ext", "x"], A2);
    assert_eq!(no_class.exit_code, 3);

    let model = run(&["info", "x"], "p = 3\ntau = [[\"1\"]]\nmodel = other\n");
    assert_eq!(model.exit_code, 3);
}

#[test]
fn binary_entry_point() {
    let dir = std::env::temp_dir().join(format!("motcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("a2.txt");
    let out = dir.join("out.json");
    std::fs::write(&cfg, A2).unwrap();
    let code = main_with_args(["motcoh", "info", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "info");
    assert_eq!(main_with_args(["motcoh", "info", dir.join("missing").to_str().unwrap()]), 2);
    assert_eq!(main_with_args(["motcoh", "frobnicate", "x"]), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
