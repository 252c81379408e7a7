mod common;

use std::collections::BTreeSet;

use common::*;
use trendsolve::check::check_scenarios;
use trendsolve::dsl::{parse_model, render_model};
use trendsolve::fixture::{parse_scenarios, render_scenarios};
use trendsolve::graph::build_graph;
use trendsolve::ode::translate_text;
use trendsolve::scenario::filter_scenarios;
use trendsolve::solver::{brute_force_solve, solve};
use trendsolve::{Mode, ScenarioSet, Sign, TripletPattern};

const REP_GROUP: [&str; 8] = ["REP", "AGE", "TA", "MAR", "LIS", "QUA", "BOO", "PRI"];

fn model(name: &str) -> trendsolve::TrendModel {
    parse_model(&read_fixture(name)).unwrap()
}

fn scenarios(name: &str) -> ScenarioSet {
    parse_scenarios(&read_fixture(name)).unwrap()
}

fn goals(pairs: &[(&str, &str)]) -> Vec<(String, TripletPattern)> {
    pairs.iter().map(|(v, p)| (v.to_string(), p.parse().unwrap())).collect()
}

#[test]
fn cim_model_shape() {
    let m = model("cim.tm");
    assert_eq!(m.variables.len(), 10);
    assert_eq!(m.relations.len(), 14);
    let text = render_model(&m);
    assert_eq!(text.lines().filter(|l| l.starts_with("var ")).count(), 10);
    assert_eq!(text.lines().filter(|l| l.starts_with("rel ")).count(), 14);
    assert_eq!(parse_model(&text).unwrap(), m);
}

#[test]
fn cim_reproduces_published_table() {
    let got = solve(&model("cim.tm"), Mode::Full).unwrap();
    let want = scenarios("cim7.json");
    assert!(got.same_assignments(&want));
    assert_eq!(got, want);
    let steady: Vec<usize> = got.steady_states().map(|s| s.id).collect();
    assert_eq!(steady, [4]);
    assert!(!got.get(1).unwrap().is_steady_state());
    for s in &got.scenarios {
        let rep = got.triplet(s, "REP").unwrap();
        for v in REP_GROUP {
            assert_eq!(got.triplet(s, v).unwrap(), rep);
        }
        assert_eq!(got.triplet(s, "UND"), got.triplet(s, "ROA"));
    }
}

#[test]
fn cim_matches_brute_force_on_a_pair() {
    let m = parse_model("var UND\nvar TA\nrel RED UND TA").unwrap();
    assert_eq!(solve(&m, Mode::Full).unwrap(), brute_force_solve(&m, Mode::Full).unwrap());
}

#[test]
fn rrm_translation_is_exact() {
    let report = translate_text(&read_fixture("rrm.ode")).unwrap();
    assert_eq!(report.render(), read_fixture("rrm.tm"));
    let eqs: Vec<String> = report.equations.iter().map(|e| e.to_string()).collect();
    assert_eq!(
        eqs,
        [
            "D(X) + X*Y = 0",
            "D(Y) + Y*Y + Y*Z1 + Y*Z2 = X*Y",
            "D(W) + X*Y + W = X*Y",
            "D(Z1) = Y*Y + Y*Z1 + W",
            "D(Z2) + W = W + Y*Z2",
        ]
    );
    for p in ["alpha", "phi", "delta", "lambda", "theta", "eta", "N"] {
        assert!(report.eliminated.iter().any(|e| e == p), "{p}");
    }
}

#[test]
fn rrm_forced_signs() {
    let m = model("rrm.tm");
    let ss = brute_force_solve(&m, Mode::Full).unwrap();
    assert_eq!(ss, solve(&m, Mode::Full).unwrap());
    assert_eq!(ss.steady_states().count(), 0);
    for s in &ss.scenarios {
        assert_eq!(ss.triplet(s, "X").unwrap().d1, Sign::Neg);
        assert_eq!(ss.triplet(s, "Z1").unwrap().d1, Sign::Pos);
    }
}

#[test]
fn im_fixture_satisfies_model() {
    let m = model("im.tm");
    let fixture = scenarios("im14.json");
    assert_eq!(fixture.len(), 14);
    let report = check_scenarios(&m, &fixture).unwrap();
    assert!(report.passed(), "{:?}", report.violations);
    // Every fixture scenario is also a solver scenario.
    let solved = solve(&m, Mode::Full).unwrap();
    let solved_rows: BTreeSet<_> = solved.scenarios.iter().map(|s| s.triplets.clone()).collect();
    let aligned = fixture.reordered_like(&solved).unwrap();
    for s in &aligned.scenarios {
        assert!(solved_rows.contains(&s.triplets));
    }
}

#[test]
fn im_solutions_have_forced_signs() {
    let ss = solve(&model("im.tm"), Mode::Full).unwrap();
    assert_eq!(ss.len(), 78);
    for s in &ss.scenarios {
        let d1 = |v: &str| ss.triplet(s, v).unwrap().d1;
        assert_eq!(d1("X"), Sign::Neg);
        assert_eq!(d1("Z1"), Sign::Pos);
        assert_eq!(d1("W"), Sign::Neg);
        assert_eq!(d1("Z2"), Sign::Pos);
        for v in REP_GROUP {
            assert_eq!(d1(v), Sign::Pos);
        }
        assert_eq!(d1("UND"), Sign::Neg);
    }
}

#[test]
fn im_first_order_contains_single_published_scenario() {
    let ss = solve(&model("im.tm"), Mode::FirstOrder).unwrap();
    assert_eq!(ss.len(), 3);
    let want = scenarios("table9.json").reordered_like(&ss).unwrap();
    assert!(ss.scenarios.iter().any(|s| s.triplets == want.scenarios[0].triplets));
    for s in &ss.scenarios {
        assert!(s.triplets.iter().all(|t| t.is_first_order()));
    }
}

#[test]
fn im_fixture_reachability() {
    let g = build_graph(&scenarios("im14.json")).unwrap();
    assert!(g.edges.contains(&(6, 7)));
    assert!(!g.edges.contains(&(6, 1)));
    for a in 6..=14 {
        for b in 1..=5 {
            assert!(!g.reachable(a, b).unwrap(), "{a} -> {b}");
        }
    }
    assert!(g.reachable(6, 6).unwrap());
    assert!(g.reachable(6, 7).unwrap());
    assert_eq!(g.to_dot().matches("[label=").count(), 14);
}

#[test]
fn im_goal_filtering() {
    let ss = scenarios("im14.json");
    assert_eq!(filter_scenarios(&ss, &goals(&[("REP", "+++")])).unwrap().ids(), [1, 2, 3, 4, 5]);
    assert_eq!(filter_scenarios(&ss, &goals(&[("REP", "***")])).unwrap().len(), 14);
    assert_eq!(filter_scenarios(&ss, &goals(&[("REP", "++-"), ("Y", "+-0")])).unwrap().ids(), [9, 10, 11]);
    assert!(filter_scenarios(&ss, &goals(&[("NOPE", "***")])).is_err());
}

#[test]
fn fixtures_round_trip() {
    for name in ["cim7.json", "im14.json", "table9.json"] {
        let ss = scenarios(name);
        assert_eq!(parse_scenarios(&render_scenarios(&ss)).unwrap(), ss, "{name}");
    }
}

#[test]
fn rendering_is_deterministic() {
    let m = model("im.tm");
    let a = render_scenarios(&solve(&m, Mode::Full).unwrap());
    let b = render_scenarios(&solve(&m, Mode::Full).unwrap());
    assert_eq!(a, b);
}
