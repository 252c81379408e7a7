mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use trendsolve::algebra::{qadd, qmul, successors};
use trendsolve::constraint::compile;
use trendsolve::dsl::{parse_model, render_model};
use trendsolve::graph::build_graph;
use trendsolve::ode::translate_text;
use trendsolve::solver::{brute_force_solve, solve};
use trendsolve::{Mode, Scenario, ScenarioSet, Sign, SignSet, Triplet};

fn sign_set() -> impl Strategy<Value = SignSet> {
    (1u8..8).prop_map(|bits| {
        SignSet::from_signs(
            [(1, Sign::Pos), (2, Sign::Zero), (4, Sign::Neg)]
                .into_iter()
                .filter(|(b, _)| bits & b != 0)
                .map(|(_, s)| s),
        )
        .unwrap()
    })
}

fn as_i8(s: Sign) -> i8 {
    match s {
        Sign::Pos => 1,
        Sign::Zero => 0,
        Sign::Neg => -1,
    }
}

fn from_i8(x: i8) -> Sign {
    match x.signum() {
        1 => Sign::Pos,
        0 => Sign::Zero,
        _ => Sign::Neg,
    }
}

fn rows(ss: &ScenarioSet) -> BTreeSet<Row> {
    ss.scenarios.iter().map(row_of).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn qadd_qmul_match_integer_signs(a in sign_set(), b in sign_set()) {
        let mut sum = BTreeSet::new();
        let mut prod = BTreeSet::new();
        for x in a.iter().map(as_i8) {
            for y in b.iter().map(as_i8) {
                prod.insert(x * y);
                if x != 0 && y != 0 && x != y {
                    sum.extend([-1, 0, 1]);
                } else {
                    sum.insert((x + y).signum());
                }
            }
        }
        prop_assert_eq!(qadd(a, b), SignSet::from_signs(sum.into_iter().map(from_i8)).unwrap());
        prop_assert_eq!(qmul(a, b), SignSet::from_signs(prod.into_iter().map(from_i8)).unwrap());
    }

    #[test]
    fn commutative_and_associative(a in sign_set(), b in sign_set(), c in sign_set()) {
        prop_assert_eq!(qadd(a, b), qadd(b, a));
        prop_assert_eq!(qmul(a, b), qmul(b, a));
        prop_assert_eq!(qadd(qadd(a, b), c), qadd(a, qadd(b, c)));
        prop_assert_eq!(qmul(qmul(a, b), c), qmul(a, qmul(b, c)));
    }

    #[test]
    fn distributive_by_inclusion(a in sign_set(), b in sign_set(), c in sign_set()) {
        let left = qmul(a, qadd(b, c));
        let right = qadd(qmul(a, b), qmul(a, c));
        prop_assert!(left.is_subset(right));
        if a.len() == 1 && b.len() == 1 && c.len() == 1 {
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn monotone(a in sign_set(), extra in sign_set(), b in sign_set()) {
        let wider = a.union(extra);
        prop_assert!(qadd(a, b).is_subset(qadd(wider, b)));
        prop_assert!(qmul(a, b).is_subset(qmul(wider, b)));
    }

    #[test]
    fn dsl_round_trip(seed in any::<u64>()) {
        let m = random_model(&mut rng(seed));
        let text = render_model(&m);
        prop_assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn solve_matches_brute_force_and_oracle(seed in any::<u64>(), full in any::<bool>()) {
        let mode = if full { Mode::Full } else { Mode::FirstOrder };
        let m = random_model(&mut rng(seed));
        let fast = solve(&m, mode).unwrap();
        prop_assert_eq!(&fast, &brute_force_solve(&m, mode).unwrap());
        let expected: BTreeSet<Row> = oracle_enumerate(&m, mode).into_iter().collect();
        prop_assert_eq!(rows(&fast), expected);
    }

    #[test]
    fn every_solution_passes_the_oracle(seed in any::<u64>()) {
        let m = random_model(&mut rng(seed));
        for mode in [Mode::Full, Mode::FirstOrder] {
            let compiled = compile(&m, mode).unwrap();
            for sc in &solve(&m, mode).unwrap().scenarios {
                prop_assert!(oracle_admits(&m, mode, &row_of(sc)));
                prop_assert_eq!(compiled.violations(sc.triplets.as_slice()).count(), 0);
            }
        }
    }

    #[test]
    fn pruning_is_monotone(seed in any::<u64>(), full in any::<bool>()) {
        let mode = if full { Mode::Full } else { Mode::FirstOrder };
        let mut r = rng(seed);
        let m = random_model(&mut r);
        let bigger = extend_model(&mut r, &m);
        let small = rows(&solve(&m, mode).unwrap());
        prop_assert!(rows(&solve(&bigger, mode).unwrap()).is_subset(&small));
    }

    #[test]
    fn relation_models_keep_the_steady_state(seed in any::<u64>()) {
        let m = random_relation_model(&mut rng(seed));
        for mode in [Mode::Full, Mode::FirstOrder] {
            let ss = solve(&m, mode).unwrap();
            prop_assert_eq!(ss.steady_states().count(), 1);
        }
    }

    #[test]
    fn sup_and_red_lock_derivatives(seed in any::<u64>()) {
        let m = random_relation_model(&mut rng(seed));
        let ss = solve(&m, Mode::Full).unwrap();
        for r in &m.relations {
            if r.shape.curvature != Sign::Zero {
                continue;
            }
            let (x, y) = (m.index_of(&r.source).unwrap(), m.index_of(&r.target).unwrap());
            for sc in &ss.scenarios {
                let (tx, ty) = (sc.triplets[x], sc.triplets[y]);
                if r.shape.slope == Sign::Pos {
                    prop_assert_eq!((ty.d1, ty.d2()), (tx.d1, tx.d2()));
                } else {
                    prop_assert_eq!((ty.d1, ty.d2()), (tx.d1.negate(), tx.d2().negate()));
                }
            }
        }
    }

    #[test]
    fn graph_edges_are_legal_and_closure_matches(seed in any::<u64>()) {
        let m = random_relation_model(&mut rng(seed));
        let ss = solve(&m, Mode::Full).unwrap();
        if ss.len() > 40 {
            return Ok(());
        }
        let g = build_graph(&ss).unwrap();
        for &(a, b) in &g.edges {
            prop_assert!(a != b);
            let (sa, sb) = (ss.get(a).unwrap(), ss.get(b).unwrap());
            for (ta, tb) in sa.triplets.iter().zip(&sb.triplets) {
                prop_assert!(table_allows(ta, tb));
            }
        }
        // Completeness of the edge set.
        for sa in &ss.scenarios {
            for sb in &ss.scenarios {
                let legal = sa.id != sb.id && sa.triplets.iter().zip(&sb.triplets).all(|(x, y)| table_allows(x, y));
                prop_assert_eq!(legal, g.edges.contains(&(sa.id, sb.id)));
            }
        }
        // Warshall closure.
        let ids = ss.ids();
        let k = ids.len();
        let mut reach = vec![vec![false; k]; k];
        for i in 0..k {
            reach[i][i] = true;
            for j in 0..k {
                reach[i][j] |= g.edges.contains(&(ids[i], ids[j]));
            }
        }
        for via in 0..k {
            for i in 0..k {
                for j in 0..k {
                    reach[i][j] |= reach[i][via] && reach[via][j];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(g.reachable(ids[i], ids[j]).unwrap(), reach[i][j]);
            }
        }
    }

    #[test]
    fn adding_a_scenario_keeps_edges(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pool: Vec<Triplet> = TABLE.iter().map(|(t, _)| t.parse().unwrap()).collect();
        let n = r.gen_range(1..=3);
        let mut ss = ScenarioSet::empty((0..n).map(|i| format!("V{i}")).collect(), Mode::Full);
        for id in 1..=r.gen_range(1..=8usize) {
            ss.scenarios.push(Scenario { id, triplets: (0..n).map(|_| pool[r.gen_range(0..9)]).collect() });
        }
        let before = build_graph(&ss).unwrap();
        let id = ss.len() + 1;
        ss.scenarios.push(Scenario { id, triplets: (0..n).map(|_| pool[r.gen_range(0..9)]).collect() });
        let after = build_graph(&ss).unwrap();
        prop_assert!(before.edges.is_subset(&after.edges));
    }

    #[test]
    fn ode_positive_constants_are_invisible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ode = random_ode(&mut r);
        let base = translate_text(&ode.render(None)).unwrap();
        let pick = r.gen_range(0..ode.terms().count());
        prop_assert_eq!(translate_text(&ode.render(Some(pick))).unwrap().render(), base.render());
    }

    #[test]
    fn ode_never_cancels(seed in any::<u64>()) {
        let ode = random_ode(&mut rng(seed));
        let report = translate_text(&ode.render(None)).unwrap();
        let emitted: usize = report.equations.iter().map(|e| e.lhs.len() - 1 + e.rhs.len()).sum();
        let expected: usize = ode.terms().map(|t| if t.contains("(1 - p)") { 2 } else { 1 }).sum();
        prop_assert_eq!(emitted, expected);
        prop_assert_eq!(report.provenance.len(), expected);
    }
}

/// Signed source terms per state over X0..X2. Terms repeat freely so
/// identical monomials often land on both sides.
struct RandomOde(Vec<Vec<(bool, String)>>);

const ODE_STATES: [&str; 3] = ["X0", "X1", "X2"];

impl RandomOde {
    fn terms(&self) -> impl Iterator<Item = &String> {
        self.0.iter().flatten().map(|(_, t)| t)
    }

    /// Source text; term number `scaled` (if any) gets an extra factor `c`.
    fn render(&self, scaled: Option<usize>) -> String {
        let mut text = String::from("param a pos\nparam b pos\nparam c pos\nparam p prop\n");
        let mut k = 0;
        for (st, terms) in ODE_STATES.iter().zip(&self.0) {
            text.push_str(&format!("ode {st} ="));
            for (i, (neg, term)) in terms.iter().enumerate() {
                let op = match (i, neg) {
                    (0, true) => " -",
                    (0, false) => " ",
                    (_, true) => " - ",
                    (_, false) => " + ",
                };
                let c = if scaled == Some(k) { "c*" } else { "" };
                text.push_str(&format!("{op}{c}{term}"));
                k += 1;
            }
            text.push('\n');
        }
        text
    }
}

fn random_ode(r: &mut ChaCha8Rng) -> RandomOde {
    let coefs = ["a", "b", "2", "a*b", "(1 - p)*a"];
    RandomOde(
        ODE_STATES
            .iter()
            .map(|_| {
                (0..r.gen_range(1..=4))
                    .map(|_| {
                        let vars: Vec<&str> = (0..r.gen_range(1..=2)).map(|_| ODE_STATES[r.gen_range(0..3)]).collect();
                        let mut term = format!("{}*{}", coefs[r.gen_range(0..coefs.len())], vars.join("*"));
                        if r.gen_bool(0.3) {
                            term.push_str("/b");
                        }
                        (r.gen_bool(0.5), term)
                    })
                    .collect()
            })
            .collect(),
    )
}

#[test]
fn transition_table_is_well_formed() {
    for (src, dst) in TABLE {
        let t: Triplet = src.parse().unwrap();
        let got: BTreeSet<String> = successors(&t).unwrap().iter().map(|t| t.to_string()).collect();
        let want: BTreeSet<String> = dst.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, want, "{src}");
        for next in successors(&t).unwrap() {
            assert_ne!(next, t);
            assert!(!(t.d1 == Sign::Pos && next.d1 == Sign::Neg) && !(t.d1 == Sign::Neg && next.d1 == Sign::Pos));
            let (a, b) = (t.d2_sign().unwrap(), next.d2_sign().unwrap());
            assert!(!(a == Sign::Pos && b == Sign::Neg) && !(a == Sign::Neg && b == Sign::Pos));
        }
    }
    assert!(successors(&"0++".parse().unwrap()).is_err());
    assert!(successors(&"-0+".parse().unwrap()).is_err());
}
