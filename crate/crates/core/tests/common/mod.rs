//! Shared test support: random models and an independent checker that
//! works on plain `i8` signs straight from the model, never touching the
//! compiled constraint form.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use trendsolve::model::{Factor, Monomial, Shape, TrendEquation, TrendModel, TrendRelation, Variable};
use trendsolve::{Mode, Scenario, Sign, Triplet};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

const SIGNS: [Sign; 3] = [Sign::Pos, Sign::Zero, Sign::Neg];

fn random_sign(rng: &mut impl Rng) -> Sign {
    *SIGNS.choose(rng).unwrap()
}

fn random_relation(rng: &mut impl Rng, positive: &[String]) -> Option<TrendRelation> {
    if positive.len() < 2 {
        return None;
    }
    let mut pair = positive.choose_multiple(rng, 2);
    let (source, target) = (pair.next().unwrap().clone(), pair.next().unwrap().clone());
    let slope = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
    let shape = Shape::new(slope, random_sign(rng)).unwrap();
    Some(TrendRelation { shape, source, target })
}

fn random_monomial(rng: &mut impl Rng, names: &[String]) -> Monomial {
    let k = rng.gen_range(1..=2);
    let factors = (0..k)
        .map(|_| {
            let v = names.choose(rng).unwrap().clone();
            match rng.gen_range(0..6) {
                0..=2 => Factor::Value(v),
                3 | 4 => Factor::D1(v),
                _ => Factor::D2(v),
            }
        })
        .collect();
    let sign = if rng.gen_bool(0.8) { Sign::Pos } else { Sign::Neg };
    Monomial::new(sign, factors)
}

fn random_equation(rng: &mut impl Rng, names: &[String]) -> TrendEquation {
    loop {
        let lhs: Vec<Monomial> = (0..rng.gen_range(0..=2)).map(|_| random_monomial(rng, names)).collect();
        let rhs: Vec<Monomial> = (0..rng.gen_range(0..=2)).map(|_| random_monomial(rng, names)).collect();
        if !lhs.is_empty() || !rhs.is_empty() {
            return TrendEquation { lhs, rhs };
        }
    }
}

/// 2 to 5 variables, at most 4 relations and 2 equations. Most variables
/// are positive; the rest take part in equations only.
pub fn random_model(rng: &mut impl Rng) -> TrendModel {
    let n = rng.gen_range(2..=5);
    let variables: Vec<Variable> = (0..n)
        .map(|i| Variable {
            name: format!("V{i}"),
            value: if rng.gen_bool(0.8) { Sign::Pos } else { random_sign(rng) },
        })
        .collect();
    let names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
    let positive: Vec<String> = variables.iter().filter(|v| v.value == Sign::Pos).map(|v| v.name.clone()).collect();
    let relations = (0..rng.gen_range(0..=4)).filter_map(|_| random_relation(rng, &positive)).collect();
    let equations = (0..rng.gen_range(0..=2)).map(|_| random_equation(rng, &names)).collect();
    TrendModel { variables, relations, equations }
}

/// A model with one more relation or equation than `m`.
pub fn extend_model(rng: &mut impl Rng, m: &TrendModel) -> TrendModel {
    let names = m.names();
    let positive: Vec<String> = m.variables.iter().filter(|v| v.value == Sign::Pos).map(|v| v.name.clone()).collect();
    let mut out = m.clone();
    match rng.gen_bool(0.5).then(|| random_relation(rng, &positive)).flatten() {
        Some(r) => out.relations.push(r),
        None => out.equations.push(random_equation(rng, &names)),
    }
    out
}

/// Relation-only model over positive variables.
pub fn random_relation_model(rng: &mut impl Rng) -> TrendModel {
    let n = rng.gen_range(2..=5);
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let relations = (0..rng.gen_range(1..=4)).filter_map(|_| random_relation(rng, &names)).collect();
    TrendModel { variables: names.iter().map(Variable::positive).collect(), relations, equations: vec![] }
}

// ---- independent oracle -------------------------------------------------

fn s(x: Sign) -> i8 {
    match x {
        Sign::Pos => 1,
        Sign::Zero => 0,
        Sign::Neg => -1,
    }
}

/// (value, d1, d2) with `None` for an unknown second derivative.
pub type Row = Vec<(i8, i8, Option<i8>)>;

pub fn row_of(sc: &Scenario) -> Row {
    sc.triplets.iter().map(|t| (s(t.value), s(t.d1), t.d2_sign().map(s))).collect()
}

/// Possible signs of a qualitative sum of definite signs.
fn sum_signs(terms: &[i8]) -> Vec<i8> {
    let pos = terms.iter().any(|&t| t > 0);
    let neg = terms.iter().any(|&t| t < 0);
    match (pos, neg) {
        (true, true) => vec![-1, 0, 1],
        (true, false) => vec![1],
        (false, true) => vec![-1],
        (false, false) => vec![0],
    }
}

fn derivative(f: &Factor) -> Option<Factor> {
    match f {
        Factor::Value(v) => Some(Factor::D1(v.clone())),
        Factor::D1(v) => Some(Factor::D2(v.clone())),
        Factor::D2(_) => None,
    }
}

fn order(f: &Factor) -> u8 {
    match f {
        Factor::Value(_) => 0,
        Factor::D1(_) => 1,
        Factor::D2(_) => 2,
    }
}

/// Product rule, one monomial at a time.
fn differentiate(side: &[Monomial]) -> Vec<Monomial> {
    let mut out = Vec::new();
    for m in side {
        for i in 0..m.factors.len() {
            let mut factors = m.factors.clone();
            factors[i] = derivative(&factors[i]).expect("order below two");
            out.push(Monomial::new(m.sign, factors));
        }
    }
    out
}

fn factor_sign(m: &TrendModel, row: &Row, f: &Factor) -> i8 {
    let (name, o) = match f {
        Factor::Value(v) | Factor::D1(v) | Factor::D2(v) => (v, order(f)),
    };
    let (v, d1, d2) = row[m.index_of(name).unwrap()];
    match o {
        0 => v,
        1 => d1,
        _ => d2.expect("definite second derivative"),
    }
}

fn equation_holds(m: &TrendModel, row: &Row, lhs: &[Monomial], rhs: &[Monomial]) -> bool {
    let mut terms = Vec::new();
    for (side, flip) in [(lhs, 1i8), (rhs, -1i8)] {
        for mono in side {
            let p = mono.factors.iter().fold(s(mono.sign) * flip, |p, f| p * factor_sign(m, row, f));
            terms.push(p);
        }
    }
    sum_signs(&terms).contains(&0)
}

/// Whether `row` satisfies every relation and equation of `m` in `mode`.
pub fn oracle_admits(m: &TrendModel, mode: Mode, row: &Row) -> bool {
    for (var, &(v, _, _)) in m.variables.iter().zip(row) {
        if s(var.value) != v {
            return false;
        }
    }
    for r in &m.relations {
        let (_, dx, ddx) = row[m.index_of(&r.source).unwrap()];
        let (_, dy, ddy) = row[m.index_of(&r.target).unwrap()];
        let (s1, s2) = (s(r.shape.slope), s(r.shape.curvature));
        if dy != s1 * dx {
            return false;
        }
        if mode == Mode::Full {
            let allowed = sum_signs(&[s2 * dx * dx, s1 * ddx.unwrap()]);
            if !allowed.contains(&ddy.unwrap()) {
                return false;
            }
        }
    }
    for eq in &m.equations {
        let ord = eq.lhs.iter().chain(&eq.rhs).flat_map(|mo| mo.factors.iter().map(order)).max().unwrap_or(0);
        match mode {
            Mode::FirstOrder if ord == 2 => continue,
            Mode::FirstOrder => {
                if !equation_holds(m, row, &eq.lhs, &eq.rhs) {
                    return false;
                }
            }
            Mode::Full => {
                if !equation_holds(m, row, &eq.lhs, &eq.rhs) {
                    return false;
                }
                if ord <= 1 && !equation_holds(m, row, &differentiate(&eq.lhs), &differentiate(&eq.rhs)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every row the oracle accepts, by odometer over all derivative signs.
pub fn oracle_enumerate(m: &TrendModel, mode: Mode) -> Vec<Row> {
    let n = m.variables.len();
    let per: Vec<(i8, Option<i8>)> = match mode {
        Mode::Full => [1, 0, -1].iter().flat_map(|&a| [1, 0, -1].map(move |b| (a, Some(b)))).collect(),
        Mode::FirstOrder => vec![(1, None), (0, None), (-1, None)],
    };
    let values: Vec<i8> = m.variables.iter().map(|v| s(v.value)).collect();
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    'outer: loop {
        let row: Row = (0..n).map(|i| (values[i], per[digits[i]].0, per[digits[i]].1)).collect();
        if oracle_admits(m, mode, &row) {
            out.push(row);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < per.len() {
                continue 'outer;
            }
            *d = 0;
        }
        break;
    }
    out
}

// ---- independent transition table ---------------------------------------

/// Permitted one-step transitions for a positive variable, as text.
pub const TABLE: [(&str, &[&str]); 9] = [
    ("+++", &["++0"]),
    ("++0", &["+++", "++-"]),
    ("++-", &["++0", "+0-", "+00"]),
    ("+0+", &["+++"]),
    ("+00", &["+++", "+--"]),
    ("+0-", &["+--"]),
    ("+-+", &["+-0", "+0+", "+00"]),
    ("+-0", &["+-+", "+--"]),
    ("+--", &["+-0"]),
];

pub fn table_allows(from: &Triplet, to: &Triplet) -> bool {
    let (a, b) = (from.to_string(), to.to_string());
    a == b || TABLE.iter().any(|(src, dst)| *src == a && dst.contains(&b.as_str()))
}
