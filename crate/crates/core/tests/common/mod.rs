#![allow(dead_code)]

use nmlab::nmatrix::{for_each_tuple, NmatrixBuilder, Row};
use nmlab::{CounterMachine, Formula, Nmatrix, Signature, ValueId, ValueSet};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;
use std::ops::ControlFlow;

pub fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn nmatrix(name: &str) -> Nmatrix {
    Nmatrix::parse(&data(name)).unwrap()
}

pub fn machine(name: &str) -> CounterMachine {
    CounterMachine::parse(&data(name)).unwrap()
}

fn random_set(rng: &mut impl Rng, universe: usize, deterministic: bool) -> ValueSet {
    if deterministic {
        return ValueSet::singleton(universe, ValueId::new(rng.gen_range(0..universe)));
    }
    loop {
        let set = ValueSet::from_values(universe, (0..universe).filter(|_| rng.gen_bool(0.4)).map(ValueId::new));
        if !set.is_empty() {
            return set;
        }
    }
}

/// A random Nmatrix with `2..=max_values` values and the given
/// connectives, every cell spelled out.
pub fn random_nmatrix(rng: &mut impl Rng, max_values: usize, connectives: &[(&str, usize)], deterministic: bool) -> Nmatrix {
    build_random(rng, max_values, connectives, deterministic, false)
}

/// Like [`random_nmatrix`], with the last value infectious and not
/// designated.
pub fn random_infectious_nmatrix(rng: &mut impl Rng, max_values: usize, connectives: &[(&str, usize)]) -> Nmatrix {
    build_random(rng, max_values, connectives, false, true)
}

fn build_random(
    rng: &mut impl Rng,
    max_values: usize,
    connectives: &[(&str, usize)],
    deterministic: bool,
    infectious: bool,
) -> Nmatrix {
    let n = rng.gen_range(2..=max_values);
    let star = ValueId::new(n - 1);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut b = NmatrixBuilder::new(&names).unwrap();
    let mut designated: Vec<usize> = (0..n).filter(|&i| rng.gen_bool(0.5) && !(infectious && i == n - 1)).collect();
    if designated.is_empty() {
        designated.push(0);
    }
    for d in designated {
        b.designate(ValueId::new(d));
    }
    for &(name, arity) in connectives {
        let mut rows = Vec::new();
        let _ = for_each_tuple(n, arity, |args| {
            let out = if infectious && args.contains(&star) {
                ValueSet::singleton(n, star)
            } else {
                random_set(rng, n, deterministic)
            };
            rows.push(Row::exact(args.to_vec(), out));
            ControlFlow::Continue(())
        });
        b.connective(name, arity, rows);
    }
    b.build().unwrap()
}

/// Random formula whose subformula count stays within `max_distinct`;
/// children are drawn from earlier terms so sharing is common.
pub fn random_formula(rng: &mut impl Rng, sig: &Signature, vars: &[&str], max_distinct: usize) -> Formula {
    let mut pool: Vec<Formula> = vars.iter().map(|v| Formula::var(v)).collect();
    pool.extend(sig.iter().filter(|&(_, a)| a == 0).map(|(c, _)| Formula::constant(c)));
    let compound: Vec<(&str, usize)> = sig.iter().filter(|&(_, a)| a > 0).collect();
    let mut best = pool.choose(rng).unwrap().clone();
    for _ in 0..4 * max_distinct {
        let &(name, arity) = compound.choose(rng).unwrap();
        let children: Vec<Formula> = (0..arity).map(|_| pool.choose(rng).unwrap().clone()).collect();
        let f = Formula::app(name, children);
        if subformulas(&f).len() <= max_distinct {
            pool.push(f.clone());
            best = f;
        }
    }
    best
}

/// Distinct subformulas, children before parents.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn walk(f: &Formula, out: &mut Vec<Formula>) {
        if out.contains(f) {
            return;
        }
        for c in f.children() {
            walk(c, out);
        }
        out.push(f.clone());
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

/// Variable names in order of first occurrence, left to right.
pub fn variables_of(f: &Formula) -> Vec<String> {
    fn walk(f: &Formula, out: &mut Vec<String>) {
        if f.is_var() {
            if !out.iter().any(|v| v == f.head()) {
                out.push(f.head().to_string());
            }
            return;
        }
        for c in f.children() {
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

/// The expressed multi-function by trying every map from subformulas to
/// values and keeping the consistent ones.
pub fn naive_multifunction(m: &Nmatrix, f: &Formula) -> HashMap<Vec<ValueId>, ValueSet> {
    let subs = subformulas(f);
    let vars = variables_of(f);
    let index: HashMap<&Formula, usize> = subs.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n = m.value_count();
    let mut table: HashMap<Vec<ValueId>, ValueSet> = HashMap::new();
    let _ = for_each_tuple(n, vars.len(), |args| {
        table.insert(args.to_vec(), m.empty_set());
        ControlFlow::Continue(())
    });
    let root = index[f];
    let _ = for_each_tuple(n, subs.len(), |h| {
        let consistent = subs.iter().enumerate().all(|(i, s)| {
            if s.is_var() {
                return true;
            }
            let args: Vec<ValueId> = s.children().iter().map(|c| h[index[c]]).collect();
            m.interpretation(s.head()).unwrap().cell(&args).contains(h[i])
        });
        if consistent {
            let args: Vec<ValueId> = vars
                .iter()
                .map(|v| h[index[&Formula::var(v)]])
                .collect();
            table.get_mut(&args).unwrap().insert(h[root]);
        }
        ControlFlow::Continue(())
    });
    table
}
