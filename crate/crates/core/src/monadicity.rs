//! Monadicity: exact decision for deterministic matrices through the unary
//! clone, and a budgeted separator search for Nmatrices.
//!
//! For a deterministic matrix the multi-function of `©(ψ₁,…,ψₖ)` is the
//! composition of `©` with the functions of the `ψᵢ`, so the expressible
//! unary functions form a finite fixpoint. With non-determinism that
//! composition is unsound (equal subterms share a value), so the search
//! enumerates formulas themselves and can only ever report `Monadic` or
//! `Unknown`.

use crate::formula::{Formula, SubformulaDag};
use crate::nmatrix::Nmatrix;
use crate::semantics::{sets_separated, unary_images_of, Evaluator, SemanticsError};
use crate::values::{ValueId, ValueSet};
use indexmap::IndexMap;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonadicityError {
    #[error("connective `{0}` is non-deterministic; unary clone generation needs a matrix")]
    NonDeterministic(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("search budget must be at least 1")]
    ZeroBudget,
}

/// Unordered pair of distinct values, stored with the smaller index first.
pub type ValuePair = (ValueId, ValueId);

pub fn value_pairs(m: &Nmatrix) -> Vec<ValuePair> {
    let n = m.value_count();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (ValueId::new(a), ValueId::new(b))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Monadic,
    NotMonadic,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Monadic => "MONADIC",
            Verdict::NotMonadic => "NOT_MONADIC",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeparatorReport {
    pub verdict: Verdict,
    /// A separating formula per covered pair.
    pub witnesses: BTreeMap<ValuePair, Formula>,
    pub uncovered: Vec<ValuePair>,
    /// Largest formula size explored, when the report comes from a search.
    pub budget: Option<usize>,
    pub formulas_enumerated: usize,
}

/// The unary functions expressible in a deterministic matrix, each with a
/// witness formula over the variable `p`.
#[derive(Clone, Debug)]
pub struct UnaryClone {
    members: IndexMap<Vec<ValueId>, Formula>,
    rounds: usize,
}

impl UnaryClone {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, function: &[ValueId]) -> bool {
        self.members.contains_key(function)
    }

    pub fn witness(&self, function: &[ValueId]) -> Option<&Formula> {
        self.members.get(function)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[ValueId], &Formula)> {
        self.members.iter().map(|(f, w)| (f.as_slice(), w))
    }

    /// Number of saturation rounds until no new function appeared.
    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

fn shorter(a: &Formula, b: &Formula) -> bool {
    (a.node_count(), a.to_string()) < (b.node_count(), b.to_string())
}

/// Least set of unary functions containing the identity and the nullary
/// constants, closed under every connective.
pub fn unary_clone(m: &Nmatrix) -> Result<UnaryClone, MonadicityError> {
    if let Some((name, _)) = m.interpretations().find(|(_, i)| !i.is_deterministic()) {
        return Err(MonadicityError::NonDeterministic(name.to_string()));
    }
    let single = |set: &ValueSet| set.as_singleton().expect("deterministic cell");
    let mut members: IndexMap<Vec<ValueId>, Formula> = IndexMap::new();
    members.insert(m.values().collect(), Formula::var(&m.signature().fresh_variable()));
    for (name, interp) in m.interpretations() {
        if interp.arity() == 0 {
            let c = single(interp.cell(&[]));
            members
                .entry(vec![c; m.value_count()])
                .or_insert_with(|| Formula::constant(name));
        }
    }
    let mut frontier = 0;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let known = members.len();
        let mut fresh: IndexMap<Vec<ValueId>, Formula> = IndexMap::new();
        for (name, interp) in m.interpretations() {
            let k = interp.arity();
            if k == 0 {
                continue;
            }
            let mut idx = vec![0usize; k];
            let mut args = vec![ValueId::new(0); k];
            'tuples: loop {
                if idx.iter().any(|&i| i >= frontier) {
                    let function: Vec<ValueId> = m
                        .values()
                        .map(|x| {
                            for (slot, &i) in idx.iter().enumerate() {
                                args[slot] = members.get_index(i).expect("member").0[x.index()];
                            }
                            single(interp.cell(&args))
                        })
                        .collect();
                    if !members.contains_key(&function) {
                        let witness = Formula::app(
                            name,
                            idx.iter().map(|&i| members[i].clone()).collect::<Vec<_>>(),
                        );
                        match fresh.get_mut(&function) {
                            Some(w) if shorter(&witness, w) => *w = witness,
                            Some(_) => {}
                            None => {
                                fresh.insert(function, witness);
                            }
                        }
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < known {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        frontier = known;
        members.extend(fresh);
    }
    Ok(UnaryClone { members, rounds })
}

/// Decide monadicity of a deterministic matrix from its unary clone.
pub fn decide_monadicity_matrix(m: &Nmatrix) -> Result<SeparatorReport, MonadicityError> {
    let clone = unary_clone(m)?;
    let d = m.designated();
    let mut witnesses = BTreeMap::new();
    let mut uncovered = Vec::new();
    for (a, b) in value_pairs(m) {
        let best = clone
            .iter()
            .filter(|(h, _)| d.contains(h[a.index()]) != d.contains(h[b.index()]))
            .map(|(_, w)| w)
            .reduce(|x, y| if shorter(y, x) { y } else { x });
        match best {
            Some(w) => {
                witnesses.insert((a, b), w.clone());
            }
            None => uncovered.push((a, b)),
        }
    }
    Ok(SeparatorReport {
        verdict: if uncovered.is_empty() {
            Verdict::Monadic
        } else {
            Verdict::NotMonadic
        },
        witnesses,
        uncovered,
        budget: None,
        formulas_enumerated: clone.len(),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Largest formula (tree node count) to enumerate.
    pub budget: usize,
    /// Share one representative per function among subterms whose
    /// multi-function is pointwise singleton.
    pub prune: bool,
    /// Worker threads used to evaluate a size stratum.
    pub jobs: usize,
}

impl SearchOptions {
    pub fn new(budget: usize) -> Self {
        SearchOptions {
            budget,
            prune: true,
            jobs: 1,
        }
    }
}

/// Images `φ_M(x)` of a monadic formula, for every `x`.
fn images(m: &Nmatrix, f: &Formula) -> Vec<ValueSet> {
    let dag = SubformulaDag::new(f);
    let eval = Evaluator::new(m, &dag).expect("enumerated over the signature");
    unary_images_of(&eval).expect("enumerated formulas are monadic")
}

/// Every way to write `total` as an ordered sum of `parts` positive sizes.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < parts {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn stratum(m: &Nmatrix, size: usize, pool: &[Vec<Formula>]) -> Vec<Formula> {
    let mut out = Vec::new();
    if size == 1 {
        out.push(Formula::var(&m.signature().fresh_variable()));
    }
    for (name, arity) in m.signature().iter() {
        if arity == 0 {
            if size == 1 {
                out.push(Formula::constant(name));
            }
            continue;
        }
        for sizes in compositions(size - 1, arity) {
            let lists: Vec<&Vec<Formula>> = sizes.iter().map(|&s| &pool[s]).collect();
            if lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; arity];
            'tuples: loop {
                let children = idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
                out.push(Formula::app(name, children));
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break 'tuples;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < lists[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
    }
    let mut keyed: Vec<(String, Formula)> = out.into_iter().map(|f| (f.to_string(), f)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, f)| f).collect()
}

/// Enumerate monadic formulas by increasing size (ties broken on the printed
/// form) until every pair of values is separated or the budget runs out.
pub fn search_separators(
    m: &Nmatrix,
    options: SearchOptions,
) -> Result<SeparatorReport, MonadicityError> {
    if options.budget == 0 {
        return Err(MonadicityError::ZeroBudget);
    }
    let d = m.designated();
    let mut open: Vec<ValuePair> = value_pairs(m);
    let mut witnesses = BTreeMap::new();
    let mut enumerated = 0;
    let report = |verdict, witnesses, uncovered, enumerated| SeparatorReport {
        verdict,
        witnesses,
        uncovered,
        budget: Some(options.budget),
        formulas_enumerated: enumerated,
    };
    if open.is_empty() {
        return Ok(report(Verdict::Monadic, witnesses, open, 0));
    }
    let pool_runner = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .expect("thread pool");
    let mut pool: Vec<Vec<Formula>> = vec![Vec::new()];
    let mut canonical: HashSet<Vec<ValueId>> = HashSet::new();
    for size in 1..=options.budget {
        let candidates = stratum(m, size, &pool);
        let evaluated: Vec<Vec<ValueSet>> = if options.jobs > 1 {
            pool_runner.install(|| candidates.par_iter().map(|f| images(m, f)).collect())
        } else {
            candidates.iter().map(|f| images(m, f)).collect()
        };
        let mut kept = Vec::new();
        for (f, imgs) in candidates.into_iter().zip(evaluated) {
            enumerated += 1;
            open.retain(|&(a, b)| {
                if sets_separated(d, &imgs[a.index()], &imgs[b.index()]) {
                    witnesses.insert((a, b), f.clone());
                    false
                } else {
                    true
                }
            });
            if open.is_empty() {
                return Ok(report(Verdict::Monadic, witnesses, open, enumerated));
            }
            if options.prune {
                let function: Option<Vec<ValueId>> = imgs.iter().map(ValueSet::as_singleton).collect();
                match function {
                    Some(h) => {
                        if canonical.insert(h) {
                            kept.push(f);
                        }
                    }
                    None => kept.push(f),
                }
            } else {
                kept.push(f);
            }
        }
        pool.push(kept);
    }
    Ok(report(Verdict::Unknown, witnesses, open, enumerated))
}

/// Which pairs a set of monadic formulas separates.
#[derive(Clone, Debug)]
pub struct Coverage {
    /// Index into the input formulas of the first separator per pair.
    pub covered: BTreeMap<ValuePair, usize>,
    pub uncovered: Vec<ValuePair>,
}

impl Coverage {
    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Check whether `formulas` is a set of monadic separators for `m`.
pub fn verify_separator_set(m: &Nmatrix, formulas: &[Formula]) -> Result<Coverage, MonadicityError> {
    let mut all_images = Vec::with_capacity(formulas.len());
    for f in formulas {
        let dag = SubformulaDag::new(f);
        let eval = Evaluator::new(m, &dag)?;
        all_images.push(unary_images_of(&eval)?);
    }
    let d = m.designated();
    let mut covered = BTreeMap::new();
    let mut uncovered = Vec::new();
    for (a, b) in value_pairs(m) {
        match all_images
            .iter()
            .position(|im| sets_separated(d, &im[a.index()], &im[b.index()]))
        {
            Some(i) => {
                covered.insert((a, b), i);
            }
            None => uncovered.push((a, b)),
        }
    }
    Ok(Coverage { covered, uncovered })
}
