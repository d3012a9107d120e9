//! Enumeration of formulas by number of distinct subformulas.
//!
//! Terms are built bottom-up in rounds; each round combines at least one
//! term from the previous round, so every formula is produced once. The
//! visitor attaches data to a term or prunes it, and pruned terms are never
//! used as subterms. Pruning is only sound when the property being checked
//! is inherited by every superterm of a pruned term.

use crate::formula::{Formula, Signature};
use smallvec::SmallVec;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Formulas handed to the visitor.
    pub visited: usize,
    /// Formulas the visitor kept for extension.
    pub kept: usize,
    pub rounds: usize,
}

type Key = (u32, SmallVec<[u32; 3]>);

/// A term found in the current round: head, children, formula, union, data.
type Fresh<T> = (u32, SmallVec<[u32; 3]>, Formula, Vec<u32>, T);

struct Kept<T> {
    formula: Formula,
    /// Ids of all subformulas, itself included, ascending.
    sub: Vec<u32>,
    data: T,
}

/// The kept terms of an enumeration, indexed by head and children.
pub struct TermPool<T> {
    terms: Vec<Kept<T>>,
    heads: Vec<(String, usize)>,
    index: HashMap<Key, u32>,
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl<T> TermPool<T> {
    /// Enumerate every formula over `sig` and `variables` with at most
    /// `max_distinct` distinct subformulas whose proper subterms were all
    /// kept.
    ///
    /// `visit` gets the formula, the data of its children and its number of
    /// distinct subformulas; returning `None` prunes it.
    pub fn build(
        sig: &Signature,
        variables: &[&str],
        max_distinct: usize,
        mut visit: impl FnMut(&Formula, &[&T], usize) -> Option<T>,
    ) -> (Self, EnumerationStats) {
        let mut heads: Vec<(String, usize)> =
            variables.iter().map(|v| (v.to_string(), 0)).collect();
        heads.extend(sig.iter().map(|(c, a)| (c.to_string(), a)));
        let mut pool = TermPool {
            terms: Vec::new(),
            heads,
            index: HashMap::new(),
        };
        let mut stats = EnumerationStats::default();
        if max_distinct == 0 {
            return (pool, stats);
        }
        for h in 0..pool.heads.len() {
            if pool.heads[h].1 != 0 {
                continue;
            }
            let leaf = if h < variables.len() {
                Formula::var(&pool.heads[h].0)
            } else {
                Formula::constant(&pool.heads[h].0)
            };
            stats.visited += 1;
            if let Some(data) = visit(&leaf, &[], 1) {
                pool.push(h as u32, SmallVec::new(), leaf, Vec::new(), data);
            }
        }
        let compound: Vec<u32> = (0..pool.heads.len() as u32)
            .filter(|&h| pool.heads[h as usize].1 > 0)
            .collect();
        let mut frontier = 0;
        loop {
            stats.rounds += 1;
            let known = pool.terms.len();
            let mut fresh: Vec<Fresh<T>> = Vec::new();
            for &h in &compound {
                let arity = pool.heads[h as usize].1;
                pool.tuples(arity, max_distinct - 1, known, frontier, &mut |children, union| {
                    let formula = Formula::app(
                        &pool.heads[h as usize].0,
                        children.iter().map(|&c| pool.terms[c].formula.clone()).collect(),
                    );
                    let data: Vec<&T> = children.iter().map(|&c| &pool.terms[c].data).collect();
                    stats.visited += 1;
                    if let Some(d) = visit(&formula, &data, union.len() + 1) {
                        let kids = children.iter().map(|&c| c as u32).collect();
                        fresh.push((h, kids, formula, union.to_vec(), d));
                    }
                });
            }
            if fresh.is_empty() {
                break;
            }
            frontier = known;
            for (h, kids, formula, union, data) in fresh {
                pool.push(h, kids, formula, union, data);
            }
        }
        stats.kept = pool.terms.len();
        (pool, stats)
    }

    fn push(&mut self, head: u32, children: SmallVec<[u32; 3]>, formula: Formula, mut sub: Vec<u32>, data: T) {
        let id = self.terms.len() as u32;
        sub.push(id);
        self.index.insert((head, children), id);
        self.terms.push(Kept { formula, sub, data });
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn formula(&self, id: usize) -> &Formula {
        &self.terms[id].formula
    }

    pub fn data(&self, id: usize) -> &T {
        &self.terms[id].data
    }

    /// Number of distinct subformulas of term `id`.
    pub fn distinct(&self, id: usize) -> usize {
        self.terms[id].sub.len()
    }

    /// Visit every `arity`-tuple of kept terms whose subformulas together
    /// number at most `max_union`, with the union of their subformula ids.
    pub fn for_each_tuple(&self, arity: usize, max_union: usize, mut f: impl FnMut(&[usize], &[u32])) {
        self.tuples(arity, max_union, self.terms.len(), 0, &mut f);
    }

    fn tuples(
        &self,
        arity: usize,
        max_union: usize,
        known: usize,
        frontier: usize,
        emit: &mut dyn FnMut(&[usize], &[u32]),
    ) {
        let mut chosen = Vec::with_capacity(arity);
        self.extend(arity, max_union, known, frontier, &mut chosen, &[], emit);
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        arity: usize,
        max_union: usize,
        known: usize,
        frontier: usize,
        chosen: &mut Vec<usize>,
        union: &[u32],
        emit: &mut dyn FnMut(&[usize], &[u32]),
    ) {
        if chosen.len() == arity {
            emit(chosen, union);
            return;
        }
        let needs_frontier = chosen.len() + 1 == arity && chosen.iter().all(|&c| c < frontier);
        let lo = if needs_frontier { frontier } else { 0 };
        let mut visit = |c: usize, chosen: &mut Vec<usize>| {
            let next = merge(union, &self.terms[c].sub);
            if next.len() <= max_union {
                chosen.push(c);
                self.extend(arity, max_union, known, frontier, chosen, &next, emit);
                chosen.pop();
            }
        };
        let slack = max_union.saturating_sub(union.len());
        if slack >= 2 {
            for c in lo..known {
                if self.terms[c].sub.len() <= union.len() + slack {
                    visit(c, chosen);
                }
            }
            return;
        }
        // Little room left: the child is either already in the union or has
        // all of its own children there.
        let mut cands: Vec<usize> = union.iter().map(|&u| u as usize).collect();
        if slack == 1 {
            for (h, &(_, arity)) in self.heads.iter().enumerate() {
                if arity > 0 && union.is_empty() {
                    continue;
                }
                let mut idx = vec![0usize; arity];
                'odometer: loop {
                    let kids: SmallVec<[u32; 3]> = idx.iter().map(|&i| union[i]).collect();
                    if let Some(&c) = self.index.get(&(h as u32, kids)) {
                        cands.push(c as usize);
                    }
                    for pos in (0..arity).rev() {
                        idx[pos] += 1;
                        if idx[pos] < union.len() {
                            continue 'odometer;
                        }
                        idx[pos] = 0;
                    }
                    break;
                }
            }
            cands.sort_unstable();
            cands.dedup();
        }
        for c in cands {
            if c >= lo && c < known {
                visit(c, chosen);
            }
        }
    }
}

/// Visit every formula over `sig` and `variables` with at most
/// `max_distinct` distinct subformulas whose proper subterms were all kept.
pub fn enumerate_terms<T>(
    sig: &Signature,
    variables: &[&str],
    max_distinct: usize,
    visit: impl FnMut(&Formula, &[&T], usize) -> Option<T>,
) -> EnumerationStats {
    TermPool::build(sig, variables, max_distinct, visit).1
}
