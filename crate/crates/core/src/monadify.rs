//! The extension `M ↦ M_m`: a fresh top value `one`, the only designated
//! value, and binary connectives `f_a` for every base value `a`. When `M` has
//! an infectious non-designated value, `M_m` is monadic exactly when `M` has
//! a theorem.

use crate::formula::{Formula, SubformulaDag};
use crate::machine::CounterMachine;
use crate::nmatrix::{for_each_tuple, Nmatrix, NmatrixBuilder, NmatrixError, Row};
use crate::reduction::{build_nmatrix, ReductionError};
use crate::semantics::{infectious_values, is_theorem, Evaluator, SemanticsError};
use crate::values::{ValueId, ValueSet};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonadifyError {
    #[error("connective `{0}` already exists in the base signature")]
    NameCollision(String),
    #[error("`{0}` is not closed")]
    NotClosed(String),
    #[error("`{0}` is not a theorem of the base Nmatrix")]
    NotATheorem(String),
    #[error(transparent)]
    Nmatrix(#[from] NmatrixError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Name of the fresh value: `one`, suffixed with `_1` until unused.
pub fn fresh_value_name(m: &Nmatrix) -> String {
    let mut name = String::from("one");
    while m.value(&name).is_some() {
        name.push_str("_1");
    }
    name
}

pub fn f_name(m: &Nmatrix, a: ValueId) -> String {
    format!("f_{}", m.value_name(a))
}

pub fn build_monadify(m: &Nmatrix) -> Result<Nmatrix, MonadifyError> {
    let base = m.value_count();
    let universe = base + 1;
    let one = ValueId::new(base);
    let mut names = m.value_names().to_vec();
    names.push(fresh_value_name(m));
    let mut b = NmatrixBuilder::new(&names)?;
    b.designate(one);
    let lift = |set: &ValueSet| ValueSet::from_values(universe, set.iter());
    let all = ValueSet::full(universe);
    let base_all = lift(&m.full_set());

    for (name, interp) in m.interpretations() {
        let k = interp.arity();
        let mut rows = Vec::new();
        for row in interp.rows() {
            let wildcards = row.pattern.iter().filter(|p| p.is_none()).count();
            if wildcards == 0 || wildcards == k {
                rows.push(Row {
                    pattern: row.pattern,
                    output: lift(&row.output),
                });
                continue;
            }
            // Partial wildcards would tie with the `one` rows below, so
            // spell them out over the base values.
            let free: Vec<usize> = (0..k).filter(|&i| row.pattern[i].is_none()).collect();
            let _ = for_each_tuple(base, free.len(), |fill| {
                let mut args: Vec<ValueId> = row.pattern.iter().map(|p| p.unwrap_or(one)).collect();
                for (&slot, &v) in free.iter().zip(fill) {
                    args[slot] = v;
                }
                if interp.cell(&args) == &row.output {
                    rows.push(Row::exact(args, lift(&row.output)));
                }
                ControlFlow::Continue(())
            });
        }
        for i in 0..k {
            let mut pattern = vec![None; k];
            pattern[i] = Some(one);
            rows.push(Row {
                pattern,
                output: all.clone(),
            });
        }
        b.connective(name, k, rows);
    }

    for a in m.values() {
        let name = f_name(m, a);
        if m.signature().contains(&name) {
            return Err(MonadifyError::NameCollision(name));
        }
        let mut rows = vec![Row::catch_all(2, all.clone())];
        for d in m.designated().iter() {
            rows.push(Row {
                pattern: vec![None, Some(d)],
                output: base_all.clone(),
            });
            rows.push(Row::exact(vec![one, d], all.clone()));
            rows.push(Row::exact(vec![a, d], ValueSet::singleton(universe, one)));
        }
        b.connective(&name, 2, rows);
    }
    Ok(b.build()?)
}

/// At least two values, one of them infectious and not designated.
pub fn has_monadify_preconditions(m: &Nmatrix) -> bool {
    m.value_count() >= 2 && !infectious_values(m).difference(m.designated()).is_empty()
}

/// `{p} ∪ {f_a(p, φ) : a ∈ A}` for a closed theorem φ of `m`.
pub fn witness_separators_from_theorem(m: &Nmatrix, theorem: &Formula) -> Result<Vec<Formula>, MonadifyError> {
    if !theorem.is_closed() {
        return Err(MonadifyError::NotClosed(theorem.to_string()));
    }
    if !is_theorem(m, theorem)? {
        return Err(MonadifyError::NotATheorem(theorem.to_string()));
    }
    let var = Formula::var(&m.signature().fresh_variable());
    let mut out = vec![var.clone()];
    out.extend(
        m.values()
            .map(|a| Formula::app(&f_name(m, a), vec![var.clone(), theorem.clone()])),
    );
    Ok(out)
}

/// `(M_C)_m` for a counter machine `C`.
pub fn compile_monadicity_instance(machine: &CounterMachine) -> Result<Nmatrix, MonadifyError> {
    build_monadify(&build_nmatrix(machine)?)
}

/// `φ_M(x)` for a monadic φ, stopping as soon as the image is known to mix
/// designated and undesignated values.
pub fn image_until_mixed(m: &Nmatrix, f: &Formula, x: ValueId) -> Result<ValueSet, SemanticsError> {
    let dag = SubformulaDag::new(f);
    let eval = Evaluator::new(m, &dag)?;
    let vars = vec![x; eval.variable_nodes().len()];
    if vars.len() > 1 {
        return Err(SemanticsError::NotMonadic {
            formula: f.to_string(),
            count: vars.len(),
        });
    }
    let d = m.designated();
    Ok(eval.root_values_until(&vars, |s| !s.is_subset(d) && !s.is_disjoint(d)))
}

/// Outcome of [`certify_unseparated`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnseparatedReport {
    pub max_distinct: usize,
    /// Base connectives never yield the fresh value on base arguments.
    pub base_closed: bool,
    /// Every cell with the fresh value among its arguments is the full set.
    pub fresh_absorbing: bool,
    /// Monadic base-only formulas with fewer than `max_distinct` subformulas.
    pub base_terms: usize,
    /// Innermost `f_a`-terms checked.
    pub f_terms: usize,
    /// Innermost `f_a`-terms whose image at the target is not mixed.
    pub escapes: Vec<Formula>,
}

impl UnseparatedReport {
    /// No monadic formula within the bound separates the target from
    /// anything.
    pub fn holds(&self) -> bool {
        self.base_closed && self.fresh_absorbing && self.escapes.is_empty()
    }
}

/// Show that no monadic formula over `build_monadify(m)` with at most
/// `max_distinct` distinct subformulas separates `target` from another
/// value.
///
/// Base-only formulas never reach the fresh value, so their images are
/// undesignated everywhere. Any other formula has an innermost `f_a`-term;
/// if that term can take the fresh value at `target` then so can every
/// superterm, which is then free to take any value. So it suffices that each
/// innermost `f_a`-term has a mixed image at `target`, computed exactly.
pub fn certify_unseparated(m: &Nmatrix, target: ValueId, max_distinct: usize) -> Result<UnseparatedReport, MonadifyError> {
    let mm = build_monadify(m)?;
    let base = m.value_count();
    let one = ValueId::new(base);
    let all = mm.full_set();

    let mut base_closed = true;
    let mut fresh_absorbing = true;
    for (name, interp) in mm.interpretations() {
        let lifted = m.signature().contains(name);
        interp.for_each_cell(|args, out| {
            if args.contains(&one) {
                fresh_absorbing &= out == &all;
            } else if lifted {
                base_closed &= !out.contains(one);
            }
            ControlFlow::Continue(())
        });
    }

    let var = m.signature().fresh_variable();
    let (pool, _) = crate::enumerate::TermPool::build(m.signature(), &[var.as_str()], max_distinct.saturating_sub(1), |_, _: &[&()], _| Some(()));
    let f_names: Vec<(String, &crate::nmatrix::Interpretation)> = m
        .values()
        .map(|a| {
            let name = f_name(m, a);
            let interp = mm.interpretation(&name).expect("f connective");
            (name, interp)
        })
        .collect();

    let mut f_terms = 0;
    let mut escapes = Vec::new();
    let mut failure = None;
    pool.for_each_tuple(2, max_distinct.saturating_sub(1), |ids, _| {
        if failure.is_some() {
            return;
        }
        let (left, right) = (pool.formula(ids[0]), pool.formula(ids[1]));
        let dag = SubformulaDag::from_roots(&[left.clone(), right.clone()]);
        let eval = match Evaluator::new(&mm, &dag) {
            Ok(e) => e,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let vars = vec![target; eval.variable_nodes().len()];
        let (l, r) = (dag.roots()[0], dag.roots()[1]);
        let mut joint: Vec<(ValueId, ValueId)> = eval.assignments(&vars).map(|a| (a.value(l), a.value(r))).collect();
        joint.sort_unstable();
        joint.dedup();
        for (name, interp) in &f_names {
            f_terms += 1;
            let mut image = mm.empty_set();
            for &(x, y) in &joint {
                image.union_with(interp.cell(&[x, y]));
            }
            if !(image.contains(one) && image.len() > 1) {
                escapes.push(Formula::app(name, vec![left.clone(), right.clone()]));
            }
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(UnseparatedReport {
        max_distinct,
        base_closed,
        fresh_absorbing,
        base_terms: pool.len(),
        f_terms,
        escapes,
    })
}
