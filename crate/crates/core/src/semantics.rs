//! Valuation semantics over subformula DAGs.
//!
//! A valuation restricted to `Sub(φ)` is an assignment of one value per DAG
//! node such that each application node takes a value from its connective's
//! cell at the children's values. Assignments are enumerated depth-first in
//! topological order, branching only where a cell has several members.

use crate::formula::{DagNode, Formula, FormulaError, SubformulaDag};
use crate::nmatrix::{for_each_tuple, Interpretation, Nmatrix};
use crate::values::{ValueId, ValueSet};
use smallvec::SmallVec;
use std::ops::ControlFlow;
use std::sync::Arc;
use thiserror::Error;

/// Default bound on the number of variable assignments `check_consequence`
/// will enumerate.
pub const DEFAULT_ASSIGNMENT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("{needed} variable assignments needed, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("`{formula}` has {count} variables; a monadic formula has at most one")]
    NotMonadic { formula: String, count: usize },
}

/// One value per node of a [`SubformulaDag`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<ValueId>,
}

impl Assignment {
    pub fn value(&self, node: usize) -> ValueId {
        self.values[node]
    }

    pub fn values(&self) -> &[ValueId] {
        &self.values
    }
}

/// A formula's DAG bound to an Nmatrix, ready for evaluation.
pub struct Evaluator<'a> {
    matrix: &'a Nmatrix,
    dag: &'a SubformulaDag,
    interps: Vec<Option<&'a Interpretation>>,
    var_nodes: Vec<usize>,
    /// Position of each node in `var_nodes`, if it is a variable.
    var_slot: Vec<Option<usize>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(matrix: &'a Nmatrix, dag: &'a SubformulaDag) -> Result<Self, SemanticsError> {
        for &r in dag.roots() {
            dag.formula(r).check(matrix.signature())?;
        }
        let interps = dag
            .nodes()
            .iter()
            .map(|n| match n {
                DagNode::Var(_) => None,
                DagNode::App { connective, .. } => matrix.interpretation(connective),
            })
            .collect();
        let var_nodes = dag.variable_nodes();
        let mut var_slot = vec![None; dag.len()];
        for (slot, &node) in var_nodes.iter().enumerate() {
            var_slot[node] = Some(slot);
        }
        Ok(Evaluator {
            matrix,
            dag,
            interps,
            var_nodes,
            var_slot,
        })
    }

    pub fn matrix(&self) -> &Nmatrix {
        self.matrix
    }

    pub fn dag(&self) -> &SubformulaDag {
        self.dag
    }

    /// DAG nodes of the variables, in order of first occurrence.
    pub fn variable_nodes(&self) -> &[usize] {
        &self.var_nodes
    }

    fn options(&self, node: usize, values: &[ValueId], vars: &[ValueId]) -> Options<'a> {
        match self.dag.node(node) {
            DagNode::Var(_) => Options::One(vars[self.var_slot[node].expect("variable slot")]),
            DagNode::App { children, .. } => {
                let args: SmallVec<[ValueId; 4]> = children.iter().map(|&c| values[c]).collect();
                let cell = self.interps[node].expect("checked connective").cell(&args);
                match cell.as_singleton() {
                    Some(v) => Options::One(v),
                    None => Options::Many(cell),
                }
            }
        }
    }

    /// All consistent assignments for the given variable values (ordered as
    /// [`Self::variable_nodes`]).
    pub fn assignments(&self, vars: &[ValueId]) -> Assignments<'_, 'a> {
        assert_eq!(vars.len(), self.var_nodes.len(), "one value per variable");
        Assignments {
            eval: self,
            vars: vars.to_vec(),
            values: vec![ValueId::new(0); self.dag.len()],
            choices: vec![Vec::new(); self.dag.len()],
            cursor: vec![0; self.dag.len()],
            started: false,
            done: false,
        }
    }

    /// The set of values the single root can take, stopping early once
    /// `stop` accepts the partial result.
    ///
    /// The root constrains no other node, so its cell is unioned in directly
    /// instead of being branched on.
    pub fn root_values_until(&self, vars: &[ValueId], stop: impl Fn(&ValueSet) -> bool) -> ValueSet {
        let root = self.dag.root();
        let mut out = self.matrix.empty_set();
        let mut values = vec![ValueId::new(0); self.dag.len()];
        if self.dag.len() == 1 {
            match self.options(root, &values, vars) {
                Options::One(v) => {
                    out.insert(v);
                }
                Options::Many(set) => out.union_with(set),
            }
            return out;
        }
        let _ = self.dfs(0, root, &mut values, vars, &mut out, &stop);
        out
    }

    fn dfs(
        &self,
        node: usize,
        root: usize,
        values: &mut [ValueId],
        vars: &[ValueId],
        out: &mut ValueSet,
        stop: &impl Fn(&ValueSet) -> bool,
    ) -> ControlFlow<()> {
        if node == root {
            match self.options(root, values, vars) {
                Options::One(v) => {
                    out.insert(v);
                }
                Options::Many(set) => out.union_with(set),
            }
            return if stop(out) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            };
        }
        match self.options(node, values, vars) {
            Options::One(v) => {
                values[node] = v;
                self.dfs(node + 1, root, values, vars, out, stop)
            }
            Options::Many(set) => {
                for v in set.iter() {
                    values[node] = v;
                    self.dfs(node + 1, root, values, vars, out, stop)?;
                }
                ControlFlow::Continue(())
            }
        }
    }

    pub fn root_values(&self, vars: &[ValueId]) -> ValueSet {
        let full = self.matrix.value_count();
        self.root_values_until(vars, |s| s.len() == full)
    }
}

enum Options<'a> {
    One(ValueId),
    Many(&'a ValueSet),
}

/// Stream of consistent assignments, in depth-first order.
pub struct Assignments<'e, 'a> {
    eval: &'e Evaluator<'a>,
    vars: Vec<ValueId>,
    values: Vec<ValueId>,
    choices: Vec<Vec<ValueId>>,
    cursor: Vec<usize>,
    started: bool,
    done: bool,
}

impl Assignments<'_, '_> {
    fn fill_from(&mut self, start: usize) {
        for node in start..self.values.len() {
            let opts = match self.eval.options(node, &self.values, &self.vars) {
                Options::One(v) => vec![v],
                Options::Many(set) => set.iter().collect(),
            };
            self.values[node] = opts[0];
            self.choices[node] = opts;
            self.cursor[node] = 0;
        }
    }
}

impl Iterator for Assignments<'_, '_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done || self.values.is_empty() {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
        } else {
            let Some(node) = (0..self.values.len())
                .rev()
                .find(|&i| self.cursor[i] + 1 < self.choices[i].len())
            else {
                self.done = true;
                return None;
            };
            self.cursor[node] += 1;
            self.values[node] = self.choices[node][self.cursor[node]];
            self.fill_from(node + 1);
        }
        Some(Assignment {
            values: self.values.clone(),
        })
    }
}

/// Consistent assignments on `Sub(φ)` extending `vars` (given by variable
/// name; every variable of φ must be covered).
pub fn consistent_assignments(
    matrix: &Nmatrix,
    formula: &Formula,
    vars: &[(&str, ValueId)],
) -> Result<Vec<Assignment>, SemanticsError> {
    let dag = SubformulaDag::new(formula);
    let eval = Evaluator::new(matrix, &dag)?;
    let ordered: Vec<ValueId> = eval
        .variable_nodes()
        .iter()
        .map(|&n| {
            let name = dag.formula(n).head();
            vars.iter()
                .find(|(v, _)| *v == name)
                .map(|&(_, x)| x)
                .unwrap_or_else(|| panic!("no value given for variable `{name}`"))
        })
        .collect();
    Ok(eval.assignments(&ordered).collect())
}

/// A total map from k-tuples of values to nonempty value sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiFunction {
    variables: Vec<Arc<str>>,
    universe: usize,
    table: Vec<ValueSet>,
}

impl MultiFunction {
    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Arc<str>] {
        &self.variables
    }

    /// Row-major table; the first variable is the most significant digit.
    pub fn table(&self) -> &[ValueSet] {
        &self.table
    }

    pub fn get(&self, args: &[ValueId]) -> &ValueSet {
        let idx = args
            .iter()
            .fold(0usize, |acc, v| acc * self.universe + v.index());
        &self.table[idx]
    }

    pub fn is_pointwise_singleton(&self) -> bool {
        self.table.iter().all(|s| s.len() == 1)
    }

    /// The underlying function when every image is a singleton.
    pub fn as_function(&self) -> Option<Vec<ValueId>> {
        self.table.iter().map(ValueSet::as_singleton).collect()
    }

    /// `(X₁,…,Xₙ)` for unary functions, one `args -> set` line otherwise.
    pub fn render(&self, m: &Nmatrix) -> String {
        if self.arity() <= 1 {
            let cells: Vec<String> = self.table.iter().map(|s| m.format_set(s)).collect();
            return format!("({})", cells.join(","));
        }
        let mut lines = Vec::new();
        let mut i = 0;
        let _ = for_each_tuple(self.universe, self.arity(), |args| {
            let names: Vec<&str> = args.iter().map(|&v| m.value_name(v)).collect();
            lines.push(format!("{} -> {}", names.join(" "), m.format_set(&self.table[i])));
            i += 1;
            ControlFlow::Continue(())
        });
        lines.join("\n")
    }
}

/// `φ_M`, with variables ordered by first occurrence.
pub fn expressed_multifunction(
    matrix: &Nmatrix,
    formula: &Formula,
) -> Result<MultiFunction, SemanticsError> {
    let dag = SubformulaDag::new(formula);
    let eval = Evaluator::new(matrix, &dag)?;
    Ok(multifunction_of(&eval))
}

pub(crate) fn multifunction_of(eval: &Evaluator<'_>) -> MultiFunction {
    let k = eval.variable_nodes().len();
    let universe = eval.matrix().value_count();
    let mut table = Vec::new();
    let _ = for_each_tuple(universe, k, |args| {
        table.push(eval.root_values(args));
        ControlFlow::Continue(())
    });
    MultiFunction {
        variables: eval
            .variable_nodes()
            .iter()
            .map(|&n| Arc::from(eval.dag().formula(n).head()))
            .collect(),
        universe,
        table,
    }
}

/// Whether every valuation designates φ.
pub fn is_theorem(matrix: &Nmatrix, formula: &Formula) -> Result<bool, SemanticsError> {
    let dag = SubformulaDag::new(formula);
    let eval = Evaluator::new(matrix, &dag)?;
    let designated = matrix.designated();
    let mut theorem = true;
    let _ = for_each_tuple(matrix.value_count(), eval.variable_nodes().len(), |args| {
        let vals = eval.root_values_until(args, |s| !s.is_subset(designated));
        if vals.is_subset(designated) {
            ControlFlow::Continue(())
        } else {
            theorem = false;
            ControlFlow::Break(())
        }
    });
    Ok(theorem)
}

/// A valuation (restricted to the relevant subformulas) designating every
/// premise and not the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub values: Vec<(Formula, ValueId)>,
}

impl Counterexample {
    pub fn value_of(&self, f: &Formula) -> Option<ValueId> {
        self.values.iter().find(|(g, _)| g == f).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consequence {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// `Γ ⊢_M φ` for finite Γ, enumerating valuations on `Sub(Γ ∪ {φ})`.
pub fn check_consequence(
    matrix: &Nmatrix,
    premises: &[Formula],
    conclusion: &Formula,
    cap: u64,
) -> Result<Consequence, SemanticsError> {
    let mut roots = premises.to_vec();
    roots.push(conclusion.clone());
    let dag = SubformulaDag::from_roots(&roots);
    let eval = Evaluator::new(matrix, &dag)?;
    let k = eval.variable_nodes().len();
    let needed = (matrix.value_count() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(SemanticsError::CapExceeded { needed, cap });
    }
    let (premise_nodes, goal) = dag.roots().split_at(premises.len());
    let goal = goal[0];
    let mut counterexample = None;
    let _ = for_each_tuple(matrix.value_count(), k, |args| {
        for a in eval.assignments(args) {
            let premises_hold = premise_nodes.iter().all(|&p| matrix.is_designated(a.value(p)));
            if premises_hold && !matrix.is_designated(a.value(goal)) {
                counterexample = Some(Counterexample {
                    values: dag
                        .formulas()
                        .iter()
                        .cloned()
                        .zip(a.values().iter().copied())
                        .collect(),
                });
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    Ok(Consequence {
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// `X # Y`: one set inside D and the other disjoint from it.
pub fn sets_separated(designated: &ValueSet, x: &ValueSet, y: &ValueSet) -> bool {
    (x.is_subset(designated) && y.is_disjoint(designated))
        || (y.is_subset(designated) && x.is_disjoint(designated))
}

/// `φ_M(x)` for every value x, for a formula with at most one variable.
pub fn unary_images(matrix: &Nmatrix, formula: &Formula) -> Result<Vec<ValueSet>, SemanticsError> {
    let dag = SubformulaDag::new(formula);
    let eval = Evaluator::new(matrix, &dag)?;
    unary_images_of(&eval)
}

pub(crate) fn unary_images_of(eval: &Evaluator<'_>) -> Result<Vec<ValueSet>, SemanticsError> {
    let m = eval.matrix();
    match eval.variable_nodes().len() {
        0 => Ok(vec![eval.root_values(&[]); m.value_count()]),
        1 => Ok(m.values().map(|x| eval.root_values(&[x])).collect()),
        count => Err(SemanticsError::NotMonadic {
            formula: eval.dag().formula(eval.dag().root()).to_string(),
            count,
        }),
    }
}

/// Whether the monadic formula φ separates `a` and `b`.
pub fn separates(
    matrix: &Nmatrix,
    formula: &Formula,
    a: ValueId,
    b: ValueId,
) -> Result<bool, SemanticsError> {
    let images = unary_images(matrix, formula)?;
    Ok(sets_separated(
        matrix.designated(),
        &images[a.index()],
        &images[b.index()],
    ))
}

/// Values `*` such that every cell with `*` among its arguments is `{*}`.
pub fn infectious_values(matrix: &Nmatrix) -> ValueSet {
    let mut candidates = matrix.full_set();
    for (_, interp) in matrix.interpretations() {
        if interp.arity() == 0 {
            continue;
        }
        interp.for_each_cell(|args, out| {
            for &x in args {
                if candidates.contains(x) && out.as_singleton() != Some(x) {
                    candidates = candidates.difference(&ValueSet::singleton(matrix.value_count(), x));
                }
            }
            if candidates.is_empty() {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if candidates.is_empty() {
            break;
        }
    }
    candidates
}
