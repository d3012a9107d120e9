//! Finite Nmatrices: truth-values, designated values, and one multi-valued
//! interpretation per connective, together with the line-oriented text format.
//!
//! ```text
//! values a b c
//! designated c
//! conn g 2
//! g a a = c
//! g * * = b c        # wildcard row
//! ```
//!
//! A cell takes the output of the matching row with the fewest `*`
//! positions, so explicit rows beat wildcard rows. Two matching rows with
//! the same number of wildcards must agree. After loading, every cell must
//! be covered and every output nonempty.

use crate::formula::{is_ident, FormulaError, Signature};
use crate::values::{ValueId, ValueSet};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::ControlFlow;
use thiserror::Error;

/// Tables with at most this many cells are also kept as a dense array.
const DENSE_LIMIT: usize = 1 << 16;
/// Tables without a catch-all row are checked cell by cell up to this size.
const VALIDATION_LIMIT: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NmatrixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate truth-value `{0}`")]
    DuplicateValue(String),
    #[error("unknown truth-value `{0}`")]
    UnknownValue(String),
    #[error("`{0}` is not a valid truth-value name")]
    BadValueName(String),
    #[error("connective `{connective}`: no row covers cell ({cell})")]
    NotTotal { connective: String, cell: String },
    #[error("connective `{connective}`: row ({cell}) has an empty output")]
    EmptyCell { connective: String, cell: String },
    #[error("connective `{connective}`: rows disagree on cell ({cell})")]
    Conflict { connective: String, cell: String },
    #[error("connective `{connective}`: row has {found} argument(s), expected {expected}")]
    RowArity {
        connective: String,
        expected: usize,
        found: usize,
    },
    #[error("connective `{0}`: table too large to check without a catch-all row")]
    TooLarge(String),
    #[error("connective `{0}` has no interpretation")]
    MissingConnective(String),
    #[error(transparent)]
    Signature(#[from] FormulaError),
}

/// One table row: a concrete value or a wildcard per argument position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub pattern: Vec<Option<ValueId>>,
    pub output: ValueSet,
}

impl Row {
    pub fn exact(args: Vec<ValueId>, output: ValueSet) -> Self {
        Row {
            pattern: args.into_iter().map(Some).collect(),
            output,
        }
    }

    pub fn catch_all(arity: usize, output: ValueSet) -> Self {
        Row {
            pattern: vec![None; arity],
            output,
        }
    }

    fn wildcards(&self) -> usize {
        self.pattern.iter().filter(|p| p.is_none()).count()
    }

    fn matches(&self, args: &[ValueId]) -> bool {
        self.pattern
            .iter()
            .zip(args)
            .all(|(p, a)| p.is_none_or(|v| v == *a))
    }

    fn overlaps(&self, other: &Row) -> bool {
        self.pattern
            .iter()
            .zip(&other.pattern)
            .all(|(a, b)| a.is_none() || b.is_none() || a == b)
    }
}

/// Visit every tuple of `arity` values from a universe of `universe` values,
/// in lexicographic order (first position most significant).
pub fn for_each_tuple(
    universe: usize,
    arity: usize,
    mut f: impl FnMut(&[ValueId]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if arity > 0 && universe == 0 {
        return ControlFlow::Continue(());
    }
    let mut tuple = vec![ValueId::new(0); arity];
    loop {
        f(&tuple)?;
        let mut i = arity;
        loop {
            if i == 0 {
                return ControlFlow::Continue(());
            }
            i -= 1;
            let next = tuple[i].index() + 1;
            if next < universe {
                tuple[i] = ValueId::new(next);
                break;
            }
            tuple[i] = ValueId::new(0);
        }
    }
}

/// The interpretation of one connective: a total map from argument tuples to
/// nonempty value sets.
#[derive(Clone, Debug)]
pub struct Interpretation {
    arity: usize,
    universe: usize,
    exact: HashMap<Box<[ValueId]>, ValueSet>,
    /// Rows with at least one wildcard, fewest wildcards first.
    patterns: Vec<Row>,
    dense: Option<Vec<ValueSet>>,
}

impl Interpretation {
    pub fn from_rows(
        name: &str,
        arity: usize,
        universe: usize,
        rows: Vec<Row>,
    ) -> Result<Self, NmatrixError> {
        let render = |pattern: &[Option<ValueId>]| {
            pattern
                .iter()
                .map(|p| p.map_or("*".to_string(), |v| v.index().to_string()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut exact: HashMap<Box<[ValueId]>, ValueSet> = HashMap::new();
        let mut patterns = Vec::new();
        for row in rows {
            if row.pattern.len() != arity {
                return Err(NmatrixError::RowArity {
                    connective: name.to_string(),
                    expected: arity,
                    found: row.pattern.len(),
                });
            }
            if row.output.is_empty() {
                return Err(NmatrixError::EmptyCell {
                    connective: name.to_string(),
                    cell: render(&row.pattern),
                });
            }
            if row.wildcards() == 0 {
                let key: Box<[ValueId]> = row.pattern.iter().map(|p| p.unwrap()).collect();
                if let Some(prev) = exact.get(&key) {
                    if *prev != row.output {
                        return Err(NmatrixError::Conflict {
                            connective: name.to_string(),
                            cell: render(&row.pattern),
                        });
                    }
                }
                exact.insert(key, row.output);
            } else {
                patterns.push(row);
            }
        }
        patterns.sort_by_key(Row::wildcards);
        for (i, a) in patterns.iter().enumerate() {
            for b in &patterns[i + 1..] {
                if b.wildcards() != a.wildcards() {
                    break;
                }
                if a.output != b.output && a.overlaps(b) {
                    return Err(NmatrixError::Conflict {
                        connective: name.to_string(),
                        cell: render(&a.pattern),
                    });
                }
            }
        }
        let mut interp = Interpretation {
            arity,
            universe,
            exact,
            patterns,
            dense: None,
        };
        let cells = universe.checked_pow(arity as u32).unwrap_or(usize::MAX);
        let has_catch_all = interp.patterns.iter().any(|r| r.wildcards() == arity);
        if !has_catch_all || cells <= DENSE_LIMIT {
            if cells > VALIDATION_LIMIT {
                return Err(NmatrixError::TooLarge(name.to_string()));
            }
            let mut dense = Vec::with_capacity(if cells <= DENSE_LIMIT { cells } else { 0 });
            let mut missing = None;
            let _ = for_each_tuple(universe, arity, |args| match interp.find(args) {
                Some(out) => {
                    if cells <= DENSE_LIMIT {
                        dense.push(out.clone());
                    }
                    ControlFlow::Continue(())
                }
                None => {
                    missing = Some(args.to_vec());
                    ControlFlow::Break(())
                }
            });
            if let Some(args) = missing {
                return Err(NmatrixError::NotTotal {
                    connective: name.to_string(),
                    cell: render(&args.into_iter().map(Some).collect::<Vec<_>>()),
                });
            }
            if cells <= DENSE_LIMIT {
                interp.dense = Some(dense);
            }
        }
        Ok(interp)
    }

    /// A fully explicit table computed from `f`.
    pub fn from_fn(
        name: &str,
        arity: usize,
        universe: usize,
        mut f: impl FnMut(&[ValueId]) -> ValueSet,
    ) -> Result<Self, NmatrixError> {
        let mut rows = Vec::new();
        let _ = for_each_tuple(universe, arity, |args| {
            rows.push(Row::exact(args.to_vec(), f(args)));
            ControlFlow::Continue(())
        });
        Self::from_rows(name, arity, universe, rows)
    }

    fn find(&self, args: &[ValueId]) -> Option<&ValueSet> {
        self.exact
            .get(args)
            .or_else(|| self.patterns.iter().find(|r| r.matches(args)).map(|r| &r.output))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The cell at `args`.
    pub fn cell(&self, args: &[ValueId]) -> &ValueSet {
        debug_assert_eq!(args.len(), self.arity);
        if let Some(dense) = &self.dense {
            let idx = args
                .iter()
                .fold(0usize, |acc, v| acc * self.universe + v.index());
            return &dense[idx];
        }
        self.find(args).expect("interpretation is total")
    }

    /// Rows in emission order: wildcard rows (most general first), then
    /// explicit rows in lexicographic order.
    pub fn rows(&self) -> Vec<Row> {
        let mut out: Vec<Row> = self.patterns.clone();
        out.sort_by(|a, b| {
            b.wildcards()
                .cmp(&a.wildcards())
                .then_with(|| a.pattern.cmp(&b.pattern))
        });
        let mut exact: Vec<(&Box<[ValueId]>, &ValueSet)> = self.exact.iter().collect();
        exact.sort();
        out.extend(
            exact
                .into_iter()
                .map(|(args, output)| Row::exact(args.to_vec(), output.clone())),
        );
        out
    }

    pub fn is_deterministic(&self) -> bool {
        self.exact.values().all(|o| o.len() == 1) && self.patterns.iter().all(|r| r.output.len() == 1)
    }

    /// Visit every cell.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[ValueId], &ValueSet) -> ControlFlow<()>) {
        let _ = for_each_tuple(self.universe, self.arity, |args| f(args, self.cell(args)));
    }
}

/// A finite non-deterministic matrix.
#[derive(Clone, Debug)]
pub struct Nmatrix {
    values: Vec<String>,
    value_index: HashMap<String, ValueId>,
    designated: ValueSet,
    signature: Signature,
    interps: Vec<Interpretation>,
}

fn is_value_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Incremental construction of an [`Nmatrix`].
#[derive(Debug, Default)]
pub struct NmatrixBuilder {
    values: Vec<String>,
    value_index: HashMap<String, ValueId>,
    designated: Vec<ValueId>,
    connectives: Vec<(String, usize, Vec<Row>)>,
}

impl NmatrixBuilder {
    pub fn new<S: AsRef<str>>(values: &[S]) -> Result<Self, NmatrixError> {
        let mut b = NmatrixBuilder::default();
        for v in values {
            let v = v.as_ref();
            if !is_value_name(v) {
                return Err(NmatrixError::BadValueName(v.to_string()));
            }
            let id = ValueId::new(b.values.len());
            if b.value_index.insert(v.to_string(), id).is_some() {
                return Err(NmatrixError::DuplicateValue(v.to_string()));
            }
            b.values.push(v.to_string());
        }
        Ok(b)
    }

    pub fn universe(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, name: &str) -> Result<ValueId, NmatrixError> {
        self.value_index
            .get(name)
            .copied()
            .ok_or_else(|| NmatrixError::UnknownValue(name.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<ValueSet, NmatrixError> {
        let mut set = ValueSet::empty(self.universe());
        for n in names {
            set.insert(self.value(n.as_ref())?);
        }
        Ok(set)
    }

    pub fn designate(&mut self, value: ValueId) {
        if !self.designated.contains(&value) {
            self.designated.push(value);
        }
    }

    pub fn connective(&mut self, name: &str, arity: usize, rows: Vec<Row>) -> &mut Self {
        self.connectives.push((name.to_string(), arity, rows));
        self
    }

    pub fn build(self) -> Result<Nmatrix, NmatrixError> {
        let universe = self.values.len();
        let mut signature = Signature::new();
        let mut interps = Vec::with_capacity(self.connectives.len());
        for (name, arity, rows) in self.connectives {
            signature.add(&name, arity)?;
            interps.push(Interpretation::from_rows(&name, arity, universe, rows)?);
        }
        Ok(Nmatrix {
            designated: ValueSet::from_values(universe, self.designated),
            values: self.values,
            value_index: self.value_index,
            signature,
            interps,
        })
    }
}

impl Nmatrix {
    pub fn value_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> impl Iterator<Item = ValueId> + '_ {
        (0..self.values.len()).map(ValueId::new)
    }

    pub fn value_names(&self) -> &[String] {
        &self.values
    }

    pub fn value_name(&self, v: ValueId) -> &str {
        &self.values[v.index()]
    }

    pub fn value(&self, name: &str) -> Option<ValueId> {
        self.value_index.get(name).copied()
    }

    pub fn designated(&self) -> &ValueSet {
        &self.designated
    }

    pub fn is_designated(&self, v: ValueId) -> bool {
        self.designated.contains(v)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn interpretation(&self, connective: &str) -> Option<&Interpretation> {
        self.signature
            .iter()
            .position(|(n, _)| n == connective)
            .map(|i| &self.interps[i])
    }

    pub fn interpretations(&self) -> impl Iterator<Item = (&str, &Interpretation)> {
        self.signature.iter().map(|(n, _)| n).zip(&self.interps)
    }

    pub fn empty_set(&self) -> ValueSet {
        ValueSet::empty(self.value_count())
    }

    pub fn full_set(&self) -> ValueSet {
        ValueSet::full(self.value_count())
    }

    pub fn is_deterministic(&self) -> bool {
        self.interps.iter().all(Interpretation::is_deterministic)
    }

    pub fn format_set(&self, set: &ValueSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.value_name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// A copy with a different designated set.
    pub fn with_designated(&self, designated: ValueSet) -> Nmatrix {
        Nmatrix {
            designated,
            ..self.clone()
        }
    }

    /// Render in the text format. Output is byte-stable for equal inputs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "values {}", self.values.join(" "));
        let designated: Vec<&str> = self.designated.iter().map(|v| self.value_name(v)).collect();
        if designated.is_empty() {
            out.push_str("designated\n");
        } else {
            let _ = writeln!(out, "designated {}", designated.join(" "));
        }
        for (name, interp) in self.interpretations() {
            let _ = writeln!(out, "conn {name} {}", interp.arity());
            for row in interp.rows() {
                out.push_str(name);
                for p in &row.pattern {
                    out.push(' ');
                    out.push_str(p.map_or("*", |v| self.value_name(v)));
                }
                out.push_str(" =");
                for v in row.output.iter() {
                    out.push(' ');
                    out.push_str(self.value_name(v));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parse the text format.
    pub fn parse(text: &str) -> Result<Nmatrix, NmatrixError> {
        let err = |line: usize, message: String| NmatrixError::Parse { line, message };
        let mut builder: Option<NmatrixBuilder> = None;
        let mut designated_seen = false;
        let mut conn_index: HashMap<String, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some(&head) = tokens.first() else {
                continue;
            };
            match head {
                "values" => {
                    if builder.is_some() {
                        return Err(err(line, "`values` given twice".into()));
                    }
                    if tokens.len() < 2 {
                        return Err(err(line, "at least one truth-value is required".into()));
                    }
                    builder = Some(
                        NmatrixBuilder::new(&tokens[1..]).map_err(|e| err(line, e.to_string()))?,
                    );
                }
                "designated" => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err(line, "`designated` before `values`".into()))?;
                    if designated_seen {
                        return Err(err(line, "`designated` given twice".into()));
                    }
                    designated_seen = true;
                    for t in &tokens[1..] {
                        let v = b.value(t).map_err(|e| err(line, e.to_string()))?;
                        b.designate(v);
                    }
                }
                "conn" => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err(line, "`conn` before `values`".into()))?;
                    if tokens.len() != 3 {
                        return Err(err(line, "expected `conn <name> <arity>`".into()));
                    }
                    let name = tokens[1];
                    if !is_ident(name) {
                        return Err(err(line, format!("`{name}` is not a valid connective name")));
                    }
                    let arity: usize = tokens[2]
                        .parse()
                        .map_err(|_| err(line, format!("bad arity `{}`", tokens[2])))?;
                    if conn_index.contains_key(name) {
                        return Err(err(line, format!("connective `{name}` declared twice")));
                    }
                    conn_index.insert(name.to_string(), b.connectives.len());
                    b.connective(name, arity, Vec::new());
                }
                name => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err(line, "table row before `values`".into()))?;
                    let &ci = conn_index
                        .get(name)
                        .ok_or_else(|| err(line, format!("unknown connective `{name}`")))?;
                    let eq = tokens
                        .iter()
                        .position(|&t| t == "=")
                        .ok_or_else(|| err(line, "row is missing `=`".into()))?;
                    let arity = b.connectives[ci].1;
                    if eq - 1 != arity {
                        return Err(err(
                            line,
                            format!("`{name}` has arity {arity}, row gives {} argument(s)", eq - 1),
                        ));
                    }
                    let pattern = tokens[1..eq]
                        .iter()
                        .map(|&t| {
                            if t == "*" {
                                Ok(None)
                            } else {
                                b.value(t).map(Some).map_err(|e| err(line, e.to_string()))
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if eq + 1 == tokens.len() {
                        return Err(err(line, "row has an empty output".into()));
                    }
                    let output = b
                        .set_of(&tokens[eq + 1..])
                        .map_err(|e| err(line, e.to_string()))?;
                    b.connectives[ci].2.push(Row { pattern, output });
                }
            }
        }
        builder
            .ok_or_else(|| err(0, "missing `values` line".into()))?
            .build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX3: &str = "\
values a b c
designated c
conn g 2
g a a = c
g a b = a
g a c = b c
g b a = b
g b b = c
g b c = a c
g c a = b c
g c b = a c
g c c = c
";

    #[test]
    fn parse_and_lookup() {
        let m = Nmatrix::parse(EX3).unwrap();
        assert_eq!(m.value_count(), 3);
        let (a, c) = (m.value("a").unwrap(), m.value("c").unwrap());
        let g = m.interpretation("g").unwrap();
        assert_eq!(m.format_set(g.cell(&[a, c])), "{b,c}");
        assert!(m.is_designated(c));
        assert!(!m.is_deterministic());
    }

    #[test]
    fn wildcard_rows_fill_gaps_and_lose_to_explicit_rows() {
        let m = Nmatrix::parse(
            "values a b c\ndesignated c\nconn g 2\ng a a = c\ng * * = b c\ng a * = a\n",
        )
        .unwrap();
        let v = |n| m.value(n).unwrap();
        let g = m.interpretation("g").unwrap();
        assert_eq!(m.format_set(g.cell(&[v("a"), v("a")])), "{c}");
        assert_eq!(m.format_set(g.cell(&[v("a"), v("b")])), "{a}");
        assert_eq!(m.format_set(g.cell(&[v("c"), v("b")])), "{b,c}");
    }

    #[test]
    fn text_round_trip_is_stable() {
        let m = Nmatrix::parse(EX3).unwrap();
        let text = m.to_text();
        let again = Nmatrix::parse(&text).unwrap();
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn missing_cell_is_an_error() {
        let e = Nmatrix::parse("values a b\ndesignated a\nconn n 1\nn a = b\n").unwrap_err();
        assert!(matches!(e, NmatrixError::NotTotal { .. }), "{e}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = Nmatrix::parse("values a b\ndesignated a\nconn n 1\nn a =\n").unwrap_err();
        assert_eq!(e, NmatrixError::Parse { line: 4, message: "row has an empty output".into() });
        let e = Nmatrix::parse("values a b\n\nconn n 1\nn z = a\n").unwrap_err();
        assert!(matches!(e, NmatrixError::Parse { line: 4, .. }));
        let e = Nmatrix::parse("values a a\n").unwrap_err();
        assert!(matches!(e, NmatrixError::Parse { line: 1, .. }));
        let e = Nmatrix::parse("values a b\nm a = a\n").unwrap_err();
        assert!(matches!(e, NmatrixError::Parse { line: 2, .. }));
    }

    #[test]
    fn conflicting_rows_are_rejected() {
        let e = Nmatrix::parse("values a b\nconn n 1\nn a = a\nn a = b\nn b = a\n").unwrap_err();
        assert!(matches!(e, NmatrixError::Conflict { .. }));
        let e = Nmatrix::parse("values a b\nconn g 2\ng a * = a\ng * b = b\ng * * = a\n")
            .unwrap_err();
        assert!(matches!(e, NmatrixError::Conflict { .. }));
        // Equal outputs on the overlap are fine.
        Nmatrix::parse("values a b\nconn g 2\ng a * = a\ng * b = a\ng * * = b\n").unwrap();
    }

    #[test]
    fn nullary_connectives() {
        let m = Nmatrix::parse("values x y\ndesignated\nconn zero 0\nzero = x y\n").unwrap();
        let z = m.interpretation("zero").unwrap();
        assert_eq!(z.cell(&[]).len(), 2);
        assert!(m.designated().is_empty());
        assert!(m.to_text().contains("designated\n"));
    }

    #[test]
    fn tuple_enumeration_order() {
        let mut seen = Vec::new();
        let _ = for_each_tuple(2, 2, |t| {
            seen.push((t[0].index(), t[1].index()));
            ControlFlow::Continue(())
        });
        assert_eq!(seen, [(0, 0), (0, 1), (1, 0), (1, 1)]);
        let mut n = 0;
        let _ = for_each_tuple(3, 0, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(n, 1);
    }
}
