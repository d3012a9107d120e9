//! Signatures, formula terms, the textual formula grammar and subformula DAGs.
//!
//! A formula is a finite tree. Two subtrees that are structurally equal are
//! the *same* subformula: valuations assign one value to each distinct
//! subformula, so [`SubformulaDag`] collapses equal subtrees into a single
//! node. An identifier that the governing [`Signature`] does not declare is a
//! propositional variable, so a signature fully disambiguates bare
//! identifiers.

use indexmap::IndexMap;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("connective `{name}` expects {expected} argument(s), found {found} (at byte {pos})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        pos: usize,
    },
    #[error("`{0}` is applied to arguments but is not a connective of the signature")]
    UnknownConnective(String),
    #[error("connective `{0}` declared twice")]
    DuplicateConnective(String),
    #[error("variable `{0}` has the name of a connective")]
    VariableShadowsConnective(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Connective names with their arities, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    connectives: IndexMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Result<Self, FormulaError> {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<(), FormulaError> {
        if !is_ident(name) {
            return Err(FormulaError::BadIdentifier(name.to_string()));
        }
        if self.connectives.contains_key(name) {
            return Err(FormulaError::DuplicateConnective(name.to_string()));
        }
        self.connectives.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.connectives.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.connectives.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.connectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectives.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.connectives.iter().map(|(n, &a)| (n.as_str(), a))
    }

    /// `p`, suffixed with `_1` until it names no connective.
    pub fn fresh_variable(&self) -> String {
        let mut name = String::from("p");
        while self.contains(&name) {
            name.push_str("_1");
        }
        name
    }
}

/// A formula over some signature. Children are shared behind `Arc`, so
/// cloning is cheap and large encodings can reuse common subterms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Arc<str>),
    App(Arc<str>, Arc<[Formula]>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(Arc::from(name))
    }

    pub fn constant(name: &str) -> Self {
        Formula::App(Arc::from(name), Arc::from(Vec::new()))
    }

    pub fn app(name: &str, children: Vec<Formula>) -> Self {
        Formula::App(Arc::from(name), Arc::from(children))
    }

    pub fn children(&self) -> &[Formula] {
        match self {
            Formula::Var(_) => &[],
            Formula::App(_, cs) => cs,
        }
    }

    pub fn head(&self) -> &str {
        match self {
            Formula::Var(n) | Formula::App(n, _) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// Number of nodes of the formula tree, counting repeated occurrences.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(Formula::node_count).sum::<usize>()
    }

    /// Distinct variables in order of first (leftmost) occurrence.
    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Var(n) => {
                    if !out.iter().any(|v| v == n) {
                        out.push(n.clone());
                    }
                }
                Formula::App(_, cs) => stack.extend(cs.iter().rev()),
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.variables().is_empty()
    }

    /// Replace every occurrence of variable `name` by `by`.
    pub fn substitute(&self, name: &str, by: &Formula) -> Formula {
        match self {
            Formula::Var(n) if &**n == name => by.clone(),
            Formula::Var(_) => self.clone(),
            Formula::App(c, cs) => Formula::App(
                c.clone(),
                cs.iter().map(|ch| ch.substitute(name, by)).collect(),
            ),
        }
    }

    /// Check every application against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), FormulaError> {
        match self {
            Formula::Var(n) if sig.contains(n) => {
                Err(FormulaError::VariableShadowsConnective(n.to_string()))
            }
            Formula::Var(_) => Ok(()),
            Formula::App(c, cs) => {
                let expected = sig
                    .arity(c)
                    .ok_or_else(|| FormulaError::UnknownConnective(c.to_string()))?;
                if expected != cs.len() {
                    return Err(FormulaError::Arity {
                        name: c.to_string(),
                        expected,
                        found: cs.len(),
                        pos: 0,
                    });
                }
                cs.iter().try_for_each(|ch| ch.check(sig))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(n) => f.write_str(n),
            Formula::App(c, cs) if cs.is_empty() => f.write_str(c),
            Formula::App(c, cs) => {
                write!(f, "{c}(")?;
                for (i, ch) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{ch}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Canonical printed form; `parse_formula(&format_formula(f), sig) == f`.
pub fn format_formula(f: &Formula) -> String {
    f.to_string()
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn ident(&mut self) -> Result<&'a str, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit())
            })
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return match rest.chars().next() {
                Some(c) => self.syntax(format!("expected identifier, found `{c}`")),
                None => self.syntax("expected identifier, found end of input"),
            };
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let start = self.pos;
        let name = self.ident()?;
        if self.peek() == Some('(') {
            self.pos += 1;
            let mut children = vec![self.formula()?];
            loop {
                match self.peek() {
                    Some(',') => {
                        self.pos += 1;
                        children.push(self.formula()?);
                    }
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return self.syntax(format!("expected `,` or `)`, found `{c}`")),
                    None => return self.syntax("unclosed `(`"),
                }
            }
            let expected = self
                .sig
                .arity(name)
                .ok_or_else(|| FormulaError::UnknownConnective(name.to_string()))?;
            if expected != children.len() {
                return Err(FormulaError::Arity {
                    name: name.to_string(),
                    expected,
                    found: children.len(),
                    pos: start,
                });
            }
            Ok(Formula::app(name, children))
        } else {
            match self.sig.arity(name) {
                None => Ok(Formula::var(name)),
                Some(0) => Ok(Formula::constant(name)),
                Some(expected) => Err(FormulaError::Arity {
                    name: name.to_string(),
                    expected,
                    found: 0,
                    pos: start,
                }),
            }
        }
    }
}

/// Parse `formula := IDENT | IDENT '(' formula (',' formula)* ')'`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let mut p = Parser { text, pos: 0, sig };
    let f = p.formula()?;
    if let Some(c) = p.peek() {
        return p.syntax(format!("unexpected trailing `{c}`"));
    }
    Ok(f)
}

/// One node of a [`SubformulaDag`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
    Var(Arc<str>),
    App {
        connective: Arc<str>,
        children: Vec<usize>,
    },
}

#[derive(Hash, PartialEq, Eq)]
enum NodeKey {
    Var(Arc<str>),
    App(Arc<str>, Vec<usize>),
}

/// The distinct subformulas of one or more root formulas, children before
/// parents.
#[derive(Clone, Debug)]
pub struct SubformulaDag {
    nodes: Vec<DagNode>,
    formulas: Vec<Formula>,
    roots: Vec<usize>,
}

struct DagBuilder {
    nodes: Vec<DagNode>,
    formulas: Vec<Formula>,
    by_key: HashMap<NodeKey, usize>,
    // Shared `Arc` children are visited once.
    by_ptr: HashMap<*const Formula, usize>,
}

impl DagBuilder {
    fn visit(&mut self, f: &Formula) -> usize {
        let ptr = match f {
            Formula::App(_, cs) if !cs.is_empty() => Some(cs.as_ptr()),
            _ => None,
        };
        if let Some(id) = ptr.and_then(|p| self.by_ptr.get(&p)) {
            return *id;
        }
        let key = match f {
            Formula::Var(n) => NodeKey::Var(n.clone()),
            Formula::App(c, cs) => {
                let children = cs.iter().map(|ch| self.visit(ch)).collect();
                NodeKey::App(c.clone(), children)
            }
        };
        let id = match self.by_key.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.nodes.len();
                self.nodes.push(match &key {
                    NodeKey::Var(n) => DagNode::Var(n.clone()),
                    NodeKey::App(c, ch) => DagNode::App {
                        connective: c.clone(),
                        children: ch.clone(),
                    },
                });
                self.formulas.push(f.clone());
                self.by_key.insert(key, id);
                id
            }
        };
        if let Some(p) = ptr {
            self.by_ptr.insert(p, id);
        }
        id
    }
}

impl SubformulaDag {
    pub fn new(root: &Formula) -> Self {
        Self::from_roots(std::slice::from_ref(root))
    }

    /// Joint DAG of several formulas; equal subterms across roots share a node.
    pub fn from_roots(roots: &[Formula]) -> Self {
        let mut b = DagBuilder {
            nodes: Vec::new(),
            formulas: Vec::new(),
            by_key: HashMap::new(),
            by_ptr: HashMap::new(),
        };
        let roots = roots.iter().map(|r| b.visit(r)).collect();
        SubformulaDag {
            nodes: b.nodes,
            formulas: b.formulas,
            roots,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &DagNode {
        &self.nodes[id]
    }

    pub fn formula(&self, id: usize) -> &Formula {
        &self.formulas[id]
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// The first root; for a single-formula DAG this is the last node.
    pub fn root(&self) -> usize {
        self.roots[0]
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.formulas.iter().position(|g| g == f)
    }

    /// Node ids of the variables, in order of first occurrence in the roots.
    pub fn variable_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &r in &self.roots {
            for v in self.formulas[r].variables() {
                let id = self
                    .nodes
                    .iter()
                    .position(|n| matches!(n, DagNode::Var(m) if *m == v))
                    .expect("variable node present");
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        out
    }
}

/// `Sub(φ)` as a DAG.
pub fn subformula_dag(f: &Formula) -> SubformulaDag {
    SubformulaDag::new(f)
}
