//! Compiling a counter machine `C` into an Nmatrix `M_C` over the signature
//! `zero, eps, suc, step_q` whose only possible theorem is the encoding of
//! the halting computation of `C`.
//!
//! Counter values are abstracted to four tags: `eq0` (certainly zero),
//! `ge0`, `ge1`, `ge2`. `zero` may be read as `eq0` or `ge0` and `suc(ge0)`
//! may stay at `ge0`, which lets valuations detect counters that differ or are
//! not consecutive. `err` is infectious and never designated.

use crate::formula::{Formula, FormulaError, Signature};
use crate::machine::{Configuration, CounterMachine, Instruction};
use crate::enumerate::{enumerate_terms, EnumerationStats};
use crate::nmatrix::{Nmatrix, NmatrixBuilder, NmatrixError, Row};
use crate::semantics::{is_theorem, SemanticsError};
use crate::values::{ValueId, ValueSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("state name `{0}` is reserved")]
    ReservedStateName(String),
    #[error(transparent)]
    Nmatrix(#[from] NmatrixError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

const RESERVED: [&str; 3] = ["zero", "eps", "suc"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RmTag {
    Eq0,
    Ge0,
    Ge1,
    Ge2,
}

impl RmTag {
    pub const ALL: [RmTag; 4] = [RmTag::Eq0, RmTag::Ge0, RmTag::Ge1, RmTag::Ge2];

    pub fn name(self) -> &'static str {
        match self {
            RmTag::Eq0 => "eq0",
            RmTag::Ge0 => "ge0",
            RmTag::Ge1 => "ge1",
            RmTag::Ge2 => "ge2",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// The `suc` cell on a counter tag.
    pub fn suc(self) -> &'static [RmTag] {
        match self {
            RmTag::Eq0 => &[RmTag::Ge1],
            RmTag::Ge0 => &[RmTag::Ge0, RmTag::Ge1],
            RmTag::Ge1 | RmTag::Ge2 => &[RmTag::Ge2],
        }
    }

    /// Tags `zero` may take.
    pub fn is_zero_reading(self) -> bool {
        matches!(self, RmTag::Eq0 | RmTag::Ge0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ReductionValue {
    Rm(RmTag),
    Conf { state: usize, tags: Vec<RmTag> },
    Init,
    Error,
}

/// The two families of valuations that refute every non-theorem on closed
/// formulas: `V0Eq` reads `zero` as `eq0`; `VK(k)` reads `enc(0..=k)` as
/// `ge0` and climbs from there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedValuation {
    V0Eq,
    VK(u64),
}

impl fmt::Display for NamedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedValuation::V0Eq => f.write_str("v0_eq"),
            NamedValuation::VK(k) => write!(f, "v_{k}"),
        }
    }
}

impl NamedValuation {
    /// Tag of `enc(j)`.
    pub fn enc_tag(self, j: u64) -> RmTag {
        match self {
            NamedValuation::V0Eq => match j {
                0 => RmTag::Eq0,
                1 => RmTag::Ge1,
                _ => RmTag::Ge2,
            },
            NamedValuation::VK(k) => {
                if j <= k {
                    RmTag::Ge0
                } else if j == k + 1 {
                    RmTag::Ge1
                } else {
                    RmTag::Ge2
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuKind {
    Plus,
    Minus,
    Neq,
    Eq,
}

/// The valuation that tells `a` and `b` apart in the sense of `kind`.
pub fn mu_select(kind: MuKind, a: u64, b: u64) -> NamedValuation {
    use NamedValuation::{V0Eq, VK};
    match kind {
        MuKind::Plus => {
            if b > a {
                VK(a)
            } else if a != 0 {
                VK(a - 1)
            } else {
                V0Eq
            }
        }
        MuKind::Minus => {
            if a >= 2 && b <= a - 2 {
                VK(a - 2)
            } else if a != 0 {
                VK(a - 1)
            } else {
                V0Eq
            }
        }
        MuKind::Neq => {
            if a == 0 {
                V0Eq
            } else {
                VK(a - 1)
            }
        }
        MuKind::Eq => V0Eq,
    }
}

pub fn step_name(state: &str) -> String {
    format!("step_{state}")
}

pub fn enc(k: u64) -> Formula {
    (0..k).fold(Formula::constant("zero"), |f, _| Formula::app("suc", vec![f]))
}

/// The number `φ` encodes, if it is `suc^k(zero)`.
pub fn as_enc(f: &Formula) -> Option<u64> {
    let mut k = 0;
    let mut cur = f;
    loop {
        match (cur.head(), cur.children()) {
            ("zero", []) if !cur.is_var() => return Some(k),
            ("suc", [inner]) => {
                k += 1;
                cur = inner;
            }
            _ => return None,
        }
    }
}

pub fn build_sigma(machine: &CounterMachine) -> Result<Signature, ReductionError> {
    if let Some(s) = machine.states().iter().find(|s| RESERVED.contains(&s.as_str())) {
        return Err(ReductionError::ReservedStateName(s.clone()));
    }
    let mut sig = Signature::new();
    sig.add("zero", 0)?;
    sig.add("eps", 0)?;
    sig.add("suc", 1)?;
    for q in machine.states() {
        sig.add(&step_name(q), machine.counters() + 1)?;
    }
    Ok(sig)
}

pub fn build_nmatrix(machine: &CounterMachine) -> Result<Nmatrix, ReductionError> {
    Ok(MachineNmatrix::new(machine.clone())?.nmatrix)
}

/// `M_C` together with the machine and the value layout.
#[derive(Clone, Debug)]
pub struct MachineNmatrix {
    machine: CounterMachine,
    nmatrix: Nmatrix,
    confs_per_state: usize,
}

impl MachineNmatrix {
    pub fn new(machine: CounterMachine) -> Result<Self, ReductionError> {
        build_sigma(&machine)?;
        let n = machine.counters();
        let confs_per_state = 4usize.pow(n as u32);
        let mut me = MachineNmatrix {
            nmatrix: Nmatrix::parse("values x\ndesignated\n").expect("placeholder"),
            machine,
            confs_per_state,
        };
        let names: Vec<String> = (0..me.value_count())
            .map(|i| me.value_label(&me.decode(ValueId::new(i))))
            .collect();
        let mut b = NmatrixBuilder::new(&names)?;
        let universe = names.len();
        let single = |v: ValueId| ValueSet::singleton(universe, v);
        let err = me.err();
        for q in me.machine.halting_states() {
            for t in 0..confs_per_state {
                b.designate(ValueId::new(4 + q * confs_per_state + t));
            }
        }
        b.connective(
            "zero",
            0,
            vec![Row::exact(
                vec![],
                ValueSet::from_values(universe, [me.rm(RmTag::Eq0), me.rm(RmTag::Ge0)]),
            )],
        );
        b.connective("eps", 0, vec![Row::exact(vec![], single(me.init()))]);
        let mut suc_rows = vec![Row::catch_all(1, single(err))];
        for t in RmTag::ALL {
            let out = ValueSet::from_values(universe, t.suc().iter().map(|&s| me.rm(s)));
            suc_rows.push(Row::exact(vec![me.rm(t)], out));
        }
        b.connective("suc", 1, suc_rows);
        for q in 0..me.machine.states().len() {
            let mut rows = vec![Row::catch_all(n + 1, single(err))];
            for (x, z) in me.step_support(q) {
                let mut args = vec![x];
                args.extend(z.iter().map(|&t| me.rm(t)));
                rows.push(Row::exact(args, single(me.conf(q, &z))));
            }
            b.connective(&step_name(me.machine.state_name(q)), n + 1, rows);
        }
        me.nmatrix = b.build()?;
        Ok(me)
    }

    /// Inputs `(x, z⃗)` on which `step_q` does not answer `err`.
    fn step_support(&self, q: usize) -> Vec<(ValueId, Vec<RmTag>)> {
        let n = self.machine.counters();
        let tuples = tag_tuples(n);
        let mut out = Vec::new();
        if q == self.machine.init() {
            for t in [RmTag::Eq0, RmTag::Ge0] {
                out.push((self.init(), vec![t; n]));
            }
        }
        for prev in 0..self.machine.states().len() {
            let Some(instr) = self.machine.delta(prev) else {
                continue;
            };
            for y in &tuples {
                for z in &tuples {
                    if step_allows(instr, q, y, z) {
                        out.push((self.conf(prev, y), z.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn machine(&self) -> &CounterMachine {
        &self.machine
    }

    pub fn nmatrix(&self) -> &Nmatrix {
        &self.nmatrix
    }

    pub fn into_nmatrix(self) -> Nmatrix {
        self.nmatrix
    }

    pub fn signature(&self) -> &Signature {
        self.nmatrix.signature()
    }

    pub fn value_count(&self) -> usize {
        self.machine.states().len() * self.confs_per_state + 6
    }

    pub fn rm(&self, t: RmTag) -> ValueId {
        ValueId::new(t.index())
    }

    pub fn conf(&self, state: usize, tags: &[RmTag]) -> ValueId {
        let offset = tags.iter().fold(0, |acc, t| acc * 4 + t.index());
        ValueId::new(4 + state * self.confs_per_state + offset)
    }

    pub fn init(&self) -> ValueId {
        ValueId::new(self.value_count() - 2)
    }

    pub fn err(&self) -> ValueId {
        ValueId::new(self.value_count() - 1)
    }

    pub fn encode(&self, v: &ReductionValue) -> ValueId {
        match v {
            ReductionValue::Rm(t) => self.rm(*t),
            ReductionValue::Conf { state, tags } => self.conf(*state, tags),
            ReductionValue::Init => self.init(),
            ReductionValue::Error => self.err(),
        }
    }

    pub fn decode(&self, v: ValueId) -> ReductionValue {
        let i = v.index();
        let confs = self.machine.states().len() * self.confs_per_state;
        if i < 4 {
            ReductionValue::Rm(RmTag::ALL[i])
        } else if i < 4 + confs {
            let state = (i - 4) / self.confs_per_state;
            let mut rest = (i - 4) % self.confs_per_state;
            let mut tags = vec![RmTag::Eq0; self.machine.counters()];
            for slot in tags.iter_mut().rev() {
                *slot = RmTag::ALL[rest % 4];
                rest /= 4;
            }
            ReductionValue::Conf { state, tags }
        } else if i == 4 + confs {
            ReductionValue::Init
        } else {
            ReductionValue::Error
        }
    }

    fn value_label(&self, v: &ReductionValue) -> String {
        match v {
            ReductionValue::Rm(t) => format!("r_{}", t.name()),
            ReductionValue::Conf { state, tags } => {
                let mut s = format!("conf_{}", self.machine.state_name(*state));
                for t in tags {
                    s.push('_');
                    s.push_str(t.name());
                }
                s
            }
            ReductionValue::Init => "init".into(),
            ReductionValue::Error => "err".into(),
        }
    }

    pub fn step_formula(&self, state: usize, prev: Formula, counters: &[u64]) -> Formula {
        let mut children = vec![prev];
        children.extend(counters.iter().map(|&c| enc(c)));
        Formula::app(&step_name(self.machine.state_name(state)), children)
    }

    /// The sequence formula of a list of configurations.
    pub fn seq(&self, configs: &[Configuration]) -> Formula {
        configs.iter().fold(Formula::constant("eps"), |prev, c| {
            self.step_formula(c.state, prev, &c.counters)
        })
    }

    /// Inverse of [`seq`](Self::seq); `None` when φ does not encode a
    /// sequence of configurations.
    pub fn decode_seq(&self, f: &Formula) -> Option<Vec<Configuration>> {
        let mut configs = Vec::new();
        let mut cur = f;
        loop {
            if cur.is_var() {
                return None;
            }
            if cur.head() == "eps" {
                configs.reverse();
                return Some(configs);
            }
            let state = cur.head().strip_prefix("step_").and_then(|q| self.machine.state_index(q))?;
            let children = cur.children();
            if children.len() != self.machine.counters() + 1 {
                return None;
            }
            let counters = children[1..].iter().map(as_enc).collect::<Option<Vec<u64>>>()?;
            configs.push(Configuration { state, counters });
            cur = &children[0];
        }
    }

    fn step_value(&self, state: usize, x: ValueId, z: &[ValueId]) -> ValueId {
        let interp = self
            .nmatrix
            .interpretation(&step_name(self.machine.state_name(state)))
            .expect("step connective");
        let mut args = vec![x];
        args.extend_from_slice(z);
        interp.cell(&args).as_singleton().expect("step cells are singletons")
    }

    /// Value of a closed formula under a named valuation. Variables and
    /// anything outside the signature land on `err`.
    pub fn eval_named(&self, val: NamedValuation, f: &Formula) -> ValueId {
        if let Some(j) = as_enc(f) {
            return self.rm(val.enc_tag(j));
        }
        if f.is_var() {
            return self.err();
        }
        match f.head() {
            "eps" if f.children().is_empty() => self.init(),
            head => {
                let state = head.strip_prefix("step_").and_then(|q| self.machine.state_index(q));
                match state {
                    Some(q) if f.children().len() == self.machine.counters() + 1 => {
                        let x = self.eval_named(val, &f.children()[0]);
                        let z: Vec<ValueId> =
                            f.children()[1..].iter().map(|c| self.eval_named(val, c)).collect();
                        self.step_value(q, x, &z)
                    }
                    _ => self.err(),
                }
            }
        }
    }

    /// The named valuations worth trying on φ, in search order.
    pub fn candidate_valuations(&self, f: &Formula) -> Vec<NamedValuation> {
        let largest = max_enc(f).unwrap_or(0);
        std::iter::once(NamedValuation::V0Eq)
            .chain((0..=largest + 2).map(NamedValuation::VK))
            .collect()
    }

    /// Every candidate valuation that does not designate φ.
    pub fn refuters(&self, f: &Formula) -> Vec<(NamedValuation, ValueId)> {
        self.candidate_valuations(f)
            .into_iter()
            .map(|v| (v, self.eval_named(v, f)))
            .filter(|&(_, x)| !self.nmatrix.is_designated(x))
            .collect()
    }

    /// The first candidate valuation that does not designate φ.
    pub fn falsify(&self, f: &Formula) -> Option<(NamedValuation, ValueId)> {
        self.candidate_valuations(f)
            .into_iter()
            .map(|v| (v, self.eval_named(v, f)))
            .find(|&(_, x)| !self.nmatrix.is_designated(x))
    }

    /// All theorems among closed formulas with at most `max_distinct`
    /// distinct subformulas.
    ///
    /// A formula sent to `err` by a named valuation is dropped along with
    /// its superterms, since `err` is infectious; the rest are decided
    /// exactly.
    pub fn closed_theorems(&self, max_distinct: usize) -> Result<(Vec<Formula>, EnumerationStats), ReductionError> {
        let family: Vec<NamedValuation> = std::iter::once(NamedValuation::V0Eq)
            .chain((0..=max_distinct as u64 + 1).map(NamedValuation::VK))
            .collect();
        let err = self.err();
        let mut theorems = Vec::new();
        let mut failure = None;
        let stats = enumerate_terms(self.signature(), &[], max_distinct, |f, kids: &[&Vec<ValueId>], _| {
            if failure.is_some() {
                return None;
            }
            let values: Vec<ValueId> = family
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if let Some(j) = as_enc(f) {
                        return self.rm(v.enc_tag(j));
                    }
                    match f.head() {
                        "eps" => self.init(),
                        "suc" => err,
                        head => {
                            let q = self
                                .machine
                                .state_index(head.strip_prefix("step_").expect("step connective"))
                                .expect("machine state");
                            let z: Vec<ValueId> = kids[1..].iter().map(|k| k[i]).collect();
                            self.step_value(q, kids[0][i], &z)
                        }
                    }
                })
                .collect();
            if values.contains(&err) {
                return None;
            }
            if values.iter().all(|&x| self.nmatrix.is_designated(x)) {
                match is_theorem(&self.nmatrix, f) {
                    Ok(true) => theorems.push(f.clone()),
                    Ok(false) => {}
                    Err(e) => failure = Some(e),
                }
            }
            Some(values)
        });
        match failure {
            Some(e) => Err(e.into()),
            None => Ok((theorems, stats)),
        }
    }

    /// Value of `step_{to.state}(conf_{from.state, v(enc(from))}, v(enc(to)))`.
    pub fn transition_value(&self, val: NamedValuation, from: &Configuration, to: &Configuration) -> ValueId {
        let y: Vec<RmTag> = from.counters.iter().map(|&c| val.enc_tag(c)).collect();
        let z: Vec<ValueId> = to.counters.iter().map(|&c| self.rm(val.enc_tag(c))).collect();
        self.step_value(to.state, self.conf(from.state, &y), &z)
    }

    /// A valuation under which the step from `from` to `to` evaluates to
    /// `err`, chosen by case analysis on the transition of `from`. `None`
    /// when `from` is halting or `to` is its actual successor.
    pub fn refuting_valuation(&self, from: &Configuration, to: &Configuration) -> Option<NamedValuation> {
        let instr = self.machine.delta(from.state)?;
        if self.machine.nxt(from).ok()? == *to {
            return None;
        }
        let i = instr.counter() - 1;
        let (y, z) = (&from.counters, &to.counters);
        if let Some(j) = (0..y.len()).find(|&j| j != i && y[j] != z[j]) {
            return Some(mu_select(MuKind::Neq, y[j], z[j]));
        }
        Some(match instr {
            Instruction::Inc { next, .. } if next != to.state => NamedValuation::V0Eq,
            Instruction::Inc { .. } => mu_select(MuKind::Plus, y[i], z[i]),
            Instruction::Test { .. } if y[i] == 0 => mu_select(MuKind::Eq, y[i], z[i]),
            Instruction::Test { .. } => mu_select(MuKind::Minus, y[i], z[i]),
        })
    }
}

/// Largest `k` with `enc(k)` a subformula of φ.
pub fn max_enc(f: &Formula) -> Option<u64> {
    if let Some(k) = as_enc(f) {
        return Some(k);
    }
    f.children().iter().filter_map(max_enc).max()
}

fn tag_tuples(n: usize) -> Vec<Vec<RmTag>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<RmTag>| {
                RmTag::ALL.into_iter().map(move |r| {
                    let mut t = t.clone();
                    t.push(r);
                    t
                })
            })
            .collect();
    }
    out
}

/// Whether `step_q(conf_{q', y⃗}, z⃗)` is a configuration, given `δ(q') = instr`.
fn step_allows(instr: Instruction, q: usize, y: &[RmTag], z: &[RmTag]) -> bool {
    let i = instr.counter() - 1;
    let others_equal = (0..y.len()).all(|j| j == i || y[j] == z[j]);
    match instr {
        Instruction::Test {
            on_zero, on_nonzero, ..
        } => {
            (on_zero == q && y[i].is_zero_reading() && y == z)
                || (on_nonzero == q && z[i].suc().contains(&y[i]) && others_equal)
        }
        Instruction::Inc { next, .. } => next == q && y[i].suc().contains(&z[i]) && others_equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{infectious_values, is_theorem};

    const ONE: &str = "\
counters 1
states qinit q1 q2 q3
init qinit
qinit inc 1 q1
q1 test 1 q3 q2
q2 test 1 q3 q3
";

    fn one() -> MachineNmatrix {
        MachineNmatrix::new(CounterMachine::parse(ONE).unwrap()).unwrap()
    }

    #[test]
    fn layout_and_names() {
        let mc = one();
        let m = mc.nmatrix();
        assert_eq!(m.value_count(), 22);
        assert_eq!(m.signature().len(), 7);
        assert_eq!(m.signature().arity("step_q1"), Some(2));
        assert_eq!(&m.value_names()[..5], ["r_eq0", "r_ge0", "r_ge1", "r_ge2", "conf_qinit_eq0"]);
        assert_eq!(m.value_name(mc.init()), "init");
        assert_eq!(m.value_name(mc.err()), "err");
        for i in 0..m.value_count() {
            let v = ValueId::new(i);
            assert_eq!(mc.encode(&mc.decode(v)), v);
        }
        let designated: Vec<&str> = m.designated().iter().map(|v| m.value_name(v)).collect();
        assert_eq!(designated, ["conf_q3_eq0", "conf_q3_ge0", "conf_q3_ge1", "conf_q3_ge2"]);
        assert_eq!(infectious_values(m), ValueSet::singleton(22, mc.err()));
    }

    #[test]
    fn reserved_state_names() {
        let bad = CounterMachine::parse("counters 1\nstates suc\ninit suc\n").unwrap();
        assert_eq!(build_sigma(&bad), Err(ReductionError::ReservedStateName("suc".into())));
        let single = CounterMachine::parse("counters 1\nstates h\ninit h\n").unwrap();
        assert_eq!(build_sigma(&single).unwrap().len(), 4);
    }

    #[test]
    fn tables() {
        let mc = one();
        let m = mc.nmatrix();
        let v = |n: &str| m.value(n).unwrap();
        let suc = m.interpretation("suc").unwrap();
        assert_eq!(suc.cell(&[v("r_eq0")]).iter().collect::<Vec<_>>(), [v("r_ge1")]);
        assert_eq!(suc.cell(&[v("r_ge1")]), suc.cell(&[v("r_ge2")]));
        assert_eq!(suc.cell(&[v("conf_q1_ge0")]).as_singleton(), Some(mc.err()));
        let step = m.interpretation("step_qinit").unwrap();
        assert_eq!(step.cell(&[v("init"), v("r_ge1")]).as_singleton(), Some(mc.err()));
        assert_eq!(step.cell(&[v("init"), v("r_ge0")]).as_singleton(), Some(v("conf_qinit_ge0")));
    }

    #[test]
    fn encoders() {
        let mc = one();
        assert_eq!(enc(0).to_string(), "zero");
        let t = mc.machine().run(10).unwrap();
        let phi1 = mc.seq(&t.configs[..2]);
        assert_eq!(phi1.to_string(), "step_q1(step_qinit(eps,zero),suc(zero))");
        assert_eq!(mc.decode_seq(&mc.seq(&t.configs)), Some(t.configs.clone()));
        let bogus = Formula::app("suc", vec![Formula::constant("eps")]);
        assert_eq!(mc.decode_seq(&bogus), None);
        assert_eq!(mc.decode_seq(&Formula::constant("eps")), Some(vec![]));
    }

    #[test]
    fn named_valuations() {
        let mc = one();
        let m = mc.nmatrix();
        let name = |v| m.value_name(v).to_string();
        assert_eq!(name(mc.eval_named(NamedValuation::V0Eq, &enc(1))), "r_ge1");
        assert_eq!(name(mc.eval_named(NamedValuation::V0Eq, &enc(5))), "r_ge2");
        assert_eq!(name(mc.eval_named(NamedValuation::V0Eq, &Formula::constant("eps"))), "init");
        for k in 0..4 {
            assert_eq!(name(mc.eval_named(NamedValuation::VK(k), &enc(k))), "r_ge0");
            assert_eq!(name(mc.eval_named(NamedValuation::VK(k), &enc(k + 1))), "r_ge1");
        }
    }

    #[test]
    fn mu_tables() {
        use NamedValuation::{V0Eq, VK};
        assert_eq!(mu_select(MuKind::Plus, 0, 2), VK(0));
        assert_eq!(mu_select(MuKind::Plus, 0, 0), V0Eq);
        assert_eq!(mu_select(MuKind::Plus, 3, 1), VK(2));
        assert_eq!(mu_select(MuKind::Minus, 2, 0), VK(0));
        assert_eq!(mu_select(MuKind::Minus, 2, 1), VK(1));
        assert_eq!(mu_select(MuKind::Minus, 0, 5), V0Eq);
        for k in 1..5 {
            assert_eq!(mu_select(MuKind::Neq, k, k + 1), VK(k - 1));
        }
        assert_eq!(mu_select(MuKind::Neq, 0, 3), V0Eq);
        assert_eq!(mu_select(MuKind::Eq, 4, 1), V0Eq);
    }

    #[test]
    fn computation_is_the_theorem() {
        let mc = one();
        let t = mc.machine().run(10).unwrap();
        let phi3 = mc.seq(&t.configs);
        assert!(is_theorem(mc.nmatrix(), &phi3).unwrap());
        assert_eq!(mc.falsify(&phi3), None);
        for j in 1..4 {
            let prefix = mc.seq(&t.configs[..j]);
            assert!(!is_theorem(mc.nmatrix(), &prefix).unwrap());
            assert_eq!(mc.refuters(&prefix).len(), mc.candidate_valuations(&prefix).len());
        }
        let (theorems, _) = mc.closed_theorems(9).unwrap();
        assert_eq!(theorems, [phi3]);
    }
}
