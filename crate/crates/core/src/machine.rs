//! Deterministic counter machines with increment and test-and-decrement.

use crate::formula::is_ident;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("`{0}` is not a valid state name")]
    BadStateName(String),
    #[error("state `{0}` has two transitions")]
    DuplicateTransition(String),
    #[error("counter {counter} out of range 1..={counters}")]
    CounterOutOfRange { counter: usize, counters: usize },
    #[error("a machine needs at least one counter")]
    NoCounters,
    #[error("a machine needs at least one state")]
    NoStates,
    #[error("configuration has {found} counters, machine has {expected}")]
    WrongWidth { expected: usize, found: usize },
    #[error("state `{0}` is halting; nxt is undefined")]
    Halting(String),
    #[error("max_steps must be at least 1")]
    ZeroSteps,
}

/// A transition. Counters are numbered from 1, states are indices into
/// the machine's state list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    Inc {
        counter: usize,
        next: usize,
    },
    Test {
        counter: usize,
        on_zero: usize,
        on_nonzero: usize,
    },
}

impl Instruction {
    pub fn counter(&self) -> usize {
        match *self {
            Instruction::Inc { counter, .. } | Instruction::Test { counter, .. } => counter,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: usize,
    pub counters: Vec<u64>,
}

impl Configuration {
    pub fn new(state: usize, counters: Vec<u64>) -> Self {
        Configuration { state, counters }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    Halted,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub configs: Vec<Configuration>,
    pub terminal: Terminal,
}

impl Trace {
    pub fn halted(&self) -> bool {
        self.terminal == Terminal::Halted
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    counters: usize,
    states: Vec<String>,
    index: HashMap<String, usize>,
    init: usize,
    delta: Vec<Option<Instruction>>,
}

impl CounterMachine {
    /// Build a machine from named states. States missing from `transitions`
    /// are halting.
    pub fn new<S: AsRef<str>>(
        counters: usize,
        states: &[S],
        init: &str,
        transitions: &[(&str, Instruction)],
    ) -> Result<Self, MachineError> {
        let mut m = Self::skeleton(counters, states)?;
        m.init = m.require(init)?;
        for &(state, instr) in transitions {
            m.set(state, instr)?;
        }
        Ok(m)
    }

    fn skeleton<S: AsRef<str>>(counters: usize, states: &[S]) -> Result<Self, MachineError> {
        if counters == 0 {
            return Err(MachineError::NoCounters);
        }
        if states.is_empty() {
            return Err(MachineError::NoStates);
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            let s = s.as_ref();
            if !is_ident(s) {
                return Err(MachineError::BadStateName(s.to_string()));
            }
            if index.insert(s.to_string(), i).is_some() {
                return Err(MachineError::DuplicateState(s.to_string()));
            }
        }
        Ok(CounterMachine {
            counters,
            states: states.iter().map(|s| s.as_ref().to_string()).collect(),
            index,
            init: 0,
            delta: vec![None; states.len()],
        })
    }

    fn require(&self, name: &str) -> Result<usize, MachineError> {
        self.state_index(name)
            .ok_or_else(|| MachineError::UnknownState(name.to_string()))
    }

    fn set(&mut self, state: &str, instr: Instruction) -> Result<(), MachineError> {
        let q = self.require(state)?;
        let counter = instr.counter();
        if counter == 0 || counter > self.counters {
            return Err(MachineError::CounterOutOfRange {
                counter,
                counters: self.counters,
            });
        }
        let targets = match instr {
            Instruction::Inc { next, .. } => vec![next],
            Instruction::Test { on_zero, on_nonzero, .. } => vec![on_zero, on_nonzero],
        };
        if let Some(&bad) = targets.iter().find(|&&t| t >= self.states.len()) {
            return Err(MachineError::UnknownState(format!("#{bad}")));
        }
        if self.delta[q].is_some() {
            return Err(MachineError::DuplicateTransition(state.to_string()));
        }
        self.delta[q] = Some(instr);
        Ok(())
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn delta(&self, q: usize) -> Option<Instruction> {
        self.delta[q]
    }

    pub fn is_halting(&self, q: usize) -> bool {
        self.delta[q].is_none()
    }

    pub fn halting_states(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.is_halting(q)).collect()
    }

    pub fn initial(&self) -> Configuration {
        Configuration::new(self.init, vec![0; self.counters])
    }

    /// Configuration from a state name, for tests and fixtures.
    pub fn config(&self, state: &str, counters: &[u64]) -> Result<Configuration, MachineError> {
        if counters.len() != self.counters {
            return Err(MachineError::WrongWidth {
                expected: self.counters,
                found: counters.len(),
            });
        }
        Ok(Configuration::new(self.require(state)?, counters.to_vec()))
    }

    pub fn format_config(&self, c: &Configuration) -> String {
        let mut out = format!("({}", self.states[c.state]);
        for x in &c.counters {
            let _ = write!(out, ",{x}");
        }
        out.push(')');
        out
    }

    pub fn nxt(&self, c: &Configuration) -> Result<Configuration, MachineError> {
        if c.counters.len() != self.counters {
            return Err(MachineError::WrongWidth {
                expected: self.counters,
                found: c.counters.len(),
            });
        }
        let instr = self.delta[c.state]
            .ok_or_else(|| MachineError::Halting(self.states[c.state].clone()))?;
        let mut counters = c.counters.clone();
        let state = match instr {
            Instruction::Inc { counter, next } => {
                counters[counter - 1] += 1;
                next
            }
            Instruction::Test {
                counter,
                on_zero,
                on_nonzero,
            } => {
                if counters[counter - 1] == 0 {
                    on_zero
                } else {
                    counters[counter - 1] -= 1;
                    on_nonzero
                }
            }
        };
        Ok(Configuration { state, counters })
    }

    /// Iterate `nxt` from the initial configuration, at most `max_steps` times.
    pub fn run(&self, max_steps: usize) -> Result<Trace, MachineError> {
        if max_steps == 0 {
            return Err(MachineError::ZeroSteps);
        }
        let mut configs = vec![self.initial()];
        loop {
            let last = configs.last().expect("nonempty");
            if self.is_halting(last.state) {
                return Ok(Trace {
                    configs,
                    terminal: Terminal::Halted,
                });
            }
            if configs.len() > max_steps {
                return Ok(Trace {
                    configs,
                    terminal: Terminal::BudgetExhausted,
                });
            }
            let next = self.nxt(last)?;
            configs.push(next);
        }
    }

    /// Parse the machine text format.
    pub fn parse(text: &str) -> Result<Self, MachineError> {
        let err = |line: usize, message: String| MachineError::Parse { line, message };
        let mut counters = None;
        let mut states: Option<Vec<String>> = None;
        let mut init = None;
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let tokens: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            let Some(&head) = tokens.first() else {
                continue;
            };
            let number = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(line, format!("expected a counter number, found `{t}`")))
            };
            match head {
                "counters" => {
                    if tokens.len() != 2 {
                        return Err(err(line, "usage: counters <n>".into()));
                    }
                    if counters.is_some() {
                        return Err(err(line, "`counters` given twice".into()));
                    }
                    counters = Some(number(tokens[1])?);
                }
                "states" => {
                    if states.is_some() {
                        return Err(err(line, "`states` given twice".into()));
                    }
                    states = Some(tokens[1..].iter().map(|s| s.to_string()).collect());
                }
                "init" => {
                    if tokens.len() != 2 {
                        return Err(err(line, "usage: init <state>".into()));
                    }
                    if init.is_some() {
                        return Err(err(line, "`init` given twice".into()));
                    }
                    init = Some((line, tokens[1].to_string()));
                }
                _ => pending.push((line, tokens.iter().map(|s| s.to_string()).collect::<Vec<_>>())),
            }
        }
        let n = counters.ok_or_else(|| err(0, "missing `counters` line".into()))?;
        let names = states.ok_or_else(|| err(0, "missing `states` line".into()))?;
        let (init_line, init_name) = init.ok_or_else(|| err(0, "missing `init` line".into()))?;
        let mut machine = Self::skeleton(n, &names).map_err(|e| err(0, e.to_string()))?;
        let m = &mut machine;
        m.init = m.require(&init_name).map_err(|e| err(init_line, e.to_string()))?;
        for (line, tokens) in pending {
            let at = |e: MachineError| err(line, e.to_string());
            let state = |name: &str, m: &CounterMachine| m.require(name).map_err(at);
            let counter = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(line, format!("expected a counter number, found `{t}`")))
            };
            let instr = match tokens.get(1).map(String::as_str) {
                Some("inc") if tokens.len() == 4 => Instruction::Inc {
                    counter: counter(&tokens[2])?,
                    next: state(&tokens[3], m)?,
                },
                Some("test") if tokens.len() == 5 => Instruction::Test {
                    counter: counter(&tokens[2])?,
                    on_zero: state(&tokens[3], m)?,
                    on_nonzero: state(&tokens[4], m)?,
                },
                _ => {
                    return Err(err(
                        line,
                        "expected `<state> inc <i> <next>` or `<state> test <i> <zero> <nonzero>`".into(),
                    ))
                }
            };
            m.set(&tokens[0], instr).map_err(at)?;
        }
        Ok(machine)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "counters {}\nstates {}\ninit {}\n",
            self.counters,
            self.states.join(" "),
            self.states[self.init]
        );
        for (q, instr) in self.delta.iter().enumerate() {
            let name = &self.states[q];
            match instr {
                Some(Instruction::Inc { counter, next }) => {
                    let _ = writeln!(out, "{name} inc {counter} {}", self.states[*next]);
                }
                Some(Instruction::Test {
                    counter,
                    on_zero,
                    on_nonzero,
                }) => {
                    let _ = writeln!(
                        out,
                        "{name} test {counter} {} {}",
                        self.states[*on_zero], self.states[*on_nonzero]
                    );
                }
                None => {}
            }
        }
        out
    }
}
