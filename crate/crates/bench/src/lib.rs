//! Fixtures shared by the benchmarks.

use nmlab::{CounterMachine, Nmatrix};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn nmatrix(name: &str) -> Nmatrix {
    Nmatrix::parse(&fixture(name)).expect("fixture Nmatrix")
}

pub fn machine(name: &str) -> CounterMachine {
    CounterMachine::parse(&fixture(name)).expect("fixture machine")
}
