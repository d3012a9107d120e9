//! Finite non-deterministic logical matrices (Nmatrices).
//!
//! The crate evaluates the multi-functions formulas express, decides
//! monadicity for deterministic matrices by unary clone generation, searches
//! for monadic separators in Nmatrices under a formula budget, simulates
//! deterministic counter machines, and implements two constructions: a counter
//! machine `C` compiles to an Nmatrix `M_C` whose only possible theorem encodes
//! the halting computation of `C`, and any Nmatrix `M` with an infectious
//! non-designated value extends to `M_m`, which is monadic exactly when `M`
//! has a theorem.

pub mod enumerate;
pub mod formula;
pub mod machine;
pub mod monadicity;
pub mod monadify;
pub mod nmatrix;
pub mod reduction;
pub mod semantics;
pub mod values;

pub use enumerate::{enumerate_terms, EnumerationStats, TermPool};
pub use formula::{format_formula, parse_formula, subformula_dag, Formula, FormulaError, Signature, SubformulaDag};
pub use machine::{Configuration, CounterMachine, Instruction, MachineError, Terminal, Trace};
pub use monadicity::{
    decide_monadicity_matrix, search_separators, unary_clone, verify_separator_set, Coverage, MonadicityError,
    SearchOptions, SeparatorReport, UnaryClone, Verdict,
};
pub use monadify::{
    build_monadify, certify_unseparated, has_monadify_preconditions, compile_monadicity_instance,
    witness_separators_from_theorem, MonadifyError, UnseparatedReport,
};
pub use nmatrix::{Nmatrix, NmatrixError};
pub use reduction::{MachineNmatrix, MuKind, NamedValuation, ReductionError, ReductionValue, RmTag};
pub use semantics::{
    check_consequence, expressed_multifunction, is_theorem, separates, MultiFunction, SemanticsError,
};
pub use values::{ValueId, ValueSet};
