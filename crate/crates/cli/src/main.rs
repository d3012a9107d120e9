mod report;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nmlab::monadicity::value_pairs;
use nmlab::semantics::{check_consequence, DEFAULT_ASSIGNMENT_CAP};
use nmlab::{
    build_monadify, certify_unseparated, decide_monadicity_matrix, expressed_multifunction, is_theorem,
    parse_formula, search_separators, unary_clone, verify_separator_set, witness_separators_from_theorem,
    CounterMachine, Formula, MachineNmatrix, Nmatrix, SearchOptions, SeparatorReport, Terminal,
};
use report::Report;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "nmlab", version, about = "Non-deterministic matrices, counter machines and monadicity")]
struct Cli {
    /// Emit one JSON document instead of key: value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Nmatrix file.
    #[arg(long, visible_alias = "matrix", conflicts_with = "machine")]
    nmatrix: Option<PathBuf>,
    /// Counter machine file; its compiled Nmatrix is used.
    #[arg(long)]
    machine: Option<PathBuf>,
    /// Apply the monadic extension to the Nmatrix first.
    #[arg(long)]
    monadified: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-function expressed by a formula.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        formula: String,
    },
    /// Whether every valuation designates a formula.
    Theorem {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        formula: String,
    },
    /// Whether premises entail a conclusion.
    Consequence {
        #[command(flatten)]
        source: Source,
        #[arg(long = "premise")]
        premises: Vec<String>,
        #[arg(long)]
        conclusion: String,
    },
    /// Unary clone of a deterministic matrix.
    Clone {
        #[command(flatten)]
        source: Source,
    },
    /// Decide or search for monadic separators.
    Monadic {
        #[command(flatten)]
        source: Source,
        /// Search formulas up to this many nodes; deterministic matrices are
        /// decided exactly when omitted.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run a counter machine from the all-zero configuration.
    RunMachine {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Compile a counter machine to its Nmatrix.
    Compile {
        #[arg(long)]
        machine: PathBuf,
        /// Write the Nmatrix here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Build in memory and only report sizes.
        #[arg(long)]
        lazy: bool,
    },
    /// Extend an Nmatrix with the fresh value and the f_a connectives.
    Monadify {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        lazy: bool,
        /// Check that no monadic formula with at most N distinct
        /// subformulas separates --target from another base value.
        #[arg(long, value_name = "N")]
        unseparated: Option<usize>,
        #[arg(long, default_value = "err")]
        target: String,
    },
    /// Sequence formula of a machine's computation.
    EncodeTrace {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Encode only the first K configurations.
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Refute a closed formula with a named valuation of a machine's Nmatrix.
    Falsify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Check a set of monadic separators.
    VerifySeparators {
        #[command(flatten)]
        source: Source,
        #[arg(long = "separator")]
        separators: Vec<String>,
        /// Use p and f_a(p, THEOREM) for every base value, on the monadified
        /// Nmatrix.
        #[arg(long)]
        theorem: Option<String>,
        /// With --machine and no --theorem, use the encoded halting run.
        #[arg(long)]
        from_run: bool,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_machine(path: &Path) -> Result<CounterMachine> {
    CounterMachine::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_nmatrix(path: &Path) -> Result<Nmatrix> {
    Nmatrix::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// The base Nmatrix named by a source, before any extension.
fn base_matrix(source: &Source) -> Result<(Nmatrix, Option<MachineNmatrix>)> {
    match (&source.nmatrix, &source.machine) {
        (Some(p), _) => Ok((load_nmatrix(p)?, None)),
        (None, Some(p)) => {
            let mc = MachineNmatrix::new(load_machine(p)?)?;
            Ok((mc.nmatrix().clone(), Some(mc)))
        }
        (None, None) => bail!("one of --nmatrix or --machine is required"),
    }
}

fn matrix(source: &Source) -> Result<Nmatrix> {
    let (m, _) = base_matrix(source)?;
    if source.monadified {
        return Ok(build_monadify(&m)?);
    }
    Ok(m)
}

fn formula(text: &str, m: &Nmatrix) -> Result<Formula> {
    parse_formula(text, m.signature()).with_context(|| format!("parsing formula `{text}`"))
}

fn pair(m: &Nmatrix, (a, b): (nmlab::ValueId, nmlab::ValueId)) -> String {
    format!("{} {}", m.value_name(a), m.value_name(b))
}

fn separator_report(r: &mut Report, m: &Nmatrix, rep: &SeparatorReport) {
    if let Some(b) = rep.budget {
        r.field("budget", b);
    }
    r.field("formulas_enumerated", rep.formulas_enumerated);
    r.field("pairs", value_pairs(m).len());
    r.list(
        "witness",
        rep.witnesses.iter().map(|(&p, f)| format!("{} : {f}", pair(m, p))),
    );
    r.list("uncovered", rep.uncovered.iter().map(|&p| pair(m, p)));
    r.verdict(rep.verdict);
}

fn emit(text: &str, output: &Option<PathBuf>, lazy: bool, r: &mut Report) -> Result<Option<String>> {
    if lazy {
        r.field("emitted", "none");
        return Ok(None);
    }
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            r.field("output", path.display());
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

fn sizes(r: &mut Report, m: &Nmatrix) {
    r.field("values", m.value_count());
    r.field("designated", m.designated().len());
    r.field("connectives", m.signature().len());
}

/// Runs a command; `Some(text)` replaces the report on standard output.
fn run(command: Command) -> Result<(Report, Option<String>)> {
    let mut replacement = None;
    let r = match command {
        Command::Eval { source, formula: text } => {
            let m = matrix(&source)?;
            let f = formula(&text, &m)?;
            let mf = expressed_multifunction(&m, &f)?;
            let mut r = Report::new("eval");
            r.field("formula", &f);
            r.list("variable", mf.variables().iter().map(|v| v.to_string()));
            r.list("image", mf.render(&m).lines().map(str::to_string));
            r.field("pointwise_singleton", mf.is_pointwise_singleton());
            r.verdict("EVALUATED");
            r
        }
        Command::Theorem { source, formula: text } => {
            let m = matrix(&source)?;
            let f = formula(&text, &m)?;
            let mut r = Report::new("theorem");
            r.field("formula", &f);
            r.verdict(is_theorem(&m, &f)?);
            r
        }
        Command::Consequence {
            source,
            premises,
            conclusion,
        } => {
            let m = matrix(&source)?;
            let gamma = premises.iter().map(|p| formula(p, &m)).collect::<Result<Vec<_>>>()?;
            let phi = formula(&conclusion, &m)?;
            let cap = match std::env::var("NMLAB_CAP") {
                Ok(v) => v.parse::<u64>().with_context(|| format!("NMLAB_CAP=`{v}`"))?,
                Err(_) => DEFAULT_ASSIGNMENT_CAP,
            };
            let result = check_consequence(&m, &gamma, &phi, cap)?;
            let mut r = Report::new("consequence");
            r.list("premise", &gamma);
            r.field("conclusion", &phi);
            r.field("cap", cap);
            if let Some(cx) = &result.counterexample {
                r.list(
                    "counterexample",
                    cx.values.iter().map(|(f, v)| format!("{f} = {}", m.value_name(*v))),
                );
            }
            r.verdict(result.holds);
            r
        }
        Command::Clone { source } => {
            let m = matrix(&source)?;
            let clone = unary_clone(&m)?;
            let mut r = Report::new("clone");
            r.field("rounds", clone.rounds());
            r.list(
                "function",
                clone.iter().map(|(f, w)| {
                    let names: Vec<&str> = f.iter().map(|&v| m.value_name(v)).collect();
                    format!("({}) : {w}", names.join(","))
                }),
            );
            let decided = decide_monadicity_matrix(&m)?;
            r.list("uncovered", decided.uncovered.iter().map(|&p| pair(&m, p)));
            r.verdict(decided.verdict);
            r
        }
        Command::Monadic {
            source,
            budget,
            no_prune,
            jobs,
        } => {
            let m = matrix(&source)?;
            let mut r = Report::new("monadic");
            let rep = match budget {
                None if m.is_deterministic() => {
                    r.field("method", "clone");
                    decide_monadicity_matrix(&m)?
                }
                _ => {
                    let mut opts = SearchOptions::new(budget.unwrap_or(6));
                    opts.prune = !no_prune;
                    opts.jobs = jobs.max(1);
                    r.field("method", "search");
                    r.field("prune", opts.prune);
                    search_separators(&m, opts)?
                }
            };
            separator_report(&mut r, &m, &rep);
            r
        }
        Command::RunMachine { machine, max_steps } => {
            let c = load_machine(&machine)?;
            let trace = c.run(max_steps)?;
            let mut r = Report::new("run-machine");
            r.field("max_steps", max_steps);
            r.field("configurations", trace.len());
            let shown = trace.configs.iter().take(64).map(|x| c.format_config(x));
            r.list("trace", shown);
            r.field("last", c.format_config(trace.configs.last().expect("initial configuration")));
            match trace.terminal {
                Terminal::Halted => r.field("terminal", "halted").verdict("HALTED"),
                Terminal::BudgetExhausted => r.field("terminal", "budget_exhausted").verdict("UNKNOWN"),
            };
            r
        }
        Command::Compile { machine, output, lazy } => {
            let mc = MachineNmatrix::new(load_machine(&machine)?)?;
            let mut r = Report::new("compile");
            sizes(&mut r, mc.nmatrix());
            let text = if lazy { String::new() } else { mc.nmatrix().to_text() };
            replacement = emit(&text, &output, lazy, &mut r)?;
            r.verdict("COMPILED");
            r
        }
        Command::Monadify {
            source,
            output,
            lazy,
            unseparated,
            target,
        } => {
            let (base, _) = base_matrix(&source)?;
            let mm = build_monadify(&base)?;
            let mut r = Report::new("monadify");
            r.field("preconditions", nmlab::has_monadify_preconditions(&base));
            sizes(&mut r, &mm);
            match unseparated {
                Some(n) => {
                    let t = base.value(&target).with_context(|| format!("no value `{target}`"))?;
                    let cert = certify_unseparated(&base, t, n)?;
                    r.field("target", &target);
                    r.field("max_distinct", n);
                    r.field("base_closed", cert.base_closed);
                    r.field("fresh_absorbing", cert.fresh_absorbing);
                    r.field("base_terms", cert.base_terms);
                    r.field("f_terms", cert.f_terms);
                    r.list("escape", cert.escapes.iter().take(20));
                    r.verdict(if cert.holds() { "UNSEPARATED" } else { "UNKNOWN" });
                }
                None => {
                    let text = if lazy { String::new() } else { mm.to_text() };
                    replacement = emit(&text, &output, lazy, &mut r)?;
                    r.verdict("MONADIFIED");
                }
            }
            r
        }
        Command::EncodeTrace {
            machine,
            max_steps,
            prefix,
        } => {
            let mc = MachineNmatrix::new(load_machine(&machine)?)?;
            let trace = mc.machine().run(max_steps)?;
            let k = prefix.unwrap_or(trace.len()).min(trace.len());
            let configs = &trace.configs[..k];
            let mut r = Report::new("encode-trace");
            r.field("configurations", k);
            r.field("halted", trace.halted() && k == trace.len());
            r.list("trace", configs.iter().map(|x| mc.machine().format_config(x)));
            r.field("formula", mc.seq(configs));
            r.verdict("ENCODED");
            r
        }
        Command::Falsify { machine, formula: text } => {
            let mc = MachineNmatrix::new(load_machine(&machine)?)?;
            let f = formula(&text, mc.nmatrix())?;
            if !f.is_closed() {
                bail!("`{f}` is not closed");
            }
            let mut r = Report::new("falsify");
            r.field("formula", &f);
            r.list(
                "refuter",
                mc.refuters(&f)
                    .iter()
                    .map(|&(v, x)| format!("{v} = {}", mc.nmatrix().value_name(x))),
            );
            match mc.falsify(&f) {
                Some((v, x)) => {
                    r.field("valuation", v);
                    r.field("value", mc.nmatrix().value_name(x));
                    r.verdict("FALSIFIED");
                }
                None => {
                    r.verdict("THEOREM");
                }
            }
            r
        }
        Command::VerifySeparators {
            source,
            separators,
            theorem,
            from_run,
            max_steps,
        } => {
            let (base, mc) = base_matrix(&source)?;
            let mut r = Report::new("verify-separators");
            let (m, seps) = if theorem.is_some() || from_run {
                let phi = match (&theorem, &mc) {
                    (Some(t), _) => formula(t, &base)?,
                    (None, Some(mc)) => {
                        let trace = mc.machine().run(max_steps)?;
                        if !trace.halted() {
                            bail!("machine does not halt within {max_steps} steps");
                        }
                        mc.seq(&trace.configs)
                    }
                    (None, None) => bail!("--from-run needs --machine"),
                };
                r.field("theorem", &phi);
                (build_monadify(&base)?, witness_separators_from_theorem(&base, &phi)?)
            } else {
                let m = if source.monadified { build_monadify(&base)? } else { base };
                let seps = separators.iter().map(|s| formula(s, &m)).collect::<Result<Vec<_>>>()?;
                (m, seps)
            };
            if seps.is_empty() {
                bail!("no separators given");
            }
            let cov = verify_separator_set(&m, &seps)?;
            r.field("pairs", value_pairs(&m).len());
            r.field("covered", cov.covered.len());
            r.list("separator", &seps);
            r.list("uncovered", cov.uncovered.iter().map(|&p| pair(&m, p)));
            r.verdict(if cov.is_complete() { "COMPLETE" } else { "INCOMPLETE" });
            r
        }
    };
    Ok((r, replacement))
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli.command) {
        Ok((_, Some(text))) => print!("{text}"),
        Ok((report, None)) => {
            print!("{}", report.render(start.elapsed(), cli.json));
            std::process::exit(report.exit_code());
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
