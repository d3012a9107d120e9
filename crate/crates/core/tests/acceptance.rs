//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

mod common;

use common::{machine, naive_multifunction, nmatrix, random_formula, random_nmatrix, variables_of};
use nmlab::monadicity::value_pairs;
use nmlab::nmatrix::for_each_tuple;
use nmlab::reduction::{enc, mu_select, MuKind, NamedValuation};
use nmlab::{
    build_monadify, certify_unseparated, compile_monadicity_instance, decide_monadicity_matrix, expressed_multifunction,
    is_theorem, parse_formula, search_separators, unary_clone, verify_separator_set, witness_separators_from_theorem,
    Configuration, MachineNmatrix, Nmatrix, SearchOptions, Signature, Terminal, ValueId, ValueSet, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn set(m: &Nmatrix, names: &[&str]) -> ValueSet {
    ValueSet::from_values(m.value_count(), names.iter().map(|n| m.value(n).unwrap()))
}

fn images(m: &Nmatrix, text: &str) -> Vec<ValueSet> {
    let f = parse_formula(text, m.signature()).unwrap();
    expressed_multifunction(m, &f).unwrap().table().to_vec()
}

fn cfg(c: &nmlab::CounterMachine, state: &str, counters: &[u64]) -> Configuration {
    c.config(state, counters).unwrap()
}

fn lukasiewicz() -> Outcome {
    let m = nmatrix("luk3.nmx");
    let report = decide_monadicity_matrix(&m).map_err(|e| e.to_string())?;
    ensure!(report.verdict == Verdict::Monadic, "verdict {}", report.verdict);
    let seps = ["p", "neg(p)"].map(|t| parse_formula(t, m.signature()).unwrap());
    let cov = verify_separator_set(&m, &seps).map_err(|e| e.to_string())?;
    ensure!(cov.is_complete(), "uncovered {:?}", cov.uncovered);
    Ok(format!("{} pairs separated by {{p, neg(p)}}", cov.covered.len()))
}

fn clone_exactness() -> Outcome {
    let m = nmatrix("luk3_noneg.nmx");
    let v = |n: &str| m.value(n).unwrap();
    let clone = unary_clone(&m).map_err(|e| e.to_string())?;
    let mut got: Vec<Vec<ValueId>> = clone.iter().map(|(f, _)| f.to_vec()).collect();
    got.sort();
    let mut want = vec![vec![v("0"), v("half"), v("1")], vec![v("1"), v("1"), v("1")]];
    want.sort();
    ensure!(got == want, "clone {got:?}");
    let report = decide_monadicity_matrix(&m).map_err(|e| e.to_string())?;
    ensure!(report.verdict == Verdict::NotMonadic, "verdict {}", report.verdict);
    ensure!(report.uncovered == [(v("0"), v("half"))], "uncovered {:?}", report.uncovered);
    Ok("clone {(0,half,1),(1,1,1)}, uncovered (0,half)".into())
}

fn syntax_sensitivity() -> Outcome {
    let m = nmatrix("ex3_m.nmx");
    let s = |n: &[&str]| set(&m, n);
    let single = vec![s(&["b", "c"]), s(&["a", "c"]), s(&["c"])];
    let constant = vec![s(&["c"]); 3];
    let mixed = vec![s(&["a", "c"]), s(&["b", "c"]), s(&["c"])];
    let phi = "g(g(p,p),p)";
    let psi = "g(p,g(p,p))";
    let expect = [
        (phi.to_string(), &single),
        (psi.to_string(), &single),
        (format!("g({phi},{phi})"), &constant),
        (format!("g({psi},{psi})"), &constant),
        ("g(p,p)".to_string(), &constant),
        (format!("g({phi},{psi})"), &mixed),
        (format!("g({psi},{phi})"), &mixed),
    ];
    for (text, want) in expect {
        let got = images(&m, &text);
        ensure!(&got == want, "{text}: {}", got.iter().map(|x| m.format_set(x)).collect::<Vec<_>>().join(","));
    }
    let mp = nmatrix("ex3_mprime.nmx");
    let report = search_separators(&mp, SearchOptions::new(6)).map_err(|e| e.to_string())?;
    ensure!(report.verdict == Verdict::Monadic, "M' verdict {}", report.verdict);
    ensure!(report.witnesses.len() == 3, "M' witnesses {:?}", report.witnesses);
    let seps: Vec<_> = report.witnesses.values().cloned().collect();
    ensure!(verify_separator_set(&mp, &seps).unwrap().is_complete(), "M' witnesses do not verify");
    let rendered: Vec<String> = seps.iter().map(|f| f.to_string()).collect();
    Ok(format!("images match; M' separated by {}", rendered.join(", ")))
}

fn machine_runs() -> Outcome {
    let one = machine("one_counter.cm");
    let trace = one.run(100).map_err(|e| e.to_string())?;
    let expected = vec![
        cfg(&one, "qinit", &[0]),
        cfg(&one, "q1", &[1]),
        cfg(&one, "q2", &[0]),
        cfg(&one, "q3", &[0]),
    ];
    ensure!(trace.halted() && trace.configs == expected, "1-counter trace {:?}", trace.configs);
    let two = machine("two_counter.cm");
    let trace = two.run(10_000).map_err(|e| e.to_string())?;
    let prefix = [
        ("qinit", [0, 0]),
        ("q1", [1, 0]),
        ("q2", [1, 1]),
        ("q3", [0, 1]),
        ("qinit", [1, 1]),
        ("q1", [2, 1]),
        ("q2", [2, 2]),
        ("q3", [1, 2]),
        ("qinit", [2, 2]),
    ];
    for (i, (q, y)) in prefix.iter().enumerate() {
        ensure!(trace.configs[i] == cfg(&two, q, y), "2-counter config {i}: {}", two.format_config(&trace.configs[i]));
    }
    ensure!(trace.terminal == Terminal::BudgetExhausted, "2-counter halted");
    ensure!(trace.configs.len() == 10_001, "2-counter trace length {}", trace.configs.len());
    Ok("1-counter halts after 4 configurations; 2-counter runs 10^4 steps".into())
}

fn one_counter_formulas(mc: &MachineNmatrix) -> (Vec<nmlab::Formula>, [nmlab::Formula; 4]) {
    let c = mc.machine();
    let computation = c.run(10).unwrap().configs;
    let phis: Vec<_> = (1..=4).map(|j| mc.seq(&computation[..j])).collect();
    let q = |s: &str| c.state_index(s).unwrap();
    let psi = mc.step_formula(q("q1"), phis[0].clone(), &[2]);
    let gamma = mc.step_formula(q("q2"), phis[1].clone(), &[2]);
    let xi = mc.step_formula(q("q3"), phis[2].clone(), &[1]);
    let bad_start = mc.step_formula(q("qinit"), nmlab::Formula::constant("eps"), &[1]);
    (phis, [psi, gamma, xi, bad_start])
}

fn reduction_theoremhood() -> Outcome {
    let mc = MachineNmatrix::new(machine("one_counter.cm")).unwrap();
    let err = mc.err();
    let (phis, [psi, gamma, xi, bad_start]) = one_counter_formulas(&mc);
    ensure!(is_theorem(mc.nmatrix(), &phis[3]).unwrap(), "computation is not a theorem");
    ensure!(mc.falsify(&phis[3]).is_none(), "computation falsified");
    for p in &phis[..3] {
        ensure!(!is_theorem(mc.nmatrix(), p).unwrap(), "prefix {p} is a theorem");
        ensure!(
            mc.refuters(p).len() == mc.candidate_valuations(p).len(),
            "prefix {p} not refuted by every valuation"
        );
    }
    let cases = [
        ("psi", &psi, vec![mu_select(MuKind::Plus, 0, 2), NamedValuation::V0Eq]),
        ("gamma", &gamma, vec![mu_select(MuKind::Minus, 2, 0)]),
        ("xi", &xi, vec![mu_select(MuKind::Neq, 0, 1), NamedValuation::V0Eq]),
        ("step_qinit(eps,enc(1))", &bad_start, vec![NamedValuation::VK(0)]),
    ];
    let mut found = Vec::new();
    for (name, f, witnesses) in cases {
        for w in witnesses {
            ensure!(mc.eval_named(w, f) == err, "{name}: {w} gives {}", mc.nmatrix().value_name(mc.eval_named(w, f)));
        }
        let Some((v, x)) = mc.falsify(f) else {
            return Err(format!("{name} not falsified"));
        };
        ensure!(x == err, "{name}: falsify gives {}", mc.nmatrix().value_name(x));
        ensure!(!is_theorem(mc.nmatrix(), f).unwrap(), "{name} is a theorem");
        found.push(format!("{name}:{v}"));
    }
    let (theorems, stats) = mc.closed_theorems(9).map_err(|e| e.to_string())?;
    ensure!(theorems == [phis[3].clone()], "closed theorems {theorems:?}");
    Ok(format!(
        "prefixes refuted; {}; only theorem up to 9 subformulas is the computation ({} visited)",
        found.join(" "),
        stats.visited
    ))
}

fn no_theorem_direction() -> Outcome {
    let mc = MachineNmatrix::new(machine("two_counter.cm")).unwrap();
    let (theorems, stats) = mc.closed_theorems(9).map_err(|e| e.to_string())?;
    ensure!(theorems.is_empty(), "theorems {theorems:?}");
    let c = mc.machine();
    let run = c.run(20).unwrap().configs;
    for k in 1..=2u64 {
        let mut seq = run[..(4 * (k - 1) + 3) as usize].to_vec();
        seq.push(cfg(c, "q3", &[k - 1, k + 1]));
        let phi = mc.seq(&seq);
        let v = mu_select(MuKind::Neq, k, k + 1);
        ensure!(v == NamedValuation::VK(k - 1), "mu_neq({k},{}) = {v}", k + 1);
        ensure!(mc.eval_named(v, &phi) == mc.err(), "phi_{k} not sent to err");
    }
    Ok(format!("no theorems up to 9 subformulas ({} visited); phi_1, phi_2 refuted", stats.visited))
}

fn configurations(c: &nmlab::CounterMachine, bound: u64) -> Vec<Configuration> {
    let n = c.counters();
    let mut out = Vec::new();
    for q in 0..c.states().len() {
        let _ = for_each_tuple(bound as usize + 1, n, |ys| {
            out.push(Configuration::new(q, ys.iter().map(|y| y.index() as u64).collect()));
            ControlFlow::Continue(())
        });
    }
    out
}

fn property_suites() -> Outcome {
    let mc = MachineNmatrix::new(machine("one_counter.cm")).unwrap();
    let m = mc.nmatrix();
    let suc = m.interpretation("suc").unwrap();
    let val = |v: NamedValuation, k: u64| mc.eval_named(v, &enc(k));
    let mut bullets = [0usize; 3];
    for a in 0..=6u64 {
        for b in 0..=6u64 {
            if b != a + 1 {
                let v = mu_select(MuKind::Plus, a, b);
                ensure!(!suc.cell(&[val(v, a)]).contains(val(v, b)), "mu_plus({a},{b})");
                bullets[0] += 1;
            }
            if a == 0 || b != a - 1 {
                let v = mu_select(MuKind::Minus, a, b);
                ensure!(!suc.cell(&[val(v, b)]).contains(val(v, a)), "mu_minus({a},{b})");
                bullets[1] += 1;
            }
            if b != a {
                let v = mu_select(MuKind::Neq, a, b);
                ensure!(val(v, a) != val(v, b), "mu_neq({a},{b})");
                bullets[2] += 1;
            }
        }
    }
    let mut forward = 0;
    let mut refuted = 0;
    for name in ["one_counter.cm", "two_counter.cm"] {
        let mc = MachineNmatrix::new(machine(name)).unwrap();
        let c = mc.machine();
        let family: Vec<NamedValuation> =
            std::iter::once(NamedValuation::V0Eq).chain((0..=5).map(NamedValuation::VK)).collect();
        let all = configurations(c, 3);
        for from in all.iter().filter(|x| !c.is_halting(x.state)) {
            let next = c.nxt(from).unwrap();
            for &v in &family {
                let tags: Vec<_> = next.counters.iter().map(|&z| v.enc_tag(z)).collect();
                let got = mc.transition_value(v, from, &next);
                ensure!(got == mc.conf(next.state, &tags), "{name}: {} -> {} under {v}", c.format_config(from), c.format_config(&next));
                forward += 1;
            }
            for to in all.iter().filter(|&to| *to != next) {
                let v = mc
                    .refuting_valuation(from, to)
                    .ok_or_else(|| format!("{name}: no refuter for {} -> {}", c.format_config(from), c.format_config(to)))?;
                ensure!(
                    mc.transition_value(v, from, to) == mc.err(),
                    "{name}: {v} does not refute {} -> {}",
                    c.format_config(from),
                    c.format_config(to)
                );
                refuted += 1;
            }
        }
    }
    Ok(format!(
        "mu bullets over 49 pairs each ({}/{}/{} with premise); {forward} successor steps; {refuted} non-successor steps refuted",
        bullets[0], bullets[1], bullets[2]
    ))
}

fn size_formulas() -> Outcome {
    let mut out = Vec::new();
    for (name, want) in [("one_counter.cm", [22, 7, 23, 29]), ("two_counter.cm", [86, 8, 87, 94])] {
        let c = machine(name);
        let (m, n) = (c.states().len(), c.counters() as u32);
        let formula = [m * 4usize.pow(n) + 6, 3 + m, m * 4usize.pow(n) + 7, m * 4usize.pow(n) + m + 9];
        let mc = MachineNmatrix::new(c.clone()).unwrap();
        let mm = compile_monadicity_instance(&c).map_err(|e| e.to_string())?;
        let got = [
            mc.nmatrix().value_count(),
            mc.nmatrix().signature().len(),
            mm.value_count(),
            mm.signature().len(),
        ];
        ensure!(got == want && got == formula, "{name}: {got:?}");
        out.push(format!("{}/{}/{}/{}", got[0], got[1], got[2], got[3]));
    }
    Ok(out.join(" and "))
}

fn monadify_end_to_end() -> Outcome {
    let mc = MachineNmatrix::new(machine("one_counter.cm")).unwrap();
    let phi = mc.seq(&mc.machine().run(10).unwrap().configs);
    let mm = build_monadify(mc.nmatrix()).map_err(|e| e.to_string())?;
    let seps = witness_separators_from_theorem(mc.nmatrix(), &phi).map_err(|e| e.to_string())?;
    let cov = verify_separator_set(&mm, &seps).map_err(|e| e.to_string())?;
    ensure!(cov.is_complete() && cov.covered.len() == 253, "covered {}", cov.covered.len());

    let mc2 = MachineNmatrix::new(machine("two_counter.cm")).unwrap();
    let report = certify_unseparated(mc2.nmatrix(), mc2.err(), 5).map_err(|e| e.to_string())?;
    ensure!(report.base_closed, "base connectives reach the fresh value");
    ensure!(report.fresh_absorbing, "fresh value is not absorbing");
    ensure!(report.escapes.is_empty(), "unmixed f-terms: {:?}", &report.escapes[..report.escapes.len().min(5)]);
    let mm2 = build_monadify(mc2.nmatrix()).map_err(|e| e.to_string())?;
    let search = search_separators(&mm2, SearchOptions::new(3)).map_err(|e| e.to_string())?;
    ensure!(search.verdict == Verdict::Unknown, "generic search verdict {}", search.verdict);
    let (err, one) = (mm2.value("err").unwrap(), mm2.value("one").unwrap());
    let err_base = search
        .uncovered
        .iter()
        .filter(|&&(x, y)| (x == err || y == err) && x != one && y != one)
        .count();
    ensure!(err_base == 85, "search separated err from a base value");
    Ok(format!(
        "253/253 pairs covered; non-halting: {} base terms, {} innermost f-terms all mixed at err; search budget 3 UNKNOWN",
        report.base_terms, report.f_terms
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sig = Signature::from_pairs([("c", 0), ("n", 1), ("g", 2)]).unwrap();
    let conns: Vec<(&str, usize)> = sig.iter().collect();
    for i in 0..100 {
        let m = random_nmatrix(&mut rng, 5, &conns, false);
        let f = random_formula(&mut rng, &sig, &["p", "q"], 6);
        let got = expressed_multifunction(&m, &f).map_err(|e| e.to_string())?;
        let names: Vec<String> = got.variables().iter().map(|v| v.to_string()).collect();
        ensure!(names == variables_of(&f), "instance {i}: variables {names:?}");
        let want = naive_multifunction(&m, &f);
        let mut idx = 0;
        let mut mismatch = None;
        let _ = for_each_tuple(m.value_count(), names.len(), |args| {
            if got.table()[idx] != want[args] {
                mismatch = Some(args.to_vec());
            }
            idx += 1;
            ControlFlow::Continue(())
        });
        ensure!(mismatch.is_none(), "instance {i}: {f} differs at {mismatch:?}");
    }
    let search_sig: Vec<(&str, usize)> = vec![("n", 1), ("g", 2)];
    let mut verdicts = [0usize; 3];
    for i in 0..50 {
        let m = random_nmatrix(&mut rng, 4, &search_sig, i % 2 == 0);
        let pruned = search_separators(&m, SearchOptions::new(7)).map_err(|e| e.to_string())?;
        let mut opts = SearchOptions::new(7);
        opts.prune = false;
        let full = search_separators(&m, opts).map_err(|e| e.to_string())?;
        ensure!(pruned.verdict == full.verdict, "search {i}: {} vs {}", pruned.verdict, full.verdict);
        ensure!(pruned.uncovered == full.uncovered, "search {i}: uncovered differ");
        ensure!(pruned.witnesses == full.witnesses, "search {i}: witnesses differ");
        ensure!(value_pairs(&m).len() == pruned.witnesses.len() + pruned.uncovered.len(), "search {i}: pair count");
        verdicts[match pruned.verdict {
            Verdict::Monadic => 0,
            Verdict::NotMonadic => 1,
            Verdict::Unknown => 2,
        }] += 1;
    }
    Ok(format!(
        "100 oracle instances agree; 50 searches agree ({} monadic, {} unknown)",
        verdicts[0], verdicts[2]
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Lukasiewicz monadicity", lukasiewicz),
        ("clone exactness", clone_exactness),
        ("syntax sensitivity", syntax_sensitivity),
        ("machine runs", machine_runs),
        ("reduction theoremhood", reduction_theoremhood),
        ("no-theorem direction", no_theorem_direction),
        ("valuation property suites", property_suites),
        ("size formulas", size_formulas),
        ("monadification end to end", monadify_end_to_end),
        ("oracle equivalence", oracle_equivalence),
    ];
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !args.is_empty() && !args.iter().any(|a| name.contains(a.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {failed} failed, total {:.2}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
