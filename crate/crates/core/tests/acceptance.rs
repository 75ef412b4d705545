//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{corpus, corpus_machines, log_log_slope, oracle_run, OracleVerdict};
use wotm::endwriter::{
    analyze, between_writes_automaton, decide_with, initial_automaton, two_way_to_one_way, writing_states, Cell,
    DecideVerdict, Dir, TwoWayAutomaton, TwoWayStep,
};
use wotm::machine::{
    binarize_alphabet, parse_machine, successors, validate_machine, Configuration, Discipline, Machine, Mode, Symbol,
};
use wotm::simulator::{
    gap_stats, run_deterministic, run_nondeterministic, shorten_run, Limits, Outcome, RunTrace, TraceEvent,
};
use wotm::transpile::{
    check_copying_trace, differential_check, relax_to_standard, to_write_once_copying, to_write_once_womcoded,
    words_up_to, InputEncoding,
};
use wotm::womcode::{rivest_shamir_code, slot_code, verify_code, PhysicalWord, ViolationKind, WomCode};

type Verdict = Result<String, String>;

/// Upper limit for the fitted constant in steps <= C * (steps + space)^3.
const COPY_C_LIMIT: f64 = 50.0;
/// Tolerance on the fitted space exponent of the unary scanner.
const QUADRATIC_TOLERANCE: f64 = 0.1;
const SUITE_BUDGET: Duration = Duration::from_secs(300);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn working_states(m: &Machine) -> usize {
    m.state_count() - 2
}

// 1 ------------------------------------------------------------------------

fn gap_bound() -> Verdict {
    let start = Instant::now();
    let machines: Vec<_> = corpus()
        .into_iter()
        .filter(|(e, _)| e.tags.purpose == "gap-bound")
        .map(|(e, d)| (e.file, Machine::new(d.clone()).unwrap(), d))
        .collect();
    ensure(machines.len() >= 20, || format!("only {} gap-bound machines", machines.len()))?;
    let (mut runs, mut violations, mut worst) = (0usize, 0usize, 0.0f64);
    for (name, m, desc) in &machines {
        ensure(m.mode() == Mode::Deterministic && m.discipline() == Discipline::WriteOnce, || format!("{name} is not deterministic write-once"))?;
        ensure(working_states(m) <= 6, || format!("{name} has {} working states", working_states(m)))?;
        for w in words_up_to(m.alphabet(), 8) {
            let t = run_deterministic(m, &w, Limits::new(1_000_000, 100_000)).unwrap();
            ensure(matches!(t.outcome, Outcome::Accept | Outcome::Reject), || format!("{name} on {w:?}: {:?}", t.outcome))?;
            let g = gap_stats(&t, m.state_count());
            let o = oracle_run(desc, &w, 1_000_000);
            let gaps: Vec<u64> = g.gaps.iter().map(|&x| x as u64).collect();
            ensure(o.gaps == gaps && o.space == g.space_used, || format!("{name} on {w:?}: gaps differ from the oracle"))?;
            let bound = o.space * m.state_count();
            let max_gap = *o.gaps.iter().max().unwrap() as usize;
            if max_gap > bound || !g.bound_check {
                violations += 1;
            }
            worst = worst.max(max_gap as f64 / bound as f64);
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(violations == 0, || format!("{violations} gap-bound violations"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} machines, {runs} runs, 0 violations, max gap/(space*states) = {worst:.3}, {:.1}s",
        machines.len(),
        elapsed.as_secs_f64()
    ))
}

// 2 ------------------------------------------------------------------------

fn loop_detector() -> Verdict {
    let entries = corpus();
    let mut detected = 0;
    let mut halting_checked = 0;
    for (e, desc) in &entries {
        if desc.mode != Mode::Deterministic {
            continue;
        }
        let m = Machine::new(desc.clone()).unwrap();
        let alphabet: Vec<Symbol> = if desc.discipline == Discipline::WriteOnceEndOnly {
            m.alphabet().iter().copied().filter(|&s| s != 0).collect()
        } else {
            m.alphabet().to_vec()
        };
        let mut fired = 0;
        for w in words_up_to(&alphabet, 4) {
            let t = run_deterministic(&m, &w, Limits::default()).unwrap();
            let o = oracle_run(desc, &w, 1_000_000);
            match o.verdict {
                OracleVerdict::Running => {
                    if e.tags.purpose == "loop" {
                        ensure(t.outcome == Outcome::LoopDetected, || format!("{} on {w:?}: {:?}", e.file, t.outcome))?;
                    }
                }
                v => {
                    halting_checked += 1;
                    let expected = match v {
                        OracleVerdict::Accept => Outcome::Accept,
                        OracleVerdict::Reject => Outcome::Reject,
                        _ => Outcome::WriteOnceViolation,
                    };
                    ensure(t.outcome == expected, || format!("{} on {w:?}: {:?}, oracle {v:?}", e.file, t.outcome))?;
                }
            }
            if t.outcome == Outcome::LoopDetected {
                fired += 1;
            }
        }
        if e.tags.purpose == "loop" {
            ensure(fired > 0, || format!("{} never cycles", e.file))?;
            detected += 1;
        }
    }
    Ok(format!("{detected} cycling machines detected; no false alarm on {halting_checked} halting runs"))
}

// 3 ------------------------------------------------------------------------

/// Accepting runs found by random walks; these contain detours.
fn random_accepting_runs(m: &Machine, w: &[Symbol], rng: &mut StdRng, tries: usize) -> Vec<RunTrace> {
    let mut out = Vec::new();
    for _ in 0..tries {
        let initial = Configuration::initial(m, w);
        let mut c = initial.clone();
        let mut events = Vec::new();
        for _ in 0..60 {
            if c.state == m.accept() {
                out.push(RunTrace { initial: initial.clone(), events: events.clone(), outcome: Outcome::Accept });
                break;
            }
            let Ok(next) = successors(m, &c) else { break };
            if next.is_empty() {
                break;
            }
            let (nc, step) = next[rng.gen_range(0..next.len())].clone();
            events.push(TraceEvent {
                action: step.action,
                read: step.read,
                state: nc.state,
                head: nc.head,
                change: step.change,
                was_write: step.was_write,
            });
            c = nc;
        }
    }
    out
}

fn shortening() -> Verdict {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut traces, mut removed) = (0, 0);
    let machines = corpus_machines(|e| e.tags.mode == "nondeterministic");
    ensure(!machines.is_empty(), || "no nondeterministic machines".into())?;
    for (name, m) in &machines {
        for w in words_up_to(m.alphabet(), 4) {
            let r = run_nondeterministic(m, &w, Limits::new(5_000, 64)).unwrap();
            let mut witnesses: Vec<RunTrace> = r.witness.into_iter().collect();
            witnesses.extend(random_accepting_runs(m, &w, &mut rng, 20));
            for t in witnesses {
                let s = shorten_run(m, &t).map_err(|e| format!("{name}: {e}"))?;
                s.verify(m).map_err(|e| format!("{name} on {w:?}: shortened run invalid: {e}"))?;
                ensure(s.outcome == t.outcome, || format!("{name}: verdict changed"))?;
                let final_state = s.final_configuration().state;
                ensure(final_state == t.final_configuration().state, || format!("{name}: final state changed"))?;
                let mut seen = HashSet::new();
                seen.insert((s.initial.state, s.initial.head));
                for e in &s.events {
                    if e.change.is_some() {
                        seen.clear();
                    }
                    ensure(seen.insert((e.state, e.head)), || format!("{name} on {w:?}: repeated position within a gap"))?;
                }
                let g = gap_stats(&s, m.state_count());
                ensure(g.bound_check, || format!("{name} on {w:?}: gap {} over bound", g.max_gap))?;
                removed += t.events.len() - s.events.len();
                traces += 1;
            }
        }
    }
    ensure(removed > 0, || "no trace had anything to remove".into())?;
    Ok(format!("{traces} witness traces from {} machines, {removed} steps removed", machines.len()))
}

// 4 ------------------------------------------------------------------------

fn copying_construction() -> Verdict {
    let machines = corpus_machines(|e| e.tags.mode == "deterministic" && e.tags.discipline == "standard");
    ensure(!machines.is_empty(), || "no standard machines".into())?;
    let mut fitted: f64 = 0.0;
    let mut words = 0;
    for (name, m) in &machines {
        let (target, encoding) = if m.is_binary() {
            let (t, r) = to_write_once_copying(m).unwrap();
            (t, r.encoding)
        } else {
            let (b, enc) = binarize_alphabet(m).unwrap();
            let (t, r) = to_write_once_copying(&b).unwrap();
            (t, InputEncoding::Chain { stages: vec![InputEncoding::Blocks { encoding: enc }, r.encoding] })
        };
        let report = differential_check(
            m,
            &target,
            &encoding,
            5,
            Limits::new(10_000, 1_000),
            Limits::new(50_000_000, 1_000_000),
        )
        .unwrap();
        ensure(report.divergences == 0, || format!("{name}: {} divergences, first {:?}", report.divergences, report.first_divergence.as_ref().map(|d| &d.word)))?;
        ensure(report.inconclusive == 0, || format!("{name}: {} inconclusive words", report.inconclusive))?;
        for rec in &report.records {
            let t = rec.b.trace.as_ref().unwrap();
            ensure(t.is_write_once_monotone(), || format!("{name}: transpiled run not monotone"))?;
            if m.is_binary() {
                check_copying_trace(t).map_err(|v| format!("{name} on {:?}: {} at {}", rec.word, v.reason, v.step))?;
            }
            let base = (rec.a.steps + rec.a.space) as f64;
            fitted = fitted.max(rec.b.steps as f64 / base.powi(3));
        }
        words += report.words;
    }
    ensure(fitted <= COPY_C_LIMIT, || format!("fitted C = {fitted:.2} above {COPY_C_LIMIT}"))?;
    Ok(format!("{} machines, {words} words, 0 divergences, fitted C = {fitted:.3}", machines.len()))
}

// 5 ------------------------------------------------------------------------

/// Largest number of updates any cell of the source needs on `w`: one for
/// a non-blank input symbol plus one per change.
fn cell_updates(m: &Machine, w: &[Symbol]) -> usize {
    let t = run_deterministic(m, w, Limits::new(10_000, 1_000)).unwrap();
    let mut count: HashMap<usize, usize> = w.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| (i, 1)).collect();
    for e in &t.events {
        if let Some(c) = e.change {
            *count.entry(c.cell).or_default() += 1;
        }
    }
    count.values().copied().max().unwrap_or(0)
}

fn womcoded_construction() -> Verdict {
    let code = slot_code(1, 3).unwrap();
    let c_limit = 2.0 * (code.width() + 1) as f64;
    let machines = corpus_machines(|e| e.tags.mode == "deterministic" && e.tags.discipline == "standard");
    let (mut used, mut fitted, mut words) = (Vec::new(), 0.0f64, 0);
    for (name, m) in &machines {
        if !m.is_binary() {
            continue;
        }
        let within = words_up_to(m.alphabet(), 5).iter().all(|w| cell_updates(m, w) <= code.update_budget());
        if !within {
            continue;
        }
        let (target, report) = to_write_once_womcoded(m, &code).unwrap();
        let diff = differential_check(m, &target, &report.encoding, 5, Limits::new(10_000, 1_000), Limits::new(1_000_000, 100_000)).unwrap();
        ensure(diff.divergences == 0 && diff.inconclusive == 0, || format!("{name}: {} divergences, {} inconclusive", diff.divergences, diff.inconclusive))?;
        for rec in &diff.records {
            let t = rec.b.trace.as_ref().unwrap();
            ensure(t.is_write_once_monotone(), || format!("{name}: transpiled run not monotone"))?;
            let time = rec.a.steps.max(1) as f64;
            fitted = fitted.max(rec.b.space as f64 / (time * time));
        }
        words += diff.words;
        used.push(name.clone());
    }
    ensure(used.len() >= 3, || format!("only {} machines within the update budget", used.len()))?;
    ensure(fitted <= c_limit, || format!("space constant {fitted:.2} above {c_limit}"))?;
    Ok(format!("{} machines ({}), {words} words, 0 divergences, space <= {fitted:.2} * time^2 (limit {c_limit})", used.len(), used.join(" ")))
}

// 6 ------------------------------------------------------------------------

fn linear_time_instance() -> Verdict {
    let (_, m) = corpus_machines(|e| e.file == "std_unary_scanner.tm").pop().ok_or("unary scanner missing")?;
    let code = rivest_shamir_code();
    let (target, report) = to_write_once_womcoded(&m, &code).unwrap();
    let mut points = Vec::new();
    for n in 1..=8 {
        let w = vec![1; n];
        let src = run_deterministic(&m, &w, Limits::default()).unwrap();
        ensure(src.steps() == n + 1, || format!("source takes {} steps on length {n}", src.steps()))?;
        let t = run_deterministic(&target, &report.encoding.encode(&w), Limits::new(1_000_000, 100_000)).unwrap();
        ensure(t.outcome == Outcome::Accept, || format!("transpiled outcome {:?} on length {n}", t.outcome))?;
        points.push((n as f64, t.space_used() as f64));
    }
    let slope = log_log_slope(&points);
    ensure(slope <= 2.0 + QUADRATIC_TOLERANCE, || format!("space exponent {slope:.3}"))?;
    let spaces: Vec<usize> = points.iter().map(|p| p.1 as usize).collect();
    Ok(format!("space {spaces:?}, fitted exponent {slope:.3} <= {}", 2.0 + QUADRATIC_TOLERANCE))
}

// 7 ------------------------------------------------------------------------

fn wom_codes() -> Verdict {
    let rs = verify_code(&rivest_shamir_code(), 2);
    ensure(rs.is_clean() && rs.max_sequence == 2, || format!("rs: {:?}", rs.violations.first()))?;
    let mut checked = rs.sequences_checked;
    for b in 1..=2 {
        for u in 1..=4 {
            let r = verify_code(&slot_code(b, u).unwrap(), u);
            ensure(r.max_sequence == u, || format!("slot:{b},{u} enumeration was cut to {}", r.max_sequence))?;
            ensure(r.is_clean(), || format!("slot:{b},{u}: {:?}", r.violations.first()))?;
            checked += r.sequences_checked;
        }
    }
    let w = |s: &str| PhysicalWord::parse(s).unwrap();
    let faulty = WomCode::from_tables(
        "rs-faulty",
        vec![vec![w("000"), w("100"), w("010"), w("001")], vec![w("111"), w("110"), w("101"), w("011")]],
    )
    .unwrap();
    let r = verify_code(&faulty, 2);
    ensure(r.violations.iter().any(|v| v.kind == ViolationKind::Monotonicity), || "injected fault not caught".into())?;
    Ok(format!("{checked} update sequences clean; injected fault caught ({} violations)", r.violations.len()))
}

// 8 ------------------------------------------------------------------------

fn random_two_way(rng: &mut StdRng) -> TwoWayAutomaton<u8> {
    let k = rng.gen_range(1..=5);
    let letters = rng.gen_range(1..=3);
    let alphabet: Vec<Symbol> = (1..=letters).collect();
    TwoWayAutomaton::new(k, alphabet, 0, |_, cell| {
        let halt = rng.gen_bool(0.15);
        if halt {
            return TwoWayStep::Halt(rng.gen_range(0..3));
        }
        let p = rng.gen_range(0..k);
        match cell {
            Cell::Start => TwoWayStep::Go(p, Dir::Right),
            Cell::End => TwoWayStep::Go(p, Dir::Left),
            Cell::Letter(_) => TwoWayStep::Go(p, if rng.gen_bool(0.6) { Dir::Right } else { Dir::Left }),
        }
    })
    .unwrap()
}

fn first_equals_last() -> TwoWayAutomaton<u8> {
    TwoWayAutomaton::new(7, vec![1, 2, 3], 0, |q, c| match (q, c) {
        (0, Cell::Start) => TwoWayStep::Go(0, Dir::Right),
        (0, Cell::Letter(a)) => TwoWayStep::Go(a as usize, Dir::Right),
        (0, Cell::End) => TwoWayStep::Halt(0),
        (1..=3, Cell::Letter(_)) => TwoWayStep::Go(q, Dir::Right),
        (1..=3, Cell::End) => TwoWayStep::Go(q + 3, Dir::Left),
        (4..=6, Cell::Letter(a)) => TwoWayStep::Halt((a as usize == q - 3) as u8),
        (_, Cell::Start) => TwoWayStep::Go(q, Dir::Right),
        _ => TwoWayStep::Halt(0),
    })
    .unwrap()
}

fn compare_conversion<L: Clone + Eq + std::hash::Hash + std::fmt::Debug>(twa: &TwoWayAutomaton<L>) -> Result<usize, String> {
    let owa = two_way_to_one_way(twa);
    let mut n = 0;
    for w in words_up_to(twa.alphabet(), 8) {
        let direct = twa.run(&w).output;
        ensure(owa.run(&w) == direct.as_ref(), || format!("mismatch on {w:?}: {:?} vs {direct:?}", owa.run(&w)))?;
        n += 1;
    }
    Ok(n)
}

fn two_way_conversion() -> Verdict {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut automata = vec![first_equals_last()];
    automata.extend((0..30).map(|_| random_two_way(&mut rng)));
    let mut words = 0;
    for a in &automata {
        words += compare_conversion(a)?;
    }
    let mut count = automata.len();
    for (_, m) in corpus_machines(|e| e.tags.discipline == "write-once-end") {
        words += compare_conversion(&initial_automaton(&m).unwrap())?;
        count += 1;
        for s in writing_states(&m) {
            words += compare_conversion(&between_writes_automaton(&m, s).unwrap())?;
            count += 1;
        }
    }
    ensure(count >= 10, || format!("only {count} automata"))?;
    Ok(format!("{count} automata, {words} words, 0 mismatches"))
}

// 9 ------------------------------------------------------------------------

fn end_writer_decider() -> Verdict {
    let machines = corpus_machines(|e| e.tags.discipline == "write-once-end");
    let (mut agreed, mut pumps, mut divergent) = (0, 0, 0);
    for (name, m) in &machines {
        let a = analyze(m).unwrap();
        let limit = a.threshold.constructed;
        for w in words_up_to(&a.letters, 6) {
            let d = decide_with(&a, &w, Limits::default()).unwrap();
            ensure(d.peak_stored_word <= limit + 1, || format!("{name} on {w:?}: stored {} > {}", d.peak_stored_word, limit + 1))?;
            ensure(d.certificate_failures == 0, || format!("{name} on {w:?}: certificate replay failed"))?;
            pumps += d.pumps;
            let t = run_deterministic(m, &w, Limits::new(200_000, 20_000)).unwrap();
            let direct = match t.outcome {
                Outcome::Accept => Some(DecideVerdict::Accept),
                Outcome::Reject => Some(DecideVerdict::Reject),
                Outcome::WriteOnceViolation => Some(DecideVerdict::Fault),
                Outcome::LoopDetected => Some(DecideVerdict::Diverge),
                _ => None,
            };
            match direct {
                Some(v) => {
                    ensure(d.verdict == v, || format!("{name} on {w:?}: decider {:?}, direct {v:?}", d.verdict))?;
                    agreed += 1;
                }
                None => ensure(d.verdict == DecideVerdict::Diverge, || format!("{name} on {w:?}: direct run unbounded but decider says {:?}", d.verdict))?,
            }
        }
    }
    for (name, m) in corpus_machines(|e| e.tags.purpose == "endwriter-divergent") {
        let a = analyze(&m).unwrap();
        let w = vec![a.letters[0]; 3];
        let d = decide_with(&a, &w, Limits::default()).unwrap();
        ensure(d.verdict == DecideVerdict::Diverge, || format!("{name}: {:?}", d.verdict))?;
        let t = run_deterministic(&m, &w, Limits::new(200_000, 1_000_000)).unwrap();
        let limit = a.threshold.constructed;
        ensure(t.space_used() > 10 * limit, || format!("{name}: direct tape {} not past {}", t.space_used(), 10 * limit))?;
        ensure(d.peak_stored_word <= limit + 1, || format!("{name}: stored {}", d.peak_stored_word))?;
        divergent += 1;
    }
    ensure(divergent > 0 && pumps > 0, || "no divergent appender or no pumping".into())?;
    Ok(format!("{} end-writers, {agreed} halting cases agree, {divergent} divergent appenders bounded, {pumps} pumps replayed", machines.len()))
}

// 10 -----------------------------------------------------------------------

fn round_trip(suite_start: Instant) -> Verdict {
    let mut files = 0;
    let mut generated = 0;
    let code = slot_code(1, 3).unwrap();
    for (e, desc) in corpus() {
        let again = parse_machine(&desc.to_string()).map_err(|err| format!("{}: {err}", e.file))?;
        ensure(again == desc, || format!("{} does not round-trip", e.file))?;
        files += 1;
        let m = Machine::new(desc.clone()).unwrap();
        let mut targets = Vec::new();
        if m.discipline().is_write_once() {
            targets.push(Machine::new(relax_to_standard(&desc)).unwrap());
        } else {
            targets.push(binarize_alphabet(&m).unwrap().0);
            if m.is_binary() && m.mode() == Mode::Deterministic {
                targets.push(to_write_once_copying(&m).unwrap().0);
                targets.push(to_write_once_womcoded(&m, &code).unwrap().0);
            }
        }
        for t in targets {
            let d = t.description();
            ensure(parse_machine(&d.to_string()).as_ref() == Ok(d), || format!("translation of {} does not round-trip", e.file))?;
            if t.discipline().is_write_once() {
                let report = validate_machine(d);
                ensure(report.is_clean(), || format!("translation of {}: {:?}", e.file, report.issues.first()))?;
            }
            generated += 1;
        }
    }
    let elapsed = suite_start.elapsed();
    ensure(elapsed < SUITE_BUDGET, || format!("acceptance run took {elapsed:?}"))?;
    Ok(format!("{files} corpus files and {generated} generated machines round-trip; acceptance run {:.1}s", elapsed.as_secs_f64()))
}

fn main() {
    let suite_start = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("1 gap bound", Box::new(gap_bound)),
        ("2 loop detector", Box::new(loop_detector)),
        ("3 run shortening", Box::new(shortening)),
        ("4 copying construction", Box::new(copying_construction)),
        ("5 wom-coded construction", Box::new(womcoded_construction)),
        ("6 linear-time instance", Box::new(linear_time_instance)),
        ("7 wom codes", Box::new(wom_codes)),
        ("8 two-way conversion", Box::new(two_way_conversion)),
        ("9 end-writer decider", Box::new(end_writer_decider)),
        ("10 round trip", Box::new(move || round_trip(suite_start))),
    ];
    // ACCEPTANCE_ONLY=4,9 runs a subset.
    let only: Option<Vec<String>> = std::env::var("ACCEPTANCE_ONLY").ok().filter(|v| !v.is_empty()).map(|v| v.split(',').map(str::to_string).collect());
    let (mut ran, mut failed) = (0, 0);
    for (name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.iter().any(|n| name.split(' ').next() == Some(n.as_str()))) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(|| check())).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{name}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
