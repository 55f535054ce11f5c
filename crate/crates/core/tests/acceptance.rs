//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nambu_core::harness::CheckRecord;
use nambu_core::{run_suite, Selector, SuiteOptions, VerificationReport};

const BUDGET: Duration = Duration::from_secs(60);

struct Criterion {
    title: &'static str,
    /// Checks that must exist and pass.
    named: &'static [&'static str],
    /// Every check whose name starts with one of these must pass.
    prefixes: &'static [&'static str],
    /// Minimum number of checks matched by `prefixes`.
    min_prefixed: usize,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        title: "harmonic oscillator: bracket table, finals, Hamiltonian-free and extended families",
        named: &[
            "harmonic-oscillator/pb/C2,C4",
            "harmonic-oscillator/pb/C3,C4",
            "harmonic-oscillator/pb/C4,C5",
            "harmonic-oscillator/standard/final/C1,C2,C4",
            "harmonic-oscillator/standard/final/C1,C2,C3",
            "harmonic-oscillator/standard/final/C3,C4,C5",
            "harmonic-oscillator/standard/final/C1,C4,C5",
            "harmonic-oscillator-free/standard/final/C3,C4,C5",
            "harmonic-oscillator-c6/standard/final/C1,C2,C4",
            "harmonic-oscillator-c6/standard/final/C1,C4,C5",
            "harmonic-oscillator-c7/standard/final/C3,C4,C5",
            "harmonic-oscillator-c7/standard/final/C1,C4,C5",
        ],
        prefixes: &[
            "harmonic-oscillator/conservation/",
            "harmonic-oscillator/pb/",
            "harmonic-oscillator/standard/",
            "harmonic-oscillator-free/",
            "harmonic-oscillator-c6/",
            "harmonic-oscillator-c7/",
        ],
        min_prefixed: 60,
    },
    Criterion {
        title: "Smorodinsky-Winternitz: bracket relations against the Casimir partials and printed finals",
        named: &[
            "smorodinsky-winternitz/pb/C2,C3/casimir-partial",
            "smorodinsky-winternitz/pb/C2,C4/casimir-partial",
            "smorodinsky-winternitz/pb/C3,C4/casimir-partial",
            "smorodinsky-winternitz/standard/final/C1,C2,C4",
            "smorodinsky-winternitz/standard/final/C2,C3,C4",
        ],
        prefixes: &[
            "smorodinsky-winternitz/conservation/",
            "smorodinsky-winternitz/pb/",
            "smorodinsky-winternitz/standard/",
        ],
        min_prefixed: 15,
    },
    Criterion {
        title: "Kepler-Coulomb: constraints vanish, three finals, decomposed 4-bracket",
        named: &[
            "kepler-coulomb/standard/constraint-zero/F1",
            "kepler-coulomb/standard/constraint-zero/F2",
            "kepler-coulomb/standard/final/H,L1,L2,L3,A1",
            "kepler-coulomb/standard/final/L1,L2,L3,A1,A2",
            "kepler-coulomb/standard/final/H,L1,L2,A2,A3",
            "kepler-coulomb/decomposition/L1,L2,L3,A1",
        ],
        prefixes: &["kepler-coulomb/"],
        min_prefixed: 30,
    },
    Criterion {
        title: "Winternitz n=3: complex finals and the T-algebra",
        named: &[
            "winternitz-3/standard/final/H,T11,T22,T12,T13",
            "winternitz-3/standard/final/T11,T22,T33,T12,T13",
            "winternitz-3/pb/T12,T13",
        ],
        prefixes: &["winternitz-3/"],
        min_prefixed: 25,
    },
    Criterion {
        title: "sphere n=4: 8th-order finals on the standard and primed constraint sets",
        named: &[
            "sphere-4/standard/final/H,P1,P2,P3,P4,L12,L13",
            "sphere-4/standard/final/P1,P2,P3,P4,L12,L13,L24",
            "sphere-4/standard/final/H,L12,L13,L14,L23,L24,L34",
            "sphere-4/primed/final/H,P1,P2,P3,P4,L12,L13",
            "sphere-4/primed/final/P1,P2,P3,P4,L12,L13,L24",
            "sphere-4/primed/final/H,L12,L13,L14,L23,L24,L34",
            "sphere-4/primed/final-sweep",
        ],
        prefixes: &["sphere-4/"],
        min_prefixed: 60,
    },
    Criterion {
        title: "structural: homogeneous identity, antisymmetry, Leibniz, fundamental identity, decomposition",
        named: &[
            "harmonic-oscillator/standard/homogeneous-sweep",
            "harmonic-oscillator/standard/homogeneous/C1",
            "structural/antisymmetry",
            "structural/leibniz",
            "structural/fi-n3",
            "structural/decomposition-n2",
            "structural/decomposition-n3",
        ],
        prefixes: &["structural/", "harmonic-oscillator/standard/homogeneous"],
        min_prefixed: 12,
    },
    Criterion {
        title: "reconstruction: shipped tables integrate to the reference, corrupted table rejected",
        named: &[
            "smorodinsky-winternitz/reconstruction/shipped-table",
            "harmonic-oscillator/reconstruction/shipped-table",
            "smorodinsky-winternitz/reconstruction/rejects-corrupted-table",
        ],
        prefixes: &[],
        min_prefixed: 0,
    },
];

fn describe(r: &CheckRecord) -> String {
    match r.max_residual {
        Some(x) => format!("{} (residual {x:e} > {:e})", r.name, r.tolerance),
        None => format!("{} ({})", r.name, r.note.as_deref().unwrap_or("no residual")),
    }
}

/// Returns the failure reasons, empty when the criterion holds.
fn evaluate(c: &Criterion, report: &VerificationReport) -> Vec<String> {
    let mut problems = Vec::new();
    for name in c.named {
        match report.check(name) {
            None => problems.push(format!("{name} (not registered)")),
            Some(r) if !r.pass => problems.push(describe(r)),
            Some(_) => {}
        }
    }
    let prefixed: Vec<&CheckRecord> = report
        .checks
        .iter()
        .filter(|r| c.prefixes.iter().any(|p| r.name.starts_with(p)))
        .collect();
    if prefixed.len() < c.min_prefixed {
        problems.push(format!("only {} checks matched, expected at least {}", prefixed.len(), c.min_prefixed));
    }
    for r in prefixed {
        if !r.pass && !c.named.contains(&r.name.as_str()) {
            problems.push(describe(r));
        }
    }
    problems
}

fn main() -> ExitCode {
    let started = Instant::now();
    let report = run_suite(&Selector::All, &SuiteOptions::default()).expect("suite runs");
    let elapsed = started.elapsed();

    let mut ok = true;
    for (i, c) in CRITERIA.iter().enumerate() {
        let problems = evaluate(c, &report);
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {}: {}", i + 1, c.title);
        for p in &problems {
            println!("     {p}");
        }
        ok &= problems.is_empty();
    }
    let in_budget = elapsed < BUDGET;
    println!(
        "{} full suite: {} checks at {} samples in {:.1}s (budget {}s)",
        if in_budget { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.meta.samples,
        elapsed.as_secs_f64(),
        BUDGET.as_secs()
    );
    ok &= in_budget;
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
