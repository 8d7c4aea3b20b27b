//! Acceptance criteria 1-8, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use adlv_core::context::{IsocrystalContext, OPoint};
use adlv_core::enumeration::{enumerate_hodge_semimodules, EnumerationWindow};
use adlv_core::harness::{
    lattice_check, multiplicity_sweep, verify_battery, Battery, CaseReport, CaseSpec,
    LatticeCheckReport, Selector, Status, Timed,
};
use adlv_core::semimodule::{HodgeType, SemiModule};

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(k: usize, name: &str, o: &Outcome) {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {k} [{tag}] {name}: {}", o.detail);
}

fn check_column(reports: &[Timed<CaseReport>], column: &str) -> Outcome {
    let mut checked = 0;
    let mut skipped = 0;
    let mut failed = Vec::new();
    for t in reports {
        if let Some(e) = &t.value.error {
            failed.push(format!("{} ({})", t.key, e.message));
            continue;
        }
        match t.value.checks.get(column) {
            Some(Status::Pass) => checked += 1,
            Some(Status::Skipped) => skipped += 1,
            _ => failed.push(t.key.clone()),
        }
    }
    Outcome {
        pass: failed.is_empty() && checked > 0,
        detail: if failed.is_empty() {
            format!("{checked} cases hold, {skipped} skipped")
        } else {
            format!("{} failures: {}", failed.len(), failed.join(", "))
        },
    }
}

fn criterion_1(reports: &[Timed<CaseReport>], elapsed: Duration) -> Outcome {
    let mut o = check_column(reports, "count");
    let top: BTreeMap<&str, usize> = reports
        .iter()
        .map(|t| (t.key.as_str(), t.value.top_classes))
        .collect();
    let anchors = [
        ("n2-d1-m1-mu10", 1),
        ("n3-d1-m2-mu110", 1),
        ("n4-d1-m2-mu1100", 1),
        ("n2-d2-m2-mu10.10", 2),
    ];
    for (key, want) in anchors {
        if top.get(key) != Some(&want) {
            o.pass = false;
            o.detail += &format!("; anchor {key} gives {:?}, expected {want}", top.get(key));
        }
    }
    if elapsed > Duration::from_secs(300) {
        o.pass = false;
    }
    o.detail += &format!(
        "; anchors (1,1,1,2); battery ran in {:.1}s",
        elapsed.as_secs_f64()
    );
    o
}

fn criterion_6() -> Outcome {
    let sweep = multiplicity_sweep(4, 3);
    let failed: Vec<&str> = sweep
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.key.as_str())
        .collect();
    Outcome {
        pass: failed.is_empty() && !sweep.is_empty(),
        detail: if failed.is_empty() {
            format!("{} (tuple, lambda) pairs agree", sweep.len())
        } else {
            format!("{} mismatches: {}", failed.len(), failed.join(", "))
        },
    }
}

fn realization_spec(precision: usize) -> CaseSpec {
    let mut spec = CaseSpec::from_counts(4, &[2]);
    spec.precision = Some(precision);
    spec
}

fn realization(precision: usize) -> adlv_core::Result<LatticeCheckReport> {
    let abar: Vec<OPoint> = [1, 3, 8, 10].iter().map(|&i| OPoint::new(0, i)).collect();
    lattice_check(
        &realization_spec(precision),
        &Selector::Abar(abar),
        Some(0),
        64,
        &|_| {},
    )
}

fn criterion_7() -> (Outcome, Option<LatticeCheckReport>) {
    let start = Instant::now();
    let report = realization(16);
    let elapsed = start.elapsed();
    match report {
        Err(e) => (
            Outcome {
                pass: false,
                detail: format!("error: {e}"),
            },
            None,
        ),
        Ok(r) => {
            let row = &r.rows[0];
            let sizes: Vec<usize> = row.samples.iter().map(|s| s.fiber).collect();
            let pass = r.pass && elapsed < Duration::from_secs(10) && !sizes.is_empty();
            (
                Outcome {
                    pass,
                    detail: format!(
                        "|V|={} |W|={}, fibres {:?} over F_(2^{}), expected {} each, \
                         inv {:?}, {:.2}s",
                        row.v,
                        row.w,
                        sizes,
                        row.field_degree,
                        row.expected_fiber,
                        row.samples.first().map(|s| &s.inv),
                        elapsed.as_secs_f64()
                    ),
                },
                Some(r),
            )
        }
    }
}

/// Independent enumeration: every coset-minimum table with entries in
/// `[0, B]`, filtered by validation, Hodge type and the normalization
/// `min Ā in [0, h)`.
fn brute_force(ctx: &Arc<IsocrystalContext>, mu: &HodgeType, bound: i64) -> Vec<SemiModule> {
    let cells = ctx.coset_count();
    let n = ctx.n() as i64;
    let choices: Vec<Vec<i64>> = (0..cells)
        .map(|c| {
            let class = (c % ctx.n()) as i64;
            (0..=bound).filter(|i| i.rem_euclid(n) == class).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; cells];
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    loop {
        let table: Vec<i64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        let least = *table.iter().min().unwrap();
        if least < ctx.h() as i64 {
            if let Ok(a) = SemiModule::from_table(ctx, table) {
                if a.is_hodge_type(mu) {
                    out.push(a);
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == cells {
                out.sort_by(|a, b| a.table().cmp(b.table()));
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn criterion_8(
    battery: &Battery,
    base: &[Timed<CaseReport>],
    realization_base: Option<&LatticeCheckReport>,
) -> Outcome {
    let mut problems = Vec::new();

    match battery.widened() {
        Ok(wide) => {
            let again = verify_battery(&wide);
            for (a, b) in base.iter().zip(&again) {
                if a.key != b.key || a.value.criteria_summary() != b.value.criteria_summary() {
                    problems.push(format!("{} changes under B+h", a.key));
                }
            }
        }
        Err(e) => problems.push(format!("widening failed: {e}")),
    }

    match (realization_base, realization(16 + 8)) {
        (Some(r0), Ok(r1)) => {
            let strip = |r: &LatticeCheckReport| {
                r.rows
                    .iter()
                    .map(|row| (row.pass, row.field_degree, row.samples.clone()))
                    .collect::<Vec<_>>()
            };
            if strip(r0) != strip(&r1) {
                problems.push("lattice realization changes under N+8".into());
            }
        }
        (_, Err(e)) => problems.push(format!("lattice realization at N+8: {e}")),
        (None, _) => problems.push("no base lattice realization".into()),
    }

    let mut oracle_cases = 0;
    for case in &battery.cases {
        if case.n * case.d > 6 {
            continue;
        }
        let r = case.resolve().expect("battery validated");
        let bound = r.window.bound();
        let listed = enumerate_hodge_semimodules(
            &r.ctx,
            &r.mu,
            EnumerationWindow::new(&r.ctx, bound).unwrap(),
        );
        let oracle = brute_force(&r.ctx, &r.mu, bound);
        oracle_cases += 1;
        match listed {
            Ok(mut l) => {
                l.sort_by(|a, b| a.table().cmp(b.table()));
                if l != oracle {
                    problems.push(format!(
                        "{}: enumeration {} vs exhaustive {}",
                        case.key(),
                        l.len(),
                        oracle.len()
                    ));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", case.key())),
        }
    }

    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} cases stable under B+h, lattice realization stable under N+8, \
                 {oracle_cases} enumerations match the exhaustive search",
                base.len()
            )
        } else {
            problems.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let battery = Battery::default_battery();
    let start = Instant::now();
    let reports = verify_battery(&battery);
    let elapsed = start.elapsed();

    let mut all = true;
    let mut report = |k: usize, name: &str, o: Outcome| {
        line(k, name, &o);
        all &= o.pass;
    };
    report(1, "top class count", criterion_1(&reports, elapsed));
    report(2, "dimension", check_column(&reports, "dimension"));
    report(3, "dimension identity", check_column(&reports, "identity"));
    report(4, "Levi bijection", check_column(&reports, "bijection"));
    report(5, "superbasic count", check_column(&reports, "superbasic"));
    report(6, "multiplicity identity", criterion_6());
    let (o7, r7) = criterion_7();
    report(7, "lattice realization", o7);
    report(
        8,
        "robustness",
        criterion_8(&battery, &reports, r7.as_ref()),
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
