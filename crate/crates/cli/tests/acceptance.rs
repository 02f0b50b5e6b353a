//! End-to-end acceptance suite. Prints one line per criterion and exits
//! nonzero if any fails. Set `COSET_DUALITY_LARGE=1` to include S4.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use coset_duality::oracle::brute_automorphisms;
use coset_duality::{
    available, basis_for, build_w, check_axioms, enumerate_full_filters, first_violation, inn_out,
    lookup, round_trip, AutContext, BasisPolicy, Caps, InverseSystem, PermGroup, Subgroup,
    SubgroupFamily,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MUTATIONS: usize = 100;
const MUTATION_SEED: u64 = 0x5eed;
const NATURALITY_SAMPLES: usize = 20;
const NATURALITY_SEED: u64 = 7;
const AXIOM_BUDGET: Duration = Duration::from_secs(10);
const AUT_BUDGET: Duration = Duration::from_secs(60);
const TOWER_BUDGET: Duration = Duration::from_secs(5);
const TOWER_DEPTH: usize = 4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn large() -> bool {
    std::env::var("COSET_DUALITY_LARGE").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn instances() -> Vec<(String, PermGroup, SubgroupFamily)> {
    let caps = Caps::default();
    available(large())
        .into_iter()
        .map(|e| {
            let g = e.group(&caps).unwrap();
            let s = basis_for(&g, BasisPolicy::All, &caps).unwrap();
            (e.name.to_string(), g, s)
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn axiom_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MUTATION_SEED);
    let mut slowest = Duration::ZERO;
    let all = instances();
    for (name, g, s) in &all {
        let start = Instant::now();
        let w = build_w(g, s).map_err(|e| format!("{name}: {e}"))?;
        let report = check_axioms(w.groupoid(), true);
        ensure(report.passed, || format!("{name}: {:?}", report.violations))?;
        for _ in 0..MUTATIONS {
            let m = w.groupoid().random_mutation(&mut rng);
            let broken = w.groupoid().mutated(&m);
            ensure(first_violation(&broken, true).is_some(), || {
                format!("{name}: undetected {m:?}")
            })?;
        }
        let took = start.elapsed();
        ensure(took < AXIOM_BUDGET, || format!("{name}: {took:?}"))?;
        slowest = slowest.max(took);
    }
    Ok(format!(
        "{} instances, {MUTATIONS} mutations each, slowest {slowest:.2?}",
        all.len()
    ))
}

fn bijection() -> Outcome {
    let caps = Caps::default();
    let mut checked = 0;
    for (name, g, _) in instances() {
        for policy in [BasisPolicy::All, BasisPolicy::Chain, BasisPolicy::Minimal] {
            let s = basis_for(&g, policy, &caps).map_err(|e| e.to_string())?;
            let w = build_w(&g, &s).map_err(|e| e.to_string())?;
            let n = enumerate_full_filters(w.groupoid())
                .map_err(|e| e.to_string())?
                .len();
            ensure(n == g.order(), || {
                format!("{name}/{policy}: {n} filters for order {}", g.order())
            })?;
            checked += 1;
        }
    }
    let z4 = lookup("Z4", false).unwrap().group(&caps).unwrap();
    let s3 = lookup("S3", false).unwrap().group(&caps).unwrap();
    let a3 = (0..s3.order()).find(|&x| s3.element_order(x) == 3).unwrap();
    let fixtures = [
        ("Z4 {Z4}", &z4, vec![Subgroup::whole(&z4)], 1),
        (
            "Z4 {Z4, 2Z4}",
            &z4,
            vec![Subgroup::whole(&z4), Subgroup::generated(&z4, &[2])],
            2,
        ),
        (
            "S3 {S3, A3}",
            &s3,
            vec![Subgroup::whole(&s3), Subgroup::generated(&s3, &[a3])],
            2,
        ),
    ];
    for (name, g, members, index) in fixtures {
        let s = SubgroupFamily::new(g, members).map_err(|e| e.to_string())?;
        ensure(!s.separating(), || format!("{name} is separating"))?;
        let kernel = s.intersection().order();
        ensure(g.order() / kernel == index, || {
            format!("{name}: index {}", g.order() / kernel)
        })?;
        let w = build_w(g, &s).map_err(|e| e.to_string())?;
        let n = enumerate_full_filters(w.groupoid())
            .map_err(|e| e.to_string())?
            .len();
        ensure(n == index, || {
            format!("{name}: {n} filters, expected {index}")
        })?;
    }
    Ok(format!(
        "{checked} separating instances, 3 non-separating fixtures"
    ))
}

fn round_trip_checks(names: &[&str]) -> Outcome {
    let caps = Caps::default();
    let all = instances();
    for (name, g, s) in &all {
        let report = round_trip(g, s, NATURALITY_SAMPLES, NATURALITY_SEED, &caps)
            .map_err(|e| format!("{name}: {e}"))?;
        for check in names {
            let c = report
                .checks
                .iter()
                .find(|c| c.name == *check)
                .ok_or_else(|| format!("{name}: no {check} check"))?;
            ensure(c.passed, || {
                format!("{name}: {check} failed: {:?}", c.witness)
            })?;
        }
    }
    Ok(format!(
        "{} instances, {} over {NATURALITY_SAMPLES} samples",
        all.len(),
        names.join(", ")
    ))
}

fn eta_g() -> Outcome {
    round_trip_checks(&["eta-g-isomorphism", "naturality-g"])
}

fn eta_m() -> Outcome {
    round_trip_checks(&["eta-m-isomorphism", "hat-lemmas", "naturality-m"])
}

fn aut_suite() -> Outcome {
    let caps = Caps::aut_suite();
    let start = Instant::now();
    let mut brute = Vec::new();
    let mut cases = instances();
    let z2xz2 = lookup("Z2xZ2", false).unwrap().group(&caps).unwrap();
    cases.push((
        "Z2xZ2 minimal".into(),
        z2xz2.clone(),
        SubgroupFamily::minimal(&z2xz2).unwrap(),
    ));
    for (name, g, s) in &cases {
        let ctx = AutContext::new(g, s, &caps).map_err(|e| format!("{name}: {e}"))?;
        for check in [
            ctx.check_section(),
            ctx.check_inner(),
            ctx.check_centralizer_kernel(),
            ctx.check_split_extension(&caps),
        ] {
            ensure(check.passed, || {
                format!("{name}: {} failed: {:?}", check.name, check.witness)
            })?;
        }
        let omega = ctx.embedding().omega();
        if omega <= caps.normalizer_omega {
            brute.push(format!("{name} ({omega})"));
        }
    }
    for required in ["Z2 (3)", "Z3 (4)", "Z4 (7)", "Z2xZ2 minimal (5)"] {
        ensure(brute.iter().any(|b| b == required), || {
            format!("no brute-force normalizer for {required}")
        })?;
    }
    let took = start.elapsed();
    ensure(took < AUT_BUDGET, || format!("took {took:?}"))?;
    Ok(format!(
        "{} instances in {took:.2?}; normalizer brute-forced for {}",
        cases.len(),
        brute.join(", ")
    ))
}

fn biconditional() -> Outcome {
    let caps = Caps::aut_suite();
    for name in ["Z4", "Z8", "S3", "D4"] {
        let g = lookup(name, false).unwrap().group(&caps).unwrap();
        let s = basis_for(&g, BasisPolicy::All, &caps).unwrap();
        let ctx = AutContext::new(&g, &s, &caps).map_err(|e| format!("{name}: {e}"))?;
        let check = ctx.check_biconditional(2);
        ensure(check.passed, || format!("{name}: {:?}", check.witness))?;
    }
    Ok("Z4, Z8, S3, D4 over all single and double coset choices".into())
}

fn out_values() -> Outcome {
    let caps = Caps::default();
    let expected = [("S3", 6, 1), ("Z8", 4, 4), ("D4", 8, 2), ("Q8", 24, 6)];
    let mut found = Vec::new();
    for (name, aut_order, out_order) in expected {
        let g = lookup(name, false).unwrap().group(&caps).unwrap();
        let oracle = brute_automorphisms(&g, &caps).map_err(|e| e.to_string())?;
        let p = inn_out(&g, &caps).map_err(|e| e.to_string())?;
        ensure(oracle.order() == aut_order, || {
            format!("{name}: oracle |Aut| = {}", oracle.order())
        })?;
        ensure(p.aut.elements() == oracle.elements(), || {
            format!("{name}: Aut differs from oracle")
        })?;
        ensure(p.out_reps.len() == out_order, || {
            format!("{name}: |Out| = {}", p.out_reps.len())
        })?;
        let index = g.order() / g.center().len();
        ensure(p.inn.len() == index, || {
            format!("{name}: |Inn| = {} but [G:Z] = {index}", p.inn.len())
        })?;
        found.push(format!("|Out({name})| = {out_order}"));
    }
    Ok(found.join(", "))
}

fn tower() -> Outcome {
    let start = Instant::now();
    let sys = InverseSystem::two_adic(TOWER_DEPTH).map_err(|e| e.to_string())?;
    for d in 0..=TOWER_DEPTH {
        sys.lazy_eager_agree(d)
            .map_err(|e| format!("depth {d}: {e}"))?;
        let n = sys.filter_count(d).map_err(|e| e.to_string())?;
        ensure(n == 1 << d, || format!("depth {d}: {n} filters"))?;
    }
    let took = start.elapsed();
    ensure(took < TOWER_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("2-adic depths 0..={TOWER_DEPTH} in {took:.2?}"))
}

fn determinism() -> Outcome {
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_duality"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{args:?} exited with {}", out.status)
        })?;
        Ok(out.stdout)
    };
    for args in [
        &["roundtrip", "--group", "S3", "--seed", "3"][..],
        &["aut", "--group", "S3"][..],
        &["roundtrip", "--group", "Q8"][..],
        &["aut", "--group", "Z8"][..],
    ] {
        let first = run(args)?;
        ensure(!first.is_empty() && first == run(args)?, || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok("roundtrip and aut reports are byte-identical across runs".into())
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 9] = [
        ("axiom suite", axiom_suite),
        ("filter bijection", bijection),
        ("eta_G round trip", eta_g),
        ("eta_M round trip", eta_m),
        ("automorphism normalizer", aut_suite),
        ("basis biconditional", biconditional),
        ("Out oracle", out_values),
        ("profinite tower", tower),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
