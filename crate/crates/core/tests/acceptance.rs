//! Acceptance gate. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bq_core::bases::BasisSection;
use bq_core::embeddings::{
    alpha_lower_bound, build_c0_embedding, build_l1_embedding, BlockSequence,
};
use bq_core::harness::{self, evaluate_rule, fixtures, rules, CheckStatus, Context, SuiteConfig};
use bq_core::quantities::{
    bc1_certificate, bc1_upper_check, sh_profile, witness, UpperCheckStatus,
};
use bq_core::spaces::james::{max_variation_dp, max_variation_exhaustive};
use bq_core::spaces::{Functional, SpaceDescriptor, SpaceKind};

const POLYHEDRAL_TOL: f64 = 1e-9;
const JAMES_TOL: f64 = 1e-6;
const CERTIFICATE_TOL: f64 = 1e-9;
const RANGE_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn space(kind: SpaceKind, dim: usize) -> SpaceDescriptor {
    SpaceDescriptor::new(kind, dim).expect("valid section")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn james_fixtures() -> Outcome {
    let sp = space(SpaceKind::James, 12);
    let mut checked = 0;
    for n in 1..=12 {
        for m in n..=12 {
            let x: Vec<f64> = (1..=12)
                .map(|i| if (n..=m).contains(&i) { 1.0 } else { 0.0 })
                .collect();
            let v = sp.norm(&x).map_err(|e| e.to_string())?;
            ensure(v == 1.0, || format!("norm of e_{n} + ... + e_{m} is {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} interval vectors have norm exactly 1"))
}

fn james_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..500 {
        let dim = rng.random_range(1..=10);
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                if trial % 2 == 0 {
                    f64::from(rng.random_range(-3i32..=3))
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect();
        let exhaustive = max_variation_exhaustive(&x).map_err(|e| e.to_string())?;
        let (dp, _) = max_variation_dp(&x);
        ensure(dp == exhaustive, || {
            format!("{x:?}: dp {dp} vs enumeration {exhaustive}")
        })?;
    }
    Ok("500 vectors, dp == enumeration".into())
}

fn bc1_fixtures() -> Outcome {
    let mut found = Vec::new();
    for (name, expected, tol) in [
        ("c0-ones", 1.0, POLYHEDRAL_TOL),
        ("summing-alternating", 1.0, POLYHEDRAL_TOL),
        ("c-unit-jump", 2.0, POLYHEDRAL_TOL),
        ("james-ones", 1.0, JAMES_TOL),
    ] {
        let w = witness::lookup(name)
            .and_then(|w| w.sequence(10))
            .map_err(|e| e.to_string())?;
        let cert = bc1_certificate(&w).map_err(|e| e.to_string())?;
        ensure((cert.value - expected).abs() <= tol, || {
            format!("{name}: certificate {} vs {expected}", cert.value)
        })?;
        found.push(format!("{name}={}", cert.value));
    }
    let check =
        bc1_upper_check(space(SpaceKind::SummingC0, 6), 1.0, 60, 0).map_err(|e| e.to_string())?;
    ensure(check.status == UpperCheckStatus::NotRefuted, || {
        "summing bound 1 was refuted".to_string()
    })?;
    Ok(format!("{}; summing bound 1 not refuted", found.join(" ")))
}

fn sh_fixtures() -> Outcome {
    const N: usize = 12;
    for (name, kind, tol) in [
        ("l1-ones", SpaceKind::L1, POLYHEDRAL_TOL),
        (
            "summing-first-coordinate",
            SpaceKind::SummingC0,
            POLYHEDRAL_TOL,
        ),
        ("james-f1", SpaceKind::JamesSumming, JAMES_TOL),
    ] {
        let section = BasisSection::new(space(kind, N));
        let f = witness::lookup(name)
            .and_then(|w| w.functional(N))
            .map_err(|e| e.to_string())?;
        let p = sh_profile(&section, &f).map_err(|e| e.to_string())?;
        ensure(p.profile.values.len() == N, || {
            format!("{name}: short profile")
        })?;
        for (n, v) in p.profile.values.iter().enumerate() {
            ensure(v.contains(1.0, tol) && v.width() <= tol, || {
                format!("{name}: tail norm at n = {n} is [{}, {}]", v.lower, v.upper)
            })?;
        }
    }
    Ok(format!("three witnesses constant 1 for n < {N}"))
}

fn tail_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let kind = SpaceKind::ALL[trial % SpaceKind::ALL.len()];
        let dim = rng.random_range(1..=8);
        let n = rng.random_range(0..dim);
        let values: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let section = BasisSection::new(space(kind, dim));
        let f = Functional::new(section.space(), values).map_err(|e| e.to_string())?;
        let tail = section.tail_norm(&f, n).map_err(|e| e.to_string())?;
        let dist = section
            .dist_to_initial_span(&f, n)
            .map_err(|e| e.to_string())?;
        let gap = (tail.mid() - dist.value.mid()).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-6, || format!("{kind}:{dim} n = {n}: gap {gap:e}"))?;
    }
    Ok(format!("200 functionals, worst gap {worst:.1e}"))
}

/// `max_theta ||M_theta||` on the summing section by enumerating sign vectors
/// and the vertices of the ball (the cube under suffix differences).
fn summing_unconditional_oracle(n: usize) -> f64 {
    let suffix_max = |x: &[f64]| {
        let mut acc = 0.0f64;
        let mut best = 0.0f64;
        for v in x.iter().rev() {
            acc += v;
            best = best.max(acc.abs());
        }
        best
    };
    let mut best = 0.0f64;
    for cube in 0..1u32 << n {
        let s: Vec<f64> = (0..n)
            .map(|i| if cube >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        let x: Vec<f64> = (0..n)
            .map(|i| s[i] - s.get(i + 1).copied().unwrap_or(0.0))
            .collect();
        for theta in 0..1u32 << n {
            let y: Vec<f64> = (0..n)
                .map(|i| if theta >> i & 1 == 1 { x[i] } else { -x[i] })
                .collect();
            best = best.max(suffix_max(&y));
        }
    }
    best
}

fn constants() -> Outcome {
    for kind in [SpaceKind::C0, SpaceKind::L1, SpaceKind::James] {
        for n in 1..=8 {
            let section = BasisSection::new(space(kind, n));
            let k = section.basis_constant().map_err(|e| e.to_string())?;
            ensure(k.value == 1.0, || format!("K of {kind}:{n} is {}", k.value))?;
            if !kind.is_james() {
                let ku = section
                    .unconditional_constant()
                    .map_err(|e| e.to_string())?;
                ensure(ku.value == 1.0, || {
                    format!("Ku of {kind}:{n} is {}", ku.value)
                })?;
            }
        }
    }
    let mut previous = 0.0;
    let mut values = Vec::new();
    for n in 2..=8 {
        let ku = BasisSection::new(space(SpaceKind::SummingC0, n))
            .unconditional_constant()
            .map_err(|e| e.to_string())?;
        let oracle = summing_unconditional_oracle(n);
        ensure((ku.value - oracle).abs() <= POLYHEDRAL_TOL, || {
            format!(
                "Ku of summing:{n} is {} but the oracle gives {oracle}",
                ku.value
            )
        })?;
        ensure(ku.value > previous, || {
            format!("Ku of summing:{n} did not increase")
        })?;
        previous = ku.value;
        values.push(ku.value.to_string());
    }
    Ok(format!(
        "K = 1 and Ku = 1 where expected; summing Ku for N = 2..8: {}",
        values.join(", ")
    ))
}

fn embeddings() -> Outcome {
    let sp = space(SpaceKind::L1, 5);
    let ones = Functional::new(sp, vec![1.0; 5]).map_err(|e| e.to_string())?;
    let l1 = build_l1_embedding(&BlockSequence::coordinates(sp), &ones)
        .and_then(|c| alpha_lower_bound(&c))
        .map_err(|e| e.to_string())?;
    let c0 = build_c0_embedding(&BlockSequence::coordinates(space(SpaceKind::C0, 5)))
        .and_then(|c| alpha_lower_bound(&c))
        .map_err(|e| e.to_string())?;
    ensure(l1.value == 1.0 && c0.value == 1.0, || {
        format!("identity alphas {} and {}", l1.value, c0.value)
    })?;

    let sp = space(SpaceKind::SummingC0, 6);
    let b = BlockSequence::from_cuts(sp, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0], &[0, 2, 4, 6])
        .map_err(|e| e.to_string())?;
    let f =
        Functional::new(sp, vec![0.0, -0.2, 0.0, -0.2, 0.0, -0.2]).map_err(|e| e.to_string())?;
    let cert = build_l1_embedding(&b, &f).map_err(|e| e.to_string())?;
    let closed_form = cert.c / cert.ku.value;
    ensure(cert.lower.value >= closed_form - CERTIFICATE_TOL, || {
        format!(
            "l1 certificate lower {} below c/Ku = {closed_form}",
            cert.lower.value
        )
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let kind = [SpaceKind::C0, SpaceKind::SummingC0, SpaceKind::CWithUnit][trial % 3];
        let dim = 8;
        let mut cuts: Vec<usize> = (1..dim).filter(|_| rng.random_bool(0.5)).collect();
        cuts.insert(0, 0);
        cuts.push(dim);
        let sp = space(kind, dim);
        let coefficients: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..1.0)).collect();
        let b = BlockSequence::from_cuts(sp, &coefficients, &cuts).map_err(|e| e.to_string())?;
        let cert = build_c0_embedding(&b).map_err(|e| e.to_string())?;
        let t: Vec<f64> = (0..b.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let image = cert.scale * sp.norm(&b.combination(&t)).map_err(|e| e.to_string())?;
        let (lo, hi) = cert.analytic_range(&t);
        ensure(lo - RANGE_TOL <= image && image <= hi + RANGE_TOL, || {
            format!("{kind}:{dim} cuts {cuts:?}: {image} outside [{lo}, {hi}]")
        })?;
    }
    Ok(format!(
        "identity alpha 1; l1 lower {:.6} >= c/Ku {:.6}; c0 range held on 100 vectors",
        cert.lower.value, closed_form
    ))
}

fn harness_suite() -> Outcome {
    let report = harness::run_suite(&SuiteConfig::shipped());
    ensure(report.summary.violated == 0, || {
        format!("{} violated", report.summary.violated)
    })?;
    ensure(report.errors.is_empty(), || {
        format!("{} errors", report.errors.len())
    })?;

    for kind in SpaceKind::ALL {
        if let (Some(wck), Some(wk)) = (fixtures::lookup(kind, "wck"), fixtures::lookup(kind, "wk"))
        {
            ensure(wck.value.lower <= wk.value.upper, || {
                format!("{kind}: wck above wk")
            })?;
            ensure(wk.value.lower <= 2.0 * wck.value.upper, || {
                format!("{kind}: wk above 2 wck")
            })?;
        }
        let mut ctx = Context::new(Some(*fixtures::facts(kind)));
        for record in fixtures::fixtures().iter().filter(|r| r.space == kind) {
            for e in record.value.estimates("fixture") {
                ctx.insert(record.quantity, e).map_err(|e| e.to_string())?;
            }
        }
        for name in ["bc1-below-bc2", "bc2-below-bc3", "bc3-below-k-bc1"] {
            let rule = rules::lookup_rule(name).map_err(|e| e.to_string())?;
            let r = evaluate_rule(rule, &ctx, harness::tolerance_for(kind))
                .map_err(|e| e.to_string())?;
            ensure(r.status != CheckStatus::Violated, || {
                format!("{kind}: {name} violated")
            })?;
        }
    }
    Ok(format!(
        "{} verified, {} inconclusive, 0 violated",
        report.summary.verified, report.summary.inconclusive
    ))
}

fn graceful_degradation() -> Outcome {
    let empty = Context::new(None);
    for rule in rules::rules() {
        let r = evaluate_rule(rule, &empty, POLYHEDRAL_TOL).map_err(|e| e.to_string())?;
        ensure(r.status == CheckStatus::Inconclusive, || {
            format!("{}: {}", rule.name, r.status)
        })?;
        ensure(!r.reason.is_empty(), || {
            format!("{}: silent inconclusive", rule.name)
        })?;
    }

    let report = harness::run_suite(&SuiteConfig::shipped());
    let mut registry_only = 0;
    for check in &report.checks {
        if check.result.status == CheckStatus::Inconclusive {
            ensure(!check.result.reason.is_empty(), || {
                format!("{}: no reason", check.rule)
            })?;
            registry_only += 1;
        }
    }
    Ok(format!(
        "{} rules inconclusive on an empty context; {registry_only} suite checks inconclusive with reasons",
        rules::rules().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "james norm fixtures",
            Duration::from_secs(5),
            james_fixtures,
        ),
        (
            "james dp against enumeration",
            Duration::from_secs(60),
            james_oracle,
        ),
        ("bc1 certificates", Duration::from_secs(30), bc1_fixtures),
        ("sh witness profiles", Duration::from_secs(30), sh_fixtures),
        (
            "tail norm equals distance",
            Duration::from_secs(120),
            tail_identity,
        ),
        ("basis constants", Duration::from_secs(60), constants),
        (
            "embedding certificates",
            Duration::from_secs(60),
            embeddings,
        ),
        ("harness suite", Duration::from_secs(120), harness_suite),
        (
            "graceful degradation",
            Duration::from_secs(120),
            graceful_degradation,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({elapsed:.2?}) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({elapsed:.2?}) {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
