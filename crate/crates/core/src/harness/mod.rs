//! Self-test harness: a registry of known values, inequality rules between
//! quantities, and a suite that feeds finite-section estimates into them.
//!
//! A `Violated` outcome means the numerics contradict a proved inequality,
//! so it always indicates a defect in this crate.

pub mod fixtures;
pub mod rules;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bases::BasisSection;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::quantities::witness::{self, WitnessShape};
use crate::quantities::{self, UpperCheck};
use crate::spaces::{SpaceDescriptor, SpaceKind};

pub use fixtures::{fixtures, FixtureRecord, FixtureValue, SpaceFacts};
pub use rules::{
    evaluate_rule, rules, CheckResult, CheckStatus, Context, InequalityRule, Interval,
};

pub const SCHEMA: u32 = 1;
pub const POLYHEDRAL_TOLERANCE: f64 = 1e-9;
pub const JAMES_TOLERANCE: f64 = 1e-6;

const DEFAULT_CONFIG: &str = include_str!("../../config/default.json");

pub fn tolerance_for(kind: SpaceKind) -> f64 {
    if kind.is_james() {
        JAMES_TOLERANCE
    } else {
        POLYHEDRAL_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpperCheckConfig {
    pub space: String,
    pub bound: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    50
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub schema: Option<u32>,
    pub seed: u64,
    /// Space descriptors such as `summing:8`.
    pub spaces: Vec<String>,
    /// Registered witness names; every applicable witness when absent.
    pub witnesses: Option<Vec<String>>,
    /// Rule names, or `all`.
    pub rules: Vec<String>,
    /// Caps checked before any computation, on top of the process caps.
    pub budgets: Option<Budget>,
    pub upper_checks: Vec<UpperCheckConfig>,
    pub timings: bool,
}

impl SuiteConfig {
    pub fn parse(src: &str) -> Result<Self> {
        let cfg: SuiteConfig = serde_json::from_str(src).map_err(|e| Error::Config {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if let Some(s) = cfg.schema {
            if s != SCHEMA {
                return Err(Error::Config {
                    line: 1,
                    column: 1,
                    message: format!("unsupported schema {s}, expected {SCHEMA}"),
                });
            }
        }
        Ok(cfg)
    }

    /// The configuration shipped with the crate.
    pub fn shipped() -> Self {
        SuiteConfig::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    pub fn shipped_source() -> &'static str {
        DEFAULT_CONFIG
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedEstimate {
    pub quantity: String,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceReport {
    pub space: String,
    pub estimates: Vec<NamedEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub space: String,
    pub inequality: String,
    #[serde(flatten)]
    pub result: CheckResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Resource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteError {
    pub context: String,
    pub kind: ErrorKind,
    pub message: String,
}

impl SuiteError {
    fn new(context: impl Into<String>, e: &Error) -> Self {
        SuiteError {
            context: context.into(),
            kind: if e.is_resource_failure() {
                ErrorKind::Resource
            } else {
                ErrorKind::Input
            },
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub verified: usize,
    pub inconclusive: usize,
    pub violated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub step: String,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub seed: u64,
    pub spaces: Vec<SpaceReport>,
    pub checks: Vec<RuleCheck>,
    pub upper_checks: Vec<UpperCheck>,
    pub errors: Vec<SuiteError>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    /// 0 clean, 1 any violation, 2 input errors, 3 budget or solver failures.
    pub fn exit_code(&self) -> i32 {
        if self.summary.violated > 0 {
            1
        } else if self.errors.iter().any(|e| e.kind == ErrorKind::Resource) {
            3
        } else if !self.errors.is_empty() {
            2
        } else {
            0
        }
    }
}

/// Section estimates as bounds on the quantities of the infinite basis.
fn section_estimates(
    space: SpaceDescriptor,
    witnesses: &Option<Vec<String>>,
) -> (Vec<NamedEstimate>, Vec<(String, Estimate)>, Vec<SuiteError>) {
    let mut shown = Vec::new();
    let mut context = Vec::new();
    let mut errors = Vec::new();
    let label = space.to_string();
    let section = BasisSection::new(space);

    let mut constant = |name: &str, quantity: &str, est: Result<Estimate>| match est {
        Ok(e) => {
            if e.direction.bounds_below() {
                let mut lower = Estimate::lower(e.value, format!("section {label}"));
                lower.certified = e.certified;
                context.push((quantity.to_string(), lower));
            }
            shown.push(NamedEstimate {
                quantity: name.to_string(),
                estimate: e,
            });
        }
        Err(e) => errors.push(SuiteError::new(format!("{label} {name}"), &e)),
    };
    constant("K_N", "K", section.basis_constant());
    constant("Ku_N", "Ku", section.unconditional_constant());

    for w in witness::registry()
        .iter()
        .filter(|w| w.kind == space.kind())
    {
        if let Some(names) = witnesses {
            if !names
                .iter()
                .any(|n| n.trim_start_matches("witness:") == w.name)
            {
                continue;
            }
        }
        let ctx = format!("{label} witness {}", w.name);
        let outcome = match w.shape {
            WitnessShape::Sequence => w
                .sequence(space.dim())
                .and_then(|s| quantities::bc1_certificate(&s))
                .map(|e| ("bc1", e)),
            WitnessShape::Functional => w
                .functional(space.dim())
                .and_then(|f| quantities::sh_profile(&section, &f))
                .map(|p| ("sh", p.summary)),
        };
        match outcome {
            Ok((q, e)) => {
                context.push((q.to_string(), e.clone()));
                shown.push(NamedEstimate {
                    quantity: format!("{q} ({})", w.name),
                    estimate: e,
                });
            }
            Err(e) => errors.push(SuiteError::new(ctx, &e)),
        }
    }
    (shown, context, errors)
}

fn check_budget(space: SpaceDescriptor, caps: Option<Budget>) -> Result<()> {
    if let Some(b) = caps {
        if space.kind().is_james() && space.dim() > b.james {
            return Err(Error::Budget {
                what: "james section",
                requested: space.dim(),
                limit: b.james,
            });
        }
        if space.kind().is_polyhedral() && space.dim() > b.signs {
            return Err(Error::Budget {
                what: "sign enumeration",
                requested: space.dim(),
                limit: b.signs,
            });
        }
    }
    Ok(())
}

pub fn run_suite(config: &SuiteConfig) -> Report {
    let mut report = Report {
        schema: SCHEMA,
        seed: config.seed,
        spaces: Vec::new(),
        checks: Vec::new(),
        upper_checks: Vec::new(),
        errors: Vec::new(),
        summary: Summary::default(),
        timings: config.timings.then(Vec::new),
    };

    if let Some(names) = &config.witnesses {
        for n in names {
            if let Err(e) = witness::lookup(n) {
                report.errors.push(SuiteError::new("witnesses", &e));
            }
        }
    }

    let mut kinds: Vec<SpaceKind> = Vec::new();
    let mut contexts: BTreeMap<SpaceKind, Context> = BTreeMap::new();
    for src in &config.spaces {
        let kind = src
            .split(':')
            .next()
            .and_then(|k| k.trim().parse::<SpaceKind>().ok());
        if let Some(k) = kind {
            if !kinds.contains(&k) {
                kinds.push(k);
                let mut ctx = Context::new(Some(*fixtures::facts(k)));
                for r in fixtures().iter().filter(|r| r.space == k) {
                    for e in r.value.estimates(&format!("registry: {}", r.source)) {
                        ctx.insert(r.quantity, e)
                            .expect("registry quantities are known");
                    }
                }
                contexts.insert(k, ctx);
            }
        }
        let started = Instant::now();
        let space = src
            .parse::<SpaceDescriptor>()
            .and_then(|s| check_budget(s, config.budgets).map(|_| s));
        let space = match space {
            Ok(s) => s,
            Err(e) => {
                report.errors.push(SuiteError::new(src.clone(), &e));
                continue;
            }
        };
        let (shown, estimates, errors) = section_estimates(space, &config.witnesses);
        let ctx = contexts
            .get_mut(&space.kind())
            .expect("context created above");
        for (q, e) in estimates {
            ctx.insert(&q, e).expect("known quantity");
        }
        report.errors.extend(errors);
        report.spaces.push(SpaceReport {
            space: space.to_string(),
            estimates: shown,
        });
        if let Some(t) = report.timings.as_mut() {
            t.push(Timing {
                step: format!("space {space}"),
                millis: started.elapsed().as_secs_f64() * 1e3,
            });
        }
    }

    for uc in &config.upper_checks {
        let started = Instant::now();
        let outcome = uc
            .space
            .parse::<SpaceDescriptor>()
            .and_then(|s| quantities::bc1_upper_check(s, uc.bound, uc.trials, config.seed));
        match outcome {
            Ok(r) => report.upper_checks.push(r),
            Err(e) => report
                .errors
                .push(SuiteError::new(format!("upper check {}", uc.space), &e)),
        }
        if let Some(t) = report.timings.as_mut() {
            t.push(Timing {
                step: format!("upper check {}", uc.space),
                millis: started.elapsed().as_secs_f64() * 1e3,
            });
        }
    }

    let selected: Vec<&InequalityRule> = if config.rules.iter().any(|r| r == "all") {
        rules().iter().collect()
    } else {
        config
            .rules
            .iter()
            .filter_map(|name| match rules::lookup_rule(name) {
                Ok(r) => Some(r),
                Err(e) => {
                    report.errors.push(SuiteError::new("rules", &e));
                    None
                }
            })
            .collect()
    };

    for kind in &kinds {
        let ctx = &contexts[kind];
        let tol = tolerance_for(*kind);
        for q in rules::QUANTITIES {
            let b = ctx.bounds(q);
            if b.lower > b.upper + tol {
                report.checks.push(RuleCheck {
                    rule: format!("consistency:{q}"),
                    space: kind.name().to_string(),
                    inequality: format!("lower({q}) <= upper({q})"),
                    result: CheckResult {
                        status: CheckStatus::Violated,
                        lhs: Interval::new(b.lower, b.lower),
                        rhs: Interval::new(b.upper, b.upper),
                        tolerance: tol,
                        reason: "estimates of one quantity contradict each other; this is an implementation defect"
                            .into(),
                    },
                });
            }
        }
    }
    for rule in &selected {
        for kind in kinds.iter().filter(|k| rule.applies_to(**k)) {
            let tol = tolerance_for(*kind);
            match evaluate_rule(rule, &contexts[kind], tol) {
                Ok(result) => report.checks.push(RuleCheck {
                    rule: rule.name.to_string(),
                    space: kind.name().to_string(),
                    inequality: format!("{} <= {}", rule.lhs, rule.rhs),
                    result,
                }),
                Err(e) => report.errors.push(SuiteError::new(rule.name, &e)),
            }
        }
    }

    for c in &report.checks {
        match c.result.status {
            CheckStatus::Verified => report.summary.verified += 1,
            CheckStatus::Inconclusive => report.summary.inconclusive += 1,
            CheckStatus::Violated => report.summary.violated += 1,
        }
    }
    report
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{s:<w$}", w = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub(crate) fn estimate_cells(e: &Estimate) -> [String; 3] {
    [
        rules::fmt_num(e.value),
        e.direction.tag().to_string(),
        if e.certified {
            "certified"
        } else {
            "heuristic"
        }
        .to_string(),
    ]
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    if !report.spaces.is_empty() {
        let mut rows = vec![vec![
            "space".to_string(),
            "quantity".into(),
            "value".into(),
            "direction".into(),
            "status".into(),
            "method".into(),
        ]];
        for s in &report.spaces {
            for ne in &s.estimates {
                let [v, d, c] = estimate_cells(&ne.estimate);
                rows.push(vec![
                    s.space.clone(),
                    ne.quantity.clone(),
                    v,
                    d,
                    c,
                    ne.estimate.method.clone(),
                ]);
            }
        }
        out.push_str(&table(&rows));
        out.push('\n');
    }
    if !report.checks.is_empty() {
        let mut rows = vec![vec![
            "rule".to_string(),
            "space".into(),
            "status".into(),
            "lhs".into(),
            "rhs".into(),
            "tol".into(),
            "note".into(),
        ]];
        for c in &report.checks {
            rows.push(vec![
                c.rule.clone(),
                c.space.clone(),
                c.result.status.to_string(),
                c.result.lhs.to_string(),
                c.result.rhs.to_string(),
                format!("{:e}", c.result.tolerance),
                c.result.reason.clone(),
            ]);
        }
        out.push_str(&table(&rows));
        out.push('\n');
    }
    for u in &report.upper_checks {
        let _ = writeln!(
            out,
            "bc1 <= {} on {}: {:?} after {} sequences (largest block {}); {}",
            rules::fmt_num(u.bound),
            u.space,
            u.status,
            u.trials,
            rules::fmt_num(u.largest_block),
            u.note
        );
    }
    for e in &report.errors {
        let _ = writeln!(out, "error [{:?}] {}: {}", e.kind, e.context, e.message);
    }
    if let Some(ts) = &report.timings {
        for t in ts {
            let _ = writeln!(out, "time {}: {:.1} ms", t.step, t.millis);
        }
    }
    let s = report.summary;
    let _ = writeln!(
        out,
        "summary: {} verified, {} inconclusive, {} violated",
        s.verified, s.inconclusive, s.violated
    );
    out
}

/// Every estimate and every rule side, one per line.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from("space,quantity,value,direction,certified,method\n");
    for s in &report.spaces {
        for ne in &s.estimates {
            let e = &ne.estimate;
            let _ = writeln!(
                out,
                "{},{},{},{},{},\"{}\"",
                s.space,
                ne.quantity,
                e.value,
                e.direction.tag(),
                e.certified,
                e.method
            );
        }
    }
    for c in &report.checks {
        for (side, iv) in [("lhs", c.result.lhs), ("rhs", c.result.rhs)] {
            let _ = writeln!(
                out,
                "{},{}:{},{},lower,true,\"{}\"",
                c.space, c.rule, side, iv.lower, c.result.status
            );
            let _ = writeln!(
                out,
                "{},{}:{},{},upper,true,\"{}\"",
                c.space, c.rule, side, iv.upper, c.result.status
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_empty_report() {
        let r = run_suite(&SuiteConfig::parse("{}").unwrap());
        assert!(r.spaces.is_empty() && r.checks.is_empty() && r.errors.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = SuiteConfig::parse("{\n  \"spaces\": [\"c0:3\"],\n  \"bogus\": 1\n}").unwrap_err();
        match e {
            Error::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SuiteConfig::parse("{\"schema\": 2}").is_err());
    }

    #[test]
    fn oversized_james_is_reported_and_suite_continues() {
        let cfg = SuiteConfig {
            spaces: vec!["james:30".into(), "c0:4".into()],
            rules: vec!["bc1-below-bc2".into()],
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].kind, ErrorKind::Resource);
        assert_eq!(r.spaces.len(), 1);
        assert_eq!(r.checks.len(), 2);
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn config_budgets_are_enforced() {
        let cfg = SuiteConfig {
            spaces: vec!["james:8".into()],
            budgets: Some(Budget {
                james: 6,
                ..Budget::default()
            }),
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg);
        assert!(r.spaces.is_empty());
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn unknown_rule_is_an_input_error() {
        let cfg = SuiteConfig {
            rules: vec!["no-such-rule".into()],
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn small_suite_is_clean_and_deterministic() {
        let cfg = SuiteConfig {
            spaces: vec!["c0:4".into(), "summing:4".into(), "l1:4".into()],
            rules: vec!["all".into()],
            ..SuiteConfig::default()
        };
        let a = run_suite(&cfg);
        assert_eq!(a.summary.violated, 0, "{}", render_text(&a));
        assert!(a.summary.verified > 0);
        let b = run_suite(&cfg);
        assert_eq!(render_text(&a), render_text(&b));
        assert!(render_csv(&a).lines().count() > 1);
    }
}
