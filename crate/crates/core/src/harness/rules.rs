//! Inequalities between quantities, evaluated with interval arithmetic on
//! nonnegative values.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::spaces::SpaceKind;

use super::fixtures::SpaceFacts;

/// Every quantity a rule may mention.
pub const QUANTITIES: &[&str] = &[
    "sh",
    "sh_dual",
    "bc1",
    "bc2",
    "bc3",
    "bc2_dual",
    "K",
    "Ku",
    "sep",
    "sep_dual",
    "sep_bidual",
    "wk",
    "wck",
    "alpha_l1",
    "alpha_c0",
    "alpha_l1_dual",
    "dhat",
    "wk_set",
    "wck_set",
    "wk_set_linf",
    "wck_set_linf",
];

/// Bounds that hold for every space, used when nothing better is known.
fn a_priori(q: &str) -> Interval {
    match q {
        "K" | "Ku" => Interval::new(1.0, f64::INFINITY),
        "sh" | "dhat" | "sep" | "sep_dual" | "sep_bidual" | "wk" | "wck" | "alpha_l1"
        | "alpha_c0" | "alpha_l1_dual" => Interval::new(0.0, 1.0),
        _ => Interval::new(0.0, f64::INFINITY),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    #[serde(serialize_with = "finite_or_string")]
    pub upper: f64,
}

fn finite_or_string<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Interval { lower, upper }
    }

    fn add(self, o: Interval) -> Interval {
        Interval::new(self.lower + o.lower, self.upper + o.upper)
    }

    fn mul(self, o: Interval) -> Interval {
        let lo = if self.lower == 0.0 || o.lower == 0.0 {
            0.0
        } else {
            self.lower * o.lower
        };
        let hi = if self.upper == 0.0 || o.upper == 0.0 {
            0.0
        } else {
            self.upper * o.upper
        };
        Interval::new(lo, hi)
    }

    fn recip(self) -> Interval {
        let inv = |v: f64| if v == 0.0 { f64::INFINITY } else { 1.0 / v };
        Interval::new(inv(self.upper), inv(self.lower))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == self.upper {
            write!(f, "{}", fmt_num(self.lower))
        } else {
            write!(f, "[{}, {}]", fmt_num(self.lower), fmt_num(self.upper))
        }
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    }
}

/// Nonnegative expression over quantities: sums, products, quotients and
/// integer powers.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Quantity(String),
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, u32),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let e = p.sum()?;
        if p.pos != p.chars.len() {
            return Err(Error::invalid(format!("trailing input in `{src}`")));
        }
        Ok(e)
    }

    pub fn quantities(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Quantity(q) => {
                if !out.contains(q) {
                    out.push(q.clone());
                }
            }
            Expr::Sum(a, b) | Expr::Product(a, b) | Expr::Quotient(a, b) => {
                a.quantities(out);
                b.quantities(out);
            }
            Expr::Power(a, _) => a.quantities(out),
        }
    }

    pub fn eval(&self, ctx: &Context) -> Interval {
        match self {
            Expr::Num(v) => Interval::new(*v, *v),
            Expr::Quantity(q) => ctx.bounds(q),
            Expr::Sum(a, b) => a.eval(ctx).add(b.eval(ctx)),
            Expr::Product(a, b) => a.eval(ctx).mul(b.eval(ctx)),
            Expr::Quotient(a, b) => a.eval(ctx).mul(b.eval(ctx).recip()),
            Expr::Power(a, k) => {
                let base = a.eval(ctx);
                (0..*k).fold(Interval::new(1.0, 1.0), |acc, _| acc.mul(base))
            }
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            e = Expr::Sum(Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = Box::new(self.power()?);
            e = if op == '*' {
                Expr::Product(Box::new(e), rhs)
            } else {
                Expr::Quotient(Box::new(e), rhs)
            };
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::invalid("exponent must be a nonnegative integer"))?;
            return Ok(Expr::Power(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(Error::invalid("missing `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                s.parse()
                    .map(Expr::Num)
                    .map_err(|_| Error::invalid(format!("bad number `{s}`")))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if !QUANTITIES.contains(&name.as_str()) {
                    return Err(Error::Unknown {
                        what: "quantity",
                        name,
                    });
                }
                Ok(Expr::Quantity(name))
            }
            other => Err(Error::invalid(format!(
                "unexpected {other:?} in expression"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Unconditional,
    Shrinking,
    BoundedlyComplete,
    NoL1Subspace,
    NoC0Subspace,
}

impl Hypothesis {
    pub fn holds(self, facts: &SpaceFacts) -> bool {
        match self {
            Hypothesis::Unconditional => facts.unconditional,
            Hypothesis::Shrinking => facts.shrinking,
            Hypothesis::BoundedlyComplete => facts.boundedly_complete,
            Hypothesis::NoL1Subspace => !facts.contains_l1,
            Hypothesis::NoC0Subspace => !facts.contains_c0,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Hypothesis::Unconditional => "unconditional basis",
            Hypothesis::Shrinking => "shrinking basis",
            Hypothesis::BoundedlyComplete => "boundedly complete basis",
            Hypothesis::NoL1Subspace => "no subspace isomorphic to l1",
            Hypothesis::NoC0Subspace => "no subspace isomorphic to c0",
        }
    }
}

/// `lhs <= rhs` under the listed hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRule {
    pub name: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub hypotheses: &'static [Hypothesis],
    pub statement: &'static str,
    /// Restricts the rule to one space, for quantities only that space carries.
    pub only: Option<SpaceKind>,
}

impl InequalityRule {
    pub fn applies_to(&self, kind: SpaceKind) -> bool {
        self.only.is_none_or(|k| k == kind)
    }
}

use Hypothesis::*;

const fn rule(
    name: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    hypotheses: &'static [Hypothesis],
    statement: &'static str,
) -> InequalityRule {
    InequalityRule {
        name,
        lhs,
        rhs,
        hypotheses,
        statement,
        only: None,
    }
}

const fn summing_set(
    name: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    statement: &'static str,
) -> InequalityRule {
    InequalityRule {
        only: Some(SpaceKind::SummingC0),
        ..rule(name, lhs, rhs, &[], statement)
    }
}

const RULES: &[InequalityRule] = &[
    rule("sh-below-distance", "sh", "dhat", &[], "non-shrinking defect is at most the distance of the dual ball to the span of coordinate functionals"),
    rule("distance-below-sh", "dhat", "(K+1)*sh", &[], "that distance is at most (K+1) times the non-shrinking defect"),
    rule("dual-bc2-below-sh", "bc2_dual/(2*K)", "sh", &[], "bc2 of the coordinate functionals controls sh from below"),
    rule("sh-below-dual-bc2", "sh", "K*bc2_dual", &[], "bc2 of the coordinate functionals controls sh from above"),
    rule("sh-below-l1-copies", "sh/Ku", "alpha_l1", &[Unconditional], "a non-shrinking unconditional basis yields l1 copies"),
    rule("l1-copies-below-dual-separation", "alpha_l1", "sep_dual", &[], "l1 copies force a nonseparable dual ball"),
    rule("dual-separation-below-distance", "sep_dual", "dhat", &[], "dual nonseparability is at most the distance to the coordinate span"),
    rule("bc1-below-bc2", "bc1", "bc2", &[], "bounded completeness defects increase along the chain"),
    rule("bc2-below-bc3", "bc2", "bc3", &[], "bounded completeness defects increase along the chain"),
    rule("bc3-below-k-bc1", "bc3", "K*bc1", &[], "the chain closes up to the basis constant"),
    rule("dual-sh-below-bc2", "sh_dual", "bc2", &[], "sh of the coordinate functionals is at most bc2"),
    rule("bc2-below-dual-sh", "bc2", "2*K^2*sh_dual", &[], "bc2 is at most 2K^2 times sh of the coordinate functionals"),
    rule("c0-copies-below-bc1", "alpha_c0/Ku", "bc1", &[Unconditional], "c0 copies force bounded partial sums that do not converge"),
    rule("bc1-below-c0-copies", "bc1", "Ku^3*alpha_c0", &[Unconditional], "non-convergent bounded partial sums yield c0 copies"),
    rule("bc3-below-wk", "bc3", "2*K^2*wk", &[], "bc3 is controlled by weak noncompactness of the ball"),
    rule("sh-below-wk", "sh", "4*K^3*wk", &[], "sh is controlled by weak noncompactness of the ball"),
    rule("wck-below-distance", "wck", "(K+1)*dhat", &[BoundedlyComplete], "for boundedly complete bases the distance controls wck"),
    rule("wck-below-bc2", "wck", "(K+1)^2*bc2", &[Shrinking], "for shrinking bases bc2 controls wck"),
    rule("wck-below-c0-copies", "wck/(Ku^3*K*(K+1)^2)", "alpha_c0", &[Unconditional, NoL1Subspace], "without l1 copies, wck yields c0 copies"),
    rule("c0-copies-below-dual-l1-copies", "alpha_c0", "alpha_l1_dual", &[Unconditional, NoL1Subspace], "c0 copies dualize to l1 copies"),
    rule("dual-l1-copies-below-wck", "alpha_l1_dual", "wck", &[Unconditional, NoL1Subspace], "l1 copies in the dual are bounded by wck"),
    rule("wck-below-l1-copies", "wck/(Ku*(K+1)^2)", "alpha_l1", &[Unconditional, NoC0Subspace], "without c0 copies, wck yields l1 copies"),
    rule("l1-copies-below-wck", "alpha_l1", "wck", &[], "l1 copies are bounded by wck of the ball"),
    rule("wck-below-bidual-separation", "wck/(Ku^3*K*(K+1)^2)", "sep_bidual", &[Unconditional], "wck forces a nonseparable bidual ball"),
    rule("bidual-separation-below-wk", "sep_bidual", "wk", &[Unconditional], "bidual nonseparability is at most wk"),
    rule("wck-below-wk", "wck", "wk", &[], "the two weak noncompactness measures are equivalent"),
    rule("wk-below-twice-wck", "wk", "2*wck", &[], "the two weak noncompactness measures are equivalent"),
    rule("separation-below-dual-separation", "sep", "sep_dual", &[], "nonseparability passes to the dual"),
    summing_set("set-wck-below-wk", "wck_set", "wk_set", "measures of the summing basis as a subset of c0"),
    summing_set("set-wk-below-twice-wck", "wk_set", "2*wck_set", "measures of the summing basis as a subset of c0"),
    summing_set("superspace-wk-below-subspace", "wk_set_linf", "wk_set", "passing to a superspace can only decrease wk"),
    summing_set("subspace-wk-below-twice-superspace", "wk_set", "2*wk_set_linf", "by at most a factor 2"),
    summing_set("superspace-wck-below-subspace", "wck_set_linf", "wck_set", "passing to a superspace can only decrease wck"),
    summing_set("subspace-wck-below-twice-superspace", "wck_set", "2*wck_set_linf", "by at most a factor 2"),
];

pub fn rules() -> &'static [InequalityRule] {
    RULES
}

pub fn lookup_rule(name: &str) -> Result<&'static InequalityRule> {
    RULES
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::Unknown {
            what: "rule",
            name: name.to_string(),
        })
}

/// Estimates of the quantities of one space and basis.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub facts: Option<SpaceFacts>,
    estimates: BTreeMap<String, Vec<Estimate>>,
}

impl Context {
    pub fn new(facts: Option<SpaceFacts>) -> Self {
        Context {
            facts,
            estimates: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, quantity: &str, estimate: Estimate) -> Result<()> {
        if !QUANTITIES.contains(&quantity) {
            return Err(Error::Unknown {
                what: "quantity",
                name: quantity.to_string(),
            });
        }
        self.estimates
            .entry(quantity.to_string())
            .or_default()
            .push(estimate);
        Ok(())
    }

    pub fn with(mut self, quantity: &str, estimate: Estimate) -> Self {
        self.insert(quantity, estimate).expect("known quantity");
        self
    }

    pub fn estimates(&self, quantity: &str) -> &[Estimate] {
        self.estimates
            .get(quantity)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has(&self, quantity: &str) -> bool {
        !self.estimates(quantity).is_empty()
    }

    /// Tightest certified bounds, falling back to the a priori range.
    pub fn bounds(&self, quantity: &str) -> Interval {
        let mut out = a_priori(quantity);
        for e in self.estimates(quantity).iter().filter(|e| e.certified) {
            if e.direction.bounds_below() {
                out.lower = out.lower.max(e.value);
            }
            if e.direction.bounds_above() {
                out.upper = out.upper.min(e.value);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Verified,
    Inconclusive,
    Violated,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Verified => "verified",
            CheckStatus::Inconclusive => "inconclusive",
            CheckStatus::Violated => "VIOLATED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub status: CheckStatus,
    pub lhs: Interval,
    pub rhs: Interval,
    pub tolerance: f64,
    pub reason: String,
}

/// Compares `lhs <= rhs` in the only directions the bounds allow.
pub fn evaluate_rule(rule: &InequalityRule, ctx: &Context, tolerance: f64) -> Result<CheckResult> {
    let lhs_expr = Expr::parse(rule.lhs)?;
    let rhs_expr = Expr::parse(rule.rhs)?;
    let lhs = lhs_expr.eval(ctx);
    let rhs = rhs_expr.eval(ctx);
    let result = |status, reason: String| CheckResult {
        status,
        lhs,
        rhs,
        tolerance,
        reason,
    };

    let unmet: Vec<&str> = match &ctx.facts {
        Some(facts) => rule
            .hypotheses
            .iter()
            .filter(|h| !h.holds(facts))
            .map(|h| h.describe())
            .collect(),
        None => rule.hypotheses.iter().map(|h| h.describe()).collect(),
    };
    if !unmet.is_empty() {
        return Ok(result(
            CheckStatus::Inconclusive,
            format!("hypothesis not established: {}", unmet.join(", ")),
        ));
    }

    if lhs.lower > rhs.upper + tolerance {
        return Ok(result(
            CheckStatus::Violated,
            format!(
                "certified lhs >= {} exceeds certified rhs <= {}; this is an implementation defect",
                fmt_num(lhs.lower),
                fmt_num(rhs.upper)
            ),
        ));
    }
    if lhs.upper <= rhs.lower + tolerance {
        return Ok(result(CheckStatus::Verified, String::new()));
    }
    let mut names = Vec::new();
    lhs_expr.quantities(&mut names);
    rhs_expr.quantities(&mut names);
    let missing: Vec<String> = names.into_iter().filter(|q| !ctx.has(q)).collect();
    let reason = if missing.is_empty() {
        "bound directions do not decide the comparison".to_string()
    } else {
        format!("no estimate for {}", missing.join(", "))
    };
    Ok(result(CheckStatus::Inconclusive, reason))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Estimate;

    #[test]
    fn expressions_parse_and_evaluate() {
        let ctx = Context::new(None)
            .with("K", Estimate::exact(2.0, "t"))
            .with("Ku", Estimate::exact(3.0, "t"))
            .with("wck", Estimate::exact(1.0, "t"));
        let e = Expr::parse("wck/(Ku^3*K*(K+1)^2)").unwrap();
        let v = e.eval(&ctx);
        assert!((v.lower - 1.0 / (27.0 * 2.0 * 9.0)).abs() < 1e-15);
        assert_eq!(v.lower, v.upper);
        assert!(matches!(Expr::parse("foo+1"), Err(Error::Unknown { .. })));
        assert!(Expr::parse("(K+1").is_err());
        assert!(Expr::parse("K K").is_err());
    }

    #[test]
    fn all_rules_parse() {
        for r in rules() {
            Expr::parse(r.lhs).unwrap();
            Expr::parse(r.rhs).unwrap();
        }
    }

    #[test]
    fn interval_edge_cases() {
        let ctx = Context::new(None).with("sh", Estimate::exact(1.0, "t"));
        // Ku is only known to be at least 1.
        let v = Expr::parse("sh/Ku").unwrap().eval(&ctx);
        assert_eq!((v.lower, v.upper), (0.0, 1.0));
        let ctx = Context::new(None).with("alpha_c0", Estimate::exact(0.0, "t"));
        let v = Expr::parse("Ku^3*alpha_c0").unwrap().eval(&ctx);
        assert_eq!((v.lower, v.upper), (0.0, 0.0));
    }

    #[test]
    fn chain_on_exact_values_is_verified() {
        let one = || Estimate::exact(1.0, "t");
        let ctx = Context::new(None)
            .with("K", one())
            .with("bc1", one())
            .with("bc2", one())
            .with("bc3", one());
        for name in ["bc1-below-bc2", "bc2-below-bc3", "bc3-below-k-bc1"] {
            let r = evaluate_rule(lookup_rule(name).unwrap(), &ctx, 1e-9).unwrap();
            assert_eq!(r.status, CheckStatus::Verified, "{name}");
        }
    }

    #[test]
    fn two_lower_bounds_are_inconclusive() {
        let ctx = Context::new(None)
            .with("sh", Estimate::lower(0.5, "t"))
            .with("dhat", Estimate::lower(0.7, "t"));
        let r = evaluate_rule(lookup_rule("sh-below-distance").unwrap(), &ctx, 1e-9).unwrap();
        assert_eq!(r.status, CheckStatus::Inconclusive);
    }

    #[test]
    fn certified_contradiction_is_violated() {
        let ctx = Context::new(None)
            .with("sh", Estimate::exact(2.0, "t"))
            .with("dhat", Estimate::exact(1.0, "t"));
        let r = evaluate_rule(lookup_rule("sh-below-distance").unwrap(), &ctx, 1e-9).unwrap();
        assert_eq!(r.status, CheckStatus::Violated);
        assert!(r.reason.contains("implementation defect"));
    }

    #[test]
    fn uncertified_bounds_are_ignored() {
        let ctx = Context::new(None)
            .with("sh", Estimate::lower(2.0, "t").uncertified())
            .with("dhat", Estimate::exact(1.0, "t"));
        let r = evaluate_rule(lookup_rule("sh-below-distance").unwrap(), &ctx, 1e-9).unwrap();
        assert_ne!(r.status, CheckStatus::Violated);
    }
}
