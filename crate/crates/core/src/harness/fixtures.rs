//! Known values for the catalogued spaces and their canonical bases.

use serde::{Deserialize, Serialize};

use crate::estimate::{Direction, Estimate};
use crate::spaces::SpaceKind;

/// A closed interval; `lower == upper` for exactly known values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixtureValue {
    pub lower: f64,
    pub upper: f64,
}

impl FixtureValue {
    pub const fn exact(v: f64) -> Self {
        FixtureValue { lower: v, upper: v }
    }

    pub const fn interval(lower: f64, upper: f64) -> Self {
        FixtureValue { lower, upper }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// One estimate per side (a single one when exact).
    pub fn estimates(&self, method: &str) -> Vec<Estimate> {
        if self.is_exact() {
            vec![Estimate::exact(self.lower, method)]
        } else {
            vec![
                Estimate::new(self.lower, Direction::LowerBound, method),
                Estimate::new(self.upper, Direction::UpperBound, method),
            ]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixtureRecord {
    pub space: SpaceKind,
    pub quantity: &'static str,
    pub value: FixtureValue,
    pub source: &'static str,
    /// Whether a finite-section computation in this crate reproduces the value.
    pub reproduced: bool,
}

/// Structural facts used as rule hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpaceFacts {
    pub space: SpaceKind,
    pub description: &'static str,
    pub unconditional: bool,
    pub shrinking: bool,
    pub boundedly_complete: bool,
    pub contains_l1: bool,
    pub contains_c0: bool,
}

const fn rec(
    space: SpaceKind,
    quantity: &'static str,
    value: FixtureValue,
    source: &'static str,
    reproduced: bool,
) -> FixtureRecord {
    FixtureRecord {
        space,
        quantity,
        value,
        source,
        reproduced,
    }
}

const E1: FixtureValue = FixtureValue::exact(1.0);
const E0: FixtureValue = FixtureValue::exact(0.0);

const NONREFLEXIVE: &str = "the unit ball of a nonreflexive space has weak compactness defect 1";
const SEPARABLE: &str = "separable space: countable dense subset";
const NONSEPARABLE: &str = "contains an isometric copy of l-infinity";

use SpaceKind::{CWithUnit, JamesSumming, SummingC0, C0, L1};

const FIXTURES: &[FixtureRecord] = &[
    // c0, unit vector basis
    rec(
        C0,
        "sh",
        E0,
        "unconditional basis of a space without l1 copies is shrinking",
        false,
    ),
    rec(
        C0,
        "bc1",
        E1,
        "partial sums of a_i = 1 stay in the ball and never converge",
        true,
    ),
    rec(
        C0,
        "bc2",
        E1,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        C0,
        "bc3",
        E1,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(C0, "K", E1, "monotone basis", true),
    rec(C0, "Ku", E1, "1-unconditional basis", true),
    rec(
        C0,
        "sh_dual",
        E1,
        "coordinate functionals form the unit basis of l1",
        false,
    ),
    rec(
        C0,
        "bc2_dual",
        E0,
        "the unit basis of l1 is boundedly complete",
        false,
    ),
    rec(C0, "sep", E0, SEPARABLE, false),
    rec(C0, "sep_dual", E0, "the dual l1 is separable", false),
    rec(C0, "sep_bidual", E1, NONSEPARABLE, false),
    rec(
        C0,
        "alpha_l1",
        E0,
        "c0 has no subspace isomorphic to l1",
        false,
    ),
    rec(C0, "alpha_c0", E1, "identity embedding", true),
    rec(C0, "alpha_l1_dual", E1, "the dual is l1", false),
    rec(C0, "wck", E1, NONREFLEXIVE, false),
    rec(C0, "wk", E1, NONREFLEXIVE, false),
    // l1, unit vector basis
    rec(
        L1,
        "sh",
        E1,
        "the all-ones functional keeps tail norm 1",
        true,
    ),
    rec(L1, "bc1", E0, "bounded partial sums in l1 converge", false),
    rec(
        L1,
        "bc2",
        E0,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        L1,
        "bc3",
        E0,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(L1, "K", E1, "monotone basis", true),
    rec(L1, "Ku", E1, "1-unconditional basis", true),
    rec(
        L1,
        "sh_dual",
        E0,
        "coordinate functionals span c0 isometrically",
        false,
    ),
    rec(
        L1,
        "bc2_dual",
        E1,
        "coordinate functionals span c0 isometrically",
        false,
    ),
    rec(L1, "sep", E0, SEPARABLE, false),
    rec(L1, "sep_dual", E1, NONSEPARABLE, false),
    rec(L1, "sep_bidual", E1, NONSEPARABLE, false),
    rec(L1, "alpha_l1", E1, "identity embedding", true),
    rec(
        L1,
        "alpha_c0",
        E0,
        "l1 has no subspace isomorphic to c0",
        false,
    ),
    rec(L1, "wck", E1, NONREFLEXIVE, false),
    rec(L1, "wk", E1, NONREFLEXIVE, false),
    // c0, summing basis
    rec(
        SummingC0,
        "sh",
        E1,
        "the first coordinate functional keeps tail norm 1",
        true,
    ),
    rec(
        SummingC0,
        "bc1",
        E1,
        "partial sums of alternating signs stay in the ball",
        true,
    ),
    rec(
        SummingC0,
        "bc2",
        FixtureValue::interval(1.0, 2.0),
        "between bc1 and K bc1",
        false,
    ),
    rec(
        SummingC0,
        "bc3",
        FixtureValue::interval(1.0, 2.0),
        "between bc1 and K bc1",
        false,
    ),
    rec(
        SummingC0,
        "K",
        FixtureValue::exact(2.0),
        "largest partial-sum projection norm",
        true,
    ),
    rec(SummingC0, "sep", E0, SEPARABLE, false),
    rec(SummingC0, "sep_dual", E0, "the dual l1 is separable", false),
    rec(SummingC0, "sep_bidual", E1, NONSEPARABLE, false),
    rec(
        SummingC0,
        "alpha_l1",
        E0,
        "c0 has no subspace isomorphic to l1",
        false,
    ),
    rec(SummingC0, "alpha_c0", E1, "identity embedding", false),
    rec(SummingC0, "alpha_l1_dual", E1, "the dual is l1", false),
    rec(SummingC0, "wck", E1, NONREFLEXIVE, false),
    rec(SummingC0, "wk", E1, NONREFLEXIVE, false),
    // The summing basis as a subset of c0 and of l-infinity.
    rec(
        SummingC0,
        "wck_set",
        E1,
        "standard argument, not reproduced here",
        false,
    ),
    rec(
        SummingC0,
        "wk_set",
        E1,
        "standard argument, not reproduced here",
        false,
    ),
    rec(
        SummingC0,
        "wck_set_linf",
        FixtureValue::exact(0.5),
        "standard argument, not reproduced here",
        false,
    ),
    rec(
        SummingC0,
        "wk_set_linf",
        FixtureValue::exact(0.5),
        "standard argument, not reproduced here",
        false,
    ),
    // c with e_0 = (1, 1, ...)
    rec(
        CWithUnit,
        "sh",
        E0,
        "unconditional basis of a space without l1 copies is shrinking",
        false,
    ),
    rec(
        CWithUnit,
        "bc1",
        FixtureValue::exact(2.0),
        "a_0 = -1 and a_n = 2 give blocks of norm 2",
        true,
    ),
    rec(
        CWithUnit,
        "bc2",
        FixtureValue::exact(2.0),
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        CWithUnit,
        "bc3",
        FixtureValue::exact(2.0),
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(CWithUnit, "K", E1, "monotone basis", true),
    rec(
        CWithUnit,
        "Ku",
        FixtureValue::exact(3.0),
        "flipping e_0 against the jump witness",
        true,
    ),
    rec(CWithUnit, "sep", E0, SEPARABLE, false),
    rec(CWithUnit, "sep_dual", E0, "the dual l1 is separable", false),
    rec(CWithUnit, "sep_bidual", E1, NONSEPARABLE, false),
    rec(
        CWithUnit,
        "alpha_l1",
        E0,
        "c has no subspace isomorphic to l1",
        false,
    ),
    rec(
        CWithUnit,
        "alpha_c0",
        E1,
        "c0 is an isometric subspace",
        false,
    ),
    rec(CWithUnit, "alpha_l1_dual", E1, "the dual is l1", false),
    rec(CWithUnit, "wck", E1, NONREFLEXIVE, false),
    rec(CWithUnit, "wk", E1, NONREFLEXIVE, false),
    // James space, unit vector basis
    rec(
        SpaceKind::James,
        "sh",
        E0,
        "the unit vector basis of James space is shrinking",
        false,
    ),
    rec(
        SpaceKind::James,
        "bc1",
        E1,
        "partial sums of a_i = 1 have norm 1 and blocks of norm 1",
        true,
    ),
    rec(
        SpaceKind::James,
        "bc2",
        E1,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        SpaceKind::James,
        "bc3",
        E1,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(SpaceKind::James, "K", E1, "monotone basis", true),
    rec(SpaceKind::James, "sep", E0, SEPARABLE, false),
    rec(
        SpaceKind::James,
        "sep_dual",
        E0,
        "the dual of James space is separable",
        false,
    ),
    rec(
        SpaceKind::James,
        "sep_bidual",
        E0,
        "the bidual of James space is separable",
        false,
    ),
    rec(
        SpaceKind::James,
        "alpha_l1",
        E0,
        "James space has no subspace isomorphic to l1",
        false,
    ),
    rec(
        SpaceKind::James,
        "alpha_c0",
        E0,
        "James space has no subspace isomorphic to c0",
        false,
    ),
    rec(SpaceKind::James, "wck", E1, NONREFLEXIVE, false),
    rec(SpaceKind::James, "wk", E1, NONREFLEXIVE, false),
    // James space, basis u_k = e_1 + ... + e_k
    rec(
        JamesSumming,
        "sh",
        E1,
        "the first coordinate functional keeps tail norm 1",
        true,
    ),
    rec(
        JamesSumming,
        "bc1",
        E0,
        "the summing basis of James space is boundedly complete",
        false,
    ),
    rec(
        JamesSumming,
        "bc2",
        E0,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        JamesSumming,
        "bc3",
        E0,
        "bc chain collapses for a monotone basis",
        false,
    ),
    rec(
        JamesSumming,
        "K",
        E1,
        "cyclic variation is invariant under constant shifts",
        true,
    ),
    rec(JamesSumming, "sep", E0, SEPARABLE, false),
    rec(
        JamesSumming,
        "sep_dual",
        E0,
        "the dual of James space is separable",
        false,
    ),
    rec(
        JamesSumming,
        "sep_bidual",
        E0,
        "the bidual of James space is separable",
        false,
    ),
    rec(
        JamesSumming,
        "alpha_l1",
        E0,
        "James space has no subspace isomorphic to l1",
        false,
    ),
    rec(
        JamesSumming,
        "alpha_c0",
        E0,
        "James space has no subspace isomorphic to c0",
        false,
    ),
    rec(JamesSumming, "wck", E1, NONREFLEXIVE, false),
    rec(JamesSumming, "wk", E1, NONREFLEXIVE, false),
];

const FACTS: &[SpaceFacts] = &[
    SpaceFacts {
        space: C0,
        description: "c0 with its unit vector basis",
        unconditional: true,
        shrinking: true,
        boundedly_complete: false,
        contains_l1: false,
        contains_c0: true,
    },
    SpaceFacts {
        space: L1,
        description: "l1 with its unit vector basis",
        unconditional: true,
        shrinking: false,
        boundedly_complete: true,
        contains_l1: true,
        contains_c0: false,
    },
    SpaceFacts {
        space: SummingC0,
        description: "c0 with the summing basis",
        unconditional: false,
        shrinking: false,
        boundedly_complete: false,
        contains_l1: false,
        contains_c0: true,
    },
    SpaceFacts {
        space: CWithUnit,
        description: "convergent sequences with e_0 = (1, 1, ...)",
        unconditional: true,
        shrinking: true,
        boundedly_complete: false,
        contains_l1: false,
        contains_c0: true,
    },
    SpaceFacts {
        space: SpaceKind::James,
        description: "James space with its unit vector basis",
        unconditional: false,
        shrinking: true,
        boundedly_complete: false,
        contains_l1: false,
        contains_c0: false,
    },
    SpaceFacts {
        space: JamesSumming,
        description: "James space with the summing basis",
        unconditional: false,
        shrinking: false,
        boundedly_complete: true,
        contains_l1: false,
        contains_c0: false,
    },
];

pub fn fixtures() -> &'static [FixtureRecord] {
    FIXTURES
}

pub fn lookup(space: SpaceKind, quantity: &str) -> Option<&'static FixtureRecord> {
    FIXTURES
        .iter()
        .find(|r| r.space == space && r.quantity == quantity)
}

pub fn facts(space: SpaceKind) -> &'static SpaceFacts {
    FACTS
        .iter()
        .find(|f| f.space == space)
        .expect("every kind has facts")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_lookups() {
        assert_eq!(lookup(SpaceKind::James, "bc1").unwrap().value, E1);
        assert_eq!(lookup(CWithUnit, "bc1").unwrap().value.lower, 2.0);
        assert_eq!(lookup(C0, "wck").unwrap().value, E1);
        assert!(lookup(SummingC0, "Ku").is_none());
    }

    #[test]
    fn every_record_has_a_source_and_is_ordered() {
        for r in fixtures() {
            assert!(!r.source.is_empty());
            assert!(r.value.lower <= r.value.upper);
        }
        for kind in SpaceKind::ALL {
            assert_eq!(facts(kind).space, kind);
        }
    }

    #[test]
    fn no_duplicate_records() {
        let all = fixtures();
        for (i, a) in all.iter().enumerate() {
            assert!(!all[i + 1..]
                .iter()
                .any(|b| b.space == a.space && b.quantity == a.quantity));
        }
    }
}
