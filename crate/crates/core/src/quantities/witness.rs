//! Named witnesses: coefficient sequences whose partial sums stay in the
//! unit ball while failing to converge, and functionals whose tail norms do
//! not decay.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Functional, SpaceDescriptor, SpaceKind};

/// How the coefficients `a_1, a_2, ...` of a witness sequence are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffRule {
    /// A finite list; nothing is known beyond it.
    Explicit(Vec<f64>),
    /// `a_i = 1`.
    Ones,
    /// `a_i = (-1)^i`, starting with `a_1 = -1`.
    Alternating,
    /// `a_1 = -1`, then `a_i = 2`.
    UnitJump,
}

impl CoeffRule {
    pub fn coefficients(&self, m: usize) -> Result<Vec<f64>> {
        Ok(match self {
            CoeffRule::Explicit(v) => {
                if v.len() < m {
                    return Err(Error::invalid(format!(
                        "explicit witness has {} coefficients, horizon is {m}",
                        v.len()
                    )));
                }
                v[..m].to_vec()
            }
            CoeffRule::Ones => vec![1.0; m],
            CoeffRule::Alternating => (1..=m)
                .map(|i| if i % 2 == 1 { -1.0 } else { 1.0 })
                .collect(),
            CoeffRule::UnitJump => (0..m).map(|i| if i == 0 { -1.0 } else { 2.0 }).collect(),
        })
    }

    /// Named rules repeat with period at most two after the first term, so a
    /// gap seen in a window recurs arbitrarily far out.
    pub fn is_periodic(&self) -> bool {
        !matches!(self, CoeffRule::Explicit(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSequence {
    pub space: SpaceDescriptor,
    pub rule: CoeffRule,
    pub horizon: usize,
}

impl WitnessSequence {
    pub fn new(space: SpaceDescriptor, rule: CoeffRule, horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::invalid("a witness needs a horizon of at least 2"));
        }
        if horizon > space.dim() {
            return Err(Error::invalid(format!(
                "horizon {horizon} exceeds the dimension of {space}"
            )));
        }
        rule.coefficients(horizon)?;
        Ok(WitnessSequence {
            space,
            rule,
            horizon,
        })
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.rule
            .coefficients(self.horizon)
            .expect("checked on construction")
    }

    /// `S_1, ..., S_M` with `S_m` holding the first `m` coefficients.
    pub fn partial_sums(&self) -> Vec<Vec<f64>> {
        let a = self.coefficients();
        (1..=self.horizon).map(|m| a[..m].to_vec()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessShape {
    Sequence,
    Functional,
}

impl fmt::Display for WitnessShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessShape::Sequence => "sequence",
            WitnessShape::Functional => "functional",
        })
    }
}

/// A registered witness and the value of the quantity it certifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessInfo {
    pub name: &'static str,
    pub kind: SpaceKind,
    pub shape: WitnessShape,
    pub quantity: &'static str,
    pub value: f64,
    pub description: &'static str,
}

const REGISTRY: &[WitnessInfo] = &[
    WitnessInfo {
        name: "c0-ones",
        kind: SpaceKind::C0,
        shape: WitnessShape::Sequence,
        quantity: "bc1",
        value: 1.0,
        description: "a_i = 1 in the unit vector basis of c0",
    },
    WitnessInfo {
        name: "summing-alternating",
        kind: SpaceKind::SummingC0,
        shape: WitnessShape::Sequence,
        quantity: "bc1",
        value: 1.0,
        description: "a_i = (-1)^i in the summing basis of c0",
    },
    WitnessInfo {
        name: "c-unit-jump",
        kind: SpaceKind::CWithUnit,
        shape: WitnessShape::Sequence,
        quantity: "bc1",
        value: 2.0,
        description: "a_0 = -1, a_i = 2 in the basis e_0, e_1, ... of c",
    },
    WitnessInfo {
        name: "james-ones",
        kind: SpaceKind::James,
        shape: WitnessShape::Sequence,
        quantity: "bc1",
        value: 1.0,
        description: "a_i = 1 in the unit vector basis of James space",
    },
    WitnessInfo {
        name: "l1-ones",
        kind: SpaceKind::L1,
        shape: WitnessShape::Functional,
        quantity: "sh",
        value: 1.0,
        description: "the all-ones functional on l1",
    },
    WitnessInfo {
        name: "summing-first-coordinate",
        kind: SpaceKind::SummingC0,
        shape: WitnessShape::Functional,
        quantity: "sh",
        value: 1.0,
        description: "the first coordinate functional of c0, equal to 1 on every s_n",
    },
    WitnessInfo {
        name: "james-f1",
        kind: SpaceKind::JamesSumming,
        shape: WitnessShape::Functional,
        quantity: "sh",
        value: 1.0,
        description:
            "the first coordinate functional of James space, equal to 1 on every e_1 + ... + e_n",
    },
];

pub fn registry() -> &'static [WitnessInfo] {
    REGISTRY
}

pub fn lookup(name: &str) -> Result<&'static WitnessInfo> {
    let name = name.strip_prefix("witness:").unwrap_or(name);
    REGISTRY
        .iter()
        .find(|w| w.name == name)
        .ok_or_else(|| Error::Unknown {
            what: "witness",
            name: name.to_string(),
        })
}

impl WitnessInfo {
    fn space(&self, dim: usize) -> Result<SpaceDescriptor> {
        SpaceDescriptor::new(self.kind, dim)
    }

    fn expect(&self, shape: WitnessShape) -> Result<()> {
        if self.shape != shape {
            return Err(Error::invalid(format!(
                "witness `{}` is a {}, not a {shape}",
                self.name, self.shape
            )));
        }
        Ok(())
    }

    pub fn sequence(&self, dim: usize) -> Result<WitnessSequence> {
        self.expect(WitnessShape::Sequence)?;
        let rule = match self.name {
            "summing-alternating" => CoeffRule::Alternating,
            "c-unit-jump" => CoeffRule::UnitJump,
            _ => CoeffRule::Ones,
        };
        WitnessSequence::new(self.space(dim)?, rule, dim)
    }

    /// Every registered functional is constant on the basis.
    pub fn functional(&self, dim: usize) -> Result<Functional> {
        self.expect(WitnessShape::Functional)?;
        Functional::new(self.space(dim)?, vec![1.0; dim])
    }

    /// Whether `f` is this witness restricted to its section.
    pub fn matches(&self, f: &Functional) -> bool {
        self.shape == WitnessShape::Functional
            && f.space().kind() == self.kind
            && f.values().len() == f.space().dim()
            && f.values().iter().all(|v| *v == 1.0)
    }
}

/// The registered functional that `f` restricts, if any.
pub fn registered_functional(f: &Functional) -> Option<&'static WitnessInfo> {
    REGISTRY.iter().find(|w| w.matches(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules() {
        assert_eq!(
            CoeffRule::Alternating.coefficients(4).unwrap(),
            vec![-1.0, 1.0, -1.0, 1.0]
        );
        assert_eq!(
            CoeffRule::UnitJump.coefficients(3).unwrap(),
            vec![-1.0, 2.0, 2.0]
        );
        assert!(CoeffRule::Explicit(vec![1.0]).coefficients(2).is_err());
        assert!(!CoeffRule::Explicit(vec![1.0]).is_periodic());
    }

    #[test]
    fn lookups() {
        assert_eq!(lookup("witness:summing-alternating").unwrap().value, 1.0);
        assert_eq!(lookup("c-unit-jump").unwrap().value, 2.0);
        assert!(lookup("nope").is_err());
        assert!(lookup("l1-ones").unwrap().sequence(4).is_err());
        let f = lookup("james-f1").unwrap().functional(6).unwrap();
        assert_eq!(registered_functional(&f).unwrap().name, "james-f1");
    }

    #[test]
    fn partial_sums_grow_by_one_coordinate() {
        let w = lookup("c-unit-jump").unwrap().sequence(3).unwrap();
        assert_eq!(
            w.partial_sums(),
            vec![vec![-1.0], vec![-1.0, 2.0], vec![-1.0, 2.0, 2.0]]
        );
    }
}
