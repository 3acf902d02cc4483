//! Direction-tagged numeric results.
//!
//! Every quantity that leaves this crate is either an exact value or a
//! one-sided bound. Comparisons downstream are only ever made in the
//! direction the tag allows.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Exact,
    LowerBound,
    UpperBound,
}

impl Direction {
    pub fn bounds_below(self) -> bool {
        matches!(self, Direction::Exact | Direction::LowerBound)
    }

    pub fn bounds_above(self) -> bool {
        matches!(self, Direction::Exact | Direction::UpperBound)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Direction::Exact => "exact",
            Direction::LowerBound => "lower",
            Direction::UpperBound => "upper",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub direction: Direction,
    pub method: String,
    /// False when the bound direction rests on an unverified assumption
    /// (e.g. a witness family not known to be eventually periodic).
    pub certified: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Estimate {
    pub fn new(value: f64, direction: Direction, method: impl Into<String>) -> Self {
        Estimate {
            value,
            direction,
            method: method.into(),
            certified: true,
            params: BTreeMap::new(),
        }
    }

    pub fn exact(value: f64, method: impl Into<String>) -> Self {
        Estimate::new(value, Direction::Exact, method)
    }

    pub fn lower(value: f64, method: impl Into<String>) -> Self {
        Estimate::new(value, Direction::LowerBound, method)
    }

    pub fn upper(value: f64, method: impl Into<String>) -> Self {
        Estimate::new(value, Direction::UpperBound, method)
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn uncertified(mut self) -> Self {
        self.certified = false;
        self
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} [{}]", self.value, self.direction)?;
        if !self.certified {
            f.write_str(" (heuristic)")?;
        }
        Ok(())
    }
}

/// A certified two-sided bracket `lower <= true value <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
}

impl Enclosure {
    pub fn exact(value: f64) -> Self {
        Enclosure {
            lower: value,
            upper: value,
        }
    }

    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(
            lower <= upper + 1e-12,
            "inverted enclosure [{lower}, {upper}]"
        );
        Enclosure { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }

    /// Collapses to an `Exact` estimate when the bracket is tighter than `tol`,
    /// otherwise reports the lower end.
    pub fn to_estimate(&self, tol: f64, method: &str) -> Estimate {
        let est = if self.width() <= tol {
            Estimate::exact(self.mid(), method)
        } else {
            Estimate::lower(self.lower, method)
        };
        est.with_param("enclosure_lower", self.lower)
            .with_param("enclosure_upper", self.upper)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == self.upper {
            write!(f, "{:.12}", self.lower)
        } else {
            write!(f, "[{:.12}, {:.12}]", self.lower, self.upper)
        }
    }
}
