//! Norm kernels on finite sections of classical sequence spaces.
//!
//! A [`SpaceDescriptor`] names a kernel and a section dimension. Vectors are
//! given by their coefficients in the space's canonical basis and functionals
//! by their values on that basis.

pub mod james;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::estimate::Enclosure;
use crate::solver::conic;

pub use james::{james_norm, james_patterns, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `c_0` with its unit vector basis: `max |a_i|`.
    C0,
    /// `c` with the basis `e_0 = (1,1,...)`, `e_1, e_2, ...`:
    /// `max(|a_0|, |a_0 + a_i|)`. Coordinate 0 is `e_0`.
    CWithUnit,
    /// `l_1` with its unit vector basis.
    L1,
    /// `c_0` with the summing basis `s_n = e_1 + ... + e_n`:
    /// `max_k |a_k + ... + a_N|`.
    SummingC0,
    /// James space with its unit vector basis.
    James,
    /// James space with the basis `u_k = e_1 + ... + e_k`.
    JamesSumming,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::C0,
        SpaceKind::CWithUnit,
        SpaceKind::L1,
        SpaceKind::SummingC0,
        SpaceKind::James,
        SpaceKind::JamesSumming,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::C0 => "c0",
            SpaceKind::CWithUnit => "c",
            SpaceKind::L1 => "l1",
            SpaceKind::SummingC0 => "summing",
            SpaceKind::James => "james",
            SpaceKind::JamesSumming => "james-summing",
        }
    }

    pub fn is_polyhedral(self) -> bool {
        !self.is_james()
    }

    pub fn is_james(self) -> bool {
        matches!(self, SpaceKind::James | SpaceKind::JamesSumming)
    }

    /// Whether every canonical projection has norm one.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            SpaceKind::C0 | SpaceKind::L1 | SpaceKind::James | SpaceKind::JamesSumming
        )
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "c0" => SpaceKind::C0,
            "c" | "c-with-unit" => SpaceKind::CWithUnit,
            "l1" => SpaceKind::L1,
            "summing" | "summing-c0" => SpaceKind::SummingC0,
            "james" => SpaceKind::James,
            "james-summing" => SpaceKind::JamesSumming,
            other => {
                return Err(Error::Unknown {
                    what: "space kind",
                    name: other.to_string(),
                })
            }
        })
    }
}

/// A norm kernel together with a section dimension, written `kind:dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SpaceDescriptor {
    kind: SpaceKind,
    dim: usize,
}

impl SpaceDescriptor {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("section dimension must be at least 1"));
        }
        if kind.is_james() {
            Budget::check("james section", dim, Budget::current().james)?;
        }
        Ok(SpaceDescriptor { kind, dim })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len > self.dim {
            Err(Error::invalid(format!(
                "{len} coefficients exceed the dimension of {self}"
            )))
        } else {
            Ok(())
        }
    }

    /// Coordinates in the James unit vector basis.
    pub(crate) fn james_values(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            SpaceKind::JamesSumming => suffix_sums(x),
            _ => x.to_vec(),
        }
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(match self.kind {
            SpaceKind::C0 => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            SpaceKind::L1 => x.iter().map(|v| v.abs()).sum(),
            SpaceKind::SummingC0 => suffix_sums(x).iter().fold(0.0, |m, v| m.max(v.abs())),
            SpaceKind::CWithUnit => match x.split_first() {
                None => 0.0,
                Some((&a0, rest)) => rest.iter().fold(a0.abs(), |m, v| m.max((a0 + v).abs())),
            },
            SpaceKind::James | SpaceKind::JamesSumming => james_norm(&self.james_values(x))?,
        })
    }

    /// `norm` without length or budget checks, using the James DP at every
    /// size. The DP agrees with enumeration bit for bit.
    pub(crate) fn fast_norm(&self, x: &[f64]) -> f64 {
        match self.kind {
            SpaceKind::James | SpaceKind::JamesSumming => {
                james::variation_to_norm(james::max_variation_dp(&self.james_values(x)).0)
            }
            _ => self.norm(x).unwrap_or(f64::NAN),
        }
    }

    /// Dual norm of `f`. Exact for polyhedral kernels; a certified enclosure
    /// of width at most `1e-7` for the James kernels.
    pub fn dual_norm(&self, f: &[f64]) -> Result<Enclosure> {
        self.check_len(f.len())?;
        Ok(match self.kind {
            SpaceKind::C0 => Enclosure::exact(f.iter().map(|v| v.abs()).sum()),
            SpaceKind::L1 => Enclosure::exact(f.iter().fold(0.0, |m, v| m.max(v.abs()))),
            SpaceKind::SummingC0 => {
                let mut prev = 0.0;
                let mut sum = 0.0;
                for &v in f {
                    sum += (v - prev).abs();
                    prev = v;
                }
                Enclosure::exact(sum)
            }
            SpaceKind::CWithUnit => match f.split_first() {
                None => Enclosure::exact(0.0),
                Some((&f0, rest)) => {
                    let tail: f64 = rest.iter().sum();
                    let abs: f64 = rest.iter().map(|v| v.abs()).sum();
                    Enclosure::exact((f0 - tail).abs() + abs)
                }
            },
            SpaceKind::James | SpaceKind::JamesSumming => {
                let mask = vec![true; self.dim];
                conic::support_value(*self, f, &mask)?.value
            }
        })
    }

    /// A finite set `E` with `norm(x) = max_{e in E} <e, x>`, sorted and
    /// deduplicated.
    pub fn dual_extreme_points(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.dim;
        let mut rows: Vec<Vec<f64>> = match self.kind {
            SpaceKind::C0 => (0..n).map(|i| unit(n, i)).collect(),
            SpaceKind::SummingC0 => (0..n)
                .map(|k| (0..n).map(|i| if i >= k { 1.0 } else { 0.0 }).collect())
                .collect(),
            SpaceKind::CWithUnit => {
                let mut rows = vec![unit(n, 0)];
                for i in 1..n {
                    let mut r = unit(n, 0);
                    r[i] = 1.0;
                    rows.push(r);
                }
                rows
            }
            SpaceKind::L1 => {
                Budget::check("l1 sign vectors", n, Budget::current().signs)?;
                return Ok((0..1u64 << n)
                    .map(|mask| {
                        (0..n)
                            .map(|i| {
                                if mask >> (n - 1 - i) & 1 == 1 {
                                    1.0
                                } else {
                                    -1.0
                                }
                            })
                            .collect()
                    })
                    .collect());
            }
            SpaceKind::James | SpaceKind::JamesSumming => {
                return Err(Error::Unsupported {
                    kind: self.kind.to_string(),
                    what: "dual extreme points (the James ball is not polyhedral)",
                })
            }
        };
        let negated: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        rows.extend(negated);
        rows.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
        rows.dedup();
        Ok(rows)
    }

    /// The kernel of the subspace spanned by basis vectors `n+1, ..., dim`
    /// (0-based coordinates `n..dim`), with coordinates shifted to start at 0.
    pub fn tail(&self, n: usize) -> Result<SpaceDescriptor> {
        if n >= self.dim {
            return Err(Error::OutOfRange {
                index: n,
                max: self.dim - 1,
            });
        }
        if n == 0 {
            return Ok(*self);
        }
        let kind = match self.kind {
            SpaceKind::CWithUnit => SpaceKind::C0,
            k => k,
        };
        SpaceDescriptor::new(kind, self.dim - n)
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.dim)
    }
}

impl FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, dim) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("space `{s}` is not of the form kind:dim")))?;
        let dim: usize = dim
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("space dimension `{dim}` is not an integer")))?;
        SpaceDescriptor::new(kind.parse()?, dim)
    }
}

impl TryFrom<String> for SpaceDescriptor {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpaceDescriptor> for String {
    fn from(s: SpaceDescriptor) -> String {
        s.to_string()
    }
}

/// Coefficients of a vector; coordinates past the end are zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coeffs(pub Vec<f64>);

impl Deref for Coeffs {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Coeffs {
    fn from(v: Vec<f64>) -> Self {
        Coeffs(v)
    }
}

impl FromStr for Coeffs {
    type Err = Error;

    /// Parses a comma separated list of decimals.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Coeffs(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::invalid(format!("`{t}` is not a finite number")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Coeffs)
    }
}

/// A linear functional on a section, by its values on the basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    space: SpaceDescriptor,
    values: Vec<f64>,
}

impl Functional {
    pub fn new(space: SpaceDescriptor, values: Vec<f64>) -> Result<Self> {
        space.check_len(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("functional values must be finite"));
        }
        Ok(Functional { space, values })
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        self.values.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn dual_norm(&self) -> Result<Enclosure> {
        self.space.dual_norm(&self.values)
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// `out[i] = x[i] + x[i+1] + ...`
pub(crate) fn suffix_sums(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut s = 0.0;
    for i in (0..x.len()).rev() {
        s += x[i];
        out[i] = s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn descriptor_round_trip() {
        for s in [
            "c0:3",
            "c:4",
            "l1:2",
            "summing:6",
            "james:10",
            "james-summing:5",
        ] {
            assert_eq!(sp(s).to_string(), s);
        }
        assert!("james:0".parse::<SpaceDescriptor>().is_err());
        assert!(matches!(
            "james:30".parse::<SpaceDescriptor>(),
            Err(Error::Budget { .. })
        ));
        assert!("lp:3".parse::<SpaceDescriptor>().is_err());
        assert!("c0".parse::<SpaceDescriptor>().is_err());
        let json = serde_json::to_string(&sp("james:10")).unwrap();
        assert_eq!(json, "\"james:10\"");
    }

    #[test]
    fn polyhedral_norms() {
        assert_eq!(sp("summing:3").norm(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(sp("c:2").norm(&[-1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(sp("c0:3").norm(&[1.0, -4.0]).unwrap(), 4.0);
        assert_eq!(sp("l1:3").norm(&[1.0, -4.0]).unwrap(), 5.0);
        assert_eq!(sp("c0:3").norm(&[]).unwrap(), 0.0);
        assert!(sp("c0:1").norm(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn closed_form_dual_norms() {
        assert_eq!(sp("l1:3").dual_norm(&[1.0, 1.0, 1.0]).unwrap().upper, 1.0);
        assert_eq!(sp("c0:3").dual_norm(&[1.0, -2.0, 3.0]).unwrap().upper, 6.0);
        // first coordinate functional of the summing basis: a_1 = x_1 - x_2... in c0
        assert_eq!(
            sp("summing:4")
                .dual_norm(&[1.0, 0.0, 0.0, 0.0])
                .unwrap()
                .upper,
            2.0
        );
        assert_eq!(sp("summing:4").dual_norm(&[1.0; 4]).unwrap().upper, 1.0);
        assert_eq!(sp("c:3").dual_norm(&[1.0, 0.0, 0.0]).unwrap().upper, 1.0);
    }

    #[test]
    fn extreme_points_of_small_sections() {
        assert_eq!(
            sp("c0:2").dual_extreme_points().unwrap(),
            vec![
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0]
            ]
        );
        assert_eq!(
            sp("summing:2").dual_extreme_points().unwrap(),
            vec![
                vec![-1.0, -1.0],
                vec![0.0, -1.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0]
            ]
        );
        assert_eq!(sp("l1:2").dual_extreme_points().unwrap().len(), 4);
        assert!(matches!(
            sp("james:3").dual_extreme_points(),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn tails() {
        assert_eq!(sp("c:5").tail(1).unwrap(), sp("c0:4"));
        assert_eq!(sp("c:5").tail(0).unwrap(), sp("c:5"));
        assert_eq!(
            sp("james-summing:6").tail(2).unwrap(),
            sp("james-summing:4")
        );
        assert!(sp("l1:3").tail(3).is_err());
    }

    #[test]
    fn coeffs_parse() {
        assert_eq!(
            "1, -2.5,3".parse::<Coeffs>().unwrap().0,
            vec![1.0, -2.5, 3.0]
        );
        assert!("".parse::<Coeffs>().unwrap().is_empty());
        assert!("1,x".parse::<Coeffs>().is_err());
        assert!("1,NaN".parse::<Coeffs>().is_err());
    }
}
