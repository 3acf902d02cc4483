//! Finite-section evaluations of the Cauchy gap `ca`, bounded completeness
//! witnesses (`bc1`) and shrinking witnesses (`sh`).

pub mod witness;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bases::{BasisSection, TailNormProfile};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::spaces::{unit, Functional, SpaceDescriptor};

pub use witness::{CoeffRule, WitnessInfo, WitnessSequence};

/// Slack allowed on the partial-sum ball constraint.
pub const BALL_TOLERANCE: f64 = 1e-12;
/// A block must beat the bound by this much to refute it.
pub const REFUTE_MARGIN: f64 = 1e-9;

/// `out[n-1] = max { ||S_l - S_k|| : n <= k < l <= M }` for `n = 1..M-1`.
pub fn gap_profile(space: SpaceDescriptor, partial_sums: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = partial_sums.len();
    if m < 2 {
        return Err(Error::invalid(
            "a gap profile needs at least two partial sums",
        ));
    }
    let mut out = vec![0.0f64; m - 1];
    let mut running = 0.0f64;
    for k in (0..m - 1).rev() {
        for l in k + 1..m {
            let a = &partial_sums[k];
            let b = &partial_sums[l];
            let len = a.len().max(b.len());
            let diff: Vec<f64> = (0..len)
                .map(|i| b.get(i).copied().unwrap_or(0.0) - a.get(i).copied().unwrap_or(0.0))
                .collect();
            running = running.max(space.norm(&diff)?);
        }
        out[k] = running;
    }
    Ok(out)
}

fn check_ball(w: &WitnessSequence) -> Result<()> {
    for (m, s) in w.partial_sums().iter().enumerate() {
        let norm = w.space.norm(s)?;
        if norm > 1.0 + BALL_TOLERANCE {
            return Err(Error::BallConstraint { m: m + 1, norm });
        }
    }
    Ok(())
}

/// Lower bound for `bc1` from the gap profile at `n = ceil(M/2)`.
pub fn bc1_certificate(w: &WitnessSequence) -> Result<Estimate> {
    bc1_certificate_at(w, w.horizon.div_ceil(2))
}

/// Lower bound for `bc1` from the gap profile at window start `n`
/// (`1 <= n < M`). Certified only for periodic coefficient rules.
pub fn bc1_certificate_at(w: &WitnessSequence, n: usize) -> Result<Estimate> {
    if n == 0 || n >= w.horizon {
        return Err(Error::OutOfRange {
            index: n,
            max: w.horizon - 1,
        });
    }
    check_ball(w)?;
    let profile = gap_profile(w.space, &w.partial_sums())?;
    let est = Estimate::lower(profile[n - 1], "windowed gap of a bounded witness")
        .with_param("N", w.space.dim() as f64)
        .with_param("horizon", w.horizon as f64)
        .with_param("anchor", n as f64);
    Ok(if w.rule.is_periodic() {
        est
    } else {
        est.uncertified()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpperCheckStatus {
    Refuted,
    NotRefuted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefutingWitness {
    pub coefficients: Vec<f64>,
    /// Block `S_l - S_k` with 1-based `k < l`.
    pub k: usize,
    pub l: usize,
    pub norm: f64,
    /// Name of the registered witness, when one was responsible.
    pub registered: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperCheck {
    pub space: SpaceDescriptor,
    pub bound: f64,
    pub status: UpperCheckStatus,
    pub trials: usize,
    pub largest_block: f64,
    pub witness: Option<RefutingWitness>,
    pub note: String,
}

/// Largest `t >= 0` with `||s + sign * t * e_m|| <= 1`, from the feasible side.
fn feasible_extent(space: SpaceDescriptor, s: &[f64], m: usize, sign: f64) -> f64 {
    let basis = unit(s.len(), m);
    let reach = 2.0 / space.fast_norm(&basis) + 1.0;
    let at = |t: f64| {
        let mut v = s.to_vec();
        v[m] += sign * t;
        space.fast_norm(&v)
    };
    let (mut lo, mut hi) = (0.0, reach);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn largest_block(space: SpaceDescriptor, a: &[f64]) -> (f64, usize, usize) {
    let m = a.len();
    let mut best = (0.0f64, 1, 2);
    for k in 1..m {
        let mut block = vec![0.0; m];
        for l in k + 1..=m {
            block[l - 1] = a[l - 1];
            let norm = space.fast_norm(&block);
            if norm > best.0 {
                best = (norm, k, l);
            }
        }
    }
    best
}

/// Randomized search for a bounded sequence of partial sums with a block of
/// norm above `bound`. Finding none is evidence, not proof.
pub fn bc1_upper_check(
    space: SpaceDescriptor,
    bound: f64,
    trials: usize,
    seed: u64,
) -> Result<UpperCheck> {
    if bound.is_nan() || bound < 0.0 {
        return Err(Error::invalid("the bound must be nonnegative"));
    }
    let mut report = UpperCheck {
        space,
        bound,
        status: UpperCheckStatus::NotRefuted,
        trials: 0,
        largest_block: 0.0,
        witness: None,
        note: String::new(),
    };
    if bound == f64::INFINITY {
        report.note = "an infinite bound cannot be exceeded".into();
        return Ok(report);
    }
    let dim = space.dim();
    if dim < 2 {
        report.note = "a one-dimensional section has no blocks after the first partial sum".into();
        return Ok(report);
    }

    let mut candidates: Vec<(Vec<f64>, Option<String>)> = Vec::new();
    for w in witness::registry() {
        if w.kind == space.kind() && w.shape == witness::WitnessShape::Sequence {
            candidates.push((w.sequence(dim)?.coefficients(), Some(w.name.to_string())));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let next = |strategy: usize, rng: &mut ChaCha8Rng| {
        let mut a = vec![0.0; dim];
        let mut flip = rng.random_bool(0.5);
        for m in 0..dim {
            let hi = feasible_extent(space, &a, m, 1.0);
            let lo = -feasible_extent(space, &a, m, -1.0);
            a[m] = match strategy {
                0 => {
                    if rng.random_bool(0.5) {
                        hi
                    } else {
                        lo
                    }
                }
                1 => {
                    flip = !flip;
                    if flip {
                        hi
                    } else {
                        lo
                    }
                }
                _ => {
                    if hi > lo {
                        rng.random_range(lo..=hi)
                    } else {
                        0.0
                    }
                }
            };
        }
        a
    };

    let total = candidates.len() + trials;
    for i in 0..total {
        let (a, registered) = if i < candidates.len() {
            candidates[i].clone()
        } else {
            (next(i % 3, &mut rng), None)
        };
        report.trials += 1;
        let (norm, k, l) = largest_block(space, &a);
        report.largest_block = report.largest_block.max(norm);
        if norm > bound + REFUTE_MARGIN {
            report.status = UpperCheckStatus::Refuted;
            report.witness = Some(RefutingWitness {
                coefficients: a,
                k,
                l,
                norm,
                registered,
            });
            report.note = "a block of bounded partial sums exceeds the bound".into();
            return Ok(report);
        }
    }
    report.note = format!(
        "no block above the bound in {} sequences; this is evidence, not a proof",
        report.trials
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShProfile {
    pub profile: TailNormProfile,
    /// Tail norm at `n = N - 1`, a lower bound for `limsup_n ||f||_n` when
    /// the functional is a registered eventually constant witness.
    pub summary: Estimate,
    pub witness: Option<String>,
}

pub fn sh_profile(section: &BasisSection, f: &Functional) -> Result<ShProfile> {
    let norm = f.dual_norm()?;
    if norm.lower > 1.0 + BALL_TOLERANCE {
        return Err(Error::OutsideDualBall { norm: norm.lower });
    }
    let profile = section.tail_profile(f)?;
    let last = profile.values[profile.values.len() - 1];
    let registered = witness::registered_functional(f);
    let mut summary = Estimate::lower(last.lower, "tail norm at the last coordinate")
        .with_param("N", section.dim() as f64)
        .with_param("enclosure_upper", last.upper);
    if registered.is_none() {
        summary = summary.uncertified();
    }
    Ok(ShProfile {
        profile,
        summary,
        witness: registered.map(|w| w.name.to_string()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProjection {
    pub value: Estimate,
    /// `||P_l - P_k|| <= ||P_l|| + ||P_k|| <= 2 K_N`.
    pub triangle_bound: Estimate,
}

pub fn block_projection_norm(
    section: &BasisSection,
    k: usize,
    l: usize,
) -> Result<BlockProjection> {
    if k >= l {
        return Err(Error::invalid(format!("need k < l, got k = {k}, l = {l}")));
    }
    let value = section.block_norm(k, l)?;
    let kn = section.basis_constant()?;
    let triangle_bound = if kn.direction.bounds_above() {
        Estimate::upper(2.0 * kn.value, "twice the basis constant")
    } else {
        Estimate::upper(
            2.0 * kn.params.get("upper").copied().unwrap_or(f64::INFINITY),
            "twice the basis constant",
        )
    };
    Ok(BlockProjection {
        value,
        triangle_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn constant_sequence_has_zero_gaps() {
        let s = vec![vec![1.0, 2.0]; 4];
        assert_eq!(gap_profile(sp("c0:2"), &s).unwrap(), vec![0.0; 3]);
        assert!(gap_profile(sp("c0:2"), &s[..1]).is_err());
    }

    #[test]
    fn named_witness_profiles() {
        let w = witness::lookup("summing-alternating")
            .unwrap()
            .sequence(8)
            .unwrap();
        let p = gap_profile(w.space, &w.partial_sums()).unwrap();
        assert!(p.iter().all(|v| *v >= 1.0));
        let w = witness::lookup("c-unit-jump").unwrap().sequence(6).unwrap();
        let p = gap_profile(w.space, &w.partial_sums()).unwrap();
        assert_eq!(p, vec![2.0; 5]);
    }

    #[test]
    fn certificates_reproduce_known_values() {
        for (name, dim, value) in [
            ("c0-ones", 10, 1.0),
            ("summing-alternating", 10, 1.0),
            ("c-unit-jump", 10, 2.0),
            ("james-ones", 10, 1.0),
        ] {
            let w = witness::lookup(name).unwrap().sequence(dim).unwrap();
            let e = bc1_certificate(&w).unwrap();
            assert_eq!(e.value, value, "{name}");
            assert!(e.certified);
        }
    }

    #[test]
    fn ball_violation_is_reported() {
        let w =
            WitnessSequence::new(sp("c0:3"), CoeffRule::Explicit(vec![0.5, 2.0, 0.0]), 3).unwrap();
        assert_eq!(
            bc1_certificate(&w),
            Err(Error::BallConstraint { m: 2, norm: 2.0 })
        );
        let w =
            WitnessSequence::new(sp("c0:3"), CoeffRule::Explicit(vec![0.5, -0.5, 0.0]), 3).unwrap();
        assert!(!bc1_certificate(&w).unwrap().certified);
    }

    #[test]
    fn upper_checks() {
        let r = bc1_upper_check(sp("summing:6"), 1.0, 60, 0).unwrap();
        assert_eq!(r.status, UpperCheckStatus::NotRefuted);
        assert!(r.largest_block <= 1.0 + REFUTE_MARGIN);
        let r = bc1_upper_check(sp("c0:6"), 0.5, 10, 0).unwrap();
        assert_eq!(r.status, UpperCheckStatus::Refuted);
        assert_eq!(r.witness.unwrap().registered.as_deref(), Some("c0-ones"));
        let r = bc1_upper_check(sp("james:5"), f64::INFINITY, 10, 0).unwrap();
        assert_eq!(r.status, UpperCheckStatus::NotRefuted);
        assert!(bc1_upper_check(sp("c0:3"), -1.0, 1, 0).is_err());
    }

    #[test]
    fn c_upper_check_finds_gap_two() {
        let r = bc1_upper_check(sp("c:6"), 1.5, 30, 3).unwrap();
        assert_eq!(r.status, UpperCheckStatus::Refuted);
    }

    #[test]
    fn sh_profiles() {
        let s = BasisSection::new(sp("l1:6"));
        let f = witness::lookup("l1-ones").unwrap().functional(6).unwrap();
        let p = sh_profile(&s, &f).unwrap();
        assert!(p.profile.values.iter().all(|v| v.upper == 1.0));
        assert_eq!(p.summary.value, 1.0);
        assert!(p.summary.certified);

        let s = BasisSection::new(sp("c0:4"));
        let f = Functional::new(s.space(), vec![1.0]).unwrap();
        let p = sh_profile(&s, &f).unwrap();
        assert_eq!(p.profile.values[0].upper, 1.0);
        assert!(p.profile.values[1..].iter().all(|v| v.upper == 0.0));

        let f = Functional::new(s.space(), vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            sh_profile(&s, &f),
            Err(Error::OutsideDualBall { .. })
        ));
    }

    #[test]
    fn block_projection_bounds() {
        let s = BasisSection::new(sp("summing:5"));
        let b = block_projection_norm(&s, 1, 3).unwrap();
        assert!(b.value.value <= b.triangle_bound.value + 1e-9);
        assert!(block_projection_norm(&s, 3, 3).is_err());
        let s = BasisSection::new(sp("c0:5"));
        assert_eq!(block_projection_norm(&s, 0, 5).unwrap().value.value, 1.0);
    }
}
