//! Finite basis sections: canonical projections, basis and unconditional
//! constants, tail norms of functionals and distances to initial spans.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::estimate::{Enclosure, Estimate};
use crate::solver::conic::{self, pattern_rows};
use crate::solver::lp::{LinearProgram, LpOutcome};
use crate::solver::search::Ascent;
use crate::spaces::james::max_variation_dp;
use crate::spaces::{suffix_sums, Functional, SpaceDescriptor, SpaceKind};

/// Largest LP column count accepted by the polyhedral distance route.
const MAX_LP_COLUMNS: usize = 4096;

#[derive(Debug)]
pub struct BasisSection {
    space: SpaceDescriptor,
    basis_constant: OnceLock<Result<Estimate>>,
    unconditional_constant: OnceLock<Result<Estimate>>,
}

impl Clone for BasisSection {
    fn clone(&self) -> Self {
        BasisSection::new(self.space)
    }
}

/// `values[n]` is the norm of the functional restricted to the span of the
/// basis vectors after the first `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailNormProfile {
    pub functional: Functional,
    pub values: Vec<Enclosure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub value: Enclosure,
    /// A functional supported on the first `n` coordinates attaining the
    /// distance (up to the enclosure width).
    pub nearest: Vec<f64>,
}

impl BasisSection {
    pub fn new(space: SpaceDescriptor) -> Self {
        BasisSection {
            space,
            basis_constant: OnceLock::new(),
            unconditional_constant: OnceLock::new(),
        }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `||P_n||`, where `P_n` keeps the first `n` coordinates.
    pub fn projection_norm(&self, n: usize) -> Result<Estimate> {
        self.block_norm(0, n)
    }

    /// `||P_l - P_k||` for `k <= l`.
    pub fn block_norm(&self, k: usize, l: usize) -> Result<Estimate> {
        let dim = self.dim();
        if l > dim {
            return Err(Error::OutOfRange { index: l, max: dim });
        }
        if k > l {
            return Err(Error::invalid(format!(
                "block bounds out of order: {k} > {l}"
            )));
        }
        let mask: Vec<f64> = (0..dim)
            .map(|i| if i >= k && i < l { 1.0 } else { 0.0 })
            .collect();
        diagonal_operator_norm(self.space, &mask)
    }

    /// `K_N = max_n ||P_n||`.
    pub fn basis_constant(&self) -> Result<Estimate> {
        self.basis_constant
            .get_or_init(|| {
                let mut best: Option<Estimate> = None;
                for n in 1..=self.dim() {
                    let e = self.projection_norm(n)?;
                    if best.as_ref().is_none_or(|b| e.value > b.value) {
                        best = Some(e);
                    }
                }
                let best = best.expect("dim >= 1");
                Ok(
                    Estimate::new(best.value, best.direction, "max of projection norms")
                        .with_param("N", self.dim() as f64),
                )
            })
            .clone()
    }

    /// `Ku_N = max_theta ||M_theta||` over sign vectors `theta`.
    pub fn unconditional_constant(&self) -> Result<Estimate> {
        self.unconditional_constant
            .get_or_init(|| {
                let est = match self.space.kind() {
                    SpaceKind::James => james_unconditional(self.dim())?,
                    SpaceKind::JamesSumming => james_summing_unconditional(self.dim())?,
                    _ => polyhedral_unconditional(self.space)?,
                };
                Ok(est.with_param("N", self.dim() as f64))
            })
            .clone()
    }

    fn check_functional(&self, f: &Functional, n: usize) -> Result<()> {
        if f.space() != self.space {
            return Err(Error::invalid(format!(
                "functional lives on {}, section is {}",
                f.space(),
                self.space
            )));
        }
        if n >= self.dim() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.dim() - 1,
            });
        }
        Ok(())
    }

    /// Norm of `f` restricted to the span of basis vectors `n+1, ..., N`,
    /// evaluated as a dual norm on the tail kernel.
    pub fn tail_norm(&self, f: &Functional, n: usize) -> Result<Enclosure> {
        self.check_functional(f, n)?;
        let tail = self.space.tail(n)?;
        let values: Vec<f64> = f.values().iter().skip(n).copied().collect();
        tail.dual_norm(&values)
    }

    /// `min { ||f - g|| : g supported on the first n coordinates }`.
    pub fn dist_to_initial_span(&self, f: &Functional, n: usize) -> Result<Distance> {
        self.check_functional(f, n)?;
        let dim = self.dim();
        let fv: Vec<f64> = (0..dim)
            .map(|i| f.values().get(i).copied().unwrap_or(0.0))
            .collect();
        if self.space.kind().is_james() {
            let mask: Vec<bool> = (0..dim).map(|i| i >= n).collect();
            let res = conic::support_value(self.space, &fv, &mask)?;
            let nearest = (0..dim)
                .map(|i| {
                    if i < n {
                        fv[i] - res.representation[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            return Ok(Distance {
                value: res.value,
                nearest,
            });
        }

        // The dual ball is the convex hull of the dual extreme points, so the
        // dual norm of h is min { sum lambda_e : h = sum lambda_e e }.
        let points = self.space.dual_extreme_points()?;
        Budget::check("lp columns", points.len(), MAX_LP_COLUMNS)?;
        let mut lp = LinearProgram::new(vec![1.0; points.len()]);
        for i in n..dim {
            lp = lp.eq(points.iter().map(|e| e[i]).collect(), fv[i]);
        }
        match lp.minimize()? {
            LpOutcome::Optimal { x, value } => {
                let nearest = (0..dim)
                    .map(|i| {
                        if i < n {
                            fv[i] - points.iter().zip(&x).map(|(e, l)| e[i] * l).sum::<f64>()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Ok(Distance {
                    value: Enclosure::exact(value),
                    nearest,
                })
            }
            other => Err(Error::invalid(format!(
                "distance program ended as {other:?}"
            ))),
        }
    }

    /// Tail norms for `n = 0..N`.
    pub fn tail_profile(&self, f: &Functional) -> Result<TailNormProfile> {
        let values = (0..self.dim())
            .map(|n| self.tail_norm(f, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(TailNormProfile {
            functional: f.clone(),
            values,
        })
    }

    /// A functional of dual norm at most one with `<f, x> = ||x||`.
    pub fn norming_functional(&self, x: &[f64]) -> Result<Functional> {
        let space = self.space;
        let dim = space.dim();
        let norm = space.norm(x)?;
        let mut values = vec![0.0; dim];
        if norm == 0.0 {
            return Functional::new(space, values);
        }
        match space.kind() {
            SpaceKind::L1 => {
                for (v, xi) in values.iter_mut().zip(x) {
                    *v = if *xi < 0.0 { -1.0 } else { 1.0 };
                }
            }
            SpaceKind::James | SpaceKind::JamesSumming => {
                let (_, positions) = max_variation_dp(&space.james_values(x));
                let rows = pattern_rows(space.kind(), dim, &positions);
                let gx: Vec<f64> = rows
                    .iter()
                    .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
                    .collect();
                let len = gx.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (row, g) in rows.iter().zip(&gx) {
                    for (v, r) in values.iter_mut().zip(row) {
                        *v += g / len * r;
                    }
                }
            }
            _ => {
                let points = space.dual_extreme_points()?;
                let dot = |e: &Vec<f64>| e.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                let best = points
                    .iter()
                    .max_by(|a, b| dot(a).total_cmp(&dot(b)))
                    .expect("nonempty");
                values.copy_from_slice(best);
            }
        }
        Functional::new(space, values)
    }
}

fn is_interval_mask(d: &[f64]) -> bool {
    if d.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return false;
    }
    let first = d.iter().position(|v| *v == 1.0);
    let last = d.iter().rposition(|v| *v == 1.0);
    match (first, last) {
        (Some(a), Some(b)) => d[a..=b].iter().all(|v| *v == 1.0),
        _ => true,
    }
}

/// Norm of the diagonal operator `x -> d * x` (coordinatewise) on a section.
pub fn diagonal_operator_norm(space: SpaceDescriptor, d: &[f64]) -> Result<Estimate> {
    if d.len() != space.dim() {
        return Err(Error::invalid("diagonal length differs from dimension"));
    }
    match space.kind() {
        SpaceKind::L1 => Ok(Estimate::exact(
            d.iter().fold(0.0, |m, v| m.max(v.abs())),
            "max column l1 norm",
        )),
        SpaceKind::James | SpaceKind::JamesSumming => james_diagonal_norm(space, d),
        _ => {
            let mut best = 0.0f64;
            for e in space.dual_extreme_points()? {
                let de: Vec<f64> = e.iter().zip(d).map(|(a, b)| a * b).collect();
                best = best.max(space.dual_norm(&de)?.upper);
            }
            Ok(Estimate::exact(best, "max over dual extreme points"))
        }
    }
}

fn ratio(space: SpaceDescriptor, d: &[f64], x: &[f64]) -> f64 {
    let nx = space.norm(x).unwrap_or(0.0);
    if nx == 0.0 {
        return 0.0;
    }
    let dx: Vec<f64> = x.iter().zip(d).map(|(a, b)| a * b).collect();
    space.norm(&dx).unwrap_or(0.0) / nx
}

/// Integral points of a polytope containing the unit ball, in the space's
/// own coordinates. The ball lies in `{|a_i| <= 1, |a_i - a_j| <= 1}` (James
/// coordinates); that polytope has a totally unimodular constraint matrix,
/// so its vertices are among these points.
fn james_envelope_points(space: SpaceDescriptor) -> Result<Vec<Vec<f64>>> {
    let n = space.dim();
    Budget::check("james envelope vertices", n, Budget::current().james_signs)?;
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        for sign in [1.0, -1.0] {
            let v: Vec<f64> = match space.kind() {
                SpaceKind::JamesSumming => {
                    // coefficients whose nonzero entries alternate in sign
                    let mut s = sign;
                    (0..n)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                let v = s;
                                s = -s;
                                v
                            } else {
                                0.0
                            }
                        })
                        .collect()
                }
                _ => (0..n)
                    .map(|i| if mask >> i & 1 == 1 { sign } else { 0.0 })
                    .collect(),
            };
            out.push(v);
        }
    }
    Ok(out)
}

fn james_diagonal_norm(space: SpaceDescriptor, d: &[f64]) -> Result<Estimate> {
    let n = space.dim();
    if d.iter().all(|v| *v == 0.0) {
        return Ok(Estimate::exact(0.0, "zero operator"));
    }
    let support: Vec<f64> = d
        .iter()
        .map(|v| if *v != 0.0 { 1.0 } else { 0.0 })
        .collect();
    let mut seeds = vec![support, d.to_vec(), vec![1.0; n]];
    if space.kind() == SpaceKind::JamesSumming {
        // the vector of James coordinates 1 on the support of d
        let first = d.iter().position(|v| *v != 0.0).unwrap_or(0);
        let last = d.iter().rposition(|v| *v != 0.0).unwrap_or(0);
        let mut s = vec![0.0; n];
        s[last] = 1.0;
        if first > 0 {
            s[first - 1] = -1.0;
        }
        seeds.push(s);
    }
    let mut lower = seeds.iter().map(|x| ratio(space, d, x)).fold(0.0, f64::max);

    if is_interval_mask(d) {
        // Restricting to an interval and zeroing the rest only merges the
        // outside positions of a pattern into one position of the original
        // vector, so every cyclic variation is dominated.
        return Ok(if lower >= 1.0 - 1e-12 {
            Estimate::exact(1.0, "interval mask contracts patterns")
        } else {
            Estimate::upper(1.0, "interval mask contracts patterns").with_param("lower", lower)
        });
    }

    let ascent = Ascent {
        starts: 4,
        max_evals_per_start: 4_000,
        ..Ascent::default()
    };
    let (found, _) = ascent.maximize(n, |x| ratio(space, d, x), &seeds);
    lower = lower.max(found);
    match james_envelope_points(space) {
        Ok(points) => {
            let mut upper = 0.0f64;
            for v in points {
                let dv: Vec<f64> = v.iter().zip(d).map(|(a, b)| a * b).collect();
                upper = upper.max(space.norm(&dv)?);
            }
            if upper - lower <= 1e-12 {
                Ok(Estimate::exact(
                    upper,
                    "ascent matched envelope vertex bound",
                ))
            } else {
                Ok(Estimate::lower(lower, "multi-start ascent").with_param("upper", upper))
            }
        }
        Err(Error::Budget { .. }) => Ok(Estimate::lower(lower, "multi-start ascent")),
        Err(e) => Err(e),
    }
}

/// Incremental evaluation of `max_e dual_norm(theta * e)` as single signs of
/// `theta` flip. All entries are small integers, so updates are exact.
struct SignSweep {
    kind: SpaceKind,
    vectors: Vec<Vec<f64>>,
    values: Vec<f64>,
    tail_sums: Vec<f64>,
}

impl SignSweep {
    fn new(space: SpaceDescriptor) -> Result<Self> {
        let vectors: Vec<Vec<f64>> = space
            .dual_extreme_points()?
            .into_iter()
            .filter(|e| e.iter().find(|v| **v != 0.0).is_some_and(|v| *v > 0.0))
            .collect();
        let mut sweep = SignSweep {
            kind: space.kind(),
            values: vec![0.0; vectors.len()],
            tail_sums: vectors.iter().map(|e| e.iter().skip(1).sum()).collect(),
            vectors,
        };
        for k in 0..sweep.vectors.len() {
            sweep.values[k] = space.dual_norm(&sweep.vectors[k])?.upper;
        }
        Ok(sweep)
    }

    fn flip(&mut self, i: usize) {
        for k in 0..self.vectors.len() {
            let g = &mut self.vectors[k];
            if g[i] == 0.0 {
                continue;
            }
            match self.kind {
                SpaceKind::SummingC0 => {
                    let n = g.len();
                    let at = |g: &[f64], j: usize| if j == usize::MAX { 0.0 } else { g[j] };
                    let local = |g: &[f64]| {
                        let mut s = (g[i] - at(g, i.wrapping_sub(1))).abs();
                        if i + 1 < n {
                            s += (g[i + 1] - g[i]).abs();
                        }
                        s
                    };
                    let before = local(g);
                    g[i] = -g[i];
                    self.values[k] += local(g) - before;
                }
                SpaceKind::CWithUnit => {
                    let abs: f64 = g.iter().skip(1).map(|v| v.abs()).sum();
                    if i > 0 {
                        self.tail_sums[k] -= 2.0 * g[i];
                    }
                    g[i] = -g[i];
                    self.values[k] = (g[0] - self.tail_sums[k]).abs() + abs;
                }
                _ => g[i] = -g[i],
            }
        }
    }

    fn operator_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Enumerates sign vectors with `theta_1 = +1` in reflected Gray code order
/// (step `k` flips coordinate `trailing_zeros(k) + 1`).
fn polyhedral_unconditional(space: SpaceDescriptor) -> Result<Estimate> {
    let n = space.dim();
    Budget::check("sign vectors", n, Budget::current().signs)?;
    if space.kind() == SpaceKind::L1 {
        return Ok(Estimate::exact(1.0, "sign flips are isometries of l1"));
    }
    let mut sweep = SignSweep::new(space)?;
    let mut best = sweep.operator_norm();
    for k in 1u64..(1u64 << (n - 1)) {
        sweep.flip(k.trailing_zeros() as usize + 1);
        best = best.max(sweep.operator_norm());
    }
    Ok(Estimate::exact(best, "gray-code sign enumeration"))
}

fn alternating(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// The James ball lies in `{|a_i| <= 1, |a_i - a_j| <= 1}`, whose vertices
/// are in `{-1,0,1}^N`, so `Ku_N <= max ||u||_J` over `u in {-1,0,1}^N`.
/// For a pattern of `k` positions the cyclic variation of such `u` is at most
/// `4k` (`k` even), `4k - 4` (`k` odd), or `4k - 6` when it uses the zero
/// sentinel. Maximizing over `k` gives `2N` (`N` even) or `2N - 1` (`N` odd)
/// for the squared norm, which the alternating sign vector attains against
/// the unit-norm vector of ones.
fn james_unconditional(n: usize) -> Result<Estimate> {
    let space = SpaceDescriptor::new(SpaceKind::James, n)?;
    let lower = space.norm(&alternating(n))? / space.norm(&vec![1.0; n])?;
    let squared = if n.is_multiple_of(2) {
        2 * n
    } else {
        2 * n - 1
    };
    let upper = (squared as f64).sqrt();
    Ok(if (upper - lower).abs() <= 1e-12 * upper {
        Estimate::exact(upper, "alternating signs against envelope vertex bound")
    } else {
        Estimate::lower(lower, "alternating signs").with_param("upper", upper)
    })
}

/// Here `M_theta` flips coefficients of `u_k = e_1 + ... + e_k`. The envelope
/// vertices are coefficient vectors with alternating nonzero signs, so their
/// images under sign flips are all of `{-1,0,1}^N`.
fn james_summing_unconditional(n: usize) -> Result<Estimate> {
    SpaceDescriptor::new(SpaceKind::JamesSumming, n)?;
    Budget::check("james sign vectors", n, Budget::current().james_signs)?;
    let mut upper = 0.0f64;
    let mut lower = 0.0f64;
    let mut u = vec![0.0; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for v in u.iter_mut() {
            *v = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let nu = variation_norm(&suffix_sums(&u));
        if nu == 0.0 {
            continue;
        }
        upper = upper.max(nu);
        // The same support with alternating signs is the preimage.
        let mut s = 1.0;
        let alt: Vec<f64> = u
            .iter()
            .map(|v| {
                if *v == 0.0 {
                    0.0
                } else {
                    let out = s;
                    s = -s;
                    out
                }
            })
            .collect();
        lower = lower.max(nu / variation_norm(&suffix_sums(&alt)));
    }
    Ok(if upper - lower <= 1e-12 * upper {
        Estimate::exact(upper, "sign enumeration against envelope vertex bound")
    } else {
        Estimate::lower(lower, "sign enumeration").with_param("upper", upper)
    })
}

fn variation_norm(a: &[f64]) -> f64 {
    crate::spaces::james::variation_to_norm(max_variation_dp(a).0)
}
