//! Isomorphic copies of `l1^m` and `c0^m` spanned by block sequences, with
//! numerical and closed-form frame bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bases::BasisSection;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::estimate::{Direction, Estimate};
use crate::solver::lp::{LinearProgram, LpOutcome};
use crate::solver::search::Ascent;
use crate::spaces::{Functional, SpaceDescriptor};

const NORM_SLACK: f64 = 1e-12;

/// A vector supported on `start..start + coeffs.len()` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub coeffs: Vec<f64>,
}

impl Block {
    pub fn new(start: usize, coeffs: Vec<f64>) -> Self {
        Block { start, coeffs }
    }

    pub fn end(&self) -> usize {
        self.start + self.coeffs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSequence {
    space: SpaceDescriptor,
    blocks: Vec<Block>,
}

impl BlockSequence {
    pub fn new(space: SpaceDescriptor, blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("a block sequence needs at least one block"));
        }
        let mut prev_end = 0;
        for (n, b) in blocks.iter().enumerate() {
            if b.coeffs.is_empty() || b.coeffs.iter().all(|v| *v == 0.0) {
                return Err(Error::invalid(format!("block {} is zero", n + 1)));
            }
            if b.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "block {} has a non-finite coefficient",
                    n + 1
                )));
            }
            if n > 0 && b.start < prev_end {
                return Err(Error::invalid(format!(
                    "block {} starts at {} before the previous block ends at {}",
                    n + 1,
                    b.start,
                    prev_end
                )));
            }
            if b.end() > space.dim() {
                return Err(Error::OutOfRange {
                    index: b.end(),
                    max: space.dim(),
                });
            }
            prev_end = b.end();
        }
        Ok(BlockSequence { space, blocks })
    }

    /// Cuts `coefficients` into the blocks `cuts[j]..cuts[j+1]`.
    pub fn from_cuts(space: SpaceDescriptor, coefficients: &[f64], cuts: &[usize]) -> Result<Self> {
        if cuts.windows(2).any(|w| w[0] >= w[1])
            || cuts.last().is_some_and(|c| *c > coefficients.len())
        {
            return Err(Error::invalid(
                "cuts must increase and stay inside the coefficients",
            ));
        }
        let blocks = cuts
            .windows(2)
            .map(|w| Block::new(w[0], coefficients[w[0]..w[1]].to_vec()))
            .collect();
        BlockSequence::new(space, blocks)
    }

    /// The unit vector basis, one block per coordinate.
    pub fn coordinates(space: SpaceDescriptor) -> Self {
        let blocks = (0..space.dim()).map(|i| Block::new(i, vec![1.0])).collect();
        BlockSequence { space, blocks }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block as a vector of the ambient section.
    pub fn vector(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.space.dim()];
        let b = &self.blocks[n];
        v[b.start..b.end()].copy_from_slice(&b.coeffs);
        v
    }

    /// `sum_n t_n u_n`.
    pub fn combination(&self, t: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.space.dim()];
        for (b, tn) in self.blocks.iter().zip(t) {
            for (i, c) in b.coeffs.iter().enumerate() {
                v[b.start + i] += tn * c;
            }
        }
        v
    }

    fn image_norm(&self, t: &[f64]) -> f64 {
        self.space.fast_norm(&self.combination(t))
    }

    /// Distinct vectors `(<e, u_1>, ..., <e, u_m>)` over dual extreme points `e`.
    fn dual_rows(&self) -> Result<Vec<Vec<f64>>> {
        let mut rows: Vec<Vec<f64>> = self
            .space
            .dual_extreme_points()?
            .iter()
            .map(|e| {
                self.blocks
                    .iter()
                    .map(|b| {
                        b.coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, c)| e[b.start + i] * c)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        rows.sort_by(|a: &Vec<f64>, b| a.partial_cmp(b).expect("finite"));
        rows.dedup();
        Ok(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub norms: Vec<f64>,
    /// `min_n <x*, u_n>` when a witness functional was supplied.
    pub separation: Option<f64>,
    /// 1-based indices of blocks with norm above 1.
    pub outside_ball: Vec<usize>,
}

pub fn validate_blocks(b: &BlockSequence, witness: Option<&Functional>) -> Result<BlockReport> {
    let mut norms = Vec::with_capacity(b.len());
    for n in 0..b.len() {
        norms.push(b.space.norm(&b.vector(n))?);
    }
    let outside_ball = norms
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 1.0 + NORM_SLACK)
        .map(|(n, _)| n + 1)
        .collect();
    let separation = match witness {
        Some(f) => {
            if f.space() != b.space {
                return Err(Error::invalid(
                    "witness and blocks live on different sections",
                ));
            }
            Some(
                (0..b.len())
                    .map(|n| f.apply(&b.vector(n)))
                    .fold(f64::INFINITY, f64::min),
            )
        }
        None => None,
    };
    Ok(BlockReport {
        norms,
        separation,
        outside_ball,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    L1,
    C0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub model: Model,
    pub space: SpaceDescriptor,
    pub m: usize,
    /// Scalar applied to every block to form `T`.
    pub scale: f64,
    /// `||T||` from the model sphere.
    pub upper: Estimate,
    /// `min ||T z||` over the model sphere.
    pub lower: Estimate,
    pub analytic_lower: Estimate,
    pub analytic_upper: Option<Estimate>,
    /// Constant `c` entering the closed-form bound.
    pub c: f64,
    pub ku: Estimate,
    pub construction: String,
    /// Norm of a projection onto the copy, when the caller supplies one.
    pub projection_norm: Option<f64>,
}

fn ku_upper(section: &BasisSection) -> Result<(Estimate, f64, bool)> {
    let ku = section.unconditional_constant()?;
    let (value, certified) = if ku.direction.bounds_above() {
        (ku.value, ku.certified)
    } else if let Some(u) = ku.params.get("upper") {
        (*u, ku.certified)
    } else {
        (ku.value, false)
    };
    Ok((ku, value, certified))
}

fn l1_sphere_min(b: &BlockSequence) -> Result<Estimate> {
    let m = b.len();
    if b.space.kind().is_polyhedral() {
        let rows = b.dual_rows()?;
        let cells = 1usize << (m - 1);
        let mut best = f64::INFINITY;
        for mask in 0..cells {
            let sign = |n: usize| {
                if n > 0 && mask >> (n - 1) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                }
            };
            let mut c = vec![0.0; m + 1];
            c[m] = 1.0;
            let mut lp = LinearProgram::new(c);
            for r in &rows {
                let mut row: Vec<f64> = (0..m).map(|n| sign(n) * r[n]).collect();
                row.push(-1.0);
                lp = lp.le(row, 0.0);
            }
            let mut total = vec![1.0; m];
            total.push(0.0);
            lp = lp.eq(total, 1.0);
            match lp.minimize()? {
                LpOutcome::Optimal { value, .. } => best = best.min(value),
                _ => return Err(Error::invalid("sign-cell program has no optimum")),
            }
        }
        Ok(Estimate::exact(
            best.max(0.0),
            "per-sign-cell linear programs",
        ))
    } else {
        let seeds: Vec<Vec<f64>> = (0..m)
            .map(|n| (0..m).map(|i| if i == n { 1.0 } else { 0.0 }).collect())
            .collect();
        let (v, _) = Ascent::default().maximize(
            m,
            |z| {
                let l1: f64 = z.iter().map(|v| v.abs()).sum();
                if l1 == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -b.image_norm(z) / l1
                }
            },
            &seeds,
        );
        Ok(Estimate::upper(-v, "multi-start descent on the l1 sphere"))
    }
}

/// `T e_n = u_n` from a block sequence whose blocks are separated by a norm
/// one functional.
pub fn build_l1_embedding(b: &BlockSequence, witness: &Functional) -> Result<EmbeddingCertificate> {
    let report = validate_blocks(b, Some(witness))?;
    if !report.outside_ball.is_empty() {
        return Err(Error::invalid(format!(
            "blocks {:?} leave the unit ball",
            report.outside_ball
        )));
    }
    let dual = witness.dual_norm()?;
    if dual.lower > 1.0 + NORM_SLACK {
        return Err(Error::OutsideDualBall { norm: dual.lower });
    }
    let c = report.separation.expect("witness supplied");
    if c <= 0.0 {
        return Err(Error::invalid(format!(
            "the witness does not separate the blocks (min pairing {c})"
        )));
    }
    let section = BasisSection::new(b.space);
    let (ku, ku_up, ku_certified) = ku_upper(&section)?;
    let mut analytic_lower = Estimate::lower(c / ku_up, "c / K_u").with_param("c", c);
    analytic_lower.certified = ku_certified;

    let upper = Estimate::exact(
        report.norms.iter().copied().fold(0.0, f64::max),
        "max block norm",
    );
    let lower = l1_sphere_min(b)?;
    Ok(EmbeddingCertificate {
        model: Model::L1,
        space: b.space,
        m: b.len(),
        scale: 1.0,
        upper,
        lower,
        analytic_lower,
        analytic_upper: None,
        c,
        ku,
        construction: "l1 copy spanned by separated blocks".into(),
        projection_norm: None,
    })
}

/// `min ||sum t_n u_n||` over `max |t_n| = 1`, facet by facet.
fn sup_sphere_min(b: &BlockSequence) -> Result<Estimate> {
    let m = b.len();
    if b.space.kind().is_polyhedral() {
        let rows = b.dual_rows()?;
        let mut best = f64::INFINITY;
        for j in 0..m {
            // t_i = w_i - 1 with 0 <= w_i <= 2 for i != j, and t_j = 1.
            let free: Vec<usize> = (0..m).filter(|i| *i != j).collect();
            let k = free.len();
            let mut c = vec![0.0; k + 1];
            c[k] = 1.0;
            let mut lp = LinearProgram::new(c);
            for r in &rows {
                let mut row: Vec<f64> = free.iter().map(|i| r[*i]).collect();
                row.push(-1.0);
                let rhs = free.iter().map(|i| r[*i]).sum::<f64>() - r[j];
                lp = lp.le(row, rhs);
            }
            for (p, _) in free.iter().enumerate() {
                let mut row = vec![0.0; k + 1];
                row[p] = 1.0;
                lp = lp.le(row, 2.0);
            }
            match lp.minimize()? {
                LpOutcome::Optimal { value, .. } => best = best.min(value),
                _ => return Err(Error::invalid("facet program has no optimum")),
            }
        }
        Ok(Estimate::exact(best.max(0.0), "per-facet linear programs"))
    } else {
        let seeds: Vec<Vec<f64>> = vec![vec![1.0; m]];
        let (v, _) = Ascent::default().maximize(
            m,
            |t| {
                let sup = t.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if sup == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -b.image_norm(t) / sup
                }
            },
            &seeds,
        );
        Ok(Estimate::upper(-v, "multi-start descent on the sup sphere"))
    }
}

fn sign_vector_max(b: &BlockSequence) -> Estimate {
    let m = b.len();
    let limit = Budget::current().blocks;
    if m <= limit {
        let mut best = 0.0f64;
        let mut t = vec![1.0; m];
        for mask in 0..1usize << (m - 1) {
            for (n, tn) in t.iter_mut().enumerate().skip(1) {
                *tn = if mask >> (n - 1) & 1 == 1 { -1.0 } else { 1.0 };
            }
            best = best.max(b.image_norm(&t));
        }
        Estimate::exact(best, "sign-vector enumeration")
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut best = 0.0f64;
        for _ in 0..1usize << limit.min(16) {
            let t: Vec<f64> = (0..m)
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            best = best.max(b.image_norm(&t));
        }
        Estimate::lower(best, "sampled sign vectors").with_param("blocks", m as f64)
    }
}

/// `T e_n = u_n / K_u^2`, bounded on `c0^m` by the unconditional structure.
pub fn build_c0_embedding(b: &BlockSequence) -> Result<EmbeddingCertificate> {
    let report = validate_blocks(b, None)?;
    let c = report.norms.iter().copied().fold(f64::INFINITY, f64::min);
    if c <= 0.0 {
        return Err(Error::invalid("a block has zero norm"));
    }
    let section = BasisSection::new(b.space);
    let (ku, ku_up, ku_certified) = ku_upper(&section)?;
    let scale = 1.0 / (ku.value * ku.value);

    let sum_norm = b.space.norm(&b.combination(&vec![1.0; b.len()]))?;
    let mut analytic_lower =
        Estimate::lower(c / ku_up * scale, "c / K_u, scaled").with_param("c", c);
    analytic_lower.certified = ku_certified;
    let mut analytic_upper = Estimate::upper(ku_up * sum_norm * scale, "K_u ||sum u_n||, scaled")
        .with_param("sum_norm", sum_norm);
    analytic_upper.certified = ku_certified;

    let scaled = |e: Estimate| Estimate {
        value: e.value * scale,
        ..e
    };
    Ok(EmbeddingCertificate {
        model: Model::C0,
        space: b.space,
        m: b.len(),
        scale,
        upper: scaled(sign_vector_max(b)),
        lower: scaled(sup_sphere_min(b)?),
        analytic_lower,
        analytic_upper: Some(analytic_upper),
        c,
        ku,
        construction: "c0 copy spanned by blocks of an unconditional basis".into(),
        projection_norm: None,
    })
}

impl EmbeddingCertificate {
    pub fn with_projection_norm(mut self, norm: f64) -> Self {
        self.projection_norm = Some(norm);
        self
    }

    /// Closed-form bounds on `||T t||` for a model vector `t`.
    pub fn analytic_range(&self, t: &[f64]) -> (f64, f64) {
        let size = match self.model {
            Model::L1 => t.iter().map(|v| v.abs()).sum::<f64>(),
            Model::C0 => t.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        };
        let up = match (&self.analytic_upper, self.model) {
            (Some(u), _) => u.value,
            (None, Model::L1) => self.upper.value,
            (None, Model::C0) => f64::INFINITY,
        };
        (self.analytic_lower.value * size, up * size)
    }
}

/// `||T^{-1}||^{-1}` for `T` rescaled to norm one.
pub fn alpha_lower_bound(cert: &EmbeddingCertificate) -> Result<Estimate> {
    let (lower, lower_ok) = if cert.lower.direction.bounds_below() {
        (cert.lower.value, cert.lower.certified)
    } else {
        (cert.analytic_lower.value, cert.analytic_lower.certified)
    };
    let (upper, upper_ok) = if cert.upper.direction.bounds_above() {
        (cert.upper.value, cert.upper.certified)
    } else if let Some(u) = &cert.analytic_upper {
        (u.value, u.certified)
    } else {
        return Err(Error::invalid(
            "degenerate certificate: no upper bound on the operator norm",
        ));
    };
    if lower.is_nan() || lower <= 0.0 || upper.is_nan() || upper < lower || !upper.is_finite() {
        return Err(Error::invalid(format!(
            "degenerate certificate: lower {lower}, upper {upper}"
        )));
    }
    let mut est = Estimate::new(lower / upper, Direction::LowerBound, "frame ratio")
        .with_param("lower", lower)
        .with_param("upper", upper)
        .with_param("m", cert.m as f64);
    est.certified = lower_ok && upper_ok;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn block_validation() {
        let s = sp("l1:4");
        let b = BlockSequence::coordinates(s);
        let f = Functional::new(s, vec![1.0; 4]).unwrap();
        let r = validate_blocks(&b, Some(&f)).unwrap();
        assert_eq!(r.norms, vec![1.0; 4]);
        assert_eq!(r.separation, Some(1.0));
        assert!(r.outside_ball.is_empty());

        let overlap = vec![Block::new(0, vec![1.0, 1.0]), Block::new(1, vec![1.0])];
        assert!(BlockSequence::new(s, overlap).is_err());
        assert!(BlockSequence::new(s, vec![Block::new(0, vec![0.0])]).is_err());
        assert!(BlockSequence::new(s, vec![Block::new(3, vec![1.0, 1.0])]).is_err());
    }

    #[test]
    fn james_interval_blocks_have_norm_one() {
        let s = sp("james:9");
        let b = BlockSequence::from_cuts(s, &[1.0; 9], &[0, 2, 5, 9]).unwrap();
        let r = validate_blocks(&b, None).unwrap();
        assert_eq!(r.norms, vec![1.0; 3]);
    }

    #[test]
    fn identity_embeddings() {
        let s = sp("l1:5");
        let f = Functional::new(s, vec![1.0; 5]).unwrap();
        let cert = build_l1_embedding(&BlockSequence::coordinates(s), &f).unwrap();
        assert_eq!((cert.upper.value, cert.lower.value), (1.0, 1.0));
        assert_eq!(alpha_lower_bound(&cert).unwrap().value, 1.0);

        let cert = build_c0_embedding(&BlockSequence::coordinates(sp("c0:5"))).unwrap();
        assert_eq!((cert.upper.value, cert.lower.value), (1.0, 1.0));
        assert_eq!(alpha_lower_bound(&cert).unwrap().value, 1.0);
    }

    #[test]
    fn zero_separation_is_rejected() {
        let s = sp("l1:3");
        let f = Functional::new(s, vec![1.0, 0.0, 1.0]).unwrap();
        assert!(build_l1_embedding(&BlockSequence::coordinates(s), &f).is_err());
    }

    #[test]
    fn summing_pairs_refine_the_closed_form() {
        let s = sp("summing:6");
        let b =
            BlockSequence::from_cuts(s, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0], &[0, 2, 4, 6]).unwrap();
        let f = Functional::new(s, vec![0.0, -0.2, 0.0, -0.2, 0.0, -0.2]).unwrap();
        let cert = build_l1_embedding(&b, &f).unwrap();
        assert!((cert.c - 0.2).abs() < 1e-15);
        assert_eq!(cert.ku.value, 11.0);
        assert!((cert.lower.value - 1.0 / 3.0).abs() < 1e-9);
        assert!(cert.lower.value >= cert.analytic_lower.value - 1e-9);
    }

    #[test]
    fn c0_frame_matches_sampled_vectors() {
        let s = sp("c0:8");
        let b = BlockSequence::from_cuts(s, &[1.0; 8], &[0, 3, 5, 8]).unwrap();
        let cert = build_c0_embedding(&b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let v = cert.scale * s.norm(&b.combination(&t)).unwrap();
            let sup = t.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let (lo, hi) = cert.analytic_range(&t);
            assert!(lo - 1e-12 <= v && v <= hi + 1e-12);
            assert!(cert.lower.value * sup <= v + 1e-12 && v <= cert.upper.value * sup + 1e-12);
        }
    }

    #[test]
    fn james_blocks_get_tagged_descent() {
        let s = sp("james:6");
        let b = BlockSequence::from_cuts(s, &[1.0; 6], &[0, 2, 4, 6]).unwrap();
        let cert = build_c0_embedding(&b).unwrap();
        assert_eq!(cert.lower.direction, Direction::UpperBound);
        assert!(cert.lower.value + 1e-12 >= cert.analytic_lower.value);
        let a = alpha_lower_bound(&cert).unwrap();
        assert!(a.value > 0.0);
    }
}
