//! Support function of the James ball, `sup { <f, x> : ||x||_J <= 1 }`,
//! optionally restricted to vectors vanishing off a coordinate mask.
//!
//! The ball is the intersection over all patterns `P` of the ellipsoidal
//! cylinders `||G_P x||_2 <= 1`, where `G_P` holds the scaled cyclic
//! differences of `P`. We keep a working set of patterns, solve the relaxed
//! problem with a primal log-barrier method, and add the pattern the James DP
//! reports as most violated. Every iterate yields a certified bracket:
//!
//! * lower: `<f, x> / ||x||_J`, since `x / ||x||_J` lies in the ball;
//! * upper: `sum_j ||w_j||_2 + ||r||_1` where `f = sum_j G_j^T w_j + r` on the
//!   mask. Each `||G_j y|| <= ||y||_J` and every coordinate functional has
//!   dual norm at most one in both James bases.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::Enclosure;
use crate::spaces::james::{max_variation_dp, variation_to_norm};
use crate::spaces::{SpaceDescriptor, SpaceKind};

/// Largest enclosure width accepted as a result.
pub const MAX_WIDTH: f64 = 1e-7;
const TARGET_WIDTH: f64 = 2e-9;
const MAX_NEWTON_STEPS: usize = 100_000;
const MAX_T: f64 = 1e13;
const CENTER_STEPS: usize = 60;
const POLISH_FROM: f64 = 1e4;
const POLISH_STEPS: usize = 30;

#[derive(Debug, Clone)]
pub struct SupportResult {
    pub value: Enclosure,
    /// A point of the ball (zero off the mask) attaining `value.lower`.
    pub maximizer: Vec<f64>,
    /// `sum_j G_j^T w_j` over all coordinates. It agrees with `f` on the mask
    /// up to the residual and has dual norm at most `value.upper`.
    pub representation: Vec<f64>,
    pub iterations: usize,
}

struct Group {
    /// Rows over all coordinates.
    full: Vec<Vec<f64>>,
    /// Rows restricted to the mask.
    b: DMatrix<f64>,
    gram: DMatrix<f64>,
}

fn pair_row(kind: SpaceKind, dim: usize, p: usize, q: usize) -> Vec<f64> {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let mut row = vec![0.0; dim];
    match kind {
        SpaceKind::JamesSumming => {
            for v in &mut row[lo..hi.min(dim)] {
                *v = FRAC_1_SQRT_2;
            }
        }
        _ => {
            row[lo] = FRAC_1_SQRT_2;
            if hi < dim {
                row[hi] = -FRAC_1_SQRT_2;
            }
        }
    }
    row
}

/// Rows of `G_P` in the coordinates of `kind`, for 0-based pattern positions
/// (position `dim` is the zero sentinel).
pub(crate) fn pattern_rows(kind: SpaceKind, dim: usize, positions: &[usize]) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(positions.len());
    for w in positions.windows(2) {
        rows.push(pair_row(kind, dim, w[0], w[1]));
    }
    rows.push(pair_row(
        kind,
        dim,
        positions[0],
        positions[positions.len() - 1],
    ));
    rows
}

fn build_group(kind: SpaceKind, dim: usize, positions: &[usize], cols: &[usize]) -> Option<Group> {
    let full = pattern_rows(kind, dim, positions);
    let b = DMatrix::from_fn(full.len(), cols.len(), |r, c| full[r][cols[c]]);
    if b.iter().all(|v| *v == 0.0) {
        return None;
    }
    let gram = b.transpose() * &b;
    Some(Group { full, b, gram })
}

struct Barrier<'a> {
    groups: &'a [Group],
    f: &'a DVector<f64>,
}

impl Barrier<'_> {
    fn slacks(&self, x: &DVector<f64>) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.groups.len());
        for g in self.groups {
            let s = 1.0 - x.dot(&(&g.gram * x));
            if s <= 0.0 {
                return None;
            }
            out.push(s);
        }
        Some(out)
    }

    fn value(&self, x: &DVector<f64>, t: f64) -> Option<f64> {
        let s = self.slacks(x)?;
        Some(-t * self.f.dot(x) - s.iter().map(|v| v.ln()).sum::<f64>())
    }

    /// Damped Newton centering. Returns the number of steps taken.
    fn center(&self, x: &mut DVector<f64>, t: f64, budget: usize) -> usize {
        let m = x.len();
        let mut steps = 0;
        while steps < budget {
            let Some(s) = self.slacks(x) else { break };
            let mut grad = -t * self.f;
            let mut hess = DMatrix::<f64>::zeros(m, m);
            for (g, sj) in self.groups.iter().zip(&s) {
                let mx = &g.gram * &*x;
                grad += &mx * (2.0 / sj);
                hess += &g.gram * (2.0 / sj);
                hess.ger(4.0 / (sj * sj), &mx, &mx, 1.0);
            }
            let Some(dir) = solve_spd(hess, &grad) else {
                break;
            };
            let decrement = -grad.dot(&dir);
            steps += 1;
            if decrement.is_nan() || decrement <= 1e-14 {
                break;
            }
            let Some(phi) = self.value(x, t) else { break };
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial = &*x + &dir * alpha;
                if let Some(v) = self.value(&trial, t) {
                    if v <= phi - 0.25 * alpha * decrement {
                        *x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved || alpha < 1e-9 {
                break;
            }
        }
        steps
    }
}

/// Returns `-H^{-1} g`, regularizing when `H` is numerically singular.
fn solve_spd(hess: DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = hess.diagonal().amax().max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += ridge;
            }
        }
        if let Some(ch) = h.cholesky() {
            let d = -ch.solve(grad);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 {
            scale * 1e-14
        } else {
            ridge * 100.0
        };
    }
    None
}

/// `sup { <f, x> : ||x|| <= 1, x_i = 0 where !mask[i] }` for the James kernels.
pub fn support_value(space: SpaceDescriptor, f: &[f64], mask: &[bool]) -> Result<SupportResult> {
    let kind = space.kind();
    let dim = space.dim();
    if !kind.is_james() {
        return Err(Error::Unsupported {
            kind: kind.to_string(),
            what: "conic support solver",
        });
    }
    if mask.len() != dim || f.len() > dim {
        return Err(Error::invalid(
            "mask or functional length differs from dimension",
        ));
    }
    let cols: Vec<usize> = (0..dim).filter(|&i| mask[i]).collect();
    let fm: Vec<f64> = cols
        .iter()
        .map(|&i| f.get(i).copied().unwrap_or(0.0))
        .collect();
    let scale = fm.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if cols.is_empty() || scale == 0.0 {
        return Ok(SupportResult {
            value: Enclosure::exact(0.0),
            maximizer: vec![0.0; dim],
            representation: vec![0.0; dim],
            iterations: 0,
        });
    }
    let fvec = DVector::from_iterator(cols.len(), fm.iter().map(|v| v / scale));

    let mut patterns: Vec<Vec<usize>> = Vec::new();
    let mut groups: Vec<Group> = Vec::new();
    for p in 0..dim {
        for q in p + 1..=dim {
            if let Some(g) = build_group(kind, dim, &[p, q], &cols) {
                patterns.push(vec![p, q]);
                groups.push(g);
            }
        }
    }

    let mut state = State {
        space,
        cols: &cols,
        f: &fvec,
        best_lower: 0.0,
        best_point: vec![0.0; dim],
        best_upper: f64::INFINITY,
        best_rep: vec![0.0; dim],
    };

    let mut x = DVector::<f64>::zeros(cols.len());
    let mut t = 1.0;
    let mut steps = 0;
    loop {
        let budget = CENTER_STEPS
            .min(MAX_NEWTON_STEPS.saturating_sub(steps))
            .max(1);
        steps += Barrier {
            groups: &groups,
            f: &fvec,
        }
        .center(&mut x, t, budget);

        let (jn, worst) = state.offer_point(&x);
        let barrier_weights: Vec<(usize, DVector<f64>)> = groups
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let bx = &g.b * &x;
                let s = 1.0 - bx.norm_squared();
                (j, bx * (2.0 / (t * s)))
            })
            .collect();
        state.offer_weights(&groups, &barrier_weights);

        let mut cut = None;
        if t >= POLISH_FROM && state.width() > TARGET_WIDTH {
            let (polish_steps, polished) = polish(&groups, &fvec, &x, t);
            steps += polish_steps;
            if let Some((px, weights)) = polished {
                let (pjn, pworst) = state.offer_point(&px);
                state.offer_weights(&groups, &weights);
                if pjn > 1.0 + 1e-12 && !patterns.contains(&pworst) {
                    cut = Some(pworst);
                }
            }
        }

        if state.width() <= TARGET_WIDTH || steps >= MAX_NEWTON_STEPS {
            break;
        }
        if jn > 1.0 + 1e-12 && !patterns.contains(&worst) {
            cut = Some(worst);
        }
        if let Some(pattern) = cut {
            if let Some(g) = build_group(kind, dim, &pattern, &cols) {
                patterns.push(pattern);
                groups.push(g);
                let worst_new = x.dot(&(&groups[groups.len() - 1].gram * &x)).sqrt();
                x *= 0.9 / worst_new.max(1.0);
                t = (t / 100.0).max(1.0);
                continue;
            }
        }
        if t >= MAX_T {
            break;
        }
        t *= 10.0;
    }

    let lower = state.best_lower * scale;
    let upper = state.best_upper.max(state.best_lower) * scale;
    if upper - lower > MAX_WIDTH {
        return Err(Error::Solver {
            method: "james support cutting planes",
            lower,
            upper,
            iterations: steps,
        });
    }
    Ok(SupportResult {
        value: Enclosure::new(lower, upper),
        maximizer: state.best_point,
        representation: state.best_rep.iter().map(|v| v * scale).collect(),
        iterations: steps,
    })
}

/// Best certified bounds seen so far.
struct State<'a> {
    space: SpaceDescriptor,
    cols: &'a [usize],
    f: &'a DVector<f64>,
    best_lower: f64,
    best_point: Vec<f64>,
    best_upper: f64,
    best_rep: Vec<f64>,
}

impl State<'_> {
    fn width(&self) -> f64 {
        self.best_upper - self.best_lower
    }

    /// Scores a candidate point. Returns its James norm and the pattern
    /// attaining it.
    fn offer_point(&mut self, x: &DVector<f64>) -> (f64, Vec<usize>) {
        let mut full = vec![0.0; self.space.dim()];
        for (k, &c) in self.cols.iter().enumerate() {
            full[c] = x[k];
        }
        let (variation, worst) = max_variation_dp(&self.space.james_values(&full));
        let jn = variation_to_norm(variation);
        if jn > 0.0 {
            let lower = self.f.dot(x) / jn;
            if lower > self.best_lower {
                self.best_lower = lower;
                self.best_point = full.iter().map(|v| v / jn).collect();
            }
        }
        (jn, worst)
    }

    /// Scores a dual representation `f = sum_j B_j^T w_j + r`.
    fn offer_weights(&mut self, groups: &[Group], weights: &[(usize, DVector<f64>)]) {
        let mut rep = vec![0.0; self.space.dim()];
        let mut upper = 0.0;
        let mut masked_rep = DVector::<f64>::zeros(self.cols.len());
        for (j, w) in weights {
            let g = &groups[*j];
            upper += w.norm();
            masked_rep += g.b.transpose() * w;
            for (row, wr) in g.full.iter().zip(w.iter()) {
                for (r, v) in rep.iter_mut().zip(row) {
                    *r += wr * v;
                }
            }
        }
        let residual: f64 = (self.f - masked_rep).iter().map(|v| v.abs()).sum();
        let upper = (upper + residual) * (1.0 + 1e-14);
        if upper < self.best_upper {
            self.best_upper = upper;
            self.best_rep = rep;
        }
    }
}

/// Polished point and multiplier-weighted group gradients.
type Polished = (DVector<f64>, Vec<(usize, DVector<f64>)>);

/// Newton's method on the optimality system of the groups that are nearly
/// tight at `x`: `f = sum_j 2 mu_j M_j x`, `x^T M_j x = 1`.
fn polish(
    groups: &[Group],
    f: &DVector<f64>,
    x0: &DVector<f64>,
    t: f64,
) -> (usize, Option<Polished>) {
    let threshold = 10.0 / t.sqrt();
    let mut active = Vec::new();
    let mut mu = Vec::new();
    for (j, g) in groups.iter().enumerate() {
        let s = 1.0 - x0.dot(&(&g.gram * x0));
        if s < threshold {
            active.push(j);
            mu.push(1.0 / (t * s));
        }
    }
    if active.is_empty() {
        return (0, None);
    }
    let m = x0.len();
    let k = active.len();
    let mut x = x0.clone();
    let mut mu = DVector::from_vec(mu);
    let residual = |x: &DVector<f64>, mu: &DVector<f64>| {
        let mut r = DVector::<f64>::zeros(m + k);
        let mut stationarity = -f.clone();
        for (a, &j) in active.iter().enumerate() {
            let mx = &groups[j].gram * x;
            stationarity += &mx * (2.0 * mu[a]);
            r[m + a] = 1.0 - x.dot(&mx);
        }
        r.rows_mut(0, m).copy_from(&stationarity);
        r
    };
    let mut res = residual(&x, &mu);
    let mut steps = 0;
    for _ in 0..POLISH_STEPS {
        if res.amax() < 1e-15 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(m + k, m + k);
        for (a, &j) in active.iter().enumerate() {
            let gram = &groups[j].gram;
            let mx = gram * &x;
            let mut block = jac.view_mut((0, 0), (m, m));
            block += gram * (2.0 * mu[a]);
            jac.view_mut((0, m + a), (m, 1)).copy_from(&(&mx * 2.0));
            jac.view_mut((m + a, 0), (1, m))
                .copy_from(&(mx.transpose() * -2.0));
        }
        let Ok(svd) = jac.svd(true, true).solve(&res, 1e-13) else {
            break;
        };
        steps += 1;
        let x_new = &x - svd.rows(0, m);
        let mu_new = &mu - svd.rows(m, k);
        let res_new = residual(&x_new, &mu_new);
        if res_new.amax().is_nan() || res_new.amax() >= res.amax() {
            break;
        }
        x = x_new;
        mu = mu_new;
        res = res_new;
    }
    let weights = active
        .iter()
        .zip(mu.iter())
        .map(|(&j, &mj)| (j, &groups[j].b * &x * (2.0 * mj)))
        .collect();
    (steps, Some((x, weights)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn james(n: usize) -> SpaceDescriptor {
        SpaceDescriptor::new(SpaceKind::James, n).unwrap()
    }

    #[test]
    fn first_coordinate_functional_by_grid() {
        // Oracle: sup x_1 / ||x|| = 1 / min_{y,z} ||(1, y, z)||_J, a convex 2-d
        // minimization done by a zooming grid.
        let sp = james(3);
        let res = support_value(sp, &[1.0], &[true; 3]).unwrap();
        let g = |y: f64, z: f64| sp.norm(&[1.0, y, z]).unwrap();
        let (mut cy, mut cz, mut r) = (0.0, 0.0, 2.0);
        for _ in 0..40 {
            let mut best = (f64::INFINITY, cy, cz);
            for i in 0..=40 {
                for j in 0..=40 {
                    let y = cy - r + r * i as f64 / 20.0;
                    let z = cz - r + r * j as f64 / 20.0;
                    let v = g(y, z);
                    if v < best.0 {
                        best = (v, y, z);
                    }
                }
            }
            (cy, cz) = (best.1, best.2);
            r *= 0.6;
        }
        let oracle = 1.0 / g(cy, cz);
        assert!(res.value.width() <= MAX_WIDTH);
        assert!(res.value.upper >= oracle - 1e-12);
        assert!(
            (res.value.mid() - oracle).abs() < 1e-6,
            "{} vs {oracle}",
            res.value
        );
    }

    #[test]
    fn sum_functional_on_constant_vectors() {
        // <(1,...,1), x> over ||x||_J <= 1: the vector sum_{i<=n} e_i has norm 1
        let sp = james(5);
        let res = support_value(sp, &[1.0; 5], &[true; 5]).unwrap();
        assert!(res.value.lower >= 5.0 - 1e-9);
        assert!(res.value.width() <= MAX_WIDTH);
    }

    #[test]
    fn masked_problem_ignores_masked_coordinates() {
        let sp = james(4);
        let res = support_value(sp, &[7.0, 0.0, 0.0, 0.0], &[false, true, true, true]).unwrap();
        assert_eq!(res.value, Enclosure::exact(0.0));
    }

    #[test]
    fn rejects_polyhedral_kernels() {
        let sp = SpaceDescriptor::new(SpaceKind::C0, 3).unwrap();
        assert!(support_value(sp, &[1.0], &[true; 3]).is_err());
    }
}
