//! Dense two-phase simplex with Bland's rule.
//!
//! Problems here have at most a few hundred columns, so a full tableau is
//! simpler and fast enough.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// `minimize c.x` subject to `a_ub x <= b_ub`, `a_eq x = b_eq`, `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let w = self.cols + 1;
        &mut self.data[r * w..(r + 1) * w]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for v in self.row_mut(pr) {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.at(r, pc);
            if factor == 0.0 {
                continue;
            }
            for (v, pv) in self.row_mut(r).iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        self.basis[pr] = pc;
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        let obj = self.rows;
        let row = &mut self.data[obj * w..(obj + 1) * w];
        row.fill(0.0);
        row[..self.cols].copy_from_slice(&cost[..self.cols]);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for c in 0..w {
                self.data[obj * w + c] -= cb * self.data[r * w + c];
            }
        }
    }

    /// Returns false if unbounded.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool, pivots: &mut usize) -> Result<bool> {
        loop {
            let entering = (0..self.cols).find(|&c| allowed(c) && self.at(self.rows, c) < -EPS);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS
                                || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Ok(false);
            };
            self.pivot(pr, pc);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Solver {
                    method: "simplex",
                    lower: f64::NEG_INFINITY,
                    upper: f64::INFINITY,
                    iterations: *pivots,
                });
            }
        }
    }
}

impl LinearProgram {
    pub fn new(c: Vec<f64>) -> Self {
        LinearProgram {
            c,
            ..Default::default()
        }
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.a_ub.push(row);
        self.b_ub.push(rhs);
        self
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn minimize(&self) -> Result<LpOutcome> {
        let n = self.c.len();
        let m_ub = self.a_ub.len();
        let m = m_ub + self.a_eq.len();
        if self.a_ub.iter().chain(&self.a_eq).any(|r| r.len() != n) {
            return Err(Error::invalid(
                "constraint row length differs from cost length",
            ));
        }
        let art0 = n + m_ub;
        let cols = art0 + m;
        let w = cols + 1;
        let mut data = vec![0.0; (m + 1) * w];
        for (i, (row, rhs)) in self
            .a_ub
            .iter()
            .zip(&self.b_ub)
            .chain(self.a_eq.iter().zip(&self.b_eq))
            .enumerate()
        {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let base = i * w;
            for (j, v) in row.iter().enumerate() {
                data[base + j] = sign * v;
            }
            if i < m_ub {
                data[base + n + i] = sign;
            }
            data[base + art0 + i] = 1.0;
            data[base + cols] = sign * rhs;
        }
        let mut tab = Tableau {
            rows: m,
            cols,
            data,
            basis: (art0..cols).collect(),
        };
        let mut pivots = 0;

        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(art0) {
            *c = 1.0;
        }
        tab.set_objective(&phase1);
        tab.run(&|_| true, &mut pivots)?;
        let scale = 1.0
            + self
                .b_ub
                .iter()
                .chain(&self.b_eq)
                .fold(0.0f64, |a, b| a.max(b.abs()));
        if -tab.rhs(m) > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        for r in 0..m {
            if tab.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&c| tab.at(r, c).abs() > 1e-9) {
                    tab.pivot(r, c);
                }
            }
        }

        let mut phase2 = vec![0.0; cols];
        phase2[..n].copy_from_slice(&self.c);
        tab.set_objective(&phase2);
        if !tab.run(&|c| c < art0, &mut pivots)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; n];
        for r in 0..m {
            if tab.basis[r] < n {
                x[tab.basis[r]] = tab.rhs(r).max(0.0);
            }
        }
        let value = self.c.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> (Vec<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn small_textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let lp = LinearProgram::new(vec![-3.0, -5.0])
            .le(vec![1.0, 0.0], 4.0)
            .le(vec![0.0, 2.0], 12.0)
            .le(vec![3.0, 2.0], 18.0);
        let (x, v) = optimal(lp.minimize().unwrap());
        assert!((v + 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equalities_and_negative_rhs() {
        // min x + y, x - y = -1, x + y >= 3 -> (1, 2), value 3
        let lp = LinearProgram::new(vec![1.0, 1.0])
            .eq(vec![1.0, -1.0], -1.0)
            .le(vec![-1.0, -1.0], -3.0);
        let (x, v) = optimal(lp.minimize().unwrap());
        assert!((v - 3.0).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::new(vec![1.0]).le(vec![1.0], -1.0);
        assert_eq!(lp.minimize().unwrap(), LpOutcome::Infeasible);
        let lp = LinearProgram::new(vec![-1.0, 0.0]).le(vec![0.0, 1.0], 1.0);
        assert_eq!(lp.minimize().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(vec![1.0, 2.0])
            .eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0);
        let (_, v) = optimal(lp.minimize().unwrap());
        assert!((v - 1.0).abs() < 1e-9);
    }
}
