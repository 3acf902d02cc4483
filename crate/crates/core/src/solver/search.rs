//! Multi-start compass search. Only ever used for one-sided bounds: the best
//! value found is attained at an explicit point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Ascent {
    pub starts: usize,
    pub seed: u64,
    pub min_step: f64,
    pub max_evals_per_start: usize,
    /// Rescale iterates to unit sup norm; valid for 0-homogeneous objectives.
    pub homogeneous: bool,
}

impl Default for Ascent {
    fn default() -> Self {
        Ascent {
            starts: 16,
            seed: 0,
            min_step: 1e-7,
            max_evals_per_start: 20_000,
            homogeneous: true,
        }
    }
}

impl Ascent {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    /// Maximizes `objective` from every seed point and from `starts` random
    /// points of `[-1, 1]^dim`. Returns the best value and its point.
    pub fn maximize<F>(&self, dim: usize, mut objective: F, seeds: &[Vec<f64>]) -> (f64, Vec<f64>)
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut starts: Vec<Vec<f64>> = seeds.iter().filter(|s| s.len() == dim).cloned().collect();
        for _ in 0..self.starts {
            starts.push((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect());
        }
        let mut best = (f64::NEG_INFINITY, vec![0.0; dim]);
        for mut x in starts {
            let mut val = objective(&x);
            let mut step = 0.5;
            let mut evals = 1;
            while step >= self.min_step && evals < self.max_evals_per_start {
                let mut improved = false;
                'coords: for i in 0..dim {
                    for sgn in [1.0, -1.0] {
                        let mut y = x.clone();
                        y[i] += sgn * step;
                        let v = objective(&y);
                        evals += 1;
                        if v > val {
                            x = y;
                            val = v;
                            improved = true;
                            break 'coords;
                        }
                    }
                }
                if self.homogeneous {
                    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    if m > 0.0 && !(0.5..=2.0).contains(&m) {
                        x.iter_mut().for_each(|v| *v /= m);
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            if val > best.0 {
                best = (val, x);
            }
        }
        best
    }
}
