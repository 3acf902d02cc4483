//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use bq_core::spaces::SpaceKind;

/// Vertices of the unit ball of a polyhedral section. Every ball other than
/// `l1` is the image of the cube under an invertible change of coordinates.
pub fn ball_vertices(kind: SpaceKind, n: usize) -> Vec<Vec<f64>> {
    if kind == SpaceKind::L1 {
        return (0..2 * n)
            .map(|j| {
                let mut v = vec![0.0; n];
                v[j / 2] = if j % 2 == 0 { 1.0 } else { -1.0 };
                v
            })
            .collect();
    }
    (0..1u32 << n)
        .map(|mask| {
            let s: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            match kind {
                SpaceKind::C0 => s,
                SpaceKind::SummingC0 => (0..n)
                    .map(|i| s[i] - s.get(i + 1).copied().unwrap_or(0.0))
                    .collect(),
                SpaceKind::CWithUnit => (0..n)
                    .map(|i| if i == 0 { s[0] } else { s[i] - s[0] })
                    .collect(),
                _ => unreachable!("not polyhedral"),
            }
        })
        .collect()
}

/// The James norm straight from its definition: every increasing index
/// sequence of length at least two over `1..=n+1`, where index `n+1` reads 0.
pub fn james_norm_by_definition(x: &[f64]) -> f64 {
    let n = x.len();
    let at = |i: usize| if i < n { x[i] } else { 0.0 };
    let mut best = 0.0f64;
    for mask in 0..1u32 << (n + 1) {
        let idx: Vec<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
        if idx.len() < 2 {
            continue;
        }
        let mut sum = 0.0;
        for w in idx.windows(2) {
            sum += (at(w[0]) - at(w[1])).powi(2);
        }
        sum += (at(idx[idx.len() - 1]) - at(idx[0])).powi(2);
        best = best.max(sum);
    }
    (best / 2.0).sqrt()
}

/// Minimizes a convex function of two variables over a box by repeatedly
/// shrinking a grid around the best point.
pub fn zoom_minimize(f: impl Fn(f64, f64) -> f64, mut center: (f64, f64), mut radius: f64) -> f64 {
    const STEPS: i32 = 40;
    let mut best = f(center.0, center.1);
    while radius > 1e-11 {
        let mut next = center;
        for i in -STEPS..=STEPS {
            for j in -STEPS..=STEPS {
                let p = (
                    center.0 + radius * f64::from(i) / f64::from(STEPS),
                    center.1 + radius * f64::from(j) / f64::from(STEPS),
                );
                let v = f(p.0, p.1);
                if v < best {
                    best = v;
                    next = p;
                }
            }
        }
        center = next;
        radius *= 0.25;
    }
    best
}
