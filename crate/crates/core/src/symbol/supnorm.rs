//! Sup-norm of a real symbol on the sphere.
//!
//! A `(resolution+1) × 2·resolution` grid uniform in `u = x3` and `φ` is
//! scanned, then every grid-local maximum of `|f|` is refined by a compass
//! search in polar angles. Doubling the resolution nests the grids.

use std::f64::consts::PI;

use super::Symbol;
use crate::error::{Error, Result};
use crate::geometry::SpherePoint;

const MAX_CANDIDATES: usize = 32;
const FINAL_STEP: f64 = 1e-10;

/// `max |f|` over S².
pub fn sup_norm(f: &Symbol, resolution: usize) -> Result<f64> {
    sup_norm_point(f, resolution).map(|(v, _)| v)
}

/// `max |f|` together with a point where it is attained.
pub fn sup_norm_point(f: &Symbol, resolution: usize) -> Result<(f64, SpherePoint)> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    if resolution == 0 {
        return Err(Error::Invalid("sup-norm resolution must be positive".into()));
    }
    let value = |theta: f64, phi: f64| {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        f.eval_real([st * cp, st * sp, ct]).abs()
    };

    let rows = resolution + 1;
    let cols = 2 * resolution;
    let thetas: Vec<f64> = (0..rows)
        .map(|i| (1.0 - 2.0 * i as f64 / resolution as f64).clamp(-1.0, 1.0).acos())
        .collect();
    let phis: Vec<f64> = (0..cols).map(|j| PI * j as f64 / resolution as f64).collect();
    let grid: Vec<f64> = (0..rows * cols)
        .map(|n| value(thetas[n / cols], phis[n % cols]))
        .collect();
    let at = |i: usize, j: usize| grid[i * cols + j];

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut candidates = Vec::new();
    for i in 0..rows {
        let pole = i == 0 || i == rows - 1;
        for j in 0..cols {
            let v = at(i, j);
            if v > best.0 {
                best = (v, thetas[i], phis[j]);
            }
            if pole && j > 0 {
                continue;
            }
            let mut is_max = true;
            'scan: for di in -1i64..=1 {
                let ii = i as i64 + di;
                if ii < 0 || ii >= rows as i64 {
                    continue;
                }
                let ii = ii as usize;
                let neighbours: Vec<usize> = if ii == 0 || ii == rows - 1 {
                    vec![0]
                } else if pole {
                    (0..cols).collect()
                } else {
                    vec![(j + cols - 1) % cols, j, (j + 1) % cols]
                };
                for jj in neighbours {
                    if (ii, jj) != (i, j) && at(ii, jj) > v {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if is_max {
                candidates.push((v, thetas[i], phis[j]));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(MAX_CANDIDATES);

    let step0 = PI / resolution as f64;
    for (v0, t0, p0) in candidates {
        let refined = compass_search(&value, (v0, t0, p0), step0);
        if refined.0 > best.0 {
            best = refined;
        }
    }
    let (v, theta, phi) = best;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let point = SpherePoint::from_ambient([st * cp, st * sp, ct]).expect("unit vector");
    Ok((v, point))
}

fn compass_search<F: Fn(f64, f64) -> f64>(value: &F, start: (f64, f64, f64), step0: f64) -> (f64, f64, f64) {
    let (mut v, mut t, mut p) = start;
    let mut step = step0;
    while step > FINAL_STEP {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let w = value(t + dt, p + dp);
            if w > v {
                v = w;
                t += dt;
                p += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (v, t, p)
}
