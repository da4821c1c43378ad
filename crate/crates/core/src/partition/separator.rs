//! Random vertex sets from unit vectors.
//!
//! Points are carved into clusters by balls of a random radius below half the
//! separation distance `sqrt(2 (1 - beta))`, centered at the points in random
//! order. Every cluster then joins the output independently with probability
//! `1/m`. Each point is included with probability exactly `1/m`, and two points
//! with `<u, v> <= beta` never share a cluster, so they are both included with
//! probability at most `1/m^2`. Close points usually share a cluster, which is
//! what keeps edges uncut.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::rng_for;
use crate::{HgError, Result};

#[derive(Clone, Debug)]
pub struct OrthogonalSeparator {
    points: Vec<Vec<f64>>,
    radius: f64,
    m: usize,
}

impl OrthogonalSeparator {
    pub fn new(points: &[Vec<f64>], beta: f64, m: usize) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(HgError::InvalidInput(format!("beta = {beta} must lie in (0, 1)")));
        }
        if m < 2 {
            return Err(HgError::InvalidInput("m must be at least 2".to_string()));
        }
        for p in points {
            let s: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (s - 1.0).abs() > 1e-6 {
                return Err(HgError::InvalidInput(format!("point of norm {s} is not a unit vector")));
            }
        }
        Ok(OrthogonalSeparator {
            points: points.to_vec(),
            radius: (2.0 * (1.0 - beta)).sqrt() / 2.0,
            m,
        })
    }

    /// Draws one set (sorted indices).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.points.len();
        let r = self.radius * rng.random_range(0.5..1.0);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut cluster = vec![usize::MAX; n];
        for &c in &order {
            for v in 0..n {
                if cluster[v] == usize::MAX {
                    let d: f64 = self.points[c]
                        .iter()
                        .zip(&self.points[v])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if d < r {
                        cluster[v] = c;
                    }
                }
            }
        }
        let p = 1.0 / self.m as f64;
        let keep: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < p).collect();
        (0..n).filter(|&v| keep[cluster[v]]).collect()
    }
}

/// One sample of the separator with the given seed.
pub fn orthogonal_separator(points: &[Vec<f64>], beta: f64, m: usize, seed: u64) -> Result<Vec<usize>> {
    let sep = OrthogonalSeparator::new(points, beta, m)?;
    Ok(sep.sample(&mut rng_for(seed, 0)))
}
