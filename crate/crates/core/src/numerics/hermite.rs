//! Gauss-Hermite rules rescaled to the standard normal density.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::numerics::sum::ComplexSum;
use crate::Vec3;

/// Nodes and weights with sum w_i f(x_i) ~ E[f(X)], X ~ N(0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite3 {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite3 {
    pub fn new(order: usize) -> Result<Self> {
        let rule = gauss_quad::hermite::GaussHermite::new(order)
            .map_err(|_| SimError::domain(format!("Gauss-Hermite order must be >= 2, got {order}")))?;
        let mut pairs: Vec<(f64, f64)> = rule
            .iter()
            .map(|&(x, w)| (x * std::f64::consts::SQRT_2, w / std::f64::consts::PI.sqrt()))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(GaussHermite3 {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// E[f(X)] for X ~ N(0, sigma^2).
    pub fn expect_1d<F: Fn(f64) -> Complex64>(&self, sigma: f64, f: F) -> Complex64 {
        let mut acc = ComplexSum::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(sigma * x) * *w);
        }
        acc.value()
    }

    /// E[f(P)] for independent normal components of standard deviation `sigma`.
    ///
    /// Axes with zero spread collapse to a single node. The reduction is split per outer
    /// node and merged in a fixed order, so the result does not depend on the thread count.
    pub fn expect_3d<F>(&self, sigma: [f64; 3], f: F) -> Complex64
    where
        F: Fn(Vec3) -> Complex64 + Sync,
    {
        let axis = |s: f64| -> Vec<(f64, f64)> {
            if s == 0.0 {
                vec![(0.0, 1.0)]
            } else {
                self.nodes.iter().zip(&self.weights).map(|(x, w)| (s * x, *w)).collect()
            }
        };
        let ax = axis(sigma[0]);
        let ay = axis(sigma[1]);
        let az = axis(sigma[2]);
        let partials: Vec<ComplexSum> = ax
            .par_iter()
            .map(|&(px, wx)| {
                let mut acc = ComplexSum::default();
                for &(py, wy) in &ay {
                    for &(pz, wz) in &az {
                        acc.add(f(Vec3::new(px, py, pz)) * (wx * wy * wz));
                    }
                }
                acc
            })
            .collect();
        let mut total = ComplexSum::default();
        for p in &partials {
            total.merge(p);
        }
        total.value()
    }
}

/// Shared rule of the given order, built once per process.
pub fn gauss_hermite(order: usize) -> Result<Arc<GaussHermite3>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&order) {
        return Ok(r.clone());
    }
    let rule = Arc::new(GaussHermite3::new(order)?);
    cache.lock().unwrap().insert(order, rule.clone());
    Ok(rule)
}
