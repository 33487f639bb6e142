//! Orthonormal Hermite functions and Gauss–Hermite quadrature.
//!
//! Hermite functions are evaluated with a rescaled three-term recurrence so
//! that large node counts (|x| ≳ 38) neither overflow the polynomial part nor
//! underflow the Gaussian before the two are combined.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenvalues;

const RESCALE: f64 = 1e200;
const LN_RESCALE: f64 = 460.517_018_598_809_1; // 200 ln 10

/// Values ψ_0(x), …, ψ_{count-1}(x) of the orthonormal Hermite functions
/// ψ_k(x) = H_k(x) e^{−x²/2} / √(2^k k! √π).
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let gauss = -0.5 * x * x;
    let mut log_scale = 0.0;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out.push(cur * gauss.exp());
    for k in 0..count - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += LN_RESCALE;
        }
        out.push(cur * (log_scale + gauss).exp());
    }
    out
}

/// ψ_n(x) / ψ_n'(x), finite at every x that is not a critical point of ψ_n.
fn newton_ratio(x: f64, n: usize) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
        }
    }
    // ψ_n' = √(2n) ψ_{n−1} − x ψ_n, the Gaussian factor cancels in the ratio
    cur / ((2.0 * n as f64).sqrt() * prev - x * cur)
}

/// n-point Gauss–Hermite rule for ∫ e^{−x²} f(x) dx, exact for polynomial f
/// of degree ≤ 2n − 1.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch nodes polished by Newton iteration; weights from the
    /// Christoffel–Darboux identity w̃_k = 1 / (n ψ_{n−1}(x_k)²).
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node".to_string(),
            ));
        }
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
        let mut nodes = tridiagonal_eigenvalues(&diag, &off)?;
        for x in nodes.iter_mut() {
            for _ in 0..4 {
                let step = newton_ratio(*x, n);
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }
        nodes.sort_by(f64::total_cmp);
        // exact reflection symmetry
        for k in 0..n / 2 {
            let m = 0.5 * (nodes[n - 1 - k] - nodes[k]);
            nodes[k] = -m;
            nodes[n - 1 - k] = m;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let scaled_weights: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                let psi = hermite_functions(x, n);
                1.0 / (n as f64 * psi[n - 1] * psi[n - 1])
            })
            .collect();
        let weights = nodes
            .iter()
            .zip(&scaled_weights)
            .map(|(&x, &w)| w * (-x * x).exp())
            .collect();
        Ok(Self {
            nodes,
            weights,
            scaled_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Standard weights w_k for the e^{−x²} measure.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// w_k e^{x_k²}, the weights for integrands that already carry their own
    /// Gaussian decay (products of Hermite functions).
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// ∫ e^{−x²} f(x) dx
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// ∫ f(x) dx for f decaying like a Gaussian.
    pub fn integrate_decaying<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
