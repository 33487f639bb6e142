//! Closed-form relative and two-particle eigenfunctions on the quasi-exact
//! curves.
//!
//! A relative state is stored as
//! `ψ(x) = c · e^{−x²/2} · x^σ · Σ_j q_j x^{2j}` with the polynomial part
//! `Q(t) = (d² + t) Σ_n v_n (−1)ⁿ tⁿ d^{2(N−n)}`, t = x², assembled from the
//! truncated Heun series. Powers of d are cleared so the Calogero limit is
//! finite; at d = 0 exactly, where the cleared series degenerates for the
//! lower branches, the coefficients come from the limiting three-term
//! recurrence of the polynomial itself.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::{
    branch_coupling, calogero_index, heun_parameters, heun_series, quantized_energy, Parity,
};
use crate::quadrature::GaussHermite;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    /// Truncation order N of the Heun series.
    pub level: usize,
    /// Calogero branch label p, g(d = 0) = p(p − 1).
    pub branch: usize,
    /// Calogero principal quantum number n, n + p = 2N + 2 + σ.
    pub calogero_n: usize,
    pub g: f64,
    pub d: f64,
    /// Relative energy E_x = k_N²/2.
    pub relative_energy: f64,
    /// E_x + ½
    pub total_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeState {
    pub parity: Parity,
    /// q_0..q_{N+1}, coefficients of x^{2j}; leading coefficient positive.
    pub even_poly: Vec<f64>,
    pub norm_constant: f64,
    pub meta: StateMeta,
}

/// ∫ x^{2m} e^{−x²} dx = Γ(m + ½)
fn gaussian_moment(m: usize) -> f64 {
    (0..m).fold(PI.sqrt(), |acc, k| acc * (k as f64 + 0.5))
}

/// Cleared polynomial Q(t) from the truncated Heun series, d > 0.
fn series_polynomial(level: usize, parity: Parity, d: f64, g: f64) -> Vec<f64> {
    let (k2, _) = quantized_energy(level, parity);
    let v = heun_series(&heun_parameters(g, d, parity, k2), level).v;
    let d2 = d * d;
    let u: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(n, &vn)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * vn * d2.powi((level - n) as i32)
        })
        .collect();
    let mut q = vec![0.0; level + 2];
    for (n, &un) in u.iter().enumerate() {
        q[n] += d2 * un;
        q[n + 1] += un;
    }
    q
}

/// Q(t) at d = 0 from the recurrence of the polynomial ODE
/// `q_{j−1} L_{j−1} + q_j (d² L_j − M_j + g) − d² q_{j+1} M_{j+1} = 0`
/// with L_j = 2m_j + 1 − k², M_j = m_j(m_j − 1), m_j = 2j + σ, solved
/// downwards from q_{N+1} = 1.
pub(crate) fn polynomial_by_downward_recurrence(
    level: usize,
    parity: Parity,
    d: f64,
    g: f64,
) -> Vec<f64> {
    let (k2, _) = quantized_energy(level, parity);
    let sigma = parity.sigma() as f64;
    let d2 = d * d;
    let m = |j: usize| 2.0 * j as f64 + sigma;
    let l_coef = |j: usize| 2.0 * m(j) + 1.0 - k2;
    let m_coef = |j: usize| m(j) * (m(j) - 1.0);
    let top = level + 1;
    let mut q = vec![0.0; top + 2];
    q[top] = 1.0;
    for j in (1..=top).rev() {
        let rhs = -q[j] * (d2 * l_coef(j) - m_coef(j) + g) + d2 * q[j + 1] * m_coef(j + 1);
        q[j - 1] = rhs / l_coef(j - 1);
    }
    q.truncate(top + 1);
    q
}

/// Builds the normalized relative eigenfunction on branch p of level N at cutoff d.
pub fn build_relative_state(
    level: usize,
    parity: Parity,
    branch: usize,
    d: f64,
) -> Result<RelativeState> {
    let g = branch_coupling(level, parity, branch, d)?;
    let calogero_n = calogero_index(level, parity, branch).ok_or(Error::NoBranch {
        n: level,
        parity,
        p: branch,
    })?;
    let mut q = if d > 0.0 {
        series_polynomial(level, parity, d, g)
    } else {
        polynomial_by_downward_recurrence(level, parity, 0.0, g)
    };
    let lead = *q.last().expect("non-empty polynomial");
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "degenerate polynomial for N={level} p={branch} d={d}"
        )));
    }
    let scale = lead.abs();
    let sign = lead.signum();
    for c in q.iter_mut() {
        *c *= sign / scale;
    }
    let sigma = parity.sigma();
    let mut norm2 = 0.0;
    for (i, qi) in q.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            norm2 += qi * qj * gaussian_moment(i + j + sigma);
        }
    }
    let (k2, total_energy) = quantized_energy(level, parity);
    Ok(RelativeState {
        parity,
        even_poly: q,
        norm_constant: norm2.sqrt().recip(),
        meta: StateMeta {
            level,
            branch,
            calogero_n,
            g,
            d,
            relative_energy: 0.5 * k2,
            total_energy,
        },
    })
}

impl RelativeState {
    /// Degree of the full polynomial prefactor in x.
    pub fn degree(&self) -> usize {
        2 * (self.even_poly.len() - 1) + self.parity.sigma()
    }

    /// Normalized polynomial prefactor P(x) in ascending powers of x, ψ = P e^{−x²/2}.
    pub fn polynomial_in_x(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.degree() + 1];
        for (j, q) in self.even_poly.iter().enumerate() {
            p[2 * j + self.parity.sigma()] = q * self.norm_constant;
        }
        p
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        evaluate_relative(self, x)
    }
}

/// ψ(x) of a normalized relative state.
pub fn evaluate_relative(state: &RelativeState, x: f64) -> f64 {
    let t = x * x;
    let q = state.even_poly.iter().rev().fold(0.0, |acc, &c| acc * t + c);
    let odd = if state.parity.sigma() == 1 { x } else { 1.0 };
    state.norm_constant * (-0.5 * t).exp() * odd * q
}

fn eval_ascending(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// ‖(H_x − E_x)ψ‖ / ‖ψ‖ using the g, d and E_x recorded in `state.meta`.
///
/// With ψ = P e^{−x²/2} the residual is e^{−x²/2} R(x) / (2(x² + d²)) where
/// `R = (x² + d²)(−P'' + 2xP' + (1 − 2E)P) + gP` is an exact polynomial; the
/// remaining rational weight is integrated by Gauss–Hermite quadrature,
/// doubling the node count until two successive estimates agree.
pub fn residual_norm(state: &RelativeState) -> f64 {
    let p = state.polynomial_in_x();
    let g = state.meta.g;
    let d2 = state.meta.d * state.meta.d;
    let two_e = 2.0 * state.meta.relative_energy;
    let deg = p.len() - 1;
    // inner = −P'' + 2xP' + (1 − 2E)P
    let mut inner = vec![0.0; deg + 1];
    for (k, &c) in p.iter().enumerate() {
        let kf = k as f64;
        inner[k] += (2.0 * kf + 1.0 - two_e) * c;
        if k >= 2 {
            inner[k - 2] -= kf * (kf - 1.0) * c;
        }
    }
    let mut r = vec![0.0; deg + 3];
    for (k, &c) in inner.iter().enumerate() {
        r[k + 2] += c;
        r[k] += d2 * c;
    }
    for (k, &c) in p.iter().enumerate() {
        r[k] += g * c;
    }
    let integrate = |nodes: usize| -> f64 {
        let rule = GaussHermite::new(nodes).expect("positive node count");
        rule.integrate(|x| {
            let v = eval_ascending(&r, x) / (2.0 * (x * x + d2));
            v * v
        })
    };
    let mut nodes = 400;
    let mut prev = integrate(nodes);
    while nodes < 6400 {
        nodes *= 2;
        let next = integrate(nodes);
        let converged = (next - prev).abs() <= 1e-8 * next.abs() + 1e-26;
        prev = next;
        if converged {
            break;
        }
    }
    prev.max(0.0).sqrt()
}

/// Relative state times the center-of-mass ground state Ψ(X) = π^{−1/4} e^{−X²/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleState {
    pub relative: RelativeState,
    pub com_energy: f64,
}

impl TwoParticleState {
    pub fn new(relative: RelativeState) -> Self {
        Self {
            relative,
            com_energy: 0.5,
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.relative.meta.relative_energy + self.com_energy
    }
}

/// Ψ(X) ψ(x) with X = (x1 + x2)/√2 and x = (x1 − x2)/√2.
pub fn two_particle_amplitude(state: &TwoParticleState, x1: f64, x2: f64) -> f64 {
    let big_x = FRAC_1_SQRT_2 * (x1 + x2);
    let x = FRAC_1_SQRT_2 * (x1 - x2);
    PI.powf(-0.25) * (-0.5 * big_x * big_x).exp() * evaluate_relative(&state.relative, x)
}
