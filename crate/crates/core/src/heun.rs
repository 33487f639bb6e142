//! Confluent Heun reduction of the relative Hamiltonian
//!
//! ```text
//! H_x = −½ d²/dx² + ½ x² + (g/2) / (x² + d²)
//! ```
//!
//! With z = (x/d)², ξ = −z and ψ = e^{−x²/2} x^σ (1 − ξ) f(ξ), the function f
//! satisfies the confluent Heun equation. Its power series f = Σ v_n ξⁿ obeys
//! the three-term recurrence `A_n v_n = B_n v_{n−1} + C_n v_{n−2}`. Polynomial
//! solutions of degree N require v_{N+1} = v_{N+2} = 0: the condition
//! C_{N+2} = 0 quantizes the energy and v_{N+1}(g) = 0 selects the couplings.
//!
//! Only B_n depends on g, and linearly, so v_n is a polynomial of degree n in
//! g. The coupling roots are found from that polynomial through a companion
//! matrix and then polished by Newton iteration on the numeric recurrence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::polynomial_roots;

/// Exchange symmetry of the two-particle state, equivalently the parity of the
/// relative wavefunction under x → −x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    /// Heun β: −½ for even, +½ for odd relative states.
    pub fn beta(self) -> f64 {
        match self {
            Parity::Symmetric => -0.5,
            Parity::Antisymmetric => 0.5,
        }
    }

    /// Power σ of the explicit x factor; also the lowest Hermite index in the sector.
    pub fn sigma(self) -> usize {
        match self {
            Parity::Symmetric => 0,
            Parity::Antisymmetric => 1,
        }
    }

    /// Smallest Calogero index p with a polynomial solution in this sector.
    pub fn lowest_branch(self) -> usize {
        match self {
            Parity::Symmetric => 2,
            Parity::Antisymmetric => 3,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Parity::Symmetric => "sym",
            Parity::Antisymmetric => "antisym",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sym" | "symmetric" | "even" => Ok(Parity::Symmetric),
            "antisym" | "antisymmetric" | "odd" => Ok(Parity::Antisymmetric),
            other => Err(Error::InvalidArgument(format!(
                "unknown parity '{other}', expected sym or antisym"
            ))),
        }
    }
}

/// The Heun constants for a given (g, d, parity, k²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParameters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub eta: f64,
    pub delta: f64,
    pub k_squared: f64,
    pub coupling: f64,
    pub cutoff: f64,
}

/// Builds the Heun constants. η and δ are taken in closed form; μ and ν are
/// then fixed by the defining identities
/// `η = ½(α − β − γ + αβ − βγ) − μ` and `δ = ν − η − ½(α + β + γ + αγ + βγ)`,
/// which keeps all seven constants consistent in both parity sectors.
pub fn heun_parameters(g: f64, d: f64, parity: Parity, k_squared: f64) -> HeunParameters {
    let d2 = d * d;
    let alpha = d2;
    let beta = parity.beta();
    let gamma = 1.0;
    let eta = 0.25 * (d2 * k_squared - g + 2.0);
    let delta = -0.25 * d2 * k_squared;
    let mu = 0.5 * (alpha - beta - gamma + alpha * beta - beta * gamma) - eta;
    let nu = delta + eta + 0.5 * (alpha + beta + gamma + alpha * gamma + beta * gamma);
    HeunParameters {
        alpha,
        beta,
        gamma,
        mu,
        nu,
        eta,
        delta,
        k_squared,
        coupling: g,
        cutoff: d,
    }
}

/// (A_n, B_n, C_n) of the recurrence, n ≥ 1.
///
/// C_n is evaluated as (δ + α((β+γ)/2 + n − 1)) / n², algebraically equal to
/// the α-factored form and finite at α = 0.
pub fn recurrence_coefficients(p: &HeunParameters, n: usize) -> (f64, f64, f64) {
    let nf = n as f64;
    let HeunParameters {
        alpha,
        beta,
        gamma,
        eta,
        delta,
        ..
    } = *p;
    let a = 1.0 + beta / nf;
    let b = 1.0
        + (-alpha + beta + gamma - 1.0) / nf
        + (eta - 0.5 * (-alpha + beta + gamma) - 0.5 * alpha * beta + 0.5 * beta * gamma)
            / (nf * nf);
    let c = (delta + alpha * (0.5 * (beta + gamma) + nf - 1.0)) / (nf * nf);
    (a, b, c)
}

/// dB_n/dg; B_n depends on g only through η = (d²k² − g + 2)/4.
fn b_slope(n: usize) -> f64 {
    let nf = n as f64;
    -0.25 / (nf * nf)
}

/// Series coefficients v_0..v_{n_max}, optionally with each v_n as a
/// polynomial in g (ascending powers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub v: Vec<f64>,
    pub as_poly_in_g: Option<Vec<Vec<f64>>>,
}

/// Runs the recurrence numerically with v_0 = 1, v_{−1} = 0.
pub fn heun_series(p: &HeunParameters, n_max: usize) -> SeriesCoefficients {
    let mut v = Vec::with_capacity(n_max + 1);
    v.push(1.0);
    for n in 1..=n_max {
        let (a, b, c) = recurrence_coefficients(p, n);
        let prev2 = if n >= 2 { v[n - 2] } else { 0.0 };
        v.push((b * v[n - 1] + c * prev2) / a);
    }
    SeriesCoefficients {
        v,
        as_poly_in_g: None,
    }
}

/// Like [`heun_series`] but also carries every v_n as an exact polynomial in
/// g at the fixed d and k² of `p`.
pub fn heun_series_with_polynomials(p: &HeunParameters, n_max: usize) -> SeriesCoefficients {
    let mut series = heun_series(p, n_max);
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    polys.push(vec![1.0]);
    for n in 1..=n_max {
        let (a, b, c) = recurrence_coefficients(p, n);
        let slope = b_slope(n);
        let intercept = b - slope * p.coupling;
        let mut next = vec![0.0; n + 1];
        for (i, &coef) in polys[n - 1].iter().enumerate() {
            next[i] += intercept * coef;
            next[i + 1] += slope * coef;
        }
        if n >= 2 {
            for (i, &coef) in polys[n - 2].iter().enumerate() {
                next[i] += c * coef;
            }
        }
        for x in next.iter_mut() {
            *x /= a;
        }
        polys.push(next);
    }
    series.as_poly_in_g = Some(polys);
    series
}

/// Evaluates an ascending-power polynomial.
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// k_N² = 4N + 6 ∓ 1 and the total energy E_N = 2N + (7 ∓ 1)/2 (relative
/// energy k²/2 plus the center-of-mass ground-state energy ½).
pub fn quantized_energy(n: usize, parity: Parity) -> (f64, f64) {
    let sign = match parity {
        Parity::Symmetric => -1.0,
        Parity::Antisymmetric => 1.0,
    };
    let nf = n as f64;
    let k2 = 4.0 * nf + 6.0 + sign;
    let e = 2.0 * nf + 0.5 * (7.0 + sign);
    (k2, e)
}

/// Relative-coordinate energy E_x = k_N²/2.
pub fn relative_energy(n: usize, parity: Parity) -> f64 {
    0.5 * quantized_energy(n, parity).0
}

/// Calogero principal index n of the branch p on level N, from n + p = 2N + (5 ∓ 1)/2.
pub fn calogero_index(n: usize, parity: Parity, p: usize) -> Option<usize> {
    let total = 2 * n + 2 + parity.sigma();
    total.checked_sub(p)
}

/// Branch labels p admissible on level N, ascending (2, 4, …, 2N+2 for even
/// states, 3, 5, …, 2N+3 for odd ones).
pub fn branch_labels(n: usize, parity: Parity) -> Vec<usize> {
    (0..=n).map(|i| parity.lowest_branch() + 2 * i).collect()
}

/// v_{N+1}(g) and its g-derivative at k = k_N.
fn truncation_value(n: usize, parity: Parity, d: f64, g: f64) -> (f64, f64) {
    let (k2, _) = quantized_energy(n, parity);
    let p = heun_parameters(g, d, parity, k2);
    let (mut v_prev, mut v) = (0.0, 1.0);
    let (mut dv_prev, mut dv) = (0.0, 0.0);
    for m in 1..=n + 1 {
        let (a, b, c) = recurrence_coefficients(&p, m);
        let next = (b * v + c * v_prev) / a;
        let dnext = (b_slope(m) * v + b * dv + c * dv_prev) / a;
        v_prev = v;
        v = next;
        dv_prev = dv;
        dv = dnext;
    }
    (v, dv)
}

/// Newton polish of a root of v_{N+1}(g), iterated to round-off.
fn polish_root(n: usize, parity: Parity, d: f64, mut g: f64) -> f64 {
    for _ in 0..60 {
        let (v, dv) = truncation_value(n, parity, d, g);
        if dv == 0.0 || !dv.is_finite() {
            break;
        }
        let step = v / dv;
        g -= step;
        if step.abs() <= 2.0 * f64::EPSILON * g.abs().max(1.0) {
            break;
        }
    }
    g
}

/// A coupling value where a degree-N polynomial solution exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRoot {
    pub p: usize,
    pub g: f64,
}

/// The N+1 real couplings with v_{N+1}(g) = 0 at k = k_N, ascending, labelled
/// by the Calogero index p they continue to at d = 0, where g = p(p−1).
///
/// For d > 0 the roots are simple and never cross as d varies, so ascending
/// order coincides with ascending p.
pub fn coupling_roots(n: usize, parity: Parity, d: f64) -> Result<Vec<CouplingRoot>> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cutoff d must be finite and non-negative, got {d}"
        )));
    }
    let (k2, _) = quantized_energy(n, parity);
    let params = heun_parameters(0.0, d, parity, k2);
    let series = heun_series_with_polynomials(&params, n + 1);
    let poly = &series.as_poly_in_g.as_ref().expect("requested polynomials")[n + 1];

    let mut roots: Vec<f64> = polynomial_roots(poly)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
        .map(|z| polish_root(n, parity, d, z.re))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));

    // every polished value must actually be a root of the numeric recurrence
    roots.retain(|&g| {
        let (v, _) = truncation_value(n, parity, d, g);
        let (k2, _) = quantized_energy(n, parity);
        let vn = heun_series(&heun_parameters(g, d, parity, k2), n).v[n];
        v.abs() <= 1e-10 * vn.abs().max(1.0)
    });

    if roots.len() != n + 1 {
        return Err(Error::RootCount {
            n,
            parity,
            d,
            expected: n + 1,
            found: roots.len(),
        });
    }
    Ok(roots
        .into_iter()
        .zip(branch_labels(n, parity))
        .map(|(g, p)| CouplingRoot { p, g })
        .collect())
}

/// The coupling of branch p on level N at cutoff d.
pub fn branch_coupling(n: usize, parity: Parity, p: usize, d: f64) -> Result<f64> {
    coupling_roots(n, parity, d)?
        .into_iter()
        .find(|r| r.p == p)
        .map(|r| r.g)
        .ok_or(Error::NoBranch { n, parity, p })
}

/// Locus g_p^{(N)}(d) of constant total energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoenergeticCurve {
    pub n: usize,
    pub parity: Parity,
    pub p: usize,
    /// (d, g) pairs
    pub samples: Vec<(f64, f64)>,
    pub energy: f64,
}

/// Samples branch p along `d_grid` by nearest-root continuation from the first
/// grid point, where the branch is identified by its rank.
pub fn isoenergetic_curve(
    n: usize,
    parity: Parity,
    p: usize,
    d_grid: &[f64],
) -> Result<IsoenergeticCurve> {
    let labels = branch_labels(n, parity);
    let rank = labels
        .iter()
        .position(|&q| q == p)
        .ok_or(Error::NoBranch { n, parity, p })?;
    if d_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument(
            "d grid must be ascending".to_string(),
        ));
    }
    let (_, energy) = quantized_energy(n, parity);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        let roots = coupling_roots(n, parity, d)?;
        let g = match samples.len() {
            0 => roots[rank].g,
            len => {
                let (d_prev, g_prev) = samples[len - 1];
                let predicted = if len >= 2 {
                    let (d_pp, g_pp) = samples[len - 2];
                    if d_prev > d_pp {
                        g_prev + (g_prev - g_pp) * (d - d_prev) / (d_prev - d_pp)
                    } else {
                        g_prev
                    }
                } else {
                    g_prev
                };
                let nearest = roots
                    .iter()
                    .map(|r| r.g)
                    .min_by(|a, b| (a - predicted).abs().total_cmp(&(b - predicted).abs()))
                    .expect("non-empty root list");
                if len >= 2 {
                    let step = (predicted - g_prev).abs();
                    let allowed = 10.0 * step.max(1e-6 * (1.0 + g_prev.abs()));
                    if (nearest - g_prev).abs() > allowed {
                        return Err(Error::CurveDiscontinuity {
                            d,
                            from: g_prev,
                            to: nearest,
                        });
                    }
                }
                nearest
            }
        };
        samples.push((d, g));
    }
    Ok(IsoenergeticCurve {
        n,
        parity,
        p,
        samples,
        energy,
    })
}
