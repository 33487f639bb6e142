//! Rényi and von Neumann entropies (bits) of entanglement spectra, and the
//! exponent analysis of the kinks S^a(g) develops where the spectrum is finite.
//!
//! Near a finite-spectrum coupling g_n the vanishing eigenvalues behave like
//! λ ∝ (g − g_n)^{2k}. With k_m the smallest such k and χ = 2a, the one-sided
//! derivatives of S^a diverge with opposite signs when χk_m < 1, jump by a
//! finite amount when χk_m = 1 and are continuous otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rdm::EntanglementSpectrum;

/// Eigenvalues below this are left out of entropy sums.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Orders closer than this to 1 are evaluated as von Neumann entropy.
pub const VON_NEUMANN_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    Renyi,
    VonNeumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub a: f64,
    /// bits
    pub value: f64,
    pub method: EntropyMethod,
}

fn retained(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    values.iter().copied().filter(|&l| l >= EIGENVALUE_FLOOR)
}

/// S^a = log2(Σ λ^a) / (1 − a) over the raw eigenvalue list.
pub fn renyi_from_values(values: &[f64], a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Rényi order must be positive and finite, got {a}"
        )));
    }
    if (a - 1.0).abs() < VON_NEUMANN_WINDOW {
        return Ok(von_neumann_from_values(values));
    }
    let sum: f64 = retained(values).map(|l| l.powf(a)).sum();
    Ok((sum.log2() / (1.0 - a)).max(0.0))
}

/// −Σ λ log2 λ with 0 log 0 = 0.
pub fn von_neumann_from_values(values: &[f64]) -> f64 {
    let s: f64 = retained(values).map(|l| -l * l.log2()).sum();
    s.max(0.0)
}

pub fn renyi_entropy(spectrum: &EntanglementSpectrum, a: f64) -> Result<EntropyResult> {
    let value = renyi_from_values(&spectrum.eigenvalues, a)?;
    let method = if (a - 1.0).abs() < VON_NEUMANN_WINDOW {
        EntropyMethod::VonNeumann
    } else {
        EntropyMethod::Renyi
    };
    Ok(EntropyResult { a, value, method })
}

pub fn von_neumann_entropy(spectrum: &EntanglementSpectrum) -> EntropyResult {
    EntropyResult {
        a: 1.0,
        value: von_neumann_from_values(&spectrum.eigenvalues),
        method: EntropyMethod::VonNeumann,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub g: f64,
    pub von_neumann: f64,
    /// S^a in the order of [`EntropyTable::orders`]
    pub renyi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTable {
    pub orders: Vec<f64>,
    pub rows: Vec<EntropyRow>,
}

/// S^a(g) for every order in `orders` plus S_vN(g).
pub fn entropy_curve(
    spectra: &[(f64, EntanglementSpectrum)],
    orders: &[f64],
) -> Result<EntropyTable> {
    let rows = spectra
        .iter()
        .map(|(g, spec)| {
            let renyi = orders
                .iter()
                .map(|&a| renyi_from_values(&spec.eigenvalues, a))
                .collect::<Result<Vec<_>>>()?;
            Ok(EntropyRow {
                g: *g,
                von_neumann: von_neumann_from_values(&spec.eigenvalues),
                renyi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyTable {
        orders: orders.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeClass {
    /// χk_m < 1: one-sided derivatives diverge with opposite signs
    Divergent,
    /// χk_m = 1: finite jump in the first derivative
    FiniteJump,
    /// χk_m > 1: continuous first derivative
    Smooth,
}

impl DerivativeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DerivativeClass::Divergent => "divergent",
            DerivativeClass::FiniteJump => "finite_jump",
            DerivativeClass::Smooth => "smooth",
        }
    }
}

/// Classifies χk_m = 2a·k_m against 1 with tolerance `tol`.
pub fn classify_kink(a: f64, k_m: f64, tol: f64) -> DerivativeClass {
    let chi_k = 2.0 * a * k_m;
    if (chi_k - 1.0).abs() <= tol {
        DerivativeClass::FiniteJump
    } else if chi_k < 1.0 {
        DerivativeClass::Divergent
    } else {
        DerivativeClass::Smooth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkReport {
    pub g_n: f64,
    pub a: f64,
    /// 0-based position of the fitted eigenvalue in the descending spectrum
    pub eigenvalue_index: usize,
    /// fitted log–log slope, an estimate of 2k_m
    pub exponent_fit: f64,
    pub exponent_stderr: f64,
    pub r_squared: f64,
    pub k_m_fit: f64,
    pub chi_k_m: f64,
    pub derivative_class: DerivativeClass,
}

/// Lower and upper edge of the |g − g_n| fitting window.
pub const FIT_WINDOW: (f64, f64) = (1e-3, 1e-1);
pub const MIN_POINTS_PER_SIDE: usize = 20;
pub const MIN_R_SQUARED: f64 = 0.99;

struct LineFit {
    slope: f64,
    stderr: f64,
    r_squared: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let stderr = if n > 2.0 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    LineFit {
        slope,
        stderr,
        r_squared,
    }
}

/// Fits log λ_i against log|g − g_n| inside [`FIT_WINDOW`] for every tracked
/// eigenvalue that vanishes at g_n (slope ≥ 1 and all window values above
/// [`EIGENVALUE_FLOOR`]); the smallest slope is 2k_m.
///
/// `rows` are (g, descending eigenvalues) pairs from a sweep around g_n.
pub fn kink_analysis(rows: &[(f64, Vec<f64>)], g_n: f64, a: f64) -> Result<KinkReport> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Rényi order must be positive, got {a}"
        )));
    }
    let in_window: Vec<&(f64, Vec<f64>)> = rows
        .iter()
        .filter(|(g, _)| {
            let dist = (g - g_n).abs();
            dist >= FIT_WINDOW.0 * (1.0 - 1e-9) && dist <= FIT_WINDOW.1 * (1.0 + 1e-9)
        })
        .collect();
    let left = in_window.iter().filter(|(g, _)| *g < g_n).count();
    let right = in_window.len() - left;
    if left < MIN_POINTS_PER_SIDE || right < MIN_POINTS_PER_SIDE {
        return Err(Error::InvalidArgument(format!(
            "need {MIN_POINTS_PER_SIDE} points per side inside the fit window, got {left} left and {right} right"
        )));
    }
    let tracked = in_window.iter().map(|(_, v)| v.len()).min().unwrap_or(0);
    let xs: Vec<f64> = in_window.iter().map(|(g, _)| (g - g_n).abs().ln()).collect();

    let mut best: Option<(usize, LineFit)> = None;
    for i in 0..tracked {
        let vals: Vec<f64> = in_window.iter().map(|(_, v)| v[i]).collect();
        if vals.iter().any(|&l| l < EIGENVALUE_FLOOR) {
            continue;
        }
        let ys: Vec<f64> = vals.iter().map(|l| l.ln()).collect();
        let fit = fit_line(&xs, &ys);
        if fit.slope < 1.0 {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| fit.slope < b.slope) {
            best = Some((i, fit));
        }
    }
    let (index, fit) = best.ok_or_else(|| {
        Error::FitRejected(format!("no vanishing eigenvalue resolved near g = {g_n}"))
    })?;
    if fit.r_squared < MIN_R_SQUARED {
        return Err(Error::FitRejected(format!(
            "R² = {:.4} below {MIN_R_SQUARED} for eigenvalue {}",
            fit.r_squared,
            index + 1
        )));
    }
    let k_m = 0.5 * fit.slope;
    let chi_k_m = 2.0 * a * k_m;
    let tol = (3.0 * a * fit.stderr).max(1e-3);
    Ok(KinkReport {
        g_n,
        a,
        eigenvalue_index: index,
        exponent_fit: fit.slope,
        exponent_stderr: fit.stderr,
        r_squared: fit.r_squared,
        k_m_fit: k_m,
        chi_k_m,
        derivative_class: classify_kink(a, k_m, tol),
    })
}

/// Log-spaced couplings g_n ± δ with δ in [`FIT_WINDOW`], `per_side` on each side, ascending.
pub fn kink_grid(g_n: f64, per_side: usize) -> Vec<f64> {
    let (lo, hi) = (FIT_WINDOW.0.ln(), FIT_WINDOW.1.ln());
    let steps: Vec<f64> = (0..per_side)
        .map(|i| {
            let t = if per_side > 1 {
                i as f64 / (per_side - 1) as f64
            } else {
                0.0
            };
            (lo + t * (hi - lo)).exp()
        })
        .collect();
    let mut grid: Vec<f64> = steps.iter().rev().map(|s| g_n - s).collect();
    grid.extend(steps.iter().map(|s| g_n + s));
    grid
}
