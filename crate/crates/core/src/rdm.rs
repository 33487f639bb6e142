//! One-body reduced density matrices in the orthonormal Hermite basis.
//!
//! A two-particle state Ψ_0(X) ψ(x) with ψ = Σ_m c_m ψ_m(x) is rotated back
//! to particle coordinates, giving a coefficient matrix A with
//! Ψ(x1, x2) = Σ_ij A_ij ψ_i(x1) ψ_j(x2). Tracing out particle 2 gives
//! ρ = A Aᵀ. The closed-form matrices, kernels and spectra of the N = 0
//! states are provided as independent oracles.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::Parity;
use crate::linalg::sorted_symmetric_eigen;
use crate::quadrature::{hermite_functions, GaussHermite};
use crate::wavefunction::RelativeState;

/// Degeneracy grouping tolerance for spectra.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Overlaps c_m = ⟨ψ_m|ψ⟩ of a relative state with the Hermite functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteCoefficients {
    pub c: Vec<f64>,
}

impl HermiteCoefficients {
    pub fn norm_squared(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    /// Embeds parity-restricted coefficients (index j ↔ Hermite index 2j + σ).
    pub fn from_parity_basis(coeffs: &[f64], parity: Parity) -> Self {
        let sigma = parity.sigma();
        let len = if coeffs.is_empty() {
            0
        } else {
            2 * (coeffs.len() - 1) + sigma + 1
        };
        let mut c = vec![0.0; len];
        for (j, &v) in coeffs.iter().enumerate() {
            c[2 * j + sigma] = v;
        }
        Self { c }
    }

    /// Drops trailing coefficients with |c_m| ≤ `tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.c.len() > 1 && self.c.last().is_some_and(|x| x.abs() <= tol) {
            self.c.pop();
        }
        self
    }
}

/// Expansion of a closed-form relative state in the first `basis_size`
/// Hermite functions. Exact: the integrand is a polynomial times e^{−x²}, and
/// the quadrature order covers its degree.
pub fn hermite_overlaps(state: &RelativeState, basis_size: usize) -> Result<HermiteCoefficients> {
    let degree = state.degree();
    if basis_size <= degree {
        return Err(Error::BasisTooSmall {
            given: basis_size,
            needed: degree + 1,
        });
    }
    let rule = GaussHermite::new(degree + 1)?;
    let sigma = state.parity.sigma();
    let mut c = vec![0.0; basis_size];
    for (&x, &w) in rule.nodes().iter().zip(rule.scaled_weights()) {
        let psi = state.evaluate(x);
        let table = hermite_functions(x, degree + 1);
        for m in (sigma..=degree).step_by(2) {
            c[m] += w * psi * table[m];
        }
    }
    Ok(HermiteCoefficients { c })
}

/// Two-particle coefficient matrix A[i][j] of ψ_i(x1) ψ_j(x2) for the state
/// ψ_0(X) Σ_m c_m ψ_m(x), using
/// ψ_0(X) ψ_m(x) = Σ_k 2^{−m/2} √C(m,k) (−1)^{m−k} ψ_k(x1) ψ_{m−k}(x2).
pub fn rotation_expand(c: &HermiteCoefficients) -> DMatrix<f64> {
    let size = c.c.len();
    let mut a = DMatrix::<f64>::zeros(size, size);
    for (m, &cm) in c.c.iter().enumerate() {
        if cm == 0.0 {
            continue;
        }
        // r_k = √(C(m,k) / 2^m)
        let mut r = 2f64.powf(-0.5 * m as f64);
        for k in 0..=m {
            let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
            a[(k, m - k)] += cm * sign * r;
            if k < m {
                r *= ((m - k) as f64 / (k + 1) as f64).sqrt();
            }
        }
    }
    a
}

/// Real symmetric one-body density matrix in the Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyRdm {
    pub rho: DMatrix<f64>,
}

impl OneBodyRdm {
    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

/// ρ = A Aᵀ: particle 2 traced out of the pure state with coefficients A.
pub fn one_body_rdm(a: &DMatrix<f64>) -> Result<OneBodyRdm> {
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "two-particle coefficients not normalized: ‖A‖ = {norm}"
        )));
    }
    Ok(OneBodyRdm { rho: a * a.transpose() })
}

/// Descending eigenvalues with degenerate groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSpectrum {
    pub eigenvalues: Vec<f64>,
    /// (value, multiplicity) groups in descending order
    pub multiplicities: Vec<(f64, usize)>,
}

impl EntanglementSpectrum {
    /// Sorts descending, clamps into [0, 1] and groups degeneracies.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let mut multiplicities: Vec<(f64, usize)> = Vec::new();
        for &v in &values {
            match multiplicities.last_mut() {
                Some((head, count)) if (*head - v).abs() <= DEGENERACY_TOL => *count += 1,
                _ => multiplicities.push((v, 1)),
            }
        }
        Self {
            eigenvalues: values,
            multiplicities,
        }
    }

    /// Number of eigenvalues strictly above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&v| v > threshold).count()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// i-th largest eigenvalue (0-based), zero past the end.
    pub fn get(&self, i: usize) -> f64 {
        self.eigenvalues.get(i).copied().unwrap_or(0.0)
    }
}

fn checkerboard_blocks(n: usize) -> [Vec<usize>; 2] {
    [(0..n).step_by(2).collect(), (1..n).step_by(2).collect()]
}

/// Eigenvalues and Hermite-basis eigenvectors (natural orbitals) of ρ,
/// eigenvalues descending. Uses the even/odd block structure of ρ.
pub fn natural_orbitals(rdm: &OneBodyRdm) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = rdm.dim();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n);
    for block in checkerboard_blocks(n) {
        if block.is_empty() {
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| rdm.rho[(block[i], block[j])]);
        let (vals, vecs) = sorted_symmetric_eigen(sub)?;
        for (k, &v) in vals.iter().enumerate() {
            let mut full = vec![0.0; n];
            for (i, &row) in block.iter().enumerate() {
                full[row] = vecs[(i, k)];
            }
            pairs.push((v, full));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| pairs[c].1[r]);
    Ok((values, vectors))
}

/// Entanglement spectrum (natural occupation numbers) of ρ.
pub fn rdm_spectrum(rdm: &OneBodyRdm) -> Result<EntanglementSpectrum> {
    let n = rdm.dim();
    let mut values = Vec::with_capacity(n);
    for block in checkerboard_blocks(n) {
        if block.is_empty() {
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| rdm.rho[(block[i], block[j])]);
        let (vals, _) = sorted_symmetric_eigen(sub)?;
        values.extend(vals);
    }
    Ok(EntanglementSpectrum::from_values(values))
}

/// Spectrum of ρ = A Aᵀ from the singular values of A, block by block.
/// Small occupations come out with relative rather than absolute accuracy,
/// which the null-point and exponent fits rely on.
pub fn pure_state_spectrum(a: &DMatrix<f64>) -> Result<EntanglementSpectrum> {
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "two-particle coefficients not normalized: ‖A‖ = {norm}"
        )));
    }
    let n = a.nrows();
    let mut values = Vec::with_capacity(n);
    for block in checkerboard_blocks(n) {
        if block.is_empty() {
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), a.ncols(), |i, j| a[(block[i], j)]);
        let svd = nalgebra::SVD::try_new(sub, false, false, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("SVD did not converge".to_string()))?;
        values.extend(svd.singular_values.iter().map(|s| s * s));
        values.extend(std::iter::repeat_n(0.0, block.len().saturating_sub(svd.singular_values.len())));
    }
    Ok(EntanglementSpectrum::from_values(values))
}

/// Closed-form state → Hermite overlaps → rotation → ρ.
pub fn state_rdm(state: &RelativeState) -> Result<OneBodyRdm> {
    let c = hermite_overlaps(state, state.degree() + 1)?;
    one_body_rdm(&rotation_expand(&c))
}

/// Full pipeline from a closed-form state to its entanglement spectrum.
pub fn state_spectrum(state: &RelativeState) -> Result<EntanglementSpectrum> {
    rdm_spectrum(&state_rdm(state)?)
}

fn check_supported(level: usize, parity: Parity) -> Result<()> {
    if level == 0 {
        Ok(())
    } else {
        Err(Error::Unsupported { n: level, parity })
    }
}

/// Closed-form spectra of the N = 0 states. `d = ∞` gives the decoupled limit.
///
/// Even sector: λ± = (2 + 4d² + 4d⁴ ± (1 + 2d²)√(3 + 4d² + 4d⁴)) / (2(3 + 4d² + 4d⁴))
/// and λ_o = 1/(3 + 4d² + 4d⁴). Odd sector: both blocks of ρ have trace ½
/// and determinant 27/(16 D²), D = 15 + 12d² + 4d⁴, so
/// λ± = ¼(1 ± √(D² − 27)/D), each twice.
pub fn exact_spectrum(level: usize, parity: Parity, d: f64) -> Result<EntanglementSpectrum> {
    check_supported(level, parity)?;
    let values = match parity {
        Parity::Symmetric => {
            if d.is_infinite() {
                vec![1.0, 0.0, 0.0]
            } else {
                let d2 = d * d;
                let den = 3.0 + 4.0 * d2 + 4.0 * d2 * d2;
                let root = (1.0 + 2.0 * d2) * den.sqrt();
                let base = 2.0 + 4.0 * d2 + 4.0 * d2 * d2;
                let plus = (base + root) / (2.0 * den);
                // λ+λ− = (base² − root²)/(4 den²) = 1/(4 den²), free of cancellation
                let minus = 1.0 / (4.0 * den * den * plus);
                vec![plus, 1.0 / den, minus]
            }
        }
        Parity::Antisymmetric => {
            if d.is_infinite() {
                vec![0.5, 0.5, 0.0, 0.0]
            } else {
                let d2 = d * d;
                let big_d = 15.0 + 12.0 * d2 + 4.0 * d2 * d2;
                let plus = 0.25 * (1.0 + (big_d * big_d - 27.0).sqrt() / big_d);
                let minus = 27.0 / (16.0 * big_d * big_d * plus);
                vec![plus, plus, minus, minus]
            }
        }
    };
    Ok(EntanglementSpectrum::from_values(values))
}

/// Closed-form N = 0 density matrices in the Hermite basis.
pub fn exact_rdm_matrix(level: usize, parity: Parity, d: f64) -> Result<DMatrix<f64>> {
    check_supported(level, parity)?;
    let d2 = d * d;
    Ok(match parity {
        Parity::Symmetric => {
            let den = 0.75 + d2 + d2 * d2;
            let off = (1.0 + 2.0 * d2) / (4.0 * SQRT_2 * den);
            DMatrix::from_row_slice(
                3,
                3,
                &[
                    (0.375 + d2 + d2 * d2) / den,
                    0.0,
                    off,
                    0.0,
                    1.0 / (4.0 * den),
                    0.0,
                    off,
                    0.0,
                    1.0 / (8.0 * den),
                ],
            )
        }
        Parity::Antisymmetric => {
            let den = 4.0 * (15.0 + 12.0 * d2 + 4.0 * d2 * d2);
            let d4 = d2 * d2;
            let e02 = 3.0 * SQRT_2 * (3.0 + 2.0 * d2) / den;
            let e13 = 6f64.sqrt() * (3.0 + 2.0 * d2) / den;
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    (21.0 + 24.0 * d2 + 8.0 * d4) / den,
                    0.0,
                    e02,
                    0.0,
                    0.0,
                    (27.0 + 24.0 * d2 + 8.0 * d4) / den,
                    0.0,
                    e13,
                    e02,
                    0.0,
                    9.0 / den,
                    0.0,
                    0.0,
                    e13,
                    0.0,
                    3.0 / den,
                ],
            )
        }
    })
}

/// Closed-form N = 0 kernels ρ(x, y).
pub fn exact_rdm_kernel(level: usize, parity: Parity, d: f64, x: f64, y: f64) -> Result<f64> {
    check_supported(level, parity)?;
    let d2 = d * d;
    let d4 = d2 * d2;
    let gauss = (-0.5 * (x * x + y * y)).exp();
    let s = x * x + y * y;
    let xy = x * y;
    Ok(match parity {
        Parity::Symmetric => {
            let den = 4.0 * PI.sqrt() * (3.0 + 4.0 * d2 + 4.0 * d4);
            gauss / den
                * (3.0 + 8.0 * d2 + 16.0 * d4
                    + 2.0 * (1.0 + 4.0 * d2) * s
                    + 8.0 * xy
                    + 4.0 * xy * xy)
        }
        Parity::Antisymmetric => {
            let den = 8.0 * PI.sqrt() * (15.0 + 12.0 * d2 + 4.0 * d4);
            gauss / den
                * (15.0 + 24.0 * d2 + 16.0 * d4
                    + (54.0 + 48.0 * d2 + 32.0 * d4) * xy
                    + 6.0 * (3.0 + 4.0 * d2) * s
                    + 4.0 * (3.0 + 4.0 * d2) * xy * s
                    + 36.0 * xy * xy
                    + 8.0 * xy * xy * xy)
        }
    })
}
