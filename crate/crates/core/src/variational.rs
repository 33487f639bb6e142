//! Parity-restricted Hermite-basis eigensolver for the relative Hamiltonian
//! H_x = −½∂² + ½x² + (g/2)/(x² + d²) at arbitrary (g, d), with g-sweeps of
//! the entanglement spectrum and detection of the couplings where it becomes
//! finite.
//!
//! The interaction matrix is projected with Gauss–Hermite quadrature. At a
//! quasi-exact point V·ψ is a polynomial times a Gaussian, so the exact state
//! is an exact eigenvector of the discretized matrix whatever the node count.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{renyi_from_values, von_neumann_from_values};
use crate::error::{Error, Result};
use crate::heun::Parity;
use crate::linalg::sorted_symmetric_eigen;
use crate::quadrature::{hermite_functions, GaussHermite};
use crate::rdm::{pure_state_spectrum, rotation_expand, EntanglementSpectrum, HermiteCoefficients};

pub const DEFAULT_BASIS_SIZE: usize = 150;
/// Enough for matrix entries to be stable under node doubling down to d² = 0.5.
pub const DEFAULT_QUADRATURE_NODES: usize = 1600;
pub const DEFAULT_TRACKED: usize = 12;
pub const NULL_THRESHOLD: f64 = 1e-8;

/// Coefficients at or below this are dropped from the tail before the RDM.
const COEFFICIENT_TRIM: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// spectral basis, interaction by `quadrature_nodes`-point quadrature
    Quadrature,
    /// Hermite-DVR: the full 2M-function basis collocated on its own 2M nodes
    Dvr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub basis_size: usize,
    pub quadrature_nodes: usize,
    pub parity: Parity,
    pub projection: Projection,
}

impl SolverConfig {
    pub fn new(parity: Parity) -> Self {
        Self {
            basis_size: DEFAULT_BASIS_SIZE,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
            parity,
            projection: Projection::Quadrature,
        }
    }

    /// Basis of `m` functions with the smallest admissible node count
    /// that is at least the default.
    pub fn with_basis_size(parity: Parity, m: usize) -> Self {
        Self {
            basis_size: m,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES.max(2 * m + 32),
            parity,
            projection: Projection::Quadrature,
        }
    }

    pub fn dvr(parity: Parity, m: usize) -> Self {
        Self {
            basis_size: m,
            quadrature_nodes: 2 * m,
            parity,
            projection: Projection::Dvr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.basis_size < 10 {
            return Err(Error::InvalidArgument(format!(
                "basis size must be at least 10, got {}",
                self.basis_size
            )));
        }
        match self.projection {
            Projection::Quadrature if self.quadrature_nodes < 2 * self.basis_size + 32 => {
                Err(Error::InvalidArgument(format!(
                    "quadrature needs at least 2M + 32 = {} nodes, got {}",
                    2 * self.basis_size + 32,
                    self.quadrature_nodes
                )))
            }
            Projection::Dvr if self.quadrature_nodes != 2 * self.basis_size => {
                Err(Error::InvalidArgument(format!(
                    "DVR uses exactly 2M = {} nodes, got {}",
                    2 * self.basis_size,
                    self.quadrature_nodes
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Lowest eigenpair of one parity sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalState {
    /// relative-coordinate energy E_x
    pub energy: f64,
    /// unit vector over ψ_{2j+σ}, j < M, largest entry positive
    pub coefficients: Vec<f64>,
    pub config: SolverConfig,
    pub g: f64,
    pub d: f64,
}

impl VariationalState {
    pub fn hermite_coefficients(&self) -> HermiteCoefficients {
        let c = HermiteCoefficients::from_parity_basis(&self.coefficients, self.config.parity)
            .trimmed(COEFFICIENT_TRIM);
        let norm = c.norm_squared().sqrt();
        HermiteCoefficients {
            c: c.c.iter().map(|x| x / norm).collect(),
        }
    }

    /// Two-particle coefficient matrix of ψ_0(X) ψ(x).
    pub fn coefficient_matrix(&self) -> DMatrix<f64> {
        rotation_expand(&self.hermite_coefficients())
    }

    pub fn spectrum(&self) -> Result<EntanglementSpectrum> {
        pure_state_spectrum(&self.coefficient_matrix())
    }
}

/// Interaction matrix ⟨ψ_{2i+σ}| 1/(x² + d²) |ψ_{2j+σ}⟩ for one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix {
    pub d: f64,
    pub matrix: DMatrix<f64>,
}

/// Solver with the basis tabulated on the quadrature nodes once.
#[derive(Debug, Clone)]
pub struct VariationalSolver {
    config: SolverConfig,
    nodes: Vec<f64>,
    /// table[(k, j)] = √w̃_k ψ_{2j+σ}(x_k), nonnegative nodes only
    table: DMatrix<f64>,
}

impl VariationalSolver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let rule = GaussHermite::new(config.quadrature_nodes)?;
        let sigma = config.parity.sigma();
        let m = config.basis_size;
        // Parity-matched integrands are even: fold onto x ≥ 0.
        let half: Vec<(f64, f64)> = rule
            .nodes()
            .iter()
            .zip(rule.scaled_weights())
            .filter(|(&x, _)| x >= 0.0)
            .map(|(&x, &w)| (x, if x == 0.0 { w } else { 2.0 * w }))
            .collect();
        let top = 2 * (m - 1) + sigma + 1;
        let mut table = DMatrix::<f64>::zeros(half.len(), m);
        for (k, &(x, w)) in half.iter().enumerate() {
            let psi = hermite_functions(x, top);
            let sw = w.sqrt();
            for j in 0..m {
                table[(k, j)] = sw * psi[2 * j + sigma];
            }
        }
        let nodes = half.iter().map(|p| p.0).collect();
        Ok(Self {
            config,
            nodes,
            table,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn potential_matrix(&self, d: f64) -> Result<PotentialMatrix> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "variational solver needs a finite cutoff d > 0, got {d}"
            )));
        }
        let mut scaled = self.table.clone();
        for (k, &x) in self.nodes.iter().enumerate() {
            let v = 1.0 / (x * x + d * d);
            scaled.row_mut(k).scale_mut(v);
        }
        let mut matrix = self.table.transpose() * scaled;
        // exact symmetry
        let m = matrix.nrows();
        for i in 0..m {
            for j in 0..i {
                let s = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
                matrix[(i, j)] = s;
                matrix[(j, i)] = s;
            }
        }
        Ok(PotentialMatrix { d, matrix })
    }

    /// diag(2j + σ + ½) + (g/2) V
    pub fn hamiltonian_with(&self, g: f64, v: &PotentialMatrix) -> Result<DMatrix<f64>> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coupling must be finite and non-negative, got {g}"
            )));
        }
        let sigma = self.config.parity.sigma() as f64;
        let mut h = &v.matrix * (0.5 * g);
        for j in 0..h.nrows() {
            h[(j, j)] += 2.0 * j as f64 + sigma + 0.5;
        }
        Ok(h)
    }

    pub fn hamiltonian_matrix(&self, g: f64, d: f64) -> Result<DMatrix<f64>> {
        self.hamiltonian_with(g, &self.potential_matrix(d)?)
    }

    pub fn ground_state_with(&self, g: f64, v: &PotentialMatrix) -> Result<VariationalState> {
        let h = self.hamiltonian_with(g, v)?;
        let (values, vectors) = sorted_symmetric_eigen(h)?;
        let mut coefficients: Vec<f64> = vectors.column(0).iter().copied().collect();
        let pivot = coefficients
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        if pivot < 0.0 {
            coefficients.iter_mut().for_each(|c| *c = -*c);
        }
        Ok(VariationalState {
            energy: values[0],
            coefficients,
            config: self.config,
            g,
            d: v.d,
        })
    }

    pub fn ground_state(&self, g: f64, d: f64) -> Result<VariationalState> {
        self.ground_state_with(g, &self.potential_matrix(d)?)
    }

    /// Ground-state entanglement spectrum at (g, d).
    pub fn spectrum_with(&self, g: f64, v: &PotentialMatrix) -> Result<EntanglementSpectrum> {
        self.ground_state_with(g, v)?.spectrum()
    }
}

/// One-shot ground state; builds the solver tables on every call.
pub fn ground_state(g: f64, d: f64, config: SolverConfig) -> Result<VariationalState> {
    VariationalSolver::new(config)?.ground_state(g, d)
}

pub fn hamiltonian_matrix(g: f64, d: f64, config: SolverConfig) -> Result<DMatrix<f64>> {
    VariationalSolver::new(config)?.hamiltonian_matrix(g, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: f64,
    pub energy: f64,
    /// top-K eigenvalues, descending, zero padded
    pub eigenvalues: Vec<f64>,
    pub von_neumann: f64,
    /// S^a in the order of [`SweepTable::orders`]
    pub renyi: Vec<f64>,
    /// set when the solve failed; numeric fields are NaN then
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub d: f64,
    pub parity: Parity,
    pub tracked: usize,
    pub orders: Vec<f64>,
    pub config: SolverConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// (g, tracked eigenvalues) for rows that solved.
    pub fn eigenvalue_rows(&self) -> Vec<(f64, Vec<f64>)> {
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| (r.g, r.eigenvalues.clone()))
            .collect()
    }
}

fn sweep_row(
    solver: &VariationalSolver,
    v: &PotentialMatrix,
    g: f64,
    tracked: usize,
    orders: &[f64],
) -> SweepRow {
    let solved = solver.ground_state_with(g, v).and_then(|s| {
        let spec = s.spectrum()?;
        let renyi = orders
            .iter()
            .map(|&a| renyi_from_values(&spec.eigenvalues, a))
            .collect::<Result<Vec<_>>>()?;
        Ok((s.energy, spec, renyi))
    });
    match solved {
        Ok((energy, spec, renyi)) => SweepRow {
            g,
            energy,
            eigenvalues: (0..tracked).map(|i| spec.get(i)).collect(),
            von_neumann: von_neumann_from_values(&spec.eigenvalues),
            renyi,
            error: None,
        },
        Err(e) => SweepRow {
            g,
            energy: f64::NAN,
            eigenvalues: vec![f64::NAN; tracked],
            von_neumann: f64::NAN,
            renyi: vec![f64::NAN; orders.len()],
            error: Some(e.to_string()),
        },
    }
}

/// Ground state, top-`tracked` RDM eigenvalues and entropies at every g.
/// Rows are solved in parallel and returned in grid order; a failed row is
/// recorded and the sweep continues.
pub fn sweep(
    solver: &VariationalSolver,
    d: f64,
    g_grid: &[f64],
    tracked: usize,
    orders: &[f64],
) -> Result<SweepTable> {
    if g_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "coupling grid must be strictly ascending".to_string(),
        ));
    }
    if tracked == 0 {
        return Err(Error::InvalidArgument("track at least one eigenvalue".to_string()));
    }
    if let Some(a) = orders.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "Rényi order must be positive, got {a}"
        )));
    }
    let v = solver.potential_matrix(d)?;
    let rows = g_grid
        .par_iter()
        .map(|&g| sweep_row(solver, &v, g, tracked, orders))
        .collect();
    Ok(SweepTable {
        d,
        parity: solver.config().parity,
        tracked,
        orders: orders.to_vec(),
        config: *solver.config(),
        rows,
    })
}

/// `steps + 1` evenly spaced points from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullPoint {
    pub g: f64,
    /// 0-based index of the largest tracked eigenvalue that vanishes here
    pub first_index: usize,
    /// that eigenvalue at the refined location
    pub residual: f64,
    /// occupations above the threshold at g
    pub rank: usize,
    /// tracked eigenvalues at or below the threshold at g
    pub vanishing: usize,
}

/// Local minima (row, index) of each tracked eigenvalue on the sweep grid.
pub fn eigenvalue_minima(table: &SweepTable) -> Vec<(usize, usize)> {
    let rows = &table.rows;
    let mut out = Vec::new();
    for k in 1..rows.len().saturating_sub(1) {
        if rows[k - 1..=k + 1].iter().any(|r| r.error.is_some()) {
            continue;
        }
        for i in 0..table.tracked {
            let (a, b, c) = (
                rows[k - 1].eigenvalues[i],
                rows[k].eigenvalues[i],
                rows[k + 1].eigenvalues[i],
            );
            if b < a && b <= c {
                out.push((k, i));
            }
        }
    }
    out
}

/// Iterated three-point parabola on λ_i(g) starting from a grid bracket.
/// Near a finite-spectrum point λ_i ≈ c (g − g_n)², so the vertex converges
/// to g_n. Returns (g, λ_i(g)).
pub fn refine_minimum(
    solver: &VariationalSolver,
    v: &PotentialMatrix,
    index: usize,
    g_mid: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let eval = |g: f64| -> Result<f64> { Ok(solver.spectrum_with(g, v)?.get(index)) };
    let mut g = g_mid;
    let mut h = h;
    for _ in 0..40 {
        let lo = (g - h).max(0.0);
        let hi = g + h;
        let (a, b, c) = (eval(lo)?, eval(g)?, eval(hi)?);
        let (hl, hr) = (g - lo, hi - g);
        // vertex of the parabola through (−hl, a), (0, b), (hr, c)
        let num = hr * hr * (a - b) - hl * hl * (c - b);
        let den = hr * (a - b) + hl * (c - b);
        if !(den > 0.0) {
            break;
        }
        let step = (0.5 * num / den).clamp(-2.0 * h, 2.0 * h);
        g = (g + step).max(0.0);
        if step.abs() <= 1e-12 * (1.0 + g.abs()) && h <= 1e-6 {
            break;
        }
        h = (0.1 * h).max(1e-7).max(2.0 * step.abs()).min(h);
    }
    Ok((g, eval(g)?))
}

/// Couplings in the sweep range where tracked eigenvalues vanish.
///
/// Grid minima are refined with the solver; a minimum is kept when the
/// refined eigenvalue is at most `threshold`. Candidates within two grid rows
/// of each other are one cluster, reported by its lowest index.
pub fn null_point_detect(
    solver: &VariationalSolver,
    table: &SweepTable,
    threshold: f64,
) -> Result<Vec<NullPoint>> {
    let v = solver.potential_matrix(table.d)?;
    let mut minima = eigenvalue_minima(table);
    minima.sort();
    let mut clusters: Vec<Vec<(usize, usize)>> = Vec::new();
    for m in minima {
        match clusters.last_mut() {
            Some(cl) if m.0 <= cl.iter().map(|c| c.0).max().unwrap_or(0) + 2 => cl.push(m),
            _ => clusters.push(vec![m]),
        }
    }
    let found: Vec<Option<NullPoint>> = clusters
        .par_iter()
        .map(|cl| -> Result<Option<NullPoint>> {
            let mut order = cl.clone();
            order.sort_by_key(|&(k, i)| (i, k));
            for (k, i) in order {
                let h = 0.5 * (table.rows[k + 1].g - table.rows[k - 1].g);
                let (g, residual) = refine_minimum(solver, &v, i, table.rows[k].g, h)?;
                if residual <= threshold {
                    let spec = solver.spectrum_with(g, &v)?;
                    let rank = spec.rank(threshold);
                    let vanishing = (0..table.tracked)
                        .filter(|&j| spec.get(j) <= threshold)
                        .count();
                    return Ok(Some(NullPoint {
                        g,
                        first_index: i,
                        residual,
                        rank,
                        vanishing,
                    }));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let mut points: Vec<NullPoint> = found.into_iter().flatten().collect();
    points.sort_by(|a, b| a.g.total_cmp(&b.g));
    points.dedup_by(|b, a| (b.g - a.g).abs() <= 1e-6 * (1.0 + a.g.abs()));
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueTrace {
    pub d: f64,
    /// 0-based eigenvalue index
    pub index: usize,
    pub samples: Vec<(f64, f64)>,
    /// refined couplings where the eigenvalue vanishes
    pub zeros: Vec<f64>,
}

/// One RDM eigenvalue vs g for several cutoffs, with its zeros located.
pub fn eigenvalue_trace(
    config: SolverConfig,
    d_list: &[f64],
    g_grid: &[f64],
    index: usize,
    threshold: f64,
) -> Result<Vec<EigenvalueTrace>> {
    let solver = VariationalSolver::new(config)?;
    d_list
        .iter()
        .map(|&d| {
            let table = sweep(&solver, d, g_grid, index + 1, &[])?;
            let v = solver.potential_matrix(d)?;
            let samples: Vec<(f64, f64)> =
                table.rows.iter().map(|r| (r.g, r.eigenvalues[index])).collect();
            let mut zeros = Vec::new();
            for (k, i) in eigenvalue_minima(&table) {
                if i != index {
                    continue;
                }
                let h = 0.5 * (table.rows[k + 1].g - table.rows[k - 1].g);
                let (g, residual) = refine_minimum(&solver, &v, index, table.rows[k].g, h)?;
                if residual <= threshold {
                    zeros.push(g);
                }
            }
            Ok(EigenvalueTrace {
                d,
                index,
                samples,
                zeros,
            })
        })
        .collect()
}

/// The 7th eigenvalue traces of the symmetric ground state.
pub fn seventh_eigenvalue_trace(
    config: SolverConfig,
    d_list: &[f64],
    g_grid: &[f64],
) -> Result<Vec<EigenvalueTrace>> {
    if config.parity != Parity::Symmetric {
        return Err(Error::InvalidArgument(
            "the 7th-eigenvalue trace is defined for the symmetric sector".to_string(),
        ));
    }
    eigenvalue_trace(config, d_list, g_grid, 6, NULL_THRESHOLD)
}
