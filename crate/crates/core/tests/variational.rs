use regcal::heun::{branch_coupling, relative_energy, Parity};
use regcal::rdm::state_spectrum;
use regcal::variational::{
    eigenvalue_minima, ground_state, linear_grid, null_point_detect, seventh_eigenvalue_trace,
    sweep, Projection, SolverConfig, VariationalSolver, NULL_THRESHOLD,
};
use regcal::wavefunction::build_relative_state;

const PARITIES: [Parity; 2] = [Parity::Symmetric, Parity::Antisymmetric];

fn top_branch(level: usize, parity: Parity) -> usize {
    2 * level + 2 + parity.sigma()
}

#[test]
fn quasi_exact_energies_and_spectra() {
    for parity in PARITIES {
        let solver = VariationalSolver::new(SolverConfig::new(parity)).unwrap();
        for level in 0..=2 {
            for d2 in [0.5f64, 1.0, 2.0] {
                let d = d2.sqrt();
                let p = top_branch(level, parity);
                let g = branch_coupling(level, parity, p, d).unwrap();
                let state = solver.ground_state(g, d).unwrap();
                let e = relative_energy(level, parity);
                assert!((state.energy - e).abs() < 1e-8, "N={level} {parity} d2={d2}");

                let exact = state_spectrum(&build_relative_state(level, parity, p, d).unwrap())
                    .unwrap();
                let approx = state.spectrum().unwrap();
                for i in 0..exact.eigenvalues.len() + 4 {
                    assert!(
                        (approx.get(i) - exact.get(i)).abs() < 1e-7,
                        "N={level} {parity} d2={d2} i={i}"
                    );
                }
                assert_eq!(approx.rank(NULL_THRESHOLD), 2 * level + 3 + parity.sigma());
            }
        }
    }
}

#[test]
fn basis_doubling_converges_and_is_variational() {
    for parity in PARITIES {
        for (g, d2) in [(1.0f64, 0.5f64), (5.0, 0.5), (17.0, 2.0), (40.0, 1.0)] {
            let d = d2.sqrt();
            let e1 = ground_state(g, d, SolverConfig::new(parity)).unwrap().energy;
            let e2 = ground_state(g, d, SolverConfig::with_basis_size(parity, 300))
                .unwrap()
                .energy;
            assert!((e1 - e2).abs() <= 1e-9, "{parity} g={g} d2={d2}");
            assert!(e1 >= parity.sigma() as f64 + 0.5);
            let mut prev = f64::INFINITY;
            for m in [10, 20, 40, 80] {
                let e = ground_state(g, d, SolverConfig::with_basis_size(parity, m))
                    .unwrap()
                    .energy;
                assert!(e <= prev + 1e-12, "{parity} g={g} d2={d2} M={m}");
                prev = e;
            }
        }
    }
}

#[test]
fn node_doubling_leaves_matrix_entries_unchanged() {
    for parity in PARITIES {
        let base = SolverConfig::new(parity);
        let doubled = SolverConfig {
            quadrature_nodes: 2 * base.quadrature_nodes,
            ..base
        };
        let a = VariationalSolver::new(base).unwrap();
        let b = VariationalSolver::new(doubled).unwrap();
        for d2 in [0.5f64, 2.0] {
            let ha = a.hamiltonian_matrix(3.0, d2.sqrt()).unwrap();
            let hb = b.hamiltonian_matrix(3.0, d2.sqrt()).unwrap();
            let diff = (ha - hb).abs().max();
            assert!(diff <= 1e-12, "{parity} d2={d2}: {diff:e}");
        }
    }
}

#[test]
fn dvr_cross_check() {
    for parity in PARITIES {
        let spectral = VariationalSolver::new(SolverConfig::new(parity)).unwrap();
        let dvr = VariationalSolver::new(SolverConfig::dvr(parity, 150)).unwrap();
        assert_eq!(dvr.config().projection, Projection::Dvr);
        for (g, d2) in [(3.0f64, 1.0f64), (12.0, 2.0)] {
            let a = spectral.ground_state(g, d2.sqrt()).unwrap();
            let b = dvr.ground_state(g, d2.sqrt()).unwrap();
            assert!((a.energy - b.energy).abs() < 1e-9, "{parity} g={g}");
            let (sa, sb) = (a.spectrum().unwrap(), b.spectrum().unwrap());
            for i in 0..8 {
                assert!((sa.get(i) - sb.get(i)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn calogero_limit_by_small_cutoff() {
    // E_x = √(1 + 4g)/2 + 1 for the ground state at d = 0
    let config = SolverConfig::with_basis_size(Parity::Symmetric, 300);
    for d in [1e-2, 1e-3] {
        let e = ground_state(2.0, d, config).unwrap().energy;
        assert!((e - 2.5).abs() < 1e-3, "d={d}: {e}");
    }
    let e = ground_state(6.0, 1e-3, config).unwrap().energy;
    assert!((e - 3.5).abs() < 1e-3, "{e}");
}

#[test]
fn sweep_structure_at_d2_2() {
    let solver = VariationalSolver::new(SolverConfig::new(Parity::Symmetric)).unwrap();
    let grid = linear_grid(0.0, 30.0, 600);
    let table = sweep(&solver, 2f64.sqrt(), &grid, 12, &[0.2]).unwrap();
    for row in &table.rows {
        assert!(row.error.is_none());
        assert!(row.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(row.eigenvalues.iter().sum::<f64>() <= 1.0 + 1e-9);
    }
    // g = 0 is the uncorrelated product state
    assert!((table.rows[0].eigenvalues[0] - 1.0).abs() < 1e-14);
    assert!(table.rows[0].eigenvalues[1] < 1e-14);
    // past g = 0 the two largest never vanish again
    assert!(table.rows[1..].iter().all(|r| r.eigenvalues[1] > 0.0));
    assert!(!eigenvalue_minima(&table).iter().any(|&(_, i)| i < 2));
    let nulls = null_point_detect(&solver, &table, NULL_THRESHOLD).unwrap();
    let found: Vec<f64> = nulls.iter().map(|n| n.g).collect();
    assert_eq!(found.len(), 2, "{found:?}");
    assert!((found[0] - 10.0).abs() < 1e-6);
    assert!((found[1] - (19.0 + 17f64.sqrt())).abs() < 1e-6);
    assert_eq!(nulls[0].rank, 3);
    assert_eq!(nulls[1].rank, 5);
    for n in &nulls {
        assert!(n.residual <= NULL_THRESHOLD);
    }
    // eigenvalues vanishing at both null points rise, peak once and fall in between
    for i in [5, 6] {
        let between: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.g > found[0] && r.g < found[1])
            .map(|r| r.eigenvalues[i])
            .collect();
        let peak = between
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(peak > 0 && peak < between.len() - 1, "i={i}");
        assert!(between[..=peak].windows(2).all(|w| w[1] >= w[0]), "i={i}");
        assert!(between[peak..].windows(2).all(|w| w[1] <= w[0]), "i={i}");
    }
}

#[test]
fn first_symmetric_null_point_at_d2_half() {
    let solver = VariationalSolver::new(SolverConfig::new(Parity::Symmetric)).unwrap();
    let grid = linear_grid(0.0, 8.0, 160);
    let table = sweep(&solver, 0.5f64.sqrt(), &grid, 12, &[]).unwrap();
    assert!(!eigenvalue_minima(&table).is_empty());
    let nulls = null_point_detect(&solver, &table, NULL_THRESHOLD).unwrap();
    assert!((nulls[0].g - 4.0).abs() < 1e-3);
    assert_eq!(nulls[0].rank, 3);
}

#[test]
fn seventh_eigenvalue_zeros_drift_with_cutoff() {
    let d2_list = [0.5f64, 1.125, 2.0];
    let d_list: Vec<f64> = d2_list.iter().map(|x| x.sqrt()).collect();
    let grid = linear_grid(0.0, 26.0, 520);
    let traces =
        seventh_eigenvalue_trace(SolverConfig::new(Parity::Symmetric), &d_list, &grid).unwrap();
    let mut prev: Option<Vec<f64>> = None;
    for (t, &d) in traces.iter().zip(&d_list) {
        assert!(t.samples.iter().all(|s| s.1 >= 0.0));
        let expect = [
            branch_coupling(0, Parity::Symmetric, 2, d).unwrap(),
            branch_coupling(1, Parity::Symmetric, 4, d).unwrap(),
        ];
        assert_eq!(t.zeros.len(), 2, "d2={}: {:?}", d * d, t.zeros);
        for (z, e) in t.zeros.iter().zip(expect) {
            assert!((z - e).abs() < 1e-6, "d2={}: {z} vs {e}", d * d);
        }
        if let Some(p) = &prev {
            assert!(p.iter().zip(&t.zeros).all(|(a, b)| a < b));
        }
        prev = Some(t.zeros.clone());
    }
    assert!(seventh_eigenvalue_trace(SolverConfig::new(Parity::Antisymmetric), &d_list, &grid)
        .is_err());
}
