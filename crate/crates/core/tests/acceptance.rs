//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use regcal::entropy::{kink_analysis, kink_grid, renyi_entropy, von_neumann_entropy, DerivativeClass};
use regcal::heun::{branch_labels, coupling_roots, Parity};
use regcal::rdm::{exact_spectrum, state_spectrum, EntanglementSpectrum};
use regcal::variational::{
    linear_grid, null_point_detect, sweep, SolverConfig, VariationalSolver, NULL_THRESHOLD,
};
use regcal::wavefunction::build_relative_state;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_deviation(spec: &EntanglementSpectrum, expect: &[f64]) -> f64 {
    let head = expect
        .iter()
        .enumerate()
        .map(|(i, e)| (spec.get(i) - e).abs())
        .fold(0.0, f64::max);
    let tail = spec.eigenvalues.iter().skip(expect.len()).fold(0.0, |m: f64, x| m.max(x.abs()));
    head.max(tail)
}

fn calogero_symmetric() -> Outcome {
    let s = build_relative_state(0, Parity::Symmetric, 2, 0.0).map_err(|e| e.to_string())?;
    let spec = state_spectrum(&s).map_err(|e| e.to_string())?;
    let r3 = 3f64.sqrt();
    let err = max_deviation(&spec, &[(2.0 + r3) / 6.0, 1.0 / 3.0, (2.0 - r3) / 6.0]);
    check(err <= 1e-10, format!("max deviation {err:.2e} (tol 1e-10)"))
}

fn calogero_antisymmetric() -> Outcome {
    let s = build_relative_state(0, Parity::Antisymmetric, 3, 0.0).map_err(|e| e.to_string())?;
    let spec = state_spectrum(&s).map_err(|e| e.to_string())?;
    let r22 = 22f64.sqrt();
    let (hi, lo) = ((5.0 + r22) / 20.0, (5.0 - r22) / 20.0);
    let err = max_deviation(&spec, &[hi, hi, lo, lo]);
    let degeneracy: Vec<usize> = spec.multiplicities.iter().map(|m| m.1).collect();
    check(
        err <= 1e-10 && degeneracy.starts_with(&[2, 2]),
        format!("max deviation {err:.2e} (tol 1e-10), multiplicities {degeneracy:?}"),
    )
}

fn closed_forms_vs_pipeline() -> Outcome {
    let mut worst: f64 = 0.0;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for d2 in [0.0f64, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let d = d2.sqrt();
            let s = build_relative_state(0, parity, 2 + parity.sigma(), d).map_err(|e| e.to_string())?;
            let numeric = state_spectrum(&s).map_err(|e| e.to_string())?;
            let closed = exact_spectrum(0, parity, d).map_err(|e| e.to_string())?;
            worst = worst.max(max_deviation(&numeric, &closed.eigenvalues));
        }
    }
    check(worst <= 1e-9, format!("max deviation {worst:.2e} over 12 spectra (tol 1e-9)"))
}

fn coupling_curves() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=600 {
        let d2 = 6.0 * i as f64 / 600.0;
        let d = d2.sqrt();
        let disc = (25.0 - 12.0 * d2 + 4.0 * d2 * d2).sqrt();
        let pairs = [
            (coupling_roots(0, Parity::Symmetric, d), vec![2.0 + 4.0 * d2]),
            (
                coupling_roots(1, Parity::Symmetric, d),
                vec![7.0 + 6.0 * d2 - disc, 7.0 + 6.0 * d2 + disc],
            ),
            (coupling_roots(0, Parity::Antisymmetric, d), vec![6.0 + 4.0 * d2]),
        ];
        for (roots, expect) in pairs {
            let roots = roots.map_err(|e| e.to_string())?;
            for (r, e) in roots.iter().zip(&expect) {
                worst = worst.max((r.g - e).abs());
            }
        }
    }
    let mut worst_d0: f64 = 0.0;
    let mut checked = 0;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for level in 0..=2 {
            let roots = coupling_roots(level, parity, 0.0).map_err(|e| e.to_string())?;
            for (r, p) in roots.iter().zip(branch_labels(level, parity)) {
                if p <= 6 {
                    worst_d0 = worst_d0.max((r.g - (p * (p - 1)) as f64).abs());
                    checked += 1;
                }
            }
        }
    }
    check(
        worst <= 1e-9 && worst_d0 <= 1e-9,
        format!("curves max error {worst:.2e} on 601 d² points, d=0 max error {worst_d0:.2e} on {checked} roots (tol 1e-9)"),
    )
}

/// (level, parity, ground-state branch, closed-form coupling, E_x)
fn quasi_exact_points(d2: f64) -> [(usize, Parity, f64, f64); 3] {
    let disc = (25.0 - 12.0 * d2 + 4.0 * d2 * d2).sqrt();
    [
        (0, Parity::Symmetric, 2.0 + 4.0 * d2, 2.5),
        (1, Parity::Symmetric, 7.0 + 6.0 * d2 + disc, 4.5),
        (0, Parity::Antisymmetric, 6.0 + 4.0 * d2, 3.5),
    ]
}

fn variational_energies() -> Outcome {
    let mut worst: f64 = 0.0;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let solver = VariationalSolver::new(SolverConfig::new(parity)).map_err(|e| e.to_string())?;
        for d2 in [0.5f64, 2.0] {
            for (_, p, g, e) in quasi_exact_points(d2) {
                if p == parity {
                    let s = solver.ground_state(g, d2.sqrt()).map_err(|e| e.to_string())?;
                    worst = worst.max((s.energy - e).abs());
                }
            }
        }
    }
    check(worst <= 1e-8, format!("max |E_x − k²/2| = {worst:.2e} with M=150 (tol 1e-8)"))
}

fn rank_law() -> Outcome {
    let mut counts = Vec::new();
    let mut ok = true;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let solver = VariationalSolver::new(SolverConfig::new(parity)).map_err(|e| e.to_string())?;
        for d2 in [0.5f64, 1.0, 2.0] {
            for (level, p, g, _) in quasi_exact_points(d2) {
                if p != parity {
                    continue;
                }
                let expected = 2 * level + 3 + parity.sigma();
                let s = solver.ground_state(g, d2.sqrt()).map_err(|e| e.to_string())?;
                let rank = s.spectrum().map_err(|e| e.to_string())?.rank(NULL_THRESHOLD);
                ok &= rank == expected;
                counts.push(format!("N={level} {} d²={d2}: {rank}", parity.short_name()));
            }
        }
    }
    check(ok, format!("ranks above 1e-8: {}", counts.join(", ")))
}

fn null_points(d2: f64) -> Result<Vec<f64>, String> {
    let solver =
        VariationalSolver::new(SolverConfig::new(Parity::Symmetric)).map_err(|e| e.to_string())?;
    let grid = linear_grid(0.0, 30.0, 600);
    let table = sweep(&solver, d2.sqrt(), &grid, 12, &[]).map_err(|e| e.to_string())?;
    let found = null_point_detect(&solver, &table, NULL_THRESHOLD).map_err(|e| e.to_string())?;
    Ok(found.iter().map(|n| n.g).collect())
}

fn null_point_drift() -> Outcome {
    let r17 = 17f64.sqrt();
    let expected = [10.0, 19.0 - r17, 19.0 + r17];
    let at_2 = null_points(2.0)?;
    let at_half = null_points(0.5)?;
    let missing: Vec<String> = expected
        .iter()
        .filter(|e| !at_2.iter().any(|g| (g - *e).abs() <= 1e-3))
        .map(|e| format!("{e:.3}"))
        .collect();
    let extra: Vec<String> = at_2
        .iter()
        .filter(|g| !expected.iter().any(|e| (*g - e).abs() <= 1e-3))
        .map(|g| format!("{g:.3}"))
        .collect();
    let drift = !at_half.is_empty()
        && at_half.len() <= at_2.len()
        && at_half.iter().zip(&at_2).all(|(a, b)| a < b);
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.6}")).collect::<Vec<_>>().join(", ");
    check(
        missing.is_empty() && extra.is_empty() && drift,
        format!(
            "d²=2 detected [{}], missing [{}], unexpected [{}]; d²=0.5 detected [{}], drift {}",
            fmt(&at_2),
            missing.join(", "),
            extra.join(", "),
            fmt(&at_half),
            if drift { "increasing" } else { "violated" }
        ),
    )
}

fn entropy_identities() -> Outcome {
    const VN_ORACLE: f64 = 1.154_681_769_2;
    let s = build_relative_state(0, Parity::Symmetric, 2, 0.0).map_err(|e| e.to_string())?;
    let spec = state_spectrum(&s).map_err(|e| e.to_string())?;
    let s2 = renyi_entropy(&spec, 2.0).map_err(|e| e.to_string())?.value;
    let vn = von_neumann_entropy(&spec).value;

    let mut spectra: Vec<EntanglementSpectrum> = Vec::new();
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for d2 in [0.0f64, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
            spectra.push(exact_spectrum(0, parity, d2.sqrt()).map_err(|e| e.to_string())?);
        }
        let solver = VariationalSolver::new(SolverConfig::new(parity)).map_err(|e| e.to_string())?;
        for g in [0.5, 3.0, 9.0, 14.877, 27.0] {
            let st = solver.ground_state(g, 2f64.sqrt()).map_err(|e| e.to_string())?;
            spectra.push(st.spectrum().map_err(|e| e.to_string())?);
        }
    }
    let mut worst_limit: f64 = 0.0;
    for sp in &spectra {
        let v = von_neumann_entropy(sp).value;
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            let r = renyi_entropy(sp, a).map_err(|e| e.to_string())?.value;
            worst_limit = worst_limit.max((r - v).abs());
        }
    }
    check(
        (s2 - 1.0).abs() <= 1e-10 && (vn - VN_ORACLE).abs() <= 1e-4 && worst_limit <= 1e-3,
        format!(
            "S² = {s2:.15}, S_vN = {vn:.10} (oracle {VN_ORACLE}), max |S^(1±1e-4) − S_vN| = {worst_limit:.2e} over {} spectra",
            spectra.len()
        ),
    )
}

fn kink_asymptotics() -> Outcome {
    let d = 0.5f64.sqrt();
    let solver =
        VariationalSolver::new(SolverConfig::new(Parity::Symmetric)).map_err(|e| e.to_string())?;
    let coarse = sweep(&solver, d, &linear_grid(0.0, 8.0, 160), 12, &[])
        .map_err(|e| e.to_string())?;
    let g_n = null_point_detect(&solver, &coarse, NULL_THRESHOLD)
        .map_err(|e| e.to_string())?
        .first()
        .map(|n| n.g)
        .ok_or("no symmetric null point found at d²=0.5")?;

    let fine = sweep(&solver, d, &kink_grid(g_n, 25), 12, &[]).map_err(|e| e.to_string())?;
    let report = kink_analysis(&fine.eigenvalue_rows(), g_n, 0.2).map_err(|e| e.to_string())?;
    let exponent_ok = (report.exponent_fit - 2.0).abs() <= 0.1
        && report.derivative_class == DerivativeClass::Divergent;

    let v = solver.potential_matrix(d).map_err(|e| e.to_string())?;
    let entropy = |g: f64, a: f64| -> Result<f64, String> {
        let spec = solver.spectrum_with(g, &v).map_err(|e| e.to_string())?;
        Ok(renyi_entropy(&spec, a).map_err(|e| e.to_string())?.value)
    };
    let deltas: Vec<f64> = (0..4).map(|k| 1e-2 / f64::powi(2.0, k)).collect();
    let s0 = entropy(g_n, 0.2)?;
    let mut right = Vec::new();
    let mut left = Vec::new();
    for &h in &deltas {
        right.push((entropy(g_n + h, 0.2)? - s0) / h);
        left.push((s0 - entropy(g_n - h, 0.2)?) / h);
    }
    let grows = right.windows(2).all(|w| w[1] > w[0])
        && left.windows(2).all(|w| w[1] < w[0])
        && right[0] > 0.0
        && left[0] < 0.0;

    let c0 = entropy(g_n, 2.0)?;
    let mut second = Vec::new();
    for &h in &deltas {
        second.push((entropy(g_n + h, 2.0)? - 2.0 * c0 + entropy(g_n - h, 2.0)?) / (h * h));
    }
    let bound = 2.0 * second[0].abs();
    let bounded = second.iter().all(|s| s.is_finite() && s.abs() <= bound);

    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    check(
        exponent_ok && grows && bounded,
        format!(
            "g_n = {g_n:.10}, 2k_m = {:.4} ± {:.4} (R² {:.6}, {}), S^0.2 D+ [{}], D− [{}], S² D² [{}]",
            report.exponent_fit,
            report.exponent_stderr,
            report.r_squared,
            report.derivative_class.as_str(),
            fmt(&right),
            fmt(&left),
            fmt(&second)
        ),
    )
}

fn decoupling_limits() -> Outcome {
    let d = 10.0;
    let sym = state_spectrum(&build_relative_state(0, Parity::Symmetric, 2, d).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let anti = state_spectrum(
        &build_relative_state(0, Parity::Antisymmetric, 3, d).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let (lmax, s_sym, s_anti) = (
        sym.largest(),
        von_neumann_entropy(&sym).value,
        von_neumann_entropy(&anti).value,
    );
    check(
        lmax >= 0.99 && s_sym <= 0.1 && (s_anti - 1.0).abs() <= 0.05,
        format!("d²=100: sym λ_max = {lmax:.6}, S_vN = {s_sym:.6}; antisym S_vN = {s_anti:.6}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("calogero-limit symmetric spectrum", calogero_symmetric),
        ("calogero-limit antisymmetric spectrum", calogero_antisymmetric),
        ("closed forms vs pipeline", closed_forms_vs_pipeline),
        ("coupling curves", coupling_curves),
        ("variational energies", variational_energies),
        ("rank law", rank_law),
        ("null-point drift", null_point_drift),
        ("entropy identities", entropy_identities),
        ("kink asymptotics", kink_asymptotics),
        ("decoupling limits", decoupling_limits),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
