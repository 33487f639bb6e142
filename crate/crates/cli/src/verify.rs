//! Quick oracle suite: closed forms, identities and small variational runs.

use regcal::entropy::{renyi_entropy, von_neumann_entropy};
use regcal::heun::{branch_labels, coupling_roots, Parity};
use regcal::rdm::{exact_spectrum, state_spectrum};
use regcal::variational::{SolverConfig, VariationalSolver};
use regcal::wavefunction::{build_relative_state, residual_norm};
use serde::Serialize;

use crate::args::VerifyArgs;
use crate::error::CliError;
use crate::output::Run;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    /// worst deviation seen
    deviation: f64,
    tolerance: f64,
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, name: &str, result: Result<f64, regcal::error::Error>, tolerance: f64) {
        let (deviation, passed) = match result {
            Ok(dev) => (dev, dev <= tolerance),
            Err(e) => {
                eprintln!("{name}: {e}");
                (f64::INFINITY, false)
            }
        };
        println!(
            "{} {name}: deviation {deviation:.3e} (tolerance {tolerance:.0e})",
            if passed { "PASS" } else { "FAIL" }
        );
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            deviation,
            tolerance,
        });
    }
}

type Outcome = Result<f64, regcal::error::Error>;

const D2: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];

fn top(level: usize, parity: Parity) -> usize {
    2 * level + 2 + parity.sigma()
}

fn calogero_couplings() -> Outcome {
    let mut worst = 0.0f64;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for level in 0..=3 {
            let roots = coupling_roots(level, parity, 0.0)?;
            for (r, p) in roots.iter().zip(branch_labels(level, parity)) {
                let pf = p as f64;
                worst = worst.max((r.g - pf * (pf - 1.0)).abs());
            }
        }
    }
    Ok(worst)
}

fn closed_form_couplings() -> Outcome {
    let mut worst = 0.0f64;
    for d2 in D2 {
        let d = d2.sqrt();
        let disc = (25.0 - 12.0 * d2 + 4.0 * d2 * d2).sqrt();
        let s0 = coupling_roots(0, Parity::Symmetric, d)?;
        let s1 = coupling_roots(1, Parity::Symmetric, d)?;
        let a0 = coupling_roots(0, Parity::Antisymmetric, d)?;
        for (got, want) in [
            (s0[0].g, 2.0 + 4.0 * d2),
            (s1[0].g, 7.0 + 6.0 * d2 - disc),
            (s1[1].g, 7.0 + 6.0 * d2 + disc),
            (a0[0].g, 6.0 + 4.0 * d2),
        ] {
            worst = worst.max((got - want).abs());
        }
    }
    Ok(worst)
}

fn residuals() -> Outcome {
    let mut worst = 0.0f64;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for level in 0..=2 {
            for p in branch_labels(level, parity) {
                for d2 in D2 {
                    let s = build_relative_state(level, parity, p, f64::sqrt(d2))?;
                    worst = worst.max(residual_norm(&s));
                }
            }
        }
    }
    Ok(worst)
}

fn pipeline_vs_closed_spectra() -> Outcome {
    let mut worst = 0.0f64;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for d2 in D2 {
            let d = f64::sqrt(d2);
            let closed = exact_spectrum(0, parity, d)?;
            let piped = state_spectrum(&build_relative_state(0, parity, top(0, parity), d)?)?;
            for i in 0..closed.eigenvalues.len().max(piped.eigenvalues.len()) {
                worst = worst.max((closed.get(i) - piped.get(i)).abs());
            }
        }
    }
    Ok(worst)
}

/// Deviation of the numerical rank from 2N + 3 + σ, as a count.
fn rank_law() -> Outcome {
    let mut worst = 0.0f64;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        for level in 0..=1 {
            for d2 in D2 {
                let s = build_relative_state(level, parity, top(level, parity), f64::sqrt(d2))?;
                let rank = state_spectrum(&s)?.rank(1e-8);
                let want = 2 * level + 3 + parity.sigma();
                worst = worst.max(rank.abs_diff(want) as f64);
            }
        }
    }
    Ok(worst)
}

fn entropy_identities() -> Outcome {
    let s = build_relative_state(1, Parity::Symmetric, 4, 1.0)?;
    let spec = state_spectrum(&s)?;
    let vn = von_neumann_entropy(&spec).value;
    let near = renyi_entropy(&spec, 1.0 + 1e-7)?.value;
    let trace = (spec.sum() - 1.0).abs();
    let s0 = renyi_entropy(&spec, 1e-9)?.value;
    let log_rank = (spec.rank(1e-14) as f64).log2();
    Ok((vn - near).abs().max(trace).max((s0 - log_rank).abs()))
}

fn variational_energies() -> Outcome {
    let mut worst = 0.0f64;
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let solver = VariationalSolver::new(SolverConfig::with_basis_size(parity, 60))?;
        for level in 0..=1 {
            for d2 in [0.5, 2.0] {
                let d = f64::sqrt(d2);
                let exact = build_relative_state(level, parity, top(level, parity), d)?;
                let var = solver.ground_state(exact.meta.g, d)?;
                worst = worst.max((var.energy - exact.meta.relative_energy).abs());
                let a = var.spectrum()?;
                let b = state_spectrum(&exact)?;
                for i in 0..8 {
                    worst = worst.max((a.get(i) - b.get(i)).abs());
                }
            }
        }
    }
    Ok(worst)
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mut suite = Suite::default();
    suite.record("calogero couplings p(p-1) at d = 0", calogero_couplings(), 1e-9);
    suite.record("closed-form coupling curves", closed_form_couplings(), 1e-9);
    suite.record("eigenfunction residuals", residuals(), 1e-9);
    suite.record("closed-form vs pipeline spectra", pipeline_vs_closed_spectra(), 1e-10);
    suite.record("rank law 2N + 3 + sigma", rank_law(), 0.0);
    suite.record("entropy identities", entropy_identities(), 1e-6);
    suite.record("variational vs exact energies and spectra", variational_energies(), 1e-9);

    let failed = suite.checks.iter().filter(|c| !c.passed).count();
    let mut run = Run::new("verify", &args.out.out)?;
    run.json("verify.json", &suite.checks)?;
    run.finish(args)?;
    println!("verify: {} passed, {failed} failed", suite.checks.len() - failed);
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} oracle checks failed")));
    }
    Ok(())
}
