use regcal::entropy::{kink_analysis, kink_grid, EIGENVALUE_FLOOR};
use regcal::heun::{branch_labels, isoenergetic_curve, relative_energy, Parity};
use regcal::rdm::{natural_orbitals, rdm_spectrum, state_rdm, state_spectrum};
use regcal::entropy::von_neumann_entropy;
use regcal::variational::{
    linear_grid, null_point_detect, sweep, NullPoint, SolverConfig, SweepTable,
    VariationalSolver,
};
use regcal::wavefunction::{build_relative_state, residual_norm, RelativeState};
use serde::Serialize;

use crate::args::{
    CurvesArgs, EntropyArgs, ExactSolveArgs, GridArgs, KinksArgs, RdmArgs, SolverArgs, SweepArgs,
};
use crate::error::CliError;
use crate::output::{num, Run};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn ground_branch(level: usize, parity: Parity) -> usize {
    2 * level + 2 + parity.sigma()
}

fn check_d2(values: &[f64], positive: bool) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(usage("at least one d2 value is required"));
    }
    for &v in values {
        if !v.is_finite() || v < 0.0 || (positive && v == 0.0) {
            let need = if positive { "positive" } else { "non-negative" };
            return Err(usage(format!("d2 must be finite and {need}, got {v}")));
        }
    }
    Ok(())
}

fn check_orders(orders: &[f64]) -> Result<(), CliError> {
    match orders.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        Some(a) => Err(usage(format!("Rényi orders must be positive, got {a}"))),
        None => Ok(()),
    }
}

fn g_grid(grid: &GridArgs) -> Result<Vec<f64>, CliError> {
    if !(grid.g_min >= 0.0) || !(grid.g_max > grid.g_min) || !grid.g_max.is_finite() {
        return Err(usage(format!(
            "need 0 <= g-min < g-max, got g-min {} and g-max {}",
            grid.g_min, grid.g_max
        )));
    }
    if grid.steps < 2 {
        return Err(usage("steps must be at least 2"));
    }
    Ok(linear_grid(grid.g_min, grid.g_max, grid.steps))
}

fn solver_config(args: &SolverArgs, parity: Parity) -> Result<SolverConfig, CliError> {
    let config = if args.dvr {
        if args.nodes.is_some_and(|n| n != 2 * args.basis_size) {
            return Err(usage("--dvr fixes the node count to 2M; drop --nodes"));
        }
        SolverConfig::dvr(parity, args.basis_size)
    } else {
        let mut c = SolverConfig::with_basis_size(parity, args.basis_size);
        if let Some(n) = args.nodes {
            c.quadrature_nodes = n;
        }
        c
    };
    config.validate()?;
    Ok(config)
}

fn solver_metadata(config: &SolverConfig, threshold: Option<f64>) -> Result<String, CliError> {
    let mut meta = serde_json::json!({
        "basis_size": config.basis_size,
        "quadrature_nodes": config.quadrature_nodes,
        "parity": config.parity,
        "projection": config.projection,
        "eigenvalue_floor": EIGENVALUE_FLOOR,
    });
    if let Some(t) = threshold {
        meta["null_threshold"] = serde_json::json!(t);
    }
    Ok(serde_json::to_string(&meta)?)
}

#[derive(Serialize)]
struct ExactEntry<'a> {
    d2: f64,
    state: &'a RelativeState,
    polynomial_in_x: Vec<f64>,
    residual: f64,
    spectrum: Vec<f64>,
    multiplicities: Vec<(f64, usize)>,
}

pub fn exact_solve(args: &ExactSolveArgs) -> Result<(), CliError> {
    check_d2(&args.d2, false)?;
    if args.points < 2 || !(args.x_max > 0.0) {
        return Err(usage("need --points >= 2 and --x-max > 0"));
    }
    let p = args.p.unwrap_or(ground_branch(args.level, args.parity));
    let mut run = Run::new("exact-solve", &args.out.out)?;
    let mut states = Vec::new();
    for &d2 in &args.d2 {
        let state = build_relative_state(args.level, args.parity, p, d2.sqrt())?;
        let spec = state_spectrum(&state)?;
        states.push((d2, state, spec));
    }
    let entries: Vec<ExactEntry> = states
        .iter()
        .map(|(d2, s, spec)| ExactEntry {
            d2: *d2,
            state: s,
            polynomial_in_x: s.polynomial_in_x(),
            residual: residual_norm(s),
            spectrum: spec.eigenvalues.clone(),
            multiplicities: spec.multiplicities.clone(),
        })
        .collect();
    run.json("exact_state.json", &entries)?;

    let xs = linear_grid(-args.x_max, args.x_max, args.points - 1);
    let mut rows = Vec::new();
    for (d2, s, _) in &states {
        for &x in &xs {
            rows.push(vec![
                args.level.to_string(),
                args.parity.to_string(),
                p.to_string(),
                num(*d2),
                num(x),
                num(s.evaluate(x)),
            ]);
        }
    }
    let header = ["N", "parity", "p", "d2", "x", "psi"].map(String::from);
    run.csv("wavefunction.csv", &header, rows)?;

    for (d2, s, spec) in &states {
        let shown: Vec<String> = spec.eigenvalues.iter().take(8).map(|v| format!("{v:.10}")).collect();
        println!(
            "N={} {} p={} d2={} g={:.12} E_x={} spectrum [{}]",
            args.level,
            args.parity,
            p,
            d2,
            s.meta.g,
            s.meta.relative_energy,
            shown.join(", ")
        );
    }
    run.finish(args)?;
    Ok(())
}

pub fn curves(args: &CurvesArgs) -> Result<(), CliError> {
    if !(args.d2_max > 0.0) || !args.d2_max.is_finite() || args.steps < 1 {
        return Err(usage("need --d2-max > 0 and --steps >= 1"));
    }
    let d2_grid = linear_grid(0.0, args.d2_max, args.steps);
    let d_grid: Vec<f64> = d2_grid.iter().map(|x| x.sqrt()).collect();
    let parities = match args.parity {
        Some(p) => vec![p],
        None => vec![Parity::Symmetric, Parity::Antisymmetric],
    };
    let mut rows = Vec::new();
    for parity in parities {
        for level in 0..=args.n_max {
            for p in branch_labels(level, parity) {
                let curve = isoenergetic_curve(level, parity, p, &d_grid)?;
                for (&d2, &(d, g)) in d2_grid.iter().zip(&curve.samples) {
                    let state = build_relative_state(level, parity, p, d)?;
                    let svn = von_neumann_entropy(&state_spectrum(&state)?).value;
                    rows.push(vec![
                        level.to_string(),
                        parity.to_string(),
                        p.to_string(),
                        u8::from(p == ground_branch(level, parity)).to_string(),
                        num(d2),
                        num(g),
                        num(relative_energy(level, parity)),
                        num(svn),
                    ]);
                }
            }
        }
    }
    let mut run = Run::new("curves", &args.out.out)?;
    let header = ["N", "parity", "p", "ground", "d2", "g", "Ex", "S_vN"].map(String::from);
    let count = rows.len();
    run.csv("curves.csv", &header, rows)?;
    println!("wrote {count} curve points");
    run.finish(args)?;
    Ok(())
}

#[derive(Serialize)]
struct RdmEntry {
    d2: f64,
    g: f64,
    /// row-major, Hermite basis
    matrix: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<(f64, usize)>,
    /// natural orbitals as Hermite-basis coefficient vectors, by descending occupation
    natural_orbitals: Vec<Vec<f64>>,
}

pub fn rdm(args: &RdmArgs) -> Result<(), CliError> {
    let d2_values = if args.d2.is_empty() {
        if !(args.d2_max >= args.d2_min) || args.steps < 1 {
            return Err(usage("need --d2-max >= --d2-min and --steps >= 1"));
        }
        linear_grid(args.d2_min, args.d2_max, args.steps)
    } else {
        args.d2.clone()
    };
    check_d2(&d2_values, false)?;
    let p = args.p.unwrap_or(ground_branch(args.level, args.parity));
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &d2 in &d2_values {
        let state = build_relative_state(args.level, args.parity, p, d2.sqrt())?;
        let rho = state_rdm(&state)?;
        let spec = rdm_spectrum(&rho)?;
        let (_, vectors) = natural_orbitals(&rho)?;
        for (i, &lambda) in spec.eigenvalues.iter().enumerate() {
            rows.push(vec![
                args.level.to_string(),
                args.parity.to_string(),
                p.to_string(),
                num(d2),
                num(state.meta.g),
                (i + 1).to_string(),
                num(lambda),
            ]);
        }
        let n = rho.dim();
        entries.push(RdmEntry {
            d2,
            g: state.meta.g,
            matrix: (0..n).map(|i| (0..n).map(|j| rho.rho[(i, j)]).collect()).collect(),
            eigenvalues: spec.eigenvalues.clone(),
            multiplicities: spec.multiplicities.clone(),
            natural_orbitals: (0..n)
                .map(|c| vectors.column(c).iter().copied().collect())
                .collect(),
        });
    }
    let mut run = Run::new("rdm", &args.out.out)?;
    let header = ["N", "parity", "p", "d2", "g", "index", "lambda"].map(String::from);
    run.csv("rdm_spectrum.csv", &header, rows)?;
    run.json("rdm.json", &entries)?;
    println!("wrote spectra at {} cutoffs", entries.len());
    run.finish(args)?;
    Ok(())
}

fn run_sweeps(
    solver: &VariationalSolver,
    d2_values: &[f64],
    grid: &[f64],
    tracked: usize,
    orders: &[f64],
) -> Result<Vec<(f64, SweepTable)>, CliError> {
    let mut tables = Vec::new();
    for &d2 in d2_values {
        let table = sweep(solver, d2.sqrt(), grid, tracked, orders)?;
        for row in table.rows.iter().filter(|r| r.error.is_some()) {
            eprintln!(
                "warning: d2={d2} g={}: {}",
                row.g,
                row.error.as_deref().unwrap_or_default()
            );
        }
        tables.push((d2, table));
    }
    Ok(tables)
}

fn order_label(a: f64) -> String {
    format!("S_a@{a}")
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<(), CliError> {
    check_d2(&args.d2, true)?;
    check_orders(&args.orders)?;
    if args.tracked == 0 {
        return Err(usage("--K must be at least 1"));
    }
    let grid = g_grid(&args.grid)?;
    let config = solver_config(&args.solver, args.parity)?;
    let solver = VariationalSolver::new(config)?;
    let tables = run_sweeps(&solver, &args.d2, &grid, args.tracked, &args.orders)?;

    let mut header: Vec<String> = ["d2", "g", "Ex"].map(String::from).to_vec();
    header.extend((1..=args.tracked).map(|i| format!("lambda_{i}")));
    header.push("S_vN".to_string());
    header.extend(args.orders.iter().map(|&a| order_label(a)));
    let mut rows = Vec::new();
    let mut null_rows = Vec::new();
    for (d2, table) in &tables {
        for r in &table.rows {
            let mut row = vec![num(*d2), num(r.g), num(r.energy)];
            row.extend(r.eigenvalues.iter().map(|&v| num(v)));
            row.push(num(r.von_neumann));
            row.extend(r.renyi.iter().map(|&v| num(v)));
            rows.push(row);
        }
        let nulls = null_point_detect(&solver, table, args.threshold)?;
        for n in &nulls {
            println!(
                "d2={d2} null point g={:.12} rank={} first vanishing lambda_{}",
                n.g,
                n.rank,
                n.first_index + 1
            );
            null_rows.push(null_row(*d2, n));
        }
    }
    let mut run = Run::new("sweep", &args.out.out)?;
    run.add_metadata(solver_metadata(&config, Some(args.threshold))?);
    run.csv("sweep.csv", &header, rows)?;
    let null_header =
        ["d2", "g_n", "first_index", "rank", "vanishing", "residual"].map(String::from);
    run.csv("null_points.csv", &null_header, null_rows)?;
    run.finish(args)?;
    Ok(())
}

fn null_row(d2: f64, n: &NullPoint) -> Vec<String> {
    vec![
        num(d2),
        num(n.g),
        (n.first_index + 1).to_string(),
        n.rank.to_string(),
        n.vanishing.to_string(),
        num(n.residual),
    ]
}

pub fn entropy(args: &EntropyArgs) -> Result<(), CliError> {
    check_d2(&args.d2, true)?;
    check_orders(&args.orders)?;
    let grid = g_grid(&args.grid)?;
    let config = solver_config(&args.solver, args.parity)?;
    let solver = VariationalSolver::new(config)?;
    let tables = run_sweeps(&solver, &args.d2, &grid, 1, &args.orders)?;
    let with_vn = !args.orders.contains(&1.0);
    let mut rows = Vec::new();
    for (d2, table) in &tables {
        for r in &table.rows {
            for (&a, &s) in args.orders.iter().zip(&r.renyi) {
                rows.push(vec![num(*d2), num(r.g), num(a), num(s)]);
            }
            if with_vn {
                rows.push(vec![num(*d2), num(r.g), num(1.0), num(r.von_neumann)]);
            }
        }
    }
    let mut run = Run::new("entropy", &args.out.out)?;
    run.add_metadata(solver_metadata(&config, None)?);
    run.add_metadata("a = 1 rows are the von Neumann entropy".to_string());
    let header = ["d2", "g", "a", "S"].map(String::from);
    let count = rows.len();
    run.csv("entropy.csv", &header, rows)?;
    println!("wrote {count} entropy values");
    run.finish(args)?;
    Ok(())
}

pub fn kinks(args: &KinksArgs) -> Result<(), CliError> {
    check_d2(&args.d2, true)?;
    check_orders(&args.orders)?;
    if args.per_side < regcal::entropy::MIN_POINTS_PER_SIDE {
        return Err(usage(format!(
            "--per-side must be at least {}",
            regcal::entropy::MIN_POINTS_PER_SIDE
        )));
    }
    let grid = g_grid(&args.grid)?;
    let config = solver_config(&args.solver, args.parity)?;
    let solver = VariationalSolver::new(config)?;
    let tracked = regcal::variational::DEFAULT_TRACKED;
    let tables = run_sweeps(&solver, &args.d2, &grid, tracked, &[])?;
    let window = regcal::entropy::FIT_WINDOW.1;
    let mut rows = Vec::new();
    for (d2, table) in &tables {
        for n in null_point_detect(&solver, table, args.threshold)? {
            if n.g - window < 0.0 {
                eprintln!("warning: d2={d2} g_n={} too close to g = 0 for the fit window", n.g);
                continue;
            }
            let fine = sweep(&solver, d2.sqrt(), &kink_grid(n.g, args.per_side), tracked, &[])?;
            let eig_rows = fine.eigenvalue_rows();
            for &a in &args.orders {
                let row = match kink_analysis(&eig_rows, n.g, a) {
                    Ok(rep) => {
                        println!(
                            "d2={d2} g_n={:.10} a={a}: 2k_m={:.4} chi*k_m={:.4} {}",
                            n.g,
                            rep.exponent_fit,
                            rep.chi_k_m,
                            rep.derivative_class.as_str()
                        );
                        vec![
                            num(*d2),
                            num(n.g),
                            num(a),
                            num(rep.k_m_fit),
                            rep.derivative_class.as_str().to_string(),
                            num(rep.exponent_fit),
                            num(rep.exponent_stderr),
                            num(rep.r_squared),
                            num(rep.chi_k_m),
                        ]
                    }
                    Err(e) => {
                        eprintln!("warning: d2={d2} g_n={} a={a}: {e}", n.g);
                        let nan = num(f64::NAN);
                        vec![
                            num(*d2),
                            num(n.g),
                            num(a),
                            nan.clone(),
                            "fit_rejected".to_string(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            nan,
                        ]
                    }
                };
                rows.push(row);
            }
        }
    }
    let mut run = Run::new("kinks", &args.out.out)?;
    run.add_metadata(solver_metadata(&config, Some(args.threshold))?);
    let header = [
        "d2",
        "g_n",
        "a",
        "k_m_fit",
        "derivative_class",
        "exponent_fit",
        "exponent_stderr",
        "r_squared",
        "chi_k_m",
    ]
    .map(String::from);
    run.csv("kinks.csv", &header, rows)?;
    run.finish(args)?;
    Ok(())
}
