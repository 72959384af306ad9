use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use onel1::experiments::{
    estimate_phase_transition, generate_mri_pattern, load_reference_curve, mondrian_image, run_benchmark_suite,
    run_image_demo, run_selftest, BenchmarkConfig, ImageProblem, PhaseGrid, ReferenceCurve,
};
use onel1::io::{
    read_mask, read_pgm, read_vector, write_mask, write_pgm, write_records, write_vector, CellRow, Command,
    ImageRow, OutputFormat, Record, RunConfig, TransitionRow,
};
use onel1::linalg::norm2;
use onel1::operators::{make_partial_dct, make_partial_dct_2d, MaskDomain, SamplingOperator};
use onel1::rng::derive_seed;
use onel1::solvers::{solve, SolverKind, SolverResult};
use onel1::Error;

use crate::{EXIT_INPUT, EXIT_IO, EXIT_SOLVER};

pub struct Failure {
    pub code: u8,
    pub error: Box<dyn fmt::Display>,
}

impl Failure {
    fn new(code: u8, msg: impl fmt::Display + 'static) -> Self {
        Self {
            code,
            error: Box::new(msg),
        }
    }
}

/// Map a library error to an exit code.
fn classify(e: Error) -> Failure {
    let code = match &e {
        Error::Io { .. } | Error::Csv { .. } | Error::Json(_) => EXIT_IO,
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Parse { .. } => EXIT_INPUT,
        Error::NotOrthonormal { .. } | Error::Infeasible => EXIT_SOLVER,
    };
    Failure::new(code, e)
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        classify(e)
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command {
        Command::Solve => run_solve(cfg),
        Command::PhaseTransition => run_phase(cfg),
        Command::Benchmark => run_benchmark(cfg),
        Command::ImageDemo => run_image(cfg),
        Command::Selftest => run_checks(cfg),
    }
}

fn output_path(cfg: &RunConfig, stem: &str) -> PathBuf {
    let ext = match cfg.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    cfg.out.join(format!("{stem}.{ext}"))
}

fn emit<R: Record>(cfg: &RunConfig, stem: &str, rows: &[R]) -> Result<PathBuf, Failure> {
    let path = output_path(cfg, stem);
    write_records(rows, cfg.format, &path)?;
    Ok(path)
}

fn write_json(path: &Path, value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, text + "\n").map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

#[derive(Serialize)]
struct SolveReport<'a> {
    solver: String,
    operator: &'a str,
    rows: usize,
    cols: usize,
    #[serde(flatten)]
    result: &'a SolverResult,
}

fn build_operator(cfg: &RunConfig, rows: usize) -> Result<(SamplingOperator, String), Failure> {
    if let Some(path) = &cfg.mask {
        let mask = read_mask(path)?;
        if mask.len() != rows {
            return Err(Failure::new(
                EXIT_INPUT,
                format!("mask selects {} coefficients but the input has {rows}", mask.len()),
            ));
        }
        let op = match mask.domain() {
            MaskDomain::Line(len) => make_partial_dct(len, &mask)?,
            MaskDomain::Grid { .. } => make_partial_dct_2d(&mask)?,
        };
        return Ok((op, format!("partial-dct mask {}", path.display())));
    }
    if let Some(n) = cfg.n {
        if n != rows {
            return Err(Failure::new(EXIT_INPUT, format!("--n {n} disagrees with input length {rows}")));
        }
    }
    if rows > cfg.big_n {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("{rows} measurements exceed signal length {}", cfg.big_n),
        ));
    }
    let op = cfg.ensemble.build(rows, cfg.big_n, cfg.seed)?;
    Ok((op, format!("{} seed {}", cfg.ensemble, cfg.seed)))
}

fn run_solve(cfg: &RunConfig) -> Outcome {
    let input = cfg.input.as_ref().expect("validated");
    let b = read_vector(input)?;
    if b.is_empty() {
        return Err(Failure::new(EXIT_INPUT, format!("{}: no measurements", input.display())));
    }
    let (a, label) = build_operator(cfg, b.len())?;
    let opts = cfg.solver_options();
    let b_norm = norm2(&b);
    let mut capped = Vec::new();
    for &kind in &cfg.solvers {
        let res = solve(kind, &a, &b, &opts)?;
        let tag = file_tag(kind);
        let json = cfg.out.join(format!("solve-{tag}.json"));
        write_json(
            &json,
            &SolveReport {
                solver: kind.to_string(),
                operator: &label,
                rows: a.rows(),
                cols: a.cols(),
                result: &res,
            },
        )?;
        let xfile = cfg.out.join(format!("x_hat-{tag}.txt"));
        write_vector(&res.x_hat, &xfile)?;
        let residual = norm2(
            &a.apply(&res.x_hat)
                .iter()
                .zip(&b)
                .map(|(p, q)| p - q)
                .collect::<Vec<_>>(),
        ) / b_norm;
        println!("[{kind}]");
        println!("status = {}", if res.is_converged() { "converged" } else { "max-iterations" });
        println!("outer_iters = {}", res.outer_iters);
        println!("inner_iters = {}", res.inner_iters);
        println!("operator_calls = {}", res.operator_calls);
        println!("relative_residual = {residual:.6e}");
        println!("result = {}", json.display());
        println!("x_hat = {}", xfile.display());
        println!();
        if !res.is_converged() {
            capped.push(kind.to_string());
        }
    }
    if capped.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_SOLVER,
            format!("iteration cap reached without convergence: {}", capped.join(", ")),
        ))
    }
}

/// File-name-safe solver label.
fn file_tag(kind: SolverKind) -> String {
    kind.to_string().replace(':', "_")
}

fn run_phase(cfg: &RunConfig) -> Outcome {
    let reference = match &cfg.reference {
        Some(p) => load_reference_curve(p)?,
        None => ReferenceCurve::bundled(),
    };
    let grid = PhaseGrid {
        deltas: cfg.deltas.clone(),
        trials: cfg.trials,
        ensemble: cfg.ensemble,
        len: cfg.big_n,
        master_seed: cfg.seed,
        ..PhaseGrid::desk_scale()
    };
    let opts = cfg.solver_options();
    let (mut trials, mut cells, mut fits) = (Vec::new(), Vec::new(), Vec::new());
    for &kind in &cfg.solvers {
        let run = estimate_phase_transition(&grid, kind, &opts, &reference)?;
        let name = kind.to_string();
        for e in &run.estimates {
            println!(
                "{name} delta={:.4} rho_hat={:.4} reference={:.4} ({})",
                e.delta,
                e.rho_hat(),
                e.rho_reference,
                onel1::io::fit_status_name(e.fit.status)
            );
            cells.extend(CellRow::from_estimate(&name, e));
            fits.push(TransitionRow::from_estimate(&name, e));
        }
        trials.extend(run.records);
    }
    for path in [
        emit(cfg, "phase_trials", &trials)?,
        emit(cfg, "phase_cells", &cells)?,
        emit(cfg, "phase_transition", &fits)?,
    ] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_benchmark(cfg: &RunConfig) -> Outcome {
    let bench = BenchmarkConfig {
        len: cfg.big_n,
        delta: cfg.deltas[0],
        rhos: cfg.rhos.clone(),
        trials: cfg.trials,
        solvers: cfg.solvers.clone(),
        ensemble: cfg.ensemble,
        master_seed: cfg.seed,
        ..BenchmarkConfig::default()
    };
    let run = run_benchmark_suite(&bench, &cfg.solver_options())?;
    println!(
        "{:<14} {:>6} {:>9} {:>11} {:>11} {:>11} {:>10} {:>10}",
        "solver", "rho", "success", "rmse_min", "rmse_mean", "rmse_max", "calls", "time_s"
    );
    for r in &run.records {
        println!(
            "{:<14} {:>6.3} {:>5}/{:<3} {:>11.3e} {:>11.3e} {:>11.3e} {:>10.1} {:>10.4}",
            r.solver,
            r.rho,
            r.successes,
            r.trials,
            r.rmse.min,
            r.rmse.mean,
            r.rmse.max,
            r.operator_calls.mean,
            r.wall_time.mean
        );
    }
    for path in [emit(cfg, "benchmark", &run.records)?, emit(cfg, "benchmark_trials", &run.trials)?] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_image(cfg: &RunConfig) -> Outcome {
    let image = match &cfg.image {
        Some(p) => read_pgm(p)?,
        None => mondrian_image(cfg.big_n, cfg.big_n, cfg.seed),
    };
    let mask = match &cfg.mask {
        Some(p) => read_mask(p)?,
        None => {
            let n = cfg.n.unwrap_or(7419);
            generate_mri_pattern(image.height, image.width, n, derive_seed(cfg.seed, &[1]))?
        }
    };
    let mut problem = ImageProblem::new(image, cfg.levels, mask, cfg.sigma, derive_seed(cfg.seed, &[2]))?;
    if cfg.epsilon > 0.0 {
        problem.epsilon = cfg.epsilon;
    }
    write_pgm(&problem.image, cfg.out.join("image_original.pgm"))?;
    write_mask(&problem.mask, cfg.out.join("image_mask.txt"))?;
    let opts = cfg.solver_options();
    let mut rows = Vec::new();
    for &kind in &cfg.solvers {
        let out = run_image_demo(&problem, kind, &opts)?;
        let feasible = out.is_feasible(1e-6);
        println!(
            "{kind}: error={:.4} residual={:.4} epsilon={:.4} feasible={feasible} iters={} time={:.2}s",
            out.relative_error, out.residual_norm, out.epsilon, out.solver.outer_iters, out.wall_time
        );
        write_pgm(&out.reconstruction, cfg.out.join(format!("image_{}.pgm", file_tag(kind))))?;
        rows.push(ImageRow {
            solver: kind.to_string(),
            height: problem.image.height,
            width: problem.image.width,
            n: problem.mask.len(),
            sigma: problem.sigma,
            epsilon: problem.epsilon,
            relative_error: out.relative_error,
            residual_norm: out.residual_norm,
            feasible,
            outer_iters: out.solver.outer_iters,
            operator_calls: out.solver.operator_calls,
            wall_time: out.wall_time,
        });
    }
    println!("wrote {}", emit(cfg, "image_demo", &rows)?.display());
    Ok(())
}

fn run_checks(cfg: &RunConfig) -> Outcome {
    let checks = run_selftest(cfg.seed);
    let mut failed = 0;
    for c in &checks {
        println!("{} {:<16} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::new(EXIT_SOLVER, format!("{failed} self-test check(s) failed")))
    }
}
