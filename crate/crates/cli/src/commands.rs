use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use coreset_bounds::bounds::Check;
use coreset_bounds::geometry::{read_lmat, write_lmat};
use coreset_bounds::hull::objective;
use coreset_bounds::oracle::{brute_inner, grid_max_over_hull, reference_fw_k1, support_radius_upper_bound, OracleConfig};
use coreset_bounds::pipeline::{posterior_stage, sweep as run_sweep, SweepRow};
use coreset_bounds::{
    bound_losses, BoundConfig, BoundReport, BoundRun, ConvexHull, Dataset, DeskConfig, Error, ReferenceModel,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{BoundArgs, DeskArgs, GenArgs, ReportArgs, SweepArgs, VerifyArgs};
use crate::{Usage, VerificationFailed};

/// Rows compared by the brute-force inner-product oracle.
const INNER_ORACLE_ROWS: usize = 64;
/// Weight agreement required of the singleton-hull reference coreset.
const REFERENCE_WEIGHT_TOL: f64 = 1e-9;

const SWEEP_HEADER: [&str; 9] = [
    "checkpoint_size",
    "m",
    "bound_I",
    "bound_II",
    "bound_II_rate_form",
    "total_bound",
    "EER",
    "deterministic_risk",
    "coreset_size",
];

const SUMMARY_HEADER: [&str; 9] = [
    "file",
    "m",
    "coreset_size",
    "bound_I",
    "bound_II",
    "bound_II_rate_form",
    "total_bound",
    "EER",
    "checks_passed",
];

fn run_config<T: Serialize>(command: &str, args: &T) -> Result<Value> {
    Ok(json!({ "command": command, "version": env!("CARGO_PKG_VERSION"), "args": serde_json::to_value(args)? }))
}

/// Writes `contents` to `dir/name`, or to stdout without a directory.
fn emit(dir: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn dataset(desk: &DeskArgs, cfg: &DeskConfig) -> Result<Dataset> {
    match &desk.data {
        Some(path) => Dataset::load_csv(path).with_context(|| format!("reading dataset {}", path.display())),
        None => Ok(cfg.dataset()?),
    }
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let cfg = args.desk.desk_config(None);
    cfg.validate()?;
    let data = dataset(&args.desk, &cfg)?;
    let checkpoint = args.checkpoint.unwrap_or(data.len());
    let stage = posterior_stage(&data, checkpoint, &cfg)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut csv_out = BufWriter::new(File::create(args.out.join("data.csv"))?);
    data.write_csv(&mut csv_out)?;
    csv_out.flush()?;
    fs::write(args.out.join("model.json"), stage.model.to_json_string()? + "\n")?;
    fs::write(args.out.join("posterior.json"), stage.posterior.to_json_string()? + "\n")?;
    let mut lmat_out = BufWriter::new(File::create(args.out.join("losses.lmat"))?);
    write_lmat(&mut lmat_out, &stage.losses)?;
    lmat_out.flush()?;
    log::info!(
        "wrote {} points, {} parameters and a {}x{} loss matrix to {}",
        data.len(),
        stage.model.n_params(),
        stage.losses.n_data(),
        stage.losses.n_samples(),
        args.out.display()
    );
    Ok(())
}

/// `--fw-iters`, then `--checkpoint`, then the model's training size, then N.
fn resolve_m(args: &BoundArgs, n_data: usize) -> Result<usize> {
    if let Some(m) = args.bound.fw_iters.or(args.checkpoint) {
        return Ok(m);
    }
    if let Some(path) = &args.model {
        let model = ReferenceModel::load(path).with_context(|| format!("reading model {}", path.display()))?;
        return Ok(model.training_meta.n_train);
    }
    log::warn!("no checkpoint size given; running {n_data} Frank-Wolfe iterations");
    Ok(n_data)
}

fn bound_run(args: &BoundArgs) -> Result<(ConvexHull, BoundRun)> {
    let file = File::open(&args.lmat).with_context(|| format!("opening {}", args.lmat.display()))?;
    let losses = read_lmat(BufReader::new(file)).with_context(|| format!("reading {}", args.lmat.display()))?;
    let hull = match &args.hull {
        Some(path) => ConvexHull::load(path).with_context(|| format!("reading hull {}", path.display()))?,
        None => ConvexHull::uniform(losses.n_data())?,
    };
    if hull.n_data() != losses.n_data() {
        return Err(Usage(format!("hull has {} coordinates but the loss matrix has {} rows", hull.n_data(), losses.n_data())).into());
    }
    let m = resolve_m(args, losses.n_data())?;
    let config = BoundConfig { xi: args.bound.xi, delta: args.bound.delta, variant: args.bound.variant.into(), seed: args.seed };
    let run = bound_losses(losses, &hull, m, &config)?;
    Ok((hull, run))
}

#[derive(Serialize)]
struct ReportOut<'a> {
    run_config: Value,
    #[serde(flatten)]
    report: &'a BoundReport,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    run_config: Value,
    #[serde(flatten)]
    report: &'a BoundReport,
    oracles: Vec<Check>,
    passed: bool,
}

pub fn bound(args: &BoundArgs) -> Result<()> {
    let (_, run) = bound_run(args)?;
    let out = ReportOut { run_config: run_config("bound", args)?, report: &run.report };
    emit(args.out.as_deref(), "report.json", &to_json(&out)?)
}

fn skipped(name: &str, why: &str) -> Check {
    Check { name: name.into(), passed: true, detail: format!("skipped: {why}") }
}

fn oracle_checks(args: &VerifyArgs, hull: &ConvexHull, run: &BoundRun) -> Result<Vec<Check>> {
    let seed = args.bound.seed.unwrap_or(0);
    let config = OracleConfig {
        grid_resolution: args.grid_resolution,
        boundary_samples: args.boundary_samples,
        tolerance: args.tolerance,
        seeds: vec![seed],
    };
    config.validate()?;
    let tol = config.tolerance;
    let space = &run.space;
    let solution = &run.solution;
    let mut checks = Vec::new();

    let rows = space.n_data().min(INNER_ORACLE_ROWS);
    let mut worst = 0.0f64;
    for n in 0..rows {
        for m in n..rows {
            worst = worst.max((brute_inner(space.losses(), n, m)? - space.inner(n, m)?).abs());
        }
    }
    checks.push(Check {
        name: "inner_products".into(),
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} over the first {rows} rows"),
    });

    let vertex_max = hull
        .vertices()
        .iter()
        .map(|p| objective(space, &solution.weights, p))
        .collect::<coreset_bounds::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(match grid_max_over_hull(space, &solution.weights, hull, config.grid_resolution) {
        Ok(grid) => Check {
            name: "vertex_optimality".into(),
            passed: grid <= vertex_max + tol,
            detail: format!("grid maximum {grid:.6e}, vertex maximum {vertex_max:.6e}"),
        },
        Err(Error::Resource(why)) => skipped("vertex_optimality", &why),
        Err(e) => return Err(e.into()),
    });

    if solution.degenerate {
        checks.push(skipped("radius", "all losses are zero"));
    } else {
        let mut worst: Option<(usize, f64, f64)> = None;
        for (i, p) in hull.vertices().iter().enumerate() {
            let upper = support_radius_upper_bound(space, p, config.boundary_samples, seed);
            let r = run.constants.radius_i[i];
            if worst.is_none_or(|(_, a, b)| r - upper > a - b) {
                worst = Some((i, r, upper));
            }
        }
        let (i, r, upper) = worst.expect("hull has a vertex");
        checks.push(Check {
            name: "radius".into(),
            passed: r <= upper + tol,
            detail: format!("vertex {i}: radius {r:.6e}, support bound {upper:.6e}"),
        });
    }

    if hull.n_vertices() != 1 {
        checks.push(skipped("singleton_reference", "hull has more than one vertex"));
    } else if solution.degenerate {
        checks.push(skipped("singleton_reference", "all losses are zero"));
    } else {
        match reference_fw_k1(space, hull.vertex(0), run.report.config.m) {
            Ok(reference) => {
                let ours = solution.weights.to_dense();
                let gap = ours.iter().zip(&reference.w_tilde).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let same = solution.selected_run().selected_indices == reference.selected_indices;
                checks.push(Check {
                    name: "singleton_reference".into(),
                    passed: same && gap <= REFERENCE_WEIGHT_TOL,
                    detail: format!("indices identical: {same}, max weight gap {gap:.3e}"),
                });
            }
            Err(Error::Precondition(why)) => checks.push(skipped("singleton_reference", &why)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(checks)
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let (hull, run) = bound_run(&args.bound)?;
    let oracles = oracle_checks(args, &hull, &run)?;
    let checks_passed = run.report.checks.as_ref().is_none_or(|c| c.passed);
    let passed = checks_passed && oracles.iter().all(|c| c.passed);
    let out = VerifyOut { run_config: run_config("verify", args)?, report: &run.report, oracles, passed };
    emit(args.bound.out.as_deref(), "verify.json", &to_json(&out)?)?;
    if passed {
        Ok(())
    } else {
        Err(VerificationFailed.into())
    }
}

fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn sweep_fields(r: &SweepRow) -> Vec<String> {
    vec![
        r.checkpoint.to_string(),
        r.m.to_string(),
        r.bound_i.to_string(),
        r.bound_ii.to_string(),
        r.bound_ii_rate_form.to_string(),
        r.total_bound.to_string(),
        r.expected_risk_estimate.to_string(),
        r.deterministic_risk.to_string(),
        r.coreset_size.to_string(),
    ]
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let cfg = args.desk.desk_config(Some(&args.bound));
    cfg.validate()?;
    let data = dataset(&args.desk, &cfg)?;
    let rows = run_sweep(&data, &args.checkpoints, &cfg)?;
    let csv = csv_string(&SWEEP_HEADER, rows.iter().map(sweep_fields))?;
    emit(args.out.as_deref(), "sweep.csv", &csv)?;
    if let Some(dir) = &args.out {
        let record = json!({ "run_config": run_config("sweep", args)?, "rows": rows });
        emit(Some(dir), "sweep.json", &to_json(&record)?)?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct ReportIn {
    #[serde(flatten)]
    report: BoundReport,
    /// Present in `verify` output, where it also covers the oracles.
    passed: Option<bool>,
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let mut rows = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let input: ReportIn = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let r = &input.report;
        let passed = input.passed.or(r.checks.as_ref().map(|c| c.passed));
        rows.push(vec![
            path.display().to_string(),
            r.config.m.to_string(),
            r.coreset_size.to_string(),
            r.bound_i.to_string(),
            r.bound_ii.value.to_string(),
            r.bound_ii.rate_form.to_string(),
            r.total_bound.to_string(),
            r.expected_risk_estimate.to_string(),
            passed.map_or_else(String::new, |p| p.to_string()),
        ]);
    }
    emit(args.out.as_deref(), "summary.csv", &csv_string(&SUMMARY_HEADER, rows)?)
}
