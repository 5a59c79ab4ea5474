use std::path::{Path, PathBuf};

use serde::Serialize;

use fracboussinesq::calculus::AuditSample;
use fracboussinesq::output::{write_csv, write_json, Cell};
use fracboussinesq::semigroup::semigroup_audit;
use fracboussinesq::solver::{
    cross_check, estimate_constants, etd_march, initial_data, picard_solve, scaling_check,
    uniqueness_probe, BoussinesqState, Constants, ConstantsReport, CrossCheck, EtdErrors,
    ProbeParams, SeriesRow,
};
use fracboussinesq::spectral::{FieldSnapshot, ScalarField, VectorField, SNAPSHOT_VERSION};

use crate::config::{
    override_data_seed, parse, CalculusConfig, ConstantsConfig, ConstantsSource, DataSource,
    ProbeConfig, Problem, ScalingConfig, SemigroupConfig, SolveConfig,
};
use crate::error::{CliError, EXIT_NOT_CONVERGED, EXIT_OK};
use crate::manifest::{sha256_hex, Manifest, Versions};
use crate::{Cli, Command};

/// Files written so far, in order, for the manifest.
struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
    verbose: u8,
}

impl Outputs<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        if self.verbose > 0 {
            eprintln!("writing {}", self.dir.join(name).display());
        }
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let p = self.path(name);
        Ok(write_json(&p, value)?)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
        let p = self.path(name);
        Ok(write_csv(&p, header, rows)?)
    }

    fn snapshot(&mut self, name: &str, snap: &FieldSnapshot) -> Result<(), CliError> {
        let p = self.path(name);
        Ok(snap.save(&p)?)
    }

    fn log(&self, msg: impl FnOnce() -> String) {
        if self.verbose > 0 {
            eprintln!("{}", msg());
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    if cli.seeds.as_ref().is_some_and(Vec::is_empty) {
        return Err(CliError::Config("--seeds must list at least one seed".into()));
    }
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(k) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
            k
        }
        None => rayon::current_num_threads(),
    };
    let bytes = std::fs::read(&cli.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", cli.config.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| CliError::Config(format!("{}: {e}", cli.config.display())))?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Config(format!("{}: {e}", cli.out.display())))?;
    let base = cli.config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut out = Outputs {
        dir: &cli.out,
        files: Vec::new(),
        verbose: cli.verbose,
    };
    let seeds = cli.seeds.as_deref();
    let path = cli.config.as_path();
    let (code, seeds) = match cli.command {
        Command::Solve => solve(parse(&text, path)?, seeds, &base, &mut out)?,
        Command::ScalingCheck => scaling(parse(&text, path)?, seeds, &base, &mut out)?,
        Command::UniquenessProbe => probe(parse(&text, path)?, seeds, &base, &mut out)?,
        Command::Constants => constants(parse(&text, path)?, seeds, &mut out)?,
        Command::CalculusAudit => calculus(parse(&text, path)?, seeds, &mut out)?,
        Command::SemigroupAudit => semigroup(parse(&text, path)?, seeds, &mut out)?,
    };
    let manifest = Manifest {
        command: cli.command.name(),
        config_sha256: sha256_hex(&bytes),
        seeds,
        threads,
        versions: Versions {
            fracboussinesq: env!("CARGO_PKG_VERSION"),
            snapshot_format: SNAPSHOT_VERSION,
        },
        exit_code: code,
        outputs: Vec::new(),
    };
    let files = std::mem::take(&mut out.files);
    manifest.write(&cli.out, &files)?;
    Ok(code)
}

fn data_seeds(data: &DataSource) -> Vec<u64> {
    match data {
        DataSource::Generate(d) => vec![d.seed],
        DataSource::Snapshots { .. } => Vec::new(),
    }
}

fn resolve_constants(
    p: &Problem<'_>,
    out: &mut Outputs<'_>,
) -> Result<Constants, CliError> {
    match p.constants {
        ConstantsSource::Given(k) => {
            k.validate()?;
            Ok(*k)
        }
        ConstantsSource::Measure(spec) => {
            p.solver.validate()?;
            out.log(|| format!("measuring constants on {} seeds", spec.seeds.len()));
            let report = estimate_constants(p.solver, spec)?;
            write_constants(&report, out)?;
            Ok(report.constants())
        }
    }
}

fn load_data(
    p: &Problem<'_>,
    k: &Constants,
    base: &Path,
) -> Result<(VectorField, ScalarField), CliError> {
    p.solver.validate()?;
    match p.data {
        DataSource::Generate(spec) => Ok(initial_data(spec, p.solver, k)?),
        DataSource::Snapshots { velocity, theta } => {
            let grid = p.solver.grid()?;
            let u = FieldSnapshot::load(&base.join(velocity))?.to_vector(&grid)?;
            let t = FieldSnapshot::load(&base.join(theta))?.to_scalar(&grid)?;
            Ok((u, t))
        }
    }
}

struct Solved {
    state: Option<BoussinesqState>,
    constants: Constants,
}

/// Constants, data and the fixed-point solve; writes `report.json` and, on
/// convergence, `series.csv` and the final snapshots.
fn solve_problem(p: &Problem<'_>, base: &Path, out: &mut Outputs<'_>) -> Result<Solved, CliError> {
    let k = resolve_constants(p, out)?;
    let (u0, t0) = load_data(p, &k, base)?;
    out.log(|| "fixed-point iteration".into());
    let run = picard_solve(&u0, &t0, p.solver, &k)?;
    out.json("report.json", &run.report)?;
    out.log(|| format!("{:?} after {} iterations", run.report.outcome, run.report.iterations));
    if let Some(state) = &run.state {
        let rows: Vec<Vec<Cell>> = state
            .norm_series(p.solver)?
            .iter()
            .map(|r| r.values().iter().map(|&v| Cell::from(v)).collect())
            .collect();
        out.csv("series.csv", &SeriesRow::HEADER, &rows)?;
        let last = state.u.nodes().len() - 1;
        out.snapshot("final_velocity.snap", &FieldSnapshot::from_vector(state.u.node(last)))?;
        out.snapshot("final_theta.snap", &FieldSnapshot::from_scalar(state.theta.node(last)))?;
    }
    Ok(Solved {
        state: run.state,
        constants: k,
    })
}

#[derive(Serialize)]
struct EtdReport {
    errors: EtdErrors,
    cross_check: CrossCheck,
}

fn solve(
    mut c: SolveConfig,
    seeds: Option<&[u64]>,
    base: &Path,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        override_data_seed(&mut c.data, s)?;
    }
    let used = data_seeds(&c.data);
    let solved = solve_problem(&c.problem(), base, out)?;
    let Some(state) = solved.state else {
        return Ok((EXIT_NOT_CONVERGED, used));
    };
    if c.etd_check {
        let (u0, t0) = (state.u.first(), state.theta.first());
        out.log(|| "ETD2 cross-check".into());
        let etd = etd_march(u0, t0, &c.solver)?;
        let check = cross_check(&state, &etd, &c.solver, solved.constants.k1)?;
        out.json(
            "etd.json",
            &EtdReport {
                errors: etd.errors,
                cross_check: check,
            },
        )?;
    }
    Ok((EXIT_OK, used))
}

fn scaling(
    mut c: ScalingConfig,
    seeds: Option<&[u64]>,
    base: &Path,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        override_data_seed(&mut c.data, s)?;
    }
    if c.lambdas.is_empty() {
        return Err(CliError::Config("lambdas must list at least one factor".into()));
    }
    let used = data_seeds(&c.data);
    let solved = solve_problem(&c.problem(), base, out)?;
    let Some(state) = solved.state else {
        return Ok((EXIT_NOT_CONVERGED, used));
    };
    let reports = c
        .lambdas
        .iter()
        .map(|&l| {
            out.log(|| format!("rescaling by {l}"));
            scaling_check(&state, l, &c.solver)
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.json("scaling.json", &reports)?;
    Ok((EXIT_OK, used))
}

#[derive(Serialize)]
struct ProbeOutput {
    params: ProbeParams,
    report: fracboussinesq::solver::ProbeReport,
}

fn probe(
    mut c: ProbeConfig,
    seeds: Option<&[u64]>,
    base: &Path,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        override_data_seed(&mut c.data, s)?;
    }
    let used = data_seeds(&c.data);
    let solved = solve_problem(&c.problem(), base, out)?;
    let Some(state) = solved.state else {
        return Ok((EXIT_NOT_CONVERGED, used));
    };
    out.log(|| "ETD2 run".into());
    let etd = etd_march(state.u.first(), state.theta.first(), &c.solver)?;
    let check = cross_check(&state, &etd, &c.solver, solved.constants.k1)?;
    out.json(
        "etd.json",
        &EtdReport {
            errors: etd.errors,
            cross_check: check,
        },
    )?;
    let k = solved.constants;
    let params = ProbeParams {
        k1: k.k1,
        k2: k.k2,
        k3: k.k3,
        c_interp: c.c_interp,
        epsilon: c.epsilon,
        budget: check.tolerance,
    };
    let report = uniqueness_probe(&state, &etd.state, &c.solver, &params)?;
    let rows: Vec<Vec<Cell>> = (0..report.times.len())
        .map(|m| {
            vec![
                report.times[m].into(),
                report.coefficient[m].into(),
                report.delta_u[m].into(),
                report.delta_theta[m].into(),
            ]
        })
        .collect();
    out.csv("probe.csv", &["t", "coefficient", "delta_u", "delta_theta"], &rows)?;
    out.json("probe.json", &ProbeOutput { params, report })?;
    Ok((EXIT_OK, used))
}

fn write_constants(report: &ConstantsReport, out: &mut Outputs<'_>) -> Result<(), CliError> {
    out.json("constants.json", report)?;
    let opt = |v: Option<f64>| v.map_or(Cell::from(""), Cell::from);
    let rows: Vec<Vec<Cell>> = report
        .samples
        .iter()
        .map(|s| vec![s.seed.into(), opt(s.k1), opt(s.k2), opt(s.k3)])
        .collect();
    out.csv("constants_samples.csv", &["seed", "k1", "k2", "k3"], &rows)
}

fn constants(
    mut c: ConstantsConfig,
    seeds: Option<&[u64]>,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        c.corpus.seeds = s.to_vec();
    }
    c.solver.validate()?;
    let report = estimate_constants(&c.solver, &c.corpus)?;
    write_constants(&report, out)?;
    Ok((EXIT_OK, c.corpus.seeds))
}

fn calculus(
    mut c: CalculusConfig,
    seeds: Option<&[u64]>,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        c.corpus.seeds = s.to_vec();
    }
    c.corpus.validate()?;
    let mut reports = Vec::with_capacity(c.audits.len());
    let mut rows = Vec::new();
    for req in &c.audits {
        out.log(|| format!("audit {req:?}"));
        let audit = req.run(&c.corpus)?;
        let label = audit.report.exponent_label();
        rows.extend(audit.samples.iter().map(|s: &AuditSample| {
            vec![
                Cell::from(s.inequality_id.as_str()),
                Cell::from(label.as_str()),
                s.seed.into(),
                Cell::from(s.band.as_str()),
                s.modes.into(),
                s.lhs.into(),
                s.rhs.into(),
                s.ratio.map_or(Cell::from(""), Cell::from),
            ]
        }));
        reports.push(audit.report);
    }
    out.json("calculus_audit.json", &reports)?;
    out.csv(
        "calculus_samples.csv",
        &["inequality_id", "exponents", "seed", "band", "modes", "lhs", "rhs", "ratio"],
        &rows,
    )?;
    Ok((EXIT_OK, c.corpus.seeds))
}

fn semigroup(
    mut c: SemigroupConfig,
    seeds: Option<&[u64]>,
    out: &mut Outputs<'_>,
) -> Result<(i32, Vec<u64>), CliError> {
    if let Some(s) = seeds {
        c.corpus.seeds = s.to_vec();
    }
    let report = semigroup_audit(&c)?;
    out.json("semigroup_audit.json", &report)?;
    let rows: Vec<Vec<Cell>> = report
        .samples
        .iter()
        .map(|s| {
            vec![
                Cell::from(s.check.as_str()),
                s.seed.into(),
                Cell::from(s.band.as_str()),
                s.modes.into(),
                s.param.into(),
                s.value.into(),
            ]
        })
        .collect();
    out.csv("semigroup_samples.csv", &["check", "seed", "band", "modes", "param", "value"], &rows)?;
    Ok((EXIT_OK, c.corpus.seeds))
}
