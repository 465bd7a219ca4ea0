//! Runs configured experiments and writes their reports.
//!
//! Output layout under the output directory:
//!
//! ```text
//! summary.csv              one row per experiment, fixed column order
//! reports.json             run header (seed) and every report
//! reports/<id>.json        one report per experiment
//! tables/<id>.<name>.csv   plot-ready tables (convergence, levels, history)
//! artifacts/<file>         solved maps and lookup rows
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{
    affine_geodesic_drift, build_chain, check_all_totally_geodesic, check_chain_realforms,
    check_restriction_property, ChainFamily, RecursiveChain, GEODESIC_DRIFT_TOL, GEODESIC_HORIZON,
};
use crate::config::{
    ChainCheckParams, Coefficient, Experiment, HarmonicFunctionParams, InvolutionsParams, LookupParams,
    MeromorphicParams, MinimalSurfaceParams, Params, RecursiveReflectionParams, ReflectionIdentityParams,
    RunConfig, SchwarzParams, SolveParams, UniqueContinuationParams,
};
use crate::expr::{Expr, Vars};
use crate::geometry::{Branch, ModelSpace};
use crate::harness::{
    meromorphic_reflection_check, minimal_surface_reflection_check, parse_involution,
    schwarz_convergence_study, unique_continuation_experiment, verify_harmonic_function_reflection,
    verify_recursive_reflection, verify_reflection_identity, BumpedSurface, ContinuationSetup, HarmonicFunctionSetup,
    HarnessError, Helicoid, Init, Line, ParametricSurface, Plane, RationalFunction, ReflectionExperiment,
};
use crate::involution::registry::{lookup_real_forms, recursive_row, recursive_rows, DomainType};
use crate::involution::{algebraic_identity_suite, fixed_set_suite, registry};
use crate::maps::{ExprMap, HolomorphicMap, MapUnderTest};
use crate::report::{DataTable, ReportBuilder, Status, VerificationReport};
use crate::solver::{
    io as map_io, laplace_beltrami_solve, solve_dirichlet, GridDomain, LinearOptions, Region, SolveOptions,
    SolveOutcome,
};

/// Command-line overrides of a run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub parallel: Option<usize>,
    /// Replaces the solver tolerance of every experiment that solves.
    pub tol: Option<f64>,
    /// Record wall-clock times; off by default so reruns are bit-identical.
    pub timings: bool,
}

/// A file produced by an experiment besides its report.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub outcome: Result<VerificationReport, String>,
    pub artifacts: Vec<Artifact>,
}

impl ExperimentResult {
    pub fn status(&self) -> &'static str {
        match &self.outcome {
            Ok(r) => r.conclusion.as_str(),
            Err(_) => "error",
        }
    }

    pub fn as_expected(&self) -> bool {
        matches!(&self.outcome, Ok(r) if r.conclusion == self.experiment.expect)
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub seed: u64,
    pub timings: bool,
    pub results: Vec<ExperimentResult>,
}

impl RunSummary {
    /// 0 when every non-exploratory experiment reached its expected
    /// conclusion, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let ok = self.results.iter().filter(|r| !r.experiment.exploratory).all(ExperimentResult::as_expected);
        if ok {
            0
        } else {
            1
        }
    }
}

/// Per-experiment seed: the run seed mixed with a 64-bit FNV-1a hash of the
/// id, so results do not depend on scheduling or on the other experiments.
pub fn experiment_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

pub fn run(config: &RunConfig, opts: &RunOptions) -> RunSummary {
    let seed = opts.seed.unwrap_or(config.seed);
    let threads = opts.parallel.or(config.parallel).unwrap_or(0);
    let job = |e: &Experiment| run_one(e, seed, opts);
    let results = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| config.experiments.par_iter().map(job).collect()),
        Err(_) => config.experiments.iter().map(job).collect(),
    };
    RunSummary { seed, timings: opts.timings, results }
}

fn run_one(e: &Experiment, seed: u64, opts: &RunOptions) -> ExperimentResult {
    let s = experiment_seed(seed, &e.id);
    let started = Instant::now();
    let caught = catch_unwind(AssertUnwindSafe(|| execute(e, s, opts.tol)));
    let (outcome, artifacts) = match caught {
        Ok(Ok((mut report, artifacts))) => {
            report.runtime_ms = if opts.timings { started.elapsed().as_millis() as u64 } else { 0 };
            (Ok(report), artifacts)
        }
        Ok(Err(err)) => (Err(err.to_string()), Vec::new()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            (Err(format!("internal error: {msg}")), Vec::new())
        }
    };
    ExperimentResult { experiment: e.clone(), outcome, artifacts }
}

/// Runs one experiment with the given seed. `tol` overrides the solver
/// tolerance where there is a solve.
pub fn execute(
    e: &Experiment,
    seed: u64,
    tol: Option<f64>,
) -> Result<(VerificationReport, Vec<Artifact>), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = e.id.as_str();
    let none = |r: VerificationReport| (r, Vec::new());
    Ok(match &e.params {
        Params::ReflectionIdentity(p) => none(reflection_identity(id, p, tol, &mut rng)?),
        Params::Schwarz(p) => none(schwarz(id, p, tol)?),
        Params::HarmonicFunction(p) => none(harmonic_function(id, p, tol)?),
        Params::UniqueContinuation(p) => none(continuation(id, p, tol)?),
        Params::Meromorphic(p) => none(meromorphic(id, p, &mut rng)?),
        Params::MinimalSurface(p) => none(minimal_surface(id, p, &mut rng)?),
        Params::RecursiveReflection(p) => none(recursive(id, p, &mut rng)?),
        Params::ChainCheck(p) => none(chain_check(id, p, &mut rng)?),
        Params::Lookup(p) => lookup(id, p)?,
        Params::Solve(p) => solve(id, p, tol)?,
        Params::Involutions(p) => none(involutions(id, p, seed, &mut rng)),
    })
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Invalid(msg.into())
}

fn space(desc: &str) -> Result<ModelSpace, HarnessError> {
    Ok(ModelSpace::from_descriptor(desc)?)
}

fn region(desc: &str) -> Result<Region, HarnessError> {
    Region::parse(desc).ok_or_else(|| invalid(format!("bad region `{desc}` (box, disk:R, half_disk:R)")))
}

fn branch(desc: Option<&str>) -> Result<Branch, HarnessError> {
    match desc {
        None => Ok(Branch::V1),
        Some(s) => Branch::parse(s).ok_or_else(|| invalid(format!("bad branch `{s}` (v1, v2)"))),
    }
}

type BoundaryFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Boundary values from real component expressions or from complex ones,
/// each complex expression giving a (re, im) pair.
fn boundary_fn(
    source: &ModelSpace,
    target: &ModelSpace,
    real: Option<&Vec<String>>,
    complex: Option<&Vec<String>>,
) -> Result<BoundaryFn, HarnessError> {
    match (real, complex) {
        (Some(comps), None) => {
            let m = ExprMap::new(*source, *target, comps)?;
            Ok(Box::new(move |x| m.eval_raw(x)))
        }
        (None, Some(comps)) => {
            if 2 * comps.len() != target.real_dim() {
                return Err(invalid(format!(
                    "{target} needs {} complex boundary expressions, got {}",
                    target.real_dim() / 2,
                    comps.len()
                )));
            }
            let exprs = comps
                .iter()
                .map(|s| Expr::parse(s, Vars::Real(source.real_dim())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Box::new(move |x| {
                exprs
                    .iter()
                    .flat_map(|e| {
                        let w = e.eval_at_real(x);
                        [w.re, w.im]
                    })
                    .collect()
            }))
        }
        _ => Err(invalid("give exactly one of boundary, boundary_complex")),
    }
}

fn solve_options(solver_tol: Option<f64>, max_iters: Option<usize>, tol: Option<f64>) -> SolveOptions {
    let mut o = SolveOptions { tol: tol.or(solver_tol), ..SolveOptions::default() };
    if let Some(m) = max_iters {
        o.max_iters = m;
    }
    o
}

fn reflection_identity(
    id: &str,
    p: &ReflectionIdentityParams,
    tol: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<VerificationReport, HarnessError> {
    let (source, target) = (space(&p.source)?, space(&p.target)?);
    let sigma1 = parse_involution(&p.sigma1, &source)?;
    let sigma2 = parse_involution(&p.sigma2, &target)?;
    let (map, tolerance, hypothesis_tol, note) = if let Some(comps) = &p.map {
        let f = ExprMap::new(source, target, comps)?;
        let t = p.tolerance.unwrap_or(1e-12);
        (MapUnderTest::Closed(Box::new(f)), t, p.hypothesis_tol.unwrap_or(1e-10), None)
    } else if let Some(comps) = &p.holomorphic {
        let f = HolomorphicMap::new(source, target, comps)?;
        let t = p.tolerance.unwrap_or(1e-12);
        (MapUnderTest::Closed(Box::new(f)), t, p.hypothesis_tol.unwrap_or(1e-10), None)
    } else {
        let grid = Arc::new(GridDomain::centered(source, p.half_width, p.resolution, region(&p.region)?)?);
        let bd = boundary_fn(&source, &target, p.boundary.as_ref(), p.boundary_complex.as_ref())?;
        let opts = solve_options(p.solver_tol, p.max_iters, tol);
        let solver_tol = opts.tolerance_for(&target);
        let out = solve_dirichlet(grid, target, bd, &opts)?;
        let t = p.tolerance.unwrap_or(10.0 * solver_tol);
        let note = format!("solve: {} iterations, tension {:.3e} (tol {solver_tol:e})", out.iterations, out.residual);
        (MapUnderTest::Discrete(out.map), t, p.hypothesis_tol.unwrap_or(t), Some(note))
    };
    let exp = ReflectionExperiment {
        id: id.to_string(),
        sigma1,
        sigma2,
        map,
        tolerance,
        hypothesis_tol,
        samples: p.samples,
    };
    let mut r = verify_reflection_identity(&exp, rng)?;
    r.notes.extend(note);
    Ok(r)
}

fn schwarz(id: &str, p: &SchwarzParams, tol: Option<f64>) -> Result<VerificationReport, HarnessError> {
    let e = Expr::parse(&p.boundary, Vars::Real(2))?;
    schwarz_convergence_study(
        id,
        |x| e.eval_real(x),
        p.radius,
        &p.resolutions,
        p.band,
        p.min_order,
        tol.unwrap_or(p.solver_tol),
    )
}

fn harmonic_function(
    id: &str,
    p: &HarmonicFunctionParams,
    tol: Option<f64>,
) -> Result<VerificationReport, HarnessError> {
    let s = space(&p.space)?;
    let e = Expr::parse(&p.boundary, Vars::Real(s.real_dim()))?;
    let setup = HarmonicFunctionSetup {
        id: id.to_string(),
        space: s,
        region: region(&p.region)?,
        half_width: p.half_width,
        resolution: p.resolution,
        rho: parse_involution(&p.rho, &s)?,
        solver_tol: tol.unwrap_or(p.solver_tol),
        tolerance_factor: p.tolerance_factor,
        flat_oracle: p.flat_oracle,
    };
    verify_harmonic_function_reflection(&setup, |x| e.eval_real(x))
}

fn continuation(
    id: &str,
    p: &UniqueContinuationParams,
    tol: Option<f64>,
) -> Result<VerificationReport, HarnessError> {
    let (source, target) = (space(&p.source)?, space(&p.target)?);
    if p.hypersurface_axis >= source.real_dim() {
        return Err(invalid(format!("hypersurface_axis {} out of range for {source}", p.hypersurface_axis)));
    }
    let grid = Arc::new(GridDomain::centered(source, p.half_width, p.resolution, region(&p.region)?)?);
    let hypersurface: Vec<usize> = grid
        .nodes_on_plane(p.hypersurface_axis, p.hypersurface_value)
        .into_iter()
        .filter(|&n| grid.is_interior(n))
        .collect();
    let init = |s: &str| Init::parse(s).ok_or_else(|| invalid(format!("bad seed `{s}` (mean, zero, random:N)")));
    let setup = ContinuationSetup {
        id: id.to_string(),
        domain: grid,
        target,
        seeds: [init(&p.seeds[0])?, init(&p.seeds[1])?],
        hypersurface,
        solve: solve_options(p.solver_tol, p.max_iters, tol),
        field_tol: p.field_tol,
        ratio_bound: p.ratio_bound,
    };
    let bd = boundary_fn(&source, &target, p.boundary.as_ref(), p.boundary_complex.as_ref())?;
    let control = if p.control_boundary.is_some() || p.control_boundary_complex.is_some() {
        Some(boundary_fn(&source, &target, p.control_boundary.as_ref(), p.control_boundary_complex.as_ref())?)
    } else {
        None
    };
    let control_ref: Option<&dyn Fn(&[f64]) -> Vec<f64>> = match &control {
        Some(f) => Some(f.as_ref()),
        None => None,
    };
    unique_continuation_experiment(&setup, bd.as_ref(), control_ref)
}

fn coefficients(c: &[Coefficient]) -> Vec<Complex64> {
    c.iter()
        .map(|c| match *c {
            Coefficient::Real(x) => Complex64::new(x, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        })
        .collect()
}

fn meromorphic(id: &str, p: &MeromorphicParams, rng: &mut ChaCha8Rng) -> Result<VerificationReport, HarnessError> {
    let f = RationalFunction::new(coefficients(&p.numerator), coefficients(&p.denominator))?;
    meromorphic_reflection_check(id, &f, p.samples, p.radius, rng)
}

fn minimal_surface(
    id: &str,
    p: &MinimalSurfaceParams,
    rng: &mut ChaCha8Rng,
) -> Result<VerificationReport, HarnessError> {
    let base: Box<dyn ParametricSurface> = match p.surface.as_str() {
        "helicoid" => Box::new(Helicoid { c: p.c, u_max: p.u_max, v_max: p.v_max }),
        "plane" => Box::new(Plane { a: p.plane_a.into(), b: p.plane_b.into() }),
        other => return Err(invalid(format!("unknown surface `{other}` (helicoid, plane)"))),
    };
    let surface: Box<dyn ParametricSurface> =
        if p.perturbation != 0.0 { Box::new(BumpedSurface { inner: base, eps: p.perturbation }) } else { base };
    minimal_surface_reflection_check(id, surface.as_ref(), &Line::parse(&p.line)?, p.samples, rng)
}

fn chain(family: &str, n: usize, q: Option<usize>, br: Option<&str>) -> Result<RecursiveChain, HarnessError> {
    Ok(build_chain(ChainFamily::parse(family)?, n, q, branch(br)?)?)
}

fn recursive(
    id: &str,
    p: &RecursiveReflectionParams,
    rng: &mut ChaCha8Rng,
) -> Result<VerificationReport, HarnessError> {
    let c = chain(&p.family, p.n, p.q, p.branch.as_deref())?;
    let target = space(&p.target)?;
    let f = HolomorphicMap::new(*c.ambient(), target, &p.map)?;
    let sigma2 = parse_involution(&p.sigma2, &target)?;
    verify_recursive_reflection(id, &c, &f, sigma2.as_ref(), p.samples, p.tolerance, rng)
}

/// Copies residuals, hypotheses, notes and tables of `r` into `b`.
fn absorb(b: &mut ReportBuilder, r: VerificationReport, table_prefix: &str) {
    for (name, stat) in &r.residuals {
        b.residual(name, stat.tolerance).merge(stat);
    }
    for (name, &holds) in &r.hypotheses {
        b.hypothesis(name, holds);
    }
    for n in r.notes {
        b.note(n);
    }
    for (name, t) in r.tables {
        b.table(&format!("{table_prefix}{name}"), t);
    }
}

fn chain_check(id: &str, p: &ChainCheckParams, rng: &mut ChaCha8Rng) -> Result<VerificationReport, HarnessError> {
    let c = chain(&p.family, p.n, p.q, p.branch.as_deref())?;
    let mut b = ReportBuilder::new(id);
    b.note(c.describe());
    if p.negative_control {
        let ambient = c.ambient();
        if !ambient.has_metric() || ambient.is_flat() {
            return Err(invalid(format!("the tilted-plane control needs a curved ambient, got {ambient}")));
        }
        // an affine 2-plane through an off-origin point in generic direction
        let dim = ambient.real_dim();
        let base = ambient.sample_point_within(rng, 0.4);
        let basis: Vec<DVector<f64>> =
            (0..2).map(|_| DVector::from_fn(dim, |_, _| rand::Rng::random_range(rng, -1.0..1.0))).collect();
        let drift = affine_geodesic_drift(ambient, &base, &basis, 0.1, p.trials, GEODESIC_HORIZON, rng)?;
        b.headline("control_drift");
        b.record("control_drift", GEODESIC_DRIFT_TOL, drift);
        b.note("tilted affine plane in place of the chain levels");
        return Ok(b.finish());
    }
    absorb(&mut b, check_chain_realforms(&c, p.trials, rng), "realforms_");
    let geo = check_all_totally_geodesic(&c, p.trials, rng)?;
    if geo.conclusion == Status::Skipped {
        b.note(format!("no metric on {}: totally-geodesic check skipped", c.ambient()));
    } else {
        absorb(&mut b, geo, "geodesic_");
    }
    let restriction = check_restriction_property(&c, p.trials.min(20), 1e-6, rng);
    if restriction.conclusion != Status::Skipped {
        absorb(&mut b, restriction, "restriction_");
    }
    Ok(b.finish())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn lookup(id: &str, p: &LookupParams) -> Result<(VerificationReport, Vec<Artifact>), HarnessError> {
    let mut b = ReportBuilder::new(id);
    b.headline("row_count");
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = if p.table == "recursive" {
        let rows: Vec<&registry::RecursiveRealFormRow> = match p.row {
            Some(i) => vec![recursive_row(i)?],
            None => recursive_rows().iter().collect(),
        };
        let rows = rows
            .iter()
            .map(|r| {
                vec![
                    r.index.to_string(),
                    r.type_name.clone(),
                    r.hermitian_space.clone(),
                    r.real_form.clone(),
                    r.q_range.clone(),
                ]
            })
            .collect();
        (vec!["index", "type", "hermitian_space", "real_form", "q_range"], rows)
    } else {
        let ty = DomainType::parse(p.domain_type.as_deref().unwrap_or(""))?;
        let params = registry::LookupParams { p: p.p, q: p.q, n: p.n, k: p.k };
        let rows = lookup_real_forms(ty, &params)?
            .iter()
            .map(|r| vec![r.label.clone(), r.dim.clone(), r.ambient.clone(), r.condition.clone(), r.symbols_joined()])
            .collect();
        (vec!["label", "dim", "ambient", "condition", "real_forms"], rows)
    };
    for r in &rows {
        b.note(r.join(" | "));
    }
    let found = rows.len();
    let miss = match p.expect_rows {
        Some(want) => found.abs_diff(want) as f64,
        None => (found == 0) as u8 as f64,
    };
    b.record("row_count", 0.0, miss);
    let artifact = Artifact { name: format!("{id}.rows.csv"), contents: csv_text(&header, &rows) };
    Ok((b.finish(), vec![artifact]))
}

fn solve(id: &str, p: &SolveParams, tol: Option<f64>) -> Result<(VerificationReport, Vec<Artifact>), HarnessError> {
    let (source, target) = (space(&p.source)?, space(&p.target)?);
    let grid = Arc::new(GridDomain::centered(source, p.half_width, p.resolution, region(&p.region)?)?);
    let bd = boundary_fn(&source, &target, p.boundary.as_ref(), p.boundary_complex.as_ref())?;
    let mut opts = solve_options(p.solver_tol, p.max_iters, tol);
    opts.history_every = p.history_every;
    let solver_tol = opts.tolerance_for(&target);
    let out: SolveOutcome = if p.linear {
        if target != ModelSpace::euclidean_real(1) {
            return Err(invalid(format!("the linear solver needs target euclidean_r:1, got {target}")));
        }
        let lin = LinearOptions { tol: solver_tol, max_iters: p.max_iters };
        laplace_beltrami_solve(grid, |x| bd(x)[0], &lin)?
    } else {
        solve_dirichlet(grid, target, bd, &opts)?
    };
    let mut b = ReportBuilder::new(id);
    b.headline("tension");
    b.record("tension", solver_tol, out.residual);
    b.note(format!("{} iterations, energy {:e}", out.iterations, out.energy));
    let mut history = DataTable::new(&["iteration", "energy", "residual", "step"]);
    for h in &out.history {
        history.push(vec![h.iteration as f64, h.energy, h.residual, h.step]);
    }
    b.table("history", history);

    let mut extra = BTreeMap::new();
    extra.insert("iterations".to_string(), out.iterations.to_string());
    extra.insert("tension".to_string(), format!("{:e}", out.residual));
    extra.insert("energy".to_string(), format!("{:e}", out.energy));
    let mut buf = Vec::new();
    map_io::write_map(&out.map, &extra, &mut buf)?;
    let artifact = Artifact { name: format!("{id}.map"), contents: String::from_utf8(buf).expect("utf-8") };
    Ok((b.finish(), vec![artifact]))
}

fn involutions(id: &str, p: &InvolutionsParams, seed: u64, rng: &mut ChaCha8Rng) -> VerificationReport {
    let mut b = ReportBuilder::new(id);
    b.headline("fixed_set");
    // a few points per case suffice for identities that hold exactly
    absorb(&mut b, algebraic_identity_suite(p.n_max, 20, p.fault, rng), "");
    absorb(&mut b, fixed_set_suite(p.n_max, p.samples, p.fault, seed), "");
    b.finish()
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub const SUMMARY_COLUMNS: [&str; 8] =
    ["id", "kind", "paper_anchor", "hypothesis_status", "max_residual", "tolerance", "status", "runtime_ms"];

/// The summary table; `runtime_ms` is left empty unless timings are on.
pub fn summary_csv(summary: &RunSummary) -> String {
    let rows: Vec<Vec<String>> = summary
        .results
        .iter()
        .map(|r| {
            let e = &r.experiment;
            let (hyp, max, tol, ms) = match &r.outcome {
                Ok(rep) => {
                    let (m, t) = rep.headline_stat().map(|(_, s)| (fmt_f64(s.max), fmt_f64(s.tolerance))).unwrap_or_default();
                    let ms = if summary.timings { rep.runtime_ms.to_string() } else { String::new() };
                    (rep.hypothesis_summary().to_string(), m, t, ms)
                }
                Err(_) => (String::new(), String::new(), String::new(), String::new()),
            };
            vec![e.id.clone(), e.kind().to_string(), e.anchor.clone(), hyp, max, tol, r.status().to_string(), ms]
        })
        .collect();
    csv_text(&SUMMARY_COLUMNS, &rows)
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    kind: &'static str,
    paper_anchor: &'a str,
    exploratory: bool,
    expect: Status,
    status: &'static str,
    as_expected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a VerificationReport>,
}

#[derive(Serialize)]
struct RunOut<'a> {
    seed: u64,
    experiments: Vec<RecordOut<'a>>,
}

fn record(r: &ExperimentResult) -> RecordOut<'_> {
    RecordOut {
        id: &r.experiment.id,
        kind: r.experiment.kind().as_str(),
        paper_anchor: &r.experiment.anchor,
        exploratory: r.experiment.exploratory,
        expect: r.experiment.expect,
        status: r.status(),
        as_expected: r.as_expected(),
        error: r.outcome.as_ref().err().map(|s| s.as_str()),
        report: r.outcome.as_ref().ok(),
    }
}

fn table_csv(t: &DataTable) -> String {
    let header: Vec<&str> = t.columns.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect()).collect();
    csv_text(&header, &rows)
}

/// Writes the summary, the reports, tables and artifacts under `dir`.
pub fn write_outputs(dir: &Path, summary: &RunSummary) -> io::Result<()> {
    fs::create_dir_all(dir.join("reports"))?;
    fs::write(dir.join("summary.csv"), summary_csv(summary))?;
    let all = RunOut { seed: summary.seed, experiments: summary.results.iter().map(record).collect() };
    fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&all)? + "\n")?;
    for r in &summary.results {
        let one = RunOut { seed: summary.seed, experiments: vec![record(r)] };
        fs::write(dir.join("reports").join(format!("{}.json", r.experiment.id)), serde_json::to_string_pretty(&one)?)?;
        if let Ok(rep) = &r.outcome {
            if !rep.tables.is_empty() {
                fs::create_dir_all(dir.join("tables"))?;
            }
            for (name, t) in &rep.tables {
                fs::write(dir.join("tables").join(format!("{}.{name}.csv", r.experiment.id)), table_csv(t))?;
            }
        }
        if !r.artifacts.is_empty() {
            fs::create_dir_all(dir.join("artifacts"))?;
        }
        for a in &r.artifacts {
            fs::write(dir.join("artifacts").join(&a.name), &a.contents)?;
        }
    }
    Ok(())
}
