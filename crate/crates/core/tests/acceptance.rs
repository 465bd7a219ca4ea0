//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use approx::abs_diff_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reflectlab::config::RunConfig;
use reflectlab::geometry::ModelSpace;
use reflectlab::harness::{
    meromorphic_reflection_check, minimal_surface_reflection_check, parse_involution,
    verify_harmonic_function_reflection, BumpedSurface, HarmonicFunctionSetup, Helicoid, Line, RationalFunction,
};
use reflectlab::involution::registry::{appendix_rows, lookup_real_forms, recursive_row, recursive_rows, DomainType, LookupParams};
use reflectlab::involution::{algebraic_identity_suite, fixed_set_suite};
use reflectlab::report::{Status, VerificationReport};
use reflectlab::runner::{self, RunOptions, RunSummary};
use reflectlab::solver::{laplace_beltrami_solve, solve_dirichlet, tension, DiscreteMap, GridDomain, LinearOptions, Region, SolveOptions};

/// Failed checks of one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    facts: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn fact(&mut self, s: impl Into<String>) {
        self.facts.push(s.into());
    }
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_text(text: &str) -> RunSummary {
    let cfg = RunConfig::parse(text).expect("config parses");
    runner::run(&cfg, &RunOptions::default())
}

fn report<'a>(s: &'a RunSummary, id: &str) -> Option<&'a VerificationReport> {
    s.results.iter().find(|r| r.experiment.id == id).and_then(|r| r.outcome.as_ref().ok())
}

/// Largest `max / tolerance` over the residuals of a report.
fn worst_ratio(r: &VerificationReport) -> f64 {
    r.residuals.values().map(|s| s.ratio()).filter(|x| !x.is_nan()).fold(0.0, f64::max)
}

fn c1_algebraic(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = algebraic_identity_suite(8, 100, 0.0, &mut rng);
    c.check(r.conclusion == Status::Pass, format!("conclusion {}", r.conclusion.as_str()));
    for name in ["sigma_involutive", "sigma_anticommutes_j", "tau_involutive", "tau_antilinear", "projections"] {
        match r.residual(name) {
            Some(s) => c.check(s.max == 0.0 && s.count > 0, format!("{name} max {:e}", s.max)),
            None => c.check(false, format!("{name} missing")),
        }
    }
    c.fact(format!("{} residual samples, all exactly 0", r.residuals.values().map(|s| s.count).sum::<usize>()));
}

fn c2_fixed_sets(c: &mut Checks) {
    let r = fixed_set_suite(8, 500, 0.0, 2);
    c.check(r.conclusion == Status::Pass, format!("conclusion {}", r.conclusion.as_str()));
    for name in ["fixed_set", "eigen", "involutivity"] {
        c.check(r.residual(name).is_some_and(|s| s.passes() && s.count > 0), format!("{name} fails or missing"));
    }
    c.fact(format!("fixed_set max {:.1e}, eigen max {:.1e}", r.max_of("fixed_set"), r.max_of("eigen")));
}

fn c3_chains(c: &mut Checks) {
    let mut text = String::new();
    let mut block = |id: &str, params: &str| {
        text.push_str(&format!("[[experiment]]\nid = \"{id}\"\nkind = \"chain_check\"\n[experiment.params]\n{params}\ntrials = 100\n\n"));
    };
    block("euclidean", "family = \"euclidean\"\nn = 3");
    block("hyperbolic", "family = \"hermitian_hyperbolic\"\nn = 3");
    block("projective", "family = \"complex_projective\"\nn = 3");
    for q in 0..=2 {
        block(&format!("quadric_dual_q{q}"), &format!("family = \"quadric_dual\"\nn = 4\nq = {q}"));
    }
    for q in 1..=3 {
        for br in ["v1", "v2"] {
            block(&format!("quadric_q{q}_{br}"), &format!("family = \"quadric\"\nn = 3\nq = {q}\nbranch = \"{br}\""));
        }
    }
    block("tilted_hyperbolic", "family = \"hermitian_hyperbolic\"\nn = 3\nnegative_control = true");
    block("tilted_projective", "family = \"complex_projective\"\nn = 3\nnegative_control = true");
    let s = run_text(&text);
    let mut drift = 0.0f64;
    for res in &s.results {
        let id = &res.experiment.id;
        let Ok(r) = &res.outcome else {
            c.check(false, format!("{id}: {}", res.status()));
            continue;
        };
        if id.starts_with("tilted") {
            let d = r.max_of("control_drift");
            c.check(d > 1e-3, format!("{id}: control drift {d:e}"));
            c.fact(format!("{id} drift {d:.1e}"));
            continue;
        }
        c.check(r.conclusion == Status::Pass, format!("{id}: {}", r.conclusion.as_str()));
        for k in 1..=3 {
            for check in ["nesting", "sigma_invariance", "hypersurface_rank"] {
                let name = format!("{check}_L{k}");
                if check == "nesting" && k == 3 && !id.starts_with("quadric_dual") {
                    continue;
                }
                c.check(r.residual(&name).is_some(), format!("{id}: {name} missing"));
            }
        }
        for (name, stat) in &r.residuals {
            if name.starts_with("drift_L") {
                drift = drift.max(stat.max);
                c.check(stat.max < 1e-6 && stat.count >= 100, format!("{id}: {name} {:e}", stat.max));
            }
        }
    }
    let hyp = report(&s, "hyperbolic");
    c.check(hyp.is_some_and(|r| r.residual("drift_L1").is_some()), "hyperbolic chain has no geodesic drift check");
    c.fact(format!("{} chains, max geodesic drift {drift:.1e}", s.results.len() - 2));
}

fn c4_solver(c: &mut Checks) {
    let plane = ModelSpace::euclidean_real(2);
    let line = ModelSpace::euclidean_real(1);
    let grid = Arc::new(GridDomain::centered(plane, 1.0, 21, Region::Box).unwrap());
    let exact: [(&str, fn(&[f64]) -> f64); 3] =
        [("xy", |x| x[0] * x[1]), ("x^2 - y^2", |x| x[0] * x[0] - x[1] * x[1]), ("constant", |_| 0.7)];
    let mut worst = 0.0f64;
    for (name, f) in exact {
        let descent = solve_dirichlet(grid.clone(), line, |x| vec![f(x)], &SolveOptions::with_tol(1e-12));
        let linear = laplace_beltrami_solve(grid.clone(), f, &LinearOptions { tol: 1e-12, max_iters: None });
        for (method, out) in [("descent", descent), ("linear", linear)] {
            let Ok(out) = out else {
                c.check(false, format!("{name} {method}: solve failed"));
                continue;
            };
            for n in grid.active_nodes() {
                let (got, want) = (out.map.value(n)[0], f(&grid.coords_vec(n)));
                worst = worst.max((got - want).abs());
                c.check(abs_diff_eq!(got, want, epsilon = 1e-10), format!("{name} {method} node {n}: {got} vs {want}"));
            }
        }
    }
    c.fact(format!("stencil-exact error {worst:.1e}"));

    // z^2 into the Poincare disk is holomorphic, hence harmonic. The error is
    // compared on the nodes the three grids share.
    let disk = ModelSpace::ball(1);
    let coarse = GridDomain::centered(plane, 0.5, 21, Region::Box).unwrap();
    let shared: Vec<Vec<f64>> = coarse.interior_nodes().map(|n| coarse.coords_vec(n)).collect();
    let mut rows = Vec::new();
    for res in [21, 41, 81] {
        let g = Arc::new(GridDomain::centered(plane, 0.5, res, Region::Box).unwrap());
        let h = DiscreteMap::from_fn(g.clone(), disk, |x| vec![x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1]]).unwrap();
        let t = tension(&h).unwrap();
        let max = shared
            .iter()
            .map(|x| {
                let n = g.node_near(x, 1e-9).expect("nested grids");
                t.field[2 * n].hypot(t.field[2 * n + 1])
            })
            .fold(0.0, f64::max);
        rows.push((g.spacing()[0], max));
    }
    for w in rows.windows(2) {
        let order = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        c.check(order >= 1.9, format!("z^2 tension order {order:.3}"));
        c.fact(format!("order {order:.2}"));
    }

    let setup = HarmonicFunctionSetup {
        id: "flat_oracle".into(),
        space: disk,
        region: Region::Disk { radius: 0.9 },
        half_width: 0.9,
        resolution: 41,
        rho: parse_involution("reflect:1", &disk).unwrap(),
        solver_tol: 1e-10,
        tolerance_factor: 10.0,
        flat_oracle: true,
    };
    let r = verify_harmonic_function_reflection(&setup, |x| x[0] * x[0] - x[1] * x[1] + x[0]).unwrap();
    let d = r.max_of("flat_oracle");
    c.check(d < 1e-8, format!("flat oracle {d:e}"));
    c.fact(format!("flat oracle {d:.1e}"));
}

fn c5_reflection(c: &mut Checks) {
    let mut cfg = RunConfig::load(&config_path("full.toml")).expect("full config loads");
    cfg.experiments.retain(|e| {
        e.id.starts_with("control_") || ["odd_harmonic_disk", "schwarz_classical", "disk_map_reflection"].contains(&e.id.as_str())
    });
    let s = runner::run(&cfg, &RunOptions::default());

    let odd = report(&s, "odd_harmonic_disk");
    let v = odd.map_or(f64::NAN, |r| r.max_of("odd_reflection"));
    c.check(v < 10.0 * 1e-8, format!("odd harmonic residual {v:e}"));
    let order_gap = report(&s, "schwarz_classical").map_or(f64::NAN, |r| r.max_of("order_gap"));
    c.check(order_gap == 0.0, format!("Schwarz order short of 1.9 by {order_gap}"));
    let disk = report(&s, "disk_map_reflection");
    let v2 = disk.map_or(f64::NAN, |r| r.max_of("reflection"));
    c.check(v2 < 10.0 * 1e-6, format!("disk map residual {v2:e}"));
    c.fact(format!("odd {v:.1e}, disk map {v2:.1e}"));

    let mut weakest = f64::INFINITY;
    for res in s.results.iter().filter(|r| r.experiment.id.starts_with("control_")) {
        let id = &res.experiment.id;
        c.check(res.as_expected(), format!("{id}: {} (want {})", res.status(), res.experiment.expect.as_str()));
        if let Ok(r) = &res.outcome {
            let ratio = worst_ratio(r);
            weakest = weakest.min(ratio);
            c.check(ratio >= 100.0, format!("{id}: fails by only {ratio:.1}x tolerance"));
        }
    }
    c.fact(format!("controls fail by >= {weakest:.1e}x"));
}

fn c6_meromorphic(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases: [(&[f64], &[f64]); 3] = [(&[1.0, 0.0, 1.0], &[-2.0, 1.0]), (&[0.0, 1.0], &[1.0, 0.0, 1.0]), (&[1.0, -3.0, 0.0, 2.0], &[1.0])];
    let mut worst = 0.0f64;
    for (num, den) in cases {
        let f = RationalFunction::real(num, den).unwrap();
        let r = meromorphic_reflection_check("real", &f, 500, 2.0, &mut rng).unwrap();
        let v = r.max_of("reflection");
        worst = worst.max(v);
        c.check(r.conclusion == Status::Pass && v < 1e-12, format!("{num:?}/{den:?}: {v:e}"));
        c.check(r.residual("reflection").is_some_and(|s| s.count == 500), "sample count");
    }
    let iz = RationalFunction::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let r = meromorphic_reflection_check("iz", &iz, 500, 2.0, &mut rng).unwrap();
    c.check(r.conclusion == Status::NotApplicable && !r.hypotheses_hold(), format!("i z: {}", r.conclusion.as_str()));
    c.fact(format!("real rationals {worst:.1e}, i z {}", r.conclusion.as_str()));
}

fn c7_minimal(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = Line::parse("x").unwrap();
    let r = minimal_surface_reflection_check("helicoid", &Helicoid::default(), &x, 1000, &mut rng).unwrap();
    let s = r.residual("closed_form_distance");
    c.check(s.is_some_and(|s| s.max == 0.0 && s.count == 1000), "helicoid distance not exactly 0");
    let bumped = BumpedSurface { inner: Box::new(Helicoid::default()), eps: 1e-3 };
    let r = minimal_surface_reflection_check("bumped", &bumped, &x, 200, &mut rng).unwrap();
    c.check(r.conclusion == Status::Fail, format!("bump: {}", r.conclusion.as_str()));
    c.fact(format!("bump distance {:.1e}", r.max_of("search_distance")));
}

fn c8_continuation(c: &mut Checks) {
    let mut cfg = RunConfig::load(&config_path("full.toml")).expect("full config loads");
    cfg.experiments
        .retain(|e| ["continuation_flat", "continuation_disk", "control_continuation_other_data"].contains(&e.id.as_str()));
    let s = runner::run(&cfg, &RunOptions::default());
    for id in ["continuation_flat", "continuation_disk"] {
        let d = report(&s, id).map_or(f64::NAN, |r| r.max_of("field_distance"));
        c.check(d < 1e-6, format!("{id}: field distance {d:e}"));
        c.fact(format!("{id} {d:.1e}"));
    }
    let ctl = report(&s, "control_continuation_other_data");
    let d = ctl.map_or(f64::NAN, |r| r.max_of("field_distance"));
    c.check(d >= 0.5, format!("control field distance {d:e}"));
    c.check(ctl.is_some_and(|r| r.conclusion != Status::Pass), "control passed");
    c.fact(format!("control {d:.2}"));
}

fn norm(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '−' { '-' } else { c }).collect()
}

fn c9_registry(c: &mut Checks) {
    // (type, query, condition, real forms) as printed in the classification table
    let appendix: [(&str, LookupParams, &str, &[&str]); 9] = [
        ("A III", LookupParams { p: Some(1), q: Some(2), ..Default::default() }, "p = q = 1 or p < q; p, q not both even", &["SO(p,q)/SO(p)×SO(q)"]),
        ("A III", LookupParams { p: Some(2), q: Some(4), ..Default::default() }, "p = q = 1 or p < q; p, q both even", &["SO(p,q)/SO(p)×SO(q)", "Sp(p/2,q/2)/Sp(p/2)×Sp(q/2)"]),
        ("A III", LookupParams { p: Some(3), q: Some(3), ..Default::default() }, "p = q > 1; p odd", &["SO(p,p)/SO(p)×SO(p)", "SL(p,C)×R"]),
        ("A III", LookupParams { p: Some(2), q: Some(2), ..Default::default() }, "p = q > 1; p even", &["SO(p,p)/SO(p)×SO(p)", "SL(p,C)×R", "Sp(p/2,p/2)/Sp(p/2)×Sp(p/2)"]),
        ("D III", LookupParams { n: Some(5), ..Default::default() }, "n odd", &["SO(n,C)"]),
        ("D III", LookupParams { n: Some(4), ..Default::default() }, "n even", &["SO(n,C)", "[SU*(n)/Sp(n/2)]×R"]),
        ("BD I", LookupParams { p: Some(5), k: Some(2), ..Default::default() }, "0 ≤ k ≤ [p/2]", &["[SO(1,k)/SO(1)×SO(k)]×[SO(1,p−k+1)/SO(1)×SO(p−k+1)]"]),
        ("C I", LookupParams { n: Some(3), ..Default::default() }, "n odd", &["[SL(n,R)/SO(n)]×R"]),
        ("C I", LookupParams { n: Some(2), ..Default::default() }, "n even", &["[SL(n,R)/SO(n)]×R", "Sp(n/2,C)"]),
    ];
    c.check(appendix_rows().len() == 9, format!("{} classification rows", appendix_rows().len()));
    for (ty, query, cond, symbols) in appendix {
        let rows = lookup_real_forms(DomainType::parse(ty).unwrap(), &query).unwrap();
        c.check(rows.len() == 1, format!("{ty} {query:?}: {} rows", rows.len()));
        if let Some(row) = rows.first() {
            c.check(norm(&row.condition) == norm(cond), format!("{ty}: condition {}", row.condition));
            let got: Vec<String> = row.symbols.iter().map(|s| norm(s)).collect();
            let want: Vec<String> = symbols.iter().map(|s| norm(s)).collect();
            c.check(got == want, format!("{ty} {cond}: {got:?}"));
        }
    }
    let recursive: [(&str, &str, &str); 5] = [
        ("Euclidean", "C^n", "R^n"),
        ("Hermitian Hyperbolic", "SU(1,n)/S(U(1)×U(n))", "SO(1,n)/SO(n)"),
        ("Complex Projective Space", "SU(1+n)/S(U(1)×U(n))", "SO(1+n)/SO(n)"),
        ("Noncompact dual of Complex Hyperquadric", "SO(2,n)/SO(2)×SO(n)", "[SO(1,q)/SO(1)×SO(q)]×[SO(1,n−q)/SO(1)×SO(n−q)]"),
        ("Complex Hyperquadric", "SO(2+n)/SO(2)×SO(n)", "[SO(1+q)/SO(1)×SO(q)]×[SO(1+n−q)/SO(1)×SO(n−q)]"),
    ];
    c.check(recursive_rows().len() == 5, format!("{} recursive rows", recursive_rows().len()));
    for (i, (name, space, form)) in recursive.iter().enumerate() {
        match recursive_row(i + 1) {
            Ok(r) => c.check(
                r.type_name == *name && norm(&r.hermitian_space) == norm(space) && norm(&r.real_form) == norm(form),
                format!("recursive row {}: {r:?}", i + 1),
            ),
            Err(e) => c.check(false, format!("recursive row {}: {e}", i + 1)),
        }
    }
    let s = run_text(
        "presets = [\"recursive_table\", \"appendix_lookup\"]\n",
    );
    c.check(s.exit_code() == 0, "lookup presets did not pass");
    c.fact("9 classification rows, 5 recursive rows");
}

fn c10_determinism(c: &mut Checks) {
    let cfg = RunConfig::load(&config_path("full.toml")).expect("full config loads");
    let opts = RunOptions { seed: Some(42), ..Default::default() };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut tables = Vec::new();
    for d in &dirs {
        let s = runner::run(&cfg, &opts);
        runner::write_outputs(d.path(), &s).unwrap();
        c.check(s.exit_code() == 0, "full config does not exit 0");
        tables.push(std::fs::read(d.path().join("summary.csv")).unwrap());
    }
    c.check(tables[0] == tables[1], "summary tables differ");
    c.fact(format!("{} bytes, {} rows", tables[0].len(), tables[0].iter().filter(|&&b| b == b'\n').count() - 1));
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Option<u64>, fn(&mut Checks));
    let criteria: [Criterion; 10] = [
        (1, "algebraic identities", Some(1), c1_algebraic),
        (2, "fixed sets", Some(5), c2_fixed_sets),
        (3, "recursive chains", Some(60), c3_chains),
        (4, "solver oracles", Some(120), c4_solver),
        (5, "reflection suite", Some(300), c5_reflection),
        (6, "meromorphic functions", Some(1), c6_meromorphic),
        (7, "minimal surfaces", Some(1), c7_minimal),
        (8, "unique continuation", Some(120), c8_continuation),
        (9, "registry", None, c9_registry),
        (10, "determinism", None, c10_determinism),
    ];
    let mut all = true;
    for (n, name, limit, f) in criteria {
        let mut c = Checks::default();
        let t = Instant::now();
        f(&mut c);
        let elapsed = t.elapsed();
        if let Some(l) = limit {
            c.check(elapsed <= Duration::from_secs(l), format!("took {:.2}s, limit {l}s", elapsed.as_secs_f64()));
        }
        let ok = c.failures.is_empty();
        all &= ok;
        let limit = limit.map(|l| format!(" / {l}s")).unwrap_or_default();
        println!(
            "criterion {n:>2} {name:<22} {} {:>8.2}s{limit:<6} {}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.facts.join("; ")
        );
        for f in c.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
