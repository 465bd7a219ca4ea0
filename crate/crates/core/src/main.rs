use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reflectlab::config::{
    ChainCheckParams, Experiment, InvolutionsParams, LookupParams, Params, RunConfig, SolveParams, DEFAULT_SEED,
};
use reflectlab::presets;
use reflectlab::report::Status;
use reflectlab::runner::{self, RunOptions, RunSummary};

/// Numerical checks of reflection principles for harmonic maps.
#[derive(Parser)]
#[command(name = "reflectlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory (REFLECTLAB_OUT takes precedence).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    parallel: Option<usize>,
    /// Solver tolerance for every experiment that solves.
    #[arg(long)]
    tol: Option<f64>,
    /// Record wall-clock times in the reports and the summary.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in experiments.
    List,
    /// Solve a Dirichlet problem and write the map and its history.
    Solve {
        #[arg(long, default_value = "euclidean_r:2")]
        source: String,
        #[arg(long)]
        target: String,
        /// Real boundary expression, one per target coordinate.
        #[arg(long)]
        boundary: Vec<String>,
        /// Complex boundary expression, one per complex target coordinate.
        #[arg(long)]
        boundary_complex: Vec<String>,
        #[arg(long, default_value = "box")]
        region: String,
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Linear solver for real-valued targets.
        #[arg(long)]
        linear: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a recursive real-form chain.
    ChainCheck {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        branch: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Check a tilted plane instead; it should fail.
        #[arg(long)]
        negative_control: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Look up real forms in the classification tables.
    Lookup {
        /// Domain type: AIII, DIII, BDI, CI.
        #[arg(long = "type")]
        domain_type: Option<String>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        /// Use the table of recursive real forms.
        #[arg(long)]
        recursive: bool,
        #[arg(long)]
        row: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the sigma_q and tau_q identities and fixed sets.
    VerifyInvolutions {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn single(id: &str, params: Params) -> RunConfig {
    let kind = params.kind();
    RunConfig {
        seed: DEFAULT_SEED,
        parallel: None,
        output_dir: None,
        experiments: vec![Experiment {
            id: id.to_string(),
            anchor: presets::default_anchor(kind).to_string(),
            exploratory: false,
            expect: Status::Pass,
            params,
        }],
    }
}

fn out_dir(common: &Common, config: &RunConfig) -> Option<PathBuf> {
    match std::env::var_os("REFLECTLAB_OUT") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => common.out.clone().or_else(|| config.output_dir.clone()),
    }
}

/// What to print under each result line.
#[derive(Clone, Copy, PartialEq)]
enum Detail {
    None,
    Notes,
    Artifacts,
}

fn print_summary(summary: &RunSummary, detail: Detail) {
    for r in &summary.results {
        let e = &r.experiment;
        let mark = if r.as_expected() {
            "ok"
        } else if e.exploratory {
            "--"
        } else {
            "XX"
        };
        match &r.outcome {
            Ok(rep) => {
                let head = rep
                    .headline_stat()
                    .map(|(n, s)| format!("{n} = {:.3e} (tol {:.1e})", s.max, s.tolerance))
                    .unwrap_or_default();
                println!("{mark} {:<30} {:<15} {head}", e.id, rep.conclusion.as_str());
                match detail {
                    Detail::None => {}
                    Detail::Notes => {
                        for n in &rep.notes {
                            println!("   {n}");
                        }
                    }
                    Detail::Artifacts => {
                        for a in &r.artifacts {
                            print!("{}", a.contents);
                        }
                    }
                }
            }
            Err(err) => println!("{mark} {:<30} {:<15} {err}", e.id, "error"),
        }
    }
}

fn execute(config: RunConfig, common: &Common, default_out: Option<&str>, detail: Detail) -> ExitCode {
    let opts = RunOptions { seed: common.seed, parallel: common.parallel, tol: common.tol, timings: common.timings };
    let summary = runner::run(&config, &opts);
    print_summary(&summary, detail);
    let dir = out_dir(common, &config).or_else(|| default_out.map(PathBuf::from));
    if let Some(dir) = dir {
        if let Err(e) = runner::write_outputs(&dir, &summary) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(1);
        }
        println!("outputs written to {}", dir.display());
    }
    ExitCode::from(summary.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, common } => match RunConfig::load(&config) {
            Ok(cfg) => execute(cfg, &common, Some("out"), Detail::None),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::List => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{:<28} {:<21} {:<44} description", "name", "kind", "anchor");
            for p in presets::presets() {
                let tag = if p.exploratory { " [exploratory]" } else { "" };
                // a closed pipe is not an error worth reporting
                if writeln!(out, "{:<28} {:<21} {:<44} {}{tag}", p.name, p.kind.as_str(), p.anchor, p.description).is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Solve {
            source,
            target,
            boundary,
            boundary_complex,
            region,
            half_width,
            resolution,
            max_iters,
            linear,
            common,
        } => {
            let params = SolveParams {
                source,
                target,
                region,
                half_width,
                resolution,
                boundary: (!boundary.is_empty()).then_some(boundary),
                boundary_complex: (!boundary_complex.is_empty()).then_some(boundary_complex),
                solver_tol: None,
                max_iters,
                history_every: 100,
                linear,
            };
            execute(single("solve", Params::Solve(params)), &common, Some("out"), Detail::Notes)
        }
        Command::ChainCheck { family, n, q, branch, trials, negative_control, common } => {
            let params = ChainCheckParams { family, n, q, branch, trials, negative_control };
            execute(single("chain_check", Params::ChainCheck(params)), &common, None, Detail::Notes)
        }
        Command::Lookup { domain_type, p, q, n, k, recursive, row, common } => {
            let params = LookupParams {
                table: if recursive { "recursive".into() } else { "appendix".into() },
                domain_type,
                p,
                q,
                n,
                k,
                row,
                expect_rows: None,
            };
            if !recursive && params.domain_type.is_none() {
                eprintln!("error: lookup needs --type or --recursive");
                return ExitCode::from(2);
            }
            execute(single("lookup", Params::Lookup(params)), &common, None, Detail::Artifacts)
        }
        Command::VerifyInvolutions { n_max, samples, common } => {
            let params = InvolutionsParams { n_max, samples, fault: 0.0 };
            execute(single("involutions", Params::Involutions(params)), &common, None, Detail::Notes)
        }
    }
}
