//! Experiment configuration files.
//!
//! ```toml
//! seed = 42              # optional, default 42
//! parallel = 4           # optional, default: available cores
//! output_dir = "out"     # optional
//! presets = ["all"]      # optional, built-in experiments to include
//!
//! [[experiment]]
//! id = "odd_disk"
//! kind = "harmonic_function"
//! anchor = "Theorem 5.1" # optional for kinds with a default anchor
//! expect = "pass"        # optional, default "pass"
//! exploratory = false    # optional
//!
//! [experiment.params]
//! space = "chyp_ball:1"
//! boundary = "y / sqrt(x^2 + y^2)"
//! ```
//!
//! Every kind has its own parameter table; unknown keys are rejected.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presets;
use crate::report::Status;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("config syntax: {0}")]
    Syntax(String),

    #[error("experiment `{id}`: unknown kind `{kind}` in key `kind`")]
    UnknownKind { id: String, kind: String },

    #[error("experiment `{id}`: {msg}")]
    Invalid { id: String, msg: String },

    #[error("duplicate experiment id `{0}`")]
    DuplicateId(String),

    #[error("unknown preset `{0}` in key `presets`")]
    UnknownPreset(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ReflectionIdentity,
    Schwarz,
    HarmonicFunction,
    UniqueContinuation,
    Meromorphic,
    MinimalSurface,
    RecursiveReflection,
    ChainCheck,
    Lookup,
    Solve,
    Involutions,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::ReflectionIdentity,
        ExperimentKind::Schwarz,
        ExperimentKind::HarmonicFunction,
        ExperimentKind::UniqueContinuation,
        ExperimentKind::Meromorphic,
        ExperimentKind::MinimalSurface,
        ExperimentKind::RecursiveReflection,
        ExperimentKind::ChainCheck,
        ExperimentKind::Lookup,
        ExperimentKind::Solve,
        ExperimentKind::Involutions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ReflectionIdentity => "reflection_identity",
            ExperimentKind::Schwarz => "schwarz",
            ExperimentKind::HarmonicFunction => "harmonic_function",
            ExperimentKind::UniqueContinuation => "unique_continuation",
            ExperimentKind::Meromorphic => "meromorphic",
            ExperimentKind::MinimalSurface => "minimal_surface",
            ExperimentKind::RecursiveReflection => "recursive_reflection",
            ExperimentKind::ChainCheck => "chain_check",
            ExperimentKind::Lookup => "lookup",
            ExperimentKind::Solve => "solve",
            ExperimentKind::Involutions => "involutions",
        }
    }

    pub fn parse(s: &str) -> Option<ExperimentKind> {
        ExperimentKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

mod d {
    pub fn r09() -> f64 {
        0.9
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn two() -> f64 {
        2.0
    }
    pub fn ten() -> f64 {
        10.0
    }
    pub fn pi() -> f64 {
        std::f64::consts::PI
    }
    pub fn yes() -> bool {
        true
    }
    pub fn res21() -> usize {
        21
    }
    pub fn res41() -> usize {
        41
    }
    pub fn n100() -> usize {
        100
    }
    pub fn n200() -> usize {
        200
    }
    pub fn n500() -> usize {
        500
    }
    pub fn n1000() -> usize {
        1000
    }
    pub fn n8() -> usize {
        8
    }
    pub fn disk09() -> String {
        "disk:0.9".into()
    }
    pub fn box_region() -> String {
        "box".into()
    }
    pub fn plane() -> String {
        "euclidean_r:2".into()
    }
    pub fn ball1() -> String {
        "chyp_ball:1".into()
    }
    pub fn c1() -> String {
        "euclidean_c:1".into()
    }
    pub fn conjugation() -> String {
        "conjugation".into()
    }
    pub fn reflect_y() -> String {
        "reflect:1".into()
    }
    pub fn schwarz_data() -> String {
        "exp(x)*sin(y)".into()
    }
    pub fn schwarz_grids() -> Vec<usize> {
        vec![21, 41, 81]
    }
    pub fn band() -> f64 {
        0.45
    }
    pub fn min_order() -> f64 {
        1.9
    }
    pub fn tol9() -> f64 {
        1e-9
    }
    pub fn tol8() -> f64 {
        1e-8
    }
    pub fn tol6() -> f64 {
        1e-6
    }
    pub fn tol12() -> f64 {
        1e-12
    }
    pub fn seeds() -> [String; 2] {
        ["mean".into(), "random:1".into()]
    }
    pub fn helicoid() -> String {
        "helicoid".into()
    }
    pub fn x_axis() -> String {
        "x".into()
    }
    pub fn e1() -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }
    pub fn tilted() -> [f64; 3] {
        [0.0, 0.6, 0.8]
    }
    pub fn unit_den() -> Vec<super::Coefficient> {
        vec![super::Coefficient::Real(1.0)]
    }
    pub fn appendix() -> String {
        "appendix".into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionIdentityParams {
    pub source: String,
    pub target: String,
    pub sigma1: String,
    pub sigma2: String,
    /// Closed-form map, one real expression per target coordinate.
    pub map: Option<Vec<String>>,
    /// Closed-form holomorphic map in `z1, ..., zn`.
    pub holomorphic: Option<Vec<String>>,
    /// Boundary data of a Dirichlet solve whose solution is tested.
    pub boundary: Option<Vec<String>>,
    pub boundary_complex: Option<Vec<String>>,
    #[serde(default = "d::disk09")]
    pub region: String,
    #[serde(default = "d::r09")]
    pub half_width: f64,
    #[serde(default = "d::res41")]
    pub resolution: usize,
    pub solver_tol: Option<f64>,
    pub max_iters: Option<usize>,
    /// Identity tolerance; defaults to 10 x the solver tolerance for solved
    /// maps and 1e-12 for closed-form maps.
    pub tolerance: Option<f64>,
    /// Defaults to the identity tolerance for solved maps and 1e-10 for
    /// closed-form maps.
    pub hypothesis_tol: Option<f64>,
    #[serde(default = "d::n1000")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchwarzParams {
    #[serde(default = "d::schwarz_data")]
    pub boundary: String,
    #[serde(default = "d::r09")]
    pub radius: f64,
    #[serde(default = "d::schwarz_grids")]
    pub resolutions: Vec<usize>,
    /// Seam residual is measured for `|x| <= band`.
    #[serde(default = "d::band")]
    pub band: f64,
    #[serde(default = "d::min_order")]
    pub min_order: f64,
    #[serde(default = "d::tol9")]
    pub solver_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicFunctionParams {
    #[serde(default = "d::ball1")]
    pub space: String,
    #[serde(default = "d::disk09")]
    pub region: String,
    #[serde(default = "d::r09")]
    pub half_width: f64,
    #[serde(default = "d::res41")]
    pub resolution: usize,
    pub boundary: String,
    #[serde(default = "d::reflect_y")]
    pub rho: String,
    #[serde(default = "d::tol8")]
    pub solver_tol: f64,
    #[serde(default = "d::ten")]
    pub tolerance_factor: f64,
    #[serde(default = "d::yes")]
    pub flat_oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniqueContinuationParams {
    #[serde(default = "d::plane")]
    pub source: String,
    pub target: String,
    #[serde(default = "d::box_region")]
    pub region: String,
    #[serde(default = "d::one")]
    pub half_width: f64,
    #[serde(default = "d::res21")]
    pub resolution: usize,
    pub boundary: Option<Vec<String>>,
    pub boundary_complex: Option<Vec<String>>,
    /// Boundary data of the second solve (negative control).
    pub control_boundary: Option<Vec<String>>,
    pub control_boundary_complex: Option<Vec<String>>,
    /// Starting values of the two solves: `mean`, `zero` or `random:SEED`.
    #[serde(default = "d::seeds")]
    pub seeds: [String; 2],
    /// The hypersurface is `x_axis = value`.
    #[serde(default)]
    pub hypersurface_axis: usize,
    #[serde(default)]
    pub hypersurface_value: f64,
    pub solver_tol: Option<f64>,
    pub max_iters: Option<usize>,
    #[serde(default = "d::tol6")]
    pub field_tol: f64,
    #[serde(default = "d::ten")]
    pub ratio_bound: f64,
}

/// A real coefficient, or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeromorphicParams {
    /// Ascending powers.
    pub numerator: Vec<Coefficient>,
    #[serde(default = "d::unit_den")]
    pub denominator: Vec<Coefficient>,
    #[serde(default = "d::n500")]
    pub samples: usize,
    #[serde(default = "d::two")]
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalSurfaceParams {
    /// `helicoid` or `plane`.
    #[serde(default = "d::helicoid")]
    pub surface: String,
    #[serde(default = "d::one")]
    pub c: f64,
    #[serde(default = "d::two")]
    pub u_max: f64,
    #[serde(default = "d::pi")]
    pub v_max: f64,
    #[serde(default = "d::e1")]
    pub plane_a: [f64; 3],
    #[serde(default = "d::tilted")]
    pub plane_b: [f64; 3],
    #[serde(default = "d::x_axis")]
    pub line: String,
    /// Amplitude of a normal bump that breaks the symmetry (control).
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default = "d::n1000")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursiveReflectionParams {
    pub family: String,
    pub n: usize,
    pub q: Option<usize>,
    pub branch: Option<String>,
    /// Holomorphic map in `z1, ..., zn`, one expression per complex target
    /// coordinate.
    pub map: Vec<String>,
    #[serde(default = "d::c1")]
    pub target: String,
    #[serde(default = "d::conjugation")]
    pub sigma2: String,
    #[serde(default = "d::n200")]
    pub samples: usize,
    #[serde(default = "d::tol12")]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainCheckParams {
    pub family: String,
    pub n: usize,
    pub q: Option<usize>,
    pub branch: Option<String>,
    #[serde(default = "d::n100")]
    pub trials: usize,
    /// Replace the levels by a tilted affine plane, which is not totally
    /// geodesic; the drift must then exceed the tolerance.
    #[serde(default)]
    pub negative_control: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LookupParams {
    /// `appendix` (classification rows) or `recursive` (the five chains).
    #[serde(default = "d::appendix")]
    pub table: String,
    /// Domain type for the appendix table: `AIII`, `DIII`, `CI`, `BDI`.
    #[serde(rename = "type")]
    pub domain_type: Option<String>,
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub n: Option<i64>,
    pub k: Option<i64>,
    /// Row index (1-based) for the recursive table; all rows when absent.
    pub row: Option<usize>,
    /// Expected number of matching rows.
    pub expect_rows: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveParams {
    #[serde(default = "d::plane")]
    pub source: String,
    pub target: String,
    #[serde(default = "d::box_region")]
    pub region: String,
    #[serde(default = "d::one")]
    pub half_width: f64,
    #[serde(default = "d::res21")]
    pub resolution: usize,
    pub boundary: Option<Vec<String>>,
    pub boundary_complex: Option<Vec<String>>,
    pub solver_tol: Option<f64>,
    pub max_iters: Option<usize>,
    #[serde(default = "d::n100")]
    pub history_every: usize,
    /// Use the linear Laplace-Beltrami solver (real-valued targets only).
    #[serde(default)]
    pub linear: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionsParams {
    #[serde(default = "d::n8")]
    pub n_max: usize,
    #[serde(default = "d::n500")]
    pub samples: usize,
    /// Shift added to every involution (injected-fault control).
    #[serde(default)]
    pub fault: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Params {
    ReflectionIdentity(ReflectionIdentityParams),
    Schwarz(SchwarzParams),
    HarmonicFunction(HarmonicFunctionParams),
    UniqueContinuation(UniqueContinuationParams),
    Meromorphic(MeromorphicParams),
    MinimalSurface(MinimalSurfaceParams),
    RecursiveReflection(RecursiveReflectionParams),
    ChainCheck(ChainCheckParams),
    Lookup(LookupParams),
    Solve(SolveParams),
    Involutions(InvolutionsParams),
}

impl Params {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Params::ReflectionIdentity(_) => ExperimentKind::ReflectionIdentity,
            Params::Schwarz(_) => ExperimentKind::Schwarz,
            Params::HarmonicFunction(_) => ExperimentKind::HarmonicFunction,
            Params::UniqueContinuation(_) => ExperimentKind::UniqueContinuation,
            Params::Meromorphic(_) => ExperimentKind::Meromorphic,
            Params::MinimalSurface(_) => ExperimentKind::MinimalSurface,
            Params::RecursiveReflection(_) => ExperimentKind::RecursiveReflection,
            Params::ChainCheck(_) => ExperimentKind::ChainCheck,
            Params::Lookup(_) => ExperimentKind::Lookup,
            Params::Solve(_) => ExperimentKind::Solve,
            Params::Involutions(_) => ExperimentKind::Involutions,
        }
    }

    fn parse(id: &str, kind: ExperimentKind, table: toml::Table) -> Result<Params, ConfigError> {
        fn typed<T: DeserializeOwned>(id: &str, table: toml::Table) -> Result<T, ConfigError> {
            table.try_into().map_err(|e: toml::de::Error| ConfigError::Invalid {
                id: id.to_string(),
                msg: format!("params: {}", e.message()),
            })
        }
        let p = match kind {
            ExperimentKind::ReflectionIdentity => Params::ReflectionIdentity(typed(id, table)?),
            ExperimentKind::Schwarz => Params::Schwarz(typed(id, table)?),
            ExperimentKind::HarmonicFunction => Params::HarmonicFunction(typed(id, table)?),
            ExperimentKind::UniqueContinuation => Params::UniqueContinuation(typed(id, table)?),
            ExperimentKind::Meromorphic => Params::Meromorphic(typed(id, table)?),
            ExperimentKind::MinimalSurface => Params::MinimalSurface(typed(id, table)?),
            ExperimentKind::RecursiveReflection => Params::RecursiveReflection(typed(id, table)?),
            ExperimentKind::ChainCheck => Params::ChainCheck(typed(id, table)?),
            ExperimentKind::Lookup => Params::Lookup(typed(id, table)?),
            ExperimentKind::Solve => Params::Solve(typed(id, table)?),
            ExperimentKind::Involutions => Params::Involutions(typed(id, table)?),
        };
        p.validate().map_err(|msg| ConfigError::Invalid { id: id.to_string(), msg })?;
        Ok(p)
    }

    /// Cross-field checks that the schema cannot express.
    fn validate(&self) -> Result<(), String> {
        let one_of = |opts: &[(&str, bool)]| {
            let given: Vec<&str> = opts.iter().filter(|o| o.1).map(|o| o.0).collect();
            if given.len() == 1 {
                Ok(())
            } else {
                let names: Vec<&str> = opts.iter().map(|o| o.0).collect();
                Err(format!("params: give exactly one of {}", names.join(", ")))
            }
        };
        match self {
            Params::ReflectionIdentity(p) => one_of(&[
                ("map", p.map.is_some()),
                ("holomorphic", p.holomorphic.is_some()),
                ("boundary", p.boundary.is_some()),
                ("boundary_complex", p.boundary_complex.is_some()),
            ]),
            Params::UniqueContinuation(p) => {
                one_of(&[("boundary", p.boundary.is_some()), ("boundary_complex", p.boundary_complex.is_some())])?;
                if p.control_boundary.is_some() && p.control_boundary_complex.is_some() {
                    return Err("params: give at most one of control_boundary, control_boundary_complex".into());
                }
                Ok(())
            }
            Params::Solve(p) => {
                one_of(&[("boundary", p.boundary.is_some()), ("boundary_complex", p.boundary_complex.is_some())])
            }
            Params::Schwarz(p) if p.resolutions.len() < 2 => {
                Err("params: `resolutions` needs at least two grids".into())
            }
            Params::Meromorphic(p) if p.numerator.is_empty() || p.denominator.is_empty() => {
                Err("params: `numerator` and `denominator` need coefficients".into())
            }
            Params::Lookup(p) => match p.table.as_str() {
                "appendix" if p.domain_type.is_none() => Err("params: the appendix table needs `type`".into()),
                "appendix" | "recursive" => Ok(()),
                other => Err(format!("params: unknown table `{other}` (appendix, recursive)")),
            },
            _ => Ok(()),
        }
    }
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Experiment {
    pub id: String,
    pub anchor: String,
    pub exploratory: bool,
    /// Conclusion this experiment is expected to reach; negative controls
    /// expect `fail` or `not_applicable`.
    pub expect: Status,
    #[serde(flatten)]
    pub params: Params,
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        self.params.kind()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub parallel: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub experiments: Vec<Experiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    parallel: Option<usize>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    presets: Vec<String>,
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

/// An experiment block before its parameters are validated.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExperiment {
    pub id: String,
    pub kind: String,
    pub anchor: Option<String>,
    #[serde(default)]
    pub exploratory: bool,
    pub expect: Option<String>,
    #[serde(default)]
    pub params: toml::Table,
}

impl RawExperiment {
    pub fn validate(self) -> Result<Experiment, ConfigError> {
        let id = self.id;
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(ConfigError::Invalid {
                id,
                msg: "key `id` may only use letters, digits, `_`, `-` and `.`".into(),
            });
        }
        let kind = ExperimentKind::parse(&self.kind)
            .ok_or_else(|| ConfigError::UnknownKind { id: id.clone(), kind: self.kind.clone() })?;
        let expect = match self.expect.as_deref() {
            None => Status::Pass,
            Some(s) => Status::parse(s).ok_or_else(|| ConfigError::Invalid {
                id: id.clone(),
                msg: format!("key `expect`: unknown status `{s}`"),
            })?,
        };
        let params = Params::parse(&id, kind, self.params)?;
        let anchor = self.anchor.unwrap_or_else(|| presets::default_anchor(kind).to_string());
        Ok(Experiment { id, anchor, exploratory: self.exploratory, expect, params })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut experiments = Vec::new();
        for name in &raw.presets {
            if name == "all" {
                for p in presets::presets() {
                    experiments.push(p.experiment());
                }
            } else {
                let p = presets::find(name).ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?;
                experiments.push(p.experiment());
            }
        }
        for e in raw.experiment {
            experiments.push(e.validate()?);
        }
        let mut seen = HashSet::new();
        for e in &experiments {
            if !seen.insert(e.id.as_str()) {
                return Err(ConfigError::DuplicateId(e.id.clone()));
            }
        }
        Ok(RunConfig {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            parallel: raw.parallel,
            output_dir: raw.output_dir,
            experiments,
        })
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        RunConfig::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert!(c.experiments.is_empty());
    }

    #[test]
    fn full_block() {
        let c = RunConfig::parse(
            r#"
            seed = 7
            parallel = 2
            [[experiment]]
            id = "m"
            kind = "meromorphic"
            expect = "not_applicable"
            [experiment.params]
            numerator = [0, [0.0, 1.0]]
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.parallel, Some(2));
        let e = &c.experiments[0];
        assert_eq!(e.expect, Status::NotApplicable);
        assert_eq!(e.kind(), ExperimentKind::Meromorphic);
        match &e.params {
            Params::Meromorphic(p) => {
                assert_eq!(p.numerator, vec![Coefficient::Real(0.0), Coefficient::Complex([0.0, 1.0])]);
                assert_eq!(p.samples, 500);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_kind_names_the_key() {
        let e = RunConfig::parse("[[experiment]]\nid = \"a\"\nkind = \"teleport\"\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKind { .. }));
        let msg = e.to_string();
        assert!(msg.contains("`kind`") && msg.contains("teleport"), "{msg}");
    }

    #[test]
    fn unknown_param_names_the_key() {
        let e = RunConfig::parse(
            "[[experiment]]\nid = \"a\"\nkind = \"schwarz\"\n[experiment.params]\nradus = 1.0\n",
        )
        .unwrap_err();
        assert!(e.to_string().contains("radus"), "{e}");
    }

    #[test]
    fn missing_param_names_the_key() {
        let e = RunConfig::parse("[[experiment]]\nid = \"a\"\nkind = \"harmonic_function\"\n").unwrap_err();
        assert!(e.to_string().contains("boundary"), "{e}");
    }

    #[test]
    fn structural_errors() {
        let dup = "[[experiment]]\nid = \"a\"\nkind = \"involutions\"\n[[experiment]]\nid = \"a\"\nkind = \"involutions\"\n";
        assert!(matches!(RunConfig::parse(dup), Err(ConfigError::DuplicateId(_))));
        assert!(matches!(RunConfig::parse("presets = [\"nope\"]"), Err(ConfigError::UnknownPreset(_))));
        assert!(matches!(RunConfig::parse("sed = 1"), Err(ConfigError::Syntax(_))));
        let two_maps = "[[experiment]]\nid = \"a\"\nkind = \"reflection_identity\"\n[experiment.params]\nsource = \"euclidean_c:1\"\ntarget = \"euclidean_c:1\"\nsigma1 = \"conjugation\"\nsigma2 = \"conjugation\"\nmap = [\"x\", \"y\"]\nholomorphic = [\"z\"]\n";
        assert!(matches!(RunConfig::parse(two_maps), Err(ConfigError::Invalid { .. })));
        let bad_id = "[[experiment]]\nid = \"a/b\"\nkind = \"involutions\"\n";
        assert!(matches!(RunConfig::parse(bad_id), Err(ConfigError::Invalid { .. })));
        let bad_expect = "[[experiment]]\nid = \"a\"\nkind = \"involutions\"\nexpect = \"win\"\n";
        assert!(RunConfig::parse(bad_expect).unwrap_err().to_string().contains("expect"));
    }

    #[test]
    fn presets_expand_in_order() {
        let c = RunConfig::parse("presets = [\"all\"]").unwrap();
        assert_eq!(c.experiments.len(), presets::presets().len());
        assert!(c.experiments.iter().all(|e| !e.anchor.is_empty()));
    }
}
