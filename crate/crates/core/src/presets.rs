//! Built-in experiments, one or more per statement checked.

use crate::config::{Experiment, ExperimentKind, RawExperiment};

#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub kind: ExperimentKind,
    /// Statement the experiment checks, as cited in reports.
    pub anchor: &'static str,
    pub description: &'static str,
    pub exploratory: bool,
    /// Parameter table in config syntax.
    pub params: &'static str,
}

impl Preset {
    pub fn experiment(&self) -> Experiment {
        let raw = RawExperiment {
            id: self.name.to_string(),
            kind: self.kind.as_str().to_string(),
            anchor: Some(self.anchor.to_string()),
            exploratory: self.exploratory,
            expect: None,
            params: toml::from_str(self.params).expect("preset parameters parse"),
        };
        raw.validate().expect("preset validates")
    }
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "helicoid_rotation",
        kind: ExperimentKind::MinimalSurface,
        anchor: "Theorem 3.1",
        description: "helicoid is invariant under the rotation by pi about the x-axis",
        exploratory: false,
        params: "surface = \"helicoid\"\nline = \"x\"\nsamples = 1000\n",
    },
    Preset {
        name: "disk_map_reflection",
        kind: ExperimentKind::ReflectionIdentity,
        anchor: "Theorem 4.1",
        description: "solved harmonic map disk -> disk with real cubic boundary data commutes with conjugation",
        exploratory: false,
        params: "source = \"chyp_ball:1\"\ntarget = \"chyp_ball:1\"\nsigma1 = \"conjugation\"\nsigma2 = \"conjugation\"\n\
                 boundary_complex = [\"0.5*z + 0.2*z^2 + 0.1*z^3\"]\nregion = \"disk:0.9\"\nresolution = 29\n",
    },
    Preset {
        name: "schwarz_classical",
        kind: ExperimentKind::Schwarz,
        anchor: "Theorem 4.1 (classical Schwarz reflection)",
        description: "odd extension of a half-disk solve: seam residual converges at second order",
        exploratory: false,
        params: "boundary = \"exp(x)*sin(y)\"\nresolutions = [21, 41, 81]\n",
    },
    Preset {
        name: "odd_harmonic_disk",
        kind: ExperimentKind::HarmonicFunction,
        anchor: "Theorem 5.1",
        description: "harmonic function on the hyperbolic disk with odd data sin(theta) is odd",
        exploratory: false,
        params: "space = \"chyp_ball:1\"\nboundary = \"y / sqrt(x^2 + y^2)\"\nresolution = 41\n",
    },
    Preset {
        name: "odd_harmonic_square",
        kind: ExperimentKind::HarmonicFunction,
        anchor: "Theorem 5.1",
        description: "flat square with the odd harmonic polynomial x^3 y - x y^3",
        exploratory: false,
        params: "space = \"euclidean_r:2\"\nregion = \"box\"\nhalf_width = 1.0\nresolution = 21\n\
                 boundary = \"x^3*y - x*y^3\"\nsolver_tol = 1e-12\ntolerance_factor = 1000.0\n",
    },
    Preset {
        name: "vanishing_on_real_form",
        kind: ExperimentKind::HarmonicFunction,
        anchor: "Corollary 6.2",
        description: "harmonic function on the hyperbolic disk vanishing on the real diameter is odd",
        exploratory: false,
        params: "space = \"chyp_ball:1\"\nboundary = \"sin(y)*cosh(x)\"\nresolution = 41\n",
    },
    Preset {
        name: "continuation_flat",
        kind: ExperimentKind::UniqueContinuation,
        anchor: "Theorem 2.3",
        description: "two solves of R^2 -> R from different seeds share Cauchy data and agree",
        exploratory: false,
        params: "target = \"euclidean_r:1\"\nboundary = [\"x*y\"]\nseeds = [\"zero\", \"random:7\"]\nresolution = 15\n\
                 solver_tol = 1e-12\nfield_tol = 1e-9\n",
    },
    Preset {
        name: "continuation_disk",
        kind: ExperimentKind::UniqueContinuation,
        anchor: "Theorem 2.3",
        description: "two nonlinear disk -> disk solves from different seeds agree",
        exploratory: false,
        params: "source = \"euclidean_r:2\"\ntarget = \"chyp_ball:1\"\nregion = \"disk:0.9\"\nhalf_width = 0.9\n\
                 resolution = 17\nboundary_complex = [\"0.5*z + 0.2*z^2\"]\nseeds = [\"mean\", \"random:3\"]\n\
                 solver_tol = 1e-9\nfield_tol = 1e-6\n",
    },
    Preset {
        name: "meromorphic_real",
        kind: ExperimentKind::Meromorphic,
        anchor: "Theorem 6.3 (meromorphic functions)",
        description: "(z^2 + 1)/(z - 2) satisfies f(conj z) = conj f(z)",
        exploratory: false,
        params: "numerator = [1, 0, 1]\ndenominator = [-2, 1]\nsamples = 500\nradius = 3.0\n",
    },
    Preset {
        name: "chain_map_euclidean",
        kind: ExperimentKind::RecursiveReflection,
        anchor: "Theorem 6.3 (holomorphic maps)",
        description: "z1^2 + z2 on the euclidean chain commutes with conjugation level by level",
        exploratory: false,
        params: "family = \"euclidean\"\nn = 2\nmap = [\"z1^2 + z2\"]\ntarget = \"euclidean_c:1\"\n",
    },
    Preset {
        name: "chain_map_hyperbolic",
        kind: ExperimentKind::RecursiveReflection,
        anchor: "Theorem 6.2",
        description: "first-coordinate map of the ball chain into the disk, level by level",
        exploratory: false,
        params: "family = \"hermitian_hyperbolic\"\nn = 2\nmap = [\"z1\"]\ntarget = \"chyp_ball:1\"\n",
    },
    Preset {
        name: "chain_map_projective",
        kind: ExperimentKind::RecursiveReflection,
        anchor: "Corollary 6.3",
        description: "holomorphic function on the projective chart chain (compact case)",
        exploratory: true,
        params: "family = \"complex_projective\"\nn = 2\nmap = [\"z1^2 + z2\"]\ntarget = \"euclidean_c:1\"\n",
    },
    Preset {
        name: "chain_euclidean",
        kind: ExperimentKind::ChainCheck,
        anchor: "Proposition 6.1, row 1",
        description: "euclidean chain: nesting, invariance, hypersurfaces, totally geodesic levels",
        exploratory: false,
        params: "family = \"euclidean\"\nn = 3\n",
    },
    Preset {
        name: "chain_hermitian_hyperbolic",
        kind: ExperimentKind::ChainCheck,
        anchor: "Proposition 6.1, row 2",
        description: "complex hyperbolic ball chain",
        exploratory: false,
        params: "family = \"hermitian_hyperbolic\"\nn = 3\n",
    },
    Preset {
        name: "chain_complex_projective",
        kind: ExperimentKind::ChainCheck,
        anchor: "Proposition 6.1, row 3",
        description: "complex projective chain on the affine chart",
        exploratory: false,
        params: "family = \"complex_projective\"\nn = 3\n",
    },
    Preset {
        name: "chain_quadric_dual",
        kind: ExperimentKind::ChainCheck,
        anchor: "Proposition 6.1, row 4",
        description: "noncompact dual of the hyperquadric, matrix domain chain",
        exploratory: false,
        params: "family = \"quadric_dual\"\nn = 4\nq = 1\n",
    },
    Preset {
        name: "chain_quadric",
        kind: ExperimentKind::ChainCheck,
        anchor: "Proposition 6.1, row 5",
        description: "complex hyperquadric chain on the affine chart",
        exploratory: false,
        params: "family = \"quadric\"\nn = 3\nq = 1\n",
    },
    Preset {
        name: "recursive_table",
        kind: ExperimentKind::Lookup,
        anchor: "Proposition 6.1",
        description: "the five recursive real forms",
        exploratory: false,
        params: "table = \"recursive\"\nexpect_rows = 5\n",
    },
    Preset {
        name: "appendix_lookup",
        kind: ExperimentKind::Lookup,
        anchor: "Appendix, Table B",
        description: "real forms of D III for even n",
        exploratory: false,
        params: "table = \"appendix\"\ntype = \"DIII\"\nn = 4\nexpect_rows = 1\n",
    },
    Preset {
        name: "involution_identities",
        kind: ExperimentKind::Involutions,
        anchor: "Eqs. (6.5)-(6.7), (6.16)-(6.17)",
        description: "sigma_q and tau_q: involutive, anti-holomorphic, fixed sets, projections",
        exploratory: false,
        params: "n_max = 8\nsamples = 500\n",
    },
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Anchor used when a config block does not give one.
pub fn default_anchor(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::ReflectionIdentity => "Theorem 4.1",
        ExperimentKind::Schwarz => "Theorem 4.1 (classical Schwarz reflection)",
        ExperimentKind::HarmonicFunction => "Theorem 5.1",
        ExperimentKind::UniqueContinuation => "Theorem 2.3",
        ExperimentKind::Meromorphic => "Theorem 6.3 (meromorphic functions)",
        ExperimentKind::MinimalSurface => "Theorem 3.1",
        ExperimentKind::RecursiveReflection => "Theorem 6.2",
        ExperimentKind::ChainCheck => "Proposition 6.1",
        ExperimentKind::Lookup => "Appendix, Table B",
        ExperimentKind::Solve => "Equation (2.3)",
        ExperimentKind::Involutions => "Eqs. (6.5)-(6.7), (6.16)-(6.17)",
    }
}
