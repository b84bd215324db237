//! Experiment configuration: a JSON document whose missing keys take the
//! defaults of the chosen experiment, with command-line overrides on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Polygon, TauRule};
use crate::linsolve::{Method, SolverConfig};
use crate::mesh::{Point, Rect};
use crate::scheme::{Params, SchemeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Converge,
    Coarsen,
    Relax,
    Stability,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Converge => "converge",
            ExperimentKind::Coarsen => "coarsen",
            ExperimentKind::Relax => "relax",
            ExperimentKind::Stability => "stability",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converge" => Ok(ExperimentKind::Converge),
            "coarsen" => Ok(ExperimentKind::Coarsen),
            "relax" => Ok(ExperimentKind::Relax),
            "stability" => Ok(ExperimentKind::Stability),
            other => Err(Error::Config(format!("unknown experiment kind '{other}'"))),
        }
    }
}

/// Physical constants; any subset may be given.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalOverrides {
    pub mobility: Option<f64>,
    pub lambda: Option<f64>,
    pub nu: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub rel_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub method: Option<Method>,
}

/// The document as written; every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<ExperimentKind>,
    pub nx: Option<Vec<usize>>,
    pub tau: Option<f64>,
    pub tau_rule: Option<TauRule>,
    pub taus: Option<Vec<f64>>,
    pub t_final: Option<f64>,
    pub params: Option<PhysicalOverrides>,
    pub seed: Option<u64>,
    pub snapshot_times: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub solver: Option<SolverOverrides>,
    pub strict_root: Option<bool>,
    pub polygon: Option<Vec<Point>>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub nx: Option<Vec<usize>>,
    pub tau: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Physical constants, the time step (unused by `converge`, which
    /// follows `tau_rule`) and the final time.
    pub params: Params,
    /// Levels for `converge`; a single mesh otherwise.
    pub nx: Vec<usize>,
    pub tau_rule: TauRule,
    /// Time steps of a `stability` sweep.
    pub taus: Vec<f64>,
    pub seed: u64,
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub solver: SolverConfig,
    pub strict_root: bool,
    pub polygon: Polygon,
}

pub const COARSENING_SNAPSHOTS: [f64; 8] = [0.001, 0.05, 0.1, 0.15, 0.3, 1.0, 3.0, 5.0];
/// Union of the two lists given for the relaxation figure.
pub const RELAXATION_SNAPSHOTS: [f64; 9] = [0.0, 0.01, 0.02, 0.05, 0.08, 0.1, 0.2, 0.3, 0.5];
pub const STABILITY_TAUS: [f64; 3] = [1e-3, 1e-2, 1e-1];

impl ExperimentConfig {
    /// Defaults of each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (params, nx, snapshots) = match kind {
            ExperimentKind::Converge => (Params::convergence_preset(), vec![4, 8, 16], vec![]),
            ExperimentKind::Coarsen => (
                Params::coarsening_preset(),
                vec![64],
                COARSENING_SNAPSHOTS.to_vec(),
            ),
            ExperimentKind::Relax => (
                Params::relaxation_preset(),
                vec![64],
                RELAXATION_SNAPSHOTS.to_vec(),
            ),
            ExperimentKind::Stability => (Params::coarsening_preset(), vec![64], vec![]),
        };
        ExperimentConfig {
            kind,
            params,
            nx,
            tau_rule: TauRule::default(),
            taus: if kind == ExperimentKind::Stability {
                STABILITY_TAUS.to_vec()
            } else {
                vec![]
            },
            seed: 1,
            snapshot_times: snapshots,
            output_dir: PathBuf::from("out").join(kind.name()),
            solver: SolverConfig::default(),
            strict_root: false,
            polygon: Polygon::cross(),
        }
    }

    /// Defaults of `kind`, then the file, then the overrides. A file naming
    /// a different kind is an error.
    pub fn resolve(kind: ExperimentKind, file: &ConfigFile, cli: &Overrides) -> Result<Self> {
        if let Some(k) = file.kind {
            if k != kind {
                return Err(Error::Config(format!("config is for '{k}', not '{kind}'")));
            }
        }
        let mut c = Self::defaults(kind);
        if let Some(nx) = &file.nx {
            c.nx = nx.clone();
        }
        if let Some(tau) = file.tau {
            c.params.tau = tau;
            if kind == ExperimentKind::Converge {
                c.tau_rule = TauRule::Fixed { tau };
            }
        }
        if let Some(rule) = file.tau_rule {
            if kind != ExperimentKind::Converge {
                return Err(Error::Config(format!(
                    "tau_rule applies to 'converge' only, not '{kind}'"
                )));
            }
            if file.tau.is_some() {
                return Err(Error::Config(
                    "give either tau or tau_rule, not both".into(),
                ));
            }
            c.tau_rule = rule;
        }
        if let Some(taus) = &file.taus {
            if kind != ExperimentKind::Stability {
                return Err(Error::Config(format!(
                    "taus applies to 'stability' only, not '{kind}'"
                )));
            }
            c.taus = taus.clone();
        }
        if let Some(t) = file.t_final {
            c.params.t_final = t;
        }
        let phys = file.params.unwrap_or_default();
        apply_physical(&mut c.params, &phys);
        if let Some(seed) = file.seed {
            c.seed = seed;
        }
        if let Some(s) = &file.snapshot_times {
            c.snapshot_times = s.clone();
        }
        if let Some(dir) = &file.output_dir {
            c.output_dir = dir.clone();
        }
        if let Some(s) = file.solver {
            if let Some(v) = s.rel_tolerance {
                c.solver.rel_tolerance = v;
            }
            if s.max_iterations.is_some() {
                c.solver.max_iterations = s.max_iterations;
            }
            if let Some(m) = s.method {
                c.solver.method = m;
            }
        }
        if let Some(v) = file.strict_root {
            c.strict_root = v;
        }
        if let Some(v) = &file.polygon {
            if kind != ExperimentKind::Relax {
                return Err(Error::Config(format!(
                    "polygon applies to 'relax' only, not '{kind}'"
                )));
            }
            c.polygon = Polygon {
                vertices: v.clone(),
            };
        }

        if let Some(nx) = &cli.nx {
            c.nx = nx.clone();
        }
        if let Some(taus) = &cli.tau {
            match kind {
                ExperimentKind::Stability => c.taus = taus.clone(),
                _ => {
                    let [tau] = taus[..] else {
                        return Err(Error::Config(format!(
                            "'{kind}' takes a single --tau, got {}",
                            taus.len()
                        )));
                    };
                    c.params.tau = tau;
                    if kind == ExperimentKind::Converge {
                        c.tau_rule = TauRule::Fixed { tau };
                    }
                }
            }
        }
        if let Some(seed) = cli.seed {
            c.seed = seed;
        }
        if let Some(dir) = &cli.output_dir {
            c.output_dir = dir.clone();
        }

        c.params.solver = c.solver;
        c.validate(phys.c1.is_some() || phys.gamma.is_some())?;
        Ok(c)
    }

    /// `check_shift` enforces `C1 > gamma`; the built-in parameter sets do
    /// not satisfy it, so it is applied only to user-supplied values.
    pub fn validate(&self, check_shift: bool) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::InvalidArgument(msg) => Error::Config(msg),
            other => other,
        };
        if self.nx.is_empty() || self.nx.contains(&0) {
            return Err(Error::Config(format!(
                "nx must be positive, got {:?}",
                self.nx
            )));
        }
        match self.kind {
            ExperimentKind::Converge => {
                if self.nx.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config(format!(
                        "convergence levels must increase strictly, got {:?}",
                        self.nx
                    )));
                }
                let raw = match self.tau_rule {
                    TauRule::Fixed { tau } => tau,
                    TauRule::MeshCubed { factor } => factor,
                };
                if !(raw > 0.0 && raw.is_finite()) {
                    return Err(Error::Config(format!(
                        "invalid tau rule {:?}",
                        self.tau_rule
                    )));
                }
                let mut p = self.params;
                p.tau = self.tau_rule.tau(self.nx[0], p.t_final);
                p.validate().map_err(cfg)?;
            }
            _ => {
                if self.nx.len() != 1 {
                    return Err(Error::Config(format!(
                        "'{}' takes a single nx, got {:?}",
                        self.kind, self.nx
                    )));
                }
                if self.kind == ExperimentKind::Stability {
                    if self.taus.is_empty() {
                        return Err(Error::Config("stability needs at least one tau".into()));
                    }
                    for &tau in &self.taus {
                        let mut p = self.params;
                        p.tau = tau;
                        p.validate().map_err(cfg)?;
                    }
                } else {
                    self.params.validate().map_err(cfg)?;
                }
            }
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && t.is_finite()))
        {
            return Err(Error::Config(format!(
                "snapshot time must be nonnegative, got {t}"
            )));
        }
        if self.kind == ExperimentKind::Relax {
            self.polygon.validate(Rect::UNIT).map_err(cfg)?;
        }
        if check_shift {
            self.params.check_shift_constraint().map_err(cfg)?;
        }
        Ok(())
    }

    pub fn scheme_options(&self) -> SchemeOptions {
        SchemeOptions {
            strict_root: self.strict_root,
            ..Default::default()
        }
    }
}

fn apply_physical(p: &mut Params, o: &PhysicalOverrides) {
    let fields = [
        (&mut p.mobility, o.mobility),
        (&mut p.lambda, o.lambda),
        (&mut p.nu, o.nu),
        (&mut p.epsilon, o.epsilon),
        (&mut p.gamma, o.gamma),
        (&mut p.c1, o.c1),
        (&mut p.c2, o.c2),
    ];
    for (slot, v) in fields {
        if let Some(v) = v {
            *slot = v;
        }
    }
}

/// Read `path` (if any) and resolve it for `kind` with `cli` on top.
pub fn parse_config(
    kind: ExperimentKind,
    path: Option<&Path>,
    cli: &Overrides,
) -> Result<ExperimentConfig> {
    let file = match path {
        Some(p) => ConfigFile::read(p)?,
        None => ConfigFile::default(),
    };
    ExperimentConfig::resolve(kind, &file, cli)
}
