//! Experiment configuration: one JSON document that pins the L-function
//! family, the invariants (m, R, ν, μ), the sampling grid, and optional
//! zero data — everything a command needs to be fully deterministic.
//!
//! Per-family defaults keep configs short: a real non-principal character
//! gets (m, R, ν) = (0, −1, 1) and its parity μ; the discriminant form
//! gets (0, 1, −1); an elliptic curve gets (rank, 1, −1). Any field can
//! be overridden explicitly, and ν = −R is enforced when the spec is
//! assembled. No environment variable affects numerics.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::coeffs::{
    CustomSource, DeltaSource, DirichletCharacter, EllipticCurve, EllipticSource, LFunctionSpec,
    TauTable,
};
use crate::error::{Error, Result};
use crate::series::GridSpec;

/// Top-level configuration document.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Display label; defaults to a family-derived name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lfunction: FamilyConfig,
    /// Order of central vanishing; defaults per family (elliptic: rank).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Second-moment coefficient R (the sum behaves like −R log log x).
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub r_order: Option<i32>,
    /// ν = −R; may be given explicitly but must agree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<i32>,
    /// Archimedean shifts μ_j (needed by the explicit formula).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductor: Option<u64>,
    /// Largest x any command will touch.
    pub xmax: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub race: Option<RaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Which L-function the experiment runs on.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyConfig {
    /// Character given by its value table: `values[r]` = χ(r) as `[re, im]`,
    /// `null` off the units. Length must equal the modulus.
    Dirichlet {
        modulus: u64,
        values: Vec<Option<(f64, f64)>>,
    },
    /// The discriminant cusp form; τ(n) computed up to `cutoff`
    /// (default: xmax) and cached on disk when a cache dir is given.
    Delta {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<u64>,
    },
    /// Curve in Weierstrass form [a1, a2, a3, a4, a6], with its conductor
    /// and analytic rank; `bad_ap` supplies a_p where the built-in
    /// reduction rules cannot decide (bad p ∈ {2, 3}).
    Elliptic {
        a_invariants: [i64; 5],
        conductor: u64,
        rank: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        bad_ap: Vec<(u64, i64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ap_cap: Option<u64>,
    },
    /// Explicit Satake data: `alphas` maps p to its α list.
    Custom {
        degree: usize,
        alphas: Vec<(u64, Vec<(f64, f64)>)>,
    },
}

/// Sampling grid shape; x_max comes from the config root.
#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    #[default]
    Dyadic,
    LogSpaced {
        n: usize,
    },
}

/// Residue classes for the prime-race command (default: the classical
/// mod-4 race, a = 3 leading).
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RaceConfig {
    #[serde(default = "default_race_q")]
    pub q: u64,
    #[serde(default = "default_race_a")]
    pub a: u64,
    #[serde(default = "default_race_b")]
    pub b: u64,
}

fn default_race_q() -> u64 {
    4
}
fn default_race_a() -> u64 {
    3
}
fn default_race_b() -> u64 {
    1
}

impl Default for RaceConfig {
    fn default() -> Self {
        Self { q: 4, a: 3, b: 1 }
    }
}

/// Where tables go when the command line does not say.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A validated, ready-to-run experiment.
pub struct Experiment {
    pub label: String,
    pub spec: LFunctionSpec<f64>,
    /// Concrete family object, for code that needs more than the
    /// coefficient-source interface (central-value engines).
    pub family: FamilyHandle,
    pub xmax: u64,
    pub grid: GridSpec,
    pub zeros_path: Option<PathBuf>,
    pub race: RaceConfig,
}

/// Typed access to the built family behind the erased coefficient source.
#[derive(Clone)]
pub enum FamilyHandle {
    Dirichlet(Arc<DirichletCharacter<f64>>),
    Delta(Arc<TauTable>),
    Elliptic(Arc<EllipticCurve>),
    Custom,
}

impl ExperimentConfig {
    /// Parse a configuration file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Resolve defaults, build the coefficient source, and validate.
    ///
    /// `tau_cache_dir` is where τ tables are cached across runs (flag-set,
    /// never config-set).
    pub fn build(&self, tau_cache_dir: Option<&Path>) -> Result<Experiment> {
        if self.xmax < 2 {
            return Err(Error::Config(format!(
                "xmax must be at least 2, got {}",
                self.xmax
            )));
        }
        let (source, family, defaults, default_label): (
            Arc<dyn crate::coeffs::CoeffSource<f64>>,
            FamilyHandle,
            _,
            _,
        ) = match &self.lfunction {
            FamilyConfig::Dirichlet { modulus, values } => {
                if values.len() != *modulus as usize {
                    return Err(Error::Config(format!(
                        "character table has {} entries for modulus {modulus}",
                        values.len()
                    )));
                }
                let table: Vec<(u64, Complex<f64>)> = values
                    .iter()
                    .enumerate()
                    .filter_map(|(r, v)| v.map(|(re, im)| (r as u64, Complex::new(re, im))))
                    .collect();
                let chi = Arc::new(DirichletCharacter::from_table(*modulus, &table)?);
                let defaults = dirichlet_defaults(&chi);
                let label = format!("dirichlet-{modulus}");
                (
                    chi.clone(),
                    FamilyHandle::Dirichlet(chi),
                    defaults,
                    label,
                )
            }
            FamilyConfig::Delta { cutoff } => {
                let cut = cutoff.unwrap_or(self.xmax).max(64);
                if cut < self.xmax {
                    return Err(Error::Config(format!(
                        "tau cutoff {cut} is below xmax {}",
                        self.xmax
                    )));
                }
                let table = Arc::new(TauTable::load_or_build(cut, tau_cache_dir)?);
                let defaults = FamilyDefaults {
                    m: 0,
                    r_order: 1,
                    mu: vec![],
                    conductor: Some(1),
                };
                (
                    Arc::new(DeltaSource::<f64>::new(table.clone())),
                    FamilyHandle::Delta(table),
                    defaults,
                    "delta".to_string(),
                )
            }
            FamilyConfig::Elliptic {
                a_invariants,
                conductor,
                rank,
                bad_ap,
                ap_cap,
            } => {
                let overrides: BTreeMap<u64, i64> = bad_ap.iter().copied().collect();
                let curve = Arc::new(EllipticCurve::new(*a_invariants, *conductor, overrides)?);
                let cap = ap_cap.unwrap_or(self.xmax);
                if cap < self.xmax {
                    return Err(Error::Config(format!(
                        "ap_cap {cap} is below xmax {}",
                        self.xmax
                    )));
                }
                let defaults = FamilyDefaults {
                    m: *rank,
                    r_order: 1,
                    mu: vec![],
                    conductor: Some(*conductor),
                };
                let label = format!("elliptic-{conductor}");
                (
                    Arc::new(EllipticSource::<f64>::new(curve.clone(), cap)),
                    FamilyHandle::Elliptic(curve),
                    defaults,
                    label,
                )
            }
            FamilyConfig::Custom { degree, alphas } => {
                let table: BTreeMap<u64, Vec<Complex<f64>>> = alphas
                    .iter()
                    .map(|(p, list)| {
                        (*p, list.iter().map(|&(re, im)| Complex::new(re, im)).collect())
                    })
                    .collect();
                let src = CustomSource::<f64>::new(*degree, table)?;
                let defaults = FamilyDefaults {
                    m: 0,
                    r_order: 0,
                    mu: vec![],
                    conductor: None,
                };
                (
                    Arc::new(src),
                    FamilyHandle::Custom,
                    defaults,
                    "custom".to_string(),
                )
            }
        };

        let m = self.m.unwrap_or(defaults.m);
        let r_order = self.r_order.unwrap_or(defaults.r_order);
        let nu = self.nu.unwrap_or(-r_order);
        let mu = self.mu.clone().unwrap_or(defaults.mu);
        let conductor = self.conductor.or(defaults.conductor);
        let label = self
            .label
            .clone()
            .unwrap_or(default_label);
        let spec = LFunctionSpec::new(label.clone(), source, m, r_order, nu, mu, conductor)?;
        let grid = match self.grid {
            GridConfig::Dyadic => GridSpec::Dyadic { xmax: self.xmax },
            GridConfig::LogSpaced { n } => GridSpec::LogSpaced {
                xmax: self.xmax,
                n,
            },
        };
        Ok(Experiment {
            label,
            spec,
            family,
            xmax: self.xmax,
            grid,
            zeros_path: self.zeros_path.clone(),
            race: self.race.unwrap_or_default(),
        })
    }
}

struct FamilyDefaults {
    m: u32,
    r_order: i32,
    mu: Vec<f64>,
    conductor: Option<u64>,
}

/// (m, R, μ) defaults for a character: real non-principal characters are
/// the self-dual case R = −1; complex ones pair with their conjugate and
/// get R = 0. μ is the parity: χ(−1) = +1 → 0, χ(−1) = −1 → 1.
fn dirichlet_defaults(chi: &DirichletCharacter<f64>) -> FamilyDefaults {
    let q = chi.modulus();
    let odd = q > 1 && chi.value_real(q - 1) < 0.0;
    FamilyDefaults {
        m: 0,
        r_order: if chi.is_real() { -1 } else { 0 },
        mu: vec![if odd { 1.0 } else { 0.0 }],
        conductor: Some(q),
    }
}
