//! JSON experiment configuration.
//!
//! Models come either as built-in shortcuts (`{"ssh": {"v": 0.2, "w": 0.5}}`,
//! `{"torus2d": {"u": 6, "v": 10, "w": 1}}`, `{"directional_chain": {"J": 0.3}}`)
//! or as an explicit hopping list. Dissipators are tagged by `"type"`.
//! Serialization round-trips on the canonical form; the SHA-256 of the
//! canonical JSON binds every output file to its configuration.

use anyhow::{bail, Context};
use jumptime_core::bloch::{Lattice, ModelSpec};
use jumptime_core::dissipator::{DissipatorSpec, KickDistribution, Sublattice};
use jumptime_core::linalg::{c, Mat2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SshParams {
    pub v: f64,
    pub w: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TorusParams {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChainParams {
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HoppingEntry {
    pub r: Vec<i64>,
    /// Row-major 2×2 matrix as `[re, im]` pairs: `[m00, m01, m10, m11]`.
    pub matrix: [[f64; 2]; 4],
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LatticeConfig {
    OneD { a: f64 },
    TwoD { a1: [f64; 2], a2: [f64; 2] },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ModelConfig {
    Ssh { ssh: SshParams },
    Torus2d { torus2d: TorusParams },
    DirectionalChain { directional_chain: ChainParams },
    Explicit {
        dimension: usize,
        lattice: LatticeConfig,
        hoppings: Vec<HoppingEntry>,
    },
}

impl ModelConfig {
    pub fn build(&self) -> anyhow::Result<ModelSpec> {
        match self {
            ModelConfig::Ssh { ssh } => Ok(ModelSpec::ssh(ssh.v, ssh.w)),
            ModelConfig::Torus2d { torus2d } => {
                Ok(ModelSpec::torus2d(torus2d.u, torus2d.v, torus2d.w))
            }
            ModelConfig::DirectionalChain { directional_chain } => {
                Ok(ModelSpec::directional_chain(directional_chain.j))
            }
            ModelConfig::Explicit {
                dimension,
                lattice,
                hoppings,
            } => {
                let lat = match lattice {
                    LatticeConfig::OneD { a } => Lattice::OneD { a: *a },
                    LatticeConfig::TwoD { a1, a2 } => Lattice::TwoD { a1: *a1, a2: *a2 },
                };
                let hops = hoppings
                    .iter()
                    .map(|h| {
                        let mut r = [0i64; 2];
                        if h.r.len() != *dimension {
                            bail!("hopping vector {:?} does not match dimension", h.r);
                        }
                        for (i, v) in h.r.iter().enumerate() {
                            r[i] = *v;
                        }
                        let m = Mat2([
                            [c(h.matrix[0][0], h.matrix[0][1]), c(h.matrix[1][0], h.matrix[1][1])],
                            [c(h.matrix[2][0], h.matrix[2][1]), c(h.matrix[3][0], h.matrix[3][1])],
                        ]);
                        Ok((r, m))
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Ok(ModelSpec::from_hoppings(*dimension, hops, lat)?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type")]
pub enum KickConfig {
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "gaussian")]
    Gaussian { sigma: f64 },
}

impl KickConfig {
    fn build(&self) -> KickDistribution {
        match self {
            KickConfig::Delta => KickDistribution::Delta,
            KickConfig::Uniform => KickDistribution::Uniform,
            KickConfig::Gaussian { sigma } => KickDistribution::Gaussian { sigma: *sigma },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type")]
pub enum DissipatorConfig {
    #[serde(rename = "collective")]
    Collective {
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<String>,
    },
    #[serde(rename = "sublattice_A")]
    SublatticeA { gamma: f64 },
    #[serde(rename = "sublattice_B")]
    SublatticeB { gamma: f64 },
    #[serde(rename = "kick")]
    Kick {
        #[serde(rename = "G")]
        g: KickConfig,
        gamma: f64,
    },
    #[serde(rename = "directional_hop")]
    DirectionalHop { gamma: f64 },
    #[serde(rename = "mixture")]
    Mixture { components: Vec<DissipatorConfig> },
}

impl DissipatorConfig {
    pub fn build(&self) -> anyhow::Result<DissipatorSpec> {
        let spec = match self {
            DissipatorConfig::Collective { gamma, target } => {
                let target = match target.as_deref() {
                    None | Some("A") => Sublattice::A,
                    Some("B") => Sublattice::B,
                    Some(other) => bail!("unknown collapse target {other:?}"),
                };
                DissipatorSpec::Collective {
                    target,
                    gamma: *gamma,
                }
            }
            DissipatorConfig::SublatticeA { gamma } => DissipatorSpec::SublatticeProjector {
                target: Sublattice::A,
                gamma: *gamma,
            },
            DissipatorConfig::SublatticeB { gamma } => DissipatorSpec::SublatticeProjector {
                target: Sublattice::B,
                gamma: *gamma,
            },
            DissipatorConfig::Kick { g, gamma } => DissipatorSpec::Kick {
                g: g.build(),
                gamma: *gamma,
            },
            DissipatorConfig::DirectionalHop { gamma } => {
                DissipatorSpec::DirectionalHop { gamma: *gamma }
            }
            DissipatorConfig::Mixture { components } => DissipatorSpec::Mixture {
                components: components
                    .iter()
                    .map(|comp| comp.build())
                    .collect::<anyhow::Result<Vec<_>>>()?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn default_cells() -> Vec<usize> {
    vec![64]
}
fn default_trajectories() -> u64 {
    700
}
fn default_n_max() -> usize {
    4
}
fn default_n_p() -> usize {
    512
}
fn default_seed() -> u64 {
    7
}
fn default_t_max() -> f64 {
    3.0
}
fn default_bins() -> usize {
    30
}
fn default_center() -> Vec<i64> {
    vec![0]
}

/// Run parameters shared across subcommands; unused fields are ignored by
/// commands that do not need them.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunParams {
    pub trajectories: u64,
    pub n_max: usize,
    pub cells: Vec<usize>,
    pub n_p: usize,
    pub base_seed: u64,
    pub t_max: f64,
    pub walltime_bins: usize,
    pub init_cell: Vec<i64>,
    /// Initial sublattice, "A" or "B".
    pub init_sublattice: String,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            trajectories: default_trajectories(),
            n_max: default_n_max(),
            cells: default_cells(),
            n_p: default_n_p(),
            base_seed: default_seed(),
            t_max: default_t_max(),
            walltime_bins: default_bins(),
            init_cell: default_center(),
            init_sublattice: "A".into(),
        }
    }
}

impl RunParams {
    pub fn init_sublattice_index(&self) -> anyhow::Result<usize> {
        match self.init_sublattice.as_str() {
            "A" => Ok(0),
            "B" => Ok(1),
            other => bail!("init_sublattice must be A or B, got {other:?}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub dissipator: DissipatorConfig,
    #[serde(default)]
    pub run: RunParams,
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| "parsing config JSON")?;
        Ok(cfg)
    }

    /// Canonical JSON: the serde emission of the parsed structure, with
    /// struct-ordered keys. `parse ∘ emit` is the identity on this form.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        hex_string(&hasher.finalize())
    }
}

pub fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
