//! Catalog of translation-invariant jump-operator families.
//!
//! Every entry keeps `Σ_j γ_j L_j†L_j` diagonal in momentum and sublattice,
//! so the associated effective Hamiltonian is block-diagonal on the momentum
//! grid with blocks `H_eff(k) = h(k) − (i/2)·D`, `D` the intracell decay
//! matrix. The catalog:
//!
//! - collective collapse `1 ⊗ |A⟩⟨B|` (or the reversed target),
//! - sublattice projectors `1 ⊗ |s⟩⟨s|`,
//! - momentum-kick families `e^{iq x̂} ⊗ |A⟩⟨B|` weighted by `G(q)`,
//! - dissipative directional hopping `Σ_j |j+1⟩⟨j| ⊗ 1`,
//! - rate-weighted mixtures of the above.
//!
//! Rates follow the master-equation convention
//! `ρ̇ ⊃ Σ_j γ_j (L_j ρ L_j† − ½{L_j†L_j, ρ})` with unnormalized catalog
//! operators, so `H_eff = H − (i/2) Σ_j γ_j L_j†L_j`.

use crate::bloch::{ModelSpec, DARK_CONTACT_REL_TOL};
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::linalg::{c, Mat2};
use crate::trajectory::PureState;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn index(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }

    pub fn other(self) -> Sublattice {
        match self {
            Sublattice::A => Sublattice::B,
            Sublattice::B => Sublattice::A,
        }
    }
}

/// Momentum-transfer distribution of a kick family.
///
/// Kicks live on the momentum grid, so convolutions are exact cyclic
/// shifts. `masses` returns one probability per grid point (summing to 1);
/// the continuum density is `G(q) = mass(q)/Δq`.
#[derive(Clone, Debug, PartialEq)]
pub enum KickDistribution {
    /// All mass at `q = 0`: the collective-collapse limit.
    Delta,
    /// Equal mass on every grid point: the local-collapse limit `G = a/h`.
    Uniform,
    /// `G(q) ∝ exp(−σ² q²/2)` with `q` centered into `(−π, π]`;
    /// `sigma` in units of the lattice constant.
    Gaussian { sigma: f64 },
    /// Explicit nonnegative weights per grid point, renormalized.
    Table { weights: Vec<f64> },
}

impl KickDistribution {
    pub fn masses(&self, grid: &MomentumGrid) -> Result<Vec<f64>> {
        let n = grid.len();
        let raw: Vec<f64> = match self {
            KickDistribution::Delta => {
                let mut v = vec![0.0; n];
                v[0] = 1.0;
                v
            }
            KickDistribution::Uniform => vec![1.0; n],
            KickDistribution::Gaussian { sigma } => {
                if *sigma <= 0.0 {
                    return Err(CoreError::InvalidArgument(
                        "gaussian kick width must be positive".into(),
                    ));
                }
                (0..n)
                    .map(|i| {
                        let q = grid.centered_momentum(i);
                        let q_sq = q[0] * q[0] + q[1] * q[1];
                        (-sigma * sigma * q_sq / 2.0).exp()
                    })
                    .collect()
            }
            KickDistribution::Table { weights } => {
                if weights.len() != n {
                    return Err(CoreError::InvalidArgument(format!(
                        "kick table has {} entries for a grid of {}",
                        weights.len(),
                        n
                    )));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(CoreError::InvalidArgument(
                        "kick table weights must be finite and nonnegative".into(),
                    ));
                }
                weights.clone()
            }
        };
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(CoreError::InvalidArgument(
                "kick distribution has zero total mass".into(),
            ));
        }
        Ok(raw.into_iter().map(|w| w / total).collect())
    }
}

/// Tagged description of a jump-operator family with its rate.
#[derive(Clone, Debug, PartialEq)]
pub enum DissipatorSpec {
    /// Single lattice-wide collapse onto `target` from the other sublattice.
    Collective { target: Sublattice, gamma: f64 },
    /// Sublattice projector `1 ⊗ |target⟩⟨target|`.
    SublatticeProjector { target: Sublattice, gamma: f64 },
    /// Momentum-kick collapse family `L_q = e^{iq x̂} ⊗ |A⟩⟨B|`, `q ∼ G`.
    Kick { g: KickDistribution, gamma: f64 },
    /// Dissipative directional hop `Σ_j |j+1⟩⟨j| ⊗ 1` along axis 0.
    DirectionalHop { gamma: f64 },
    /// Weighted mixture; components must be non-mixture entries.
    Mixture { components: Vec<DissipatorSpec> },
}

/// Identifies which jump operator fired: the leaf component index, plus the
/// sampled kick grid index for kick families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelId {
    pub component: usize,
    pub kick_index: Option<usize>,
}

/// Effective Hamiltonian restricted to momentum blocks.
#[derive(Clone, Debug)]
pub struct EffectiveBlocks {
    pub grid: MomentumGrid,
    pub blocks: Vec<Mat2>,
}

/// Dark-state diagnostics for a (model, dissipator) pair.
#[derive(Clone, Debug)]
pub struct DarkSetReport {
    pub is_dark_free: bool,
    /// Grid momenta where `h_perp` falls below the dark-contact tolerance.
    pub contacts: Vec<[f64; 2]>,
    /// Every grid momentum is a contact: the jumptime map terminates
    /// (`ρ_n = 0` beyond the first application).
    pub trace_terminating: bool,
    /// Projector-only dissipators keep evolving inside the projected
    /// sublattice even at contacts, so no trace is lost there.
    pub persistent_within_projected_sublattice: bool,
}

impl DissipatorSpec {
    pub fn collective(gamma: f64) -> Self {
        DissipatorSpec::Collective {
            target: Sublattice::A,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DissipatorSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(CoreError::InvalidArgument("empty mixture".into()));
                }
                for comp in components {
                    if matches!(comp, DissipatorSpec::Mixture { .. }) {
                        return Err(CoreError::InvalidArgument(
                            "nested mixtures are not supported".into(),
                        ));
                    }
                    comp.validate()?;
                }
                Ok(())
            }
            DissipatorSpec::Collective { gamma, .. }
            | DissipatorSpec::SublatticeProjector { gamma, .. }
            | DissipatorSpec::Kick { gamma, .. }
            | DissipatorSpec::DirectionalHop { gamma } => {
                if *gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(CoreError::InvalidArgument(
                        "dissipator rate must be positive".into(),
                    ))
                }
            }
        }
    }

    /// Leaf components (self for non-mixtures).
    pub fn components(&self) -> Vec<&DissipatorSpec> {
        match self {
            DissipatorSpec::Mixture { components } => components.iter().collect(),
            other => vec![other],
        }
    }

    /// Total rate `γ = Σ γ_i`.
    pub fn total_gamma(&self) -> f64 {
        self.components()
            .iter()
            .map(|comp| match comp {
                DissipatorSpec::Collective { gamma, .. }
                | DissipatorSpec::SublatticeProjector { gamma, .. }
                | DissipatorSpec::Kick { gamma, .. }
                | DissipatorSpec::DirectionalHop { gamma } => *gamma,
                DissipatorSpec::Mixture { .. } => unreachable!("mixtures are flat"),
            })
            .sum()
    }

    fn component_gamma(comp: &DissipatorSpec) -> f64 {
        match comp {
            DissipatorSpec::Collective { gamma, .. }
            | DissipatorSpec::SublatticeProjector { gamma, .. }
            | DissipatorSpec::Kick { gamma, .. }
            | DissipatorSpec::DirectionalHop { gamma } => *gamma,
            DissipatorSpec::Mixture { .. } => unreachable!("mixtures are flat"),
        }
    }

    /// Intracell decay matrix `Σ_j γ_j L_j†L_j` (momentum-independent for
    /// the whole catalog; for kick families `L_q†L_q = 1 ⊗ |B⟩⟨B|`
    /// regardless of `q`).
    pub fn decay_matrix(&self) -> Mat2 {
        let mut d = Mat2::ZERO;
        for comp in self.components() {
            let gamma = Self::component_gamma(comp);
            let term = match comp {
                DissipatorSpec::Collective { target, .. } => {
                    Mat2::projector(target.other().index())
                }
                DissipatorSpec::SublatticeProjector { target, .. } => {
                    Mat2::projector(target.index())
                }
                DissipatorSpec::Kick { .. } => Mat2::projector(Sublattice::B.index()),
                DissipatorSpec::DirectionalHop { .. } => Mat2::identity(),
                DissipatorSpec::Mixture { .. } => unreachable!(),
            };
            d = d.add(&term.scale(c(gamma, 0.0)));
        }
        d
    }

    /// `H_eff(k) = h(k) − (i/2)·decay` on every grid momentum.
    pub fn effective_hamiltonian(&self, model: &ModelSpec, grid: &MomentumGrid) -> EffectiveBlocks {
        let decay = self.decay_matrix().scale(c(0.0, -0.5));
        let blocks = grid
            .iter()
            .map(|(_, k)| {
                let h = model.bloch_vector(&k);
                Mat2::from_pauli(c(h.h0, 0.0), c(h.hx, 0.0), c(h.hy, 0.0), c(h.hz, 0.0))
                    .add(&decay)
            })
            .collect();
        EffectiveBlocks {
            grid: grid.clone(),
            blocks,
        }
    }

    /// Dark-state diagnostics. A positive-definite decay matrix excludes
    /// dark states for any Hamiltonian; otherwise states supported on the
    /// undamped sublattice become dark exactly at the momenta where
    /// `h_perp` vanishes.
    pub fn dark_set_report(&self, model: &ModelSpec, grid: &MomentumGrid) -> DarkSetReport {
        let d = self.decay_matrix();
        let persistent = self
            .components()
            .iter()
            .all(|comp| matches!(comp, DissipatorSpec::SublatticeProjector { .. }));
        let min_decay = d.0[0][0].re.min(d.0[1][1].re);
        if min_decay > 0.0 {
            return DarkSetReport {
                is_dark_free: true,
                contacts: Vec::new(),
                trace_terminating: false,
                persistent_within_projected_sublattice: persistent,
            };
        }
        let tol = DARK_CONTACT_REL_TOL * model.energy_scale();
        let contacts: Vec<[f64; 2]> = grid
            .iter()
            .filter(|(_, k)| model.bloch_vector(k).h_perp() <= tol)
            .map(|(_, k)| k)
            .collect();
        let refined = model.h_perp_min(grid);
        let all_dark = contacts.len() == grid.len();
        DarkSetReport {
            is_dark_free: contacts.is_empty() && !refined.dark_contact,
            contacts,
            trace_terminating: all_dark && !persistent,
            persistent_within_projected_sublattice: persistent,
        }
    }

    /// Unnormalized jump rates `γ_j ⟨ψ|L_j†L_j|ψ⟩` per leaf component.
    /// Kick families aggregate into a single channel (the kick `q` is drawn
    /// from `G` separately since `L_q†L_q` is `q`-independent).
    pub fn jump_channels(&self, state: &PureState) -> Vec<(ChannelId, f64)> {
        let (pop_a, pop_b) = state.sublattice_populations();
        self.components()
            .iter()
            .enumerate()
            .map(|(idx, comp)| {
                let gamma = Self::component_gamma(comp);
                let rate = match comp {
                    DissipatorSpec::Collective { target, .. } => {
                        gamma
                            * match target.other() {
                                Sublattice::A => pop_a,
                                Sublattice::B => pop_b,
                            }
                    }
                    DissipatorSpec::SublatticeProjector { target, .. } => {
                        gamma
                            * match target {
                                Sublattice::A => pop_a,
                                Sublattice::B => pop_b,
                            }
                    }
                    DissipatorSpec::Kick { .. } => gamma * pop_b,
                    DissipatorSpec::DirectionalHop { .. } => gamma * (pop_a + pop_b),
                    DissipatorSpec::Mixture { .. } => unreachable!(),
                };
                (
                    ChannelId {
                        component: idx,
                        kick_index: None,
                    },
                    rate,
                )
            })
            .collect()
    }

    /// Apply `L_j|ψ⟩ / ‖L_j|ψ⟩‖` in place. The channel must have positive
    /// rate; a vanishing post-jump norm is an internal error.
    pub fn apply_jump(&self, channel: ChannelId, state: &mut PureState) -> Result<()> {
        let comps = self.components();
        let comp = comps.get(channel.component).ok_or_else(|| {
            CoreError::InvalidArgument(format!("no channel component {}", channel.component))
        })?;
        match comp {
            DissipatorSpec::Collective { target, .. } => {
                state.collapse_between(target.other().index(), target.index());
            }
            DissipatorSpec::SublatticeProjector { target, .. } => {
                state.project_sublattice(target.index());
            }
            DissipatorSpec::Kick { .. } => {
                let q = channel.kick_index.ok_or_else(|| {
                    CoreError::InvalidArgument("kick channel without sampled q".into())
                })?;
                state.kick_collapse(q);
            }
            DissipatorSpec::DirectionalHop { .. } => {
                state.directional_hop();
            }
            DissipatorSpec::Mixture { .. } => unreachable!(),
        }
        let norm = state.norm();
        if norm <= 1e-150 {
            return Err(CoreError::InvalidArgument(
                "jump applied to a state annihilated by the operator".into(),
            ));
        }
        state.scale(1.0 / norm);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::PureState;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kick_distributions_normalize() {
        let grid = MomentumGrid::one_d(16);
        for g in [
            KickDistribution::Delta,
            KickDistribution::Uniform,
            KickDistribution::Gaussian { sigma: 1.0 },
            KickDistribution::Table {
                weights: (0..16).map(|i| (i % 3) as f64).collect(),
            },
        ] {
            let m = g.masses(&grid).unwrap();
            assert_abs_diff_eq!(m.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        let d = KickDistribution::Delta.masses(&grid).unwrap();
        assert_eq!(d[0], 1.0);
    }

    #[test]
    fn effective_hamiltonian_blocks() {
        let model = ModelSpec::ssh(0.2, 0.5);
        let grid = MomentumGrid::one_d(8);
        let gamma = 1.0;

        let cc = DissipatorSpec::collective(gamma).effective_hamiltonian(&model, &grid);
        let pb = DissipatorSpec::SublatticeProjector {
            target: Sublattice::B,
            gamma,
        }
        .effective_hamiltonian(&model, &grid);
        // Collective collapse and the B projector share H_eff, bitwise.
        assert_eq!(cc.blocks, pb.blocks);
        for b in &cc.blocks {
            // Anti-Hermitian part is −(γ/2)|B⟩⟨B|.
            let anti = b.sub(&b.adjoint()).scale(c(0.0, -0.5));
            assert_abs_diff_eq!(anti.0[1][1].re, -gamma / 2.0, epsilon = 1e-14);
            assert!(anti.0[0][0].norm() < 1e-14);
        }

        // Equal-rate collective + A-projector: uniform decay −(i γ/2)·1 with
        // per-component rate γ (total 2γ).
        let mix = DissipatorSpec::Mixture {
            components: vec![
                DissipatorSpec::collective(gamma),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::A,
                    gamma,
                },
            ],
        };
        let blocks = mix.effective_hamiltonian(&model, &grid);
        for (i, b) in blocks.blocks.iter().enumerate() {
            let h = model.bloch_vector(&grid.momentum(i));
            let expect = Mat2::from_pauli(c(h.h0, -gamma / 2.0), c(h.hx, 0.0), c(h.hy, 0.0), c(h.hz, 0.0));
            assert!(b.sub(&expect).max_abs() < 1e-14);
        }
    }

    #[test]
    fn kick_decay_is_independent_of_g() {
        let grid = MomentumGrid::one_d(8);
        let _ = grid;
        for g in [
            KickDistribution::Delta,
            KickDistribution::Uniform,
            KickDistribution::Gaussian { sigma: 2.0 },
        ] {
            let d = DissipatorSpec::Kick { g, gamma: 0.7 }.decay_matrix();
            assert_abs_diff_eq!(d.0[1][1].re, 0.7, epsilon = 1e-15);
            assert!(d.0[0][0].norm() < 1e-15);
        }
    }

    #[test]
    fn dark_reports() {
        let grid = MomentumGrid::one_d(64);
        let cc = DissipatorSpec::collective(1.0);

        let critical = ModelSpec::ssh(0.5, 0.5);
        let rep = cc.dark_set_report(&critical, &grid);
        assert!(!rep.is_dark_free);
        assert!(!rep.contacts.is_empty());

        let gapped = ModelSpec::ssh(0.2, 0.5);
        assert!(cc.dark_set_report(&gapped, &grid).is_dark_free);

        // Mixture covering both sublattices is dark-free for any model.
        let mix = DissipatorSpec::Mixture {
            components: vec![
                DissipatorSpec::collective(1.0),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::A,
                    gamma: 1.0,
                },
            ],
        };
        assert!(mix.dark_set_report(&critical, &grid).is_dark_free);

        // All-dark Hamiltonian h = hz σz: every momentum is a contact and
        // the collective-collapse jumptime evolution terminates.
        let hz_only = ModelSpec::from_pauli_harmonics(
            1,
            &[([1, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])],
            crate::bloch::Lattice::OneD { a: 1.0 },
        )
        .unwrap();
        let rep = cc.dark_set_report(&hz_only, &grid);
        assert!(rep.trace_terminating && rep.contacts.len() == grid.len());

        // Projectors persist at contacts.
        let pa = DissipatorSpec::SublatticeProjector {
            target: Sublattice::A,
            gamma: 1.0,
        };
        let rep = pa.dark_set_report(&critical, &grid);
        assert!(rep.persistent_within_projected_sublattice);
        assert!(!rep.trace_terminating);
    }

    #[test]
    fn channel_rates_and_jumps() {
        let dims = [8usize];
        let cc = DissipatorSpec::collective(1.0);

        // State entirely on A: collective collapse is dark.
        let on_a = PureState::localized(&dims, &[3], 0);
        let ch = cc.jump_channels(&on_a);
        assert_abs_diff_eq!(ch[0].1, 0.0, epsilon = 1e-14);

        // State entirely on B: rate γ.
        let on_b = PureState::localized(&dims, &[3], 1);
        assert_abs_diff_eq!(cc.jump_channels(&on_b)[0].1, 1.0, epsilon = 1e-13);

        // Mixture rates on a B state.
        let mix = DissipatorSpec::Mixture {
            components: vec![
                DissipatorSpec::collective(0.3),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::B,
                    gamma: 0.9,
                },
            ],
        };
        let rates = mix.jump_channels(&on_b);
        assert_abs_diff_eq!(rates[0].1, 0.3, epsilon = 1e-13);
        assert_abs_diff_eq!(rates[1].1, 0.9, epsilon = 1e-13);

        // Collective collapse moves |j⟩⊗|B⟩ to |j⟩⊗|A⟩.
        let mut s = on_b.clone();
        cc.apply_jump(
            ChannelId {
                component: 0,
                kick_index: None,
            },
            &mut s,
        )
        .unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        let (pa, pb) = s.sublattice_populations();
        assert_abs_diff_eq!(pa, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pb, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.mean_positions(&[0])[0], 3.0, epsilon = 1e-10);

        // Directional hop moves |j⟩ to |j+1⟩ exactly.
        let hop = DissipatorSpec::DirectionalHop { gamma: 1.0 };
        let mut s = PureState::localized(&dims, &[2], 0);
        hop.apply_jump(
            ChannelId {
                component: 0,
                kick_index: None,
            },
            &mut s,
        )
        .unwrap();
        assert_abs_diff_eq!(s.mean_positions(&[0])[0], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn kick_shifts_momentum() {
        let dims = [8usize];
        // Plane wave on B at momentum index 2.
        let mut s = PureState::zero(&dims);
        s.amps_mut()[2][1] = c(1.0, 0.0);
        let kick = DissipatorSpec::Kick {
            g: KickDistribution::Uniform,
            gamma: 1.0,
        };
        kick.apply_jump(
            ChannelId {
                component: 0,
                kick_index: Some(3),
            },
            &mut s,
        )
        .unwrap();
        // Momentum boosted to index 5, collapsed to A.
        assert_abs_diff_eq!(s.amps()[5][0].norm(), 1.0, epsilon = 1e-13);
        let (pa, _) = s.sublattice_populations();
        assert_abs_diff_eq!(pa, 1.0, epsilon = 1e-13);
    }
}
