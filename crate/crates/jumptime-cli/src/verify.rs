//! The acceptance suite: every shipped claim about the physics engine,
//! checked end to end at fixed tolerances. The `verify` subcommand prints
//! one pass/fail line per criterion; the `acceptance` test target runs the
//! same functions.

use jumptime_core::bloch::{Lattice, ModelSpec};
use jumptime_core::dissipator::{DissipatorSpec, KickDistribution, Sublattice};
use jumptime_core::grid::MomentumGrid;
use jumptime_core::linalg::c;
use jumptime_core::propagator::{evolve_kernel, DensityKernel, PropagatorKind};
use jumptime_core::reference::{
    integrate_master, jumptime_map, kernel_to_dense_momentum, momentum_to_real,
    steady_state_blocks, trace_distance, DenseDensityMatrix,
};
use jumptime_core::steady_state::{bloch_steady_state, ssh_steady_current};
use jumptime_core::topology::{
    jumptime_phase_converged, residual_terms, ti_phase_direct, topology_report, transform_phases,
    winding_number,
};
use jumptime_core::trajectory::{
    ensemble_average, ensemble_density_matrices, DensityReadout, PureState, Readout,
    TrajectoryRunner,
};
use jumptime_core::linalg::Mat2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::fmt::Write as _;
use std::time::Instant;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:42} {} ({:.1}s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.details
        )
    }
}

fn check(
    id: &'static str,
    name: &'static str,
    body: impl FnOnce() -> anyhow::Result<(bool, String)>,
) -> Check {
    let start = Instant::now();
    let (passed, details) = match body() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        id,
        name,
        passed,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

// --- deterministic random model fixtures ------------------------------

fn fixture_rng(tag: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(0x6a75_6d70_7469_6d65);
    rng.set_stream(tag);
    rng
}

fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random dark-free chiral model from up-to-range-3 harmonics.
fn random_chiral(rng: &mut ChaCha12Rng) -> ModelSpec {
    loop {
        let mut harmonics = vec![(
            [0i64, 0i64],
            [
                c(0.0, 0.0),
                c(uniform(rng, 0.2, 1.2), 0.0),
                c(uniform(rng, -0.3, 0.3), 0.0),
                c(0.0, 0.0),
            ],
        )];
        for r in 1..=3i64 {
            if r > 1 && rng.random::<f64>() < 0.4 {
                continue;
            }
            harmonics.push((
                [r, 0],
                [
                    c(0.0, 0.0),
                    c(uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6)),
                    c(uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6)),
                    c(0.0, 0.0),
                ],
            ));
        }
        let Ok(model) = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
        else {
            continue;
        };
        let probe = model.h_perp_min(&MomentumGrid::one_d(256));
        if probe.min > 0.05 * model.energy_scale() {
            return model;
        }
    }
}

/// Random dark-free model with a genuinely nonzero h_z.
fn random_with_hz(rng: &mut ChaCha12Rng) -> ModelSpec {
    loop {
        let base = random_chiral(rng);
        let mut harmonics: Vec<([i64; 2], [jumptime_core::C64; 4])> = Vec::new();
        for (r, m) in base.hoppings() {
            if r[0] > 0 || (r[0] == 0 && r[1] == 0) {
                let (h0, hx, hy, hz) = m.pauli_components();
                harmonics.push((*r, [h0, hx, hy, hz]));
            }
        }
        for r in 1..=2i64 {
            harmonics.push((
                [r, 0],
                [
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(uniform(rng, -0.35, 0.35), uniform(rng, -0.35, 0.35)),
                ],
            ));
        }
        let Ok(model) = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
        else {
            continue;
        };
        let probe = model.h_perp_min(&MomentumGrid::one_d(256));
        let grid = MomentumGrid::one_d(64);
        let max_hz = grid
            .iter()
            .map(|(_, k)| model.bloch_vector(&k).hz.abs())
            .fold(0.0, f64::max);
        if probe.min > 0.05 * model.energy_scale() && max_hz > 0.05 {
            return model;
        }
    }
}

/// TRS model: h_x, h_z even, h_y odd (real x/z cosine and imaginary y
/// coefficients).
fn random_trs(rng: &mut ChaCha12Rng) -> ModelSpec {
    loop {
        let mut harmonics = vec![(
            [0i64, 0i64],
            [
                c(0.0, 0.0),
                c(uniform(rng, 0.3, 1.2), 0.0),
                c(0.0, 0.0),
                c(uniform(rng, -0.3, 0.3), 0.0),
            ],
        )];
        for r in 1..=2i64 {
            harmonics.push((
                [r, 0],
                [
                    c(0.0, 0.0),
                    c(uniform(rng, -0.5, 0.5), 0.0),
                    c(0.0, uniform(rng, -0.5, 0.5)),
                    c(uniform(rng, -0.3, 0.3), 0.0),
                ],
            ));
        }
        let Ok(model) = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
        else {
            continue;
        };
        if model.h_perp_min(&MomentumGrid::one_d(256)).min > 0.05 * model.energy_scale() {
            return model;
        }
    }
}

/// Inversion-symmetric but not TRS: h_z odd instead of even.
fn random_inversion_only(rng: &mut ChaCha12Rng) -> ModelSpec {
    loop {
        let mut harmonics = vec![(
            [0i64, 0i64],
            [
                c(0.0, 0.0),
                c(uniform(rng, 0.3, 1.2), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        )];
        for r in 1..=2i64 {
            harmonics.push((
                [r, 0],
                [
                    c(0.0, 0.0),
                    c(uniform(rng, -0.5, 0.5), 0.0),
                    c(0.0, uniform(rng, -0.5, 0.5)),
                    c(0.0, uniform(rng, 0.15, 0.45)),
                ],
            ));
        }
        let Ok(model) = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
        else {
            continue;
        };
        if model.h_perp_min(&MomentumGrid::one_d(256)).min > 0.05 * model.energy_scale() {
            return model;
        }
    }
}

// --- criteria ----------------------------------------------------------

/// Criterion 1: statistical reproduction of the four-panel transport, with
/// both hopping orderings and both collapse models.
pub fn criterion_1_transport_statistics() -> Check {
    check("C1", "transport statistics (four panels)", || {
        let cells = [64usize];
        let n_max = 4usize;
        let n_traj = 700u64;
        let mut details = String::new();
        let mut ok = true;
        for (name, v, w, local) in [
            ("topo/cc", 0.2, 0.5, false),
            ("topo/local", 0.2, 0.5, true),
            ("triv/cc", 0.5, 0.2, false),
            ("triv/local", 0.5, 0.2, true),
        ] {
            let model = ModelSpec::ssh(v, w);
            let diss = if local {
                DissipatorSpec::Kick {
                    g: KickDistribution::Uniform,
                    gamma: 1.0,
                }
            } else {
                DissipatorSpec::collective(1.0)
            };
            let runner = TrajectoryRunner::new(&model, &diss, &cells, &[0])?;
            let init = PureState::localized(&cells, &[0], 0);
            let acc =
                ensemble_average(&runner, &init, &Readout::Jumptime { n_max }, n_traj, 7)?;
            let step = if w > v { 1.0 } else { 0.0 };
            let mut worst = 0.0f64;
            for n in 1..=n_max {
                let stat = &acc.stats[n];
                let err = (stat.mean_x.mean()[0] - n as f64 * step).abs();
                let tol = (4.0 * stat.mean_x.std_err(0)).max(0.15);
                worst = worst.max(err / tol);
            }
            ok &= worst <= 1.0 && !acc.boundary_flagged();
            let _ = write!(details, "{name}: max err/tol {worst:.2}; ");
        }
        Ok((ok, details))
    })
}

/// Criterion 2: kernel evolution, dense eigenbasis map and trajectory
/// outer products agree pairwise on L = 16.
pub fn criterion_2_oracle_chain() -> Check {
    check("C2", "exact-map oracle chain (L=16)", || {
        let dims = [16usize];
        let grid = MomentumGrid::new(&dims);
        let model = ModelSpec::ssh(0.2, 0.5);
        let diss = DissipatorSpec::collective(1.0);

        // Deterministic pair: kernel vs dense map at n = 1, 2.
        let k0 = DensityKernel::localized(&grid, &[0]);
        let dense0 = DenseDensityMatrix::localized(&dims, &[0], 0);
        let mut kernel = k0.clone();
        let mut dense = dense0;
        let mut det_worst = 0.0f64;
        for _ in 1..=2 {
            kernel = evolve_kernel(&kernel, &model, &diss, 1)?;
            dense = jumptime_map(&dense, &model, &diss, &dims)?.rho;
            let from_kernel = momentum_to_real(
                &kernel_to_dense_momentum(&kernel, Sublattice::A),
                &dims,
            );
            let diff = (&dense.matrix - &from_kernel)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            det_worst = det_worst.max(diff);
        }

        // Stochastic pair: N = 20000 trajectories vs the dense map.
        let n_traj = 20_000u64;
        let runner = TrajectoryRunner::new(&model, &diss, &dims, &[0])?;
        let init = PureState::localized(&dims, &[0], 0);
        let mc = ensemble_density_matrices(
            &runner,
            &init,
            &DensityReadout::Jumptime(vec![1, 2]),
            n_traj,
            11,
        )?;
        let dense0 = DenseDensityMatrix::localized(&dims, &[0], 0);
        let step1 = jumptime_map(&dense0, &model, &diss, &dims)?;
        let step2 = jumptime_map(&step1.rho, &model, &diss, &dims)?;
        let tol_mc = 5.0 / (n_traj as f64).sqrt();
        let mut mc_worst = 0.0f64;
        for (mc_mom, exact) in mc.iter().zip([&step1.rho, &step2.rho]) {
            let d = trace_distance(&momentum_to_real(mc_mom, &dims), &exact.matrix)?;
            mc_worst = mc_worst.max(d);
        }
        let ok = det_worst <= 1e-9 && mc_worst <= tol_mc;
        Ok((
            ok,
            format!(
                "deterministic max-element {det_worst:.2e} (tol 1e-9); MC trace distance {mc_worst:.4} (tol {tol_mc:.4})"
            ),
        ))
    })
}

/// Criterion 3: T = W and integer W for 50 random dark-free chiral models.
pub fn criterion_3_phase_winding_identity() -> Check {
    check("C3", "phase = winding on 50 chiral models", || {
        let mut rng = fixture_rng(3);
        let mut worst_tw = 0.0f64;
        let mut worst_int = 0.0f64;
        for _ in 0..50 {
            let model = random_chiral(&mut rng);
            let kind = PropagatorKind::Cc { gamma: 1.0 };
            let (t, n_p, _) = jumptime_phase_converged(&model, &kind, 0, 512)?;
            let w = winding_number(&model, 0, n_p)?.value;
            worst_tw = worst_tw.max((t - w).abs());
            worst_int = worst_int.max((w - w.round()).abs());
        }
        Ok((
            worst_tw <= 1e-6 && worst_int <= 1e-6,
            format!("max|T-W| = {worst_tw:.2e}, max|W-round(W)| = {worst_int:.2e} (tol 1e-6)"),
        ))
    })
}

/// Criterion 4: T = W + R₁ + R₂ for 20 random models with h_z ≠ 0.
pub fn criterion_4_decomposition_identity() -> Check {
    check("C4", "decomposition identity with h_z != 0", || {
        let mut rng = fixture_rng(4);
        let gamma = 1.0;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let model = random_with_hz(&mut rng);
            let kind = PropagatorKind::Cc { gamma };
            let (t, n_p, _) = jumptime_phase_converged(&model, &kind, 0, 512)?;
            let w = winding_number(&model, 0, n_p)?.value;
            let (r1, r2) = residual_terms(&model, 0, gamma, n_p)?;
            worst = worst.max((t - (w + r1 + r2)).abs());
        }
        Ok((
            worst <= 1e-6,
            format!("max|T-(W+R1+R2)| = {worst:.2e} (tol 1e-6)"),
        ))
    })
}

/// Criterion 5: TRS forces both residuals below 1e−10; inversion alone
/// does not (witness above 1e−4 in the fixture set).
pub fn criterion_5_symmetry_residuals() -> Check {
    check("C5", "symmetry-forced residual vanishing", || {
        let mut rng = fixture_rng(5);
        let gamma = 1.0;
        let mut worst_trs = 0.0f64;
        for _ in 0..10 {
            let model = random_trs(&mut rng);
            let rep = model.symmetry_check(&MomentumGrid::one_d(128));
            if !rep.trs {
                return Ok((false, "TRS fixture generator produced a non-TRS model".into()));
            }
            let (r1, r2) = residual_terms(&model, 0, gamma, 2048)?;
            worst_trs = worst_trs.max(r1.abs().max(r2.abs()));
        }
        let mut witness = 0.0f64;
        for _ in 0..10 {
            let model = random_inversion_only(&mut rng);
            let rep = model.symmetry_check(&MomentumGrid::one_d(128));
            if !rep.inversion || rep.trs {
                return Ok((false, "inversion fixture generator failed".into()));
            }
            let (r1, r2) = residual_terms(&model, 0, gamma, 2048)?;
            witness = witness.max(r1.abs().max(r2.abs()));
        }
        Ok((
            worst_trs <= 1e-10 && witness > 1e-4,
            format!("TRS max residual {worst_trs:.2e} (tol 1e-10); inversion witness {witness:.2e} (> 1e-4)"),
        ))
    })
}

/// Criterion 6a: projector phases vanish; the collective+B mixture phase is
/// the rate-weighted collective phase.
pub fn criterion_6a_projector_and_mixture_phases() -> Check {
    check("C6a", "projector and cc+B mixture phases", || {
        let model = ModelSpec::ssh(0.2, 0.5);
        let gamma = 1.0;
        let mut details = String::new();
        let (ta, _, _) =
            jumptime_phase_converged(&model, &PropagatorKind::SublatticeA { gamma }, 0, 512)?;
        let (tb, _, _) =
            jumptime_phase_converged(&model, &PropagatorKind::SublatticeB { gamma }, 0, 512)?;
        let mut ok = ta.abs() <= 1e-8 && tb.abs() <= 1e-8;
        let _ = write!(details, "|T_A| = {:.2e}, |T_B| = {:.2e}; ", ta.abs(), tb.abs());
        let (t_cc, _, _) =
            jumptime_phase_converged(&model, &PropagatorKind::Cc { gamma }, 0, 512)?;
        for share in [0.25, 0.5, 0.75] {
            let kind = PropagatorKind::MixtureCcB {
                gamma_cc: share * gamma,
                gamma_b: (1.0 - share) * gamma,
            };
            let (t, _, _) = jumptime_phase_converged(&model, &kind, 0, 512)?;
            let defect = (t - share * t_cc).abs();
            ok &= defect <= 1e-8;
            let _ = write!(details, "share {share}: defect {defect:.2e}; ");
        }
        Ok((ok, details))
    })
}

/// Criterion 6b: the collective + A-projector mixture phase, implemented
/// exactly as specified (|T| ≤ 1e−8 at equal rates). Three independent
/// routes in this artifact agree that this phase does NOT vanish at finite
/// γ (see the decisions ledger): expected red, reported honestly.
pub fn criterion_6b_cc_plus_a_phase() -> Check {
    check("C6b", "cc+A mixture phase vanishes (documented defect)", || {
        let model = ModelSpec::ssh(0.2, 0.5);
        let mix = DissipatorSpec::Mixture {
            components: vec![
                DissipatorSpec::collective(1.0),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::A,
                    gamma: 1.0,
                },
            ],
        };
        let kind = PropagatorKind::Empirical(mix);
        let (t, _, _) = jumptime_phase_converged(&model, &kind, 0, 512)?;
        Ok((
            t.abs() <= 1e-8,
            format!(
                "T_cc+A = {t:.6} at equal rates gamma=1 (kernel, dense map and MC agree; vanishes only as gamma -> infinity)"
            ),
        ))
    })
}

/// Criterion 7: the phase is invariant under the kick profile, and local
/// collapse homogenizes the momentum diagonal in exactly one step.
pub fn criterion_7_g_invariance() -> Check {
    check("C7", "kick-profile invariance + homogenization", || {
        let model = ModelSpec::ssh(0.2, 0.5);
        let gamma = 1.0;
        let mut phases = Vec::new();
        for g in [
            KickDistribution::Delta,
            KickDistribution::Uniform,
            KickDistribution::Gaussian { sigma: 1.0 },
        ] {
            phases.push(ti_phase_direct(&model, &g, gamma, 0, 1024)?);
        }
        let spread = phases
            .iter()
            .map(|p| (p - phases[0]).abs())
            .fold(0.0, f64::max);

        // One-step homogenization under the uniform profile, exact on grid.
        let grid = MomentumGrid::one_d(64);
        let mut data = DensityKernel::localized(&grid, &[0]).data().clone();
        data[[5, 5]] *= 3.0;
        data[[20, 20]] *= 0.1;
        let total: f64 =
            (0..grid.len()).map(|i| data[[i, i]].re).sum::<f64>() * grid.cell_volume();
        data.mapv_inplace(|v| v / total);
        let kernel = DensityKernel::from_parts(grid.clone(), data);
        let kick = DissipatorSpec::Kick {
            g: KickDistribution::Uniform,
            gamma,
        };
        let evolved = evolve_kernel(&kernel, &model, &kick, 1)?;
        let target = 1.0 / (2.0 * std::f64::consts::PI);
        let hom_defect = evolved
            .diagonal()
            .iter()
            .map(|d| (d - target).abs())
            .fold(0.0, f64::max);
        Ok((
            spread <= 1e-6 && hom_defect <= 1e-12,
            format!("phase spread {spread:.2e} (tol 1e-6); homogenization defect {hom_defect:.2e} (tol 1e-12)"),
        ))
    })
}

/// Criterion 8: two-dimensional torus phases, slice spreads and Chern.
pub fn criterion_8_torus_2d() -> Check {
    check("C8", "2D torus phases and Chern", || {
        let kind = PropagatorKind::Cc { gamma: 1.0 };
        let nontrivial = topology_report(&ModelSpec::torus2d(6.0, 10.0, 1.0), &kind, 64)?;
        let trivial = topology_report(&ModelSpec::torus2d(14.0, 10.0, 1.0), &kind, 64)?;
        let t1 = nontrivial.axes[0].phase;
        let t2 = nontrivial.axes[1].phase;
        let t1_triv = trivial.axes[0].phase;
        let t2_triv = trivial.axes[1].phase;
        let spread = nontrivial.axes[0]
            .winding_spread
            .max(nontrivial.axes[1].winding_spread)
            .max(trivial.axes[0].winding_spread);
        let chern = nontrivial
            .chern
            .unwrap()
            .abs()
            .max(trivial.chern.unwrap().abs());
        let ok = (t1 + 1.0).abs() <= 1e-6
            && t2.abs() <= 1e-6
            && t1_triv.abs() <= 1e-6
            && t2_triv.abs() <= 1e-6
            && spread <= 1e-8
            && chern <= 1e-6;
        Ok((
            ok,
            format!(
                "T1 = {t1:.8} (-1), T2 = {t2:.1e}, trivial T1 = {t1_triv:.1e}; slice spread {spread:.1e}; |C| = {chern:.1e}"
            ),
        ))
    })
}

/// Criterion 9: primitive-vector covariance and displacement invariance.
pub fn criterion_9_primitive_vector_covariance() -> Check {
    check("C9", "primitive-vector covariance", || {
        let model = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let mut details = String::new();
        let mut ok = true;
        for m in [-1i64, 2] {
            match transform_phases(&model, 1.0, m, 64) {
                Ok(chk) => {
                    ok &= chk.law_defect <= 1e-6 && chk.displacement_defect <= 1e-6;
                    let _ = write!(
                        details,
                        "m={m}: law {:.1e}, displacement {:.1e}; ",
                        chk.law_defect, chk.displacement_defect
                    );
                }
                Err(e) => {
                    ok = false;
                    let _ = write!(details, "m={m}: {e}; ");
                }
            }
        }
        Ok((ok, details))
    })
}

/// Criterion 10: closed-form steady state against the numeric null space,
/// stationarity residual, current limits, and smooth-vs-step contrast.
pub fn criterion_10_steady_state() -> Check {
    check("C10", "steady state and crossover", || {
        let model = ModelSpec::ssh(0.2, 0.5);
        let gamma = 1.0;
        let grid = MomentumGrid::one_d(16);
        let blocks = steady_state_blocks(&model, &DissipatorSpec::collective(gamma), &grid)?;
        let mut worst_match = 0.0f64;
        for (i, k) in grid.iter() {
            let closed = bloch_steady_state(&model, gamma, &k)?;
            let b = &blocks[i];
            let num = [
                (b.0[0][1] + b.0[1][0]).re,
                (jumptime_core::linalg::I * (b.0[0][1] - b.0[1][0])).re,
                (b.0[0][0] - b.0[1][1]).re,
            ];
            for j in 0..3 {
                worst_match = worst_match.max((closed[j] - num[j]).abs());
            }
        }

        // Stationarity: the closed form annihilates the per-momentum
        // Lindblad generator for random parameters.
        let mut rng = fixture_rng(10);
        let mut worst_res = 0.0f64;
        for _ in 0..50 {
            let v = uniform(&mut rng, 0.1, 2.0);
            let w = uniform(&mut rng, 0.1, 2.0);
            let g = uniform(&mut rng, 0.1, 3.0);
            let k = uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI);
            let m = ModelSpec::ssh(v, w);
            let r = bloch_steady_state(&m, g, &[k, 0.0])?;
            let h = m.bloch_vector(&[k, 0.0]);
            let hm = Mat2::from_pauli(c(0.0, 0.0), c(h.hx, 0.0), c(h.hy, 0.0), c(0.0, 0.0));
            let rho = Mat2::from_pauli(
                c(0.5, 0.0),
                c(0.5 * r[0], 0.0),
                c(0.5 * r[1], 0.0),
                c(0.5 * r[2], 0.0),
            );
            let l = Mat2::transfer(0, 1);
            let ldl = l.adjoint().mul(&l);
            let comm = hm.mul(&rho).sub(&rho.mul(&hm)).scale(c(0.0, -1.0));
            let gain = l.mul(&rho).mul(&l.adjoint());
            let loss = ldl.mul(&rho).add(&rho.mul(&ldl)).scale(c(0.5, 0.0));
            let rhs = comm.add(&gain.sub(&loss).scale(c(g, 0.0)));
            worst_res = worst_res.max(rhs.max_abs());
        }

        // Current limits and smoothness.
        let g = 0.01;
        let hi = ssh_steady_current(1.0, 10.0, g);
        let lo = ssh_steady_current(10.0, 1.0, g);
        let limit_ok =
            (hi - g / 2.0).abs() <= 0.01 * g / 2.0 && lo.abs() <= 0.01 * g / 2.0;
        let eps = 1e-8;
        let smooth =
            (ssh_steady_current(1.0 - eps, 1.0, 0.5) - ssh_steady_current(1.0 + eps, 1.0, 0.5))
                .abs();
        let step = 1.0; // a·T steps by a across v = w by construction.
        let ok = worst_match <= 1e-8 && worst_res <= 1e-12 && limit_ok && smooth <= 1e-6;
        Ok((
            ok,
            format!(
                "closed-vs-numeric {worst_match:.2e} (1e-8); Lindblad residual {worst_res:.2e} (1e-12); limits ok = {limit_ok}; |dJ| at v=w {smooth:.1e} vs step {step}"
            ),
        ))
    })
}

/// Criterion 11: the directional-hop worked example, exact in jumptime and
/// linear in walltime.
pub fn criterion_11_directional_hop() -> Check {
    check("C11", "directional-hop worked example", || {
        // Per trajectory: displacement is exactly one cell per jump.
        let model = ModelSpec::directional_chain(0.25);
        let hop = DissipatorSpec::DirectionalHop { gamma: 1.0 };
        let runner = TrajectoryRunner::new(&model, &hop, &[64], &[3])?;
        let init = PureState::localized(&[64], &[3], 0);
        let mut worst_traj = 0.0f64;
        for index in 0..10 {
            let record = runner.run(&init, &Readout::Jumptime { n_max: 4 }, 21, index)?;
            for (n, snap) in record.snapshots.iter().enumerate() {
                let x = snap.as_ref().unwrap().mean_x[0];
                worst_traj = worst_traj.max((x - (3.0 + n as f64)).abs());
            }
        }

        // Via the dense jumptime map (small hopping keeps the wrap leakage
        // of the infinite-time integral below the tolerance).
        let dims = [16usize];
        let map_model = ModelSpec::directional_chain(0.05);
        let mut rho = DenseDensityMatrix::localized(&dims, &[2], 0);
        let mut worst_map = 0.0f64;
        for n in 1..=3 {
            rho = jumptime_map(&rho, &map_model, &hop, &dims)?.rho;
            let x = rho.mean_displacement(&dims, &[2])[0];
            worst_map = worst_map.max((x - (2.0 + n as f64)).abs());
        }

        // Walltime: ⟨x⟩_t = a j₀ + a γ t from the master integrator.
        let t = 2.0;
        let wall = integrate_master(
            &DenseDensityMatrix::localized(&[32], &[2], 0),
            &ModelSpec::directional_chain(0.25),
            &hop,
            &[32],
            t,
            1e-10,
        )?;
        let wall_err = (wall.mean_displacement(&[32], &[2])[0] - (2.0 + t)).abs();

        let ok = worst_traj <= 1e-12 && worst_map <= 1e-12 && wall_err <= 1e-4;
        Ok((
            ok,
            format!(
                "per-trajectory {worst_traj:.1e} (1e-12); map {worst_map:.1e} (1e-12); walltime {wall_err:.1e} (1e-4, wrap-leakage bound)"
            ),
        ))
    })
}

/// Run the whole suite in criterion order.
pub fn run_all() -> Vec<Check> {
    vec![
        criterion_1_transport_statistics(),
        criterion_2_oracle_chain(),
        criterion_3_phase_winding_identity(),
        criterion_4_decomposition_identity(),
        criterion_5_symmetry_residuals(),
        criterion_6a_projector_and_mixture_phases(),
        criterion_6b_cc_plus_a_phase(),
        criterion_7_g_invariance(),
        criterion_8_torus_2d(),
        criterion_9_primitive_vector_covariance(),
        criterion_10_steady_state(),
        criterion_11_directional_hop(),
    ]
}
