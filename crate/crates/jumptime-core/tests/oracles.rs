//! Cross-module oracle agreement on small dense instances.
//!
//! The same physics is computed through unrelated code paths — stochastic
//! trajectories, the dense eigenbasis jumptime map, the closed-form kernel
//! evolution, and the dense master integrator — and compared pairwise.

use jumptime_core::bloch::ModelSpec;
use jumptime_core::dissipator::{DissipatorSpec, KickDistribution, Sublattice};
use jumptime_core::grid::MomentumGrid;
use jumptime_core::propagator::{evolve_kernel, DensityKernel};
use jumptime_core::reference::{
    dense_momentum_to_kernel, integrate_master, jumptime_map, kernel_to_dense_momentum,
    momentum_to_real, real_to_momentum, steady_state_blocks, trace_distance,
    DenseDensityMatrix,
};
use jumptime_core::trajectory::{
    ensemble_density_matrices, DensityReadout, PureState, TrajectoryRunner,
};

const DIMS: [usize; 1] = [16];

fn ssh() -> ModelSpec {
    ModelSpec::ssh(0.2, 0.5)
}

fn localized_dense_on_a() -> DenseDensityMatrix {
    DenseDensityMatrix::localized(&DIMS, &[0], 0)
}

/// Dense map vs closed-form kernel evolution, for every scalar-kernel
/// dissipator in the catalog plus the uniform kick family.
#[test]
fn dense_map_agrees_with_kernel_evolution() {
    let model = ssh();
    let grid = MomentumGrid::new(&DIMS);
    let cases: Vec<(&str, DissipatorSpec, Sublattice)> = vec![
        ("collective", DissipatorSpec::collective(1.0), Sublattice::A),
        (
            "sublattice_A",
            DissipatorSpec::SublatticeProjector {
                target: Sublattice::A,
                gamma: 1.0,
            },
            Sublattice::A,
        ),
        (
            "sublattice_B",
            DissipatorSpec::SublatticeProjector {
                target: Sublattice::B,
                gamma: 1.0,
            },
            Sublattice::B,
        ),
        (
            "mixture_cc_B",
            DissipatorSpec::Mixture {
                components: vec![
                    DissipatorSpec::collective(0.5),
                    DissipatorSpec::SublatticeProjector {
                        target: Sublattice::B,
                        gamma: 0.5,
                    },
                ],
            },
            Sublattice::A, // placeholder; handled below
        ),
        (
            "kick_uniform",
            DissipatorSpec::Kick {
                g: KickDistribution::Uniform,
                gamma: 1.0,
            },
            Sublattice::A,
        ),
    ];
    for (name, diss, subl) in cases {
        if name == "mixture_cc_B" {
            // The mixture acts on the invariant intracell state; compare the
            // dense map against the scalar kernel on both sublattice blocks.
            let k0 = DensityKernel::localized(&grid, &[0]);
            let k1 = evolve_kernel(&k0, &model, &diss, 1).unwrap();
            // Dense start: localized cell with the invariant intracell
            // state ρ_inv = ½|A⟩⟨A| + ½|B⟩⟨B| (γ_cc = γ_B).
            let mut dense0: ndarray::Array2<num_complex::Complex64> =
                ndarray::Array2::zeros((32, 32));
            dense0[[0, 0]] = num_complex::Complex64::new(0.5, 0.0);
            dense0[[1, 1]] = num_complex::Complex64::new(0.5, 0.0);
            let dense0 = DenseDensityMatrix::new(dense0);
            let step = jumptime_map(&dense0, &model, &diss, &DIMS).unwrap();
            let mom = real_to_momentum(&step.rho.matrix, &DIMS);
            // Reduced kernels on A and B blocks must both evolve by the same
            // scalar propagator, weighted by the invariant state.
            for s in [Sublattice::A, Sublattice::B] {
                let got = dense_momentum_to_kernel(&mom, &grid, s);
                let mut worst = 0.0f64;
                for i in 0..grid.len() {
                    for j in 0..grid.len() {
                        let expect = k1.data()[[i, j]] * 0.5;
                        let d = (got.data()[[i, j]] - expect).norm();
                        worst = worst.max(d);
                    }
                }
                assert!(worst < 1e-9, "{name}/{s:?}: max diff {worst:.2e}");
            }
            continue;
        }
        let k0 = DensityKernel::localized(&grid, &[0]);
        let k1 = evolve_kernel(&k0, &model, &diss, 2).unwrap();
        let dense0 = DenseDensityMatrix::new(momentum_to_real(
            &kernel_to_dense_momentum(&k0, subl),
            &DIMS,
        ));
        let step1 = jumptime_map(&dense0, &model, &diss, &DIMS).unwrap();
        let step2 = jumptime_map(&step1.rho, &model, &diss, &DIMS).unwrap();
        let dense_from_kernel = momentum_to_real(&kernel_to_dense_momentum(&k1, subl), &DIMS);
        let worst = (&step2.rho.matrix - &dense_from_kernel)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{name}: max elementwise diff {worst:.2e}");
    }
}

/// Jumptime readout: Monte-Carlo ensemble density matrix vs the dense map.
#[test]
fn trajectories_agree_with_jumptime_map() {
    let model = ssh();
    let diss = DissipatorSpec::collective(1.0);
    let runner = TrajectoryRunner::new(&model, &diss, &DIMS, &[0]).unwrap();
    let init = PureState::localized(&DIMS, &[0], 0);
    let n_traj = 5_000u64;
    let mc = ensemble_density_matrices(
        &runner,
        &init,
        &DensityReadout::Jumptime(vec![1, 2]),
        n_traj,
        2024,
    )
    .unwrap();

    let dense0 = localized_dense_on_a();
    let step1 = jumptime_map(&dense0, &model, &diss, &DIMS).unwrap();
    let step2 = jumptime_map(&step1.rho, &model, &diss, &DIMS).unwrap();

    let tol = 5.0 / (n_traj as f64).sqrt();
    for (mc_mom, exact) in mc.iter().zip([&step1.rho, &step2.rho]) {
        let mc_real = momentum_to_real(mc_mom, &DIMS);
        let d = trace_distance(&mc_real, &exact.matrix).unwrap();
        assert!(d <= tol, "trace distance {d:.4} exceeds {tol:.4}");
    }
}

/// Walltime readout: Monte-Carlo ensemble vs the dense master integrator.
#[test]
fn trajectories_agree_with_master_equation() {
    let model = ssh();
    let diss = DissipatorSpec::collective(1.0);
    let runner = TrajectoryRunner::new(&model, &diss, &DIMS, &[0]).unwrap();
    let init = PureState::localized(&DIMS, &[0], 0);
    let n_traj = 4_000u64;
    let t = 3.0;
    let mc = ensemble_density_matrices(
        &runner,
        &init,
        &DensityReadout::Walltime(vec![t]),
        n_traj,
        77,
    )
    .unwrap();
    let exact = integrate_master(&localized_dense_on_a(), &model, &diss, &DIMS, t, 1e-9).unwrap();
    let d = trace_distance(&momentum_to_real(&mc[0], &DIMS), &exact.matrix).unwrap();
    let tol = 5.0 / (n_traj as f64).sqrt();
    assert!(d <= tol, "trace distance {d:.4} exceeds {tol:.4}");
}

/// Long-time master integration lands on the per-momentum steady state.
#[test]
fn master_equation_converges_to_steady_state() {
    let model = ssh();
    let diss = DissipatorSpec::collective(1.0);
    let grid = MomentumGrid::new(&DIMS);
    let long = integrate_master(
        &localized_dense_on_a(),
        &model,
        &diss,
        &DIMS,
        60.0,
        1e-10,
    )
    .unwrap();
    let blocks = steady_state_blocks(&model, &diss, &grid).unwrap();
    let mom = real_to_momentum(&long.matrix, &DIMS);
    let mut worst = 0.0f64;
    for (k, b) in blocks.iter().enumerate() {
        for s in 0..2 {
            for sp in 0..2 {
                // Uniform momentum weights: each block carries 1/N.
                let expect = b.0[s][sp] / grid.len() as f64;
                worst = worst.max((mom[[2 * k + s, 2 * k + sp]] - expect).norm());
            }
        }
    }
    assert!(worst < 1e-6, "max block difference {worst:.2e}");
}

/// The jumptime map keeps translation-invariant states momentum-block
/// diagonal.
#[test]
fn jumptime_map_preserves_momentum_blocks() {
    let model = ssh();
    let diss = DissipatorSpec::collective(1.0);
    let grid = MomentumGrid::new(&DIMS);
    // Translation-invariant start: uniform momentum diagonal on A.
    let kernel = DensityKernel::homogeneous(&grid);
    let dense0 = DenseDensityMatrix::new(momentum_to_real(
        &kernel_to_dense_momentum(&kernel, Sublattice::A),
        &DIMS,
    ));
    let out = jumptime_map(&dense0, &model, &diss, &DIMS).unwrap();
    let mom = real_to_momentum(&out.rho.matrix, &DIMS);
    let mut off = 0.0f64;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            if i == j {
                continue;
            }
            for s in 0..2 {
                for sp in 0..2 {
                    off = off.max(mom[[2 * i + s, 2 * j + sp]].norm());
                }
            }
        }
    }
    assert!(off < 1e-12, "off-block leakage {off:.2e}");
}

/// Trace behavior of the map: preserved when dark-free, deficient exactly
/// when contacts exist and the state overlaps them.
#[test]
fn jumptime_map_trace_accounting() {
    let grid = MomentumGrid::new(&DIMS);
    let diss = DissipatorSpec::collective(1.0);

    let clean = ssh();
    assert!(diss.dark_set_report(&clean, &grid).is_dark_free);
    let out = jumptime_map(&localized_dense_on_a(), &clean, &diss, &DIMS).unwrap();
    assert!((out.trace - 1.0).abs() <= 1e-9);
    assert!(out.trace_deficit.abs() <= 1e-9);

    // v = w: the grid momentum k = π is a dark contact; a localized state
    // overlaps it, so one application must leak trace.
    let critical = ModelSpec::ssh(0.5, 0.5);
    let report = diss.dark_set_report(&critical, &grid);
    assert!(!report.is_dark_free);
    let out = jumptime_map(&localized_dense_on_a(), &critical, &diss, &DIMS);
    let r = out.expect("dark components leak trace, the map itself converges");
    assert!(r.trace_deficit > 1e-6, "deficit {}", r.trace_deficit);
}
