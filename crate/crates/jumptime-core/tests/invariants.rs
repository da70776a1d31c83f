//! Property tests for the spec-level invariants that hold over whole
//! families of inputs rather than fixed fixtures.

use jumptime_core::bloch::{Lattice, ModelSpec};
use jumptime_core::dissipator::{DissipatorSpec, KickDistribution, Sublattice};
use jumptime_core::grid::MomentumGrid;
use jumptime_core::linalg::c;
use jumptime_core::propagator::{evolve_kernel, DensityKernel};
use jumptime_core::reference::{jumptime_map, DenseDensityMatrix};
use jumptime_core::trajectory::PureState;
use jumptime_core::accumulator::WelfordVec;
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

/// Random dark-free chiral 1D model from a few Fourier harmonics.
fn chiral_model_strategy() -> impl Strategy<Value = ModelSpec> {
    let coeff = -0.6f64..0.6f64;
    (
        prop::collection::vec(coeff.clone(), 6),
        0.05f64..0.9f64,
    )
        .prop_filter_map("dark-free", |(cs, offset)| {
            let harmonics = vec![
                (
                    [0, 0],
                    [c(0.0, 0.0), c(offset + 1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                ),
                (
                    [1, 0],
                    [c(0.0, 0.0), c(cs[0], cs[1]), c(cs[2], cs[3]), c(0.0, 0.0)],
                ),
                (
                    [2, 0],
                    [c(0.0, 0.0), c(cs[4], 0.0), c(0.0, cs[5]), c(0.0, 0.0)],
                ),
            ];
            let model =
                ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 }).ok()?;
            let probe = model.h_perp_min(&MomentumGrid::one_d(128));
            (probe.min > 0.05 * model.energy_scale()).then_some(model)
        })
}

/// Random normalized density matrix on a small lattice as a mixture of a
/// few random pure states.
fn random_density(dims: usize, seed: u64) -> Array2<Complex64> {
    // Cheap deterministic pseudo-random stream.
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let n = 2 * dims;
    let mut rho: Array2<Complex64> = Array2::zeros((n, n));
    for _ in 0..3 {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        let ns: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        for i in 0..n {
            for j in 0..n {
                rho[[i, j]] += v[i] * v[j].conj() / (3.0 * ns);
            }
        }
    }
    rho
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The jumptime map preserves Hermiticity and positivity on random
    /// valid inputs over random dark-free chiral models.
    #[test]
    fn jumptime_map_preserves_hermiticity_and_positivity(
        model in chiral_model_strategy(),
        seed in 0u64..1_000_000,
    ) {
        let dims = [8usize];
        let cc = DissipatorSpec::collective(1.0);
        let rho = DenseDensityMatrix::new(random_density(8, seed));
        let out = jumptime_map(&rho, &model, &cc, &dims).unwrap();
        prop_assert!(out.rho.hermiticity_defect() < 1e-12);
        prop_assert!(out.rho.min_eigenvalue().unwrap() > -1e-10);
    }

    /// Propagator normalization and contraction over random chiral models.
    #[test]
    fn propagator_normalized_and_contractive(model in chiral_model_strategy()) {
        let grid = MomentumGrid::one_d(32);
        for (_, k) in grid.iter().step_by(5) {
            let diag = jumptime_core::propagator::k_cc(&model, 1.0, &k, &k).unwrap();
            prop_assert!((diag - c(1.0, 0.0)).norm() < 1e-12);
            for (_, kp) in grid.iter().step_by(7) {
                let v = jumptime_core::propagator::k_cc(&model, 1.0, &k, &kp).unwrap();
                prop_assert!(v.norm() <= 1.0 + 1e-12);
            }
        }
    }

    /// Kick-family channel rate is independent of G (it always equals
    /// γ × B-population).
    #[test]
    fn kick_rate_independent_of_g(sigma in 0.2f64..3.0f64, seed in 0u64..100) {
        let dims = [16usize];
        let mut state = PureState::localized(&dims, &[seed as i64 % 16], 1);
        // Mix in some A-weight to make the populations nontrivial.
        let amps = state.amps_mut();
        amps[3][0] = c(0.4, 0.1);
        amps[7][0] = c(-0.2, 0.3);
        state.normalize();
        let (_, pop_b) = state.sublattice_populations();
        let gamma = 0.8;
        let mut rates = Vec::new();
        for g in [
            KickDistribution::Delta,
            KickDistribution::Uniform,
            KickDistribution::Gaussian { sigma },
        ] {
            let d = DissipatorSpec::Kick { g, gamma };
            let ch = d.jump_channels(&state);
            rates.push(ch[0].1);
        }
        for r in &rates {
            prop_assert!((r - gamma * pop_b).abs() < 1e-12);
        }
    }

    /// Welford merge is associative and commutative up to fp reassociation.
    #[test]
    fn welford_merge_laws(
        xs in prop::collection::vec(-10.0f64..10.0, 3..40),
        split in 0usize..40,
    ) {
        let k = split % xs.len().max(1);
        let mut a = WelfordVec::new(1);
        let mut b = WelfordVec::new(1);
        for (i, x) in xs.iter().enumerate() {
            if i < k { a.push(&[*x]); } else { b.push(&[*x]); }
        }
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        if ab.count >= 2 {
            prop_assert!((ab.mean()[0] - ba.mean()[0]).abs() <= 1e-12);
            prop_assert!((ab.variance(0) - ba.variance(0)).abs() <= 1e-12);
        }
    }

    /// Hermiticity preservation and nonnegative diagonal of the kernel
    /// evolution over random chiral models.
    #[test]
    fn kernel_evolution_stays_hermitian(model in chiral_model_strategy()) {
        let grid = MomentumGrid::one_d(24);
        let kernel = DensityKernel::localized(&grid, &[2]);
        let out = evolve_kernel(&kernel, &model, &DissipatorSpec::collective(1.0), 3).unwrap();
        prop_assert!(out.max_hermiticity_defect() < 1e-12);
        for d in out.diagonal() {
            prop_assert!(d >= -1e-12);
        }
    }

    /// Per-step displacement from a homogeneous kernel is identical across
    /// Delta / Uniform / Gaussian kick profiles.
    #[test]
    fn transport_invariant_under_g(model in chiral_model_strategy()) {
        let grid = MomentumGrid::one_d(32);
        let kernel = DensityKernel::homogeneous(&grid);
        let mut steps = Vec::new();
        for g in [
            KickDistribution::Delta,
            KickDistribution::Uniform,
            KickDistribution::Gaussian { sigma: 1.0 },
        ] {
            let d = DissipatorSpec::Kick { g, gamma: 1.0 };
            let out = evolve_kernel(&kernel, &model, &d, 1).unwrap();
            steps.push(out.mean_displacement().0[0]);
        }
        prop_assert!((steps[0] - steps[1]).abs() <= 1e-10, "{steps:?}");
        prop_assert!((steps[0] - steps[2]).abs() <= 1e-10, "{steps:?}");
    }

    /// Collective collapse and the B projector produce bitwise-identical
    /// effective Hamiltonian blocks at equal rate.
    #[test]
    fn cc_and_projector_share_h_eff(model in chiral_model_strategy(), gamma in 0.1f64..3.0) {
        let grid = MomentumGrid::one_d(16);
        let a = DissipatorSpec::Collective { target: Sublattice::A, gamma }
            .effective_hamiltonian(&model, &grid);
        let b = DissipatorSpec::SublatticeProjector { target: Sublattice::B, gamma }
            .effective_hamiltonian(&model, &grid);
        prop_assert_eq!(a.blocks, b.blocks);
    }
}
