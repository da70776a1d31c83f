//! Exact quantum-jump trajectory engine.
//!
//! States live in the momentum basis, where every catalog effective
//! Hamiltonian is block-diagonal: no-jump evolution multiplies each
//! momentum block by a closed-form 2×2 exponential, so there is no
//! integrator error anywhere in a trajectory. Waiting times are drawn by
//! inverting the exact survival norm (bracket doubling, then bisection),
//! removing the O(dt) bias of step-based jump tests.
//!
//! Trajectories are reproducible: trajectory `i` of a run draws from
//! `ChaCha12` seeded with the base seed on stream `i`, and ensemble merges
//! happen in fixed index order regardless of thread count.

use crate::accumulator::{EnsembleAccumulator, ObservableSet};
use crate::bloch::ModelSpec;
use crate::dissipator::{ChannelId, DissipatorSpec, EffectiveBlocks};
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::linalg::{c, norm_sq2, C64};
use crate::Result;
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Waiting times are abandoned (dark-trapped) past `50/γ`.
pub const TAU_MAX_OVER_GAMMA: f64 = 50.0;
/// Identifier of the trajectory RNG scheme, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha12/stream-per-trajectory";
/// Fixed ensemble chunk size; part of the deterministic merge order.
const CHUNK: u64 = 32;

/// Normalized pure state over (momentum, sublattice).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<[C64; 2]>,
}

impl PureState {
    pub fn zero(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        PureState {
            dims: dims.to_vec(),
            amps: vec![[c(0.0, 0.0); 2]; n],
        }
    }

    /// `|j₀⟩ ⊗ |s⟩` in the momentum basis: `ψ̃(k, s) = e^{−i k·j₀}/√N`.
    pub fn localized(dims: &[usize], cell: &[i64], sublattice: usize) -> Self {
        let mut state = Self::zero(dims);
        let grid = state.grid();
        let n = grid.len() as f64;
        let scale = 1.0 / n.sqrt();
        for (i, k) in grid.iter() {
            let phase: f64 = (0..dims.len()).map(|a| -k[a] * cell[a] as f64).sum();
            state.amps[i][sublattice] = c(phase.cos(), phase.sin()) * scale;
        }
        state
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn grid(&self) -> MomentumGrid {
        MomentumGrid::new(&self.dims)
    }

    pub fn amps(&self) -> &[[C64; 2]] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [[C64; 2]] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(norm_sq2).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.amps {
            a[0] *= s;
            a[1] *= s;
        }
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
    }

    pub fn sublattice_populations(&self) -> (f64, f64) {
        let mut pa = 0.0;
        let mut pb = 0.0;
        for a in &self.amps {
            pa += a[0].norm_sqr();
            pb += a[1].norm_sqr();
        }
        (pa, pb)
    }

    /// Collapse `|to⟩⟨from|` applied in place (unnormalized).
    pub(crate) fn collapse_between(&mut self, from: usize, to: usize) {
        for a in &mut self.amps {
            a[to] = a[from];
            a[from] = c(0.0, 0.0);
        }
    }

    pub(crate) fn project_sublattice(&mut self, keep: usize) {
        for a in &mut self.amps {
            a[1 - keep] = c(0.0, 0.0);
        }
    }

    /// `L_q = e^{iq x̂} ⊗ |A⟩⟨B|` with `q` the grid point of flat index
    /// `q_flat`: boosts momentum by `q` and collapses B → A.
    pub(crate) fn kick_collapse(&mut self, q_flat: usize) {
        let grid = self.grid();
        let old = self.amps.clone();
        for i in 0..self.amps.len() {
            let src = grid.unshift(i, q_flat);
            self.amps[i][0] = old[src][1];
            self.amps[i][1] = c(0.0, 0.0);
        }
    }

    /// `Σ_j |j+1⟩⟨j| ⊗ 1 = e^{−ip̂}` along axis 0: a pure momentum phase.
    pub(crate) fn directional_hop(&mut self) {
        let grid = self.grid();
        for (i, k) in grid.iter() {
            let phase = c((-k[0]).cos(), (-k[0]).sin());
            self.amps[i][0] *= phase;
            self.amps[i][1] *= phase;
        }
    }

    /// Apply `exp(−i H_eff(k) τ)` per momentum block (norm non-increasing).
    pub fn evolve_nojump(&mut self, blocks: &EffectiveBlocks, tau: f64) {
        debug_assert!(tau >= 0.0);
        debug_assert_eq!(blocks.blocks.len(), self.amps.len());
        for (a, m) in self.amps.iter_mut().zip(&blocks.blocks) {
            *a = m.exp_minus_i_tau(tau).apply(a);
        }
    }

    /// Squared norm after no-jump evolution for time `tau` (state untouched).
    pub fn survival_norm_sq(&self, blocks: &EffectiveBlocks, tau: f64) -> f64 {
        self.amps
            .iter()
            .zip(&blocks.blocks)
            .map(|(a, m)| norm_sq2(&m.exp_minus_i_tau(tau).apply(a)))
            .sum()
    }

    /// Cell-basis amplitudes `ψ(j, s) = N^{-1/2} Σ_k e^{+ik·j} ψ̃(k, s)`.
    pub fn cell_amplitudes(&self) -> Vec<[C64; 2]> {
        let n = self.amps.len();
        let mut a: Vec<C64> = self.amps.iter().map(|v| v[0]).collect();
        let mut b: Vec<C64> = self.amps.iter().map(|v| v[1]).collect();
        inverse_dft(&self.dims, &mut a);
        inverse_dft(&self.dims, &mut b);
        let scale = 1.0 / (n as f64).sqrt();
        (0..n).map(|i| [a[i] * scale, b[i] * scale]).collect()
    }

    /// Occupancy per cell (both sublattices).
    pub fn position_distribution(&self) -> Vec<f64> {
        self.cell_amplitudes().iter().map(norm_sq2).collect()
    }

    pub fn momentum_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(norm_sq2).collect()
    }

    /// All position-derived observables in one pass, with coordinates
    /// centered on `center` (range `(−L/2, L/2]` cells per axis).
    pub fn observe(&self, center: &[i64]) -> ObservableSet {
        let occ = self.position_distribution();
        let grid = self.grid();
        let n_axes = self.dims.len();
        let hist_len: usize = self.dims.iter().sum();
        let mut mean_x = vec![0.0; n_axes];
        let mut pos_hist = vec![0.0; hist_len];
        let mut seam = 0.0;
        for (i, occ_i) in occ.iter().enumerate() {
            let idx = grid.unflatten(i);
            let mut near_seam = false;
            let mut base = 0usize;
            for a in 0..n_axes {
                let l = self.dims[a] as i64;
                let off = wrap_offset(idx[a] as i64 - center[a], l);
                mean_x[a] += occ_i * (center[a] + off) as f64;
                let bin = (off + (l - 1) / 2) as usize;
                pos_hist[base + bin] += occ_i;
                if off.abs() >= l / 2 - 2 {
                    near_seam = true;
                }
                base += self.dims[a];
            }
            if near_seam {
                seam += occ_i;
            }
        }
        let mom = self.momentum_distribution();
        let mut mom_hist = vec![0.0; hist_len];
        for (i, m) in mom.iter().enumerate() {
            let idx = grid.unflatten(i);
            let mut base = 0usize;
            for a in 0..n_axes {
                mom_hist[base + idx[a]] += m;
                base += self.dims[a];
            }
        }
        let (pop_a, pop_b) = self.sublattice_populations();
        ObservableSet {
            mean_x,
            pop_a,
            pop_b,
            seam_occupancy: seam,
            pos_hist,
            mom_hist,
        }
    }

    /// Mean displacement per axis with the observation window centered on
    /// `center`.
    pub fn mean_positions(&self, center: &[i64]) -> Vec<f64> {
        self.observe(center).mean_x
    }

    /// Accumulate `|ψ⟩⟨ψ|` into a dense momentum-basis matrix
    /// (row index `2k + s`).
    pub fn accumulate_outer_product(&self, acc: &mut Array2<C64>) {
        let n = self.amps.len();
        debug_assert_eq!(acc.shape(), &[2 * n, 2 * n]);
        for i in 0..n {
            for si in 0..2 {
                let vi = self.amps[i][si];
                if vi.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    for sj in 0..2 {
                        acc[[2 * i + si, 2 * j + sj]] += vi * self.amps[j][sj].conj();
                    }
                }
            }
        }
    }
}

/// Offset wrapped into `(−L/2, L/2]`.
fn wrap_offset(d: i64, l: i64) -> i64 {
    let m = d.rem_euclid(l);
    if m > l / 2 {
        m - l
    } else {
        m
    }
}

/// In-place unnormalized inverse DFT (`e^{+ik·j}` kernel) over all axes.
pub(crate) fn inverse_dft(dims: &[usize], data: &mut [C64]) {
    let mut planner = FftPlanner::<f64>::new();
    match dims.len() {
        1 => {
            let fft = planner.plan_fft_inverse(dims[0]);
            fft.process(cast(data));
        }
        2 => {
            let (n0, n1) = (dims[0], dims[1]);
            let fft1 = planner.plan_fft_inverse(n1);
            for row in 0..n0 {
                fft1.process(cast(&mut data[row * n1..(row + 1) * n1]));
            }
            let fft0 = planner.plan_fft_inverse(n0);
            let mut col = vec![c(0.0, 0.0); n0];
            for j in 0..n1 {
                for (i, v) in col.iter_mut().enumerate() {
                    *v = data[i * n1 + j];
                }
                fft0.process(cast(&mut col));
                for (i, v) in col.iter().enumerate() {
                    data[i * n1 + j] = *v;
                }
            }
        }
        _ => unreachable!("grids are 1D or 2D"),
    }
}

fn cast(x: &mut [C64]) -> &mut [Complex<f64>] {
    // rustfft re-exports the same num_complex type.
    x
}

/// Draw the waiting time: the `τ` with `‖ψ(τ)‖² = u`, by bracket doubling
/// from `1/γ` followed by bisection. Errors with `DarkTrapped` when the
/// survival norm stays above `u` out to `50/γ`.
pub fn sample_waiting_time(
    state: &PureState,
    blocks: &EffectiveBlocks,
    u: f64,
    gamma: f64,
) -> Result<f64> {
    let tau_max = TAU_MAX_OVER_GAMMA / gamma;
    let survival = |tau: f64| state.survival_norm_sq(blocks, tau);
    let mut lo = 0.0;
    let mut s_lo = state.norm_sq();
    if s_lo < u {
        return Ok(0.0);
    }
    let mut hi = 1.0 / gamma;
    let mut s_hi = survival(hi);
    while s_hi >= u {
        debug_assert!(s_hi <= s_lo + 1e-12, "survival must be non-increasing");
        if hi >= tau_max {
            return Err(CoreError::DarkTrapped {
                jumps_done: 0,
                survival: s_hi,
            });
        }
        lo = hi;
        s_lo = s_hi;
        hi = (hi * 2.0).min(tau_max);
        s_hi = survival(hi);
    }
    // Bisection on the exact survival norm.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let s_mid = survival(mid);
        debug_assert!(
            s_mid <= s_lo + 1e-12 && s_mid >= s_hi - 1e-12,
            "survival must be monotone within the bracket"
        );
        if (s_mid - u).abs() <= 1e-12 * u.max(1e-300) {
            return Ok(mid);
        }
        if s_mid >= u {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
            s_hi = s_mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Readout scheme for trajectory runs.
#[derive(Clone, Debug)]
pub enum Readout {
    /// Observe after each jump, `n = 0..=n_max`.
    Jumptime { n_max: usize },
    /// Observe at fixed walltimes (ascending).
    Walltime { times: Vec<f64> },
}

impl Readout {
    pub fn labels(&self) -> Vec<f64> {
        match self {
            Readout::Jumptime { n_max } => (0..=*n_max).map(|n| n as f64).collect(),
            Readout::Walltime { times } => times.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JumpEvent {
    pub n: usize,
    pub walltime: f64,
    pub channel: ChannelId,
}

/// Full log of one trajectory.
#[derive(Clone, Debug)]
pub struct JumpRecord {
    pub base_seed: u64,
    pub index: u64,
    pub events: Vec<JumpEvent>,
    pub snapshots: Vec<Option<ObservableSet>>,
    pub dark_trapped: bool,
}

/// Precomputed immutable context shared by every trajectory of a run.
pub struct TrajectoryRunner<'a> {
    pub model: &'a ModelSpec,
    pub dissipator: &'a DissipatorSpec,
    pub blocks: EffectiveBlocks,
    pub gamma: f64,
    pub center: Vec<i64>,
    /// Cumulative kick-mass tables per component (kick components only).
    kick_cdf: Vec<Option<Vec<f64>>>,
}

impl<'a> TrajectoryRunner<'a> {
    pub fn new(
        model: &'a ModelSpec,
        dissipator: &'a DissipatorSpec,
        dims: &[usize],
        center: &[i64],
    ) -> Result<Self> {
        dissipator.validate()?;
        if dims.len() != model.dimension() {
            return Err(CoreError::InvalidArgument(
                "lattice dimensions do not match the model".into(),
            ));
        }
        let grid = MomentumGrid::new(dims);
        let blocks = dissipator.effective_hamiltonian(model, &grid);
        let mut kick_cdf = Vec::new();
        for comp in dissipator.components() {
            if let DissipatorSpec::Kick { g, .. } = comp {
                let masses = g.masses(&grid)?;
                let mut cdf = Vec::with_capacity(masses.len());
                let mut acc = 0.0;
                for m in &masses {
                    acc += m;
                    cdf.push(acc);
                }
                kick_cdf.push(Some(cdf));
            } else {
                kick_cdf.push(None);
            }
        }
        Ok(TrajectoryRunner {
            model,
            dissipator,
            blocks,
            gamma: dissipator.total_gamma(),
            center: center.to_vec(),
            kick_cdf,
        })
    }

    pub fn rng_for(base_seed: u64, index: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
        rng.set_stream(index);
        rng
    }

    fn draw_channel(&self, state: &PureState, rng: &mut ChaCha12Rng) -> Option<ChannelId> {
        let channels = self.dissipator.jump_channels(state);
        let total: f64 = channels.iter().map(|(_, r)| r).sum();
        if total <= 1e-300 {
            return None;
        }
        let mut x: f64 = rng.random::<f64>() * total;
        let mut choice = channels.len() - 1;
        for (i, (_, r)) in channels.iter().enumerate() {
            if x < *r {
                choice = i;
                break;
            }
            x -= r;
        }
        let mut id = channels[choice].0;
        if let Some(cdf) = &self.kick_cdf[id.component] {
            let y: f64 = rng.random();
            let q = cdf.partition_point(|&cum| cum <= y).min(cdf.len() - 1);
            id.kick_index = Some(q);
        }
        Some(id)
    }

    /// Simulate one trajectory; fully determined by `(base_seed, index)`.
    pub fn run(
        &self,
        init: &PureState,
        readout: &Readout,
        base_seed: u64,
        index: u64,
    ) -> Result<JumpRecord> {
        let mut rng = Self::rng_for(base_seed, index);
        let mut state = init.clone();
        state.normalize();
        let mut record = JumpRecord {
            base_seed,
            index,
            events: Vec::new(),
            snapshots: vec![None; readout.labels().len()],
            dark_trapped: false,
        };
        match readout {
            Readout::Jumptime { n_max } => {
                record.snapshots[0] = Some(state.observe(&self.center));
                let mut t = 0.0;
                for n in 1..=*n_max {
                    let u: f64 = open_unit(&mut rng);
                    let tau = match sample_waiting_time(&state, &self.blocks, u, self.gamma) {
                        Ok(tau) => tau,
                        Err(CoreError::DarkTrapped { .. }) => {
                            // Partial record: snapshots past n−1 stay empty.
                            record.dark_trapped = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    };
                    state.evolve_nojump(&self.blocks, tau);
                    state.normalize();
                    t += tau;
                    let Some(channel) = self.draw_channel(&state, &mut rng) else {
                        record.dark_trapped = true;
                        break;
                    };
                    self.dissipator.apply_jump(channel, &mut state)?;
                    debug_assert!((state.norm() - 1.0).abs() < 1e-10);
                    record.events.push(JumpEvent {
                        n,
                        walltime: t,
                        channel,
                    });
                    record.snapshots[n] = Some(state.observe(&self.center));
                }
                Ok(record)
            }
            Readout::Walltime { times } => {
                let mut t_anchor = 0.0;
                let mut bin = 0;
                // Bins at t <= 0 observe the initial state.
                while bin < times.len() && times[bin] <= 0.0 {
                    record.snapshots[bin] = Some(state.observe(&self.center));
                    bin += 1;
                }
                let mut n = 0usize;
                while bin < times.len() {
                    let u: f64 = open_unit(&mut rng);
                    match sample_waiting_time(&state, &self.blocks, u, self.gamma) {
                        Ok(tau) => {
                            let t_next = t_anchor + tau;
                            while bin < times.len() && times[bin] <= t_next {
                                let mut probe = state.clone();
                                probe.evolve_nojump(&self.blocks, times[bin] - t_anchor);
                                probe.normalize();
                                record.snapshots[bin] = Some(probe.observe(&self.center));
                                bin += 1;
                            }
                            if bin >= times.len() {
                                break;
                            }
                            state.evolve_nojump(&self.blocks, tau);
                            state.normalize();
                            let Some(channel) = self.draw_channel(&state, &mut rng) else {
                                record.dark_trapped = true;
                                break;
                            };
                            self.dissipator.apply_jump(channel, &mut state)?;
                            n += 1;
                            t_anchor = t_next;
                            record.events.push(JumpEvent {
                                n,
                                walltime: t_anchor,
                                channel,
                            });
                        }
                        Err(CoreError::DarkTrapped { .. }) => {
                            record.dark_trapped = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                // A trapped trajectory keeps evolving without jumps.
                while bin < times.len() {
                    let mut probe = state.clone();
                    probe.evolve_nojump(&self.blocks, times[bin] - t_anchor);
                    probe.normalize();
                    record.snapshots[bin] = Some(probe.observe(&self.center));
                    bin += 1;
                }
                Ok(record)
            }
        }
    }

}

fn open_unit(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Run `n_traj` trajectories in parallel and merge their observables in
/// fixed chunk order (bitwise reproducible for any thread count).
pub fn ensemble_average(
    runner: &TrajectoryRunner,
    init: &PureState,
    readout: &Readout,
    n_traj: u64,
    base_seed: u64,
) -> Result<EnsembleAccumulator> {
    let labels = readout.labels();
    let n_axes = init.dims().len();
    let hist_len: usize = init.dims().iter().sum();
    let n_chunks = n_traj.div_ceil(CHUNK);
    let partials: Vec<Result<EnsembleAccumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = EnsembleAccumulator::new(labels.clone(), n_axes, hist_len);
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_traj);
            for index in lo..hi {
                let record = runner.run(init, readout, base_seed, index)?;
                acc.record(&record.snapshots, record.dark_trapped);
            }
            Ok(acc)
        })
        .collect();
    let mut total = EnsembleAccumulator::new(labels, n_axes, hist_len);
    for p in partials {
        total.merge(&p?);
    }
    if total.dark_trapped == total.trajectories && total.trajectories > 0 {
        return Err(CoreError::AllTrajectoriesTrapped(total.trajectories as usize));
    }
    Ok(total)
}

/// Which states to outer-product average.
#[derive(Clone, Debug)]
pub enum DensityReadout {
    /// Jump counts at which to accumulate `E[|ψ⟩⟨ψ|]`.
    Jumptime(Vec<usize>),
    /// Walltimes at which to accumulate.
    Walltime(Vec<f64>),
}

/// Monte-Carlo estimate of the ensemble density matrices (momentum basis,
/// index `2k+s`), normalized by the total trajectory count so dark-trapped
/// trajectories appear as trace deficit.
pub fn ensemble_density_matrices(
    runner: &TrajectoryRunner,
    init: &PureState,
    readout: &DensityReadout,
    n_traj: u64,
    base_seed: u64,
) -> Result<Vec<Array2<C64>>> {
    let dim = 2 * init.amps().len();
    let points = match readout {
        DensityReadout::Jumptime(ns) => ns.len(),
        DensityReadout::Walltime(ts) => ts.len(),
    };
    let n_chunks = n_traj.div_ceil(CHUNK);
    let partials: Vec<Result<Vec<Array2<C64>>>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![Array2::<C64>::zeros((dim, dim)); points];
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_traj);
            for index in lo..hi {
                match readout {
                    DensityReadout::Jumptime(ns) => {
                        let n_max = ns.iter().copied().max().unwrap_or(0);
                        let mut state = init.clone();
                        state.normalize();
                        let mut rng = TrajectoryRunner::rng_for(base_seed, index);
                        let record_at =
                            |n: usize, state: &PureState, acc: &mut Vec<Array2<C64>>| {
                                for (slot, target) in ns.iter().enumerate() {
                                    if *target == n {
                                        state.accumulate_outer_product(&mut acc[slot]);
                                    }
                                }
                            };
                        record_at(0, &state, &mut acc);
                        for n in 1..=n_max {
                            let u = open_unit(&mut rng);
                            let Ok(tau) =
                                sample_waiting_time(&state, &runner.blocks, u, runner.gamma)
                            else {
                                break;
                            };
                            state.evolve_nojump(&runner.blocks, tau);
                            state.normalize();
                            let Some(channel) = runner.draw_channel(&state, &mut rng) else {
                                break;
                            };
                            runner.dissipator.apply_jump(channel, &mut state)?;
                            record_at(n, &state, &mut acc);
                        }
                    }
                    DensityReadout::Walltime(ts) => {
                        let mut state = init.clone();
                        state.normalize();
                        let mut rng = TrajectoryRunner::rng_for(base_seed, index);
                        let mut t_anchor = 0.0;
                        let mut bin = 0;
                        while bin < ts.len() && ts[bin] <= 0.0 {
                            state.accumulate_outer_product(&mut acc[bin]);
                            bin += 1;
                        }
                        while bin < ts.len() {
                            let u = open_unit(&mut rng);
                            match sample_waiting_time(&state, &runner.blocks, u, runner.gamma) {
                                Ok(tau) => {
                                    let t_next = t_anchor + tau;
                                    while bin < ts.len() && ts[bin] <= t_next {
                                        let mut probe = state.clone();
                                        probe.evolve_nojump(&runner.blocks, ts[bin] - t_anchor);
                                        probe.normalize();
                                        probe.accumulate_outer_product(&mut acc[bin]);
                                        bin += 1;
                                    }
                                    if bin >= ts.len() {
                                        break;
                                    }
                                    state.evolve_nojump(&runner.blocks, tau);
                                    state.normalize();
                                    let Some(channel) = runner.draw_channel(&state, &mut rng)
                                    else {
                                        break;
                                    };
                                    runner.dissipator.apply_jump(channel, &mut state)?;
                                    t_anchor = t_next;
                                }
                                Err(_) => break,
                            }
                        }
                        while bin < ts.len() {
                            let mut probe = state.clone();
                            probe.evolve_nojump(&runner.blocks, ts[bin] - t_anchor);
                            probe.normalize();
                            probe.accumulate_outer_product(&mut acc[bin]);
                            bin += 1;
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut totals = vec![Array2::<C64>::zeros((dim, dim)); points];
    for p in partials {
        for (t, m) in totals.iter_mut().zip(p?) {
            *t += &m;
        }
    }
    let w = c(1.0 / n_traj as f64, 0.0);
    for t in &mut totals {
        t.mapv_inplace(|v| v * w);
    }
    Ok(totals)
}
