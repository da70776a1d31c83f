//! Experiment orchestration: one function per subcommand.

use crate::config::ExperimentConfig;
use crate::report::{
    fmt_f64, ConvergenceRecord, OutputDir, CROSSOVER_CSV_SCHEMA, HISTOGRAM_CSV_SCHEMA,
    KERNEL_CSV_SCHEMA, SWEEP_CSV_SCHEMA, TRAJECTORY_CSV_SCHEMA,
};
use anyhow::{bail, Context};
use jumptime_core::bloch::ModelSpec;
use jumptime_core::dissipator::{DissipatorSpec, Sublattice};
use jumptime_core::grid::MomentumGrid;
use jumptime_core::propagator::{evolve_kernel, DensityKernel, PropagatorKind};
use jumptime_core::reference::{
    integrate_master, jumptime_map, kernel_to_dense_momentum, momentum_to_real,
    steady_state_blocks, DenseDensityMatrix,
};
use jumptime_core::steady_state::{bloch_steady_state, crossover_sweep, ssh_steady_current};
use jumptime_core::topology::{
    jumptime_phase_converged, residual_terms, ti_phase_direct, topology_report, winding_number,
};
use jumptime_core::trajectory::{ensemble_average, PureState, Readout, TrajectoryRunner};
use serde::Serialize;

/// Pick the scalar propagator kind matching a dissipator, for topology
/// reports. Kick families use the collective propagator (their phase is
/// invariant under the kick profile); anything without a printed closed
/// form goes through the empirical kernel.
pub fn propagator_kind_for(diss: &DissipatorSpec) -> PropagatorKind {
    let comps = diss.components();
    if comps.len() == 1 {
        match comps[0] {
            DissipatorSpec::Collective {
                target: Sublattice::A,
                gamma,
            } => return PropagatorKind::Cc { gamma: *gamma },
            DissipatorSpec::SublatticeProjector {
                target: Sublattice::A,
                gamma,
            } => return PropagatorKind::SublatticeA { gamma: *gamma },
            DissipatorSpec::SublatticeProjector {
                target: Sublattice::B,
                gamma,
            } => return PropagatorKind::SublatticeB { gamma: *gamma },
            DissipatorSpec::Kick { gamma, .. } => return PropagatorKind::Cc { gamma: *gamma },
            _ => {}
        }
    }
    if comps.len() == 2 {
        let mut cc = None;
        let mut pb = None;
        for comp in &comps {
            match comp {
                DissipatorSpec::Collective {
                    target: Sublattice::A,
                    gamma,
                } => cc = Some(*gamma),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::B,
                    gamma,
                } => pb = Some(*gamma),
                _ => {}
            }
        }
        if let (Some(gamma_cc), Some(gamma_b)) = (cc, pb) {
            return PropagatorKind::MixtureCcB { gamma_cc, gamma_b };
        }
    }
    PropagatorKind::Empirical(diss.clone())
}

fn ensemble_rows(
    acc: &jumptime_core::accumulator::EnsembleAccumulator,
    dims: &[usize],
    label_name: &str,
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let n_axes = dims.len();
    for (label, stat) in acc.labels.iter().zip(&acc.stats) {
        let count = stat.count();
        let mut push = |obs: String, mean: f64, se: f64| {
            rows.push(vec![
                fmt_f64(*label),
                obs,
                fmt_f64(mean),
                fmt_f64(se),
                count.to_string(),
            ]);
        };
        for a in 0..n_axes {
            push(
                format!("mean_x{a}"),
                stat.mean_x.mean()[a],
                stat.mean_x.std_err(a),
            );
        }
        push("pop_A".into(), stat.pops.mean()[0], stat.pops.std_err(0));
        push("pop_B".into(), stat.pops.mean()[1], stat.pops.std_err(1));
        push("seam".into(), stat.seam.mean()[0], stat.seam.std_err(0));
        let mut base = 0usize;
        for (a, l) in dims.iter().enumerate() {
            let min_off = -((*l as i64 - 1) / 2);
            for b in 0..*l {
                push(
                    format!("pos{a}[{}]", min_off + b as i64),
                    stat.pos_hist.mean()[base + b],
                    stat.pos_hist.std_err(base + b),
                );
                push(
                    format!("mom{a}[{b}]"),
                    stat.mom_hist.mean()[base + b],
                    stat.mom_hist.std_err(base + b),
                );
            }
            base += l;
        }
        let _ = label_name;
    }
    rows
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    config: &'a ExperimentConfig,
    content_hash: String,
    base_seed: u64,
    rng_algorithm: &'static str,
    trajectories: u64,
    dark_trapped: u64,
}

/// Trajectory ensemble with jumptime readout.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &mut OutputDir) -> anyhow::Result<()> {
    let model = cfg.model.build()?;
    let diss = cfg.dissipator.build()?;
    let runner = TrajectoryRunner::new(&model, &diss, &cfg.run.cells, &cfg.run.init_cell)?;
    let init = PureState::localized(
        &cfg.run.cells,
        &cfg.run.init_cell,
        cfg.run.init_sublattice_index()?,
    );
    let readout = Readout::Jumptime {
        n_max: cfg.run.n_max,
    };
    let acc = ensemble_average(
        &runner,
        &init,
        &readout,
        cfg.run.trajectories,
        cfg.run.base_seed,
    )?;
    out.manifest().dark_trapped = acc.dark_trapped;
    out.manifest().boundary_flagged = acc.boundary_flagged();
    out.write_csv(
        "observables.csv",
        TRAJECTORY_CSV_SCHEMA,
        "n,observable,mean,std_err,count",
        ensemble_rows(&acc, &cfg.run.cells, "n"),
    )?;
    out.write_json(
        "run.json",
        &RunSidecar {
            config: cfg,
            content_hash: cfg.content_hash(),
            base_seed: cfg.run.base_seed,
            rng_algorithm: jumptime_core::trajectory::RNG_ALGORITHM,
            trajectories: acc.trajectories,
            dark_trapped: acc.dark_trapped,
        },
    )?;
    if acc.boundary_flagged() {
        bail!(
            "boundary guard violated: seam occupancy {:.3e} >= 1e-3",
            acc.max_seam_occupancy
        );
    }
    Ok(())
}

/// Trajectory ensemble with walltime readout, optionally cross-checked
/// against the dense master integrator.
pub fn cmd_walltime(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    with_master: bool,
) -> anyhow::Result<()> {
    let model = cfg.model.build()?;
    let diss = cfg.dissipator.build()?;
    let runner = TrajectoryRunner::new(&model, &diss, &cfg.run.cells, &cfg.run.init_cell)?;
    let subl = cfg.run.init_sublattice_index()?;
    let init = PureState::localized(&cfg.run.cells, &cfg.run.init_cell, subl);
    let times: Vec<f64> = (1..=cfg.run.walltime_bins)
        .map(|i| cfg.run.t_max * i as f64 / cfg.run.walltime_bins as f64)
        .collect();
    let readout = Readout::Walltime {
        times: times.clone(),
    };
    let acc = ensemble_average(
        &runner,
        &init,
        &readout,
        cfg.run.trajectories,
        cfg.run.base_seed,
    )?;
    out.manifest().dark_trapped = acc.dark_trapped;
    out.manifest().boundary_flagged = acc.boundary_flagged();
    out.write_csv(
        "observables.csv",
        TRAJECTORY_CSV_SCHEMA,
        "t,observable,mean,std_err,count",
        ensemble_rows(&acc, &cfg.run.cells, "t"),
    )?;
    out.write_json(
        "run.json",
        &RunSidecar {
            config: cfg,
            content_hash: cfg.content_hash(),
            base_seed: cfg.run.base_seed,
            rng_algorithm: jumptime_core::trajectory::RNG_ALGORITHM,
            trajectories: acc.trajectories,
            dark_trapped: acc.dark_trapped,
        },
    )?;
    if with_master {
        let n_cells: usize = cfg.run.cells.iter().product();
        if cfg.run.cells.len() == 1 && n_cells <= 32 || cfg.run.cells.len() == 2 && n_cells <= 36 {
            let cell: Vec<usize> = cfg
                .run
                .init_cell
                .iter()
                .zip(&cfg.run.cells)
                .map(|(c, l)| c.rem_euclid(*l as i64) as usize)
                .collect();
            let mut rho = DenseDensityMatrix::localized(&cfg.run.cells, &cell, subl);
            let mut rows = Vec::new();
            let mut t_now = 0.0;
            for t in &times {
                rho = integrate_master(&rho, &model, &diss, &cfg.run.cells, t - t_now, 1e-9)?;
                t_now = *t;
                let x = rho.mean_displacement(&cfg.run.cells, &cfg.run.init_cell);
                let mut row = vec![fmt_f64(*t)];
                row.extend(x.iter().map(|v| fmt_f64(*v)));
                row.push(fmt_f64(rho.trace().re));
                rows.push(row);
            }
            let axes: Vec<String> = (0..cfg.run.cells.len())
                .map(|a| format!("mean_x{a}"))
                .collect();
            out.write_csv(
                "master.csv",
                "master-walltime-v1",
                &format!("t,{},trace", axes.join(",")),
                rows,
            )?;
        } else {
            out.manifest()
                .notes
                .push("master comparison skipped: lattice too large for dense work".into());
        }
    }
    if acc.boundary_flagged() {
        bail!(
            "boundary guard violated: seam occupancy {:.3e} >= 1e-3",
            acc.max_seam_occupancy
        );
    }
    Ok(())
}

/// Deterministic kernel evolution (and, when dense-feasible, the exact-map
/// cross-check).
pub fn cmd_jumptime_map(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    steps: usize,
) -> anyhow::Result<()> {
    let model = cfg.model.build()?;
    let diss = cfg.dissipator.build()?;
    let grid = MomentumGrid::new(&cfg.run.cells);
    let kernel0 = DensityKernel::localized(&grid, &cfg.run.init_cell);
    let mut rows = Vec::new();
    let mut kernel = kernel0.clone();
    for n in 0..=steps {
        if n > 0 {
            kernel = evolve_kernel(&kernel, &model, &diss, 1)?;
        }
        let (mean, seam) = kernel.mean_displacement();
        let mut row = vec![n.to_string()];
        row.extend(mean.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(kernel.trace()));
        row.push(fmt_f64(seam));
        rows.push(row);
    }
    let axes: Vec<String> = (0..cfg.run.cells.len())
        .map(|a| format!("mean_x{a}"))
        .collect();
    out.write_csv(
        "displacement.csv",
        "kernel-displacement-v1",
        &format!("n,{},trace,seam", axes.join(",")),
        rows,
    )?;
    let n_tot = grid.len();
    if n_tot <= 128 {
        let mut rows = Vec::with_capacity(n_tot * n_tot);
        for i in 0..n_tot {
            for j in 0..n_tot {
                let v = kernel.data()[[i, j]];
                rows.push(vec![
                    i.to_string(),
                    j.to_string(),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                ]);
            }
        }
        out.write_csv(
            &format!("kernel_n{steps}.csv"),
            KERNEL_CSV_SCHEMA,
            "k,kp,re,im",
            rows,
        )?;
    } else {
        out.manifest()
            .notes
            .push(format!("kernel snapshot skipped: {n_tot} momenta"));
    }
    // Dense oracle cross-check when feasible.
    if cfg.run.cells.len() == 1 && cfg.run.cells[0] <= 32 {
        let mut dense = DenseDensityMatrix::new(momentum_to_real(
            &kernel_to_dense_momentum(&kernel0, Sublattice::A),
            &cfg.run.cells,
        ));
        for _ in 0..steps {
            dense = jumptime_map(&dense, &model, &diss, &cfg.run.cells)?.rho;
        }
        let from_kernel = momentum_to_real(
            &kernel_to_dense_momentum(&kernel, Sublattice::A),
            &cfg.run.cells,
        );
        let worst = (&dense.matrix - &from_kernel)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        out.manifest().notes.push(format!(
            "dense-map cross-check after {steps} steps: max elementwise diff {worst:.3e}"
        ));
        if worst > 1e-9 {
            bail!("kernel evolution disagrees with the dense map: {worst:.3e} > 1e-9");
        }
    }
    Ok(())
}

/// Topology report and optional parameter sweep.
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

pub fn cmd_topology(
    cfg: &ExperimentConfig,
    out: &mut OutputDir,
    n_p: Option<usize>,
    sweep: Option<SweepSpec>,
) -> anyhow::Result<()> {
    let model = cfg.model.build()?;
    let diss = cfg.dissipator.build()?;
    let kind = propagator_kind_for(&diss);
    let n_p_start = n_p.unwrap_or(if model.dimension() == 1 {
        jumptime_core::topology::DEFAULT_NP_1D
    } else {
        jumptime_core::topology::DEFAULT_NP_2D
    });
    let report = topology_report(&model, &kind, n_p_start)?;
    // Kick families: cross-check the profile-invariant phase by direct
    // G-weighted double quadrature.
    if let DissipatorSpec::Kick { g, gamma } = &diss {
        for axis in 0..model.dimension() {
            let direct = ti_phase_direct(&model, g, *gamma, axis, report.n_p.min(1024))?;
            out.manifest().notes.push(format!(
                "kick-family direct quadrature, axis {axis}: T_ti = {direct:.9} (profile-invariant phase {:.9})",
                report.axes[axis].phase
            ));
        }
    }
    #[derive(Serialize)]
    struct AxisOut {
        axis: usize,
        winding: f64,
        winding_rounded: i64,
        winding_residue: f64,
        winding_slice_spread: f64,
        phase: f64,
        r1: f64,
        r2: f64,
        identity_defect: Option<f64>,
    }
    #[derive(Serialize)]
    struct ReportOut {
        propagator: String,
        empirical: bool,
        n_p: usize,
        axes: Vec<AxisOut>,
        chern: Option<f64>,
        convergence: Vec<ConvergenceRecord>,
    }
    let out_report = ReportOut {
        propagator: kind.label(),
        empirical: report.empirical,
        n_p: report.n_p,
        axes: report
            .axes
            .iter()
            .enumerate()
            .map(|(axis, a)| AxisOut {
                axis,
                winding: a.winding,
                winding_rounded: a.winding.round() as i64,
                winding_residue: (a.winding - a.winding.round()).abs(),
                winding_slice_spread: a.winding_spread,
                phase: a.phase,
                r1: a.r1,
                r2: a.r2,
                identity_defect: a.identity_defect,
            })
            .collect(),
        chern: report.chern,
        convergence: report
            .convergence
            .iter()
            .map(|(np, vals)| ConvergenceRecord {
                quantity: "jumptime_phase".into(),
                grid_sizes: vec![*np],
                values: vals.clone(),
            })
            .collect(),
    };
    out.write_json("topology.json", &out_report)?;

    if let Some(sw) = sweep {
        let mut rows = Vec::new();
        for i in 0..=sw.steps {
            let x = sw.from + (sw.to - sw.from) * i as f64 / sw.steps as f64;
            let swept = match (sw.parameter.as_str(), &cfg.model) {
                ("v_over_w", crate::config::ModelConfig::Ssh { ssh }) => {
                    ModelSpec::ssh(x * ssh.w, ssh.w)
                }
                ("u_over_w", crate::config::ModelConfig::Torus2d { torus2d }) => {
                    ModelSpec::torus2d(x * torus2d.w, torus2d.v, torus2d.w)
                }
                (p, _) => bail!("sweep parameter {p:?} does not match the configured model"),
            };
            let gamma = diss.total_gamma();
            let (t, n_p_used, _) = jumptime_phase_converged(&swept, &kind, 0, n_p_start)?;
            let w = winding_number(&swept, 0, n_p_used)?;
            let (r1, r2) = residual_terms(&swept, 0, gamma, n_p_used)?;
            rows.push(vec![
                fmt_f64(x),
                fmt_f64(w.value),
                fmt_f64(t),
                fmt_f64(r1),
                fmt_f64(r2),
                fmt_f64((t - (w.value + r1 + r2)).abs()),
            ]);
        }
        out.write_csv(
            "sweep.csv",
            SWEEP_CSV_SCHEMA,
            "param,W,T,R_1,R_2,defect",
            rows,
        )?;
    }
    Ok(())
}

/// Closed-form steady state vs the numeric null-space blocks, plus the
/// crossover table.
pub fn cmd_steady_state(cfg: &ExperimentConfig, out: &mut OutputDir) -> anyhow::Result<()> {
    let model = cfg.model.build()?;
    let diss = cfg.dissipator.build()?;
    let gamma = diss.total_gamma();
    let grid = MomentumGrid::new(&cfg.run.cells);
    let sym = model.symmetry_check(&grid);
    if sym.chiral {
        let numeric = steady_state_blocks(&model, &diss, &grid)?;
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for (i, k) in grid.iter() {
            let closed = bloch_steady_state(&model, gamma, &k)?;
            let b = &numeric[i];
            let num = [
                (b.0[0][1] + b.0[1][0]).re,
                (jumptime_core::linalg::I * (b.0[0][1] - b.0[1][0])).re,
                (b.0[0][0] - b.0[1][1]).re,
            ];
            let diff = (0..3).map(|j| (closed[j] - num[j]).abs()).fold(0.0, f64::max);
            worst = worst.max(diff);
            rows.push(vec![
                fmt_f64(k[0]),
                fmt_f64(closed[0]),
                fmt_f64(closed[1]),
                fmt_f64(closed[2]),
                fmt_f64(num[0]),
                fmt_f64(num[1]),
                fmt_f64(num[2]),
                fmt_f64(diff),
            ]);
        }
        out.write_csv(
            "steady_blocks.csv",
            "steady-blocks-v1",
            "k,rx_closed,ry_closed,rz_closed,rx_numeric,ry_numeric,rz_numeric,max_diff",
            rows,
        )?;
        out.manifest()
            .notes
            .push(format!("closed vs numeric steady state: max diff {worst:.3e}"));
    } else {
        out.manifest().notes.push(
            "closed-form steady state skipped: model is not chiral (numeric blocks only)".into(),
        );
    }
    // Crossover table: γ-controlled smooth current vs the step-like
    // jumptime transport.
    let ratios: Vec<f64> = (0..=80)
        .map(|i| 10f64.powf(-1.0 + 2.0 * i as f64 / 80.0))
        .collect();
    let gammas = [0.1, 0.5, 1.0, 2.0];
    let rows = crossover_sweep(&ratios, &gammas)
        .into_iter()
        .map(|r| {
            vec![
                fmt_f64(r.v_over_w),
                fmt_f64(r.gamma),
                fmt_f64(r.j_ss),
                fmt_f64(r.a_times_t),
            ]
        })
        .collect::<Vec<_>>();
    out.write_csv(
        "crossover.csv",
        CROSSOVER_CSV_SCHEMA,
        "v_over_w,gamma,J_ss,a_times_T",
        rows,
    )?;
    let probe = ssh_steady_current(1.0, 10.0, 0.01);
    out.manifest().notes.push(format!(
        "current limit check: J(w=10v, gamma=0.01)/({}/2) = {:.6}",
        0.01,
        probe / (0.01 / 2.0)
    ));
    Ok(())
}

/// Statistics of one of the four transport panels.
struct PanelResult {
    case: String,
    acc: jumptime_core::accumulator::EnsembleAccumulator,
    analytic_step: f64,
}

/// Skewness of a histogram over centered offsets.
fn histogram_skewness(hist: &[f64], min_offset: i64) -> f64 {
    let total: f64 = hist.iter().sum();
    let mean: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, p)| (min_offset + i as i64) as f64 * p)
        .sum::<f64>()
        / total;
    let m = |k: i32| -> f64 {
        hist.iter()
            .enumerate()
            .map(|(i, p)| ((min_offset + i as i64) as f64 - mean).powi(k) * p)
            .sum::<f64>()
            / total
    };
    m(3) / m(2).powf(1.5)
}

/// The four-panel transport reproduction: both hopping orderings, both
/// collapse models, N trajectories, jump counts 0..=4.
pub fn cmd_fig2(out: &mut OutputDir, n_traj: u64, base_seed: u64) -> anyhow::Result<()> {
    let cells = [64usize];
    let n_max = 4usize;
    let cases: Vec<(&str, f64, f64, bool)> = vec![
        ("topological_collective", 0.2, 0.5, false),
        ("topological_local", 0.2, 0.5, true),
        ("trivial_collective", 0.5, 0.2, false),
        ("trivial_local", 0.5, 0.2, true),
    ];
    let mut panels = Vec::new();
    for (name, v, w, local) in cases {
        let model = ModelSpec::ssh(v, w);
        let diss = if local {
            DissipatorSpec::Kick {
                g: jumptime_core::dissipator::KickDistribution::Uniform,
                gamma: 1.0,
            }
        } else {
            DissipatorSpec::collective(1.0)
        };
        let runner = TrajectoryRunner::new(&model, &diss, &cells, &[0])?;
        let init = PureState::localized(&cells, &[0], 0);
        let acc = ensemble_average(
            &runner,
            &init,
            &Readout::Jumptime { n_max },
            n_traj,
            base_seed,
        )?;
        panels.push(PanelResult {
            case: name.into(),
            acc,
            analytic_step: if w > v { 1.0 } else { 0.0 },
        });
    }

    let mut rows = Vec::new();
    for p in &panels {
        for (n, stat) in p.acc.stats.iter().enumerate() {
            rows.push(vec![
                p.case.clone(),
                n.to_string(),
                fmt_f64(stat.mean_x.mean()[0]),
                fmt_f64(stat.mean_x.std_err(0)),
                stat.count().to_string(),
                fmt_f64(n as f64 * p.analytic_step),
            ]);
        }
    }
    out.write_csv(
        "transport.csv",
        TRAJECTORY_CSV_SCHEMA,
        "case,n,mean_x,std_err,count,analytic",
        rows,
    )?;

    // Wave-packet histograms at n = 0 and n = 3.
    let min_off = -((cells[0] as i64 - 1) / 2);
    let mut rows = Vec::new();
    for p in &panels {
        for n in [0usize, 3] {
            let stat = &p.acc.stats[n];
            for b in 0..cells[0] {
                rows.push(vec![
                    p.case.clone(),
                    n.to_string(),
                    (min_off + b as i64).to_string(),
                    fmt_f64(stat.pos_hist.mean()[b]),
                    fmt_f64(stat.pos_hist.std_err(b)),
                ]);
            }
        }
    }
    out.write_csv(
        "histograms.csv",
        HISTOGRAM_CSV_SCHEMA,
        "case,n,offset,occupancy,std_err",
        rows,
    )?;

    let mut dark = 0;
    let mut flagged = false;
    for p in &panels {
        dark += p.acc.dark_trapped;
        flagged |= p.acc.boundary_flagged();
    }
    out.manifest().dark_trapped = dark;
    out.manifest().boundary_flagged = flagged;

    // Collective collapse skews the topological-phase wave packet; local
    // collapse keeps it nearly symmetric.
    let skew = |case: &str| -> f64 {
        let p = panels.iter().find(|p| p.case == case).unwrap();
        histogram_skewness(p.acc.stats[3].pos_hist.mean(), min_off)
    };
    let skew_cc = skew("topological_collective");
    let skew_local = skew("topological_local");
    out.manifest().notes.push(format!(
        "skewness at n=3: collective {skew_cc:.4}, local {skew_local:.4}"
    ));
    if flagged {
        bail!("boundary guard violated in a transport panel");
    }
    if skew_cc <= skew_local {
        bail!("wave-packet asymmetry check failed: skew(collective) = {skew_cc:.4} <= skew(local) = {skew_local:.4}");
    }

    // Statistical transport check against the analytic line.
    for p in &panels {
        for n in 1..=n_max {
            let stat = &p.acc.stats[n];
            let mean = stat.mean_x.mean()[0];
            let se = stat.mean_x.std_err(0);
            let target = n as f64 * p.analytic_step;
            let tol = (4.0 * se).max(0.15);
            if (mean - target).abs() > tol {
                bail!(
                    "{}: |<x>_{n} - {target}| = {:.4} exceeds max(4SE, 0.15a) = {tol:.4}",
                    p.case,
                    (mean - target).abs()
                );
            }
        }
    }
    Ok(())
}

/// Dense walltime check used by the directional-hop acceptance criterion.
pub fn directional_hop_walltime_check() -> anyhow::Result<(f64, f64)> {
    let model = ModelSpec::directional_chain(0.25);
    let dims = [32usize];
    let hop = DissipatorSpec::DirectionalHop { gamma: 1.0 };
    let rho0 = DenseDensityMatrix::localized(&dims, &[2], 0);
    let t = 2.0;
    let out = integrate_master(&rho0, &model, &hop, &dims, t, 1e-10)
        .context("integrating the directional-hop master equation")?;
    let x = out.mean_displacement(&dims, &[2]);
    Ok((x[0], 2.0 + t))
}
