//! Mergeable one-pass statistics for trajectory ensembles.
//!
//! Per readout point (jump count or walltime bin) the accumulator tracks
//! count, running mean and variance of every registered observable using
//! Welford updates, with the parallel merge rule of Chan et al. so that
//! chunked ensembles combine associatively up to floating-point
//! reassociation.

/// Elementwise Welford statistics over a fixed-length vector observable.
#[derive(Clone, Debug, PartialEq)]
pub struct WelfordVec {
    pub count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl WelfordVec {
    pub fn new(len: usize) -> Self {
        WelfordVec {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn push(&mut self, sample: &[f64]) {
        assert_eq!(sample.len(), self.mean.len());
        self.count += 1;
        let n = self.count as f64;
        for (i, &x) in sample.iter().enumerate() {
            let delta = x - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += delta * (x - self.mean[i]);
        }
    }

    pub fn merge(&mut self, other: &WelfordVec) {
        assert_eq!(self.mean.len(), other.mean.len());
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample variance per component (zero until two samples).
    pub fn variance(&self, i: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2[i] / (self.count as f64 - 1.0)
        }
    }

    /// Standard error of the mean per component.
    pub fn std_err(&self, i: usize) -> f64 {
        if self.count < 2 {
            f64::INFINITY
        } else {
            (self.variance(i) / self.count as f64).sqrt()
        }
    }
}

/// Per-readout-point observable statistics.
#[derive(Clone, Debug)]
pub struct ObservableStats {
    /// Mean displacement per axis, in lattice constants.
    pub mean_x: WelfordVec,
    /// Sublattice populations `[P_A, P_B]`.
    pub pops: WelfordVec,
    /// Occupancy within two cells of the periodic seam.
    pub seam: WelfordVec,
    /// Position histogram, per-axis marginals concatenated.
    pub pos_hist: WelfordVec,
    /// Momentum histogram, per-axis marginals concatenated.
    pub mom_hist: WelfordVec,
}

impl ObservableStats {
    pub fn new(n_axes: usize, hist_len: usize) -> Self {
        ObservableStats {
            mean_x: WelfordVec::new(n_axes),
            pops: WelfordVec::new(2),
            seam: WelfordVec::new(1),
            pos_hist: WelfordVec::new(hist_len),
            mom_hist: WelfordVec::new(hist_len),
        }
    }

    pub fn merge(&mut self, other: &ObservableStats) {
        self.mean_x.merge(&other.mean_x);
        self.pops.merge(&other.pops);
        self.seam.merge(&other.seam);
        self.pos_hist.merge(&other.pos_hist);
        self.mom_hist.merge(&other.mom_hist);
    }

    pub fn count(&self) -> u64 {
        self.mean_x.count
    }
}

/// One snapshot of the observables of a single trajectory.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    pub mean_x: Vec<f64>,
    pub pop_a: f64,
    pub pop_b: f64,
    pub seam_occupancy: f64,
    pub pos_hist: Vec<f64>,
    pub mom_hist: Vec<f64>,
}

/// Mergeable ensemble accumulator over a fixed list of readout points.
#[derive(Clone, Debug)]
pub struct EnsembleAccumulator {
    /// Readout labels: jump counts (as f64) or walltime bin times.
    pub labels: Vec<f64>,
    pub stats: Vec<ObservableStats>,
    pub trajectories: u64,
    pub dark_trapped: u64,
    pub max_seam_occupancy: f64,
}

/// Occupancy near the periodic seam above this flags the run: the paper
/// analytics assume an effectively infinite lattice.
pub const SEAM_OCCUPANCY_LIMIT: f64 = 1e-3;

impl EnsembleAccumulator {
    pub fn new(labels: Vec<f64>, n_axes: usize, hist_len: usize) -> Self {
        let stats = labels
            .iter()
            .map(|_| ObservableStats::new(n_axes, hist_len))
            .collect();
        EnsembleAccumulator {
            labels,
            stats,
            trajectories: 0,
            dark_trapped: 0,
            max_seam_occupancy: 0.0,
        }
    }

    /// Record one trajectory; `snapshots[i]` may be `None` past a
    /// dark-trapped termination for jumptime readout.
    pub fn record(&mut self, snapshots: &[Option<ObservableSet>], dark_trapped: bool) {
        assert_eq!(snapshots.len(), self.labels.len());
        self.trajectories += 1;
        if dark_trapped {
            self.dark_trapped += 1;
        }
        for (stat, snap) in self.stats.iter_mut().zip(snapshots) {
            if let Some(obs) = snap {
                stat.mean_x.push(&obs.mean_x);
                stat.pops.push(&[obs.pop_a, obs.pop_b]);
                stat.seam.push(&[obs.seam_occupancy]);
                stat.pos_hist.push(&obs.pos_hist);
                stat.mom_hist.push(&obs.mom_hist);
                if obs.seam_occupancy > self.max_seam_occupancy {
                    self.max_seam_occupancy = obs.seam_occupancy;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &EnsembleAccumulator) {
        assert_eq!(self.labels, other.labels);
        for (a, b) in self.stats.iter_mut().zip(&other.stats) {
            a.merge(b);
        }
        self.trajectories += other.trajectories;
        self.dark_trapped += other.dark_trapped;
        self.max_seam_occupancy = self.max_seam_occupancy.max(other.max_seam_occupancy);
    }

    pub fn boundary_flagged(&self) -> bool {
        self.max_seam_occupancy >= SEAM_OCCUPANCY_LIMIT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let data = [0.3, -1.2, 4.5, 0.0, 2.2, -0.7];
        let mut w = WelfordVec::new(1);
        for &x in &data {
            w.push(&[x]);
        }
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (data.len() as f64 - 1.0);
        assert!((w.mean()[0] - mean).abs() < 1e-14);
        assert!((w.variance(0) - var).abs() < 1e-14);
    }

    #[test]
    fn merge_equals_sequential() {
        let data: Vec<f64> = (0..100).map(|i| ((i * 37) % 13) as f64 - 6.0).collect();
        let mut whole = WelfordVec::new(1);
        for &x in &data {
            whole.push(&[x]);
        }
        let mut a = WelfordVec::new(1);
        let mut b = WelfordVec::new(1);
        for &x in &data[..33] {
            a.push(&[x]);
        }
        for &x in &data[33..] {
            b.push(&[x]);
        }
        a.merge(&b);
        assert!((a.mean()[0] - whole.mean()[0]).abs() < 1e-12);
        assert!((a.variance(0) - whole.variance(0)).abs() < 1e-12);
        assert_eq!(a.count, whole.count);
    }
}
