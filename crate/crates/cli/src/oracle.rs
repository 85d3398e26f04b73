//! Ensemble-mean versus master-equation comparison.
//!
//! Evolves K trajectories of a single pure state under the Gisin-Percival
//! noise convention with weights (1, 1), averages the projectors
//! `|psi><psi|`, integrates the master equation on the same grid, and
//! reports entrywise deviations against 4-sigma statistical bounds.

use std::fmt;

use rayon::prelude::*;

use qsd_nmr_core::algebra::{Complex, DensityMatrix, Operator, PureState};
use qsd_nmr_core::lindblad::{integrate_master, MasterEquationProblem};
use qsd_nmr_core::qsd::{
    derive_stream_seed, evolve_state_trajectory, NoiseConvention, QsdWeights,
};

use crate::{CliError, CliResult};

/// Absolute slack added to the empirical entry bounds: round-off of summing
/// K values of order one, far below any statistical scale in the comparison.
pub const SUMMATION_SLACK: f64 = 1e-12;

const CHUNK: usize = 64;

/// Initial pure state of every trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// `|0>`, the dark state of the lowering operator.
    Ground,
    /// `|1>`, decaying as `exp(-t)`.
    Excited,
    /// `(|0> + |1>)/sqrt2`, whose coherence decays as `exp(-t/2)`.
    Plus,
}

impl InitialState {
    pub fn state(&self) -> PureState {
        match self {
            InitialState::Ground => PureState::ground(),
            InitialState::Excited => PureState::excited(),
            InitialState::Plus => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                PureState::new(Complex::new(s, 0.0), Complex::new(s, 0.0))
                    .expect("equal superposition is normalized")
            }
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            InitialState::Ground => "ground",
            InitialState::Excited => "excited",
            InitialState::Plus => "plus",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub psi0: InitialState,
    pub trajectories: usize,
    /// In inverse-rate units of the unit-rate Lindblad operator.
    pub duration: f64,
    pub steps: usize,
    /// Number of grid points (including the endpoints) at which the
    /// comparison is evaluated.
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            psi0: InitialState::Excited,
            trajectories: 2000,
            duration: 1.0,
            steps: 1000,
            samples: 21,
            seed: 7,
        }
    }
}

/// Comparison at one sampled time.
#[derive(Clone, Copy, Debug)]
pub struct OracleSample {
    pub time: f64,
    pub mean: [[Complex; 2]; 2],
    pub oracle: [[Complex; 2]; 2],
    /// Largest entrywise |mean - oracle|.
    pub max_entry_deviation: f64,
    /// 4x the largest empirical standard error over the entries.
    pub entry_bound: f64,
    /// |mean excited population - oracle excited population|.
    pub excited_deviation: f64,
    /// `4 sqrt(p(1-p)/K)` with `p` the oracle excited population.
    pub excited_bound: f64,
}

impl OracleSample {
    pub fn entries_pass(&self) -> bool {
        self.max_entry_deviation <= self.entry_bound + SUMMATION_SLACK
    }

    pub fn excited_pass(&self) -> bool {
        self.excited_deviation <= self.excited_bound + SUMMATION_SLACK
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub options: OracleOptions,
    pub samples: Vec<OracleSample>,
    pub pass: bool,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "psi0 = {}, K = {}, dt = {:e}, seed = {}",
            self.options.psi0,
            self.options.trajectories,
            self.options.duration / self.options.steps as f64,
            self.options.seed
        )?;
        writeln!(
            f,
            "{:>10}  {:>13}  {:>13}  {:>13}  {:>13}  result",
            "t", "max entry dev", "entry bound", "excited dev", "excited bound"
        )?;
        for s in &self.samples {
            writeln!(
                f,
                "{:>10.4}  {:>13.4e}  {:>13.4e}  {:>13.4e}  {:>13.4e}  {}",
                s.time,
                s.max_entry_deviation,
                s.entry_bound,
                s.excited_deviation,
                s.excited_bound,
                if s.entries_pass() && s.excited_pass() {
                    "ok"
                } else {
                    "FAIL"
                }
            )?;
        }
        write!(f, "overall: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

struct Accumulator {
    /// Per sample: sums of the four projector entries.
    sum: Vec<[Complex; 4]>,
    /// Per sample: sums of squared real and imaginary parts per entry.
    sum_sq_re: Vec<[f64; 4]>,
    sum_sq_im: Vec<[f64; 4]>,
}

impl Accumulator {
    fn new(samples: usize) -> Self {
        Self {
            sum: vec![[Complex::new(0.0, 0.0); 4]; samples],
            sum_sq_re: vec![[0.0; 4]; samples],
            sum_sq_im: vec![[0.0; 4]; samples],
        }
    }

    fn add(&mut self, other: &Accumulator) {
        for k in 0..self.sum.len() {
            for j in 0..4 {
                self.sum[k][j] += other.sum[k][j];
                self.sum_sq_re[k][j] += other.sum_sq_re[k][j];
                self.sum_sq_im[k][j] += other.sum_sq_im[k][j];
            }
        }
    }
}

/// Runs the comparison. Enforces the Gisin-Percival convention and weights
/// (1, 1) with `H = 0` and the lowering Lindblad operator; rejects ensembles
/// below 100 trajectories, for which the 4-sigma bound is meaningless.
pub fn compare_oracle(options: &OracleOptions) -> CliResult<OracleReport> {
    if options.trajectories < 100 {
        return Err(CliError::Config(format!(
            "trajectories must be at least 100 for the statistical bound, got {}",
            options.trajectories
        )));
    }
    if options.steps < 1 {
        return Err(CliError::Config("steps must be at least 1".into()));
    }
    if !(options.duration > 0.0 && options.duration.is_finite()) {
        return Err(CliError::Config(format!(
            "duration must be positive, got {}",
            options.duration
        )));
    }
    if options.samples < 2 || options.samples > options.steps + 1 {
        return Err(CliError::Config(format!(
            "samples must be in [2, steps + 1], got {}",
            options.samples
        )));
    }

    let h = Operator::zero();
    let l = Operator::lowering();
    let w = QsdWeights::new(1.0, 1.0)?;
    let psi0 = options.psi0.state();
    let dt = options.duration / options.steps as f64;

    // Sampled grid indices, endpoints included.
    let sample_indices: Vec<usize> = (0..options.samples)
        .map(|j| (j * options.steps) / (options.samples - 1))
        .collect();

    let members = options.trajectories as u64;
    let chunks: Vec<(u64, u64)> = (0..members)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK as u64).min(members)))
        .collect();

    let partials: Vec<Result<Accumulator, qsd_nmr_core::Error>> = chunks
        .into_par_iter()
        .map(|(start, end)| {
            let mut acc = Accumulator::new(sample_indices.len());
            for index in start..end {
                let states = evolve_state_trajectory(
                    &psi0,
                    &h,
                    &l,
                    &w,
                    dt,
                    options.steps,
                    derive_stream_seed(options.seed, index),
                    NoiseConvention::GisinPercival,
                )?;
                for (k, &step) in sample_indices.iter().enumerate() {
                    let projector = states[step].outer(&states[step]);
                    let e = projector.entries();
                    let flat = [e[0][0], e[0][1], e[1][0], e[1][1]];
                    for j in 0..4 {
                        acc.sum[k][j] += flat[j];
                        acc.sum_sq_re[k][j] += flat[j].re * flat[j].re;
                        acc.sum_sq_im[k][j] += flat[j].im * flat[j].im;
                    }
                }
            }
            Ok(acc)
        })
        .collect();

    let mut total = Accumulator::new(sample_indices.len());
    for partial in partials {
        total.add(&partial?);
    }

    let problem = MasterEquationProblem::new(
        h,
        vec![l],
        DensityMatrix::from_pure(&psi0),
        options.duration,
        options.steps,
    )?;
    let oracle = integrate_master(&problem)?;

    let k_count = options.trajectories as f64;
    let samples: Vec<OracleSample> = sample_indices
        .iter()
        .enumerate()
        .map(|(k, &step)| {
            let reference = oracle[step].entries();
            let ref_flat = [reference[0][0], reference[0][1], reference[1][0], reference[1][1]];
            let mut mean_flat = [Complex::new(0.0, 0.0); 4];
            let mut max_dev = 0.0f64;
            let mut max_se = 0.0f64;
            for j in 0..4 {
                let mean = total.sum[k][j] / k_count;
                mean_flat[j] = mean;
                max_dev = max_dev.max((mean - ref_flat[j]).norm());
                let var_re =
                    (total.sum_sq_re[k][j] - k_count * mean.re * mean.re) / (k_count - 1.0);
                let var_im =
                    (total.sum_sq_im[k][j] - k_count * mean.im * mean.im) / (k_count - 1.0);
                let se = ((var_re.max(0.0) + var_im.max(0.0)) / k_count).sqrt();
                max_se = max_se.max(se);
            }
            let p = ref_flat[3].re.clamp(0.0, 1.0);
            OracleSample {
                time: step as f64 * dt,
                mean: [
                    [mean_flat[0], mean_flat[1]],
                    [mean_flat[2], mean_flat[3]],
                ],
                oracle: reference,
                max_entry_deviation: max_dev,
                entry_bound: 4.0 * max_se,
                excited_deviation: (mean_flat[3].re - p).abs(),
                excited_bound: 4.0 * (p * (1.0 - p) / k_count).sqrt(),
            }
        })
        .collect();

    let pass = samples.iter().all(|s| s.entries_pass() && s.excited_pass());
    Ok(OracleReport {
        options: *options,
        samples,
        pass,
    })
}
