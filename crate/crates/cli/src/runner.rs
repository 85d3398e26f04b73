//! The `run` operation: thermal state, gate, trajectory (or ensemble mean),
//! CSV emission and summary report.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use qsd_nmr_core::algebra::{Complex, DensityMatrix, Operator};
use qsd_nmr_core::nmr::{
    apply_gate, free_hamiltonian, named_gate, thermal_state, Frame, NamedGate, NmrParameters,
};
use qsd_nmr_core::qsd::{derive_stream_seed, evolve_basis_trajectories, QsdWeights};

use crate::config::{GateChoice, SimulationConfig};
use crate::output::write_csv;
use crate::{CliError, CliResult};

/// Rabi frequency used to realize the named gates; the gate matrices
/// themselves are pulse-length independent.
pub const DEFAULT_OMEGA1: f64 = 1e5;

/// Size of the per-worker job chunks. Partial sums are accumulated inside a
/// chunk in index order and chunks are combined in index order, so the
/// ensemble mean is bit-identical for any worker count.
const ENSEMBLE_CHUNK: usize = 64;

/// One output row of the per-step CSV.
#[derive(Clone, Copy, Debug)]
pub struct StepRow {
    pub step: usize,
    pub time_s: f64,
    pub mx_abs_re: f64,
    pub my_abs_re: f64,
    pub trace_re: f64,
    pub norm_minus: f64,
    pub norm_plus: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct RunSummary {
    pub mean_mx_abs_re: f64,
    pub median_mx_abs_re: f64,
    pub mean_my_abs_re: f64,
    pub median_my_abs_re: f64,
    pub final_trace_re: f64,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: SimulationConfig,
    pub csv_path: PathBuf,
    pub summary: RunSummary,
    pub seed: u64,
    pub wall_time: Duration,
}

impl std::fmt::Display for RunReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.config.echo())?;
        writeln!(f, "csv = {}", self.csv_path.display())?;
        writeln!(
            f,
            "mean |Re Mx| = {:e}, median |Re Mx| = {:e}",
            self.summary.mean_mx_abs_re, self.summary.median_mx_abs_re
        )?;
        writeln!(
            f,
            "mean |Re My| = {:e}, median |Re My| = {:e}",
            self.summary.mean_my_abs_re, self.summary.median_my_abs_re
        )?;
        writeln!(f, "final trace = {:e}", self.summary.final_trace_re)?;
        write!(f, "wall time = {:.3} s", self.wall_time.as_secs_f64())
    }
}

pub(crate) fn nmr_parameters(config: &SimulationConfig) -> CliResult<NmrParameters> {
    Ok(NmrParameters::new(
        config.omega0,
        config.temperature,
        DEFAULT_OMEGA1,
        0.0,
    )?)
}

/// Thermal state with the configured gate applied, in the rotating frame.
pub fn initial_density(config: &SimulationConfig) -> CliResult<DensityMatrix> {
    let params = nmr_parameters(config)?;
    let rho_th = thermal_state(&params);
    let rho0 = match config.gate {
        GateChoice::X => apply_gate(&named_gate(NamedGate::X), &rho_th)?,
        GateChoice::Y => apply_gate(&named_gate(NamedGate::Y), &rho_th)?,
        GateChoice::Z => apply_gate(&named_gate(NamedGate::Z), &rho_th)?,
        GateChoice::None => rho_th,
    };
    Ok(rho0)
}

/// Evolution Hamiltonian during the measurement: `H0` in the laboratory
/// frame, zero in the rotating frame.
pub fn evolution_hamiltonian(config: &SimulationConfig) -> CliResult<Operator> {
    Ok(match config.frame {
        Frame::Laboratory => free_hamiltonian(&nmr_parameters(config)?),
        Frame::Rotating => Operator::zero(),
    })
}

/// Simulates the configured trajectory (or ensemble) and returns the CSV
/// rows. Ensemble means are taken over the reconstructed density matrices,
/// member `i` drawing from the stream derived from `(seed, i)`.
pub fn simulate_rows(config: &SimulationConfig) -> CliResult<Vec<StepRow>> {
    config.validate()?;
    let rho0 = initial_density(config)?;
    let h = evolution_hamiltonian(config)?;
    let l = Operator::lowering();
    let w = QsdWeights::new(config.alpha, config.beta)?;
    let dt = config.dt();

    let evolve_member = |index: u64| {
        evolve_basis_trajectories(
            &rho0,
            &h,
            &l,
            &w,
            dt,
            config.steps,
            derive_stream_seed(config.seed, index),
            config.convention,
            config.noise_sharing,
            config.expectation_source,
        )
    };

    let n = config.steps + 1;
    if config.ensemble_size == 1 {
        let record = evolve_member(0)?;
        let rows = (0..n)
            .map(|k| StepRow {
                step: k,
                time_s: record.times[k],
                mx_abs_re: record.mx[k].abs(),
                my_abs_re: record.my[k].abs(),
                trace_re: record.trace_re[k],
                norm_minus: record.state_minus[k].norm(),
                norm_plus: record.state_plus[k].norm(),
            })
            .collect();
        return Ok(rows);
    }

    struct Partial {
        rho: Vec<[Complex; 4]>,
        norm_minus: Vec<f64>,
        norm_plus: Vec<f64>,
    }

    let members = config.ensemble_size as u64;
    let chunks: Vec<(u64, u64)> = (0..members)
        .step_by(ENSEMBLE_CHUNK)
        .map(|start| (start, (start + ENSEMBLE_CHUNK as u64).min(members)))
        .collect();

    let partials: Vec<Result<Partial, qsd_nmr_core::Error>> = chunks
        .into_par_iter()
        .map(|(start, end)| {
            let zero = Complex::new(0.0, 0.0);
            let mut acc = Partial {
                rho: vec![[zero; 4]; n],
                norm_minus: vec![0.0; n],
                norm_plus: vec![0.0; n],
            };
            for index in start..end {
                let record = evolve_member(index)?;
                for k in 0..n {
                    let e = record.rho[k].entries();
                    acc.rho[k][0] += e[0][0];
                    acc.rho[k][1] += e[0][1];
                    acc.rho[k][2] += e[1][0];
                    acc.rho[k][3] += e[1][1];
                    acc.norm_minus[k] += record.state_minus[k].norm();
                    acc.norm_plus[k] += record.state_plus[k].norm();
                }
            }
            Ok(acc)
        })
        .collect();

    let zero = Complex::new(0.0, 0.0);
    let mut total = Partial {
        rho: vec![[zero; 4]; n],
        norm_minus: vec![0.0; n],
        norm_plus: vec![0.0; n],
    };
    for partial in partials {
        let partial = partial?;
        for k in 0..n {
            for j in 0..4 {
                total.rho[k][j] += partial.rho[k][j];
            }
            total.norm_minus[k] += partial.norm_minus[k];
            total.norm_plus[k] += partial.norm_plus[k];
        }
    }

    let ix = Operator::spin_x();
    let iy = Operator::spin_y();
    let inv = 1.0 / members as f64;
    let rows = (0..n)
        .map(|k| {
            let m = total.rho[k];
            let mean = DensityMatrix::new([
                [m[0] * inv, m[1] * inv],
                [m[2] * inv, m[3] * inv],
            ])
            .expect("mean of Hermitian matrices is Hermitian");
            StepRow {
                step: k,
                time_s: k as f64 * dt,
                mx_abs_re: mean.trace_expectation(&ix).re.abs(),
                my_abs_re: mean.trace_expectation(&iy).re.abs(),
                trace_re: mean.trace().re,
                norm_minus: total.norm_minus[k] * inv,
                norm_plus: total.norm_plus[k] * inv,
            }
        })
        .collect();
    Ok(rows)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("magnetizations are finite"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

pub fn summarize(rows: &[StepRow]) -> RunSummary {
    let mx: Vec<f64> = rows.iter().map(|r| r.mx_abs_re).collect();
    let my: Vec<f64> = rows.iter().map(|r| r.my_abs_re).collect();
    let count = rows.len().max(1) as f64;
    RunSummary {
        mean_mx_abs_re: mx.iter().sum::<f64>() / count,
        median_mx_abs_re: median(&mx),
        mean_my_abs_re: my.iter().sum::<f64>() / count,
        median_my_abs_re: median(&my),
        final_trace_re: rows.last().map(|r| r.trace_re).unwrap_or(f64::NAN),
    }
}

/// Runs a simulation and writes its CSV under `out_dir` with the given file
/// stem, returning the report together with the rows.
pub fn run_with_stem_rows(
    config: &SimulationConfig,
    out_dir: &Path,
    stem: &str,
) -> CliResult<(RunReport, Vec<StepRow>)> {
    let started = Instant::now();
    let rows = simulate_rows(config)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{stem}.csv"));
    write_csv(&csv_path, &rows)?;
    if !csv_path.exists() {
        return Err(CliError::Io(format!(
            "expected output {} was not created",
            csv_path.display()
        )));
    }
    let report = RunReport {
        config: *config,
        csv_path,
        summary: summarize(&rows),
        seed: config.seed,
        wall_time: started.elapsed(),
    };
    Ok((report, rows))
}

/// Runs a simulation and writes its CSV under `out_dir` with the given file
/// stem.
pub fn run_with_stem(
    config: &SimulationConfig,
    out_dir: &Path,
    stem: &str,
) -> CliResult<RunReport> {
    run_with_stem_rows(config, out_dir, stem).map(|(report, _)| report)
}

/// Runs a simulation with the default file stem
/// `run_alpha<a>_beta<b>_seed<s>`.
pub fn run(config: &SimulationConfig, out_dir: &Path) -> CliResult<RunReport> {
    let stem = format!(
        "run_alpha{:.4}_beta{:.4}_seed{}",
        config.alpha, config.beta, config.seed
    );
    run_with_stem(config, out_dir, &stem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsd_nmr_core::nmr::magnetization;
    use qsd_nmr_core::Axis;

    #[test]
    fn initial_density_applies_the_gate() {
        let mut config = SimulationConfig::default();
        let rho = initial_density(&config).unwrap();
        // Post-X state: off-diagonal +-i x/4.
        assert!(rho.entry(0, 1).im > 0.0);
        assert!((magnetization(&rho, Axis::X)).abs() < 1e-15);

        config.gate = GateChoice::None;
        let rho = initial_density(&config).unwrap();
        assert_eq!(rho.entry(0, 1), Complex::new(0.0, 0.0));
    }

    #[test]
    fn rotating_frame_has_zero_hamiltonian() {
        let mut config = SimulationConfig::default();
        config.frame = Frame::Rotating;
        assert_eq!(evolution_hamiltonian(&config).unwrap(), Operator::zero());
        config.frame = Frame::Laboratory;
        assert!(evolution_hamiltonian(&config).unwrap().entry(0, 0).re < 0.0);
    }

    #[test]
    fn median_of_odd_and_even_counts() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn ensemble_mean_is_independent_of_chunking() {
        // 1-member ensembles and the single-trajectory path agree exactly.
        let mut config = SimulationConfig::default();
        config.frame = Frame::Rotating;
        config.alpha = 0.3;
        config.beta = 0.7;
        config.steps = 50;
        let single = simulate_rows(&config).unwrap();

        config.ensemble_size = 1;
        let same = simulate_rows(&config).unwrap();
        for (a, b) in single.iter().zip(&same) {
            assert_eq!(a.mx_abs_re.to_bits(), b.mx_abs_re.to_bits());
        }
    }

    #[test]
    fn ensemble_mean_shrinks_noise() {
        let mut config = SimulationConfig::default();
        config.frame = Frame::Rotating;
        config.alpha = 0.0;
        config.beta = 1.0;
        config.steps = 100;
        config.ensemble_size = 1;
        let single = summarize(&simulate_rows(&config).unwrap());
        config.ensemble_size = 200;
        let averaged = summarize(&simulate_rows(&config).unwrap());
        assert!(averaged.median_mx_abs_re < single.median_mx_abs_re);
    }
}
