//! Alpha-beta grid sweeps summarizing the signal and noise medians.

use std::io::Write;
use std::path::{Path, PathBuf};

use qsd_nmr_core::qsd::QsdWeights;

use crate::config::SimulationConfig;
use crate::runner::{simulate_rows, summarize};
use crate::{CliError, CliResult};

/// One summary row of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub median_mx_abs_re: f64,
    pub median_my_abs_re: f64,
    /// `median |Re Mx| / median |Re My|`; infinite when the signal median
    /// is zero.
    pub noise_to_signal: f64,
}

pub const SWEEP_HEADER: &str = "alpha,beta,median_mx_abs_re,median_my_abs_re,noise_to_signal";

/// Parses `a:b` pairs separated by commas, e.g. `1:0,0.7:0.3`.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (a, b) = item.split_once(':').ok_or_else(|| {
            CliError::Config(format!("expected `alpha:beta`, got `{item}`"))
        })?;
        let alpha: f64 = a
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse alpha `{a}`")))?;
        let beta: f64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse beta `{b}`")))?;
        pairs.push((alpha, beta));
    }
    Ok(pairs)
}

/// Runs every pair with the same seed and base configuration and writes the
/// summary table to `out_dir/sweep.csv`.
pub fn sweep(
    pairs: &[(f64, f64)],
    base: &SimulationConfig,
    out_dir: &Path,
) -> CliResult<(Vec<SweepRow>, PathBuf)> {
    if pairs.is_empty() {
        return Err(CliError::Config("sweep grid must be non-empty".into()));
    }
    for &(alpha, beta) in pairs {
        QsdWeights::new(alpha, beta)?;
    }
    base.validate()?;

    let mut rows = Vec::with_capacity(pairs.len());
    for &(alpha, beta) in pairs {
        let mut config = *base;
        config.alpha = alpha;
        config.beta = beta;
        let summary = summarize(&simulate_rows(&config)?);
        let noise_to_signal = if summary.median_my_abs_re > 0.0 {
            summary.median_mx_abs_re / summary.median_my_abs_re
        } else {
            f64::INFINITY
        };
        rows.push(SweepRow {
            alpha,
            beta,
            median_mx_abs_re: summary.median_mx_abs_re,
            median_my_abs_re: summary.median_my_abs_re,
            noise_to_signal,
        });
    }

    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("sweep.csv");
    let file = std::fs::File::create(&path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in &rows {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            row.alpha, row.beta, row.median_mx_abs_re, row.median_my_abs_re, row.noise_to_signal
        )?;
    }
    out.flush()?;
    Ok((rows, path))
}
