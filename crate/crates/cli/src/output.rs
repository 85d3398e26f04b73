//! CSV and plot emission.
//!
//! The CSV schema is fixed: one header row, then one row per grid point with
//! full-double-precision decimal text (shortest round-trip form).

use std::io::Write;
use std::path::Path;

use plotters::prelude::*;

use crate::runner::StepRow;
use crate::CliResult;

/// The exact, versioned header row.
pub const CSV_HEADER: &str = "step,time_s,mx_abs_re,my_abs_re,trace_re,norm_minus,norm_plus";

pub fn write_csv(path: &Path, rows: &[StepRow]) -> CliResult<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e}",
            row.step,
            row.time_s,
            row.mx_abs_re,
            row.my_abs_re,
            row.trace_re,
            row.norm_minus,
            row.norm_plus
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Draws the signal (`|Re My|`, line) and noise (`|Re Mx|`, points) series
/// into an SVG file. `t_max` restricts the plotted window.
pub fn plot_signal_noise(
    path: &Path,
    title: &str,
    rows: &[StepRow],
    t_max: Option<f64>,
) -> Result<(), Box<dyn std::error::Error>> {
    let limit = t_max.unwrap_or(f64::INFINITY);
    let points: Vec<&StepRow> = rows.iter().filter(|r| r.time_s <= limit).collect();
    let x_max = points.last().map(|r| r.time_s).unwrap_or(1.0).max(1e-12);
    let y_max = points
        .iter()
        .map(|r| r.mx_abs_re.max(r.my_abs_re))
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.1;

    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..x_max, 0.0..y_max)?;
    chart
        .configure_mesh()
        .x_desc("time (s)")
        .y_desc("magnetic moment")
        .draw()?;

    chart
        .draw_series(LineSeries::new(
            points.iter().map(|r| (r.time_s, r.my_abs_re)),
            &BLUE,
        ))?
        .label("signal |Re My|")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], BLUE));
    chart
        .draw_series(
            points
                .iter()
                .map(|r| Circle::new((r.time_s, r.mx_abs_re), 2, RED.filled())),
        )?
        .label("noise |Re Mx|")
        .legend(|(x, y)| Circle::new((x + 8, y), 2, RED.filled()));

    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.8))
        .draw()?;
    root.present()?;
    Ok(())
}
