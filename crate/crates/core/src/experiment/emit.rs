//! Result emission: raw CSV, summary CSV, and one SVG error chart per
//! topology.

use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::topology::TopologyKind;

use super::{CurveSummary, ExperimentConfig, ResultsTable};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Write the results CSV, the mean-curve summary CSV, and one labeled SVG per
/// topology into `out_dir`. Returns the written paths.
pub fn emit(
    table: &ResultsTable,
    summary: &CurveSummary,
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if config.algorithms.is_empty() {
        return Err(SimError::InvalidConfig(
            "nothing to emit: the algorithm list is empty".into(),
        ));
    }
    if table.rows.is_empty() {
        return Err(SimError::InvalidConfig(
            "nothing to emit: the results table is empty".into(),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| SimError::io(out_dir, e))?;
    let mut written = Vec::new();

    let raw_path = out_dir.join("results.csv");
    std::fs::write(&raw_path, table.to_csv()).map_err(|e| SimError::io(&raw_path, e))?;
    written.push(raw_path);

    let summary_path = out_dir.join("summary.csv");
    std::fs::write(&summary_path, summary_csv(summary))
        .map_err(|e| SimError::io(&summary_path, e))?;
    written.push(summary_path);

    for &kind in &config.topologies {
        let series: Vec<(String, &[f64])> = summary
            .curves
            .iter()
            .filter(|c| c.topology == kind)
            .map(|c| (c.algorithm.name().to_string(), c.mean_error.as_slice()))
            .collect();
        let svg = render_topology_svg(kind, &series, config.t_max);
        let path = out_dir.join(format!("{}.svg", kind.name()));
        std::fs::write(&path, svg).map_err(|e| SimError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn summary_csv(summary: &CurveSummary) -> String {
    let mut out = String::from("topology,algorithm,t,mean_error,std_error\n");
    for curve in &summary.curves {
        for (t, (mean, se)) in curve.mean_error.iter().zip(&curve.std_error).enumerate() {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6}\n",
                curve.topology.name(),
                curve.algorithm.name(),
                t,
                mean,
                se
            ));
        }
    }
    out
}

/// Standalone SVG line chart: operating age against error rate in percent,
/// one labeled series per algorithm.
pub fn render_topology_svg(kind: TopologyKind, series: &[(String, &[f64])], t_max: u32) -> String {
    const WIDTH: f64 = 880.0;
    const HEIGHT: f64 = 540.0;
    const LEFT: f64 = 72.0;
    const RIGHT: f64 = 150.0;
    const TOP: f64 = 56.0;
    const BOTTOM: f64 = 64.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |t: f64| LEFT + (t / t_max.max(1) as f64) * plot_w;
    let y = |err: f64| TOP + (1.0 - err.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" text-anchor=\"middle\">Diagnostic error rate over operating age — {} topology</text>\n",
        LEFT + plot_w / 2.0,
        kind.name()
    ));

    // gridlines and axis labels
    for pct in (0..=100).step_by(10) {
        let gy = y(pct as f64 / 100.0);
        svg.push_str(&format!(
            "<line x1=\"{LEFT:.1}\" y1=\"{gy:.1}\" x2=\"{:.1}\" y2=\"{gy:.1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{pct}%</text>\n",
            LEFT - 8.0,
            gy + 4.0
        ));
    }
    let t_step = (t_max / 10).max(1);
    let mut t_tick = 0u32;
    while t_tick <= t_max {
        let gx = x(t_tick as f64);
        svg.push_str(&format!(
            "<line x1=\"{gx:.1}\" y1=\"{TOP:.1}\" x2=\"{gx:.1}\" y2=\"{:.1}\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n",
            TOP + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{gx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{t_tick}</text>\n",
            TOP + plot_h + 18.0
        ));
        t_tick += t_step;
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">operating age t</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">error rate</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));

    // axis frame
    svg.push_str(&format!(
        "<rect x=\"{LEFT:.1}\" y=\"{TOP:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n"
    ));

    for (i, (name, curve)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(t, &err)| format!("{:.1},{:.1}", x(t as f64), y(err)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = TOP + 16.0 + i as f64 * 20.0;
        let lx = LEFT + plot_w + 14.0;
        svg.push_str(&format!(
            "<line x1=\"{lx:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            ly - 4.0,
            lx + 24.0,
            ly - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"12\">{name}</text>\n",
            lx + 30.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::DatasetConfig;
    use crate::diagnostics::AlgorithmKind;
    use crate::experiment::{run, summarize};

    fn scratch_dir(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("wsndiag-{}-{}", name, std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn emit_writes_expected_files() {
        let config = ExperimentConfig {
            seeds: 1,
            t_max: 1,
            dataset: DatasetConfig {
                n: 400,
                ..DatasetConfig::default()
            },
            ..ExperimentConfig::default()
        };
        let table = run(&config).unwrap();
        let summary = summarize(&table, &config);
        let dir = scratch_dir("emit");
        let written = emit(&table, &summary, &config, &dir).unwrap();
        assert_eq!(written.len(), 2 + 4);
        let raw = std::fs::read_to_string(dir.join("results.csv")).unwrap();
        assert_eq!(raw.lines().count(), table.rows.len() + 1);
        assert!(raw.starts_with(super::super::RESULTS_HEADER));
        for kind in TopologyKind::ALL {
            let svg = std::fs::read_to_string(dir.join(format!("{}.svg", kind.name()))).unwrap();
            assert!(svg.starts_with("<svg"));
            assert_eq!(svg.matches("<polyline").count(), 6);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn emit_rejects_empty_algorithms() {
        let mut config = ExperimentConfig::default();
        config.algorithms.clear();
        let table = ResultsTable::default();
        let summary = CurveSummary::default();
        let dir = scratch_dir("emit-empty");
        assert!(matches!(
            emit(&table, &summary, &config, &dir),
            Err(SimError::InvalidConfig(_))
        ));
        assert!(!dir.exists(), "nothing may be written on error");
        let _ = AlgorithmKind::ALL;
    }
}
