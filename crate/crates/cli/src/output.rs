//! CSV, metadata and plot-script writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Scenario;
use crate::error::Result;
use crate::scenario::{Cell, SweepResult};

/// Shortest round-trip representation; scientific notation outside
/// `[1e-4, 1e6)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn format_cell(c: Cell) -> String {
    match c {
        Cell::Float(x) => {
            assert!(x.is_finite(), "non-finite value reached the CSV writer");
            format_float(x)
        }
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => u8::from(b).to_string(),
    }
}

pub fn to_csv(result: &SweepResult) -> String {
    let mut out = result.columns.join(",");
    out.push('\n');
    for row in &result.rows {
        let cells: Vec<String> = row.iter().map(|&c| format_cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn singular_log(result: &SweepResult) -> String {
    let mut out = String::new();
    for s in &result.singular {
        match s.curve {
            Some(c) => writeln!(out, "{}={} curve={}: {}", result.columns[sweep_column(result)], format_float(s.sweep_value), format_float(c), s.reason),
            None => writeln!(out, "{}={}: {}", result.columns[sweep_column(result)], format_float(s.sweep_value), s.reason),
        }
        .expect("writing to a String");
    }
    out
}

fn sweep_column(result: &SweepResult) -> usize {
    // fig1 rows lead with the curve parameter
    usize::from(result.scenario == Scenario::MixedPhaseError)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub metadata: PathBuf,
    pub plot: PathBuf,
    pub singular_log: Option<PathBuf>,
}

/// Writes `<stem>.csv`, `<stem>.meta.json`, `<stem>.gp` and, when there
/// are singular points, `<stem>.singular.log` into `dir` (created if
/// missing).
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir)?;
    let stem = &result.stem;
    let csv = dir.join(format!("{stem}.csv"));
    fs::write(&csv, to_csv(result))?;
    let metadata = dir.join(format!("{stem}.meta.json"));
    let mut meta = serde_json::to_string_pretty(&result.metadata).expect("metadata serializes");
    meta.push('\n');
    fs::write(&metadata, meta)?;
    let plot = dir.join(format!("{stem}.gp"));
    emit_plot_script(result, &plot)?;
    let log_path = dir.join(format!("{stem}.singular.log"));
    let singular_log = if result.singular.is_empty() {
        if log_path.exists() {
            fs::remove_file(&log_path)?;
        }
        None
    } else {
        fs::write(&log_path, singular_log(result))?;
        Some(log_path)
    };
    Ok(OutputPaths {
        csv,
        metadata,
        plot,
        singular_log,
    })
}

/// Writes a gnuplot script that reads `<stem>.csv` from its own directory
/// and renders `<stem>.png`.
pub fn emit_plot_script(result: &SweepResult, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, plot_script(result))?;
    Ok(())
}

fn col(result: &SweepResult, name: &str) -> usize {
    result
        .columns
        .iter()
        .position(|c| *c == name)
        .map(|i| i + 1)
        .unwrap_or_else(|| panic!("column {name} missing"))
}

fn meta_f64(result: &SweepResult, path: &[&str]) -> Option<f64> {
    let mut v = &result.metadata;
    for key in path {
        v = v.get(key)?;
    }
    v.as_f64()
}

pub fn plot_script(result: &SweepResult) -> String {
    let stem = &result.stem;
    let data = format!("{stem}.csv");
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "# gnuplot script for {data}");
    let _ = writeln!(w, "set datafile separator ','");
    let _ = writeln!(w, "set terminal pngcairo size 900,600");
    let _ = writeln!(w, "set output '{stem}.png'");
    let _ = writeln!(w, "set key top right");
    let m = meta_f64(result, &["summary", "m"]).unwrap_or(1.0);
    match result.scenario {
        Scenario::MixedPhaseError => {
            let ps: Vec<String> = result.metadata["summary"]["curves"]
                .as_array()
                .map(|a| a.iter().filter_map(|c| c["p"].as_f64()).map(crate::output::format_float).collect())
                .unwrap_or_default();
            let _ = writeln!(w, "ps = \"{}\"", ps.join(" "));
            let _ = writeln!(w, "set xlabel 'phi'");
            let _ = writeln!(w, "set ylabel 'Delta phi'");
            let _ = writeln!(w, "set yrange [0:2]");
            let _ = writeln!(
                w,
                "plot for [i=1:words(ps)] '{data}' skip 1 using {}:(abs(${} - word(ps, i)) < 1e-12 ? ${} : 1/0) with lines title sprintf('p_M = %s', word(ps, i)), \\",
                col(result, "phi"),
                col(result, "p"),
                col(result, "dphi")
            );
            let _ = writeln!(w, "     1/sqrt({m}) with lines dashtype 3 title 'SQL', \\");
            let _ = writeln!(w, "     1.0/{m} with lines dashtype 2 title 'HL'");
        }
        Scenario::LossyMinError => {
            let _ = writeln!(w, "set xlabel 'M'");
            let _ = writeln!(w, "set ylabel 'Delta phi_min'");
            let _ = writeln!(w, "set logscale y");
            let _ = writeln!(
                w,
                "plot '{data}' skip 1 using {}:{} with points pointtype 7 title 'Delta phi_min', \\",
                col(result, "m"),
                col(result, "dphi_min")
            );
            let _ = writeln!(w, "     1/sqrt(x) with lines dashtype 3 title 'SQL', \\");
            let _ = writeln!(w, "     1/x with lines dashtype 2 title 'HL'");
        }
        Scenario::DephasingMinError => {
            if let Some(t) = meta_f64(result, &["summary", "threshold_sqrt_ln_m_over_m"]) {
                let _ = writeln!(w, "set arrow from {t}, graph 0 to {t}, graph 1 nohead dashtype 4");
            }
            let _ = writeln!(w, "set xlabel 'delta'");
            let _ = writeln!(w, "set ylabel 'Delta phi_min'");
            let _ = writeln!(w, "set yrange [0:1.5]");
            let _ = writeln!(
                w,
                "plot '{data}' skip 1 using {}:{} with lines title 'Delta phi_min', \\",
                col(result, "delta"),
                col(result, "dphi_min")
            );
            let _ = writeln!(w, "     1/sqrt({m}) with lines dashtype 3 title 'SQL', \\");
            let _ = writeln!(w, "     1.0/{m} with lines dashtype 2 title 'HL'");
        }
        Scenario::VacuumMixCombined => {
            let _ = writeln!(w, "set xlabel 'p'");
            let _ = writeln!(w, "set ylabel 'tau'");
            let _ = writeln!(w, "set y2label 'Delta phi_min'");
            let _ = writeln!(w, "set ytics nomirror");
            let _ = writeln!(w, "set y2tics");
            let _ = writeln!(w, "set yrange [-0.55:0.05]");
            let _ = writeln!(w, "set y2range [0:2]");
            let _ = writeln!(
                w,
                "plot '{data}' skip 1 using {}:{} axes x1y1 with lines dashtype 2 title 'tau', \\",
                col(result, "p"),
                col(result, "tau")
            );
            let _ = writeln!(
                w,
                "     '{data}' skip 1 using {}:{} axes x1y2 with lines dashtype 4 title 'Delta phi_min', \\",
                col(result, "p"),
                col(result, "dphi_min")
            );
            let _ = writeln!(w, "     1/sqrt({m}) axes x1y2 with lines dashtype 3 title 'SQL 1/sqrt({m})'");
        }
        Scenario::TurbulenceTau => {
            let _ = writeln!(w, "set xlabel 'd [m]'");
            let _ = writeln!(w, "set ylabel 'tau'");
            let _ = writeln!(
                w,
                "plot '{data}' skip 1 using {}:{} with lines title 'co-propagation', \\",
                col(result, "distance"),
                col(result, "tau_co")
            );
            let _ = writeln!(
                w,
                "     '{data}' skip 1 using {}:{} with lines title 'counter-propagation', \\",
                col(result, "distance"),
                col(result, "tau_counter")
            );
            let _ = writeln!(w, "     0 with lines linecolor rgb 'black' notitle");
        }
        Scenario::Custom => {
            let _ = writeln!(w, "set xlabel 'phi'");
            let _ = writeln!(w, "set ylabel 'Delta phi'");
            let _ = writeln!(
                w,
                "plot '{data}' skip 1 using {}:{} with lines title 'Delta phi', \\",
                col(result, "phi"),
                col(result, "dphi")
            );
            let _ = writeln!(w, "     1/sqrt({m}) with lines dashtype 3 title 'SQL', \\");
            let _ = writeln!(w, "     1.0/{m} with lines dashtype 2 title 'HL'");
        }
    }
    s
}
