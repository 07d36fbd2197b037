//! CSV and SVG emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, SweepVariable};
use super::experiments::{estimator, RegretTable, ResultTable, SweepTable};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 6] = [
    "sweep_variable",
    "sweep_value",
    "estimator",
    "estimate",
    "std_error",
    "replications",
];

fn csv_error(e: csv::Error) -> Error {
    Error::EmptyResults(format!("CSV encoding failed: {e}"))
}

pub fn sweep_csv(table: &SweepTable) -> Result<Vec<u8>> {
    if table.rows.is_empty() {
        return Err(Error::EmptyResults("sweep table has no rows".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).map_err(csv_error)?;
    for r in &table.rows {
        w.write_record([
            table.variable.name().to_string(),
            r.sweep_value.to_string(),
            r.estimator.to_string(),
            r.estimate.to_string(),
            r.std_error.to_string(),
            r.replications.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::EmptyResults(e.to_string()))
}

pub fn regret_csv(table: &RegretTable) -> Result<Vec<u8>> {
    if table.curves.is_empty() || table.horizon == 0 || table.curves.iter().any(|c| c.replications == 0) {
        return Err(Error::EmptyResults("regret table has no replications".into()));
    }
    let arms = table.schedule.arms();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "policy".to_string(),
        "round".into(),
        "cumulative_regret".into(),
        "std_error".into(),
        "replications".into(),
    ];
    header.extend((0..arms).map(|a| format!("mean_arm{a}")));
    w.write_record(&header).map_err(csv_error)?;
    for c in &table.curves {
        for t in 0..table.horizon as usize {
            let mut rec = vec![
                c.policy.to_string(),
                (t + 1).to_string(),
                c.mean[t].to_string(),
                c.std_error[t].to_string(),
                c.replications.to_string(),
            ];
            rec.extend(table.schedule.means_at(t as u64).iter().map(|m| m.to_string()));
            w.write_record(&rec).map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| Error::EmptyResults(e.to_string()))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

/// Minimal line chart. With `log_x` the x axis is logarithmic.
fn line_chart(title: &str, x_label: &str, y_label: &str, log_x: bool, series: &[Series]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let fx = |x: f64| if log_x { x.log10() } else { x };
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(fx(x));
        x1 = x1.max(fx(x));
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    y0 = y0.min(0.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (fx(x) - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{title}</text>"#, left + pw / 2.0);
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=4 {
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let py = sy(fy);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{py:.1}" x2="{}" y2="{py:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            left + pw,
            left - 6.0,
            py + 4.0,
            tick(fy)
        );
        let gx = x0 + (x1 - x0) * i as f64 / 4.0;
        let px = left + pw * i as f64 / 4.0;
        let shown = if log_x { 10f64.powf(gx) } else { gx };
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#,
            top + ph + 18.0,
            tick(shown)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{}"/>"#,
            path.join(" ")
        );
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            ser.name
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

pub fn sweep_svg(table: &SweepTable, title: &str) -> String {
    use estimator::*;
    let names = [ACTIVE_MC, PASSIVE_MC, OPTIMAL_MC, OPTIMAL_ANALYTIC, RANDOM_MC, BANDIT];
    let series: Vec<Series> = names
        .iter()
        .map(|n| Series {
            name: n.to_string(),
            points: table
                .rows
                .iter()
                .filter(|r| r.estimator == *n)
                .map(|r| (r.sweep_value, r.estimate))
                .collect(),
            dashed: *n == OPTIMAL_ANALYTIC,
        })
        .collect();
    let (x_label, log_x) = match table.variable {
        SweepVariable::Zeta => ("interferer density (1/m^2)", true),
        SweepVariable::EStorage => ("storage capacity (J)", false),
    };
    line_chart(title, x_label, "success probability", log_x, &series)
}

pub fn regret_svg(table: &RegretTable, title: &str) -> String {
    let step = (table.horizon as usize / 500).max(1);
    let series: Vec<Series> = table
        .curves
        .iter()
        .map(|c| Series {
            name: c.policy.to_string(),
            points: (0..c.mean.len())
                .step_by(step)
                .chain(std::iter::once(c.mean.len() - 1))
                .map(|t| ((t + 1) as f64, c.mean[t]))
                .collect(),
            dashed: false,
        })
        .collect();
    line_chart(title, "round", "cumulative regret", false, &series)
}

/// Base file name for an experiment run.
pub fn output_stem(config: &ExperimentConfig) -> String {
    format!("{}_seed{}", config.id.name(), config.seed)
}

/// Writes the CSV and SVG of `table` into `config.out_dir`. Everything is rendered first and
/// written through temporary files, so a failure leaves no partial outputs behind.
pub fn emit_outputs(table: &ResultTable, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let stem = output_stem(config);
    let title = format!("{} (seed {})", config.id.name(), config.seed);
    let (csv, svg) = match table {
        ResultTable::Sweep(t) => (sweep_csv(t)?, sweep_svg(t, &title)),
        ResultTable::Regret(t) => (regret_csv(t)?, regret_svg(t, &title)),
    };
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [(format!("{stem}.csv"), csv), (format!("{stem}.svg"), svg.into_bytes())];
    write_all_or_nothing(dir, &files)
}

fn write_all_or_nothing(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, bytes) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, bytes) {
            cleanup(&staged);
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    // files from an earlier run are set aside until every rename has gone through
    let mut backups: Vec<Option<PathBuf>> = Vec::new();
    for (i, (tmp, dest)) in staged.iter().enumerate() {
        let backup = dest.is_file().then(|| tmp.with_extension("bak"));
        let moved = match &backup {
            Some(b) => fs::rename(dest, b).and_then(|_| fs::rename(tmp, dest)),
            None => fs::rename(tmp, dest),
        };
        if let Err(e) = moved {
            cleanup(&staged[i..]);
            if let Some(b) = &backup {
                let _ = fs::rename(b, dest);
            }
            for ((_, done), b) in staged[..i].iter().zip(&backups) {
                match b {
                    Some(b) => {
                        let _ = fs::rename(b, done);
                    }
                    None => {
                        let _ = fs::remove_file(done);
                    }
                }
            }
            return Err(Error::io(dest, e));
        }
        backups.push(backup);
    }
    for b in backups.into_iter().flatten() {
        let _ = fs::remove_file(b);
    }
    Ok(staged.into_iter().map(|(_, dest)| dest).collect())
}
