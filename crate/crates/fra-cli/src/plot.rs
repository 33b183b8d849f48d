//! Self-contained SVG plots with CSV twins.
//!
//! Everything is emitted with fixed-precision formatting and no external
//! assets, so identical inputs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fra_core::eval::CurveStats;
use fra_core::{FraSweep, FrequencyGrid, LabeledDataset};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    s
}

fn axis_text(x: f64, y: f64, anchor: &str, text: &str) -> String {
    format!(
        r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{text}</text>"#
    )
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Frame {
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }

    fn border(&self) -> String {
        format!(
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333333"/>"##,
            MARGIN_LEFT,
            MARGIN_TOP,
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        )
    }
}

fn write_pair(svg_path: &Path, svg: &str, csv: &str) -> Result<()> {
    if let Some(dir) = svg_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(svg_path, svg)
        .with_context(|| format!("writing {}", svg_path.display()))?;
    let csv_path = svg_path.with_extension("csv");
    std::fs::write(&csv_path, csv)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    Ok(())
}

/// Bode magnitude plot of selected samples: log-frequency x-axis, one
/// polyline per sweep.
pub fn bode(ds: &LabeledDataset, indices: &[usize], out: &Path) -> Result<()> {
    if indices.is_empty() {
        bail!("no samples selected");
    }
    for &i in indices {
        if i >= ds.len() {
            bail!("sample index {i} out of range ({} samples)", ds.len());
        }
    }
    let grid = ds.grid();
    let (mut lo, mut hi) = (0.0f64, -200.0f64);
    for &i in indices {
        for &v in ds.samples()[i].sweep.values() {
            lo = lo.min(v as f64);
            hi = hi.max(v as f64);
        }
    }
    let frame = Frame::new(
        grid.f_min().log10(),
        grid.f_max().log10(),
        (lo - 5.0).floor(),
        (hi + 5.0).ceil().min(5.0),
    );
    let mut svg = svg_open("FRA magnitude");
    svg.push_str(&frame.border());
    // Decade gridlines.
    let mut decade = grid.f_min().log10().ceil() as i32;
    while (decade as f64) <= grid.f_max().log10() {
        let x = frame.px(decade as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{MARGIN_TOP}" x2="{x:.1}" y2="{:.1}" stroke="#dddddd"/>"##,
            HEIGHT - MARGIN_BOTTOM
        );
        svg.push_str(&axis_text(
            x,
            HEIGHT - MARGIN_BOTTOM + 18.0,
            "middle",
            &format!("1e{decade}"),
        ));
        svg.push('\n');
        decade += 1;
    }
    for tick in 0..=4 {
        let y = frame.y0 + (frame.y1 - frame.y0) * tick as f64 / 4.0;
        let py = frame.py(y);
        svg.push_str(&axis_text(MARGIN_LEFT - 8.0, py + 4.0, "end", &format!("{y:.0}")));
        svg.push('\n');
    }
    svg.push_str(&axis_text(
        WIDTH / 2.0,
        HEIGHT - 18.0,
        "middle",
        "frequency (Hz)",
    ));
    svg.push('\n');
    for (k, &i) in indices.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (f, &v) in grid.points().iter().zip(ds.samples()[i].sweep.values()) {
            let _ = write!(
                points,
                "{:.2},{:.2} ",
                frame.px(f.log10()),
                frame.py(v as f64)
            );
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            points.trim_end()
        );
        let label = format!(
            "sample {i} ({} deg {})",
            ds.samples()[i].label.fault_type,
            ds.samples()[i].label.degree
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">{label}</text>"#,
            MARGIN_LEFT + 10.0,
            MARGIN_TOP + 16.0 + 14.0 * k as f64
        );
    }
    svg.push_str("</svg>\n");

    let mut csv = String::from("f_hz");
    for &i in indices {
        let _ = write!(csv, ",sample_{i}");
    }
    csv.push('\n');
    for (pi, f) in grid.points().iter().enumerate() {
        let _ = write!(csv, "{f:.4}");
        for &i in indices {
            let _ = write!(csv, ",{:.4}", ds.samples()[i].sweep.values()[pi]);
        }
        csv.push('\n');
    }
    write_pair(out, &svg, &csv)
}

/// Confusion-matrix heatmap with one labeled cell per count.
pub fn confusion_heatmap(
    counts: &[Vec<u64>],
    class_names: Option<&[String]>,
    out: &Path,
) -> Result<()> {
    let n = counts.len();
    if n == 0 {
        bail!("empty confusion matrix");
    }
    let max = counts
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0)
        .max(1);
    let frame = Frame::new(0.0, n as f64, 0.0, n as f64);
    let mut svg = svg_open("Confusion matrix (rows: truth, columns: prediction)");
    for (t, row) in counts.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            let x = frame.px(p as f64);
            let y = frame.py((n - t) as f64);
            let w = frame.px(1.0) - frame.px(0.0);
            let h = frame.py(0.0) - frame.py(1.0);
            let shade = 255 - ((c as f64 / max as f64) * 160.0) as u32;
            let _ = writeln!(
                svg,
                r##"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="rgb({shade},{shade},255)" stroke="#999999"/>"##
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{c}</text>"#,
                x + w / 2.0,
                y + h / 2.0 + 4.0
            );
        }
    }
    for i in 0..n {
        let name = match class_names {
            Some(names) => names[i].clone(),
            None => i.to_string(),
        };
        svg.push_str(&axis_text(
            frame.px(i as f64 + 0.5),
            HEIGHT - MARGIN_BOTTOM + 18.0,
            "middle",
            &name,
        ));
        svg.push('\n');
        svg.push_str(&axis_text(
            MARGIN_LEFT - 8.0,
            frame.py((n - i) as f64 - 0.5) + 4.0,
            "end",
            &name,
        ));
        svg.push('\n');
    }
    svg.push_str(&frame.border());
    svg.push_str("</svg>\n");

    let mut csv = String::from("truth\\pred");
    for p in 0..n {
        let _ = write!(csv, ",{p}");
    }
    csv.push('\n');
    for (t, row) in counts.iter().enumerate() {
        let _ = write!(csv, "{t}");
        for &c in row {
            let _ = write!(csv, ",{c}");
        }
        csv.push('\n');
    }
    write_pair(out, &svg, &csv)
}

/// CC-ED scatter, one color per degree group.
pub fn cc_ed_scatter(stats: &CurveStats, out: &Path) -> Result<()> {
    if stats.point_count() == 0 {
        bail!("no points to plot");
    }
    let mut cc_min = 1.0f64;
    let mut ed_max = 0.0f64;
    for g in &stats.groups {
        for p in &g.points {
            cc_min = cc_min.min(p.cc);
            ed_max = ed_max.max(p.ed);
        }
    }
    let frame = Frame::new((cc_min - 0.05).max(-1.05), 1.01, 0.0, ed_max * 1.05 + 1.0);
    let mut svg = svg_open("CC-ED map");
    svg.push_str(&frame.border());
    for tick in 0..=4 {
        let x = frame.x0 + (frame.x1 - frame.x0) * tick as f64 / 4.0;
        svg.push_str(&axis_text(
            frame.px(x),
            HEIGHT - MARGIN_BOTTOM + 18.0,
            "middle",
            &format!("{x:.2}"),
        ));
        svg.push('\n');
        let y = frame.y0 + (frame.y1 - frame.y0) * tick as f64 / 4.0;
        svg.push_str(&axis_text(
            MARGIN_LEFT - 8.0,
            frame.py(y) + 4.0,
            "end",
            &format!("{y:.0}"),
        ));
        svg.push('\n');
    }
    svg.push_str(&axis_text(
        WIDTH / 2.0,
        HEIGHT - 18.0,
        "middle",
        "correlation coefficient",
    ));
    svg.push('\n');
    for (k, g) in stats.groups.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for p in &g.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}" fill-opacity="0.7"/>"#,
                frame.px(p.cc),
                frame.py(p.ed)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">{} degree {}</text>"#,
            MARGIN_LEFT + 10.0,
            MARGIN_TOP + 16.0 + 14.0 * k as f64,
            g.fault_type,
            g.degree
        );
    }
    svg.push_str("</svg>\n");

    let mut csv = String::from("sample,fault_type,degree,cc,ed\n");
    for g in &stats.groups {
        for p in &g.points {
            let _ = writeln!(
                csv,
                "{},{},{},{:.6},{:.6}",
                p.sample_index, g.fault_type, g.degree, p.cc, p.ed
            );
        }
    }
    write_pair(out, &svg, &csv)
}

/// Convenience for the `plot --kind bode` default grid used in tests.
#[allow(dead_code)]
pub fn canonical_grid() -> FrequencyGrid {
    FrequencyGrid::canonical()
}

/// Parses the confusion CSV format produced by `eval`/`cv`.
pub fn parse_confusion_csv(text: &str) -> Result<Vec<Vec<u64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if !line.starts_with("truth\\pred") {
                bail!("not a confusion CSV (bad header {line:?})");
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 2 {
            bail!("confusion CSV row {i} too short");
        }
        let row: Result<Vec<u64>, _> = cells[1..].iter().map(|c| c.trim().parse()).collect();
        rows.push(row.with_context(|| format!("confusion CSV row {i}"))?);
    }
    if rows.is_empty() {
        bail!("confusion CSV has no data rows");
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("confusion CSV is not square");
    }
    Ok(rows)
}

/// Mean curve of the normal samples, the default CC-ED reference.
pub fn normal_reference(ds: &LabeledDataset) -> Result<FraSweep> {
    let normals: Vec<&FraSweep> = ds
        .samples()
        .iter()
        .filter(|s| s.label.is_normal())
        .map(|s| &s.sweep)
        .collect();
    if normals.is_empty() {
        bail!("dataset has no normal samples to build a reference curve");
    }
    Ok(fra_core::eval::mean_curve(&normals)?)
}
