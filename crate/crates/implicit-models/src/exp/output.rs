//! Result emission: the `results.csv` schema, static SVG line plots of
//! mean ± stderr curves, and chain-visualization image strips.

use crate::error::{Error, Result};
use crate::exp::records::{cell_values, mean_stderr, ExperimentRecord, Method};
use crate::seg::image::{save_rgb, LabelMap, RgbImage, LABEL_PALETTE};
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str =
    "experiment,method,train_size,repetition,train_error,test_error,risk_diff,seed,wall_time";

/// Serializes records in the fixed column order. Floats use the shortest
/// round-trip formatting, so `parse_csv(to_csv(r)) == r` bit-exactly.
pub fn to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.method,
            r.train_size,
            r.repetition,
            r.train_error,
            r.test_error,
            r.risk_diff,
            r.seed,
            r.wall_time
        );
    }
    out
}

pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    std::fs::write(path, to_csv(records))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("bad CSV header: {other:?}"))),
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(Error::Parse(format!(
                "line {}: expected 9 columns, got {}",
                lineno + 2,
                cols.len()
            )));
        }
        let field = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
        };
        let record = ExperimentRecord {
            experiment: cols[0].to_string(),
            method: Method::parse(cols[1])?,
            train_size: cols[2]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?,
            repetition: cols[3]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?,
            train_error: field(4)?,
            test_error: field(5)?,
            risk_diff: field(6)?,
            seed: cols[7]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?,
            wall_time: field(8)?,
        };
        if record.risk_diff != (record.train_error - record.test_error).abs() {
            return Err(Error::Parse(format!(
                "line {}: risk_diff does not equal |train - test|",
                lineno + 2
            )));
        }
        records.push(record);
    }
    Ok(records)
}

const SERIES_COLORS: [&str; 6] = [
    "#2b7d2b", "#7dbb5e", "#2456a4", "#d43c3c", "#e8a33d", "#8a52a8",
];

/// One plotted curve: `(x, mean, stderr)` points.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// Renders mean ± stderr curves into a standalone SVG file.
pub fn plot_series(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_x: bool,
) -> Result<()> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::InvalidConfig("nothing to plot".into()));
    }
    let (width, height) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 55.0);
    let (pw, ph) = (width - ml - mr, height - mt - mb);

    let tx = |x: f64| if log_x { x.log10() } else { x };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, m, se) in &s.points {
            x_min = x_min.min(tx(x));
            x_max = x_max.max(tx(x));
            y_min = y_min.min(m - se);
            y_max = y_max.max(m + se);
        }
    }
    if (x_max - x_min).abs() < 1e-12 {
        x_max = x_min + 1.0;
    }
    let pad = 0.08 * (y_max - y_min).max(1e-9);
    y_min -= pad;
    y_max += pad;
    let px = |x: f64| ml + (tx(x) - x_min) / (x_max - x_min) * pw;
    let py = |y: f64| mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = write!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
        width / 2.0,
        escape(title)
    );

    // Axes.
    let _ = write!(
        svg,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        mt + ph,
        ml + pw,
        mt + ph
    );
    let _ = write!(
        svg,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        mt + ph
    );

    // Y ticks.
    for k in 0..=5 {
        let y = y_min + k as f64 / 5.0 * (y_max - y_min);
        let yy = py(y);
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{yy}\" x2=\"{}\" y2=\"{yy}\" stroke=\"#cccccc\"/>",
            ml,
            ml + pw
        );
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>",
            ml - 6.0,
            yy + 4.0,
            y
        );
    }

    // X ticks at the union of plotted x values.
    let mut xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    for &x in &xs {
        let xx = px(x);
        let _ = write!(
            svg,
            "<line x1=\"{xx}\" y1=\"{}\" x2=\"{xx}\" y2=\"{}\" stroke=\"black\"/>",
            mt + ph,
            mt + ph + 5.0
        );
        let _ = write!(
            svg,
            "<text x=\"{xx}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{x}</text>",
            mt + ph + 18.0
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        ml + pw / 2.0,
        height - 14.0,
        escape(x_label)
    );
    let _ = write!(
        svg,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {})\">{}</text>",
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(y_label)
    );

    for (si, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[si % SERIES_COLORS.len()];
        let mut points = s.points.clone();
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let path_d: Vec<String> = points
            .iter()
            .enumerate()
            .map(|(i, &(x, m, _))| {
                format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, px(x), py(m))
            })
            .collect();
        let _ = write!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            path_d.join(" ")
        );
        for &(x, m, se) in &points {
            let (xx, y0, y1) = (px(x), py(m - se), py(m + se));
            let _ = write!(
                svg,
                "<line x1=\"{xx}\" y1=\"{y0}\" x2=\"{xx}\" y2=\"{y1}\" stroke=\"{color}\" stroke-width=\"1\"/>"
            );
            let _ = write!(
                svg,
                "<circle cx=\"{xx}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                py(m)
            );
        }
        // Legend entry.
        let ly = mt + 8.0 + 16.0 * si as f64;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ml + pw - 130.0,
            ml + pw - 105.0
        );
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            ml + pw - 100.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>");
    std::fs::write(path, svg)?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the per-experiment mean ± stderr plots of test error and risk
/// difference against training size.
pub fn plot_experiment(
    out_dir: &Path,
    experiment: &str,
    records: &[ExperimentRecord],
    methods: &[Method],
    log_x: bool,
) -> Result<Vec<std::path::PathBuf>> {
    let mut sizes: Vec<usize> = records
        .iter()
        .filter(|r| r.experiment == experiment)
        .map(|r| r.train_size)
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    let subset: Vec<ExperimentRecord> = records
        .iter()
        .filter(|r| r.experiment == experiment)
        .cloned()
        .collect();
    let build = |field: fn(&ExperimentRecord) -> f64| -> Vec<Series> {
        methods
            .iter()
            .map(|&m| Series {
                name: m.as_str().to_string(),
                points: sizes
                    .iter()
                    .filter_map(|&t| {
                        let vals = cell_values(&subset, m, t, field);
                        if vals.is_empty() {
                            return None;
                        }
                        let (mean, se) = mean_stderr(&vals);
                        Some((t as f64, mean, se))
                    })
                    .collect(),
            })
            .filter(|s| !s.points.is_empty())
            .collect()
    };
    let mut written = Vec::new();
    let test_path = out_dir.join(format!("{experiment}_test_error.svg"));
    plot_series(
        &test_path,
        &format!("{experiment}: test error vs training size"),
        "training size",
        "test error",
        &build(|r| r.test_error),
        log_x,
    )?;
    written.push(test_path);
    let risk_path = out_dir.join(format!("{experiment}_risk_diff.svg"));
    plot_series(
        &risk_path,
        &format!("{experiment}: |train - test| vs training size"),
        "training size",
        "risk difference",
        &build(|r| r.risk_diff),
        log_x,
    )?;
    written.push(risk_path);
    Ok(written)
}

/// Renders a label map through the display palette.
pub fn label_map_to_rgb(map: &LabelMap) -> RgbImage {
    let mut img = RgbImage::filled(map.width(), map.height(), [0.0; 3]);
    for i in 0..map.len() {
        let c = LABEL_PALETTE[map.get(i) as usize % LABEL_PALETTE.len()];
        img.set_pixel(
            i,
            [
                c[0] as f64 / 255.0,
                c[1] as f64 / 255.0,
                c[2] as f64 / 255.0,
            ],
        );
    }
    img
}

/// Concatenates images of equal height into one horizontal strip with thin
/// white separators.
pub fn hstack(images: &[RgbImage], separator: usize) -> Result<RgbImage> {
    if images.is_empty() {
        return Err(Error::InvalidConfig("empty strip".into()));
    }
    let h = images[0].height();
    if images.iter().any(|i| i.height() != h) {
        return Err(Error::DimensionMismatch("strip heights differ".into()));
    }
    let total_w: usize =
        images.iter().map(|i| i.width()).sum::<usize>() + separator * (images.len() - 1);
    let mut out = RgbImage::filled(total_w, h, [1.0; 3]);
    let mut x0 = 0usize;
    for img in images {
        for r in 0..h {
            for c in 0..img.width() {
                out.set_pixel(r * total_w + x0 + c, img.pixel(r * img.width() + c));
            }
        }
        x0 += img.width() + separator;
    }
    Ok(out)
}

/// Writes one chain-visualization strip in the order
/// `(ŷ, x̃, ỹ, x*, y*, decoded)`.
pub fn save_chain_strip(
    path: &Path,
    y_hat: &LabelMap,
    x_tilde: &RgbImage,
    y_tilde: &LabelMap,
    x_star: &RgbImage,
    y_star: &LabelMap,
    decoded: &LabelMap,
) -> Result<()> {
    let strip = hstack(
        &[
            label_map_to_rgb(y_hat),
            x_tilde.clone(),
            label_map_to_rgb(y_tilde),
            x_star.clone(),
            label_map_to_rgb(y_star),
            label_map_to_rgb(decoded),
        ],
        2,
    )?;
    save_rgb(path, &strip)
}
