//! Minimal static SVG plots: log-log convergence lines with least-squares
//! slope annotations, linear time series, and 1D snapshots with
//! cell-average markers. Derived views of the CSV artifacts.

use crate::diagnostics::ls_rate;
use crate::error::{Error, Result};

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Annotate the least-squares slope of the last three points.
    pub annotate_slope: bool,
    /// Draw a marker at each point.
    pub markers: bool,
}

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 70.0;
const MR: f64 = 150.0;
const MT: f64 = 30.0;
const MB: f64 = 50.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:.0e}")
    }
}

/// Render series to an SVG document. Log axes require positive data.
pub fn plot(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    logx: bool,
    logy: bool,
    series: &[Series],
) -> Result<String> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Plot("no data to plot".into()));
    }
    let tx = |v: f64| -> f64 {
        if logx {
            v.log10()
        } else {
            v
        }
    };
    let ty = |v: f64| -> f64 {
        if logy {
            v.log10()
        } else {
            v
        }
    };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if (logx && x <= 0.0) || (logy && y <= 0.0) {
                return Err(Error::Plot(format!(
                    "log axis requires positive data, got ({x}, {y})"
                )));
            }
            xmin = xmin.min(tx(x));
            xmax = xmax.max(tx(x));
            ymin = ymin.min(ty(y));
            ymax = ymax.max(ty(y));
        }
    }
    if !(xmin.is_finite() && ymin.is_finite()) {
        return Err(Error::Plot("non-finite plot data".into()));
    }
    if xmax - xmin < 1e-12 {
        xmax = xmin + 1.0;
        xmin -= 1.0;
    }
    if ymax - ymin < 1e-12 {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    let pad_x = 0.04 * (xmax - xmin);
    let pad_y = 0.06 * (ymax - ymin);
    let (x0, x1) = (xmin - pad_x, xmax + pad_x);
    let (y0, y1) = (ymin - pad_y, ymax + pad_y);
    let px = |v: f64| ML + (tx(v) - x0) / (x1 - x0) * (W - ML - MR);
    let py = |v: f64| H - MB - (ty(v) - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        ML + (W - ML - MR) / 2.0,
        title
    ));

    // gridlines and ticks
    let ticks = |lo: f64, hi: f64, log: bool| -> Vec<f64> {
        if log {
            let a = lo.floor() as i64;
            let b = hi.ceil() as i64;
            (a..=b).map(|e| 10f64.powi(e as i32)).collect()
        } else {
            let span = hi - lo;
            let step = 10f64.powf(span.log10().floor());
            let step = if span / step > 5.0 { step * 2.0 } else { step / 2.0 };
            let mut v = (lo / step).ceil() * step;
            let mut out = Vec::new();
            while v <= hi + 1e-12 * span.abs() {
                out.push(v);
                v += step;
            }
            out
        }
    };
    for t in ticks(x0, x1, logx) {
        let sx = px(if logx { t } else { t });
        if sx < ML - 1.0 || sx > W - MR + 1.0 {
            continue;
        }
        svg.push_str(&format!(
            "<line x1=\"{sx:.1}\" y1=\"{MT}\" x2=\"{sx:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
            H - MB
        ));
        svg.push_str(&format!(
            "<text x=\"{sx:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            H - MB + 16.0,
            fmt_tick(t)
        ));
    }
    for t in ticks(y0, y1, logy) {
        let sy = py(if logy { t } else { t });
        if sy < MT - 1.0 || sy > H - MB + 1.0 {
            continue;
        }
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{sy:.1}\" x2=\"{:.1}\" y2=\"{sy:.1}\" stroke=\"#dddddd\"/>\n",
            W - MR
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{}</text>\n",
            ML - 6.0,
            sy + 4.0,
            fmt_tick(t)
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">{xlabel}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 10.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {})\">{ylabel}</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        if s.markers {
            for &(x, y) in &s.points {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                    px(x),
                    py(y)
                ));
            }
        }
        let mut label = s.label.clone();
        if s.annotate_slope && s.points.len() >= 3 && logx && logy {
            let tail = &s.points[s.points.len() - 3..];
            label.push_str(&format!(" (slope {:.2})", ls_rate(tail)));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" font-family=\"sans-serif\" fill=\"{color}\">{label}</text>\n",
            W - MR + 8.0,
            MT + 16.0 * (i as f64 + 1.0)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Parse a CSV produced by the harness (header + float columns) back into
/// named columns; used when re-plotting existing artifacts.
pub fn read_csv_columns(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Plot("empty CSV".into()))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::Plot(format!(
                "row {} has {} fields, header has {}",
                ln + 2,
                fields.len(),
                names.len()
            )));
        }
        for (c, f) in fields.iter().enumerate() {
            let v = f.trim().parse::<f64>().map_err(|_| {
                Error::Plot(format!("column `{}`: bad number `{f}`", names[c]))
            })?;
            cols[c].push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(Error::Plot("CSV has a header but no data rows".into()));
    }
    Ok((names, cols))
}

/// Find a named column or report which one is missing.
pub fn column<'a>(
    names: &[String],
    cols: &'a [Vec<f64>],
    want: &str,
) -> Result<&'a Vec<f64>> {
    names
        .iter()
        .position(|n| n == want)
        .map(|i| &cols[i])
        .ok_or_else(|| Error::Plot(format!("missing column `{want}`")))
}
