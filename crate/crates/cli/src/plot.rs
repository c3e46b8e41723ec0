//! Gap-convergence plots: log-scale SVG curves with min/max bands for
//! multi-trial groups, plus a CSV of the plotted aggregates.

use std::fmt::Write as _;
use std::path::Path;

use extra_newton::data_io::RunRecord;
use extra_newton::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Default)]
pub enum XAxis {
    #[default]
    Iterations,
    OracleCalls,
    Epochs,
}

impl XAxis {
    fn label(&self) -> &'static str {
        match self {
            XAxis::Iterations => "iterations",
            XAxis::OracleCalls => "weighted oracle calls",
            XAxis::Epochs => "epochs (full data passes)",
        }
    }
}

/// One plotted group: trials of the same configuration.
pub struct Group {
    pub name: String,
    pub records: Vec<RunRecord>,
}

/// Aggregated series for one group on a common grid.
pub struct Aggregate {
    pub name: String,
    pub xs: Vec<f64>,
    pub mean: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

fn x_value(record: &RunRecord, row: usize, axis: XAxis, hess_weight: f64) -> Result<f64> {
    let r = &record.series[row];
    Ok(match axis {
        XAxis::Iterations => r.t as f64,
        XAxis::OracleCalls => r.grad_calls as f64 + hess_weight * r.hess_calls as f64,
        XAxis::Epochs => {
            let n = record.meta.n_samples.ok_or_else(|| {
                Error::InvalidArgument(
                    "epoch axis needs a dataset problem (no sample count in record)".into(),
                )
            })? as f64;
            let batch = record
                .config
                .oracle
                .batch_size()
                .map_or(n, |b| (b as f64).min(n));
            r.grad_calls as f64 * batch / n
        }
    })
}

/// Collapses a group's trials to mean/min/max on the shortest shared grid.
pub fn aggregate(group: &Group, axis: XAxis, hess_weight: f64) -> Result<Aggregate> {
    if group.records.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "group {} has no records",
            group.name
        )));
    }
    let len = group
        .records
        .iter()
        .map(|r| r.series.len())
        .min()
        .unwrap_or(0);
    if len == 0 {
        return Err(Error::InvalidArgument(format!(
            "group {} has an empty series",
            group.name
        )));
    }
    let mut xs = Vec::with_capacity(len);
    let mut mean = vec![0.0f64; len];
    let mut lo = vec![f64::INFINITY; len];
    let mut hi = vec![f64::NEG_INFINITY; len];
    for row in 0..len {
        xs.push(x_value(&group.records[0], row, axis, hess_weight)?);
        for rec in &group.records {
            let g = rec.series[row].f_gap;
            mean[row] += g / group.records.len() as f64;
            lo[row] = lo[row].min(g);
            hi[row] = hi[row].max(g);
        }
    }
    Ok(Aggregate {
        name: group.name.clone(),
        xs,
        mean,
        lo,
        hi,
    })
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

/// Floor for the log axis; gaps at or below zero are clamped here.
const GAP_FLOOR: f64 = 1e-16;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders the aggregates as a deterministic standalone SVG.
pub fn render_svg(aggregates: &[Aggregate], axis: XAxis) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for agg in aggregates {
        for (&x, (&m, (&l, &h))) in agg
            .xs
            .iter()
            .zip(agg.mean.iter().zip(agg.lo.iter().zip(agg.hi.iter())))
        {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            for v in [m, l, h] {
                let lv = v.max(GAP_FLOOR).log10();
                y_min = y_min.min(lv);
                y_max = y_max.max(lv);
            }
        }
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_max = x_min + 1.0;
    }
    if !y_min.is_finite() {
        y_min = -1.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1.0 {
        y_max += 0.5;
        y_min -= 0.5;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = move |gap: f64| {
        let lv = gap.max(GAP_FLOOR).log10();
        MARGIN_T + (y_max - lv) / (y_max - y_min) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(MARGIN_L),
        fmt(HEIGHT - MARGIN_B)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        fmt(MARGIN_L),
        fmt(HEIGHT - MARGIN_B),
        fmt(WIDTH - MARGIN_R),
        fmt(HEIGHT - MARGIN_B)
    );
    // Y ticks at integer powers of ten.
    let lo_pow = y_min.floor() as i64;
    let hi_pow = y_max.ceil() as i64;
    let step = (((hi_pow - lo_pow) as f64 / 8.0).ceil() as i64).max(1);
    let mut p = lo_pow;
    while p <= hi_pow {
        let y = MARGIN_T + (y_max - p as f64) / (y_max - y_min) * plot_h;
        if (MARGIN_T..=HEIGHT - MARGIN_B).contains(&y) {
            let _ = writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>",
                fmt(MARGIN_L),
                fmt(y),
                fmt(WIDTH - MARGIN_R),
                fmt(y)
            );
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">1e{}</text>",
                fmt(MARGIN_L - 6.0),
                fmt(y + 4.0),
                p
            );
        }
        p += step;
    }
    // X ticks.
    for k in 0..=5 {
        let x = x_min + (x_max - x_min) * k as f64 / 5.0;
        let px = sx(x);
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>",
            fmt(px),
            fmt(HEIGHT - MARGIN_B + 16.0),
            if x >= 1000.0 { format!("{:.0}", x) } else { format!("{:.1}", x) }
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>",
        fmt(MARGIN_L + plot_w / 2.0),
        fmt(HEIGHT - 14.0),
        axis.label()
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {})\">objective gap</text>",
        fmt(MARGIN_T + plot_h / 2.0),
        fmt(MARGIN_T + plot_h / 2.0)
    );

    for (k, agg) in aggregates.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // Min/max band for multi-trial groups.
        if agg.lo.iter().zip(agg.hi.iter()).any(|(l, h)| l != h) {
            let mut points = String::new();
            for (&x, &h) in agg.xs.iter().zip(agg.hi.iter()) {
                let _ = write!(points, "{},{} ", fmt(sx(x)), fmt(sy(h)));
            }
            for (&x, &l) in agg.xs.iter().zip(agg.lo.iter()).rev() {
                let _ = write!(points, "{},{} ", fmt(sx(x)), fmt(sy(l)));
            }
            let _ = writeln!(
                svg,
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>",
                points.trim_end(),
                color
            );
        }
        let mut points = String::new();
        for (&x, &m) in agg.xs.iter().zip(agg.mean.iter()) {
            let _ = write!(points, "{},{} ", fmt(sx(x)), fmt(sy(m)));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            points.trim_end(),
            color
        );
        // Legend.
        let ly = MARGIN_T + 16.0 * k as f64 + 8.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>",
            fmt(WIDTH - MARGIN_R - 160.0),
            fmt(ly),
            fmt(WIDTH - MARGIN_R - 136.0),
            fmt(ly),
            color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>",
            fmt(WIDTH - MARGIN_R - 130.0),
            fmt(ly + 4.0),
            agg.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// The plotted aggregates as CSV so figures can be re-rendered elsewhere.
pub fn aggregates_csv(aggregates: &[Aggregate]) -> String {
    let mut header = String::from("x");
    for agg in aggregates {
        let _ = write!(header, ",{0}_mean,{0}_lo,{0}_hi", agg.name);
    }
    let rows = aggregates.iter().map(|a| a.xs.len()).max().unwrap_or(0);
    let mut out = header;
    out.push('\n');
    for row in 0..rows {
        let x = aggregates
            .iter()
            .find(|a| row < a.xs.len())
            .map_or(f64::NAN, |a| a.xs[row]);
        let _ = write!(out, "{x}");
        for agg in aggregates {
            if row < agg.xs.len() {
                let _ = write!(out, ",{},{},{}", agg.mean[row], agg.lo[row], agg.hi[row]);
            } else {
                let _ = write!(out, ",,,");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_outputs(aggregates: &[Aggregate], axis: XAxis, out: &Path) -> Result<()> {
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out, render_svg(aggregates, axis))?;
    std::fs::write(out.with_extension("csv"), aggregates_csv(aggregates))?;
    Ok(())
}
