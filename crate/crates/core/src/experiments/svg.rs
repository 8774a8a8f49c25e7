//! Minimal self-contained SVG plots: axes with decade ticks, one polyline per
//! series, an optional percentile band and an optional fitted line.

use std::fmt::Write as _;

use super::{ExperimentResult, FitRecord, ResultRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    label: String,
    /// `(x, y)` in plot coordinates (already log10 where the axis is log).
    points: Vec<(f64, f64)>,
    /// `(x, low, high)`.
    band: Vec<(f64, f64, f64)>,
    /// `(x0, y0, x1, y1)`.
    fit: Option<(f64, f64, f64, f64)>,
}

struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    y_log: bool,
    series: Vec<Series>,
    hline: Option<f64>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn span(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

fn padded((lo, hi): (f64, f64), log: bool) -> (f64, f64) {
    if log {
        let (lo, hi) = (lo.floor(), hi.ceil());
        if lo == hi {
            (lo, hi + 1.0)
        } else {
            (lo, hi)
        }
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn render_plot(plot: &Plot) -> String {
    let xs = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = plot.series.iter().flat_map(|s| {
        s.points
            .iter()
            .map(|p| p.1)
            .chain(s.band.iter().flat_map(|b| [b.1, b.2]))
    });
    let (x0, x1) = padded(span(xs).unwrap_or((0.0, 1.0)), true);
    let (y0, y1) = if plot.y_log {
        padded(span(ys).unwrap_or((0.0, 1.0)), true)
    } else {
        (0.0, 1.0)
    };
    let frame = Frame { x0, x1, y0, y1 };

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        plot.title
    );
    let (bx0, bx1, by0, by1) = (frame.px(x0), frame.px(x1), frame.py(y0), frame.py(y1));
    let _ = writeln!(
        w,
        r#"<rect x="{bx0:.1}" y="{by1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        bx1 - bx0,
        by0 - by1
    );

    for k in (x0 as i64)..=(x1 as i64) {
        let x = frame.px(k as f64);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.1}" y1="{by0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{k}</text>"#,
            by0 + 5.0,
            by0 + 18.0
        );
    }
    let y_ticks: Vec<(f64, String)> = if plot.y_log {
        ((y0 as i64)..=(y1 as i64)).map(|k| (k as f64, format!("1e{k}"))).collect()
    } else {
        (0..=4).map(|k| (k as f64 / 4.0, format!("{:.2}", k as f64 / 4.0))).collect()
    };
    for (v, label) in y_ticks {
        let y = frame.py(v);
        let _ = writeln!(
            w,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{bx0:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
            bx0 - 5.0,
            bx0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (bx0 + bx1) / 2.0,
        HEIGHT - 12.0,
        plot.x_label
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (by0 + by1) / 2.0,
        (by0 + by1) / 2.0,
        plot.y_label
    );

    if let Some(level) = plot.hline {
        let y = frame.py(level);
        let _ = writeln!(
            w,
            r##"<line x1="{bx0:.1}" y1="{y:.1}" x2="{bx1:.1}" y2="{y:.1}" stroke="#888" stroke-dasharray="2 3"/>"##
        );
    }

    for (k, s) in plot.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if !s.band.is_empty() {
            let upper = s.band.iter().map(|b| (b.0, b.2));
            let lower = s.band.iter().rev().map(|b| (b.0, b.1));
            let pts: Vec<String> = upper
                .chain(lower)
                .map(|(x, y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y)))
                .collect();
            let _ = writeln!(
                w,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                pts.join(" ")
            );
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        if let Some((fx0, fy0, fx1, fy1)) = s.fit {
            let _ = writeln!(
                w,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-dasharray="6 4"/>"#,
                frame.px(fx0),
                frame.py(fy0),
                frame.px(fx1),
                frame.py(fy1)
            );
        }
        let ly = TOP + 20.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

fn regret_plot(result: &ExperimentResult) -> Plot {
    let mut series: Vec<Series> = Vec::new();
    for fit in &result.fits {
        let FitRecord::LogLog { algorithm, t_min, fit } = fit else {
            continue;
        };
        let rows: Vec<_> = result
            .regret_rows()
            .filter(|r| r.algorithm == *algorithm)
            .collect();
        let log = |v: f64| if v > 0.0 { v.log10() } else { f64::NAN };
        let points = rows
            .iter()
            .map(|r| (log(r.horizon as f64), log(r.mean_regret)))
            .filter(|p| p.1.is_finite())
            .collect();
        let band = rows
            .iter()
            .map(|r| (log(r.horizon as f64), log(r.p10), log(r.p90)))
            .filter(|b| b.1.is_finite() && b.2.is_finite())
            .collect();
        let last = rows.last().map(|r| log(r.horizon as f64));
        let line = match (fit, last) {
            (Some(f), Some(x1)) => {
                let x0 = log((*t_min).max(1) as f64).min(x1);
                Some((x0, f.intercept + f.slope * x0, x1, f.intercept + f.slope * x1))
            }
            _ => None,
        };
        let label = match fit {
            Some(f) => format!("{algorithm} ({:.2})", f.slope),
            None => algorithm.to_string(),
        };
        series.push(Series {
            label,
            points,
            band,
            fit: line,
        });
    }
    Plot {
        title: "Regret scaling".into(),
        x_label: "T".into(),
        y_label: "regret (row + column)".into(),
        y_log: true,
        series,
        hline: None,
    }
}

fn psne_plot(result: &ExperimentResult, target: f64) -> Plot {
    let mut series: Vec<Series> = Vec::new();
    let mut last_d = None;
    for row in result.rows.iter() {
        let ResultRow::Psne(r) = row else { continue };
        if last_d != Some(r.d_min) {
            last_d = Some(r.d_min);
            series.push(Series {
                label: format!("d_min = {}", r.d_min),
                points: Vec::new(),
                band: Vec::new(),
                fit: None,
            });
        }
        if let Some(s) = series.last_mut() {
            s.points.push((r.t_over_opt.log10(), r.success_rate));
        }
    }
    Plot {
        title: "PSNE identification".into(),
        x_label: "t / OPT".into(),
        y_label: "success rate".into(),
        y_log: false,
        series,
        hline: Some(target),
    }
}

pub(crate) fn render(result: &ExperimentResult) -> String {
    let plot = match &result.config {
        super::ExperimentConfig::RegretScaling(_) => regret_plot(result),
        super::ExperimentConfig::PsneIdentification(c) => psne_plot(result, c.success_target),
    };
    render_plot(&plot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{preset, run_regret_scaling, EpsilonRule, RegretScalingConfig};
    use crate::learners::LearnerKind;

    #[test]
    fn empty_result_renders() {
        let svg = render(&ExperimentResult::empty(preset("fig1-desk").unwrap()));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn regret_plot_has_band_and_fit() {
        let result = run_regret_scaling(&RegretScalingConfig {
            horizons: vec![32, 128, 512],
            trials: 4,
            algorithms: vec![LearnerKind::Tsallis],
            epsilon: EpsilonRule::CubeRootDecay,
            fit_t_min: 32,
            master_seed: 2,
            independent_outcomes: false,
        })
        .unwrap();
        let svg = render(&result);
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("stroke-dasharray=\"6 4\""));
        assert_eq!(svg, render(&result));
    }
}
