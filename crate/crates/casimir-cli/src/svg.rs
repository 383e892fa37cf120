//! Standalone SVG line plots of sweep results.
//!
//! No rasterization and no external assets: the document is a background,
//! a framed plot area, tick marks with labels, one polyline per series, and
//! a legend. Log axes get one tick per decade. Output is deterministic for
//! a given input.

use std::io::Write;

use thiserror::Error;

use casimir::scenarios::SweepRow;
use casimir::SweepResult;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("a plot needs at least one series")]
    NoSeries,
    #[error("series `{label}` refers to result {index}, but only {count} were given")]
    BadSource {
        label: String,
        index: usize,
        count: usize,
    },
    #[error("series `{label}` has no rows to plot")]
    EmptySeries { label: String },
    #[error(
        "series `{label}`: {axis} value {value} at axis_value {axis_value} \
         is not positive, cannot plot on a log axis"
    )]
    NonPositiveOnLogAxis {
        label: String,
        axis: &'static str,
        axis_value: f64,
        value: f64,
    },
    #[error("series `{label}`: {axis} value at axis_value {axis_value} is not finite")]
    NonFinite {
        label: String,
        axis: &'static str,
        axis_value: f64,
    },
    #[error("could not write svg: {0}")]
    Io(#[from] std::io::Error),
}

/// Which sweep column a series plots on the y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotColumn {
    ReductionFactor,
    /// Signed pressure; negative for attraction, so unusable on a log axis.
    PressurePa,
    /// |pressure|, the usual choice for log-log force plots.
    PressureMagnitudePa,
    IdealPressureMagnitudePa,
    RelErrEstimate,
}

fn column_value(row: &SweepRow, column: PlotColumn) -> f64 {
    match column {
        PlotColumn::ReductionFactor => row.reduction_factor,
        PlotColumn::PressurePa => row.pressure_pa,
        PlotColumn::PressureMagnitudePa => row.pressure_pa.abs(),
        PlotColumn::IdealPressureMagnitudePa => row.ideal_pressure_pa.abs(),
        PlotColumn::RelErrEstimate => row.diagnostics.rel_err_estimate,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub label: String,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    /// Index into the `results` slice passed to [`render_svg`].
    pub source: usize,
    pub column: PlotColumn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width_px: u32,
    pub height_px: u32,
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub series: Vec<PlotSeries>,
}

impl PlotSpec {
    /// Conventional reduction-factor plot: log y, log or linear x.
    pub fn reduction_plot(x_label: &str, log_x: bool, series: Vec<PlotSeries>) -> Self {
        PlotSpec {
            width_px: 720,
            height_px: 480,
            x: AxisSpec {
                label: x_label.to_string(),
                log: log_x,
            },
            y: AxisSpec {
                label: "reduction factor".to_string(),
                log: true,
            },
            series,
        }
    }
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 18.0;
const MARGIN_TOP: f64 = 18.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// A point in transformed coordinates (log10 applied where the axis is
/// logarithmic).
struct SeriesPoints {
    label: String,
    points: Vec<(f64, f64)>,
}

fn transform(
    label: &str,
    axis: &'static str,
    log: bool,
    axis_value: f64,
    value: f64,
) -> Result<f64, PlotError> {
    if !value.is_finite() {
        return Err(PlotError::NonFinite {
            label: label.to_string(),
            axis,
            axis_value,
        });
    }
    if log {
        if value <= 0.0 {
            return Err(PlotError::NonPositiveOnLogAxis {
                label: label.to_string(),
                axis,
                axis_value,
                value,
            });
        }
        Ok(value.log10())
    } else {
        Ok(value)
    }
}

fn px(value: f64) -> String {
    format!("{value:.2}")
}

/// Short human label for a linear tick.
fn linear_label(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs();
    if (1e-3..1e5).contains(&magnitude) {
        let text = format!("{value:.4}");
        let trimmed = text.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{value:.2e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Range { lo, hi }
    }

    /// Widens degenerate or tight ranges so every point sits strictly
    /// inside the frame.
    fn padded(mut self, fraction: f64) -> Range {
        if self.lo == self.hi {
            self.lo -= 0.5;
            self.hi += 0.5;
            return self;
        }
        let pad = (self.hi - self.lo) * fraction;
        self.lo -= pad;
        self.hi += pad;
        self
    }

    fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Tick positions in transformed coordinates with their labels.
fn ticks(range: &Range, log: bool) -> Vec<(f64, String)> {
    if log {
        let first = range.lo.ceil() as i64;
        let last = range.hi.floor() as i64;
        let decades: Vec<(f64, String)> = (first..=last)
            .map(|k| (k as f64, format!("1e{k}")))
            .collect();
        if !decades.is_empty() {
            return decades;
        }
        // Range inside a single decade: fall back to the endpoints.
        return vec![
            (range.lo, format!("{:.2e}", 10f64.powf(range.lo))),
            (range.hi, format!("{:.2e}", 10f64.powf(range.hi))),
        ];
    }
    let count = 5;
    (0..count)
        .map(|i| {
            let t = range.lo + range.span() * i as f64 / (count - 1) as f64;
            (t, linear_label(t))
        })
        .collect()
}

/// Renders the plot. Every series must reference an existing, non-empty
/// result, and log axes require strictly positive data.
pub fn render_svg<W: Write>(
    results: &[&SweepResult],
    plot: &PlotSpec,
    out: &mut W,
) -> Result<(), PlotError> {
    if plot.series.is_empty() {
        return Err(PlotError::NoSeries);
    }

    let mut series_points = Vec::with_capacity(plot.series.len());
    for series in &plot.series {
        let result = results
            .get(series.source)
            .ok_or_else(|| PlotError::BadSource {
                label: series.label.clone(),
                index: series.source,
                count: results.len(),
            })?;
        if result.rows.is_empty() {
            return Err(PlotError::EmptySeries {
                label: series.label.clone(),
            });
        }
        let mut points = Vec::with_capacity(result.rows.len());
        for row in &result.rows {
            let x = transform(&series.label, "x", plot.x.log, row.axis_value, row.axis_value)?;
            let y = transform(
                &series.label,
                "y",
                plot.y.log,
                row.axis_value,
                column_value(row, series.column),
            )?;
            points.push((x, y));
        }
        series_points.push(SeriesPoints {
            label: series.label.clone(),
            points,
        });
    }

    let x_range = Range::of(
        series_points
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0)),
    )
    .padded(0.03);
    let y_range = Range::of(
        series_points
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1)),
    )
    .padded(0.06);

    let width = plot.width_px as f64;
    let height = plot.height_px as f64;
    let plot_w = width - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = height - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px_x = |t: f64| MARGIN_LEFT + (t - x_range.lo) / x_range.span() * plot_w;
    let to_px_y = |t: f64| MARGIN_TOP + (y_range.hi - t) / y_range.span() * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n",
        w = plot.width_px,
        h = plot.height_px
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
        w = plot.width_px,
        h = plot.height_px
    ));
    svg.push_str(&format!(
        "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"none\" \
         stroke=\"#333333\" stroke-width=\"1\"/>\n",
        x = px(MARGIN_LEFT),
        y = px(MARGIN_TOP),
        w = px(plot_w),
        h = px(plot_h)
    ));

    for (t, label) in ticks(&x_range, plot.x.log) {
        let x = to_px_x(t);
        if !(MARGIN_LEFT - 0.5..=MARGIN_LEFT + plot_w + 0.5).contains(&x) {
            continue;
        }
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#333333\" \
             stroke-width=\"1\"/>\n",
            x = px(x),
            y1 = px(MARGIN_TOP + plot_h),
            y2 = px(MARGIN_TOP + plot_h + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#333333\" text-anchor=\"middle\">{label}</text>\n",
            x = px(x),
            y = px(MARGIN_TOP + plot_h + 18.0),
            label = escape(&label)
        ));
    }
    for (t, label) in ticks(&y_range, plot.y.log) {
        let y = to_px_y(t);
        if !(MARGIN_TOP - 0.5..=MARGIN_TOP + plot_h + 0.5).contains(&y) {
            continue;
        }
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#333333\" \
             stroke-width=\"1\"/>\n",
            x1 = px(MARGIN_LEFT - 5.0),
            x2 = px(MARGIN_LEFT),
            y = px(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#333333\" text-anchor=\"end\">{label}</text>\n",
            x = px(MARGIN_LEFT - 8.0),
            y = px(y + 4.0),
            label = escape(&label)
        ));
    }

    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"13\" \
         fill=\"#111111\" text-anchor=\"middle\">{label}</text>\n",
        x = px(MARGIN_LEFT + plot_w / 2.0),
        y = px(height - 10.0),
        label = escape(&plot.x.label)
    ));
    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"13\" \
         fill=\"#111111\" text-anchor=\"middle\" transform=\"rotate(-90 {x} {y})\">{label}</text>\n",
        x = px(16.0),
        y = px(MARGIN_TOP + plot_h / 2.0),
        label = escape(&plot.y.label)
    ));

    for (index, series) in series_points.iter().enumerate() {
        let color = PALETTE[index % PALETTE.len()];
        let points: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(to_px_x(x)), px(to_px_y(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{points}\"/>\n",
            points = points.join(" ")
        ));
    }

    for (index, series) in series_points.iter().enumerate() {
        let color = PALETTE[index % PALETTE.len()];
        let y = MARGIN_TOP + 16.0 + 16.0 * index as f64;
        let x_end = MARGIN_LEFT + plot_w - 10.0;
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"{color}\" \
             stroke-width=\"1.5\"/>\n",
            x1 = px(x_end - 150.0),
            x2 = px(x_end - 126.0),
            y = px(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#333333\">{label}</text>\n",
            x = px(x_end - 120.0),
            y = px(y + 4.0),
            label = escape(&series.label)
        ));
    }

    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use casimir::lifshitz::QuadDiagnostics;
    use casimir::SweepAxis;

    fn sweep(values: &[(f64, f64)]) -> SweepResult {
        SweepResult {
            axis: SweepAxis::Separation,
            rows: values
                .iter()
                .map(|&(axis_value, reduction_factor)| SweepRow {
                    axis_value,
                    pressure_pa: -reduction_factor,
                    ideal_pressure_pa: -1.0,
                    reduction_factor,
                    diagnostics: QuadDiagnostics {
                        xi_nodes: 8,
                        q_nodes: 8,
                        rel_err_estimate: 1e-6,
                    },
                })
                .collect(),
        }
    }

    fn render(results: &[&SweepResult], plot: &PlotSpec) -> Result<String, PlotError> {
        let mut bytes = Vec::new();
        render_svg(results, plot, &mut bytes)?;
        Ok(String::from_utf8(bytes).unwrap())
    }

    #[test]
    fn one_series_gives_exactly_one_polyline() {
        let result = sweep(&[(1.0, 0.5), (2.0, 0.4), (3.0, 0.3)]);
        let plot = PlotSpec {
            width_px: 640,
            height_px: 480,
            x: AxisSpec {
                label: "x".into(),
                log: false,
            },
            y: AxisSpec {
                label: "y".into(),
                log: false,
            },
            series: vec![PlotSeries {
                label: "run".into(),
                source: 0,
                column: PlotColumn::ReductionFactor,
            }],
        };
        let svg = render(&[&result], &plot).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg xmlns="));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn log_axis_ticks_cover_each_decade() {
        let result = sweep(&[
            (100.0, 1e-2),
            (300.0, 1e-4),
            (1000.0, 1e-6),
            (2000.0, 1e-7),
        ]);
        let plot = PlotSpec::reduction_plot(
            "separation (nm)",
            true,
            vec![PlotSeries {
                label: "run".into(),
                source: 0,
                column: PlotColumn::ReductionFactor,
            }],
        );
        let svg = render(&[&result], &plot).unwrap();
        for decade in ["1e-7", "1e-6", "1e-5", "1e-4", "1e-3", "1e-2"] {
            assert!(svg.contains(&format!(">{decade}</text>")), "missing {decade}");
        }
        // x spans 100..2000, so decade 1000 is the only interior tick.
        assert!(svg.contains(">1e3</text>"));
    }

    #[test]
    fn non_positive_value_on_log_axis_names_the_row() {
        let result = sweep(&[(100.0, 1e-2), (300.0, 0.0)]);
        let plot = PlotSpec::reduction_plot(
            "separation (nm)",
            true,
            vec![PlotSeries {
                label: "bad".into(),
                source: 0,
                column: PlotColumn::ReductionFactor,
            }],
        );
        match render(&[&result], &plot).unwrap_err() {
            PlotError::NonPositiveOnLogAxis {
                label,
                axis,
                axis_value,
                value,
            } => {
                assert_eq!(label, "bad");
                assert_eq!(axis, "y");
                assert_eq!(axis_value, 300.0);
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_series_list_is_rejected() {
        let result = sweep(&[(1.0, 0.5)]);
        let plot = PlotSpec {
            width_px: 640,
            height_px: 480,
            x: AxisSpec {
                label: "x".into(),
                log: false,
            },
            y: AxisSpec {
                label: "y".into(),
                log: false,
            },
            series: Vec::new(),
        };
        assert!(matches!(
            render(&[&result], &plot),
            Err(PlotError::NoSeries)
        ));
    }

    #[test]
    fn rendering_is_deterministic() {
        let result = sweep(&[(100.0, 0.5), (200.0, 0.25), (400.0, 0.12)]);
        let plot = PlotSpec::reduction_plot(
            "separation (nm)",
            true,
            vec![
                PlotSeries {
                    label: "a".into(),
                    source: 0,
                    column: PlotColumn::ReductionFactor,
                },
                PlotSeries {
                    label: "b".into(),
                    source: 0,
                    column: PlotColumn::PressureMagnitudePa,
                },
            ],
        );
        let first = render(&[&result], &plot).unwrap();
        let second = render(&[&result], &plot).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.matches("<polyline").count(), 2);
    }

    #[test]
    fn legend_lists_every_series_label() {
        let result = sweep(&[(1.0, 0.5), (2.0, 0.4)]);
        let plot = PlotSpec {
            width_px: 640,
            height_px: 480,
            x: AxisSpec {
                label: "x".into(),
                log: false,
            },
            y: AxisSpec {
                label: "y".into(),
                log: false,
            },
            series: vec![
                PlotSeries {
                    label: "first run".into(),
                    source: 0,
                    column: PlotColumn::ReductionFactor,
                },
                PlotSeries {
                    label: "second <run>".into(),
                    source: 0,
                    column: PlotColumn::RelErrEstimate,
                },
            ],
        };
        let svg = render(&[&result], &plot).unwrap();
        assert!(svg.contains(">first run</text>"));
        // Labels are escaped, not injected as markup.
        assert!(svg.contains("second &lt;run&gt;"));
    }
}
