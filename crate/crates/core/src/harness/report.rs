//! SVG bar charts and a plain-text results table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{GpError, Result};
use crate::metrics::SweepSummary;
use crate::problems::ProblemId;

pub const FITNESS_LABEL: &str = "mean fitness";
pub const SIZE_LABEL: &str = "mean tree size";

/// Vertical extent of the plotting area in viewBox units.
pub const PLOT_HEIGHT: f64 = 300.0;
const BAR_WIDTH: f64 = 24.0;
const BAR_GAP: f64 = 8.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 150.0;
const MARGIN_RIGHT: f64 = 20.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Label of one bar: strategy text plus the kill proportion when set.
pub fn arm_label(s: &SweepSummary) -> String {
    if s.key.kill_proportion > 0.0 {
        format!("{} W={}", s.key.strategy, s.key.kill_proportion)
    } else {
        s.key.strategy.to_string()
    }
}

/// Bar chart with heights proportional to the values; the tallest bar spans
/// `PLOT_HEIGHT`.
pub fn bar_chart_svg(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let width = MARGIN_LEFT + MARGIN_RIGHT + bars.len() as f64 * (BAR_WIDTH + BAR_GAP) + BAR_GAP;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let max = bars.iter().map(|b| b.1).fold(0.0, f64::max);
    let scale = if max > 0.0 { PLOT_HEIGHT / max } else { 0.0 };
    let base = MARGIN_TOP + PLOT_HEIGHT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{base}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        width - MARGIN_RIGHT
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-max" x="{}" y="{}" text-anchor="end">{}</text>"#,
        MARGIN_LEFT - 4.0,
        MARGIN_TOP + 4.0,
        format_value(max)
    );
    for (i, (label, value)) in bars.iter().enumerate() {
        let x = MARGIN_LEFT + BAR_GAP + i as f64 * (BAR_WIDTH + BAR_GAP);
        let h = value.max(0.0) * scale;
        let _ = writeln!(
            svg,
            r#"<rect class="bar" x="{x}" y="{:.4}" width="{BAR_WIDTH}" height="{h:.4}" data-value="{value}" fill="steelblue"><title>{}: {}</title></rect>"#,
            base - h,
            escape(label),
            format_value(*value)
        );
        let lx = x + BAR_WIDTH / 2.0;
        let ly = base + 8.0;
        let _ = writeln!(
            svg,
            r#"<text class="x-tick" x="{lx}" y="{ly}" text-anchor="end" transform="rotate(-60 {lx} {ly})">{}</text>"#,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_value(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.6}")
    }
}

/// Plain-text table of both measures, one block per problem.
pub fn summary_table(summaries: &[SweepSummary]) -> String {
    let mut out = String::new();
    let label_w = summaries.iter().map(|s| arm_label(s).len()).max().unwrap_or(6).max(6);
    for problem in ProblemId::ALL {
        let rows: Vec<&SweepSummary> = summaries.iter().filter(|s| s.key.problem == problem).collect();
        if rows.is_empty() {
            continue;
        }
        let p = problem.problem();
        let _ = writeln!(out, "{} ({})", problem, p.name);
        let _ = writeln!(
            out,
            "  {:<label_w$}  {:>5}  {:>12}  {:>10}  {:>14}  {:>10}  {:>12}",
            "method", "runs", FITNESS_LABEL, "std", SIZE_LABEL, "std", "evaluations"
        );
        for s in rows {
            let _ = writeln!(
                out,
                "  {:<label_w$}  {:>5}  {:>12.6}  {:>10.6}  {:>14.4}  {:>10.4}  {:>12.1}",
                arm_label(s),
                s.n_runs,
                s.mean_fitness,
                s.std_fitness,
                s.mean_tree_size,
                s.std_tree_size,
                s.mean_evaluations
            );
        }
        out.push('\n');
    }
    out
}

/// Writes two SVG charts per problem plus `summary.txt`; returns the paths.
pub fn emit_report(summaries: &[SweepSummary], dir: &Path) -> Result<Vec<PathBuf>> {
    if summaries.is_empty() {
        return Err(GpError::Data("no summaries to report".into()));
    }
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots).map_err(|e| GpError::io(&plots, e))?;
    let mut written = Vec::new();
    for problem in ProblemId::ALL {
        let rows: Vec<&SweepSummary> = summaries.iter().filter(|s| s.key.problem == problem).collect();
        if rows.is_empty() {
            continue;
        }
        for (suffix, label, pick) in [
            ("mean_fitness", FITNESS_LABEL, (|s: &SweepSummary| s.mean_fitness) as fn(&SweepSummary) -> f64),
            ("mean_tree_size", SIZE_LABEL, |s: &SweepSummary| s.mean_tree_size),
        ] {
            let bars: Vec<(String, f64)> = rows.iter().map(|s| (arm_label(s), pick(s))).collect();
            let title = format!("{label}: {}", problem.problem().name);
            let path = plots.join(format!("{problem}_{suffix}.svg"));
            std::fs::write(&path, bar_chart_svg(&title, label, &bars)).map_err(|e| GpError::io(&path, e))?;
            written.push(path);
        }
    }
    let table = dir.join("summary.txt");
    std::fs::write(&table, summary_table(summaries)).map_err(|e| GpError::io(&table, e))?;
    written.push(table);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attr(tag: &str, name: &str) -> f64 {
        let key = format!(" {name}=\"");
        let start = tag.find(&key).unwrap() + key.len();
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    }

    #[test]
    fn single_bar_and_labels() {
        let svg = bar_chart_svg("t", FITNESS_LABEL, &[("tournament:7".into(), 0.14)]);
        assert_eq!(svg.matches(r#"class="bar""#).count(), 1);
        assert!(svg.contains(">mean fitness</text>"));
        let svg = bar_chart_svg("t", SIZE_LABEL, &[("a".into(), 3.0)]);
        assert!(svg.contains(">mean tree size</text>"));
    }

    #[test]
    fn bar_heights_are_proportional() {
        let values = [17.7, 12.99, 38.59, 0.0, 16.27];
        let bars: Vec<(String, f64)> = values.iter().enumerate().map(|(i, v)| (format!("m{i}"), *v)).collect();
        let svg = bar_chart_svg("sizes", SIZE_LABEL, &bars);
        let max = values.iter().cloned().fold(0.0, f64::max);
        for line in svg.lines().filter(|l| l.contains(r#"class="bar""#)) {
            let v = attr(line, "data-value");
            let h = attr(line, "height");
            let y = attr(line, "y");
            assert!((h - v / max * PLOT_HEIGHT).abs() < 0.5);
            assert!((y + h - (MARGIN_TOP + PLOT_HEIGHT)).abs() < 0.5);
        }
    }

    #[test]
    fn escapes_markup() {
        let svg = bar_chart_svg("a<b", "y", &[("x&y".into(), 1.0)]);
        assert!(svg.contains("a&lt;b") && svg.contains("x&amp;y"));
    }
}
