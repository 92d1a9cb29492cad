//! Static SVG of one or more traces as stacked panels sharing a time axis.

use std::fmt::Write;

use evdisagg_core::PowerSeries;

const PANEL_HEIGHT: f64 = 140.0;
const GAP: f64 = 28.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 24.0;
const COLORS: [&str; 6] = ["#1f4e79", "#c0392b", "#2e7d32", "#8e44ad", "#d35400", "#555555"];

pub struct Panel<'a> {
    pub title: String,
    pub series: &'a PowerSeries,
}

/// Each panel gets its own y-range from 0 to its maximum. Samples are
/// reduced to a min/max pair per pixel column so that short spikes stay
/// visible on long traces.
pub fn render_svg(panels: &[Panel<'_>], width: usize) -> String {
    let width = width.max(200) as f64;
    let plot_w = width - LEFT - RIGHT;
    let height = TOP + panels.len() as f64 * (PANEL_HEIGHT + GAP) + 8.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (k, panel) in panels.iter().enumerate() {
        let y0 = TOP + k as f64 * (PANEL_HEIGHT + GAP);
        let values = panel.series.values();
        let vmax = values.iter().cloned().fold(0.0, f64::max).max(1.0);
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(
            svg,
            r##"<rect x="{LEFT}" y="{y0:.1}" width="{plot_w:.1}" height="{PANEL_HEIGHT}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(svg, r#"<text x="{LEFT}" y="{:.1}">{}</text>"#, y0 - 6.0, escape(&panel.title));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{vmax:.1} kW</text>"#, LEFT - 4.0, y0 + 10.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">0</text>"#, LEFT - 4.0, y0 + PANEL_HEIGHT);
        if !values.is_empty() {
            let _ = writeln!(
                svg,
                r#"<text x="{LEFT}" y="{:.1}">{}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                y0 + PANEL_HEIGHT + 13.0,
                panel.series.start(),
                LEFT + plot_w,
                y0 + PANEL_HEIGHT + 13.0,
                panel.series.end()
            );
        }

        let y = |v: f64| y0 + PANEL_HEIGHT * (1.0 - v / vmax);
        let n = values.len();
        let mut points = String::new();
        let columns = plot_w as usize;
        if n <= columns {
            for (i, &v) in values.iter().enumerate() {
                let x = LEFT + plot_w * i as f64 / n.max(1) as f64;
                let _ = write!(points, "{x:.1},{:.1} ", y(v));
            }
        } else {
            for c in 0..columns {
                let lo = c * n / columns;
                let hi = ((c + 1) * n / columns).max(lo + 1);
                let chunk = &values[lo..hi];
                let mn = chunk.iter().cloned().fold(f64::INFINITY, f64::min);
                let mx = chunk.iter().cloned().fold(0.0, f64::max);
                let x = LEFT + c as f64;
                let _ = write!(points, "{x:.1},{:.1} {x:.1},{:.1} ", y(mn), y(mx));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            points.trim_end()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use evdisagg_core::Timestamp;

    #[test]
    fn one_polyline_per_panel() {
        let a = PowerSeries::new(Timestamp(0), vec![0.0, 3.3, 3.3, 0.0]).unwrap();
        let b = PowerSeries::new(Timestamp(0), (0..5000).map(|i| (i % 7) as f64).collect()).unwrap();
        let svg = render_svg(&[Panel { title: "a<b".into(), series: &a }, Panel { title: "b".into(), series: &b }], 800);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
    }
}
