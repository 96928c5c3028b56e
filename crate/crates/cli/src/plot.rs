//! Native SVG reward-curve rendering: the raw per-step series as a light
//! polyline with its moving average overlaid, no external plotting deps.

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const RAW_COLOR: &str = "#6baed6";
const SMOOTH_COLOR: &str = "#ff7f0e";

/// Render a reward curve with its smoothed overlay.
pub fn reward_curve_svg(
    title: &str,
    x_label: &str,
    raw: &[f64],
    smoothed: &[f64],
) -> String {
    assert_eq!(raw.len(), smoothed.len(), "series lengths must match");

    let n = raw.len();
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in raw.iter().chain(smoothed) {
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    if !y_min.is_finite() || n == 0 {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min).abs() < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |i: usize| MARGIN_LEFT + plot_w * (i as f64) / ((n.max(2) - 1) as f64);
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - y_min) / (y_max - y_min));

    let polyline = |series: &[f64], color: &str, width: f64| {
        let pts: Vec<String> =
            series.iter().enumerate().map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v))).collect();
        format!(
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
            pts.join(" ")
        )
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    ));
    svg.push('\n');
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg.push('\n');

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#
    ));
    svg.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{:.2}" y2="{y0}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    ));
    svg.push('\n');

    // Ticks and labels.
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * (k as f64) / 4.0;
        let y = y_of(v);
        svg.push_str(&format!(
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        ));
        svg.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{v:.0}</text>"#,
            x0 - 8.0,
            y + 4.0
        ));
        svg.push('\n');

        let i = (n.saturating_sub(1)) * k / 4;
        let x = x_of(i);
        svg.push_str(&format!(
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        ));
        svg.push_str(&format!(
            r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{i}</text>"#,
            y0 + 20.0
        ));
        svg.push('\n');
    }

    if n > 0 {
        svg.push_str(&polyline(raw, RAW_COLOR, 1.0));
        svg.push('\n');
        svg.push_str(&polyline(smoothed, SMOOTH_COLOR, 2.0));
        svg.push('\n');
    }

    svg.push_str(&format!(
        r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    ));
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{x_label}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">accumulated reward</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));
    svg.push('\n');

    // Legend.
    let lx = MARGIN_LEFT + 12.0;
    svg.push_str(&format!(
        r#"<line x1="{lx}" y1="{MARGIN_TOP}" x2="{:.2}" y2="{MARGIN_TOP}" stroke="{RAW_COLOR}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="12">reward</text>"#,
        lx + 24.0,
        lx + 30.0,
        MARGIN_TOP + 4.0
    ));
    let ly = MARGIN_TOP + 18.0;
    svg.push_str(&format!(
        r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{SMOOTH_COLOR}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="12">moving average</text>"#,
        lx + 24.0,
        lx + 30.0,
        ly + 4.0
    ));
    svg.push('\n');
    svg.push_str("</svg>\n");
    svg
}
