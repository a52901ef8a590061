//! Minimal SVG box plots: one box per category on a shared linear axis.

use std::fmt::Write;

use ae_spectra::spectra::BoxStats;

const WIDTH_PER_BOX: f64 = 36.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;
const PLOT_HEIGHT: f64 = 320.0;

#[derive(Debug, Clone)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub ticks: Vec<(f64, String)>,
    pub label: String,
}

impl Axis {
    /// Axis from `min` to `max` with roughly five round ticks.
    pub fn linear(min: f64, max: f64, label: &str) -> Self {
        let max = if max > min { max } else { min + 1.0 };
        let step = nice_step((max - min) / 5.0);
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let mut ticks = Vec::new();
        let mut k = (min / step).ceil();
        while k * step <= max + step * 1e-9 {
            let v = k * step;
            ticks.push((v, format!("{v:.decimals$}")));
            k += 1.0;
        }
        Self {
            min,
            max,
            ticks,
            label: label.to_string(),
        }
    }

    fn to_y(&self, v: f64) -> f64 {
        let t = (v - self.min) / (self.max - self.min);
        TOP + PLOT_HEIGHT * (1.0 - t.clamp(0.0, 1.0))
    }
}

fn nice_step(raw: f64) -> f64 {
    let raw = if raw > 0.0 && raw.is_finite() { raw } else { 1.0 };
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one box per `(label, stats)`; `None` leaves an empty slot.
pub fn box_plot(title: &str, x_label: &str, axis: &Axis, boxes: &[(String, Option<&BoxStats>)]) -> String {
    let width = LEFT + RIGHT + WIDTH_PER_BOX * boxes.len().max(1) as f64;
    let height = TOP + PLOT_HEIGHT + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );

    let x0 = LEFT;
    let x1 = width - RIGHT;
    let bottom = TOP + PLOT_HEIGHT;
    for (v, label) in &axis.ticks {
        let y = axis.to_y(*v);
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.1}" y1="{y:.2}" x2="{x1:.1}" y2="{y:.2}" stroke="#e4e4e4"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1},{TOP:.1} V{bottom:.1} H{x1:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + PLOT_HEIGHT / 2.0,
        escape(&axis.label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        height - 12.0,
        escape(x_label)
    );

    for (i, (label, stats)) in boxes.iter().enumerate() {
        let cx = LEFT + WIDTH_PER_BOX * (i as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bottom + 16.0,
            escape(label)
        );
        let Some(b) = stats else { continue };
        let q = &b.quantiles;
        let half = WIDTH_PER_BOX * 0.3;
        let (y25, y50, y75) = (axis.to_y(q.q25), axis.to_y(q.median), axis.to_y(q.q75));
        let (ylo, yhi) = (axis.to_y(b.whisker_low), axis.to_y(b.whisker_high));
        let _ = writeln!(
            s,
            r#"<path d="M{cx:.1},{y75:.2} V{yhi:.2} M{:.1},{yhi:.2} H{:.1} M{cx:.1},{y25:.2} V{ylo:.2} M{:.1},{ylo:.2} H{:.1}" stroke="black" fill="none"/>"#,
            cx - half / 2.0,
            cx + half / 2.0,
            cx - half / 2.0,
            cx + half / 2.0
        );
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{y75:.2}" width="{:.1}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            cx - half,
            2.0 * half,
            (y25 - y75).max(0.0)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{y50:.2}" x2="{:.1}" y2="{y50:.2}" stroke="#08306b" stroke-width="2"/>"##,
            cx - half,
            cx + half
        );
        for &o in &b.outliers {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.1}" cy="{:.2}" r="1.6" fill="none" stroke="black" stroke-width="0.6"/>"#,
                axis.to_y(o)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
