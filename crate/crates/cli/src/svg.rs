//! Minimal hand-written SVG charts. Presentation only; the numbers live in
//! the CSV and JSON outputs.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

enum Mark {
    Line { points: Vec<(f64, f64)>, color: String, dashed: bool },
    Dots { points: Vec<(f64, f64)>, color: String, size: f64 },
    Fill { points: Vec<(f64, f64)>, color: String },
    Label { at: (f64, f64), text: String, color: String },
}

/// A single x-y chart with automatic bounds.
pub struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    log_x: bool,
    marks: Vec<Mark>,
    legend: Vec<(String, String)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{:.4}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            marks: Vec::new(),
            legend: Vec::new(),
        }
    }

    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    fn finite(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect()
    }

    pub fn line(&mut self, points: &[(f64, f64)], color: &str, label: Option<&str>) {
        self.marks.push(Mark::Line { points: Self::finite(points), color: color.into(), dashed: false });
        if let Some(l) = label {
            self.legend.push((l.into(), color.into()));
        }
    }

    pub fn dashed(&mut self, points: &[(f64, f64)], color: &str, label: Option<&str>) {
        self.marks.push(Mark::Line { points: Self::finite(points), color: color.into(), dashed: true });
        if let Some(l) = label {
            self.legend.push((l.into(), color.into()));
        }
    }

    pub fn dots(&mut self, points: &[(f64, f64)], color: &str, size: f64, label: Option<&str>) {
        self.marks.push(Mark::Dots { points: Self::finite(points), color: color.into(), size });
        if let Some(l) = label {
            self.legend.push((l.into(), color.into()));
        }
    }

    pub fn fill(&mut self, points: &[(f64, f64)], color: &str) {
        self.marks.push(Mark::Fill { points: Self::finite(points), color: color.into() });
    }

    pub fn label(&mut self, at: (f64, f64), text: &str, color: &str) {
        self.marks.push(Mark::Label { at, text: text.into(), color: color.into() });
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = xs;
        for m in &self.marks {
            let pts: &[(f64, f64)] = match m {
                Mark::Line { points, .. } | Mark::Dots { points, .. } | Mark::Fill { points, .. } => points,
                Mark::Label { .. } => continue,
            };
            for &(x, y) in pts {
                let x = if self.log_x { x.log10() } else { x };
                if x.is_finite() {
                    xs = (xs.0.min(x), xs.1.max(x));
                    ys = (ys.0.min(y), ys.1.max(y));
                }
            }
        }
        let pad = |(lo, hi): (f64, f64)| {
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-300 {
                (lo - 0.5, hi + 0.5)
            } else {
                let p = 0.05 * (hi - lo);
                (lo - p, hi + p)
            }
        };
        (pad(xs), pad(ys))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let log_x = self.log_x;
        let px = move |x: f64| {
            let x = if log_x { x.log10() } else { x };
            MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN)
        };
        let py = move |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        let path = |pts: &[(f64, f64)]| {
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect::<Vec<_>>().join(" ")
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#, right - left, bottom - top);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let xt = if log_x { 10f64.powf(xv) } else { xv };
            let xp = left + f * (right - left);
            let _ = writeln!(s, r#"<text x="{xp:.1}" y="{}" text-anchor="middle">{}</text>"#, bottom + 18.0, nice(xt));
            let yv = y0 + f * (y1 - y0);
            let yp = bottom - f * (bottom - top);
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, yp + 4.0, nice(yv));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{left}" y="{top}" width="{}" height="{}"/></clipPath>"#, right - left, bottom - top);
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        for m in &self.marks {
            match m {
                Mark::Fill { points, color } if points.len() > 2 => {
                    let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, path(points));
                }
                Mark::Line { points, color, dashed } if points.len() > 1 => {
                    let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, path(points));
                }
                Mark::Dots { points, color, size } => {
                    for &(x, y) in points {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{size}" fill="{color}"/>"#, px(x), py(y));
                    }
                }
                Mark::Label { at, text, color } => {
                    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#, px(at.0) + 4.0, py(at.1) - 4.0, escape(text));
                }
                _ => {}
            }
        }
        let _ = writeln!(s, "</g>");
        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = top + 16.0 + 16.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{}" y="{}" width="12" height="3" fill="{color}"/>"#, right - 150.0, y - 4.0);
            let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, right - 132.0, escape(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Equal-aspect drawing of the table and orbit polylines in the unit disk.
pub struct TableDrawing {
    body: String,
}

const SIDE: f64 = 520.0;

fn to_px(p: [f64; 2]) -> (f64, f64) {
    let scale = SIDE / 2.0 * 0.92;
    (SIDE / 2.0 + p[0] * scale, SIDE / 2.0 - p[1] * scale)
}

impl TableDrawing {
    pub fn new() -> Self {
        let (cx, cy) = to_px([0.0, 0.0]);
        let r = SIDE / 2.0 * 0.92;
        let body = format!(r#"<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="black" stroke-width="1.5"/>"#) + "\n";
        Self { body }
    }

    pub fn scatterer(&mut self, center: [f64; 2], radius: f64, color: &str) {
        let (cx, cy) = to_px(center);
        let r = radius * SIDE / 2.0 * 0.92;
        let _ = writeln!(self.body, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{color}" fill-opacity="0.25" stroke="{color}"/>"#);
    }

    pub fn circle(&mut self, radius: f64, color: &str) {
        let (cx, cy) = to_px([0.0, 0.0]);
        let r = radius * SIDE / 2.0 * 0.92;
        let _ = writeln!(self.body, r#"<circle cx="{cx}" cy="{cy}" r="{r:.2}" fill="none" stroke="{color}" stroke-dasharray="4 4"/>"#);
    }

    pub fn polyline(&mut self, points: &[[f64; 2]], color: &str) {
        let pts: Vec<String> = points.iter().map(|&p| to_px(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(self.body, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#, pts.join(" "));
        for &p in points {
            let (x, y) = to_px(p);
            let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
        }
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIDE}\" height=\"{SIDE}\" viewBox=\"0 0 {SIDE} {SIDE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed() {
        let mut c = Chart::new("t<1>", "x", "y").log_x();
        c.line(&[(1.0, 0.0), (10.0, 1.0), (f64::NAN, 2.0)], color(0), Some("a"));
        c.dots(&[(3.0, 0.5)], color(1), 2.0, None);
        let s = c.render();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("t&lt;1&gt;"));
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn empty_chart_renders() {
        assert!(Chart::new("", "", "").render().contains("</svg>"));
    }
}
