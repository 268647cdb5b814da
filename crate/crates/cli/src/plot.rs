//! Plot data and static SVG renderings of report series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use gplab_core::fit::{linear_fit, log_log_fit};

use crate::report::{fmt_f64, write_atomic, RunReport};
use crate::run::{CAUCHY_CSV, DECAY_CSV, ENERGY_CSV, SCAN_CSV};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Slope,
    Decay,
    Cauchy,
    Energy,
}

impl FromStr for PlotKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slope" => Ok(PlotKind::Slope),
            "decay" => Ok(PlotKind::Decay),
            "cauchy" => Ok(PlotKind::Cauchy),
            "energy" => Ok(PlotKind::Energy),
            _ => bail!("unknown plot kind `{s}` (slope, decay, cauchy, energy)"),
        }
    }
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Slope => "slope",
            PlotKind::Decay => "decay",
            PlotKind::Cauchy => "cauchy",
            PlotKind::Energy => "energy",
        }
    }

    fn source(self) -> &'static str {
        match self {
            PlotKind::Slope => SCAN_CSV,
            PlotKind::Decay => DECAY_CSV,
            PlotKind::Cauchy => CAUCHY_CSV,
            PlotKind::Energy => ENERGY_CSV,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Drawn as a dashed line without markers.
    pub fitted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header: Vec<String> = lines.next().ok_or_else(|| anyhow!("empty table"))?.split(',').map(str::to_string).collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| anyhow!("missing series `{name}`"))
    }

    fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.col(name)?;
        self.rows
            .iter()
            .map(|r| r[i].parse::<f64>().with_context(|| format!("column {name}: `{}`", r[i])))
            .collect()
    }

    fn text(&self, name: &str) -> Result<Vec<String>> {
        let i = self.col(name)?;
        Ok(self.rows.iter().map(|r| r[i].clone()).collect())
    }
}

fn positive(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (*x, *y)).collect()
}

/// Dashed `exp(b)·x^a` over the range of `pts`, with its slope note.
fn power_law_overlay(name: &str, pts: &[(f64, f64)]) -> Option<(Series, String)> {
    let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let fit = log_log_fit(&x, &y).ok()?;
    let (lo, hi) = (x.first()?, x.last()?);
    let line = [*lo, *hi].iter().map(|&t| (t, (fit.intercept + fit.slope * t.ln()).exp())).collect();
    Some((
        Series { name: format!("{name} fit"), points: line, fitted: true },
        format!("{name}: slope {:.3} ± {:.3}", fit.slope, fit.slope_ci95),
    ))
}

/// Builds the figure for `kind` from the artifacts of `report` in `dir`.
pub fn figure(report: &RunReport, dir: &Path, kind: PlotKind) -> Result<Figure> {
    let src = kind.source();
    if report.file(src).is_none() {
        bail!("missing series: report has no {src} (experiment {})", report.experiment);
    }
    let text = fs::read_to_string(dir.join(src)).with_context(|| format!("reading {src}"))?;
    let t = Table::parse(&text)?;
    let mut fig = Figure {
        title: String::new(),
        x_label: String::new(),
        y_label: String::new(),
        x_log: false,
        y_log: true,
        series: Vec::new(),
        notes: Vec::new(),
    };
    match kind {
        PlotKind::Slope => {
            fig.title = "dyadic Strichartz constants".into();
            fig.x_label = "k (log2 frequency)".into();
            fig.y_label = "measured constant".into();
            let (k, m) = (t.floats("k")?, t.floats("measured")?);
            let (q, r) = (t.text("q")?, t.text("r")?);
            let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
            for i in 0..k.len() {
                let name = format!("(q,r)=({},{})", q[i], r[i]);
                match groups.iter_mut().find(|g| g.0 == name) {
                    Some(g) => g.1.push((k[i], m[i])),
                    None => groups.push((name, vec![(k[i], m[i])])),
                }
            }
            for (name, pts) in groups {
                for (side, pick) in [("k<0", false), ("k>=0", true)] {
                    let sub: Vec<(f64, f64)> = pts.iter().copied().filter(|p| (p.0 >= 0.0) == pick && p.1 > 0.0).collect();
                    let (x, y): (Vec<f64>, Vec<f64>) = sub.iter().map(|p| (p.0, p.1.log2())).unzip();
                    if let Ok(fit) = linear_fit(&x, &y) {
                        let line = [x[0], x[x.len() - 1]].iter().map(|&k| (k, (fit.intercept + fit.slope * k).exp2())).collect();
                        fig.series.push(Series { name: format!("{name} {side} fit"), points: line, fitted: true });
                        fig.notes.push(format!("{name} {side}: slope {:.3} ± {:.3}", fit.slope, fit.slope_ci95));
                    }
                }
                fig.series.push(Series { name, points: pts, fitted: false });
            }
        }
        PlotKind::Decay => {
            fig.title = "kernel decay".into();
            fig.x_label = "t".into();
            fig.y_label = "sup_x |K(t,x)|".into();
            fig.x_log = true;
            let tt = t.floats("t")?;
            for label in ["stationary", "far"] {
                let pts = positive(&tt, &t.floats(&format!("sup_abs_{label}"))?);
                // fit only what the run fitted: samples above the quadrature floor
                let usable = t.text(&format!("usable_{label}"))?;
                let kept: Vec<(f64, f64)> =
                    tt.iter().zip(&usable).filter(|(_, u)| *u == "true").map(|(x, _)| *x).filter_map(|x| pts.iter().find(|p| p.0 == x).copied()).collect();
                if let Some((s, note)) = power_law_overlay(label, &kept) {
                    fig.series.push(s);
                    fig.notes.push(note);
                }
                fig.series.push(Series { name: label.into(), points: pts, fitted: false });
            }
        }
        PlotKind::Cauchy => {
            fig.title = "Cauchy indicator of the profile".into();
            fig.x_label = "t (cutoff)".into();
            fig.y_label = "sup H1 distance".into();
            let tt = t.floats("t")?;
            for col in ["cauchy_normal_form", "cauchy_variant", "cauchy_linear", "u1sq_decay"] {
                fig.series.push(Series { name: col.into(), points: positive(&tt, &t.floats(col)?), fitted: false });
            }
        }
        PlotKind::Energy => {
            fig.title = "energy".into();
            fig.x_label = "t".into();
            fig.y_label = "E(t) - E(0)".into();
            fig.y_log = false;
            let tt = t.floats("t")?;
            let e = t.floats("E")?;
            let e0 = e.first().copied().unwrap_or(0.0);
            fig.series.push(Series {
                name: "E - E(0)".into(),
                points: tt.iter().zip(&e).map(|(t, e)| (*t, e - e0)).collect(),
                fitted: false,
            });
        }
    }
    if fig.series.iter().all(|s| s.points.is_empty()) {
        bail!("missing series: {src} has no plottable points");
    }
    Ok(fig)
}

/// Grouped two-column text: one `# name` block per series, blank-line separated.
pub fn plot_data(fig: &Figure) -> String {
    let mut s = format!("# {}\n# x: {}\n# y: {}\n", fig.title, fig.x_label, fig.y_label);
    for n in &fig.notes {
        let _ = writeln!(s, "# {n}");
    }
    for ser in &fig.series {
        let _ = writeln!(s, "\n# {}", ser.name);
        for (x, y) in &ser.points {
            let _ = writeln!(s, "{} {}", fmt_f64(*x), fmt_f64(*y));
        }
    }
    s
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(vals: impl Iterator<Item = f64>, log: bool) -> Self {
        let v: Vec<f64> = vals.filter(|x| x.is_finite() && (!log || *x > 0.0)).map(|x| if log { x.log10() } else { x }).collect();
        let (mut lo, mut hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * lo.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self { log, lo: lo - pad, hi: hi + pad }
    }

    fn frac(&self, x: f64) -> f64 {
        let v = if self.log { x.log10() } else { x };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units with labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 8).max(1);
            return (a..=b).step_by(step as usize).map(|e| (10f64.powi(e), format!("1e{e}"))).collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let mut x = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while x <= self.hi + 1e-12 * step {
            out.push((x, format!("{:.3}", x).trim_end_matches('0').trim_end_matches('.').to_string()));
            x += step;
        }
        out
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static SVG: axes, ticks, one polyline per series, legend and notes.
pub fn render_svg(fig: &Figure) -> String {
    let all = || fig.series.iter().flat_map(|s| s.points.iter());
    let ax = Axis::new(all().map(|p| p.0), fig.x_log);
    let ay = Axis::new(all().map(|p| p.1), fig.y_log);
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let px = |x: f64| LEFT + ax.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ay.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, esc(&fig.title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for (v, label) in ax.ticks() {
        let x = px(v);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, esc(&label));
    }
    for (v, label) in ay.ticks() {
        let y = py(v);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, esc(&label));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 20.0, esc(&fig.x_label));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        esc(&fig.y_label)
    );

    let mut base = 0;
    for (i, ser) in fig.series.iter().enumerate() {
        if !ser.fitted {
            base += 1;
        }
        // a fit shares the colour of the data series that follows it
        let color = COLORS[(if ser.fitted { base } else { base - 1 }) % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite() && (!fig.x_log || p.0 > 0.0) && (!fig.y_log || p.1 > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if ser.fitted { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, pts.join(" "));
        if !ser.fitted {
            for p in &pts {
                let (x, y) = p.split_once(',').unwrap();
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}"{dash}/>"#, W - RIGHT + 10.0, W - RIGHT + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, W - RIGHT + 34.0, ly + 4.0, esc(&ser.name));
    }
    for (i, n) in fig.notes.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{}</text>"#, LEFT + 8.0, TOP + 16.0 + 14.0 * i as f64, esc(n));
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<kind>.dat` and `<kind>.svg` next to the report.
pub fn emit_plotdata(report: &RunReport, dir: &Path, kind: PlotKind) -> Result<Vec<PathBuf>> {
    let fig = figure(report, dir, kind)?;
    let dat = dir.join(format!("{}.dat", kind.name()));
    let svg = dir.join(format!("{}.svg", kind.name()));
    write_atomic(&dat, plot_data(&fig).as_bytes())?;
    write_atomic(&svg, render_svg(&fig).as_bytes())?;
    Ok(vec![dat, svg])
}
