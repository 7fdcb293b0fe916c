//! The six subcommands. Each turns a resolved [`ScanSpec`] into a row table
//! plus an optional SVG rendering. Grid points run on the rayon pool and
//! rows come back in grid order.

use std::f64::consts::{PI, TAU};

use annular_core::birkhoff::island::island_cloud;
use annular_core::birkhoff::{
    a_tilde_closed, a_tilde_limit, birkhoff_report, closed_form_a, epsilon_ladder, extrapolate_a_tilde,
    rotation_coefficient,
};
use annular_core::error::BilliardError;
use annular_core::geometry::{caustic_radius, tangency_radius_b, TableParams};
use annular_core::map::Wall;
use annular_core::orbits::{build_type_a, build_type_b, step_residual, verify_closure, OrbitRecord};
use annular_core::stability::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::svg::{color, Chart, TableDrawing};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Which orbit family a grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Polygonal and star orbits from `--n --k --R --delta`.
    A,
    /// Tangent-scatterer orbits from `--n --eps`.
    B,
    /// Both, with type (b) only when `--eps` is given.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Stability,
    Region,
    Birkhoff,
    Orbit,
    Section,
    Lemma,
}

/// Fully resolved request, echoed verbatim into every output.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSpec {
    pub command: CommandKind,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u32>>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub island_radius: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    pub format: Format,
    pub out: Option<String>,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl ScanSpec {
    pub fn new(command: CommandKind, format: Format, out: Option<String>, seed: u64, jobs: Option<usize>) -> Self {
        Self {
            command,
            tool_version: crate::table::TOOL_VERSION,
            n: None,
            k: None,
            radius: None,
            config: None,
            samples: None,
            delta: None,
            eps: None,
            island_radius: None,
            iterations: None,
            seeds: None,
            x: None,
            format,
            out,
            seed,
            jobs,
        }
    }

    fn ns(&self) -> &[u32] {
        self.n.as_deref().unwrap_or(&[])
    }

    fn ks(&self) -> &[u32] {
        self.k.as_deref().unwrap_or(&[1])
    }
}

pub struct Output {
    pub table: Table,
    pub svg: Option<String>,
}

/// Machine-readable skip reason: a stable code, then the message.
pub fn skip_reason(e: &BilliardError) -> String {
    let code = match e {
        BilliardError::Domain(_) => "domain",
        BilliardError::InvalidTable(_) => "invalid_table",
        BilliardError::Singular(_) => "singular",
        BilliardError::NoCollision { .. } => "no_collision",
        BilliardError::Grazing { .. } => "grazing",
        BilliardError::NotElliptic { .. } => "not_elliptic",
        BilliardError::NonEllipticNormalization { .. } => "non_elliptic_normalization",
        BilliardError::Resonant { .. } => "resonant",
        BilliardError::Precision { .. } => "precision",
        BilliardError::Escape { .. } => "escape",
    };
    let detail = match e {
        BilliardError::Domain(m) | BilliardError::InvalidTable(m) | BilliardError::Singular(m) => m.clone(),
        other => other.to_string(),
    };
    format!("{code}: {detail}")
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Elliptic => "elliptic",
        Classification::Hyperbolic => "hyperbolic",
        Classification::Parabolic => "parabolic",
    }
}

pub fn run(spec: &ScanSpec) -> anyhow::Result<Output> {
    Ok(match spec.command {
        CommandKind::Stability => stability(spec),
        CommandKind::Region => region(spec),
        CommandKind::Birkhoff => birkhoff(spec),
        CommandKind::Orbit => orbit(spec),
        CommandKind::Section => section(spec),
        CommandKind::Lemma => lemma(spec),
    })
}

#[derive(Debug, Clone, Copy)]
enum Point {
    A { n: u32, k: u32, radius: Option<f64>, delta: f64 },
    B { n: u32, epsilon: f64 },
}

/// Type-(a) points from the `(n, k, δ)` grid. Without explicit radii each
/// table gets `samples` radii spread evenly inside its admissible range.
fn type_a_points(spec: &ScanSpec, default_fraction: Option<f64>) -> Vec<Point> {
    let mut out = Vec::new();
    for &n in spec.ns() {
        for &k in spec.ks() {
            for &delta in spec.delta.as_deref().unwrap_or(&[0.0]) {
                let cap = max_admissible_radius(n, k, delta);
                let radii: Vec<Option<f64>> = match (&spec.radius, default_fraction) {
                    (Some(rs), _) => rs.iter().map(|&r| Some(r)).collect(),
                    _ if !(cap > 0.0) => vec![None],
                    (None, Some(f)) => vec![Some(f * cap)],
                    (None, None) => {
                        let m = spec.samples.unwrap_or(5);
                        (1..=m).map(|i| Some(cap * i as f64 / (m + 1) as f64)).collect()
                    }
                };
                out.extend(radii.into_iter().map(|radius| Point::A { n, k, radius, delta }));
            }
        }
    }
    out
}

fn family_points(spec: &ScanSpec, default_fraction: Option<f64>) -> Vec<Point> {
    let family = spec.config.unwrap_or(Family::All);
    let mut points = if family == Family::B { Vec::new() } else { type_a_points(spec, default_fraction) };
    if family != Family::A {
        points.extend(type_b_points(spec));
    }
    points
}

fn type_b_points(spec: &ScanSpec) -> Vec<Point> {
    let eps = spec.eps.as_deref().unwrap_or(&[]);
    spec.ns().iter().flat_map(|&n| eps.iter().map(move |&epsilon| Point::B { n, epsilon })).collect()
}

fn no_radius(n: u32, k: u32, delta: f64) -> BilliardError {
    BilliardError::InvalidTable(format!("no admissible radius for n={n}, k={k}, delta={delta}"))
}

// ---------------------------------------------------------------- stability

const STABILITY_COLUMNS: [&str; 14] = [
    "index",
    "config",
    "n",
    "k",
    "R",
    "delta",
    "epsilon",
    "trace_closed",
    "trace_numeric",
    "trace_diff",
    "classification",
    "bifurcation_radius",
    "max_radius",
    "skip_reason",
];

struct StabilityRow {
    traces: Result<(f64, f64), BilliardError>,
    radius: Option<f64>,
}

fn stability_point(p: Point) -> StabilityRow {
    match p {
        Point::A { n, k, radius, delta } => {
            let traces = radius.ok_or_else(|| no_radius(n, k, delta)).and_then(|r| {
                let params = TableParams::type_a(n, k, r, delta)?;
                let numeric = monodromy(&build_type_a(&params)?)?.trace();
                Ok((trace_closed_form(n, k, r, delta)?, numeric))
            });
            StabilityRow { traces, radius }
        }
        Point::B { n, epsilon } => {
            let traces = TableParams::type_b(n, epsilon)
                .and_then(|_| Ok((trace_b_expansion(n, epsilon), trace_type_b(n, epsilon)?)));
            StabilityRow { traces, radius: tangency_radius_b(n, epsilon).ok() }
        }
    }
}

fn stability(spec: &ScanSpec) -> Output {
    let points = family_points(spec, None);
    let results: Vec<StabilityRow> = points.par_iter().map(|&p| stability_point(p)).collect();

    let mut table = Table::new(&STABILITY_COLUMNS);
    let mut counts = [0usize; 3];
    let (mut skipped, mut worst) = (0usize, 0.0f64);
    let mut curves: Vec<((u32, u32, f64), Vec<(f64, f64)>)> = Vec::new();
    for (index, (p, row)) in points.iter().zip(&results).enumerate() {
        let (config, n, k, delta, epsilon, bif, cap) = match *p {
            Point::A { n, k, delta, .. } => (
                "type_a",
                n,
                Cell::from(k),
                Cell::from(delta),
                Cell::Empty,
                Cell::from(bifurcation_radius(n, k, delta)),
                Cell::from(max_admissible_radius(n, k, delta)),
            ),
            Point::B { n, epsilon } => ("type_b", n, Cell::Empty, Cell::Empty, Cell::from(epsilon), Cell::Empty, Cell::Empty),
        };
        let mut cells = vec![index.into(), config.into(), n.into(), k, row.radius.into(), delta, epsilon];
        match &row.traces {
            Ok((closed, numeric)) => {
                let class = classify(*numeric);
                counts[class as usize] += 1;
                worst = worst.max((closed - numeric).abs());
                cells.extend([
                    (*closed).into(),
                    (*numeric).into(),
                    (closed - numeric).abs().into(),
                    classification_name(class).into(),
                ]);
                cells.extend([bif, cap, Cell::Empty]);
                if let (Point::A { n, k, delta, .. }, Some(r)) = (*p, row.radius) {
                    match curves.last_mut() {
                        Some((key, pts)) if *key == (n, k, delta) => pts.push((r, *numeric)),
                        _ => curves.push(((n, k, delta), vec![(r, *numeric)])),
                    }
                }
            }
            Err(e) => {
                skipped += 1;
                cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, bif, cap, skip_reason(e).into()]);
            }
        }
        table.push(cells);
    }
    table.summary = json!({
        "rows": table.rows.len(),
        "skipped": skipped,
        "elliptic": counts[Classification::Elliptic as usize],
        "hyperbolic": counts[Classification::Hyperbolic as usize],
        "parabolic": counts[Classification::Parabolic as usize],
        "max_trace_diff": worst,
    });

    let mut chart = Chart::new("Monodromy trace along the radius sweep", "R", "trace");
    let r_span: Vec<f64> = curves.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.0)).collect();
    if let (Some(lo), Some(hi)) = (r_span.iter().copied().reduce(f64::min), r_span.iter().copied().reduce(f64::max)) {
        chart.dashed(&[(lo, 2.0), (hi, 2.0)], "#888", None);
        chart.dashed(&[(lo, -2.0), (hi, -2.0)], "#888", None);
    }
    for (i, ((n, k, delta), pts)) in curves.iter().enumerate() {
        let label = format!("n={n} k={k} δ={delta}");
        chart.line(pts, color(i), (i < 8).then_some(label.as_str()));
        chart.dots(pts, color(i), 2.5, None);
    }
    Output { table, svg: Some(chart.render()) }
}

// ------------------------------------------------------------------- region

const REGION_POINTS: usize = 201;

fn region(spec: &ScanSpec) -> Output {
    let pairs: Vec<(u32, u32)> = spec.ns().iter().flat_map(|&n| spec.ks().iter().map(move |&k| (n, k))).collect();
    let crossings: Vec<Result<f64, BilliardError>> = pairs.par_iter().map(|&(n, k)| region_crossing_delta(n, k)).collect();

    let mut table = Table::new(&["index", "n", "k", "delta", "r_min", "r_delta", "stable_width", "skip_reason"]);
    let mut chart = Chart::new("Admissible region for linear stability", "δ", "R");
    let mut summary = Vec::new();
    for (ci, (&(n, k), crossing)) in pairs.iter().zip(&crossings).enumerate() {
        let deltas = spec.delta.clone().unwrap_or_else(|| {
            let top = crossing.as_ref().map_or(0.1, |d| 1.25 * d);
            (0..REGION_POINTS).map(|i| top * i as f64 / (REGION_POINTS - 1) as f64).collect()
        });
        let (mut lower, mut upper, mut inside) = (Vec::new(), Vec::new(), Vec::new());
        for delta in deltas {
            let r_min = bifurcation_radius(n, k, delta);
            let r_delta = max_admissible_radius(n, k, delta);
            let reason = match TableParams::type_a(n, k, r_delta.max(0.0) * 0.5, delta) {
                Ok(_) if r_delta > 0.0 => Cell::Empty,
                Ok(_) => skip_reason(&no_radius(n, k, delta)).into(),
                Err(e) => skip_reason(&e).into(),
            };
            let width = if reason == Cell::Empty { Cell::from((r_delta - r_min).max(0.0)) } else { Cell::Empty };
            table.push(vec![
                table.rows.len().into(),
                n.into(),
                k.into(),
                delta.into(),
                r_min.into(),
                r_delta.into(),
                width,
                reason,
            ]);
            lower.push((delta, r_min));
            upper.push((delta, r_delta));
            if r_delta > r_min {
                inside.push((delta, r_min, r_delta));
            }
        }
        if !inside.is_empty() {
            let mut poly: Vec<(f64, f64)> = inside.iter().map(|&(d, lo, _)| (d, lo)).collect();
            poly.extend(inside.iter().rev().map(|&(d, _, hi)| (d, hi)));
            chart.fill(&poly, color(ci));
        }
        chart.line(&lower, color(ci), Some(&format!("R_min n={n} k={k}")));
        chart.dashed(&upper, color(ci), None);
        match crossing {
            Ok(d) => {
                chart.dots(&[(*d, bifurcation_radius(n, k, *d))], color(ci), 4.0, None);
                chart.label((*d, bifurcation_radius(n, k, *d)), &format!("δ*={d:.5}"), color(ci));
                summary.push(json!({"n": n, "k": k, "delta_star": d, "skip_reason": null}));
            }
            Err(e) => summary.push(json!({"n": n, "k": k, "delta_star": null, "skip_reason": skip_reason(e)})),
        }
    }
    table.summary = json!({ "rows": table.rows.len(), "crossings": summary });
    Output { table, svg: Some(chart.render()) }
}

// ----------------------------------------------------------------- birkhoff

const BIRKHOFF_COLUMNS: [&str; 15] = [
    "index",
    "n",
    "epsilon",
    "mu",
    "mu_over_sqrt_eps",
    "rotation_coefficient",
    "A_numeric",
    "A_closed_leading",
    "eps2_A",
    "A_tilde",
    "A_tilde_closed",
    "trace",
    "resonant3",
    "resonant4",
    "skip_reason",
];

/// The ε values used for `n`: the explicit list, or the scaled ladder.
fn birkhoff_epsilons(spec: &ScanSpec, n: u32) -> Vec<f64> {
    spec.eps.clone().unwrap_or_else(|| epsilon_ladder(n).to_vec())
}

fn birkhoff(spec: &ScanSpec) -> Output {
    let ns = spec.ns().to_vec();
    // Ã needs a ladder; a single explicit ε falls back to the scaled one
    let ladders: Vec<Vec<f64>> = ns
        .iter()
        .map(|&n| match &spec.eps {
            Some(e) if e.len() >= 2 => e.clone(),
            _ => epsilon_ladder(n).to_vec(),
        })
        .collect();
    let tildes: Vec<_> = ns.par_iter().zip(&ladders).map(|(&n, l)| extrapolate_a_tilde(n, l)).collect();
    let points: Vec<(usize, u32, f64)> = ns
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| birkhoff_epsilons(spec, n).into_iter().map(move |e| (i, n, e)))
        .collect();
    let reports: Vec<_> = points.par_iter().map(|&(_, n, e)| birkhoff_report(n, e)).collect();

    let mut table = Table::new(&BIRKHOFF_COLUMNS);
    for (index, (&(i, n, e), report)) in points.iter().zip(&reports).enumerate() {
        let tilde = tildes[i].as_ref().ok().map(|t| t.extrapolated);
        let mut cells: Vec<Cell> = vec![index.into(), n.into(), e.into()];
        match report {
            Ok(r) => {
                let mu = r.mu_principal.abs();
                let reason = if r.is_resonant() {
                    let order = if r.resonant3 { 3 } else { 4 };
                    Cell::from(skip_reason(&BilliardError::Resonant { order, distance: 0.0 }))
                } else {
                    Cell::Empty
                };
                cells.extend([
                    r.mu.into(),
                    (mu / e.sqrt()).into(),
                    rotation_coefficient(n).into(),
                    r.birkhoff_a.into(),
                    closed_form_a(n, e).ok().into(),
                    (r.birkhoff_a * e * e).into(),
                    tilde.into(),
                    a_tilde_closed(n).ok().into(),
                    r.trace.into(),
                    r.resonant3.into(),
                    r.resonant4.into(),
                    reason,
                ]);
            }
            Err(err) => {
                cells.extend([Cell::Empty, Cell::Empty, rotation_coefficient(n).into(), Cell::Empty]);
                cells.extend([closed_form_a(n, e).ok().into(), Cell::Empty, tilde.into(), a_tilde_closed(n).ok().into()]);
                cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, skip_reason(err).into()]);
            }
        }
        table.push(cells);
    }
    let per_n: Vec<_> = ns
        .iter()
        .zip(&tildes)
        .zip(&ladders)
        .map(|((&n, t), ladder)| match t {
            Ok(t) => json!({"n": n, "ladder": ladder, "scaled": t.scaled, "A_tilde": t.extrapolated,
                            "A_tilde_closed": a_tilde_closed(n).ok(), "skip_reason": null}),
            Err(e) => json!({"n": n, "ladder": ladder, "A_tilde": null, "skip_reason": skip_reason(e)}),
        })
        .collect();
    table.summary = json!({ "rows": table.rows.len(), "A_tilde_limit": a_tilde_limit(), "per_n": per_n });

    let mut chart = Chart::new("Scaled Birkhoff coefficient", "n", "ε²A").log_x();
    let n_max = ns.iter().copied().max().unwrap_or(3).max(4);
    let dense: Vec<(f64, f64)> = (0..200)
        .map(|i| 3.0 * (n_max as f64 / 3.0).powf(i as f64 / 199.0))
        .map(|x| x.round() as u32)
        .filter_map(|n| a_tilde_closed(n).ok().map(|a| (n as f64, a)))
        .collect();
    chart.line(&dense, color(0), Some("closed form"));
    chart.dashed(&[(3.0, a_tilde_limit()), (n_max as f64, a_tilde_limit())], "#888", Some("n → ∞"));
    let est: Vec<(f64, f64)> =
        ns.iter().zip(&tildes).filter_map(|(&n, t)| t.as_ref().ok().map(|t| (n as f64, t.extrapolated))).collect();
    chart.dots(&est, color(1), 4.0, Some("extrapolated"));
    Output { table, svg: Some(chart.render()) }
}

// -------------------------------------------------------------------- orbit

fn orbit(spec: &ScanSpec) -> Output {
    let points = family_points(spec, Some(0.5));
    let built: Vec<Result<OrbitRecord, BilliardError>> = points
        .par_iter()
        .map(|&p| match p {
            Point::A { n, k, radius, delta } => {
                build_type_a(&TableParams::type_a(n, k, radius.ok_or_else(|| no_radius(n, k, delta))?, delta)?)
            }
            Point::B { n, epsilon } => build_type_b(n, epsilon),
        })
        .collect();

    let mut table = Table::new(&[
        "orbit", "config", "n", "k", "R", "delta", "epsilon", "collision", "wall", "s", "theta", "x", "y", "skip_reason",
    ]);
    let mut drawing = TableDrawing::new();
    let mut records = Vec::new();
    for (index, (p, rec)) in points.iter().zip(&built).enumerate() {
        let head = |config: &str| -> Vec<Cell> {
            match *p {
                Point::A { n, k, radius, delta } => {
                    vec![index.into(), config.into(), n.into(), k.into(), radius.into(), delta.into(), Cell::Empty]
                }
                Point::B { n, epsilon } => vec![
                    index.into(),
                    config.into(),
                    n.into(),
                    Cell::Empty,
                    tangency_radius_b(n, epsilon).ok().into(),
                    Cell::Empty,
                    epsilon.into(),
                ],
            }
        };
        let config = if matches!(p, Point::A { .. }) { "type_a" } else { "type_b" };
        match rec {
            Ok(orbit) => {
                let xy = orbit.polyline();
                for (i, (pt, c)) in orbit.points.iter().zip(&xy).enumerate() {
                    let mut cells = head(config);
                    let wall = if pt.wall == Wall::Outer { "outer" } else { "inner" };
                    cells.extend([i.into(), wall.into(), pt.s.into(), pt.theta.into(), c[0].into(), c[1].into(), Cell::Empty]);
                    table.push(cells);
                }
                let trace = monodromy(orbit).map(|m| m.trace());
                records.push(json!({
                    "orbit": index,
                    "closure_residual": verify_closure(orbit),
                    "step_residual": step_residual(orbit),
                    "trace": trace.as_ref().ok(),
                    "classification": trace.as_ref().ok().map(|&t| classification_name(classify(t))),
                    "record": orbit,
                }));
                drawing.scatterer(orbit.pose.center, orbit.pose.radius, color(index));
                if let (Point::A { n, k, delta, .. }, true) = (*p, true) {
                    if delta == 0.0 {
                        if let Ok(c) = caustic_radius(n, k) {
                            drawing.circle(c, color(index));
                        }
                    }
                }
                let mut closed = xy.clone();
                closed.push(xy[0]);
                drawing.polyline(&closed, color(index));
            }
            Err(e) => {
                let mut cells = head(config);
                cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, skip_reason(e).into()]);
                table.push(cells);
                records.push(json!({"orbit": index, "skip_reason": skip_reason(e)}));
            }
        }
    }
    let worst = records.iter().filter_map(|r| r["closure_residual"].as_f64()).fold(0.0, f64::max);
    table.summary = json!({ "rows": table.rows.len(), "max_closure_residual": worst, "orbits": records });
    Output { table, svg: Some(drawing.render()) }
}

// ------------------------------------------------------------------ section

/// Seed angles drawn from the recorded seed, so clouds are reproducible.
pub fn seeded_angles(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0.0..TAU)).collect()
}

fn section(spec: &ScanSpec) -> Output {
    let iterations = spec.iterations.unwrap_or(10_000);
    let angles = seeded_angles(spec.seed, spec.seeds.unwrap_or(8));
    let radii = spec.island_radius.clone().unwrap_or_else(|| vec![1e-4]);
    let mut points = Vec::new();
    for &n in spec.ns() {
        for &e in spec.eps.as_deref().unwrap_or(&[0.02]) {
            points.extend(radii.iter().map(|&r| (n, e, r)));
        }
    }
    let clouds: Vec<_> = points.par_iter().map(|&(n, e, r)| island_cloud(n, e, r, iterations, &angles)).collect();

    let mut table = Table::new(&[
        "index", "n", "epsilon", "radius", "seed_index", "angle", "iteration", "s", "r", "distance", "skip_reason",
    ]);
    let mut chart = Chart::new("Iterates of the period map near the tangent orbit", "s", "r = cos θ");
    let mut summary = Vec::new();
    for (index, (&(n, e, radius), cloud)) in points.iter().zip(&clouds).enumerate() {
        let head = || -> Vec<Cell> { vec![index.into(), n.into(), e.into(), radius.into()] };
        match cloud {
            Ok(c) => {
                let mut dots = Vec::new();
                for (si, trace) in c.seeds.iter().enumerate() {
                    for (it, z) in trace.iterates.iter().enumerate() {
                        let ds = (z.s - c.center.s + PI).rem_euclid(TAU) - PI;
                        let mut cells = head();
                        cells.extend([si.into(), trace.angle.into(), it.into(), z.s.into(), z.r.into()]);
                        cells.extend([ds.hypot(z.r - c.center.r).into(), Cell::Empty]);
                        table.push(cells);
                        dots.push((z.s, z.r));
                    }
                    if let Some(esc) = &trace.escape {
                        let mut cells = head();
                        cells.extend([si.into(), trace.angle.into(), esc.iteration.into()]);
                        let err = BilliardError::Escape { iteration: esc.iteration, reason: esc.reason.clone() };
                        cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, skip_reason(&err).into()]);
                        table.push(cells);
                    }
                }
                chart.dots(&dots, color(index), 1.0, Some(&format!("n={n} ε={e} r₀={radius:e}")));
                let escapes: Vec<_> = c.escapes().collect();
                summary.push(json!({
                    "index": index, "n": n, "epsilon": e, "radius": radius,
                    "center": {"s": c.center.s, "r": c.center.r},
                    "max_excursion": c.max_excursion,
                    "excursion_ratio": if radius > 0.0 { Some(c.max_excursion / radius) } else { None },
                    "escapes": escapes,
                }));
            }
            Err(err) => {
                let mut cells = head();
                cells.extend(std::iter::repeat_n(Cell::Empty, 6));
                cells.push(skip_reason(err).into());
                table.push(cells);
                summary.push(json!({"index": index, "n": n, "epsilon": e, "radius": radius, "skip_reason": skip_reason(err)}));
            }
        }
    }
    table.summary = json!({ "rows": table.rows.len(), "iterations": iterations, "seed": spec.seed, "angles": angles, "clouds": summary });
    Output { table, svg: Some(chart.render()) }
}

// -------------------------------------------------------------------- lemma

fn lemma(spec: &ScanSpec) -> Output {
    let xs = spec.x.clone().unwrap_or_default();
    let values: Vec<f64> = xs.par_iter().map(|&x| lemma_f(x)).collect();
    let mut table = Table::new(&["index", "x", "f", "two_pi_minus_f", "max_k", "skip_reason"]);
    for (i, (&x, &f)) in xs.iter().zip(&values).enumerate() {
        let (fc, gap, max_k, reason) = if x >= 2.0 {
            // largest integer strictly below f
            (f.into(), (TAU - f).into(), ((f.ceil() - 1.0).max(0.0) as u32).into(), Cell::Empty)
        } else {
            (Cell::Empty, Cell::Empty, Cell::Empty, skip_reason(&BilliardError::Domain(format!("x must be at least 2, got {x}"))).into())
        };
        table.push(vec![i.into(), x.into(), fc, gap, max_k, reason]);
    }
    let sampled: Vec<(f64, f64)> = xs.iter().copied().zip(values.iter().copied()).filter(|&(x, _)| x >= 2.0).collect();
    let mut sorted = sampled.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = sorted.windows(2).all(|w| w[1].0 == w[0].0 || w[1].1 > w[0].1);
    let sup = sampled.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let table_k: Vec<_> = spec.ks().iter().map(|&k| json!({"k": k, "n_k": min_period_for_k(k)})).collect();
    table.summary = json!({
        "rows": table.rows.len(),
        "monotone": monotone,
        "sup_f": if sup.is_finite() { Some(sup) } else { None },
        "below_two_pi": sampled.iter().all(|p| p.1 < TAU),
        "two_pi": TAU,
        "n_k": table_k,
    });

    let mut chart = Chart::new("Lemma function f(x) = (x/π)·arctan(2x sin²(π/x))", "x", "f(x)").log_x();
    chart.line(&sorted, color(0), Some("f"));
    if let (Some(a), Some(b)) = (sorted.first(), sorted.last()) {
        chart.dashed(&[(a.0, TAU), (b.0, TAU)], color(1), Some("2π"));
        for &k in spec.ks() {
            if let Some(n) = min_period_for_k(k) {
                chart.dots(&[(n as f64, lemma_f(n as f64))], color(2), 3.5, None);
                chart.label((n as f64, lemma_f(n as f64)), &format!("k={k}: n={n}"), color(2));
            }
        }
    }
    Output { table, svg: Some(chart.render()) }
}
