//! Ridges of the principal foliations: location, zigzag / beak-to-beak
//! classification, the graph-jet criterion and the Darboux phase portrait
//! near a ridge.
//!
//! `sigma` is taken with arc-length derivatives along the principal line,
//! `sigma1 = k1_uu / (E (k1 - k2))` at a ridge of P1, which is the quantity
//! the quartic graph normal form computes at unit speed.

mod graph;
mod portrait;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, CurvatureJet, Foliation, Interval, PrincipalSurface};
use crate::numeric::refine_root;

pub use graph::{graph_jet, jet_classify, jet_classify_with, product_criterion, GraphJet, JetClassification};
pub use portrait::{linearization, ridge_phase_portrait, Linearization, OrbitRole, PhasePortrait, PortraitOptions, PortraitOrbit};

/// Half-width of the band of `|sigma|` treated as degenerate.
pub const DEGENERACY_BAND: f64 = 1e-8;
/// Chart tolerance of refined ridge roots.
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RidgeKind {
    Zigzag,
    BeakToBeak,
    Degenerate,
}

impl RidgeKind {
    pub fn of_sigma(sigma: f64) -> Self {
        if sigma.abs() < DEGENERACY_BAND || !sigma.is_finite() {
            RidgeKind::Degenerate
        } else if sigma < 0.0 {
            RidgeKind::Zigzag
        } else {
            RidgeKind::BeakToBeak
        }
    }
}

impl std::fmt::Display for RidgeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RidgeKind::Zigzag => "zigzag",
            RidgeKind::BeakToBeak => "beak-to-beak",
            RidgeKind::Degenerate => "degenerate",
        })
    }
}

/// A complex number `re + i im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// The nonzero pair `+-sqrt(sigma / 3)`.
pub fn eigenpair(sigma: f64) -> [Eigenvalue; 2] {
    let r = (sigma.abs() / 3.0).sqrt();
    if sigma >= 0.0 {
        [Eigenvalue { re: r, im: 0.0 }, Eigenvalue { re: -r, im: 0.0 }]
    } else {
        [Eigenvalue { re: 0.0, im: r }, Eigenvalue { re: 0.0, im: -r }]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeRecord {
    pub u: f64,
    pub v: f64,
    pub foliation: Foliation,
    pub sigma: f64,
    pub kind: RidgeKind,
    pub eigenvalues: [Eigenvalue; 2],
    /// `|k1_u|` (resp. `|k2_v|`) at the refined point.
    pub residual: f64,
}

impl RidgeRecord {
    /// `lambda2 * lambda3`, which equals `-sigma / 3`.
    pub fn eigen_product(&self) -> f64 {
        let [a, b] = self.eigenvalues;
        a.re * b.re - a.im * b.im
    }
}

/// `k1_u` for P1, `k2_v` for P2.
pub fn ridge_function(jet: &CurvatureJet, foliation: Foliation) -> f64 {
    match foliation {
        Foliation::P1 => jet.k1_u,
        Foliation::P2 => jet.k2_v,
    }
}

/// `sigma` at a ridge point, from the jet's second derivative.
pub fn sigma(jet: &CurvatureJet, foliation: Foliation) -> f64 {
    match foliation {
        Foliation::P1 => jet.k1_uu / (jet.metric_e * (jet.k1 - jet.k2)),
        Foliation::P2 => jet.k2_vv / (jet.metric_g * (jet.k2 - jet.k1)),
    }
}

/// Chart tangent of the ridge locus `{k1_u = 0}` (resp. `{k2_v = 0}`),
/// normalized in the chart.
pub fn ridge_tangent(jet: &CurvatureJet, foliation: Foliation) -> [f64; 2] {
    let (fu, fv) = match foliation {
        Foliation::P1 => (jet.k1_uu, jet.k1_uv),
        Foliation::P2 => (jet.k2_uv, jet.k2_vv),
    };
    let n = fu.hypot(fv);
    [-fv / n, fu / n]
}

/// Classifies the ridge at `(u, v)`.
pub fn classify_point(surface: &dyn PrincipalSurface, u: f64, v: f64, foliation: Foliation) -> Result<RidgeRecord> {
    let jet = surface.jet(u, v)?;
    jet.require_non_umbilic(u, v)?;
    let sigma = sigma(&jet, foliation);
    Ok(RidgeRecord {
        u,
        v,
        foliation,
        sigma,
        kind: RidgeKind::of_sigma(sigma),
        eigenvalues: eigenpair(sigma),
        residual: ridge_function(&jet, foliation).abs(),
    })
}

/// Zigzag iff `sigma < 0`, with the eigenvalue pair. Fails inside the
/// degeneracy band.
pub fn classify_sigma(surface: &dyn PrincipalSurface, record: &RidgeRecord) -> Result<(RidgeKind, [Eigenvalue; 2])> {
    let r = classify_point(surface, record.u, record.v, record.foliation)?;
    if r.kind == RidgeKind::Degenerate {
        return Err(Error::DegenerateRidge(r.sigma.abs()));
    }
    Ok((r.kind, r.eigenvalues))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusStatus {
    Regular,
    /// The ridge function vanishes on the whole scanned region.
    IdenticallyCritical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RidgeLocus {
    pub foliation: Foliation,
    pub status: LocusStatus,
    pub records: Vec<RidgeRecord>,
    /// Scan points skipped near umbilics or chart singularities.
    pub skipped: usize,
}

impl RidgeLocus {
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "u,v,foliation,sigma,kind,lambda_sq")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:?},{},{},{}",
                r.u,
                r.v,
                r.foliation,
                r.sigma,
                r.kind,
                r.sigma / 3.0
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Number of coordinate lines scanned.
    pub lines: usize,
    /// Samples per line.
    pub samples: usize,
    /// Region scanned; infinite or periodic coordinates are clipped to one
    /// period or to `[-10, 10]`.
    pub window: Option<ChartDomain>,
}

impl ScanOptions {
    pub fn with_resolution(resolution: usize) -> Self {
        Self { lines: resolution.max(1), samples: 4 * resolution.max(2), window: None }
    }
}

fn scan_range(i: &Interval) -> (f64, f64) {
    match (i.lo.is_finite(), i.hi.is_finite(), i.period) {
        (true, true, _) => {
            let pad = 1e-6 * (i.hi - i.lo);
            (i.lo + pad, i.hi - pad)
        }
        (_, _, Some(p)) => {
            // offset keeps roots at multiples of simple fractions of the
            // period away from the grid
            let shift = 0.012_345_6 * p;
            (shift, shift + p)
        }
        (true, false, _) => (i.lo + 1e-6, i.lo + 20.0),
        (false, true, _) => (i.hi - 20.0, i.hi - 1e-6),
        (false, false, _) => (-10.0, 10.0),
    }
}

/// Scans the ridge function along coordinate lines and refines its sign
/// changes.
pub fn ridge_locus(surface: &dyn PrincipalSurface, foliation: Foliation, resolution: usize) -> Result<RidgeLocus> {
    ridge_locus_with(surface, foliation, &ScanOptions::with_resolution(resolution))
}

pub fn ridge_locus_with(surface: &dyn PrincipalSurface, foliation: Foliation, opts: &ScanOptions) -> Result<RidgeLocus> {
    if opts.lines == 0 || opts.samples < 2 {
        return Err(Error::InvalidParameters("ridge scan needs at least one line and two samples".into()));
    }
    let domain = opts.window.unwrap_or_else(|| surface.domain());
    // `along` is the coordinate the ridge function differentiates
    let (along, across) = match foliation {
        Foliation::P1 => (scan_range(&domain.u), scan_range(&domain.v)),
        Foliation::P2 => (scan_range(&domain.v), scan_range(&domain.u)),
    };
    let point = |a: f64, c: f64| match foliation {
        Foliation::P1 => (a, c),
        Foliation::P2 => (c, a),
    };
    let eval = |a: f64, c: f64| -> Option<(f64, f64)> {
        let (u, v) = point(a, c);
        let jet = surface.jet(u, v).ok()?;
        let gap = jet.umbilic_gap();
        let scale = jet.k1.abs().max(jet.k2.abs()).max(1e-300);
        (gap > 1e-6 * scale).then(|| (ridge_function(&jet, foliation), scale))
    };

    let lines: Vec<f64> = (0..opts.lines)
        .map(|j| across.0 + (across.1 - across.0) * (j as f64 + 0.5) / opts.lines as f64)
        .collect();
    let per_line: Vec<Result<(Vec<RidgeRecord>, usize, bool)>> = lines
        .par_iter()
        .map(|&c| {
            let mut records = Vec::new();
            let mut skipped = 0;
            let mut flat = true;
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..opts.samples {
                let a = along.0 + (along.1 - along.0) * i as f64 / (opts.samples - 1) as f64;
                let Some((f, scale)) = eval(a, c) else {
                    skipped += 1;
                    prev = None;
                    continue;
                };
                if f.abs() > 1e-12 * scale {
                    flat = false;
                }
                if let Some((a0, f0)) = prev {
                    if f0 != 0.0 && f != 0.0 && f0.signum() != f.signum() {
                        let root = refine_root(|x| eval(x, c).map_or(f64::NAN, |e| e.0), a0, a, ROOT_TOL)?;
                        let (u, v) = point(root, c);
                        records.push(classify_point(surface, u, v, foliation)?);
                    }
                }
                prev = Some((a, f));
            }
            Ok((records, skipped, flat))
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = 0;
    let mut flat = true;
    for line in per_line {
        let (r, s, f) = line?;
        records.extend(r);
        skipped += s;
        flat &= f;
    }
    if skipped == opts.lines * opts.samples {
        return Err(Error::Empty("every scan point is umbilic or outside the chart".into()));
    }
    let status = if flat { LocusStatus::IdenticallyCritical } else { LocusStatus::Regular };
    if flat {
        records.clear();
    }
    Ok(RidgeLocus { foliation, status, records, skipped })
}

/// Sign of the quantity `R'(u)` on a surface of revolution with `k2 > k1`:
/// zigzag iff `R' < 0`. `None` when the orientation assumption fails.
pub fn revolution_shortcut(surface: &crate::catalog::Revolution, u: f64) -> Option<RidgeKind> {
    let jet = surface.jet(u, 0.0).ok()?;
    if jet.k2 <= jet.k1 {
        return None;
    }
    let d = crate::numeric::derivative(|x| surface.ridge_function(x), u, 1e-3);
    Some(if d.abs() < DEGENERACY_BAND {
        RidgeKind::Degenerate
    } else if d < 0.0 {
        RidgeKind::Zigzag
    } else {
        RidgeKind::BeakToBeak
    })
}

/// Ridges of a quadric on the chart lines where a confocal coordinate hits
/// a band endpoint, i.e. on the coordinate-plane sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneRidge {
    /// Coordinate plane of the section: `"x=0"`, `"y=0"` or `"z=0"`.
    pub plane: String,
    pub foliation: Foliation,
    /// Confocal value on the line (one of `a`, `b`, `c`).
    pub confocal: f64,
    pub kind: RidgeKind,
    /// `sigma` at the sampled points of the line.
    pub sigmas: Vec<f64>,
}

/// Classifies every coordinate-plane ridge of a quadric in the angular chart,
/// sampling `samples` points along each line away from umbilics.
pub fn quadric_plane_ridges(q: &crate::catalog::Quadric, samples: usize) -> Result<Vec<PlaneRidge>> {
    use crate::catalog::QuadricChart;
    if q.chart() != QuadricChart::Angular {
        return Err(Error::InvalidParameters("coordinate-plane ridges need the angular chart".into()));
    }
    let [a, b, c] = q.params();
    let plane = |p: f64| {
        if p == a {
            "x=0"
        } else if p == b {
            "y=0"
        } else if p == c {
            "z=0"
        } else {
            unreachable!()
        }
    };
    let (u_lines, v_lines) = q.boundary_lines();
    let domain = q.domain();
    let mut out = Vec::new();
    for (foliation, lines, other) in [(Foliation::P1, u_lines, domain.v), (Foliation::P2, v_lines, domain.u)] {
        let (lo, hi) = scan_range(&other);
        for (p, coord) in lines {
            let mut sigmas = Vec::new();
            for i in 0..samples {
                let t = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
                let (u, v) = match foliation {
                    Foliation::P1 => (coord, t),
                    Foliation::P2 => (t, coord),
                };
                match classify_point(q, u, v, foliation) {
                    Ok(r) if r.kind != RidgeKind::Degenerate => {
                        let jet = q.jet(u, v)?;
                        // stay clear of umbilics on the line
                        if jet.umbilic_gap() > 1e-3 * jet.k1.abs().max(jet.k2.abs()) {
                            sigmas.push(r.sigma);
                        }
                    }
                    _ => {}
                }
            }
            let kind = if sigmas.is_empty() {
                RidgeKind::Degenerate
            } else if sigmas.iter().all(|s| *s < 0.0) {
                RidgeKind::Zigzag
            } else if sigmas.iter().all(|s| *s > 0.0) {
                RidgeKind::BeakToBeak
            } else {
                RidgeKind::Degenerate
            };
            out.push(PlaneRidge { plane: plane(p).into(), foliation, confocal: p, kind, sigmas });
        }
    }
    Ok(out)
}

/// Published zigzag/beak-to-beak assignment of the coordinate-plane ridges
/// of a triaxial quadric.
pub fn coordinate_plane_catalog(kind: crate::catalog::QuadricKind) -> Vec<(Foliation, &'static str, RidgeKind)> {
    use crate::catalog::QuadricKind::*;
    use Foliation::*;
    use RidgeKind::*;
    match kind {
        Ellipsoid => vec![(P1, "x=0", Zigzag), (P1, "y=0", BeakToBeak), (P2, "y=0", BeakToBeak), (P2, "z=0", Zigzag)],
        OneSheet => vec![(P1, "x=0", BeakToBeak), (P1, "y=0", Zigzag), (P2, "z=0", Zigzag)],
        TwoSheet => vec![(P1, "y=0", Zigzag), (P1, "z=0", BeakToBeak), (P2, "z=0", BeakToBeak)],
    }
}

/// A classified point of a coordinate-plane ridge, away from umbilics.
pub fn plane_ridge_record(q: &crate::catalog::Quadric, ridge: &PlaneRidge) -> Result<RidgeRecord> {
    let (u_lines, v_lines) = q.boundary_lines();
    let domain = q.domain();
    let (lines, other) = match ridge.foliation {
        Foliation::P1 => (u_lines, domain.v),
        Foliation::P2 => (v_lines, domain.u),
    };
    let coord = lines
        .iter()
        .find(|(p, _)| *p == ridge.confocal)
        .map(|l| l.1)
        .ok_or_else(|| Error::InvalidParameters(format!("no chart line for {}", ridge.plane)))?;
    let (lo, hi) = scan_range(&other);
    for f in [0.3, 0.37, 0.45, 0.55, 0.62, 0.7, 0.2, 0.8] {
        let t = lo + (hi - lo) * f;
        let (u, v) = match ridge.foliation {
            Foliation::P1 => (coord, t),
            Foliation::P2 => (t, coord),
        };
        let Ok(jet) = q.jet(u, v) else { continue };
        if jet.umbilic_gap() <= 1e-2 * jet.k1.abs().max(jet.k2.abs()) {
            continue;
        }
        if let Ok(r) = classify_point(q, u, v, ridge.foliation) {
            if r.kind != RidgeKind::Degenerate {
                return Ok(r);
            }
        }
    }
    Err(Error::DegenerateRidge(0.0))
}
