//! Subcommands. Each writes its payload files into the output directory
//! and reports whether any trajectory ended at a singularity.

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{Quadric, QuadricChart, QuadricKind, SurfaceRegistry};
use crate::error::{Error, Result};
use crate::flow::{
    integrate_flow, write_csv, DarbouxState, FlowRegistry, IntegratorParams, Termination, Trajectory, TrajectoryMetadata,
};
use crate::geometry::{Foliation, Interval, PrincipalSurface};
use crate::integrals::{conservation_report, monitors_for, IntegralRegistry};
use crate::quadric_dynamics::{
    boundary_lines_check, circular_sections_check, default_section, falpha_band_integrals, falpha_rotation,
    implicit_directions, poincare_map, regime_classify, sigma_lengths, write_crossings_csv, PoincareFlow, RegimeLabel,
};
use crate::ridge::{
    coordinate_plane_catalog, plane_ridge_record, quadric_plane_ridges, ridge_locus, ridge_phase_portrait,
    PortraitOptions, RidgeRecord,
};
use crate::sphere::{cansec_analyze, cansec_curve, write_lorentz_csv};
use crate::flow::plane_field_integrability;

use super::config::{Metadata, RunConfig};

/// Files written and whether a trajectory stopped at a singularity.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub singular: bool,
}

pub(crate) fn is_singular(t: &Termination) -> bool {
    matches!(t, Termination::UmbilicProximity | Termination::SingularLocus | Termination::StepCollapse)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(traj, &mut w)?;
    w.flush()?;
    Ok(())
}

fn build_surface(config: &RunConfig) -> Result<Arc<dyn PrincipalSurface>> {
    SurfaceRegistry::builtin().build(&config.surface)
}

/// The configured quadric, in the angular chart unless a chart is given.
fn build_quadric(config: &RunConfig) -> Result<Quadric> {
    let mut spec = config.surface.clone();
    spec.chart.get_or_insert(QuadricChart::Angular);
    let surface = SurfaceRegistry::builtin().build(&spec)?;
    surface
        .as_any()
        .downcast_ref::<Quadric>()
        .cloned()
        .ok_or_else(|| Error::InvalidParameters(format!("surface type `{}` is not a quadric", spec.kind)))
}

/// A finite window of a chart interval for sampling.
fn window(i: &Interval) -> (f64, f64) {
    match (i.lo.is_finite(), i.hi.is_finite(), i.period) {
        (true, true, _) => {
            let pad = 0.05 * (i.hi - i.lo);
            (i.lo + pad, i.hi - pad)
        }
        (_, _, Some(p)) => (0.0, p),
        (true, false, _) => (i.lo + 0.05, i.lo + 5.0),
        (false, true, _) => (i.hi - 5.0, i.hi - 0.05),
        (false, false, _) => (-5.0, 5.0),
    }
}

#[derive(Serialize)]
struct TraceFile<'a> {
    metadata: Metadata,
    start: [f64; 3],
    partial: bool,
    trajectory: TrajectoryMetadata<'a>,
    drift: Vec<(String, f64)>,
}

pub fn trace(config: &RunConfig, out: &Path, jobs: usize) -> Result<Outcome> {
    let surface = build_surface(config)?;
    let reg = FlowRegistry::builtin();
    let flow = reg.get(&config.trace.flow)?;
    let p = &config.trace;
    let mut starts = p.starts.clone();
    if p.random > 0 {
        let d = surface.domain();
        let ((ulo, uhi), (vlo, vhi)) = (window(&d.u), window(&d.v));
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..p.random {
            starts.push([rng.gen_range(ulo..uhi), rng.gen_range(vlo..vhi), rng.gen_range(0.1..FRAC_PI_2 - 0.1)]);
        }
    }
    if starts.is_empty() {
        return Err(Error::InvalidParameters("trace: no starts (set `trace.starts` or `trace.random`)".into()));
    }
    let mut params = config.integrator().with_arc_length(p.arc_length);
    if p.reverse {
        params = params.reversed();
    }
    let integrals = IntegralRegistry::builtin();
    let runs: Vec<Result<Trajectory>> = pool(jobs)?.install(|| {
        starts
            .par_iter()
            .map(|s| {
                let monitors = monitors_for(surface.as_ref())?;
                integrate_flow(surface.as_ref(), flow, DarbouxState::new(s[0], s[1], s[2]), &params, &monitors, &[])
            })
            .collect()
    });
    let mut outcome = Outcome::default();
    for (i, (start, run)) in starts.iter().zip(runs).enumerate() {
        let traj = run?;
        let singular = is_singular(&traj.termination);
        outcome.singular |= singular;
        let report = conservation_report(surface.as_ref(), &traj, &integrals.applicable(surface.as_ref()))?;
        let csv = out.join(format!("trace_{i:03}.csv"));
        write_trajectory_csv(&csv, &traj)?;
        let mut metadata = Metadata::new("trace", config);
        metadata.terminations.push(traj.termination.to_string());
        let file = TraceFile {
            metadata,
            start: *start,
            partial: singular || report.partial,
            trajectory: TrajectoryMetadata::of(&traj),
            drift: report.integrals.iter().map(|r| (r.integral.clone(), r.max_rel_drift)).collect(),
        };
        let meta = out.join(format!("trace_{i:03}.json"));
        write_json(&meta, &file)?;
        outcome.files.extend([csv, meta]);
    }
    Ok(outcome)
}

fn portrait_row(surface: &dyn PrincipalSurface, record: &RidgeRecord, orbits: usize) -> Value {
    let eigen_product = record.eigen_product();
    let base = json!({
        "u": record.u,
        "v": record.v,
        "foliation": record.foliation,
        "sigma": record.sigma,
        "kind": record.kind,
        "eigen_product": eigen_product,
        "identity_residual": (eigen_product + record.sigma / 3.0).abs(),
    });
    let mut row = base;
    match ridge_phase_portrait(surface, record, orbits, &PortraitOptions::default()) {
        Ok(p) => {
            row["detected"] = json!(p.detected);
            row["agrees"] = json!(p.detected == record.kind);
            row["min_crossing_angle"] = json!(p.min_crossing_angle());
        }
        Err(e) => row["portrait_error"] = json!(e.to_string()),
    }
    row
}

pub fn ridges(config: &RunConfig, out: &Path, jobs: usize) -> Result<Outcome> {
    let p = &config.ridges;
    let surface = build_surface(config)?;
    let quadric = surface.as_any().downcast_ref::<Quadric>().is_some();
    let mut outcome = Outcome::default();
    let payload = if quadric {
        let q = build_quadric(config)?;
        let found = quadric_plane_ridges(&q, p.resolution)?;
        let expected = coordinate_plane_catalog(q.kind());
        let mut matched = 0;
        let mut rows = Vec::new();
        for (f, plane, kind) in &expected {
            let got = found.iter().find(|r| r.foliation == *f && r.plane == *plane);
            let ok = got.is_some_and(|r| r.kind == *kind);
            matched += usize::from(ok);
            rows.push(json!({"plane": plane, "foliation": f, "expected": kind, "found": got.map(|r| r.kind), "agrees": ok}));
        }
        let records: Vec<Option<RidgeRecord>> = found.iter().map(|r| plane_ridge_record(&q, r).ok()).collect();
        let portraits: Vec<Value> = if p.portraits {
            pool(jobs)?.install(|| {
                records
                    .par_iter()
                    .zip(found.par_iter())
                    .map(|(rec, r)| {
                        let mut row = match rec {
                            Some(rec) => portrait_row(&q, rec, p.portrait_orbits),
                            None => json!({"portrait_error": "no regular point on the line"}),
                        };
                        row["plane"] = json!(r.plane);
                        row
                    })
                    .collect()
            })
        } else {
            Vec::new()
        };
        let vertex = if q.kind() == QuadricKind::Ellipsoid {
            // (b, c) in confocal terms: the vertex on the major axis
            let (s, t) = q.chart_point(q.params()[1], q.params()[2]);
            let r = crate::ridge::classify_point(&q, s, t, Foliation::P1)?;
            let x = q.position(s, t)?;
            json!({"chart": [s, t], "position": [x[0], x[1], x[2]], "sigma": r.sigma, "kind": r.kind})
        } else {
            Value::Null
        };
        json!({
            "metadata": Metadata::new("ridges", config),
            "kind": q.kind().name(),
            "plane_ridges": found,
            "catalog": rows,
            "agreement": {"matched": matched, "total": expected.len()},
            "major_vertex": vertex,
            "portraits": portraits,
        })
    } else {
        let mut loci = Vec::new();
        for f in [Foliation::P1, Foliation::P2] {
            let locus = ridge_locus(surface.as_ref(), f, p.resolution)?;
            let csv = out.join(format!("ridges_{}.csv", if f == Foliation::P1 { "p1" } else { "p2" }));
            let mut w = BufWriter::new(File::create(&csv)?);
            locus.write_csv(&mut w)?;
            w.flush()?;
            outcome.files.push(csv);
            let portraits: Vec<Value> = if p.portraits {
                pool(jobs)?.install(|| {
                    locus.records.par_iter().take(8).map(|r| portrait_row(surface.as_ref(), r, p.portrait_orbits)).collect()
                })
            } else {
                Vec::new()
            };
            loci.push(json!({"foliation": f, "status": locus.status, "records": locus.records, "skipped": locus.skipped, "portraits": portraits}));
        }
        json!({"metadata": Metadata::new("ridges", config), "loci": loci})
    };
    let path = out.join("ridges.json");
    write_json(&path, &payload)?;
    outcome.files.push(path);
    Ok(outcome)
}

fn ellipsoid_for(config: &RunConfig, command: &str) -> Result<Quadric> {
    let q = build_quadric(config)?;
    if q.kind() != QuadricKind::Ellipsoid {
        return Err(Error::InvalidParameters(format!("{command}: needs an ellipsoid, got {}", q.kind().name())));
    }
    Ok(q)
}

pub fn rotation(config: &RunConfig, out: &Path, jobs: usize) -> Result<Outcome> {
    let p = &config.rotation;
    let q = ellipsoid_for(config, "rotation")?;
    let [a, b, _] = q.params();
    let params = config.integrator().with_arc_length(1e4);
    let (tu, tv) = falpha_band_integrals(&q)?;
    let mut falpha = Vec::new();
    for &alpha in &p.alphas {
        let r = falpha_rotation(&q, alpha)?;
        let mut row = json!({
            "alpha": alpha,
            "s1": r.l1.value,
            "s2": r.l2.value,
            "rho": r.rho,
            "rho_tan_alpha": r.rho * alpha.tan(),
        });
        if p.falpha_maps {
            let flow = PoincareFlow::FAlpha { alpha: FRAC_PI_2 - alpha };
            let section = default_section(&q, &flow)?;
            let rep = poincare_map(&q, &flow, &section, p.start, p.iterates, &params)?;
            row["empirical"] = json!(rep.rotation_number);
            row["abs_diff"] = json!((rep.rotation_number - r.rho).abs());
        }
        falpha.push(row);
    }
    let lambdas: Vec<f64> = if p.lambdas.is_empty() {
        (1..=5).map(|k| b + (a - b) * k as f64 / 6.0).collect()
    } else {
        p.lambdas.clone()
    };
    let maps: Vec<Result<(Value, crate::quadric_dynamics::PoincareReport)>> = pool(jobs)?.install(|| {
        lambdas
            .par_iter()
            .map(|&lambda| {
                let regime = regime_classify(&q, lambda)?;
                let quad = sigma_lengths(&q, lambda)?;
                let flow = PoincareFlow::Darboux { lambda, mirror: false };
                let section = default_section(&q, &flow)?;
                let rep = poincare_map(&q, &flow, &section, p.start, p.iterates, &params)?;
                let rot = quad.rotation_number.unwrap_or(f64::NAN);
                let row = json!({
                    "lambda": lambda,
                    "regime": regime.label,
                    "case": regime.case,
                    "l1": quad.l1.value,
                    "l2": quad.l2.value,
                    "quadrature_error": quad.l1.error + quad.l2.error,
                    "rho": quad.rho,
                    "rotation_number": rot,
                    "section": section,
                    "empirical": rep.rotation_number,
                    "raw_empirical": rep.raw_rotation_number,
                    "abs_diff": (rep.rotation_number - rot).abs(),
                    "periodic_after": rep.periodic_after,
                    "closest_return": rep.return_distances.iter().copied().fold(f64::INFINITY, f64::min),
                });
                Ok((row, rep))
            })
            .collect()
    });
    let mut outcome = Outcome::default();
    let mut rows = Vec::new();
    for (i, m) in maps.into_iter().enumerate() {
        let (mut row, rep) = m.map_err(|e| Error::InvalidParameters(format!("rotation lambda = {}: {e}", lambdas[i])))?;
        let csv = out.join(format!("rotation_lambda_{i:02}.csv"));
        write_crossings_csv(&rep, &csv)?;
        row["crossings"] = json!(csv.file_name().and_then(|s| s.to_str()));
        outcome.files.push(csv);
        rows.push(row);
    }
    let payload = json!({
        "metadata": Metadata::new("rotation", config),
        "falpha": {"tu": tu.value, "tv": tv.value, "rows": falpha},
        "darboux": rows,
    });
    let path = out.join("rotation.json");
    write_json(&path, &payload)?;
    outcome.files.push(path);
    Ok(outcome)
}

/// One representative level per case of the classification.
fn representative_levels(q: &Quadric) -> Vec<f64> {
    let [a, b, c] = q.params();
    let mut out = vec![c - 0.5 * (b - c), c, 0.5 * (b + c), b, 0.5 * (a + b), a, a + (a - b)];
    out.retain(|l| *l != 0.0);
    out
}

pub fn regimes(config: &RunConfig, out: &Path, jobs: usize) -> Result<Outcome> {
    let p = &config.regimes;
    let q = build_quadric(config)?;
    let lambdas = if p.lambdas.is_empty() { representative_levels(&q) } else { p.lambdas.clone() };
    let params = config.integrator().with_arc_length(p.arc_length);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut outcome = Outcome::default();
    let mut entries = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let regime = regime_classify(&q, lambda)?;
        let mut entry = json!({"regime": regime});
        let mut starts = Vec::new();
        if let (Some(ur), Some(vr)) = (regime.u_range, regime.v_range) {
            let clip = |(lo, hi): (f64, f64)| -> (f64, f64) {
                let (lo, hi) = (lo.max(hi - 10.0), hi.min(lo + 10.0));
                let pad = 0.05 * (hi - lo);
                (lo + pad, hi - pad)
            };
            let (ur, vr) = (clip(ur), clip(vr));
            let mut tries = if ur.0 < ur.1 && vr.0 < vr.1 { 0 } else { usize::MAX };
            while starts.len() < p.trajectories && tries < 100 * p.trajectories {
                tries = tries.saturating_add(1);
                let (u, v) = (rng.gen_range(ur.0..ur.1), rng.gen_range(vr.0..vr.1));
                let (s, t) = q.chart_point(u, v);
                if let Ok(d) = implicit_directions(&q, s, t, lambda) {
                    if d.is_real() {
                        starts.push(DarbouxState::new(s, t, d.alphas[0]));
                    }
                }
            }
        }
        if regime.label == RegimeLabel::CircularSections && q.kind() == QuadricKind::Ellipsoid && !starts.is_empty() {
            let pts: Vec<(f64, f64)> = starts.iter().map(|s| (s.u, s.v)).collect();
            entry["circles"] = serde_json::to_value(circular_sections_check(&q, &pts)?)?;
        }
        if regime.label == RegimeLabel::Boundary && q.kind() == QuadricKind::OneSheet {
            entry["boundary"] = serde_json::to_value(boundary_lines_check(&q, lambda)?)?;
        }
        let darboux = FlowRegistry::builtin();
        let flow = darboux.get("darboux")?;
        let runs: Vec<Result<Trajectory>> = pool(jobs)?.install(|| {
            starts.par_iter().map(|s| integrate_flow(&q, flow, *s, &params, &[], &[])).collect()
        });
        let mut trajs = Vec::new();
        for (j, run) in runs.into_iter().enumerate() {
            let traj = run?;
            let csv = out.join(format!("regimes_{i:02}_{j:02}.csv"));
            write_trajectory_csv(&csv, &traj)?;
            let radius = traj.samples.iter().map(|s| nalgebra::Vector3::from(s.position).norm()).fold(0.0, f64::max);
            trajs.push(json!({
                "start": starts[j],
                "file": csv.file_name().and_then(|s| s.to_str()),
                "termination": traj.termination.to_string(),
                "arc_length": traj.arc_length(),
                "max_radius": radius,
            }));
            outcome.files.push(csv);
        }
        entry["trajectories"] = json!(trajs);
        entries.push(entry);
    }
    let payload = json!({
        "metadata": Metadata::new("regimes", config),
        "kind": q.kind().name(),
        "levels": entries,
    });
    let path = out.join("regimes.json");
    write_json(&path, &payload)?;
    outcome.files.push(path);
    Ok(outcome)
}

pub fn cansec(config: &RunConfig, out: &Path) -> Result<Outcome> {
    let p = &config.cansec;
    let surface = build_surface(config)?;
    let reg = FlowRegistry::builtin();
    let flow = reg.get(&p.flow)?;
    let params: IntegratorParams = config.integrator().with_arc_length(p.arc_length);
    let traj = integrate_flow(surface.as_ref(), flow, DarbouxState::new(p.start[0], p.start[1], p.start[2]), &params, &[], &[])?;
    let report = cansec_analyze(surface.as_ref(), &traj)?;
    let curve = cansec_curve(surface.as_ref(), &traj)?;
    let csv = out.join("cansec.csv");
    write_lorentz_csv(&curve, &csv)?;
    let mut metadata = Metadata::new("cansec", config);
    metadata.terminations.push(traj.termination.to_string());
    let path = out.join("cansec.json");
    write_json(&path, &json!({"metadata": metadata, "flow": p.flow, "report": report}))?;
    Ok(Outcome { files: vec![csv, path], singular: is_singular(&traj.termination) })
}

pub fn integrability(config: &RunConfig, out: &Path) -> Result<Outcome> {
    let n = config.integrability.resolution.max(1);
    let surface = build_surface(config)?;
    let d = surface.domain();
    let ((ulo, uhi), (vlo, vhi)) = (window(&d.u), window(&d.v));
    let mut points = Vec::new();
    let mut skipped = 0;
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let u = ulo + (uhi - ulo) * (i as f64 + 0.5) / n as f64;
            let v = vlo + (vhi - vlo) * (j as f64 + 0.5) / n as f64;
            match plane_field_integrability(surface.as_ref(), u, v) {
                Ok((r1, r2)) => {
                    max = max.max(r1.abs()).max(r2.abs());
                    points.push(json!({"u": u, "v": v, "r1": r1, "r2": r2}));
                }
                Err(_) => skipped += 1,
            }
        }
    }
    let path = out.join("integrability.json");
    write_json(
        &path,
        &json!({"metadata": Metadata::new("integrability", config), "max_abs": max, "skipped": skipped, "points": points}),
    )?;
    Ok(Outcome { files: vec![path], singular: false })
}

/// Built-in surfaces, flows and first integrals.
pub fn catalog_listing() -> Value {
    let surfaces: Vec<Value> = SurfaceRegistry::builtin()
        .factories()
        .map(|f| json!({"name": f.name(), "summary": f.summary(), "example": f.example()}))
        .collect();
    let flows: Vec<Value> = FlowRegistry::builtin().flows().map(|f| json!({"name": f.name(), "summary": f.summary()})).collect();
    let integrals: Vec<&str> = IntegralRegistry::builtin().names().collect();
    json!({"surfaces": surfaces, "flows": flows, "integrals": integrals})
}
