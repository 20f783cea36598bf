//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed on every run.
//! A criterion that is known to be unattainable as stated prints FAIL with
//! its measurements and does not fail the process; its attainable parts are
//! still required.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use darboux::catalog::{
    make_cone, make_cylinder, make_quadric, make_revolution, ConeSpec, CylinderSpec, Profile, Quadric, QuadricChart,
    QuadricSpec, Revolution, RevolutionSpec, SurfaceRegistry,
};
use darboux::flow::{
    darboux_residual_with, falpha_leaf, integrate, integrate_flow, osculating_contact_residual_with,
    plane_field_integrability, ConstantAngle, CurvatureLine, CurveFlow, Darboux, DarbouxState, Geodesic,
    IntegratorParams, Turning,
};
use darboux::geometry::{Foliation, PrincipalSurface, Vec3};
use darboux::integrals::{conservation_report, IntegralRegistry};
use darboux::numeric::{derivative, refine_root};
use darboux::quadric_dynamics::{
    circular_sections_check, default_section, falpha_rotation, poincare_map, sigma_lengths, PoincareFlow,
};
use darboux::ridge::{
    classify_point, coordinate_plane_catalog, plane_ridge_record, quadric_plane_ridges, ridge_locus,
    ridge_phase_portrait, PortraitOptions,
};
use darboux::sphere::{boundary_jacobian_rank, cansec_analyze, lift_normal, lift_point, SpherePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
    /// Parts that must hold even when the criterion as stated cannot.
    required: bool,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, required: pass }
    }
}

fn angular(spec: QuadricSpec) -> Quadric {
    make_quadric(spec.with_chart(QuadricChart::Angular)).unwrap()
}

fn ellipsoid() -> Quadric {
    angular(QuadricSpec::ellipsoid(3.0, 2.0, 1.0).unwrap())
}

fn sine_revolution() -> Revolution {
    make_revolution(RevolutionSpec {
        profile: Profile::Sine { base: 2.0, amplitude: 0.3, frequency: 1.0 },
        u_range: (-6.0 * PI, 6.0 * PI),
    })
    .unwrap()
}

fn criterion_1() -> Verdict {
    let t0 = Instant::now();
    let q = ellipsoid();
    let [a, b, c] = q.params();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = IntegratorParams { rel_tol: 1e-10, ..IntegratorParams::default() };
    let (mut worst, mut complete) = (0.0f64, 0);
    for _ in 0..20 {
        let (u, v) = (rng.gen_range(b..a), rng.gen_range(c..b));
        let (s, t) = q.chart_point(u, v);
        let start = DarbouxState::new(s, t, rng.gen_range(0.0..PI));
        let traj = integrate(&q, start, &params).unwrap();
        complete += usize::from(traj.arc_length() > 10.0 - 1e-9);
        worst = worst.max(traj.relative_drift("quadric").unwrap());
    }
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        worst < 1e-8 && secs < 10.0 && complete == 20,
        format!("max relative drift of I {worst:.2e} (< 1e-8), {complete}/20 reached arc 10, {secs:.2} s (< 10 s)"),
    )
}

/// Darboux curves among the controls (cyclides): curvature lines on every
/// Dupin cyclide and geodesics on the circular cylinder.
fn control_is_darboux(surface: &str, control: &str) -> bool {
    matches!((surface, control), ("cylinder" | "cone" | "torus", "curvature-line") | ("cylinder", "geodesic"))
}

fn criterion_2() -> Verdict {
    let registry = SurfaceRegistry::builtin();
    let mut literal = true;
    let mut required = true;
    let (mut darboux_max, mut control_min, mut turning_min) = (0.0f64, f64::INFINITY, f64::INFINITY);
    let mut cyclide_controls = Vec::new();
    let params = IntegratorParams::default().with_arc_length(2.0);
    for factory in registry.factories() {
        let mut spec = factory.example();
        if matches!(factory.name(), "ellipsoid" | "one-sheet" | "two-sheet") {
            spec = spec.with_chart(QuadricChart::Angular);
        }
        let surface = registry.build(&spec).unwrap();
        let start = match factory.name() {
            "ellipsoid" => chart_point(&surface, 2.5, 1.5),
            "one-sheet" => chart_point(&surface, 2.5, -2.0),
            "two-sheet" => chart_point(&surface, -1.5, -3.0),
            "cone" => (0.3, 2.0),
            _ => (0.3, 0.2),
        };
        let state = DarbouxState::new(start.0, start.1, 0.7);
        let traj = integrate(surface.as_ref(), state, &params).unwrap();
        let r1 = darboux_residual_with(surface.as_ref(), &Darboux, &traj).unwrap().max;
        let r2 = osculating_contact_residual_with(surface.as_ref(), &Darboux, &traj).unwrap().max;
        darboux_max = darboux_max.max(r1).max(r2);
        for (name, flow) in
            [("geodesic", &Geodesic as &dyn CurveFlow), ("curvature-line", &CurvatureLine), ("turning", &Turning { rate: 0.5 })]
        {
            let traj = integrate_flow(surface.as_ref(), flow, state, &params, &[], &[]).unwrap();
            let r1 = darboux_residual_with(surface.as_ref(), flow, &traj).unwrap().max;
            let r2 = osculating_contact_residual_with(surface.as_ref(), flow, &traj).unwrap().max;
            let r = r1.min(r2);
            if name == "turning" {
                turning_min = turning_min.min(r);
                required &= r > 1e-2;
                continue;
            }
            literal &= r > 1e-2;
            if control_is_darboux(factory.name(), name) {
                cyclide_controls.push(format!("{}/{name} {r:.1e}", factory.name()));
                // these are Darboux curves: both oracles must accept them
                required &= r1.max(r2) < 1e-5;
            } else {
                control_min = control_min.min(r);
                required &= r > 1e-2;
            }
        }
    }
    required &= darboux_max < 1e-5;
    Verdict {
        pass: literal && required,
        required,
        detail: format!(
            "7 surfaces: Darboux residual max {darboux_max:.1e} (< 1e-5); non-Darboux controls min {control_min:.2e} (> 1e-2); \
             turning control min {turning_min:.2e}; controls that are Darboux curves on cyclides: [{}]",
            cyclide_controls.join(", ")
        ),
    }
}

fn chart_point(surface: &std::sync::Arc<dyn PrincipalSurface>, u: f64, v: f64) -> (f64, f64) {
    surface.as_any().downcast_ref::<Quadric>().unwrap().chart_point(u, v)
}

fn criterion_3() -> Verdict {
    let cyl = make_cylinder(CylinderSpec::circular(2.0, (-50.0, 50.0))).unwrap();
    let mut alpha_dev = 0.0f64;
    for a0 in [0.2, 0.7, 1.2, 2.0, -0.9] {
        let traj = integrate(&cyl, DarbouxState::new(0.3, 0.0, a0), &IntegratorParams::default()).unwrap();
        for s in &traj.samples {
            alpha_dev = alpha_dev.max((s.alpha_lift - traj.samples[0].alpha_lift).abs());
        }
    }
    let q = ellipsoid();
    let p = IntegratorParams::default().with_arc_length(3.0);
    let mut leaf_min = f64::INFINITY;
    for (u, v) in [(2.5, 1.5), (2.8, 1.2), (2.2, 1.8)] {
        for sign in [1.0, -1.0] {
            let leaf = falpha_leaf(&q, q.chart_point(u, v), FRAC_PI_4, sign, &p, &[]).unwrap();
            leaf_min = leaf_min.min(osculating_contact_residual_with(&q, &ConstantAngle, &leaf).unwrap().max);
        }
    }
    Verdict::new(
        alpha_dev < 1e-10 && leaf_min >= 1e-2,
        format!("cylinder helices: alpha deviation {alpha_dev:.1e} (< 1e-10); ellipsoid F_pi/4 leaves: contact residual min {leaf_min:.2e} (>= 1e-2)"),
    )
}

fn quadrics() -> [Quadric; 3] {
    [
        ellipsoid(),
        angular(QuadricSpec::one_sheet(3.0, 2.0, -1.0).unwrap()),
        angular(QuadricSpec::two_sheet(3.0, -1.0, -2.0).unwrap()),
    ]
}

fn criterion_4() -> Verdict {
    let t0 = Instant::now();
    let (mut matched, mut total) = (0, 0);
    for q in quadrics() {
        let found = quadric_plane_ridges(&q, 24).unwrap();
        for (f, plane, kind) in coordinate_plane_catalog(q.kind()) {
            total += 1;
            matched += usize::from(found.iter().any(|r| r.foliation == f && r.plane == plane && r.kind == kind));
        }
    }
    let q = ellipsoid();
    let [_, b, c] = q.params();
    let (s, t) = q.chart_point(b, c);
    let vertex = classify_point(&q, s, t, Foliation::P1).unwrap();
    let x = q.position(s, t).unwrap();
    let at_vertex = (x - Vec3::new(3f64.sqrt(), 0.0, 0.0)).norm() < 1e-12;
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        matched == total && (vertex.sigma - 0.75).abs() < 1e-6 && at_vertex && secs < 30.0,
        format!(
            "{matched}/{total} coordinate-plane labels; sigma at the major vertex {:.9} ({:?}), {secs:.2} s (< 30 s)",
            vertex.sigma, vertex.kind
        ),
    )
}

fn criterion_5() -> Verdict {
    let (mut agree, mut total, mut identity) = (0, 0, 0.0f64);
    let mut misses = Vec::new();
    for q in quadrics() {
        for r in quadric_plane_ridges(&q, 24).unwrap() {
            let record = plane_ridge_record(&q, &r).unwrap();
            identity = identity.max((record.eigen_product() + record.sigma / 3.0).abs());
            let portrait = ridge_phase_portrait(&q, &record, 6, &PortraitOptions::default()).unwrap();
            total += 1;
            if portrait.detected == record.kind {
                agree += 1;
            } else {
                misses.push(format!("{} {}", q.kind().name(), r.plane));
            }
        }
    }
    Verdict::new(
        agree == total && identity < 1e-10,
        format!("portraits agree with sigma on {agree}/{total} ridges {misses:?}; max |l2 l3 + sigma/3| {identity:.1e} (< 1e-10)"),
    )
}

fn criterion_6() -> Verdict {
    let rev = sine_revolution();
    let clairaut = IntegralRegistry::builtin().bind("clairaut", &rev).unwrap();
    let (mut drift, mut clairaut_min) = (0.0f64, f64::INFINITY);
    for (u, a) in [(0.3, 0.7), (-1.0, 0.4), (2.0, 1.1), (4.0, -0.6)] {
        let traj = integrate(&rev, DarbouxState::new(u, 0.0, a), &IntegratorParams::default()).unwrap();
        drift = drift.max(traj.relative_drift("revolution").unwrap());
        let report = conservation_report(&rev, &traj, std::slice::from_ref(&clairaut)).unwrap();
        clairaut_min = clairaut_min.min(report.integrals[0].max_rel_drift);
    }
    // ridges of P1 against vertices of the meridian
    let locus = ridge_locus(&rev, Foliation::P1, 4).unwrap();
    let mut roots: Vec<f64> = locus.records.iter().map(|r| r.u).collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let meridian_curvature = |x: f64| {
        let [_, _, r2, ..] = rev.radius_derivatives(x);
        -r2 / rev.chart_factor(x)
    };
    let mut root_gap = 0.0f64;
    for &u in &roots {
        let vertex = refine_root(|x| derivative(meridian_curvature, x, 1e-3), u - 0.1, u + 0.1, 1e-14).unwrap();
        root_gap = root_gap.max((vertex - u).abs());
    }
    // every vertex in the range is a detected ridge
    let (lo, hi) = (-6.0 * PI + 0.5, 6.0 * PI - 0.5);
    let mut vertices = 0;
    let n = 2000;
    for i in 0..n {
        let (x0, x1) = (lo + (hi - lo) * i as f64 / n as f64, lo + (hi - lo) * (i + 1) as f64 / n as f64);
        let g = |x| derivative(meridian_curvature, x, 1e-3);
        if g(x0) * g(x1) < 0.0 {
            vertices += 1;
            let x = refine_root(g, x0, x1, 1e-14).unwrap();
            root_gap = root_gap.max(roots.iter().map(|r| (r - x).abs()).fold(f64::INFINITY, f64::min));
        }
    }
    Verdict::new(
        drift < 1e-8 && root_gap < 1e-8 && clairaut_min > 1e-3 && vertices > 0,
        format!(
            "revolution integral drift {drift:.1e} (< 1e-8); {} ridges vs {vertices} vertices, max root gap {root_gap:.1e} (< 1e-8); \
             Clairaut drift min {clairaut_min:.2e} (> 1e-3)",
            roots.len()
        ),
    )
}

fn criterion_7() -> Verdict {
    let t0 = Instant::now();
    let q = ellipsoid();
    let [a, b, _] = q.params();
    let params = IntegratorParams::default().with_arc_length(1e4);
    let mut diff = 0.0f64;
    for k in 1..=5 {
        let lambda = b + (a - b) * k as f64 / 6.0;
        let quad = sigma_lengths(&q, lambda).unwrap();
        let flow = PoincareFlow::Darboux { lambda, mirror: false };
        let section = default_section(&q, &flow).unwrap();
        let rep = poincare_map(&q, &flow, &section, 0.7, 50, &params).unwrap();
        diff = diff.max((rep.rotation_number - quad.rotation_number.unwrap()).abs());
    }
    let products: Vec<f64> =
        [0.1, 0.3, 0.5, FRAC_PI_4, 1.0, 1.3, 1.5].iter().map(|&al| falpha_rotation(&q, al).unwrap().rho * al.tan()).collect();
    let spread = products.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) - products.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let secs = t0.elapsed().as_secs_f64();
    Verdict::new(
        diff < 1e-4 && spread < 1e-9 && secs < 60.0,
        format!(
            "5 levels in (b, a): max |empirical - L ratio| {diff:.1e} (< 1e-4); rho tan(alpha) = {:.10} spread {spread:.1e} (< 1e-9); {secs:.2} s (< 60 s)",
            products[0]
        ),
    )
}

fn criterion_8() -> Verdict {
    let q = ellipsoid();
    let starts: Vec<(f64, f64)> = [(2.5, 1.2), (2.8, 1.7), (2.2, 1.4), (2.6, 1.9)].iter().map(|&(u, v)| q.chart_point(u, v)).collect();
    let r = circular_sections_check(&q, &starts).unwrap();
    Verdict::new(
        r.passed,
        format!(
            "{} solutions: planarity {:.1e} (< 1e-8), circularity {:.1e} (< 1e-8), normal vs umbilic tangent planes {:.1e} (< 1e-6)",
            r.fits.len(),
            r.planarity_max,
            r.circularity_max,
            r.normal_misalignment_max
        ),
    )
}

fn criterion_9() -> Verdict {
    // lift identities
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut lift = 0.0f64;
    for _ in 0..1000 {
        let x = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let nu = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if nu.norm() < 1e-2 {
            continue;
        }
        let nu = nu.normalize();
        let m = lift_point(&x);
        let n = lift_normal(&x, &nu).unwrap();
        let p = SpherePoint::from_contact(rng.gen_range(-3.0..3.0), m, n).unwrap();
        lift = lift.max(m.form().abs()).max((n.form() - 1.0).abs()).max(m.dot(&n).abs()).max((p.sigma.form() - 1.0).abs());
    }
    // |sigma'| = |tau_g| and the T-component
    let q = ellipsoid();
    let rev = sine_revolution();
    let p = IntegratorParams::default().with_arc_length(5.0);
    let st = q.chart_point(2.5, 1.5);
    let darboux = integrate(&q, DarbouxState::new(st.0, st.1, 0.4), &p).unwrap();
    let leaf = falpha_leaf(&q, st, 0.4, 1.0, &p, &[]).unwrap();
    let geo = integrate_flow(&rev, &Geodesic, DarbouxState::new(0.3, 0.0, 0.7), &p, &[], &[]).unwrap();
    let rev_darboux = integrate(&rev, DarbouxState::new(0.3, 0.0, 0.7), &p).unwrap();
    let reports = [
        cansec_analyze(&q, &darboux).unwrap(),
        cansec_analyze(&rev, &rev_darboux).unwrap(),
        cansec_analyze(&q, &leaf).unwrap(),
        cansec_analyze(&rev, &geo).unwrap(),
    ];
    let speed = reports.iter().map(|r| r.speed_residual_max).fold(0.0, f64::max);
    let t_darboux = reports[0].t_component_max.max(reports[1].t_component_max);
    let t_control = reports[2].t_component_max.min(reports[3].t_component_max);
    // boundary rank on and off detected ridges
    let mut on_ridge = Vec::new();
    for qq in quadrics() {
        for r in quadric_plane_ridges(&qq, 24).unwrap() {
            let rec = plane_ridge_record(&qq, &r).unwrap();
            on_ridge.push(boundary_jacobian_rank(&qq, rec.u, rec.v, rec.foliation).unwrap().rank);
        }
    }
    for rec in ridge_locus(&rev, Foliation::P1, 4).unwrap().records.iter().take(6) {
        on_ridge.push(boundary_jacobian_rank(&rev, rec.u, rec.v, Foliation::P1).unwrap().rank);
    }
    let mut off_ridge = Vec::new();
    for (u, v) in [(2.5, 1.5), (2.8, 1.2), (2.2, 1.8)] {
        let (s, t) = q.chart_point(u, v);
        for f in [Foliation::P1, Foliation::P2] {
            off_ridge.push(boundary_jacobian_rank(&q, s, t, f).unwrap().rank);
        }
    }
    for u in [0.3, 1.0, 2.5] {
        off_ridge.push(boundary_jacobian_rank(&rev, u, 0.0, Foliation::P1).unwrap().rank);
    }
    let ranks_ok = on_ridge.iter().all(|&r| r == 1) && off_ridge.iter().all(|&r| r == 2);
    Verdict::new(
        lift < 1e-12 && speed < 1e-6 && t_darboux < 1e-5 && t_control > 1e-2 && ranks_ok,
        format!(
            "lift identities {lift:.1e} (< 1e-12); ||sigma'| - |tau_g|| {speed:.1e} (< 1e-6); T-component Darboux {t_darboux:.1e} (< 1e-5), \
             controls min {t_control:.2e}; boundary rank on {} ridge points {:?}, off ridges {:?}",
            on_ridge.len(),
            dedup(&on_ridge),
            dedup(&off_ridge)
        ),
    )
}

fn dedup(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn criterion_10() -> Verdict {
    let rev = sine_revolution();
    let cone = make_cone(ConeSpec { beta0: 1.0, eps: 0.05, m: 3.0, v_range: (0.2, 50.0) }).unwrap();
    let cone_rev = make_cone(ConeSpec { beta0: 0.8, eps: 0.0, m: 1.0, v_range: (0.2, 50.0) }).unwrap();
    let cyl = make_cylinder(CylinderSpec { semi_x: 2.0, semi_y: 1.0, v_range: (-5.0, 5.0) }).unwrap();
    let cyl_circ = make_cylinder(CylinderSpec::circular(2.0, (-5.0, 5.0))).unwrap();
    let max_on = |s: &dyn PrincipalSurface, us: &[f64], vs: &[f64]| {
        let mut m = 0.0f64;
        for &u in us {
            for &v in vs {
                let (a, b) = plane_field_integrability(s, u, v).unwrap();
                m = m.max(a.abs()).max(b.abs());
            }
        }
        m
    };
    let us = [-2.5, -1.0, 0.3, 1.7, 2.9];
    let vs = [0.5, 1.0, 3.0];
    let family = [
        max_on(&rev, &us, &[-1.0, 0.0, 2.0]),
        max_on(&cone, &us, &vs),
        max_on(&cone_rev, &us, &vs),
        max_on(&cyl, &us, &[-1.0, 0.0, 2.0]),
        max_on(&cyl_circ, &us, &[-1.0, 0.0, 2.0]),
    ];
    let worst = family.iter().copied().fold(0.0, f64::max);
    let q = ellipsoid();
    let mut ellipsoid_max = 0.0f64;
    for (u, v) in [(2.5, 1.5), (2.8, 1.2), (2.2, 1.8)] {
        let (s, t) = q.chart_point(u, v);
        let (a, b) = plane_field_integrability(&q, s, t).unwrap();
        ellipsoid_max = ellipsoid_max.max(a.abs()).max(b.abs());
    }
    Verdict::new(
        worst < 1e-6 && ellipsoid_max > 1e-6,
        format!(
            "revolution, cones, cylinders max {worst:.1e} (< 1e-6); ellipsoid recorded {ellipsoid_max:.3e} (nonzero)"
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Verdict {
    let tmp = tempfile::TempDir::new().unwrap();
    let configs = [
        (
            "ellipsoid",
            r#"{"surface": {"type": "ellipsoid", "parameters": {"a": 3, "b": 2, "c": 1}}, "seed": 11,
                "trace": {"starts": [[2.5, 1.5, 0.7853981633974483]], "random": 3, "arc_length": 5}}"#,
        ),
        (
            "revolution",
            r#"{"surface": {"type": "revolution"}, "seed": 5, "trace": {"random": 2, "arc_length": 5},
                "cansec": {"start": [0.3, 0.0, 0.7]}}"#,
        ),
        ("one-sheet", r#"{"surface": {"type": "one-sheet", "parameters": {"a": 3, "b": 2, "c": -1}}, "seed": 3}"#),
    ];
    let commands = ["trace", "ridges", "rotation", "regimes", "cansec", "integrability", "catalog"];
    let (mut stable, mut runs, mut files) = (0, 0, 0);
    let mut unstable = Vec::new();
    for (name, text) in configs {
        let cfg = tmp.path().join(format!("{name}.json"));
        fs::write(&cfg, text).unwrap();
        for cmd in commands {
            let out = |tag: &str| {
                let dir = tmp.path().join(format!("{name}_{cmd}_{tag}"));
                let status = Command::new(env!("CARGO_BIN_EXE_darboux"))
                    .args([cmd, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
                    .output()
                    .unwrap()
                    .status;
                (status.code(), if dir.exists() { snapshot(&dir) } else { Vec::new() })
            };
            let (ca, a) = out("a");
            let (cb, b) = out("b");
            runs += 1;
            files += a.len();
            if ca == cb && a == b {
                stable += 1;
            } else {
                unstable.push(format!("{name}/{cmd}"));
            }
        }
    }
    Verdict::new(stable == runs, format!("{stable}/{runs} command runs byte-identical across two runs ({files} files) {unstable:?}"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    // the harness passes libtest flags; only `--list` needs an answer
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [Criterion; 11] = [
        ("conservation", criterion_1),
        ("oracle equivalence", criterion_2),
        ("cyclide characterization", criterion_3),
        ("ridge catalog", criterion_4),
        ("phase portraits", criterion_5),
        ("revolution integrals", criterion_6),
        ("rotation numbers", criterion_7),
        ("circular sections", criterion_8),
        ("Lorentz model", criterion_9),
        ("integrability", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut required_failures = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let v = f();
        println!("criterion {:>2} {}: {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.required {
            required_failures += 1;
        }
    }
    if required_failures > 0 {
        eprintln!("{required_failures} criteria failed");
        std::process::exit(1);
    }
}
