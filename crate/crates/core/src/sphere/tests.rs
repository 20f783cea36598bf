use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog::{make_quadric, make_revolution, Profile, Quadric, QuadricChart, QuadricSpec, RevolutionSpec};
use crate::flow::{falpha_leaf, integrate, integrate_flow, Darboux, DarbouxState, Geodesic, IntegratorParams, Trajectory};

fn ellipsoid() -> Quadric {
    make_quadric(QuadricSpec::ellipsoid(3.0, 2.0, 1.0).unwrap().with_chart(QuadricChart::Angular)).unwrap()
}

fn lv(x: [f64; 5]) -> LorentzVector {
    LorentzVector::new(x)
}

#[test]
fn causal_types() {
    let cases = [
        ([1.0, 1.0, 0.0, 0.0, 0.0], 0.0, Causal::LightLike),
        ([1.0, 0.0, 0.0, 0.0, 0.0], -1.0, Causal::TimeLike),
        ([0.0, 1.0, 0.0, 0.0, 0.0], 1.0, Causal::SpaceLike),
    ];
    for (x, q, kind) in cases {
        assert_eq!(lorentz_form(&lv(x)), q);
        assert_eq!(classify(&lv(x)), kind);
    }
    assert_eq!(Causal::LightLike.to_string(), "light-like");
}

#[test]
fn lift_examples() {
    let m = lift_point(&Vec3::zeros());
    assert_eq!(m, lv([0.5, 0.0, 0.0, 0.0, -0.5]));
    assert_eq!(m.form(), 0.0);
    let x = Vec3::new(1.0, 0.0, 0.0);
    let n = lift_normal(&x, &x).unwrap();
    assert_eq!(n, lv([1.0, 1.0, 0.0, 0.0, 1.0]));
    assert_eq!(n.form(), 1.0);
    assert!(matches!(lift_normal(&x, &(2.0 * x)), Err(Error::InvalidParameters(_))));
    assert!(SpherePoint::new(m).is_err());
}

fn unit(v: [f64; 3]) -> Option<Vec3> {
    let w = Vec3::from(v);
    (w.norm() > 1e-3).then(|| w.normalize())
}

proptest! {
    #[test]
    fn lift_relations(x in prop::array::uniform3(-5.0..5.0f64), nu in prop::array::uniform3(-1.0..1.0f64), k in -4.0..4.0f64) {
        let Some(nu) = unit(nu) else { return Ok(()) };
        let x = Vec3::from(x);
        let m = lift_point(&x);
        let n = lift_normal(&x, &nu).unwrap();
        let scale = 1.0 + x.norm_squared();
        prop_assert!(m.form().abs() < 1e-14 * scale * scale);
        prop_assert!((n.form() - 1.0).abs() < 1e-14 * scale);
        prop_assert!(m.dot(&n).abs() < 1e-14 * scale * scale);
        let p = SpherePoint::from_contact(k, m, n).unwrap();
        prop_assert!((p.sigma.form() - 1.0).abs() < 1e-12 * scale * scale);
    }

    #[test]
    fn polarization(a in prop::array::uniform5(-3.0..3.0f64), b in prop::array::uniform5(-3.0..3.0f64)) {
        let (a, b) = (lv(a), lv(b));
        let polar = 0.25 * ((a + b).form() - (a - b).form());
        prop_assert!((polar - a.dot(&b)).abs() < 1e-13 * (1.0 + a.euclid_norm() * b.euclid_norm()));
    }
}

#[test]
fn membership_matches_center_and_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let center = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let radius: f64 = rng.gen_range(0.2..4.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sigma = lift_sphere(&center, sign / radius).unwrap();
        assert!((sigma.form() - 1.0).abs() < 1e-9);
        let Sphere::Round { center: c, radius: r, curvature } = sphere_of(&sigma) else { panic!("plane") };
        assert!((Vec3::from(c) - center).norm() < 1e-9);
        assert!((r - radius).abs() < 1e-9);
        assert_eq!(curvature.signum(), sign);
        for _ in 0..5 {
            let dir = unit([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).unwrap();
            let on = center + radius * dir;
            let off = center + radius * rng.gen_range(1.1..2.0) * dir;
            assert!(lift_point(&on).dot(&sigma).abs() < 1e-9 * (1.0 + on.norm_squared()));
            let l_off = lift_point(&off).dot(&sigma);
            // L(lift(y), sigma) = -kappa (|y - c|^2 - R^2) / 2
            let classical = -0.5 * (sign / radius) * ((off - center).norm_squared() - radius * radius);
            assert!((l_off - classical).abs() < 1e-9 * (1.0 + off.norm_squared()));
            assert!(sphere_of(&sigma).defect(&on).abs() < 1e-9);
        }
    }
    let plane = lift_plane(&Vec3::new(0.0, 0.0, 1.0), 2.0).unwrap();
    assert_eq!(sphere_of(&plane), Sphere::Plane { normal: [0.0, 0.0, 1.0], offset: 2.0 });
    assert!(lift_point(&Vec3::new(5.0, -1.0, 2.0)).dot(&plane).abs() < 1e-14);
}

#[test]
fn vm_map_osculating_spheres() {
    let q = ellipsoid();
    let (u, v) = (2.0, 2.0);
    let jet = q.jet(u, v).unwrap();
    let x = q.position(u, v).unwrap();
    let nu = q.normal(u, v).unwrap();
    for (alpha, k) in [(0.0, jet.k1), (FRAC_PI_2, jet.k2)] {
        let p = vm_map(&q, u, v, alpha).unwrap();
        assert!((p.sigma.form() - 1.0).abs() < 1e-12);
        let c = p.contact.unwrap();
        assert!((c.k - k).abs() < 1e-14);
        let Sphere::Round { center, radius, .. } = p.sphere() else { panic!() };
        assert!((Vec3::from(center) - (x + nu / k)).norm() < 1e-9);
        assert!((radius - 1.0 / k.abs()).abs() < 1e-9);
    }
    // the alpha sweep moves sigma along the light ray of m
    let m = lift_point(&x);
    let s0 = vm_map(&q, u, v, 0.3).unwrap().sigma;
    for a in [0.7, 1.2, 2.5] {
        let d = vm_map(&q, u, v, a).unwrap().sigma - s0;
        let lambda = d.0.iter().zip(m.0).map(|(a, b)| a * b).sum::<f64>() / m.euclid_norm().powi(2);
        assert!((d - lambda * m).euclid_norm() < 1e-12 * (1.0 + d.euclid_norm()));
        assert!(d.classify() == Causal::LightLike);
    }
}

#[test]
fn sphere_sections_cut_at_the_euler_angle() {
    let q = ellipsoid();
    let (u, v) = (2.0, 2.0);
    let jet = q.jet(u, v).unwrap();
    for beta in [0.3f64, 0.6, 1.1] {
        let k = jet.k1 * beta.cos().powi(2) + jet.k2 * beta.sin().powi(2);
        let dirs = section_directions(&q, u, v, k, 1e-4).unwrap();
        assert_eq!(dirs.len(), 2, "{dirs:?}");
        assert!((dirs[0] - beta).abs() < 1e-3, "{dirs:?} {beta}");
        assert!((dirs[1] - (PI - beta)).abs() < 1e-3, "{dirs:?} {beta}");
    }
}

#[test]
fn jacobian_ranks() {
    let q = ellipsoid();
    let r = vm_jacobian_rank(&q, 2.0, 2.0, 0.6).unwrap();
    assert_eq!(r.rank, 3, "{:?}", r.singular_values);
    // u = pi is a plane section and a P1 ridge
    let ridge = boundary_jacobian_rank(&q, PI, 2.0, Foliation::P1).unwrap();
    assert_eq!(ridge.rank, 1, "{:?}", ridge.singular_values);
    let regular = boundary_jacobian_rank(&q, 2.0, 2.0, Foliation::P1).unwrap();
    assert_eq!(regular.rank, 2, "{:?}", regular.singular_values);
    // the full map folds along alpha = 0
    assert_eq!(vm_jacobian_rank(&q, 2.0, 2.0, 0.0).unwrap().rank, 2);
}

#[test]
fn angles_between_spheres() {
    let q = ellipsoid();
    let s = vm_map(&q, 2.0, 2.0, 0.4).unwrap();
    assert_eq!(sphere_angle(&s, &s).unwrap(), 0.0);
    let p1 = SpherePoint::new(lift_plane(&Vec3::new(1.0, 0.0, 0.0), 0.0).unwrap()).unwrap();
    let p2 = SpherePoint::new(lift_plane(&Vec3::new(0.0, 1.0, 0.0), 0.0).unwrap()).unwrap();
    assert_eq!(p1.sigma.dot(&p2.sigma), 0.0);
    assert!((sphere_angle(&p1, &p2).unwrap() - FRAC_PI_2).abs() < 1e-15);
    let t = vm_map(&q, 2.0, 2.0, 1.0).unwrap();
    assert!((s.sigma.dot(&t.sigma) - 1.0).abs() < 1e-12);
    assert!(matches!(sphere_angle(&s, &t), Err(Error::TangentSpheres(_))));
    // unit spheres with centers 1 apart meet at 60 degrees
    let a = SpherePoint::new(lift_sphere(&Vec3::zeros(), 1.0).unwrap()).unwrap();
    let b = SpherePoint::new(lift_sphere(&Vec3::new(1.0, 0.0, 0.0), 1.0).unwrap()).unwrap();
    assert!((sphere_angle(&a, &b).unwrap() - PI / 3.0).abs() < 1e-12);
}

fn start() -> (Quadric, DarbouxState) {
    let q = ellipsoid();
    let (u, v) = q.chart_point(2.5, 1.5);
    (q, DarbouxState::new(u, v, 0.4))
}

#[test]
fn cansec_speed_is_geodesic_torsion() {
    let (q, st) = start();
    let p = IntegratorParams { max_arc_length: 4.0, ..IntegratorParams::default() };
    let rev = make_revolution(RevolutionSpec {
        profile: Profile::Sine { base: 2.0, amplitude: 0.3, frequency: 1.0 },
        u_range: (-6.0 * PI, 6.0 * PI),
    })
    .unwrap();
    let trajs: Vec<(&dyn PrincipalSurface, Trajectory)> = vec![
        (&q, integrate(&q, st, &p).unwrap()),
        (&q, falpha_leaf(&q, (st.u, st.v), 0.4, 1.0, &p, &[]).unwrap()),
        (&rev, integrate_flow(&rev, &Geodesic, DarbouxState::new(0.3, 0.0, 0.7), &p, &[], &[]).unwrap()),
    ];
    for (surface, traj) in &trajs {
        let r = cansec_analyze(*surface, traj).unwrap();
        assert!(r.samples.len() > 20, "{} {}", traj.flow, r.samples.len());
        assert!(r.speed_residual_max < 1e-6, "{} {:e}", traj.flow, r.speed_residual_max);
        assert!(r.contact_max < 1e-6, "{} {:e}", traj.flow, r.contact_max);
        for s in &r.samples {
            let scale = 1.0 + s.predicted_t_component.abs();
            assert!((s.t_component - s.predicted_t_component).abs() < 1e-4 * scale, "{} {s:?}", traj.flow);
        }
    }
}

#[test]
fn darboux_sections_are_geodesics() {
    let (q, st) = start();
    let p = IntegratorParams { max_arc_length: 6.0, ..IntegratorParams::default() };
    let traj = integrate(&q, st, &p).unwrap();
    let r = cansec_analyze(&q, &traj).unwrap();
    assert!(r.t_component_max < 1e-5, "{:e}", r.t_component_max);
    assert!(r.kg_form_max < 1e-6, "{:e}", r.kg_form_max);

    let leaf = falpha_leaf(&q, (st.u, st.v), 0.4, 1.0, &p, &[]).unwrap();
    let r = cansec_analyze(&q, &leaf).unwrap();
    assert!(r.t_component_max > 1e-2, "{:e}", r.t_component_max);
}

#[test]
fn cansec_is_the_shortest_section() {
    let (q, st) = start();
    let p = IntegratorParams { max_arc_length: 3.0, ..IntegratorParams::default() };
    let traj = integrate(&q, st, &p).unwrap();
    let mut checked = 0;
    for s in traj.samples.iter().step_by(5) {
        let state = DarbouxState::new(s.state.u, s.state.v, s.alpha_lift);
        let jet = q.jet(state.u, state.v).unwrap();
        let fs = crate::geometry::FrameScalars::from_jet(&jet, state.alpha);
        if fs.tau_g.abs() < 1e-2 * (jet.k1 - jet.k2).abs() {
            continue;
        }
        for dk in [-0.5, 0.2, 1.0] {
            let Some(w) = noncanonical_speed(&q, &Darboux, &state, fs.k_n + dk) else { continue };
            // |sigma'|^2 = (k - k_n)^2 + tau_g^2
            assert!(w > fs.tau_g.abs());
            assert!((w * w - dk * dk - fs.tau_g * fs.tau_g).abs() < 1e-6, "{w} {dk} {}", fs.tau_g);
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn lorentz_csv() {
    let (q, st) = start();
    let p = IntegratorParams { max_arc_length: 1.0, ..IntegratorParams::default() };
    let traj = integrate(&q, st, &p).unwrap();
    let pts = cansec_curve(&q, &traj).unwrap();
    assert_eq!(pts.len(), traj.samples.len());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cansec.csv");
    write_lorentz_csv(&pts, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,x0,x1,x2,x3,x4,lorentz"));
    for line in lines {
        let l: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((l - 1.0).abs() < 1e-10);
    }
}
