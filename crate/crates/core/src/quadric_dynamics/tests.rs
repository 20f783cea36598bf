use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;

use super::*;
use crate::catalog::{make_quadric, QuadricChart, QuadricSpec};
use crate::flow::{integrate, DarbouxState, IntegratorParams, Trajectory};
use crate::geometry::ambient_normal_curvature;
use crate::integrals::quadric_integral;
use crate::numeric::integrate_sqrt_ends;

fn quadric(a: f64, b: f64, c: f64, chart: QuadricChart) -> Quadric {
    make_quadric(QuadricSpec::new(a, b, c).unwrap().with_chart(chart)).unwrap()
}

fn ellipsoid() -> Quadric {
    quadric(3.0, 2.0, 1.0, QuadricChart::Angular)
}

fn long() -> IntegratorParams {
    IntegratorParams::default().with_arc_length(1e4)
}

/// Periodic trapezoid rule over `[0, 2 pi]`.
fn trapezoid(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

#[test]
fn directions_at_a_confocal_point() {
    let q = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
    let (u, v, l) = (2.5, 1.5, 1.875);
    let d = implicit_directions(&q, u, v, l).unwrap();
    assert!(d.is_real());
    assert_eq!(d.alphas.len(), 2);
    let expected = (6.0f64 / 3.75).sqrt() / 1.875;
    assert!((d.predicted_normal_curvature - expected).abs() < 1e-14);
    for (i, dir) in d.confocal_directions.iter().enumerate() {
        let res = (v - l) * q.h_poly(u) * dir[1] * dir[1] - (u - l) * q.h_poly(v) * dir[0] * dir[0];
        assert!(res.abs() < 1e-14, "quadratic residual {res}");
        assert!((d.normal_curvatures[i] - expected).abs() < 1e-12);
        let ambient = ambient_normal_curvature(&q, u, v, d.alphas[i]).unwrap();
        assert!((ambient - expected).abs() < 1e-7, "ambient {ambient}");
    }
    // v' -> -v'
    let [p, m] = [d.confocal_directions[0], d.confocal_directions[1]];
    assert!((p[0] - m[0]).abs() < 1e-15 && (p[1] + m[1]).abs() < 1e-15);
}

#[test]
fn outside_the_band_there_are_no_directions() {
    let q = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
    for l in [0.9, 2.7, 3.5] {
        let d = implicit_directions(&q, 2.5, 1.5, l).unwrap();
        assert!(!d.is_real(), "lambda = {l}");
    }
    assert!(matches!(implicit_directions(&q, 2.5, 1.5, 2.5), Err(Error::PrincipalSingularity(_))));
}

#[test]
fn directions_invert_the_level() {
    let q = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
    for (u, v) in [(2.5, 1.5), (2.1, 1.9), (2.9, 1.1)] {
        for l in [1.2, 1.6, 1.95, 2.3, 2.8] {
            let d = implicit_directions(&q, u, v, l).unwrap();
            for a in &d.alphas {
                let i = quadric_integral(&q, &DarbouxState::new(u, v, *a)).unwrap();
                assert!((i - 1.0 / l).abs() < 1e-10 / l);
            }
        }
    }
}

fn darboux_trajectory() -> Trajectory {
    let q = ellipsoid();
    integrate(&q, DarbouxState::new(1.0, 2.0, 0.7), &IntegratorParams::default()).unwrap()
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

#[test]
fn trajectories_are_level_curves() {
    let q = ellipsoid();
    let [a, b, c] = q.params();
    let params = IntegratorParams::default().with_tolerances(1e-12, 1e-14);
    let traj = integrate(&q, DarbouxState::new(1.0, 2.0, 0.7), &params).unwrap();
    let l = 1.0 / quadric_integral(&q, &traj.samples[0].state).unwrap();
    let mut checked = 0;
    for s in &traj.samples {
        let st = s.state;
        let (u, v) = q.confocal(st.u, st.v);
        // the angle is ill-conditioned where dI/da vanishes (turning points)
        let di = (2.0 * st.alpha).sin() * (1.0 / v - 1.0 / u) * l;
        if di.abs() < 1e-2 {
            continue;
        }
        let Ok(d) = implicit_directions(&q, st.u, st.v, l) else { continue };
        assert!(d.is_real());
        let gap = d.alphas.iter().map(|x| angle_gap(*x, st.alpha)).fold(f64::INFINITY, f64::min);
        assert!(gap < 1e-8, "angle gap {gap} at s = {}", s.s);
        let jet = q.jet(st.u, st.v).unwrap();
        let (sn, cs) = st.alpha.sin_cos();
        let kn = jet.k1 * cs * cs + jet.k2 * sn * sn;
        let predicted = (a * b * c).powf(0.25) * (jet.k1 * jet.k2).powf(0.25) / l;
        assert!((kn - predicted).abs() < 1e-8, "k_n {kn} vs {predicted}");
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn rectifying_coordinates_straighten_trajectories() {
    let q = ellipsoid();
    let traj = darboux_trajectory();
    let l = 1.0 / quadric_integral(&q, &traj.samples[0].state).unwrap();
    let near = |axis, t: f64| (q.axis_value(axis, t) - l).abs() < 1e-2;
    let mut checked = 0;
    for w in traj.samples.windows(2) {
        let (p, n) = (w[0].state, w[1].state);
        if near(QuadricAxis::U, p.u) || near(QuadricAxis::U, n.u) || near(QuadricAxis::V, p.v) || near(QuadricAxis::V, n.v) {
            continue;
        }
        let d1 = rectified(&q, QuadricAxis::U, Some(l), p.u, n.u).unwrap();
        let d2 = rectified(&q, QuadricAxis::V, Some(l), p.v, n.v).unwrap();
        if d2.abs() < 1e-6 {
            continue;
        }
        assert!((d1.abs() / d2.abs() - 1.0).abs() < 1e-6, "slope {}", d1 / d2);
        checked += 1;
    }
    assert!(checked > 20, "{checked} intervals");
}

#[test]
fn lengths_are_finite_inside_the_bands() {
    let q = ellipsoid();
    let r = sigma_lengths(&q, 1.5).unwrap();
    assert!(r.l1.is_finite() && r.l2.is_finite());
    assert!(r.l1.value > 0.0 && r.l2.value > 0.0);
    assert_eq!(r.rho, r.l2.value / r.l1.value);
    // lambda -> b from below: recorded, no limit asserted
    let seq: Vec<f64> = [1.9, 1.99, 1.999, 1.9999].iter().map(|l| sigma_lengths(&q, *l).unwrap().l2.value).collect();
    assert!(seq.iter().all(|x| x.is_finite() && *x > 0.0), "{seq:?}");
    for l in [1.0, 3.0] {
        assert!(sigma_lengths(&q, l).is_err());
    }
    assert!(sigma_lengths(&q, 0.5).is_err());
}

#[test]
fn lengths_self_converge() {
    let q = ellipsoid();
    let p = q.params();
    for l in [1.5, 1.9, 2.5] {
        let r = sigma_lengths(&q, l).unwrap();
        for len in [r.l1, r.l2] {
            let (lo, hi) = len.range;
            let fine = integrate_sqrt_ends(
                |w| ((w - l).abs() / p.iter().map(|x| (w - x).abs()).product::<f64>()).sqrt(),
                lo,
                hi,
                1e-12,
            )
            .unwrap();
            assert!((fine.value - len.value).abs() < 1e-9, "{} vs {}", fine.value, len.value);
        }
    }
}

#[test]
fn lengths_match_the_angular_trapezoid() {
    // L1 for c < lambda < b runs over the whole u band, which the angular
    // chart covers once on [0, pi] with a smooth periodic density
    let q = ellipsoid();
    let l = 1.5;
    let r = sigma_lengths(&q, l).unwrap();
    let t = 0.5 * trapezoid(|s| chart_density(&q, QuadricAxis::U, Some(l), s), 256);
    assert!((t - r.l1.value).abs() < 1e-10, "{t} vs {}", r.l1.value);
    let (tu, tv) = falpha_band_integrals(&q).unwrap();
    let tu_oracle = 0.5 * trapezoid(|s| chart_density(&q, QuadricAxis::U, None, s), 256);
    let tv_oracle = 0.5 * trapezoid(|s| chart_density(&q, QuadricAxis::V, None, s), 256);
    assert!((tu.value - tu_oracle).abs() < 1e-10);
    assert!((tv.value - tv_oracle).abs() < 1e-10);
}

#[test]
fn falpha_rotation_structure() {
    let q = ellipsoid();
    let k: Vec<f64> = [0.1, 0.4, FRAC_PI_4, 1.0, 1.5]
        .iter()
        .map(|a| falpha_rotation(&q, *a).unwrap().rho * a.tan())
        .collect();
    for x in &k {
        assert!((x - k[0]).abs() < 1e-9 * k[0]);
    }
    let golden = falpha_rotation(&q, FRAC_PI_4).unwrap().rho;
    assert!((golden - 1.2672979717).abs() < 1e-9, "rho(pi/4) = {golden:.12}");
    let mut prev = 0.0;
    for a in [1e-1, 1e-2, 1e-4, 1e-6] {
        let r = falpha_rotation(&q, a).unwrap().rho;
        assert!(r > prev);
        prev = r;
    }
    assert!(prev > 1e5);
    for a in [0.0, PI / 2.0, -0.1] {
        assert!(falpha_rotation(&q, a).is_err());
    }
}

#[test]
fn falpha_return_map_matches_quadrature() {
    let q = ellipsoid();
    for alpha in [0.3, 0.7] {
        let flow = PoincareFlow::FAlpha { alpha };
        let section = default_section(&q, &flow).unwrap();
        let rep = poincare_map(&q, &flow, &section, 0.4, 50, &long()).unwrap();
        let quad = falpha_rotation(&q, PI / 2.0 - alpha).unwrap().rho;
        assert!((rep.rotation_number - quad).abs() < 1e-4, "{} vs {quad}", rep.rotation_number);
        assert_eq!(rep.crossings.len(), 50);
    }
}

#[test]
fn darboux_return_map_matches_quadrature() {
    let q = ellipsoid();
    for (lambda, start) in [(1.5, 1.0), (2.5, 0.7)] {
        let flow = PoincareFlow::Darboux { lambda, mirror: false };
        let section = default_section(&q, &flow).unwrap();
        let rep = poincare_map(&q, &flow, &section, start, 50, &long()).unwrap();
        let quad = sigma_lengths(&q, lambda).unwrap().rotation_number.unwrap();
        assert!((rep.rotation_number - quad).abs() < 1e-4, "{} vs {quad}", rep.rotation_number);
        let mirror = poincare_map(&q, &PoincareFlow::Darboux { lambda, mirror: true }, &section, start, 50, &long()).unwrap();
        assert!((mirror.rotation_number + rep.rotation_number).abs() < 1e-6);
    }
}

#[test]
fn half_rotation_closes_after_two_returns() {
    let q = ellipsoid();
    let rot = |l: f64| sigma_lengths(&q, l).unwrap().rotation_number.unwrap() - 0.5;
    let (mut lo, mut hi) = (1.5, 1.9);
    assert!(rot(lo) < 0.0 && rot(hi) > 0.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if rot(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let flow = PoincareFlow::Darboux { lambda, mirror: false };
    let section = default_section(&q, &flow).unwrap();
    let rep = poincare_map(&q, &flow, &section, 1.0, 4, &long()).unwrap();
    assert!(rep.return_distances[0] > 1e-1);
    assert!(rep.return_distances[1] < 1e-4, "{:?}", rep.return_distances);
    assert!(rep.return_distances[3] < 1e-4);
}

#[test]
fn crossings_csv() {
    let q = ellipsoid();
    let flow = PoincareFlow::Darboux { lambda: 1.5, mirror: false };
    let section = default_section(&q, &flow).unwrap();
    let rep = poincare_map(&q, &flow, &section, 1.0, 3, &long()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    write_crossings_csv(&rep, &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iterate,coordinate,s");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn sections_need_bounded_bands() {
    let q = ellipsoid();
    for lambda in [0.5, 1.0, 2.0] {
        assert!(default_section(&q, &PoincareFlow::Darboux { lambda, mirror: false }).is_err());
    }
    let confocal = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
    let flow = PoincareFlow::Darboux { lambda: 1.5, mirror: false };
    let section = default_section(&confocal, &flow).unwrap();
    assert!(poincare_map(&confocal, &flow, &section, 1.0, 3, &long()).is_err());
}

#[test]
fn regime_tables() {
    use RegimeLabel::*;
    let e = ellipsoid();
    let cases = [(0.5, NonReal), (1.0, Boundary), (1.5, VBand), (2.0, CircularSections), (2.5, UBand), (3.0, Boundary), (4.0, NonReal)];
    for (l, label) in cases {
        assert_eq!(regime_classify(&e, l).unwrap().label, label, "ellipsoid lambda = {l}");
    }
    let two = quadric(3.0, -1.0, -2.0, QuadricChart::Confocal);
    let cases = [(-3.0, VBand), (-2.0, CircularSections), (-1.5, UBand), (-1.0, Boundary), (0.5, NonReal)];
    for (l, label) in cases {
        let r = regime_classify(&two, l).unwrap();
        assert_eq!(r.label, label, "two-sheet lambda = {l}");
        if label == VBand || label == UBand {
            assert!(!r.bounded);
        }
    }
    let one = quadric(3.0, 2.0, -1.0, QuadricChart::Confocal);
    let cases = [(-3.0, VBand), (-1.0, Boundary), (1.0, NonReal), (2.0, NonReal), (2.5, UBand), (3.0, Boundary), (5.0, Helices)];
    for (l, label) in cases {
        assert_eq!(regime_classify(&one, l).unwrap().label, label, "one-sheet lambda = {l}");
    }
}

#[test]
fn band_ends_are_roots_of_realness() {
    // cos² a crosses 0 or 1 exactly where u or v meets lambda
    let q = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
    let l = 1.5;
    let r = regime_classify(&q, l).unwrap();
    let (vlo, vhi) = r.v_range.unwrap();
    for (v, edge) in [(vhi - 1e-9, 0.0), (vlo + 1e-9, f64::NAN)] {
        let d = implicit_directions(&q, 2.5, v, l).unwrap();
        assert!(d.is_real());
        if edge == 0.0 {
            assert!(d.cos2 < 1e-8);
        }
    }
    let beyond = implicit_directions(&q, 2.5, vhi + 1e-3, l).unwrap();
    assert!(!beyond.is_real());
}

#[test]
fn circular_sections() {
    let q = ellipsoid();
    let rep = circular_sections_check(&q, &[(1.0, 2.0), (2.0, 1.0), (0.5, 0.7)]).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert_eq!(rep.fits.len(), 6);
    assert!(rep.planarity_max < 1e-8);
    assert!(rep.circularity_max < 1e-8);
    assert!(rep.normal_misalignment_max < 1e-6);
}

#[test]
fn one_sheet_helices_are_unbounded() {
    let q = quadric(3.0, 2.0, -1.0, QuadricChart::Angular);
    let (s, t) = q.chart_point(2.5, -2.0);
    let d = implicit_directions(&q, s, t, 5.0).unwrap();
    assert!(d.is_real());
    let params = IntegratorParams::default().with_arc_length(60.0);
    for p in [params, params.reversed()] {
        let traj = integrate(&q, DarbouxState::new(s, t, d.alphas[0]), &p).unwrap();
        let r: Vec<f64> = traj.samples.iter().map(|x| nalgebra::Vector3::from(x.position).norm()).collect();
        let (first, last) = (r[0], *r.last().unwrap());
        assert!(last > 10.0 * first, "|x| {first} -> {last} ({})", traj.termination);
    }
}

#[test]
fn one_sheet_level_b_is_not_real() {
    let q = quadric(3.0, 2.0, -1.0, QuadricChart::Confocal);
    for u in [2.1, 2.5, 2.9] {
        for v in [-1.1, -2.0, -5.0, -50.0] {
            assert!(!implicit_directions(&q, u, v, 2.0).unwrap().is_real());
        }
    }
}

#[test]
fn one_sheet_boundary_levels_are_not_rulings() {
    let q = quadric(3.0, 2.0, -1.0, QuadricChart::Angular);
    let at_a = boundary_lines_check(&q, 3.0).unwrap();
    assert!(at_a.real_points > 0);
    assert!(!at_a.straight);
    assert!(at_a.normal_curvature_min > 1e-2);
    let at_c = boundary_lines_check(&q, -1.0).unwrap();
    assert_eq!(at_c.real_points, 0);
    assert!(boundary_lines_check(&q, 2.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_curvature_identity(u in 2.01f64..2.99, v in 1.01f64..1.99, l in 1.01f64..2.99) {
        let q = quadric(3.0, 2.0, 1.0, QuadricChart::Confocal);
        prop_assume!((l - u).abs() > 1e-3 && (l - v).abs() > 1e-3);
        let d = implicit_directions(&q, u, v, l).unwrap();
        prop_assert_eq!(d.is_real(), (0.0..=1.0).contains(&d.cos2));
        for k in &d.normal_curvatures {
            prop_assert!((k - d.predicted_normal_curvature).abs() < 1e-10);
        }
        for dir in &d.confocal_directions {
            let res = (v - l) * q.h_poly(u) * dir[1] * dir[1] - (u - l) * q.h_poly(v) * dir[0] * dir[0];
            prop_assert!(res.abs() < 1e-12);
        }
    }
}
