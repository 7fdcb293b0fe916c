use std::f64::consts::PI;

use annular_core::dd::Dd;
use annular_core::geometry::{scatterer_pose, ScattererPose, TableParams};
use annular_core::map::{generic_step, in_step, map_in, map_out, out_step, reflection, Disk, PhasePoint, Wall};
use annular_core::real::Real;
use proptest::prelude::*;

fn dd_disk(pose: &ScattererPose) -> Disk<Dd> {
    Disk { cx: Dd::from(pose.center[0]), cy: Dd::from(pose.center[1]), radius: Dd::from(pose.radius) }
}

/// Determinant of the derivative of `f` in `(s, r)` by central differences.
/// Double-double evaluation keeps roundoff negligible even for tiny steps.
fn det_sr(f: impl Fn(Dd, Dd) -> Option<(Dd, Dd)>, s: f64, theta: f64, h: f64) -> Option<f64> {
    let r = Dd::from(theta).cos();
    let s = Dd::from(s);
    let g = |ds: f64, dr: f64| {
        let (s1, t1) = f(s + ds, Real::acos(r + dr))?;
        Some((s1, t1.cos()))
    };
    let (sp, rp) = g(h, 0.0)?;
    let (sm, rm) = g(-h, 0.0)?;
    let (sq, rq) = g(0.0, h)?;
    let (sn, rn) = g(0.0, -h)?;
    let j = [
        [((sp - sm) / (2.0 * h)).value(), ((sq - sn) / (2.0 * h)).value()],
        [((rp - rm) / (2.0 * h)).value(), ((rq - rn) / (2.0 * h)).value()],
    ];
    Some(j[0][0] * j[1][1] - j[0][1] * j[1][0])
}

fn table() -> impl Strategy<Value = TableParams> {
    (3u32..12, 0.0..0.05f64, 0.1..0.9f64).prop_filter_map("admissible table", |(n, delta, frac)| {
        let cap = annular_core::stability::max_admissible_radius(n, 1, delta);
        TableParams::type_a(n, 1, frac * cap, delta).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scatterer_bounces_preserve_area(p in table(), gamma in 0.05..2.0 * PI - 0.05, theta in 0.3..PI - 0.3) {
        // γ stays off the arclength seam at γ = 0, where s jumps by 2πR
        let pose = scatterer_pose(&p).unwrap();
        let disk = dd_disk(&pose);
        let s = PI + pose.radius * (PI - gamma);
        let out = det_sr(|s, t| out_step(s, t, &disk).ok(), s, theta, 1e-10).unwrap();
        prop_assert!((out - 1.0).abs() < 1e-8, "out det {}", out);

        // reversing the outgoing ray aims it back at the scatterer
        let landed = map_out(&PhasePoint::inner(s, theta), &pose).unwrap();
        let back = PhasePoint::outer(landed.s, PI - landed.theta);
        let det_in = det_sr(|s, t| in_step(s, t, &disk).ok(), back.s, back.theta, 1e-10).unwrap();
        prop_assert!((det_in - 1.0).abs() < 1e-8, "in det {}", det_in);
    }

    #[test]
    fn explicit_maps_match_ray_casting(p in table(), gamma in 0.0..2.0 * PI, theta in 0.2..PI - 0.2) {
        let pose = scatterer_pose(&p).unwrap();
        let start = PhasePoint::inner(PI + pose.radius * (PI - gamma), theta);
        let explicit = map_out(&start, &pose).unwrap();
        let cast = generic_step(&start, &pose).unwrap().point;
        prop_assert_eq!(cast.wall, Wall::Outer);
        prop_assert!(explicit.distance(&cast) < 1e-10);

        let back = PhasePoint::outer(explicit.s, PI - explicit.theta);
        let step = generic_step(&back, &pose).unwrap();
        prop_assert_eq!(step.point.wall, Wall::Inner);
        prop_assert!(map_in(&back, &pose).unwrap().distance(&step.point) < 1e-10);
    }

    #[test]
    fn mirror_commutes_with_the_billiard(
        n in 3u32..12,
        frac in 0.1..0.9f64,
        s in -PI..PI,
        theta in 0.05..PI - 0.05,
    ) {
        let cap = annular_core::stability::max_admissible_radius(n, 1, 0.0);
        let p = TableParams::type_a(n, 1, frac * cap, 0.0).unwrap();
        let pose = scatterer_pose(&p).unwrap();
        let z = PhasePoint::outer(s, theta);
        let (Ok(a), Ok(b)) = (generic_step(&z, &pose), generic_step(&reflection(&z), &pose)) else {
            return Ok(());
        };
        prop_assume!(!a.grazing && !b.grazing);
        prop_assert!(reflection(&a.point).distance(&b.point) < 1e-10);
    }

    #[test]
    fn type_b_mirror_symmetry(n in 3u32..10, scale in 0.05..0.5f64, s in -PI..PI, theta in 0.05..PI - 0.05) {
        let eps = scale * annular_core::stability::epsilon_star(n).min(0.05);
        let Ok(p) = TableParams::type_b(n, eps) else { return Ok(()) };
        let pose = scatterer_pose(&p).unwrap();
        let z = PhasePoint::outer(s, theta);
        let (Ok(a), Ok(b)) = (generic_step(&z, &pose), generic_step(&reflection(&z), &pose)) else {
            return Ok(());
        };
        prop_assume!(!a.grazing && !b.grazing);
        prop_assert!(reflection(&a.point).distance(&b.point) < 1e-10);
    }
}
