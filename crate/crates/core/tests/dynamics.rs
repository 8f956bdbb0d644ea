use cubioid_core::config::Config;
use cubioid_core::dynamics::{
    bottcher, cycle_multiplier, green, landing_point, trace_dynamic_ray, CubicMap, Landing,
    RayTrace,
};
use cubioid_core::{Angle, Degree};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn samples() -> [CubicMap; 3] {
    [
        CubicMap::new(c(0.5, 0.0), c(0.0, 0.0)),
        CubicMap::new(C::from_polar(1.0, std::f64::consts::TAU / 3.0), c(0.3, 0.2)),
        CubicMap::new(c(-0.2, 0.4), c(1.0, -0.5)),
    ]
}

fn node(trace: &RayTrace, s: f64) -> Option<C> {
    let i = trace.levels.iter().position(|&x| (x - s).abs() < 1e-12)?;
    Some(trace.points[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bottcher_conjugates_to_cubing(
        lr in 0.0f64..1.0, la in 0.0f64..1.0,
        br in -2.0f64..2.0, bi in -2.0f64..2.0,
        zr in 1.5f64..20.0, za in 0.0f64..1.0,
    ) {
        let cfg = Config::default();
        let f = CubicMap::new(C::from_polar(lr, std::f64::consts::TAU * la), c(br, bi));
        let z = C::from_polar(zr + c(br, bi).norm(), std::f64::consts::TAU * za);
        let phi = bottcher(&f, z, &cfg).unwrap();
        let phi_img = bottcher(&f, f.eval(z), &cfg).unwrap();
        let cube = phi * phi * phi;
        prop_assert!((phi_img - cube).norm() <= 1e-9 * cube.norm());
        let g = green(&f, z, &cfg).unwrap();
        prop_assert!((g - phi.norm().ln()).abs() < 1e-9 * g.abs().max(1.0));
    }
}

#[test]
fn rays_have_constant_argument() {
    let cfg = Config::default();
    for f in samples() {
        for k in 0..6 {
            let theta = Angle::frac(2 * k + 1, 13);
            let r = trace_dynamic_ray(&f, &theta, 8, cfg.steps_per_level, &cfg).unwrap();
            for z in r.points.iter().step_by(7) {
                let phi = bottcher(&f, *z, &cfg).unwrap();
                let turns = (phi.arg() / std::f64::consts::TAU - theta.to_f64()).rem_euclid(1.0);
                let err = turns.min(1.0 - turns) * std::f64::consts::TAU;
                assert!(err < 1e-8, "arg error {err:e} on ray {theta}");
            }
        }
    }
}

#[test]
fn rays_are_equivariant() {
    let cfg = Config::default();
    for f in samples() {
        for k in 0..12 {
            let theta = Angle::frac(k, 12).shift(1, 29);
            let image = theta.times(3);
            let a = trace_dynamic_ray(&f, &theta, 8, cfg.steps_per_level, &cfg).unwrap();
            let b = trace_dynamic_ray(&f, &image, 8, cfg.steps_per_level, &cfg).unwrap();
            let mut compared = 0;
            for (s, z) in a.levels.iter().zip(&a.points) {
                if let Some(w) = (*s >= 1.0).then(|| node(&b, s - 1.0)).flatten() {
                    assert!((f.eval(*z) - w).norm() < 1e-7, "θ = {theta}, level {s}");
                    compared += 1;
                }
            }
            assert!(compared > 40);
        }
    }
}

#[test]
fn half_turn_symmetry_of_rays() {
    let cfg = Config::default();
    let lambda = c(0.4, 0.3);
    let b = c(0.7, -0.9);
    let f = CubicMap::new(lambda, b);
    let g = CubicMap::new(lambda, -b);
    for k in 0..5 {
        let theta = Angle::frac(k, 5).shift(1, 17);
        let r = trace_dynamic_ray(&f, &theta, 6, cfg.steps_per_level, &cfg).unwrap();
        let s = trace_dynamic_ray(&g, &theta.shift(1, 2), 6, cfg.steps_per_level, &cfg).unwrap();
        assert_eq!(r.levels, s.levels);
        for (z, w) in r.points.iter().zip(&s.points) {
            assert!((z + w).norm() < 1e-9 * z.norm().max(1.0), "{z} vs {w}");
        }
    }
}

#[test]
fn periodic_rays_land_on_periodic_points() {
    let cfg = Config::default();
    let f = CubicMap::new(c(0.5, 0.0), c(0.3, 0.1));
    for theta in [Angle::frac(1, 8), Angle::frac(1, 4), Angle::frac(3, 26)] {
        let p = theta.orbit_type(Degree::Three).period;
        match landing_point(&f, &theta, &cfg).unwrap() {
            Landing::Landed(z) => {
                assert!((f.iterate(z, p) - z).norm() < 1e-6);
                assert!(cycle_multiplier(&f, z, p).norm() > 1.0);
            }
            l => panic!("{theta}: {l:?}"),
        }
    }
}
