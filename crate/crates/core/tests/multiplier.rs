use cubioid_core::multiplier::{iterate_series, poly_eval, tpoly, tpoly_roots};
use num_complex::Complex64 as C;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotations(max_q: u64) -> Vec<(u64, u64)> {
    (1..=max_q)
        .flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q)))
        .collect()
}

#[test]
fn coefficient_degrees_are_bounded_at_every_step() {
    for (p, q) in rotations(8) {
        for step in iterate_series(p, q).unwrap() {
            for (n, deg) in step.degrees().into_iter().enumerate() {
                if let Some(d) = deg {
                    assert!(d < n.max(1), "{p}/{q}: z^{n} coefficient has b-degree {d}");
                }
            }
        }
    }
}

#[test]
fn iterate_is_tangent_to_identity() {
    for (p, q) in rotations(8) {
        let last = iterate_series(p, q).unwrap().pop().unwrap();
        let lin = &last.coeffs[1];
        assert!((lin[0] - 1.0).norm() < 1e-12, "{p}/{q}");
        assert!(lin[1..].iter().all(|c| c.norm() < 1e-12));
        for n in 2..=q as usize {
            let scale = 1.0 + last.coeffs[n].iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(
                last.coeffs[n].iter().all(|c| c.norm() < 1e-10 * scale),
                "{p}/{q}: z^{n} coefficient is not zero"
            );
        }
    }
}

#[test]
fn degree_exactness_and_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, q) in rotations(8) {
        let t = tpoly(p, q).unwrap();
        assert_eq!(t.degree() as u64, q);
        assert!(t.coefficients[q as usize].norm() > 1e-8, "{p}/{q}");
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        for _ in 0..20 {
            let b = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let lhs = t.eval(-b);
            let rhs = t.eval(b) * sign;
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + t.eval(b).norm()), "{p}/{q}");
        }
    }
}

#[test]
fn roots_are_roots() {
    for (p, q) in rotations(6) {
        let t = tpoly(p, q).unwrap();
        let roots = tpoly_roots(&t).unwrap();
        assert_eq!(roots.len() as u64, q);
        for r in roots {
            assert!(poly_eval(&t.coefficients, r).norm() < 1e-8 * t.norm().max(1.0));
        }
    }
}
