use std::sync::OnceLock;

use cubioid_core::angle::sigma;
use cubioid_core::q_atlas::{enumerate_holes, QAtlas, QHole};
use cubioid_core::quad_gaps::{classify, major_of_in, GapType, QuadGap};
use cubioid_core::{Angle, Degree};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

const D3: Degree = Degree::Three;

fn atlas() -> &'static QAtlas {
    static ATLAS: OnceLock<QAtlas> = OnceLock::new();
    ATLAS.get_or_init(|| enumerate_holes(8).unwrap())
}

fn rational() -> impl Strategy<Value = Angle> {
    (1u64..=400).prop_flat_map(|d| (0..d).prop_map(move |n| Angle::new(n, d).unwrap()))
}

/// Integer-only classification of `n/d` (numerators of `θ+1/3`, `θ+2/3` over `3d`).
fn brute_classify(n: u64, d: u64) -> GapType {
    let m = 3 * d;
    let e1 = (3 * n + d) % m;
    let e2 = (3 * n + 2 * d) % m;
    let periodic = |x: u64| {
        let mut y = x * 3 % m;
        for _ in 0..m {
            if y == x {
                return true;
            }
            y = y * 3 % m;
        }
        false
    };
    if periodic(e1) || periodic(e2) {
        return GapType::Caterpillar;
    }
    // [θ+2/3, θ+1/3] is the set of x with (x − e2) mod m ≤ 2d.
    let in_long = |x: u64| (x + m - e2) % m <= 2 * d;
    let stays = |x: u64| {
        let mut y = x;
        for _ in 0..2 * m {
            if !in_long(y) {
                return false;
            }
            y = y * 3 % m;
        }
        true
    };
    if stays(e1) && stays(e2) {
        GapType::RegularCritical
    } else {
        GapType::Periodic
    }
}

fn numer_denom(a: &Angle) -> (u64, u64) {
    (
        a.numer().try_into().unwrap(),
        a.denom().try_into().unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn classify_matches_brute_force(theta in rational()) {
        let (n, d) = numer_denom(&theta);
        prop_assert_eq!(classify(&theta), brute_classify(n, d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regular_critical_angles_avoid_holes(theta in rational()) {
        if classify(&theta) == GapType::RegularCritical {
            prop_assert!(atlas().hole_containing(&theta).is_none());
        }
    }

    #[test]
    fn periodic_generators_have_one_major(theta in rational()) {
        if classify(&theta) != GapType::Periodic {
            return Ok(());
        }
        let Ok(gap) = QuadGap::with_atlas(&theta, atlas()) else {
            // Major period beyond the atlas.
            return Ok(());
        };
        let (a, b) = gap.major_hole.clone();
        let k = gap.major_period.unwrap();
        prop_assert_eq!(a.orbit_type(D3).period, k);
        prop_assert_eq!(b.orbit_type(D3).period, k);
        prop_assert!(a.ccw_to(&b) > BigRational::new(1.into(), 3.into()));
        let (mut x, mut y) = (sigma(D3, &a), sigma(D3, &b));
        for _ in 1..k {
            prop_assert!(x.ccw_to(&y) < BigRational::new(1.into(), 3.into()));
            x = sigma(D3, &x);
            y = sigma(D3, &y);
        }
        prop_assert_eq!((x, y), (a, b));
    }
}

#[test]
fn holes_are_disjoint_and_half_turn_symmetric() {
    let holes = &atlas().holes;
    for w in holes.windows(2) {
        // Sorted by θ₁ and never wrapping: disjoint iff each ends before the next starts.
        assert!(w[0].theta2.ratio() <= w[1].theta1.ratio(), "{:?} {:?}", w[0], w[1]);
    }
    for h in holes {
        assert!(h.theta1.ratio() < h.theta2.ratio());
        let t = h.half_turn();
        assert!(holes.contains(&t), "half turn of {h:?}");
    }
}

#[test]
fn hole_endpoints_have_the_stated_period() {
    for h in &atlas().holes {
        let (a, b) = h.major_hole();
        assert_eq!(a.orbit_type(D3).period, h.period);
        assert_eq!(b.orbit_type(D3).period, h.period);
        assert!(a.is_periodic(D3) && b.is_periodic(D3));
        assert_eq!(QHole::new(h.theta1.clone(), h.theta2.clone()).unwrap(), *h);
    }
    assert!(QHole::new(Angle::frac(1, 6), Angle::frac(1, 4)).is_err());
}

#[test]
fn total_length_increases_below_one() {
    let mut prev = BigRational::zero();
    for q in 1..=8 {
        let len = enumerate_holes(q).unwrap().total_length();
        assert!(len > prev && len < BigRational::one());
        prev = len;
    }
}

#[test]
fn major_of_is_constant_on_holes() {
    let six = BigRational::from_integer(6.into());
    for h in atlas().holes.iter().filter(|h| h.period <= 5) {
        for j in 1..=5 {
            let t = BigRational::from_integer(j.into()) / &six;
            let theta = Angle::from_ratio(h.theta1.ratio() + h.length() * t);
            let (major, per) = major_of_in(&theta, atlas()).unwrap();
            assert_eq!(major, h.major);
            assert_eq!(per, Some(h.period));
        }
    }
}

fn sample_gaps() -> Vec<QuadGap> {
    atlas()
        .holes
        .iter()
        .filter(|h| h.period <= 4)
        .step_by(3)
        .map(|h| QuadGap::from_hole(h.midpoint(), h))
        .collect()
}

#[test]
fn vertex_sets_are_forward_invariant() {
    for gap in sample_gaps() {
        let depth = 4;
        let deep = gap.vertices(depth);
        let shallow = gap.vertices(depth - 1);
        let (a, b) = &gap.major_hole;
        let major_orbit: Vec<Angle> = a.orbit(D3).into_iter().chain(b.orbit(D3)).collect();
        for v in &deep {
            assert!(gap.is_vertex(v));
            let img = sigma(D3, v);
            assert!(
                shallow.binary_search(&img).is_ok() || major_orbit.contains(&img),
                "σ₃({v}) = {img} escapes the vertex set"
            );
        }
    }
}

#[test]
fn major_orbit_holes_are_empty_and_map_to_holes() {
    for gap in sample_gaps() {
        let verts = gap.vertices(5);
        let k = gap.major_period.unwrap();
        let (mut a, mut b) = gap.major_hole.clone();
        let three = BigRational::from_integer(3.into());
        for i in 0..k {
            assert!(verts.iter().all(|v| !v.in_open_arc(&a, &b)));
            let (na, nb) = (sigma(D3, &a), sigma(D3, &b));
            // The image hole is the triple of the old one, less a full turn for the major.
            let wrap = if i == 0 { BigRational::one() } else { BigRational::zero() };
            let expected = a.ccw_to(&b) * &three - wrap;
            let next = if na == nb { BigRational::one() } else { na.ccw_to(&nb) };
            assert_eq!(next, expected);
            a = na;
            b = nb;
        }
        assert_eq!((a, b), gap.major_hole);
    }
}

#[test]
fn psi_is_circularly_monotone_and_semiconjugates() {
    for gap in sample_gaps() {
        let mut verts = gap.vertices(4);
        let z0 = if gap.is_vertex(&Angle::zero()) {
            Angle::zero()
        } else {
            Angle::half()
        };
        verts.sort_by_key(|v| z0.ccw_to(v));
        let values: Vec<BigRational> = verts
            .iter()
            .map(|v| gap.psi(v).unwrap().ratio().clone())
            .collect();
        let descents = (0..values.len())
            .filter(|&i| values[(i + 1) % values.len()] < values[i])
            .count();
        assert!(descents <= 1, "ψ not circularly monotone for {}", gap.generator);
        for v in &verts {
            let lhs = gap.psi(&sigma(D3, v)).unwrap();
            let rhs = sigma(Degree::Two, &gap.psi(v).unwrap());
            assert_eq!(lhs, rhs, "ψ∘σ₃ ≠ σ₂∘ψ at {v}");
        }
        let (a, b) = &gap.major_hole;
        assert_eq!(gap.psi(a).unwrap(), gap.psi(b).unwrap());
    }
}

#[test]
fn vassal_vertices_stay_in_major_images() {
    for gap in sample_gaps() {
        let v = gap.vassal(3).unwrap();
        assert!(!v.vertices.is_empty());
        for x in &v.vertices {
            assert!(v.satisfies_orbit_condition(x), "{x}");
        }
    }
}
