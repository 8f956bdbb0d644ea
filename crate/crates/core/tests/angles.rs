use cubioid_core::angle::{chords_cross, critical_chord, orbit_period, sigma};
use cubioid_core::{Angle, Chord, Degree};
use num_rational::BigRational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = (u64, u64)> {
    (1u64..=600).prop_flat_map(|d| (0..d, Just(d)))
}

fn angle((n, d): (u64, u64)) -> Angle {
    Angle::new(n, d).unwrap()
}

/// Orbit of `n/d` under `x ↦ kx mod 1` with plain integers: (preperiod, period).
fn brute_orbit(n: u64, d: u64, k: u64) -> (usize, usize) {
    let mut seen = std::collections::HashMap::new();
    let mut x = n % d;
    for step in 0.. {
        if let Some(&first) = seen.get(&x) {
            return (first, step - first);
        }
        seen.insert(x, step);
        x = x * k % d;
    }
    unreachable!()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn orbit_type_matches_integer_iteration(r in rational(), two in any::<bool>()) {
        let (deg, k) = if two { (Degree::Two, 2) } else { (Degree::Three, 3) };
        let theta = angle(r);
        let ot = orbit_period(deg, &theta);
        prop_assert_eq!((ot.preperiod, ot.period), brute_orbit(r.0, r.1, k));

        let mut x = theta.clone();
        for _ in 0..ot.preperiod {
            x = sigma(deg, &x);
        }
        let first_periodic = x.clone();
        for _ in 0..ot.period {
            x = sigma(deg, &x);
        }
        prop_assert_eq!(x, first_periodic);
    }

    #[test]
    fn shifting_is_exact(r in rational(), p in 0i64..50, q in 1i64..50) {
        let theta = angle(r);
        prop_assert_eq!(theta.shift(p, q).shift(-p, q), theta.clone());
        let s = Angle::frac(p, q);
        prop_assert_eq!((theta.clone() + s.clone()) - s, theta);
    }

    #[test]
    fn critical_chords_have_length_one_third(r in rational()) {
        prop_assert_eq!(critical_chord(&angle(r)).length(), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn crossing_matches_interleaving(a in rational(), b in rational(), c in rational(), d in rational()) {
        let pts = [angle(a), angle(b), angle(c), angle(d)];
        let (Ok(c1), Ok(c2)) = (Chord::new(pts[0].clone(), pts[1].clone()), Chord::new(pts[2].clone(), pts[3].clone())) else {
            return Ok(());
        };
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| pts[i] != pts[j]));
        let expected = distinct && {
            let mut labelled: Vec<(Angle, u8)> = pts.iter().cloned().zip([0u8, 0, 1, 1]).collect();
            labelled.sort();
            // Interleaved iff the sorted labels alternate.
            labelled[0].1 != labelled[1].1 && labelled[1].1 != labelled[2].1
        };
        prop_assert_eq!(chords_cross(&c1, &c2), expected);
        prop_assert_eq!(chords_cross(&c2, &c1), expected);
        prop_assert!(!chords_cross(&c1, &c1));
    }

    #[test]
    fn preimages_map_back(r in rational()) {
        let theta = angle(r);
        for d in [Degree::Two, Degree::Three] {
            let pre = theta.preimages(d);
            prop_assert_eq!(pre.len() as u32, d.value());
            for x in pre {
                prop_assert_eq!(sigma(d, &x), theta.clone());
            }
        }
    }
}

#[test]
fn serde_round_trip() {
    let a = Angle::frac(7, 26);
    let json = serde_json::to_string(&a).unwrap();
    assert_eq!(json, "\"7/26\"");
    let back: Angle = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);
    assert!(serde_json::from_str::<Angle>("\"1/0\"").is_err());
}
