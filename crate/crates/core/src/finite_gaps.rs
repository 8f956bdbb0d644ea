//! Finite `σ₃`-invariant gaps: rotational sets of one or two periodic orbits.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{sigma, Angle, Chord, Degree};
use crate::error::{Error, Result};
use crate::modular::pow3;
use crate::q_atlas::{QAtlas, QHole};

const D3: Degree = Degree::Three;

/// Largest denominator exponent accepted by [`enumerate_type_d`].
pub const MAX_ROTATION_PERIOD: u64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FiniteGapType {
    A,
    B,
    D,
}

impl fmt::Display for FiniteGapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A major of a finite gap, given by its hole: the open arc from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MajorHole {
    pub start: Angle,
    pub end: Angle,
}

impl MajorHole {
    pub fn chord(&self) -> Chord {
        Chord::new(self.start.clone(), self.end.clone()).expect("distinct endpoints")
    }

    /// Parameter hole `(start − 1/3, end − 2/3)` carried by this major.
    pub fn parameter_hole(&self) -> (Angle, Angle) {
        (self.start.shift(-1, 3), self.end.shift(-2, 3))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGap {
    pub vertices: Vec<Angle>,
    #[serde(rename = "type")]
    pub gap_type: FiniteGapType,
    pub rotation: (u64, u64),
    /// First the major whose hole contains 0, then the one containing 1/2.
    pub majors: Vec<MajorHole>,
}

impl FiniteGap {
    /// The leaf `0–1/2`, treated as the degenerate type-D object of rotation 0/1.
    pub fn degenerate_leaf() -> FiniteGap {
        FiniteGap {
            vertices: vec![Angle::zero(), Angle::half()],
            gap_type: FiniteGapType::D,
            rotation: (0, 1),
            majors: vec![
                MajorHole {
                    start: Angle::half(),
                    end: Angle::zero(),
                },
                MajorHole {
                    start: Angle::zero(),
                    end: Angle::half(),
                },
            ],
        }
    }

    /// Holes between circularly consecutive vertices.
    pub fn holes(&self) -> Vec<MajorHole> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| MajorHole {
                start: self.vertices[i].clone(),
                end: self.vertices[(i + 1) % n].clone(),
            })
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() == 2 && self.rotation.1 == 1
    }
}

/// Rotation number of a `σ₃`-invariant finite set, if `σ₃` acts as a rotation.
///
/// Accepts a single orbit as well as a union of orbits.
pub fn rotation_number(orbit: &[Angle]) -> Result<Option<(u64, u64)>> {
    let sorted: Vec<Angle> = orbit
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = sorted.len();
    if n == 0 {
        return Err(Error::NotAnOrbit);
    }
    let idx = |x: &Angle| sorted.binary_search(x).ok();
    let mut shift = None;
    for (i, x) in sorted.iter().enumerate() {
        let j = idx(&sigma(D3, x)).ok_or(Error::NotAnOrbit)?;
        let s = (j + n - i) % n;
        match shift {
            None => shift = Some(s),
            Some(s0) if s0 != s => return Ok(None),
            _ => {}
        }
    }
    let s = shift.expect("non-empty") as u64;
    let g = s.gcd(&(n as u64));
    Ok(Some((s / g, n as u64 / g)))
}

/// All `σ₃`-orbits of exact period `q` on which `σ₃` rotates by `p/q`, as
/// numerators modulo `3^q − 1`.
fn rotational_orbits(p: u64, q: u64) -> Vec<Vec<u64>> {
    let n = pow3(q as usize) - 1;
    let mut visited = vec![false; n as usize];
    let mut out = Vec::new();
    for k in 0..n {
        if visited[k as usize] {
            continue;
        }
        let mut orbit = vec![k];
        visited[k as usize] = true;
        let mut x = k * 3 % n;
        while x != k {
            visited[x as usize] = true;
            orbit.push(x);
            x = x * 3 % n;
        }
        if orbit.len() as u64 != q {
            continue;
        }
        let mut sorted = orbit.clone();
        sorted.sort_unstable();
        let shift_ok = sorted.iter().enumerate().all(|(i, &x)| {
            let j = sorted.binary_search(&(x * 3 % n)).expect("closed orbit");
            (j + q as usize - i) % q as usize == p as usize % q as usize
        });
        if shift_ok {
            out.push(sorted);
        }
    }
    out
}

fn classify_set(points: &[u64], n: u64, p: u64, q: u64) -> Option<FiniteGap> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    let m = pts.len();
    // σ₃ must preserve circular order as a single rotation.
    let shift = pts.binary_search(&(pts[0] * 3 % n)).ok()?;
    for (i, &x) in pts.iter().enumerate() {
        let j = pts.binary_search(&(x * 3 % n)).ok()?;
        if (j + m - i) % m != shift {
            return None;
        }
    }
    let vertices: Vec<Angle> = pts
        .iter()
        .map(|&k| Angle::new(k, n).expect("n > 0"))
        .collect();
    let half = n / 2;
    // Edge i is the hole from pts[i] to pts[i+1]; 0 and 1/2 (numerators 0 and n/2)
    // are never vertices when q ≥ 2.
    let hole_of = |x: u64| -> usize {
        let pos = pts.partition_point(|&v| v < x);
        (pos + m - 1) % m
    };
    let h0 = hole_of(0);
    let h1 = hole_of(half);
    let major = |i: usize| MajorHole {
        start: vertices[i].clone(),
        end: vertices[(i + 1) % m].clone(),
    };
    let (gap_type, majors) = if h0 == h1 {
        (FiniteGapType::A, vec![major(h0)])
    } else {
        let same_orbit = (0..m).any(|t| (h0 + t * shift) % m == h1);
        let ty = if same_orbit {
            FiniteGapType::B
        } else {
            FiniteGapType::D
        };
        (ty, vec![major(h0), major(h1)])
    };
    Some(FiniteGap {
        vertices,
        gap_type,
        rotation: (p, q),
        majors,
    })
}

/// Every finite invariant gap of rotation number `p/q` built from one or two orbits.
pub fn enumerate_rotational(p: u64, q: u64) -> Result<Vec<FiniteGap>> {
    if q == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!("rotation {p}/{q}")));
    }
    if q > MAX_ROTATION_PERIOD {
        return Err(Error::BoundExceeded {
            what: "rotation period",
            value: q as usize,
            limit: MAX_ROTATION_PERIOD as usize,
        });
    }
    if q == 1 {
        return Ok(vec![FiniteGap::degenerate_leaf()]);
    }
    let n = pow3(q as usize) - 1;
    let orbits = rotational_orbits(p, q);
    let mut gaps: Vec<FiniteGap> = (0..orbits.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let orbits = &orbits;
            let single = classify_set(&orbits[i], n, p, q);
            let pairs = (i + 1..orbits.len()).filter_map(move |j| {
                let mut u = orbits[i].clone();
                u.extend_from_slice(&orbits[j]);
                classify_set(&u, n, p, q)
            });
            single.into_iter().chain(pairs)
        })
        .collect();
    gaps.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(gaps)
}

/// The finite gaps of type D with rotation number `p/q`.
pub fn enumerate_type_d(p: u64, q: u64) -> Result<Vec<FiniteGap>> {
    Ok(enumerate_rotational(p, q)?
        .into_iter()
        .filter(|g| g.gap_type == FiniteGapType::D)
        .collect())
}

fn require_d(gap: &FiniteGap) -> Result<()> {
    if gap.gap_type != FiniteGapType::D {
        return Err(Error::WrongType {
            expected: "D",
            found: gap.gap_type.to_string(),
        });
    }
    Ok(())
}

fn major_at(gap: &FiniteGap, idx: usize) -> Result<&MajorHole> {
    gap.majors
        .get(idx)
        .ok_or_else(|| Error::InvalidArgument(format!("major index {idx}")))
}

/// The parameter hole whose periodic major is the chosen major of `gap`.
pub fn type_d_major_to_qhole<'a>(
    gap: &FiniteGap,
    major_index: usize,
    atlas: &'a QAtlas,
) -> Result<&'a QHole> {
    require_d(gap)?;
    let m = major_at(gap, major_index)?;
    atlas
        .hole_with_major_hole(&m.start, &m.end)
        .ok_or_else(|| Error::NotFound {
            angle: m.chord().to_string(),
            max_period: atlas.max_period,
        })
}

/// The other major of a type-D gap.
pub fn conjugate_major(gap: &FiniteGap, major_index: usize) -> Result<MajorHole> {
    require_d(gap)?;
    major_at(gap, major_index)?;
    Ok(gap.majors[1 - major_index.min(1)].clone())
}

/// Rotation number of the orbit of `θ₁ + 1/3` for a parameter hole.
pub fn hole_rotation(hole: &QHole) -> Option<(u64, u64)> {
    let (alpha, _) = hole.major_hole();
    rotation_number(&alpha.orbit(D3)).ok().flatten()
}

/// Whether the hole is `p/q`-special.
pub fn is_special(hole: &QHole, p: u64, q: u64) -> bool {
    hole_rotation(hole) == Some((p % q.max(1), q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q_atlas::enumerate_holes;

    fn a(n: i64, d: i64) -> Angle {
        Angle::frac(n, d)
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation_number(&[a(1, 8), a(3, 8)]).unwrap(), Some((1, 2)));
        assert_eq!(
            rotation_number(&[a(1, 13), a(3, 13), a(9, 13)]).unwrap(),
            Some((1, 3))
        );
        assert_eq!(rotation_number(&[Angle::zero()]).unwrap(), Some((0, 1)));
        assert_eq!(rotation_number(&[a(1, 8)]), Err(Error::NotAnOrbit));
    }

    #[test]
    fn type_d_half() {
        let gaps = enumerate_type_d(1, 2).unwrap();
        let sets: Vec<Vec<Angle>> = gaps.iter().map(|g| g.vertices.clone()).collect();
        assert_eq!(
            sets,
            vec![
                vec![a(1, 8), a(1, 4), a(3, 8), a(3, 4)],
                vec![a(1, 4), a(5, 8), a(3, 4), a(7, 8)],
            ]
        );
        let g = &gaps[0];
        assert_eq!(g.majors[0].chord(), Chord::new(a(3, 4), a(1, 8)).unwrap());
        assert_eq!(g.majors[1].chord(), Chord::new(a(3, 8), a(3, 4)).unwrap());
    }

    #[test]
    fn type_d_counts() {
        for (p, q) in [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)] {
            assert_eq!(enumerate_type_d(p, q).unwrap().len(), q as usize, "{p}/{q}");
        }
    }

    #[test]
    fn majors_to_holes() {
        let atlas = enumerate_holes(2).unwrap();
        let g = &enumerate_type_d(1, 2).unwrap()[0];
        let h = type_d_major_to_qhole(g, 1, &atlas).unwrap();
        assert_eq!((h.theta1.clone(), h.theta2.clone()), (a(1, 24), a(1, 12)));
        let h = type_d_major_to_qhole(g, 0, &atlas).unwrap();
        assert_eq!((h.theta1.clone(), h.theta2.clone()), (a(5, 12), a(11, 24)));
        let leaf = FiniteGap::degenerate_leaf();
        let h = type_d_major_to_qhole(&leaf, 0, &atlas).unwrap();
        assert_eq!((h.theta1.clone(), h.theta2.clone()), (a(1, 6), a(1, 3)));
        let h = type_d_major_to_qhole(&leaf, 1, &atlas).unwrap();
        assert_eq!((h.theta1.clone(), h.theta2.clone()), (a(2, 3), a(5, 6)));
    }

    #[test]
    fn conjugates() {
        let g = &enumerate_type_d(1, 2).unwrap()[0];
        assert_eq!(conjugate_major(g, 1).unwrap(), g.majors[0]);
        assert_eq!(conjugate_major(g, 0).unwrap(), g.majors[1]);
        let leaf = FiniteGap::degenerate_leaf();
        assert_eq!(conjugate_major(&leaf, 0).unwrap().chord(), leaf.majors[0].chord());
        let a_type = enumerate_rotational(1, 3)
            .unwrap()
            .into_iter()
            .find(|g| g.gap_type != FiniteGapType::D);
        if let Some(g) = a_type {
            assert!(matches!(conjugate_major(&g, 0), Err(Error::WrongType { .. })));
        }
    }

    #[test]
    fn special_holes_count() {
        let atlas = enumerate_holes(4).unwrap();
        for (p, q) in [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)] {
            let n = atlas
                .holes_of_period(q as usize)
                .filter(|h| is_special(h, p, q))
                .count();
            assert_eq!(n, 2 * q as usize, "{p}/{q}");
        }
    }
}
