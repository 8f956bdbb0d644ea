//! Holes of the Principal Quadratic Parameter Gap, enumerated by period.
//!
//! A hole `(θ₁, θ₂)` corresponds to the periodic major `M = (θ₁+1/3)(θ₂+2/3)`
//! of a quadratic invariant gap. Writing `α = θ₁+1/3`, `β = θ₂+2/3` and
//! `Hᵢ = (3ⁱα, 3ⁱβ)` for the positively oriented image holes, a chord of
//! exact period `q` is such a major iff `H₀` is longer than `1/3`, every
//! `Hᵢ` with `i ≥ 1` is shorter than `1/3`, and no point of the two endpoint
//! orbits lies inside any `Hᵢ`. The length relation `|Hᵢ₊₁| = 3|Hᵢ|` (for
//! `i ≥ 1`) and `|H₁| = 3|H₀| − 1` force `|H₀| = 3^(q−1)/(3^q − 1)`, so every
//! periodic `α` has exactly one candidate partner `β`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, Chord, Degree};
use crate::error::{Error, Result};
use crate::modular::{exact_period, pow3};

/// Upper bound accepted by [`enumerate_holes`].
pub const MAX_ATLAS_PERIOD: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QHole {
    pub theta1: Angle,
    pub theta2: Angle,
    pub period: usize,
    pub major: Chord,
}

/// Largest period [`QHole::new`] can verify with 64-bit numerators.
const MAX_CHECKED_PERIOD: usize = 39;

impl QHole {
    /// The hole `(θ₁, θ₂)`, checked against the major criterion.
    pub fn new(theta1: Angle, theta2: Angle) -> Result<QHole> {
        let not_a_hole = || Error::InvalidArgument(format!("({theta1}, {theta2}) is not a hole"));
        let alpha = theta1.shift(1, 3);
        let beta = theta2.shift(2, 3);
        let ta = alpha.orbit_type(Degree::Three);
        if !ta.is_periodic() || ta != beta.orbit_type(Degree::Three) {
            return Err(not_a_hole());
        }
        let q = ta.period;
        if q > MAX_CHECKED_PERIOD {
            return Err(Error::BoundExceeded {
                what: "hole period",
                value: q,
                limit: MAX_CHECKED_PERIOD,
            });
        }
        let n = pow3(q) - 1;
        let numer = |a: &Angle| -> u64 {
            let k = a.ratio() * BigRational::from_integer(n.into());
            k.to_integer().to_u64().expect("periodic numerators fit")
        };
        if !is_periodic_major(numer(&alpha), numer(&beta), q, n) {
            return Err(not_a_hole());
        }
        Ok(QHole {
            major: Chord::new(alpha, beta).map_err(|_| not_a_hole())?,
            theta1,
            theta2,
            period: q,
        })
    }

    /// Endpoints `(θ₁+1/3, θ₂+2/3)` of the major, ordered so that the major
    /// hole runs positively from the first to the second.
    pub fn major_hole(&self) -> (Angle, Angle) {
        (self.theta1.shift(1, 3), self.theta2.shift(2, 3))
    }

    pub fn contains(&self, theta: &Angle) -> bool {
        theta.in_open_arc(&self.theta1, &self.theta2)
    }

    pub fn has_endpoint(&self, theta: &Angle) -> bool {
        &self.theta1 == theta || &self.theta2 == theta
    }

    pub fn length(&self) -> BigRational {
        self.theta1.ccw_to(&self.theta2)
    }

    /// A rational point of the open arc, used as a canonical generator.
    pub fn midpoint(&self) -> Angle {
        let half = BigRational::new(1.into(), 2.into());
        Angle::from_ratio(self.theta1.ratio() + self.length() * half)
    }

    /// The hole `(θ₁ + 1/2, θ₂ + 1/2)` obtained from `z ↦ −z`.
    pub fn half_turn(&self) -> QHole {
        let (a, b) = self.major_hole();
        let (a, b) = (a.shift(1, 2), b.shift(1, 2));
        QHole {
            theta1: self.theta1.shift(1, 2),
            theta2: self.theta2.shift(1, 2),
            period: self.period,
            major: Chord::new(a, b).expect("half-turn keeps endpoints distinct"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAtlas {
    pub max_period: usize,
    pub holes: Vec<QHole>,
}

impl QAtlas {
    pub fn len(&self) -> usize {
        self.holes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holes.is_empty()
    }

    /// Sum of the lengths of all holes in the atlas.
    pub fn total_length(&self) -> BigRational {
        self.holes
            .iter()
            .fold(BigRational::zero(), |acc, h| acc + h.length())
    }

    pub fn holes_of_period(&self, q: usize) -> impl Iterator<Item = &QHole> {
        self.holes.iter().filter(move |h| h.period == q)
    }

    /// The hole whose open arc contains `theta`, if any.
    pub fn hole_containing(&self, theta: &Angle) -> Option<&QHole> {
        // Holes never wrap through 0 (0 lies in Q), so sorting by θ₁ makes
        // the last hole starting before θ the only candidate.
        let idx = self.holes.partition_point(|h| &h.theta1 < theta);
        if idx == 0 {
            return None;
        }
        let h = &self.holes[idx - 1];
        h.contains(theta).then_some(h)
    }

    /// The hole having `theta` as one of its endpoints, if any.
    pub fn hole_with_endpoint(&self, theta: &Angle) -> Option<&QHole> {
        self.holes.iter().find(|h| h.has_endpoint(theta))
    }

    /// The hole whose oriented major hole is `(start, end)`.
    pub fn hole_with_major_hole(&self, start: &Angle, end: &Angle) -> Option<&QHole> {
        let t1 = start.shift(-1, 3);
        let t2 = end.shift(-2, 3);
        let idx = self.holes.partition_point(|h| h.theta1 < t1);
        self.holes
            .get(idx)
            .filter(|h| h.theta1 == t1 && h.theta2 == t2)
    }
}

/// All holes of period exactly `q`, sorted by `θ₁`.
pub fn holes_of_period(q: usize) -> Vec<QHole> {
    assert!(q >= 1);
    let n = pow3(q) - 1;
    let shift = pow3(q - 1);
    let mut found: Vec<(u64, u64)> = (0..n)
        .into_par_iter()
        .filter_map(|k| {
            let beta = (k + shift) % n;
            is_periodic_major(k, beta, q, n).then_some((k, beta))
        })
        .collect();
    found.sort_unstable();
    let mut holes: Vec<QHole> = found
        .into_iter()
        .map(|(ka, kb)| {
            let alpha = Angle::new(ka, n).expect("n > 0");
            let beta = Angle::new(kb, n).expect("n > 0");
            QHole {
                theta1: alpha.shift(-1, 3),
                theta2: beta.shift(-2, 3),
                period: q,
                major: Chord::new(alpha, beta).expect("distinct endpoints"),
            }
        })
        .collect();
    holes.sort_by(|a, b| a.theta1.cmp(&b.theta1));
    holes
}

/// Numerators are taken modulo `n = 3^q − 1`.
fn is_periodic_major(alpha: u64, beta: u64, q: usize, n: u64) -> bool {
    if exact_period(alpha, n) != q || exact_period(beta, n) != q {
        return false;
    }
    let mut a_orbit = Vec::with_capacity(q);
    let mut b_orbit = Vec::with_capacity(q);
    let (mut a, mut b) = (alpha, beta);
    for _ in 0..q {
        a_orbit.push(a);
        b_orbit.push(b);
        a = a * 3 % n;
        b = b * 3 % n;
    }
    let mut points: Vec<u64> = a_orbit.iter().chain(b_orbit.iter()).copied().collect();
    points.sort_unstable();
    points.dedup();
    // Each hole (aᵢ, bᵢ) must be empty: the first orbit point after aᵢ is bᵢ.
    for (&ai, &bi) in a_orbit.iter().zip(&b_orbit) {
        let len = (bi + n - ai) % n;
        let pos = points.partition_point(|&x| x <= ai);
        let next = points[pos % points.len()];
        let gap = (next + n - ai) % n;
        if gap < len {
            return false;
        }
    }
    true
}

/// Enumerate every hole of period at most `max_period`.
pub fn enumerate_holes(max_period: usize) -> Result<QAtlas> {
    if max_period > MAX_ATLAS_PERIOD {
        return Err(Error::BoundExceeded {
            what: "max_period",
            value: max_period,
            limit: MAX_ATLAS_PERIOD,
        });
    }
    let mut holes: Vec<QHole> = (1..=max_period)
        .into_par_iter()
        .flat_map_iter(holes_of_period)
        .collect();
    holes.sort_by(|a, b| a.theta1.cmp(&b.theta1));
    Ok(QAtlas { max_period, holes })
}

/// Free-function form of [`QAtlas::hole_containing`].
pub fn hole_containing<'a>(atlas: &'a QAtlas, theta: &Angle) -> Option<&'a QHole> {
    atlas.hole_containing(theta)
}

/// SVG drawing of the unit circle with one chord per hole.
pub fn render_q(atlas: &QAtlas, size: u32) -> Result<String> {
    if size < 64 {
        return Err(Error::InvalidArgument(format!("size {size} < 64")));
    }
    let c = size as f64 / 2.0;
    let r = c * 0.95;
    let pt = |t: &Angle| {
        let a = std::f64::consts::TAU * t.to_f64();
        (c + r * a.cos(), c - r * a.sin())
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<circle cx="{c:.3}" cy="{c:.3}" r="{r:.3}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for h in &atlas.holes {
        let (x1, y1) = pt(&h.theta1);
        let (x2, y2) = pt(&h.theta2);
        let _ = writeln!(
            svg,
            r#"<line class="hole" data-period="{}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="black" stroke-width="0.5"/>"#,
            h.period
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// `true` iff the total length of `atlas` is strictly below one turn.
pub fn total_length_below_one(atlas: &QAtlas) -> bool {
    atlas.total_length() < BigRational::one()
}
