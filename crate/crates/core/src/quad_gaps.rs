//! Quadratic invariant gaps of `σ₃` generated by critical chords.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::angle::{critical_chord, sigma, Angle, Arc, Chord, Degree};
use crate::error::{Error, Result};
use crate::q_atlas::{enumerate_holes, QAtlas, QHole};

const D3: Degree = Degree::Three;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapType {
    RegularCritical,
    Caterpillar,
    Periodic,
}

impl fmt::Display for GapType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GapType::RegularCritical => "RegularCritical",
            GapType::Caterpillar => "Caterpillar",
            GapType::Periodic => "Periodic",
        };
        f.write_str(s)
    }
}

/// The closed long arc `L(𝔠_θ) = [θ+2/3, θ+1/3]`, which passes through `θ`.
pub fn long_arc(theta: &Angle) -> Arc {
    Arc::closed(theta.shift(2, 3), theta.shift(1, 3)).expect("endpoints differ by 1/3")
}

/// The two closed thirds `A₀ = [θ+2/3, θ]` and `A₁ = [θ, θ+1/3]` of `L(𝔠_θ)`.
pub fn long_arc_halves(theta: &Angle) -> (Arc, Arc) {
    (
        Arc::closed(theta.shift(2, 3), theta.clone()).expect("length 1/3"),
        Arc::closed(theta.clone(), theta.shift(1, 3)).expect("length 1/3"),
    )
}

fn orbit_in(x: &Angle, arc: &Arc) -> bool {
    x.orbit(D3).iter().all(|y| arc.contains(y))
}

pub fn classify(theta: &Angle) -> GapType {
    let e1 = theta.shift(1, 3);
    let e2 = theta.shift(2, 3);
    if e1.is_periodic(D3) || e2.is_periodic(D3) {
        return GapType::Caterpillar;
    }
    let l = long_arc(theta);
    if orbit_in(&e1, &l) && orbit_in(&e2, &l) {
        GapType::RegularCritical
    } else {
        GapType::Periodic
    }
}

/// Major of the (clean) gap generated by `theta`, with its period.
pub fn major_of(theta: &Angle, max_period: usize) -> Result<(Chord, Option<usize>)> {
    let atlas = enumerate_holes(max_period)?;
    major_of_in(theta, &atlas)
}

/// [`major_of`] against a precomputed atlas.
pub fn major_of_in(theta: &Angle, atlas: &QAtlas) -> Result<(Chord, Option<usize>)> {
    match classify(theta) {
        GapType::RegularCritical => Ok((critical_chord(theta), None)),
        t => {
            let h = locate_hole(theta, t, atlas)?;
            Ok((h.major.clone(), Some(h.period)))
        }
    }
}

fn locate_hole<'a>(theta: &Angle, t: GapType, atlas: &'a QAtlas) -> Result<&'a QHole> {
    let found = match t {
        GapType::Periodic => atlas.hole_containing(theta),
        GapType::Caterpillar => atlas.hole_with_endpoint(theta),
        GapType::RegularCritical => None,
    };
    found.ok_or_else(|| Error::NotFound {
        angle: theta.to_string(),
        max_period: atlas.max_period,
    })
}

/// A quadratic invariant gap `𝔘(𝔠_θ)` identified by its generator `θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadGap {
    pub generator: Angle,
    pub gap_type: GapType,
    pub major: Chord,
    /// Oriented major hole: the open arc from `.0` to `.1`.
    pub major_hole: (Angle, Angle),
    pub major_period: Option<usize>,
    /// The parameter hole of the periodic major (own major, or that of the
    /// clean gap for caterpillars).
    pub hole: Option<QHole>,
}

impl QuadGap {
    pub fn new(theta: &Angle, max_period: usize) -> Result<QuadGap> {
        match classify(theta) {
            GapType::RegularCritical => Self::with_atlas(theta, &QAtlas {
                max_period,
                holes: vec![],
            }),
            _ => Self::with_atlas(theta, &enumerate_holes(max_period)?),
        }
    }

    pub fn with_atlas(theta: &Angle, atlas: &QAtlas) -> Result<QuadGap> {
        let gap_type = classify(theta);
        let crit_hole = (theta.shift(1, 3), theta.shift(2, 3));
        match gap_type {
            GapType::RegularCritical => Ok(QuadGap {
                generator: theta.clone(),
                gap_type,
                major: critical_chord(theta),
                major_hole: crit_hole,
                major_period: None,
                hole: None,
            }),
            GapType::Caterpillar => {
                let h = locate_hole(theta, gap_type, atlas)?;
                let per = if crit_hole.0.is_periodic(D3) {
                    &crit_hole.0
                } else {
                    &crit_hole.1
                };
                Ok(QuadGap {
                    generator: theta.clone(),
                    gap_type,
                    major: critical_chord(theta),
                    major_period: Some(per.orbit_type(D3).period),
                    major_hole: crit_hole,
                    hole: Some(h.clone()),
                })
            }
            GapType::Periodic => {
                let h = locate_hole(theta, gap_type, atlas)?;
                Ok(Self::from_hole(theta.clone(), h))
            }
        }
    }

    /// The periodic-type gap whose parameter hole is `hole`, generated by `generator`.
    pub fn from_hole(generator: Angle, hole: &QHole) -> QuadGap {
        QuadGap {
            generator,
            gap_type: GapType::Periodic,
            major: hole.major.clone(),
            major_hole: hole.major_hole(),
            major_period: Some(hole.period),
            hole: Some(hole.clone()),
        }
    }

    pub fn long_arc(&self) -> Arc {
        long_arc(&self.generator)
    }

    /// Identity unless caterpillar; a caterpillar becomes the periodic gap
    /// generated by the midpoint of its adjacent parameter hole.
    pub fn clean_gap(&self) -> QuadGap {
        match (&self.gap_type, &self.hole) {
            (GapType::Caterpillar, Some(h)) => Self::from_hole(h.midpoint(), h),
            _ => self.clone(),
        }
    }

    fn admissible(&self, x: &Angle) -> bool {
        match self.gap_type {
            GapType::Periodic => !x.in_open_arc(&self.major_hole.0, &self.major_hole.1),
            _ => self.long_arc().contains(x),
        }
    }

    /// Whether the whole forward orbit of `x` stays among the gap's vertices.
    pub fn is_vertex(&self, x: &Angle) -> bool {
        x.orbit(D3).iter().all(|y| self.admissible(y))
    }

    /// Pullbacks of the major endpoints of itinerary length at most `depth`.
    pub fn vertices(&self, depth: usize) -> Vec<Angle> {
        let mut seen: BTreeSet<Angle> = BTreeSet::new();
        let mut frontier = vec![self.major_hole.0.clone(), self.major_hole.1.clone()];
        seen.extend(frontier.iter().cloned());
        for _ in 0..depth {
            let mut next = Vec::new();
            for y in &frontier {
                for x in y.preimages(D3) {
                    if self.admissible(&x) && seen.insert(x.clone()) {
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().collect()
    }

    /// The vassal gap of a periodic-type gap.
    pub fn vassal(&self, depth: usize) -> Result<VassalGap> {
        if self.gap_type != GapType::Periodic {
            return Err(Error::WrongType {
                expected: "Periodic",
                found: self.gap_type.to_string(),
            });
        }
        let k = self.major_period.expect("periodic gaps carry a period");
        let holes: Vec<(Angle, Angle)> = (0..k)
            .map(|i| {
                let m = 3u64.pow(i as u32);
                (self.major_hole.0.times(m), self.major_hole.1.times(m))
            })
            .collect();
        let mut seen: BTreeSet<Angle> = BTreeSet::new();
        let mut frontier = vec![self.major_hole.0.clone(), self.major_hole.1.clone()];
        seen.extend(frontier.iter().cloned());
        for _ in 0..depth {
            let mut next = Vec::new();
            for y in &frontier {
                let mut chain = vec![y.clone()];
                for (i, (a, b)) in holes.iter().enumerate().rev() {
                    chain = chain
                        .iter()
                        .flat_map(|z| z.preimages(D3))
                        .filter(|x| x.in_closed_arc(a, b))
                        .collect();
                    debug_assert!(i == 0 || chain.len() <= 1);
                }
                for x in chain {
                    if seen.insert(x.clone()) {
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        Ok(VassalGap {
            senior: self.clone(),
            period: k,
            depth,
            vertices: seen.into_iter().collect(),
        })
    }

    /// The semiconjugacy `ψ` from the vertex set onto the circle, with
    /// `ψ ∘ σ₃ = σ₂ ∘ ψ` and the endpoints of every hole identified.
    ///
    /// Caterpillar gaps are first replaced by their clean gap.
    pub fn psi(&self, alpha: &Angle) -> Result<Angle> {
        if self.gap_type == GapType::Caterpillar {
            return self.clean_gap().psi(alpha);
        }
        if !self.is_vertex(alpha) {
            return Err(Error::NotAVertex(alpha.to_string()));
        }
        let coding = self.psi_coding()?;
        Ok(coding.value(alpha))
    }

    fn psi_coding(&self) -> Result<PsiCoding> {
        let fixed: Vec<Angle> = [Angle::zero(), Angle::half()]
            .into_iter()
            .filter(|z| self.is_vertex(z))
            .collect();
        let z0 = fixed
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("gap has no fixed vertex".into()))?;
        let mut f_class: BTreeSet<Angle> = fixed.iter().cloned().collect();
        // A fixed point on the major is identified with the other endpoint.
        let (m0, m1) = &self.major_hole;
        if f_class.contains(m0) {
            f_class.insert(m1.clone());
        }
        if f_class.contains(m1) {
            f_class.insert(m0.clone());
        }
        let w_class: BTreeSet<Angle> = f_class
            .iter()
            .flat_map(|z| z.preimages(D3))
            .filter(|x| !f_class.contains(x) && self.is_vertex(x))
            .collect();
        let mut marks: Vec<(BigRational, bool)> = f_class
            .iter()
            .map(|x| (z0.ccw_to(x), false))
            .chain(w_class.iter().map(|x| (z0.ccw_to(x), true)))
            .collect();
        marks.sort();
        // Expected cyclic pattern from z0: F… W… F…
        let first_w = marks.iter().position(|m| m.1);
        let last_w = marks.iter().rposition(|m| m.1);
        let (Some(fw), Some(lw)) = (first_w, last_w) else {
            return Err(Error::InvalidArgument("empty preimage class".into()));
        };
        if marks[fw..=lw].iter().any(|m| !m.1) {
            return Err(Error::InvalidArgument("non-contiguous preimage class".into()));
        }
        let at = |r: &BigRational| Angle::from_ratio(z0.ratio() + r);
        Ok(PsiCoding {
            f_class,
            w_class,
            zero_arc: (at(&marks[fw - 1].0), at(&marks[fw].0)),
            one_arc: (
                at(&marks[lw].0),
                marks.get(lw + 1).map(|m| at(&m.0)).unwrap_or(z0),
            ),
        })
    }

    pub fn to_export(&self, depth: usize) -> GapExport {
        GapExport {
            generator: self.generator.clone(),
            gap_type: self.gap_type,
            major: [self.major_hole.0.clone(), self.major_hole.1.clone()],
            major_period: self.major_period,
            depth,
            vertices: self.vertices(depth),
        }
    }
}

struct PsiCoding {
    f_class: BTreeSet<Angle>,
    w_class: BTreeSet<Angle>,
    zero_arc: (Angle, Angle),
    one_arc: (Angle, Angle),
}

impl PsiCoding {
    fn value(&self, alpha: &Angle) -> Angle {
        let mut digits: Vec<u8> = Vec::new();
        let mut seen: Vec<Angle> = Vec::new();
        let mut x = alpha.clone();
        loop {
            if self.f_class.contains(&x) {
                return from_digits(&digits, None);
            }
            if self.w_class.contains(&x) {
                digits.push(1);
                return from_digits(&digits, None);
            }
            if let Some(start) = seen.iter().position(|s| s == &x) {
                return from_digits(&digits, Some(start));
            }
            let d = if x.in_open_arc(&self.zero_arc.0, &self.zero_arc.1) {
                0
            } else {
                debug_assert!(x.in_open_arc(&self.one_arc.0, &self.one_arc.1));
                1
            };
            digits.push(d);
            seen.push(x.clone());
            x = sigma(D3, &x);
        }
    }
}

/// Binary expansion `0.d₀d₁…`, eventually repeating from `period_start` to the end.
fn from_digits(digits: &[u8], period_start: Option<usize>) -> Angle {
    let two = BigInt::from(2);
    let value = |ds: &[u8]| {
        ds.iter()
            .fold(BigInt::zero(), |acc, &d| acc * &two + BigInt::from(d))
    };
    match period_start {
        None => {
            let den = num_traits::pow(two.clone(), digits.len());
            Angle::from_ratio(BigRational::new(value(digits), den))
        }
        Some(m) => {
            let p = digits.len() - m;
            let pre = BigRational::new(value(&digits[..m]), num_traits::pow(two.clone(), m));
            let rep = BigRational::new(
                value(&digits[m..]),
                num_traits::pow(two.clone(), p) - BigInt::one(),
            );
            let scale = BigRational::new(BigInt::one(), num_traits::pow(two, m));
            Angle::from_ratio(pre + rep * scale)
        }
    }
}

/// Free-function form of [`QuadGap::psi`].
pub fn semiconjugacy_psi(gap: &QuadGap, alpha: &Angle) -> Result<Angle> {
    gap.psi(alpha)
}

/// The gap of angles trapped in the iterated images of a periodic major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VassalGap {
    pub senior: QuadGap,
    pub period: usize,
    pub depth: usize,
    pub vertices: Vec<Angle>,
}

impl VassalGap {
    /// Whether `3ⁿx` lies in the closed image of the major hole for every `n`.
    pub fn satisfies_orbit_condition(&self, x: &Angle) -> bool {
        let (a0, b0) = &self.senior.major_hole;
        let ot = x.orbit_type(D3);
        let n_max = (ot.preperiod + ot.period) * self.period + self.period;
        let (mut y, mut a, mut b) = (x.clone(), a0.clone(), b0.clone());
        for _ in 0..n_max {
            if !y.in_closed_arc(&a, &b) {
                return false;
            }
            y = sigma(D3, &y);
            a = sigma(D3, &a);
            b = sigma(D3, &b);
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapExport {
    pub generator: Angle,
    #[serde(rename = "type")]
    pub gap_type: GapType,
    pub major: [Angle; 2],
    pub major_period: Option<usize>,
    pub depth: usize,
    pub vertices: Vec<Angle>,
}
