//! Exact rational angles on ℝ/ℤ, arcs and chords of the closed unit disk.
//!
//! Angles are measured in turns. Every [`Angle`] is kept in canonical form:
//! a reduced fraction `n/d` with `0 <= n < d`, so structural equality is
//! numeric equality.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Degree of the covering map `σ_d(θ) = dθ mod 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    Two,
    Three,
}

impl Degree {
    pub fn value(self) -> u32 {
        match self {
            Degree::Two => 2,
            Degree::Three => 3,
        }
    }
}

impl TryFrom<u32> for Degree {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            2 => Ok(Degree::Two),
            3 => Ok(Degree::Three),
            other => Err(Error::UnsupportedDegree(other)),
        }
    }
}

/// A rational point of the circle ℝ/ℤ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

fn frac_part(r: BigRational) -> BigRational {
    let fl = r.floor();
    r - fl
}

impl Angle {
    /// Builds `num/den mod 1`. Fails only for a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidAngle(format!("{num}/0")));
        }
        Ok(Angle(frac_part(BigRational::new(num, den))))
    }

    /// Shorthand for small literal fractions; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Angle(frac_part(r))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn half() -> Self {
        Self::frac(1, 2)
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `self + num/den`, reduced mod 1.
    pub fn shift(&self, num: i64, den: i64) -> Angle {
        Angle::from_ratio(&self.0 + BigRational::new(num.into(), den.into()))
    }

    /// `k · self mod 1`.
    pub fn times(&self, k: u64) -> Angle {
        Angle::from_ratio(&self.0 * BigRational::from_integer(k.into()))
    }

    /// The `d` preimages of `self` under `σ_d`, in increasing order.
    pub fn preimages(&self, d: Degree) -> Vec<Angle> {
        let dv = d.value() as i64;
        (0..dv)
            .map(|j| {
                Angle::from_ratio(
                    (&self.0 + BigRational::from_integer(j.into()))
                        / BigRational::from_integer(dv.into()),
                )
            })
            .collect()
    }

    /// Positive circular distance from `self` to `other`, in `[0, 1)`.
    pub fn ccw_to(&self, other: &Angle) -> BigRational {
        frac_part(&other.0 - &self.0)
    }

    /// Whether `self` lies strictly inside the positively oriented arc `(a, b)`.
    /// When `a == b` the open arc is the circle minus `a`.
    pub fn in_open_arc(&self, a: &Angle, b: &Angle) -> bool {
        if self == a || self == b {
            return false;
        }
        if a == b {
            return true;
        }
        a.ccw_to(self) < a.ccw_to(b)
    }

    /// Whether `self` lies in the closed positively oriented arc `[a, b]`.
    pub fn in_closed_arc(&self, a: &Angle, b: &Angle) -> bool {
        self == a || self == b || self.in_open_arc(a, b)
    }

    /// Eventual period and preperiod of the `σ_d` orbit.
    pub fn orbit_type(&self, d: Degree) -> OrbitType {
        let mut seen: HashMap<Angle, usize> = HashMap::new();
        let mut x = self.clone();
        let mut n = 0usize;
        loop {
            if let Some(&first) = seen.get(&x) {
                return OrbitType {
                    preperiod: first,
                    period: n - first,
                };
            }
            let next = sigma(d, &x);
            seen.insert(x, n);
            x = next;
            n += 1;
        }
    }

    /// Whether the angle is `σ_d`-periodic.
    pub fn is_periodic(&self, d: Degree) -> bool {
        // θ = n/m is σ_d-periodic iff gcd(m, d) = 1.
        self.denom().gcd(&BigInt::from(d.value())).is_one()
    }

    /// Forward orbit until the first repetition (preperiodic part and one cycle).
    pub fn orbit(&self, d: Degree) -> Vec<Angle> {
        let ot = self.orbit_type(d);
        let mut out = Vec::with_capacity(ot.preperiod + ot.period);
        let mut x = self.clone();
        for _ in 0..ot.preperiod + ot.period {
            let next = sigma(d, &x);
            out.push(x);
            x = next;
        }
        out
    }
}

/// `(preperiod, period)` of a rational angle under `σ_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitType {
    pub preperiod: usize,
    pub period: usize,
}

impl OrbitType {
    pub fn is_periodic(&self) -> bool {
        self.preperiod == 0
    }
}

/// `σ_d(θ) = d·θ mod 1`.
pub fn sigma(d: Degree, theta: &Angle) -> Angle {
    theta.times(d.value() as u64)
}

/// `(preperiod, period)` of `θ` under `σ_d`.
pub fn orbit_period(d: Degree, theta: &Angle) -> OrbitType {
    theta.orbit_type(d)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            what: "angle",
            input: s.to_string(),
        };
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| parse_err())?;
        let d: BigInt = d.parse().map_err(|_| parse_err())?;
        if !d.is_positive() {
            return Err(parse_err());
        }
        Angle::new(n, d)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Angle {
    type Output = Angle;
    fn add(self, rhs: &Angle) -> Angle {
        Angle::from_ratio(&self.0 + &rhs.0)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        &self + &rhs
    }
}

impl Sub for &Angle {
    type Output = Angle;
    fn sub(self, rhs: &Angle) -> Angle {
        Angle::from_ratio(&self.0 - &rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        &self - &rhs
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::from_ratio(-self.0.clone())
    }
}

/// An arc of the circle traversed positively from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
    /// Whether `start` and `end` belong to the arc.
    pub closed: (bool, bool),
}

impl Arc {
    pub fn new(start: Angle, end: Angle, closed: (bool, bool)) -> Result<Self> {
        if start == end {
            return Err(Error::DegenerateArc(start.to_string()));
        }
        Ok(Arc { start, end, closed })
    }

    pub fn open(start: Angle, end: Angle) -> Result<Self> {
        Self::new(start, end, (false, false))
    }

    pub fn closed(start: Angle, end: Angle) -> Result<Self> {
        Self::new(start, end, (true, true))
    }

    pub fn length(&self) -> BigRational {
        self.start.ccw_to(&self.end)
    }

    pub fn contains(&self, x: &Angle) -> bool {
        if x == &self.start {
            return self.closed.0;
        }
        if x == &self.end {
            return self.closed.1;
        }
        x.in_open_arc(&self.start, &self.end)
    }
}

/// A chord of the closed unit disk joining two distinct circle points.
///
/// Stored with the numerically smaller endpoint first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    a: Angle,
    b: Angle,
}

impl Chord {
    pub fn new(x: Angle, y: Angle) -> Result<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Chord { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(Chord { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(Error::DegenerateChord(x.to_string())),
        }
    }

    pub fn a(&self) -> &Angle {
        &self.a
    }

    pub fn b(&self) -> &Angle {
        &self.b
    }

    pub fn endpoints(&self) -> (&Angle, &Angle) {
        (&self.a, &self.b)
    }

    pub fn has_endpoint(&self, x: &Angle) -> bool {
        &self.a == x || &self.b == x
    }

    /// Length of the shorter arc between the endpoints, in `(0, 1/2]`.
    pub fn length(&self) -> BigRational {
        let d = self.a.ccw_to(&self.b);
        let other = BigRational::one() - &d;
        if d <= other {
            d
        } else {
            other
        }
    }

    /// Whether the two chords meet inside the open disk without coinciding.
    pub fn crosses(&self, other: &Chord) -> bool {
        if self == other {
            return false;
        }
        let c_in = other.a.in_open_arc(&self.a, &self.b);
        let d_in = other.b.in_open_arc(&self.a, &self.b);
        let c_out = other.a.in_open_arc(&self.b, &self.a);
        let d_out = other.b.in_open_arc(&self.b, &self.a);
        (c_in && d_out) || (c_out && d_in)
    }

    /// Image under `σ_d`; `None` when the chord is critical.
    pub fn image(&self, d: Degree) -> Option<Chord> {
        Chord::new(sigma(d, &self.a), sigma(d, &self.b)).ok()
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}–{}", self.a, self.b)
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Chord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.a, &self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[Angle; 2]>::deserialize(d)?;
        Chord::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// Whether two chords cross (intersect in the open disk and do not coincide).
pub fn chords_cross(c1: &Chord, c2: &Chord) -> bool {
    c1.crosses(c2)
}

/// The critical chord `𝔠_θ` joining `θ + 1/3` and `θ + 2/3`.
pub fn critical_chord(theta: &Angle) -> Chord {
    Chord::new(theta.shift(1, 3), theta.shift(2, 3)).expect("endpoints differ by 1/3")
}
