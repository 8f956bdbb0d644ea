//! Dynamical plane of `f(z) = λz + bz² + z³`: escape, Green function,
//! Böttcher coordinate and dynamic rays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{sigma, Angle, Degree};
use crate::config::Config;
use crate::error::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicMap {
    pub lambda: C,
    pub b: C,
    /// Roots of `3z² + 2bz + λ`.
    pub crit: [C; 2],
}

impl CubicMap {
    pub fn new(lambda: C, b: C) -> CubicMap {
        let r = (b * b - 3.0 * lambda).sqrt();
        CubicMap {
            lambda,
            b,
            crit: [(-b + r) / 3.0, (-b - r) / 3.0],
        }
    }

    /// Whether `|λ| ≤ 1`, the regime in which one critical point stays bounded.
    pub fn lambda_in_disk(&self) -> bool {
        self.lambda.norm() <= 1.0 + 1e-12
    }

    #[inline]
    pub fn eval(&self, z: C) -> C {
        z * (self.lambda + z * (self.b + z))
    }

    #[inline]
    pub fn deriv(&self, z: C) -> C {
        self.lambda + z * (2.0 * self.b + 3.0 * z)
    }

    /// The other preimage of `f(c)` for a critical point `c`.
    pub fn cocritical(&self, c: C) -> C {
        -self.b - 2.0 * c
    }

    /// `max(2, |λ| + |b| + 2)`: beyond this radius `|f(z)| > 2|z|`.
    pub fn escape_radius(&self) -> f64 {
        (self.lambda.norm() + self.b.norm() + 2.0).max(2.0)
    }

    /// `(fⁿ(z), (fⁿ)'(z))`.
    pub fn iterate_with_derivative(&self, z: C, n: usize) -> (C, C) {
        let (mut w, mut d) = (z, ONE);
        for _ in 0..n {
            d *= self.deriv(w);
            w = self.eval(w);
        }
        (w, d)
    }

    pub fn iterate(&self, z: C, n: usize) -> C {
        (0..n).fold(z, |w, _| self.eval(w))
    }
}

/// First `n` with `|fⁿ(z)| > radius`.
pub fn escape_time(f: &CubicMap, z: C, max_iter: usize, radius: f64) -> Option<usize> {
    let r2 = radius * radius;
    let mut w = z;
    for n in 0..=max_iter {
        if w.norm_sqr() > r2 {
            return Some(n);
        }
        w = f.eval(w);
    }
    None
}

/// `log(f(w)/w³)`, principal branch.
#[inline]
fn log_factor(f: &CubicMap, w: C) -> C {
    let u = w.inv();
    (ONE + u * (f.b + u * f.lambda)).ln()
}

/// `log(φ(z)/z)` by the product formula along the orbit of `z`.
fn bottcher_log_ratio(f: &CubicMap, z: C, cfg: &Config) -> Result<C> {
    let mut w = z;
    let mut acc = ZERO;
    let mut scale = 1.0 / 3.0;
    let mut n = 0usize;
    while w.norm() <= cfg.r_big {
        if n >= cfg.escape_iter || w == ZERO || !w.is_finite() {
            return Err(Error::NotEscaping);
        }
        acc += log_factor(f, w) * scale;
        w = f.eval(w);
        scale /= 3.0;
        n += 1;
    }
    loop {
        let t = log_factor(f, w) * scale;
        acc += t;
        if t.norm() < 1e-18 {
            break;
        }
        w = f.eval(w);
        scale /= 3.0;
        if !w.is_finite() {
            break;
        }
    }
    Ok(acc)
}

/// The Böttcher coordinate `φ(z) = z·Π(f(w_k)/w_k³)^{1/3^{k+1}}`.
pub fn bottcher(f: &CubicMap, z: C, cfg: &Config) -> Result<C> {
    Ok(z * bottcher_log_ratio(f, z, cfg)?.exp())
}

/// Green function `G(z) = log|φ(z)|`; `None` if `z` does not escape.
pub fn green(f: &CubicMap, z: C, cfg: &Config) -> Option<f64> {
    bottcher_log_ratio(f, z, cfg)
        .ok()
        .map(|l| z.norm().ln() + l.re)
}

/// Inverse of `φ` near infinity (requires `|w|` large compared with `|b|`).
pub fn bottcher_inverse_far(f: &CubicMap, w: C, cfg: &Config) -> C {
    let mut z = w - f.b / 3.0;
    for _ in 0..60 {
        let phi = match bottcher(f, z, cfg) {
            Ok(p) => p,
            Err(_) => break,
        };
        let e = w - phi;
        z += e;
        if e.norm() <= 1e-16 * w.norm() {
            break;
        }
    }
    z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RayStatus {
    Landed(C),
    Crashed(C),
    MaxDepth,
}

/// A traced ray: points ordered by decreasing potential `G = G₀·3^{−level}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub theta: Angle,
    pub levels: Vec<f64>,
    pub potentials: Vec<f64>,
    pub points: Vec<C>,
    pub status: RayStatus,
}

impl RayTrace {
    pub fn tip(&self) -> C {
        *self.points.last().expect("traces are never empty")
    }

    /// Diameter of the points with level at least `from`.
    pub fn tail_diameter(&self, from: f64) -> f64 {
        let tail: Vec<C> = self
            .levels
            .iter()
            .zip(&self.points)
            .filter(|(s, _)| **s >= from - 1e-12)
            .map(|(_, z)| *z)
            .collect();
        let mut d: f64 = 0.0;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Linear interpolation of the trace at an intermediate level.
    pub fn at_level(&self, s: f64) -> Option<C> {
        let i = self.levels.partition_point(|&x| x < s - 1e-12);
        if i == self.levels.len() {
            return None;
        }
        if (self.levels[i] - s).abs() < 1e-12 {
            return Some(self.points[i]);
        }
        if i == 0 {
            return None;
        }
        let (s0, s1) = (self.levels[i - 1], self.levels[i]);
        let t = (s - s0) / (s1 - s0);
        Some(self.points[i - 1] * (1.0 - t) + self.points[i] * t)
    }
}

/// `3ⁿθ mod 1` as `f64` for `n = 0..=n_max`, computed exactly.
pub(crate) fn tripled_angles(theta: &Angle, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut a = theta.clone();
    for _ in 0..=n_max {
        out.push(a.to_f64());
        a = sigma(Degree::Three, &a);
    }
    out
}

pub(crate) fn cis(turns: f64) -> C {
    let t = std::f64::consts::TAU * turns;
    C::new(t.cos(), t.sin())
}

/// Outcome of one continuation step requested by [`follow_ray`].
pub(crate) enum StepCheck {
    Continue,
    Stop(RayStatus),
}

/// Path following in the level `s`, with step halving on Newton failure or a
/// jump off the current branch. `breakpoints` are levels hit exactly.
#[allow(clippy::too_many_arguments)]
pub(crate) fn follow_ray(
    theta: &Angle,
    depth: f64,
    steps_per_level: usize,
    g0: f64,
    start: C,
    land_tol: f64,
    breakpoints: &[f64],
    mut solve: impl FnMut(f64, C) -> Option<C>,
    mut check: impl FnMut(f64, C) -> StepCheck,
) -> Result<RayTrace> {
    let nominal = 1.0 / steps_per_level as f64;
    let mut levels = vec![0.0];
    let mut potentials = vec![g0];
    let mut points = vec![start];
    let mut s = 0.0;
    let mut ds = nominal;
    let mut rate: Option<f64> = None;
    let mut bp = breakpoints.iter().copied().filter(|&x| x > 0.0).peekable();
    let mut status = RayStatus::MaxDepth;
    while s < depth - 1e-12 {
        while bp.peek().is_some_and(|&x| x <= s + 1e-12) {
            bp.next();
        }
        let mut target = (s + ds).min(depth);
        let mut at_break = false;
        if let Some(&x) = bp.peek() {
            if x <= target + 1e-12 {
                target = x;
                at_break = true;
            }
        }
        let h = target - s;
        let prev = *points.last().expect("non-empty");
        let accepted = solve(target, prev).filter(|z| {
            let jump = (z - prev).norm();
            match rate {
                None => true,
                Some(r) => jump <= 8.0 * r * h + 1e-9 * (1.0 + prev.norm()),
            }
        });
        match accepted {
            Some(z) => {
                let jump = (z - prev).norm();
                let new_rate = jump / h;
                rate = Some(match rate {
                    None => new_rate,
                    Some(r) => new_rate.max(0.25 * r),
                });
                s = target;
                levels.push(s);
                potentials.push(g0 * 3f64.powf(-s));
                points.push(z);
                if at_break {
                    bp.next();
                }
                ds = (ds * 2.0).min(nominal);
                if let StepCheck::Stop(st) = check(s, z) {
                    status = st;
                    break;
                }
            }
            None => {
                ds = h / 2.0;
                if ds < 1e-7 {
                    // Past the resolution of double precision: keep a converged tail.
                    let tail = RayTrace {
                        theta: theta.clone(),
                        levels,
                        potentials,
                        points,
                        status: RayStatus::MaxDepth,
                    };
                    if s >= 3.0 && tail.tail_diameter(s - 3.0) < land_tol {
                        return Ok(RayTrace {
                            status: RayStatus::Landed(tail.tip()),
                            ..tail
                        });
                    }
                    return Err(Error::NumericalStall(format!(
                        "ray {theta} stalled at level {s:.6}"
                    )));
                }
            }
        }
    }
    Ok(RayTrace {
        theta: theta.clone(),
        levels,
        potentials,
        points,
        status,
    })
}

/// Newton's method for `fⁿ(z) = target`, with residual damping.
pub(crate) fn newton_orbit(f: &CubicMap, n: usize, target: C, z0: C, cfg: &Config) -> Option<C> {
    let mut z = z0;
    let (mut w, mut d) = f.iterate_with_derivative(z, n);
    let mut res = (w - target).norm();
    // Rounding in fⁿ limits the attainable residual to roughly n·ε·|(fⁿ)'|·|z|.
    let floor = |d: C, z: C| 8.0 * f64::EPSILON * (n.max(1) as f64) * d.norm() * (1.0 + z.norm());
    for _ in 0..cfg.max_newton {
        if res <= 1e-15 * target.norm() || (res <= floor(d, z) && res <= 1e-6 * target.norm()) {
            return Some(z);
        }
        let mut step = (w - target) / d;
        if !step.is_finite() {
            return None;
        }
        let mut accepted = false;
        for _ in 0..12 {
            let zn = z - step;
            let (wn, dn) = f.iterate_with_derivative(zn, n);
            let rn = (wn - target).norm();
            if rn < res || rn <= 1e-15 * target.norm() {
                z = zn;
                w = wn;
                d = dn;
                res = rn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No descent possible: accept if the last full step was already tiny.
            return (step.norm() <= cfg.newton_tol * (1.0 + z.norm())).then_some(z);
        }
        if step.norm() <= cfg.newton_tol * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Traces the dynamic ray `R_f(θ)` from potential `G₀ = log R_big` down to
/// `G₀·3^{−depth}`.
pub fn trace_dynamic_ray(
    f: &CubicMap,
    theta: &Angle,
    depth: usize,
    steps_per_level: usize,
    cfg: &Config,
) -> Result<RayTrace> {
    if depth == 0 || steps_per_level == 0 {
        return Err(Error::InvalidArgument("depth and steps_per_level must be ≥ 1".into()));
    }
    let g0 = cfg.g0();
    let angles = tripled_angles(theta, depth + 1);
    let target = |s: f64| -> (usize, C) {
        let n = s.ceil().max(0.0) as usize;
        let r = (g0 * 3f64.powf(n as f64 - s)).exp();
        (n, bottcher_inverse_far(f, cis(angles[n]) * r, cfg))
    };
    let start = target(0.0).1;

    // Levels at which some iterate of the ray reaches the potential of an
    // escaping critical point.
    let mut crit_levels: Vec<(f64, usize, usize)> = Vec::new();
    for (ci, &c) in f.crit.iter().enumerate() {
        if let Some(gc) = green(f, c, cfg) {
            if gc > 0.0 {
                let s0 = (g0 / gc).ln() / 3f64.ln();
                for k in 0..=depth {
                    let s = s0 + k as f64;
                    if s > 0.0 && s <= depth as f64 {
                        crit_levels.push((s, k, ci));
                    }
                }
            }
        }
    }
    crit_levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let breakpoints: Vec<f64> = crit_levels.iter().map(|x| x.0).collect();

    let solve = |s: f64, guess: C| {
        let (n, w) = target(s);
        newton_orbit(f, n, w, guess, cfg)
    };
    let check = |s: f64, z: C| {
        for &(sc, k, ci) in &crit_levels {
            if (sc - s).abs() < 1e-12 {
                let c = f.crit[ci];
                let v = f.eval(c);
                let zk = f.iterate(z, k);
                if (f.eval(zk) - v).norm() < cfg.crash_tol * v.norm().max(1.0) {
                    return StepCheck::Stop(RayStatus::Crashed(z));
                }
            }
        }
        StepCheck::Continue
    };
    let mut trace = follow_ray(
        theta,
        depth as f64,
        steps_per_level,
        g0,
        start,
        cfg.land_tol,
        &breakpoints,
        solve,
        check,
    )?;
    if trace.status == RayStatus::MaxDepth
        && depth >= 3
        && trace.tail_diameter(depth as f64 - 3.0) < cfg.land_tol
    {
        trace.status = RayStatus::Landed(trace.tip());
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Landing {
    Landed(C),
    Crashed(C),
}

/// Default depth used by [`landing_point`].
pub const LANDING_DEPTH: usize = 36;

/// Landing point of `R_f(θ)`. For periodic `θ` the ray tip is polished to
/// the nearby periodic point of the same period.
pub fn landing_point(f: &CubicMap, theta: &Angle, cfg: &Config) -> Result<Landing> {
    let trace = trace_dynamic_ray(f, theta, LANDING_DEPTH, cfg.steps_per_level, cfg)?;
    if let RayStatus::Crashed(z) = trace.status {
        return Ok(Landing::Crashed(z));
    }
    let tip = trace.tip();
    let ot = theta.orbit_type(Degree::Three);
    if !ot.is_periodic() {
        return Ok(Landing::Landed(tip));
    }
    let p = ot.period;
    let polished = periodic_point_near(f, tip, p, cfg).filter(|z| (z - tip).norm() < 1e-3);
    let z = polished.unwrap_or(tip);
    let residual = (f.iterate(z, p) - z).norm();
    if residual > 1e-6 {
        return Err(Error::NumericalStall(format!(
            "landing point of {theta} is not {p}-periodic (residual {residual:e})"
        )));
    }
    Ok(Landing::Landed(z))
}

/// Newton's method for `fᵖ(z) = z`.
pub fn periodic_point_near(f: &CubicMap, z0: C, p: usize, cfg: &Config) -> Option<C> {
    let mut z = z0;
    for _ in 0..cfg.max_newton {
        let (w, d) = f.iterate_with_derivative(z, p);
        let step = (w - z) / (d - ONE);
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= cfg.newton_tol * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Multiplier `(fᵖ)'(z)`.
pub fn cycle_multiplier(f: &CubicMap, z: C, p: usize) -> C {
    f.iterate_with_derivative(z, p).1
}
