//! Parameter plane of the slice `λ = const`: the map `Φ_λ`, slice rendering
//! and parameter rays.

use std::cell::Cell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::config::Config;
use crate::dynamics::{
    bottcher, bottcher_inverse_far, cis, escape_time, follow_ray, green, tripled_angles,
    CubicMap, RayStatus, RayTrace, StepCheck,
};
use crate::error::{Error, Result};
use crate::finite_gaps::is_special;
use crate::multiplier::{tpoly, tpoly_roots, MAX_TPOLY_PERIOD};
use crate::q_atlas::QHole;

type C = Complex64;

/// Index into [`CubicMap::crit`] of the escaping critical point `ω₂`.
///
/// `None` when neither critical point escapes; [`Error::Undetermined`] when
/// both escape at the same rate.
pub fn omega2_index(f: &CubicMap, cfg: &Config) -> Result<Option<usize>> {
    let g: Vec<Option<f64>> = f.crit.iter().map(|&c| green(f, c, cfg)).collect();
    match (g[0], g[1]) {
        (None, None) => Ok(None),
        (Some(_), None) => Ok(Some(0)),
        (None, Some(_)) => Ok(Some(1)),
        (Some(a), Some(b)) => {
            if (a - b).abs() <= 1e-12 * a.max(b) {
                Err(Error::Undetermined)
            } else if a > b {
                Ok(Some(0))
            } else {
                Ok(Some(1))
            }
        }
    }
}

/// `Φ_λ(b) = φ_f(ω₂*)`, or `None` when both critical orbits stay bounded.
pub fn phi_param(lambda: C, b: C, cfg: &Config) -> Result<Option<C>> {
    let f = CubicMap::new(lambda, b);
    match omega2_index(&f, cfg)? {
        None => Ok(None),
        Some(i) => bottcher(&f, f.cocritical(f.crit[i]), cfg).map(Some),
    }
}

/// Deviation of `arg Φ_λ(b)` from `2πθ`, measured at the first iterate of
/// `ω₂*` beyond `R_big` and scaled back by `3^{−n}` (radians).
pub fn arg_residual(lambda: C, b: C, theta: &Angle, cfg: &Config) -> Result<f64> {
    let f = CubicMap::new(lambda, b);
    let i = omega2_index(&f, cfg)?.ok_or(Error::NotEscaping)?;
    let mut w = f.cocritical(f.crit[i]);
    let mut n = 0;
    while w.norm() <= cfg.r_big {
        if n >= cfg.escape_iter {
            return Err(Error::NotEscaping);
        }
        w = f.eval(w);
        n += 1;
    }
    let angles = tripled_angles(theta, n);
    let phi = bottcher(&f, w, cfg)?;
    let d = (phi * cis(-angles[n])).arg();
    Ok(d.abs() / 3f64.powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub lambda: C,
    pub center: C,
    pub width: f64,
    pub resolution: (u32, u32),
    pub max_iter: usize,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidArgument(format!("width {}", self.width)));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return Err(Error::InvalidArgument("empty resolution".into()));
        }
        Ok(())
    }

    /// Parameter at the center of pixel `(i, j)`, row 0 at the top.
    pub fn pixel_to_b(&self, i: u32, j: u32) -> C {
        let (w, h) = (self.resolution.0 as f64, self.resolution.1 as f64);
        let px = self.width / w;
        C::new(
            self.center.re + (i as f64 + 0.5 - w / 2.0) * px,
            self.center.im + (h / 2.0 - j as f64 - 0.5) * px,
        )
    }

    /// Pixel containing `b`, if inside the window.
    pub fn b_to_pixel(&self, b: C) -> Option<(u32, u32)> {
        let (w, h) = (self.resolution.0 as f64, self.resolution.1 as f64);
        let px = self.width / w;
        let x = (b.re - self.center.re) / px + w / 2.0;
        let y = h / 2.0 - (b.im - self.center.im) / px;
        (x >= 0.0 && y >= 0.0 && x < w && y < h).then_some((x as u32, y as u32))
    }
}

/// Escape time of the faster-escaping critical orbit; `None` inside `𝓒_λ`
/// (up to the iteration budget).
pub fn slice_escape(lambda: C, b: C, max_iter: usize) -> Option<usize> {
    let f = CubicMap::new(lambda, b);
    let r = f.escape_radius();
    let e0 = escape_time(&f, f.crit[0], max_iter, r);
    let e1 = escape_time(&f, f.crit[1], max_iter, r);
    match (e0, e1) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB triples.
    pub pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn get(&self, i: u32, j: u32) -> [u8; 3] {
        self.pixels[(j * self.width + i) as usize]
    }

    fn put(&mut self, i: u32, j: u32, c: [u8; 3]) {
        let k = (j * self.width + i) as usize;
        self.pixels[k] = c;
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overlays {
    pub rays: Vec<Vec<C>>,
    pub marks: Vec<C>,
}

pub const INTERIOR: [u8; 3] = [0, 0, 0];
const RAY_COLOR: [u8; 3] = [255, 255, 255];
const MARK_COLOR: [u8; 3] = [230, 30, 30];

fn palette(n: usize) -> [u8; 3] {
    let t = (n % 64) as f64 / 64.0;
    let tri = |x: f64| (1.0 - (2.0 * x - 1.0).abs()).clamp(0.0, 1.0);
    [
        (60.0 + 195.0 * tri(t)) as u8,
        (40.0 + 160.0 * tri((t + 0.33) % 1.0)) as u8,
        (90.0 + 165.0 * tri((t + 0.66) % 1.0)) as u8,
    ]
}

pub fn render_slice(spec: &SliceSpec, overlays: &Overlays) -> Result<Raster> {
    spec.validate()?;
    let (w, h) = spec.resolution;
    let pixels: Vec<[u8; 3]> = (0..h)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..w).map(move |i| {
                match slice_escape(spec.lambda, spec.pixel_to_b(i, j), spec.max_iter) {
                    None => INTERIOR,
                    Some(n) => palette(n),
                }
            })
        })
        .collect();
    let mut raster = Raster {
        width: w,
        height: h,
        pixels,
    };
    let px = spec.width / w as f64;
    for ray in &overlays.rays {
        for seg in ray.windows(2) {
            let steps = (((seg[1] - seg[0]).norm() / px).ceil() as usize).clamp(1, 4096);
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                if let Some((i, j)) = spec.b_to_pixel(seg[0] * (1.0 - t) + seg[1] * t) {
                    raster.put(i, j, RAY_COLOR);
                }
            }
        }
    }
    for &m in &overlays.marks {
        if let Some((i, j)) = spec.b_to_pixel(m) {
            for dj in -2i64..=2 {
                for di in -2i64..=2 {
                    let (x, y) = (i as i64 + di, j as i64 + dj);
                    if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
                        raster.put(x as u32, y as u32, MARK_COLOR);
                    }
                }
            }
        }
    }
    Ok(raster)
}

/// Ray level `s` at which the potential `G₀·3^{−s}` equals `potential`.
pub fn level_for_potential(potential: f64, cfg: &Config) -> f64 {
    (cfg.g0() / potential).ln() / 3f64.ln()
}

/// Asymptotic ratio `Φ_λ(b)/b` for large `b`.
pub fn phi_asymptotic_ratio() -> f64 {
    (4.0f64 / 27.0).cbrt()
}

struct ParamSolution {
    b: C,
    omega2: C,
}

/// Newton's method in `b` for `f_bⁿ(ω₂*(b)) = φ_b^{-1}(e^{G}·e^{2πiα})`,
/// `G = g_n`, with `ω₂` continued from `omega_ref`.
fn param_newton(
    lambda: C,
    n: usize,
    g_n: f64,
    alpha: f64,
    b0: C,
    omega_ref: C,
    cfg: &Config,
) -> Option<ParamSolution> {
    let target_phi = cis(alpha) * g_n.exp();
    let eval = |b: C, omega_ref: C| -> Option<(C, C, C)> {
        let f = CubicMap::new(lambda, b);
        let r = (b * b - 3.0 * lambda).sqrt();
        let (omega2, sign) = if (f.crit[0] - omega_ref).norm() <= (f.crit[1] - omega_ref).norm() {
            (f.crit[0], 1.0)
        } else {
            (f.crit[1], -1.0)
        };
        let d_omega2 = (sign * b / r - 1.0) / 3.0;
        let mut x = f.cocritical(omega2);
        let mut dx = -1.0 - 2.0 * d_omega2;
        for _ in 0..n {
            dx = f.deriv(x) * dx + x * x;
            x = f.eval(x);
        }
        let wstar = bottcher_inverse_far(&f, target_phi, cfg);
        // dw*/db ≈ −1/3 for |w*| ≫ |b|.
        let res = x - wstar;
        let d = dx + 1.0 / 3.0;
        (res.is_finite() && d.is_finite()).then_some((res, d, omega2))
    };
    let mut b = b0;
    let (mut res, mut d, mut om) = eval(b, omega_ref)?;
    let scale = target_phi.norm();
    for _ in 0..cfg.max_newton {
        if res.norm() <= 1e-15 * scale {
            return Some(ParamSolution { b, omega2: om });
        }
        let mut step = res / d;
        let mut accepted = false;
        for _ in 0..12 {
            let bn = b - step;
            if let Some((rn, dn, on)) = eval(bn, om) {
                if rn.norm() < res.norm() {
                    b = bn;
                    res = rn;
                    d = dn;
                    om = on;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.norm() <= cfg.newton_tol * (1.0 + b.norm()) {
            let tiny = step.norm() <= cfg.newton_tol * (1.0 + b.norm());
            return tiny.then_some(ParamSolution { b, omega2: om });
        }
    }
    None
}

/// Traces the parameter ray `𝓡_λ(θ)` down to level `depth` (potential
/// `G₀·3^{−depth}` of `Φ_λ`).
pub fn trace_param_ray_to_level(
    lambda: C,
    theta: &Angle,
    depth: f64,
    cfg: &Config,
) -> Result<RayTrace> {
    if depth.is_nan() || depth <= 0.0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    let g0 = cfg.g0();
    let n_max = depth.ceil() as usize + 1;
    let angles = tripled_angles(theta, n_max);
    let level = |s: f64| -> (usize, f64) {
        let n = (s.ceil() as usize).max(1);
        (n, g0 * 3f64.powf(n as f64 - s))
    };
    let b_start = cis(angles[0]) * cfg.r_big / phi_asymptotic_ratio();
    let (n, g) = level(0.0);
    let start = param_newton(lambda, n, g, angles[n], b_start, -2.0 * b_start / 3.0, cfg)
        .ok_or_else(|| Error::NumericalStall(format!("parameter ray {theta} failed to start")))?;
    let omega = Cell::new(start.omega2);
    let pending = Cell::new(start.omega2);
    let solve = |s: f64, guess: C| {
        let (n, g) = level(s);
        param_newton(lambda, n, g, angles[n], guess, omega.get(), cfg).map(|sol| {
            pending.set(sol.omega2);
            sol.b
        })
    };
    let check = |_s: f64, _b: C| {
        omega.set(pending.get());
        StepCheck::Continue
    };
    let mut trace = follow_ray(
        theta,
        depth,
        cfg.steps_per_level,
        g0,
        start.b,
        cfg.land_tol,
        &[],
        solve,
        check,
    )?;
    let decades = 1000f64.ln() / 3f64.ln();
    if trace.status == RayStatus::MaxDepth
        && depth >= decades
        && trace.tail_diameter(depth - decades) < 10.0 * cfg.land_tol
    {
        trace.status = RayStatus::Landed(trace.tip());
    }
    Ok(trace)
}

/// Traces `𝓡_λ(θ)` through `depth` whole levels.
pub fn trace_param_ray(lambda: C, theta: &Angle, depth: usize, cfg: &Config) -> Result<RayTrace> {
    trace_param_ray_to_level(lambda, theta, depth as f64, cfg)
}

/// Level to which [`wake_check`] continues each ray before extrapolating.
pub const WAKE_LANDING_DEPTH: f64 = 600.0;

const EXTRAPOLATION_NODES: usize = 5;

/// Limit of the ray at potential 0, extrapolated from the trace.
///
/// Near a parabolic root `b(G) − b_root` has an expansion in powers of
/// `u = (ln 1/G)^{−1/2}`; the estimate is the Neville interpolant through
/// evenly spaced levels of the last four fifths of the trace, evaluated at `u = 0`.
pub fn landing_estimate(trace: &RayTrace, cfg: &Config) -> Result<C> {
    let top = *trace.levels.last().expect("traces are never empty");
    if top < 10.0 {
        return Err(Error::InvalidArgument(format!(
            "trace of {} too shallow for a landing estimate (level {top})",
            trace.theta
        )));
    }
    let mut us = Vec::with_capacity(EXTRAPOLATION_NODES);
    let mut bs = Vec::with_capacity(EXTRAPOLATION_NODES);
    for k in 1..=EXTRAPOLATION_NODES {
        let s = top * k as f64 / EXTRAPOLATION_NODES as f64;
        let b = trace.at_level(s).ok_or_else(|| {
            Error::NumericalStall(format!("trace of {} has no level {s}", trace.theta))
        })?;
        let log_inv_g = s * 3f64.ln() - cfg.g0().ln();
        us.push(log_inv_g.powf(-0.5));
        bs.push(b);
    }
    Ok(neville_at_zero(&us, &mut bs))
}

fn neville_at_zero(x: &[f64], p: &mut [C]) -> C {
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (p[i] * x[i + k] - p[i + 1] * x[i]) / (x[i + k] - x[i]);
        }
    }
    p[0]
}

/// `(p, q)` with `λ = e^{2πip/q}` for some `q ≤` [`MAX_TPOLY_PERIOD`].
pub fn root_of_unity(lambda: C) -> Option<(u64, u64)> {
    (1..=MAX_TPOLY_PERIOD).find_map(|q| {
        let turns = lambda.arg() / std::f64::consts::TAU * q as f64;
        let p = turns.round().rem_euclid(q as f64) as u64;
        let exact = C::from_polar(1.0, std::f64::consts::TAU * p as f64 / q as f64);
        ((lambda - exact).norm() < 1e-12).then_some((p, q))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpqMatch {
    pub p: u64,
    pub q: u64,
    pub root: C,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WakeCheck {
    pub hole: QHole,
    pub lambda: C,
    /// Level of the requested potential.
    pub depth: f64,
    /// Ray points at `depth`.
    pub tip1: C,
    pub tip2: C,
    /// Level the rays were continued to for the landing estimates.
    pub achieved_depth: f64,
    pub landing1: C,
    pub landing2: C,
    pub separation: f64,
    pub tpq_match: Option<TpqMatch>,
    pub pass: bool,
}

/// Traces both boundary rays of the wake of `hole` and compares their
/// landing estimates.
pub fn wake_check(lambda: C, hole: &QHole, depth: f64, cfg: &Config) -> Result<WakeCheck> {
    if lambda.norm().is_nan() || lambda.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("|λ| > 1 for λ = {lambda}")));
    }
    let deep = depth.max(WAKE_LANDING_DEPTH);
    let traces = [&hole.theta1, &hole.theta2]
        .par_iter()
        .map(|t| trace_param_ray_to_level(lambda, t, deep, cfg))
        .collect::<Result<Vec<_>>>()?;
    let achieved_depth = traces
        .iter()
        .map(|t| *t.levels.last().expect("traces are never empty"))
        .fold(f64::INFINITY, f64::min);
    let at = |t: &RayTrace| {
        t.at_level(depth)
            .ok_or_else(|| Error::NumericalStall(format!("ray {} stopped above level {depth}", t.theta)))
    };
    let (tip1, tip2) = (at(&traces[0])?, at(&traces[1])?);
    let landing1 = landing_estimate(&traces[0], cfg)?;
    let landing2 = landing_estimate(&traces[1], cfg)?;
    let separation = (landing1 - landing2).norm();
    let tpq_match = match root_of_unity(lambda) {
        Some((p, q)) if is_special(hole, p, q) => {
            let mid = (landing1 + landing2) / 2.0;
            tpoly_roots(&tpoly(p, q)?)?
                .into_iter()
                .map(|r| (r, (r - mid).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(root, distance)| TpqMatch { p, q, root, distance })
        }
        _ => None,
    };
    Ok(WakeCheck {
        hole: hole.clone(),
        lambda,
        depth,
        tip1,
        tip2,
        achieved_depth,
        landing1,
        landing2,
        separation,
        tpq_match,
        pass: separation < cfg.wake_tol,
    })
}
