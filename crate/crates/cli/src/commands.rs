use std::path::Path;

use cubioid_core::dynamics::{trace_dynamic_ray, CubicMap, RayTrace};
use cubioid_core::finite_gaps::{enumerate_type_d, type_d_major_to_qhole, MAX_ROTATION_PERIOD};
use cubioid_core::multiplier::{tpoly, tpoly_roots};
use cubioid_core::param::{
    level_for_potential, render_slice, trace_param_ray_to_level, wake_check, Overlays, SliceSpec,
};
use cubioid_core::q_atlas::{enumerate_holes, render_q, QHole};
use cubioid_core::quad_gaps::{GapType, QuadGap};
use cubioid_core::Angle;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::output::{write_csv, write_json, write_png, write_svg, Header};
use crate::Command;

pub fn dispatch(cmd: &Command, header: &Header) -> Result<(), CliError> {
    match cmd {
        Command::QAtlas {
            max_period,
            out,
            svg,
            size,
        } => {
            let atlas = enumerate_holes(*max_period)?;
            if let Some(path) = svg {
                write_svg(path, header, &render_q(&atlas, *size)?)?;
            }
            write_json(out.as_deref(), header, "q-atlas", &atlas)
        }
        Command::Gaps {
            theta,
            depth,
            max_period,
            psi,
            vassal,
            out,
        } => gaps(theta, *depth, *max_period, psi, *vassal, out.as_deref(), header),
        Command::Typed { rotation, out } => typed(*rotation, out.as_deref(), header),
        Command::Tpoly {
            rotation,
            roots,
            out,
        } => {
            let t = tpoly(rotation.0, rotation.1)?;
            let r = if *roots { Some(tpoly_roots(&t)?) } else { None };
            let result = json!({
                "p": t.p,
                "q": t.q,
                "degree": t.degree(),
                "coefficients": t.coefficients,
                "roots": r,
            });
            write_json(out.as_deref(), header, "tpoly", &result)
        }
        Command::TraceRay {
            lambda,
            b,
            param,
            theta,
            depth,
            potential,
            out,
        } => {
            let level = match potential {
                Some(p) if p.is_nan() || *p <= 0.0 => {
                    return Err(CliError::Usage(format!("--potential must be positive, got {p}")))
                }
                Some(p) => level_for_potential(*p, &header.config),
                None => *depth,
            };
            let cfg = &header.config;
            let (plane, trace) = match (param, b) {
                (true, _) => ("parameter", trace_param_ray_to_level(*lambda, theta, level, cfg)?),
                (false, Some(b)) => {
                    let f = CubicMap::new(*lambda, *b);
                    let whole = level.ceil().max(1.0) as usize;
                    ("dynamic", trace_dynamic_ray(&f, theta, whole, cfg.steps_per_level, cfg)?)
                }
                (false, None) => return Err(CliError::Usage("either --b or --param is required".into())),
            };
            trace_csv(out.as_deref(), header, plane, *lambda, *b, &trace)
        }
        Command::RenderSlice {
            lambda,
            center,
            width,
            res,
            max_iter,
            rays,
            ray_potential,
            tpoly: tp,
            png,
        } => {
            let spec = SliceSpec {
                lambda: *lambda,
                center: *center,
                width: *width,
                resolution: *res,
                max_iter: *max_iter,
            };
            render(&spec, rays, *ray_potential, *tp, png, header)
        }
        Command::WakeCheck {
            lambda,
            hole,
            potential,
            json: out,
        } => {
            if potential.is_nan() || *potential <= 0.0 {
                return Err(CliError::Usage(format!("--potential must be positive, got {potential}")));
            }
            let hole = QHole::new(hole.0.clone(), hole.1.clone())?;
            let depth = level_for_potential(*potential, &header.config);
            let check = wake_check(*lambda, &hole, depth, &header.config)?;
            let result = json!({ "potential": potential, "check": check });
            write_json(out.as_deref(), header, "wake-check", &result)
        }
    }
}

fn gaps(
    theta: &Angle,
    depth: usize,
    max_period: usize,
    psi: &[Angle],
    vassal: bool,
    out: Option<&Path>,
    header: &Header,
) -> Result<(), CliError> {
    let gap = QuadGap::new(theta, max_period)?;
    let psi_values = psi
        .iter()
        .map(|a| Ok(json!({ "vertex": a, "psi": gap.psi(a)? })))
        .collect::<Result<Vec<_>, CliError>>()?;
    let vassal = if vassal {
        if gap.gap_type != GapType::Periodic {
            return Err(CliError::Usage(format!("{theta} generates a {} gap; --vassal needs a periodic one", gap.gap_type)));
        }
        Some(gap.vassal(depth)?.vertices)
    } else {
        None
    };
    let result = json!({
        "gap": gap.to_export(depth),
        "hole": gap.hole,
        "psi": psi_values,
        "vassal_vertices": vassal,
    });
    write_json(out, header, "gaps", &result)
}

fn typed(rotation: (u64, u64), out: Option<&Path>, header: &Header) -> Result<(), CliError> {
    let (p, q) = rotation;
    if q > MAX_ROTATION_PERIOD {
        return Err(cubioid_core::Error::BoundExceeded {
            what: "rotation period",
            value: q as usize,
            limit: MAX_ROTATION_PERIOD as usize,
        }
        .into());
    }
    let gaps = enumerate_type_d(p, q)?;
    let atlas = enumerate_holes(q as usize)?;
    let entries = gaps
        .iter()
        .map(|g| {
            let holes = (0..g.majors.len())
                .map(|i| type_d_major_to_qhole(g, i, &atlas).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "gap": g, "parameter_holes": holes }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let result = json!({ "p": p, "q": q, "count": gaps.len(), "gaps": entries });
    write_json(out, header, "typed", &result)
}

#[derive(Serialize)]
struct RayRow {
    level: f64,
    potential: f64,
    re: f64,
    im: f64,
}

fn trace_csv(
    out: Option<&Path>,
    header: &Header,
    plane: &str,
    lambda: Complex64,
    b: Option<Complex64>,
    trace: &RayTrace,
) -> Result<(), CliError> {
    let meta = json!({
        "plane": plane,
        "lambda": lambda,
        "b": b,
        "theta": trace.theta,
        "status": trace.status,
    });
    let rows = (0..trace.points.len()).map(|i| RayRow {
        level: trace.levels[i],
        potential: trace.potentials[i],
        re: trace.points[i].re,
        im: trace.points[i].im,
    });
    write_csv(out, header, &meta, rows)
}

fn render(
    spec: &SliceSpec,
    rays: &[Angle],
    ray_potential: f64,
    tp: Option<(u64, u64)>,
    png: &Path,
    header: &Header,
) -> Result<(), CliError> {
    if ray_potential.is_nan() || ray_potential <= 0.0 {
        return Err(CliError::Usage(format!("--ray-potential must be positive, got {ray_potential}")));
    }
    let cfg = &header.config;
    let level = level_for_potential(ray_potential, cfg);
    let traces = rays
        .par_iter()
        .map(|t| trace_param_ray_to_level(spec.lambda, t, level, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let marks = match tp {
        Some((p, q)) => tpoly_roots(&tpoly(p, q)?)?,
        None => Vec::new(),
    };
    let overlays = Overlays {
        rays: traces.iter().map(|t| t.points.clone()).collect(),
        marks: marks.clone(),
    };
    let raster = render_slice(spec, &overlays)?;
    let meta = json!({
        "slice": spec,
        "rays": rays,
        "ray_potential": ray_potential,
        "tpoly": tp,
        "marks": marks,
        "interior": "no critical orbit escaped within max_iter; an over-approximation of the connectedness locus",
    });
    write_png(png, header, &meta, &raster)?;
    let sidecar = png.with_extension("json");
    write_json(Some(&sidecar), header, "render-slice", &meta)
}
