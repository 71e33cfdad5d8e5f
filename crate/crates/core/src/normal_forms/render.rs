//! Planar images of detected singular sets: polylines, SVG and CSV.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::detect::{Detection, GridSpec, SampleClass, Tolerances};
use super::{LocalMap, MapKind};

/// A polyline in the target plane with marked cusp images.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<[f64; 2]>,
    pub cusps: Vec<[f64; 2]>,
}

/// Image of the detected singular set as a single polyline ordered along the
/// curve (by `x` for the swallow's tail and cusp, by `t` otherwise).
pub fn trace_curves(map: &LocalMap, detection: &Detection) -> Vec<Curve> {
    if detection.samples.is_empty() {
        return Vec::new();
    }
    let key = match map.kind {
        MapKind::SwallowTail { .. } | MapKind::Cusp { .. } => 1,
        _ => 0,
    };
    let mut samples: Vec<_> = detection.samples.iter().collect();
    samples.sort_by(|a, b| a.point[key].total_cmp(&b.point[key]).then(a.point[0].total_cmp(&b.point[0])));
    let image = |p: &[f64]| [p[0], map.h(p[0], &p[1..])];
    let points = samples.iter().map(|s| image(&s.point)).collect();
    let cusps = samples.iter().filter(|s| s.class == SampleClass::CuspCandidate).map(|s| image(&s.point)).collect();
    vec![Curve { points, cusps }]
}

fn num(v: f64, digits: usize) -> String {
    let s = format!("{v:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Deterministic SVG 1.1 drawing; the `y` axis points up.
pub fn render_svg(curves: &[Curve]) -> String {
    let all: Vec<[f64; 2]> = curves.iter().flat_map(|c| c.points.iter().chain(&c.cusps)).copied().collect();
    let (x0, y0, w, h) = if all.is_empty() {
        (-1.0, -1.0, 2.0, 2.0)
    } else {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &all {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let pad = |k: usize| (0.05 * (hi[k] - lo[k])).max(0.1);
        let (px, py) = (pad(0), pad(1));
        (lo[0] - px, -hi[1] - py, hi[0] - lo[0] + 2.0 * px, hi[1] - lo[1] + 2.0 * py)
    };
    let r = 0.01 * w.max(h);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"600\">",
        num(x0, 6),
        num(y0, 6),
        num(w, 6),
        num(h, 6)
    );
    out.push_str("<style>.fold{fill:none;stroke:#1f4e79;stroke-width:2;vector-effect:non-scaling-stroke}.cusp{fill:#c0392b}</style>\n");
    for c in curves {
        if !c.points.is_empty() {
            let pts: Vec<String> = c.points.iter().map(|p| format!("{},{}", num(p[0], 6), num(-p[1], 6))).collect();
            let _ = writeln!(out, "<polyline class=\"fold\" points=\"{}\"/>", pts.join(" "));
        }
        for p in &c.cusps {
            let _ = writeln!(out, "<circle class=\"cusp\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(p[0], 6), num(-p[1], 6), num(r, 6));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One row per sample: `t,<fibre coordinates>,residual,class`.
pub fn samples_to_csv(map: &LocalMap, detection: &Detection) -> String {
    let mut out = String::from("t,");
    for label in map.fibre_labels() {
        out.push_str(&label);
        out.push(',');
    }
    out.push_str("residual,class\n");
    for s in &detection.samples {
        for v in &s.point {
            out.push_str(&num(*v, 12));
            out.push(',');
        }
        let _ = writeln!(out, "{:.3e},{}", s.residual, s.class);
    }
    out
}

/// Everything needed to reproduce a trace run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub map: LocalMap,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    pub samples: usize,
    pub cusps: usize,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(map: &LocalMap, grid: &GridSpec, tolerances: &Tolerances, detection: &Detection, outputs: Vec<String>) -> Self {
        Self {
            map: map.clone(),
            grid: *grid,
            tolerances: *tolerances,
            samples: detection.samples.len(),
            cusps: detection.cusps().count(),
            outputs,
        }
    }
}
