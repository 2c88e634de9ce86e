//! JSON encodings of fiber points, decompositions and neck paths.

use num_complex::Complex;
use serde_json::{json, Value};

use crate::curve_families::{CircleShape, FiberPoint, NeckPath, ThickThinDecomposition};
use crate::projective::ProjPoint;

fn pair(z: Complex<f64>) -> Value {
    json!([z.re, z.im])
}

fn unpair(v: &Value) -> Option<Complex<f64>> {
    let a = v.as_array()?;
    match a.as_slice() {
        [re, im] => Some(Complex::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

/// `[[[x_re, x_im], [y_re, y_im]], ...]`, one homogeneous pair per vertex.
pub fn fiber_point_json(q: &FiberPoint<f64>) -> Value {
    Value::Array(q.coords.iter().map(|p| json!([pair(p.x()), pair(p.y())])).collect())
}

pub fn parse_fiber_point(v: &Value) -> Result<FiberPoint<f64>, String> {
    let coords = v.as_array().ok_or("fiber point must be an array")?;
    let mut out = Vec::with_capacity(coords.len());
    for (i, c) in coords.iter().enumerate() {
        let xy = c.as_array().filter(|a| a.len() == 2).ok_or(format!("coordinate {i} must be [x, y]"))?;
        let (x, y) = (unpair(&xy[0]), unpair(&xy[1]));
        let (x, y) = x.zip(y).ok_or(format!("coordinate {i} must hold two [re, im] pairs"))?;
        out.push(ProjPoint::new(x, y).map_err(|_| format!("coordinate {i} is the zero vector"))?);
    }
    Ok(FiberPoint { coords: out })
}

pub fn decomposition_json(d: &ThickThinDecomposition<f64>) -> Value {
    let t = d.point().tree();
    let circles: Vec<Value> = d
        .circles
        .iter()
        .map(|c| match c.shape {
            CircleShape::Unit => json!({"vertex": c.vertex, "edge": c.edge, "shape": "unit"}),
            CircleShape::Disc { center, radius } => {
                json!({"vertex": c.vertex, "edge": c.edge, "shape": "disc", "center": pair(center), "radius": radius})
            }
        })
        .collect();
    let dilation: Vec<Value> = (0..t.n_vertices()).map(|v| json!(d.max_disjoint_dilation(v))).collect();
    json!({
        "circles": circles,
        "regions": d.regions,
        "max_disjoint_dilation": dilation,
        "max_child_extent": d.max_child_extent(),
    })
}

pub fn neck_path_json(path: &NeckPath<f64>) -> Value {
    json!({
        "edge": path.edge,
        "pieces": path.path.pieces.len(),
        "round_length": path.round_length,
        "flat_length": path.flat_length,
        "dist_e": path.dist_e,
        "bound": path.bound,
        "within_bound": path.round_length <= path.bound,
    })
}
