//! Decorations: the marked sections together with three points on every circle Γ_{v,e}.

use num_complex::Complex;

use super::fiber::{embed, embedded_distance, propagate, split_fiber, FiberPoint};
use super::{require_compact, CompactnessParams, CurveError, ModuliPoint};
use crate::projective::{cube_roots_of_unity, ProjPoint};
use crate::scalar::Scalar;

/// Radius of the circle at the root vertex carrying the filler points.
pub const FILL_RADIUS: f64 = 0.9;
pub const MAX_FILL_SKIPS: usize = 64;
const MIN_SEPARATION: f64 = 1e-6;

/// The fiber point q with π_{v,e}(q) = `target`.
pub fn inverse_projection<T: Scalar>(p: &ModuliPoint<T>, v: usize, e: usize, target: ProjPoint<T>) -> Result<FiberPoint<T>, CurveError> {
    let t = p.tree();
    if e >= t.n_edges() || !t.tree().endpoints(e).contains(&v) {
        return Err(CurveError::NotChildEdge { vertex: v, edge: e });
    }
    let at_v = if t.negative(e) == Some(v) {
        let k = p.coord(e).expect("child edge");
        ProjPoint::new(k.z * target.y() + k.rho * target.x(), target.y())?
    } else {
        target
    };
    propagate(p, v, at_v, None)
}

/// Fraction in [0, 1) used to offset the k-th pass over the fill angles: 0, 1/2, 1/4, 3/4, ...
fn pass_offset(k: usize) -> f64 {
    let mut x = 0.0;
    let mut scale = 0.5;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            x += scale;
        }
        scale /= 2.0;
        k >>= 1;
    }
    x
}

/// The marked points followed by m further distinct smooth points.
///
/// The first 3Σdeg(v) extra points are π_{v,e}⁻¹ of the cube roots of unity for every incident
/// pair (v, e) in edge order; the rest lie on the circle of radius 0.9 at the root vertex.
pub fn decorate<T: Scalar>(
    p: &ModuliPoint<T>,
    c: &CompactnessParams<T>,
    marked: &[FiberPoint<T>],
    m: usize,
) -> Result<Vec<FiberPoint<T>>, CurveError> {
    let t = p.tree();
    let need = 3 * t.degree_sum();
    if m < need {
        return Err(CurveError::MTooSmall { m, need });
    }
    require_compact(p, c)?;
    let split = split_fiber(p)?;
    for (i, q) in marked.iter().enumerate() {
        if q.coords.len() != t.n_vertices() {
            return Err(CurveError::WrongLength { got: q.coords.len(), expected: t.n_vertices() });
        }
        let r = q.residual(p);
        if r > T::loose() {
            return Err(CurveError::NotOnFiber(r.as_f64()));
        }
        if split.locate(p, q).len() != 1 {
            return Err(CurveError::NotSmooth(i));
        }
    }
    let mut out: Vec<FiberPoint<T>> = marked.to_vec();
    let mut emb = out.iter().map(|q| embed(p, q)).collect::<Result<Vec<_>, _>>()?;
    for i in 0..emb.len() {
        for j in i + 1..emb.len() {
            if embedded_distance(&emb[i], &emb[j]) <= T::lit(MIN_SEPARATION) {
                return Err(CurveError::Collision(i, j));
            }
        }
    }
    let roots = cube_roots_of_unity::<T>();
    for (v, e) in t.incident_pairs() {
        for r in &roots {
            let q = inverse_projection(p, v, e, *r)?;
            let eq = embed(p, &q)?;
            if let Some(j) = emb.iter().position(|x| embedded_distance(x, &eq) <= T::lit(MIN_SEPARATION)) {
                return Err(CurveError::Collision(j, out.len()));
            }
            out.push(q);
            emb.push(eq);
        }
    }
    let extra = m - need;
    let v0 = t.root_vertex();
    let mut skips = 0;
    let mut k = 0usize;
    let slots = extra + 1;
    while out.len() < marked.len() + m {
        let (pass, j) = (k / slots, k % slots + 1);
        k += 1;
        let angle = std::f64::consts::TAU * (j as f64 + pass_offset(pass)) / slots as f64;
        let w: Complex<T> = Complex::from_polar(T::lit(FILL_RADIUS), T::lit(angle));
        let inside_child = t.children(v0).iter().any(|&e| {
            let k = p.coord(e).expect("child edge");
            (w - k.z).norm() < k.rho.norm()
        });
        let candidate = if inside_child { None } else { propagate(p, v0, ProjPoint::affine(w), None).ok() };
        let accepted = candidate.and_then(|q| {
            let eq = embed(p, &q).ok()?;
            emb.iter().all(|x| embedded_distance(x, &eq) > T::lit(MIN_SEPARATION)).then_some((q, eq))
        });
        match accepted {
            Some((q, eq)) => {
                out.push(q);
                emb.push(eq);
            }
            None => {
                skips += 1;
                if skips > MAX_FILL_SKIPS {
                    return Err(CurveError::FillExhausted(skips));
                }
            }
        }
    }
    Ok(out)
}
