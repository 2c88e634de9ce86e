//! Thick, neck and end regions of a fiber and their distance functions.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fiber::{phi, FiberPoint};
use super::{require_compact, CompactnessParams, CurveError, ModuliPoint};
use crate::projective::{sphere_distance, ProjPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Region {
    Thick(usize),
    Neck(usize),
    End(usize),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Thick(v) => write!(f, "thick v{v}"),
            Region::Neck(e) => write!(f, "neck e{e}"),
            Region::End(e) => write!(f, "end e{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleShape<T> {
    /// The unit circle in the chart at e⁺.
    Unit,
    /// |w − center| = radius in the chart at e⁻.
    Disc { center: Complex<T>, radius: T },
}

/// Γ̂_{v,e} for an incident pair (v, e).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    pub vertex: usize,
    pub edge: usize,
    pub shape: CircleShape<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThickThinDecomposition<T> {
    point: ModuliPoint<T>,
    pub circles: Vec<Circle<T>>,
    pub regions: Vec<Region>,
}

fn closed_inside<T: Scalar>(q: &ProjPoint<T>) -> bool {
    q.x().norm() <= q.y().norm() * (T::one() + T::loose())
}

fn closed_outside<T: Scalar>(q: &ProjPoint<T>) -> bool {
    q.x().norm() * (T::one() + T::loose()) >= q.y().norm()
}

/// Chart coordinate of the component (v, e) of P_T.
fn chart<T: Scalar>(p: &ModuliPoint<T>, v: usize, e: usize, q: &FiberPoint<T>) -> Result<ProjPoint<T>, CurveError> {
    if p.tree().negative(e) == Some(v) {
        phi(p, v, e, &q.coords[v])
    } else {
        Ok(q.coords[v])
    }
}

fn check_len<T: Scalar>(p: &ModuliPoint<T>, q: &FiberPoint<T>) -> Result<(), CurveError> {
    let n = p.tree().n_vertices();
    if q.coords.len() == n {
        Ok(())
    } else {
        Err(CurveError::WrongLength { got: q.coords.len(), expected: n })
    }
}

/// Whether `q` lies in the closed region, up to a relative boundary slack.
pub fn region_contains<T: Scalar>(p: &ModuliPoint<T>, region: Region, q: &FiberPoint<T>) -> Result<bool, CurveError> {
    check_len(p, q)?;
    let t = p.tree();
    Ok(match region {
        Region::Thick(v) => {
            if v >= t.n_vertices() {
                return Err(CurveError::OutsideRegion(region.to_string()));
            }
            if !closed_inside(&q.coords[v]) {
                return Ok(false);
            }
            for &e in t.children(v) {
                if !closed_outside(&phi(p, v, e, &q.coords[v])?) {
                    return Ok(false);
                }
            }
            true
        }
        Region::Neck(e) => {
            if e >= t.n_edges() || !t.is_full(e) {
                return Err(CurveError::NotFullEdge(e));
            }
            let (u, v) = (t.negative(e).expect("full"), t.positive(e).expect("full"));
            closed_inside(&phi(p, u, e, &q.coords[u])?) && closed_outside(&q.coords[v])
        }
        Region::End(e) => {
            if e >= t.n_edges() || !t.is_half(e) {
                return Err(CurveError::NotExternal(e));
            }
            if e == t.root_edge() {
                closed_outside(&q.coords[t.root_vertex()])
            } else {
                let u = t.negative(e).expect("non-root");
                closed_inside(&phi(p, u, e, &q.coords[u])?)
            }
        }
    })
}

pub fn all_regions(p_tree: &crate::trees::RootedTree) -> Vec<Region> {
    let mut out: Vec<Region> = (0..p_tree.n_vertices()).map(Region::Thick).collect();
    for e in 0..p_tree.n_edges() {
        out.push(if p_tree.is_full(e) { Region::Neck(e) } else { Region::End(e) });
    }
    out
}

/// Regions containing `q`; one region, or two on a circle Γ_{v,e}.
pub fn classify<T: Scalar>(p: &ModuliPoint<T>, q: &FiberPoint<T>) -> Result<Vec<Region>, CurveError> {
    let mut out = Vec::new();
    for r in all_regions(p.tree()) {
        if region_contains(p, r, q)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// dist_v on a thick region, dist_e on a neck or end.
pub fn region_distance<T: Scalar>(
    p: &ModuliPoint<T>,
    region: Region,
    q1: &FiberPoint<T>,
    q2: &FiberPoint<T>,
) -> Result<T, CurveError> {
    for q in [q1, q2] {
        if !region_contains(p, region, q)? {
            return Err(CurveError::OutsideRegion(region.to_string()));
        }
    }
    let t = p.tree();
    Ok(match region {
        Region::Thick(v) => sphere_distance(&q1.coords[v], &q2.coords[v]),
        Region::Neck(e) | Region::End(e) => {
            let mut d = T::zero();
            for &u in t.tree().endpoints(e) {
                d = d.max(sphere_distance(&chart(p, u, e, q1)?, &chart(p, u, e, q2)?));
            }
            d
        }
    })
}

impl<T: Scalar> ThickThinDecomposition<T> {
    pub fn new(p: &ModuliPoint<T>, c: &CompactnessParams<T>) -> Result<Self, CurveError> {
        require_compact(p, c)?;
        let t = p.tree();
        let circles = t
            .incident_pairs()
            .into_iter()
            .map(|(v, e)| {
                let shape = if t.negative(e) == Some(v) {
                    let k = p.coord(e).expect("child edge");
                    CircleShape::Disc { center: k.z, radius: k.rho.norm() }
                } else {
                    CircleShape::Unit
                };
                Circle { vertex: v, edge: e, shape }
            })
            .collect();
        Ok(ThickThinDecomposition { point: p.clone(), circles, regions: all_regions(t) })
    }

    pub fn point(&self) -> &ModuliPoint<T> {
        &self.point
    }

    /// Largest c such that the c-dilated child discs at `v` are pairwise disjoint.
    pub fn max_disjoint_dilation(&self, v: usize) -> Option<T> {
        let kids = self.point.tree().children(v);
        let mut best: Option<T> = None;
        for (i, &e) in kids.iter().enumerate() {
            for &f in &kids[i + 1..] {
                let (a, b) = (self.point.coord(e)?, self.point.coord(f)?);
                let c = (a.z - b.z).norm() / (a.rho.norm() + b.rho.norm());
                best = Some(best.map_or(c, |x: T| x.min(c)));
            }
        }
        best
    }

    /// max |z| + |ρ| over child circles; at most 1/2 on the compact subset.
    pub fn max_child_extent(&self) -> T {
        self.circles
            .iter()
            .filter_map(|c| match c.shape {
                CircleShape::Disc { center, radius } => Some(center.norm() + radius),
                CircleShape::Unit => None,
            })
            .fold(T::zero(), T::max)
    }

    pub fn contains(&self, region: Region, q: &FiberPoint<T>) -> Result<bool, CurveError> {
        region_contains(&self.point, region, q)
    }

    pub fn classify(&self, q: &FiberPoint<T>) -> Result<Vec<Region>, CurveError> {
        classify(&self.point, q)
    }

    pub fn distance(&self, region: Region, q1: &FiberPoint<T>, q2: &FiberPoint<T>) -> Result<T, CurveError> {
        region_distance(&self.point, region, q1, q2)
    }

    /// Whether `q` lies on Γ_{v,e}, up to the boundary slack.
    pub fn on_circle(&self, v: usize, e: usize, q: &FiberPoint<T>) -> Result<bool, CurveError> {
        let c = chart(&self.point, v, e, q)?;
        Ok(closed_inside(&c) && closed_outside(&c))
    }
}
