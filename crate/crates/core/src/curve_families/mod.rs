//! The family of genus-0 curves modeled on a rooted tree.
//!
//! A point of the base carries a smoothing parameter γ_e for every full edge and a pair
//! (z_{v,e}, ρ_{v,e}) for every non-root edge e with v = e⁻. The fiber over it is cut out of
//! (P¹)^V by one homogeneous equation per full edge.

mod decomposition;
mod decorate;
mod fiber;
mod maps;
mod plumbing;
mod stabilize;

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{le_tol, Scalar};
use crate::trees::{RootedTree, TreeError};

pub use decomposition::{
    all_regions, classify, region_contains, region_distance, Circle, CircleShape, Region, ThickThinDecomposition,
};
pub use decorate::{decorate, inverse_projection, FILL_RADIUS, MAX_FILL_SKIPS};
pub use fiber::{
    embed, embedded_distance, fiber_from_root, fiber_from_vertex, phi, section, split_fiber, EmbeddedPoint,
    FiberComponent, FiberNode, FiberPoint, SplitFiber,
};
pub use maps::{check_map_membership, ConditionStatus, MembershipVerdict, SampledMap};
pub use plumbing::{
    annulus_path, cylinder_area_density, neck_coordinates, neck_flat_coords, neck_param, neck_path, AnnulusPath,
    Curve, NeckPath, PathPiece, Track,
};
pub use stabilize::stabilize_4pt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("tree: {0}")]
    Tree(#[from] TreeError),
    #[error("coordinate index set mismatch: {0}")]
    IndexMismatch(String),
    #[error("no positive path from vertex {from} to vertex {to}")]
    NoPositivePath { from: usize, to: usize },
    #[error("edge {edge} is not a child edge of vertex {vertex}")]
    NotChildEdge { vertex: usize, edge: usize },
    #[error("edge {0} is not external")]
    NotExternal(usize),
    #[error("edge {0} is not a full edge")]
    NotFullEdge(usize),
    #[error("gamma vanishes on edge {0}; use split_fiber for nodal fibers")]
    ZeroGamma(usize),
    #[error("propagation across the node of edge {0} is not determined")]
    NodeAmbiguity(usize),
    #[error("degenerate homogeneous coordinates")]
    ZeroVector,
    #[error("invalid compactness parameters: {0}")]
    BadParams(String),
    #[error("point is not in the compact subset: {0}")]
    NotInCompactSubset(String),
    #[error("point is outside region {0}")]
    OutsideRegion(String),
    #[error("|gamma| = {0} must lie in (0, 1)")]
    GammaOutOfRange(f64),
    #[error("neck parameter s = {s} exceeds R = {r}")]
    NeckParameter { s: f64, r: f64 },
    #[error("plumbing constraint violated: residual {0}")]
    Constraint(f64),
    #[error("fiber point has {got} coordinates, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("point does not lie on the fiber (residual {0})")]
    NotOnFiber(f64),
    #[error("point {0} is a node, not a smooth point")]
    NotSmooth(usize),
    #[error("points {0} and {1} coincide")]
    Collision(usize, usize),
    #[error("m = {m} is smaller than 3 deg sum = {need}")]
    MTooSmall { m: usize, need: usize },
    #[error("deterministic fill gave up after {0} rejected candidates")]
    FillExhausted(usize),
    #[error("no Lipschitz constant supplied for region {0}")]
    MissingLipschitz(String),
    #[error("target id {0} out of range")]
    UnknownTarget(usize),
}

impl From<crate::projective::ZeroVector> for CurveError {
    fn from(_: crate::projective::ZeroVector) -> Self {
        CurveError::ZeroVector
    }
}

/// Marked-point position and scale (z_{v,e}, ρ_{v,e}) of a child edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoord<T> {
    pub z: Complex<T>,
    pub rho: Complex<T>,
}

/// Point of the base A_T: γ on full edges, (z, ρ) on non-root edges at their negative endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint<T> {
    tree: RootedTree,
    gamma: Vec<Option<Complex<T>>>,
    coords: Vec<Option<EdgeCoord<T>>>,
}

impl<T: Scalar> ModuliPoint<T> {
    /// Builds a point from γ keyed by full edge and (z, ρ) keyed by (e⁻, e).
    pub fn new(
        tree: RootedTree,
        gamma: &BTreeMap<usize, Complex<T>>,
        zr: &BTreeMap<(usize, usize), EdgeCoord<T>>,
    ) -> Result<Self, CurveError> {
        let n = tree.n_edges();
        let mut g = vec![None; n];
        for (&e, &value) in gamma {
            if e >= n || !tree.is_full(e) {
                return Err(CurveError::IndexMismatch(format!("gamma given on non-full edge {e}")));
            }
            g[e] = Some(value);
        }
        if let Some(e) = tree.full_edges().into_iter().find(|&e| g[e].is_none()) {
            return Err(CurveError::IndexMismatch(format!("gamma missing on full edge {e}")));
        }
        let mut c = vec![None; n];
        for (&(v, e), &value) in zr {
            if e >= n || tree.negative(e) != Some(v) {
                return Err(CurveError::IndexMismatch(format!("({v},{e}) is not a pair with e in v+")));
            }
            c[e] = Some(value);
        }
        if let Some(e) = (0..n).find(|&e| e != tree.root_edge() && c[e].is_none()) {
            return Err(CurveError::IndexMismatch(format!("(z, rho) missing on edge {e}")));
        }
        Ok(ModuliPoint { tree, gamma: g, coords: c })
    }

    /// Builds a point by evaluating `gamma` on full edges and `zr` on non-root edges.
    pub fn from_fns(
        tree: RootedTree,
        mut gamma: impl FnMut(usize) -> Complex<T>,
        mut zr: impl FnMut(usize, usize) -> EdgeCoord<T>,
    ) -> Self {
        let n = tree.n_edges();
        let g = (0..n).map(|e| tree.is_full(e).then(|| gamma(e))).collect();
        let c = (0..n).map(|e| tree.negative(e).map(|v| zr(v, e))).collect();
        ModuliPoint { tree, gamma: g, coords: c }
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    /// γ_e, or `None` for half edges.
    pub fn gamma(&self, e: usize) -> Option<Complex<T>> {
        self.gamma.get(e).copied().flatten()
    }

    /// (z, ρ) at e⁻, or `None` for the root edge.
    pub fn coord(&self, e: usize) -> Option<EdgeCoord<T>> {
        self.coords.get(e).copied().flatten()
    }

    pub fn z(&self, e: usize) -> Complex<T> {
        self.coord(e).expect("non-root edge").z
    }

    pub fn rho(&self, e: usize) -> Complex<T> {
        self.coord(e).expect("non-root edge").rho
    }

    /// (z_{v,e}, ρ_{v,e}) checking that e ∈ v⁺.
    pub fn coord_at(&self, v: usize, e: usize) -> Result<EdgeCoord<T>, CurveError> {
        if e < self.tree.n_edges() && self.tree.negative(e) == Some(v) {
            Ok(self.coords[e].expect("non-root edge"))
        } else {
            Err(CurveError::NotChildEdge { vertex: v, edge: e })
        }
    }

    pub fn set_gamma(&mut self, e: usize, value: Complex<T>) -> Result<(), CurveError> {
        if e >= self.tree.n_edges() || !self.tree.is_full(e) {
            return Err(CurveError::NotFullEdge(e));
        }
        self.gamma[e] = Some(value);
        Ok(())
    }

    pub fn set_coord(&mut self, e: usize, value: EdgeCoord<T>) -> Result<(), CurveError> {
        if self.coord(e).is_none() {
            return Err(CurveError::NotChildEdge { vertex: usize::MAX, edge: e });
        }
        self.coords[e] = Some(value);
        Ok(())
    }

    /// Full edges with γ_e = 0.
    pub fn zero_edges(&self) -> Vec<usize> {
        (0..self.tree.n_edges()).filter(|&e| self.gamma(e).is_some_and(|g| g == Complex::new(T::zero(), T::zero()))).collect()
    }

    /// Sup-norm distance between two points over the same tree.
    pub fn distance(&self, other: &Self) -> T {
        let mut d = T::zero();
        for e in 0..self.tree.n_edges() {
            if let (Some(a), Some(b)) = (self.gamma(e), other.gamma(e)) {
                d = d.max((a - b).norm());
            }
            if let (Some(a), Some(b)) = (self.coord(e), other.coord(e)) {
                d = d.max((a.z - b.z).norm()).max((a.rho - b.rho).norm());
            }
        }
        d
    }

    /// Coordinates as a point of C^{|E_int| + 2(|E|-1)}: γ by edge, then (z, ρ) by edge.
    pub fn affine_coordinates(&self) -> Vec<Complex<T>> {
        let mut out: Vec<Complex<T>> = self.gamma.iter().flatten().copied().collect();
        for c in self.coords.iter().flatten() {
            out.push(c.z);
            out.push(c.rho);
        }
        out
    }

    pub fn to_f64(&self) -> ModuliPoint<f64> {
        let c = |z: Complex<T>| Complex::new(z.re.as_f64(), z.im.as_f64());
        ModuliPoint {
            tree: self.tree.clone(),
            gamma: self.gamma.iter().map(|g| g.map(c)).collect(),
            coords: self.coords.iter().map(|k| k.map(|k| EdgeCoord { z: c(k.z), rho: c(k.rho) })).collect(),
        }
    }
}

/// Number of complex coordinates of A_T, |E_int| + 2(|E| − 1).
pub fn affine_dimension(t: &RootedTree) -> usize {
    t.full_edges().len() + 2 * (t.n_edges() - 1)
}

/// z^u_{v,e}: the position of the marked point of e seen from the ancestor u.
pub fn z_cross<T: Scalar>(p: &ModuliPoint<T>, u: usize, v: usize, e: usize) -> Result<Complex<T>, CurveError> {
    let t = p.tree();
    if u >= t.n_vertices() || v >= t.n_vertices() {
        return Err(CurveError::Tree(TreeError::UnknownVertex(u.max(v))));
    }
    p.coord_at(v, e)?;
    let path = t.positive_path(u, v).ok_or(CurveError::NoPositivePath { from: u, to: v })?;
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut factor = Complex::new(T::one(), T::zero());
    for (k, &w) in path.iter().enumerate() {
        let edge = if k + 1 < path.len() { t.parent_edge(path[k + 1]) } else { e };
        let c = p.coord(edge).expect("child edge");
        acc += factor * c.z;
        if k + 1 < path.len() {
            debug_assert_eq!(t.negative(edge), Some(w));
            factor = factor * p.gamma(edge).expect("full edge") * c.rho;
        }
    }
    Ok(acc)
}

/// One factor of the first product in F_T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGap<T> {
    pub edges: (usize, usize),
    pub ancestor: usize,
    pub gap: Complex<T>,
}

/// Pairs {e, e'} of non-root edges entering F_T, with their nearest common ancestor.
///
/// A pair is included when the positive paths from the ancestor leave it through different
/// child edges, which is exactly when the difference does not vanish identically.
pub fn ft_pairs(t: &RootedTree) -> Vec<(usize, usize, usize)> {
    let edges: Vec<usize> = (0..t.n_edges()).filter(|&e| e != t.root_edge()).collect();
    let mut out = Vec::new();
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[i + 1..] {
            let (v, w) = (t.negative(e).expect("non-root"), t.negative(f).expect("non-root"));
            let u = t.nearest_common_ancestor(v, w);
            if t.first_edge_towards(u, e) != t.first_edge_towards(u, f) {
                out.push((e, f, u));
            }
        }
    }
    out
}

pub fn ft_pair_gaps<T: Scalar>(p: &ModuliPoint<T>) -> Vec<PairGap<T>> {
    let t = p.tree();
    ft_pairs(t)
        .into_iter()
        .map(|(e, f, u)| {
            let a = z_cross(p, u, t.negative(e).expect("non-root"), e).expect("ancestor path");
            let b = z_cross(p, u, t.negative(f).expect("non-root"), f).expect("ancestor path");
            PairGap { edges: (e, f), ancestor: u, gap: a - b }
        })
        .collect()
}

/// F_T(p); the point lies in M_T iff this is non-zero.
pub fn f_t<T: Scalar>(p: &ModuliPoint<T>) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for g in ft_pair_gaps(p) {
        acc = acc * g.gap;
    }
    for e in p.tree().full_edges() {
        acc = acc * p.rho(e);
    }
    acc
}

/// θ, τ and per-vertex α_v cutting out the compact subset M_T(θ, τ, α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessParams<T> {
    pub theta: T,
    pub tau: T,
    pub alpha: Vec<T>,
}

impl<T: Scalar> CompactnessParams<T> {
    pub fn new(theta: T, tau: T, alpha: Vec<T>) -> Result<Self, CurveError> {
        let c = CompactnessParams { theta, tau, alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn uniform(theta: T, tau: T, alpha: T, n_vertices: usize) -> Result<Self, CurveError> {
        Self::new(theta, tau, vec![alpha; n_vertices])
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        let sixth = T::one() / T::lit(6.0);
        if !(self.tau > T::zero() && self.tau <= T::lit(0.5)) {
            return Err(CurveError::BadParams(format!("tau = {} not in (0, 1/2]", self.tau)));
        }
        if !(self.theta > T::zero() && self.theta <= sixth) {
            return Err(CurveError::BadParams(format!("theta = {} not in (0, 1/6]", self.theta)));
        }
        if let Some((v, a)) = self.alpha.iter().enumerate().find(|(_, &a)| !(a > T::zero() && a <= self.theta)) {
            return Err(CurveError::BadParams(format!("alpha_{v} = {a} not in (0, theta]")));
        }
        Ok(())
    }
}

/// A single failed inequality of the compact subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZTooLarge { vertex: usize, edge: usize, lhs: f64, rhs: f64 },
    RhoTooSmall { vertex: usize, edge: usize, lhs: f64, rhs: f64 },
    RhoTooLarge { vertex: usize, edge: usize, lhs: f64, rhs: f64 },
    NotSeparated { vertex: usize, edges: (usize, usize), lhs: f64, rhs: f64 },
    GammaTooLarge { edge: usize, lhs: f64, rhs: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub member: bool,
    pub violations: Vec<Violation>,
}

impl CompactnessReport {
    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks the four families of inequalities in vertex order, then γ by edge.
pub fn in_compact_subset<T: Scalar>(p: &ModuliPoint<T>, c: &CompactnessParams<T>) -> Result<CompactnessReport, CurveError> {
    c.validate()?;
    let t = p.tree();
    if c.alpha.len() != t.n_vertices() {
        return Err(CurveError::BadParams(format!("{} alphas for {} vertices", c.alpha.len(), t.n_vertices())));
    }
    let mut violations = Vec::new();
    for v in 0..t.n_vertices() {
        let kids = t.children(v);
        for &e in kids {
            let k = p.coord(e).expect("child edge");
            let (z, r) = (k.z.norm(), k.rho.norm());
            if !le_tol(z, c.theta) {
                violations.push(Violation::ZTooLarge { vertex: v, edge: e, lhs: z.as_f64(), rhs: c.theta.as_f64() });
            }
            if !le_tol(c.alpha[v], r) {
                violations.push(Violation::RhoTooSmall { vertex: v, edge: e, lhs: r.as_f64(), rhs: c.alpha[v].as_f64() });
            }
            let two_theta = c.theta + c.theta;
            if !le_tol(r, two_theta) {
                violations.push(Violation::RhoTooLarge { vertex: v, edge: e, lhs: r.as_f64(), rhs: two_theta.as_f64() });
            }
        }
        for (i, &e) in kids.iter().enumerate() {
            for &f in &kids[i + 1..] {
                let (a, b) = (p.coord(e).expect("child"), p.coord(f).expect("child"));
                let lhs = a.rho.norm() + b.rho.norm();
                let rhs = c.tau * (a.z - b.z).norm();
                if !le_tol(lhs, rhs) {
                    violations.push(Violation::NotSeparated { vertex: v, edges: (e, f), lhs: lhs.as_f64(), rhs: rhs.as_f64() });
                }
            }
        }
    }
    for e in t.full_edges() {
        let g = p.gamma(e).expect("full edge").norm();
        if !le_tol(g, c.tau) {
            violations.push(Violation::GammaTooLarge { edge: e, lhs: g.as_f64(), rhs: c.tau.as_f64() });
        }
    }
    Ok(CompactnessReport { member: violations.is_empty(), violations })
}

pub(crate) fn require_compact<T: Scalar>(p: &ModuliPoint<T>, c: &CompactnessParams<T>) -> Result<(), CurveError> {
    let report = in_compact_subset(p, c)?;
    match report.first() {
        None => Ok(()),
        Some(v) => Err(CurveError::NotInCompactSubset(format!("{v:?}"))),
    }
}

/// Complex-linear dimension of the parameter space appearing in the count bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    /// |E_int| + 2(|E| − 1), the number of affine coordinates.
    pub affine: usize,
    /// μ − 1 with μ = Σ_v deg(v), the dimension used by the count bound.
    pub bound: usize,
    pub degree_sum: usize,
}

pub fn dimension_report(t: &RootedTree) -> DimensionReport {
    let mu = t.degree_sum();
    DimensionReport { affine: affine_dimension(t), bound: mu - 1, degree_sum: mu }
}

#[derive(Serialize, Deserialize)]
struct CoordJson {
    z: [f64; 2],
    rho: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct ModuliJson {
    tree: RootedTree,
    gamma: BTreeMap<String, [f64; 2]>,
    zr: BTreeMap<String, CoordJson>,
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(z: [f64; 2]) -> Complex<f64> {
    Complex::new(z[0], z[1])
}

impl Serialize for ModuliPoint<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let t = self.tree();
        let gamma = (0..t.n_edges()).filter_map(|e| self.gamma(e).map(|g| (e.to_string(), pair(g)))).collect();
        let zr = (0..t.n_edges())
            .filter_map(|e| {
                let c = self.coord(e)?;
                let v = t.negative(e)?;
                Some((format!("{v},{e}"), CoordJson { z: pair(c.z), rho: pair(c.rho) }))
            })
            .collect();
        ModuliJson { tree: t.clone(), gamma, zr }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuliPoint<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = ModuliJson::deserialize(d)?;
        let mut gamma = BTreeMap::new();
        for (k, v) in json.gamma {
            let e: usize = k.trim().parse().map_err(|_| D::Error::custom(format!("bad edge key {k:?}")))?;
            gamma.insert(e, unpair(v));
        }
        let mut zr = BTreeMap::new();
        for (k, v) in json.zr {
            let parsed = k.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let key: (usize, usize) = parsed.ok_or_else(|| D::Error::custom(format!("bad key {k:?}, expected \"v,e\"")))?;
            zr.insert(key, EdgeCoord { z: unpair(v.z), rho: unpair(v.rho) });
        }
        ModuliPoint::new(json.tree, &gamma, &zr).map_err(D::Error::custom)
    }
}
