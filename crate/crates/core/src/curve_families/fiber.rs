//! Points of a fiber, sections, splitting at nodes, and the embedding into P_T.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex;

use super::{CurveError, EdgeCoord, ModuliPoint};
use crate::projective::{sphere_distance, ProjPoint};
use crate::scalar::Scalar;
use crate::trees::{split, EdgeOrigin, Marking, SplitComponent};

/// A point of the fiber: one homogeneous coordinate [x_v:y_v] per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPoint<T> {
    pub coords: Vec<ProjPoint<T>>,
}

impl<T: Scalar> FiberPoint<T> {
    pub fn all_infinity(n: usize) -> Self {
        FiberPoint { coords: vec![ProjPoint::infinity(); n] }
    }

    /// Largest relative residual of the defining equations over full edges.
    pub fn residual(&self, p: &ModuliPoint<T>) -> T {
        let t = p.tree();
        let mut worst = T::zero();
        for e in t.full_edges() {
            let (u, v) = (t.negative(e).expect("full"), t.positive(e).expect("full"));
            let (a, b) = (self.coords[u], self.coords[v]);
            let k = p.coord(e).expect("full");
            let gr = p.gamma(e).expect("full") * k.rho;
            let lhs = (a.x() - k.z * a.y()) * b.y();
            let rhs = gr * b.x() * a.y();
            let scale = (a.x().norm() + k.z.norm() * a.y().norm()) * b.y().norm() + gr.norm() * b.x().norm() * a.y().norm();
            if scale > T::zero() {
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
        worst
    }

    /// Max over vertices of the sphere distance; a metric on points of one fiber.
    pub fn distance(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).map(|(a, b)| sphere_distance(a, b)).fold(T::zero(), T::max)
    }

    pub fn to_f64(&self) -> FiberPoint<f64> {
        FiberPoint {
            coords: self
                .coords
                .iter()
                .map(|q| {
                    let c = |z: Complex<T>| Complex::new(z.re.as_f64(), z.im.as_f64());
                    ProjPoint::new(c(q.x()), c(q.y())).expect("normalized")
                })
                .collect(),
        }
    }
}

fn is_node_value<T: Scalar>(q: &ProjPoint<T>, z: Complex<T>) -> bool {
    let d = (q.x() - z * q.y()).norm();
    d <= T::slack() * (q.x().norm() + z.norm() * q.y().norm())
}

/// Coordinate at e⁺ from the coordinate at e⁻.
fn down<T: Scalar>(p: &ModuliPoint<T>, e: usize, q: &ProjPoint<T>, resolve: Option<usize>) -> Result<ProjPoint<T>, CurveError> {
    let k = p.coord(e).expect("full edge");
    let g = p.gamma(e).expect("full edge");
    if g.norm() > T::zero() {
        return Ok(ProjPoint::new(q.x() - k.z * q.y(), g * k.rho * q.y())?);
    }
    if is_node_value(q, k.z) && resolve != Some(e) {
        return Err(CurveError::NodeAmbiguity(e));
    }
    Ok(ProjPoint::infinity())
}

/// Coordinate at e⁻ from the coordinate at e⁺.
fn up<T: Scalar>(p: &ModuliPoint<T>, e: usize, q: &ProjPoint<T>) -> Result<ProjPoint<T>, CurveError> {
    let k = p.coord(e).expect("full edge");
    let gr = p.gamma(e).expect("full edge") * k.rho;
    ProjPoint::new(k.z * q.y() + gr * q.x(), q.y()).map_err(|_| CurveError::NodeAmbiguity(e))
}

pub(crate) fn propagate<T: Scalar>(
    p: &ModuliPoint<T>,
    w: usize,
    q: ProjPoint<T>,
    resolve: Option<usize>,
) -> Result<FiberPoint<T>, CurveError> {
    let t = p.tree();
    let n = t.n_vertices();
    if w >= n {
        return Err(CurveError::Tree(crate::trees::TreeError::UnknownVertex(w)));
    }
    let mut coords: Vec<Option<ProjPoint<T>>> = vec![None; n];
    coords[w] = Some(q);
    let mut queue = VecDeque::from([w]);
    while let Some(v) = queue.pop_front() {
        let here = coords[v].expect("visited");
        if let Some(parent) = t.parent_vertex(v) {
            if coords[parent].is_none() {
                coords[parent] = Some(up(p, t.parent_edge(v), &here)?);
                queue.push_back(parent);
            }
        }
        for &e in t.children(v) {
            if let Some(c) = t.positive(e) {
                if coords[c].is_none() {
                    coords[c] = Some(down(p, e, &here, resolve)?);
                    queue.push_back(c);
                }
            }
        }
    }
    Ok(FiberPoint { coords: coords.into_iter().map(|c| c.expect("tree is connected")).collect() })
}

/// The unique fiber point with root coordinate `t`; requires every γ_e ≠ 0.
pub fn fiber_from_root<T: Scalar>(p: &ModuliPoint<T>, t: ProjPoint<T>) -> Result<FiberPoint<T>, CurveError> {
    if let Some(&e) = p.zero_edges().first() {
        return Err(CurveError::ZeroGamma(e));
    }
    propagate(p, p.tree().root_vertex(), t, None)
}

/// The fiber point with π_w = `t`, when the defining equations determine it.
pub fn fiber_from_vertex<T: Scalar>(p: &ModuliPoint<T>, w: usize, t: ProjPoint<T>) -> Result<FiberPoint<T>, CurveError> {
    propagate(p, w, t, None)
}

/// σ_T(e, p): the marked point of the external edge `e`.
pub fn section<T: Scalar>(p: &ModuliPoint<T>, e: usize) -> Result<FiberPoint<T>, CurveError> {
    let t = p.tree();
    if e >= t.n_edges() || !t.is_half(e) {
        return Err(CurveError::NotExternal(e));
    }
    if e == t.root_edge() {
        return Ok(FiberPoint::all_infinity(t.n_vertices()));
    }
    let u = t.negative(e).expect("non-root");
    propagate(p, u, ProjPoint::affine(p.z(e)), None)
}

/// φ_{p,u,e}: the coordinate of the child disc of e in the chart at u.
pub fn phi<T: Scalar>(p: &ModuliPoint<T>, u: usize, e: usize, q: &ProjPoint<T>) -> Result<ProjPoint<T>, CurveError> {
    let k = p.coord_at(u, e)?;
    Ok(ProjPoint::new(q.x() - k.z * q.y(), k.rho * q.y())?)
}

/// Image of a fiber point in P_T, components ordered as [`crate::trees::RootedTree::incident_pairs`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoint<T> {
    pub components: Vec<((usize, usize), ProjPoint<T>)>,
}

impl<T: Scalar> EmbeddedPoint<T> {
    pub fn component(&self, v: usize, e: usize) -> Option<ProjPoint<T>> {
        self.components.iter().find(|(k, _)| *k == (v, e)).map(|(_, q)| *q)
    }
}

pub fn embed<T: Scalar>(p: &ModuliPoint<T>, q: &FiberPoint<T>) -> Result<EmbeddedPoint<T>, CurveError> {
    let t = p.tree();
    if q.coords.len() != t.n_vertices() {
        return Err(CurveError::WrongLength { got: q.coords.len(), expected: t.n_vertices() });
    }
    let mut components = Vec::new();
    for (v, e) in t.incident_pairs() {
        let c = if t.negative(e) == Some(v) { phi(p, v, e, &q.coords[v])? } else { q.coords[v] };
        components.push(((v, e), c));
    }
    Ok(EmbeddedPoint { components })
}

/// Distance in P_T: the maximum over components.
pub fn embedded_distance<T: Scalar>(a: &EmbeddedPoint<T>, b: &EmbeddedPoint<T>) -> T {
    a.components.iter().zip(&b.components).map(|((_, x), (_, y))| sphere_distance(x, y)).fold(T::zero(), T::max)
}

/// A component of a nodal fiber, as the fiber over a point of the split tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberComponent<T> {
    pub point: ModuliPoint<T>,
    pub split: SplitComponent,
}

impl<T: Scalar> FiberComponent<T> {
    /// Original id of the component's top vertex.
    pub fn top(&self) -> usize {
        self.split.vertex_origin[self.point.tree().root_vertex()]
    }

    /// Coordinates of a global fiber point at this component's vertices.
    pub fn restrict(&self, q: &FiberPoint<T>) -> FiberPoint<T> {
        FiberPoint { coords: self.split.vertex_origin.iter().map(|&v| q.coords[v]).collect() }
    }
}

/// The node of a zero edge e: q_{p,v} on the upper component, q_{p,u} on the lower one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberNode<T> {
    pub edge: usize,
    pub upper: usize,
    pub lower: usize,
    /// The node as a point of the whole fiber.
    pub point: FiberPoint<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitFiber<T> {
    pub components: Vec<FiberComponent<T>>,
    pub nodes: Vec<FiberNode<T>>,
    component_of: Vec<usize>,
}

impl<T: Scalar> SplitFiber<T> {
    pub fn component_of_vertex(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn node(&self, edge: usize) -> Option<&FiberNode<T>> {
        self.nodes.iter().find(|n| n.edge == edge)
    }

    /// q_{p,v}: the node seen on the upper component, in that component's coordinates.
    pub fn node_on_upper(&self, edge: usize) -> Option<FiberPoint<T>> {
        let n = self.node(edge)?;
        Some(self.components[n.upper].restrict(&n.point))
    }

    /// q_{p,u}: the node seen on the lower component.
    pub fn node_on_lower(&self, edge: usize) -> Option<FiberPoint<T>> {
        let n = self.node(edge)?;
        Some(self.components[n.lower].restrict(&n.point))
    }

    /// Index of the component containing `q` as a smooth point; empty for nodes and off-fiber points.
    ///
    /// Across each zero edge e a smooth point lies either below (π_{e⁻} at the node value) or
    /// above (π_{e⁺} = [1:0]), never both.
    pub fn locate(&self, p: &ModuliPoint<T>, q: &FiberPoint<T>) -> Vec<usize> {
        let t = p.tree();
        if q.coords.len() != t.n_vertices() || q.residual(p) > T::loose() {
            return Vec::new();
        }
        let tol = T::loose();
        let mut comp = 0;
        loop {
            let mut next = None;
            for n in self.nodes.iter().filter(|n| n.upper == comp) {
                let (u, v) = (t.negative(n.edge).expect("full"), t.positive(n.edge).expect("full"));
                let (a, b) = (q.coords[u], q.coords[v]);
                let z = p.z(n.edge);
                let below = (a.x() - z * a.y()).norm() <= tol * (a.x().norm() + z.norm() * a.y().norm());
                let above = b.y().norm() <= tol * b.x().norm();
                match (below, above) {
                    (true, false) if next.is_none() => next = Some(n.lower),
                    (false, true) => {}
                    _ => return Vec::new(),
                }
            }
            match next {
                Some(c) => comp = c,
                None => return vec![comp],
            }
        }
    }
}

/// Splits the fiber along the edges with γ_e = 0.
pub fn split_fiber<T: Scalar>(p: &ModuliPoint<T>) -> Result<SplitFiber<T>, CurveError> {
    let t = p.tree();
    let cut: BTreeSet<usize> = p.zero_edges().into_iter().collect();
    let parts = split(t, &Marking::empty(), &cut)?;
    let mut component_of = vec![0; t.n_vertices()];
    let mut components = Vec::with_capacity(parts.len());
    for (i, part) in parts.into_iter().enumerate() {
        for &v in &part.vertex_origin {
            component_of[v] = i;
        }
        let local = part.tree.clone();
        let mut gamma = Vec::with_capacity(local.n_edges());
        let mut coords = Vec::with_capacity(local.n_edges());
        for (le, origin) in part.edge_origin.iter().enumerate() {
            let (g, c): (Option<Complex<T>>, Option<EdgeCoord<T>>) = match *origin {
                EdgeOrigin::Original(e) => (p.gamma(e), if le == local.root_edge() { None } else { p.coord(e) }),
                EdgeOrigin::Cut { edge, vertex } => {
                    (None, if t.negative(edge) == Some(vertex) { p.coord(edge) } else { None })
                }
            };
            gamma.push(g);
            coords.push(c);
        }
        let point = ModuliPoint { tree: local, gamma, coords };
        components.push(FiberComponent { point, split: part });
    }
    let mut nodes = Vec::new();
    for &e in &cut {
        let (u, v) = (t.negative(e).expect("full"), t.positive(e).expect("full"));
        let point = propagate(p, u, ProjPoint::affine(p.z(e)), Some(e))?;
        nodes.push(FiberNode { edge: e, upper: component_of[u], lower: component_of[v], point });
    }
    Ok(SplitFiber { components, nodes, component_of })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::sampling::{random_fiber_point, random_moduli_point};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_chain() -> ModuliPoint<f64> {
        ModuliPoint::from_fns(chain2(), |_| c(1.0, 0.0), |_, e| EdgeCoord { z: c(if e == 1 { 0.0 } else { 0.1 * e as f64 }, 0.0), rho: c(1.0, 0.0) })
    }

    #[test]
    fn fiber_from_root_examples() {
        let p = unit_chain();
        let q = fiber_from_root(&p, ProjPoint::infinity()).unwrap();
        assert!(q.coords.iter().all(|x| x.is_infinity()));
        let q = fiber_from_root(&p, ProjPoint::affine(c(1.0, 0.0))).unwrap();
        assert!(q.coords[1].distance(&ProjPoint::affine(c(1.0, 0.0))) < 1e-15);

        let mut z = p.clone();
        z.set_gamma(1, c(0.0, 0.0)).unwrap();
        assert_eq!(fiber_from_root(&z, ProjPoint::infinity()), Err(CurveError::ZeroGamma(1)));
    }

    #[test]
    fn residuals_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..200 {
            let t = [chain2(), chain3()][i % 2].clone();
            let p = random_moduli_point(&mut rng, &t, &default_params(t.n_vertices()), 0.0).unwrap();
            let q = random_fiber_point(&mut rng, &p).unwrap();
            assert!(q.residual(&p) < 1e-12, "{}", q.residual(&p));
        }
    }

    #[test]
    fn sections() {
        let p = star2_point();
        let s = section(&p, 2).unwrap();
        assert!(s.coords[0].distance(&ProjPoint::affine(c(0.125, 0.0))) < 1e-15);
        assert!(section(&p, 0).unwrap().coords[0].is_infinity());

        let q = ModuliPoint::from_fns(star2(), |_| c(0.0, 0.0), |_, e| EdgeCoord { z: c(0.1 * (e as f64 - 1.0), 0.0), rho: c(0.01, 0.0) });
        let s = section(&q, 2).unwrap();
        assert!((s.coords[0].to_affine().unwrap() - c(0.1, 0.0)).norm() < 1e-15);

        let t = chain2();
        assert_eq!(section(&unit_chain(), 1), Err(CurveError::NotExternal(1)));
        assert_eq!(t.n_edges(), 5);
    }

    #[test]
    fn section_matches_root_propagation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let t = chain3();
            let p = random_moduli_point(&mut rng, &t, &default_params(3), 0.0).unwrap();
            for e in t.leaf_edges() {
                let u = t.negative(e).unwrap();
                let root = super::super::z_cross(&p, t.root_vertex(), u, e).unwrap();
                let a = section(&p, e).unwrap();
                let b = fiber_from_root(&p, ProjPoint::affine(root)).unwrap();
                assert!(a.distance(&b) < 1e-9);
                assert!(a.residual(&p) < 1e-12);
            }
        }
    }

    #[test]
    fn sections_are_distinct_even_when_nodal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = chain3();
            let p = random_moduli_point(&mut rng, &t, &default_params(3), 0.5).unwrap();
            let mut pts = vec![section(&p, t.root_edge()).unwrap()];
            pts.extend(t.leaf_edges().into_iter().map(|e| section(&p, e).unwrap()));
            for (i, a) in pts.iter().enumerate() {
                assert!(a.residual(&p) < 1e-12);
                for b in &pts[i + 1..] {
                    let (ea, eb) = (embed(&p, a).unwrap(), embed(&p, b).unwrap());
                    assert!(embedded_distance(&ea, &eb) > 1e-9);
                }
            }
        }
    }

    #[test]
    fn splitting() {
        let p = unit_chain();
        let s = split_fiber(&p).unwrap();
        assert_eq!(s.components.len(), 1);
        assert!(s.nodes.is_empty());

        let mut z = p.clone();
        z.set_gamma(1, c(0.0, 0.0)).unwrap();
        let s = split_fiber(&z).unwrap();
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.nodes.len(), 1);
        let node = &s.nodes[0];
        assert_eq!((node.upper, node.lower), (0, 1));
        assert!(node.point.coords[1].is_infinity());
        assert!(node.point.coords[0].distance(&ProjPoint::affine(z.z(1))) < 1e-15);
        assert!(node.point.residual(&z) < 1e-15);
        assert!(s.node_on_lower(1).unwrap().coords[0].is_infinity());
        // The upper component carries the cut edge as a leaf with the original (z, rho).
        let upper = &s.components[0].point;
        let leaf = s.components[0].split.local_edge(EdgeOrigin::Cut { edge: 1, vertex: 0 }).unwrap();
        assert_eq!(upper.coord(leaf), z.coord(1));
        assert!(s.locate(&z, &node.point).is_empty());
        let smooth = section(&z, 3).unwrap();
        assert_eq!(s.locate(&z, &smooth), vec![1]);
    }

    #[test]
    fn component_count_is_zero_edges_plus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let t = chain3();
            let p = random_moduli_point(&mut rng, &t, &default_params(3), 0.5).unwrap();
            let s = split_fiber(&p).unwrap();
            assert_eq!(s.components.len(), p.zero_edges().len() + 1);
            for n in &s.nodes {
                assert!(s.node_on_lower(n.edge).unwrap().coords[0].is_infinity());
                let up = s.node_on_upper(n.edge).unwrap();
                let u = p.tree().negative(n.edge).unwrap();
                let local_u = s.components[n.upper].split.local_vertex(u).unwrap();
                assert!(up.coords[local_u].distance(&ProjPoint::affine(p.z(n.edge))) < 1e-12);
            }
        }
    }

    #[test]
    fn embedding() {
        let p = ModuliPoint::from_fns(star2(), |_| c(0.0, 0.0), |_, _| EdgeCoord { z: c(0.0, 0.0), rho: c(1.0, 0.0) });
        let q = FiberPoint { coords: vec![ProjPoint::affine(c(0.3, 0.2))] };
        let emb = embed(&p, &q).unwrap();
        assert!(emb.components.iter().all(|(_, x)| x.distance(&q.coords[0]) < 1e-15));
        let inf = embed(&unit_chain(), &FiberPoint::all_infinity(2)).unwrap();
        assert!(inf.components.iter().all(|(_, x)| x.is_infinity()));
    }

    #[test]
    fn embedding_is_injective() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let t = chain3();
            let p = random_moduli_point(&mut rng, &t, &default_params(3), 0.3).unwrap();
            let a = random_fiber_point(&mut rng, &p).unwrap();
            let b = random_fiber_point(&mut rng, &p).unwrap();
            if a.distance(&b) > 1e-12 {
                let d = embedded_distance(&embed(&p, &a).unwrap(), &embed(&p, &b).unwrap());
                assert!(d > 0.0);
            }
        }
    }
}
