//! Bubble configurations: type-ε predicates, energy threshold radii, bubble-point selection,
//! renormalization, cluster selection, reduction and the associated tree with its moduli point.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::curve_families::{in_compact_subset, z_cross, CompactnessParams, CurveError, EdgeCoord, ModuliPoint};
use crate::metric_nets::{FiniteMetricSpace, NetError};
use crate::scalar::{eq_tol, le_tol, lex_cmp, Scalar};
use crate::trees::{RootedTree, Tree, TreeError};

/// Smallest supported ε.
pub const MIN_EPS: f64 = 1.0 / 64.0;
/// Largest admissible ε (8ε ≤ 1).
pub const MAX_EPS: f64 = 1.0 / 8.0;
/// Relative tolerance when matching recovered bubble points against T.
pub const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BubbleError {
    #[error("eps = {0} must lie in [1/64, 1/8]")]
    BadEps(f64),
    #[error("not a standard bubble configuration of type eps: {0}")]
    NotStandard(String),
    #[error("need at least two bubble points, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("{points} points but {radii} radii")]
    LengthMismatch { points: usize, radii: usize },
    #[error("radius of point {0} is negative or not finite")]
    BadRadius(usize),
    #[error("total mass {total} is below lambda^2 = {need}")]
    InsufficientMass { total: f64, need: f64 },
    #[error("invalid energy measure: {0}")]
    BadMeasure(String),
    #[error("candidate {index} is above the gradient threshold but |z| = {modulus} > eps")]
    CandidateOutsideDisc { index: usize, modulus: f64 },
    #[error("sequence a_i must be positive with a_(i+1) <= a_i / 2; fails at i = {0}")]
    BadSequence(usize),
    #[error("retraction of point {0} is ambiguous")]
    AmbiguousRetraction(usize),
    #[error("point {0} is not the center of a cluster with two or more points")]
    NotInterior(usize),
    #[error("reduction check failed: {0}")]
    ReductionCheck(String),
    #[error("metric space: {0}")]
    Net(#[from] NetError),
    #[error("tree: {0}")]
    Tree(#[from] TreeError),
    #[error("moduli point: {0}")]
    Curve(#[from] CurveError),
}

fn check_eps<T: Scalar>(eps: T) -> Result<(), BubbleError> {
    let e = eps.as_f64();
    if e.is_finite() && (MIN_EPS..=MAX_EPS).contains(&e) {
        Ok(())
    } else {
        Err(BubbleError::BadEps(e))
    }
}

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// 4ε³, the ratio of the cluster scales a_i.
fn cluster_ratio<T: Scalar>(eps: T) -> T {
    T::lit(4.0) * eps * eps * eps
}

/// Finite set T ⊂ ℂ with radii ρ: T → [0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleConfiguration<T> {
    points: Vec<Complex<T>>,
    radius: Vec<T>,
}

impl<T: Scalar> BubbleConfiguration<T> {
    pub fn new(points: Vec<Complex<T>>, radius: Vec<T>) -> Result<Self, BubbleError> {
        if points.len() != radius.len() {
            return Err(BubbleError::LengthMismatch { points: points.len(), radii: radius.len() });
        }
        for (i, &r) in radius.iter().enumerate() {
            if !(r >= T::zero()) || !r.is_finite() || !points[i].re.is_finite() || !points[i].im.is_finite() {
                return Err(BubbleError::BadRadius(i));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(BubbleError::DuplicatePoint(j, i));
                }
            }
        }
        Ok(BubbleConfiguration { points, radius })
    }

    /// Configuration with ρ ≡ 0.
    pub fn with_zero_radii(points: Vec<Complex<T>>) -> Result<Self, BubbleError> {
        let n = points.len();
        Self::new(points, vec![T::zero(); n])
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn radius(&self) -> &[T] {
        &self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, z: Complex<T>) -> Option<usize> {
        self.points.iter().position(|&p| p == z)
    }

    pub fn max_modulus(&self) -> T {
        self.points.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[..i] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn to_f64(&self) -> BubbleConfiguration<f64> {
        BubbleConfiguration {
            points: self.points.iter().map(|z| Complex::new(z.re.as_f64(), z.im.as_f64())).collect(),
            radius: self.radius.iter().map(|r| r.as_f64()).collect(),
        }
    }
}

/// First violated type-ε condition, if any.
pub fn type_eps_violation<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Option<String> {
    if check_eps(eps).is_err() {
        return Some(format!("eps = {eps} outside [1/64, 1/8]"));
    }
    let four_eps = T::lit(4.0) * eps;
    let coeff = eps * eps / T::lit(4.0);
    for (i, (z, &r)) in cfg.points.iter().zip(&cfg.radius).enumerate() {
        if !le_tol(z.norm(), eps) {
            return Some(format!("|z_{i}| = {} > eps", z.norm()));
        }
        if !le_tol(r, four_eps) {
            return Some(format!("rho_{i} = {r} > 4 eps"));
        }
    }
    for i in 0..cfg.len() {
        for j in 0..i {
            let lhs = cfg.radius[i] + cfg.radius[j];
            let rhs = coeff * (cfg.points[i] - cfg.points[j]).norm();
            if !le_tol(lhs, rhs) {
                return Some(format!("rho_{j} + rho_{i} = {lhs} > (eps^2/4)|z_{j} - z_{i}| = {rhs}"));
            }
        }
    }
    None
}

pub fn is_type_eps<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> bool {
    type_eps_violation(cfg, eps).is_none()
}

fn standard_violation<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Option<String> {
    if let Some(v) = type_eps_violation(cfg, eps) {
        return Some(v);
    }
    if cfg.index_of(Complex::new(T::zero(), T::zero())).is_none() {
        return Some("0 is not a bubble point".into());
    }
    if !eq_tol(cfg.max_modulus(), eps) {
        return Some(format!("sup |z| = {} differs from eps", cfg.max_modulus()));
    }
    None
}

/// Type ε with 0 ∈ T and sup|z| = ε.
pub fn is_standard<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> bool {
    standard_violation(cfg, eps).is_none()
}

fn require_standard<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Result<(), BubbleError> {
    check_eps(eps)?;
    match standard_violation(cfg, eps) {
        None => Ok(()),
        Some(v) => Err(BubbleError::NotStandard(v)),
    }
}

/// Finite atomic energy measure on ℂ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMeasure<T> {
    atoms: Vec<(Complex<T>, T)>,
}

impl<T: Scalar> EnergyMeasure<T> {
    pub fn new(atoms: Vec<(Complex<T>, T)>) -> Result<Self, BubbleError> {
        if atoms.is_empty() {
            return Err(BubbleError::BadMeasure("no atoms".into()));
        }
        if let Some(i) = atoms.iter().position(|(_, m)| !(*m > T::zero()) || !m.is_finite()) {
            return Err(BubbleError::BadMeasure(format!("atom {i} has non-positive mass")));
        }
        Ok(EnergyMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(Complex<T>, T)] {
        &self.atoms
    }

    pub fn total(&self) -> T {
        self.atoms.iter().fold(T::zero(), |s, (_, m)| s + *m)
    }

    /// Mass of the closed ball B̄(w, r).
    pub fn ball_mass(&self, w: Complex<T>, r: T) -> T {
        self.atoms.iter().filter(|(z, _)| (z - w).norm() <= r).fold(T::zero(), |s, (_, m)| s + *m)
    }
}

/// Smallest r ≥ 0 whose closed ball around `w` carries mass ≥ λ².
pub fn threshold_radius<T: Scalar>(m: &EnergyMeasure<T>, w: Complex<T>, lambda: T) -> Result<T, BubbleError> {
    let need = lambda * lambda;
    let target = need * (T::one() - T::slack());
    let total = m.total();
    if total < target {
        return Err(BubbleError::InsufficientMass { total: total.as_f64(), need: need.as_f64() });
    }
    let mut by_distance: Vec<(T, T)> = m.atoms.iter().map(|(z, mass)| ((z - w).norm(), *mass)).collect();
    by_distance.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
    let mut acc = T::zero();
    for (d, mass) in by_distance {
        acc += mass;
        if acc >= target {
            return Ok(d);
        }
    }
    unreachable!("total mass reaches the target")
}

/// Energy measure, candidate points with |dh| values, and the seeds T₀.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationProfile<T> {
    pub measure: EnergyMeasure<T>,
    pub candidates: Vec<(Complex<T>, T)>,
    pub seeds: Vec<Complex<T>>,
}

/// Greedy maximal configuration: T₀ with ρ ≡ 0, then repeatedly the admissible candidate of
/// least threshold radius (ties by (Re, Im)) with ρ = 𝔯.
pub fn select_bubble_points<T: Scalar>(
    profile: &ConcentrationProfile<T>,
    eps: T,
    lambda: T,
) -> Result<BubbleConfiguration<T>, BubbleError> {
    check_eps(eps)?;
    let mut cfg = BubbleConfiguration::with_zero_radii(profile.seeds.clone())?;
    let cutoff = lambda / (eps * eps);
    let mut strong: Vec<(Complex<T>, T)> = Vec::new();
    for (index, &(z, grad)) in profile.candidates.iter().enumerate() {
        if grad < cutoff {
            continue;
        }
        if !le_tol(z.norm(), eps) {
            return Err(BubbleError::CandidateOutsideDisc { index, modulus: z.norm().as_f64() });
        }
        if strong.iter().all(|(w, _)| *w != z) {
            strong.push((z, T::zero()));
        }
    }
    if strong.is_empty() {
        return Ok(cfg);
    }
    for s in strong.iter_mut() {
        s.1 = threshold_radius(&profile.measure, s.0, lambda)?;
    }
    let coeff = eps * eps / T::lit(4.0);
    loop {
        let admissible = strong.iter().filter(|(z, r)| {
            cfg.points.iter().zip(&cfg.radius).all(|(x, rho)| *x != *z && coeff * (z - x).norm() >= *r + *rho)
        });
        let best = admissible.min_by(|a, b| {
            a.1.partial_cmp(&b.1).expect("finite radii").then_with(|| lex_cmp(&a.0, &b.0))
        });
        match best {
            None => return Ok(cfg),
            Some(&(z, r)) => {
                cfg.points.push(z);
                cfg.radius.push(r);
            }
        }
    }
}

/// Standard configuration (S, r) with S = κ⁻¹(T − x*), r(z) = κ⁻¹ρ(x* + κz).
#[derive(Debug, Clone, PartialEq)]
pub struct Renormalized<T> {
    pub config: BubbleConfiguration<T>,
    pub kappa: T,
    pub x_star: Complex<T>,
}

pub fn renormalize<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Result<Renormalized<T>, BubbleError> {
    check_eps(eps)?;
    if cfg.len() < 2 {
        return Err(BubbleError::TooFewPoints(cfg.len()));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let diam = cfg.diameter();
    if is_standard(cfg, eps) && eq_tol(cfg.max_modulus(), diam) {
        return Ok(Renormalized { config: cfg.clone(), kappa: T::one(), x_star: zero });
    }
    let mut x_star = None;
    for (i, a) in cfg.points.iter().enumerate() {
        if cfg.points.iter().any(|b| (a - b).norm() == diam) {
            match x_star {
                Some(j) if lex_cmp(&cfg.points[j], a) != std::cmp::Ordering::Greater => {}
                _ => x_star = Some(i),
            }
        }
    }
    let x_star = cfg.points[x_star.expect("diameter is attained")];
    let kappa = diam / eps;
    let points = cfg.points.iter().map(|z| (z - x_star) / kappa).collect();
    let radius = cfg.radius.iter().map(|&r| r / kappa).collect();
    Ok(Renormalized { config: BubbleConfiguration::new(points, radius)?, kappa, x_star })
}

/// Net Z' ∋ s and the retraction R: Z → Z' of the cluster selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSelection {
    /// Z' in order of selection, starting with s.
    pub selected: Vec<usize>,
    /// R(x) for every point x.
    pub retraction: Vec<usize>,
}

/// Farthest-point selection: adds the point farthest from Z' (ties by index) while that
/// distance exceeds a_{|Z'|}.
pub fn cluster_select<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    a: impl Fn(usize) -> T,
    s: usize,
) -> Result<ClusterSelection, BubbleError> {
    let n = space.len();
    if s >= n {
        return Err(NetError::OutOfRange { index: s, n }.into());
    }
    for i in 0..=n {
        let (ai, next) = (a(i), a(i + 1));
        if !(ai > T::zero()) || !(next > T::zero()) || !le_tol(next + next, ai) {
            return Err(BubbleError::BadSequence(i));
        }
    }
    let mut selected = vec![s];
    let mut in_set = vec![false; n];
    in_set[s] = true;
    loop {
        let mut best: Option<(usize, T)> = None;
        for x in (0..n).filter(|&x| !in_set[x]) {
            let d = space.dist_to_set(x, &selected);
            if best.map_or(true, |(_, b)| d > b) {
                best = Some((x, d));
            }
        }
        match best {
            Some((x, d)) if d > a(selected.len()) => {
                selected.push(x);
                in_set[x] = true;
            }
            _ => break,
        }
    }
    let cap = a(selected.len());
    let mut retraction = Vec::with_capacity(n);
    for x in 0..n {
        let mut near = selected.iter().filter(|&&y| space.d(x, y) <= cap);
        match (near.next(), near.next()) {
            (Some(&y), None) => retraction.push(y),
            _ => return Err(BubbleError::AmbiguousRetraction(x)),
        }
    }
    Ok(ClusterSelection { selected, retraction })
}

/// Cluster data of a standard configuration for a_i = (4ε³)^i and s = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    /// T' as indices into the configuration, ordered by (Re, Im) of the points.
    pub selected: Vec<usize>,
    /// R(z) for every index z.
    pub retraction: Vec<usize>,
    /// ρ' on T'.
    pub rho_p: BTreeMap<usize, T>,
    /// k = |T'|.
    pub k: usize,
}

impl<T: Scalar> Reduction<T> {
    /// R⁻¹(x) in increasing index order.
    pub fn cluster(&self, x: usize) -> Vec<usize> {
        (0..self.retraction.len()).filter(|&z| self.retraction[z] == x).collect()
    }

    /// Whether x ∈ T'_int, i.e. |R⁻¹(x)| ≥ 2.
    pub fn is_interior(&self, x: usize) -> bool {
        self.rho_p.contains_key(&x) && self.retraction.iter().filter(|&&y| y == x).count() >= 2
    }

    /// (T_x, ρ_x) obtained by reduction at the interior point x.
    pub fn reduce_at(&self, cfg: &BubbleConfiguration<T>, eps: T, x: usize) -> Result<ReducedCluster<T>, BubbleError> {
        if !self.is_interior(x) {
            return Err(BubbleError::NotInterior(x));
        }
        let center = cfg.points[x];
        let rho_p = self.rho_p[&x];
        let origin = self.cluster(x);
        let spread = origin.iter().fold(T::zero(), |m, &z| m.max((cfg.points[z] - center).norm()));
        let gamma = spread / (eps * rho_p);
        let scale = gamma * rho_p;
        let points = origin.iter().map(|&z| (cfg.points[z] - center) / scale).collect();
        let radius = origin.iter().map(|&z| cfg.radius[z] / scale).collect();
        let config = BubbleConfiguration::new(points, radius)?;
        Ok(ReducedCluster { config, origin, center, gamma, scale })
    }
}

/// Reduction (T_x, ρ_x) at x with Φ_x(w) = center + scale·w and scale = γ(x)ρ'(x).
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCluster<T> {
    pub config: BubbleConfiguration<T>,
    /// Index in the parent configuration of each point of T_x.
    pub origin: Vec<usize>,
    pub center: Complex<T>,
    pub gamma: T,
    pub scale: T,
}

impl<T: Scalar> ReducedCluster<T> {
    pub fn phi(&self, w: Complex<T>) -> Complex<T> {
        self.center + w * self.scale
    }
}

/// Cluster selection on a standard configuration with ρ'(x) = (1/4ε)·max{ε⁻¹(4ε³)^k, ρ(x)}.
pub fn reduce<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Result<Reduction<T>, BubbleError> {
    require_standard(cfg, eps)?;
    let space = FiniteMetricSpace::from_points(&cfg.points, |a, b| (a - b).norm())?;
    let s = cfg.index_of(Complex::new(T::zero(), T::zero())).expect("standard");
    let ratio = cluster_ratio(eps);
    let sel = cluster_select(&space, |i| ratio.powi(i as i32), s)?;
    let k = sel.selected.len();
    if k < 2 {
        return Err(BubbleError::ReductionCheck(format!("k = {k} < 2")));
    }
    let mut selected = sel.selected.clone();
    selected.sort_by(|&a, &b| lex_cmp(&cfg.points[a], &cfg.points[b]));
    let floor = ratio.powi(k as i32) / eps;
    let quarter = T::one() / (T::lit(4.0) * eps);
    let rho_p: BTreeMap<usize, T> = selected.iter().map(|&x| (x, quarter * floor.max(cfg.radius[x]))).collect();
    let red = Reduction { selected, retraction: sel.retraction, rho_p, k };
    check_reduction(cfg, eps, &red)?;
    Ok(red)
}

fn check_reduction<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T, red: &Reduction<T>) -> Result<(), BubbleError> {
    let fail = |s: String| Err(BubbleError::ReductionCheck(s));
    let four_eps = T::lit(4.0) * eps;
    let singular = cluster_ratio(eps).powi(red.k as i32) / (four_eps * eps);
    for (i, &x) in red.selected.iter().enumerate() {
        for &y in &red.selected[..i] {
            let lhs = red.rho_p[&x] + red.rho_p[&y];
            if !le_tol(lhs, (eps + eps) * (cfg.points[x] - cfg.points[y]).norm()) {
                return fail(format!("2-separation fails for points {y}, {x}"));
            }
        }
    }
    for z in 0..cfg.len() {
        let x = red.retraction[z];
        let rp = red.rho_p[&x];
        if !le_tol((cfg.points[z] - cfg.points[x]).norm(), four_eps * eps * rp) {
            return fail(format!("cluster diameter bound fails at point {z}"));
        }
        if !le_tol(cfg.radius[z], four_eps * rp) {
            return fail(format!("rescaling radius bound fails at point {z}"));
        }
        if z != x && !eq_tol(rp, singular) {
            return fail(format!("rho' at the center of non-trivial cluster {x} is {rp}, expected {singular}"));
        }
    }
    Ok(())
}

/// `reduce` followed by reduction at the configuration index `x`.
pub fn reduce_at<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T, x: usize) -> Result<ReducedCluster<T>, BubbleError> {
    reduce(cfg, eps)?.reduce_at(cfg, eps, x)
}

/// Stable rooted tree and moduli point associated to a standard configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeAssociation<T> {
    pub point: ModuliPoint<T>,
    /// v(T, ρ), the endpoint of the root edge.
    pub root_vertex: usize,
    /// The bubble point of T carried by each external non-root edge.
    pub edge_to_bubble: BTreeMap<usize, Complex<T>>,
}

impl<T: Scalar> TreeAssociation<T> {
    pub fn tree(&self) -> &RootedTree {
        self.point.tree()
    }
}

struct Builder<T> {
    n_vertices: usize,
    endpoints: Vec<Vec<usize>>,
    gamma: BTreeMap<usize, Complex<T>>,
    zr: BTreeMap<(usize, usize), EdgeCoord<T>>,
    bubbles: BTreeMap<usize, Complex<T>>,
}

impl<T: Scalar> Builder<T> {
    /// Adds the vertex of (cfg, ρ) and its subtree; `origin` holds the points of the original T.
    fn build(&mut self, cfg: &BubbleConfiguration<T>, origin: &[Complex<T>], eps: T) -> Result<usize, BubbleError> {
        let v = self.n_vertices;
        self.n_vertices += 1;
        let red = reduce(cfg, eps)?;
        for &x in &red.selected {
            let e = self.endpoints.len();
            self.endpoints.push(vec![v]);
            self.zr.insert((v, e), EdgeCoord { z: cfg.points[x], rho: real(red.rho_p[&x]) });
            if red.is_interior(x) {
                let sub = red.reduce_at(cfg, eps, x)?;
                let sub_origin: Vec<Complex<T>> = sub.origin.iter().map(|&z| origin[z]).collect();
                let child = self.build(&sub.config, &sub_origin, eps)?;
                self.endpoints[e].push(child);
                self.gamma.insert(e, real(sub.gamma));
            } else {
                self.bubbles.insert(e, origin[x]);
            }
        }
        Ok(v)
    }
}

/// Recursive association: root edge 0 at vertex 0, one edge per point of T' in (Re, Im) order,
/// interior points glued to the tree of their reduction with γ = γ(x).
pub fn associate_tree<T: Scalar>(cfg: &BubbleConfiguration<T>, eps: T) -> Result<TreeAssociation<T>, BubbleError> {
    require_standard(cfg, eps)?;
    let mut b = Builder {
        n_vertices: 0,
        endpoints: vec![vec![0]],
        gamma: BTreeMap::new(),
        zr: BTreeMap::new(),
        bubbles: BTreeMap::new(),
    };
    let root_vertex = b.build(cfg, cfg.points(), eps)?;
    let tree = RootedTree::new(Tree::new(b.n_vertices, b.endpoints)?, 0)?;
    let point = ModuliPoint::new(tree, &b.gamma, &b.zr)?;
    Ok(TreeAssociation { point, root_vertex, edge_to_bubble: b.bubbles })
}

/// Outcome of one verified condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub detail: Vec<String>,
}

impl Check {
    fn from_failures(detail: Vec<String>) -> Self {
        Check { pass: detail.is_empty(), detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationReport {
    /// (i) p ∈ M_T(ε, 4ε, α) with α_v = (4ε³)^{deg v}.
    pub compact: Check,
    /// (ii) the root-chart positions of the external edges are exactly T.
    pub bubbles: Check,
    /// (iii) every γ-coordinate is nonzero.
    pub gamma: Check,
}

impl AssociationReport {
    pub fn passed(&self) -> bool {
        self.compact.pass && self.bubbles.pass && self.gamma.pass
    }
}

/// Compactness parameters θ = ε, τ = 4ε, α_v = (4ε³)^{deg v}.
pub fn association_params<T: Scalar>(t: &RootedTree, eps: T) -> Result<CompactnessParams<T>, CurveError> {
    let ratio = cluster_ratio(eps);
    let alpha = (0..t.n_vertices()).map(|v| ratio.powi(t.degree(v) as i32)).collect();
    CompactnessParams::new(eps, T::lit(4.0) * eps, alpha)
}

pub fn verify_association<T: Scalar>(cfg: &BubbleConfiguration<T>, assoc: &TreeAssociation<T>, eps: T) -> AssociationReport {
    let p = &assoc.point;
    let t = p.tree();

    let compact = match association_params(t, eps).and_then(|c| in_compact_subset(p, &c)) {
        Ok(r) => Check::from_failures(r.violations.iter().map(|v| format!("{v:?}")).collect()),
        Err(e) => Check::from_failures(vec![e.to_string()]),
    };

    let mut bad = Vec::new();
    if assoc.root_vertex != t.root_vertex() {
        bad.push(format!("root vertex {} is not the endpoint of the root edge", assoc.root_vertex));
    }
    let tol = T::lit(MATCH_TOL);
    let close = |a: Complex<T>, b: Complex<T>| (a - b).norm() <= tol * eps.max(b.norm());
    let external: Vec<usize> = t.tree().half_edges().filter(|&e| e != t.root_edge()).collect();
    if external.len() != cfg.len() {
        bad.push(format!("{} external edges for {} bubble points", external.len(), cfg.len()));
    }
    let mut used = vec![false; cfg.len()];
    for &e in &external {
        let v = t.tree().endpoints(e)[0];
        let z = match z_cross(p, assoc.root_vertex, v, e) {
            Ok(z) => z,
            Err(err) => {
                bad.push(format!("edge {e}: {err}"));
                continue;
            }
        };
        let nearest = (0..cfg.len()).min_by(|&a, &b| {
            (cfg.points[a] - z).norm().partial_cmp(&(cfg.points[b] - z).norm()).expect("finite")
        });
        match nearest {
            Some(i) if close(z, cfg.points[i]) && !used[i] => {
                used[i] = true;
                match assoc.edge_to_bubble.get(&e) {
                    Some(&b) if b == cfg.points[i] => {}
                    Some(&b) => bad.push(format!("edge {e} is labelled {b} but lands on {}", cfg.points[i])),
                    None => bad.push(format!("edge {e} has no bubble label")),
                }
            }
            Some(i) if close(z, cfg.points[i]) => bad.push(format!("edge {e} lands on point {i} twice")),
            _ => bad.push(format!("edge {e} lands on {z}, which is not a bubble point")),
        }
    }
    if let Some(i) = used.iter().position(|u| !u) {
        bad.push(format!("bubble point {i} = {} is not hit", cfg.points[i]));
    }
    let bubbles = Check::from_failures(bad);

    let zero: Vec<String> = t
        .full_edges()
        .into_iter()
        .filter(|&e| p.gamma(e).map_or(true, |g| !(g.norm() > T::zero())))
        .map(|e| format!("gamma vanishes on edge {e}"))
        .collect();
    AssociationReport { compact, bubbles, gamma: Check::from_failures(zero) }
}

/// Bubble point in the configuration file format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubblePoint {
    pub z: [f64; 2],
    pub rho: f64,
}

/// `{ "eps": ..., "points": [{"z": [re, im], "rho": r}] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleFile {
    pub eps: f64,
    pub points: Vec<BubblePoint>,
}

impl BubbleFile {
    pub fn new(cfg: &BubbleConfiguration<f64>, eps: f64) -> Self {
        let points = cfg.points.iter().zip(&cfg.radius).map(|(z, &rho)| BubblePoint { z: [z.re, z.im], rho }).collect();
        BubbleFile { eps, points }
    }

    pub fn config(&self) -> Result<BubbleConfiguration<f64>, BubbleError> {
        check_eps(self.eps)?;
        let points = self.points.iter().map(|p| Complex::new(p.z[0], p.z[1])).collect();
        BubbleConfiguration::new(points, self.points.iter().map(|p| p.rho).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct AssociationJson {
    point: ModuliPoint<f64>,
    root_vertex: usize,
    edge_to_bubble: BTreeMap<String, [f64; 2]>,
}

impl Serialize for TreeAssociation<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AssociationJson {
            point: self.point.clone(),
            root_vertex: self.root_vertex,
            edge_to_bubble: self.edge_to_bubble.iter().map(|(e, z)| (e.to_string(), [z.re, z.im])).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeAssociation<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = AssociationJson::deserialize(d)?;
        let t = json.point.tree();
        if json.root_vertex >= t.n_vertices() {
            return Err(D::Error::custom(format!("root vertex {} out of range", json.root_vertex)));
        }
        let mut edge_to_bubble = BTreeMap::new();
        for (k, z) in json.edge_to_bubble {
            let e: usize = k.trim().parse().map_err(|_| D::Error::custom(format!("bad edge key {k:?}")))?;
            if e >= t.n_edges() || !t.is_half(e) || e == t.root_edge() {
                return Err(D::Error::custom(format!("edge {e} is not an external non-root edge")));
            }
            edge_to_bubble.insert(e, Complex::new(z[0], z[1]));
        }
        Ok(TreeAssociation { point: json.point, root_vertex: json.root_vertex, edge_to_bubble })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_standard_config;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 0.125;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cfg(points: &[Complex<f64>], radius: &[f64]) -> BubbleConfiguration<f64> {
        BubbleConfiguration::new(points.to_vec(), radius.to_vec()).unwrap()
    }

    #[test]
    fn type_eps_examples() {
        let base = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[0.0, 0.0]);
        assert!(is_standard(&base, EPS));
        let r = EPS.powi(3) / 8.0;
        let edge = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[r, r]);
        assert!(is_type_eps(&edge, EPS));
        let over = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[r * 1.001, r]);
        assert!(!is_type_eps(&over, EPS));
        let single = cfg(&[c(0.0, 0.0)], &[0.0]);
        assert!(is_type_eps(&single, EPS));
        assert!(!is_standard(&single, EPS));
        assert!(!is_type_eps(&base, 0.2));
        assert_eq!(BubbleConfiguration::new(vec![c(0.0, 0.0); 2], vec![0.0; 2]), Err(BubbleError::DuplicatePoint(0, 1)));
    }

    #[test]
    fn threshold_radius_examples() {
        let lam = 0.5f64;
        let half = EnergyMeasure::new(vec![(c(1.0, 0.0), lam * lam / 2.0), (c(-1.0, 0.0), lam * lam / 2.0)]).unwrap();
        assert_eq!(threshold_radius(&half, c(0.0, 0.0), lam).unwrap(), 1.0);
        let w = c(0.3, -0.2);
        let one = EnergyMeasure::new(vec![(w, lam * lam)]).unwrap();
        assert_eq!(threshold_radius(&one, w, lam).unwrap(), 0.0);
        assert!(matches!(threshold_radius(&one, w, 0.6), Err(BubbleError::InsufficientMass { .. })));
    }

    #[test]
    fn threshold_radius_is_one_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let atoms = (0..40).map(|_| (c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0.01..0.1))).collect();
        let m = EnergyMeasure::new(atoms).unwrap();
        let lam = (m.total() / 3.0).sqrt();
        for _ in 0..1000 {
            let x = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let y = x + c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let (rx, ry) = (threshold_radius(&m, x, lam).unwrap(), threshold_radius(&m, y, lam).unwrap());
            assert!((rx - ry).abs() <= (x - y).norm() + 1e-12);
            assert!(m.ball_mass(x, rx) >= lam * lam * (1.0 - 1e-12));
        }
    }

    #[test]
    fn selection_examples() {
        let lam = 0.01;
        let m = EnergyMeasure::new(vec![(c(0.05, 0.0), 2.0 * lam * lam)]).unwrap();
        let seeds = vec![c(0.0, 0.0), c(0.1, 0.0)];
        let weak = ConcentrationProfile { measure: m.clone(), candidates: vec![(c(0.05, 0.0), 0.0)], seeds: seeds.clone() };
        let got = select_bubble_points(&weak, EPS, lam).unwrap();
        assert_eq!(got.points(), &seeds[..]);
        assert_eq!(got.radius(), &[0.0, 0.0]);
        let strong = ConcentrationProfile { measure: m, candidates: vec![(c(0.05, 0.0), 1.0); 3], seeds: vec![] };
        let got = select_bubble_points(&strong, EPS, lam).unwrap();
        assert_eq!(got.points(), &[c(0.05, 0.0)]);
        assert_eq!(got.radius(), &[0.0]);
    }

    fn random_profile(rng: &mut ChaCha8Rng, lam: f64) -> ConcentrationProfile<f64> {
        let centers: Vec<Complex<f64>> = (0..rng.gen_range(1..5)).map(|_| crate::sampling::disc_point(rng, EPS)).collect();
        let mut atoms = Vec::new();
        for &z in &centers {
            for _ in 0..rng.gen_range(1..8) {
                atoms.push((z + crate::sampling::disc_point(rng, 1e-3), lam * lam * rng.gen_range(0.1..0.8)));
            }
        }
        let candidates = (0..rng.gen_range(0..30))
            .map(|_| {
                let z = centers[rng.gen_range(0..centers.len())] + crate::sampling::disc_point(rng, 1e-3);
                let z = if z.norm() > EPS { z * (EPS / z.norm()) } else { z };
                (z, rng.gen_range(0.0..2.0) * lam / (EPS * EPS))
            })
            .collect();
        let seeds = (0..rng.gen_range(0..3)).map(|_| crate::sampling::disc_point(rng, EPS)).collect();
        atoms.push((centers[0], 1.5 * lam * lam));
        ConcentrationProfile { measure: EnergyMeasure::new(atoms).unwrap(), candidates, seeds }
    }

    #[test]
    fn selection_properties_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let lam = 1e-4;
        let coeff = EPS * EPS / 4.0;
        for _ in 0..100 {
            let prof = random_profile(&mut rng, lam);
            let got = select_bubble_points(&prof, EPS, lam).unwrap();
            let n0 = prof.seeds.len();
            assert_eq!(&got.points()[..n0], &prof.seeds[..]);
            assert!(got.radius()[..n0].iter().all(|&r| r == 0.0));
            let added = got.len() - n0;
            assert!(added <= (prof.measure.total() / (lam * lam)).floor() as usize);
            for i in n0..got.len() {
                let r = threshold_radius(&prof.measure, got.points()[i], lam).unwrap();
                assert_eq!(got.radius()[i], r);
                for j in n0..i {
                    let d = (got.points()[i] - got.points()[j]).norm();
                    assert!(d > got.radius()[i] + got.radius()[j]);
                }
            }
            for i in 0..got.len() {
                for j in 0..i {
                    assert!(got.radius()[i] + got.radius()[j] <= coeff * (got.points()[i] - got.points()[j]).norm());
                }
            }
            for &(z, grad) in &prof.candidates {
                if grad < lam / (EPS * EPS) {
                    continue;
                }
                let rz = threshold_radius(&prof.measure, z, lam).unwrap();
                let ok = got.points().iter().zip(got.radius()).any(|(x, &rho)| {
                    rho <= rz && (coeff * (z - x).norm() < rz + rho || z == *x)
                });
                assert!(ok, "candidate {z} is not covered");
            }
        }
    }

    #[test]
    fn renormalize_examples() {
        let base = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[0.0, 0.0]);
        let r = renormalize(&base, EPS).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert_eq!(r.config, base);
        let wide = cfg(&[c(0.0, 0.0), c(2.0 * EPS, 0.0)], &[0.0, 0.0]);
        let r = renormalize(&wide, EPS).unwrap();
        assert_eq!(r.kappa, 2.0);
        assert_eq!(r.config.points(), &[c(0.0, 0.0), c(EPS, 0.0)]);
        assert_eq!(renormalize(&cfg(&[c(0.0, 0.0)], &[0.0]), EPS).unwrap_err(), BubbleError::TooFewPoints(1));
    }

    #[test]
    fn renormalize_preserves_type_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        for _ in 0..100 {
            let n = rng.gen_range(2..10);
            let pts: Vec<Complex<f64>> = (0..n).map(|_| crate::sampling::disc_point(&mut rng, EPS)).collect();
            let mut dmin = f64::INFINITY;
            for i in 0..n {
                for j in 0..i {
                    dmin = dmin.min((pts[i] - pts[j]).norm());
                }
            }
            let rad: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 0.999 * EPS * EPS / 8.0 * dmin).collect();
            let start = cfg(&pts, &rad);
            assert!(is_type_eps(&start, EPS));
            let r = renormalize(&start, EPS).unwrap();
            assert!(r.kappa > 0.0 && r.kappa <= 2.0);
            assert!(is_standard(&r.config, EPS), "{:?}", standard_violation(&r.config, EPS));
            let again = renormalize(&r.config, EPS).unwrap();
            assert_eq!(again.config, r.config);
            assert_eq!(again.kappa, 1.0);
        }
    }

    fn line(points: &[f64]) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_points(points, |a, b| (a - b).abs()).unwrap()
    }

    #[test]
    fn cluster_examples() {
        let one = cluster_select(&line(&[3.0]), |i| 0.5f64.powi(i as i32), 0).unwrap();
        assert_eq!(one, ClusterSelection { selected: vec![0], retraction: vec![0] });
        let two = cluster_select(&line(&[0.0, 1.0]), |i| 0.4 * 0.5f64.powi(i as i32), 0).unwrap();
        assert_eq!(two.selected, vec![0, 1]);
        assert_eq!(two.retraction, vec![0, 1]);
        assert_eq!(cluster_select(&line(&[0.0, 1.0]), |i| 0.9f64.powi(i as i32), 0), Err(BubbleError::BadSequence(0)));
    }

    /// Checks (i), (ii) and uniqueness of R by brute force.
    fn check_cluster(space: &FiniteMetricSpace<f64>, a: &dyn Fn(usize) -> f64, s: usize, sel: &ClusterSelection) {
        let k = sel.selected.len();
        assert!(sel.selected.contains(&s));
        for (i, &x) in sel.selected.iter().enumerate() {
            assert_eq!(sel.retraction[x], x);
            for &y in &sel.selected[..i] {
                assert!(space.d(x, y) > a(k - 1));
            }
        }
        for x in 0..space.len() {
            assert!(space.d(x, sel.retraction[x]) <= a(k));
            let within = sel.selected.iter().filter(|&&y| space.d(x, y) <= a(k)).count();
            assert_eq!(within, 1);
        }
        for z in (0..space.len()).filter(|z| !sel.selected.contains(z)) {
            let mut bigger = sel.selected.clone();
            bigger.push(z);
            let ok = bigger.iter().enumerate().all(|(i, &x)| bigger[..i].iter().all(|&y| space.d(x, y) > a(k)));
            assert!(!ok, "selection is not maximal");
        }
    }

    #[test]
    fn cluster_properties_on_random_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for _ in 0..200 {
            let n = rng.gen_range(1..=30);
            let pts: Vec<Complex<f64>> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let space = FiniteMetricSpace::from_points(&pts, |a, b| (a - b).norm()).unwrap();
            let a0: f64 = rng.gen_range(0.05..1.0);
            let ratio: f64 = rng.gen_range(2.0..5.0);
            let a = move |i: usize| a0 / ratio.powi(i as i32);
            let s = rng.gen_range(0..n);
            let sel = cluster_select(&space, a, s).unwrap();
            check_cluster(&space, &a, s, &sel);
        }
    }

    #[test]
    fn reduce_base_example() {
        let base = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[0.0, 0.0]);
        let red = reduce(&base, EPS).unwrap();
        assert_eq!(red.k, 2);
        assert_eq!(red.selected, vec![0, 1]);
        assert!(red.rho_p.values().all(|&r| r == 1.0 / 1024.0));
        assert!(!red.is_interior(0));
        assert_eq!(red.reduce_at(&base, EPS, 0), Err(BubbleError::NotInterior(0)));
    }

    fn nested() -> BubbleConfiguration<f64> {
        cfg(&[c(0.0, 0.0), c(EPS, 0.0), c(EPS - 1e-6, 0.0)], &[0.0, 0.0, 0.0])
    }

    #[test]
    fn reduce_at_pair_cluster() {
        let t = nested();
        let red = reduce(&t, EPS).unwrap();
        assert_eq!(red.k, 2);
        assert!(red.is_interior(1));
        let sub = red.reduce_at(&t, EPS, 1).unwrap();
        let rp = 1.0 / 1024.0;
        assert!((sub.gamma / (1e-6 / (EPS * rp)) - 1.0).abs() < 1e-9);
        assert_eq!(sub.origin, vec![1, 2]);
        assert_eq!(sub.config.points()[0], c(0.0, 0.0));
        assert!((sub.config.points()[1] - c(-EPS, 0.0)).norm() < 1e-9);
        assert!(is_standard(&sub.config, EPS));
        assert!((sub.phi(sub.config.points()[1]) - t.points()[2]).norm() < 1e-15);
    }

    /// Independent re-check of the reduction inequalities and the nearest-point property.
    fn check_reduction_oracle(t: &BubbleConfiguration<f64>, red: &Reduction<f64>) {
        let e = EPS;
        let ratio_k = (4.0 * e * e * e).powi(red.k as i32);
        for &x in &red.selected {
            let expect = (ratio_k / e).max(t.radius()[x]) / (4.0 * e);
            assert_eq!(red.rho_p[&x], expect);
        }
        for (i, &x) in red.selected.iter().enumerate() {
            for &y in &red.selected[..i] {
                assert!(2.0 * e * (t.points()[x] - t.points()[y]).norm() >= red.rho_p[&x] + red.rho_p[&y]);
            }
        }
        for z in 0..t.len() {
            let x = red.retraction[z];
            let rp = red.rho_p[&x];
            assert!((t.points()[z] - t.points()[x]).norm() <= 4.0 * e * e * rp * (1.0 + 1e-12));
            assert!(t.radius()[z] <= 4.0 * e * rp * (1.0 + 1e-12));
            if z != x {
                assert!((rp - ratio_k / (4.0 * e * e)).abs() <= 1e-12 * rp);
            }
        }
        for &x in &red.selected {
            let rp = red.rho_p[&x];
            for i in 0..10 {
                for j in 0..10 {
                    let w = t.points()[x] + Complex::from_polar(rp * (i as f64 + 0.5) / 10.0, std::f64::consts::TAU * j as f64 / 10.0);
                    let best = (0..t.len())
                        .min_by(|&a, &b| (t.points()[a] - w).norm().partial_cmp(&(t.points()[b] - w).norm()).unwrap())
                        .unwrap();
                    assert_eq!(red.retraction[best], x);
                }
            }
        }
    }

    #[test]
    fn reduction_on_random_standard_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let mut interior = 0;
        for i in 0..200 {
            let t = random_standard_config(&mut rng, 2 + i % 11, EPS).unwrap();
            let red = reduce(&t, EPS).unwrap();
            assert!(red.k >= 2);
            check_reduction_oracle(&t, &red);
            for &x in &red.selected {
                if red.is_interior(x) {
                    interior += 1;
                    let sub = red.reduce_at(&t, EPS, x).unwrap();
                    assert!(sub.gamma > 0.0 && sub.gamma <= 4.0 * EPS * (1.0 + 1e-12));
                    assert!(sub.config.index_of(c(0.0, 0.0)).is_some());
                    assert!(is_standard(&sub.config, EPS), "{:?}", standard_violation(&sub.config, EPS));
                }
            }
        }
        assert!(interior > 20, "sweep exercised only {interior} reductions");
    }

    #[test]
    fn base_case_association() {
        let base = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[0.0, 0.0]);
        let a = associate_tree(&base, EPS).unwrap();
        let t = a.tree();
        assert_eq!((t.n_vertices(), t.n_edges()), (1, 3));
        assert_eq!(a.root_vertex, 0);
        assert_eq!(a.point.z(1), c(0.0, 0.0));
        assert_eq!(a.point.z(2), c(EPS, 0.0));
        assert!([1, 2].iter().all(|&e| a.point.rho(e) == c(1.0 / 1024.0, 0.0)));
        assert_eq!(a.edge_to_bubble, BTreeMap::from([(1, c(0.0, 0.0)), (2, c(EPS, 0.0))]));
        assert!(verify_association(&base, &a, EPS).passed());
    }

    #[test]
    fn two_level_association() {
        let t = nested();
        let a = associate_tree(&t, EPS).unwrap();
        let tree = a.tree();
        assert_eq!(tree.n_vertices(), 2);
        assert_eq!(tree.full_edges().len(), 1);
        assert!(tree.tree().is_stable());
        let e = tree.full_edges()[0];
        assert!(a.point.gamma(e).unwrap().norm() > 0.0);
        let report = verify_association(&t, &a, EPS);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn perturbed_coordinate_breaks_recovery() {
        let base = cfg(&[c(0.0, 0.0), c(EPS, 0.0)], &[0.0, 0.0]);
        let mut a = associate_tree(&base, EPS).unwrap();
        let k = a.point.coord(2).unwrap();
        a.point.set_coord(2, EdgeCoord { z: k.z - c(0.01, 0.0), rho: k.rho }).unwrap();
        let r = verify_association(&base, &a, EPS);
        assert!(!r.bubbles.pass);
        assert!(r.compact.pass && r.gamma.pass);
        let t = nested();
        let mut a = associate_tree(&t, EPS).unwrap();
        let e = a.tree().full_edges()[0];
        a.point.set_gamma(e, c(0.0, 0.0)).unwrap();
        let r = verify_association(&t, &a, EPS);
        assert!(!r.gamma.pass);
        assert!(!r.bubbles.pass);
    }

    #[test]
    fn association_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let mut deepest = 0;
        for i in 0..200 {
            let t = random_standard_config(&mut rng, 2 + i % 11, EPS).unwrap();
            let a = associate_tree(&t, EPS).unwrap();
            let tree = a.tree();
            assert!(tree.tree().is_stable());
            assert!((0..tree.n_vertices()).all(|v| tree.depth(v) < t.len()));
            deepest = deepest.max((0..tree.n_vertices()).map(|v| tree.depth(v)).max().unwrap());
            let mut hit: Vec<Complex<f64>> = a.edge_to_bubble.values().copied().collect();
            let mut want = t.points().to_vec();
            hit.sort_by(lex_cmp);
            want.sort_by(lex_cmp);
            assert_eq!(hit, want);
            let report = verify_association(&t, &a, EPS);
            assert!(report.passed(), "{report:?}");
        }
        assert!(deepest >= 2);
    }

    #[test]
    fn single_precision_association() {
        let base = BubbleConfiguration::<f32>::with_zero_radii(vec![Complex::new(0.0, 0.0), Complex::new(0.125, 0.0)]).unwrap();
        let a = associate_tree(&base, 0.125f32).unwrap();
        assert!(verify_association(&base, &a, 0.125f32).passed());
    }

    #[test]
    fn json_round_trip() {
        let t = nested();
        let file = BubbleFile::new(&t, EPS);
        let text = serde_json::to_string(&file).unwrap();
        let back: BubbleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.config().unwrap(), t);
        let a = associate_tree(&t, EPS).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        let back: TreeAssociation<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"eps": 0.5, "points": []}"#;
        let parsed: BubbleFile = serde_json::from_str(bad).unwrap();
        assert_eq!(parsed.config(), Err(BubbleError::BadEps(0.5)));
    }
}
