//! Finite metric spaces, Hausdorff distance, nets and covering numbers, and the cover of a
//! family of Lipschitz maps.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::projective::{sphere_distance, ProjPoint};
use crate::scalar::{le_tol, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("distance matrix must be square, got row {row} of length {len} for n = {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("invalid distance d({i},{j}) = {value}")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("distance matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("triangle inequality fails for ({i},{j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("point set is empty")]
    Empty,
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("space has {n} points; exact search is capped at {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("point index {index} out of range for a space of {n} points")]
    OutOfRange { index: usize, n: usize },
    #[error("member {member}: fiber and values have different lengths")]
    FiberMismatch { member: usize },
    #[error("member {member} is not Λ-Lipschitz on the pair ({x}, {y}): d_W = {dw}, Λ·d_Z = {bound}")]
    NotLipschitz { member: usize, x: usize, y: usize, dw: f64, bound: f64 },
    #[error("Λ must be at least 1, got {0}")]
    BadLipschitz(f64),
    #[error("no γ = δ(1 − 2⁻ʲ), j ≤ 20, keeps the chosen sets nets")]
    NoAdmissibleGamma,
    #[error("cover enumeration exceeds the cap of {0} index tuples")]
    ResourceCap(usize),
}

/// Finite metric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<T> {
    dist: Vec<Vec<T>>,
    labels: Vec<String>,
}

impl<T: Scalar> FiniteMetricSpace<T> {
    pub fn new(dist: Vec<Vec<T>>) -> Result<Self, NetError> {
        let n = dist.len();
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(NetError::NotSquare { row: i, len: row.len(), n });
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= T::zero()) || !d.is_finite() || (i == j && d != T::zero()) {
                    return Err(NetError::InvalidDistance { i, j, value: d.as_f64() });
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if dist[i][j] != dist[j][i] {
                    return Err(NetError::NotSymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !le_tol(dist[i][k], dist[i][j] + dist[j][k]) {
                        return Err(NetError::Triangle { i, j, k });
                    }
                }
            }
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(FiniteMetricSpace { dist, labels })
    }

    /// Space on `points` with distances from `d`, symmetrized by construction.
    pub fn from_points<P>(points: &[P], d: impl Fn(&P, &P) -> T) -> Result<Self, NetError> {
        let n = points.len();
        let mut dist = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..i {
                let v = d(&points[i], &points[j]);
                dist[i][j] = v;
                dist[j][i] = v;
            }
        }
        Self::new(dist)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.len());
        self.labels = labels;
        self
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> T {
        self.dist[i][j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.dist
    }

    pub fn diameter(&self) -> T {
        self.dist.iter().flatten().fold(T::zero(), |m, &d| m.max(d))
    }

    /// min_{y ∈ set} d(i, y); infinite for an empty set.
    pub fn dist_to_set(&self, i: usize, set: &[usize]) -> T {
        set.iter().fold(T::infinity(), |m, &j| m.min(self.dist[i][j]))
    }

    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> Result<T, NetError> {
        hausdorff(a, b, |&i, &j| self.dist[i][j])
    }

    /// sup over the space of the distance to `points`.
    pub fn covering_radius(&self, points: &[usize]) -> T {
        (0..self.len()).fold(T::zero(), |m, i| m.max(self.dist_to_set(i, points)))
    }

    /// Whether `points` is a γ-net: every point strictly within γ.
    pub fn is_net(&self, points: &[usize], gamma: T) -> bool {
        !points.is_empty() && (0..self.len()).all(|i| self.dist_to_set(i, points) < gamma)
    }

    pub fn subspace(&self, points: &[usize]) -> Self {
        let dist = points.iter().map(|&i| points.iter().map(|&j| self.dist[i][j]).collect()).collect();
        let labels = points.iter().map(|&i| self.labels[i].clone()).collect();
        FiniteMetricSpace { dist, labels }
    }
}

/// sup_{a∈A} inf_{b∈B} d(a, b).
pub fn directed_hausdorff<P, T: Scalar>(a: &[P], b: &[P], d: impl Fn(&P, &P) -> T) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(b.iter().fold(T::infinity(), |n, y| n.min(d(x, y)))))
}

pub fn hausdorff<P, T: Scalar>(a: &[P], b: &[P], d: impl Fn(&P, &P) -> T) -> Result<T, NetError> {
    if a.is_empty() || b.is_empty() {
        return Err(NetError::Empty);
    }
    Ok(directed_hausdorff(a, b, &d).max(directed_hausdorff(b, a, &d)))
}

/// A γ-net of a finite metric space, by point indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net<T> {
    pub points: Vec<usize>,
    pub radius: T,
}

impl<T> Net<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_radius<T: Scalar>(gamma: T) -> Result<(), NetError> {
    if gamma > T::zero() && gamma.is_finite() {
        Ok(())
    } else {
        Err(NetError::BadRadius(gamma.as_f64()))
    }
}

/// Farthest-point net seeded at index 0.
pub fn greedy_net<T: Scalar>(space: &FiniteMetricSpace<T>, gamma: T) -> Result<Net<T>, NetError> {
    check_radius(gamma)?;
    if space.is_empty() {
        return Err(NetError::Empty);
    }
    let mut points = vec![0];
    let mut nearest: Vec<T> = (0..space.len()).map(|i| space.d(i, 0)).collect();
    loop {
        let (far, &d) = nearest
            .iter()
            .enumerate()
            .fold((0, &T::neg_infinity()), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        if d < gamma {
            break;
        }
        points.push(far);
        for (i, n) in nearest.iter_mut().enumerate() {
            *n = n.min(space.d(i, far));
        }
    }
    Ok(Net { points, radius: gamma })
}

pub const EXACT_NU_CAP: usize = 25;

/// A minimum-cardinality γ-net, found by iterative-deepening set-cover search.
pub fn exact_net<T: Scalar>(space: &FiniteMetricSpace<T>, gamma: T) -> Result<Net<T>, NetError> {
    check_radius(gamma)?;
    let n = space.len();
    if n == 0 {
        return Err(NetError::Empty);
    }
    if n > EXACT_NU_CAP {
        return Err(NetError::TooLarge { n, cap: EXACT_NU_CAP });
    }
    let cover: Vec<u32> = (0..n)
        .map(|c| (0..n).filter(|&i| space.d(i, c) < gamma).fold(0u32, |m, i| m | 1 << i))
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    fn search(cover: &[u32], full: u32, covered: u32, budget: usize, chosen: &mut Vec<usize>) -> bool {
        if covered == full {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let p = (!covered & full).trailing_zeros();
        for (c, &mask) in cover.iter().enumerate() {
            if mask >> p & 1 == 1 {
                chosen.push(c);
                if search(cover, full, covered | mask, budget - 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    for k in 1..=n {
        let mut chosen = Vec::new();
        if search(&cover, full, 0, k, &mut chosen) {
            chosen.sort_unstable();
            return Ok(Net { points: chosen, radius: gamma });
        }
    }
    unreachable!("the whole space is a net")
}

/// ν(Z, γ) for a space of at most 25 points.
pub fn exact_nu<T: Scalar>(space: &FiniteMetricSpace<T>, gamma: T) -> Result<usize, NetError> {
    exact_net(space, gamma).map(|n| n.len())
}

/// Minimum net when the space is small enough, otherwise the farthest-point net.
pub fn best_net<T: Scalar>(space: &FiniteMetricSpace<T>, gamma: T) -> Result<Net<T>, NetError> {
    if space.len() <= EXACT_NU_CAP {
        exact_net(space, gamma)
    } else {
        greedy_net(space, gamma)
    }
}

/// ν(∪ Z_i, γ) ≤ Σ ν(Z_i, γ).
pub fn union_bound(parts: &[usize]) -> usize {
    parts.iter().sum()
}

/// ν(𝒦(Z), γ) ≤ 2^{ν(Z, γ)}.
pub fn powerset_bound(nu: usize) -> BigUint {
    BigUint::from(1u32) << nu
}

/// ν(K, 2γ) ≤ ν(Z, γ) for K ⊂ Z.
pub fn subset_bound(nu_z: usize) -> usize {
    nu_z
}

/// Band layout of a latitude-band sphere net.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereNet<T> {
    pub gamma: T,
    /// Points per band, from the [1:0] pole downwards.
    pub band_sizes: Vec<usize>,
    pub points: Vec<ProjPoint<T>>,
    /// Certified covering radius, strictly below γ.
    pub covering_radius: T,
}

/// Largest distance from the centre (φ_c, 0) of a band cell to a point of the cell
/// [lo, hi] × [−Δ, Δ].
fn cell_radius(phi_c: f64, lo: f64, hi: f64, half_width: f64) -> f64 {
    let cos_d = |phi: f64| phi.cos() * phi_c.cos() + phi.sin() * phi_c.sin() * half_width.cos();
    let star = (phi_c.sin() * half_width.cos()).atan2(phi_c.cos());
    let mut worst = cos_d(lo).min(cos_d(hi));
    for crit in [star + std::f64::consts::PI, star - std::f64::consts::PI] {
        if crit > lo && crit < hi {
            worst = worst.min(cos_d(crit));
        }
    }
    worst.clamp(-1.0, 1.0).acos()
}

/// Deterministic γ-net of the whole round sphere from latitude bands.
pub fn sphere_net<T: Scalar>(gamma: T) -> Result<SphereNet<T>, NetError> {
    check_radius(gamma)?;
    let g = gamma.as_f64();
    let target = g * (1.0 - 1e-9);
    let pi = std::f64::consts::PI;
    let mut best: Option<(usize, Vec<usize>, f64)> = None;
    let max_bands = ((pi / g).ceil() as usize) * 4 + 2;
    'bands: for nb in 1..=max_bands {
        let h = pi / nb as f64;
        let mut sizes = Vec::with_capacity(nb);
        let mut radius: f64 = 0.0;
        for i in 0..nb {
            let (lo, hi) = (i as f64 * h, (i + 1) as f64 * h);
            let phi_c = (lo + hi) / 2.0;
            if cell_radius(phi_c, lo, hi, 0.0) >= target {
                continue 'bands;
            }
            let mut k = 1usize;
            while cell_radius(phi_c, lo, hi, pi / k as f64) >= target {
                k += 1;
            }
            radius = radius.max(cell_radius(phi_c, lo, hi, pi / k as f64));
            sizes.push(k);
        }
        let total: usize = sizes.iter().sum();
        if best.as_ref().is_none_or(|(t, _, _)| total < *t) {
            best = Some((total, sizes, radius));
        }
    }
    let (_, band_sizes, radius) = best.ok_or(NetError::BadRadius(g))?;
    let nb = band_sizes.len();
    let h = pi / nb as f64;
    let mut points = Vec::new();
    for (i, &k) in band_sizes.iter().enumerate() {
        let phi = (i as f64 + 0.5) * h;
        for j in 0..k {
            let lambda = 2.0 * pi * j as f64 / k as f64;
            points.push(ProjPoint::from_polar(T::lit(phi), T::lit(lambda)));
        }
    }
    Ok(SphereNet { gamma, band_sizes, points, covering_radius: T::lit(radius) })
}

/// Quasi-uniform sample of the sphere (Fibonacci spiral).
pub fn fibonacci_sphere<T: Scalar>(n: usize) -> Vec<ProjPoint<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let c = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let phi = c.clamp(-1.0, 1.0).acos();
            ProjPoint::from_polar(T::lit(phi), T::lit(golden * i as f64))
        })
        .collect()
}

/// Distance max(component distances, L⁻¹·X-distance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMaxMetric<T> {
    pub scale: T,
}

impl<T: Scalar> ScaledMaxMetric<T> {
    pub fn new(scale: T) -> Result<Self, NetError> {
        check_radius(scale)?;
        Ok(ScaledMaxMetric { scale })
    }

    pub fn combine(&self, components: &[T], x_distance: T) -> T {
        components.iter().fold(x_distance / self.scale, |m, &d| m.max(d))
    }

    /// Hausdorff distance between sampled graphs {(x, f(x))}.
    pub fn graph_distance<X, Y>(
        &self,
        f: &[(X, Y)],
        g: &[(X, Y)],
        dx: impl Fn(&X, &X) -> T,
        dy: impl Fn(&Y, &Y) -> T,
    ) -> Result<T, NetError> {
        hausdorff(f, g, |a, b| self.combine(&[dy(&a.1, &b.1)], dx(&a.0, &b.0)))
    }
}

/// One map f: X_t → W of a family, X_t ⊂ Z given by `fiber` and f by `values`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub t: usize,
    pub fiber: Vec<usize>,
    pub values: Vec<usize>,
}

/// One set F_{(a,h)} of the cover; `assignment[i]` is h(B[i]) with `None` standing for ∗.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSet {
    pub anchor: usize,
    pub assignment: Vec<Option<usize>>,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapspaceCover<T> {
    pub net_t: Vec<usize>,
    pub net_z: Vec<usize>,
    pub net_w: Vec<usize>,
    pub gamma: T,
    pub sets: Vec<CoverSet>,
    /// |A|·(1 + |C|)^{|B|}.
    pub index_count: BigUint,
}

pub const COVER_TUPLE_CAP: usize = 1_000_000;

/// d((t,f),(s,g)) = max{d_T(t,s), d_H(graph f, graph g)} with the max metric on Z × W.
pub fn member_distance<T: Scalar>(
    t_space: &FiniteMetricSpace<T>,
    z_space: &FiniteMetricSpace<T>,
    w_space: &FiniteMetricSpace<T>,
    f: &FamilyMember,
    g: &FamilyMember,
) -> T {
    let graph = |m: &FamilyMember| -> Vec<(usize, usize)> { m.fiber.iter().copied().zip(m.values.iter().copied()).collect() };
    let (gf, gg) = (graph(f), graph(g));
    let graphs = match (gf.is_empty(), gg.is_empty()) {
        (true, true) => T::zero(),
        (false, false) => hausdorff(&gf, &gg, |a, b| z_space.d(a.0, b.0).max(w_space.d(a.1, b.1))).expect("nonempty"),
        _ => T::infinity(),
    };
    t_space.d(f.t, g.t).max(graphs)
}

fn validate_family<T: Scalar>(
    t_space: &FiniteMetricSpace<T>,
    z_space: &FiniteMetricSpace<T>,
    w_space: &FiniteMetricSpace<T>,
    family: &[FamilyMember],
    lipschitz: T,
) -> Result<(), NetError> {
    let check = |index: usize, n: usize| if index < n { Ok(()) } else { Err(NetError::OutOfRange { index, n }) };
    for (k, m) in family.iter().enumerate() {
        check(m.t, t_space.len())?;
        if m.fiber.len() != m.values.len() {
            return Err(NetError::FiberMismatch { member: k });
        }
        for (&x, &y) in m.fiber.iter().zip(&m.values) {
            check(x, z_space.len())?;
            check(y, w_space.len())?;
        }
        for i in 0..m.fiber.len() {
            for j in 0..i {
                let dw = w_space.d(m.values[i], m.values[j]);
                let bound = lipschitz * z_space.d(m.fiber[i], m.fiber[j]);
                if !le_tol(dw, bound) {
                    return Err(NetError::NotLipschitz {
                        member: k,
                        x: m.fiber[j],
                        y: m.fiber[i],
                        dw: dw.as_f64(),
                        bound: bound.as_f64(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Covers a family of Λ-Lipschitz maps by sets of diameter < 4δ, indexed by an anchor in a
/// δ-net of T and an assignment from a (δ/Λ)-net of Z to a δ-net of W or ∗.
pub fn mapspace_cover<T: Scalar>(
    t_space: &FiniteMetricSpace<T>,
    z_space: &FiniteMetricSpace<T>,
    w_space: &FiniteMetricSpace<T>,
    family: &[FamilyMember],
    lipschitz: T,
    delta: T,
) -> Result<MapspaceCover<T>, NetError> {
    if !(lipschitz >= T::one()) {
        return Err(NetError::BadLipschitz(lipschitz.as_f64()));
    }
    check_radius(delta)?;
    validate_family(t_space, z_space, w_space, family, lipschitz)?;
    let net_t = best_net(t_space, delta)?.points;
    let net_z = best_net(z_space, delta / lipschitz)?.points;
    let net_w = best_net(w_space, delta)?.points;
    let gamma = (1..=20)
        .rev()
        .map(|j| delta * (T::one() - T::lit(0.5f64.powi(j))))
        .find(|&g| t_space.is_net(&net_t, g) && z_space.is_net(&net_z, g / lipschitz) && w_space.is_net(&net_w, g))
        .ok_or(NetError::NoAdmissibleGamma)?;
    let gz = gamma / lipschitz;

    let mut sets: BTreeMap<(usize, Vec<Option<usize>>), Vec<usize>> = BTreeMap::new();
    let mut produced = 0usize;
    for (k, m) in family.iter().enumerate() {
        let anchors: Vec<usize> = (0..net_t.len()).filter(|&a| t_space.d(m.t, net_t[a]) <= gamma).collect();
        let mut options: Vec<Vec<Option<usize>>> = Vec::with_capacity(net_z.len());
        for &b in &net_z {
            if z_space.dist_to_set(b, &m.fiber) > gz {
                options.push(vec![None]);
                continue;
            }
            let choices: Vec<Option<usize>> = (0..net_w.len())
                .filter(|&c| {
                    m.fiber.iter().zip(&m.values).any(|(&bt, &fb)| z_space.d(b, bt) <= gz && w_space.d(fb, net_w[c]) <= gamma)
                })
                .map(Some)
                .collect();
            options.push(choices);
        }
        let count = options.iter().fold(anchors.len(), |acc, o| acc.saturating_mul(o.len()));
        produced = produced.saturating_add(count);
        if produced > COVER_TUPLE_CAP {
            return Err(NetError::ResourceCap(COVER_TUPLE_CAP));
        }
        for &a in &anchors {
            let mut idx = vec![0usize; options.len()];
            'tuples: loop {
                let h: Vec<Option<usize>> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
                sets.entry((a, h)).or_default().push(k);
                for pos in (0..idx.len()).rev() {
                    idx[pos] += 1;
                    if idx[pos] < options[pos].len() {
                        continue 'tuples;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
    }
    let index_count = BigUint::from(net_t.len()) * BigUint::from(net_w.len() + 1).pow(net_z.len() as u32);
    let sets = sets.into_iter().map(|((anchor, assignment), members)| CoverSet { anchor, assignment, members }).collect();
    Ok(MapspaceCover { net_t, net_z, net_w, gamma, sets, index_count })
}

/// Largest sampled ratio cod/dom over pairs with 0 < dom ≤ ε; a lower bound for Lip_ε.
pub fn sampled_local_lipschitz<P, Q, T: Scalar>(
    pairs: &[(P, P, Q, Q)],
    eps: T,
    dom: impl Fn(&P, &P) -> T,
    cod: impl Fn(&Q, &Q) -> T,
) -> T {
    pairs.iter().fold(T::zero(), |m, (q1, q2, x1, x2)| {
        let d = dom(q1, q2);
        if d > T::zero() && d <= eps {
            m.max(cod(x1, x2) / d)
        } else {
            m
        }
    })
}

/// Sphere distance, for use as a metric closure.
pub fn sphere_metric<T: Scalar>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> T {
    sphere_distance(p, q)
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SpaceJson {
    pub n: usize,
    pub dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl Serialize for FiniteMetricSpace<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpaceJson { n: self.len(), dist: self.dist.clone(), labels: None }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = SpaceJson::deserialize(d)?;
        if json.dist.len() != json.n {
            return Err(serde::de::Error::custom(format!("n = {} but {} rows", json.n, json.dist.len())));
        }
        let space = FiniteMetricSpace::new(json.dist).map_err(serde::de::Error::custom)?;
        match json.labels {
            Some(l) if l.len() == space.len() => Ok(space.with_labels(l)),
            Some(_) => Err(serde::de::Error::custom("label count differs from n")),
            None => Ok(space),
        }
    }
}
