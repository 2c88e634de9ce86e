//! Neck coordinates, the cylinder model, and short paths through annuli and necks.

use num_complex::Complex;

use super::decomposition::{region_contains, region_distance, Region};
use super::fiber::{phi, propagate, FiberPoint};
use super::{CurveError, ModuliPoint};
use crate::projective::{round_length_density, ProjPoint};
use crate::scalar::Scalar;

/// z_u = δe^{iθ₀}e^{−(s+it)} and z'_v = δe^{iθ₀}e^{s+it}, so z_u z'_v = γ.
pub fn neck_coordinates<T: Scalar>(gamma: Complex<T>, s: T, t: T) -> (Complex<T>, Complex<T>) {
    let delta = gamma.norm().sqrt();
    let phase = Complex::from_polar(T::one(), gamma.arg() / T::lit(2.0));
    let zu = phase * Complex::from_polar(delta * (-s).exp(), -t);
    let zv = phase * Complex::from_polar(delta * s.exp(), t);
    (zu, zv)
}

/// Area density e^{−2R}(e^{2s} + e^{−2s}) of the flat metric pulled back to the cylinder.
pub fn cylinder_area_density<T: Scalar>(r: T, s: T) -> T {
    let two = T::lit(2.0);
    (-two * r).exp() * ((two * s).exp() + (-two * s).exp())
}

fn check_neck_edge<T: Scalar>(p: &ModuliPoint<T>, e: usize) -> Result<(usize, usize), CurveError> {
    let t = p.tree();
    if e >= t.n_edges() || !t.is_full(e) {
        return Err(CurveError::NotFullEdge(e));
    }
    Ok((t.negative(e).expect("full"), t.positive(e).expect("full")))
}

/// Fiber point with neck coordinates (z_u, z'_v) on the edge e = (u, v).
fn from_flat<T: Scalar>(p: &ModuliPoint<T>, e: usize, zu: Complex<T>, zv: Complex<T>) -> Result<FiberPoint<T>, CurveError> {
    let (u, v) = check_neck_edge(p, e)?;
    let k = p.coord(e).expect("full");
    let zero = Complex::new(T::zero(), T::zero());
    if zu == zero && zv == zero {
        return propagate(p, u, ProjPoint::affine(k.z), Some(e));
    }
    if zu.norm() >= zv.norm() {
        propagate(p, u, ProjPoint::affine(k.z + k.rho * zu), None)
    } else {
        propagate(p, v, ProjPoint::new(Complex::new(T::one(), T::zero()), zv)?, None)
    }
}

/// Point of the neck of `e` at cylinder coordinates (s, t), |s| ≤ R with δ = e^{−R}, δ² = |γ_e|.
pub fn neck_param<T: Scalar>(p: &ModuliPoint<T>, e: usize, s: T, t: T) -> Result<FiberPoint<T>, CurveError> {
    check_neck_edge(p, e)?;
    let g = p.gamma(e).expect("full");
    let m = g.norm();
    if !(m > T::zero() && m < T::one()) {
        return Err(CurveError::GammaOutOfRange(m.as_f64()));
    }
    let r = -m.sqrt().ln();
    if s.abs() > r * (T::one() + T::slack()) {
        return Err(CurveError::NeckParameter { s: s.as_f64(), r: r.as_f64() });
    }
    let (zu, zv) = neck_coordinates(g, s, t);
    from_flat(p, e, zu, zv)
}

/// Flat neck coordinates (z_u, z'_v) = ((x_u/y_u − z)/ρ, y_v/x_v) of a point of R_e.
pub fn neck_flat_coords<T: Scalar>(p: &ModuliPoint<T>, e: usize, q: &FiberPoint<T>) -> Result<(Complex<T>, Complex<T>), CurveError> {
    let (u, v) = check_neck_edge(p, e)?;
    if !region_contains(p, Region::Neck(e), q)? {
        return Err(CurveError::OutsideRegion(Region::Neck(e).to_string()));
    }
    let a = phi(p, u, e, &q.coords[u])?;
    let zu = a.to_affine().ok_or_else(|| CurveError::OutsideRegion(Region::Neck(e).to_string()))?;
    let zv = q.coords[v].to_affine_at_infinity().ok_or_else(|| CurveError::OutsideRegion(Region::Neck(e).to_string()))?;
    Ok((zu, zv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve<T> {
    Constant(Complex<T>),
    Segment { from: Complex<T>, to: Complex<T> },
    /// radius · e^{i(start + s·sweep)} for s ∈ [0, 1].
    Arc { radius: T, start: T, sweep: T },
}

impl<T: Scalar> Curve<T> {
    /// Value and derivative at s ∈ [0, 1].
    pub fn eval(&self, s: T) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        match *self {
            Curve::Constant(a) => (a, zero),
            Curve::Segment { from, to } => (from + (to - from) * s, to - from),
            Curve::Arc { radius, start, sweep } => {
                let z = Complex::from_polar(radius, start + sweep * s);
                (z, z * Complex::new(T::zero(), sweep))
            }
        }
    }

    fn is_trivial(&self) -> bool {
        match *self {
            Curve::Constant(_) => true,
            Curve::Segment { from, to } => from == to,
            Curve::Arc { sweep, .. } => sweep == T::zero(),
        }
    }
}

/// One coordinate along a path piece: driven by a curve, or δ² divided by the other coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Track<T> {
    Drive(Curve<T>),
    Reciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPiece<T> {
    pub z: Track<T>,
    pub w: Track<T>,
}

impl<T: Scalar> PathPiece<T> {
    /// (z, w, dz/ds, dw/ds) at s ∈ [0, 1].
    pub fn eval(&self, delta_sq: T, s: T) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
        let recip = |(a, da): (Complex<T>, Complex<T>)| {
            let b = Complex::new(delta_sq, T::zero()) / a;
            (b, -b * da / a)
        };
        match (self.z, self.w) {
            (Track::Drive(cz), Track::Drive(cw)) => {
                let ((z, dz), (w, dw)) = (cz.eval(s), cw.eval(s));
                (z, w, dz, dw)
            }
            (Track::Drive(cz), Track::Reciprocal) => {
                let (z, dz) = cz.eval(s);
                let (w, dw) = recip((z, dz));
                (z, w, dz, dw)
            }
            (Track::Reciprocal, Track::Drive(cw)) => {
                let (w, dw) = cw.eval(s);
                let (z, dz) = recip((w, dw));
                (z, w, dz, dw)
            }
            (Track::Reciprocal, Track::Reciprocal) => unreachable!("at least one coordinate drives"),
        }
    }

    fn swapped(self) -> Self {
        PathPiece { z: self.w, w: self.z }
    }
}

/// Piecewise smooth path in {(z, w) : zw = δ², |z|, |w| ≤ 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusPath<T> {
    pub delta: T,
    pub pieces: Vec<PathPiece<T>>,
}

const SIMPSON_INTERVALS: usize = 256;

impl<T: Scalar> AnnulusPath<T> {
    pub fn start(&self) -> (Complex<T>, Complex<T>) {
        let (z, w, _, _) = self.pieces[0].eval(self.delta * self.delta, T::zero());
        (z, w)
    }

    pub fn end(&self) -> (Complex<T>, Complex<T>) {
        let (z, w, _, _) = self.pieces.last().expect("non-empty").eval(self.delta * self.delta, T::one());
        (z, w)
    }

    /// `per_piece + 1` samples of (z, w) on each piece.
    pub fn sample(&self, per_piece: usize) -> Vec<(Complex<T>, Complex<T>)> {
        let d2 = self.delta * self.delta;
        let mut out = Vec::new();
        for piece in &self.pieces {
            for i in 0..=per_piece {
                let s = T::from_usize(i).expect("index") / T::from_usize(per_piece.max(1)).expect("count");
                let (z, w, _, _) = piece.eval(d2, s);
                out.push((z, w));
            }
        }
        out
    }

    /// Composite Simpson integral over the path of `f(z, w, dz, dw)`.
    pub fn integrate(&self, f: impl Fn(Complex<T>, Complex<T>, Complex<T>, Complex<T>) -> T) -> T {
        let d2 = self.delta * self.delta;
        let n = SIMPSON_INTERVALS;
        let h = T::one() / T::from_usize(n).expect("count");
        let mut total = T::zero();
        for piece in &self.pieces {
            let mut acc = T::zero();
            for i in 0..=n {
                let s = h * T::from_usize(i).expect("index");
                let (z, w, dz, dw) = piece.eval(d2, s);
                let weight = if i == 0 || i == n {
                    T::one()
                } else if i % 2 == 1 {
                    T::lit(4.0)
                } else {
                    T::lit(2.0)
                };
                acc += weight * f(z, w, dz, dw);
            }
            total += acc * h / T::lit(3.0);
        }
        total
    }

    /// Flat lengths (ℓ(γ_z), ℓ(γ_w)).
    pub fn lengths(&self) -> (T, T) {
        (self.integrate(|_, _, dz, _| dz.norm()), self.integrate(|_, _, _, dw| dw.norm()))
    }

    /// Largest |z w − δ²| over `per_piece` samples per piece.
    pub fn constraint_residual(&self, per_piece: usize) -> T {
        let d2 = Complex::new(self.delta * self.delta, T::zero());
        self.sample(per_piece).into_iter().map(|(z, w)| (z * w - d2).norm()).fold(T::zero(), T::max)
    }

    /// Largest modulus of either coordinate over `per_piece` samples per piece.
    pub fn max_modulus(&self, per_piece: usize) -> T {
        self.sample(per_piece).into_iter().map(|(z, w)| z.norm().max(w.norm())).fold(T::zero(), T::max)
    }
}

fn wrap_angle<T: Scalar>(a: T) -> T {
    let tau = T::TAU();
    let mut x = a % tau;
    if x > T::PI() {
        x -= tau;
    } else if x <= -T::PI() {
        x += tau;
    }
    x
}

/// Straight segment from `a` to `b`, with the chord inside the open disc of radius `r` replaced
/// by the shorter arc of the circle |ζ| = r.
fn route<T: Scalar>(a: Complex<T>, b: Complex<T>, r: T) -> Vec<Curve<T>> {
    let d = b - a;
    let dd = d.norm_sqr();
    if dd == T::zero() {
        return vec![Curve::Constant(a)];
    }
    let half_b = (a.conj() * d).re;
    let disc = half_b * half_b - dd * (a.norm_sqr() - r * r);
    if !(disc > T::zero()) {
        return vec![Curve::Segment { from: a, to: b }];
    }
    let root = disc.sqrt();
    let s1 = ((-half_b - root) / dd).max(T::zero());
    let s2 = ((-half_b + root) / dd).min(T::one());
    if s1 >= s2 || s1 >= T::one() || s2 <= T::zero() {
        return vec![Curve::Segment { from: a, to: b }];
    }
    let (p1, p2) = (a + d * s1, a + d * s2);
    let (t1, t2) = (p1.arg(), p2.arg());
    let mut out = Vec::new();
    if s1 > T::zero() {
        out.push(Curve::Segment { from: a, to: p1 });
    }
    out.push(Curve::Arc { radius: r, start: t1, sweep: wrap_angle(t2 - t1) });
    if s2 < T::one() {
        out.push(Curve::Segment { from: p2, to: b });
    }
    out
}

fn driven_z<T: Scalar>(curves: Vec<Curve<T>>) -> impl Iterator<Item = PathPiece<T>> {
    curves.into_iter().map(|c| PathPiece { z: Track::Drive(c), w: Track::Reciprocal })
}

fn pair<T: Scalar>(z: Curve<T>, w: Curve<T>) -> PathPiece<T> {
    PathPiece { z: Track::Drive(z), w: Track::Drive(w) }
}

/// Path with δ = 0: one coordinate vanishes, the other moves on a segment.
fn degenerate<T: Scalar>(z: Complex<T>, w: Complex<T>, z2: Complex<T>, w2: Complex<T>) -> Vec<PathPiece<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let seg = |a, b| Curve::Segment { from: a, to: b };
    let mut out = Vec::new();
    let start_z_axis = z.norm() <= w.norm();
    let end_z_axis = z2.norm() <= w2.norm();
    // Snap the smaller coordinate to zero at both ends.
    if start_z_axis {
        out.push(pair(seg(z, zero), Curve::Constant(w)));
    } else {
        out.push(pair(Curve::Constant(z), seg(w, zero)));
    }
    let (a, b) = if start_z_axis { (zero, w) } else { (z, zero) };
    let (c, d) = if end_z_axis { (zero, w2) } else { (z2, zero) };
    match (start_z_axis, end_z_axis) {
        (true, true) => out.push(pair(Curve::Constant(zero), seg(b, d))),
        (false, false) => out.push(pair(seg(a, c), Curve::Constant(zero))),
        (true, false) => {
            out.push(pair(Curve::Constant(zero), seg(b, zero)));
            out.push(pair(seg(zero, c), Curve::Constant(zero)));
        }
        (false, true) => {
            out.push(pair(seg(a, zero), Curve::Constant(zero)));
            out.push(pair(Curve::Constant(zero), seg(zero, d)));
        }
    }
    if end_z_axis {
        out.push(pair(seg(zero, z2), Curve::Constant(w2)));
    } else {
        out.push(pair(Curve::Constant(z2), seg(zero, w2)));
    }
    out
}

/// Path from (z, w) to (z', w') inside {zw = δ², |z|, |w| ≤ 1}, assuming |z| ≥ |w|.
fn positive_case<T: Scalar>(delta: T, z: Complex<T>, z2: Complex<T>, w2: Complex<T>) -> Vec<PathPiece<T>> {
    if z2.norm() >= w2.norm() {
        return driven_z(route(z, z2, delta)).collect();
    }
    let two = T::lit(2.0);
    if z2.norm() <= z.norm() / two {
        let mid = Complex::new(delta, T::zero());
        let mut out: Vec<PathPiece<T>> = driven_z(route(z, mid, delta)).collect();
        out.extend(route(mid, w2, delta).into_iter().map(|c| PathPiece { z: Track::Reciprocal, w: Track::Drive(c) }));
        out
    } else {
        let inner = (delta / two).max(delta * delta);
        driven_z(route(z, z2, inner)).collect()
    }
}

/// Short path between two points of the hyperbola zw = δ² in the bidisc.
///
/// The flat lengths satisfy ℓ(γ_z) + ℓ(γ_w) ≤ 8π·max{|z − z'|, |w − w'|}.
pub fn annulus_path<T: Scalar>(
    delta: T,
    z: Complex<T>,
    w: Complex<T>,
    z2: Complex<T>,
    w2: Complex<T>,
) -> Result<AnnulusPath<T>, CurveError> {
    let tol = T::loose();
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(CurveError::Constraint(delta.as_f64()));
    }
    let d2 = Complex::new(delta * delta, T::zero());
    for (a, b) in [(z, w), (z2, w2)] {
        let res = (a * b - d2).norm();
        if res > tol || a.norm() > T::one() + tol || b.norm() > T::one() + tol {
            return Err(CurveError::Constraint(res.as_f64().max(a.norm().max(b.norm()).as_f64() - 1.0)));
        }
    }
    let mut pieces = if delta == T::zero() {
        degenerate(z, w, z2, w2)
    } else if z.norm() >= w.norm() {
        positive_case(delta, z, z2, w2)
    } else {
        positive_case(delta, w, w2, z2).into_iter().map(PathPiece::swapped).collect()
    };
    pieces.retain(|p| !matches!((p.z, p.w), (Track::Drive(a), Track::Drive(b)) if a.is_trivial() && b.is_trivial())
        && !matches!((p.z, p.w), (Track::Drive(a), Track::Reciprocal) | (Track::Reciprocal, Track::Drive(a)) if a.is_trivial()));
    if pieces.is_empty() {
        pieces.push(PathPiece { z: Track::Drive(Curve::Constant(z)), w: Track::Drive(Curve::Constant(w)) });
    }
    Ok(AnnulusPath { delta, pieces })
}

/// A path inside the neck R_e, expressed in rotated flat coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NeckPath<T> {
    pub edge: usize,
    /// Path of (e^{−iθ₀}z_u, e^{−iθ₀}z'_v) on the real hyperbola zw = |γ_e|.
    pub path: AnnulusPath<T>,
    /// e^{iθ₀} with 2θ₀ = arg γ_e.
    pub phase: Complex<T>,
    /// Length in P_e = P¹ × P¹ with the round product metric.
    pub round_length: T,
    /// ℓ(γ_z) + ℓ(γ_w) in the flat metric.
    pub flat_length: T,
    pub dist_e: T,
    /// 16π·dist_e.
    pub bound: T,
}

impl<T: Scalar> NeckPath<T> {
    pub fn fiber_points(&self, p: &ModuliPoint<T>, per_piece: usize) -> Result<Vec<FiberPoint<T>>, CurveError> {
        self.path
            .sample(per_piece)
            .into_iter()
            .map(|(a, b)| from_flat(p, self.edge, a * self.phase, b * self.phase))
            .collect()
    }
}

/// Path between two points of the neck R_e with P_e-length at most 16π·dist_e.
pub fn neck_path<T: Scalar>(p: &ModuliPoint<T>, e: usize, q1: &FiberPoint<T>, q2: &FiberPoint<T>) -> Result<NeckPath<T>, CurveError> {
    check_neck_edge(p, e)?;
    let (z1, w1) = neck_flat_coords(p, e, q1)?;
    let (z2, w2) = neck_flat_coords(p, e, q2)?;
    let g = p.gamma(e).expect("full");
    let delta = g.norm().sqrt();
    let phase = Complex::from_polar(T::one(), g.arg() / T::lit(2.0));
    let back = phase.conj();
    let clamp = |a: Complex<T>| if a.norm() > T::one() { a / a.norm() } else { a };
    let path = annulus_path(delta, clamp(z1 * back), clamp(w1 * back), clamp(z2 * back), clamp(w2 * back))?;
    let round_length = path.integrate(|z, w, dz, dw| {
        let a = round_length_density(z) * dz.norm();
        let b = round_length_density(w) * dw.norm();
        (a * a + b * b).sqrt()
    });
    let (lz, lw) = path.lengths();
    let dist_e = region_distance(p, Region::Neck(e), q1, q2)?;
    Ok(NeckPath { edge: e, path, phase, round_length, flat_length: lz + lw, dist_e, bound: T::lit(16.0) * T::PI() * dist_e })
}
