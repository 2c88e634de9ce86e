//! Points of the projective line, the round metric of area 4π, and Möbius maps.

use num_complex::Complex;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("homogeneous coordinates must not both vanish")]
pub struct ZeroVector;

/// Homogeneous point [x:y], stored with max(|x|, |y|) = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint<T> {
    x: Complex<T>,
    y: Complex<T>,
}

impl<T: Scalar> ProjPoint<T> {
    pub fn new(x: Complex<T>, y: Complex<T>) -> Result<Self, ZeroVector> {
        let scale = x.norm().max(y.norm());
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(ZeroVector);
        }
        Ok(ProjPoint { x: x / scale, y: y / scale })
    }

    /// [z:1].
    pub fn affine(z: Complex<T>) -> Self {
        Self::new(z, Complex::new(T::one(), T::zero())).expect("y = 1")
    }

    /// [1:0].
    pub fn infinity() -> Self {
        ProjPoint { x: Complex::new(T::one(), T::zero()), y: Complex::new(T::zero(), T::zero()) }
    }

    pub fn x(&self) -> Complex<T> {
        self.x
    }

    pub fn y(&self) -> Complex<T> {
        self.y
    }

    /// x/y, or `None` at [1:0].
    pub fn to_affine(&self) -> Option<Complex<T>> {
        (self.y.norm_sqr() > T::zero()).then(|| self.x / self.y)
    }

    /// y/x, the coordinate of the chart centred at [1:0]; `None` at [0:1].
    pub fn to_affine_at_infinity(&self) -> Option<Complex<T>> {
        (self.x.norm_sqr() > T::zero()).then(|| self.y / self.x)
    }

    pub fn is_infinity(&self) -> bool {
        self.y.norm_sqr() == T::zero()
    }

    /// Point of the unit sphere in ℝ³ under inverse stereographic projection, [1:0] at the north pole.
    pub fn to_sphere(&self) -> [T; 3] {
        let two = T::lit(2.0);
        let n = self.x.norm_sqr() + self.y.norm_sqr();
        let c = self.x * self.y.conj();
        [two * c.re / n, two * c.im / n, (self.x.norm_sqr() - self.y.norm_sqr()) / n]
    }

    pub fn from_sphere(p: [T; 3]) -> Self {
        let [a, b, c] = p;
        if c >= T::zero() {
            Self::new(Complex::new(T::one() + c, T::zero()), Complex::new(a, -b)).unwrap_or_else(|_| Self::infinity())
        } else {
            Self::new(Complex::new(a, b), Complex::new(T::one() - c, T::zero())).unwrap_or_else(|_| Self::infinity())
        }
    }

    /// Point at polar angle φ from [1:0] and longitude λ.
    pub fn from_polar(phi: T, lambda: T) -> Self {
        let half = phi / T::lit(2.0);
        let x = Complex::from_polar(half.cos(), lambda);
        Self::new(x, Complex::new(half.sin(), T::zero())).expect("unit vector")
    }

    pub fn distance(&self, other: &Self) -> T {
        sphere_distance(self, other)
    }
}

/// Geodesic distance on the round sphere of area 4π; the diameter is π.
pub fn sphere_distance<T: Scalar>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> T {
    let det = (p.x * q.y - p.y * q.x).norm();
    let dot = (p.x * q.x.conj() + p.y * q.y.conj()).norm();
    T::lit(2.0) * det.atan2(dot)
}

/// Round-to-flat ratio 4/(1+|z|²)² of the area forms on the affine chart.
pub fn round_flat_area_ratio<T: Scalar>(z: Complex<T>) -> T {
    let d = T::one() + z.norm_sqr();
    T::lit(4.0) / (d * d)
}

/// Round length density 2/(1+|z|²) on the affine chart.
pub fn round_length_density<T: Scalar>(z: Complex<T>) -> T {
    T::lit(2.0) / (T::one() + z.norm_sqr())
}

/// Möbius transformation acting on homogeneous coordinates by a 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Scalar> Mobius<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Option<Self> {
        let m = Mobius { a, b, c, d };
        (m.det().norm() > T::zero()).then_some(m)
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: &ProjPoint<T>) -> ProjPoint<T> {
        ProjPoint::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y).expect("invertible matrix")
    }

    pub fn inverse(&self) -> Self {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Mobius {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    /// The map sending p1, p2, p3 to 0, 1, ∞.
    pub fn normalizing(p1: &ProjPoint<T>, p2: &ProjPoint<T>, p3: &ProjPoint<T>) -> Option<Self> {
        // x ↦ [det(x,p1)·det(p2,p3) : det(x,p3)·det(p2,p1)]
        let k1 = det(p2, p3);
        let k2 = det(p2, p1);
        Mobius::new(k1 * p1.y, -k1 * p1.x, k2 * p3.y, -k2 * p3.x)
    }

    /// The map sending each p_i to q_i.
    pub fn three_point(p: [&ProjPoint<T>; 3], q: [&ProjPoint<T>; 3]) -> Option<Self> {
        let np = Self::normalizing(p[0], p[1], p[2])?;
        let nq = Self::normalizing(q[0], q[1], q[2])?;
        Some(nq.inverse().compose(&np))
    }
}

fn det<T: Scalar>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> Complex<T> {
    p.x * q.y - p.y * q.x
}

/// The three reference points [1:1], [e^{2πi/3}:1], [e^{−2πi/3}:1] of the cross-ratio identification.
pub fn cube_roots_of_unity<T: Scalar>() -> [ProjPoint<T>; 3] {
    let angle = T::lit(2.0) * T::PI() / T::lit(3.0);
    [
        ProjPoint::affine(Complex::new(T::one(), T::zero())),
        ProjPoint::affine(Complex::from_polar(T::one(), angle)),
        ProjPoint::affine(Complex::from_polar(T::one(), -angle)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type P = ProjPoint<f64>;

    fn random_point(rng: &mut ChaCha8Rng) -> P {
        let z = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if rng.gen_bool(0.1) {
            P::new(Complex::new(1.0, 0.0), z * 1e-3).unwrap()
        } else {
            P::affine(z)
        }
    }

    #[test]
    fn special_distances() {
        let inf = P::infinity();
        let zero = P::affine(cplx(0.0, 0.0));
        let one = P::affine(cplx(1.0, 0.0));
        assert!((sphere_distance(&inf, &zero) - std::f64::consts::PI).abs() < 1e-15);
        assert!((sphere_distance(&one, &inf) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(P::new(cplx(0.0, 0.0), cplx(0.0, 0.0)), Err(ZeroVector));
    }

    #[test]
    fn scale_invariance() {
        let p = P::new(cplx(2.0, 1.0), cplx(-0.5, 3.0)).unwrap();
        let k = cplx::<f64>(0.0, 7.0);
        let q = P::new(cplx::<f64>(4.0, 2.0) * k, cplx::<f64>(-1.0, 6.0) * k).unwrap();
        assert!(sphere_distance(&p, &q) < 1e-15);
        assert!((p.x().norm().max(p.y().norm()) - 1.0).abs() < 1e-15);
    }

    /// Length of the great-circle arc, pulled back to the affine chart and integrated with the
    /// density 2|dz|/(1+|z|²).
    fn integrated_geodesic(p: &P, q: &P) -> f64 {
        let a = p.to_sphere();
        let b = q.to_sphere();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let omega = dot.clamp(-1.0, 1.0).acos();
        let slerp = |t: f64| -> [f64; 3] {
            let s = omega.sin();
            let (u, v) = (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s);
            [u * a[0] + v * b[0], u * a[1] + v * b[1], u * a[2] + v * b[2]]
        };
        // integrate in the chart where the arc stays bounded
        let south = slerp(0.5)[2] <= 0.0;
        let chart = |x: [f64; 3]| {
            let pt = P::from_sphere(x);
            if south { pt.to_affine().unwrap() } else { pt.to_affine_at_infinity().unwrap() }
        };
        let n = 20_000;
        let mut len = 0.0;
        let mut prev = chart(slerp(0.0));
        for i in 1..=n {
            let cur = chart(slerp(i as f64 / n as f64));
            let mid = (cur + prev) / 2.0;
            len += round_length_density(mid) * (cur - prev).norm();
            prev = cur;
        }
        len
    }

    #[test]
    fn distance_matches_integrated_geodesic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let q = random_point(&mut rng);
            let d = sphere_distance(&p, &q);
            if d > 3.1 || d < 1e-6 {
                continue;
            }
            assert!((integrated_geodesic(&p, &q) - d).abs() < 1e-6, "d = {d}");
        }
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let (a, b, c) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            assert!(sphere_distance(&a, &c) <= sphere_distance(&a, &b) + sphere_distance(&b, &c) + 1e-12);
            assert!((sphere_distance(&a, &b) - sphere_distance(&b, &a)).abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            assert!(sphere_distance(&p, &P::from_sphere(p.to_sphere())) < 1e-12);
        }
        let pole = P::from_polar(0.0, 1.0);
        assert!(pole.is_infinity());
        assert!((sphere_distance(&P::from_polar(1.2, 0.3), &P::infinity()) - 1.2).abs() < 1e-14);
    }

    #[test]
    fn three_point_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let targets = cube_roots_of_unity::<f64>();
        for _ in 0..100 {
            let p = [random_point(&mut rng), random_point(&mut rng), random_point(&mut rng)];
            let m = Mobius::three_point([&p[0], &p[1], &p[2]], [&targets[0], &targets[1], &targets[2]]).unwrap();
            for i in 0..3 {
                assert!(sphere_distance(&m.apply(&p[i]), &targets[i]) < 1e-9);
            }
            let back = m.inverse().apply(&targets[0]);
            assert!(sphere_distance(&back, &p[0]) < 1e-9);
        }
    }

    #[test]
    fn area_ratio_range() {
        assert_eq!(round_flat_area_ratio(cplx::<f64>(0.0, 0.0)), 4.0);
        assert!((round_flat_area_ratio(cplx::<f64>(0.6, 0.8)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision_instance() {
        let p = ProjPoint::<f32>::infinity();
        let q = ProjPoint::<f32>::affine(Complex::new(0.0, 0.0));
        assert!((sphere_distance(&p, &q) - std::f32::consts::PI).abs() < 1e-6);
    }
}
