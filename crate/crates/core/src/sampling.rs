//! Seeded random instances for tests, sweeps and the command line.

use num_complex::Complex;
use rand::Rng;

use crate::curve_families::{
    fiber_from_vertex, split_fiber, CompactnessParams, CurveError, EdgeCoord, FiberPoint, ModuliPoint,
};
use crate::bubbles::{renormalize, BubbleConfiguration, BubbleError};
use crate::projective::ProjPoint;
use crate::scalar::Scalar;
use crate::trees::{enumerate_stable_rooted, RootedTree, TreeError};

/// Uniform point of the closed disc of radius `r`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex<f64> {
    let rad = r * rng.gen::<f64>().sqrt();
    Complex::from_polar(rad, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn lift<T: Scalar>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// Random point of M_T(θ, τ, α); each γ_e vanishes with probability `zero_gamma`.
pub fn random_moduli_point<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    t: &RootedTree,
    c: &CompactnessParams<T>,
    zero_gamma: f64,
) -> Result<ModuliPoint<T>, CurveError> {
    c.validate()?;
    let theta = c.theta.as_f64();
    let tau = c.tau.as_f64();
    let mut coords = vec![None; t.n_edges()];
    for v in 0..t.n_vertices() {
        let alpha = c.alpha[v].as_f64();
        let kids = t.children(v);
        let mut attempt = 0;
        let (zs, d) = loop {
            attempt += 1;
            if attempt > 10_000 {
                return Err(CurveError::BadParams(format!("could not separate {} points at vertex {v}", kids.len())));
            }
            let zs: Vec<Complex<f64>> = kids.iter().map(|_| disc_point(rng, theta)).collect();
            let mut d = f64::INFINITY;
            for i in 0..zs.len() {
                for j in i + 1..zs.len() {
                    d = d.min((zs[i] - zs[j]).norm());
                }
            }
            if 2.0 * alpha < tau * d * 0.999 {
                break (zs, d);
            }
        };
        let hi = (2.0 * theta).min(tau * d / 2.0 * 0.999);
        for (&e, z) in kids.iter().zip(zs) {
            let r = alpha + (hi - alpha) * rng.gen::<f64>();
            let rho = Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
            coords[e] = Some(EdgeCoord { z: lift(z), rho: lift(rho) });
        }
    }
    let mut gamma = vec![Complex::new(T::zero(), T::zero()); t.n_edges()];
    for e in t.full_edges() {
        if rng.gen::<f64>() >= zero_gamma {
            let r = tau * (1.0 - rng.gen::<f64>());
            gamma[e] = lift(Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)));
        }
    }
    Ok(ModuliPoint::from_fns(t.clone(), |e| gamma[e], |_, e| coords[e].expect("child edge")))
}

/// Random smooth point of the fiber over `p`, on a uniformly chosen component.
pub fn random_fiber_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R, p: &ModuliPoint<T>) -> Result<FiberPoint<T>, CurveError> {
    let s = split_fiber(p)?;
    let comp = &s.components[rng.gen_range(0..s.components.len())];
    let z = disc_point(rng, 1.5);
    fiber_from_vertex(p, comp.top(), ProjPoint::affine(lift(z)))
}

/// Uniformly chosen stable rooted tree with `n` leaves.
pub fn random_stable_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<RootedTree, TreeError> {
    let all = enumerate_stable_rooted(n)?;
    let i = rng.gen_range(0..all.len());
    Ok(all[i].clone())
}

/// Random standard bubble configuration of type ε with `n` points.
///
/// Points are grown around earlier points at log-uniform distances in [1e-9 ε, ε] and then
/// renormalized; each radius is 0 with probability 0.3 and otherwise a uniform fraction of the
/// largest value the separation condition allows.
pub fn random_standard_config<R: Rng + ?Sized>(rng: &mut R, n: usize, eps: f64) -> Result<BubbleConfiguration<f64>, BubbleError> {
    if n < 2 {
        return Err(BubbleError::TooFewPoints(n));
    }
    let mut pts = vec![Complex::new(0.0, 0.0)];
    while pts.len() < n {
        let base = pts[rng.gen_range(0..pts.len())];
        let r = eps * 10f64.powf(-9.0 * rng.gen::<f64>());
        let z = base + Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        if pts.iter().all(|w| (z - w).norm() >= 1e-9 * eps) {
            pts.push(z);
        }
    }
    let unit = renormalize(&BubbleConfiguration::with_zero_radii(pts)?, eps)?.config;
    let pts = unit.points().to_vec();
    let radius = (0..n)
        .map(|i| {
            let d = (0..n).filter(|&j| j != i).map(|j| (pts[i] - pts[j]).norm()).fold(f64::INFINITY, f64::min);
            if rng.gen::<f64>() < 0.3 {
                0.0
            } else {
                rng.gen::<f64>() * 0.999 * eps * eps / 8.0 * d
            }
        })
        .collect();
    BubbleConfiguration::new(pts, radius)
}
