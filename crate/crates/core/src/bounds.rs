//! Explicit constants and counting formulas, evaluated in log space.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::trees::{binomial, RootedTree};

/// Largest exact mirror kept by [`LogNumber`], in decimal digits.
pub const EXACT_DIGIT_CAP: f64 = 1e6;
/// ln x above which e^x is no longer a finite double.
const LN_MAX: f64 = 709.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("{name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("invalid geometry constants: {0}")]
    BadConstants(String),
    #[error("eps = {0} violates 0 < 8 eps <= 1")]
    BadEps(f64),
    #[error("delta = {0} must lie in (0, 1]")]
    BadDelta(f64),
    #[error("gamma = {0} must lie in (0, pi)")]
    BadGamma(f64),
    #[error("mu = {0} must be at least 3")]
    MuTooSmall(usize),
    #[error("c = {0} must be at least 9")]
    BadAbsoluteConstant(f64),
    #[error("{0} overflows even in doubly logarithmic form")]
    Overflow(&'static str),
}

fn positive(name: &'static str, value: f64) -> Result<f64, BoundsError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(BoundsError::NonPositive { name, value })
    }
}

fn check_delta(delta: f64) -> Result<(), BoundsError> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(BoundsError::BadDelta(delta))
    }
}

/// Geometric constants of the target manifold, supplied as configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConstants {
    pub lambda0: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub q: f64,
    pub l: f64,
    pub c_iso: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// σ ≥ 0; zero switches off the target-net factor.
    pub sigma: f64,
    /// k with dim X = 2k.
    pub k: u32,
    pub c_abs: f64,
}

impl Default for GeometryConstants {
    fn default() -> Self {
        GeometryConstants { lambda0: 1.0, c: 1.0, q: PI, l: 1.0, c_iso: 1.0, m: 1.0, sigma: 1.0, k: 2, c_abs: 9.0 }
    }
}

impl GeometryConstants {
    pub fn validate(&self) -> Result<(), BoundsError> {
        for (name, v) in [("lambda0", self.lambda0), ("C", self.c), ("q", self.q), ("l", self.l), ("c_iso", self.c_iso), ("M", self.m)] {
            positive(name, v)?;
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(BoundsError::BadConstants(format!("sigma = {} must be nonnegative", self.sigma)));
        }
        if self.k == 0 {
            return Err(BoundsError::BadConstants("k must be positive".into()));
        }
        if self.l > self.lambda0 {
            return Err(BoundsError::BadConstants(format!("l = {} exceeds lambda0 = {}", self.l, self.lambda0)));
        }
        if self.c < 1.0 || self.m < 1.0 {
            return Err(BoundsError::BadConstants("C and M must be at least 1".into()));
        }
        if !(self.c_abs >= 9.0) {
            return Err(BoundsError::BadAbsoluteConstant(self.c_abs));
        }
        Ok(())
    }
}

/// Positive number stored through ln or ln ln, with an optional exact integer mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct LogNumber {
    scale: LogScale,
    exact: Option<BigUint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LogScale {
    /// The value is e^x.
    Ln(f64),
    /// The value is e^(e^y).
    LnLn(f64),
}

impl LogNumber {
    pub fn from_ln(x: f64) -> Self {
        LogNumber { scale: LogScale::Ln(x), exact: None }
    }

    pub fn from_lnln(y: f64) -> Self {
        if y < LN_MAX {
            Self::from_ln(y.exp())
        } else {
            LogNumber { scale: LogScale::LnLn(y), exact: None }
        }
    }

    pub fn from_exact(n: BigUint) -> Self {
        let mut out = Self::from_ln(ln_biguint(&n));
        out.exact = Some(n);
        out
    }

    /// e^(t1) · e^(e^y): the sum t1 + e^y in log space.
    fn from_ln_plus_exp(t1: f64, y: f64) -> Result<Self, BoundsError> {
        if y < LN_MAX {
            return Ok(Self::from_ln(t1 + y.exp()));
        }
        let lnln = if t1 > 0.0 { log_add_exp(t1.ln(), y) } else { y };
        if lnln.is_finite() {
            Ok(LogNumber { scale: LogScale::LnLn(lnln), exact: None })
        } else {
            Err(BoundsError::Overflow("value"))
        }
    }

    /// ln of the value, if it is a finite double.
    pub fn ln(&self) -> Option<f64> {
        match self.scale {
            LogScale::Ln(x) => Some(x),
            LogScale::LnLn(y) => (y < LN_MAX).then(|| y.exp()),
        }
    }

    pub fn log10(&self) -> Option<f64> {
        self.ln().map(|x| x / std::f64::consts::LN_10)
    }

    /// ln ln of the value; −∞ for values ≤ 1.
    pub fn lnln(&self) -> f64 {
        match self.scale {
            LogScale::Ln(x) if x > 0.0 => x.ln(),
            LogScale::Ln(_) => f64::NEG_INFINITY,
            LogScale::LnLn(y) => y,
        }
    }

    /// log₁₀ log₁₀ of the value; −∞ for values ≤ 10.
    pub fn log10_log10(&self) -> f64 {
        let ln10 = std::f64::consts::LN_10;
        match self.scale {
            LogScale::Ln(x) if x > ln10 => (x / ln10).log10(),
            LogScale::Ln(_) => f64::NEG_INFINITY,
            LogScale::LnLn(y) => (y - ln10.ln()) / ln10,
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.ln().map(f64::exp).filter(|v| v.is_finite())
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    /// `{ "log10": x | null, "log10log10": y | null, "exact": "digits" | null }`
    pub fn to_json(&self) -> serde_json::Value {
        let finite = |x: f64| x.is_finite().then_some(x);
        serde_json::json!({
            "log10": self.log10().and_then(finite),
            "log10log10": finite(self.log10_log10()),
            "exact": self.exact.as_ref().map(|n| n.to_string()),
        })
    }
}

impl PartialOrd for LogNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return Some(a.cmp(b));
        }
        match (self.ln(), other.ln()) {
            (Some(a), Some(b)) => a.partial_cmp(&b),
            _ => self.lnln().partial_cmp(&other.lnln()),
        }
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_string().parse::<f64>().map(f64::ln).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 64;
    let top: u64 = (n >> shift).try_into().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Which of the two λ constraints is tight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// 9λ√C = lε²(1 − ε).
    Analytic,
    /// πλ² = qε².
    Energy,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub binding: Binding,
}

/// λ = min{ lε²(1−ε)/(9√C), ε√(q/π) }.
pub fn choose_lambda(eps: f64, g: &GeometryConstants) -> Result<LambdaChoice, BoundsError> {
    g.validate()?;
    if !(eps > 0.0 && 8.0 * eps <= 1.0) {
        return Err(BoundsError::BadEps(eps));
    }
    let analytic = g.l * eps * eps * (1.0 - eps) / (9.0 * g.c.sqrt());
    let energy = eps * (g.q / PI).sqrt();
    let binding = match analytic.partial_cmp(&energy).expect("finite") {
        Ordering::Less => Binding::Analytic,
        Ordering::Greater => Binding::Energy,
        Ordering::Equal => Binding::Both,
    };
    Ok(LambdaChoice { lambda: analytic.min(energy), binding })
}

/// The parameter package θ, τ, α_v, η, Λ_v, Λ_e of a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem42Params {
    pub theta: f64,
    pub tau: f64,
    pub alpha: Vec<f64>,
    pub eta: f64,
    pub lambda_v: Vec<f64>,
    pub lambda_e: f64,
}

impl Theorem42Params {
    /// sup_w Λ_w over vertices and edges.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_v.iter().fold(self.lambda_e, |m, &x| m.max(x))
    }
}

pub fn theorem42_params(t: &RootedTree, eps: f64, lambda: f64, g: &GeometryConstants) -> Result<Theorem42Params, BoundsError> {
    g.validate()?;
    positive("eps", eps)?;
    positive("lambda", lambda)?;
    let sqrt_c = g.c.sqrt();
    let alpha: Vec<f64> = (0..t.n_vertices()).map(|v| (4.0 * eps.powi(3)).powi(t.degree(v) as i32)).collect();
    let lambda_v = alpha.iter().map(|a| 9.0 * PI * sqrt_c / (eps * eps) / a).collect();
    Ok(Theorem42Params {
        theta: eps,
        tau: 4.0 * eps,
        alpha,
        eta: lambda / (3.0 * sqrt_c * g.lambda0),
        lambda_v,
        lambda_e: g.m / (eps * eps),
    })
}

/// m = ⌊c(ℓ + A/λ²)⌋ and ln Λ = c(ℓ + A/λ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecorationSize {
    pub m: u64,
    pub log_lambda: f64,
}

pub fn intro_m_lambda(ell: u64, a: f64, lambda: f64, c_abs: f64) -> Result<DecorationSize, BoundsError> {
    positive("lambda", lambda)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(BoundsError::NonPositive { name: "A", value: a });
    }
    if !(c_abs >= 9.0) {
        return Err(BoundsError::BadAbsoluteConstant(c_abs));
    }
    let log_lambda = c_abs * (ell as f64 + a / (lambda * lambda));
    if !(log_lambda < u64::MAX as f64) {
        return Err(BoundsError::Overflow("m"));
    }
    Ok(DecorationSize { m: log_lambda.floor() as u64, log_lambda })
}

/// σδ^{−2k}ν, the bound on the size of the target net.
fn target_net(delta: f64, g: &GeometryConstants, nu_k: u64) -> f64 {
    g.sigma * delta.powi(-2 * g.k as i32) * nu_k as f64
}

/// N = (1 + σδ^{−2k}ν_K)^{(8πΛ²δ^{−2})^{binom(m+ℓ, 3)}} with Λ given through ln Λ.
pub fn intro_n(delta: f64, g: &GeometryConstants, nu_k: u64, log_lambda: f64, m: u64, ell: u64) -> Result<LogNumber, BoundsError> {
    g.validate()?;
    check_delta(delta)?;
    if !log_lambda.is_finite() {
        return Err(BoundsError::Overflow("log Lambda"));
    }
    let x = target_net(delta, g, nu_k);
    let b = binomial_f64(m + ell, 3);
    let ln_inner = x.ln_1p();
    if ln_inner == 0.0 {
        return Ok(LogNumber::from_ln(0.0));
    }
    let ln_base = (8.0 * PI).ln() + 2.0 * log_lambda - 2.0 * delta.ln();
    let ln_exponent = if b == 0.0 { 0.0 } else { b * ln_base };
    let lnln = ln_exponent + ln_inner.ln();
    if !lnln.is_finite() {
        return Err(BoundsError::Overflow("N"));
    }
    Ok(LogNumber::from_lnln(lnln))
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    if n < k {
        return 0.0;
    }
    if n <= 1000 {
        return binomial(n as usize, k as usize).to_string().parse().expect("integer");
    }
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) / 6.0
}

/// The count of the covering theorem and its factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCount {
    pub count: LogNumber,
    /// (4/δ²)^{μ−1}, the size of the net of the base.
    pub base_net: LogNumber,
    /// (8π)^μ (Λ/δ)^{2μ}, the size of each fiber net.
    pub fiber_net: LogNumber,
    /// |V| + |E| = μ + 1.
    pub pieces: usize,
}

pub fn thm316_count(delta: f64, mu: usize, lambda: f64, g: &GeometryConstants, nu_k: u64) -> Result<CoverCount, BoundsError> {
    g.validate()?;
    check_delta(delta)?;
    positive("Lambda", lambda)?;
    if mu < 3 {
        return Err(BoundsError::MuTooSmall(mu));
    }
    let mu_f = mu as f64;
    let ln_base_net = (mu_f - 1.0) * (4.0 / (delta * delta)).ln();
    let ln_fiber = mu_f * (8.0 * PI).ln() + 2.0 * mu_f * (lambda / delta).ln();
    let ln_exponent = ln_fiber + (mu_f + 1.0).ln();
    let ln_inner = target_net(delta, g, nu_k).ln_1p();
    let count = if ln_inner == 0.0 {
        LogNumber::from_ln(ln_base_net)
    } else {
        LogNumber::from_ln_plus_exp(ln_base_net, ln_exponent + ln_inner.ln())?
    };
    Ok(CoverCount {
        count,
        base_net: LogNumber::from_ln(ln_base_net),
        fiber_net: LogNumber::from_ln(ln_fiber),
        pieces: mu + 1,
    })
}

/// Area bound 2/(1 − cos(γ/2)) and its weakening 8π/γ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereNetBound {
    pub exact_form: f64,
    pub weak_form: f64,
}

pub fn sphere_net_bound(gamma: f64) -> Result<SphereNetBound, BoundsError> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(BoundsError::BadGamma(gamma));
    }
    Ok(SphereNetBound { exact_form: 2.0 / (1.0 - (gamma / 2.0).cos()), weak_form: 8.0 * PI / (gamma * gamma) })
}

/// ν_T·(1 + ν_W)^{ν_Z}, exact when it has at most a million digits.
pub fn mapspace_count(nu_t: u64, nu_w: u64, nu_z: u64) -> LogNumber {
    if nu_t == 0 {
        return LogNumber::from_exact(BigUint::from(0u32));
    }
    let ln = (nu_t as f64).ln() + nu_z as f64 * (1.0 + nu_w as f64).ln();
    if ln / std::f64::consts::LN_10 <= EXACT_DIGIT_CAP && nu_z <= u32::MAX as u64 {
        let n = BigUint::from(nu_t) * BigUint::from(1 + nu_w).pow(nu_z as u32);
        return LogNumber::from_exact(n);
    }
    LogNumber::from_ln(ln)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambda_examples() {
        let g = GeometryConstants::default();
        let got = choose_lambda(0.125, &g).unwrap();
        assert!((got.lambda - 7.0 / 4608.0).abs() < 1e-18);
        assert_eq!(got.binding, Binding::Analytic);
        let tiny_q = GeometryConstants { q: 1e-12, ..g };
        let got = choose_lambda(0.125, &tiny_q).unwrap();
        assert_eq!(got.binding, Binding::Energy);
        assert!((got.lambda - 0.125 * (1e-12 / PI).sqrt()).abs() < 1e-20);
        assert_eq!(choose_lambda(0.2, &g), Err(BoundsError::BadEps(0.2)));
    }

    #[test]
    fn lambda_constraints_on_random_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        for _ in 0..500 {
            let lambda0 = rng.gen_range(0.5..3.0);
            let g = GeometryConstants {
                lambda0,
                c: rng.gen_range(1.0..50.0),
                q: rng.gen_range(1e-6..10.0),
                l: lambda0 * rng.gen_range(0.01..1.0),
                ..GeometryConstants::default()
            };
            let eps = rng.gen_range(0.01..0.125);
            let LambdaChoice { lambda, .. } = choose_lambda(eps, &g).unwrap();
            let lhs2 = 9.0 * lambda * g.c.sqrt();
            let rhs2 = g.l * eps * eps * (1.0 - eps);
            let lhs3 = PI * lambda * lambda;
            let rhs3 = g.q * eps * eps;
            assert!(lhs2 <= rhs2 * (1.0 + 1e-12) && lhs3 <= rhs3 * (1.0 + 1e-12));
            let tight2 = (lhs2 - rhs2).abs() <= 1e-12 * rhs2;
            let tight3 = (lhs3 - rhs3).abs() <= 1e-12 * rhs3;
            assert!(tight2 || tight3);
        }
    }

    fn chain() -> RootedTree {
        use crate::trees::Tree;
        let ends = vec![vec![0], vec![0, 1], vec![0], vec![1], vec![1]];
        RootedTree::new(Tree::new(2, ends).unwrap(), 0).unwrap()
    }

    #[test]
    fn theorem42_examples() {
        let g = GeometryConstants::default();
        let lam = 7.0 / 4608.0;
        let p = theorem42_params(&chain(), 0.125, lam, &g).unwrap();
        assert_eq!((p.theta, p.tau), (0.125, 0.5));
        assert_eq!(p.alpha, vec![1.0 / 2097152.0; 2]);
        assert!(((p.eta * g.lambda0).powi(2) - lam * lam / (9.0 * g.c)).abs() < 1e-20);
        for (a, l) in p.alpha.iter().zip(&p.lambda_v) {
            assert!((a * l - 9.0 * PI * 64.0).abs() < 1e-9);
        }
        assert_eq!(p.lambda_e, 64.0);
    }

    #[test]
    fn m_lambda_examples() {
        let lam = 7.0f64 / 4608.0;
        assert_eq!(intro_m_lambda(0, lam * lam, lam, 12.0).unwrap(), DecorationSize { m: 12, log_lambda: 12.0 });
        assert_eq!(intro_m_lambda(1, 0.0, lam, 9.0).unwrap().m, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        for _ in 0..200 {
            let d = intro_m_lambda(rng.gen_range(0..10), rng.gen_range(0.0..1e-3), lam, rng.gen_range(9.0..20.0)).unwrap();
            assert!(d.m as f64 <= d.log_lambda);
        }
        assert_eq!(intro_m_lambda(0, 1.0, lam, 8.0), Err(BoundsError::BadAbsoluteConstant(8.0)));
    }

    #[test]
    fn n_examples() {
        let g = GeometryConstants { sigma: 9.0, k: 1, ..GeometryConstants::default() };
        let n = intro_n(1.0, &g, 1, 0.0, 2, 0).unwrap();
        assert!((n.value().unwrap() - 10.0).abs() < 1e-12);
        let g = GeometryConstants { sigma: 1.0, k: 1, ..GeometryConstants::default() };
        let n = intro_n(1.0, &g, 1, 0.0, 3, 0).unwrap();
        let expect = 8.0 * PI * 2f64.log10();
        assert!((n.log10().unwrap() - expect).abs() < 1e-12);
        assert!((n.log10().unwrap() - 7.565).abs() < 1e-3);
    }

    #[test]
    fn counts_are_monotone() {
        let g = GeometryConstants::default();
        let deltas = [1.0, 0.8, 0.5, 0.25, 0.1];
        for w in deltas.windows(2) {
            let a = intro_n(w[0], &g, 3, 2.0, 5, 1).unwrap();
            let b = intro_n(w[1], &g, 3, 2.0, 5, 1).unwrap();
            assert!(a < b);
            let a = thm316_count(w[0], 5, 3.0, &g, 3).unwrap().count;
            let b = thm316_count(w[1], 5, 3.0, &g, 3).unwrap().count;
            assert!(a < b);
        }
        for nu in 1..6 {
            assert!(intro_n(0.5, &g, nu, 1.0, 4, 0).unwrap() < intro_n(0.5, &g, nu + 1, 1.0, 4, 0).unwrap());
            assert!(thm316_count(0.5, 4, 2.0, &g, nu).unwrap().count < thm316_count(0.5, 4, 2.0, &g, nu + 1).unwrap().count);
        }
        for m in 3..40 {
            assert!(intro_n(0.5, &g, 2, 1.0, m, 0).unwrap() < intro_n(0.5, &g, 2, 1.0, m + 1, 0).unwrap());
        }
        for mu in 3..30 {
            assert!(thm316_count(0.5, mu, 2.0, &g, 2).unwrap().count < thm316_count(0.5, mu + 1, 2.0, &g, 2).unwrap().count);
        }
        for lam in [1.0, 2.0, 10.0, 1e3, 1e6] {
            assert!(thm316_count(0.5, 5, lam, &g, 2).unwrap().count < thm316_count(0.5, 5, lam * 2.0, &g, 2).unwrap().count);
            assert!(intro_n(0.5, &g, 2, lam.ln(), 6, 0).unwrap() < intro_n(0.5, &g, 2, lam.ln() + 1.0, 6, 0).unwrap());
        }
    }

    #[test]
    fn thm316_trivial_case() {
        let g = GeometryConstants { sigma: 0.0, ..GeometryConstants::default() };
        for mu in 3..12 {
            let c = thm316_count(1.0, mu, 1.0, &g, 7).unwrap();
            assert!((c.count.ln().unwrap() - (mu as f64 - 1.0) * 4f64.ln()).abs() < 1e-12);
            assert_eq!(c.pieces, mu + 1);
        }
        assert_eq!(thm316_count(1.0, 2, 1.0, &g, 1).unwrap_err(), BoundsError::MuTooSmall(2));
    }

    #[test]
    fn huge_values_stay_ordered() {
        let g = GeometryConstants::default();
        let lam = choose_lambda(0.125, &g).unwrap().lambda;
        let d = intro_m_lambda(0, 1.0, lam, g.c_abs).unwrap();
        let n = intro_n(0.5, &g, 1, d.log_lambda, d.m, 0).unwrap();
        assert!(n.log10().is_none());
        assert!(n.log10_log10() > 25.0);
        let d2 = intro_m_lambda(0, 2.0, lam, g.c_abs).unwrap();
        assert!(n < intro_n(0.5, &g, 1, d2.log_lambda, d2.m, 0).unwrap());
        assert!(LogNumber::from_ln(1e300) < n);
        let json = n.to_json();
        assert!(json["log10"].is_null() && json["log10log10"].is_f64());
    }

    #[test]
    fn sphere_bound_examples() {
        let b = sphere_net_bound(PI / 2.0).unwrap();
        assert!((b.exact_form - 2.0 / (1.0 - (PI / 4.0).cos())).abs() < 1e-12);
        assert!((b.exact_form - 6.828).abs() < 1e-3);
        assert!((sphere_net_bound(1.0).unwrap().weak_form - 25.13).abs() < 1e-2);
        for i in 1..1000 {
            let g = PI * i as f64 / 1000.0;
            let b = sphere_net_bound(g).unwrap();
            assert!(b.exact_form <= b.weak_form);
        }
        assert_eq!(sphere_net_bound(PI), Err(BoundsError::BadGamma(PI)));
    }

    #[test]
    fn mapspace_count_examples() {
        assert_eq!(mapspace_count(1, 0, 5).exact(), Some(&BigUint::from(1u32)));
        assert_eq!(mapspace_count(2, 3, 2).exact(), Some(&BigUint::from(32u32)));
        let big = mapspace_count(3, 9, 400);
        assert_eq!(big.exact().unwrap().to_string().len(), 401);
        assert!((big.log10().unwrap() - (400.0 + 3f64.log10())).abs() < 1e-9);
        assert!(mapspace_count(3, 9, 400) < mapspace_count(3, 9, 401));
    }
}
